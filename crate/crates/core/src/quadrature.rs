//! Adaptive one-dimensional integration.
//!
//! Globally adaptive bisection driven by the 21-point Gauss-Kronrod pair:
//! the interval with the largest local error estimate is split until the
//! summed estimate meets the tolerance or the subdivision budget is spent.
//! Everything is sequential, so identical inputs give bit-identical results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let ok_abs = self.abs_tol >= 0.0;
        let ok_rel = self.rel_tol >= 0.0;
        if !(ok_abs && ok_rel && (self.abs_tol > 0.0 || self.rel_tol > 0.0)) {
            return Err(domain(format!(
                "quadrature tolerances must be non-negative with one positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    /// Both tolerances divided by `factor`, for the inner layer of a nested
    /// integral.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// The tolerance this spec grants an integral of size `value`.
    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn converged(&self, spec: &QuadSpec) -> bool {
        self.error_estimate <= spec.tolerance(self.value)
    }

    /// The value, or a convergence error naming `what` if the estimate
    /// exceeds the tolerance.
    pub fn require(self, spec: &QuadSpec, what: &str) -> Result<f64> {
        if self.converged(spec) {
            Ok(self.value)
        } else {
            Err(Error::Convergence(format!(
                "{what}: error estimate {:.3e} exceeds tolerance {:.3e} after {} evaluations",
                self.error_estimate,
                spec.tolerance(self.value),
                self.evaluations
            )))
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

const RULE_POINTS: usize = 21;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn check(x: f64, y: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x, value: y })
    }
}

/// One application of the 21-point Kronrod rule with the embedded 10-point
/// Gauss rule. Returns (integral, error estimate).
pub(crate) fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = check(center, f(center))?;

    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut lower = [0.0; 10];
    let mut upper = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (xl, xu) = (center - dx, center + dx);
        let fl = check(xl, f(xl))?;
        let fu = check(xu, f(xu))?;
        lower[j] = fl;
        upper[j] = fu;
        kronrod += WGK[j] * (fl + fu);
        abs_sum += WGK[j] * (fl.abs() + fu.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fu);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((lower[j] - mean).abs() + (upper[j] - mean).abs());
    }

    let width = half.abs();
    let result = kronrod * half;
    let abs_sum = abs_sum * width;
    let asc = asc * width;
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    Ok((result, err))
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrate `f` over `[a, b]`.
///
/// Non-convergence is not an error: the returned `error_estimate` then
/// exceeds the requested tolerance and the caller decides (see
/// [`QuadResult::require`]). A non-finite integrand value is a hard error.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(domain(format!(
            "integrate_finite needs finite a <= b, got [{a}, {b}]"
        )));
    }

    let (value, error) = gauss_kronrod(&f, a, b)?;
    let mut evaluations = RULE_POINTS;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    heap.push(Segment { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;

    while heap.len() + frozen.len() < spec.max_subdivisions {
        if total_error <= spec.tolerance(total_value) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = mid > worst.a
            && mid < worst.b
            && (worst.b - worst.a) > 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs());
        if !splittable {
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = gauss_kronrod(&f, worst.a, mid)?;
        let (v2, e2) = gauss_kronrod(&f, mid, worst.b)?;
        evaluations += 2 * RULE_POINTS;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    let mut segments: Vec<Segment> = heap.into_vec();
    segments.extend(frozen);
    segments.sort_by(|s, t| s.a.total_cmp(&t.a));
    let value = neumaier_sum(segments.iter().map(|s| s.value));
    let error_estimate = neumaier_sum(segments.iter().map(|s| s.error)).max(0.0);
    Ok(QuadResult {
        value,
        error_estimate,
        evaluations,
    })
}

/// Integrate `f` over `[a, inf)` through `x = a + (1 - s)/s`, `s in (0, 1]`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    if !a.is_finite() {
        return Err(domain(format!(
            "integrate_semi_infinite needs a finite lower limit, got {a}"
        )));
    }
    integrate_finite(
        |s: f64| {
            let x = a + (1.0 - s) / s;
            let y = f(x);
            if y == 0.0 {
                0.0
            } else {
                y / (s * s)
            }
        },
        0.0,
        1.0,
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // Kronrod 21 is exact through degree 31.
        for n in [0, 1, 7, 20, 31] {
            let (v, _) = gauss_kronrod(&|x: f64| x.powi(n), 0.0, 1.0).unwrap();
            assert!((v - 1.0 / (n as f64 + 1.0)).abs() < 1e-15, "degree {n}");
        }
    }

    #[test]
    fn linear_on_unit_interval() {
        let r = integrate_finite(|x| x, 0.0, 1.0, &QuadSpec::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!(r.evaluations >= 1);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn long_interval_rational() {
        let spec = QuadSpec::default();
        let r = integrate_finite(|p| p / (p * p + 1.0).powi(2), 0.0, 1e6, &spec).unwrap();
        let exact = 0.5 - 1.0 / (2.0 * (1e12 + 1.0));
        assert!((r.value - exact).abs() < 1e-10, "{:?}", r);
        assert!(r.converged(&spec));
    }

    #[test]
    fn bump_kernel_is_stable_under_tightening() {
        let h = 1.0f64;
        let kernel = move |v: f64| {
            let e = h * h / (v * (v - h));
            if e < -745.0 {
                0.0
            } else {
                e.exp()
            }
        };
        let loose = QuadSpec::new(1e-10, 1e-8, 10_000).unwrap();
        let tight = loose.tightened(100.0);
        let a = integrate_finite(kernel, 0.0, h, &loose).unwrap();
        let b = integrate_finite(kernel, 0.0, h, &tight).unwrap();
        assert!(a.value > 0.0);
        assert!((a.value - b.value).abs() <= a.error_estimate.max(1e-12));
        assert!((b.value - 0.007_029_858_406_609_656).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_cases() {
        let spec = QuadSpec::default();
        let r = integrate_semi_infinite(|x| (-x).exp(), 0.0, &spec).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);

        let r = integrate_semi_infinite(|p| p.powi(3) / (p * p + 1.0).powi(3), 0.0, &spec).unwrap();
        assert!((r.value - 0.25).abs() < 1e-11);

        let mu2 = 2.0f64;
        let r = integrate_semi_infinite(
            |p| p / (2.0 * std::f64::consts::PI) * mu2.ln() / (p * p + 1.0).powi(2),
            0.0,
            &spec,
        )
        .unwrap();
        assert!((r.value - mu2.ln() / (4.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((r.value - 0.055_158_88).abs() < 1e-7);
    }

    #[test]
    fn slowly_decaying_tail() {
        // 1/p^4-type tail in the p^3 measure: int_1^inf p^-3 dp = 1/2.
        let r = integrate_semi_infinite(|p| p.powi(-3), 1.0, &QuadSpec::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nan_is_a_hard_error() {
        let err = integrate_finite(
            |x| if x > 0.5 { f64::NAN } else { x },
            0.0,
            1.0,
            &QuadSpec::default(),
        );
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let spec = QuadSpec::new(1e-14, 0.0, 2).unwrap();
        let r = integrate_finite(|x: f64| x.abs().sqrt().recip(), 0.0, 1.0, &spec).unwrap();
        assert!(!r.converged(&spec));
        assert!(r.require(&spec, "test").is_err());
    }

    #[test]
    fn invalid_arguments() {
        assert!(integrate_finite(|x| x, 1.0, 0.0, &QuadSpec::default()).is_err());
        assert!(QuadSpec::new(0.0, 0.0, 10).is_err());
        assert!(QuadSpec::new(1e-10, 0.0, 0).is_err());
    }

    #[test]
    fn degenerate_interval() {
        let r = integrate_finite(|x| x, 2.0, 2.0, &QuadSpec::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.evaluations >= 1);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * 3.0).sin() / (1.0 + x * x);
        let a = integrate_semi_infinite(f, 0.0, &QuadSpec::default()).unwrap();
        let b = integrate_semi_infinite(f, 0.0, &QuadSpec::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }
}
