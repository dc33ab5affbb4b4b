//! Partition-of-unity test functions.
//!
//! The boundary profile is
//!
//! ```text
//! chi(u, h) = N_h * int_{u-1}^{h} exp(h^2 / (v (v - h))) dv,    1 <= u <= 1 + h
//! ```
//!
//! with `chi = 1` below the ramp and `0` above it. Writing `v = h s` turns
//! the kernel into `exp(-1/(s(1-s)))` on `[0, 1]`, so `N_h = 1/(h I)` with a
//! single constant `I`. The running integral of the kernel is tabulated once
//! on a fine grid and completed inside a cell by one Kronrod rule.

use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::quadrature::{gauss_kronrod, neumaier_sum};

/// Exponent below which the kernel is flushed to zero.
const UNDERFLOW_EXPONENT: f64 = -745.0;

fn reduced_kernel(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let exponent = -1.0 / (s * (1.0 - s));
    if exponent <= UNDERFLOW_EXPONENT {
        0.0
    } else {
        exponent.exp()
    }
}

/// Cells of the cumulative kernel table on `[0, 1/2]`.
const CELLS: usize = 2048;
const CELL_WIDTH: f64 = 0.5 / CELLS as f64;

/// One 21-point Kronrod rule; cells are narrow enough for it to resolve the
/// kernel to rounding.
fn cell_integral(a: f64, b: f64) -> f64 {
    gauss_kronrod(&reduced_kernel, a, b)
        .expect("bump kernel is finite")
        .0
}

/// `table[i] = int_0^{i w} exp(-1/(t(1-t))) dt` with `w = 1/(2 CELLS)`.
fn kernel_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cells: Vec<f64> = (0..CELLS)
            .map(|i| cell_integral(i as f64 * CELL_WIDTH, (i + 1) as f64 * CELL_WIDTH))
            .collect();
        (0..=CELLS)
            .map(|i| neumaier_sum(cells[..i].iter().copied()))
            .collect()
    })
}

/// `int_0^s exp(-1/(t(1-t))) dt` for `0 <= s <= 1/2`.
fn kernel_mass(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let table = kernel_table();
    let i = ((s / CELL_WIDTH) as usize).min(CELLS);
    let left = i as f64 * CELL_WIDTH;
    if s == left {
        table[i]
    } else {
        table[i] + cell_integral(left, s)
    }
}

/// `int_0^1 exp(-1/(s(1-s))) ds`.
fn kernel_total() -> f64 {
    2.0 * kernel_table()[CELLS]
}

/// `chi` as a function of the reduced ramp coordinate `s = (u - 1)/h`.
fn chi_reduced(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else if s >= 0.5 {
        // kernel is symmetric about 1/2: int_s^1 = int_0^{1-s}
        kernel_mass(1.0 - s) / kernel_total()
    } else {
        1.0 - kernel_mass(s) / kernel_total()
    }
}

/// Derivative of [`chi_reduced`] with respect to `s`.
fn chi_reduced_slope(s: f64) -> f64 {
    -reduced_kernel(s) / kernel_total()
}

/// The boundary profile `chi(., h)` for a fixed width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryProfile {
    h: f64,
    normalization: f64,
}

impl BoundaryProfile {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(domain(format!(
                "boundary width h must be positive, got {h}"
            )));
        }
        Ok(Self {
            h,
            normalization: 1.0 / (h * kernel_total()),
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `N_h`, fixed by `chi(1, h) = 1`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn eval(&self, u: f64) -> f64 {
        chi_reduced((u - 1.0) / self.h)
    }

    /// `d chi / du`.
    pub fn slope(&self, u: f64) -> f64 {
        chi_reduced_slope((u - 1.0) / self.h) / self.h
    }
}

/// `chi(u, h)`: 1 for `u <= 1`, 0 for `u >= 1 + h`, smooth in between.
pub fn chi(u: f64, h: f64) -> Result<f64> {
    Ok(BoundaryProfile::new(h)?.eval(u))
}

/// The ultraviolet test function `f>` with running width
/// `h(X) = mu2 X^alpha - 1`, together with the infrared weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PUTestFunction {
    mu2: f64,
    alpha: f64,
    x_max: f64,
    ir_width: f64,
}

impl PUTestFunction {
    /// Requires `mu2 > 1` and `0 < alpha < 1`. The infrared weight width
    /// defaults to `mu2 - 1`.
    pub fn new(mu2: f64, alpha: f64) -> Result<Self> {
        if !(mu2 > 1.0) || !mu2.is_finite() {
            return Err(domain(format!(
                "the test function needs μ² > 1 (mu2 > 1), got {mu2}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(Self {
            mu2,
            alpha,
            x_max: mu2.powf(1.0 / (1.0 - alpha)),
            ir_width: mu2 - 1.0,
        })
    }

    /// Override the width of the infrared weight ramp.
    pub fn with_ir_width(mut self, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(domain(format!(
                "infrared width must be positive, got {width}"
            )));
        }
        self.ir_width = width;
        Ok(self)
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ir_width(&self) -> f64 {
        self.ir_width
    }

    /// End of the support, `(mu2)^(1/(1-alpha))`.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// `g(X) = X^(alpha-1)`.
    pub fn g(&self, x: f64) -> f64 {
        x.powf(self.alpha - 1.0)
    }

    /// Running ramp width `h(X) = mu2 X^alpha - 1`.
    pub fn ramp_width(&self, x: f64) -> f64 {
        self.mu2 * x.powf(self.alpha) - 1.0
    }

    fn ramp_coordinate(&self, x: f64) -> f64 {
        (x - 1.0) / self.ramp_width(x)
    }

    /// `f>(X)`; radial, so negative arguments are reflected.
    pub fn f_sup(&self, x: f64) -> f64 {
        let x = x.abs();
        if x <= 1.0 {
            1.0
        } else if x >= self.x_max {
            0.0
        } else {
            chi_reduced(self.ramp_coordinate(x))
        }
    }

    /// `d f> / dX` for `X >= 0`, from the kernel itself.
    pub fn f_sup_slope(&self, x: f64) -> f64 {
        if x <= 1.0 || x >= self.x_max {
            return 0.0;
        }
        let h = self.ramp_width(x);
        let dh = self.alpha * self.mu2 * x.powf(self.alpha - 1.0);
        let ds = (h - (x - 1.0) * dh) / (h * h);
        chi_reduced_slope(self.ramp_coordinate(x)) * ds
    }

    /// `w(X) = chi(h - X + 1, h)` with the fixed infrared width `h`: zero at
    /// the origin, one for `X >= h`.
    pub fn weight_w(&self, x: f64) -> f64 {
        chi_reduced(1.0 - x.abs() / self.ir_width)
    }

    /// `dw/dX` for `X >= 0`.
    pub fn weight_w_slope(&self, x: f64) -> f64 {
        -chi_reduced_slope(1.0 - x / self.ir_width) / self.ir_width
    }

    /// `1 - w(X) = chi(1 + X, h)`: equal to one with all derivatives
    /// vanishing at the origin, i.e. a subtraction weight for the Taylor
    /// surgery at `X = 0`.
    pub fn subtraction_weight(&self, x: f64) -> f64 {
        chi_reduced(x.abs() / self.ir_width)
    }

    /// `f<(X) = w(X) f>(X)`.
    pub fn f_inf(&self, x: f64) -> f64 {
        self.weight_w(x) * self.f_sup(x)
    }
}

/// One sample of the test-function profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub x: f64,
    pub f_sup: f64,
    pub w: f64,
    pub f_inf: f64,
}

/// `n` evenly spaced samples of `(X, f>, w, f<)` on `[0, 1.1 X_max]`.
pub fn sample_profile(pu: &PUTestFunction, n: usize) -> Result<Vec<ProfileSample>> {
    if n < 2 {
        return Err(domain(format!("need at least two samples, got {n}")));
    }
    let upper = 1.1 * pu.x_max();
    let xs: Vec<f64> = (0..n).map(|i| upper * i as f64 / (n - 1) as f64).collect();
    Ok(crate::par::map(&xs, |&x| ProfileSample {
        x,
        f_sup: pu.f_sup(x),
        w: pu.weight_w(x),
        f_inf: pu.f_inf(x),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_total_matches_reference() {
        // mpmath, 30 digits
        assert!((kernel_total() - 0.007_029_858_406_609_656).abs() < 1e-17);
        let p = BoundaryProfile::new(0.5).unwrap();
        assert!((p.normalization() * 0.5 * kernel_total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chi_endpoints_and_midpoint() {
        assert_eq!(chi(1.0, 0.5).unwrap(), 1.0);
        assert_eq!(chi(1.5, 0.5).unwrap(), 0.0);
        assert_eq!(chi(0.2, 0.5).unwrap(), 1.0);
        assert_eq!(chi(7.0, 0.5).unwrap(), 0.0);
        assert!((chi(1.25, 0.5).unwrap() - 0.5).abs() < 1e-14);
        assert!(chi(1.0, 0.0).is_err());
        assert!(chi(1.0, -1.0).is_err());
    }

    #[test]
    fn chi_reference_values() {
        // mpmath: int_s^1 kernel / int_0^1 kernel
        for (s, want) in [
            (0.1, 0.999_981_902_134_696_1),
            (0.25, 0.968_245_042_272_362_2),
            (0.3, 0.920_935_093_501_876_9),
        ] {
            let got = chi(1.0 + s * 2.0, 2.0).unwrap();
            assert!((got - want).abs() < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn chi_unity_partition() {
        for h in [0.25, 0.5, 1.0] {
            let p = BoundaryProfile::new(h).unwrap();
            for i in 0..100 {
                let x = 1.0 - h + h * (i as f64 + 1.0) / 100.0;
                let sum = p.eval(2.0 - x) + p.eval(x + h);
                assert!((sum - 1.0).abs() < 1e-12, "h = {h}, x = {x}");
            }
        }
    }

    #[test]
    fn chi_is_monotone_and_bounded() {
        let p = BoundaryProfile::new(0.7).unwrap();
        let mut last = 1.0;
        for i in 0..=200 {
            let u = 0.9 + 0.9 * i as f64 / 200.0;
            let v = p.eval(u);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn chi_flat_at_both_ends() {
        // distance from the plateau values and the slope both vanish faster
        // than a high power of the distance to the ramp ends
        let h = 0.5;
        let p = BoundaryProfile::new(h).unwrap();
        for frac in [0.03, 0.01] {
            let delta: f64 = frac * h;
            let bound = delta.powi(6);
            assert!(1.0 - p.eval(1.0 + delta) < bound);
            assert!(p.eval(1.0 + h - delta) < bound);
            assert!(p.slope(1.0 + delta).abs() < bound);
            assert!(p.slope(1.0 + h - delta).abs() < bound);
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let p = BoundaryProfile::new(0.8).unwrap();
        for u in [1.1, 1.3, 1.4, 1.7] {
            let fd = (p.eval(u + 1e-6) - p.eval(u - 1e-6)) / 2e-6;
            assert!((fd - p.slope(u)).abs() < 1e-7, "u = {u}");
        }
    }

    #[test]
    fn test_function_construction() {
        let pu = PUTestFunction::new(2.0, 0.5).unwrap();
        assert_eq!(pu.x_max(), 4.0);
        assert!((pu.g(pu.x_max()) - 0.5).abs() < 1e-15);
        assert!((1.0 + pu.ramp_width(pu.x_max()) - pu.x_max()).abs() < 1e-12);
        for i in 0..=50 {
            let x = 1.0 + 3.0 * i as f64 / 50.0;
            assert!(pu.mu2() * x * pu.g(x) > 1.0 - 1e-15);
        }
        assert!(PUTestFunction::new(1.0, 0.5).is_err());
        assert!(PUTestFunction::new(0.5, 0.5).is_err());
        assert!(PUTestFunction::new(2.0, 1.0).is_err());
        assert!(PUTestFunction::new(2.0, 0.0).is_err());
        assert!(pu.with_ir_width(0.0).is_err());
    }

    #[test]
    fn f_sup_regions() {
        let pu = PUTestFunction::new(2.0, 0.5).unwrap();
        assert_eq!(pu.f_sup(0.5), 1.0);
        assert_eq!(pu.f_sup(1.0), 1.0);
        assert_eq!(pu.f_sup(4.1), 0.0);
        assert!((pu.f_sup(1.0 + 1e-6) - 1.0).abs() < 1e-15);
        let eps = 1e-9 * pu.x_max();
        assert_eq!(pu.f_sup(pu.x_max() + eps), 0.0);
        // the ramp is flat at X_max to all orders, so positivity is only
        // resolvable away from the endpoint in double precision
        assert!(pu.f_sup(pu.x_max() - eps) >= 0.0);
        assert!(pu.f_sup(0.99 * pu.x_max()) > 0.0);
        for i in 0..=400 {
            let x = 5.0 * i as f64 / 400.0;
            let v = pu.f_sup(x);
            assert!((0.0..=1.0).contains(&v));
            assert!((0.0..=1.0).contains(&pu.f_inf(x)));
        }
    }

    #[test]
    fn f_sup_slope_matches_finite_difference() {
        let pu = PUTestFunction::new(2.0, 0.3).unwrap();
        for x in [1.2, 1.8, 2.3, 2.6] {
            let fd = (pu.f_sup(x + 1e-6) - pu.f_sup(x - 1e-6)) / 2e-6;
            assert!((fd - pu.f_sup_slope(x)).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn weight_and_f_inf() {
        let pu = PUTestFunction::new(1.5, 0.5).unwrap();
        let h = pu.ir_width();
        assert_eq!(h, 0.5);
        assert_eq!(pu.weight_w(0.0), 0.0);
        assert_eq!(pu.weight_w(h), 1.0);
        assert!((pu.weight_w(0.5 * h) - 0.5).abs() < 1e-14);
        assert_eq!(pu.f_inf(0.0), 0.0);
        assert_eq!(pu.f_inf(0.75), 1.0);
        assert_eq!(pu.f_inf(pu.x_max() * 1.01), 0.0);
        for i in 0..=20 {
            let x = h * i as f64 / 20.0;
            assert!((pu.weight_w(x) + pu.subtraction_weight(x) - 1.0).abs() < 1e-12);
        }
        let wide = PUTestFunction::new(2.0, 0.5)
            .unwrap()
            .with_ir_width(1.0)
            .unwrap();
        assert_eq!(wide.weight_w(0.0), 0.0);
    }

    #[test]
    fn f_inf_is_flat_at_origin() {
        let pu = PUTestFunction::new(2.0, 0.5).unwrap();
        for step in [1e-2, 1e-3] {
            for order in 1..=4usize {
                // central differences centred at 0
                let mut diff = 0.0;
                let mut binom = 1.0;
                for j in 0..=order {
                    if j > 0 {
                        binom *= (order + 1 - j) as f64 / j as f64;
                    }
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let x = (order as f64 / 2.0 - j as f64) * step;
                    diff += sign * binom * pu.f_inf(x);
                }
                let derivative = diff / step.powi(order as i32);
                assert!(
                    derivative.abs() < step.powi(4),
                    "order {order}, step {step}: {derivative}"
                );
            }
        }
    }

    #[test]
    fn profile_sampling() {
        let pu = PUTestFunction::new(2.0, 0.5).unwrap();
        let samples = sample_profile(&pu, 512).unwrap();
        assert_eq!(samples.len(), 512);
        assert_eq!(samples[0].x, 0.0);
        assert!((samples[511].x - 4.4).abs() < 1e-12);
        assert!(sample_profile(&pu, 1).is_err());
    }
}
