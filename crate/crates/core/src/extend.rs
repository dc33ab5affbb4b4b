//! Singular orders and extensions of radial distributions.
//!
//! Ultraviolet: a rational kernel `T(X) = X^a / (X lambda2 + m2)^b` paired
//! with the test function `f>` is rewritten as a smooth function integrated
//! against the constant `1`. Two closed forms are provided, the
//! integrated-by-parts form ([`extend_uv_form_a`]) and the change-of-variable
//! form ([`extend_uv_form_b`]).
//!
//! Infrared: the homogeneous powers `X^-(k+1)` are extended to the origin as
//! a logarithmic derivative plus a multiple of `delta^(k)`.

use std::cell::RefCell;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{domain, Error, Result};
use crate::expr::RadialExpr;
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadSpec};
use crate::special::harmonic_binomial_exact;
use crate::taylor::{factorial, pw_apply_with, FiniteDifferenceProbe, SmoothProbe};
use crate::testfunc::PUTestFunction;

/// Radial kernels with a definite power law at the origin.
pub trait RadialFamily {
    fn eval(&self, x: f64) -> f64;

    /// The exponent `p` with `T(X) ~ X^p` as `X -> 0`.
    fn small_x_power(&self) -> i64;
}

/// `T(X) = X^a / (X lambda2 + m2)^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalRadial {
    pub a: u32,
    pub b: u32,
    pub lambda2: f64,
    pub m2: f64,
}

impl RationalRadial {
    pub fn new(a: u32, b: u32, lambda2: f64, m2: f64) -> Result<Self> {
        if b == 0 {
            return Err(domain("denominator power b must be positive"));
        }
        if !(lambda2 > 0.0 && lambda2.is_finite()) {
            return Err(domain(format!("lambda2 must be positive, got {lambda2}")));
        }
        if !(m2 >= 0.0 && m2.is_finite()) {
            return Err(domain(format!("m2 must be non-negative, got {m2}")));
        }
        Ok(Self { a, b, lambda2, m2 })
    }

    /// The propagator `1 / (X lambda2 + m2)`.
    pub fn propagator(lambda2: f64, m2: f64) -> Result<Self> {
        Self::new(0, 1, lambda2, m2)
    }

    /// `X^extra * T(X)` as an expression.
    fn expr_times_power(&self, extra: u32) -> RadialExpr {
        RadialExpr::monomial(
            self.lambda2,
            self.m2,
            1.0,
            (self.a + extra) as f64,
            0,
            -(self.b as i32),
        )
    }
}

impl RadialFamily for RationalRadial {
    fn eval(&self, x: f64) -> f64 {
        x.powi(self.a as i32) / (x * self.lambda2 + self.m2).powi(self.b as i32)
    }

    fn small_x_power(&self) -> i64 {
        if self.m2 > 0.0 {
            self.a as i64
        } else {
            self.a as i64 - self.b as i64
        }
    }
}

/// `T(X) = X^-(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PurePower {
    pub k: u32,
}

impl RadialFamily for PurePower {
    fn eval(&self, x: f64) -> f64 {
        x.powi(-(self.k as i32 + 1))
    }

    fn small_x_power(&self) -> i64 {
        -(self.k as i64 + 1)
    }
}

/// Scaling degree at the origin minus `d`.
pub fn ir_singular_order<T: RadialFamily + ?Sized>(t: &T, d: u32) -> i64 {
    -t.small_x_power() - d as i64
}

/// Large-`X` power counting: `d + a - b`.
pub fn uv_singular_order(t: &RationalRadial, d: u32) -> i64 {
    d as i64 + t.a as i64 - t.b as i64
}

/// Exponent of the running cut in `g(X) = X^(alpha-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    /// `0 < alpha < 1`.
    Value(f64),
    /// `alpha -> 1`, taken analytically: `g = 1` on the whole half-line.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UvScheme {
    FormA,
    FormALimit,
    FormB,
}

impl UvScheme {
    pub fn name(self) -> &'static str {
        match self {
            UvScheme::FormA => "formA",
            UvScheme::FormALimit => "formA_limit",
            UvScheme::FormB => "formB",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvMeta {
    pub k: u32,
    pub d: u32,
    pub mu2: f64,
    pub scheme: UvScheme,
    /// `None` unless the scheme is [`UvScheme::FormA`].
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone)]
enum Evaluator {
    Closed { expr: RadialExpr, support_end: f64 },
    Transformed { q: RadialExpr, prefactor: f64 },
}

/// The ultraviolet extension: a smooth function of `X` whose integral against
/// the radial measure reproduces the pairing with `f>`.
#[derive(Debug, Clone)]
pub struct ExtendedUV {
    meta: UvMeta,
    evaluator: Evaluator,
    spec: QuadSpec,
}

fn check_order(t: &RationalRadial, d: u32, k: u32) -> Result<()> {
    let expected = uv_singular_order(t, d);
    if expected < 0 {
        return Err(domain(format!(
            "kernel is integrable at large X in d = {d}; no extension is needed"
        )));
    }
    if expected != k as i64 {
        return Err(domain(format!(
            "order k = {k} is inconsistent with the ultraviolet singular order {expected}"
        )));
    }
    Ok(())
}

fn check_mu2(mu2: f64) -> Result<()> {
    if !(mu2 >= 1.0) || !mu2.is_finite() {
        return Err(domain(format!(
            "the extension needs μ² > 1 (μ² = 1 gives zero), got {mu2}"
        )));
    }
    Ok(())
}

/// `F_k(u) = int_1^u (1-t)^k / t^(k+1) dt`, with `u = mu2 X^e` and `e = 0`
/// in the limit scheme.
fn f_k_expr(k: u32, mu2: f64, e: f64, lambda2: f64, m2: f64) -> RadialExpr {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let log_mu2 = mu2.ln();
    let mut f = RadialExpr::monomial(lambda2, m2, sign * log_mu2, 0.0, 0, 0);
    if e != 0.0 {
        f = f.add(&RadialExpr::monomial(lambda2, m2, sign * e, 0.0, 1, 0));
    }
    let mut binom = 1.0;
    for j in 0..k {
        if j > 0 {
            binom *= (k + 1 - j) as f64 / j as f64;
        }
        let jm = j as f64 - k as f64;
        let c = binom * if j % 2 == 0 { 1.0 } else { -1.0 } / jm;
        // c (u^(j-k) - 1)
        f = f
            .add(&RadialExpr::monomial(
                lambda2,
                m2,
                c * mu2.powf(jm),
                e * jm,
                0,
                0,
            ))
            .add(&RadialExpr::monomial(lambda2, m2, -c, 0.0, 0, 0));
    }
    f
}

/// `(-1)^k (k+1) d^(k+1)/dX^(k+1) [ X^(k+1)/(k+1)! T(X) F_k(mu2 g(X)) ]`.
///
/// With [`Alpha::Value`] the evaluator vanishes for `X >= X_max`, where
/// `f>` does; [`Alpha::Limit`] extends it to the whole half-line.
pub fn extend_uv_form_a(
    t: &RationalRadial,
    d: u32,
    k: u32,
    mu2: f64,
    alpha: Alpha,
) -> Result<ExtendedUV> {
    check_order(t, d, k)?;
    check_mu2(mu2)?;
    let (e, support_end, scheme, alpha_value) = match alpha {
        Alpha::Limit => (0.0, f64::INFINITY, UvScheme::FormALimit, None),
        Alpha::Value(a) => {
            if !(a > 0.0 && a < 1.0) {
                return Err(domain(format!("alpha must lie in (0, 1], got {a}")));
            }
            if mu2 == 1.0 {
                return Err(domain("a running cut with alpha < 1 needs μ² > 1"));
            }
            (a - 1.0, mu2.powf(1.0 / (1.0 - a)), UvScheme::FormA, Some(a))
        }
    };
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let g = t
        .expr_times_power(k + 1)
        .mul(&f_k_expr(k, mu2, e, t.lambda2, t.m2))
        .scale(sign * (k + 1) as f64 / factorial(k as usize + 1));
    Ok(ExtendedUV {
        meta: UvMeta {
            k,
            d,
            mu2,
            scheme,
            alpha: alpha_value,
        },
        evaluator: Evaluator::Closed {
            expr: g.nth_derivative(k as usize + 1),
            support_end,
        },
        spec: QuadSpec::default(),
    })
}

/// `(-1)^k/k! int_1^mu2 (1-t)^k t^-(k+d+1) Q(X/t) dt` with
/// `Q(Y) = d^(k+1)/dY^(k+1) [Y^(k+1) T(Y)]` in closed form; the `t`-integral
/// is done by quadrature.
pub fn extend_uv_form_b(t: &RationalRadial, d: u32, k: u32, mu2: f64) -> Result<ExtendedUV> {
    check_order(t, d, k)?;
    check_mu2(mu2)?;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(ExtendedUV {
        meta: UvMeta {
            k,
            d,
            mu2,
            scheme: UvScheme::FormB,
            alpha: None,
        },
        evaluator: Evaluator::Transformed {
            q: t.expr_times_power(k + 1).nth_derivative(k as usize + 1),
            prefactor: sign / factorial(k as usize),
        },
        spec: QuadSpec {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_subdivisions: 2_000,
        },
    })
}

impl ExtendedUV {
    pub fn meta(&self) -> UvMeta {
        self.meta
    }

    /// Right end of the support (`+inf` unless the scheme has a running cut).
    pub fn support_end(&self) -> f64 {
        match &self.evaluator {
            Evaluator::Closed { support_end, .. } => *support_end,
            Evaluator::Transformed { .. } => f64::INFINITY,
        }
    }

    /// Value at `X >= 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain(format!("X must be non-negative, got {x}")));
        }
        match &self.evaluator {
            Evaluator::Closed { expr, support_end } => {
                Ok(if x >= *support_end { 0.0 } else { expr.eval(x) })
            }
            Evaluator::Transformed { q, prefactor } => {
                if self.meta.mu2 == 1.0 {
                    return Ok(0.0);
                }
                let k = self.meta.k as i32;
                let power = -(k + self.meta.d as i32 + 1);
                let integral = integrate_finite(
                    |t| (1.0 - t).powi(k) * t.powi(power) * q.eval(x / t),
                    1.0,
                    self.meta.mu2,
                    &self.spec,
                )?
                .require(&self.spec, "change-of-variable t-integral")?;
                Ok(prefactor * integral)
            }
        }
    }

    /// `int_0^inf X^(d-1) T~(X) dX`.
    pub fn integrate_radial(&self, spec: &QuadSpec) -> Result<f64> {
        let d = self.meta.d as i32;
        let err: RefCell<Option<Error>> = RefCell::new(None);
        let f = |x: f64| match self.eval(x) {
            Ok(v) => x.powi(d - 1) * v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let end = self.support_end();
        let result = if end.is_finite() {
            let lower = integrate_finite(f, 0.0, 1.0_f64.min(end), spec)?
                .require(spec, "extension integral")?;
            let upper = if end > 1.0 {
                integrate_finite(f, 1.0, end, spec)?.require(spec, "extension integral")?
            } else {
                0.0
            };
            lower + upper
        } else {
            let lower =
                integrate_finite(f, 0.0, 1.0, spec)?.require(spec, "extension integral")?;
            lower + integrate_semi_infinite(f, 1.0, spec)?.require(spec, "extension integral")?
        };
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(result),
        }
    }

    /// `n` evenly spaced samples `(X, T~(X))` on `[0, x_hi]`.
    pub fn sample(&self, n: usize, x_hi: f64) -> Result<Vec<(f64, f64)>> {
        if n < 2 || !(x_hi > 0.0) {
            return Err(domain("need n >= 2 samples on a non-empty range"));
        }
        let xs: Vec<f64> = (0..n).map(|i| x_hi * i as f64 / (n - 1) as f64).collect();
        crate::par::map(&xs, |&x| self.eval(x).map(|v| (x, v)))
            .into_iter()
            .collect()
    }
}

/// Both sides of the defining relation for the ultraviolet extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    /// `int X^(d-1) T(X) f>(X) dX`.
    pub raw: f64,
    /// The pairing after the Taylor subtraction, with `f>` differentiated
    /// numerically.
    pub subtracted: f64,
    /// `int X^(d-1) T~(X) dX` for the form-A evaluator with the same `alpha`.
    pub extension: f64,
}

impl OracleReport {
    pub fn discrepancy(&self) -> f64 {
        (self.subtracted - self.extension).abs()
    }
}

/// Outer tolerance of the oracle, two orders below the agreement it is
/// used to test; the inner integrals run 100 times tighter. Finite
/// differences of `f>` carry noise near `1e-12`, so going further only
/// makes the inner integrals subdivide without converging.
fn oracle_spec() -> QuadSpec {
    QuadSpec {
        abs_tol: 1e-8,
        rel_tol: 1e-8,
        max_subdivisions: 2_000,
    }
}

/// Direct pairings of `T` with `f>` by nested quadrature, set against the
/// form-A extension.
///
/// The subtracted kernel is
/// `S(X) = -X^(k+1)/k! int_1^(mu2 g(X)) (1-t)^k f>^(k+1)(t X) dt`.
pub fn pair_extension_oracle(
    t: &RationalRadial,
    d: u32,
    k: u32,
    pu: &PUTestFunction,
) -> Result<OracleReport> {
    check_order(t, d, k)?;
    let spec = oracle_spec();
    let inner = spec.tightened(100.0);
    let x_max = pu.x_max();
    let dm1 = d as i32 - 1;
    let probe = FiniteDifferenceProbe::new(|x: f64| pu.f_sup(x), k as usize + 1);

    let raw_f = |x: f64| x.powi(dm1) * t.eval(x) * pu.f_sup(x);
    let raw = integrate_finite(raw_f, 0.0, 1.0, &spec)?.require(&spec, "raw pairing")?
        + integrate_finite(raw_f, 1.0, x_max, &spec)?.require(&spec, "raw pairing")?;

    let kernel = |x: f64| -> Result<f64> {
        // f>^(k+1)(tX) vanishes unless 1 < tX < X_max
        let lo = 1.0f64.max(1.0 / x);
        let hi = (pu.mu2() * pu.g(x)).min(x_max / x);
        if !(hi > lo) {
            return Ok(0.0);
        }
        let v = integrate_finite(
            |s| (1.0 - s).powi(k as i32) * probe.deriv(k as usize + 1, s * x),
            lo,
            hi,
            &inner,
        )?
        .require(&inner, "subtracted kernel")?;
        Ok(-x.powi(k as i32 + 1) / factorial(k as usize) * v)
    };
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let sub_f = |x: f64| match kernel(x) {
        Ok(v) => x.powi(dm1) * t.eval(x) * v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    // mu2 X^alpha > 1 is needed for the t-range to be non-empty
    let x_lo = pu.mu2().powf(-1.0 / pu.alpha());
    let subtracted = integrate_finite(sub_f, x_lo, 1.0, &spec)?
        .require(&spec, "subtracted pairing")?
        + integrate_finite(sub_f, 1.0, x_max, &spec)?.require(&spec, "subtracted pairing")?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }

    let extension =
        extend_uv_form_a(t, d, k, pu.mu2(), Alpha::Value(pu.alpha()))?.integrate_radial(&spec)?;
    Ok(OracleReport {
        raw,
        subtracted,
        extension,
    })
}

/// The infrared extension of `X^-(k+1)`:
/// `log_part(X) = (-1)^k/k! d^(k+1)/dX^(k+1) log X = X^-(k+1)` away from the
/// origin, plus `delta_coeff * delta^(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedIR {
    pub k: u32,
    pub lambda2: f64,
    pub mu_tilde: f64,
    pub delta_coeff: f64,
}

impl ExtendedIR {
    pub fn log_part(&self, x: f64) -> f64 {
        x.powi(-(self.k as i32 + 1))
    }
}

/// `2 (-1)^k H_k / k!`, from the exact alternating binomial sum.
fn ir_delta_coefficient(k: u32) -> f64 {
    let mut fact = BigInt::from(1u32);
    for i in 2..=k {
        fact *= i;
    }
    let sign = if k.is_multiple_of(2) { 2 } else { -2 };
    let c = harmonic_binomial_exact(k) * BigRational::from_integer(BigInt::from(sign))
        / BigRational::from_integer(fact);
    c.to_f64().expect("small rational")
}

pub fn extend_ir(t: PurePower, mu_tilde: f64, lambda2: f64) -> Result<ExtendedIR> {
    if !(mu_tilde > 0.0 && mu_tilde.is_finite()) {
        return Err(domain(format!("mu_tilde must be positive, got {mu_tilde}")));
    }
    if !(lambda2 > 0.0 && lambda2.is_finite()) {
        return Err(domain(format!("lambda2 must be positive, got {lambda2}")));
    }
    Ok(ExtendedIR {
        k: t.k,
        lambda2,
        mu_tilde,
        delta_coeff: ir_delta_coefficient(t.k),
    })
}

fn ir_spec() -> QuadSpec {
    QuadSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_subdivisions: 4_000,
    }
}

/// `-1/k! int_0^inf log(mu_tilde X) phi^(k+1)(X) dX`.
fn ir_log_pairing<P: SmoothProbe + ?Sized>(
    k: u32,
    log_mu: f64,
    phi: &P,
    spec: &QuadSpec,
) -> Result<f64> {
    let n = k as usize + 1;
    if n > phi.max_order() {
        return Err(Error::OrderOverflow {
            requested: n,
            available: phi.max_order(),
        });
    }
    let f = |x: f64| (log_mu + x.ln()) * phi.deriv(n, x);
    let v = integrate_finite(f, 0.0, 1.0, spec)?.require(spec, "infrared log pairing")?
        + integrate_semi_infinite(f, 1.0, spec)?.require(spec, "infrared log pairing")?;
    Ok(-v / factorial(k as usize))
}

/// `<T_ext, phi>` with the derivatives moved onto `phi`:
/// `-1/k! int log(mu_tilde X) phi^(k+1) dX + delta_coeff (-1)^k phi^(k)(0)`.
pub fn pair_ir<P: SmoothProbe + ?Sized>(ext: &ExtendedIR, phi: &P) -> Result<f64> {
    let spec = ir_spec();
    let smooth = ir_log_pairing(ext.k, ext.mu_tilde.ln(), phi, &spec)?;
    let sign = if ext.k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(smooth + ext.delta_coeff * sign * phi.checked_deriv(ext.k as usize, 0.0)?)
}

/// `log mu_eff = int_0^inf log X d(1 - w)(X)` for the subtraction weight of `pu`:
/// the scale at which the sharp-cut closed form reproduces the smooth weight.
pub fn effective_log_mu_tilde(pu: &PUTestFunction) -> Result<f64> {
    let spec = ir_spec();
    let h = pu.ir_width();
    // d/dX chi(X/h) = -w'(X)
    integrate_finite(|x| x.ln() * -pu.weight_w_slope(x), 0.0, h, &spec)?
        .require(&spec, "effective infrared scale")
}

/// `<X^-(k+1), P^w phi>` computed directly, with `w` the subtraction weight
/// of `pu` (one at the origin, zero beyond the infrared width).
pub fn pair_ir_oracle<P: SmoothProbe + ?Sized>(
    t: PurePower,
    pu: &PUTestFunction,
    phi: &P,
) -> Result<f64> {
    let spec = ir_spec();
    let inner = spec.tightened(100.0);
    let k = t.k as usize;
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let f = |x: f64| match pw_apply_with(phi, |y| pu.subtraction_weight(y), k, x, &inner) {
        Ok(v) => v * t.eval(x),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let h = pu.ir_width();
    let v = integrate_finite(f, 0.0, h, &spec)?.require(&spec, "infrared oracle")?
        + integrate_semi_infinite(f, h, &spec)?.require(&spec, "infrared oracle")?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// The closed form with the scale and delta normalisation matched to the
/// smooth subtraction: `mu_tilde -> mu_eff` and half the delta coefficient.
pub fn pair_ir_matched<P: SmoothProbe + ?Sized>(
    t: PurePower,
    pu: &PUTestFunction,
    phi: &P,
) -> Result<f64> {
    let spec = ir_spec();
    let log_mu = effective_log_mu_tilde(pu)?;
    let smooth = ir_log_pairing(t.k, log_mu, phi, &spec)?;
    let sign = if t.k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(smooth + 0.5 * ir_delta_coefficient(t.k) * sign * phi.checked_deriv(t.k as usize, 0.0)?)
}
