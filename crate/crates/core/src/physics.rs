//! Tadpoles, the Pauli-Villars cross-check and the mass expansion of the
//! two-dimensional Euclidean propagator.
//!
//! Momentum integrals are reduced to the radial variable `p` with the scale
//! set by the mass, `X = p^2 / m^2`.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::extend::{extend_uv_form_a, Alpha, RationalRadial};
use crate::quadrature::{integrate_semi_infinite, QuadSpec};
use crate::special::{bessel_k0, digamma_int};

/// `int d^2p/(2pi)^2 -> D2_MEASURE * int p dp`.
pub const D2_MEASURE: f64 = 1.0 / (2.0 * PI);

/// `int d^4p/(2pi)^4 -> D4_MEASURE * int p^3 dp`.
pub const D4_MEASURE: f64 = 1.0 / (8.0 * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TadpoleResult {
    pub dimension: u32,
    pub mu2: f64,
    pub m: f64,
    pub quadrature_value: f64,
    pub analytic_value: f64,
    pub abs_error: f64,
}

fn tadpole_spec() -> QuadSpec {
    QuadSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_subdivisions: 4_000,
    }
}

fn check_mass(m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(domain(format!("mass must be positive, got {m}")));
    }
    Ok(())
}

fn check_scale(mu2: f64) -> Result<()> {
    if !(mu2 >= 1.0 && mu2.is_finite()) {
        return Err(domain(format!(
            "the scale must satisfy μ² > 1 (μ² = 1 is the trivial zero), got {mu2}"
        )));
    }
    Ok(())
}

/// Closed form of the tadpole: `log(mu2)/(4 pi)` in two dimensions,
/// `m^2 (1 - mu2 + mu2 log mu2) / (16 pi^2 mu2)` in four.
pub fn tadpole_analytic(dimension: u32, mu2: f64, m: f64) -> Result<f64> {
    match dimension {
        2 => Ok(mu2.ln() / (4.0 * PI)),
        4 => Ok(m * m * (1.0 - mu2 + mu2 * mu2.ln()) / (16.0 * PI * PI * mu2)),
        _ => Err(domain(format!("dimension must be 2 or 4, got {dimension}"))),
    }
}

/// The extended tadpole, integrated over `p` with the limit-scheme evaluator,
/// next to its closed form.
pub fn tadpole(dimension: u32, mu2: f64, m: f64) -> Result<TadpoleResult> {
    check_scale(mu2)?;
    check_mass(m)?;
    let analytic_value = tadpole_analytic(dimension, mu2, m)?;
    let m2 = m * m;
    let propagator = RationalRadial::propagator(m2, m2)?;
    let (d, measure, p_power) = match dimension {
        2 => (1, D2_MEASURE, 1),
        _ => (2, D4_MEASURE, 3),
    };
    let ext = extend_uv_form_a(&propagator, d, d - 1, mu2, Alpha::Limit)?;
    let spec = tadpole_spec();
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |p: f64| match ext.eval(p * p / m2) {
        Ok(v) => p.powi(p_power) * v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let integral = integrate_semi_infinite(integrand, 0.0, &spec)?.require(&spec, "tadpole")?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let quadrature_value = measure * integral;
    Ok(TadpoleResult {
        dimension,
        mu2,
        m,
        quadrature_value,
        analytic_value,
        abs_error: (quadrature_value - analytic_value).abs(),
    })
}

/// Tadpoles for every `(dimension, mu2, m)` of a grid, in input order.
pub fn tadpole_grid(points: &[(u32, f64, f64)]) -> Vec<Result<TadpoleResult>> {
    crate::par::map(points, |&(d, mu2, m)| tadpole(d, mu2, m))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvResult {
    pub mu2: f64,
    pub m: f64,
    pub pv_value: f64,
    pub eq_value: f64,
    pub abs_diff: f64,
}

/// `(1/2pi) int p dp [1/(p^2+m^2) - 1/(p^2+m^2 mu2)]` against `log(mu2)/(4 pi)`.
pub fn pv_check(mu2: f64, m: f64) -> Result<PvResult> {
    check_scale(mu2)?;
    check_mass(m)?;
    let m2 = m * m;
    let spec = tadpole_spec();
    // the difference combined over a common denominator
    let integrand = |p: f64| {
        let p2 = p * p;
        p * m2 * (mu2 - 1.0) / ((p2 + m2) * (p2 + m2 * mu2))
    };
    let pv_value = D2_MEASURE
        * integrate_semi_infinite(integrand, 0.0, &spec)?.require(&spec, "Pauli-Villars")?;
    let eq_value = tadpole_analytic(2, mu2, m)?;
    Ok(PvResult {
        mu2,
        m,
        pv_value,
        eq_value,
        abs_diff: (pv_value - eq_value).abs(),
    })
}

/// `q^k/(k!)^2 [psi(k+1) - lg] / (2 pi)`.
fn ir_magnitude(k: u32, q: f64, lg: f64) -> Result<f64> {
    let mut weight = 1.0;
    for i in 1..=k {
        let r = q / i as f64;
        weight *= r / i as f64;
    }
    Ok(weight * (digamma_int(k as u64 + 1)? - lg) / (2.0 * PI))
}

/// Position-space transform of the `k`-th infrared term,
/// `(-1)^k/(2 pi (k!)^2) (x^2/4)^k [psi(k+1) - log(m x / 2)]`.
pub fn ft_ir_term(k: u32, m: f64, x: f64) -> Result<f64> {
    check_mass(m)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain(format!("separation must be positive, got {x}")));
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * ir_magnitude(k, 0.25 * x * x, (0.5 * m * x).ln())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub m: f64,
    pub x: f64,
    pub terms: Vec<f64>,
    pub partial_sum: f64,
    pub reference_k0: f64,
    pub rel_error: f64,
    pub k_used: usize,
}

/// Partial sums of the mass expansion of the two-dimensional propagator,
/// compared with `K0(m x)/(2 pi)`.
///
/// Stops once two consecutive terms fall below `tol * |partial sum|`, or
/// after the term `k = k_max`.
pub fn mass_series_propagator(m: f64, x: f64, tol: f64, k_max: u32) -> Result<SeriesResult> {
    check_mass(m)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain(format!("separation must be positive, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let z = m * x;
    let q = 0.25 * z * z;
    let lg = (0.5 * z).ln();
    let mut terms = Vec::new();
    let mut sum = 0.0;
    let mut small_run = 0;
    for k in 0..=k_max {
        let term = ir_magnitude(k, q, lg)?;
        sum += term;
        terms.push(term);
        if term.abs() < tol * sum.abs() {
            small_run += 1;
            if small_run == 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    if small_run < 2 && terms.len() >= 2 {
        let n = terms.len();
        if terms[n - 1].abs() >= terms[n - 2].abs() {
            return Err(Error::Convergence(format!(
                "mass series terms still growing at k = {k_max} (m x = {z})"
            )));
        }
    }
    let reference_k0 = bessel_k0(z)? / (2.0 * PI);
    Ok(SeriesResult {
        m,
        x,
        k_used: terms.len(),
        terms,
        partial_sum: sum,
        reference_k0,
        rel_error: ((sum - reference_k0) / reference_k0).abs(),
    })
}
