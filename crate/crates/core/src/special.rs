//! Special functions used by the closed forms.
//!
//! `J0` and `K0` are evaluated from their integral representations with the
//! trapezoidal rule, which converges geometrically for these analytic
//! (periodic, respectively double-exponentially decaying) integrands. In
//! particular `K0` never goes through its small-argument power series, so it
//! is an independent reference for the resummed mass expansion in
//! [`crate::physics`].

use std::f64::consts::{FRAC_PI_4, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `H_k` together with its order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicValue {
    pub k: u32,
    pub value: f64,
}

impl HarmonicValue {
    pub fn new(k: u32) -> Self {
        Self {
            k,
            value: harmonic_eg(k),
        }
    }
}

/// Bessel function of the first kind of order zero.
///
/// For `|x| <= 100` this is the trapezoidal rule applied to
/// `(1/2pi) int_0^{2pi} cos(x sin t) dt` with enough nodes that the aliasing
/// error `2 J_N(x)` is below `1e-17`; beyond that the Hankel asymptotic
/// expansion is used.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x.is_nan() {
        return f64::NAN;
    }
    if x > 100.0 {
        return j0_hankel(x);
    }
    let nodes = 4 * ((2.0 * x).ceil() as usize / 4 + 10);
    let step = 2.0 * PI / nodes as f64;
    // cos(x sin t) has period pi and is even about pi/2: sum a quarter period.
    let quarter = nodes / 4;
    let mut sum = 0.5 * (1.0 + (x).cos());
    for j in 1..quarter {
        sum += (x * (step * j as f64).sin()).cos();
    }
    sum / quarter as f64
}

fn j0_hankel(x: f64) -> f64 {
    // P and Q series of the Hankel expansion; stop at the smallest term.
    let z8 = 8.0 * x;
    let mut p = 1.0;
    let mut q = -1.0 / z8;
    let mut term_q = q;
    let mut term_p = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let k = k as f64;
        // term_p: ratio from k-1 to k uses (4k-3)^2 (4k-1)^2 / ((2k-1)(2k) z8^2)
        let a = (4.0 * k - 3.0).powi(2) * (4.0 * k - 1.0).powi(2);
        term_p *= -a / ((2.0 * k - 1.0) * (2.0 * k) * z8 * z8);
        let b = (4.0 * k - 1.0).powi(2) * (4.0 * k + 1.0).powi(2);
        term_q *= -b / ((2.0 * k) * (2.0 * k + 1.0) * z8 * z8);
        let size = term_p.abs().max(term_q.abs());
        if size > last {
            break;
        }
        p += term_p;
        q += term_q;
        last = size;
        if size < 1e-17 {
            break;
        }
    }
    let phase = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}

/// Modified Bessel function of the second kind of order zero, `z > 0`.
///
/// Trapezoidal rule on `K0(z) = e^{-z} int_0^inf exp(-z (cosh t - 1)) dt`.
/// The step is chosen from the width of the strip of analyticity so that the
/// discretisation error is far below double precision for `z <= 700`.
pub fn bessel_k0(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(format!("bessel_k0 requires z > 0, got {z}")));
    }
    let strip = (1.0 / z.sqrt()).min(1.0);
    let step = 2.0 * PI * strip / (45.0 + z * (1.0 - strip.cos()));
    let mut sum = 0.5;
    let mut j = 1usize;
    loop {
        let t = step * j as f64;
        let exponent = -z * (t.cosh() - 1.0);
        if exponent < -60.0 {
            break;
        }
        sum += exponent.exp();
        j += 1;
    }
    Ok((-z).exp() * step * sum)
}

/// Digamma function at a positive integer, `psi(n) = -gamma + sum_{j<n} 1/j`.
pub fn digamma_int(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("digamma_int requires n >= 1"));
    }
    if n < 32 {
        let tail: f64 = (1..n).rev().map(|j| 1.0 / j as f64).sum();
        return Ok(tail - EULER_GAMMA);
    }
    // Asymptotic series; the first omitted term is below 1e-19 at n = 32.
    let x = n as f64;
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    Ok(x.ln() - 0.5 / x - series)
}

/// `H_k = sum_{j=1}^k 1/j`, summed from the smallest term up.
pub fn harmonic_eg(k: u32) -> f64 {
    (1..=k).rev().map(|j| 1.0 / j as f64).sum()
}

/// The alternating binomial form `sum_{p=1}^k (-1)^{p+1} C(k,p) / p`.
///
/// The terms cancel catastrophically in floating point, so the sum is formed
/// exactly over the rationals and rounded once at the end.
pub fn harmonic_binomial(k: u32) -> f64 {
    harmonic_binomial_exact(k)
        .to_f64()
        .expect("harmonic sum is a finite rational")
}

pub(crate) fn harmonic_binomial_exact(k: u32) -> BigRational {
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    for p in 1..=k {
        binom = binom * BigInt::from(k - p + 1) / BigInt::from(p);
        let term = BigRational::new(binom.clone(), BigInt::from(p));
        if p % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}
