//! Taylor jets at the origin, the integral form of the remainder and the
//! weighted subtraction operator, in one radial variable.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_finite, QuadSpec};

/// A smooth pairing function with derivatives up to [`max_order`].
///
/// [`max_order`]: SmoothProbe::max_order
pub trait SmoothProbe: Sync {
    fn max_order(&self) -> usize;

    /// `phi^(n)(x)`; only called with `n <= max_order()`.
    fn deriv(&self, n: usize, x: f64) -> f64;

    fn eval(&self, x: f64) -> f64 {
        self.deriv(0, x)
    }

    fn checked_deriv(&self, n: usize, x: f64) -> Result<f64> {
        if n > self.max_order() {
            return Err(Error::OrderOverflow {
                requested: n,
                available: self.max_order(),
            });
        }
        Ok(self.deriv(n, x))
    }
}

/// Orders provided by the closed-form probes below.
const ANALYTIC_ORDER: usize = 32;

/// `scale * exp(-rate * X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpProbe {
    pub scale: f64,
    pub rate: f64,
}

impl ExpProbe {
    pub fn new(scale: f64, rate: f64) -> Self {
        Self { scale, rate }
    }
}

impl SmoothProbe for ExpProbe {
    fn max_order(&self) -> usize {
        ANALYTIC_ORDER
    }

    fn deriv(&self, n: usize, x: f64) -> f64 {
        self.scale * (-self.rate).powi(n as i32) * (-self.rate * x).exp()
    }
}

/// `1 / (1 + X)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReciprocalProbe;

impl SmoothProbe for ReciprocalProbe {
    fn max_order(&self) -> usize {
        ANALYTIC_ORDER
    }

    fn deriv(&self, n: usize, x: f64) -> f64 {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * factorial(n) / (1.0 + x).powi(n as i32 + 1)
    }
}

/// `cos X`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CosProbe;

impl SmoothProbe for CosProbe {
    fn max_order(&self) -> usize {
        ANALYTIC_ORDER
    }

    fn deriv(&self, n: usize, x: f64) -> f64 {
        match n % 4 {
            0 => x.cos(),
            1 => -x.sin(),
            2 => -x.cos(),
            _ => x.sin(),
        }
    }
}

/// `sum_j c_j X^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialProbe {
    coeffs: Vec<f64>,
}

impl PolynomialProbe {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }
}

impl SmoothProbe for PolynomialProbe {
    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn deriv(&self, n: usize, x: f64) -> f64 {
        // Horner on the n-th derivative's coefficients
        let mut acc = 0.0;
        for j in (n..self.coeffs.len()).rev() {
            let falling: f64 = (j - n + 1..=j).map(|i| i as f64).product();
            acc = acc * x + self.coeffs[j] * falling;
        }
        acc
    }
}

/// `X^p exp(-X)`, which vanishes at the origin to order `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExpProbe {
    pub power: u32,
}

impl SmoothProbe for PowerExpProbe {
    fn max_order(&self) -> usize {
        ANALYTIC_ORDER
    }

    fn deriv(&self, n: usize, x: f64) -> f64 {
        // Leibniz: sum_j C(n,j) (X^p)^(j) (e^-X)^(n-j)
        let p = self.power as usize;
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=n.min(p) {
            if j > 0 {
                binom *= (n + 1 - j) as f64 / j as f64;
            }
            let falling: f64 = (p - j + 1..=p).map(|i| i as f64).product();
            let power_part = falling * x.powi((p - j) as i32);
            let sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            total += binom * power_part * sign;
        }
        total * (-x).exp()
    }
}

/// A probe from a plain function, differentiated by central differences
/// with one Richardson step.
pub struct FiniteDifferenceProbe<F> {
    f: F,
    max_order: usize,
    relative_step: f64,
}

impl<F: Fn(f64) -> f64 + Sync> FiniteDifferenceProbe<F> {
    /// Step `1e-4 * max(1, |x|)`.
    pub fn new(f: F, max_order: usize) -> Self {
        Self {
            f,
            max_order,
            relative_step: 1e-4,
        }
    }

    pub fn with_relative_step(mut self, step: f64) -> Self {
        self.relative_step = step;
        self
    }

    fn central(&self, n: usize, x: f64, step: f64) -> f64 {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=n {
            if j > 0 {
                binom *= (n + 1 - j) as f64 / j as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * (self.f)(x + (0.5 * n as f64 - j as f64) * step);
        }
        acc / step.powi(n as i32)
    }
}

impl<F: Fn(f64) -> f64 + Sync> SmoothProbe for FiniteDifferenceProbe<F> {
    fn max_order(&self) -> usize {
        self.max_order
    }

    fn deriv(&self, n: usize, x: f64) -> f64 {
        if n == 0 {
            return (self.f)(x);
        }
        let step = self.relative_step * x.abs().max(1.0);
        let coarse = self.central(n, x, step);
        let fine = self.central(n, x, 0.5 * step);
        // leading error of the central difference is O(step^2)
        (4.0 * fine - coarse) / 3.0
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `sum_{n<=k} X^n phi^(n)(0) / n!`.
pub fn taylor_jet<P: SmoothProbe + ?Sized>(phi: &P, k: usize, x: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut power = 1.0;
    for n in 0..=k {
        total += power * phi.checked_deriv(n, 0.0)? / factorial(n);
        power *= x;
    }
    Ok(total)
}

/// `R^k_0 phi(X) = X^{k+1}/k! int_0^1 (1-t)^k phi^(k+1)(t X) dt`.
pub fn lagrange_remainder<P: SmoothProbe + ?Sized>(phi: &P, k: usize, x: f64) -> Result<f64> {
    lagrange_remainder_with(phi, k, x, &QuadSpec::default())
}

pub fn lagrange_remainder_with<P: SmoothProbe + ?Sized>(
    phi: &P,
    k: usize,
    x: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    if k + 1 > phi.max_order() {
        return Err(Error::OrderOverflow {
            requested: k + 1,
            available: phi.max_order(),
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let integral = integrate_finite(
        |t| (1.0 - t).powi(k as i32) * phi.deriv(k + 1, t * x),
        0.0,
        1.0,
        spec,
    )?
    .require(spec, "Lagrange remainder")?;
    Ok(x.powi(k as i32 + 1) / factorial(k) * integral)
}

/// The remainder of order `k`, with `R^{-1} = phi` (no subtraction).
fn remainder_or_identity<P: SmoothProbe + ?Sized>(
    phi: &P,
    order: Option<usize>,
    x: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    match order {
        None => Ok(phi.eval(x)),
        Some(k) => lagrange_remainder_with(phi, k, x, spec),
    }
}

/// `P^w phi(X) = (1 - w(X)) R^{k-1}_0 phi(X) + w(X) R^k_0 phi(X)`.
pub fn pw_apply<P, W>(phi: &P, w: W, k: usize, x: f64) -> Result<f64>
where
    P: SmoothProbe + ?Sized,
    W: Fn(f64) -> f64,
{
    pw_apply_with(phi, w, k, x, &QuadSpec::default())
}

pub fn pw_apply_with<P, W>(phi: &P, w: W, k: usize, x: f64, spec: &QuadSpec) -> Result<f64>
where
    P: SmoothProbe + ?Sized,
    W: Fn(f64) -> f64,
{
    if k + 1 > phi.max_order() {
        return Err(Error::OrderOverflow {
            requested: k + 1,
            available: phi.max_order(),
        });
    }
    let weight = w(x);
    let lower = if weight == 1.0 {
        0.0
    } else {
        remainder_or_identity(phi, k.checked_sub(1), x, spec)?
    };
    let upper = if weight == 0.0 {
        0.0
    } else {
        lagrange_remainder_with(phi, k, x, spec)?
    };
    Ok((1.0 - weight) * lower + weight * upper)
}
