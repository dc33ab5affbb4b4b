//! Sums of terms `c X^p (ln X)^l D^s` with `D = X lambda2 + m2`, closed
//! under differentiation in `X`.
//!
//! Terms whose `X`-power is a non-negative integer are rewritten in powers
//! of `D` through `X = (D - m2)/lambda2`. Polynomial pieces then drop out of
//! derivatives exactly instead of cancelling numerically at large `X`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Term {
    pub coeff: f64,
    pub x_pow: f64,
    pub log_pow: u32,
    pub d_pow: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RadialExpr {
    lambda2: f64,
    m2: f64,
    terms: Vec<Term>,
}

fn binomial(n: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn is_nonneg_integer(p: f64) -> bool {
    p >= 0.0 && p.fract() == 0.0 && p < 64.0
}

impl RadialExpr {
    pub fn zero(lambda2: f64, m2: f64) -> Self {
        Self {
            lambda2,
            m2,
            terms: Vec::new(),
        }
    }

    /// `coeff X^p (ln X)^l D^s`.
    pub fn monomial(
        lambda2: f64,
        m2: f64,
        coeff: f64,
        x_pow: f64,
        log_pow: u32,
        d_pow: i32,
    ) -> Self {
        let mut e = Self::zero(lambda2, m2);
        e.push(Term {
            coeff,
            x_pow,
            log_pow,
            d_pow,
        });
        e.canonicalize();
        e
    }

    #[cfg(test)]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    #[cfg(test)]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, t: Term) {
        if t.coeff != 0.0 {
            self.terms.push(t);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend_from_slice(&other.terms);
        out.canonicalize();
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= factor;
        }
        out.canonicalize();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.lambda2, self.m2);
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term {
                    coeff: a.coeff * b.coeff,
                    x_pow: a.x_pow + b.x_pow,
                    log_pow: a.log_pow + b.log_pow,
                    d_pow: a.d_pow + b.d_pow,
                });
            }
        }
        out.canonicalize();
        out
    }

    /// First derivative in `X`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.lambda2, self.m2);
        for t in &self.terms {
            out.push(Term {
                coeff: t.coeff * t.x_pow,
                x_pow: t.x_pow - 1.0,
                ..*t
            });
            if t.log_pow > 0 {
                out.push(Term {
                    coeff: t.coeff * t.log_pow as f64,
                    x_pow: t.x_pow - 1.0,
                    log_pow: t.log_pow - 1,
                    d_pow: t.d_pow,
                });
            }
            out.push(Term {
                coeff: t.coeff * t.d_pow as f64 * self.lambda2,
                d_pow: t.d_pow - 1,
                ..*t
            });
        }
        out.canonicalize();
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |e, _| e.derivative())
    }

    fn canonicalize(&mut self) {
        let mut expanded = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if t.x_pow != 0.0 && is_nonneg_integer(t.x_pow) {
                // X^n = lambda2^-n sum_j C(n,j) D^j (-m2)^(n-j)
                let n = t.x_pow as u32;
                let inv = self.lambda2.powi(-(n as i32));
                for j in 0..=n {
                    let c = t.coeff * inv * binomial(n, j) * (-self.m2).powi((n - j) as i32);
                    if c != 0.0 {
                        expanded.push(Term {
                            coeff: c,
                            x_pow: 0.0,
                            log_pow: t.log_pow,
                            d_pow: t.d_pow + j as i32,
                        });
                    }
                }
            } else {
                expanded.push(t);
            }
        }
        expanded.sort_by(|a, b| {
            (a.x_pow, a.log_pow, a.d_pow)
                .partial_cmp(&(b.x_pow, b.log_pow, b.d_pow))
                .expect("finite exponents")
        });
        let mut merged: Vec<Term> = Vec::with_capacity(expanded.len());
        for t in expanded {
            match merged.last_mut() {
                Some(last)
                    if last.x_pow == t.x_pow
                        && last.log_pow == t.log_pow
                        && last.d_pow == t.d_pow =>
                {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        self.terms = merged;
    }

    /// Value at `X >= 0`. At the origin, terms with positive `X`-power
    /// vanish and a negative power or a logarithm diverges; the result is
    /// then the signed infinity of the most singular terms.
    pub fn eval(&self, x: f64) -> f64 {
        let d = x * self.lambda2 + self.m2;
        if x == 0.0 {
            return self.eval_at_origin(d);
        }
        let ln_x = x.ln();
        self.terms
            .iter()
            .map(|t| t.coeff * x.powf(t.x_pow) * ln_x.powi(t.log_pow as i32) * d.powi(t.d_pow))
            .sum()
    }

    fn eval_at_origin(&self, d: f64) -> f64 {
        let singular = |t: &&Term| t.x_pow < 0.0 || (t.x_pow == 0.0 && t.log_pow > 0);
        // most singular: lowest power of X, then highest power of the log
        let worst = self
            .terms
            .iter()
            .filter(singular)
            .map(|t| (t.x_pow, t.log_pow))
            .min_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite exponents")
                    .then(b.1.cmp(&a.1))
            });
        match worst {
            None => self
                .terms
                .iter()
                .filter(|t| t.x_pow == 0.0)
                .map(|t| t.coeff * d.powi(t.d_pow))
                .sum(),
            Some((p, l)) => {
                // ln X -> -inf
                let lead: f64 = self
                    .terms
                    .iter()
                    .filter(|t| t.x_pow == p && t.log_pow == l)
                    .map(|t| t.coeff * d.powi(t.d_pow))
                    .sum();
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                (sign * lead).signum() * f64::INFINITY
            }
        }
    }
}
