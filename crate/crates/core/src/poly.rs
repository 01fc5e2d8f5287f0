//! Small dense-enough polynomial types used to keep the gauge solvers exact.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::jet::{Jet2, ScalarField};

/// Evaluates `sum c_k u^k` by Horner's rule.
pub fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// Polynomial in two variables, stored as a sparse map from exponent pairs to coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c * u^i * v^j`
    pub fn monomial(c: f64, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, i, j);
        p
    }

    /// The first variable.
    pub fn u() -> Self {
        Self::monomial(1.0, 1, 0)
    }

    /// The second variable.
    pub fn v() -> Self {
        Self::monomial(1.0, 0, 1)
    }

    pub fn add_term(&mut self, c: f64, i: u32, j: u32) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for ((i, j), c) in other.terms() {
            out.add_term(c, i, j);
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in self.terms() {
            out.add_term(c * factor, i, j);
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in other.terms() {
                out.add_term(c1 * c2, i1 + i2, j1 + j2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly2 {
        (0..n).fold(Poly2::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Univariate polynomial `sum c_k w^k` composed with `w = self`.
    pub fn compose_univariate(&self, coeffs: &[f64]) -> Poly2 {
        coeffs.iter().rev().fold(Poly2::zero(), |acc, &c| acc.mul(self).add(&Poly2::constant(c)))
    }

    /// Antiderivative in the first variable with zero integration constant.
    pub fn integrate_u(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in self.terms() {
            out.add_term(c / (i + 1) as f64, i + 1, j);
        }
        out
    }

    pub fn derivative_u(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in self.terms() {
            if i > 0 {
                out.add_term(c * i as f64, i - 1, j);
            }
        }
        out
    }

    pub fn derivative_v(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in self.terms() {
            if j > 0 {
                out.add_term(c * j as f64, i, j - 1);
            }
        }
        out
    }

    /// Substitutes `u -> first`, `v -> second`.
    pub fn substitute(&self, first: &Poly2, second: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in self.terms() {
            out = out.add(&first.pow(i).mul(&second.pow(j)).scale(c));
        }
        out
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.terms().map(|((i, j), c)| c * u.powi(i as i32) * v.powi(j as i32)).sum()
    }

    /// Evaluates the polynomial on jets of the two variables.
    pub fn eval_jet(&self, u: &Jet2, v: &Jet2) -> Result<Jet2> {
        let deg = self.degree() as usize;
        let mut upow = Vec::with_capacity(deg + 1);
        let mut vpow = Vec::with_capacity(deg + 1);
        upow.push(Jet2::constant(u.base(), u.order(), 1.0));
        vpow.push(Jet2::constant(v.base(), v.order(), 1.0));
        for k in 1..=deg {
            upow.push(upow[k - 1].try_mul(u)?);
            vpow.push(vpow[k - 1].try_mul(v)?);
        }
        let mut acc = Jet2::zero(u.base(), u.order());
        for ((i, j), c) in self.terms() {
            let term = upow[i as usize].try_mul(&vpow[j as usize])?;
            acc = acc.try_add(&term.scale(c))?;
        }
        Ok(acc)
    }
}

/// Polynomials in `(x, y)` are scalar fields.
impl ScalarField for Poly2 {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet2> {
        let base = (x, y);
        self.eval_jet(&Jet2::var_x(base, order), &Jet2::var_y(base, order))
    }
}
