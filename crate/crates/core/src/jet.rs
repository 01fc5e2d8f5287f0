//! Truncated bivariate Taylor jets.
//!
//! A [`Jet2`] of order `K` stores the Taylor coefficients
//! `c_ab = (1 / (a! b!)) d^a/dx^a d^b/dy^b f` at a base point for every `a + b <= K`.
//! Arithmetic on jets is exact up to rounding for every term of total degree `<= K`;
//! higher-degree terms are discarded.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default truncation order for field evaluations.
pub const DEFAULT_ORDER: usize = 4;

/// Number of coefficients stored by a jet of the given order.
pub const fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
fn index(a: usize, b: usize) -> usize {
    let n = a + b;
    n * (n + 1) / 2 + b
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Coordinate direction in the position plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// Maps a position index (0 for x, 1 for y) to an axis. Momentum indices return `None`.
    pub fn from_index(i: usize) -> Option<Axis> {
        match i {
            0 => Some(Axis::X),
            1 => Some(Axis::Y),
            _ => None,
        }
    }
}

/// Truncated Taylor expansion of a scalar field of `(x, y)` at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    base: (f64, f64),
    order: usize,
    coeffs: Vec<f64>,
}

/// Binary operation selector for [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Jet2 {
    pub fn constant(base: (f64, f64), order: usize, value: f64) -> Self {
        let mut coeffs = vec![0.0; coeff_count(order)];
        coeffs[0] = value;
        Self { base, order, coeffs }
    }

    pub fn zero(base: (f64, f64), order: usize) -> Self {
        Self::constant(base, order, 0.0)
    }

    /// The coordinate function `x` expanded at `base`.
    pub fn var_x(base: (f64, f64), order: usize) -> Self {
        let mut jet = Self::constant(base, order, base.0);
        if order >= 1 {
            jet.coeffs[index(1, 0)] = 1.0;
        }
        jet
    }

    /// The coordinate function `y` expanded at `base`.
    pub fn var_y(base: (f64, f64), order: usize) -> Self {
        let mut jet = Self::constant(base, order, base.1);
        if order >= 1 {
            jet.coeffs[index(0, 1)] = 1.0;
        }
        jet
    }

    /// Builds a jet from a raw coefficient table laid out by increasing total degree,
    /// and within one degree by increasing power of `y`.
    pub fn from_coeffs(base: (f64, f64), order: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != coeff_count(order) {
            return Err(Error::JetMismatch(format!(
                "order {order} needs {} coefficients, got {}",
                coeff_count(order),
                coeffs.len()
            )));
        }
        Ok(Self { base, order, coeffs })
    }

    /// Builds a jet from true partial derivatives `d^a/dx^a d^b/dy^b f`.
    pub fn from_partials(base: (f64, f64), order: usize, mut partial: impl FnMut(usize, usize) -> f64) -> Self {
        let mut coeffs = vec![0.0; coeff_count(order)];
        for n in 0..=order {
            for b in 0..=n {
                let a = n - b;
                coeffs[index(a, b)] = partial(a, b) / (factorial(a) * factorial(b));
            }
        }
        Self { base, order, coeffs }
    }

    pub fn base(&self) -> (f64, f64) {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient `c_ab`; zero beyond the truncation order.
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        if a + b > self.order {
            0.0
        } else {
            self.coeffs[index(a, b)]
        }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The mixed partial `d^a/dx^a d^b/dy^b` at the base point.
    pub fn partial(&self, a: usize, b: usize) -> Result<f64> {
        if a + b > self.order {
            return Err(Error::OrderExceeded { a, b, order: self.order });
        }
        Ok(self.coeffs[index(a, b)] * factorial(a) * factorial(b))
    }

    /// Jet of the partial derivative along `axis`; the result has order `K - 1`.
    pub fn derivative(&self, axis: Axis) -> Result<Jet2> {
        if self.order == 0 {
            let (a, b) = match axis {
                Axis::X => (1, 0),
                Axis::Y => (0, 1),
            };
            return Err(Error::OrderExceeded { a, b, order: 0 });
        }
        let order = self.order - 1;
        let mut coeffs = vec![0.0; coeff_count(order)];
        for n in 0..=order {
            for b in 0..=n {
                let a = n - b;
                coeffs[index(a, b)] = match axis {
                    Axis::X => (a + 1) as f64 * self.coeffs[index(a + 1, b)],
                    Axis::Y => (b + 1) as f64 * self.coeffs[index(a, b + 1)],
                };
            }
        }
        Ok(Jet2 { base: self.base, order, coeffs })
    }

    pub fn dx(&self) -> Result<Jet2> {
        self.derivative(Axis::X)
    }

    pub fn dy(&self) -> Result<Jet2> {
        self.derivative(Axis::Y)
    }

    /// Drops every term of total degree above `order`.
    pub fn truncate(&self, order: usize) -> Result<Jet2> {
        if order > self.order {
            return Err(Error::JetMismatch(format!("cannot raise jet order from {} to {order}", self.order)));
        }
        Ok(Jet2 { base: self.base, order, coeffs: self.coeffs[..coeff_count(order)].to_vec() })
    }

    fn check_compatible(&self, other: &Jet2) -> Result<()> {
        if self.base != other.base {
            return Err(Error::JetMismatch(format!("base points {:?} and {:?} differ", self.base, other.base)));
        }
        if self.order != other.order {
            return Err(Error::JetMismatch(format!("orders {} and {} differ", self.order, other.order)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Jet2 { base: self.base, order: self.order, coeffs })
    }

    pub fn try_sub(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Jet2 { base: self.base, order: self.order, coeffs })
    }

    /// Truncated product (a plain convolution of the coefficient tables).
    pub fn try_mul(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        let k = self.order;
        let mut coeffs = vec![0.0; coeff_count(k)];
        for n in 0..=k {
            for b in 0..=n {
                let a = n - b;
                let mut acc = 0.0;
                for i in 0..=a {
                    for j in 0..=b {
                        acc += self.coeffs[index(i, j)] * other.coeffs[index(a - i, b - j)];
                    }
                }
                coeffs[index(a, b)] = acc;
            }
        }
        Ok(Jet2 { base: self.base, order: k, coeffs })
    }

    /// Truncated reciprocal, solved degree by degree from `r * self = 1`.
    pub fn recip(&self) -> Result<Jet2> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 || !c0.is_finite() {
            return Err(Error::SingularDivisor { x: self.base.0, y: self.base.1 });
        }
        let k = self.order;
        let mut r = vec![0.0; coeff_count(k)];
        r[0] = 1.0 / c0;
        for n in 1..=k {
            for b in 0..=n {
                let a = n - b;
                let mut acc = 0.0;
                for i in 0..=a {
                    for j in 0..=b {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        acc += self.coeffs[index(i, j)] * r[index(a - i, b - j)];
                    }
                }
                r[index(a, b)] = -acc / c0;
            }
        }
        Ok(Jet2 { base: self.base, order: k, coeffs: r })
    }

    pub fn try_div(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn scale(&self, factor: f64) -> Jet2 {
        Jet2 { base: self.base, order: self.order, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add_scalar(&self, value: f64) -> Jet2 {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    pub fn powi(&self, n: u32) -> Jet2 {
        let mut acc = Jet2::constant(self.base, self.order, 1.0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Largest absolute coefficient difference to another jet of the same shape.
    pub fn max_coeff_diff(&self, other: &Jet2) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

impl fmt::Display for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet2@({}, {})[", self.base.0, self.base.1)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Checked binary jet arithmetic.
pub fn jet_arith(a: &Jet2, b: &Jet2, op: JetOp) -> Result<Jet2> {
    match op {
        JetOp::Add => a.try_add(b),
        JetOp::Sub => a.try_sub(b),
        JetOp::Mul => a.try_mul(b),
        JetOp::Div => a.try_div(b),
    }
}

/// Extracts the true mixed partial `d^a/dx^a d^b/dy^b` from a jet.
pub fn jet_partial(j: &Jet2, a: usize, b: usize) -> Result<f64> {
    j.partial(a, b)
}

/// A scalar field over the position plane that can be expanded into jets.
pub trait ScalarField {
    /// Jet of the field at `(x, y)` truncated at `order`.
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet2>;

    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.jet(x, y, 0)?.value())
    }
}

impl<F> ScalarField for F
where
    F: Fn(f64, f64, usize) -> Result<Jet2>,
{
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet2> {
        self(x, y, order)
    }
}

// Operator sugar for jets known to share base point and order. Mismatches panic;
// use the `try_*` methods or `jet_arith` when that is not guaranteed.
fn unwrap_op(res: Result<Jet2>) -> Jet2 {
    match res {
        Ok(j) => j,
        Err(e) => panic!("{e}"),
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Jet2> for &Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: &Jet2) -> Jet2 {
                unwrap_op(self.$checked(rhs))
            }
        }
        impl $tr<Jet2> for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: Jet2) -> Jet2 {
                unwrap_op(self.$checked(&rhs))
            }
        }
        impl $tr<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: &Jet2) -> Jet2 {
                unwrap_op(self.$checked(rhs))
            }
        }
        impl $tr<Jet2> for &Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: Jet2) -> Jet2 {
                unwrap_op(self.$checked(&rhs))
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);

impl Mul<f64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<&Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Add<f64> for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        self.add_scalar(rhs)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}
