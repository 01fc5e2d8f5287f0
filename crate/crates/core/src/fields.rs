//! Noncommutativity profiles and the correction fields `B_i` that realize them.
//!
//! A profile fixes the density `d(x, y) = 1 / (1 + theta f(alpha (x^2 + y^2)))` with a
//! polynomial `f`. The condition `d = 1 / (1 + theta (dB_y/dx - dB_x/dy))` leaves one
//! function free; it is closed either by a rotated gradient (`B_x = -d_y phi`,
//! `B_y = d_x phi`, the phi-gauge) or by equal components (`B_x = B_y = chi`, the chi-gauge).
//! Both solvers produce exact polynomial fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet2, ScalarField};
use crate::poly::{horner, Poly2};

/// Denominators smaller than this in magnitude are treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Noncommutativity scale, locality parameter and radial profile polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NCProfile {
    pub theta: f64,
    pub alpha: f64,
    /// Coefficients `c_k` of `f(u) = sum c_k u^k`.
    pub f_poly: Vec<f64>,
}

impl NCProfile {
    pub fn new(theta: f64, alpha: f64, f_poly: Vec<f64>) -> Result<Self> {
        let p = Self { theta, alpha, f_poly };
        p.validate()?;
        Ok(p)
    }

    /// The local profile `f(u) = u`, i.e. `d = 1 / (1 + theta alpha r^2)`.
    pub fn local(theta: f64, alpha: f64) -> Self {
        Self { theta, alpha, f_poly: vec![0.0, 1.0] }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::InvalidProfile(format!("theta must be finite, got {}", self.theta)));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidProfile(format!("alpha must be finite and non-negative, got {}", self.alpha)));
        }
        if self.f_poly.is_empty() {
            return Err(Error::InvalidProfile("f_poly must not be empty".into()));
        }
        if self.f_poly.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProfile("f_poly coefficients must be finite".into()));
        }
        Ok(())
    }

    /// True when `f(u) = u` exactly (trailing zeros allowed).
    pub fn is_linear_profile(&self) -> bool {
        let mut c = self.f_poly.clone();
        while c.len() > 2 && c.last() == Some(&0.0) {
            c.pop();
        }
        c == [0.0, 1.0]
    }

    pub fn f(&self, u: f64) -> f64 {
        horner(&self.f_poly, u)
    }

    pub fn f0(&self) -> f64 {
        self.f_poly[0]
    }

    /// `1 + theta f(alpha (x^2 + y^2))`
    pub fn denominator(&self, x: f64, y: f64) -> f64 {
        1.0 + self.theta * self.f(self.alpha * (x * x + y * y))
    }

    /// Rejects the profile if `1 + theta f` is not positive at any of the given points.
    pub fn check_positive_on<I>(&self, points: I) -> Result<()>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        for (x, y) in points {
            if self.denominator(x, y) <= SINGULAR_THRESHOLD {
                return Err(Error::SingularProfile { x, y });
            }
        }
        Ok(())
    }
}

/// The density `d` induced directly by a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileDensity {
    profile: NCProfile,
}

impl ProfileDensity {
    pub fn profile(&self) -> &NCProfile {
        &self.profile
    }
}

impl ScalarField for ProfileDensity {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet2> {
        let p = &self.profile;
        let base = (x, y);
        let xj = Jet2::var_x(base, order);
        let yj = Jet2::var_y(base, order);
        let u = (&xj * &xj + &yj * &yj) * p.alpha;
        let f = p.f_poly.iter().rev().fold(Jet2::zero(base, order), |acc, &c| (&acc * &u).add_scalar(c));
        let den = (f * p.theta).add_scalar(1.0);
        if den.value().abs() < SINGULAR_THRESHOLD {
            return Err(Error::SingularProfile { x, y });
        }
        den.recip()
    }
}

/// `d(x, y) = 1 / (1 + theta f(alpha (x^2 + y^2)))` as a jet-valued field.
pub fn d_from_profile(p: &NCProfile) -> ProfileDensity {
    ProfileDensity { profile: p.clone() }
}

/// Which additional condition closed the equation for `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    /// `B_x = -d_y phi`, `B_y = d_x phi`.
    Phi,
    /// `B_x = B_y = chi`.
    Chi,
}

impl std::fmt::Display for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gauge::Phi => write!(f, "phi"),
            Gauge::Chi => write!(f, "chi"),
        }
    }
}

/// Polynomial correction fields `(B_x, B_y)` over the position plane.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    gauge: Option<Gauge>,
    bx: Poly2,
    by: Poly2,
}

impl GaugeField {
    pub fn zero(gauge: Gauge) -> Self {
        Self { gauge: Some(gauge), bx: Poly2::zero(), by: Poly2::zero() }
    }

    /// A field with no gauge condition attached, used for generic checks.
    pub fn from_polynomials(bx: Poly2, by: Poly2) -> Self {
        Self { gauge: None, bx, by }
    }

    pub fn gauge(&self) -> Option<Gauge> {
        self.gauge
    }

    pub fn bx(&self) -> &Poly2 {
        &self.bx
    }

    pub fn by(&self) -> &Poly2 {
        &self.by
    }

    /// Jets of `[B_x, B_y]` at `(x, y)`.
    pub fn components(&self, x: f64, y: f64, order: usize) -> Result<[Jet2; 2]> {
        let base = (x, y);
        let xj = Jet2::var_x(base, order);
        let yj = Jet2::var_y(base, order);
        Ok([self.bx.eval_jet(&xj, &yj)?, self.by.eval_jet(&xj, &yj)?])
    }

    pub fn value(&self, x: f64, y: f64) -> (f64, f64) {
        (self.bx.eval(x, y), self.by.eval(x, y))
    }

    /// Jets of the gradient table `grad[k][n] = d_k B_n` at order `order`.
    pub fn gradient(&self, x: f64, y: f64, order: usize) -> Result<[[Jet2; 2]; 2]> {
        let [bx, by] = self.components(x, y, order + 1)?;
        Ok([[bx.dx()?, by.dx()?], [bx.dy()?, by.dy()?]])
    }

    /// `d_x B_y - d_y B_x` at order `order`.
    pub fn curl(&self, x: f64, y: f64, order: usize) -> Result<Jet2> {
        let g = self.gradient(x, y, order)?;
        g[0][1].try_sub(&g[1][0])
    }
}

/// Solves for `B` with `B_i = -eps^{ij} d_j phi` and a rotationally symmetric `phi`.
///
/// With `F' = f`, the result is `B_x = -y h / 2`, `B_y = x h / 2` where
/// `h(u) = (F(u) - F(0)) / u = sum c_k u^k / (k + 1)` evaluated at `u = alpha r^2`,
/// which keeps the origin regular.
pub fn solve_phi_gauge(p: &NCProfile) -> Result<GaugeField> {
    p.validate()?;
    if p.alpha == 0.0 {
        return Ok(GaugeField::zero(Gauge::Phi));
    }
    let half_h: Vec<f64> = p.f_poly.iter().enumerate().map(|(k, c)| c / (2.0 * (k + 1) as f64)).collect();
    let u = Poly2::monomial(p.alpha, 2, 0).add(&Poly2::monomial(p.alpha, 0, 2));
    let h = u.compose_univariate(&half_h);
    let bx = Poly2::monomial(-1.0, 0, 1).mul(&h);
    let by = Poly2::monomial(1.0, 1, 0).mul(&h);
    Ok(GaugeField { gauge: Some(Gauge::Phi), bx, by })
}

/// Solves `(d_x - d_y) chi = f(alpha r^2) - f(0)` with `B_x = B_y = chi`.
///
/// In `xi = x - y`, `eta = x + y` the equation reads `d_xi chi = g / 2`, integrated
/// exactly in `xi`. The free function of `eta` is zero because `chi` must vanish with `alpha`.
pub fn solve_chi_gauge(p: &NCProfile) -> Result<GaugeField> {
    p.validate()?;
    if p.alpha == 0.0 {
        return Ok(GaugeField::zero(Gauge::Chi));
    }
    // x^2 + y^2 = (xi^2 + eta^2) / 2
    let u = Poly2::monomial(p.alpha / 2.0, 2, 0).add(&Poly2::monomial(p.alpha / 2.0, 0, 2));
    let g = u.compose_univariate(&p.f_poly).sub(&Poly2::constant(p.f0()));
    let chi_xi_eta = g.scale(0.5).integrate_u();
    let xi = Poly2::u().sub(&Poly2::v());
    let eta = Poly2::u().add(&Poly2::v());
    let chi = chi_xi_eta.substitute(&xi, &eta);
    Ok(GaugeField { gauge: Some(Gauge::Chi), bx: chi.clone(), by: chi })
}

pub fn solve_gauge(p: &NCProfile, gauge: Gauge) -> Result<GaugeField> {
    match gauge {
        Gauge::Phi => solve_phi_gauge(p),
        Gauge::Chi => solve_chi_gauge(p),
    }
}

/// The density `d = 1 / (1 + theta (d_x B_y - d_y B_x))` of a gauge field.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeDensity {
    field: GaugeField,
    theta: f64,
}

impl ScalarField for GaugeDensity {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet2> {
        density_jet(&self.field, self.theta, x, y, order)
    }
}

pub fn d_from_b(g: &GaugeField, theta: f64) -> GaugeDensity {
    GaugeDensity { field: g.clone(), theta }
}

pub(crate) fn density_jet(g: &GaugeField, theta: f64, x: f64, y: f64, order: usize) -> Result<Jet2> {
    let den = (g.curl(x, y, order)? * theta).add_scalar(1.0);
    if den.value().abs() < SINGULAR_THRESHOLD {
        return Err(Error::SingularSymplectic { x, y });
    }
    den.recip()
}
