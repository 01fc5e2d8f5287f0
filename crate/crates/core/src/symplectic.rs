//! Constraint two-form, its inverse (the classical Dirac bracket `omega0`) and the
//! closed-form bracket tables used to cross-check the inversion.
//!
//! Phase-space coordinates are ordered `(x, y, p_x, p_y)` and addressed by 0-based
//! indices [`X`], [`Y`], [`PX`], [`PY`]. All fields depend on position only, so
//! derivatives along the momentum directions vanish.

use crate::error::{Error, Result};
use crate::fields::{density_jet, Gauge, GaugeField, NCProfile};
use crate::jet::{Axis, Jet2};
use crate::poly::Poly2;

pub const X: usize = 0;
pub const Y: usize = 1;
pub const PX: usize = 2;
pub const PY: usize = 3;

/// Upper-triangle index pairs in storage order: 12, 13, 14, 23, 24, 34.
pub const UPPER_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Column labels matching [`UPPER_PAIRS`].
pub const UPPER_LABELS: [&str; 6] = ["w12", "w13", "w14", "w23", "w24", "w34"];

/// `eps^{01} = -eps^{10} = 1` on the position (or momentum) plane.
pub fn epsilon(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

fn pair_slot(mu: usize, nu: usize) -> (usize, f64) {
    let (a, b, sign) = if mu < nu { (mu, nu, 1.0) } else { (nu, mu, -1.0) };
    let slot = UPPER_PAIRS.iter().position(|&p| p == (a, b)).expect("index out of range");
    (slot, sign)
}

/// Antisymmetric 4x4 matrix of jets at one point, stored by its upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Skew4 {
    upper: [Jet2; 6],
}

/// Jets of a bracket structure `omega^{mu nu}` at one point.
pub type Bivector4 = Skew4;

impl Skew4 {
    pub fn new(upper: [Jet2; 6]) -> Self {
        Self { upper }
    }

    pub fn from_fn(mut entry: impl FnMut(usize, usize) -> Jet2) -> Self {
        Self { upper: UPPER_PAIRS.map(|(a, b)| entry(a, b)) }
    }

    pub fn upper(&self) -> &[Jet2; 6] {
        &self.upper
    }

    pub fn order(&self) -> usize {
        self.upper[0].order()
    }

    pub fn base(&self) -> (f64, f64) {
        self.upper[0].base()
    }

    /// Jet of entry `(mu, nu)`; diagonal entries are zero.
    pub fn entry(&self, mu: usize, nu: usize) -> Jet2 {
        if mu == nu {
            return Jet2::zero(self.base(), self.order());
        }
        let (slot, sign) = pair_slot(mu, nu);
        self.upper[slot].scale(sign)
    }

    pub fn value(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            return 0.0;
        }
        let (slot, sign) = pair_slot(mu, nu);
        sign * self.upper[slot].value()
    }

    /// Mixed partial `d_x^a d_y^b` of entry `(mu, nu)`.
    pub fn partial(&self, mu: usize, nu: usize, a: usize, b: usize) -> Result<f64> {
        if mu == nu {
            return Ok(0.0);
        }
        let (slot, sign) = pair_slot(mu, nu);
        Ok(sign * self.upper[slot].partial(a, b)?)
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                m[mu][nu] = self.value(mu, nu);
            }
        }
        m
    }

    pub fn upper_values(&self) -> [f64; 6] {
        [0, 1, 2, 3, 4, 5].map(|k| self.upper[k].value())
    }

    pub fn truncate(&self, order: usize) -> Result<Skew4> {
        let mut out = Vec::with_capacity(6);
        for j in &self.upper {
            out.push(j.truncate(order)?);
        }
        Ok(Skew4 { upper: out.try_into().expect("six entries") })
    }

    /// Largest coefficient difference between two skew matrices of jets.
    pub fn max_coeff_diff(&self, other: &Skew4) -> Result<f64> {
        let mut m: f64 = 0.0;
        for (a, b) in self.upper.iter().zip(&other.upper) {
            m = m.max(a.max_coeff_diff(b)?);
        }
        Ok(m)
    }

    /// Pfaffian `a12 a34 - a13 a24 + a14 a23`.
    pub fn pfaffian(&self) -> Jet2 {
        let u = &self.upper;
        &(&u[0] * &u[5]) - &(&u[1] * &u[4]) + &u[2] * &u[3]
    }

    /// Inverse via the Pfaffian: `A^{-1} = -(*A) / Pf(A)` with `(*A)_{ij} = eps_{ijkl} a_{kl} / 2`.
    ///
    /// Fails when `det A = Pf(A)^2` falls below `1e-12`.
    pub fn inverse(&self) -> Result<Skew4> {
        let pf = self.pfaffian();
        if pf.value() * pf.value() < 1e-12 {
            let (x, y) = self.base();
            return Err(Error::SingularSymplectic { x, y });
        }
        let neg_inv_pf = -pf.recip()?;
        let u = &self.upper;
        // dual upper triangle: a34, -a24, a23, a14, -a13, a12
        let dual = [u[5].clone(), -&u[4], u[3].clone(), u[2].clone(), -&u[1], u[0].clone()];
        Ok(Skew4 { upper: dual.map(|j| &j * &neg_inv_pf) })
    }
}

/// A bracket structure on the phase plane whose entries depend on `(x, y)` only.
pub trait BivectorField {
    /// Jets of all entries at `(x, y)` truncated at `order`.
    fn eval(&self, x: f64, y: f64, order: usize) -> Result<Bivector4>;
}

impl<T: BivectorField + ?Sized> BivectorField for &T {
    fn eval(&self, x: f64, y: f64, order: usize) -> Result<Bivector4> {
        (**self).eval(x, y, order)
    }
}

/// A point of phase space `(x, y, p_x, p_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        Self { x, y, px, py }
    }
}

/// A current `J(x, y, p) = base(x, y) + p_j momentum[j](x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineCurrent {
    pub base: Jet2,
    pub momentum: [Jet2; 2],
}

impl AffineCurrent {
    /// Position jet of the current at fixed momenta.
    pub fn at(&self, p: [f64; 2]) -> Jet2 {
        &self.base + &(&self.momentum[0] * p[0]) + &self.momentum[1] * p[1]
    }

    /// Jet of `d_mu J` at fixed momenta, with `mu` over all four phase directions.
    pub fn derivative(&self, mu: usize, p: [f64; 2]) -> Result<Jet2> {
        match Axis::from_index(mu) {
            Some(axis) => self.at(p).derivative(axis),
            None => {
                let c = &self.momentum[mu - 2];
                c.truncate(c.order() - 1)
            }
        }
    }
}

/// Constraint currents `J_mu` and the bracket `Omega_{mu nu} = d_mu J_nu - d_nu J_mu`
/// of the first-order model with correction field `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintData {
    gauge: GaugeField,
    theta: f64,
}

pub fn build_constraints(g: &GaugeField, theta: f64) -> ConstraintData {
    ConstraintData { gauge: g.clone(), theta }
}

impl ConstraintData {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gauge(&self) -> &GaugeField {
        &self.gauge
    }

    /// `J_i = p_i + (theta/2) B_j eps^{jk} d_i B_k`, `J_{i+2} = -(theta/2) eps^{ij} (p_j + 2 B_j)`.
    pub fn currents(&self, x: f64, y: f64, order: usize) -> Result<[AffineCurrent; 4]> {
        let th = self.theta;
        let base = (x, y);
        let b = self.gauge.components(x, y, order + 1)?;
        let grad = self.gauge.gradient(x, y, order)?;
        let b_t = [b[0].truncate(order)?, b[1].truncate(order)?];
        let zero = Jet2::zero(base, order);
        let one = Jet2::constant(base, order, 1.0);

        let position = |i: usize| -> AffineCurrent {
            // B_j eps^{jk} d_i B_k = B_0 d_i B_1 - B_1 d_i B_0
            let twist = &(&b_t[0] * &grad[i][1]) - &(&b_t[1] * &grad[i][0]);
            let mut momentum = [zero.clone(), zero.clone()];
            momentum[i] = one.clone();
            AffineCurrent { base: twist * (th / 2.0), momentum }
        };
        let conjugate = |i: usize| -> AffineCurrent {
            let mut base_jet = zero.clone();
            let mut momentum = [zero.clone(), zero.clone()];
            for j in 0..2 {
                let e = epsilon(i, j);
                if e != 0.0 {
                    base_jet = &base_jet + &(&b_t[j] * (-th * e));
                    momentum[j] = Jet2::constant(base, order, -th * e / 2.0);
                }
            }
            AffineCurrent { base: base_jet, momentum }
        };
        Ok([position(0), position(1), conjugate(0), conjugate(1)])
    }

    /// Jets of `Omega_{mu nu}` at a phase-space point, truncated at `order`.
    pub fn omega(&self, pt: PhasePoint, order: usize) -> Result<Skew4> {
        let currents = self.currents(pt.x, pt.y, order + 1)?;
        let p = [pt.px, pt.py];
        let mut upper = Vec::with_capacity(6);
        for (mu, nu) in UPPER_PAIRS {
            let a = currents[nu].derivative(mu, p)?;
            let b = currents[mu].derivative(nu, p)?;
            upper.push(a.try_sub(&b)?);
        }
        Ok(Skew4::new(upper.try_into().expect("six entries")))
    }
}

/// Momenta used to confirm that `Omega` does not depend on `p`.
pub const MOMENTUM_PROBES: [[f64; 2]; 2] = [[0.0, 0.0], [7.0, -3.0]];

/// `omega0 = Omega^{-1}`, computed pointwise by Pfaffian inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedBivector {
    constraints: ConstraintData,
}

pub fn omega0_by_inversion(c: &ConstraintData) -> InvertedBivector {
    InvertedBivector { constraints: c.clone() }
}

impl BivectorField for InvertedBivector {
    fn eval(&self, x: f64, y: f64, order: usize) -> Result<Bivector4> {
        let [p0, p1] = MOMENTUM_PROBES;
        let om0 = self.constraints.omega(PhasePoint::new(x, y, p0[0], p0[1]), order)?;
        let om1 = self.constraints.omega(PhasePoint::new(x, y, p1[0], p1[1]), order)?;
        let deviation = om0.max_coeff_diff(&om1)?;
        if deviation > 1e-12 {
            return Err(Error::MomentumDependence { x, y, deviation });
        }
        om0.inverse()
    }
}

/// General closed-form brackets:
/// `{x^i, x^j} = theta d eps^{ij}`,
/// `{x^i, p_j} = d (delta^i_j - theta eps^{ik} d_k B_j)`,
/// `{p_i, p_j} = theta (d_2 B_2 d_1 B_1 - d_1 B_2 d_2 B_1) d eps_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormBivector {
    gauge: GaugeField,
    theta: f64,
}

pub fn omega0_closed_form(g: &GaugeField, theta: f64) -> ClosedFormBivector {
    ClosedFormBivector { gauge: g.clone(), theta }
}

impl BivectorField for ClosedFormBivector {
    fn eval(&self, x: f64, y: f64, order: usize) -> Result<Bivector4> {
        let th = self.theta;
        let base = (x, y);
        let grad = self.gauge.gradient(x, y, order)?;
        let d = density_jet(&self.gauge, th, x, y, order)?;
        let mixed = |i: usize, j: usize| -> Jet2 {
            let mut inner = Jet2::constant(base, order, if i == j { 1.0 } else { 0.0 });
            for k in 0..2 {
                let e = epsilon(i, k);
                if e != 0.0 {
                    inner = &inner - &(&grad[k][j] * (th * e));
                }
            }
            &d * &inner
        };
        let det = &(&grad[1][1] * &grad[0][0]) - &(&grad[0][1] * &grad[1][0]);
        Ok(Skew4::new([&d * th, mixed(0, 0), mixed(0, 1), mixed(1, 0), mixed(1, 1), &(&det * &d) * th]))
    }
}

/// Local-profile brackets for `f(u) = u`, written out directly in `x` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalExampleBivector {
    theta: f64,
    alpha: f64,
    gauge: Gauge,
}

pub fn omega0_example_forms(p: &NCProfile, gauge: Gauge) -> Result<LocalExampleBivector> {
    p.validate()?;
    if !p.is_linear_profile() {
        return Err(Error::UnsupportedProfile(format!(
            "local-profile brackets need f(u) = u, got coefficients {:?}",
            p.f_poly
        )));
    }
    Ok(LocalExampleBivector { theta: p.theta, alpha: p.alpha, gauge })
}

impl BivectorField for LocalExampleBivector {
    fn eval(&self, x: f64, y: f64, order: usize) -> Result<Bivector4> {
        let (th, al) = (self.theta, self.alpha);
        let base = (x, y);
        let xj = Jet2::var_x(base, order);
        let yj = Jet2::var_y(base, order);
        let x2 = &xj * &xj;
        let y2 = &yj * &yj;
        let r2 = &x2 + &y2;
        let den = (&r2 * (th * al)).add_scalar(1.0);
        if den.value().abs() < 1e-12 {
            return Err(Error::SingularSymplectic { x, y });
        }
        let d = den.recip()?;
        let upper = match self.gauge {
            Gauge::Phi => {
                let xy = &xj * &yj;
                let off = &(&xy * (-al * th / 2.0)) * &d;
                [
                    &d * th,
                    &((&x2 + &(&y2 * 3.0)) * (al * th / 4.0)).add_scalar(1.0) * &d,
                    off.clone(),
                    off,
                    &((&(&x2 * 3.0) + &y2) * (al * th / 4.0)).add_scalar(1.0) * &d,
                    &(&(&r2 * &r2) * (3.0 * th * al * al / 16.0)) * &d,
                ]
            }
            // {x,p_y} = a th y^2 d and {y,p_x} = a th x^2 d, as Omega^{-1} gives for
            // B_x = B_y = (a/3)(x^3 - y^3).
            Gauge::Chi => [
                &d * th,
                &(&y2 * (al * th)).add_scalar(1.0) * &d,
                &(&y2 * (al * th)) * &d,
                &(&x2 * (al * th)) * &d,
                &(&x2 * (al * th)).add_scalar(1.0) * &d,
                Jet2::zero(base, order),
            ],
        };
        Ok(Skew4::new(upper))
    }
}

/// A bivector with polynomial entries, listed in [`UPPER_PAIRS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBivector {
    upper: [Poly2; 6],
}

impl PolyBivector {
    pub fn new(upper: [Poly2; 6]) -> Self {
        Self { upper }
    }

    /// Constant noncommutative plane: `{x,y} = theta`, `{x^i,p_j} = delta^i_j`, `{p,p} = 0`.
    pub fn constant_theta(theta: f64) -> Self {
        Self::new([
            Poly2::constant(theta),
            Poly2::constant(1.0),
            Poly2::zero(),
            Poly2::zero(),
            Poly2::constant(1.0),
            Poly2::zero(),
        ])
    }

    /// Canonical Poisson structure.
    pub fn canonical() -> Self {
        Self::constant_theta(0.0)
    }

    pub fn upper(&self) -> &[Poly2; 6] {
        &self.upper
    }
}

impl BivectorField for PolyBivector {
    fn eval(&self, x: f64, y: f64, order: usize) -> Result<Bivector4> {
        let base = (x, y);
        let xj = Jet2::var_x(base, order);
        let yj = Jet2::var_y(base, order);
        let mut upper = Vec::with_capacity(6);
        for p in &self.upper {
            upper.push(p.eval_jet(&xj, &yj)?);
        }
        Ok(Skew4::new(upper.try_into().expect("six entries")))
    }
}

/// Largest entrywise difference between the values of two bracket matrices.
pub fn max_entry_diff(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> f64 {
    let mut m: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            m = m.max((a[mu][nu] - b[mu][nu]).abs());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{solve_chi_gauge, solve_phi_gauge};

    const TOL: f64 = 1e-14;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < TOL
    }

    #[test]
    fn epsilon_is_antisymmetric() {
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(epsilon(i, j), -epsilon(j, i));
            }
        }
        assert_eq!(epsilon(0, 1), 1.0);
    }

    #[test]
    fn omega_for_vanishing_b() {
        let c = build_constraints(&GaugeField::zero(Gauge::Phi), 0.1);
        let m = c.omega(PhasePoint::new(0.3, -1.1, 2.0, 5.0), 1).unwrap().matrix();
        let mut expected = [[0.0; 4]; 4];
        expected[X][PX] = -1.0;
        expected[PX][X] = 1.0;
        expected[Y][PY] = -1.0;
        expected[PY][Y] = 1.0;
        expected[PX][PY] = 0.1;
        expected[PY][PX] = -0.1;
        assert_eq!(m, expected);
    }

    #[test]
    fn omega_is_canonical_when_commutative() {
        let g = solve_phi_gauge(&NCProfile::local(0.1, 0.5)).unwrap();
        let c = build_constraints(&g, 0.0);
        let m = c.omega(PhasePoint::new(1.0, 2.0, 0.0, 0.0), 1).unwrap().matrix();
        let canonical = build_constraints(&GaugeField::zero(Gauge::Phi), 0.0)
            .omega(PhasePoint::new(1.0, 2.0, 0.0, 0.0), 1)
            .unwrap()
            .matrix();
        assert_eq!(m, canonical);
        assert_eq!(m[X][PX], -1.0);
        assert_eq!(m[Y][PY], -1.0);
    }

    #[test]
    fn omega_times_example_bracket_is_identity() {
        let p = NCProfile::local(0.1, 0.5);
        let g = solve_phi_gauge(&p).unwrap();
        let om = build_constraints(&g, 0.1).omega(PhasePoint::new(1.0, 2.0, 0.0, 0.0), 0).unwrap().matrix();
        let w = omega0_example_forms(&p, Gauge::Phi).unwrap().eval(1.0, 2.0, 0).unwrap().matrix();
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..4).map(|k| om[i][k] * w[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13, "({i},{j}) = {s}");
            }
        }
    }

    #[test]
    fn inversion_limits() {
        let c = build_constraints(&GaugeField::zero(Gauge::Phi), 0.37);
        let w = omega0_by_inversion(&c).eval(-0.4, 1.2, 1).unwrap().matrix();
        assert!(close(w[X][Y], 0.37));
        assert!(close(w[X][PX], 1.0) && close(w[Y][PY], 1.0));
        assert!(close(w[X][PY], 0.0) && close(w[Y][PX], 0.0) && close(w[PX][PY], 0.0));

        let g = solve_phi_gauge(&NCProfile::local(0.0, 0.5)).unwrap();
        let w = omega0_by_inversion(&build_constraints(&g, 0.0)).eval(1.0, 2.0, 1).unwrap();
        assert_eq!(w.matrix(), PolyBivector::canonical().eval(1.0, 2.0, 1).unwrap().matrix());
    }

    #[test]
    fn inversion_local_example() {
        let g = solve_phi_gauge(&NCProfile::local(0.1, 0.5)).unwrap();
        let w = omega0_by_inversion(&build_constraints(&g, 0.1)).eval(1.0, 2.0, 2).unwrap();
        assert!(close(w.value(X, Y), 0.08));
        assert!(close(w.value(PX, PY), 0.09375));
    }

    #[test]
    fn singular_inversion() {
        // curl B = 2 and theta = -0.5 make d blow up everywhere
        let g = GaugeField::from_polynomials(Poly2::monomial(-1.0, 0, 1), Poly2::monomial(1.0, 1, 0));
        let c = build_constraints(&g, -0.5);
        assert_eq!(omega0_by_inversion(&c).eval(0.5, 0.5, 1), Err(Error::SingularSymplectic { x: 0.5, y: 0.5 }));
        assert_eq!(omega0_closed_form(&g, -0.5).eval(0.5, 0.5, 1), Err(Error::SingularSymplectic { x: 0.5, y: 0.5 }));
    }

    #[test]
    fn closed_form_examples() {
        let p = NCProfile::local(0.1, 0.5);
        let w = omega0_closed_form(&solve_phi_gauge(&p).unwrap(), 0.1).eval(1.0, 2.0, 1).unwrap();
        assert!(close(w.value(X, PX), 0.93));
        assert!(close(w.value(X, PY), -0.04));

        let w = omega0_closed_form(&solve_chi_gauge(&p).unwrap(), 0.1).eval(1.0, 2.0, 1).unwrap();
        assert!(close(w.value(X, PX), 0.96));
        assert!(close(w.value(X, PY), 0.16));
        assert!(close(w.value(Y, PX), 0.04));
        assert_eq!(w.value(PX, PY), 0.0);

        let w = omega0_closed_form(&GaugeField::zero(Gauge::Chi), 0.25).eval(3.0, -1.0, 1).unwrap();
        assert_eq!(w.matrix(), PolyBivector::constant_theta(0.25).eval(3.0, -1.0, 1).unwrap().matrix());
    }

    #[test]
    fn example_forms() {
        let p = NCProfile::local(0.1, 0.5);
        let phi = omega0_example_forms(&p, Gauge::Phi).unwrap();
        assert!(close(phi.eval(1.0, 2.0, 0).unwrap().value(PX, PY), 0.09375));
        let origin = phi.eval(0.0, 0.0, 0).unwrap().matrix();
        assert_eq!(origin, PolyBivector::constant_theta(0.1).eval(0.0, 0.0, 0).unwrap().matrix());

        let chi = omega0_example_forms(&p, Gauge::Chi).unwrap();
        assert!(close(chi.eval(1.0, 2.0, 0).unwrap().value(Y, PX), 0.04));

        let quadratic = NCProfile::new(0.1, 0.5, vec![0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(omega0_example_forms(&quadratic, Gauge::Phi), Err(Error::UnsupportedProfile(_))));
    }

    #[test]
    fn momentum_probe_agreement() {
        let g = solve_chi_gauge(&NCProfile::local(0.5, 0.25)).unwrap();
        let c = build_constraints(&g, 0.5);
        let a = c.omega(PhasePoint::new(0.7, 0.2, 0.0, 0.0), 2).unwrap();
        let b = c.omega(PhasePoint::new(0.7, 0.2, 7.0, -3.0), 2).unwrap();
        assert!(a.max_coeff_diff(&b).unwrap() <= 1e-12);
    }

    #[test]
    fn skew_inverse_round_trip() {
        let base = (0.0, 0.0);
        let vals = [0.3, -1.2, 0.4, 0.9, -0.7, 2.0];
        let a = Skew4::new(vals.map(|v| Jet2::constant(base, 0, v)));
        let inv = a.inverse().unwrap().matrix();
        let m = a.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..4).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }
}
