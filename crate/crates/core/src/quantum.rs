//! Order-hbar^2 correction to the Dirac bracket and the first-order star commutator.
//!
//! The correction is
//!
//! ```text
//! omega2^{mu nu} = 1/48 d_g w^{r s} d_r w^{g t} d_s d_t w^{mu nu}
//!                - 1/24 d_s d_g w^{mu r} d_r d_t w^{nu s} w^{g t}
//! ```
//!
//! with `w = omega0` and all indices summed over the four phase directions.
//! [`omega2_general`] evaluates it for any bracket field. [`omega2_appendix`] is an
//! independent component-by-component expansion written in terms of `d` and `d_k B_n`
//! for brackets coming from a gauge field.

use crate::error::Result;
use crate::fields::{density_jet, GaugeField};
use crate::jet::{Jet2, ScalarField};
use crate::symplectic::{epsilon, Bivector4, BivectorField, UPPER_PAIRS};

pub type Matrix4 = [[f64; 4]; 4];

/// First and second partials of every entry of a bracket at one point. Momentum
/// directions (indices 2 and 3) carry zero derivatives.
struct DerivativeTable {
    value: Matrix4,
    first: [[[f64; 4]; 4]; 4],
    second: [[[[f64; 4]; 4]; 4]; 4],
}

impl DerivativeTable {
    fn new(w: &Bivector4) -> Result<Self> {
        let mut table =
            DerivativeTable { value: w.matrix(), first: [[[0.0; 4]; 4]; 4], second: [[[[0.0; 4]; 4]; 4]; 4] };
        for mu in 0..4 {
            for nu in 0..4 {
                for s in 0..2 {
                    let (a, b) = if s == 0 { (1, 0) } else { (0, 1) };
                    table.first[mu][nu][s] = w.partial(mu, nu, a, b)?;
                    for t in 0..2 {
                        let (a, b) = match (s, t) {
                            (0, 0) => (2, 0),
                            (1, 1) => (0, 2),
                            _ => (1, 1),
                        };
                        table.second[mu][nu][s][t] = w.partial(mu, nu, a, b)?;
                    }
                }
            }
        }
        Ok(table)
    }
}

/// The correction formula before antisymmetrization.
pub fn omega2_raw(w0: &dyn BivectorField, point: (f64, f64)) -> Result<Matrix4> {
    let t = DerivativeTable::new(&w0.eval(point.0, point.1, 2)?)?;
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut first = 0.0;
            let mut second = 0.0;
            for g in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        for d in 0..4 {
                            first += t.first[r][s][g] * t.first[g][d][r] * t.second[mu][nu][s][d];
                            second += t.second[mu][r][s][g] * t.second[nu][s][r][d] * t.value[g][d];
                        }
                    }
                }
            }
            out[mu][nu] = first / 48.0 - second / 24.0;
        }
    }
    Ok(out)
}

/// Quantum non-Poisson correction `omega2` at a point, antisymmetrized in `(mu, nu)`.
/// The raw formula is already antisymmetric, so this only removes rounding asymmetry.
pub fn omega2_general(w0: &dyn BivectorField, point: (f64, f64)) -> Result<Matrix4> {
    let raw = omega2_raw(w0, point)?;
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            out[mu][nu] = 0.5 * (raw[mu][nu] - raw[nu][mu]);
        }
    }
    Ok(out)
}

/// Independent entries of `omega2` for a gauge-field bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixComponents {
    /// `omega2^{12}`
    pub w12: f64,
    /// `mixed[i][j] = omega2^{i, j+2}`
    pub mixed: [[f64; 2]; 2],
    /// `omega2^{34}`
    pub w34: f64,
}

impl AppendixComponents {
    pub fn to_matrix(&self) -> Matrix4 {
        let mut m = [[0.0; 4]; 4];
        let mut set = |a: usize, b: usize, v: f64| {
            m[a][b] = v;
            m[b][a] = -v;
        };
        set(0, 1, self.w12);
        for i in 0..2 {
            for j in 0..2 {
                set(i, j + 2, self.mixed[i][j]);
            }
        }
        set(2, 3, self.w34);
        m
    }

    pub fn upper_values(&self) -> [f64; 6] {
        let m = self.to_matrix();
        UPPER_PAIRS.map(|(a, b)| m[a][b])
    }
}

/// Second-order data shared by both component expansions.
struct GaugeData {
    theta: f64,
    d: Jet2,
    /// `grad[k][n] = d_k B_n`
    grad: [[Jet2; 2]; 2],
}

impl GaugeData {
    fn new(g: &GaugeField, theta: f64, point: (f64, f64)) -> Result<Self> {
        let (x, y) = point;
        Ok(Self { theta, d: density_jet(g, theta, x, y, 2)?, grad: g.gradient(x, y, 2)? })
    }

    fn d1(&self, a: usize) -> f64 {
        first(&self.d, a)
    }

    fn d2(&self, a: usize, b: usize) -> f64 {
        second(&self.d, a, b)
    }

    /// `(1/2)(d_y d)^2 d_x^2 - d_x d d_y d d_x d_y + (1/2)(d_x d)^2 d_y^2` applied to `f`.
    fn op(&self, f: &Jet2) -> f64 {
        let (dx, dy) = (self.d1(0), self.d1(1));
        0.5 * dy * dy * second(f, 0, 0) - dx * dy * second(f, 0, 1) + 0.5 * dx * dx * second(f, 1, 1)
    }

    /// `omega0^{s, j+2} = d (delta_sj - theta eps^{sk} d_k B_j)`
    fn mixed_bracket(&self, s: usize, j: usize) -> Jet2 {
        let mut inner = Jet2::constant(self.d.base(), 2, if s == j { 1.0 } else { 0.0 });
        for k in 0..2 {
            let e = epsilon(s, k);
            if e != 0.0 {
                inner = &inner - &(&self.grad[k][j] * (self.theta * e));
            }
        }
        &self.d * &inner
    }

    /// `(d_2 B_2 d_1 B_1 - d_1 B_2 d_2 B_1) d`
    fn momentum_density(&self) -> Jet2 {
        let g = &self.grad;
        let det = &(&g[1][1] * &g[0][0]) - &(&g[0][1] * &g[1][0]);
        &det * &self.d
    }
}

fn first(f: &Jet2, a: usize) -> f64 {
    if a == 0 {
        f.coeff(1, 0)
    } else {
        f.coeff(0, 1)
    }
}

fn second(f: &Jet2, a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 0) => 2.0 * f.coeff(2, 0),
        (1, 1) => 2.0 * f.coeff(0, 2),
        _ => f.coeff(1, 1),
    }
}

/// Component expansion of `omega2` for the bracket built from `(g, theta)`.
///
/// ```text
/// omega2^{12}    = th^3/24 [ O(d) + d (d_11 d d_22 d - (d_12 d)^2) ]
/// omega2^{i,j+2} = th^2/24 O(M_ij)
///                + th^2/24 eps^{im} d [ d_s d_1 d d_m d_2 M_sj - d_s d_2 d d_m d_1 M_sj ]
/// omega2^{34}    = th^3/24 O(D d)
///                - th/24 d [ d_s d_1 M_r1 d_r d_2 M_s2 - d_s d_2 M_r1 d_r d_1 M_s2 ]
/// ```
///
/// where `O = (1/2)(d_2 d)^2 d_1^2 - d_1 d d_2 d d_1 d_2 + (1/2)(d_1 d)^2 d_2^2`,
/// `M_sj = omega0^{s,j+2} = d (delta_sj - theta eps^{sk} d_k B_j)`,
/// `D = d_2 B_2 d_1 B_1 - d_1 B_2 d_2 B_1`, and repeated indices are summed over positions.
pub fn omega2_appendix(g: &GaugeField, theta: f64, point: (f64, f64)) -> Result<AppendixComponents> {
    let data = GaugeData::new(g, theta, point)?;
    let th = theta;
    let d = data.d.value();

    let hess_det = data.d2(0, 0) * data.d2(1, 1) - data.d2(0, 1) * data.d2(0, 1);
    let w12 = th.powi(3) / 24.0 * (data.op(&data.d) + d * hess_det);

    let m: [[Jet2; 2]; 2] = [0, 1].map(|s| [0, 1].map(|j| data.mixed_bracket(s, j)));
    let mut mixed = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut cross = 0.0;
            for mm in 0..2 {
                let e = epsilon(i, mm);
                if e == 0.0 {
                    continue;
                }
                for s in 0..2 {
                    cross += e * (data.d2(s, 0) * second(&m[s][j], mm, 1) - data.d2(s, 1) * second(&m[s][j], mm, 0));
                }
            }
            mixed[i][j] = th * th / 24.0 * (data.op(&m[i][j]) + d * cross);
        }
    }

    let mut cross = 0.0;
    for r in 0..2 {
        for s in 0..2 {
            cross += second(&m[r][0], s, 0) * second(&m[s][1], r, 1) - second(&m[r][0], s, 1) * second(&m[s][1], r, 0);
        }
    }
    let w34 = th.powi(3) / 24.0 * data.op(&data.momentum_density()) - th / 24.0 * d * cross;

    Ok(AppendixComponents { w12, mixed, w34 })
}

/// Inner sign choice for the two `delta_n^2 d (+/-) theta d_1 B_n d` factors of the
/// reference `omega2^{34}` formula, which writes them with opposite signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign34 {
    Plus,
    Minus,
}

impl Sign34 {
    fn factor(self) -> f64 {
        match self {
            Sign34::Plus => 1.0,
            Sign34::Minus => -1.0,
        }
    }
}

/// The reference component formulas taken literally, with the
/// ambiguous `omega2^{34}` inner sign chosen by `sign34`. Kept for comparison.
/// With [`Sign34::Plus`] its `omega2^{34}` agrees with [`omega2_general`] in the
/// phi-gauge only; no sign works for the chi-gauge or a general `B`, and the other
/// entries disagree for every `B` with nonconstant `d`.
pub fn omega2_appendix_literal(
    g: &GaugeField,
    theta: f64,
    point: (f64, f64),
    sign34: Sign34,
) -> Result<AppendixComponents> {
    let data = GaugeData::new(g, theta, point)?;
    let th = theta;
    let d = data.d.value();
    let base = data.d.base();

    let w12 = th.powi(3) / 24.0 * (data.op(&data.d) + d * data.d2(0, 1).powi(2) - d * data.d2(1, 1) * data.d2(0, 0));

    // d_k B_n d
    let bd: [[Jet2; 2]; 2] = [0, 1].map(|k| [0, 1].map(|n| &data.grad[k][n] * &data.d));
    let mut mixed = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mij = data.mixed_bracket(i, j);
            let mut t = th * th / 24.0 * data.op(&mij);
            for mm in 0..2 {
                let e = epsilon(i, mm);
                if e == 0.0 {
                    continue;
                }
                t -= th * th / 24.0 * e * d * (data.d2(j, 0) * data.d2(mm, 1) - data.d2(j, 1) * data.d2(mm, 0));
                for k in 0..2 {
                    let ek = epsilon(j, k);
                    if ek == 0.0 {
                        continue;
                    }
                    for n in 0..2 {
                        t += th.powi(3) / 24.0
                            * e
                            * ek
                            * d
                            * (data.d2(n, 0) * second(&bd[k][n], mm, 1) - data.d2(n, 1) * second(&bd[k][n], mm, 0));
                    }
                }
            }
            mixed[i][j] = t;
        }
    }

    let delta = |a: usize, b: usize| Jet2::constant(base, 2, if a == b { 1.0 } else { 0.0 });
    let p: [Jet2; 2] = [0, 1].map(|mm| &delta(mm, 0) * &data.d - &(&bd[1][mm] * th));
    let q: [Jet2; 2] = [0, 1].map(|n| &delta(n, 1) * &data.d + &(&bd[0][n] * (th * sign34.factor())));
    let mut cross = 0.0;
    for mm in 0..2 {
        for n in 0..2 {
            cross += second(&p[mm], n, 0) * second(&q[n], mm, 1) - second(&p[mm], n, 1) * second(&q[n], mm, 0);
        }
    }
    let w34 = th.powi(3) / 24.0 * data.op(&data.momentum_density()) - th / 24.0 * d * cross;

    Ok(AppendixComponents { w12, mixed, w34 })
}

/// Mismatch measure used for component comparisons: absolute error divided by
/// `max(|reference|, 1e-4)`. A bound of `1e-8` is a relative bound for entries of
/// size `>= 1e-4` and an absolute bound of `1e-12` below that.
pub fn scaled_mismatch(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-4)
}

fn max_mismatch(a: &AppendixComponents, general: &Matrix4) -> f64 {
    let av = a.upper_values();
    UPPER_PAIRS.iter().enumerate().map(|(k, &(mu, nu))| scaled_mismatch(av[k], general[mu][nu])).fold(0.0, f64::max)
}

/// Outcome of matching the reference `omega2^{34}` sign candidates against the general formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sign34Resolution {
    /// Largest scaled mismatch of the reference `omega2^{34}` with both inner signs `+`.
    pub plus_mismatch: f64,
    /// Same with both inner signs `-`.
    pub minus_mismatch: f64,
    /// Largest scaled mismatch over all entries for [`omega2_appendix`].
    pub expansion_mismatch: f64,
    /// Reference sign that matches within the tolerance, if any.
    pub winner: Option<Sign34>,
}

/// Compares both reference `omega2^{34}` candidates and the re-derived expansion
/// with [`omega2_general`] at the given points.
pub fn resolve_appendix_sign34(
    g: &GaugeField,
    theta: f64,
    w0: &dyn BivectorField,
    points: &[(f64, f64)],
    tolerance: f64,
) -> Result<Sign34Resolution> {
    let mut plus: f64 = 0.0;
    let mut minus: f64 = 0.0;
    let mut expansion: f64 = 0.0;
    for &pt in points {
        let general = omega2_general(w0, pt)?;
        let reference = general[2][3];
        let p = omega2_appendix_literal(g, theta, pt, Sign34::Plus)?;
        let m = omega2_appendix_literal(g, theta, pt, Sign34::Minus)?;
        plus = plus.max(scaled_mismatch(p.w34, reference));
        minus = minus.max(scaled_mismatch(m.w34, reference));
        expansion = expansion.max(max_mismatch(&omega2_appendix(g, theta, pt)?, &general));
    }
    let winner = match (plus <= tolerance, minus <= tolerance) {
        (true, false) => Some(Sign34::Plus),
        (false, true) => Some(Sign34::Minus),
        _ => None,
    };
    Ok(Sign34Resolution { plus_mismatch: plus, minus_mismatch: minus, expansion_mismatch: expansion, winner })
}

/// `omega = omega0 + hbar^2 omega2 + O(hbar^4)` with `hbar` a formal parameter.
#[derive(Debug, Clone)]
pub struct HbarSeriesBivector<W> {
    omega0: W,
}

impl<W: BivectorField> HbarSeriesBivector<W> {
    pub fn new(omega0: W) -> Self {
        Self { omega0 }
    }

    pub fn omega0(&self) -> &W {
        &self.omega0
    }

    pub fn omega2(&self, point: (f64, f64)) -> Result<Matrix4> {
        omega2_general(&self.omega0, point)
    }

    /// `omega0 + hbar^2 omega2` at a point.
    pub fn truncated(&self, point: (f64, f64), hbar: f64) -> Result<Matrix4> {
        let w0 = self.omega0.eval(point.0, point.1, 0)?.matrix();
        let w2 = self.omega2(point)?;
        let mut out = w0;
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu][nu] += hbar * hbar * w2[mu][nu];
            }
        }
        Ok(out)
    }
}

/// One entry `omega^{mu nu}` of a bracket viewed as a scalar field.
pub struct BivectorEntry<'a> {
    pub field: &'a dyn BivectorField,
    pub mu: usize,
    pub nu: usize,
}

impl ScalarField for BivectorEntry<'_> {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet2> {
        Ok(self.field.eval(x, y, order)?.entry(self.mu, self.nu))
    }
}

/// Coefficient of `i hbar` in `xi^mu * g - g * xi^mu` for the first-order star product
/// `f * g = f g + (i hbar / 2) omega^{ab} d_a f d_b g + ...`, i.e. `omega^{mu s} d_s g`.
///
/// For `g = omega^{nu la}` the cyclic sum over `(mu, nu, la)` of these coefficients is the
/// Jacobiator, so the order-hbar part of the operator Jacobi condition is the classical
/// Jacobi identity; see [`order_hbar_condition`].
pub fn star1_commutator(mu: usize, g: &dyn ScalarField, w: &dyn BivectorField, point: (f64, f64)) -> Result<f64> {
    let (x, y) = point;
    let gj = g.jet(x, y, 1)?;
    let wj = w.eval(x, y, 0)?;
    Ok(wj.value(mu, 0) * gj.coeff(1, 0) + wj.value(mu, 1) * gj.coeff(0, 1))
}

/// Cyclic sum of [`star1_commutator`] over `(mu, nu, la)` with `g = omega^{nu la}`.
pub fn order_hbar_condition(w: &dyn BivectorField, triple: [usize; 3], point: (f64, f64)) -> Result<f64> {
    let [mu, nu, la] = triple;
    let mut total = 0.0;
    for (a, b, c) in [(mu, nu, la), (nu, la, mu), (la, mu, nu)] {
        total += star1_commutator(a, &BivectorEntry { field: w, mu: b, nu: c }, w, point)?;
    }
    Ok(total)
}
