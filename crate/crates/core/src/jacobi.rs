//! Jacobi identity for bracket structures and the obstruction for linear
//! noncommutativity with canonical momenta.

use crate::error::{Error, Result};
use crate::poly::Poly2;
use crate::symplectic::{Bivector4, BivectorField, PolyBivector};

/// The four index triples that determine the Jacobiator of a 4x4 bivector.
pub const INDEPENDENT_TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// One Jacobiator value at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiResidual {
    pub indices: [usize; 3],
    pub point: (f64, f64),
    pub value: f64,
}

/// `omega^{mu s} d_s omega^{nu l} + cyclic(mu nu l)` from precomputed jets
/// (order >= 1). Momentum derivatives vanish, so `s` runs over positions only.
pub fn jacobiator_at(w: &Bivector4, triple: [usize; 3]) -> Result<f64> {
    let [mu, nu, la] = triple;
    let mut total = 0.0;
    for (a, b, c) in [(mu, nu, la), (nu, la, mu), (la, mu, nu)] {
        total += w.value(a, 0) * w.partial(b, c, 1, 0)? + w.value(a, 1) * w.partial(b, c, 0, 1)?;
    }
    Ok(total)
}

pub fn jacobiator(w: &dyn BivectorField, triple: [usize; 3], point: (f64, f64)) -> Result<f64> {
    jacobiator_at(&w.eval(point.0, point.1, 1)?, triple)
}

/// All independent Jacobiator values at a point.
pub fn jacobi_residuals(w: &dyn BivectorField, point: (f64, f64)) -> Result<Vec<JacobiResidual>> {
    let jets = w.eval(point.0, point.1, 1)?;
    INDEPENDENT_TRIPLES
        .iter()
        .map(|&indices| Ok(JacobiResidual { indices, point, value: jacobiator_at(&jets, indices)? }))
        .collect()
}

/// Structure constants `f_k^{ij}` of a linear coordinate bracket
/// `{x^i, x^j} = f_k^{ij} x^k` in two dimensions; stored as `table[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureConstants {
    table: [[[f64; 2]; 2]; 2],
}

impl StructureConstants {
    pub fn new(table: [[[f64; 2]; 2]; 2]) -> Result<Self> {
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    if table[k][i][j] != -table[k][j][i] {
                        return Err(Error::InvalidStructureConstants(format!(
                            "f_{k}^{{{i}{j}}} = {} is not minus f_{k}^{{{j}{i}}} = {}",
                            table[k][i][j], table[k][j][i]
                        )));
                    }
                }
            }
        }
        Ok(Self { table })
    }

    /// Builds the table from its two free entries `f_1^{12}` and `f_2^{12}`.
    pub fn from_xy(f1: f64, f2: f64) -> Self {
        let mut table = [[[0.0; 2]; 2]; 2];
        for (k, f) in [f1, f2].into_iter().enumerate() {
            table[k][0][1] = f;
            table[k][1][0] = -f;
        }
        Self { table }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.table[k][i][j]
    }

    /// The naive bracket: `{x^i, x^j} = f_l^{ij} x^l`, `{x^i, p_j} = delta^i_j`, `{p_i, p_j} = 0`.
    pub fn naive_bivector(&self) -> PolyBivector {
        let w12 = Poly2::monomial(self.table[0][0][1], 1, 0).add(&Poly2::monomial(self.table[1][0][1], 0, 1));
        PolyBivector::new([
            w12,
            Poly2::constant(1.0),
            Poly2::zero(),
            Poly2::zero(),
            Poly2::constant(1.0),
            Poly2::zero(),
        ])
    }
}

/// Jacobiator of the naive linear bracket for each triple `(p_k, x^i, x^j)`,
/// returned as `table[k][i][j]`. Every entry equals `-f_k^{ij}`, so the identity
/// fails whenever the structure constants are nonzero.
pub fn linear_counterexample(sc: &StructureConstants) -> Result<[[[f64; 2]; 2]; 2]> {
    let w = sc.naive_bivector();
    // the bracket is linear, so any point gives the same values
    let jets = w.eval(0.0, 0.0, 1)?;
    let mut out = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                out[k][i][j] = jacobiator_at(&jets, [k + 2, i, j])?;
            }
        }
    }
    Ok(out)
}
