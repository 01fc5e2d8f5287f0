//! Second-order planar model with a higher-derivative Chern-Simons-like term,
//! its first-order rewriting and the split into external and internal sectors.
//!
//! Only algebraic identities between Lagrangian values are checked here; no
//! dynamics is integrated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::epsilon;

pub type Pair = [f64; 2];

/// All variables and velocities of the first-order Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LszState {
    pub x: Pair,
    /// Auxiliary velocity variables.
    pub y: Pair,
    /// Lagrange multipliers.
    pub p: Pair,
    pub xdot: Pair,
    pub ydot: Pair,
    pub pdot: Pair,
    pub theta: f64,
}

/// External coordinates `X` and internal coordinates `Q` with their velocities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpVariables {
    pub x_ext: Pair,
    pub q: Pair,
    pub x_ext_dot: Pair,
    pub q_dot: Pair,
}

fn dot(a: Pair, b: Pair) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `eps_ij a_i b_j`
fn cross(a: Pair, b: Pair) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `L = xdot^2 / 2 + (theta/2) eps_ij xdot_i xddot_j`
pub fn lagrangian_lsz(xdot: Pair, xddot: Pair, theta: f64) -> f64 {
    0.5 * dot(xdot, xdot) + 0.5 * theta * cross(xdot, xddot)
}

/// `L0 = p_i (xdot_i - y_i) + y_i^2 / 2 + (theta/2) eps_ij y_i ydot_j`
pub fn lagrangian_l0(s: &LszState) -> f64 {
    let v = [s.xdot[0] - s.y[0], s.xdot[1] - s.y[1]];
    dot(s.p, v) + 0.5 * dot(s.y, s.y) + 0.5 * s.theta * cross(s.y, s.ydot)
}

/// `X_i = x_i + theta eps_ij (y_j - p_j)`, `Q_i = theta (y_i - p_i)`, and their time derivatives.
pub fn hp_transform(s: &LszState) -> HpVariables {
    let th = s.theta;
    let shift = |base: Pair, a: Pair, b: Pair| -> Pair {
        let mut out = base;
        for i in 0..2 {
            for j in 0..2 {
                out[i] += th * epsilon(i, j) * (a[j] - b[j]);
            }
        }
        out
    };
    HpVariables {
        x_ext: shift(s.x, s.y, s.p),
        q: [th * (s.y[0] - s.p[0]), th * (s.y[1] - s.p[1])],
        x_ext_dot: shift(s.xdot, s.ydot, s.pdot),
        q_dot: [th * (s.ydot[0] - s.pdot[0]), th * (s.ydot[1] - s.pdot[1])],
    }
}

/// `p_i Xdot_i + (theta/2) eps_ij p_i pdot_j - p_i^2 / 2`
pub fn l_ext(s: &LszState, hp: &HpVariables) -> f64 {
    dot(s.p, hp.x_ext_dot) + 0.5 * s.theta * cross(s.p, s.pdot) - 0.5 * dot(s.p, s.p)
}

/// `(1/(2 theta)) eps_ij Q_i Qdot_j + (1/(2 theta^2)) Q_i^2`; requires `theta != 0`.
pub fn l_int(s: &LszState, hp: &HpVariables) -> Result<f64> {
    if s.theta == 0.0 {
        return Err(Error::Domain("internal Lagrangian requires theta != 0".into()));
    }
    let th = s.theta;
    Ok(cross(hp.q, hp.q_dot) / (2.0 * th) + dot(hp.q, hp.q) / (2.0 * th * th))
}

/// `L_ext + L_int - L0`. The split holds up to this total time derivative, which
/// equals [`boundary_term`].
pub fn decomposition_residual(s: &LszState) -> Result<f64> {
    let hp = hp_transform(s);
    Ok(l_ext(s, &hp) + l_int(s, &hp)? - lagrangian_l0(s))
}

/// `(theta/2) d/dt (eps_ij p_i y_j) = (theta/2) eps_ij (pdot_i y_j + p_i ydot_j)`
pub fn boundary_term(s: &LszState) -> f64 {
    0.5 * s.theta * (cross(s.pdot, s.y) + cross(s.p, s.ydot))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> LszState {
        LszState {
            x: [0.0, 0.0],
            y: [1.0, 2.0],
            p: [3.0, 4.0],
            xdot: [1.0, 2.0],
            ydot: [0.5, -0.5],
            pdot: [0.1, 0.2],
            theta: 0.1,
        }
    }

    #[test]
    fn l0_example() {
        assert!((lagrangian_l0(&example()) - 2.425).abs() < 1e-15);
        let zero = LszState {
            x: [0.0; 2],
            y: [0.0; 2],
            p: [0.0; 2],
            xdot: [0.0; 2],
            ydot: [0.0; 2],
            pdot: [0.0; 2],
            theta: 0.0,
        };
        assert_eq!(lagrangian_l0(&zero), 0.0);
        let free = LszState { theta: 0.0, ..example() };
        assert!((lagrangian_l0(&free) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn residual_example() {
        let s = example();
        assert!((decomposition_residual(&s).unwrap() + 0.175).abs() < 1e-14);
        assert!((boundary_term(&s) + 0.175).abs() < 1e-15);
    }

    #[test]
    fn hp_examples() {
        let s = LszState {
            x: [1.0, 0.0],
            y: [0.0, 1.0],
            p: [1.0, 1.0],
            xdot: [0.0; 2],
            ydot: [0.0; 2],
            pdot: [0.0; 2],
            theta: 0.1,
        };
        let hp = hp_transform(&s);
        assert!((hp.x_ext[0] - 1.0).abs() < 1e-15 && (hp.x_ext[1] - 0.1).abs() < 1e-15);
        assert!((hp.q[0] + 0.1).abs() < 1e-15 && hp.q[1] == 0.0);

        let flat = hp_transform(&LszState { theta: 0.0, ..s });
        assert_eq!(flat.x_ext, s.x);
        assert_eq!(flat.q, [0.0, 0.0]);
    }

    #[test]
    fn zero_theta_is_domain_error() {
        let s = LszState { theta: 0.0, ..example() };
        assert!(matches!(decomposition_residual(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn parallel_momenta_cancel() {
        let s = LszState { p: [2.0, 4.0], pdot: [1.0, -1.0], ..example() };
        assert!(decomposition_residual(&s).unwrap().abs() < 1e-14);
    }
}
