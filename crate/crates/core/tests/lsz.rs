use ncqm::lsz::{boundary_term, decomposition_residual, hp_transform, lagrangian_l0, lagrangian_lsz, LszState};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = [f64; 2]> {
    [-2.0f64..2.0, -2.0f64..2.0]
}

fn state() -> impl Strategy<Value = LszState> {
    (pair(), pair(), pair(), pair(), pair(), pair(), 0.1f64..2.0)
        .prop_map(|(x, y, p, xdot, ydot, pdot, theta)| LszState { x, y, p, xdot, ydot, pdot, theta })
}

proptest! {
    #[test]
    fn residual_is_the_boundary_term(s in state()) {
        prop_assert!((decomposition_residual(&s).unwrap() - boundary_term(&s)).abs() < 1e-12);
    }

    #[test]
    fn residual_ignores_positions_and_their_velocities(s in state(), x in pair(), xdot in pair()) {
        let moved = LszState { x, xdot, ..s };
        prop_assert!((decomposition_residual(&moved).unwrap() - decomposition_residual(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn residual_ignores_internal_excitation(s in state(), shift in pair(), rate in pair()) {
        // shifting y and p together leaves Q fixed; only the bilinear boundary term moves
        let moved = LszState {
            y: [s.y[0] + shift[0], s.y[1] + shift[1]],
            p: [s.p[0] + shift[0], s.p[1] + shift[1]],
            ydot: [s.ydot[0] + rate[0], s.ydot[1] + rate[1]],
            pdot: [s.pdot[0] + rate[0], s.pdot[1] + rate[1]],
            ..s
        };
        let (q0, q1) = (hp_transform(&s).q, hp_transform(&moved).q);
        prop_assert!((q0[0] - q1[0]).abs() < 1e-14 && (q0[1] - q1[1]).abs() < 1e-14);
        prop_assert!((decomposition_residual(&moved).unwrap() - boundary_term(&moved)).abs() < 1e-12);
    }

    #[test]
    fn on_shell_first_order_form_is_the_second_order_lagrangian(s in state()) {
        let on_shell = LszState { y: s.xdot, ..s };
        prop_assert!((lagrangian_l0(&on_shell) - lagrangian_lsz(s.xdot, s.ydot, s.theta)).abs() < 1e-13);
    }

    #[test]
    fn parallel_sectors_have_no_residual(s in state(), lambda in -2.0f64..2.0) {
        let par = LszState { p: [lambda * s.y[0], lambda * s.y[1]], pdot: [lambda * s.ydot[0], lambda * s.ydot[1]], ..s };
        prop_assert!(decomposition_residual(&par).unwrap().abs() < 1e-12);
    }
}
