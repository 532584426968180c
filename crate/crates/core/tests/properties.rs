use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

use selfsim_core::eigen::{pencil_eigen, PSystem};
use selfsim_core::linalg::Matrix;
use selfsim_core::riemann::solve_profile;
use selfsim_core::{RiemannData, SolverConfig, StressLaw};

fn to_na(m: &Matrix) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pencil_matches_dense_eigenvalues(
        p in prop::collection::vec(-0.2f64..0.2, 9),
        q in prop::collection::vec(-0.1f64..0.1, 9),
        y in -1.0f64..1.0,
    ) {
        let a = Matrix::from_fn(3, |i, j| [1.0, 2.5, 4.0][i] * (i == j) as u8 as f64 + p[3 * i + j]);
        let b = Matrix::from_fn(3, |i, j| (i == j) as u8 as f64 + q[3 * i + j]);
        let pairs = pencil_eigen(&a, &b, y).unwrap();
        let dense = to_na(&b).try_inverse().unwrap() * (to_na(&a) - Matrix3::identity() * y);
        let mut ev: Vec<f64> = dense.eigenvalues().unwrap().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (pair, e) in pairs.iter().zip(&ev) {
            prop_assert!((pair.mu - e).abs() < 1e-9, "{} vs {}", pair.mu, e);
        }
    }

    #[test]
    fn solve_matches_dense_lu(
        p in prop::collection::vec(-0.5f64..0.5, 9),
        r in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let m = Matrix::from_fn(3, |i, j| 3.0 * (i == j) as u8 as f64 + p[3 * i + j]);
        let x = m.solve(&r).unwrap();
        let reference = to_na(&m).lu().solve(&Vector3::from_column_slice(&r)).unwrap();
        for k in 0..3 {
            prop_assert!((x[k] - reference[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn hugoniot_states_satisfy_jump_conditions(
        w_minus in -1.0f64..1.0,
        dw in 0.01f64..0.5,
        v_minus in -1.0f64..1.0,
        family in prop::bool::ANY,
    ) {
        let law = StressLaw::hardening(1.0, 1.0).unwrap();
        let sys = PSystem::identity_diffusion(law.clone());
        let sign = if family { 1.0 } else { -1.0 };
        let (up, s) = sys.hugoniot([v_minus, w_minus], w_minus + dw, sign).unwrap();
        let jw = up[1] - w_minus;
        let jv = up[0] - v_minus;
        prop_assert!((s * jw + jv).abs() < 1e-12);
        prop_assert!((s * jv + law.sigma(up[1]) - law.sigma(w_minus)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_profiles_are_normalized_and_bounded(
        eps in 0.02f64..0.1,
        vl in -1.0f64..1.0, wl in -1.0f64..1.0, vr in -1.0f64..1.0, wr in -1.0f64..1.0,
    ) {
        let law = StressLaw::linear(2.0).unwrap();
        let cfg = SolverConfig { eps, n_nodes: 1201, ..SolverConfig::default() };
        let d = RiemannData::new(vl, wl, vr, wr);
        let s = solve_profile(&law, &cfg, &d).unwrap();
        prop_assert!((s.minus.mass() - 1.0).abs() < 1e-12);
        prop_assert!((s.plus.mass() - 1.0).abs() < 1e-12);
        prop_assert!(s.middle.within_bound);
        // exact linear middle state: w* = (w_l + w_r)/2 + (v_r - v_l)/(2 c0)
        let exact = 0.5 * (wl + wr) + (vr - vl) / 4.0;
        prop_assert!((s.w_star - exact).abs() <= 5.0 * eps);
    }
}
