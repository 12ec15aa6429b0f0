//! The response formula against a direct solve of the linearized moment
//! equations.

mod common;

use common::{oracle, Z};
use proptest::prelude::*;
use qfluid::linear_response::{delta_p, delta_p_along, PerturbationInput, Tensor2};
use qfluid::PlasmaParams;

fn symmetric(c: [f64; 6]) -> Tensor2 {
    [[c[0], c[1], c[2]], [c[1], c[3], c[4]], [c[2], c[4], c[5]]]
}

fn max_abs(t: &Tensor2) -> f64 {
    t.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_matches_linearized_moment_system(
        k in 0.05f64..3.0,
        omega in 0.5f64..4.0,
        dphi in -1.0f64..1.0,
        hbar in 0.0f64..2.0,
        diag in prop::array::uniform3(0.1f64..2.0),
        off in prop::array::uniform3(-0.05f64..0.05),
    ) {
        let prm = PlasmaParams::nondimensional(hbar, 0.1, 0.1);
        let p0 = symmetric([diag[0], off[0], off[1], diag[1], off[2], diag[2]]);
        let formula = delta_p(&PerturbationInput { k, omega_sq: omega * omega, delta_phi: dphi, p0, params: prm }).unwrap();
        let direct = oracle(k, omega, dphi, &p0, &prm);
        let scale = max_abs(&formula).max(1e-300);
        for a in 0..3 {
            for b in 0..3 {
                prop_assert!((formula[a][b] - direct[a][b]).abs() <= 1e-11 * scale);
                prop_assert_eq!(formula[a][b], formula[b][a]);
            }
        }
    }

    #[test]
    fn response_is_linear_in_potential(k in 0.1f64..3.0, scale in -4.0f64..4.0) {
        let prm = PlasmaParams::nondimensional(0.7, 0.2, 0.1);
        let p0 = symmetric([0.3, 0.0, 0.0, 0.3, 0.0, 0.5]);
        let base = PerturbationInput { k, omega_sq: 1.5, delta_phi: 1e-3, p0, params: prm };
        let one = delta_p(&base).unwrap();
        let many = delta_p(&PerturbationInput { delta_phi: 1e-3 * scale, ..base }).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                prop_assert!((many[a][b] - scale * one[a][b]).abs() <= 1e-15 * max_abs(&one).max(1e-300) * 4.0);
                if a != b {
                    prop_assert_eq!(one[a][b], 0.0);
                }
            }
        }
    }

    #[test]
    fn rotation_wrapper_agrees_with_oracle_in_rotated_frame(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..(2.0 * std::f64::consts::PI),
    ) {
        // Isotropic P0 is rotation invariant, so the response along k̂ is
        // the z response rotated: δP = c (p0 I + 2 p0 k̂k̂ + recoil k̂k̂).
        let prm = PlasmaParams::nondimensional(0.9, 0.1, 0.1);
        let p = 0.4;
        let p0 = symmetric([p, 0.0, 0.0, p, 0.0, p]);
        let khat = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let k = 1.3;
        let kv = [k * khat[0], k * khat[1], k * khat[2]];
        let out = delta_p_along(kv, 2.0, 0.01, &p0, &prm).unwrap();
        let z = oracle(k, 2.0f64.sqrt(), 0.01, &p0, &prm);
        let c_perp = z[0][0];
        let c_par = z[Z][Z];
        for a in 0..3 {
            for b in 0..3 {
                let expect = c_perp * if a == b { 1.0 } else { 0.0 } + (c_par - c_perp) * khat[a] * khat[b];
                prop_assert!((out[a][b] - expect).abs() < 1e-13);
            }
        }
    }
}
