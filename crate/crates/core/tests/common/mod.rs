//! Direct solve of the linearized moment equations for a plane wave along
//! z: momentum, pressure and the `Q_ijz` heat-flux components (continuity
//! only fixes `δn` and is not needed for `δP`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qfluid::linear_response::Tensor2;
use qfluid::PlasmaParams;

pub const Z: usize = 2;
const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).unwrap()
}

/// Unknowns: δu (3), δP (6), δQ_ijz (6). Every term carries e^{i(kz − ωt)}.
pub fn oracle(k: f64, omega: f64, dphi: f64, p0: &Tensor2, prm: &PlasmaParams) -> Tensor2 {
    let i = Complex64::i();
    let (m, n0, e, hbar) = (prm.m, prm.n0, prm.e, prm.hbar);
    let du = |j: usize| j;
    let dp = |a: usize, b: usize| 3 + pair_index(a, b);
    let dq = |a: usize, b: usize| 9 + pair_index(a, b);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut a = DMatrix::<Complex64>::zeros(15, 15);
    let mut rhs = DVector::<Complex64>::zeros(15);
    let mut row = 0;
    // −iω m n₀ δu_j + ik δP_zj = ik e n₀ δφ δ_jz
    for j in 0..3 {
        a[(row, du(j))] += -i * omega * m * n0;
        a[(row, dp(Z, j))] += i * k;
        rhs[row] = i * k * e * n0 * dphi * delta(j, Z);
        row += 1;
    }
    // −iω δP_ab + ik (P0_az δu_b + P0_bz δu_a + P0_ab δu_z) + ik δQ_abz = 0
    for &(p, q) in &PAIRS {
        a[(row, dp(p, q))] += -i * omega;
        a[(row, du(q))] += i * k * p0[p][Z];
        a[(row, du(p))] += i * k * p0[q][Z];
        a[(row, du(Z))] += i * k * p0[p][q];
        a[(row, dq(p, q))] += i * k;
        row += 1;
    }
    // −iω δQ_abz − (ik/m n₀)(P0_ab δP_zz + P0_bz δP_az + P0_za δP_bz)
    //   = −(e ħ² n₀/4m²)(ik)³ δφ δ_az δ_bz
    for &(p, q) in &PAIRS {
        a[(row, dq(p, q))] += -i * omega;
        let c = -i * k / (m * n0);
        a[(row, dp(Z, Z))] += c * p0[p][q];
        a[(row, dp(p, Z))] += c * p0[q][Z];
        a[(row, dp(q, Z))] += c * p0[Z][p];
        rhs[row] = -(e * hbar * hbar * n0 / (4.0 * m * m)) * (i * k).powi(3) * dphi * delta(p, Z) * delta(q, Z);
        row += 1;
    }
    let sol = a.lu().solve(&rhs).expect("oracle system is regular");
    let mut out = [[0.0; 3]; 3];
    for p in 0..3 {
        for q in 0..3 {
            let v = sol[dp(p, q)];
            assert!(v.im.abs() <= 1e-12 * v.norm().max(1e-300));
            out[p][q] = v.re;
        }
    }
    out
}
