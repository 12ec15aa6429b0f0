//! First-order response of the pressure dyad to an electrostatic plane wave
//! `exp(ikz − iωt)`:
//!
//! ```text
//! δP_ij = −(e δφ k² / (m ω²)) · (P0_ij + P0_(iz δ_jz) + n₀ ħ² k² δ_iz δ_jz / (4m))
//! ```
//!
//! Round brackets denote the minimal symmetrization over free indices (see
//! [`symmetrize`]), so `P0_(iz δ_jz) = P0_iz δ_jz + P0_jz δ_iz`. Even an
//! isotropic equilibrium produces an anisotropic response.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PlasmaParams;

/// Dense 3×3 tensor, indices `x = 0`, `y = 1`, `z = 2`.
pub type Tensor2 = [[f64; 3]; 3];

const Z: usize = 2;

/// Minimal symmetrization: a tensor expression that is already symmetric
/// within blocks of leading indices is summed over the distinct ways of
/// distributing the free indices among the slots, i.e. over all index
/// permutations modulo those that permute indices inside a block.
///
/// For a rank-2 expression with no internal symmetry this gives
/// `A_(ij) = A_ij + A_ji` (two terms); for a rank-3 expression symmetric in
/// its first two indices, `B_(ijk) = B_ijk + B_jki + B_kij` (three terms).
pub mod symmetrize {
    /// Dense rank-`r` tensor over three dimensions, row-major.
    #[derive(Debug, Clone, PartialEq)]
    pub struct Tensor {
        pub rank: usize,
        pub data: Vec<f64>,
    }

    impl Tensor {
        pub fn zeros(rank: usize) -> Self {
            Self {
                rank,
                data: vec![0.0; 3usize.pow(rank as u32)],
            }
        }

        pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
            let mut t = Self::zeros(rank);
            for flat in 0..t.data.len() {
                t.data[flat] = f(&unflatten(flat, rank));
            }
            t
        }

        pub fn get(&self, idx: &[usize]) -> f64 {
            self.data[flatten(idx)]
        }
    }

    fn flatten(idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * 3 + i)
    }

    fn unflatten(mut flat: usize, rank: usize) -> Vec<usize> {
        let mut idx = vec![0; rank];
        for slot in idx.iter_mut().rev() {
            *slot = flat % 3;
            flat /= 3;
        }
        idx
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Minimal symmetrization of `t`, which must already be symmetric within
    /// the leading index blocks of sizes `blocks` (summing to its rank).
    pub fn minimal(t: &Tensor, blocks: &[usize]) -> Tensor {
        assert_eq!(blocks.iter().sum::<usize>(), t.rank, "blocks must cover the rank");
        let block_of: Vec<usize> = blocks
            .iter()
            .enumerate()
            .flat_map(|(b, &len)| std::iter::repeat_n(b, len))
            .collect();
        // Keep one permutation per coset: slots of the same block must
        // receive free indices in increasing order.
        let reps: Vec<Vec<usize>> = permutations(t.rank)
            .into_iter()
            .filter(|perm| {
                (0..t.rank).all(|a| (a + 1..t.rank).all(|b| block_of[a] != block_of[b] || perm[a] < perm[b]))
            })
            .collect();
        Tensor::from_fn(t.rank, |free| {
            reps.iter()
                .map(|perm| {
                    let slots: Vec<usize> = perm.iter().map(|&p| free[p]).collect();
                    t.get(&slots)
                })
                .sum()
        })
    }

    /// Number of terms the minimal symmetrization produces.
    pub fn term_count(blocks: &[usize]) -> usize {
        let fact = |n: usize| (1..=n).product::<usize>();
        fact(blocks.iter().sum()) / blocks.iter().map(|&b| fact(b)).product::<usize>()
    }
}

/// Inputs of [`delta_p`]; propagation is along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationInput {
    pub k: f64,
    pub omega_sq: f64,
    pub delta_phi: f64,
    pub p0: Tensor2,
    pub params: PlasmaParams,
}

fn check_symmetric(p0: &Tensor2) -> Result<()> {
    let scale = p0.iter().flatten().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    for i in 0..3 {
        for j in 0..i {
            if (p0[i][j] - p0[j][i]).abs() > 1e-12 * scale {
                return Err(Error::invalid("P0", "equilibrium pressure must be symmetric"));
            }
        }
    }
    Ok(())
}

/// First-order pressure-dyad perturbation for a wave along z.
pub fn delta_p(input: &PerturbationInput) -> Result<Tensor2> {
    if !(input.omega_sq > 0.0) {
        return Err(Error::invalid("omega_sq", "linear response needs omega^2 > 0"));
    }
    check_symmetric(&input.p0)?;
    let prm = &input.params;
    let k2 = input.k * input.k;
    let factor = -prm.e * input.delta_phi * k2 / (prm.m * input.omega_sq);
    let recoil = prm.n0 * prm.hbar * prm.hbar * k2 / (4.0 * prm.m);
    let p0 = &input.p0;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let bracket =
                p0[i][j] + p0[i][Z] * delta(j, Z) + p0[j][Z] * delta(i, Z) + recoil * delta(i, Z) * delta(j, Z);
            out[i][j] = factor * bracket;
        }
    }
    Ok(out)
}

/// [`delta_p`] for an arbitrary propagation direction `k_vec`: the
/// equilibrium tensor is rotated into a frame whose z axis is `k̂`, and the
/// response is rotated back.
pub fn delta_p_along(
    k_vec: [f64; 3],
    omega_sq: f64,
    delta_phi: f64,
    p0: &Tensor2,
    params: &PlasmaParams,
) -> Result<Tensor2> {
    let k = (k_vec.iter().map(|c| c * c).sum::<f64>()).sqrt();
    if !(k > 0.0) {
        return Err(Error::invalid("k_vec", "direction needs a nonzero wavevector"));
    }
    let basis = frame_with_z_along([k_vec[0] / k, k_vec[1] / k, k_vec[2] / k]);
    check_symmetric(p0)?;
    let mut local_p0 = rotate_into(&basis, p0);
    // Remove the rounding asymmetry of the rotation.
    for i in 0..3 {
        for j in 0..i {
            let mean = 0.5 * (local_p0[i][j] + local_p0[j][i]);
            local_p0[i][j] = mean;
            local_p0[j][i] = mean;
        }
    }
    let local = delta_p(&PerturbationInput {
        k,
        omega_sq,
        delta_phi,
        p0: local_p0,
        params: *params,
    })?;
    Ok(rotate_out(&basis, &local))
}

/// Rows are the local x, y, z unit vectors in lab coordinates.
fn frame_with_z_along(khat: [f64; 3]) -> [[f64; 3]; 3] {
    let helper = if khat[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let e1 = cross(helper, khat);
    let n1 = e1.iter().map(|c| c * c).sum::<f64>().sqrt();
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e2 = cross(khat, e1);
    [e1, e2, khat]
}

fn rotate_into(basis: &[[f64; 3]; 3], t: &Tensor2) -> Tensor2 {
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[a][b] = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| basis[a][i] * t[i][j] * basis[b][j])
                .sum();
        }
    }
    out
}

fn rotate_out(basis: &[[f64; 3]; 3], t: &Tensor2) -> Tensor2 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .map(|(a, b)| basis[a][i] * t[a][b] * basis[b][j])
                .sum();
        }
    }
    out
}

/// `n k_B diag(T⊥, T⊥, T∥)`.
pub fn anisotropic_dyad(n: f64, t_perp: f64, t_par: f64, params: &PlasmaParams) -> Result<Tensor2> {
    if n < 0.0 || t_perp < 0.0 || t_par < 0.0 {
        return Err(Error::invalid("dyad", "density and temperatures must be non-negative"));
    }
    let s = n * params.kb;
    Ok([[s * t_perp, 0.0, 0.0], [0.0, s * t_perp, 0.0], [0.0, 0.0, s * t_par]])
}

/// Closed-loop check of the linear wave: drive with `δφ`, feed `δP_zz` into
/// the linearized continuity and momentum equations, and solve Poisson for
/// the potential the density perturbation produces. Returns
/// `δφ_induced/δφ − 1`, which vanishes exactly on the dispersion branch.
pub fn dispersion_residual(k: f64, omega_sq: f64, params: &PlasmaParams) -> Result<f64> {
    if k == 0.0 {
        return Err(Error::invalid("k", "closed loop undefined at k = 0"));
    }
    let prm = params;
    let p0 = anisotropic_dyad(prm.n0, prm.t0_perp, prm.t0_par, prm)?;
    let dphi = 1.0;
    let dp = delta_p(&PerturbationInput {
        k,
        omega_sq,
        delta_phi: dphi,
        p0,
        params: *prm,
    })?;
    // ω δu = k (δP_zz/(m n₀) − e δφ/m);  ω δn = k n₀ δu;  −k² δφ' = (e/ε₀) δn
    let dn_over = prm.n0 * k * k / omega_sq * (dp[Z][Z] / (prm.m * prm.n0) - prm.e * dphi / prm.m);
    let induced = -prm.e / (prm.eps0 * k * k) * dn_over;
    Ok(induced / dphi - 1.0)
}
