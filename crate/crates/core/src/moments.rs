//! Velocity moments of a tabulated phase-space distribution.
//!
//! The distribution is sampled on a tensor-product velocity grid and
//! integrated with per-axis quadrature weights. The returned pressure,
//! heat-flux and fourth-order tensors are central moments about the mean
//! velocity, scaled by the particle mass:
//!
//! ```text
//! n      = ∫ f dv
//! n u_i  = ∫ f v_i dv
//! P_ij   = m ∫ (v−u)_i (v−u)_j f dv
//! Q_ijk  = m ∫ (v−u)_i (v−u)_j (v−u)_k f dv
//! R_ijkl = m ∫ (v−u)_i (v−u)_j (v−u)_k (v−u)_l f dv
//! ```
//!
//! The distribution may be negative (Wigner functions are); only the
//! density has to come out positive.

use std::io::Read;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

const MIN_NODES: usize = 8;

/// One velocity axis: nodes and quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Axis {
    /// Uniform nodes on `[lo, hi]` with trapezoidal weights.
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi > lo) || count < 2 {
            return Err(Error::invalid("axis", "need lo < hi and at least two nodes"));
        }
        let step = (hi - lo) / (count - 1) as f64;
        let nodes = (0..count).map(|i| lo + step * i as f64).collect();
        Self::from_nodes(nodes)
    }

    /// User-supplied strictly increasing nodes with trapezoidal weights.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("axis", "need at least two nodes"));
        }
        let mut weights = vec![0.0; nodes.len()];
        for i in 0..nodes.len() - 1 {
            let h = nodes[i + 1] - nodes[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Self::with_weights(nodes, weights)
    }

    /// Gauss–Hermite nodes mapped to `center + scale·x`, with the Gaussian
    /// weight folded back in so that `Σ wᵢ g(vᵢ) ≈ ∫ g dv` for Gaussian-like
    /// integrands. Nodes come from the Golub–Welsch eigenproblem.
    pub fn gauss_hermite(count: usize, center: f64, scale: f64) -> Result<Self> {
        if !(1..=150).contains(&count) {
            return Err(Error::invalid("axis", "Gauss-Hermite order must be in 1..=150"));
        }
        if !(scale > 0.0) {
            return Err(Error::invalid("axis", "Gauss-Hermite scale must be > 0"));
        }
        let jacobi = DMatrix::from_fn(count, count, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..count)
            .map(|k| {
                let x = eig.eigenvalues[k];
                let w = std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, k)].powi(2);
                (x, w)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nodes = pairs.iter().map(|&(x, _)| center + scale * x).collect();
        let weights = pairs.iter().map(|&(x, w)| scale * w * (x * x).exp()).collect();
        Self::with_weights(nodes, weights)
    }

    fn with_weights(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("axis", "nodes must be strictly increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("axis", "weights must be positive and finite"));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Tensor-product velocity grid in one or three dimensions. Values are
/// stored row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityGrid {
    axes: Vec<Axis>,
}

impl VelocityGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.len() != 1 && axes.len() != 3 {
            return Err(Error::invalid(
                "dimension",
                format!("must be 1 or 3, got {}", axes.len()),
            ));
        }
        if let Some(a) = axes.iter().find(|a| a.len() < MIN_NODES) {
            return Err(Error::invalid(
                "axis",
                format!("at least {MIN_NODES} nodes per axis required, got {}", a.len()),
            ));
        }
        Ok(Self { axes })
    }

    /// Same uniform axis repeated `dim` times.
    pub fn uniform(dim: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = Axis::uniform(lo, hi, count)?;
        Self::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `visit(flat_index, velocity, weight, on_boundary)` for every node.
    fn for_each_node(&self, mut visit: impl FnMut(usize, &[f64], f64, bool)) {
        let shape = self.shape();
        let mut idx = vec![0usize; shape.len()];
        let mut v = vec![0.0; shape.len()];
        for flat in 0..self.len() {
            let mut rem = flat;
            for ax in (0..shape.len()).rev() {
                idx[ax] = rem % shape[ax];
                rem /= shape[ax];
            }
            let mut w = 1.0;
            let mut boundary = false;
            for (ax, axis) in self.axes.iter().enumerate() {
                v[ax] = axis.nodes[idx[ax]];
                w *= axis.weights[idx[ax]];
                boundary |= idx[ax] == 0 || idx[ax] + 1 == shape[ax];
            }
            visit(flat, &v, w, boundary);
        }
    }

    /// Tabulates `f(v)` on the grid in storage order.
    pub fn tabulate(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.for_each_node(|i, v, _, _| out[i] = f(v));
        out
    }
}

/// Options for [`compute_moments_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    /// Boundary values must satisfy `max|f|_boundary < threshold · max|f|`.
    pub boundary_threshold: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            boundary_threshold: 1e-10,
        }
    }
}

/// The moment hierarchy up to fourth order plus the scalar reductions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSet {
    pub dim: usize,
    pub n: f64,
    pub u: Vec<f64>,
    /// Dense `d×d` pressure tensor, row-major.
    pub pressure: Vec<f64>,
    /// Dense `d×d×d` heat-flux tensor.
    pub heat_flux: Vec<f64>,
    /// Dense `d⁴` fourth-order tensor.
    pub fourth: Vec<f64>,
    /// Scalar pressure.
    pub p: f64,
    /// Heat-flux vector `q_i = Q_jji / 2`.
    pub q: Vec<f64>,
    /// Set when the distribution does not decay toward the grid boundary.
    pub boundary_decay_violated: bool,
}

impl MomentSet {
    #[allow(non_snake_case)]
    pub fn P(&self, i: usize, j: usize) -> f64 {
        self.pressure[i * self.dim + j]
    }

    #[allow(non_snake_case)]
    pub fn Q(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim;
        self.heat_flux[(i * d + j) * d + k]
    }

    #[allow(non_snake_case)]
    pub fn R(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d = self.dim;
        self.fourth[((i * d + j) * d + k) * d + l]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("moment set is always serializable")
    }

    /// `(component, value)` rows such as `("P_xz", …)`, covering every
    /// stored component.
    pub fn components(&self) -> Vec<(String, f64)> {
        const AX: [char; 3] = ['x', 'y', 'z'];
        let d = self.dim;
        let label = |idx: &[usize]| idx.iter().map(|&i| AX[i]).collect::<String>();
        let mut rows = vec![("n".to_string(), self.n)];
        for i in 0..d {
            rows.push((format!("u_{}", AX[i]), self.u[i]));
        }
        for (flat, &val) in self.pressure.iter().enumerate() {
            rows.push((format!("P_{}", label(&unflatten(flat, d, 2))), val));
        }
        for (flat, &val) in self.heat_flux.iter().enumerate() {
            rows.push((format!("Q_{}", label(&unflatten(flat, d, 3))), val));
        }
        for (flat, &val) in self.fourth.iter().enumerate() {
            rows.push((format!("R_{}", label(&unflatten(flat, d, 4))), val));
        }
        rows.push(("p".to_string(), self.p));
        for i in 0..d {
            rows.push((format!("q_{}", AX[i]), self.q[i]));
        }
        rows
    }
}

fn unflatten(mut flat: usize, d: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = flat % d;
        flat /= d;
    }
    idx
}

/// Non-decreasing index tuples of the given rank over `0..d`.
fn sorted_tuples(d: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(rank);
    fn rec(d: usize, rank: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(d, rank, i, cur, out);
            cur.pop();
        }
    }
    rec(d, rank, 0, &mut cur, &mut out);
    out
}

/// Accumulates one fully symmetric central-moment tensor. Only sorted index
/// tuples are integrated; every permutation receives the same value, so the
/// symmetry is exact.
fn symmetric_tensor(rank: usize, d: usize, grid: &VelocityGrid, f: &[f64], u: &[f64], mass: f64) -> Vec<f64> {
    let tuples = sorted_tuples(d, rank);
    let mut sums = vec![0.0; tuples.len()];
    let mut c = vec![0.0; d];
    grid.for_each_node(|i, v, w, _| {
        let fw = f[i] * w;
        if fw == 0.0 {
            return;
        }
        for ax in 0..d {
            c[ax] = v[ax] - u[ax];
        }
        for (sum, t) in sums.iter_mut().zip(&tuples) {
            *sum += fw * t.iter().map(|&a| c[a]).product::<f64>();
        }
    });
    let mut dense = vec![0.0; d.pow(rank as u32)];
    for (flat, slot) in dense.iter_mut().enumerate() {
        let mut idx = unflatten(flat, d, rank);
        idx.sort_unstable();
        let pos = tuples.iter().position(|t| *t == idx).expect("sorted tuple exists");
        *slot = mass * sums[pos];
    }
    dense
}

/// Moments with the default boundary-decay threshold.
pub fn compute_moments(f: &[f64], grid: &VelocityGrid, mass: f64) -> Result<MomentSet> {
    compute_moments_with(f, grid, mass, &MomentOptions::default())
}

pub fn compute_moments_with(f: &[f64], grid: &VelocityGrid, mass: f64, options: &MomentOptions) -> Result<MomentSet> {
    if f.len() != grid.len() {
        return Err(Error::invalid(
            "f",
            format!("expected {} samples, got {}", grid.len(), f.len()),
        ));
    }
    if !(mass > 0.0) {
        return Err(Error::invalid("mass", "must be > 0"));
    }
    if let Some(i) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { field: "f", node: i });
    }
    let d = grid.dim();

    let mut n = 0.0;
    let mut abs_mass = 0.0;
    let mut flux = vec![0.0; d];
    let mut max_all = 0.0f64;
    let mut max_boundary = 0.0f64;
    grid.for_each_node(|i, v, w, boundary| {
        let fw = f[i] * w;
        n += fw;
        abs_mass += fw.abs();
        for ax in 0..d {
            flux[ax] += fw * v[ax];
        }
        max_all = max_all.max(f[i].abs());
        if boundary {
            max_boundary = max_boundary.max(f[i].abs());
        }
    });
    if !(n > 1e-12 * abs_mass) || n <= 0.0 {
        return Err(Error::NonPositiveDensity { density: n });
    }
    let u: Vec<f64> = flux.iter().map(|fl| fl / n).collect();

    let pressure = symmetric_tensor(2, d, grid, f, &u, mass);
    let heat_flux = symmetric_tensor(3, d, grid, f, &u, mass);
    let fourth = symmetric_tensor(4, d, grid, f, &u, mass);

    let mut set = MomentSet {
        dim: d,
        n,
        u,
        pressure,
        heat_flux,
        fourth,
        p: 0.0,
        q: vec![0.0; d],
        boundary_decay_violated: max_boundary >= options.boundary_threshold * max_all,
    };
    let (p, q) = scalar_reductions(&set);
    set.p = p;
    set.q = q;
    Ok(set)
}

/// Scalar pressure (`trace(P)/3` in 3D, `P_xx` in 1D) and heat-flux vector
/// `q_i = Q_jji / 2`.
pub fn scalar_reductions(mset: &MomentSet) -> (f64, Vec<f64>) {
    let d = mset.dim;
    let p = if d == 3 {
        (mset.P(0, 0) + mset.P(1, 1) + mset.P(2, 2)) / 3.0
    } else {
        mset.P(0, 0)
    };
    let q = (0..d)
        .map(|i| 0.5 * (0..d).map(|j| mset.Q(j, j, i)).sum::<f64>())
        .collect();
    (p, q)
}

/// Reads a tabulated distribution from CSV. The header names the velocity
/// axes followed by the value column: `v,f` (1D) or `vx,vy,vz,f` (3D). Rows
/// may come in any order but must cover the full tensor-product grid.
/// Weights are trapezoidal on the nodes found in the file.
pub fn load_distribution_csv<R: Read>(reader: R) -> Result<(VelocityGrid, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let d = headers.len().saturating_sub(1);
    if d != 1 && d != 3 {
        return Err(Error::Parse(format!(
            "expected 2 or 4 columns (velocity axes + value), got {}",
            headers.len()
        )));
    }
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let vals = parsed.map_err(|_| Error::Parse(format!("row {}: non-numeric field", line + 2)))?;
        if vals.len() != d + 1 {
            return Err(Error::Parse(format!("row {}: wrong column count", line + 2)));
        }
        rows.push((vals[..d].to_vec(), vals[d]));
    }
    let mut axes_nodes: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (ax, nodes) in axes_nodes.iter_mut().enumerate() {
        *nodes = rows.iter().map(|r| r.0[ax]).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
    }
    let axes = axes_nodes
        .iter()
        .map(|nodes| Axis::from_nodes(nodes.clone()))
        .collect::<Result<Vec<_>>>()?;
    let grid = VelocityGrid::new(axes)?;
    let shape = grid.shape();
    let mut values = vec![f64::NAN; grid.len()];
    for (v, val) in &rows {
        let mut flat = 0;
        for ax in 0..d {
            let pos = axes_nodes[ax]
                .binary_search_by(|x| x.total_cmp(&v[ax]))
                .expect("node collected above");
            flat = flat * shape[ax] + pos;
        }
        values[flat] = *val;
    }
    if values.iter().any(|x| x.is_nan()) {
        return Err(Error::Parse("distribution does not cover the full grid".into()));
    }
    Ok((grid, values))
}
