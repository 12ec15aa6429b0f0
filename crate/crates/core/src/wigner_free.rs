//! Free evolution of a Gaussian packet and its Wigner function.
//!
//! For `ψ(x, 0) = (√π σ)^{-1/2} exp(−x²/2σ²)` the free Wigner function is a
//! sheared Gaussian. In `x̄ = x/σ`, `v̄ = mvσ/ħ`, `t̄ = ħt/(mσ²)` and with
//! `f̄ = (πħ/m) f`,
//!
//! ```text
//! f̄ = exp[−(x̄ − v̄t̄)² − v̄²]
//! ```
//!
//! The numerical transform evaluates
//! `f(x, v) = (m/2πħ) ∫ ds e^{imvs/ħ} ψ*(x + s/2) ψ(x − s/2)` as a direct
//! sum over `s`, either from the closed-form `ψ` or from grid samples.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::NondimScheme;

const PI: f64 = std::f64::consts::PI;

/// Point in rescaled phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaledPhasePoint {
    pub x_bar: f64,
    pub v_bar: f64,
    pub t_bar: f64,
}

/// `exp[−(x̄ − v̄t̄)² − v̄²]`.
pub fn analytic_wigner(pt: RescaledPhasePoint) -> f64 {
    let shifted = pt.x_bar - pt.v_bar * pt.t_bar;
    (-shifted * shifted - pt.v_bar * pt.v_bar).exp()
}

/// Gaussian packet of rms width `σ/√2` for a particle of mass `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub sigma: f64,
    pub hbar: f64,
    pub m: f64,
}

impl GaussianPacket {
    pub fn new(sigma: f64, hbar: f64, m: f64) -> Result<Self> {
        NondimScheme::wigner(hbar, m, sigma)?;
        Ok(Self { sigma, hbar, m })
    }

    /// `σ = ħ = m = 1`: raw and rescaled variables coincide except for
    /// the factor π in `f̄`.
    pub fn unit() -> Self {
        Self {
            sigma: 1.0,
            hbar: 1.0,
            m: 1.0,
        }
    }

    pub fn scheme(&self) -> NondimScheme {
        NondimScheme::wigner(self.hbar, self.m, self.sigma).expect("validated on construction")
    }

    /// `t̄` for a physical time.
    pub fn t_bar(&self, t: f64) -> f64 {
        t / self.scheme().time_scale
    }

    /// Exact free-evolved amplitude at position `x` and time `t`.
    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        let width = Complex64::new(1.0, self.t_bar(t));
        let xb = x / self.sigma;
        let norm = (PI.sqrt() * self.sigma).powf(-0.5);
        norm / width.sqrt() * (-(xb * xb) / (2.0 * width)).exp()
    }

    /// Position variance `σ²(1 + t̄²)/2`.
    pub fn position_variance(&self, t: f64) -> f64 {
        0.5 * self.sigma * self.sigma * (1.0 + self.t_bar(t).powi(2))
    }

    /// Factor `πħ/m` taking `f` to `f̄`.
    pub fn f_scale(&self) -> f64 {
        PI * self.hbar / self.m
    }
}

/// Uniform grid `x_j = −half_width + j·dx`, `j = 0..points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Grid with spacing `spacing` that has `±reach` as nodes and is wide
    /// enough for the packet at `t̄` (rescaled units). The node count is odd
    /// or even depending on whether `reach/spacing` is whole or half-whole.
    pub fn for_packet(t_bar: f64, spacing: f64, reach: f64) -> Self {
        let needed = (BOUNDARY_LOG * (1.0 + t_bar * t_bar)).sqrt() * 1.05;
        let extra = ((needed - reach) / spacing).ceil().max(0.0);
        let half_width = reach + extra * spacing;
        Self {
            half_width,
            points: (2.0 * half_width / spacing).round() as usize + 1,
        }
    }
}

/// `|ψ(edge)|/|ψ(0)|` must stay below this.
pub const BOUNDARY_RATIO: f64 = 1e-10;
/// `−2 ln(BOUNDARY_RATIO)`: edge position squared in units of `σ²(1 + t̄²)`.
const BOUNDARY_LOG: f64 = 46.051_701_859_880_914;

/// Sampled wavefunction at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub t: f64,
    pub x0: f64,
    pub dx: f64,
    pub psi: Vec<Complex64>,
    /// `ħ/m`, needed to turn wavenumbers into velocities.
    pub hbar_over_m: f64,
    pub m: f64,
}

impl WavefunctionGrid {
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn mean_position(&self) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .map(|(j, c)| self.x(j) * c.norm_sqr())
            .sum::<f64>()
            * self.dx
    }

    pub fn position_variance(&self) -> f64 {
        let mean = self.mean_position();
        self.psi
            .iter()
            .enumerate()
            .map(|(j, c)| (self.x(j) - mean).powi(2) * c.norm_sqr())
            .sum::<f64>()
            * self.dx
    }
}

/// Samples the exact packet at time `t` on `grid` (in units of `σ`).
pub fn evolve_free_gaussian(packet: &GaussianPacket, t: f64, grid: GridSpec) -> Result<WavefunctionGrid> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", "must be finite and >= 0"));
    }
    if grid.points < 16 || !(grid.half_width > 0.0) {
        return Err(Error::invalid("grid", "need half_width > 0 and at least 16 points"));
    }
    let t_bar = packet.t_bar(t);
    let ratio = (-grid.half_width * grid.half_width / (2.0 * (1.0 + t_bar * t_bar))).exp();
    if ratio > BOUNDARY_RATIO {
        return Err(Error::GridTooNarrow {
            ratio,
            limit: BOUNDARY_RATIO,
        });
    }
    let dx = grid.dx() * packet.sigma;
    let x0 = -grid.half_width * packet.sigma;
    let psi: Vec<Complex64> = (0..grid.points).map(|j| packet.psi(x0 + j as f64 * dx, t)).collect();
    let out = WavefunctionGrid {
        t,
        x0,
        dx,
        psi,
        hbar_over_m: packet.hbar / packet.m,
        m: packet.m,
    };
    let norm = out.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(out)
}

/// Wigner function tabulated on `x × v`, row-major with `v` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerTable {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Raw `f` (inverse action units).
    pub f: Vec<f64>,
}

impl WignerTable {
    pub fn at(&self, ix: usize, iv: usize) -> f64 {
        self.f[ix * self.v.len() + iv]
    }

    /// Row of `f` at position index `ix`.
    pub fn row(&self, ix: usize) -> &[f64] {
        let nv = self.v.len();
        &self.f[ix * nv..(ix + 1) * nv]
    }

    /// `(x̄, v̄, f̄)` triples in output order.
    pub fn rescaled(&self, packet: &GaussianPacket) -> Vec<(f64, f64, f64)> {
        let s = packet.scheme();
        let fs = packet.f_scale();
        let mut out = Vec::with_capacity(self.f.len());
        for (ix, x) in self.x.iter().enumerate() {
            for (iv, v) in self.v.iter().enumerate() {
                out.push((x / s.length_scale, v / s.velocity_scale, fs * self.at(ix, iv)));
            }
        }
        out
    }
}

/// Velocity nodes `linspace(lo, hi, count)`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// `f(x, v)` from the closed-form packet, evaluated at each `(x, v)` pair
/// of `x × v`. Only the `s` integral is numerical.
pub fn wigner_of_packet(packet: &GaussianPacket, t: f64, x: &[f64], v: &[f64]) -> Result<WignerTable> {
    let ds = s_step(packet, v)?;
    let t_bar = packet.t_bar(t);
    let s_max = 12.6 * packet.sigma * (1.0 + t_bar * t_bar).sqrt();
    let js = (s_max / ds).ceil() as usize;
    let k = packet.m / packet.hbar;
    let f: Vec<f64> = x
        .par_iter()
        .flat_map_iter(|&xi| {
            let g: Vec<Complex64> = (0..=js)
                .map(|j| {
                    let s = j as f64 * ds;
                    packet.psi(xi + 0.5 * s, t).conj() * packet.psi(xi - 0.5 * s, t)
                })
                .collect();
            v.iter()
                .map(move |&vi| half_range_sum(&g, k * vi * ds) * ds * k / (2.0 * PI))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(WignerTable {
        t,
        x: x.to_vec(),
        v: v.to_vec(),
        f,
    })
}

/// `f(x_i, v_i)` for individual phase points (closed-form `ψ`).
pub fn wigner_of_packet_at(packet: &GaussianPacket, t: f64, points: &[(f64, f64)]) -> Result<Vec<f64>> {
    let vs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ds = s_step(packet, &vs)?;
    let t_bar = packet.t_bar(t);
    let js = (12.6 * packet.sigma * (1.0 + t_bar * t_bar).sqrt() / ds).ceil() as usize;
    let k = packet.m / packet.hbar;
    Ok(points
        .par_iter()
        .map(|&(xi, vi)| {
            let g: Vec<Complex64> = (0..=js)
                .map(|j| {
                    let s = j as f64 * ds;
                    packet.psi(xi + 0.5 * s, t).conj() * packet.psi(xi - 0.5 * s, t)
                })
                .collect();
            half_range_sum(&g, k * vi * ds) * ds * k / (2.0 * PI)
        })
        .collect())
}

/// Step in `s` whose velocity period comfortably exceeds the packet
/// support and the requested velocities.
fn s_step(packet: &GaussianPacket, v: &[f64]) -> Result<f64> {
    let scheme = packet.scheme();
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / scheme.velocity_scale;
    if !vmax.is_finite() {
        return Err(Error::invalid("v", "must be finite"));
    }
    // Period in v̄ is 2π/Δs̄; keep it above 2·(support + |v̄|max).
    let support = MOMENTUM_SUPPORT;
    let alias = 2.0 * (support + vmax).max(16.0);
    Ok(2.0 * PI / alias * packet.sigma)
}

/// `|v̄|` beyond which the momentum density `e^{−v̄²}` is below 10⁻⁶.
const MOMENTUM_SUPPORT: f64 = 3.716_922_188_849_838;

/// `g₀ + 2 Re Σ_{j≥1} e^{i j θ} g_j` using `g(−s) = conj(g(s))`.
fn half_range_sum(g: &[Complex64], theta: f64) -> f64 {
    let step = Complex64::from_polar(1.0, theta);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut acc = 0.0;
    for (j, gj) in g.iter().enumerate().skip(1) {
        // Recompute periodically so the recurrence does not drift.
        phase = if j % 64 == 0 {
            Complex64::from_polar(1.0, theta * j as f64)
        } else {
            phase * step
        };
        acc += (phase * gj).re;
    }
    g[0].re + 2.0 * acc
}

/// Relative momentum-density level defining the packet support.
pub const SUPPORT_LEVEL: f64 = 1e-6;

/// Wigner transform of grid samples.
///
/// `ψ` is upsampled by two through zero-padding its spectrum, so the
/// half-shifted samples `ψ(x ± s/2)` for `s = jΔx` are grid values. Output
/// positions are the wavefunction nodes inside `x_range`. Fails with
/// [`Error::Aliasing`] when the momentum support of `ψ` (density above
/// [`SUPPORT_LEVEL`] of its peak) exceeds the requested velocity extent or
/// reaches the top tenth of the band resolvable with spacing `Δx`.
pub fn wigner_transform(psi: &WavefunctionGrid, v: &[f64], x_range: (f64, f64)) -> Result<WignerTable> {
    let n = psi.psi.len();
    if n < 16 {
        return Err(Error::invalid("psi", "need at least 16 samples"));
    }
    if v.is_empty() {
        return Err(Error::invalid("v", "need at least one velocity"));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm });
    }

    let mut planner = FftPlanner::new();
    let mut hat = psi.psi.clone();
    planner.plan_fft_forward(n).process(&mut hat);

    let dk = 2.0 * PI / (n as f64 * psi.dx);
    let signed = |j: usize| if 2 * j <= n { j as f64 } else { j as f64 - n as f64 };
    let peak = hat.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
    let k_support = hat
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() >= SUPPORT_LEVEL * peak)
        .map(|(j, _)| signed(j).abs() * dk)
        .fold(0.0, f64::max);
    let support = psi.hbar_over_m * k_support;
    let resolvable = PI * psi.hbar_over_m / psi.dx;
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // Spectral content reaching the Nyquist band has already wrapped.
    if support > 0.9 * resolvable || support > vmax {
        return Err(Error::Aliasing {
            support,
            resolvable: resolvable.min(vmax),
        });
    }

    // Zero-pad to 2n; the Nyquist bin of an even n is split in two.
    let m2 = 2 * n;
    let mut padded = vec![Complex64::new(0.0, 0.0); m2];
    for (j, c) in hat.iter().enumerate() {
        let kk = signed(j);
        if n % 2 == 0 && 2 * j == n {
            padded[j] += 0.5 * c;
            padded[m2 - j] += 0.5 * c;
        } else if kk >= 0.0 {
            padded[j] = *c;
        } else {
            padded[(m2 as f64 + kk) as usize] = *c;
        }
    }
    planner.plan_fft_inverse(m2).process(&mut padded);
    let fine: Vec<Complex64> = padded.iter().map(|c| c / n as f64).collect();

    let ds = psi.dx;
    let kv = 1.0 / psi.hbar_over_m;
    let rows: Vec<usize> = (0..n)
        .filter(|&j| {
            let x = psi.x(j);
            x >= x_range.0 - 1e-9 * psi.dx && x <= x_range.1 + 1e-9 * psi.dx
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::invalid("x_range", "contains no grid node"));
    }
    let f: Vec<f64> = rows
        .par_iter()
        .flat_map_iter(|&row| {
            let c = 2 * row;
            let reach = c.min(m2 - 2 - c);
            let g: Vec<Complex64> = (0..=reach).map(|j| fine[c + j].conj() * fine[c - j]).collect();
            v.iter()
                .map(move |&vi| half_range_sum(&g, kv * vi * ds) * ds * kv / (2.0 * PI))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(WignerTable {
        t: psi.t,
        x: rows.iter().map(|&j| psi.x(j)).collect(),
        v: v.to_vec(),
        f,
    })
}

/// Closed-form moments of the packet at `x`: density, mean velocity and
/// pressure `m ∫ (v − u)² f dv`.
pub fn packet_moments(packet: &GaussianPacket, x: f64, t: f64) -> (f64, f64, f64) {
    let tb = packet.t_bar(t);
    let w2 = 1.0 + tb * tb;
    let xb = x / packet.sigma;
    let n = (-xb * xb / w2).exp() / (PI * w2).sqrt() / packet.sigma;
    let scheme = packet.scheme();
    let u = xb * tb / w2 * scheme.velocity_scale;
    let p = packet.m * n * scheme.velocity_scale.powi(2) / (2.0 * w2);
    (n, u, p)
}
