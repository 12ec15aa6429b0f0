//! Stationary waves of the 1D closure in the frame `ξ = x − v t`.
//!
//! With `n (u − v) = n₀u₀` the density is slaved to the velocity and the
//! state reduces to `(u, p, Q, φ, ψ = φ′)`. The momentum, pressure and heat
//! flux equations are linear in `(u′, p′, Q′)` once `φ‴ = (e/ε₀) n′` is
//! eliminated, so each right-hand-side evaluation solves a 3×3 system.
//!
//! Internally everything runs in units of `u₀` (velocity), `u₀/ωₚ` (length),
//! `m n₀ u₀²` (pressure), `m n₀ u₀³` (heat flux) and `m u₀²/e` (potential).
//! In those units, with `w = (u − v)/u₀` and `ñ = 1/w`,
//!
//! ```text
//! w′ + p′               = ñ ψ
//! 3p w′ + w p′ + Q′     = 0
//! (4Q − H² ñ³/4) w′ − 3 w p p′ + w Q′ = 0
//! φ′ = ψ,  ψ′ = ñ − 1
//! ```
//!
//! and `H = ħωₚ/(m u₀²)` is the only parameter. Linearizing about
//! `w = 1, Q = φ = ψ = 0` gives `δw″ = −a δw` with
//! `a = (1 + 3p₀)/(1 − H²/4)`: oscillations for `H < 2`, exponential
//! growth for `H > 2`.

mod dopri;

use nalgebra::{Matrix3, Matrix5, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PlasmaParams;
use dopri::{integrate_samples, Tolerances};

/// Frame and equilibrium of a traveling-wave calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFrameConfig {
    /// Frame speed.
    pub v: f64,
    /// Equilibrium velocity relative to the frame (nonzero).
    pub u0: f64,
    /// Equilibrium pressure.
    pub p0: f64,
    pub params: PlasmaParams,
    /// Smallest admissible `|u − v|/|u₀|`.
    pub eps_sonic: f64,
}

impl WaveFrameConfig {
    pub fn new(v: f64, u0: f64, p0: f64, params: PlasmaParams) -> Result<Self> {
        let cfg = Self {
            v,
            u0,
            p0,
            params,
            eps_sonic: 1e-6,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unit-scaled configuration: `n₀ = m = e = ε₀ = u₀ = 1`, `v = 0`,
    /// `ħ = H`, equilibrium pressure `p0` in units of `m n₀ u₀²`.
    pub fn nondimensional(h: f64, p0: f64) -> Result<Self> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::invalid("H", "must be finite and >= 0"));
        }
        let params = PlasmaParams::nondimensional(h, p0, p0);
        Self::new(0.0, 1.0, p0, params)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.u0 == 0.0 {
            return Err(Error::ZeroReferenceVelocity);
        }
        for (name, value) in [("v", self.v), ("u0", self.u0), ("p0", self.p0)] {
            if !value.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(self.eps_sonic > 0.0) {
            return Err(Error::invalid("eps_sonic", "must be > 0"));
        }
        Ok(())
    }

    /// Quantum parameter `H = ħωₚ/(m u₀²)`.
    pub fn h(&self) -> f64 {
        self.params.hbar * self.params.omega_p() / (self.params.m * self.u0 * self.u0)
    }

    fn scales(&self) -> Scales {
        let prm = &self.params;
        let wp = prm.omega_p();
        let u0 = self.u0;
        Scales {
            length: u0 / wp,
            velocity: u0,
            pressure: prm.m * prm.n0 * u0 * u0,
            heat_flux: prm.m * prm.n0 * u0 * u0 * u0,
            potential: prm.m * u0 * u0 / prm.e,
            field: prm.m * u0 * wp / prm.e,
        }
    }
}

/// Unit of each variable; the length unit carries the sign of `u₀`.
#[derive(Debug, Clone, Copy)]
struct Scales {
    length: f64,
    velocity: f64,
    pressure: f64,
    heat_flux: f64,
    potential: f64,
    field: f64,
}

/// Point of a traveling-wave trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TravelingState {
    pub xi: f64,
    pub u: f64,
    pub p: f64,
    /// Heat flux `Q`.
    pub q: f64,
    pub phi: f64,
    /// `φ′`.
    pub psi: f64,
}

impl TravelingState {
    /// Density from the integrated continuity equation.
    pub fn density(&self, cfg: &WaveFrameConfig) -> f64 {
        cfg.params.n0 * cfg.u0 / (self.u - cfg.v)
    }

    /// `E = −φ′`.
    pub fn electric_field(&self) -> f64 {
        -self.psi
    }

    fn to_scaled(self, cfg: &WaveFrameConfig) -> (f64, [f64; 5]) {
        let s = cfg.scales();
        (
            self.xi / s.length,
            [
                (self.u - cfg.v) / s.velocity,
                self.p / s.pressure,
                self.q / s.heat_flux,
                self.phi / s.potential,
                self.psi / s.field,
            ],
        )
    }

    fn from_scaled(xi: f64, y: &[f64; 5], cfg: &WaveFrameConfig) -> Self {
        let s = cfg.scales();
        Self {
            xi: xi * s.length,
            u: cfg.v + y[0] * s.velocity,
            p: y[1] * s.pressure,
            q: y[2] * s.heat_flux,
            phi: y[3] * s.potential,
            psi: y[4] * s.field,
        }
    }
}

/// `d/dξ` of each state variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TravelingDerivatives {
    pub u: f64,
    pub p: f64,
    pub q: f64,
    pub phi: f64,
    pub psi: f64,
}

/// The equilibrium `u = u₀ + v`, `p = p₀`, `Q = φ = ψ = 0`.
pub fn equilibrium(cfg: &WaveFrameConfig) -> TravelingState {
    TravelingState {
        xi: 0.0,
        u: cfg.u0 + cfg.v,
        p: cfg.p0,
        q: 0.0,
        phi: 0.0,
        psi: 0.0,
    }
}

/// Scaled right-hand side; `xi` only labels errors.
fn scaled_rhs(y: &[f64; 5], h: f64, eps_sonic: f64, xi: f64) -> Result<[f64; 5]> {
    let [w, p, q, _phi, psi] = *y;
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            field: "traveling state",
            node: 0,
        });
    }
    if w.abs() <= eps_sonic {
        return Err(Error::SonicSingularity {
            xi,
            detail: format!("|u - v|/|u0| = {:e} reached the sonic tolerance", w.abs()),
        });
    }
    if w < 0.0 {
        return Err(Error::SonicSingularity {
            xi,
            detail: "u - v changed sign; density would be negative".into(),
        });
    }
    let n = 1.0 / w;
    let m = Matrix3::new(
        1.0,
        1.0,
        0.0,
        3.0 * p,
        w,
        1.0,
        4.0 * q - 0.25 * h * h * n * n * n,
        -3.0 * w * p,
        w,
    );
    let det = m.determinant();
    if det.abs() <= 1e-12 * m.norm() {
        return Err(Error::SonicSingularity {
            xi,
            detail: format!("derivative system is singular (det = {det:e})"),
        });
    }
    let rhs = Vector3::new(n * psi, 0.0, 0.0);
    let d = m.lu().solve(&rhs).ok_or_else(|| Error::SonicSingularity {
        xi,
        detail: "LU solve failed".into(),
    })?;
    Ok([d[0], d[1], d[2], psi, n - 1.0])
}

/// Derivatives with respect to `ξ` at `state`.
pub fn traveling_rhs(state: &TravelingState, cfg: &WaveFrameConfig) -> Result<TravelingDerivatives> {
    cfg.validate()?;
    let (_, y) = state.to_scaled(cfg);
    let d = scaled_rhs(&y, cfg.h(), cfg.eps_sonic, state.xi)?;
    let s = cfg.scales();
    Ok(TravelingDerivatives {
        u: d[0] * s.velocity / s.length,
        p: d[1] * s.pressure / s.length,
        q: d[2] * s.heat_flux / s.length,
        phi: d[3] * s.potential / s.length,
        psi: d[4] * s.field / s.length,
    })
}

/// Sampled trajectory; `halt` is set when a singularity stopped the run
/// before the requested end.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<TravelingState>,
    pub halt: Option<Error>,
}

/// Integrates from `initial` to `xi_end` (either direction) and samples the
/// solution at `samples` equal intervals. `tol` is used as both relative and
/// absolute tolerance on the scaled variables.
pub fn integrate(
    initial: &TravelingState,
    cfg: &WaveFrameConfig,
    xi_end: f64,
    samples: usize,
    tol: f64,
) -> Result<Trajectory> {
    cfg.validate()?;
    if samples == 0 {
        return Err(Error::invalid("samples", "must be >= 1"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("tol", "must be in (0, 1)"));
    }
    if !xi_end.is_finite() || xi_end == initial.xi {
        return Err(Error::invalid("xi_max", "must be finite and differ from the start"));
    }
    if initial.density(cfg) <= 0.0 || !initial.density(cfg).is_finite() {
        return Err(Error::invalid("initial", "u - v must have the sign of u0"));
    }
    let (x0, y0) = initial.to_scaled(cfg);
    let length = cfg.scales().length;
    let dx = (xi_end - initial.xi) / length / samples as f64;
    let h = cfg.h();
    let eps = cfg.eps_sonic;
    let f = |x: f64, y: &[f64; 5]| scaled_rhs(y, h, eps, x * length);
    let out = integrate_samples(f, x0, y0, dx, samples, Tolerances { rtol: tol, atol: tol })?;
    let states = out
        .xs
        .iter()
        .zip(&out.ys)
        .map(|(x, y)| TravelingState::from_scaled(*x, y, cfg))
        .collect();
    Ok(Trajectory { states, halt: out.halt })
}

/// `w + p − φ − ψ²/2` in scaled units; constant along exact trajectories.
pub fn first_integral(state: &TravelingState, cfg: &WaveFrameConfig) -> f64 {
    let (_, y) = state.to_scaled(cfg);
    y[0] + y[1] - y[3] - 0.5 * y[4] * y[4]
}

/// Real parts below this (scaled units) count as marginal.
pub const CENTER_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    CenterLike,
    Unstable,
}

impl Stability {
    pub fn name(self) -> &'static str {
        match self {
            Stability::CenterLike => "center-like",
            Stability::Unstable => "unstable",
        }
    }
}

/// Spectrum of the equilibrium linearization in scaled units.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenAnalysis {
    pub h: f64,
    /// Eigenvalues (per unit scaled length), sorted by real then imaginary
    /// part.
    pub eigenvalues: Vec<Complex64>,
    pub max_real: f64,
    pub stability: Stability,
}

/// Eigenvalues of the central-difference Jacobian at the equilibrium.
pub fn equilibrium_eigenvalues(cfg: &WaveFrameConfig) -> Result<EigenAnalysis> {
    cfg.validate()?;
    let (_, y0) = equilibrium(cfg).to_scaled(cfg);
    let h = cfg.h();
    let mut jac = Matrix5::<f64>::zeros();
    for col in 0..5 {
        let step = 1e-6 * y0[col].abs().max(1.0);
        let mut plus = y0;
        let mut minus = y0;
        plus[col] += step;
        minus[col] -= step;
        let fp = scaled_rhs(&plus, h, cfg.eps_sonic, 0.0)?;
        let fm = scaled_rhs(&minus, h, cfg.eps_sonic, 0.0)?;
        for row in 0..5 {
            jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * step);
        }
    }
    let mut eigenvalues: Vec<Complex64> = jac
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let max_real = eigenvalues.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let stability = if max_real < CENTER_THRESHOLD {
        Stability::CenterLike
    } else {
        Stability::Unstable
    };
    Ok(EigenAnalysis {
        h,
        eigenvalues,
        max_real,
        stability,
    })
}

/// Bisects in `H` on the stability classification of the equilibrium.
///
/// `family` maps `H` to a configuration. A midpoint where the linearization
/// is singular is moved by `2⁻¹⁰` of the bracket width.
pub fn stability_threshold<F>(family: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<WaveFrameConfig> + Sync,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("bracket", "need finite lo < hi"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let classify = |h: f64| -> Result<Stability> { Ok(equilibrium_eigenvalues(&family(h)?)?.stability) };
    let (a, b) = rayon::join(|| classify(lo), || classify(hi));
    let (s_lo, s_hi) = (a?, b?);
    if s_lo == s_hi {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let width = hi - lo;
        let mut mid = 0.5 * (lo + hi);
        let mut state = classify(mid);
        let mut nudge = 0;
        while let Err(Error::SonicSingularity { .. }) = state {
            nudge += 1;
            if nudge > 8 {
                break;
            }
            let sign = if nudge % 2 == 1 { 1.0 } else { -1.0 };
            mid = 0.5 * (lo + hi) + sign * width * (nudge as f64 * 2f64.powi(-10));
            state = classify(mid);
        }
        if state? == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `a = (1 + 3p₀)/(1 − H²/4)`, the squared oscillation wavenumber of the
/// linearization in scaled units (negative: exponential growth).
pub fn linear_wavenumber_sq(h: f64, p0_scaled: f64) -> f64 {
    (1.0 + 3.0 * p0_scaled) / (1.0 - 0.25 * h * h)
}
