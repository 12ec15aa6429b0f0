//! Periodic 1D fluid–Poisson solver for the third-order closure.
//!
//! Evolves density `n`, velocity `u`, pressure `p` and heat flux `Q` on
//! `[0, L)`:
//!
//! ```text
//! ∂t n = −∂x(n u)
//! ∂t u = −u ∂x u − ∂x p/(m n) + e ∂x φ/m
//! ∂t p = −u ∂x p − 3 p ∂x u − ∂x Q
//! ∂t Q = −u ∂x Q + 3 p ∂x p/(m n) − e ħ² n ∂x³φ/(4m²) − 4 Q ∂x u
//! ∂x² φ = (e/ε₀)(n − n₀)
//! ```
//!
//! The third derivative of the potential is taken as `(e/ε₀) ∂x n`.
//!
//! Linearizing about a uniform state gives `ω⁴ − ωₚ²ω² − ωₚ²k²C/(m n₀) = 0`
//! with `C = 3p₀ + n₀ħ²k²/(4m)`. Besides the oscillating root, whose `ω²`
//! is the generalized dispersion relation, every mode with `T₀∥ > 0` or
//! `ħ > 0` has a purely growing root (see [`linear_growth_rate`]). Its rate
//! increases without bound with `k`, so the initial-value problem amplifies
//! round-off at the grid scale. [`SolverConfig::mode_cutoff`] restricts the
//! evolution to the low modes for that reason.

mod frequency;
mod spectral;

pub use frequency::measure_frequency;
pub use spectral::DerivativeScheme;

use serde::Serialize;

use crate::dispersion::eq14_omega_sq;
use crate::error::{Error, Result};
use crate::params::PlasmaParams;
use spectral::{fd6_derivative, SpectralOps};

/// Numerical options of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: DerivativeScheme,
    /// Drop Fourier modes above `N/3` (2/3 rule) in derivatives and after
    /// every step.
    pub dealias: bool,
    /// Retain only modes `|m| <= cutoff` (Galerkin truncation).
    pub mode_cutoff: Option<usize>,
    /// Safety factor `c` of the step-size limit.
    pub cfl_safety: f64,
    /// Halt when `max |n_{i+1} − n_i| / mean(n)` exceeds this.
    pub gradient_threshold: f64,
    /// Allowed relative mismatch between `mean(n)` and `n₀`.
    pub poisson_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            scheme: DerivativeScheme::Spectral,
            dealias: true,
            mode_cutoff: None,
            cfl_safety: 0.4,
            gradient_threshold: 0.5,
            poisson_tolerance: 1e-9,
        }
    }
}

/// Fields on the periodic grid at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluidState1D {
    pub t: f64,
    pub n: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    /// Heat flux `Q`.
    pub q: Vec<f64>,
    /// Potential consistent with `n` (zero mean).
    pub phi: Vec<f64>,
}

impl FluidState1D {
    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }
}

/// Time derivatives of the evolved fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub n: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Which fields a plain perturbation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FieldMask {
    pub n: bool,
    pub u: bool,
    pub p: bool,
    pub q: bool,
}

/// Initial data on top of the uniform equilibrium `(n₀, 0, n₀k_BT₀∥, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Equilibrium,
    /// Standing wave of the oscillating branch: `δn = A n₀ cos(kx)` with the
    /// matching pressure `δp = (m/k²)(ω² − ωₚ²) δn`, `δu = δQ = 0`. Only the
    /// `±ω` pair is excited, none of the growing root.
    Eigenmode {
        mode: usize,
        amplitude: f64,
    },
    /// `A cos(kx)` added to the selected fields, each in its natural scale
    /// (`n₀`, `ωₚ/k`, `m n₀ (ωₚ/k)²`, `m n₀ (ωₚ/k)³`).
    Perturb {
        mode: usize,
        amplitude: f64,
        fields: FieldMask,
    },
}

/// Sample of the probe point and global diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSample {
    pub t: f64,
    pub n: f64,
    pub u: f64,
    pub p: f64,
    pub q: f64,
    pub phi: f64,
    /// `∫ n dx`.
    pub mass: f64,
    /// `∫ m n u dx`.
    pub momentum: f64,
}

/// Output of [`Fluid1D::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub probes: Vec<ProbeSample>,
    pub snapshots: Vec<FluidState1D>,
    pub final_state: FluidState1D,
    pub dt: f64,
    pub steps: usize,
}

/// Options of [`Fluid1D::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    /// Fixed step; `None` picks 80% of the admissible step for the initial
    /// state, shrunk so that it divides the time span.
    pub dt: Option<f64>,
    /// Grid index of the probe.
    pub probe_index: usize,
    /// Record a probe sample every this many steps.
    pub probe_every: usize,
    /// Record a full snapshot every this many steps (0: never).
    pub snapshot_every: usize,
}

/// Solver for a fixed grid and parameter set.
#[derive(Clone)]
pub struct Fluid1D {
    params: PlasmaParams,
    config: SolverConfig,
    length: f64,
    points: usize,
    ops: SpectralOps,
}

impl std::fmt::Debug for Fluid1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fluid1D")
            .field("params", &self.params)
            .field("config", &self.config)
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

impl Fluid1D {
    pub fn new(params: PlasmaParams, points: usize, length: f64, config: SolverConfig) -> Result<Self> {
        params.validate()?;
        if points < 8 {
            return Err(Error::invalid("grid", "need at least 8 points"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("length", "must be finite and > 0"));
        }
        if !(config.cfl_safety > 0.0) {
            return Err(Error::invalid("cfl_safety", "must be > 0"));
        }
        let ops = SpectralOps::new(points, length, config.dealias, config.mode_cutoff);
        Ok(Self {
            params,
            config,
            length,
            points,
            ops,
        })
    }

    pub fn params(&self) -> &PlasmaParams {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn wavenumber(&self, mode: usize) -> f64 {
        2.0 * std::f64::consts::PI * mode as f64 / self.length
    }

    fn ddx(&self, f: &[f64]) -> Vec<f64> {
        match self.config.scheme {
            DerivativeScheme::Spectral => self.ops.derivative(f),
            DerivativeScheme::FiniteDifference6 => fd6_derivative(f, self.dx()),
        }
    }

    /// Zero-mean potential with `∂x²φ = (e/ε₀)(n − n₀)`.
    pub fn solve_poisson(&self, n: &[f64]) -> Result<Vec<f64>> {
        if n.len() != self.points {
            return Err(Error::invalid("n", "length does not match the grid"));
        }
        let n0 = self.params.n0;
        let mean = n.iter().sum::<f64>() / n.len() as f64;
        if (mean - n0).abs() > self.config.poisson_tolerance * n0 {
            return Err(Error::PoissonSolvability { mean, n0 });
        }
        let source: Vec<f64> = n.iter().map(|v| v - n0).collect();
        Ok(self.ops.inverse_laplacian(&source, self.params.e / self.params.eps0))
    }

    fn check_fields(&self, n: &[f64], u: &[f64], p: &[f64], q: &[f64]) -> Result<()> {
        for (name, field) in [("n", n), ("u", u), ("p", p), ("Q", q)] {
            if field.len() != self.points {
                return Err(Error::invalid("state", format!("field {name} has wrong length")));
            }
            if let Some(i) = field.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { field: name, node: i });
            }
        }
        if let Some(i) = n.iter().position(|&v| v <= 0.0) {
            return Err(Error::VacuumBreakdown { node: i, value: n[i] });
        }
        Ok(())
    }

    /// Eulerian time derivatives of `(n, u, p, Q)`.
    pub fn rhs(&self, state: &FluidState1D) -> Result<Derivatives> {
        self.rhs_fields(&state.n, &state.u, &state.p, &state.q)
    }

    fn rhs_fields(&self, n: &[f64], u: &[f64], p: &[f64], q: &[f64]) -> Result<Derivatives> {
        self.check_fields(n, u, p, q)?;
        let prm = &self.params;
        let phi = self.solve_poisson(n)?;
        let flux: Vec<f64> = n.iter().zip(u).map(|(a, b)| a * b).collect();
        let dflux = self.ddx(&flux);
        let nx = self.ddx(n);
        let ux = self.ddx(u);
        let px = self.ddx(p);
        let qx = self.ddx(q);
        let phix = self.ddx(&phi);
        let e_m = prm.e / prm.m;
        let quantum = prm.e * prm.hbar * prm.hbar / (4.0 * prm.m * prm.m) * (prm.e / prm.eps0);

        let len = self.points;
        let mut d = Derivatives {
            n: vec![0.0; len],
            u: vec![0.0; len],
            p: vec![0.0; len],
            q: vec![0.0; len],
        };
        for i in 0..len {
            d.n[i] = -dflux[i];
            d.u[i] = -u[i] * ux[i] - px[i] / (prm.m * n[i]) + e_m * phix[i];
            d.p[i] = -u[i] * px[i] - 3.0 * p[i] * ux[i] - qx[i];
            d.q[i] = -u[i] * qx[i] + 3.0 * p[i] * px[i] / (prm.m * n[i]) - quantum * n[i] * nx[i] - 4.0 * q[i] * ux[i];
        }
        Ok(d)
    }

    /// Largest admissible step for `state`:
    /// `c · min(Δx / max(|u| + sqrt(3p/(m n))), 1/ω_max)` with `ω_max` the
    /// dispersion-relation frequency at the largest wavenumber the scheme
    /// carries (the Nyquist wavenumber for finite differences).
    pub fn max_stable_dt(&self, state: &FluidState1D) -> f64 {
        let prm = &self.params;
        let speed = state
            .n
            .iter()
            .zip(&state.u)
            .zip(&state.p)
            .map(|((n, u), p)| u.abs() + (3.0 * p.max(0.0) / (prm.m * n)).sqrt())
            .fold(0.0, f64::max);
        let k_max = match self.config.scheme {
            DerivativeScheme::Spectral => self.wavenumber(self.ops.max_mode()),
            DerivativeScheme::FiniteDifference6 if self.ops.filters() => self.wavenumber(self.ops.max_mode()),
            DerivativeScheme::FiniteDifference6 => std::f64::consts::PI / self.dx(),
        };
        let omega_max = eq14_omega_sq(k_max, prm).sqrt();
        let c = self.config.cfl_safety;
        let advective = if speed > 0.0 {
            c * self.dx() / speed
        } else {
            f64::INFINITY
        };
        advective.min(c / omega_max)
    }

    fn finish_state(&self, t: f64, n: Vec<f64>, u: Vec<f64>, p: Vec<f64>, q: Vec<f64>) -> Result<FluidState1D> {
        let (n, u, p, q) = if self.ops.filters() {
            (
                self.ops.project(&n),
                self.ops.project(&u),
                self.ops.project(&p),
                self.ops.project(&q),
            )
        } else {
            (n, u, p, q)
        };
        self.check_fields(&n, &u, &p, &q)?;
        let phi = self.solve_poisson(&n)?;
        Ok(FluidState1D { t, n, u, p, q, phi })
    }

    /// Builds a state from raw fields, applying the mode projection and
    /// solving for the potential.
    pub fn state_from_fields(&self, n: Vec<f64>, u: Vec<f64>, p: Vec<f64>, q: Vec<f64>) -> Result<FluidState1D> {
        self.finish_state(0.0, n, u, p, q)
    }

    pub fn initial_state(&self, ic: &InitialCondition) -> Result<FluidState1D> {
        let prm = &self.params;
        let len = self.points;
        let mut n = vec![prm.n0; len];
        let mut u = vec![0.0; len];
        let mut p = vec![prm.p0_par(); len];
        let mut q = vec![0.0; len];
        match *ic {
            InitialCondition::Equilibrium => {}
            InitialCondition::Eigenmode { mode, amplitude } => {
                let k = self.check_mode(mode)?;
                let w2 = eq14_omega_sq(k, prm);
                let wp2 = prm.omega_p().powi(2);
                let dp_per_dn = prm.m / (k * k) * (w2 - wp2);
                for i in 0..len {
                    let dn = amplitude * prm.n0 * (k * self.x(i)).cos();
                    n[i] += dn;
                    p[i] += dp_per_dn * dn;
                }
            }
            InitialCondition::Perturb {
                mode,
                amplitude,
                fields,
            } => {
                let k = self.check_mode(mode)?;
                let v = prm.omega_p() / k;
                for i in 0..len {
                    let c = amplitude * (k * self.x(i)).cos();
                    if fields.n {
                        n[i] += c * prm.n0;
                    }
                    if fields.u {
                        u[i] += c * v;
                    }
                    if fields.p {
                        p[i] += c * prm.m * prm.n0 * v * v;
                    }
                    if fields.q {
                        q[i] += c * prm.m * prm.n0 * v * v * v;
                    }
                }
            }
        }
        self.finish_state(0.0, n, u, p, q)
    }

    fn check_mode(&self, mode: usize) -> Result<f64> {
        if mode == 0 || 2 * mode >= self.points {
            return Err(Error::invalid("mode", format!("must be in 1..{}", self.points / 2)));
        }
        if let Some(c) = self.config.mode_cutoff {
            if mode > c {
                return Err(Error::invalid("mode", format!("mode {mode} is above the cutoff {c}")));
            }
        }
        Ok(self.wavenumber(mode))
    }

    /// One classical Runge–Kutta 4 step; the potential is re-solved at every
    /// stage.
    pub fn step(&self, state: &FluidState1D, dt: f64) -> Result<FluidState1D> {
        let limit = self.max_stable_dt(state);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, suggested: limit });
        }
        let axpy =
            |base: &[f64], k: &[f64], h: f64| -> Vec<f64> { base.iter().zip(k).map(|(b, d)| b + h * d).collect() };
        let s = state;
        let k1 = self.rhs_fields(&s.n, &s.u, &s.p, &s.q)?;
        let h = 0.5 * dt;
        let k2 = self.rhs_fields(
            &axpy(&s.n, &k1.n, h),
            &axpy(&s.u, &k1.u, h),
            &axpy(&s.p, &k1.p, h),
            &axpy(&s.q, &k1.q, h),
        )?;
        let k3 = self.rhs_fields(
            &axpy(&s.n, &k2.n, h),
            &axpy(&s.u, &k2.u, h),
            &axpy(&s.p, &k2.p, h),
            &axpy(&s.q, &k2.q, h),
        )?;
        let k4 = self.rhs_fields(
            &axpy(&s.n, &k3.n, dt),
            &axpy(&s.u, &k3.u, dt),
            &axpy(&s.p, &k3.p, dt),
            &axpy(&s.q, &k3.q, dt),
        )?;
        let combine = |base: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
            (0..base.len())
                .map(|i| base[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
                .collect()
        };
        let n = combine(&s.n, &k1.n, &k2.n, &k3.n, &k4.n);
        let u = combine(&s.u, &k1.u, &k2.u, &k3.u, &k4.u);
        let p = combine(&s.p, &k1.p, &k2.p, &k3.p, &k4.p);
        let q = combine(&s.q, &k1.q, &k2.q, &k3.q, &k4.q);
        let next = self.finish_state(s.t + dt, n, u, p, q)?;
        self.check_steepening(&next)?;
        Ok(next)
    }

    fn check_steepening(&self, state: &FluidState1D) -> Result<()> {
        let mean = state.n.iter().sum::<f64>() / state.len() as f64;
        let len = state.len();
        let jump = (0..len)
            .map(|i| (state.n[(i + 1) % len] - state.n[i]).abs())
            .fold(0.0, f64::max)
            / mean;
        if jump > self.config.gradient_threshold {
            return Err(Error::Steepening {
                jump,
                threshold: self.config.gradient_threshold,
                time: state.t,
            });
        }
        Ok(())
    }

    pub fn probe(&self, state: &FluidState1D, index: usize) -> ProbeSample {
        let dx = self.dx();
        ProbeSample {
            t: state.t,
            n: state.n[index],
            u: state.u[index],
            p: state.p[index],
            q: state.q[index],
            phi: state.phi[index],
            mass: state.n.iter().sum::<f64>() * dx,
            momentum: self.params.m * state.n.iter().zip(&state.u).map(|(n, u)| n * u).sum::<f64>() * dx,
        }
    }

    /// Integrates from `initial` to `t_end` with a fixed step.
    pub fn run(&self, initial: FluidState1D, options: &RunOptions) -> Result<RunOutput> {
        if !(options.t_end > initial.t) {
            return Err(Error::invalid("t_end", "must exceed the initial time"));
        }
        if options.probe_index >= self.points {
            return Err(Error::invalid("probe_index", "outside the grid"));
        }
        let span = options.t_end - initial.t;
        let (dt, steps) = match options.dt {
            Some(dt) => {
                if !(dt > 0.0) {
                    return Err(Error::invalid("dt", "must be > 0"));
                }
                let steps = (span / dt).round().max(1.0) as usize;
                (dt, steps)
            }
            None => {
                let limit = 0.8 * self.max_stable_dt(&initial);
                let steps = (span / limit).ceil().max(1.0) as usize;
                (span / steps as f64, steps)
            }
        };
        let probe_every = options.probe_every.max(1);
        let mut probes = vec![self.probe(&initial, options.probe_index)];
        let mut snapshots = Vec::new();
        if options.snapshot_every > 0 {
            snapshots.push(initial.clone());
        }
        let t0 = initial.t;
        let mut state = initial;
        for s in 1..=steps {
            state = self.step(&state, dt)?;
            // Avoid drift of the clock through repeated addition.
            state.t = t0 + s as f64 * dt;
            if s % probe_every == 0 {
                probes.push(self.probe(&state, options.probe_index));
            }
            if options.snapshot_every > 0 && s % options.snapshot_every == 0 {
                snapshots.push(state.clone());
            }
        }
        Ok(RunOutput {
            probes,
            snapshots,
            final_state: state,
            dt,
            steps,
        })
    }
}

/// Growth rate `ωₚ sqrt((sqrt(1 + τ + η) − 1)/2)` of the non-oscillating
/// root of the linearized system at wavenumber `k`.
pub fn linear_growth_rate(k: f64, params: &PlasmaParams) -> f64 {
    let wp2 = params.omega_p().powi(2);
    // ω₊² − ωₚ² = ωₚ² (sqrt(1+x) − 1)/2 equals the growth rate squared.
    (eq14_omega_sq(k, params) - wp2).max(0.0).sqrt()
}
