//! Physical parameters, presets and nondimensionalization schemes.
//!
//! Sign conventions: `e` is the (positive) charge magnitude. The momentum
//! equation carries `+(e/m) ∂φ` and Poisson reads `∇²φ = (e/ε₀)(n − n₀)`;
//! the two together describe electrons against a fixed ion background.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact / recommended values.
pub mod codata {
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
}

/// Named parameter presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// `e = m = ε₀ = k_B = n₀ = 1`; `ħ` and the temperatures are free.
    Nondim,
    /// CODATA electron constants with `n₀ = 10²⁸ m⁻³`.
    SiElectron,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Nondim => "nondim",
            Preset::SiElectron => "si-electron",
        }
    }

    pub fn params(self) -> PlasmaParams {
        match self {
            Preset::Nondim => PlasmaParams::nondimensional(1.0, 0.1, 0.1),
            Preset::SiElectron => PlasmaParams::si_electron(1e28, 1e4, 1e4),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nondim" | "nondimensional" => Ok(Preset::Nondim),
            "si-electron" | "si_electron" | "si" => Ok(Preset::SiElectron),
            other => Err(Error::Config {
                key: "preset".into(),
                reason: format!("unknown preset `{other}` (expected nondim or si-electron)"),
            }),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Equilibrium plasma parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaParams {
    /// Background number density [m⁻³].
    pub n0: f64,
    /// Particle mass [kg].
    pub m: f64,
    /// Charge magnitude [C].
    pub e: f64,
    /// Vacuum permittivity [F/m].
    pub eps0: f64,
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
    /// Equilibrium temperature along the propagation direction [K].
    pub t0_par: f64,
    /// Equilibrium temperature across the propagation direction [K].
    pub t0_perp: f64,
    /// Boltzmann constant [J/K].
    pub kb: f64,
}

impl PlasmaParams {
    pub const KEYS: [&'static str; 8] = ["n0", "m", "e", "eps0", "hbar", "T0_par", "T0_perp", "kB"];

    pub fn nondimensional(hbar: f64, t0_par: f64, t0_perp: f64) -> Self {
        Self {
            n0: 1.0,
            m: 1.0,
            e: 1.0,
            eps0: 1.0,
            hbar,
            t0_par,
            t0_perp,
            kb: 1.0,
        }
    }

    pub fn si_electron(n0: f64, t0_par: f64, t0_perp: f64) -> Self {
        Self {
            n0,
            m: codata::ELECTRON_MASS,
            e: codata::ELEMENTARY_CHARGE,
            eps0: codata::VACUUM_PERMITTIVITY,
            hbar: codata::HBAR,
            t0_par,
            t0_perp,
            kb: codata::BOLTZMANN,
        }
    }

    /// Checks positivity of every constant and non-negativity of the
    /// temperatures. `hbar = 0` is accepted as the classical limit.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n0", self.n0),
            ("m", self.m),
            ("e", self.e),
            ("eps0", self.eps0),
            ("kB", self.kb),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        let non_negative = [("hbar", self.hbar), ("T0_par", self.t0_par), ("T0_perp", self.t0_perp)];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")));
            }
        }
        let wp = self.omega_p();
        if !(wp.is_finite() && wp > 0.0) {
            return Err(Error::invalid("n0", "plasma frequency is not finite and positive"));
        }
        Ok(())
    }

    /// Plasma frequency `sqrt(e² n₀ / (m ε₀))`.
    pub fn omega_p(&self) -> f64 {
        derived_omega_p(self)
    }

    /// Equilibrium parallel pressure `n₀ k_B T₀∥`.
    pub fn p0_par(&self) -> f64 {
        self.n0 * self.kb * self.t0_par
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "n0" => self.n0,
            "m" => self.m,
            "e" => self.e,
            "eps0" => self.eps0,
            "hbar" => self.hbar,
            "T0_par" => self.t0_par,
            "T0_perp" => self.t0_perp,
            "kB" => self.kb,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "n0" => &mut self.n0,
            "m" => &mut self.m,
            "e" => &mut self.e,
            "eps0" => &mut self.eps0,
            "hbar" => &mut self.hbar,
            "T0_par" => &mut self.t0_par,
            "T0_perp" => &mut self.t0_perp,
            "kB" => &mut self.kb,
            _ => {
                return Err(Error::Config {
                    key: key.to_string(),
                    reason: "unknown parameter key".into(),
                })
            }
        };
        *slot = value;
        Ok(())
    }

    /// Parses a `key = value` block. A `preset` line (anywhere) selects the
    /// base values; the remaining keys override them. Unknown keys fail.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut preset = Preset::Nondim;
        let mut overrides = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                key: line.to_string(),
                reason: format!("line {} is not of the form key = value", lineno + 1),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "preset" {
                preset = value.parse()?;
                continue;
            }
            if !Self::KEYS.contains(&key) {
                return Err(Error::Config {
                    key: key.to_string(),
                    reason: "unknown parameter key".into(),
                });
            }
            let number: f64 = value.parse().map_err(|_| Error::Config {
                key: key.to_string(),
                reason: format!("`{value}` is not a number"),
            })?;
            overrides.push((key.to_string(), number));
        }
        let mut params = preset.params();
        for (key, value) in overrides {
            params.set(&key, value)?;
        }
        params.validate()?;
        Ok(params)
    }

    /// Inverse of [`PlasmaParams::from_kv_str`]; values are written with 17
    /// significant digits so the round trip is exact.
    pub fn to_kv_string(&self) -> String {
        Self::KEYS
            .iter()
            .map(|k| format!("{k} = {:.16e}\n", self.get(k).unwrap()))
            .collect()
    }
}

/// `ωₚ = sqrt(e² n₀ / (m ε₀))`.
pub fn derived_omega_p(params: &PlasmaParams) -> f64 {
    // e * sqrt(n0 / (m eps0)) keeps SI magnitudes away from underflow of e².
    params.e * (params.n0 / (params.m * params.eps0)).sqrt()
}

/// Characteristic scales of a run together with the dimensionless quantum
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondimScheme {
    pub length_scale: f64,
    pub time_scale: f64,
    pub velocity_scale: f64,
    pub quantum_parameter: f64,
}

/// Wave-frame scheme: time in `1/ωₚ`, velocity in `|u0|`, length in
/// `|u0|/ωₚ`, and `H = ħ ωₚ / (m u0²)`.
pub fn make_nondim(params: &PlasmaParams, u0: f64) -> Result<NondimScheme> {
    if u0 == 0.0 {
        return Err(Error::ZeroReferenceVelocity);
    }
    if !u0.is_finite() {
        return Err(Error::invalid("u0", "must be finite"));
    }
    let wp = derived_omega_p(params);
    let velocity_scale = u0.abs();
    let time_scale = 1.0 / wp;
    Ok(NondimScheme {
        length_scale: velocity_scale * time_scale,
        time_scale,
        velocity_scale,
        quantum_parameter: params.hbar * wp / (params.m * u0 * u0),
    })
}

impl NondimScheme {
    /// Free-particle scheme: `x̄ = x/σ`, `t̄ = ħt/(mσ²)`, `v̄ = mvσ/ħ`.
    /// In these units ħ/m is one, so the quantum parameter is one.
    pub fn wigner(hbar: f64, m: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", "must be finite and > 0"));
        }
        if !(hbar > 0.0 && m > 0.0) {
            return Err(Error::invalid("hbar", "hbar and m must be > 0"));
        }
        let time_scale = m * sigma * sigma / hbar;
        Ok(Self {
            length_scale: sigma,
            time_scale,
            velocity_scale: sigma / time_scale,
            quantum_parameter: 1.0,
        })
    }
}
