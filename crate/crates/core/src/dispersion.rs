//! Linear dispersion relations for electrostatic waves propagating along z.
//!
//! All relations return `ω²`. They are evaluated in units of `ωₚ²` through
//! the two dimensionless groups
//!
//! ```text
//! τ = 12 k_B T₀∥ k² / (m ωₚ²),     η = ħ² k⁴ / (m² ωₚ²)
//! ```
//!
//! so that SI magnitudes never overflow or underflow. `T₀⊥` never enters.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PlasmaParams;

/// Which dispersion relation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Third-order moment closure with `R = 0`.
    Eq14,
    /// Long-wavelength expansion: Bohm–Gross plus recoil `ħ²k⁴/(4m²)`.
    QuantumLangmuir,
    /// Classical warm relation `ωₚ² + 3 k_B T k²/m`.
    BohmGross,
    /// Scalar-pressure adiabatic fluid with exponent γ.
    AdiabaticGamma(f64),
    /// Temperature-equation closure `ωₚ² + (5/3) k_B T k²/m + ħ²k⁴/(12 m²)`.
    TemperatureClosure,
}

impl Relation {
    /// The five relations in comparison order, with the isotropic
    /// adiabatic exponent 5/3 for the γ relation.
    pub const ALL: [Relation; 5] = [
        Relation::Eq14,
        Relation::QuantumLangmuir,
        Relation::BohmGross,
        Relation::AdiabaticGamma(5.0 / 3.0),
        Relation::TemperatureClosure,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Relation::Eq14 => "eq14",
            Relation::QuantumLangmuir => "quantum_langmuir",
            Relation::BohmGross => "bohm_gross",
            Relation::AdiabaticGamma(_) => "adiabatic_gamma",
            Relation::TemperatureClosure => "temperature_closure",
        }
    }

    /// `ω²` at wavenumber `k`.
    pub fn omega_sq(&self, k: f64, params: &PlasmaParams) -> f64 {
        let wp2 = params.omega_p().powi(2);
        wp2 * (1.0 + self.excess_ratio(k, params))
    }

    /// `(ω² − ωₚ²)/ωₚ²`, evaluated without cancellation.
    pub fn excess_ratio(&self, k: f64, params: &PlasmaParams) -> f64 {
        let g = Groups::new(k, params);
        match *self {
            Relation::Eq14 => {
                // (sqrt(1+x) − 1)/2 = x / (2 (1 + sqrt(1+x)))
                let x = g.tau + g.eta;
                x / (2.0 * (1.0 + (1.0 + x).sqrt()))
            }
            Relation::QuantumLangmuir => g.tau / 4.0 + g.eta / 4.0,
            Relation::BohmGross => g.tau / 4.0,
            Relation::AdiabaticGamma(gamma) => gamma * g.tau / 12.0,
            Relation::TemperatureClosure => (5.0 / 3.0) * g.tau / 12.0 + g.eta / 12.0,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Relation {
    type Err = Error;

    /// Accepts the tags above; `adiabatic_gamma` takes an optional `:γ`
    /// suffix (default 5/3).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('-', "_");
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (s.clone(), None),
        };
        let rel = match head.as_str() {
            "eq14" => Relation::Eq14,
            "quantum_langmuir" => Relation::QuantumLangmuir,
            "bohm_gross" => Relation::BohmGross,
            "temperature_closure" => Relation::TemperatureClosure,
            "adiabatic_gamma" | "adiabatic" => {
                let gamma = match arg.as_deref() {
                    Some(a) => a.parse().map_err(|_| Error::Config {
                        key: "relation".into(),
                        reason: format!("bad gamma `{a}`"),
                    })?,
                    None => 5.0 / 3.0,
                };
                if !(gamma > 0.0) {
                    return Err(Error::invalid("gamma", "must be > 0"));
                }
                return Ok(Relation::AdiabaticGamma(gamma));
            }
            other => {
                return Err(Error::Config {
                    key: "relation".into(),
                    reason: format!("unknown relation `{other}`"),
                })
            }
        };
        if arg.is_some() {
            return Err(Error::Config {
                key: "relation".into(),
                reason: format!("relation `{head}` takes no argument"),
            });
        }
        Ok(rel)
    }
}

/// Dimensionless groups `τ` and `η` at one wavenumber.
#[derive(Debug, Clone, Copy)]
struct Groups {
    tau: f64,
    eta: f64,
}

impl Groups {
    fn new(k: f64, params: &PlasmaParams) -> Self {
        let wp = params.omega_p();
        let kw = k / wp;
        let tau = 12.0 * (params.kb * params.t0_par / params.m) * kw * kw;
        // ħk²/(mωₚ) squared; grouping keeps SI values in range.
        let a = (params.hbar / params.m) * k * kw;
        Self { tau, eta: a * a }
    }
}

pub fn eq14_omega_sq(k: f64, params: &PlasmaParams) -> f64 {
    Relation::Eq14.omega_sq(k, params)
}

pub fn quantum_langmuir_omega_sq(k: f64, params: &PlasmaParams) -> f64 {
    Relation::QuantumLangmuir.omega_sq(k, params)
}

pub fn bohm_gross_omega_sq(k: f64, params: &PlasmaParams) -> f64 {
    Relation::BohmGross.omega_sq(k, params)
}

pub fn adiabatic_gamma_omega_sq(k: f64, params: &PlasmaParams, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", "must be > 0"));
    }
    Ok(Relation::AdiabaticGamma(gamma).omega_sq(k, params))
}

pub fn temperature_closure_omega_sq(k: f64, params: &PlasmaParams) -> f64 {
    Relation::TemperatureClosure.omega_sq(k, params)
}

/// One evaluated point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega_sq: f64,
    pub relation: Relation,
    pub params: PlasmaParams,
}

impl DispersionPoint {
    pub fn omega(&self) -> f64 {
        self.omega_sq.sqrt()
    }
}

/// Spacing of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Uniform,
    Log,
}

/// Sample wavenumbers of a sweep; endpoints are reproduced exactly.
pub fn sweep_wavenumbers(k_min: f64, k_max: f64, n_points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(k_min >= 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(Error::invalid(
            "k range",
            format!("need 0 <= k_min < k_max, got [{k_min}, {k_max}]"),
        ));
    }
    if n_points < 2 {
        return Err(Error::invalid("n_points", "must be >= 2"));
    }
    let last = (n_points - 1) as f64;
    let ks = match spacing {
        Spacing::Uniform => (0..n_points)
            .map(|i| k_min + (k_max - k_min) * i as f64 / last)
            .collect::<Vec<_>>(),
        Spacing::Log => {
            if k_min <= 0.0 {
                return Err(Error::invalid("k_min", "log spacing needs k_min > 0"));
            }
            let (a, b) = (k_min.ln(), k_max.ln());
            (0..n_points).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
        }
    };
    let mut ks = ks;
    ks[0] = k_min;
    ks[n_points - 1] = k_max;
    Ok(ks)
}

/// Evaluates `relation` on a uniform or log-uniform grid of wavenumbers.
pub fn sweep(
    relation: Relation,
    k_min: f64,
    k_max: f64,
    n_points: usize,
    spacing: Spacing,
    params: &PlasmaParams,
) -> Result<Vec<DispersionPoint>> {
    params.validate()?;
    let ks = sweep_wavenumbers(k_min, k_max, n_points, spacing)?;
    Ok(ks
        .into_iter()
        .map(|k| DispersionPoint {
            k,
            omega_sq: relation.omega_sq(k, params),
            relation,
            params: *params,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(hbar: f64, t: f64) -> PlasmaParams {
        PlasmaParams::nondimensional(hbar, t, 0.0)
    }

    #[test]
    fn every_relation_is_plasma_frequency_at_zero_k() {
        let p = PlasmaParams::si_electron(1e28, 3e4, 1e3);
        let wp2 = p.omega_p().powi(2);
        for rel in Relation::ALL.iter().chain(&[Relation::AdiabaticGamma(3.0)]) {
            assert_eq!(rel.omega_sq(0.0, &p), wp2, "{rel}");
        }
    }

    #[test]
    fn eq14_reference_points() {
        // 12 T k² = 3 with ħ = 0, k = 1  →  (1 + 2)/2.
        let p = np(0.0, 0.25);
        assert!((eq14_omega_sq(1.0, &p) - 1.5).abs() < 1e-15);
        // T = 0, ħ²k⁴ = 1  →  (1 + √2)/2 = 1.2071067811865475244.
        let p = np(1.0, 0.0);
        assert!((eq14_omega_sq(1.0, &p) - 1.207_106_781_186_547_5).abs() < 1e-15);
    }

    #[test]
    fn perpendicular_temperature_never_contributes() {
        let mut p = np(0.7, 0.3);
        let reference = eq14_omega_sq(1.3, &p);
        for t in [0.0, 1e-3, 5.0, 1e6] {
            p.t0_perp = t;
            assert_eq!(eq14_omega_sq(1.3, &p).to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn gamma_three_is_bohm_gross() {
        let p = np(0.4, 0.2);
        for k in [0.0, 0.1, 1.0, 7.5] {
            assert_eq!(
                adiabatic_gamma_omega_sq(k, &p, 3.0).unwrap(),
                bohm_gross_omega_sq(k, &p)
            );
        }
        assert!(adiabatic_gamma_omega_sq(1.0, &p, 0.0).is_err());
    }

    #[test]
    fn temperature_closure_offsets() {
        let classical = np(0.0, 0.2);
        let k: f64 = 0.8;
        let diff = bohm_gross_omega_sq(k, &classical) - temperature_closure_omega_sq(k, &classical);
        assert!((diff - (4.0 / 3.0) * 0.2 * k * k).abs() < 1e-15);

        let cold = np(0.9, 0.0);
        let ql = Relation::QuantumLangmuir.excess_ratio(k, &cold);
        let tc = Relation::TemperatureClosure.excess_ratio(k, &cold);
        assert!((tc / ql - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_langmuir_is_bohm_pines() {
        let p = np(0.6, 0.0);
        let k: f64 = 1.7;
        let expect = 1.0 + 0.36 * k.powi(4) / 4.0;
        assert!((quantum_langmuir_omega_sq(k, &p) - expect).abs() < 1e-14);
    }

    #[test]
    fn sweep_grid_and_errors() {
        let p = np(1.0, 0.1);
        let pts = sweep(Relation::Eq14, 0.0, 2.0, 2, Spacing::Uniform, &p).unwrap();
        assert_eq!(pts[0].k, 0.0);
        assert_eq!(pts[0].omega_sq, 1.0);
        assert_eq!(pts[1].k, 2.0);
        assert!(sweep(Relation::Eq14, 1.0, 1.0, 5, Spacing::Uniform, &p).is_err());
        assert!(sweep(Relation::Eq14, 0.0, 1.0, 1, Spacing::Uniform, &p).is_err());
        assert!(sweep(Relation::Eq14, 0.0, 1.0, 5, Spacing::Log, &p).is_err());
        let log = sweep_wavenumbers(1e-3, 1.0, 4, Spacing::Log).unwrap();
        assert!((log[1] - 1e-2).abs() < 1e-15 && (log[2] - 1e-1).abs() < 1e-14);
    }

    #[test]
    fn relation_parsing() {
        assert_eq!("eq14".parse::<Relation>().unwrap(), Relation::Eq14);
        assert_eq!("bohm-gross".parse::<Relation>().unwrap(), Relation::BohmGross);
        assert_eq!(
            "adiabatic_gamma:3".parse::<Relation>().unwrap(),
            Relation::AdiabaticGamma(3.0)
        );
        assert!("eq15".parse::<Relation>().is_err());
        assert!("eq14:2".parse::<Relation>().is_err());
    }

    #[test]
    fn si_evaluation_does_not_underflow() {
        let p = PlasmaParams::si_electron(1e28, 0.0, 0.0);
        // k near the inverse interparticle spacing.
        let k = 1e10;
        let wp2 = p.omega_p().powi(2);
        let ratio = quantum_langmuir_omega_sq(k, &p) / wp2 - 1.0;
        let direct = (p.hbar * k * k / p.m).powi(2) / 4.0 / wp2;
        assert!(ratio > 0.0);
        assert!((ratio / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn si_thermal_term_matches_bohm_gross_coefficient() {
        let p = PlasmaParams::si_electron(1e28, 1e4, 0.0);
        let k = 1e8;
        let wp2 = p.omega_p().powi(2);
        let thermal = 3.0 * p.kb * p.t0_par / p.m * k * k;
        let ratio = (bohm_gross_omega_sq(k, &p) - wp2) / thermal;
        assert!((ratio - 1.0).abs() < 1e-12, "{ratio}");
    }
}
