use std::f64::consts::PI;

use qfluid::dispersion::eq14_omega_sq;
use qfluid::fluid1d::{
    linear_growth_rate, measure_frequency, DerivativeScheme, FieldMask, Fluid1D, FluidState1D, InitialCondition,
    RunOptions, SolverConfig,
};
use qfluid::PlasmaParams;

fn single_mode_solver(k: f64, params: PlasmaParams, points: usize, scheme: DerivativeScheme) -> Fluid1D {
    let cfg = SolverConfig {
        scheme,
        mode_cutoff: Some(1),
        ..SolverConfig::default()
    };
    Fluid1D::new(params, points, 2.0 * PI / k, cfg).unwrap()
}

fn run_eigenmode(solver: &Fluid1D, periods: f64, steps_per_period: f64) -> (Vec<f64>, f64) {
    let k = solver.wavenumber(1);
    let w = eq14_omega_sq(k, solver.params()).sqrt();
    let ic = solver
        .initial_state(&InitialCondition::Eigenmode {
            mode: 1,
            amplitude: 1e-6,
        })
        .unwrap();
    let period = 2.0 * PI / w;
    let out = solver
        .run(
            ic,
            &RunOptions {
                t_end: periods * period,
                dt: Some(period / steps_per_period),
                probe_index: 0,
                probe_every: 1,
                snapshot_every: 0,
            },
        )
        .unwrap();
    (out.probes.iter().map(|s| s.n).collect(), out.dt)
}

#[test]
fn frequency_matches_dispersion_relation_spectral_and_fd() {
    for scheme in [DerivativeScheme::Spectral, DerivativeScheme::FiniteDifference6] {
        for (k, hbar, t) in [(0.5, 0.2, 0.05), (0.6, 1.0, 0.002)] {
            let prm = PlasmaParams::nondimensional(hbar, t, 0.0);
            let solver = single_mode_solver(k, prm, 128, scheme);
            let (series, dt) = run_eigenmode(&solver, 10.0, 200.0);
            let w = eq14_omega_sq(k, &prm).sqrt();
            let excess = eq14_omega_sq(k, &prm) - 1.0;
            let wm = measure_frequency(&series, dt).unwrap();
            assert!(
                ((wm * wm - 1.0) / excess - 1.0).abs() < 2e-3,
                "{scheme:?} k={k}: {wm} vs {w}"
            );
        }
    }
}

#[test]
fn eigenmode_amplitude_does_not_drift() {
    let prm = PlasmaParams::nondimensional(0.8, 0.02, 0.0);
    let solver = single_mode_solver(0.7, prm, 64, DerivativeScheme::Spectral);
    let (series, _) = run_eigenmode(&solver, 12.0, 100.0);
    let dev: Vec<f64> = series.iter().map(|n| n - 1.0).collect();
    let third = dev.len() / 3;
    let early = dev[..third].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let late = dev[2 * third..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((late / early - 1.0).abs() < 1e-3, "{early} {late}");
}

#[test]
fn rk4_converges_at_fourth_order() {
    let prm = PlasmaParams::nondimensional(0.5, 0.05, 0.0);
    let k = 0.8;
    let solver = single_mode_solver(k, prm, 32, DerivativeScheme::Spectral);
    let ic = solver
        .initial_state(&InitialCondition::Perturb {
            mode: 1,
            amplitude: 1e-3,
            fields: FieldMask {
                n: true,
                u: true,
                p: false,
                q: false,
            },
        })
        .unwrap();
    let run = |dt: f64| -> FluidState1D {
        solver
            .run(
                ic.clone(),
                &RunOptions {
                    t_end: 4.0,
                    dt: Some(dt),
                    probe_index: 0,
                    probe_every: 1000,
                    snapshot_every: 0,
                },
            )
            .unwrap()
            .final_state
    };
    let a = run(0.2);
    let b = run(0.1);
    let c = run(0.05);
    let diff = |x: &FluidState1D, y: &FluidState1D| -> f64 {
        x.n.iter().zip(&y.n).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    };
    let ratio = diff(&a, &b) / diff(&b, &c);
    assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
}

#[test]
fn mass_and_momentum_are_conserved() {
    let prm = PlasmaParams::nondimensional(0.4, 0.05, 0.0);
    let cfg = SolverConfig {
        mode_cutoff: Some(4),
        ..SolverConfig::default()
    };
    let solver = Fluid1D::new(prm, 64, 2.0 * PI, cfg).unwrap();
    let ic = solver
        .initial_state(&InitialCondition::Perturb {
            mode: 1,
            amplitude: 1e-2,
            fields: FieldMask {
                n: true,
                u: true,
                p: true,
                q: false,
            },
        })
        .unwrap();
    let out = solver
        .run(
            ic,
            &RunOptions {
                t_end: 5.0,
                dt: None,
                probe_index: 0,
                probe_every: 1,
                snapshot_every: 0,
            },
        )
        .unwrap();
    let m0 = out.probes[0].mass;
    let p0 = out.probes[0].momentum;
    for s in &out.probes {
        assert!((s.mass / m0 - 1.0).abs() < 1e-12);
        // The velocity equation is advective, so momentum only holds to the
        // truncation level of the retained modes.
        assert!((s.momentum / p0 - 1.0).abs() < 1e-6, "{} {}", s.momentum, p0);
    }
}

#[test]
fn unstable_root_grows_at_predicted_rate() {
    let prm = PlasmaParams::nondimensional(1.0, 0.1, 0.0);
    let k = 1.0;
    let gamma = linear_growth_rate(k, &prm);
    let solver = single_mode_solver(k, prm, 32, DerivativeScheme::Spectral);
    let ic = solver
        .initial_state(&InitialCondition::Perturb {
            mode: 1,
            amplitude: 1e-9,
            fields: FieldMask {
                n: true,
                u: false,
                p: false,
                q: false,
            },
        })
        .unwrap();
    let out = solver
        .run(
            ic,
            &RunOptions {
                t_end: 24.0,
                dt: Some(0.01),
                probe_index: 0,
                probe_every: 100,
                snapshot_every: 0,
            },
        )
        .unwrap();
    let at = |t: f64| {
        let s = out.probes.iter().find(|s| (s.t - t).abs() < 1e-9).unwrap();
        (s.n - 1.0).abs()
    };
    let measured = (at(24.0) / at(16.0)).ln() / 8.0;
    assert!((measured / gamma - 1.0).abs() < 1e-2, "{measured} vs {gamma}");
}
