use qfluid::moments::{compute_moments, Axis, VelocityGrid};
use qfluid::wigner_free::{
    analytic_wigner, evolve_free_gaussian, linspace, packet_moments, wigner_of_packet, wigner_of_packet_at,
    wigner_transform, GaussianPacket, GridSpec, RescaledPhasePoint,
};

const TIMES: [f64; 4] = [0.0, 2.0, 4.0, 6.0];

fn max_error_vs_closed_form(table: &[(f64, f64, f64)], t_bar: f64) -> f64 {
    table
        .iter()
        .map(|&(x_bar, v_bar, f)| (f - analytic_wigner(RescaledPhasePoint { x_bar, v_bar, t_bar })).abs())
        .fold(0.0, f64::max)
}

#[test]
fn both_paths_match_closed_form_on_default_grid() {
    // Non-unit constants exercise the rescaling.
    let p = GaussianPacket::new(2.0e-9, 1.054_571_817e-34, 9.109_383_7e-31).unwrap();
    let s = p.scheme();
    let x: Vec<f64> = linspace(-12.0, 12.0, 256).iter().map(|x| x * s.length_scale).collect();
    let v: Vec<f64> = linspace(-4.0, 4.0, 256).iter().map(|v| v * s.velocity_scale).collect();
    for tb in TIMES {
        let t = tb * s.time_scale;
        let direct = wigner_of_packet(&p, t, &x, &v).unwrap();
        assert!(
            max_error_vs_closed_form(&direct.rescaled(&p), tb) < 1e-6,
            "closed-form path, t̄ = {tb}"
        );

        let psi = evolve_free_gaussian(&p, t, GridSpec::for_packet(tb, 24.0 / 255.0, 12.0)).unwrap();
        let grid = wigner_transform(&psi, &v, (x[0], x[255])).unwrap();
        assert_eq!(grid.x.len(), 256);
        assert!(
            max_error_vs_closed_form(&grid.rescaled(&p), tb) < 1e-6,
            "grid path, t̄ = {tb}"
        );
    }
}

#[test]
fn numerical_data_obey_shear_transport() {
    let p = GaussianPacket::unit();
    let x = linspace(-12.0, 12.0, 64);
    let v = linspace(-4.0, 4.0, 64);
    for tb in [2.0, 4.0, 6.0] {
        let now = wigner_of_packet(&p, tb, &x, &v).unwrap();
        let points: Vec<(f64, f64)> = x
            .iter()
            .flat_map(|&xi| v.iter().map(move |&vi| (xi - vi * tb, vi)))
            .collect();
        let then = wigner_of_packet_at(&p, 0.0, &points).unwrap();
        let worst = now.f.iter().zip(&then).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst * p.f_scale() < 1e-6, "t̄ = {tb}: {worst}");
    }
}

#[test]
fn marginals() {
    let p = GaussianPacket::unit();
    let v = linspace(-9.0, 9.0, 721);
    let dv = v[1] - v[0];
    let mut velocity_marginal: Option<Vec<f64>> = None;
    for tb in TIMES {
        let psi = evolve_free_gaussian(&p, tb, GridSpec::for_packet(tb, 0.1, 12.0)).unwrap();
        let table = wigner_transform(&psi, &v, (-6.0, 6.0)).unwrap();
        for (ix, &x) in table.x.iter().enumerate() {
            let density: f64 = table.row(ix).iter().sum::<f64>() * dv;
            assert!((density - p.psi(x, tb).norm_sqr()).abs() < 1e-8, "t̄ = {tb}, x = {x}");
        }
        // Velocity marginal from the full-width table.
        let full = wigner_transform(&psi, &v, (psi.x0, -psi.x0)).unwrap();
        let marginal: Vec<f64> = (0..v.len())
            .map(|iv| (0..full.x.len()).map(|ix| full.at(ix, iv)).sum::<f64>() * psi.dx)
            .collect();
        match &velocity_marginal {
            None => velocity_marginal = Some(marginal),
            Some(first) => {
                let worst = first
                    .iter()
                    .zip(&marginal)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(worst < 1e-8, "t̄ = {tb}: {worst}");
            }
        }
    }
}

#[test]
fn tabulated_wigner_moments_match_packet() {
    let p = GaussianPacket::new(0.8, 1.0, 1.5).unwrap();
    let s = p.scheme();
    let x: Vec<f64> = linspace(-12.0, 12.0, 97).iter().map(|x| x * s.length_scale).collect();
    let v: Vec<f64> = linspace(-4.0, 4.0, 256).iter().map(|v| v * s.velocity_scale).collect();
    let grid = VelocityGrid::new(vec![Axis::from_nodes(v.clone()).unwrap()]).unwrap();
    for tb in TIMES {
        let t = tb * s.time_scale;
        let table = wigner_of_packet(&p, t, &x, &v).unwrap();
        for (ix, &xi) in x.iter().enumerate() {
            let (n, u, pr) = packet_moments(&p, xi, t);
            // Skip positions whose local velocity spread is cut by the
            // velocity grid: mean ±6 thermal widths must fit in |v̄| <= 4.
            let width = (2.0 * (1.0 + tb * tb)).sqrt().recip();
            if (u / s.velocity_scale).abs() + 6.0 * width > 4.0 {
                continue;
            }
            let m = compute_moments(table.row(ix), &grid, p.m).unwrap();
            assert!((m.n / n - 1.0).abs() < 1e-6, "n at t̄ = {tb}, x = {xi}");
            assert!((m.u[0] - u).abs() < 1e-6 * s.velocity_scale, "u at t̄ = {tb}, x = {xi}");
            assert!(
                (m.P(0, 0) / pr - 1.0).abs() < 1e-6,
                "p at t̄ = {tb}, x = {xi}: {:e}",
                m.P(0, 0) / pr - 1.0
            );
        }
    }
}
