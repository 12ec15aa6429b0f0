//! One function per subcommand: resolved settings in, CSV files out.

use qfluid::dispersion::{sweep_wavenumbers, Relation, Spacing};
use qfluid::fluid1d::{DerivativeScheme, FieldMask, Fluid1D, InitialCondition, RunOptions, SolverConfig};
use qfluid::linear_response::{anisotropic_dyad, delta_p_along};
use qfluid::moments::{compute_moments_with, load_distribution_csv, MomentOptions};
use qfluid::traveling::{equilibrium_eigenvalues, integrate, stability_threshold, TravelingState, WaveFrameConfig};
use qfluid::wigner_free::{
    evolve_free_gaussian, linspace, wigner_of_packet, wigner_transform, GaussianPacket, GridSpec,
};

use crate::output::{num, sibling, Csv};
use crate::settings::{CliError, CliResult, Cmd, Settings};

pub fn dispatch(s: &Settings, out: &str) -> CliResult<()> {
    match s.cmd {
        Cmd::Dispersion => dispersion(s, out),
        Cmd::Response => response(s, out),
        Cmd::Fluid => fluid(s, out),
        Cmd::TwRun => tw_run(s, out),
        Cmd::TwStability => tw_stability(s, out),
        Cmd::TwThreshold => tw_threshold(s, out),
        Cmd::Wigner => wigner(s, out),
        Cmd::Moments => moments(s, out),
    }
}

fn spacing(s: &Settings) -> CliResult<Spacing> {
    match s.str("spacing") {
        "uniform" => Ok(Spacing::Uniform),
        "log" => Ok(Spacing::Log),
        other => Err(CliError::key("spacing", format!("`{other}` is not uniform or log"))),
    }
}

fn wavenumbers(s: &Settings) -> CliResult<Vec<f64>> {
    Ok(sweep_wavenumbers(
        s.f64("kmin")?,
        s.f64("kmax")?,
        s.usize("n")?,
        spacing(s)?,
    )?)
}

fn relation(s: &Settings) -> CliResult<Relation> {
    s.str("relation")
        .parse()
        .map_err(|e: qfluid::Error| CliError::key("relation", e))
}

fn dispersion(s: &Settings, out: &str) -> CliResult<()> {
    let params = s.params()?;
    let ks = wavenumbers(s)?;
    let csv = if s.str("relation") == "all" {
        let mut cols = vec!["k"];
        cols.extend(Relation::ALL.iter().map(|r| r.tag()));
        let mut csv = Csv::new(&s.header(), &cols);
        for &k in &ks {
            let mut row = vec![k];
            row.extend(Relation::ALL.iter().map(|r| r.omega_sq(k, &params)));
            csv.nums(&row);
        }
        csv
    } else {
        let rel = relation(s)?;
        let mut csv = Csv::new(&s.header(), &["k", "omega_sq", "omega", "relation"]);
        for &k in &ks {
            let w2 = rel.omega_sq(k, &params);
            csv.row(&[num(k), num(w2), num(w2.sqrt()), rel.tag().to_string()]);
        }
        csv
    };
    csv.write_to(out)
}

fn response(s: &Settings, out: &str) -> CliResult<()> {
    let params = s.params()?;
    let rel = relation(s)?;
    let dphi = s.f64("dphi")?;
    let dir = s.f64_list("direction")?;
    if dir.len() != 3 {
        return Err(CliError::key("direction", "needs three components"));
    }
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(CliError::key("direction", "must be nonzero"));
    }
    let p0 = anisotropic_dyad(params.n0, params.t0_perp, params.t0_par, &params)?;
    let mut csv = Csv::new(
        &s.header(),
        &["k", "omega_sq", "dP_xx", "dP_yy", "dP_zz", "dP_xy", "dP_xz", "dP_yz"],
    );
    for k in wavenumbers(s)? {
        let w2 = rel.omega_sq(k, &params);
        let kv = [k * dir[0] / norm, k * dir[1] / norm, k * dir[2] / norm];
        let d = delta_p_along(kv, w2, dphi, &p0, &params)?;
        csv.nums(&[k, w2, d[0][0], d[1][1], d[2][2], d[0][1], d[0][2], d[1][2]]);
    }
    csv.write_to(out)
}

fn fluid(s: &Settings, out: &str) -> CliResult<()> {
    let params = s.params()?;
    let scheme = match s.str("scheme") {
        "spectral" => DerivativeScheme::Spectral,
        "fd6" => DerivativeScheme::FiniteDifference6,
        other => return Err(CliError::key("scheme", format!("`{other}` is not spectral or fd6"))),
    };
    let mode_cutoff = match s.str("cutoff") {
        "none" => None,
        _ => Some(s.usize("cutoff")?),
    };
    let config = SolverConfig {
        scheme,
        dealias: s.bool("dealias")?,
        mode_cutoff,
        ..SolverConfig::default()
    };
    let mode = s.usize("mode")?;
    let amplitude = s.f64("amplitude")?;
    let ic = match s.str("ic") {
        "equilibrium" => InitialCondition::Equilibrium,
        "eigenmode" => InitialCondition::Eigenmode { mode, amplitude },
        "perturb" => {
            let mut fields = FieldMask::default();
            for f in s.str("fields").split(',') {
                match f.trim() {
                    "n" => fields.n = true,
                    "u" => fields.u = true,
                    "p" => fields.p = true,
                    "q" | "Q" => fields.q = true,
                    other => return Err(CliError::key("fields", format!("unknown field `{other}`"))),
                }
            }
            InitialCondition::Perturb {
                mode,
                amplitude,
                fields,
            }
        }
        other => {
            return Err(CliError::key(
                "ic",
                format!("`{other}` is not equilibrium, eigenmode or perturb"),
            ))
        }
    };
    let dt = match s.str("dt") {
        "auto" => None,
        _ => Some(s.f64("dt")?),
    };
    let snapshot_every = s.usize("snapshot_every")?;
    if snapshot_every > 0 && out == "-" {
        return Err(CliError::key("snapshot_every", "snapshots need an output file (--out)"));
    }
    let solver = Fluid1D::new(params, s.usize("points")?, s.f64("length")?, config)?;
    let state = solver.initial_state(&ic)?;
    let run = solver.run(
        state,
        &RunOptions {
            t_end: s.f64("t_end")?,
            dt,
            probe_index: s.usize("probe")?,
            probe_every: s.usize("probe_every")?,
            snapshot_every,
        },
    )?;

    let mut csv = Csv::new(&s.header(), &["t", "n", "u", "p", "Q", "phi", "mass", "momentum"]);
    for p in &run.probes {
        csv.nums(&[p.t, p.n, p.u, p.p, p.q, p.phi, p.mass, p.momentum]);
    }
    if snapshot_every > 0 {
        let mut snaps = Csv::new(&s.header(), &["t", "x", "n", "u", "p", "Q", "phi"]);
        for st in &run.snapshots {
            for i in 0..st.len() {
                snaps.nums(&[st.t, solver.x(i), st.n[i], st.u[i], st.p[i], st.q[i], st.phi[i]]);
            }
        }
        snaps.write_to(&sibling(out, "snapshots"))?;
    }
    csv.write_to(out)
}

fn tw_run(s: &Settings, out: &str) -> CliResult<()> {
    let cfg = WaveFrameConfig::nondimensional(s.f64("H")?, s.f64("p0")?)?;
    let initial = TravelingState {
        xi: 0.0,
        u: s.f64("u")?,
        p: s.f64("p")?,
        q: s.f64("q")?,
        phi: s.f64("phi")?,
        psi: s.f64("psi")?,
    };
    let traj = integrate(&initial, &cfg, s.f64("xi_max")?, s.usize("samples")?, s.f64("tol")?)?;
    let mut csv = Csv::new(&s.header(), &["xi", "n", "u", "p", "Q", "phi", "E"]);
    for st in &traj.states {
        csv.nums(&[st.xi, st.density(&cfg), st.u, st.p, st.q, st.phi, st.electric_field()]);
    }
    // Keep the samples reached before a singularity, then report it.
    csv.write_to(out)?;
    match traj.halt {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn tw_stability(s: &Settings, out: &str) -> CliResult<()> {
    let p0 = s.f64("p0")?;
    let hs = sweep_wavenumbers(s.f64("hmin")?, s.f64("hmax")?, s.usize("n")?, Spacing::Uniform)
        .map_err(|e| CliError::key("hmin/hmax/n", e))?;
    let mut cols = vec!["H".to_string(), "max_real".into(), "stability".into()];
    for i in 1..=5 {
        cols.push(format!("re_{i}"));
        cols.push(format!("im_{i}"));
    }
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&s.header(), &col_refs);
    for h in hs {
        let cfg = WaveFrameConfig::nondimensional(h, p0)?;
        let mut row = vec![num(h)];
        match equilibrium_eigenvalues(&cfg) {
            Ok(a) => {
                row.push(num(a.max_real));
                row.push(a.stability.name().to_string());
                for ev in &a.eigenvalues {
                    row.push(num(ev.re));
                    row.push(num(ev.im));
                }
            }
            // The linearization is singular where the equilibrium is sonic.
            Err(qfluid::Error::SonicSingularity { .. }) => {
                row.push(num(f64::NAN));
                row.push("singular".into());
                row.extend(std::iter::repeat_n(num(f64::NAN), 10));
            }
            Err(e) => return Err(e.into()),
        }
        csv.row(&row);
    }
    csv.write_to(out)
}

fn tw_threshold(s: &Settings, out: &str) -> CliResult<()> {
    let p0 = s.f64("p0")?;
    let h = stability_threshold(
        |h| WaveFrameConfig::nondimensional(h, p0),
        s.f64("lo")?,
        s.f64("hi")?,
        s.f64("tol")?,
    )?;
    let mut csv = Csv::new(&s.header(), &["H_crit"]);
    csv.nums(&[h]);
    csv.write_to(out)
}

fn wigner(s: &Settings, out: &str) -> CliResult<()> {
    let packet = GaussianPacket::new(s.f64("sigma")?, s.f64("hbar")?, s.f64("m")?)?;
    let scheme = packet.scheme();
    let tbars = s.f64_list("tbar")?;
    if tbars.len() > 1 && out == "-" {
        return Err(CliError::key("tbar", "several times need an output prefix (--out)"));
    }
    let (xmin, xmax, nx) = (s.f64("xmin")?, s.f64("xmax")?, s.usize("nx")?);
    let (vmin, vmax, nv) = (s.f64("vmin")?, s.f64("vmax")?, s.usize("nv")?);
    if nx < 2 || nv < 1 || !(xmin < xmax) || !(vmin <= vmax) {
        return Err(CliError::key(
            "xmin/xmax/nx/vmin/vmax/nv",
            "need xmin < xmax, nx >= 2, vmin <= vmax, nv >= 1",
        ));
    }
    let x: Vec<f64> = linspace(xmin, xmax, nx)
        .iter()
        .map(|x| x * scheme.length_scale)
        .collect();
    let v: Vec<f64> = linspace(vmin, vmax, nv)
        .iter()
        .map(|v| v * scheme.velocity_scale)
        .collect();
    for &tb in &tbars {
        if !(tb >= 0.0) {
            return Err(CliError::key("tbar", "times must be >= 0"));
        }
        let t = tb * scheme.time_scale;
        let table = match s.str("method") {
            "analytic" => wigner_of_packet(&packet, t, &x, &v)?,
            "grid" => {
                if xmin != -xmax {
                    return Err(CliError::key("xmin", "the grid method needs a symmetric x range"));
                }
                let spacing = (xmax - xmin) / (nx - 1) as f64;
                let psi = evolve_free_gaussian(&packet, t, GridSpec::for_packet(tb, spacing, xmax))?;
                wigner_transform(&psi, &v, (x[0], x[nx - 1]))?
            }
            other => return Err(CliError::key("method", format!("`{other}` is not analytic or grid"))),
        };
        let mut single = s.clone();
        single.map.insert("tbar".into(), format!("{tb}"));
        let mut csv = Csv::new(&single.header(), &["x_bar", "v_bar", "f_bar"]);
        for (xb, vb, fb) in table.rescaled(&packet) {
            csv.nums(&[xb, vb, fb]);
        }
        let dest = if tbars.len() == 1 {
            out.to_string()
        } else {
            sibling(out, &format!("tbar{tb}"))
        };
        csv.write_to(&dest)?;
    }
    Ok(())
}

fn moments(s: &Settings, out: &str) -> CliResult<()> {
    let input = s.str("input");
    if input.is_empty() {
        return Err(CliError::key("input", "a distribution CSV is required"));
    }
    let file = std::fs::File::open(input).map_err(|e| CliError::Io(format!("{input}: {e}")))?;
    let (grid, f) = load_distribution_csv(std::io::BufReader::new(file))?;
    let opts = MomentOptions {
        boundary_threshold: s.f64("boundary_threshold")?,
    };
    let m = compute_moments_with(&f, &grid, s.f64("mass")?, &opts)?;
    if m.boundary_decay_violated {
        eprintln!("warning: distribution does not decay toward the velocity-grid boundary");
    }
    let mut csv = Csv::new(&s.header(), &["component", "value"]);
    for (name, value) in m.components() {
        csv.row(&[name, num(value)]);
    }
    csv.write_to(out)
}
