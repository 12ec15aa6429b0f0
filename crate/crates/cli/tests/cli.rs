use std::path::Path;
use std::process::{Command, Output};

fn qfluid(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfluid"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = qfluid(args, dir);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV: skips the config comment and the column line.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    rows(text).iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn dispersion_sweep_starts_at_plasma_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "dispersion",
            "--relation",
            "eq14",
            "--kmin",
            "0",
            "--kmax",
            "2",
            "--n",
            "101",
            "--preset",
            "nondim",
        ],
        dir.path(),
    );
    assert!(text.starts_with("# config: "));
    assert_eq!(text.lines().nth(1).unwrap(), "k,omega_sq,omega,relation");
    let r = rows(&text);
    assert_eq!(r.len(), 101);
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r[0][3], "eq14");
}

#[test]
fn comparison_mode_has_all_relations() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["dispersion", "--relation", "all", "--n", "5"], dir.path());
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "k,eq14,quantum_langmuir,bohm_gross,adiabatic_gamma,temperature_closure"
    );
    for r in rows(&text).iter().skip(1) {
        let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
        // The generalized relation lies below its long-wavelength expansion.
        assert!(v[1] < v[2]);
    }
}

#[test]
fn eq14_sweep_preset_is_log_spaced() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["dispersion", "--eq14-sweep"], dir.path());
    let k = column(&text, "k");
    assert_eq!(k.len(), 61);
    assert_eq!((k[0], k[60]), (1e-3, 1.0));
    assert!(text.lines().next().unwrap().contains(r#""T0_par":"1e-3""#));
}

#[test]
fn rerun_reproduces_files_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &[
            "dispersion",
            "--preset",
            "si-electron",
            "--kmin",
            "1e6",
            "--kmax",
            "1e9",
            "--spacing",
            "log",
            "-o",
            "a.csv",
        ],
        &["response", "--hbar", "0.5", "--direction", "1,0,1", "-o", "a.csv"],
        &["fluid", "--points", "32", "--t-end", "2", "-o", "a.csv"],
        &["tw", "run", "--H", "0.5", "--xi-max", "20", "-o", "a.csv"],
        &["tw", "stability", "--n", "5", "-o", "a.csv"],
        &["wigner", "--tbar", "2", "--nx", "16", "--nv", "16", "-o", "a.csv"],
    ];
    for args in cases {
        ok(args, dir.path());
        ok(&["rerun", "a.csv", "-o", "b.csv"], dir.path());
        let a = std::fs::read(dir.path().join("a.csv")).unwrap();
        let b = std::fs::read(dir.path().join("b.csv")).unwrap();
        assert_eq!(a, b, "{args:?}");
        // Identical configuration, identical bytes.
        ok(args, dir.path());
        assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), b, "{args:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "kmax = 3\nn = 4\nhbar = 0.25\n").unwrap();
    let text = ok(&["dispersion", "--config", "run.cfg", "--n", "6"], dir.path());
    let k = column(&text, "k");
    assert_eq!(k.len(), 6);
    assert_eq!(k[5], 3.0);
    assert!(text.lines().next().unwrap().contains(r#""hbar":"2.5e-1""#));
}

#[test]
fn fluid_run_conserves_mass_and_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "fluid",
            "--points",
            "64",
            "--t-end",
            "3",
            "--ic",
            "perturb",
            "--fields",
            "n,u",
            "--amplitude",
            "1e-3",
            "--cutoff",
            "4",
            "--snapshot-every",
            "50",
            "-o",
            "run.csv",
        ],
        dir.path(),
    );
    let text = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let mass = column(&text, "mass");
    assert!(mass.iter().all(|m| (m / mass[0] - 1.0).abs() < 1e-12));
    let snaps = std::fs::read_to_string(dir.path().join("run_snapshots.csv")).unwrap();
    assert_eq!(rows(&snaps).len() % 64, 0);
}

#[test]
fn traveling_wave_figure_run_stays_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["tw", "run", "--H", "1", "--fig23-ic"], dir.path());
    let n = column(&text, "n");
    assert_eq!(n[0], 2.0 / 3.0);
    assert!(n.iter().all(|v| v.is_finite() && *v > 0.0 && *v < 10.0));
    let maxima = (1..n.len() - 1)
        .filter(|&i| n[i] > n[i - 1] && n[i] >= n[i + 1])
        .count();
    assert!(maxima >= 5, "{maxima}");
}

#[test]
fn threshold_and_its_failure_code() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["tw", "threshold"], dir.path());
    let h = column(&text, "H_crit")[0];
    assert!((h - 2.0).abs() < 1e-6);
    let out = qfluid(&["tw", "threshold", "--lo", "0.1", "--hi", "1.9"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn wigner_times_produce_one_file_each() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["wigner", "--tbar", "0,2,4,6", "--nx", "24", "--nv", "20", "-o", "fig1"],
        dir.path(),
    );
    for tb in [0, 2, 4, 6] {
        let text = std::fs::read_to_string(dir.path().join(format!("fig1_tbar{tb}.csv"))).unwrap();
        assert!(text.lines().next().unwrap().contains(&format!(r#""tbar":"{tb}""#)));
        for r in rows(&text) {
            let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
            let exact = (-(v[0] - v[1] * tb as f64).powi(2) - v[1] * v[1]).exp();
            assert!((v[2] - exact).abs() < 1e-6);
        }
    }
}

#[test]
fn wigner_grid_method_matches_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let a = ok(&["wigner", "--tbar", "4", "--nx", "41", "--nv", "33"], dir.path());
    let g = ok(
        &["wigner", "--tbar", "4", "--nx", "41", "--nv", "33", "--method", "grid"],
        dir.path(),
    );
    let (fa, fg) = (column(&a, "f_bar"), column(&g, "f_bar"));
    assert_eq!(fa.len(), fg.len());
    assert!(fa.iter().zip(&fg).all(|(x, y)| (x - y).abs() < 1e-6));
}

#[test]
fn moments_of_tabulated_maxwellian() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("v,f\n");
    for i in 0..201 {
        let v = -10.0 + 0.1 * i as f64;
        let f = 2.0 * (-(v - 0.5) * (v - 0.5) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        csv.push_str(&format!("{v},{f}\n"));
    }
    std::fs::write(dir.path().join("f.csv"), csv).unwrap();
    let text = ok(&["moments", "--input", "f.csv", "--mass", "1"], dir.path());
    let value = |name: &str| -> f64 {
        rows(&text)
            .iter()
            .find(|r| r[0] == name)
            .unwrap_or_else(|| panic!("{name}"))[1]
            .parse()
            .unwrap()
    };
    assert!((value("n") - 2.0).abs() < 1e-10);
    assert!((value("u_x") - 0.5).abs() < 1e-10);
    assert!((value("P_xx") - 2.0).abs() < 1e-9);
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = qfluid(&["dispersion", "--set", "bogus=1"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("bogus"));
    let bad = qfluid(&["dispersion", "--kmax", "two"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("kmax"));
    let io = qfluid(&["dispersion", "-o", "missing/dir/x.csv"], dir.path());
    assert_eq!(io.status.code(), Some(4));
    let cfl = qfluid(&["fluid", "--points", "32", "--dt", "10", "--t-end", "20"], dir.path());
    assert_eq!(cfl.status.code(), Some(3));
    let no_input = qfluid(&["moments"], dir.path());
    assert_eq!(no_input.status.code(), Some(2));
}
