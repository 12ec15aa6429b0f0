//! `qfluid`: command-line front end for the quantum fluid library.
//!
//! Every subcommand writes a CSV whose first line is a `# config:` JSON
//! record of the resolved settings; `qfluid rerun FILE` repeats the run.
//! Settings are merged as defaults < figure preset < `--config` file <
//! `--set` < dedicated flags.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use settings::{CliError, CliResult, Cmd, Settings, Sources};

#[derive(Parser)]
#[command(
    name = "qfluid",
    version,
    about = "Quantum fluid moment hierarchy: dispersion, response, fluid runs, traveling waves, Wigner evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dispersion relation sweep (`--relation all` compares all five).
    Dispersion(DispersionArgs),
    /// First-order pressure response over a k sweep.
    Response(ResponseArgs),
    /// Periodic 1D fluid-Poisson time run.
    Fluid(FluidArgs),
    /// Traveling-wave calculations.
    #[command(subcommand)]
    Tw(TwCommand),
    /// Wigner function of the free Gaussian packet at given times.
    Wigner(WignerArgs),
    /// Moments of a tabulated distribution.
    Moments(MomentsArgs),
    /// Re-run the configuration recorded in an output file.
    Rerun(RerunArgs),
}

#[derive(Subcommand)]
enum TwCommand {
    /// Integrate the wave-frame system; emits the xi series.
    Run(TwRunArgs),
    /// Equilibrium eigenvalues over an H range.
    Stability(TwStabilityArgs),
    /// Bisect for the critical H.
    Threshold(TwThresholdArgs),
}

#[derive(Args)]
struct Common {
    /// key = value file, applied before flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file (`-` for stdout).
    #[arg(short, long, value_name = "FILE", default_value = "-")]
    out: String,
    /// Set any key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct ParamArgs {
    /// nondim or si-electron.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n0: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    e: Option<String>,
    #[arg(long)]
    eps0: Option<String>,
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long = "T0-par")]
    t0_par: Option<String>,
    #[arg(long = "T0-perp")]
    t0_perp: Option<String>,
    #[arg(long = "kB")]
    kb: Option<String>,
}

impl ParamArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("preset", self.preset.clone()),
            ("n0", self.n0.clone()),
            ("m", self.m.clone()),
            ("e", self.e.clone()),
            ("eps0", self.eps0.clone()),
            ("hbar", self.hbar.clone()),
            ("T0_par", self.t0_par.clone()),
            ("T0_perp", self.t0_perp.clone()),
            ("kB", self.kb.clone()),
        ]
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    kmin: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
    /// Number of wavenumbers.
    #[arg(long)]
    n: Option<String>,
    /// uniform or log.
    #[arg(long)]
    spacing: Option<String>,
    /// eq14, quantum_langmuir, bohm_gross, adiabatic_gamma[:γ], temperature_closure.
    #[arg(long)]
    relation: Option<String>,
}

impl SweepArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("kmin", self.kmin.clone()),
            ("kmax", self.kmax.clone()),
            ("n", self.n.clone()),
            ("spacing", self.spacing.clone()),
            ("relation", self.relation.clone()),
        ]
    }
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Log sweep of the generalized relation in its weak-temperature limit.
    #[arg(long)]
    eq14_sweep: bool,
}

#[derive(Args)]
struct ResponseArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Potential perturbation amplitude.
    #[arg(long)]
    dphi: Option<String>,
    /// Propagation direction `x,y,z`.
    #[arg(long)]
    direction: Option<String>,
}

#[derive(Args)]
struct FluidArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    points: Option<String>,
    /// Domain length.
    #[arg(long)]
    length: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    /// Time step or `auto`.
    #[arg(long)]
    dt: Option<String>,
    /// equilibrium, eigenmode or perturb.
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    /// Perturbed fields for `--ic perturb`, e.g. `n,u`.
    #[arg(long)]
    fields: Option<String>,
    /// spectral or fd6.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    dealias: Option<String>,
    /// Highest retained mode, or `none`.
    #[arg(long)]
    cutoff: Option<String>,
    /// Probe grid index.
    #[arg(long)]
    probe: Option<String>,
    #[arg(long)]
    probe_every: Option<String>,
    /// Snapshot cadence in steps; writes `<out>_snapshots.csv`.
    #[arg(long)]
    snapshot_every: Option<String>,
}

#[derive(Args)]
struct TwRunArgs {
    #[command(flatten)]
    common: Common,
    /// Quantum parameter.
    #[arg(long = "H")]
    h: Option<String>,
    /// Equilibrium pressure in units of m n0 u0^2.
    #[arg(long)]
    p0: Option<String>,
    /// Initial u - v in units of u0.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    /// Initial phi'.
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    xi_max: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Reference initial data: n(0) = 2n0/3, p(0) = m n0 u0^2, H = 1.
    #[arg(long)]
    fig23_ic: bool,
}

#[derive(Args)]
struct TwStabilityArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    p0: Option<String>,
    #[arg(long)]
    hmin: Option<String>,
    #[arg(long)]
    hmax: Option<String>,
    /// Number of H values.
    #[arg(long)]
    n: Option<String>,
}

#[derive(Args)]
struct TwThresholdArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    p0: Option<String>,
    #[arg(long)]
    lo: Option<String>,
    #[arg(long)]
    hi: Option<String>,
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated rescaled times.
    #[arg(long)]
    tbar: Option<String>,
    #[arg(long)]
    xmin: Option<String>,
    #[arg(long)]
    xmax: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    vmin: Option<String>,
    #[arg(long)]
    vmax: Option<String>,
    #[arg(long)]
    nv: Option<String>,
    /// analytic or grid.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Times 0, 2, 4, 6 on the default grid.
    #[arg(long)]
    fig1: bool,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    common: Common,
    /// Distribution CSV: `v,f` or `vx,vy,vz,f`.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    mass: Option<String>,
    #[arg(long)]
    boundary_threshold: Option<String>,
}

#[derive(Args)]
struct RerunArgs {
    /// A CSV written by this tool.
    file: PathBuf,
    /// Output file (`-` for stdout).
    #[arg(short, long, value_name = "FILE", default_value = "-")]
    out: String,
}

fn run_with(
    cmd: Cmd,
    common: &Common,
    figure: Option<&str>,
    flags: Vec<(&'static str, Option<String>)>,
) -> CliResult<()> {
    let settings = Settings::resolve(
        cmd,
        Sources {
            figure,
            config_file: common.config.as_deref(),
            set: common.set.clone(),
            flags,
            ..Sources::default()
        },
    )?;
    commands::dispatch(&settings, &common.out)
}

fn rerun(args: &RerunArgs) -> CliResult<()> {
    let text =
        std::fs::read_to_string(&args.file).map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
    let first = text.lines().next().unwrap_or("");
    let (cmd, pairs) = Settings::from_header(first)?;
    let settings = Settings::resolve(
        cmd,
        Sources {
            config_pairs: pairs,
            ..Sources::default()
        },
    )?;
    commands::dispatch(&settings, &args.out)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Dispersion(a) => {
            let mut flags = a.params.pairs();
            flags.extend(a.sweep.pairs());
            run_with(Cmd::Dispersion, &a.common, a.eq14_sweep.then_some("eq14-sweep"), flags)
        }
        Command::Response(a) => {
            let mut flags = a.params.pairs();
            flags.extend(a.sweep.pairs());
            flags.extend([("dphi", a.dphi), ("direction", a.direction)]);
            run_with(Cmd::Response, &a.common, None, flags)
        }
        Command::Fluid(a) => {
            let mut flags = a.params.pairs();
            flags.extend([
                ("points", a.points),
                ("length", a.length),
                ("t_end", a.t_end),
                ("dt", a.dt),
                ("ic", a.ic),
                ("mode", a.mode),
                ("amplitude", a.amplitude),
                ("fields", a.fields),
                ("scheme", a.scheme),
                ("dealias", a.dealias),
                ("cutoff", a.cutoff),
                ("probe", a.probe),
                ("probe_every", a.probe_every),
                ("snapshot_every", a.snapshot_every),
            ]);
            run_with(Cmd::Fluid, &a.common, None, flags)
        }
        Command::Tw(TwCommand::Run(a)) => {
            let flags = vec![
                ("H", a.h),
                ("p0", a.p0),
                ("u", a.u),
                ("p", a.p),
                ("q", a.q),
                ("phi", a.phi),
                ("psi", a.psi),
                ("xi_max", a.xi_max),
                ("samples", a.samples),
                ("tol", a.tol),
            ];
            run_with(Cmd::TwRun, &a.common, a.fig23_ic.then_some("fig23-ic"), flags)
        }
        Command::Tw(TwCommand::Stability(a)) => {
            let flags = vec![("p0", a.p0), ("hmin", a.hmin), ("hmax", a.hmax), ("n", a.n)];
            run_with(Cmd::TwStability, &a.common, None, flags)
        }
        Command::Tw(TwCommand::Threshold(a)) => {
            let flags = vec![("p0", a.p0), ("lo", a.lo), ("hi", a.hi), ("tol", a.tol)];
            run_with(Cmd::TwThreshold, &a.common, None, flags)
        }
        Command::Wigner(a) => {
            let flags = vec![
                ("tbar", a.tbar),
                ("xmin", a.xmin),
                ("xmax", a.xmax),
                ("nx", a.nx),
                ("vmin", a.vmin),
                ("vmax", a.vmax),
                ("nv", a.nv),
                ("method", a.method),
                ("sigma", a.sigma),
                ("hbar", a.hbar),
                ("m", a.m),
            ];
            run_with(Cmd::Wigner, &a.common, a.fig1.then_some("fig1"), flags)
        }
        Command::Moments(a) => {
            let flags = vec![
                ("input", a.input),
                ("mass", a.mass),
                ("boundary_threshold", a.boundary_threshold),
            ];
            run_with(Cmd::Moments, &a.common, None, flags)
        }
        Command::Rerun(a) => rerun(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfluid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
