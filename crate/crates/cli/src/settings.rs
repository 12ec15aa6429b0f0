//! Resolved run configuration: defaults, figure presets, config file and
//! flags merged into one flat key/value map.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use qfluid::{PlasmaParams, Preset};

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn key(key: &str, reason: impl fmt::Display) -> Self {
        CliError::Config(format!("key `{key}`: {reason}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<qfluid::Error> for CliError {
    fn from(e: qfluid::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Subcommands that produce output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmd {
    Dispersion,
    Response,
    Fluid,
    TwRun,
    TwStability,
    TwThreshold,
    Wigner,
    Moments,
}

impl Cmd {
    pub const ALL: [Cmd; 8] = [
        Cmd::Dispersion,
        Cmd::Response,
        Cmd::Fluid,
        Cmd::TwRun,
        Cmd::TwStability,
        Cmd::TwThreshold,
        Cmd::Wigner,
        Cmd::Moments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Cmd::Dispersion => "dispersion",
            Cmd::Response => "response",
            Cmd::Fluid => "fluid",
            Cmd::TwRun => "tw-run",
            Cmd::TwStability => "tw-stability",
            Cmd::TwThreshold => "tw-threshold",
            Cmd::Wigner => "wigner",
            Cmd::Moments => "moments",
        }
    }

    pub fn from_name(s: &str) -> CliResult<Self> {
        Cmd::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::key("command", format!("unknown command `{s}`")))
    }

    /// Whether the command reads the plasma parameter block.
    pub fn uses_params(self) -> bool {
        matches!(self, Cmd::Dispersion | Cmd::Response | Cmd::Fluid)
    }

    /// Every command-specific key with its default.
    pub fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Cmd::Dispersion => &[
                ("relation", "eq14"),
                ("kmin", "0"),
                ("kmax", "2"),
                ("n", "101"),
                ("spacing", "uniform"),
            ],
            Cmd::Response => &[
                ("relation", "eq14"),
                ("kmin", "0.1"),
                ("kmax", "2"),
                ("n", "20"),
                ("spacing", "uniform"),
                ("dphi", "1e-3"),
                ("direction", "0,0,1"),
            ],
            Cmd::Fluid => &[
                ("points", "256"),
                ("length", "12.566370614359172"),
                ("t_end", "50"),
                ("dt", "auto"),
                ("ic", "eigenmode"),
                ("mode", "1"),
                ("amplitude", "1e-6"),
                ("fields", "n"),
                ("scheme", "spectral"),
                ("dealias", "true"),
                ("cutoff", "1"),
                ("probe", "0"),
                ("probe_every", "1"),
                ("snapshot_every", "0"),
            ],
            Cmd::TwRun => &[
                ("H", "1"),
                ("p0", "1"),
                ("u", "1.1"),
                ("p", "1"),
                ("q", "0"),
                ("phi", "0"),
                ("psi", "0"),
                ("xi_max", "100"),
                ("samples", "2000"),
                ("tol", "1e-9"),
            ],
            Cmd::TwStability => &[("p0", "1"), ("hmin", "0"), ("hmax", "3"), ("n", "31")],
            Cmd::TwThreshold => &[("p0", "1"), ("lo", "1"), ("hi", "3"), ("tol", "1e-6")],
            Cmd::Wigner => &[
                ("tbar", "0,2,4,6"),
                ("xmin", "-12"),
                ("xmax", "12"),
                ("nx", "256"),
                ("vmin", "-4"),
                ("vmax", "4"),
                ("nv", "256"),
                ("method", "analytic"),
                ("sigma", "1"),
                ("hbar", "1"),
                ("m", "1"),
            ],
            Cmd::Moments => &[("input", ""), ("mass", "1"), ("boundary_threshold", "1e-10")],
        }
    }

    fn allows(self, key: &str) -> bool {
        self.defaults().iter().any(|(k, _)| *k == key)
            || (self.uses_params() && (key == "preset" || PlasmaParams::KEYS.contains(&key)))
    }
}

/// Reference settings behind `--fig1`, `--fig23-ic` and `--eq14-sweep`.
pub fn figure_preset(name: &str) -> &'static [(&'static str, &'static str)] {
    match name {
        "fig1" => &[
            ("tbar", "0,2,4,6"),
            ("xmin", "-12"),
            ("xmax", "12"),
            ("nx", "256"),
            ("vmin", "-4"),
            ("vmax", "4"),
            ("nv", "256"),
        ],
        "fig23-ic" => &[
            ("H", "1"),
            ("p0", "1"),
            ("u", "1.5"),
            ("p", "1"),
            ("q", "0"),
            ("phi", "0"),
            ("psi", "0"),
        ],
        // Small T keeps the thermal correction to the k⁴ coefficient negligible.
        "eq14-sweep" => &[
            ("relation", "eq14"),
            ("preset", "nondim"),
            ("hbar", "1"),
            ("T0_par", "1e-3"),
            ("T0_perp", "0"),
            ("kmin", "1e-3"),
            ("kmax", "1"),
            ("n", "61"),
            ("spacing", "log"),
        ],
        _ => &[],
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got `{line}`", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Inputs to [`Settings::resolve`], lowest precedence first.
#[derive(Debug, Default)]
pub struct Sources<'a> {
    pub figure: Option<&'a str>,
    pub config_file: Option<&'a Path>,
    pub config_pairs: Vec<(String, String)>,
    pub set: Vec<String>,
    pub flags: Vec<(&'static str, Option<String>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub cmd: Cmd,
    pub map: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(cmd: Cmd, src: Sources<'_>) -> CliResult<Self> {
        let mut map: BTreeMap<String, String> = cmd
            .defaults()
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut apply = |k: &str, v: String| -> CliResult<()> {
            if !cmd.allows(k) {
                return Err(CliError::key(k, format!("not an option of `{}`", cmd.name())));
            }
            map.insert(k.to_string(), v);
            Ok(())
        };
        if let Some(fig) = src.figure {
            for (k, v) in figure_preset(fig) {
                apply(k, v.to_string())?;
            }
        }
        if let Some(path) = src.config_file {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            for (k, v) in parse_kv(&text)? {
                apply(&k, v)?;
            }
        }
        for (k, v) in src.config_pairs {
            apply(&k, v)?;
        }
        for item in &src.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{item}`")))?;
            apply(k.trim(), v.trim().to_string())?;
        }
        for (k, v) in src.flags {
            if let Some(v) = v {
                apply(k, v)?;
            }
        }
        let mut settings = Settings { cmd, map };
        if cmd.uses_params() {
            // Record the full parameter block so the header does not depend
            // on preset defaults.
            let params = settings.params()?;
            for key in PlasmaParams::KEYS {
                settings
                    .map
                    .insert(key.to_string(), format!("{:e}", params.get(key).unwrap()));
            }
        }
        Ok(settings)
    }

    pub fn str(&self, key: &str) -> &str {
        self.map.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        let raw = self.str(key);
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(CliError::key(key, format!("`{raw}` is not a finite number"))),
        }
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        let raw = self.str(key);
        raw.parse::<usize>()
            .map_err(|_| CliError::key(key, format!("`{raw}` is not a non-negative integer")))
    }

    pub fn bool(&self, key: &str) -> CliResult<bool> {
        match self.str(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(CliError::key(key, format!("`{other}` is not a boolean"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> CliResult<Vec<f64>> {
        let raw = self.str(key);
        raw.split(',')
            .map(|s| match s.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::key(
                    key,
                    format!("`{raw}` is not a comma-separated list of numbers"),
                )),
            })
            .collect()
    }

    /// Preset base values overridden by any explicit parameter keys.
    pub fn params(&self) -> CliResult<PlasmaParams> {
        let preset: Preset = match self.map.get("preset") {
            Some(p) => p
                .parse()
                .map_err(|_| CliError::key("preset", format!("unknown preset `{p}`")))?,
            None => Preset::Nondim,
        };
        let mut params = preset.params();
        for key in PlasmaParams::KEYS {
            if self.map.contains_key(key) {
                params.set(key, self.f64(key)?)?;
            }
        }
        params.validate()?;
        Ok(params)
    }

    /// One-line JSON record of the command and every resolved key.
    pub fn header(&self) -> String {
        let record = serde_json::json!({ "command": self.cmd.name(), "config": self.map });
        format!("# config: {record}")
    }

    /// Inverse of [`Settings::header`].
    pub fn from_header(line: &str) -> CliResult<(Cmd, Vec<(String, String)>)> {
        let body = line
            .strip_prefix("# config: ")
            .ok_or_else(|| CliError::Config("first line is not a `# config:` header".into()))?;
        let value: serde_json::Value =
            serde_json::from_str(body).map_err(|e| CliError::Config(format!("header is not valid JSON: {e}")))?;
        let cmd = Cmd::from_name(value["command"].as_str().unwrap_or(""))?;
        let config = value["config"]
            .as_object()
            .ok_or_else(|| CliError::Config("header lacks a config object".into()))?;
        let pairs = config
            .iter()
            .map(|(k, v)| match v.as_str() {
                Some(s) => Ok((k.clone(), s.to_string())),
                None => Err(CliError::key(k, "header value is not a string")),
            })
            .collect::<CliResult<_>>()?;
        Ok((cmd, pairs))
    }
}
