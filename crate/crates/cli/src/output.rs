//! CSV assembly and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::settings::{CliError, CliResult};

/// Value formatting shared by every table: 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// In-memory CSV: header comment, column line, rows.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &str, columns: &[&str]) -> Self {
        let mut text = String::new();
        writeln!(text, "{header}").unwrap();
        writeln!(text, "{}", columns.join(",")).unwrap();
        Self {
            text,
            columns: columns.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    pub fn nums(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| num(*v)).collect();
        self.row(&cells);
    }

    /// Writes to `dest`, or stdout for `-`.
    pub fn write_to(&self, dest: &str) -> CliResult<()> {
        if dest == "-" {
            let mut out = std::io::stdout().lock();
            out.write_all(self.text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        } else {
            write_atomic(Path::new(dest), self.text.as_bytes())
        }
    }
}

/// Write to a sibling temporary file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    let result = std::fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(io(e));
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

/// `dir/stem_<suffix>.csv` for an output path `dir/stem.csv`.
pub fn sibling(path: &str, suffix: &str) -> String {
    let p = Path::new(path);
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    p.with_file_name(format!("{stem}_{suffix}.csv"))
        .to_string_lossy()
        .into_owned()
}
