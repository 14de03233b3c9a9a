use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: Option<PathBuf>,
    pub parameters: Value,
    pub seed: u64,
    pub threads: usize,
    pub duration_secs: f64,
    pub outputs: Vec<PathBuf>,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NonConverged,
    Error,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, threads: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config: None,
            parameters: Value::Null,
            seed,
            threads,
            duration_secs: 0.0,
            outputs: Vec::new(),
            status: Status::Ok,
            exit_code: 0,
            message: None,
            warnings: Vec::new(),
        }
    }

    pub fn finish(&mut self, elapsed: Duration, exit_code: i32, message: Option<String>) {
        self.duration_secs = elapsed.as_secs_f64();
        self.exit_code = exit_code;
        self.status = match exit_code {
            0 => Status::Ok,
            3 => Status::NonConverged,
            _ => Status::Error,
        };
        self.message = message;
    }

    /// Explicit path, else `<out>.manifest.json` for the first output, else
    /// one JSON line on stderr.
    pub fn emit(&self, explicit: Option<&Path>, primary_out: Option<&Path>) -> std::io::Result<()> {
        let target = explicit.map(Path::to_path_buf).or_else(|| {
            primary_out.map(|p| {
                let mut name = p.as_os_str().to_os_string();
                name.push(".manifest.json");
                PathBuf::from(name)
            })
        });
        match target {
            Some(path) => {
                let mut text = serde_json::to_vec_pretty(self).map_err(std::io::Error::other)?;
                text.push(b'\n');
                write_atomic(&path, &text)
            }
            None => {
                let line = serde_json::to_string(self).map_err(std::io::Error::other)?;
                eprintln!("{line}");
                Ok(())
            }
        }
    }
}

/// Writes to `out` atomically, or to stdout.
pub fn deliver(out: Option<&Path>, contents: &str, manifest: &mut RunManifest) -> std::io::Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, contents.as_bytes())?;
            manifest.outputs.push(path.to_path_buf());
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(contents.as_bytes())?;
            lock.flush()
        }
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
