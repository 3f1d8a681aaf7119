//! CSV sinks and the TOML manifest sidecar.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

/// Numbers recorded in the manifest next to the CSV.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Summary {
    pub results: Vec<(String, f64)>,
    pub tolerances: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn result(&mut self, key: impl Into<String>, v: f64) {
        self.results.push((key.into(), v));
    }

    pub fn tolerance(&mut self, key: impl Into<String>, v: f64) {
        self.tolerances.push((key.into(), v));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

/// The CSV destination: the `--out` file or stdout.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    Ok(csv::Writer::from_writer(sink(out)?))
}

/// SHA-256 of the canonical TOML form of the configuration.
pub fn config_hash(cfg: &RunConfig) -> Result<String, CliError> {
    let text = toml::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.toml");
    PathBuf::from(s)
}

pub fn manifest_text(cfg: &RunConfig, summary: &Summary) -> Result<String, CliError> {
    let mut doc = toml::Table::new();
    doc.insert("tool".into(), "pngsrc".into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("config_hash".into(), config_hash(cfg)?.into());
    let config = toml::Value::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    doc.insert("config".into(), config);
    let table = |pairs: &[(String, f64)]| {
        let mut t = toml::Table::new();
        for (k, v) in pairs {
            // non-finite values are kept as text
            let val = if v.is_finite() { toml::Value::Float(*v) } else { toml::Value::String(v.to_string()) };
            t.insert(k.clone(), val);
        }
        toml::Value::Table(t)
    };
    doc.insert("results".into(), table(&summary.results));
    doc.insert("tolerances".into(), table(&summary.tolerances));
    let notes = summary.notes.iter().map(|n| toml::Value::String(n.clone())).collect();
    doc.insert("notes".into(), toml::Value::Array(notes));
    toml::to_string(&doc).map_err(|e| CliError::Config(e.to_string()))
}

/// Writes the sidecar for `cfg.out`, if there is one.
pub fn write_manifest(cfg: &RunConfig, summary: &Summary) -> Result<(), CliError> {
    if let Some(out) = &cfg.out {
        std::fs::write(manifest_path(out), manifest_text(cfg, summary)?)?;
    }
    Ok(())
}
