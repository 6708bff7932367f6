//! Output envelopes. JSON files hold `{"manifest": …, "data": …}`; CSV
//! files carry the manifest as a leading `#` comment line.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, GlobalArgs};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Effective configuration after flag and environment overrides.
    pub config: Value,
    pub seed: u64,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &impl Serialize, global: &GlobalArgs) -> Result<Self> {
        Ok(RunManifest {
            subcommand: subcommand.into(),
            config: serde_json::json!({ "command": config, "global": global }),
            seed: global.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        })
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    manifest: &'a RunManifest,
    data: &'a T,
}

/// Writes `data` as JSON or `rows` as CSV, to `--out` or standard output.
pub fn emit<T: Serialize, R: Serialize>(
    global: &GlobalArgs,
    manifest: &RunManifest,
    data: &T,
    rows: &[R],
) -> Result<()> {
    let sink: Box<dyn Write> = match &global.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let target = || global.out.as_ref().map_or_else(|| "standard output".to_string(), |p| p.display().to_string());
    match global.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &Envelope { manifest, data })?;
            writeln!(sink).with_context(|| format!("cannot write {}", target()))?;
        }
        Format::Csv => {
            writeln!(sink, "# manifest: {}", serde_json::to_string(manifest)?)
                .with_context(|| format!("cannot write {}", target()))?;
            let mut w = csv::Writer::from_writer(&mut sink);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().with_context(|| format!("cannot write {}", target()))?;
        }
    }
    sink.flush().with_context(|| format!("cannot write {}", target()))?;
    Ok(())
}
