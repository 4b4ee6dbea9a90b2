//! Run manifests and output sinks.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::verify::{write_jsonl, RecordContext};

/// Identifies a run; embedded at the top of every output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    /// `parameters` are the serialized command arguments; options that
    /// cannot change results (thread count, output location) are left out by
    /// the caller.
    pub fn new<P: Serialize>(command: &str, parameters: &P, seed: u64) -> Result<Self> {
        let value = serde_json::to_value(parameters)?;
        let parameters = match value {
            serde_json::Value::Object(map) => map
                .into_iter()
                .map(|(k, v)| {
                    let text = match v {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    };
                    (k, text)
                })
                .collect(),
            _ => BTreeMap::new(),
        };
        Ok(Self {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp()?,
        })
    }
}

/// RFC 3339 UTC time, pinned by `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> Result<String> {
    let now = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs: i64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("SOURCE_DATE_EPOCH is not an integer: {raw:?}")))?;
            DateTime::<Utc>::from_timestamp(secs, 0)
                .ok_or_else(|| Error::InvalidParameter(format!("SOURCE_DATE_EPOCH out of range: {secs}")))?
        }
        Err(_) => Utc::now(),
    };
    Ok(now.to_rfc3339_opts(SecondsFormat::Secs, true))
}

/// The `# manifest {json}` line heading CSV outputs.
pub fn manifest_comment(manifest: &RunManifest) -> Result<Vec<u8>> {
    let mut buf = b"# manifest ".to_vec();
    serde_json::to_writer(&mut buf, manifest)?;
    buf.push(b'\n');
    Ok(buf)
}

/// CSV preceded by the manifest comment line.
pub fn csv_document<I, R>(manifest: &RunManifest, header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut buf = manifest_comment(manifest)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

/// JSON lines: `{"manifest": …}` first, then one record per item.
pub fn jsonl_document<'a, T, I>(manifest: &RunManifest, context: &RecordContext, items: I) -> Result<Vec<u8>>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut buf = Vec::new();
    serde_json::to_writer(&mut buf, &serde_json::json!({ "manifest": manifest }))?;
    buf.push(b'\n');
    write_jsonl(&mut buf, context, items)?;
    Ok(buf)
}

/// A single JSON object with the manifest and `body` side by side.
pub fn json_document<T: Serialize>(manifest: &RunManifest, body: &T) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(&serde_json::json!({
        "manifest": manifest,
        "result": body,
    }))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Files go to `dir` when given, otherwise to stdout one after another.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    pub fn emit(&self, name: &str, contents: &[u8]) -> Result<()> {
        match &self.dir {
            Some(d) => fs::write(d.join(name), contents)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents)?;
                out.flush()?;
            }
        }
        Ok(())
    }
}
