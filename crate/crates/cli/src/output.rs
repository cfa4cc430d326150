use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Everything needed to reproduce one run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub config: Value,
    pub parameters: Value,
    pub orientation_chart: &'static str,
    pub reference_point: &'static str,
    pub units: Vec<(&'static str, &'static str)>,
    pub outputs: Vec<String>,
    pub summary: Value,
}

/// Rows of one table, cells already formatted; `None` is an empty cell.
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Option<String>>>,
}

impl Table {
    fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.as_deref().unwrap_or("")))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let object = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| {
                        let value = match v.as_deref() {
                            None => Value::Null,
                            Some("true") => Value::Bool(true),
                            Some("false") => Value::Bool(false),
                            Some(s) => s
                                .parse::<f64>()
                                .ok()
                                .and_then(serde_json::Number::from_f64)
                                .map_or(Value::Null, Value::Number),
                        };
                        (k.to_string(), value)
                    })
                    .collect();
                Value::Object(object)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Writes `table` as `<stem>.csv` plus `<stem>.meta.json`, or as a single
/// `<stem>.json` embedding the manifest. Returns the written paths.
pub fn write_outputs(
    dir: &Path,
    stem: &str,
    json: bool,
    table: &Table,
    manifest: &mut RunManifest,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    if json {
        let path = dir.join(format!("{stem}.json"));
        manifest.outputs.push(path.display().to_string());
        let doc = serde_json::json!({ "manifest": manifest, "rows": table.to_json() });
        atomic_write(&path, &to_pretty(&doc)?)?;
        Ok(vec![path])
    } else {
        let data = dir.join(format!("{stem}.csv"));
        let meta = dir.join(format!("{stem}.meta.json"));
        manifest.outputs.push(data.display().to_string());
        atomic_write(&data, &table.to_csv()?)?;
        atomic_write(&meta, &to_pretty(manifest)?)?;
        Ok(vec![data, meta])
    }
}

fn to_pretty<T: Serialize>(value: &T) -> std::io::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Temp file in the target directory, then rename over the destination.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("output");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Shortest round-trip form, exponent notation for very small or large
/// magnitudes; both zeros print as `0`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        let s = format!("{x:?}");
        s.strip_suffix(".0").map_or(s.clone(), str::to_string)
    }
}

pub fn finite(x: f64) -> Option<String> {
    x.is_finite().then(|| num(x))
}
