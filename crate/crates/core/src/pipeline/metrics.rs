use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const METRICS_COLUMNS: [&str; 10] = [
    "iteration",
    "epoch",
    "steps",
    "elapsed_seconds",
    "opponent",
    "games",
    "wins",
    "draws",
    "losses",
    "win_ratio",
];

/// Opponent label on rows written by the training loop itself.
pub const TRAINING_ROW: &str = "none";

/// One row of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub iteration: u64,
    pub epoch: u64,
    pub steps: u64,
    pub elapsed_seconds: f64,
    pub opponent: String,
    pub games: u32,
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    /// `(wins + 0.5 draws) / games`; empty when no games were played.
    pub win_ratio: Option<f64>,
}

impl MetricsRecord {
    pub fn training(iteration: u64, epoch: u64, steps: u64, elapsed_seconds: f64) -> Self {
        MetricsRecord {
            iteration,
            epoch,
            steps,
            elapsed_seconds,
            opponent: TRAINING_ROW.into(),
            games: 0,
            wins: 0,
            draws: 0,
            losses: 0,
            win_ratio: None,
        }
    }

    pub fn is_training(&self) -> bool {
        self.opponent == TRAINING_ROW
    }
}

/// Creates the file with `# key=value` header lines and the column row.
pub fn create_metrics(path: &Path, header: &[(String, String)]) -> Result<()> {
    let mut f = File::create(path)?;
    for (k, v) in header {
        writeln!(f, "# {k}={}", v.replace('\n', " "))?;
    }
    writeln!(f, "{}", METRICS_COLUMNS.join(","))?;
    Ok(())
}

pub fn append_metrics(path: &Path, records: &[MetricsRecord]) -> Result<()> {
    let f = OpenOptions::new().append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(f);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Header pairs and rows. Errors name the offending line.
pub fn read_metrics(path: &Path) -> Result<(Vec<(String, String)>, Vec<MetricsRecord>)> {
    let bad = |line: usize, message: String| Error::Metrics {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut header = Vec::new();
    let mut rows = Vec::new();
    let mut seen_columns = false;
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let number = i + 1;
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .trim_start()
                .split_once('=')
                .ok_or_else(|| bad(number, "header line without `=`".into()))?;
            header.push((k.to_string(), v.to_string()));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !seen_columns {
            if line != METRICS_COLUMNS.join(",") {
                return Err(bad(number, format!("unexpected column row {line:?}")));
            }
            seen_columns = true;
            continue;
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(line.as_bytes());
        let record = reader
            .records()
            .next()
            .ok_or_else(|| bad(number, "empty row".into()))?
            .map_err(|e| bad(number, e.to_string()))?;
        if record.len() != METRICS_COLUMNS.len() {
            return Err(bad(
                number,
                format!("expected {} fields, found {}", METRICS_COLUMNS.len(), record.len()),
            ));
        }
        let row: MetricsRecord = record
            .deserialize(None)
            .map_err(|e| bad(number, e.to_string()))?;
        rows.push(row);
    }
    if !seen_columns {
        return Err(bad(0, "missing column row".into()));
    }
    Ok((header, rows))
}

/// Rewrites the file keeping only rows for which `keep` holds.
pub fn retain_metrics(path: &Path, keep: impl Fn(&MetricsRecord) -> bool) -> Result<()> {
    let (header, rows) = read_metrics(path)?;
    let rows: Vec<MetricsRecord> = rows.into_iter().filter(|r| keep(r)).collect();
    let tmp = path.with_extension("csv.tmp");
    create_metrics(&tmp, &header)?;
    append_metrics(&tmp, &rows)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
