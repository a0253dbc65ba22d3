use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::PolicyId;
use crate::error::{Error, Result};

/// Per-capacity-rate parameters shared by every row at that rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSettings {
    pub capacity_rate: f64,
    pub capacity: f64,
    pub pi_star: f64,
    /// Mean offline optimal peak over the episodes, used by `THR_avg`.
    pub thr_avg_threshold: f64,
    /// Discharge share used by `Eql_Per`.
    pub eql_per_rate: f64,
}

/// One policy on one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub capacity_rate: f64,
    pub capacity: f64,
    pub policy: PolicyId,
    pub episode: String,
    pub original_peak: f64,
    pub online_peak: f64,
    pub reduction: f64,
    /// `reduction / original_peak`.
    pub reduction_rate: f64,
    pub offline_reduction: f64,
    /// `offline_reduction / reduction`; `None` when the policy reduced
    /// nothing but the offline optimum did.
    pub ratio: Option<f64>,
    /// Both reductions are zero; `ratio` is then reported as 1.
    pub degenerate: bool,
    /// Adaptive slots whose discharge was cut to the remaining capacity.
    pub capacity_clamps: usize,
}

/// Offline-to-online reduction ratio and the degenerate flag.
pub fn reduction_ratio(offline: f64, online: f64) -> (Option<f64>, bool) {
    const ZERO: f64 = 1e-9;
    if online <= ZERO {
        if offline <= ZERO {
            (Some(1.0), true)
        } else {
            (None, false)
        }
    } else {
        (Some(offline / online), false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub capacity_rate: f64,
    pub policy: PolicyId,
    pub episodes: usize,
    pub mean_reduction_rate: f64,
    /// Population standard deviation.
    pub std_reduction_rate: f64,
    pub mean_reduction: f64,
}

/// Groups consecutive rows by `(capacity_rate, policy)`; rows must already
/// be in report order.
pub fn aggregate(rows: &[ReportRow]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let key = (rows[start].capacity_rate, rows[start].policy);
        let end = start
            + rows[start..]
                .iter()
                .take_while(|r| (r.capacity_rate, r.policy) == key)
                .count();
        let group = &rows[start..end];
        let n = group.len() as f64;
        let mean_rate = group.iter().map(|r| r.reduction_rate).sum::<f64>() / n;
        let var = group.iter().map(|r| (r.reduction_rate - mean_rate).powi(2)).sum::<f64>() / n;
        out.push(Aggregate {
            capacity_rate: key.0,
            policy: key.1,
            episodes: group.len(),
            mean_reduction_rate: mean_rate,
            std_reduction_rate: var.sqrt(),
            mean_reduction: group.iter().map(|r| r.reduction).sum::<f64>() / n,
        });
        start = end;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub horizon: usize,
    pub epsilon: f64,
    pub settings: Vec<RateSettings>,
    /// Sorted by capacity rate, policy, then episode id.
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<Aggregate>,
}

impl Report {
    pub fn aggregate_for(&self, capacity_rate: f64, policy: PolicyId) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.capacity_rate == capacity_rate && a.policy == policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!("unknown report format `{other}`"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

/// Column order of the CSV form: one line per [`ReportRow`]. An undefined
/// ratio is an empty field.
pub const REPORT_COLUMNS: [&str; 12] = [
    "capacity_rate",
    "capacity",
    "policy",
    "episode",
    "original_peak",
    "online_peak",
    "reduction",
    "reduction_rate",
    "offline_reduction",
    "ratio",
    "degenerate",
    "capacity_clamps",
];

pub fn write_report(report: &Report, format: ReportFormat, mut writer: impl Write) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut writer, report)?;
            writer.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(REPORT_COLUMNS)?;
            for r in &report.rows {
                w.write_record([
                    r.capacity_rate.to_string(),
                    r.capacity.to_string(),
                    r.policy.to_string(),
                    r.episode.clone(),
                    r.original_peak.to_string(),
                    r.online_peak.to_string(),
                    r.reduction.to_string(),
                    r.reduction_rate.to_string(),
                    r.offline_reduction.to_string(),
                    r.ratio.map(|x| x.to_string()).unwrap_or_default(),
                    r.degenerate.to_string(),
                    r.capacity_clamps.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn emit_report(report: &Report, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
    let mut buf = std::io::BufWriter::new(file);
    write_report(report, format, &mut buf)?;
    buf.flush()?;
    Ok(())
}
