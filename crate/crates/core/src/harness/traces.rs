use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandProfile, ProblemInstance};

pub const TRACE_HEADER: [&str; 2] = ["timestamp", "demand_kwh"];

/// One on-peak window of demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: String,
    pub demands: DemandProfile,
    pub slot_minutes: u32,
}

/// Episodes extracted from a trace file and what was dropped or altered on
/// the way.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceSet {
    pub episodes: Vec<Episode>,
    /// Demands moved into the instance bounds.
    pub clipped: usize,
    /// Days skipped because the window was incomplete.
    pub short_days: Vec<String>,
}

/// Accepts RFC 3339 (offset ignored, wall-clock time kept) and offset-free
/// `YYYY-MM-DDTHH:MM[:SS]` or a space in place of the `T`.
fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.naive_local());
    }
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

/// Reads a `timestamp,demand_kwh` trace and cuts one episode per calendar
/// day: `inst.horizon` consecutive slots of `slot_minutes` starting at
/// `window_start`. Out-of-bounds demands are clipped and counted; days
/// missing a window slot are skipped and listed.
///
/// Parse errors report the 1-based line number in the file.
pub fn load_traces(
    path: impl AsRef<Path>,
    inst: &ProblemInstance,
    slot_minutes: u32,
    window_start: NaiveTime,
) -> Result<TraceSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
    read_traces(file, inst, slot_minutes, window_start)
}

pub fn read_traces(
    reader: impl Read,
    inst: &ProblemInstance,
    slot_minutes: u32,
    window_start: NaiveTime,
) -> Result<TraceSet> {
    let inst = inst.validate()?;
    if slot_minutes == 0 {
        return Err(Error::InvalidConfig("slot_minutes must be positive".into()));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(Error::Parse {
            row: 1,
            message: format!("expected header `{}`", TRACE_HEADER.join(",")),
        });
    }

    let mut days: BTreeMap<NaiveDate, BTreeMap<NaiveTime, f64>> = BTreeMap::new();
    for (k, record) in rdr.records().enumerate() {
        let row = k + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let ts = parse_timestamp(&record[0]).ok_or_else(|| Error::Parse {
            row,
            message: format!("bad timestamp `{}`", &record[0]),
        })?;
        let demand: f64 = record[1]
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| Error::Parse {
                row,
                message: format!("bad demand `{}`", &record[1]),
            })?;
        if days.entry(ts.date()).or_default().insert(ts.time(), demand).is_some() {
            return Err(Error::Parse {
                row,
                message: format!("duplicate timestamp {ts}"),
            });
        }
    }

    let step = Duration::minutes(i64::from(slot_minutes));
    let mut out = TraceSet::default();
    'days: for (date, slots) in days {
        let mut demands = Vec::with_capacity(inst.horizon);
        let mut at = date.and_time(window_start);
        for _ in 0..inst.horizon {
            if at.date() != date {
                out.short_days.push(date.to_string());
                continue 'days;
            }
            match slots.get(&at.time()) {
                Some(&x) => demands.push(x),
                None => {
                    out.short_days.push(date.to_string());
                    continue 'days;
                }
            }
            at += step;
        }
        for x in &mut demands {
            let clipped = x.clamp(inst.d_lb, inst.d_ub);
            if clipped != *x {
                out.clipped += 1;
                *x = clipped;
            }
        }
        out.episodes.push(Episode {
            id: date.to_string(),
            demands: DemandProfile::new(demands),
            slot_minutes,
        });
    }
    Ok(out)
}

/// Writes episodes as a trace, episode `k` on day `first_day + k`.
pub fn write_traces(
    writer: impl Write,
    episodes: &[Episode],
    first_day: NaiveDate,
    window_start: NaiveTime,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRACE_HEADER)?;
    for (k, ep) in episodes.iter().enumerate() {
        let mut at = (first_day + Duration::days(k as i64)).and_time(window_start);
        let step = Duration::minutes(i64::from(ep.slot_minutes));
        for x in ep.demands.iter() {
            w.write_record([at.format("%Y-%m-%dT%H:%M:%S").to_string(), x.to_string()])?;
            at += step;
        }
    }
    w.flush()?;
    Ok(())
}
