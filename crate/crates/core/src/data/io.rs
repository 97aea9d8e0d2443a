use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::{NaiveDateTime, NaiveTime};

use super::{segmentize, GroupScheme, SegmentSeries};
use crate::error::{KwfError, Result};

const TIMESTAMP_FMT: &str = "%Y-%m-%dT%H:%M";

/// Loads a `timestamp,load` CSV and labels days with the default
/// day-of-week scheme.
pub fn load_csv(path: impl AsRef<Path>) -> Result<SegmentSeries> {
    read_csv(File::open(path)?, &GroupScheme::default())
}

/// Parses a `timestamp,load` CSV. Rows may come in any order; the sampling
/// step is the smallest spacing between timestamps, and every day must be
/// complete.
pub fn read_csv<R: Read>(reader: R, scheme: &GroupScheme) -> Result<SegmentSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| KwfError::Csv {
        row: 1,
        msg: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "timestamp" || &headers[1] != "load" {
        return Err(KwfError::Csv {
            row: 1,
            msg: "header must be `timestamp,load`".into(),
        });
    }

    let mut rows: Vec<(NaiveDateTime, f64, usize)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| KwfError::Csv {
            row,
            msg: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(KwfError::Csv {
                row,
                msg: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let ts = NaiveDateTime::parse_from_str(rec[0].trim(), TIMESTAMP_FMT).map_err(|e| {
            KwfError::Csv {
                row,
                msg: format!("bad timestamp `{}`: {e}", &rec[0]),
            }
        })?;
        let load: f64 = rec[1].trim().parse().map_err(|_| KwfError::Csv {
            row,
            msg: format!("bad load value `{}`", &rec[1]),
        })?;
        if !load.is_finite() {
            return Err(KwfError::Csv {
                row,
                msg: "non-finite load".into(),
            });
        }
        rows.push((ts, load, row));
    }
    if rows.len() < 2 {
        return Err(KwfError::Csv {
            row: rows.len() + 1,
            msg: "need at least two rows".into(),
        });
    }
    rows.sort_by_key(|r| r.0);

    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(KwfError::Csv {
                row: pair[1].2,
                msg: format!("duplicate timestamp {} (also row {})", pair[1].0, pair[0].2),
            });
        }
    }
    let step = rows
        .windows(2)
        .map(|p| (p[1].0 - p[0].0).num_minutes())
        .min()
        .unwrap_or(0);
    if step <= 0 || 1440 % step != 0 {
        return Err(KwfError::Csv {
            row: rows[1].2,
            msg: format!("sampling step of {step} minutes does not divide a day"),
        });
    }
    for pair in rows.windows(2) {
        let gap = (pair[1].0 - pair[0].0).num_minutes();
        if gap != step {
            let missing = pair[0].0 + chrono::Duration::minutes(step);
            return Err(KwfError::Csv {
                row: pair[1].2,
                msg: format!("gap: missing timestamp {}", missing.format(TIMESTAMP_FMT)),
            });
        }
    }
    let h = (1440 / step) as usize;
    let first = rows[0].0;
    if first.time() != NaiveTime::MIN {
        return Err(KwfError::Csv {
            row: rows[0].2,
            msg: "first timestamp must fall on midnight".into(),
        });
    }
    if !rows.len().is_multiple_of(h) {
        return Err(KwfError::Csv {
            row: rows[rows.len() - 1].2,
            msg: format!("last day incomplete: {} of {h} rows", rows.len() % h),
        });
    }
    let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    segmentize(&values, h, first.date(), scheme)
}

/// Writes a series as `timestamp,load` rows. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv_to<W: Write>(series: &SegmentSeries, writer: W) -> Result<()> {
    let mut out = BufWriter::new(writer);
    writeln!(out, "timestamp,load")?;
    let step = chrono::Duration::seconds(i64::from(series.sample_period_secs()));
    for seg in series.segments() {
        let mut ts = seg.date.and_time(NaiveTime::MIN);
        for v in &seg.values {
            writeln!(out, "{},{}", ts.format(TIMESTAMP_FMT), v)?;
            ts += step;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(series: &SegmentSeries, path: impl AsRef<Path>) -> Result<()> {
    write_csv_to(series, File::create(path)?)
}
