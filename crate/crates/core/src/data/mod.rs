//! Daily segmentation of a uniformly sampled series, calendar grouping,
//! CSV ingestion and the synthetic load generator.

mod io;
mod synthetic;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{KwfError, Result};

pub use io::{load_csv, read_csv, write_csv, write_csv_to};
pub use synthetic::{generate_synthetic, SyntheticConfig};

/// Day-type label used by the group filter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupLabel(pub String);

impl GroupLabel {
    pub fn new(label: impl Into<String>) -> Self {
        GroupLabel(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Calendar rule mapping a date to its day-type group.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum GroupScheme {
    /// Seven groups, `MON` .. `SUN`.
    #[default]
    DayOfWeek,
    /// Three groups: `WEEKDAY`, `SAT`, `SUN`.
    WeekdaySatSun,
    /// Explicit date to label map.
    Map(BTreeMap<NaiveDate, GroupLabel>),
}

impl GroupScheme {
    pub fn group_of(&self, date: NaiveDate) -> Result<GroupLabel> {
        let label = match self {
            GroupScheme::DayOfWeek => dow_label(date.weekday()),
            GroupScheme::WeekdaySatSun => match date.weekday() {
                Weekday::Sat => "SAT",
                Weekday::Sun => "SUN",
                _ => "WEEKDAY",
            },
            GroupScheme::Map(map) => {
                return map.get(&date).cloned().ok_or(KwfError::MissingGroup(date));
            }
        };
        Ok(GroupLabel::new(label))
    }

    /// Reads a `date,group` CSV into a [`GroupScheme::Map`].
    pub fn from_map_file(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| KwfError::Config(e.to_string()))?;
        let mut map = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| KwfError::Csv {
                row,
                msg: e.to_string(),
            })?;
            if rec.len() != 2 {
                return Err(KwfError::Csv {
                    row,
                    msg: "expected `date,group`".into(),
                });
            }
            let date = NaiveDate::parse_from_str(rec[0].trim(), "%Y-%m-%d").map_err(|e| {
                KwfError::Csv {
                    row,
                    msg: e.to_string(),
                }
            })?;
            map.insert(date, GroupLabel::new(rec[1].trim()));
        }
        Ok(GroupScheme::Map(map))
    }
}

fn dow_label(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "MON",
        Weekday::Tue => "TUE",
        Weekday::Wed => "WED",
        Weekday::Thu => "THU",
        Weekday::Fri => "FRI",
        Weekday::Sat => "SAT",
        Weekday::Sun => "SUN",
    }
}

/// Labels each date under `scheme`.
pub fn assign_groups(dates: &[NaiveDate], scheme: &GroupScheme) -> Result<Vec<GroupLabel>> {
    dates.iter().map(|d| scheme.group_of(*d)).collect()
}

/// One day of the series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub values: Vec<f64>,
    pub date: NaiveDate,
    pub group: GroupLabel,
}

/// Consecutive daily segments sharing a common sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSeries {
    segments: Vec<Segment>,
    h: usize,
}

impl SegmentSeries {
    /// Validates the invariants: equal lengths, finite values, and dates
    /// that advance by exactly one day.
    pub fn new(segments: Vec<Segment>, h: usize) -> Result<Self> {
        if h == 0 {
            return Err(KwfError::invalid("samples per segment must be positive"));
        }
        if 86_400 % h != 0 {
            return Err(KwfError::invalid(format!(
                "{h} samples per day do not divide a day into whole seconds"
            )));
        }
        for (k, seg) in segments.iter().enumerate() {
            if seg.values.len() != h {
                return Err(KwfError::ShapeMismatch(format!(
                    "segment {k} has {} values, expected {h}",
                    seg.values.len()
                )));
            }
            if let Some(i) = seg.values.iter().position(|v| !v.is_finite()) {
                return Err(KwfError::NonFinite { index: k * h + i });
            }
            if k > 0 && segments[k - 1].date.succ_opt() != Some(seg.date) {
                return Err(KwfError::invalid(format!(
                    "dates must advance by one day: {} follows {}",
                    seg.date,
                    segments[k - 1].date
                )));
            }
        }
        Ok(SegmentSeries { segments, h })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Samples per segment.
    pub fn h(&self) -> usize {
        self.h
    }

    /// Seconds between consecutive samples within a day.
    pub fn sample_period_secs(&self) -> u32 {
        (86_400 / self.h) as u32
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.segments.first().map(|s| s.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.segments.last().map(|s| s.date)
    }

    /// Index of the segment holding `date`, if any.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let first = self.first_date()?;
        let offset = (date - first).num_days();
        (offset >= 0 && (offset as usize) < self.len()).then_some(offset as usize)
    }

    /// Concatenation of all segment values.
    pub fn flatten(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .collect()
    }

    /// Relabels every segment under a different scheme.
    pub fn regroup(&self, scheme: &GroupScheme) -> Result<Self> {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                Ok(Segment {
                    values: s.values.clone(),
                    date: s.date,
                    group: scheme.group_of(s.date)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SegmentSeries {
            segments,
            h: self.h,
        })
    }
}

/// Cuts a flat series into consecutive days of `h` samples starting at
/// `start_date`.
pub fn segmentize(
    series: &[f64],
    h: usize,
    start_date: NaiveDate,
    calendar: &GroupScheme,
) -> Result<SegmentSeries> {
    if h == 0 {
        return Err(KwfError::invalid("samples per segment must be positive"));
    }
    if series.is_empty() || !series.len().is_multiple_of(h) {
        return Err(KwfError::RaggedLength {
            len: series.len(),
            h,
            remainder: series.len() % h,
        });
    }
    if let Some(index) = series.iter().position(|v| !v.is_finite()) {
        return Err(KwfError::NonFinite { index });
    }
    let segments = series
        .chunks_exact(h)
        .zip(start_date.iter_days())
        .map(|(chunk, date)| {
            Ok(Segment {
                values: chunk.to_vec(),
                date,
                group: calendar.group_of(date)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SegmentSeries::new(segments, h)
}
