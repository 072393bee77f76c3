//! Daily series loading, panel alignment and output writing.
//!
//! Input files are comma-delimited with a header row, an ISO-8601 `Date`
//! column and one column per field. Lines starting with `#` are comments.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DATE_COLUMN: &str = "Date";
pub const DEFAULT_VALUE_COLUMN: &str = "Close";

/// A uniformly sampled daily series `{X_i}` with its normalized time axis
/// `t_i = i/N`, `i = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    time_axis: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series from `(date, value)` pairs in any order.
    pub fn new(label: impl Into<String>, mut rows: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData {
                required: 1,
                actual: 0,
            });
        }
        rows.sort_by_key(|(d, _)| *d);
        for pair in rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateDate(pair[0].0));
            }
        }
        if let Some((d, v)) = rows.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{d} (value {v})")));
        }
        let (dates, values): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let time_axis = normalized_time_axis(values.len());
        Ok(TimeSeries {
            label: label.into(),
            dates,
            values,
            time_axis,
        })
    }

    /// Builds a series from parallel date and value vectors.
    pub fn from_parts(
        label: impl Into<String>,
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "dates vs values".into(),
                expected: dates.len(),
                actual: values.len(),
            });
        }
        Self::new(label, dates.into_iter().zip(values).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    /// Position of `date` on the axis, if present.
    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    /// The first `len` points, with the time axis renormalized to the prefix.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        let len = len.min(self.len());
        Self::from_parts(
            self.label.clone(),
            self.dates[..len].to_vec(),
            self.values[..len].to_vec(),
        )
    }
}

/// `t_i = i/N` for `i = 1..N`.
pub fn normalized_time_axis(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=n).map(|i| i as f64 / nf).collect()
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

fn find_column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .or_else(|| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
        })
}

fn reader_for(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file))
}

/// Loads one value column of a daily CSV file as a [`TimeSeries`] labelled
/// with the file stem.
pub fn load_close_series(path: impl AsRef<Path>, value_column: &str) -> Result<TimeSeries> {
    let path = path.as_ref();
    let mut reader = reader_for(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    let date_idx =
        find_column(&headers, DATE_COLUMN).ok_or_else(|| Error::MissingColumn(DATE_COLUMN.into()))?;
    let value_idx =
        find_column(&headers, value_column).ok_or_else(|| Error::MissingColumn(value_column.into()))?;

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let record = record.map_err(|e| parse_error(path, row, e.to_string()))?;
        let date_field = record.get(date_idx).unwrap_or("");
        let date = parse_date(date_field)
            .ok_or_else(|| parse_error(path, row, format!("bad date `{date_field}`")))?;
        let value_field = record.get(value_idx).unwrap_or("");
        let value: f64 = value_field
            .parse()
            .map_err(|_| parse_error(path, row, format!("bad value `{value_field}`")))?;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("{}: row {row}", path.display())));
        }
        if !seen.insert(date) {
            return Err(Error::DuplicateDate(date));
        }
        rows.push((date, value));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    TimeSeries::new(label, rows)
}

fn parse_error(path: &Path, row: usize, message: String) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        row,
        message,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignPolicy {
    /// Keep only dates present in every series.
    Intersect,
    /// Use the union of dates and carry each series' last value forward.
    ForwardFill,
}

impl std::str::FromStr for AlignPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersect" | "intersect-dates" => Ok(AlignPolicy::Intersect),
            "ffill" | "forward-fill" | "forward-fill-onto-union" => Ok(AlignPolicy::ForwardFill),
            other => Err(Error::InvalidParameter(format!(
                "unknown alignment policy `{other}`"
            ))),
        }
    }
}

/// `n` series resampled onto one common date axis with no gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    pub labels: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub matrix: Vec<Vec<f64>>,
}

impl AlignedPanel {
    pub fn n_series(&self) -> usize {
        self.labels.len()
    }

    /// Row `i` as a standalone series on the common axis.
    pub fn series(&self, i: usize) -> Result<TimeSeries> {
        TimeSeries::from_parts(self.labels[i].clone(), self.dates.clone(), self.matrix[i].clone())
    }
}

pub fn align_panel(series: &[TimeSeries], policy: AlignPolicy) -> Result<AlignedPanel> {
    if series.is_empty() {
        return Err(Error::InvalidParameter("panel needs at least one series".into()));
    }
    let dates: Vec<NaiveDate> = match policy {
        AlignPolicy::Intersect => {
            let mut common: BTreeSet<NaiveDate> = series[0].dates().iter().copied().collect();
            for s in &series[1..] {
                let other: HashSet<NaiveDate> = s.dates().iter().copied().collect();
                common.retain(|d| other.contains(d));
            }
            common.into_iter().collect()
        }
        AlignPolicy::ForwardFill => series
            .iter()
            .flat_map(|s| s.dates().iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if dates.is_empty() {
        return Err(Error::EmptyIntersection);
    }

    let mut matrix = Vec::with_capacity(series.len());
    for s in series {
        let mut row = Vec::with_capacity(dates.len());
        let mut cursor = 0;
        let mut last: Option<f64> = None;
        for &d in &dates {
            while cursor < s.len() && s.dates()[cursor] <= d {
                last = Some(s.values()[cursor]);
                cursor += 1;
            }
            match last {
                Some(v) => row.push(v),
                None => {
                    return Err(Error::LeadingGap {
                        label: s.label.clone(),
                        date: d,
                    })
                }
            }
            if policy == AlignPolicy::Intersect {
                // every common date exists in `s`, so `last` is its own value
                debug_assert_eq!(s.dates()[cursor - 1], d);
            }
        }
        matrix.push(row);
    }
    Ok(AlignedPanel {
        labels: series.iter().map(|s| s.label.clone()).collect(),
        dates,
        matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Picks JSON for `.json` paths and CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// Named real columns sharing one date axis. `NaN` marks an undefined cell
/// and is written as an empty CSV field or a JSON `null`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesTable {
    pub dates: Vec<NaiveDate>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SeriesTable {
    pub fn new(dates: Vec<NaiveDate>) -> Self {
        SeriesTable {
            dates,
            columns: Vec::new(),
        }
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.columns.push((name.into(), values));
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, col) in &self.columns {
            if col.len() != self.dates.len() {
                return Err(Error::LengthMismatch {
                    what: format!("column `{name}`"),
                    expected: self.dates.len(),
                    actual: col.len(),
                });
            }
        }
        Ok(())
    }
}

impl From<&TimeSeries> for SeriesTable {
    fn from(ts: &TimeSeries) -> Self {
        SeriesTable::new(ts.dates().to_vec()).with_column(DEFAULT_VALUE_COLUMN, ts.values().to_vec())
    }
}

/// Writes `table` to `path`. `comments` are emitted as leading `# ` lines in
/// CSV output and as a `meta` object in JSON output.
pub fn write_series(
    table: &SeriesTable,
    path: impl AsRef<Path>,
    format: OutputFormat,
    comments: &[(String, String)],
) -> Result<()> {
    table.validate()?;
    let bytes = match format {
        OutputFormat::Csv => series_csv_bytes(table, comments),
        OutputFormat::Json => series_json_bytes(table, comments)?,
    };
    write_atomic(path, &bytes)
}

fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        // `Display` for f64 is the shortest representation that parses back exactly.
        format!("{v}")
    }
}

fn series_csv_bytes(table: &SeriesTable, comments: &[(String, String)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (k, v) in comments {
        let _ = writeln!(out, "# {k}={v}");
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![DATE_COLUMN.to_string()];
    header.extend(table.columns.iter().map(|(n, _)| n.clone()));
    w.write_record(&header).expect("in-memory write");
    for (i, d) in table.dates.iter().enumerate() {
        let mut rec = vec![d.format("%Y-%m-%d").to_string()];
        rec.extend(table.columns.iter().map(|(_, c)| fmt_cell(c[i])));
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn series_json_bytes(table: &SeriesTable, comments: &[(String, String)]) -> Result<Vec<u8>> {
    let mut obj = serde_json::Map::new();
    if !comments.is_empty() {
        let meta: serde_json::Map<String, serde_json::Value> = comments
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        obj.insert("meta".into(), meta.into());
    }
    let dates: Vec<String> = table
        .dates
        .iter()
        .map(|d| d.format("%Y-%m-%d").to_string())
        .collect();
    obj.insert("dates".into(), serde_json::to_value(dates)?);
    for (name, col) in &table.columns {
        let vals: Vec<Option<f64>> = col.iter().map(|v| v.is_finite().then_some(*v)).collect();
        obj.insert(name.clone(), serde_json::to_value(vals)?);
    }
    let mut bytes = serde_json::to_vec_pretty(&serde_json::Value::Object(obj))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Serializes `value` as pretty JSON and writes it atomically.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
