//! CSV interchange formats (plus a JSON mirror for metrics reports).
//!
//! Every output starts with one `#` metadata line naming the tool version,
//! seed, alpha grid and generator algorithm. Reals are written with six
//! significant digits; infinite bounds are the literals `inf` / `-inf`.
//! Readers reject NaN, missing or unknown columns, unknown axis labels and
//! duplicate keys, reporting the offending line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::conformal::Calibrator;
use crate::error::{Error, Result};
use crate::metrics::{MetricsReport, PlotPoint};
use crate::types::{Alpha, Axis, EnsemblePrediction, PredictionRecord, SampleId};

pub const TOOL_NAME: &str = "mcdcp";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const ENSEMBLE_COLUMNS: [&str; 4] = ["sample_id", "axis", "pass_idx", "value"];
pub const ENSEMBLE_TRUTH_COLUMN: &str = "y_true";
pub const RECORD_COLUMNS: [&str; 5] = ["sample_id", "axis", "y_true", "y_hat", "sigma"];
pub const CALIBRATOR_COLUMNS: [&str; 4] = ["axis", "alpha", "q", "m"];
pub const INTERVAL_COLUMNS: [&str; 8] = [
    "sample_id", "axis", "alpha", "y_hat", "sigma", "lower", "upper", "covered",
];
pub const REPORT_COLUMNS: [&str; 7] = [
    "axis",
    "alpha",
    "target_coverage",
    "picp",
    "mpiw",
    "interval_score",
    "n",
];
pub const CURVE_COLUMNS: [&str; 3] = ["axis", "expected", "observed"];
pub const PLOT_COLUMNS: [&str; 6] = ["axis", "rank", "y_true", "deviation", "lower_dev", "upper_dev"];

/// Renders a real with six significant digits. Infinities become `inf` and
/// `-inf`.
pub fn fmt_real(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float");
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Parses a real, accepting `inf`/`-inf` and rejecting NaN.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {s:?} as a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".to_string());
    }
    Ok(v)
}

/// Contents of the leading `#` line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub alphas: Vec<f64>,
    pub rng: Option<String>,
}

impl Metadata {
    pub fn new(seed: Option<u64>, alphas: &[Alpha], rng: Option<&str>) -> Self {
        Metadata {
            seed,
            alphas: alphas.iter().map(|a| a.get()).collect(),
            rng: rng.map(str::to_string),
        }
    }

    pub fn render(&self) -> String {
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        let alpha = if self.alphas.is_empty() {
            "-".to_string()
        } else {
            self.alphas.iter().map(|&a| fmt_real(a)).collect::<Vec<_>>().join(",")
        };
        let rng = self.rng.as_deref().unwrap_or("-");
        format!("# {TOOL_NAME} {TOOL_VERSION} seed={seed} alpha={alpha} rng={rng}")
    }

    /// Parses a line produced by [`Metadata::render`]. Unknown keys are
    /// ignored; returns `None` for non-comment lines.
    pub fn parse_line(line: &str) -> Option<Self> {
        let body = line.strip_prefix('#')?;
        let mut meta = Metadata::default();
        for token in body.split_whitespace() {
            let Some((key, value)) = token.split_once('=') else {
                continue;
            };
            if value == "-" {
                continue;
            }
            match key {
                "seed" => meta.seed = value.parse().ok(),
                "alpha" => {
                    meta.alphas = value.split(',').filter_map(|v| parse_real(v).ok()).collect()
                }
                "rng" => meta.rng = Some(value.to_string()),
                _ => {}
            }
        }
        Some(meta)
    }
}

/// Reads the metadata line of a file, if it has one.
pub fn read_metadata(path: &Path) -> Result<Option<Metadata>> {
    let mut text = String::new();
    open(path)?
        .take(4096)
        .read_to_string(&mut text)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(text.lines().next().and_then(Metadata::parse_line))
}

// ---------------------------------------------------------------------------
// writing

fn write_table<W, I>(mut out: W, meta: &Metadata, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    writeln!(out, "{}", meta.render())?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes ensembles, one row per pass. `truths`, when given, is parallel to
/// `ensembles` and adds the `y_true` column.
pub fn write_ensembles<W: Write>(
    out: W,
    ensembles: &[EnsemblePrediction],
    truths: Option<&[f64]>,
    meta: &Metadata,
) -> Result<()> {
    if let Some(t) = truths {
        if t.len() != ensembles.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: ensembles.len(),
            });
        }
    }
    let mut header = ENSEMBLE_COLUMNS.to_vec();
    if truths.is_some() {
        header.push(ENSEMBLE_TRUTH_COLUMN);
    }
    let rows = ensembles.iter().enumerate().flat_map(|(k, e)| {
        e.passes().iter().enumerate().map(move |(i, v)| {
            let mut row = vec![
                e.sample_id.to_string(),
                e.axis.to_string(),
                i.to_string(),
                fmt_real(*v),
            ];
            if let Some(t) = truths {
                row.push(fmt_real(t[k]));
            }
            row
        })
    });
    write_table(out, meta, &header, rows)
}

pub fn write_records<W: Write>(out: W, records: &[PredictionRecord], meta: &Metadata) -> Result<()> {
    let rows = records.iter().map(|r| {
        vec![
            r.sample_id.to_string(),
            r.axis.to_string(),
            fmt_real(r.y_true),
            fmt_real(r.y_hat),
            fmt_real(r.sigma),
        ]
    });
    write_table(out, meta, &RECORD_COLUMNS, rows)
}

pub fn write_calibrators<W: Write>(out: W, calibrators: &[Calibrator], meta: &Metadata) -> Result<()> {
    let rows = calibrators.iter().map(|c| {
        vec![
            c.axis.to_string(),
            fmt_real(c.alpha.get()),
            fmt_real(c.q),
            c.m.to_string(),
        ]
    });
    write_table(out, meta, &CALIBRATOR_COLUMNS, rows)
}

/// One predicted interval with its inputs and coverage outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRow {
    pub sample_id: SampleId,
    pub axis: Axis,
    pub alpha: f64,
    pub y_hat: f64,
    pub sigma: f64,
    pub lower: f64,
    pub upper: f64,
    pub covered: bool,
}

pub fn write_intervals<W: Write>(out: W, rows: &[IntervalRow], meta: &Metadata) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            r.sample_id.to_string(),
            r.axis.to_string(),
            fmt_real(r.alpha),
            fmt_real(r.y_hat),
            fmt_real(r.sigma),
            fmt_real(r.lower),
            fmt_real(r.upper),
            r.covered.to_string(),
        ]
    });
    write_table(out, meta, &INTERVAL_COLUMNS, rows)
}

pub fn write_report<W: Write>(out: W, reports: &[MetricsReport], meta: &Metadata) -> Result<()> {
    let rows = reports.iter().map(|r| {
        vec![
            r.axis.to_string(),
            fmt_real(r.alpha.get()),
            fmt_real(r.target_coverage()),
            fmt_real(r.picp),
            fmt_real(r.mpiw),
            fmt_real(r.interval_score),
            r.n.to_string(),
        ]
    });
    write_table(out, meta, &REPORT_COLUMNS, rows)
}

fn ser_real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(fmt_real(*x).parse().expect("formatted float"))
    } else {
        s.serialize_str(&fmt_real(*x))
    }
}

#[derive(Serialize)]
struct JsonReportRow {
    axis: Axis,
    unit: &'static str,
    #[serde(serialize_with = "ser_real")]
    alpha: f64,
    #[serde(serialize_with = "ser_real")]
    target_coverage: f64,
    #[serde(serialize_with = "ser_real")]
    picp: f64,
    #[serde(serialize_with = "ser_real")]
    mpiw: f64,
    #[serde(serialize_with = "ser_real")]
    interval_score: f64,
    n: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'static str,
    version: &'static str,
    seed: Option<u64>,
    rng: Option<&'a str>,
    reports: Vec<JsonReportRow>,
}

/// JSON mirror of [`write_report`]. Infinite values are the strings
/// `"inf"` / `"-inf"`.
pub fn write_report_json<W: Write>(mut out: W, reports: &[MetricsReport], meta: &Metadata) -> Result<()> {
    let doc = JsonReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        seed: meta.seed,
        rng: meta.rng.as_deref(),
        reports: reports
            .iter()
            .map(|r| JsonReportRow {
                axis: r.axis,
                unit: r.axis.unit(),
                alpha: r.alpha.get(),
                target_coverage: r.target_coverage(),
                picp: r.picp,
                mpiw: r.mpiw,
                interval_score: r.interval_score,
                n: r.n,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// One calibration-curve point of one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub axis: Axis,
    pub expected: f64,
    pub observed: f64,
}

pub fn write_curve<W: Write>(out: W, rows: &[CurveRow], meta: &Metadata) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            r.axis.to_string(),
            fmt_real(r.expected),
            fmt_real(r.observed),
        ]
    });
    write_table(out, meta, &CURVE_COLUMNS, rows)
}

/// One smoothed row of ordered-interval plot data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotRow {
    pub axis: Axis,
    pub rank: usize,
    pub y_true: f64,
    pub deviation: f64,
    pub lower_dev: f64,
    pub upper_dev: f64,
}

impl PlotRow {
    pub fn from_point(axis: Axis, p: &PlotPoint) -> Self {
        PlotRow {
            axis,
            rank: p.rank,
            y_true: p.y_true,
            deviation: p.deviation,
            lower_dev: p.lower_dev,
            upper_dev: p.upper_dev,
        }
    }
}

pub fn write_plot_data<W: Write>(out: W, rows: &[PlotRow], meta: &Metadata) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            r.axis.to_string(),
            r.rank.to_string(),
            fmt_real(r.y_true),
            fmt_real(r.deviation),
            fmt_real(r.lower_dev),
            fmt_real(r.upper_dev),
        ]
    });
    write_table(out, meta, &PLOT_COLUMNS, rows)
}

// ---------------------------------------------------------------------------
// reading

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// A CSV table with validated headers, yielding rows with their line number.
struct Table<R: Read> {
    origin: String,
    reader: csv::Reader<R>,
    columns: HashMap<String, usize>,
}

struct Row<'a> {
    origin: &'a str,
    line: u64,
    record: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl Row<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.origin.to_string(),
            line: self.line,
            message: message.into(),
        }
    }

    fn field(&self, name: &str) -> Result<&str> {
        let idx = self.columns[name];
        self.record
            .get(idx)
            .filter(|v| !v.is_empty())
            .ok_or_else(|| self.err(format!("missing value for {name}")))
    }

    fn real(&self, name: &str) -> Result<f64> {
        parse_real(self.field(name)?).map_err(|m| self.err(format!("{name}: {m}")))
    }

    fn finite(&self, name: &str) -> Result<f64> {
        let v = self.real(name)?;
        if !v.is_finite() {
            return Err(self.err(format!("{name} must be finite")));
        }
        Ok(v)
    }

    fn uint(&self, name: &str) -> Result<usize> {
        let raw = self.field(name)?;
        raw.parse()
            .map_err(|_| self.err(format!("{name}: {raw:?} is not a non-negative integer")))
    }

    fn axis(&self) -> Result<Axis> {
        self.field("axis")?
            .parse()
            .map_err(|e: Error| self.err(e.to_string()))
    }

    fn alpha(&self) -> Result<Alpha> {
        Alpha::new(self.real("alpha")?).map_err(|e| self.err(e.to_string()))
    }
}

impl Table<BufReader<File>> {
    fn open(path: &Path, required: &[&str], optional: &[&str]) -> Result<Self> {
        Table::from_reader(open(path)?, &path.display().to_string(), required, optional)
    }
}

impl<R: Read> Table<R> {
    fn from_reader(reader: R, origin: &str, required: &[&str], optional: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(reader);
        let format_err = |message: String| Error::Format {
            path: origin.to_string(),
            message,
        };
        let headers = reader.headers()?.clone();
        let mut columns = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if !required.contains(&h) && !optional.contains(&h) {
                return Err(format_err(format!("unknown column {h:?}")));
            }
            if columns.insert(h.to_string(), i).is_some() {
                return Err(format_err(format!("duplicate column {h:?}")));
            }
        }
        if let Some(missing) = required.iter().find(|c| !columns.contains_key(**c)) {
            return Err(format_err(format!("missing column {missing:?}")));
        }
        Ok(Table {
            origin: origin.to_string(),
            reader,
            columns,
        })
    }

    fn has(&self, column: &str) -> bool {
        self.columns.contains_key(column)
    }

    /// Calls `f` for every data row; fails on a header-only file.
    fn for_each_row(&mut self, mut f: impl FnMut(&Row<'_>) -> Result<()>) -> Result<()> {
        let mut record = csv::StringRecord::new();
        let mut count = 0usize;
        loop {
            match self.reader.read_record(&mut record) {
                Ok(false) => break,
                Ok(true) => {}
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line());
                    return Err(Error::Parse {
                        path: self.origin.clone(),
                        line,
                        message: e.to_string(),
                    });
                }
            }
            let line = record.position().map_or(0, |p| p.line());
            f(&Row {
                origin: &self.origin,
                line,
                record: &record,
                columns: &self.columns,
            })?;
            count += 1;
        }
        if count == 0 {
            return Err(Error::Format {
                path: self.origin.clone(),
                message: "no data rows".to_string(),
            });
        }
        Ok(())
    }
}

/// Ensembles grouped by `(sample_id, axis)`, with truths when the file
/// carries a `y_true` column.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSet {
    pub ensembles: Vec<EnsemblePrediction>,
    pub truths: Option<Vec<f64>>,
}

impl EnsembleSet {
    pub fn n_passes(&self) -> usize {
        self.ensembles.first().map_or(0, EnsemblePrediction::len)
    }
}

pub fn read_ensembles(path: &Path) -> Result<EnsembleSet> {
    let table = Table::open(path, &ENSEMBLE_COLUMNS, &[ENSEMBLE_TRUTH_COLUMN])?;
    parse_ensembles(table)
}

pub fn read_ensembles_from<R: Read>(reader: R, origin: &str) -> Result<EnsembleSet> {
    parse_ensembles(Table::from_reader(reader, origin, &ENSEMBLE_COLUMNS, &[ENSEMBLE_TRUTH_COLUMN])?)
}

struct Group {
    passes: BTreeMap<usize, f64>,
    truth: Option<f64>,
}

fn parse_ensembles<R: Read>(mut table: Table<R>) -> Result<EnsembleSet> {
    let with_truth = table.has(ENSEMBLE_TRUTH_COLUMN);
    let mut groups: BTreeMap<(SampleId, Axis), Group> = BTreeMap::new();
    table.for_each_row(|row| {
        let id = SampleId::new(row.field("sample_id")?);
        let axis = row.axis()?;
        let idx = row.uint("pass_idx")?;
        let value = row.finite("value")?;
        let truth = if with_truth {
            Some(row.finite(ENSEMBLE_TRUTH_COLUMN)?)
        } else {
            None
        };
        let group = groups.entry((id.clone(), axis)).or_insert(Group {
            passes: BTreeMap::new(),
            truth,
        });
        if group.truth != truth {
            return Err(row.err(format!("inconsistent y_true for ({id}, {axis})")));
        }
        if group.passes.insert(idx, value).is_some() {
            return Err(row.err(format!("duplicate pass {idx} for ({id}, {axis})")));
        }
        Ok(())
    })?;

    let origin = table.origin;
    let format_err = |message: String| Error::Format {
        path: origin.clone(),
        message,
    };
    let n = groups.values().next().map_or(0, |g| g.passes.len());
    let mut ensembles = Vec::with_capacity(groups.len());
    let mut truths = Vec::with_capacity(groups.len());
    for ((id, axis), group) in groups {
        if group.passes.len() != n {
            return Err(format_err(format!(
                "ragged ensemble ({id}, {axis}): {} passes, expected {n}",
                group.passes.len()
            )));
        }
        if group.passes.keys().enumerate().any(|(i, &k)| i != k) {
            return Err(format_err(format!(
                "ensemble ({id}, {axis}): pass indices must be 0..{}",
                n - 1
            )));
        }
        ensembles.push(EnsemblePrediction::new(id, axis, group.passes.into_values().collect())?);
        truths.extend(group.truth);
    }
    Ok(EnsembleSet {
        ensembles,
        truths: with_truth.then_some(truths),
    })
}

pub fn read_records(path: &Path) -> Result<Vec<PredictionRecord>> {
    parse_records(Table::open(path, &RECORD_COLUMNS, &[])?)
}

pub fn read_records_from<R: Read>(reader: R, origin: &str) -> Result<Vec<PredictionRecord>> {
    parse_records(Table::from_reader(reader, origin, &RECORD_COLUMNS, &[])?)
}

fn parse_records<R: Read>(mut table: Table<R>) -> Result<Vec<PredictionRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    table.for_each_row(|row| {
        let id = SampleId::new(row.field("sample_id")?);
        let axis = row.axis()?;
        let y_true = row.finite("y_true")?;
        let y_hat = row.finite("y_hat")?;
        let sigma = row.finite("sigma")?;
        if sigma < 0.0 {
            return Err(row.err(format!("sigma must be >= 0, got {sigma}")));
        }
        if !seen.insert((id.clone(), axis)) {
            return Err(row.err(format!("duplicate record ({id}, {axis})")));
        }
        out.push(PredictionRecord::new(id, axis, y_true, y_hat, sigma).map_err(|e| row.err(e.to_string()))?);
        Ok(())
    })?;
    Ok(out)
}

pub fn read_calibrators(path: &Path) -> Result<Vec<Calibrator>> {
    let mut table = Table::open(path, &CALIBRATOR_COLUMNS, &[])?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    table.for_each_row(|row| {
        let axis = row.axis()?;
        let alpha = row.alpha()?;
        let q = row.real("q")?;
        let m = row.uint("m")?;
        if !seen.insert((axis, alpha.get().to_bits())) {
            return Err(row.err(format!("duplicate calibrator ({axis}, alpha={alpha})")));
        }
        out.push(Calibrator::from_parts(axis, alpha, q, m).map_err(|e| row.err(e.to_string()))?);
        Ok(())
    })?;
    Ok(out)
}

pub fn read_intervals(path: &Path) -> Result<Vec<IntervalRow>> {
    let mut table = Table::open(path, &INTERVAL_COLUMNS, &[])?;
    let mut out = Vec::new();
    table.for_each_row(|row| {
        let covered = match row.field("covered")? {
            "true" => true,
            "false" => false,
            other => return Err(row.err(format!("covered: expected true or false, got {other:?}"))),
        };
        let lower = row.real("lower")?;
        let upper = row.real("upper")?;
        if lower > upper {
            return Err(row.err(format!("lower {lower} exceeds upper {upper}")));
        }
        out.push(IntervalRow {
            sample_id: SampleId::new(row.field("sample_id")?),
            axis: row.axis()?,
            alpha: row.alpha()?.get(),
            y_hat: row.finite("y_hat")?,
            sigma: row.finite("sigma")?,
            lower,
            upper,
            covered,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn read_report(path: &Path) -> Result<Vec<MetricsReport>> {
    let mut table = Table::open(path, &REPORT_COLUMNS, &[])?;
    let mut out = Vec::new();
    table.for_each_row(|row| {
        out.push(MetricsReport {
            axis: row.axis()?,
            alpha: row.alpha()?,
            picp: row.finite("picp")?,
            mpiw: row.real("mpiw")?,
            interval_score: row.real("interval_score")?,
            n: row.uint("n")?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>> {
    let mut table = Table::open(path, &CURVE_COLUMNS, &[])?;
    let mut out = Vec::new();
    table.for_each_row(|row| {
        out.push(CurveRow {
            axis: row.axis()?,
            expected: row.finite("expected")?,
            observed: row.finite("observed")?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn read_plot_data(path: &Path) -> Result<Vec<PlotRow>> {
    let mut table = Table::open(path, &PLOT_COLUMNS, &[])?;
    let mut out = Vec::new();
    table.for_each_row(|row| {
        out.push(PlotRow {
            axis: row.axis()?,
            rank: row.uint("rank")?,
            y_true: row.finite("y_true")?,
            deviation: row.real("deviation")?,
            lower_dev: row.real("lower_dev")?,
            upper_dev: row.real("upper_dev")?,
        });
        Ok(())
    })?;
    Ok(out)
}
