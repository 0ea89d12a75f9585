//! The `mcdcp` command-line interface.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags, refusing to
//! overwrite), 2 for data errors (unreadable or invalid input files).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::conformal::{min_calibration_size, CalibrationScores, Calibrator, IntervalPredictor, NormalBaseline};
use crate::error::Error;
use crate::exec::Execution;
use crate::io::{self, CurveRow, IntervalRow, Metadata, PlotRow};
use crate::metrics::{calibration_curve, evaluate, ordered_plot_data, MetricsReport};
use crate::synthetic::{simulate_samples, NoiseFamily, NoiseModel, SimConfig, Trial, RNG_ALGORITHM};
use crate::types::{Alpha, Axis, Interval, PredictionRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

pub const DEFAULT_WINDOW: usize = 51;

/// File names written by `simulate` into its output directory.
pub const ENSEMBLES_FILE: &str = "ensembles.csv";
pub const CALIBRATION_FILE: &str = "calibration.csv";
pub const TEST_FILE: &str = "test.csv";

#[derive(Debug, Parser)]
#[command(
    name = "mcdcp",
    version,
    about = "Conformal prediction intervals for Monte Carlo dropout ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trial: ensembles plus calibration/test records.
    Simulate(SimulateArgs),
    /// Reduce an ensemble file (with y_true) to prediction records.
    Aggregate(AggregateArgs),
    /// Fit per-axis conformal quantiles on calibration records.
    Calibrate(CalibrateArgs),
    /// Write one prediction interval per test record and alpha.
    Predict(PredictArgs),
    /// Report PICP, MPIW and interval score per axis and alpha.
    Evaluate(PredictArgs),
    /// Observed versus expected coverage over an alpha grid.
    Curve(CurveArgs),
    /// Ordered, smoothed interval data for plotting.
    Plotdata(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output path (stdout when omitted, where the command allows it).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    #[value(name = "student_t")]
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Baseline {
    #[default]
    Conformal,
    Normal,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Forward passes per ensemble.
    #[arg(long, default_value_t = 25)]
    pub passes: usize,
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    pub noise: NoiseArg,
    /// Degrees of freedom for student_t noise.
    #[arg(long, default_value_t = NoiseFamily::DEFAULT_DOF)]
    pub dof: f64,
    #[arg(long, default_value_t = 1.0)]
    pub base_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hetero_scale: f64,
    #[arg(long, default_value_t = 0.5)]
    pub calib_fraction: f64,
    /// Half-width of the translation decalibration range, in cm.
    #[arg(long, default_value_t = 10.0)]
    pub trans_range_cm: f64,
    /// Half-width of the rotation decalibration range, in degrees.
    #[arg(long, default_value_t = 1.0)]
    pub rot_range_deg: f64,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Calibration records.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated miscoverage levels [default: 0.1,0.05,0.01].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Test records.
    #[arg(long)]
    pub input: PathBuf,
    /// Calibrator file written by `calibrate`.
    #[arg(long)]
    pub calibrator: Option<PathBuf>,
    /// Comma-separated miscoverage levels. Selects calibrator rows, or sets
    /// the levels for the normal baseline [default: 0.1,0.05,0.01].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Baseline::Conformal)]
    pub baseline: Baseline,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Test records.
    #[arg(long)]
    pub input: PathBuf,
    /// Calibration records.
    #[arg(long)]
    pub calib_input: PathBuf,
    /// Comma-separated miscoverage levels [default: 0.01,0.02,...,0.99].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Test records.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub calibrator: Option<PathBuf>,
    /// Single miscoverage level to plot.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Baseline::Conformal)]
    pub baseline: Baseline,
    /// Moving-average window (odd).
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

pub fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Aggregate(a) => cmd_aggregate(&a, stdout),
        Command::Calibrate(a) => cmd_calibrate(&a, stdout, stderr),
        Command::Predict(a) => cmd_predict(&a, stdout),
        Command::Evaluate(a) => cmd_evaluate(&a, stdout, stderr),
        Command::Curve(a) => cmd_curve(&a, stdout),
        Command::Plotdata(a) => cmd_plotdata(&a, stdout),
    }
}

fn parse_alphas(raw: &[f64], default: impl FnOnce() -> Vec<Alpha>) -> CliResult<Vec<Alpha>> {
    if raw.is_empty() {
        return Ok(default());
    }
    let mut out: Vec<Alpha> = Vec::with_capacity(raw.len());
    for &a in raw {
        let alpha = Alpha::new(a).map_err(|e| CliError::Usage(e.to_string()))?;
        if out.contains(&alpha) {
            return Err(CliError::Usage(format!("alpha {a} given twice")));
        }
        out.push(alpha);
    }
    Ok(out)
}

/// `0.01, 0.02, ..., 0.99`.
pub fn default_curve_alphas() -> Vec<Alpha> {
    (1..100)
        .map(|i| Alpha::new(f64::from(i) / 100.0).expect("grid inside (0, 1)"))
        .collect()
}

fn ensure_writable(path: &Path, force: bool) -> CliResult<()> {
    if path.exists() && !force {
        return Err(CliError::Usage(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| {
        CliError::Data(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn emit(out: &OutputArgs, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match &out.output {
        Some(path) => write_file(path, bytes),
        None => stdout.write_all(bytes).map_err(|e| CliError::Data(e.into())),
    }
}

fn check_output(out: &OutputArgs) -> CliResult<()> {
    match &out.output {
        Some(p) => ensure_writable(p, out.force),
        None => Ok(()),
    }
}

fn input_metadata(path: &Path) -> Metadata {
    io::read_metadata(path).ok().flatten().unwrap_or_default()
}

fn group_by_axis(records: Vec<PredictionRecord>) -> BTreeMap<Axis, Vec<PredictionRecord>> {
    let mut map: BTreeMap<Axis, Vec<PredictionRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.axis).or_default().push(r);
    }
    map
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let family = match args.noise {
        NoiseArg::Gaussian => NoiseFamily::Gaussian,
        NoiseArg::StudentT => NoiseFamily::StudentT { dof: args.dof },
    };
    let config = SimConfig {
        seed: args.seed,
        n_samples: args.samples,
        n_passes: args.passes,
        noise: NoiseModel {
            family,
            base_scale: args.base_scale,
            hetero_scale: args.hetero_scale,
        },
        trans_range_cm: args.trans_range_cm,
        rot_range_deg: args.rot_range_deg,
        calib_fraction: args.calib_fraction,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let paths = [ENSEMBLES_FILE, CALIBRATION_FILE, TEST_FILE].map(|f| args.output.join(f));
    for p in &paths {
        ensure_writable(p, args.force)?;
    }

    let samples = simulate_samples(&config, Execution::default())?;
    let trial = Trial::from_samples(&samples, &config)?;
    let meta = Metadata::new(Some(config.seed), &[], Some(RNG_ALGORITHM));

    let ensembles: Vec<_> = samples.iter().flat_map(|s| s.ensembles.iter().cloned()).collect();
    let truths: Vec<f64> = samples.iter().flat_map(|s| s.truth).collect();
    let mut buf = Vec::new();
    io::write_ensembles(&mut buf, &ensembles, Some(&truths), &meta)?;
    write_file(&paths[0], &buf)?;

    // sample-major, axis-minor
    let interleave = |side: fn(&crate::synthetic::AxisSplit) -> &Vec<PredictionRecord>| {
        let n = side(&trial.axes[0]).len();
        (0..n)
            .flat_map(|i| trial.axes.iter().map(move |a| side(a)[i].clone()))
            .collect::<Vec<_>>()
    };
    let calibration = interleave(|a| &a.calibration);
    let test = interleave(|a| &a.test);
    for (path, records) in [(&paths[1], &calibration), (&paths[2], &test)] {
        let mut buf = Vec::new();
        io::write_records(&mut buf, records, &meta)?;
        write_file(path, &buf)?;
    }
    writeln!(
        stdout,
        "calibration: {} samples, test: {} samples, {} axes, {} passes",
        trial.calibration_ids.len(),
        trial.test_ids.len(),
        Axis::ALL.len(),
        config.n_passes
    )
    .map_err(|e| CliError::Data(e.into()))?;
    Ok(())
}

pub fn cmd_aggregate(args: &AggregateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    check_output(&args.out)?;
    let set = io::read_ensembles(&args.input)?;
    let truths = set.truths.ok_or_else(|| Error::Format {
        path: args.input.display().to_string(),
        message: "no y_true column; records need ground truth".to_string(),
    })?;
    let records = set
        .ensembles
        .iter()
        .zip(truths)
        .map(|(e, t)| crate::ensemble::aggregate_record(e, t))
        .collect::<Result<Vec<_>, _>>()?;
    let meta = input_metadata(&args.input);
    let mut buf = Vec::new();
    io::write_records(&mut buf, &records, &meta)?;
    emit(&args.out, &buf, stdout)
}

fn overflow_warning(c: &Calibrator) -> String {
    format!(
        "warning: axis {}, alpha={}: m={} calibration samples cannot support {}% coverage, q=inf; \
         increase calibration set to at least {} samples",
        c.axis,
        c.alpha,
        c.m,
        io::fmt_real(100.0 * c.alpha.target_coverage()),
        min_calibration_size(c.alpha)
    )
}

pub fn cmd_calibrate(args: &CalibrateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let alphas = parse_alphas(&args.alpha, Alpha::defaults)?;
    check_output(&args.out)?;
    let records = io::read_records(&args.input)?;
    let mut calibrators = Vec::new();
    for (_, axis_records) in group_by_axis(records) {
        let scores = CalibrationScores::from_records(&axis_records)?;
        for &alpha in &alphas {
            let c = scores.calibrator(alpha);
            if c.is_unbounded() {
                let _ = writeln!(stderr, "{}", overflow_warning(&c));
            }
            calibrators.push(c);
        }
    }
    let src = input_metadata(&args.input);
    let meta = Metadata::new(src.seed, &alphas, src.rng.as_deref());
    let mut buf = Vec::new();
    io::write_calibrators(&mut buf, &calibrators, &meta)?;
    emit(&args.out, &buf, stdout)
}

/// Interval method selected on the command line.
#[derive(Debug, Clone, Copy)]
enum Predictor {
    Conformal(Calibrator),
    Normal(NormalBaseline),
}

impl IntervalPredictor for Predictor {
    fn alpha(&self) -> Alpha {
        match self {
            Predictor::Conformal(c) => c.alpha,
            Predictor::Normal(n) => n.alpha(),
        }
    }

    fn interval(&self, y_hat: f64, sigma: f64) -> Interval {
        match self {
            Predictor::Conformal(c) => c.interval(y_hat, sigma),
            Predictor::Normal(n) => n.interval(y_hat, sigma),
        }
    }
}

type PredictorTable = BTreeMap<Axis, Vec<Predictor>>;

/// Predictors for every axis in `axes`, in alpha order.
fn predictors(
    baseline: Baseline,
    calibrator: Option<&Path>,
    alphas: &[f64],
    axes: &[Axis],
) -> CliResult<(PredictorTable, Vec<Alpha>)> {
    let mut out = BTreeMap::new();
    match baseline {
        Baseline::Normal => {
            let alphas = parse_alphas(alphas, Alpha::defaults)?;
            for &axis in axes {
                out.insert(
                    axis,
                    alphas.iter().map(|&a| Predictor::Normal(NormalBaseline::new(a))).collect(),
                );
            }
            Ok((out, alphas))
        }
        Baseline::Conformal => {
            let requested = parse_alphas(alphas, Vec::new)?;
            let path = calibrator.ok_or_else(|| {
                CliError::Usage("--calibrator is required unless --baseline normal".to_string())
            })?;
            let calibrators = io::read_calibrators(path)?;
            let mut used: Vec<Alpha> = Vec::new();
            for &axis in axes {
                let for_axis: Vec<Calibrator> = calibrators.iter().filter(|c| c.axis == axis).copied().collect();
                let selected: Vec<Calibrator> = if requested.is_empty() {
                    if for_axis.is_empty() {
                        return Err(CliError::Data(Error::Format {
                            path: path.display().to_string(),
                            message: format!("no calibrator for axis {axis}"),
                        }));
                    }
                    for_axis
                } else {
                    requested
                        .iter()
                        .map(|&a| {
                            for_axis
                                .iter()
                                .find(|c| (c.alpha.get() - a.get()).abs() < 1e-12)
                                .copied()
                                .ok_or(Error::MissingCalibrator { axis, alpha: a.get() })
                        })
                        .collect::<Result<_, _>>()?
                };
                for c in &selected {
                    if !used.contains(&c.alpha) {
                        used.push(c.alpha);
                    }
                }
                out.insert(axis, selected.into_iter().map(Predictor::Conformal).collect());
            }
            Ok((out, used))
        }
    }
}

pub fn cmd_predict(args: &PredictArgs, stdout: &mut dyn Write) -> CliResult<()> {
    check_output(&args.out)?;
    let records = io::read_records(&args.input)?;
    let axes: Vec<Axis> = group_by_axis(records.clone()).into_keys().collect();
    let (by_axis, alphas) = predictors(args.baseline, args.calibrator.as_deref(), &args.alpha, &axes)?;
    let mut rows = Vec::new();
    for r in &records {
        for p in &by_axis[&r.axis] {
            let interval = p.interval(r.y_hat, r.sigma);
            rows.push(IntervalRow {
                sample_id: r.sample_id.clone(),
                axis: r.axis,
                alpha: p.alpha().get(),
                y_hat: r.y_hat,
                sigma: r.sigma,
                lower: interval.lower,
                upper: interval.upper,
                covered: interval.covers(r.y_true),
            });
        }
    }
    let src = input_metadata(&args.input);
    let meta = Metadata::new(src.seed, &alphas, src.rng.as_deref());
    let mut buf = Vec::new();
    io::write_intervals(&mut buf, &rows, &meta)?;
    emit(&args.out, &buf, stdout)
}

/// Path of the JSON mirror written next to a CSV report.
pub fn json_mirror_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn cmd_evaluate(args: &PredictArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    check_output(&args.out)?;
    let json_path = args.out.output.as_deref().map(json_mirror_path);
    if let (Some(json), Some(csv)) = (&json_path, &args.out.output) {
        if json == csv {
            return Err(CliError::Usage(
                "report output must not have a .json extension; the JSON mirror is written alongside".to_string(),
            ));
        }
        ensure_writable(json, args.out.force)?;
    }
    let records = io::read_records(&args.input)?;
    let by_axis_records = group_by_axis(records);
    let axes: Vec<Axis> = by_axis_records.keys().copied().collect();
    let (by_axis, alphas) = predictors(args.baseline, args.calibrator.as_deref(), &args.alpha, &axes)?;

    let jobs: Vec<(Axis, Predictor)> = by_axis
        .iter()
        .flat_map(|(&axis, ps)| ps.iter().map(move |&p| (axis, p)))
        .collect();
    for (_, p) in &jobs {
        if let Predictor::Conformal(c) = p {
            if c.is_unbounded() {
                let _ = writeln!(stderr, "{}", overflow_warning(c));
            }
        }
    }
    let reports: Vec<MetricsReport> =
        Execution::default().try_map(&jobs, |(axis, p)| evaluate(&by_axis_records[axis], p))?;

    let src = input_metadata(&args.input);
    let meta = Metadata::new(src.seed, &alphas, src.rng.as_deref());
    let mut buf = Vec::new();
    io::write_report(&mut buf, &reports, &meta)?;
    emit(&args.out, &buf, stdout)?;
    if let Some(json) = json_path {
        let mut buf = Vec::new();
        io::write_report_json(&mut buf, &reports, &meta)?;
        write_file(&json, &buf)?;
    }
    Ok(())
}

pub fn cmd_curve(args: &CurveArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let alphas = parse_alphas(&args.alpha, default_curve_alphas)?;
    check_output(&args.out)?;
    let test = group_by_axis(io::read_records(&args.input)?);
    let calib = group_by_axis(io::read_records(&args.calib_input)?);
    let mut jobs = Vec::new();
    for (axis, records) in &test {
        let c = calib.get(axis).ok_or_else(|| Error::Format {
            path: args.calib_input.display().to_string(),
            message: format!("no calibration records for axis {axis}"),
        })?;
        jobs.push((*axis, records, c));
    }
    let curves = Execution::default().try_map(&jobs, |(axis, records, c)| {
        calibration_curve(records, c, &alphas).map(|pts| {
            pts.into_iter()
                .map(|p| CurveRow {
                    axis: *axis,
                    expected: p.expected,
                    observed: p.observed,
                })
                .collect::<Vec<_>>()
        })
    })?;
    let rows: Vec<CurveRow> = curves.into_iter().flatten().collect();
    let src = input_metadata(&args.input);
    let meta = Metadata::new(src.seed, &alphas, src.rng.as_deref());
    let mut buf = Vec::new();
    io::write_curve(&mut buf, &rows, &meta)?;
    emit(&args.out, &buf, stdout)
}

pub fn cmd_plotdata(args: &PlotArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if args.window == 0 || args.window.is_multiple_of(2) {
        return Err(CliError::Usage(Error::InvalidWindow(args.window).to_string()));
    }
    let alpha = Alpha::new(args.alpha).map_err(|e| CliError::Usage(e.to_string()))?;
    check_output(&args.out)?;
    let test = group_by_axis(io::read_records(&args.input)?);
    let axes: Vec<Axis> = test.keys().copied().collect();
    let (by_axis, _) = predictors(args.baseline, args.calibrator.as_deref(), &[alpha.get()], &axes)?;
    let mut rows = Vec::new();
    for (axis, records) in &test {
        let p = &by_axis[axis][0];
        let intervals: Vec<Interval> = records.iter().map(|r| p.interval(r.y_hat, r.sigma)).collect();
        let points = ordered_plot_data(records, &intervals, args.window)?;
        rows.extend(points.iter().map(|pt| PlotRow::from_point(*axis, pt)));
    }
    let src = input_metadata(&args.input);
    let meta = Metadata::new(src.seed, &[alpha], src.rng.as_deref());
    let mut buf = Vec::new();
    io::write_plot_data(&mut buf, &rows, &meta)?;
    emit(&args.out, &buf, stdout)
}
