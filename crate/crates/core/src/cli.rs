//! `lssvm train | predict | scale | generate`, modeled on LIBSVM's
//! `svm-train`, `svm-predict` and `svm-scale`.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 runtime error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datagen::{generate_planes_report, PlanesConfig, DEFAULT_GAP, DEFAULT_NOISE};
use crate::error::Error;
use crate::io::{format_g, parse_libsvm_raw, parse_model, write_libsvm, write_libsvm_raw, write_model, RawData, ScalingParams};
use crate::kernel::KernelConfig;
use crate::param::{Parameter, Precision};
use crate::predict::{label_for, Predictor};
use crate::solver::train;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lssvm", version, about = "Least-squares SVM training and prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model from a LIBSVM data file
    Train(TrainArgs),
    /// Predict labels for a LIBSVM data file
    Predict(PredictArgs),
    /// Scale features to an interval
    Scale(ScaleArgs),
    /// Generate a synthetic two-class "planes" data set
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Single,
    Double,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Kernel: 0 linear, 1 polynomial, 2 radial basis function
    #[arg(short = 't', default_value_t = 0)]
    kernel: u8,
    /// Polynomial degree
    #[arg(short = 'd', default_value_t = 3)]
    degree: u32,
    /// Kernel gamma (default 1/num_features)
    #[arg(short = 'g')]
    gamma: Option<f64>,
    /// Polynomial coef0
    #[arg(short = 'r', default_value_t = 0.0, allow_negative_numbers = true)]
    coef0: f64,
    /// Cost C
    #[arg(short = 'c', default_value_t = 1.0)]
    cost: f64,
    /// Relative residual bound for the CG solver
    #[arg(short = 'e', default_value_t = 1e-6)]
    epsilon: f64,
    /// Maximum CG iterations (default: number of points - 1)
    #[arg(short = 'i')]
    max_iterations: Option<usize>,
    /// Feature-wise partitions (linear kernel only)
    #[arg(long, default_value_t = 1)]
    partitions: usize,
    /// Row and feature block sizes, e.g. 8x8
    #[arg(long, default_value = "8x8")]
    block: String,
    /// Worker threads for the solver (default: available cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Floating-point precision of the solver
    #[arg(long, value_enum, default_value = "double")]
    precision: PrecisionArg,
    /// Training data in LIBSVM format
    data: PathBuf,
    /// Model output (default: DATA.model)
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Worker threads (default: available cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Test data in LIBSVM format
    test: PathBuf,
    model: PathBuf,
    /// One predicted label per line
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ScaleArgs {
    /// Lower bound of the target interval
    #[arg(short = 'l', default_value_t = -1.0, allow_negative_numbers = true)]
    lower: f64,
    /// Upper bound of the target interval
    #[arg(short = 'u', default_value_t = 1.0, allow_negative_numbers = true)]
    upper: f64,
    /// Write the fitted ranges to this file
    #[arg(long, conflicts_with = "restore")]
    save: Option<PathBuf>,
    /// Scale with ranges read from this file
    #[arg(long)]
    restore: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(short = 'o')]
    output: Option<PathBuf>,
    /// Data in LIBSVM format
    data: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of points
    #[arg(short = 'm')]
    points: usize,
    /// Number of features
    #[arg(short = 'd')]
    features: usize,
    /// Fraction of labels drawn again at random
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    noise: f64,
    /// Distance between the two cluster centers
    #[arg(long, default_value_t = DEFAULT_GAP)]
    gap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file
    #[arg(short = 'o')]
    output: PathBuf,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Parameter(_) | Error::OverPartition { .. } => Failure::usage(err.to_string()),
            _ => Failure::runtime(err.to_string()),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::runtime(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_block(text: &str) -> Result<(usize, usize), Failure> {
    let parsed = text
        .split_once(['x', 'X'])
        .and_then(|(r, f)| Some((r.parse().ok()?, f.parse().ok()?)));
    match parsed {
        Some((r, f)) if r > 0 && f > 0 => Ok((r, f)),
        _ => Err(Failure::usage(format!(
            "invalid --block {text:?}: expected ROWSxFEATURES with positive sizes"
        ))),
    }
}

fn kernel_from_args(args: &TrainArgs, num_features: usize) -> Result<KernelConfig, Failure> {
    let gamma = args.gamma.unwrap_or(1.0 / num_features as f64);
    match args.kernel {
        0 => Ok(KernelConfig::linear()),
        1 => Ok(KernelConfig::polynomial(gamma, args.degree, args.coef0)),
        2 => Ok(KernelConfig::radial(gamma)),
        3 => Err(Failure::usage("kernel type 3 (sigmoid) is not supported")),
        4 => Err(Failure::usage("kernel type 4 (precomputed) is not supported")),
        t => Err(Failure::usage(format!("unknown kernel type {t}"))),
    }
}

fn secs(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn cmd_train(args: TrainArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (row_block, feature_block) = parse_block(&args.block)?;
    if args.kernel > 2 {
        kernel_from_args(&args, 1)?;
    }
    let total = Instant::now();

    let start = Instant::now();
    let raw = parse_libsvm_raw(open(&args.data)?).map_err(with_path(&args.data))?;
    let read_time = secs(start);

    let start = Instant::now();
    let dataset = raw
        .into_dataset(row_block, feature_block)
        .map_err(with_path(&args.data))?;
    let transform_time = secs(start);

    let kernel = kernel_from_args(&args, dataset.num_features())?;
    let params = Parameter {
        kernel,
        cost: args.cost,
        epsilon: args.epsilon,
        max_iterations: args.max_iterations,
        row_block,
        feature_block,
        partitions: args.partitions,
        threads: args.threads.unwrap_or_else(default_threads),
        precision: match args.precision {
            PrecisionArg::Single => Precision::Single,
            PrecisionArg::Double => Precision::Double,
        },
    };
    params.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let start = Instant::now();
    let (model, trace) = train(&dataset, &params)?;
    let solve_time = secs(start);

    let model_path = args.model.clone().unwrap_or_else(|| {
        let mut p = args.data.clone().into_os_string();
        p.push(".model");
        PathBuf::from(p)
    });
    let start = Instant::now();
    let mut writer = create(&model_path)?;
    write_model(&model, &mut writer)
        .and_then(|_| writer.flush().map_err(Error::from))
        .map_err(with_path(&model_path))?;
    let write_time = secs(start);

    let report = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(
            out,
            "points = {}, features = {}, kernel = {}",
            dataset.num_points(),
            dataset.num_features(),
            kernel.kind
        )?;
        if kernel.kind != crate::kernel::KernelKind::Linear {
            writeln!(out, "gamma = {}", format_g(kernel.gamma, 17))?;
        }
        writeln!(
            out,
            "iterations = {} ({}), relative residual = {:e}",
            trace.iterations,
            if trace.converged { "converged" } else { "not converged" },
            trace.final_residual() / trace.residual_norms[0].max(f64::MIN_POSITIVE)
        )?;
        if !trace.converged {
            writeln!(out, "warning: CG stopped at the iteration limit before reaching epsilon")?;
        }
        writeln!(out, "read: {read_time:.6} s")?;
        writeln!(out, "transform: {transform_time:.6} s")?;
        writeln!(out, "cg: {solve_time:.6} s")?;
        writeln!(out, "write: {write_time:.6} s")?;
        writeln!(out, "total: {:.6} s", secs(total))?;
        writeln!(out, "model written to {}", model_path.display())
    };
    report(out).map_err(|e| Failure::runtime(e.to_string()))
}

fn cmd_predict(args: PredictArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let test = parse_libsvm_raw(open(&args.test)?).map_err(with_path(&args.test))?;
    let model_file = File::open(&args.model)
        .map_err(|e| Failure::runtime(format!("cannot open model file {}: {e}", args.model.display())))?;
    let model = parse_model(BufReader::new(model_file)).map_err(with_path(&args.model))?;

    let predictor = Predictor::new(&model);
    let values = predictor
        .decision_values(&test.dense_rows(), args.threads.unwrap_or_else(default_threads))
        .map_err(with_path(&args.test))?;

    let mut writer = create(&args.output)?;
    let mut correct = 0;
    for (value, truth) in values.iter().zip(&test.labels) {
        let predicted = model.label_map.original(label_for(*value));
        if predicted == truth {
            correct += 1;
        }
        writeln!(writer, "{predicted}").map_err(|e| Failure::runtime(e.to_string()))?;
    }
    writer.flush().map_err(|e| Failure::runtime(e.to_string()))?;

    if !values.is_empty() {
        let percent = 100.0 * correct as f64 / values.len() as f64;
        writeln!(out, "Accuracy = {}% ({correct}/{})", format_g(percent, 4), values.len())
            .map_err(|e| Failure::runtime(e.to_string()))?;
    }
    Ok(())
}

fn cmd_scale(args: ScaleArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let raw = parse_libsvm_raw(open(&args.data)?).map_err(with_path(&args.data))?;
    let mut rows = raw.dense_rows();
    let params = match &args.restore {
        Some(path) => ScalingParams::read(open(path)?).map_err(with_path(path))?,
        None => ScalingParams::fit_rows(&rows, raw.num_features, args.lower, args.upper)
            .map_err(|e| Failure::usage(e.to_string()))?,
    };
    if let Some(path) = &args.save {
        let mut w = create(path)?;
        params
            .write(&mut w)
            .and_then(|_| w.flush().map_err(Error::from))
            .map_err(with_path(path))?;
    }
    params.apply_rows(&mut rows).map_err(with_path(&args.data))?;
    let scaled = RawData::from_dense(&raw.labels, &rows);
    match &args.output {
        Some(path) => {
            let mut w = create(path)?;
            write_libsvm_raw(&scaled, &mut w)
                .and_then(|_| w.flush().map_err(Error::from))
                .map_err(with_path(path))
        }
        None => write_libsvm_raw(&scaled, out).map_err(Failure::from),
    }
}

fn cmd_generate(args: GenerateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = PlanesConfig {
        points: args.points,
        features: args.features,
        noise: args.noise,
        gap: args.gap,
        seed: args.seed,
    };
    let (dataset, report) = generate_planes_report(&cfg).map_err(|e| Failure::usage(e.to_string()))?;
    let mut w = create(&args.output)?;
    write_libsvm(&dataset, &mut w)
        .and_then(|_| w.flush().map_err(Error::from))
        .map_err(with_path(&args.output))?;
    writeln!(
        out,
        "generated {} points with {} features; reassigned {} labels ({} changed class)",
        args.points, args.features, report.reassigned, report.changed
    )
    .map_err(|e| Failure::runtime(e.to_string()))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a, out),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Scale(a) => cmd_scale(a, out),
        Command::Generate(a) => cmd_generate(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
