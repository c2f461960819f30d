//! `dwd`: train, predict and benchmark generalized DWD classifiers on LIBSVM
//! data.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use dwd_core::ingest::{read_libsvm, read_model, write_model};
use dwd_core::solver::{error_rate, Backend, LinearModel, SolverConfig};
use dwd_core::{train_file, TrainOptions, TrainReport};

const HEADER: &str = "Data\tn\td\tC\tIter\tTime(s)\tpsqmr|double\tTrain-error(%)";

#[derive(Parser)]
#[command(name = "dwd", version, about = "Generalized distance weighted discrimination via inexact sGS-ADMM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier and write its model file.
    Train(TrainArgs),
    /// Predict labels with a trained model.
    Predict(PredictArgs),
    /// Train on several datasets and print the results table.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Exponent of the DWD loss.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Penalty parameter; computed from the data when absent.
    #[arg(long = "C")]
    c: Option<f64>,
    /// Linear-system backend: auto, direct, smw2 or iterative.
    #[arg(long, default_value = "auto")]
    solver: Backend,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Weight of the splitting constraint.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Eigenpairs kept by the proximal backend.
    #[arg(long, default_value_t = 10)]
    ell: usize,
    /// Run the directly extended ADMM instead of the sGS variant.
    #[arg(long)]
    no_sgs: bool,
    /// Worker threads for the linear algebra kernels.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Label file; labels go to standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated dataset paths.
    #[arg(long, value_delimiter = ',', required = true)]
    datasets: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Datasets trained concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Print `-` in the time column.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(&args),
        Command::Predict(args) => cmd_predict(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

impl SolverArgs {
    fn options(&self) -> TrainOptions {
        TrainOptions {
            config: SolverConfig {
                q: self.q,
                max_iter: self.max_iter,
                backend: self.solver,
                use_sgs: !self.no_sgs,
                ell: self.ell,
                mu: self.mu,
                seed: self.seed,
                ..SolverConfig::default()
            },
            c_override: self.c,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool, String> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            if t == 0 {
                return Err("--threads must be at least 1".into());
            }
            builder = builder.num_threads(t);
        }
        builder.build().map_err(|e| e.to_string())
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().unwrap_or(path.as_os_str()).to_string_lossy().into_owned()
}

fn bench_row(name: &str, r: &TrainReport, timing: bool) -> String {
    let time = if timing { format!("{:.2}", r.total_time()) } else { "-".into() };
    format!(
        "{name}\t{}\t{}\t{:.2e}\t{}\t{time}\t{}|{}\t{:.2}",
        r.n, r.d, r.c_used, r.result.iterations, r.result.psqmr_total, r.result.double_count, r.train_error_pct
    )
}

fn cmd_train(args: &TrainArgs) -> Result<u8, String> {
    let pool = args.solver.pool()?;
    let opts = args.solver.options();
    let report = pool.install(|| train_file(&args.data, &opts)).map_err(|e| e.to_string())?;
    if let Some(path) = &args.model_out {
        write_model(&report.to_model_file(), path).map_err(|e| e.to_string())?;
    }
    println!("{}", bench_row(&dataset_name(&args.data), &report, true));
    if report.result.converged {
        Ok(0)
    } else {
        eprintln!("warning: stopped after {} iterations without converging", report.result.iterations);
        Ok(2)
    }
}

fn cmd_predict(args: &PredictArgs) -> Result<u8, String> {
    let file = read_model(&args.model).map_err(|e| e.to_string())?;
    let model = LinearModel::from_model_file(&file).map_err(|e| e.to_string())?;
    let data = read_libsvm(&args.data).map_err(|e| e.to_string())?;
    let decision = model.decision_values(&data.x).map_err(|e| e.to_string())?;
    let mut labels = String::with_capacity(3 * decision.len());
    for &f in &decision {
        labels.push_str(if f > 0.0 { "1\n" } else { "-1\n" });
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &args.out {
        Some(path) => std::fs::write(path, labels).map_err(|e| format!("{}: {e}", path.display()))?,
        None => out.write_all(labels.as_bytes()).map_err(|e| e.to_string())?,
    }
    if let Some(y) = &data.labels {
        let err = error_rate(&decision, y).map_err(|e| e.to_string())?;
        writeln!(out, "Error(%)\t{err:.2}").map_err(|e| e.to_string())?;
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, String> {
    if args.datasets.is_empty() || args.datasets.iter().any(|p| p.as_os_str().is_empty()) {
        return Err("--datasets needs at least one path".into());
    }
    if args.jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    let pool = args.solver.pool()?;
    let opts = args.solver.options();
    let rows: Vec<Mutex<Option<(String, bool)>>> = args.datasets.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.min(args.datasets.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = args.datasets.get(i) else { break };
                let name = dataset_name(path);
                let row = match pool.install(|| train_file(path, &opts)) {
                    Ok(report) => (bench_row(&name, &report, !args.no_timing), true),
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        (format!("{name}\tERROR\t{e}"), false)
                    }
                };
                *rows[i].lock().unwrap() = Some(row);
            });
        }
    });

    let mut table = format!("{HEADER}\n");
    let mut any_ok = false;
    for row in rows {
        let (line, ok) = row.into_inner().unwrap().expect("every dataset is processed");
        table.push_str(&line.replace('\n', " "));
        table.push('\n');
        any_ok |= ok;
    }
    match &args.out {
        Some(path) => std::fs::write(path, &table).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{table}"),
    }
    Ok(if any_ok { 0 } else { 1 })
}
