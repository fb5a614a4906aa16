#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use logitkit::data_model::{load_csv, read_schema, write_csv};
use logitkit::estimator::FitConfig;
use logitkit::simulator::{generate, SynthSpec};
use logitkit::Dataset;
use logitkit_cli::report::{describe_report, fit_report, tabulate_report, FitOptions};
use logitkit_cli::validate::{self, Fault, ValidateOptions};
use logitkit_cli::{EXIT_INPUT, EXIT_OK, EXIT_SEPARATION, EXIT_VALIDATION};

#[derive(Parser)]
#[command(
    name = "logitkit",
    version,
    about = "Binary logistic regression for survey data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standard deviation, mean and CV(%) of every variable
    Describe {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Frequency table of one variable
    Tabulate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        variable: String,
        /// Comma-separated bin edges, bins are [a, b)
        #[arg(long, value_delimiter = ',')]
        edges: Option<Vec<f64>>,
        #[arg(long)]
        json: bool,
    },
    /// CV screen, logit fit, Wald and G tests, goodness of fit, association
    Fit {
        #[command(flatten)]
        input: Input,
        /// Exclude predictors whose |CV| is below this percentage (0 disables)
        #[arg(long, default_value_t = 10.0)]
        cv_threshold: f64,
        #[arg(long, default_value_t = 10)]
        hl_groups: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// L2 penalty on slopes
        #[arg(long, default_value_t = 0.0)]
        ridge: f64,
        #[arg(long)]
        json: bool,
    },
    /// Generate a dataset from a synthetic-data JSON description
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the matching schema JSON
        #[arg(long)]
        schema_out: Option<PathBuf>,
        /// Override the seed in the simulation spec file
        #[arg(long)]
        seed: Option<u64>,
        /// Override the row count in the simulation spec file
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the oracle, coverage and pair-counting checks
    Validate {
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        oracle_instances: usize,
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Args)]
struct Input {
    /// Data CSV with a header row
    data: PathBuf,
    /// Schema JSON: array of {name, role, description}
    schema: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    NoStepHalving,
    OneIteration,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::NoStepHalving => Fault::NoStepHalving,
            FaultArg::OneIteration => Fault::OneIteration,
        }
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn load(input: &Input) -> anyhow::Result<Dataset> {
    let schema = read_schema(open(&input.schema)?)
        .with_context(|| format!("schema {}", input.schema.display()))?;
    let ds = load_csv(open(&input.data)?, &schema)
        .with_context(|| format!("data {}", input.data.display()))?;
    Ok(ds)
}

fn emit<T: serde::Serialize>(
    json: bool,
    doc: &T,
    text: impl FnOnce() -> String,
) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, doc)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", text())?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Describe { input, json } => {
            let doc = describe_report(&load(&input)?);
            emit(json, &doc, || doc.to_text())?;
            Ok(EXIT_OK)
        }
        Command::Tabulate {
            input,
            variable,
            edges,
            json,
        } => {
            let doc = tabulate_report(&load(&input)?, &variable, edges.as_deref())?;
            emit(json, &doc, || doc.to_text())?;
            Ok(EXIT_OK)
        }
        Command::Fit {
            input,
            cv_threshold,
            hl_groups,
            alpha,
            max_iter,
            tol,
            ridge,
            json,
        } => {
            if !(cv_threshold >= 0.0) {
                bail!("--cv-threshold must be non-negative");
            }
            let opts = FitOptions {
                cv_threshold,
                hl_groups,
                alpha,
                config: FitConfig {
                    max_iterations: max_iter,
                    tolerance: tol,
                    ridge,
                    ..FitConfig::default()
                },
            };
            let ds = load(&input)?;
            let doc = fit_report(&ds, &opts).context("fit failed")?;
            emit(json, &doc, || doc.to_text())?;
            for f in doc.failures() {
                eprintln!("error: {f}");
            }
            Ok(if doc.flags.separation {
                eprintln!("warning: separation detected");
                EXIT_SEPARATION
            } else if doc.has_failed_section() {
                EXIT_INPUT
            } else {
                EXIT_OK
            })
        }
        Command::Simulate {
            spec,
            out,
            schema_out,
            seed,
            n,
        } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("cannot read {}", spec.display()))?;
            let mut s =
                SynthSpec::from_json(&text).with_context(|| format!("spec {}", spec.display()))?;
            if let Some(seed) = seed {
                s = s.with_seed(seed);
            }
            if let Some(n) = n {
                s = s.with_n(n);
            }
            let ds = generate(&s)?;
            let file =
                File::create(&out).with_context(|| format!("cannot create {}", out.display()))?;
            write_csv(&ds, BufWriter::new(file))?;
            if let Some(path) = schema_out {
                let file = File::create(&path)
                    .with_context(|| format!("cannot create {}", path.display()))?;
                let mut w = BufWriter::new(file);
                serde_json::to_writer_pretty(&mut w, &s.schema())?;
                writeln!(w)?;
            }
            let rate = ds.response().iter().sum::<f64>() / ds.n() as f64;
            println!("seed: {}", s.seed);
            println!("rows: {}", ds.n());
            println!("response rate: {rate:.4}");
            Ok(EXIT_OK)
        }
        Command::Validate {
            replicates,
            seed,
            oracle_instances,
            json,
            inject_fault,
        } => {
            let opts = ValidateOptions {
                replicates,
                seed,
                oracle_instances,
                fault: inject_fault.map(Fault::from),
                ..ValidateOptions::default()
            };
            let report = validate::run(&opts);
            emit(json, &report, || report.to_text())?;
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    };
    ExitCode::from(code as u8)
}
