use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use jpr_core::bootstrap::BootstrapSpec;
use jpr_core::forecasters::{forecast_path, FittedModel, ForecasterSpec};
use jpr_core::harness::{
    emit_report, generate_synthetic, parse_bootstrap, parse_forecaster, read_series, rolling_eval,
    write_series_csv, ExperimentConfig, SyntheticSpec,
};
use jpr_core::regions::{
    bootstrap_errors, kfwe_region, BootstrapConfig, Method, Sided, SigmaMode, DEFAULT_INNER_REPLICATES,
};
use jpr_core::TimeSeries;

/// Joint prediction regions for multi-step time-series forecasts.
#[derive(Parser, Debug)]
#[command(name = "jpr", version)]
struct Cli {
    /// Worker threads [default: all cores]
    #[arg(long, global = true, env = "JPR_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a forecaster and print its fit statistics
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Write point forecasts for the next H values
    Forecast {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Forecast horizon
        #[arg(long = "H")]
        horizon: usize,
        /// Output CSV [default: stdout]
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a joint prediction region for the next H values
    Region(RegionArgs),
    /// Run the rolling-window coverage/width experiment
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        /// Experiment file of `key = value` lines; must set `B` and `seed`
        #[arg(long)]
        config: PathBuf,
        /// Report CSV [default: stdout]
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic trend + seasonal + noise series
    Simulate {
        /// Number of observations
        #[arg(long, default_value_t = 3651)]
        length: usize,
        /// Seasonal period
        #[arg(long, default_value_t = 30)]
        period: usize,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        baseline: f64,
        /// Trend per step
        #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
        slope: f64,
        /// Scale of the seasonal shape
        #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
        amplitude: f64,
        /// Standard deviation of the Gaussian noise
        #[arg(long, default_value_t = 5.0)]
        noise_sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV [default: stdout]
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Series CSV with header `value` or `t,value` [default: stdin]
    #[arg(long)]
    input: Option<PathBuf>,
    /// Fill missing values with the mean of their observed neighbours
    #[arg(long)]
    fill_missing: bool,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// ses, holt, hw(m), ar(p), arima(p,d), sarima(p,d,D,m); parameters may be `auto`
    #[arg(long, default_value = "ar(auto)", value_parser = parse_forecaster_arg)]
    forecaster: ForecasterSpec,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Region construction
    #[arg(long, value_enum, default_value_t = MethodArg::Kfwe)]
    method: MethodArg,
    /// Familywise error level
    #[arg(long)]
    alpha: f64,
    /// Tolerated misses plus one
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Forecast horizon
    #[arg(long = "H")]
    horizon: usize,
    /// Bootstrap replicates
    #[arg(long = "B", default_value_t = 1000)]
    replicates: usize,
    /// model, mbb[(l)], cbb[(l)], bob(outer,inner), stationary(mean), sieve[(p)], decomposed(m[,inner])
    #[arg(long, default_value = "model")]
    bootstrap: String,
    /// Standard deviation of Gaussian jitter added to each replicate
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// How replicate errors are standardized
    #[arg(long, value_enum, default_value_t = SigmaArg::Shared)]
    sigma: SigmaArg,
    /// Inner replicates per outer replicate for `--sigma double`
    #[arg(long, default_value_t = DEFAULT_INNER_REPLICATES)]
    inner: usize,
    /// Two-sided band or a one-sided bound (k-FWE only)
    #[arg(long, value_enum, default_value_t = SidedArg::Two)]
    sided: SidedArg,
    /// Master seed; replicate b draws from stream b
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Kfwe,
    Bonferroni,
    Bh,
    Sidak,
    Scheffe,
    Np,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Kfwe => Method::Kfwe,
            MethodArg::Bonferroni => Method::Bonferroni,
            MethodArg::Bh => Method::Bh,
            MethodArg::Sidak => Method::Sidak,
            MethodArg::Scheffe => Method::Scheffe,
            MethodArg::Np => Method::Np,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SigmaArg {
    Shared,
    Double,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SidedArg {
    Two,
    Lower,
    Upper,
}

fn parse_forecaster_arg(s: &str) -> std::result::Result<ForecasterSpec, String> {
    parse_forecaster(s).map_err(|e| e.to_string())
}

fn usage_error(kind: ErrorKind, message: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, message).exit()
}

fn read_input(input: &InputArgs) -> Result<TimeSeries> {
    match &input.input {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("harness::read_series: cannot open {}", p.display()))?;
            read_series(f, input.fill_missing).context("harness::read_series")
        }
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).context("harness::read_series: stdin")?;
            read_series(buf.as_slice(), input.fill_missing).context("harness::read_series")
        }
    }
}

/// Buffers the whole output so a failed command leaves no partial file.
fn write_output(path: Option<&Path>, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            out.write_all(body)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn describe(model: &FittedModel) -> String {
    match model {
        FittedModel::Ar(m) => format!(
            "ar order={} d={} seasonal_d={} period={} intercept={} coefficients={:?} innovation_sd={}",
            m.order, m.d, m.seasonal_d, m.period, m.intercept, m.coefficients, m.innovation_sd
        ),
        FittedModel::Smoothing(s) => format!(
            "{:?} alpha={} beta={} gamma={} period={} level={} trend={}",
            s.kind, s.alpha, s.beta, s.gamma, s.period, s.level, s.trend
        ),
    }
}

fn region(args: &RegionArgs) -> Result<Vec<u8>> {
    let method = Method::from(args.method);
    let sided = match args.sided {
        SidedArg::Two => Sided::Two,
        SidedArg::Lower => Sided::Lower,
        SidedArg::Upper => Sided::Upper,
    };
    if method != Method::Kfwe && sided != Sided::Two {
        usage_error(ErrorKind::ArgumentConflict, "--sided lower/upper needs --method kfwe");
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        usage_error(ErrorKind::InvalidValue, "--alpha must lie in (0, 1)");
    }
    if args.horizon == 0 || args.k == 0 || args.k > args.horizon {
        usage_error(ErrorKind::InvalidValue, "need 1 <= --k <= --H");
    }
    let forecaster = args.model.forecaster;
    let bootstrap: BootstrapSpec = match parse_bootstrap(&args.bootstrap, &forecaster) {
        Ok(b) => b.with_smoothing(args.jitter),
        Err(e) => usage_error(ErrorKind::InvalidValue, format!("--bootstrap: {e}")),
    };
    if args.replicates < 1000 {
        eprintln!(
            "warning: B = {} is below 1000; tail quantiles will be coarse",
            args.replicates
        );
    }
    let series = read_input(&args.input)?;
    let config = BootstrapConfig {
        horizon: args.horizon,
        replicates: args.replicates,
        sigma_mode: match args.sigma {
            SigmaArg::Shared => SigmaMode::Shared,
            SigmaArg::Double => SigmaMode::Double { inner: args.inner },
        },
        seed: args.seed,
    };
    let region = if method == Method::Kfwe {
        kfwe_region(series.values(), &forecaster, &bootstrap, &config, args.k, args.alpha, sided)
            .context("regions::kfwe_region")?
    } else {
        let run = bootstrap_errors(series.values(), &forecaster, &bootstrap, &config)
            .context("regions::bootstrap_errors")?;
        run.region(method, args.alpha, args.k, sided)
            .with_context(|| format!("regions::{method}_region"))?
    };
    let mut buf = Vec::new();
    region.write_csv(&mut buf)?;
    Ok(buf)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { input, model } => {
            let series = read_input(&input)?;
            let (fitted, report) = model.forecaster.fit(series.values()).context("forecasters::fit")?;
            let body = format!(
                "model: {}\nlog_likelihood: {}\nn_params: {}\nn_obs: {}\naic: {}\nbic: {}\n",
                describe(&fitted),
                report.log_likelihood,
                report.n_params,
                report.n_obs,
                report.aic,
                report.bic
            );
            write_output(None, body.as_bytes())
        }
        Command::Forecast {
            input,
            model,
            horizon,
            output,
        } => {
            let series = read_input(&input)?;
            let (fitted, _) = model.forecaster.fit(series.values()).context("forecasters::fit")?;
            let path = forecast_path(&fitted, horizon).context("forecasters::forecast_path")?;
            let mut body = String::new();
            match &path.sigma {
                Some(s) => {
                    body.push_str("h,point,sigma\n");
                    for (i, (p, s)) in path.point.iter().zip(s).enumerate() {
                        body.push_str(&format!("{},{p},{s}\n", i + 1));
                    }
                }
                None => {
                    body.push_str("h,point\n");
                    for (i, p) in path.point.iter().enumerate() {
                        body.push_str(&format!("{},{p}\n", i + 1));
                    }
                }
            }
            write_output(output.as_deref(), body.as_bytes())
        }
        Command::Region(args) => {
            let body = region(&args)?;
            write_output(args.output.as_deref(), &body)
        }
        Command::Evaluate {
            input,
            config,
            output,
        } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => usage_error(ErrorKind::InvalidValue, format!("--config {}: {e}", config.display())),
            };
            if cfg.replicates < 1000 {
                eprintln!("warning: B = {} is below 1000; tail quantiles will be coarse", cfg.replicates);
            }
            let series = read_input(&input)?;
            let report = rolling_eval(&series, &cfg).context("harness::rolling_eval")?;
            match output {
                Some(p) => emit_report(&report, &p).context("harness::emit_report"),
                None => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf).context("harness::emit_report")?;
                    write_output(None, &buf)
                }
            }
        }
        Command::Simulate {
            length,
            period,
            baseline,
            slope,
            amplitude,
            noise_sd,
            seed,
            output,
        } => {
            let spec = SyntheticSpec {
                length,
                period,
                baseline,
                slope,
                amplitude,
                noise_sd,
                seed,
            };
            let series = generate_synthetic(&spec).context("harness::generate_synthetic")?;
            let mut buf = Vec::new();
            write_series_csv(series.values(), &mut buf)?;
            write_output(output.as_deref(), &buf)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.into()).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(e.into()),
        },
        None => run(cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
