use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zkb_core::diagnostics::NormKind;

use zkb_harness::commands::cdep::{cdep, CdepOptions};
use zkb_harness::commands::constants::constants;
use zkb_harness::commands::fit::fit_decay;
use zkb_harness::commands::simulate::simulate;
use zkb_harness::commands::sweep::{sweep, SweepOptions, DEFAULT_AMPLITUDES};
use zkb_harness::commands::verify::{verify, Suite, VerifyOptions};
use zkb_harness::config::{parse_real, parse_real_list};
use zkb_harness::json::to_pretty;
use zkb_harness::series::format_real;
use zkb_harness::{Exit, HarnessError, Result, RunConfig, PAPER_REF};

/// Zakharov-Kuznetsov-Burgers decay experiments.
///
/// Exit codes: 0 clean, 1 usage or I/O error, 2 contaminated run,
/// 3 blow-up, 4 failed verdict.
#[derive(Parser)]
#[command(name = "zkb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the decay constants for a strip width.
    Constants {
        /// Strip width; accepts expressions such as `pi/2`.
        #[arg(long = "B", allow_hyphen_values = true)]
        width: String,
    },
    /// Run one configuration and write a run directory.
    Simulate {
        /// Config file, or `paper-ref`.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an inequality suite on the seeded corpus, or the energy balance.
    Verify {
        /// energy, steklov, gn or sup.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Strip width of the inequality corpus.
        #[arg(long = "B", default_value = "pi", allow_hyphen_values = true)]
        width: String,
        /// Base configuration of the energy suite.
        #[arg(long, default_value = PAPER_REF)]
        config: String,
        /// Directory for the energy runs; nothing is written without it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the decay rate of a stored run and compare it with chi.
    FitDecay {
        /// Run directory.
        #[arg(long, alias = "run")]
        out: PathBuf,
        /// Column to fit; defaults to the run's experiment setting.
        #[arg(long)]
        norm: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t1: Option<f64>,
    },
    /// Run a grid of strip widths and amplitudes.
    Sweep {
        /// Template config file, or `paper-ref`.
        #[arg(long, default_value = PAPER_REF)]
        config: String,
        /// Comma-separated strip widths, e.g. `pi/2,pi,2*pi`.
        #[arg(long = "B")]
        widths: String,
        /// Comma-separated multiples of the weak-solution threshold.
        #[arg(long)]
        amplitudes: Option<String>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the growth of perturbations of size eps and eps/2.
    Cdep {
        #[arg(long, default_value = PAPER_REF)]
        config: String,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn real_arg(name: &str, text: &str) -> Result<f64> {
    parse_real(text).ok_or_else(|| HarnessError::Usage(format!("{name}: not a number: {text:?}")))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dispatch(command: Command) -> Result<Exit> {
    match command {
        Command::Constants { width } => {
            print!("{}", to_pretty(&constants(&width)?));
            Ok(Exit::Clean)
        }
        Command::Simulate { config, out } => {
            let config = RunConfig::load(&config)?;
            let outcome = simulate(&config, &out)?;
            let m = &outcome.manifest;
            println!("status: {}", m.status);
            if let Some(t) = m.blow_up_time {
                println!("blow-up at t = {}", format_real(t));
            }
            if let Some(t) = m.contamination_time {
                println!("contaminated from t = {}", format_real(t));
            }
            if let Some(r) = m.energy_residual {
                println!("energy residual: {}", format_real(r));
            }
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", out.display());
            Ok(outcome.record.exit())
        }
        Command::Verify { suite, samples, seed, width, config, out } => {
            let opts = VerifyOptions {
                suite: suite.parse::<Suite>()?,
                samples,
                seed,
                width: real_arg("--B", &width)?,
                config: RunConfig::load(&config)?,
                out,
            };
            let report = verify(&opts)?;
            print!("{}", to_pretty(&report));
            println!(
                "{} {}: {} of {} checks hold",
                verdict(report.all_hold()),
                report.suite,
                report.checks - report.failures,
                report.checks
            );
            Ok(report.exit())
        }
        Command::FitDecay { out, norm, t0, t1 } => {
            let norm = norm.map(|n| n.parse::<NormKind>()).transpose()?;
            let report = fit_decay(&out, norm, t0, t1)?;
            print!("{}", to_pretty(&report));
            println!(
                "{} fitted {} rate {} vs chi {} (threshold {})",
                verdict(report.pass),
                report.norm,
                format_real(report.rate),
                format_real(report.chi),
                format_real(report.threshold)
            );
            Ok(if report.pass { Exit::Clean } else { Exit::VerdictFailed })
        }
        Command::Sweep { config, widths, amplitudes, workers, out } => {
            let opts = SweepOptions {
                template: RunConfig::load(&config)?,
                widths: parse_real_list(&widths)?,
                amplitudes: match amplitudes {
                    Some(a) => parse_real_list(&a)?,
                    None => DEFAULT_AMPLITUDES.to_vec(),
                },
                workers,
                out,
            };
            let report = sweep(&opts)?;
            for c in &report.cells {
                println!(
                    "cell {:>3}  B={:.6}  a={:.3}  {:<22} {:<12} {}",
                    c.index,
                    c.width,
                    c.amplitude_factor,
                    if c.in_scope { "in scope" } else { "outside theorem scope" },
                    c.status,
                    c.verdict
                );
            }
            println!("wrote {}", opts.out.join("summary.csv").display());
            Ok(report.exit())
        }
        Command::Cdep { config, eps, out } => {
            let opts = CdepOptions {
                config: RunConfig::load(&config)?,
                eps: real_arg("--eps", &eps)?,
                out,
            };
            let report = cdep(&opts)?;
            if report.verdict == "identical" {
                println!("identical: eps = 0 leaves the initial data unchanged");
                return Ok(Exit::Clean);
            }
            println!("status: {}", report.status);
            println!("growth(eps)   = {}", format_real(report.growth_eps));
            println!("growth(eps/2) = {}", format_real(report.growth_half));
            println!("ratio         = {}", format_real(report.ratio));
            println!("verdict: {}", report.verdict);
            Ok(report.exit())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage.code() as u8 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(exit) => ExitCode::from(exit.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit().code() as u8)
        }
    }
}
