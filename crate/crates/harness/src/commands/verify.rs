use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use zkb_core::corpus::random_field;
use zkb_core::solver::initial::separable_samples;
use zkb_core::{
    constants_for_width, energy_residual, verify_gn, verify_steklov, verify_sup_lemma, Field64,
    Geometry64, Grid64, InequalityCheck, InitialData64, RunStatus,
};

use crate::config::{Amplitude, InitialSpec, RunConfig};
use crate::error::{Exit, HarnessError, Result};
use crate::run::{execute, persist};

/// Largest relative energy-balance defect accepted by the energy suite.
pub const ENERGY_TOLERANCE: f64 = 1e-6;

/// Corpus grid: half-length, `Nx`, `Ny`.
const CORPUS_GRID: (f64, usize, usize) = (10.0, 128, 8);
/// `δ` values tried for every field in the sup suite, with `δ₁ = 1`.
const SUP_DELTAS: [f64; 3] = [0.1, 1.0, 10.0];
/// Tolerance of the Steklov equality and `1/j²` ratio checks.
const STEKLOV_EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Energy,
    Steklov,
    Gn,
    Sup,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Energy => "energy",
            Suite::Steklov => "steklov",
            Suite::Gn => "gn",
            Suite::Sup => "sup",
        }
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy" => Ok(Suite::Energy),
            "steklov" => Ok(Suite::Steklov),
            "gn" => Ok(Suite::Gn),
            "sup" => Ok(Suite::Sup),
            other => Err(HarnessError::Usage(format!(
                "unknown suite {other:?} (energy, steklov, gn, sup)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    /// Strip width for the inequality suites.
    pub width: f64,
    /// Base configuration of the energy suite.
    pub config: RunConfig,
    /// Where the energy suite keeps its run directories, if anywhere.
    pub out: Option<PathBuf>,
}

/// One evaluated case.
#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs)/rhs` for inequalities; `tolerance − defect` otherwise.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub checks: usize,
    pub failures: usize,
    pub worst: Option<Case>,
    /// Extra exactness checks (Steklov equality and mode ratios).
    pub exact: Vec<Case>,
    /// Set when an energy run blew up.
    pub blow_up: bool,
}

impl SuiteReport {
    pub fn exit(&self) -> Exit {
        if self.blow_up {
            Exit::BlowUp
        } else if self.failures == 0 {
            Exit::Clean
        } else {
            Exit::VerdictFailed
        }
    }

    pub fn all_hold(&self) -> bool {
        self.failures == 0 && !self.blow_up
    }

    fn from_cases(opts: &VerifyOptions, cases: Vec<Case>, exact: Vec<Case>, blow_up: bool) -> Self {
        let failures = cases.iter().chain(&exact).filter(|c| !c.holds).count();
        let worst = cases
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .cloned();
        SuiteReport {
            suite: opts.suite.name().to_string(),
            samples: opts.samples,
            seed: opts.seed,
            checks: cases.len() + exact.len(),
            failures,
            worst,
            exact,
            blow_up,
        }
    }
}

fn inequality_case(label: String, c: InequalityCheck<f64>) -> Case {
    Case {
        label,
        lhs: c.lhs,
        rhs: c.rhs,
        margin: c.relative_margin(),
        holds: c.holds,
    }
}

fn corpus_grid(width: f64) -> Result<(Arc<Grid64>, f64)> {
    let b = constants_for_width(width)?.b_star;
    let (lx, nx, ny) = CORPUS_GRID;
    Ok((Grid64::new(Geometry64::new(width, lx, nx, ny, b)?)?, b))
}

/// `u = φ(x)w_j(y)` on `grid`.
fn separable(grid: &Arc<Grid64>, mode: usize, phi: impl Fn(f64) -> f64) -> Result<Field64> {
    Ok(Field64::from_physical(grid, &separable_samples(grid, mode, phi))?)
}

/// Steklov equality on the first mode and the `1/j²` ratio law.
fn steklov_exactness(grid: &Arc<Grid64>, b: f64) -> Result<Vec<Case>> {
    let exact = |label: String, value: f64, target: f64| {
        let defect = (value - target).abs() / target;
        Case {
            label,
            lhs: value,
            rhs: target,
            margin: STEKLOV_EXACT_TOL - defect,
            holds: defect <= STEKLOV_EXACT_TOL,
        }
    };
    let first = verify_steklov(&separable(grid, 1, |x| (-x * x / 2.0).exp() * (1.0 + 0.3 * x))?, b);
    let mut cases = vec![exact("equality j=1".into(), first.lhs, first.rhs)];
    for j in 1..=grid.ny().min(8) {
        let c = verify_steklov(&separable(grid, j, |x| (-x * x).exp())?, b);
        cases.push(exact(format!("ratio j={j}"), c.lhs / c.rhs, 1.0 / (j * j) as f64));
    }
    Ok(cases)
}

fn inequality_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let (grid, b) = corpus_grid(opts.width)?;
    let mut cases = Vec::new();
    for n in 0..opts.samples {
        let seed = opts.seed.wrapping_add(n as u64);
        let u = random_field(&grid, seed)?;
        match opts.suite {
            Suite::Steklov => cases.push(inequality_case(format!("seed {seed}"), verify_steklov(&u, b))),
            Suite::Gn => cases.push(inequality_case(format!("seed {seed}"), verify_gn(&u))),
            Suite::Sup => {
                for delta in SUP_DELTAS {
                    let c = verify_sup_lemma(&u, b, delta, 1.0)?;
                    cases.push(inequality_case(format!("seed {seed}, delta {delta}"), c));
                }
            }
            Suite::Energy => unreachable!("energy suite runs simulations"),
        }
    }
    let exact = if opts.suite == Suite::Steklov {
        steklov_exactness(&grid, b)?
    } else {
        Vec::new()
    };
    Ok(SuiteReport::from_cases(opts, cases, exact, false))
}

/// Configuration of the `n`-th energy run. Run 0 is the base
/// configuration; later runs move, widen and change the mode of a Gaussian
/// of the same norm, drawn from the seeded generator.
fn energy_config(base: &RunConfig, rng: &mut ChaCha8Rng, n: usize) -> Result<RunConfig> {
    let mut config = base.clone();
    if n == 0 {
        return Ok(config);
    }
    let resolved = base.resolve()?;
    let (_, init) = crate::run::initial_field(&resolved)?;
    let lx = base.geometry.half_length;
    let modes = base.geometry.ny.min(3);
    config.initial = InitialSpec::Gaussian {
        amplitude: Amplitude::Norm(init.l2),
        center: (rng.random::<f64>() - 0.5) * 0.1 * lx,
        sigma: 1.0 + 2.0 * rng.random::<f64>(),
        mode: 1 + (rng.random::<f64>() * modes as f64) as usize % modes,
    };
    Ok(config)
}

fn energy_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cases = Vec::new();
    let mut blow_up = false;
    for n in 0..opts.samples {
        let config = energy_config(&opts.config, &mut rng, n)?;
        let resolved = config.resolve()?;
        let label = match &resolved.initial {
            InitialData64::GaussianMode { center, width, mode, .. } => {
                format!("run {n}: gaussian x0={center:.3} s={width:.3} j={mode}")
            }
            other => format!("run {n}: {}", other.kind()),
        };
        let record = execute(&resolved, &label)?;
        if let Some(dir) = &opts.out {
            let report = json!({ "suite": "energy", "run": n });
            persist(&dir.join(format!("run_{n:03}")), "verify", &config, &resolved, &record, report)?;
        }
        if let RunStatus::BlowUp { .. } = record.series.status {
            blow_up = true;
            cases.push(Case {
                label,
                lhs: f64::INFINITY,
                rhs: ENERGY_TOLERANCE,
                margin: f64::NEG_INFINITY,
                holds: false,
            });
            continue;
        }
        let residual = energy_residual(&record.series)?;
        cases.push(Case {
            label,
            lhs: residual,
            rhs: ENERGY_TOLERANCE,
            margin: ENERGY_TOLERANCE - residual,
            holds: residual < ENERGY_TOLERANCE,
        });
    }
    Ok(SuiteReport::from_cases(opts, cases, Vec::new(), blow_up))
}

pub fn verify(opts: &VerifyOptions) -> Result<SuiteReport> {
    if opts.samples < 1 {
        return Err(HarnessError::Usage("samples must be ≥ 1".into()));
    }
    match opts.suite {
        Suite::Energy => energy_suite(opts),
        _ => inequality_suite(opts),
    }
}
