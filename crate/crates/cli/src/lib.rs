//! Command-line front end for `negdep`.
//!
//! [`run`] takes an argument vector and returns the exit code together with
//! what should go to stdout and stderr, so the whole interface can be driven
//! in-process. Exit codes: 0 on success, 1 when a requested check or bound
//! fails, 2 on invalid input.

pub mod parse;
pub mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use negdep::bounds::{
    binomial_approx_bound, binomial_chain_bound, concentration, cor_order_bound, dw_var_bound,
    hyp1_bound, lightbulb_entropy_bound, mp_bound, mp_tv_bound, nb_bounds, polya_bounds,
    thm_pois_bounds, BoundReport, ConcentrationKind, Tail,
};
use negdep::entropy::{
    compound_entropy_check, entropy_flow, max_entropy_check, EntropyTarget, FlowChain,
};
use negdep::metrics::{self, MetricSpec, MetricValue};
use negdep::models::{nr_check, tnd_check, NrMode};
use negdep::orderings::{
    check_eq_order1, check_order_tol, default_tolerance, fs_random_oracle, OrderingReport, Relation,
};
use negdep::transforms::{
    bin_lemma_residual, hyper_thin, lemma1_residual, markov_chain, markov_step, plus_transform,
    size_bias, thin, u_alpha, v_op, AlphaPath,
};
use negdep::{Pmf, DEFAULT_TAIL_EPS};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] negdep::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "negdep",
    version,
    about = "Exact checks of Poisson and binomial approximation bounds"
)]
struct Cli {
    /// Truncation mass for laws with unbounded support.
    #[arg(long, global = true, default_value_t = DEFAULT_TAIL_EPS)]
    tail_eps: f64,
    /// Tolerance overriding the default of the chosen check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format (entropy-flow defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a distribution and its moments.
    Dist {
        #[arg(long)]
        dist: String,
    },
    /// Apply an operator to a distribution.
    Transform(TransformArgs),
    /// Check a stochastic order or a dependence condition.
    OrderCheck(OrderArgs),
    /// Compute a distance `d_{n,p}` or one of its named cases.
    Metric(MetricArgs),
    /// Evaluate a bound next to the exact value it controls.
    Bound(BoundArgs),
    /// Entropy along the thinning path or the binomial chain.
    EntropyFlow(FlowArgs),
    /// Check an exact identity numerically.
    Verify(VerifyArgs),
    /// Run a replication suite.
    Report {
        #[arg(long, value_enum)]
        suite: suites::Suite,
        /// Range of n for the lightbulb suite, e.g. 10..30.
        #[arg(long)]
        n: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformOp {
    Thin,
    SizeBias,
    V,
    UAlpha,
    HyperThin,
    Plus,
    MarkovStep,
    MarkovChain,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum)]
    op: TransformOp,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<usize>,
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// Distribution under test (not needed for tnd and nr).
    #[arg(long)]
    dist: Option<String>,
    /// st, icx, cx, <s>-cx, size-bias (W* <=_{s-cx} W + 1), tnd or nr.
    #[arg(long)]
    relation: String,
    /// poisson, binomial (with --n) or a distribution.
    #[arg(long)]
    target: Option<String>,
    /// Order s for the size-bias relation.
    #[arg(long, default_value_t = 1)]
    s: u32,
    #[arg(long)]
    n: Option<usize>,
    /// Joint indicator table (JSON file) for tnd and nr.
    #[arg(long)]
    table: Option<String>,
    /// Use randomised increasing functions for nr instead of enumeration.
    #[arg(long)]
    trials: Option<usize>,
    /// Also search for a violating test function with this many trials.
    #[arg(long)]
    oracle: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Tv,
    Kolmogorov,
    Wasserstein,
    StopLoss,
    LocalLimit,
}

#[derive(Debug, Args)]
struct MetricArgs {
    #[arg(long)]
    dist: String,
    /// poisson, binomial (with --binomial-n) or a distribution.
    #[arg(long)]
    target: String,
    #[arg(long, value_enum)]
    name: Option<MetricName>,
    /// Difference order n of d_{n,p}.
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i32>,
    /// Norm exponent p of d_{n,p}; `inf` for the sup norm.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    binomial_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundName {
    Hyp1,
    CorOrder,
    ThmPois,
    DwVar,
    Concentration,
    Mp,
    MpTv,
    Nb,
    Polya,
    BinomialApprox,
    BinomialChain,
    Lightbulb,
    MaxEntropy,
    CompoundEntropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TailArg {
    Upper,
    Lower,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    name: BoundName,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i32>,
    #[arg(long)]
    s: Option<u32>,
    /// Binomial size, lightbulb size or mixed Poisson difference order.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    /// Deviation for concentration, steps for the binomial chain.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum)]
    tail: Option<TailArg>,
    /// Concentration family: poisson (default) or binomial.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Mixing law: atoms:x,w;x,w  gamma:shape,scale  beta:a,b  negbin:beta,q.
    #[arg(long)]
    mix: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    red: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Metric order for the binomial chain bound.
    #[arg(long, allow_negative_numbers = true)]
    metric_n: Option<i32>,
    #[arg(long)]
    metric_p: Option<String>,
    /// poisson or binomial, for the entropy bounds.
    #[arg(long)]
    target: Option<String>,
    /// Summand law of the compound sum.
    #[arg(long)]
    summand: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChainArg {
    Alpha,
    Binomial,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum, default_value = "alpha")]
    chain: ChainArg,
    /// Comma-separated grid; defaults to 0, 0.1, …, 1 or 0, 1, …, steps.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LemmaArg {
    #[value(name = "1")]
    Thinning,
    #[value(name = "bin")]
    Binomial,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    lemma: LemmaArg,
    #[arg(long)]
    dist: String,
    #[arg(long)]
    alpha: Option<f64>,
    /// Step of the central difference.
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
}

const LEMMA1_TOL: f64 = 1e-5;
const BIN_LEMMA_TOL: f64 = 1e-12;

struct Ctx {
    tail_eps: f64,
    tol: Option<f64>,
    seed: u64,
    format: Option<Format>,
}

/// Text for stdout plus whether every requested claim held.
struct Response {
    stdout: String,
    ok: bool,
    notes: Vec<String>,
}

impl Response {
    fn new(stdout: String, ok: bool) -> Self {
        Response {
            stdout,
            ok,
            notes: Vec::new(),
        }
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("--{flag} is required here"))
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| missing(flag))
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn pmf_csv(p: &Pmf) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Point {
        index: usize,
        probability: f64,
    }
    let rows: Vec<Point> = p
        .iter()
        .map(|(index, probability)| Point { index, probability })
        .collect();
    csv_rows(&rows)
}

fn norm_exponent(s: &str) -> Result<f64, CliError> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse()
            .map_err(|_| CliError::Usage(format!("cannot parse norm exponent '{s}'"))),
    }
}

impl Ctx {
    fn pmf(&self, spec: &str) -> Result<Pmf, CliError> {
        parse::pmf(spec, self.tail_eps)
    }

    fn emit_pmf(&self, p: &Pmf) -> Result<String, CliError> {
        match self.format {
            Some(Format::Csv) => pmf_csv(p),
            _ => {
                #[derive(Serialize)]
                struct Shown<'a> {
                    pmf: &'a Pmf,
                    moments: negdep::MomentSummary,
                }
                json(&Shown {
                    pmf: p,
                    moments: p.moments(),
                })
            }
        }
    }

    fn emit<T: Serialize>(&self, rows: &[T]) -> Result<String, CliError> {
        match self.format {
            Some(Format::Csv) => csv_rows(rows),
            _ if rows.len() == 1 => json(&rows[0]),
            _ => json(rows),
        }
    }

    /// `poisson` and `binomial` resolve against the mean of `p`.
    fn target(&self, spec: &str, p: &Pmf, n: Option<usize>) -> Result<Pmf, CliError> {
        match spec {
            "poisson" => Ok(Pmf::poisson(p.mean(), self.tail_eps)?),
            "binomial" => {
                let n = need(n, "n")?;
                if n == 0 {
                    return Err(CliError::Usage("binomial target needs n >= 1".into()));
                }
                Ok(Pmf::binomial(n, p.mean() / n as f64)?)
            }
            _ => self.pmf(spec),
        }
    }

    fn transform(&self, a: TransformArgs) -> Result<Response, CliError> {
        let p = self.pmf(&a.dist)?;
        let out = match a.op {
            TransformOp::Thin => thin(&p, need(a.alpha, "alpha")?)?,
            TransformOp::SizeBias => size_bias(&p)?,
            TransformOp::V => v_op(&p)?,
            TransformOp::UAlpha => {
                u_alpha(&AlphaPath::new(p, need(a.alpha, "alpha")?, self.tail_eps)?)?
            }
            TransformOp::HyperThin => hyper_thin(&p, need(a.n, "n")?)?,
            TransformOp::Plus => plus_transform(&p, need(a.n, "n")?, need(a.r, "r")?)?,
            TransformOp::MarkovStep => markov_step(&p, need(a.n, "n")?, need(a.r, "r")?)?,
            TransformOp::MarkovChain => {
                markov_chain(&p, need(a.n, "n")?, need(a.r, "r")?, need(a.t, "t")?)?
            }
        };
        Ok(Response::new(self.emit_pmf(&out)?, true))
    }

    fn order_check(&self, a: OrderArgs) -> Result<Response, CliError> {
        let mut reports: Vec<OrderingReport> = Vec::new();
        match a.relation.as_str() {
            "tnd" | "nr" => {
                let table = parse::table_from_file(&need(a.table, "table")?)?;
                let report = if a.relation == "tnd" {
                    tnd_check(&table)
                } else {
                    let mode = match a.trials {
                        Some(trials) => NrMode::Randomized {
                            trials,
                            seed: self.seed,
                        },
                        None => NrMode::Exact,
                    };
                    nr_check(&table, mode)?
                };
                reports.push(report);
            }
            "size-bias" => {
                let p = self.pmf(&need(a.dist, "dist")?)?;
                reports.push(check_eq_order1(&p, a.s)?);
            }
            other => {
                let relation = match other {
                    "st" => Relation::St,
                    "icx" => Relation::Icx,
                    "cx" => Relation::Cx,
                    _ => {
                        let s = other
                            .strip_suffix("-cx")
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| {
                                CliError::Usage(format!("unknown relation '{other}'"))
                            })?;
                        Relation::SCx(s)
                    }
                };
                let p = self.pmf(&need(a.dist, "dist")?)?;
                let q = self.target(&need(a.target, "target")?, &p, a.n)?;
                let tol = self.tol.unwrap_or_else(|| default_tolerance(&p, &q));
                reports.push(check_order_tol(&p, &q, relation, tol)?);
                if let Some(trials) = a.oracle {
                    let s = match relation {
                        Relation::SCx(s) => s,
                        Relation::St => 1,
                        _ => 2,
                    };
                    reports.push(fs_random_oracle(&p, &q, s, trials, self.seed));
                }
            }
        }
        let ok = reports.iter().all(|r| r.holds);
        Ok(Response::new(self.emit(&reports)?, ok))
    }

    fn metric(&self, a: MetricArgs) -> Result<Response, CliError> {
        let p = self.pmf(&a.dist)?;
        let q = self.target(&a.target, &p, a.binomial_n)?;
        let value: MetricValue = match (a.name, a.n, a.p) {
            (Some(name), None, None) => match name {
                MetricName::Tv => metrics::tv(&p, &q)?,
                MetricName::Kolmogorov => metrics::kolmogorov(&p, &q)?,
                MetricName::Wasserstein => metrics::wasserstein(&p, &q)?,
                MetricName::StopLoss => metrics::stop_loss(&p, &q)?,
                MetricName::LocalLimit => metrics::local_limit(&p, &q)?,
            },
            (None, Some(n), Some(pp)) => {
                metrics::d_np(&p, &q, MetricSpec::new(n, norm_exponent(&pp)?)?)?
            }
            _ => {
                return Err(CliError::Usage(
                    "give either --name or both --n and --p".into(),
                ))
            }
        };
        Ok(Response::new(self.emit(&[value])?, true))
    }

    fn bound(&self, a: BoundArgs) -> Result<Response, CliError> {
        let dist = || -> Result<Pmf, CliError> { self.pmf(&need(a.dist.clone(), "dist")?) };
        let reports: Vec<BoundReport> = match a.name {
            BoundName::Hyp1 => vec![hyp1_bound(&dist()?, need(a.k, "k")?)?],
            BoundName::CorOrder => {
                vec![cor_order_bound(&dist()?, need(a.s, "s")?, need(a.k, "k")?)?]
            }
            BoundName::ThmPois => thm_pois_bounds(&dist()?, need(a.s, "s")?)?,
            BoundName::DwVar => vec![dw_var_bound(&dist()?)?],
            BoundName::Concentration => {
                let p = a.dist.as_deref().map(|d| self.pmf(d)).transpose()?;
                let kind = match a.family.as_deref().unwrap_or("poisson") {
                    "poisson" => ConcentrationKind::Poisson {
                        lambda: match a.lambda {
                            Some(l) => l,
                            None => need(p.as_ref(), "lambda")?.mean(),
                        },
                    },
                    "binomial" => ConcentrationKind::Binomial {
                        n: need(a.n, "n")?,
                        r: need(a.r, "r")?,
                    },
                    other => {
                        return Err(CliError::Usage(format!(
                            "concentration family must be poisson or binomial, got '{other}'"
                        )))
                    }
                };
                let tail = match a.tail.unwrap_or(TailArg::Upper) {
                    TailArg::Upper => Tail::Upper,
                    TailArg::Lower => Tail::Lower,
                };
                vec![concentration(kind, need(a.t, "t")?, tail, p.as_ref())?]
            }
            BoundName::Mp => {
                let n = need(a.n, "n")?;
                let n = u32::try_from(n).map_err(|_| CliError::Usage("--n too large".into()))?;
                vec![mp_bound(&parse::mixing(&need(a.mix, "mix")?)?, n)?]
            }
            BoundName::MpTv => vec![mp_tv_bound(
                &parse::mixing(&need(a.mix, "mix")?)?,
                need(a.eps, "eps")?,
            )?],
            BoundName::Nb => {
                let (b1, b2) = nb_bounds(need(a.beta, "beta")?, need(a.q, "q")?)?;
                vec![b1, b2]
            }
            BoundName::Polya => {
                let (b1, b2) = polya_bounds(
                    need(a.population, "population")?,
                    need(a.red, "red")?,
                    need(a.c, "c")?,
                    need(a.m, "m")?,
                )?;
                vec![b1, b2]
            }
            BoundName::BinomialApprox => vec![binomial_approx_bound(
                &dist()?,
                need(a.n, "n")?,
                need(a.r, "r")?,
                need(a.k, "k")?,
            )?],
            BoundName::BinomialChain => {
                let t = need(a.t, "t")?;
                if t < 0.0 || t.fract() != 0.0 {
                    return Err(CliError::Usage(format!(
                        "--t must be a step count, got {t}"
                    )));
                }
                let spec = MetricSpec::new(
                    a.metric_n.unwrap_or(1),
                    norm_exponent(a.metric_p.as_deref().unwrap_or("1"))?,
                )?;
                vec![binomial_chain_bound(
                    &dist()?,
                    need(a.n, "n")?,
                    need(a.r, "r")?,
                    t as usize,
                    spec,
                )?]
            }
            BoundName::Lightbulb => vec![lightbulb_entropy_bound(need(a.n, "n")?)?],
            BoundName::MaxEntropy | BoundName::CompoundEntropy => {
                let target = match a.target.as_deref().unwrap_or("poisson") {
                    "poisson" => EntropyTarget::Poisson,
                    "binomial" => EntropyTarget::Binomial {
                        n: need(a.n, "n")?,
                        r: need(a.r, "r")?,
                    },
                    other => {
                        return Err(CliError::Usage(format!(
                            "entropy target must be poisson or binomial, got '{other}'"
                        )))
                    }
                };
                let p = dist()?;
                if a.name == BoundName::MaxEntropy {
                    vec![max_entropy_check(&p, target)?]
                } else {
                    let x = self.pmf(&need(a.summand, "summand")?)?;
                    vec![compound_entropy_check(&p, &x, target)?]
                }
            }
        };
        let ok = reports.iter().all(|r| r.holds != Some(false));
        Ok(Response::new(self.emit(&reports)?, ok))
    }

    fn entropy_flow(&self, a: FlowArgs) -> Result<Response, CliError> {
        let p = self.pmf(&a.dist)?;
        let (chain, default_grid): (FlowChain, Vec<f64>) = match a.chain {
            ChainArg::Alpha => (
                FlowChain::AlphaPath,
                (0..=10).map(|i| i as f64 / 10.0).collect(),
            ),
            ChainArg::Binomial => (
                FlowChain::Binomial {
                    n: need(a.n, "n")?,
                    r: need(a.r, "r")?,
                },
                (0..=a.steps).map(|t| t as f64).collect(),
            ),
        };
        let grid = match a.grid {
            Some(g) => parse::grid(&g)?,
            None => default_grid,
        };
        let report = entropy_flow(&p, &grid, chain)?;
        let stdout = match self.format {
            Some(Format::Json) => json(&report)?,
            _ => {
                #[derive(Serialize)]
                struct Point {
                    grid_value: f64,
                    entropy: f64,
                }
                let rows: Vec<Point> = report
                    .grid
                    .iter()
                    .zip(&report.values)
                    .map(|(&grid_value, &entropy)| Point {
                        grid_value,
                        entropy,
                    })
                    .collect();
                csv_rows(&rows)?
            }
        };
        Ok(Response::new(stdout, true))
    }

    fn verify(&self, a: VerifyArgs) -> Result<Response, CliError> {
        #[derive(Serialize)]
        struct Verdict {
            lemma: &'static str,
            residual: f64,
            tolerance: f64,
            holds: bool,
        }
        let p = self.pmf(&a.dist)?;
        let (lemma, residual, default_tol) = match a.lemma {
            LemmaArg::Thinning => {
                let path = AlphaPath::new(p, need(a.alpha, "alpha")?, self.tail_eps)?;
                ("1", lemma1_residual(&path, a.h)?, LEMMA1_TOL)
            }
            LemmaArg::Binomial => (
                "bin",
                bin_lemma_residual(&p, need(a.n, "n")?, need(a.r, "r")?)?,
                BIN_LEMMA_TOL,
            ),
        };
        let tolerance = self.tol.unwrap_or(default_tol);
        let holds = residual <= tolerance;
        let verdict = Verdict {
            lemma,
            residual,
            tolerance,
            holds,
        };
        Ok(Response::new(self.emit(&[verdict])?, holds))
    }

    fn report(&self, suite: suites::Suite, n: Option<String>) -> Result<Response, CliError> {
        let range = n.as_deref().map(parse::range).transpose()?;
        let out = suites::run(suite, range)?;
        let ok = out.rows.iter().all(|r| r.holds != Some(false));
        let stdout = match self.format {
            Some(Format::Csv) => csv_rows(&out.rows)?,
            _ => json(&out.rows)?,
        };
        Ok(Response {
            stdout,
            ok,
            notes: out.notes,
        })
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let ctx = Ctx {
        tail_eps: cli.tail_eps,
        tol: cli.tol,
        seed: cli.seed,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Dist { dist } => ctx
            .pmf(&dist)
            .and_then(|p| ctx.emit_pmf(&p))
            .map(|s| Response::new(s, true)),
        Command::Transform(a) => ctx.transform(a),
        Command::OrderCheck(a) => ctx.order_check(a),
        Command::Metric(a) => ctx.metric(a),
        Command::Bound(a) => ctx.bound(a),
        Command::EntropyFlow(a) => ctx.entropy_flow(a),
        Command::Verify(a) => ctx.verify(a),
        Command::Report { suite, n } => ctx.report(suite, n),
    };
    match result {
        Ok(r) => {
            let mut stderr: String = r.notes.iter().map(|n| format!("{n}\n")).collect();
            if !r.ok {
                stderr.push_str("check failed\n");
            }
            Outcome {
                code: if r.ok { 0 } else { 1 },
                stdout: r.stdout,
                stderr,
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
