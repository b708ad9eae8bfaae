//! Canned replication suites: tables of bounds next to the exact values
//! they control.

use std::ops::RangeInclusive;

use clap::ValueEnum;
use negdep::bounds::{
    binomial_chain_bound, hyp1_bound, lightbulb_entropy_bound, nb_bounds, polya_bounds,
    thm_pois_bounds, BoundReport,
};
use negdep::metrics::MetricSpec;
use negdep::Pmf;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Suite {
    /// Variance bound for hypergeometric laws, k = -1..2.
    EgH1,
    /// Size-bias moment bounds for hypergeometric laws.
    EgH2,
    /// Size-bias Wasserstein bound for Polya laws.
    EgP1,
    /// Mixed Poisson Wasserstein bound for Polya laws.
    EgP2,
    /// Both negative binomial total variation bounds.
    NbTable,
    /// Lightbulb entropy bound.
    Lightbulb,
    /// Binomial chain bound along the first steps.
    BinomialChain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub parameters: String,
    pub source: String,
    pub bound: f64,
    pub exact: Option<f64>,
    pub uncertainty: f64,
    pub slack: Option<f64>,
    pub holds: Option<bool>,
}

impl Row {
    fn new(parameters: impl Into<String>, r: &BoundReport) -> Row {
        Row {
            parameters: parameters.into(),
            source: r.source.clone(),
            bound: r.bound,
            exact: r.exact,
            uncertainty: r.uncertainty,
            slack: r.slack(),
            holds: r.holds,
        }
    }
}

pub struct Output {
    pub rows: Vec<Row>,
    /// Remarks for stderr.
    pub notes: Vec<String>,
}

fn hypergeometric_grid() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for big_n in [4, 6, 10, 20, 30] {
        for n in [1, 2, big_n / 2, big_n - 1] {
            for m in [2, big_n / 2] {
                if !out.contains(&(big_n, n, m)) {
                    out.push((big_n, n, m));
                }
            }
        }
    }
    out
}

fn polya_grid() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for big_n in [10, 20, 40] {
        for r in [1, big_n / 4, big_n / 2] {
            for c in [1, 2] {
                for m in [5, big_n / 2, big_n] {
                    out.push((big_n, r, c, m));
                }
            }
        }
    }
    out
}

pub fn run(
    suite: Suite,
    lightbulb_range: Option<RangeInclusive<usize>>,
) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    match suite {
        Suite::EgH1 => {
            for (big_n, n, m) in hypergeometric_grid() {
                let p = Pmf::hypergeometric(big_n, n, m)?;
                for k in -1..=2 {
                    let r = hyp1_bound(&p, k)?;
                    rows.push(Row::new(format!("N={big_n} n={n} m={m} k={k}"), &r));
                }
            }
        }
        Suite::EgH2 => {
            for (big_n, n, m) in hypergeometric_grid() {
                let p = Pmf::hypergeometric(big_n, n, m)?;
                for r in thm_pois_bounds(&p, 1)?.iter().skip(2) {
                    rows.push(Row::new(format!("N={big_n} n={n} m={m}"), r));
                }
            }
        }
        Suite::EgP1 | Suite::EgP2 => {
            let mut better = 0;
            let grid = polya_grid();
            for &(big_n, r, c, m) in &grid {
                let (first, second) = polya_bounds(big_n, r, c, m)?;
                better += (second.bound < first.bound) as usize;
                let report = if suite == Suite::EgP1 { first } else { second };
                rows.push(Row::new(format!("N={big_n} r={r} c={c} m={m}"), &report));
            }
            if suite == Suite::EgP2 {
                notes.push(format!(
                    "mixed Poisson bound below size-bias bound on {better} of {} rows",
                    grid.len()
                ));
            }
        }
        Suite::NbTable => {
            for beta in [0.5, 1.0, 3.0] {
                for q in [0.05, 0.1, 0.3] {
                    let (b1, b2) = nb_bounds(beta, q)?;
                    rows.push(Row::new(format!("beta={beta} q={q}"), &b1));
                    rows.push(Row::new(format!("beta={beta} q={q}"), &b2));
                }
            }
        }
        Suite::Lightbulb => {
            for n in lightbulb_range.unwrap_or(10..=30) {
                rows.push(Row::new(format!("n={n}"), &lightbulb_entropy_bound(n)?));
            }
        }
        Suite::BinomialChain => {
            let inputs = [
                ("hypergeom(4,2,2)", Pmf::hypergeometric(4, 2, 2)?, 2),
                ("hypergeom(10,4,5)", Pmf::hypergeometric(10, 4, 5)?, 4),
                ("hypergeom(12,6,3)", Pmf::hypergeometric(12, 6, 3)?, 6),
            ];
            for (name, p, n) in inputs {
                let r = p.mean() / n as f64;
                for spec in [MetricSpec::l1(1), MetricSpec::l1(0), MetricSpec::sup(0)] {
                    for t in 1..=10 {
                        let b = binomial_chain_bound(&p, n, r, t, spec)?;
                        rows.push(Row::new(
                            format!("{name} n={n} r={r} d=({}, {}) t={t}", spec.n, spec.p),
                            &b,
                        ));
                    }
                }
            }
        }
    }
    Ok(Output { rows, notes })
}
