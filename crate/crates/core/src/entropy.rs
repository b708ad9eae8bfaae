//! Shannon entropy (natural logarithms, `0 log 0 = 0`), relative entropy,
//! entropy along the thinning and binomial-chain paths, and the
//! maximum-entropy comparisons with Poisson and binomial laws.

use serde::{Deserialize, Serialize};

use crate::bounds::{order_hypothesis, ulc_hypothesis, BoundReport, Hypothesis};
use crate::dist::Pmf;
use crate::error::{invalid, Error, Result};
use crate::metrics::MetricValue;
use crate::numeric::{ln_factorial, poisson_ln_pmf, CompensatedSum};
use crate::transforms::{markov_path, u_alpha, AlphaPath};

/// Tolerance for the monotonicity and concavity flags of a flow.
pub const FLOW_TOL: f64 = 1e-8;
/// Allowance in the comparison `H(W) <= H(target)`.
pub const ENTROPY_TOL: f64 = 1e-10;
/// Truncation of Poisson laws built along an entropy flow.
pub const FLOW_TAIL_EPS: f64 = 1e-14;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

pub fn entropy(p: &Pmf) -> f64 {
    -p.iter()
        .map(|(_, w)| plogp(w))
        .collect::<CompensatedSum>()
        .value()
}

/// `D(P ‖ Q) = Σ P(j) log(P(j)/Q(j))`.
pub fn rel_entropy(p: &Pmf, q: &Pmf) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for (j, w) in p.iter() {
        if w == 0.0 {
            continue;
        }
        let v = q.prob(j as i64);
        if v <= 0.0 {
            return Err(Error::SupportMismatch(j as i64));
        }
        acc.add(w * (w / v).ln());
    }
    Ok(acc.value().max(0.0))
}

/// `Λ(P) = -Σ P(j) log P(Z_λ = j)`, so that `H = Λ - D(P ‖ Po(λ))`.
pub fn lambda_functional(p: &Pmf, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda = {lambda} must be non-negative")));
    }
    if lambda == 0.0 {
        return if p.iter().all(|(j, w)| j == 0 || w == 0.0) {
            Ok(0.0)
        } else {
            Err(Error::SupportMismatch(p.support_max() as i64))
        };
    }
    let ln_lambda = lambda.ln();
    Ok(p.iter()
        .map(|(j, w)| w * (lambda - j as f64 * ln_lambda + ln_factorial(j as u64)))
        .collect::<CompensatedSum>()
        .value())
}

/// `H(Po(λ))` by direct summation until the terms are negligible.
pub fn poisson_entropy(lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda = {lambda} must be non-negative")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::new();
    let mut j = 0u64;
    loop {
        let l = poisson_ln_pmf(lambda, j);
        let term = -l.exp() * l;
        acc.add(term);
        if j as f64 > lambda && term.abs() < 1e-20 {
            break;
        }
        j += 1;
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowChain {
    /// `α ↦ H(U_α W)` on a grid in `[0, 1]`.
    AlphaPath,
    /// `t ↦ H(X_t)` along the binomial chain, on a grid of step counts.
    Binomial { n: usize, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub monotone_decreasing: bool,
    pub concave: bool,
    /// Largest `H(g_{i+1}) - H(g_i)`.
    pub max_first_diff: f64,
    /// Largest change of slope, scaled to the local grid width.
    pub max_second_diff: f64,
    /// Smallest `H(g_{i+1}) - H(g_i)`.
    pub min_first_diff: f64,
}

impl FlowReport {
    fn from_values(grid: Vec<f64>, values: Vec<f64>) -> Self {
        let first: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let slopes: Vec<f64> = first
            .iter()
            .zip(grid.windows(2))
            .map(|(d, g)| d / (g[1] - g[0]))
            .collect();
        let second = slopes
            .windows(2)
            .zip(grid.windows(3))
            .map(|(s, g)| (s[1] - s[0]) * (g[2] - g[0]) / 2.0);
        let max_first_diff = first.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_first_diff = first.iter().copied().fold(f64::INFINITY, f64::min);
        let max_second_diff = second.fold(f64::NEG_INFINITY, f64::max);
        let max_first_diff = if first.is_empty() {
            0.0
        } else {
            max_first_diff
        };
        let min_first_diff = if first.is_empty() {
            0.0
        } else {
            min_first_diff
        };
        let max_second_diff = if slopes.len() < 2 {
            0.0
        } else {
            max_second_diff
        };
        FlowReport {
            grid,
            values,
            monotone_decreasing: max_first_diff <= FLOW_TOL,
            concave: max_second_diff <= FLOW_TOL,
            max_first_diff,
            max_second_diff,
            min_first_diff,
        }
    }
}

/// Entropy along a path started at `p`.
///
/// For [`FlowChain::AlphaPath`] the grid is a strictly increasing subset
/// of `[0, 1]`; the point `α = 0` is evaluated as `H(Po(λ))` directly. For
/// [`FlowChain::Binomial`] the grid holds non-negative integer step counts.
pub fn entropy_flow(p: &Pmf, grid: &[f64], chain: FlowChain) -> Result<FlowReport> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid must be strictly increasing"));
    }
    let values = match chain {
        FlowChain::AlphaPath => {
            if grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(Error::AlphaOutOfRange(
                    *grid.iter().find(|a| !(0.0..=1.0).contains(*a)).unwrap(),
                ));
            }
            let lambda = p.mean();
            grid.iter()
                .map(|&alpha| {
                    if alpha == 0.0 {
                        poisson_entropy(lambda)
                    } else {
                        let path = AlphaPath::new(p.clone(), alpha, FLOW_TAIL_EPS)?;
                        Ok(entropy(&u_alpha(&path)?))
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
        FlowChain::Binomial { n, r } => {
            if grid.iter().any(|t| !(*t >= 0.0) || t.fract() != 0.0) {
                return Err(invalid(
                    "binomial chain grid must hold non-negative integers",
                ));
            }
            let last = grid.last().copied().unwrap_or(0.0) as usize;
            let path = markov_path(p, n, r, last)?;
            grid.iter().map(|&t| entropy(&path[t as usize])).collect()
        }
    };
    Ok(FlowReport::from_values(grid.to_vec(), values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyTarget {
    /// `Po(λ)` with `λ` the mean of the law under test.
    Poisson,
    Binomial {
        n: usize,
        r: f64,
    },
}

fn target_law(p: &Pmf, target: EntropyTarget, tail_eps: f64) -> Result<(Pmf, Hypothesis)> {
    match target {
        EntropyTarget::Poisson => {
            let lambda = p.mean();
            if !(lambda > 0.0) {
                return Err(Error::ZeroMean);
            }
            Ok((Pmf::poisson(lambda, tail_eps)?, order_hypothesis(p, 1)?))
        }
        EntropyTarget::Binomial { n, r } => Ok((Pmf::binomial(n, r)?, ulc_hypothesis(p, n, r))),
    }
}

/// Entropy missing from a truncated tail of mass `δ`, over-estimated as
/// `δ (2 + log(1/δ) + log(M + 1))`.
fn tail_slack(p: &Pmf) -> f64 {
    let d = p.tail_mass();
    if d > 0.0 {
        d * (2.0 - d.ln() + (p.support_max() as f64 + 1.0).ln())
    } else {
        0.0
    }
}

/// `H(W) <= H(target)` under the matching hypothesis.
pub fn max_entropy_check(p: &Pmf, target: EntropyTarget) -> Result<BoundReport> {
    let (law, hypothesis) = target_law(p, target, 1e-16)?;
    let bound = match target {
        EntropyTarget::Poisson => poisson_entropy(p.mean())?,
        EntropyTarget::Binomial { .. } => entropy(&law),
    };
    let exact = MetricValue {
        value: entropy(p),
        uncertainty: ENTROPY_TOL + tail_slack(p),
    };
    let name = match target {
        EntropyTarget::Poisson => "Poisson maximum entropy",
        EntropyTarget::Binomial { .. } => "binomial maximum entropy",
    };
    Ok(BoundReport::new(name, bound, Some(exact), Some(hypothesis)))
}

/// `H(Σ_{i≤W} X_i) <= H(Σ_{i≤Z} X_i)` with `Z` the target law, which needs
/// the compound target to be log-concave.
///
/// For a Poisson target and log-concave `X` the condition
/// `λ P(X=1)² >= 2 P(X=2)` is used as a sufficient test; otherwise the
/// compound target is checked directly. When log-concavity fails the
/// verdict is withheld.
pub fn compound_entropy_check(p: &Pmf, x: &Pmf, target: EntropyTarget) -> Result<BoundReport> {
    let tail_eps = 1e-16;
    let (law, hypothesis) = target_law(p, target, tail_eps)?;
    let compound_target = law.compound(x, tail_eps);
    let compound_w = p.compound(x, tail_eps);
    let fast = matches!(target, EntropyTarget::Poisson)
        && x.is_log_concave()
        && p.mean() * x.prob(1) * x.prob(1) >= 2.0 * x.prob(2);
    let log_concave = fast || compound_target.is_log_concave();
    let hypothesis = hypothesis.and(Hypothesis {
        condition: "compound target log-concave".into(),
        satisfied: log_concave,
        max_violation: 0.0,
    });
    let exact = MetricValue {
        value: entropy(&compound_w),
        uncertainty: ENTROPY_TOL + tail_slack(&compound_w) + tail_slack(&compound_target),
    };
    let name = match target {
        EntropyTarget::Poisson => "compound Poisson maximum entropy",
        EntropyTarget::Binomial { .. } => "compound binomial maximum entropy",
    };
    Ok(BoundReport::new(
        name,
        entropy(&compound_target),
        Some(exact),
        Some(hypothesis),
    ))
}
