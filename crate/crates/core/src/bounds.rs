//! Closed-form approximation bounds, each evaluated next to the exact
//! distance it controls so that the slack can be read off directly.
//!
//! Bounds are computed even when their hypotheses fail. In that case the
//! attached [`Hypothesis`] is marked unsatisfied and `holds` is left empty,
//! which separates "the bound was violated" from "the bound does not apply".

use serde::{Deserialize, Serialize};

use crate::dist::{Pmf, UlcDegree};
use crate::entropy::{entropy, poisson_entropy};
use crate::error::{invalid, Error, Result};
use crate::metrics::{d_np, tv, wasserstein, MetricSpec, MetricValue};
use crate::models::lightbulb;
use crate::numeric::{binom, ln_gamma, pos_part, CompensatedSum};
use crate::orderings::{check_eq_order1, OrderingReport};
use crate::transforms::{
    markov_path, mixed_poisson, plus_transform, size_bias, MixingDistribution,
};

/// Truncation used for the Poisson and mixed Poisson comparison laws.
pub const BOUND_TAIL_EPS: f64 = 1e-14;
/// Floating-point allowance added to every comparison.
pub const ROUNDING_SLACK: f64 = 1e-12;
/// Allowed gap between a mean and its nominal value in hypothesis checks.
pub const MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub condition: String,
    pub satisfied: bool,
    pub max_violation: f64,
}

impl Hypothesis {
    fn from_ordering(condition: impl Into<String>, report: &OrderingReport) -> Self {
        Hypothesis {
            condition: condition.into(),
            satisfied: report.holds,
            max_violation: report.max_violation,
        }
    }

    pub(crate) fn and(self, other: Hypothesis) -> Hypothesis {
        Hypothesis {
            condition: format!("{} and {}", self.condition, other.condition),
            satisfied: self.satisfied && other.satisfied,
            max_violation: self.max_violation.max(other.max_violation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: f64,
    pub exact: Option<f64>,
    pub uncertainty: f64,
    /// `bound + uncertainty >= exact`, when an exact value is known and
    /// the hypotheses are met.
    pub holds: Option<bool>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Hypothesis>,
}

impl BoundReport {
    pub(crate) fn new(
        source: impl Into<String>,
        bound: f64,
        exact: Option<MetricValue>,
        hypothesis: Option<Hypothesis>,
    ) -> Self {
        let bound = bound.max(0.0);
        let uncertainty = exact.map_or(0.0, |e| e.uncertainty)
            + ROUNDING_SLACK * (1.0 + bound.abs().max(exact.map_or(0.0, |e| e.value.abs())));
        let applies = hypothesis.as_ref().is_none_or(|h| h.satisfied);
        let holds = exact
            .filter(|_| applies)
            .map(|e| bound + uncertainty >= e.value);
        BoundReport {
            bound,
            exact: exact.map(|e| e.value),
            uncertainty,
            holds,
            source: source.into(),
            hypothesis,
        }
    }

    /// Slack `bound - exact`, when the exact value is known.
    pub fn slack(&self) -> Option<f64> {
        self.exact.map(|e| self.bound - e)
    }
}

fn exact_value(value: f64) -> MetricValue {
    MetricValue {
        value,
        uncertainty: 0.0,
    }
}

fn positive_mean(p: &Pmf) -> Result<f64> {
    let lambda = p.mean();
    if lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::ZeroMean)
    }
}

pub(crate) fn order_hypothesis(p: &Pmf, s: u32) -> Result<Hypothesis> {
    let report = check_eq_order1(p, s)?;
    let condition = if s == 1 {
        "W* <=_st W + 1".to_string()
    } else {
        format!("W* <=_{s}-cx W + 1")
    };
    Ok(Hypothesis::from_ordering(condition, &report))
}

pub(crate) fn ulc_hypothesis(p: &Pmf, n: usize, r: f64) -> Hypothesis {
    let shape = matches!(p.is_ulc(UlcDegree::Finite(n)), Ok(true));
    let gap = (p.mean() - n as f64 * r).abs();
    Hypothesis {
        condition: format!("ULC({n}) with mean {}", n as f64 * r),
        satisfied: shape && gap <= MEAN_TOL + p.tail_mass(),
        max_violation: gap,
    }
}

fn poisson_for(lambda: f64) -> Result<Pmf> {
    Pmf::poisson(lambda, BOUND_TAIL_EPS)
}

/// `E C(Z_λ + s + 1, s + 1) - E C(W + s + 1, s + 1)`, expanded by
/// Vandermonde's identity into binomial moments so that the leading terms
/// cancel exactly.
fn binomial_moment_gap(p: &Pmf, lambda: f64, s: u32) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut power = lambda;
    for i in 2..=s + 1 {
        power *= lambda / i as f64;
        let weight = binom(s as i64 + 1, i as i64);
        acc.add(weight * power);
        acc.add(-weight * p.factorial_moment(i));
    }
    acc.value()
}

/// `d_{-k,∞}(W, Z_λ) <= 2^{(s-k-1)_+} E[C(Z_λ+s+1, s+1) - C(W+s+1, s+1)]`
/// for `k = -1, …, s + 1`, given `W* <=_{s-cx} W + 1` and the binomial
/// moment conditions `E C(W, k) <= λ^k / k!` for `k = 3, …, s`.
pub fn cor_order_bound(p: &Pmf, s: u32, k: i32) -> Result<BoundReport> {
    if s == 0 {
        return Err(invalid("order s must be >= 1"));
    }
    if k < -1 || k > s as i32 + 1 {
        return Err(invalid(format!("k = {k} outside -1..={}", s + 1)));
    }
    let lambda = positive_mean(p)?;
    let mut hypothesis = order_hypothesis(p, s)?;
    if s >= 3 {
        let mut worst: f64 = 0.0;
        let mut power = lambda * lambda / 2.0;
        for i in 3..=s {
            power *= lambda / i as f64;
            worst = worst.max(p.factorial_moment(i) - power);
        }
        hypothesis = hypothesis.and(Hypothesis {
            condition: format!("E C(W, k) <= E C(Z, k) for k = 3..={s}"),
            satisfied: worst <= ROUNDING_SLACK * (1.0 + power) + p.tail_mass(),
            max_violation: worst.max(0.0),
        });
    }
    let scale = 2f64.powi(pos_part(s as i64 - k as i64 - 1) as i32);
    let bound = scale * binomial_moment_gap(p, lambda, s);
    let exact = d_np(p, &poisson_for(lambda)?, MetricSpec::sup(-k))?;
    Ok(BoundReport::new(
        format!("binomial-moment bound, s = {s}, k = {k}"),
        bound,
        Some(exact),
        Some(hypothesis),
    ))
}

/// The `s = 1` case: `d_{-k,∞}(W, Z_λ) <= 2^{(-k)_+ - 1}(λ - Var W)` for
/// `k ∈ {-1, 0, 1, 2}`.
pub fn hyp1_bound(p: &Pmf, k: i32) -> Result<BoundReport> {
    cor_order_bound(p, 1, k)
}

/// The thinning/size-bias bounds on `d_{-s,1}` and `d_{-s,∞}` (always
/// applicable), followed by their moment forms, which need
/// `W* <=_{s-cx} W + 1`.
///
/// For `s = 0` the sup-norm bound and the moment forms have no analogue,
/// so only the first report is returned.
pub fn thm_pois_bounds(p: &Pmf, s: u32) -> Result<Vec<BoundReport>> {
    let lambda = positive_mean(p)?;
    let z = poisson_for(lambda)?;
    let shifted_star = size_bias(p)?.shift(-1)?;
    let si = s as i32;
    let mut out = Vec::new();

    let near = d_np(p, &shifted_star, MetricSpec::l1(1 - si))?;
    out.push(BoundReport::new(
        format!("size-bias l1 bound, s = {s}"),
        lambda / (1.0 + s as f64) * near.value,
        Some(d_np(p, &z, MetricSpec::l1(-si))?),
        None,
    ));
    if s == 0 {
        return Ok(out);
    }
    let near = d_np(p, &shifted_star, MetricSpec::sup(1 - si))?;
    out.push(BoundReport::new(
        format!("size-bias sup bound, s = {s}"),
        lambda / s as f64 * near.value,
        Some(d_np(p, &z, MetricSpec::sup(-si))?),
        None,
    ));

    let hypothesis = order_hypothesis(p, s)?;
    let moment = size_bias_moment(p, lambda, s);
    out.push(BoundReport::new(
        format!("size-bias moment l1 bound, s = {s}"),
        moment / (1.0 + s as f64),
        Some(d_np(p, &z, MetricSpec::l1(-si))?),
        Some(hypothesis.clone()),
    ));
    for k in 1..=s + 1 {
        let scale = 2f64.powi(pos_part(s as i64 - k as i64 - 1) as i32) / k as f64;
        out.push(BoundReport::new(
            format!("size-bias moment sup bound, s = {s}, k = {k}"),
            scale * moment,
            Some(d_np(p, &z, MetricSpec::sup(-(k as i32)))?),
            Some(hypothesis.clone()),
        ));
    }
    Ok(out)
}

/// `E[λ C(W+s, s) - W C(W+s-1, s)]`, written through Vandermonde as
/// `Σ_i C(s, i) (λ E C(W, i) - (i+1) E C(W, i+1))` so that each term
/// vanishes separately for a Poisson law.
fn size_bias_moment(p: &Pmf, lambda: f64, s: u32) -> f64 {
    let moments: Vec<f64> = (0..=s + 1).map(|i| p.factorial_moment(i)).collect();
    (0..=s as usize)
        .map(|i| {
            binom(s as i64, i as i64) * (lambda * moments[i] - (i + 1) as f64 * moments[i + 1])
        })
        .collect::<CompensatedSum>()
        .value()
}

/// `d_W(W, Z_λ) <= min(1, 1.15/√λ)(λ - Var W)` given `W* <=_st W + 1`.
pub fn dw_var_bound(p: &Pmf) -> Result<BoundReport> {
    let lambda = positive_mean(p)?;
    let factor = (1.15 / lambda.sqrt()).min(1.0);
    Ok(BoundReport::new(
        "Wasserstein variance bound",
        factor * (lambda - p.variance()),
        Some(wasserstein(p, &poisson_for(lambda)?)?),
        Some(order_hypothesis(p, 1)?),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationKind {
    Poisson { lambda: f64 },
    Binomial { n: usize, r: f64 },
}

impl ConcentrationKind {
    pub fn mean(&self) -> f64 {
        match *self {
            ConcentrationKind::Poisson { lambda } => lambda,
            ConcentrationKind::Binomial { n, r } => n as f64 * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Upper,
    Lower,
}

/// Chernoff-type bounds on `P(W >= λ + t)` and `P(W <= λ - t)`.
///
/// When a pmf is supplied its exact tail is reported, and the hypothesis
/// (`W* <=_st W + 1` for the Poisson kind, ULC(n) with mean `nr` for the
/// binomial kind) is checked on it.
pub fn concentration(
    kind: ConcentrationKind,
    t: f64,
    tail: Tail,
    p: Option<&Pmf>,
) -> Result<BoundReport> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t = {t} must be positive")));
    }
    let lambda = kind.mean();
    if tail == Tail::Lower && t >= lambda {
        return Err(Error::InvalidT { t, lambda });
    }
    let bound = match kind {
        ConcentrationKind::Poisson { lambda } => {
            if !(lambda > 0.0) {
                return Err(invalid(format!("lambda = {lambda} must be positive")));
            }
            match tail {
                Tail::Upper => (t - (t + lambda) * (t / lambda).ln_1p()).exp(),
                Tail::Lower => (-t + (t - lambda) * (-t / lambda).ln_1p()).exp(),
            }
        }
        ConcentrationKind::Binomial { n, r } => {
            if n == 0 || !(r > 0.0 && r < 1.0) {
                return Err(invalid(format!(
                    "binomial parameters ({n}, {r}) need n >= 1, 0 < r < 1"
                )));
            }
            let nf = n as f64;
            let s = 1.0 - r;
            match tail {
                Tail::Upper => {
                    let top = lambda + t;
                    if (top - nf).abs() <= ROUNDING_SLACK * nf {
                        r.powi(n as i32)
                    } else if top > nf {
                        0.0
                    } else {
                        let x = s * top / (s * lambda - r * t);
                        (-top * x.ln() + nf * (s + r * x).ln()).exp()
                    }
                }
                Tail::Lower => {
                    let y = s * (lambda - t) / (s * lambda + r * t);
                    ((t - lambda) * y.ln() + nf * (s + r * y).ln()).exp()
                }
            }
        }
    };
    let (exact, hypothesis) = match p {
        None => (None, None),
        Some(p) => {
            let value = match tail {
                Tail::Upper => p.survival((lambda + t - ROUNDING_SLACK).ceil() as i64),
                Tail::Lower => {
                    let cut = (lambda - t + ROUNDING_SLACK).floor() as i64;
                    crate::numeric::sum((0..=cut).map(|j| p.prob(j)))
                }
            };
            let exact = MetricValue {
                value,
                uncertainty: p.tail_mass(),
            };
            let hypothesis = match kind {
                ConcentrationKind::Poisson { lambda } => {
                    let h = order_hypothesis(p, 1)?;
                    let gap = (p.mean() - lambda).abs();
                    h.and(Hypothesis {
                        condition: format!("mean {lambda}"),
                        satisfied: gap <= MEAN_TOL + p.tail_mass(),
                        max_violation: gap,
                    })
                }
                ConcentrationKind::Binomial { n, r } => ulc_hypothesis(p, n, r),
            };
            (Some(exact), Some(hypothesis))
        }
    };
    let side = match tail {
        Tail::Upper => "upper",
        Tail::Lower => "lower",
    };
    let family = match kind {
        ConcentrationKind::Poisson { .. } => "Poisson",
        ConcentrationKind::Binomial { .. } => "binomial",
    };
    Ok(BoundReport::new(
        format!("{family} {side}-tail concentration, t = {t}"),
        bound,
        exact,
        hypothesis,
    ))
}

fn require_positive_mixing(mix: &MixingDistribution, n: u32) -> Result<()> {
    if !mix.is_strictly_positive() {
        return Err(Error::NonpositiveMixing);
    }
    if let Some(a) = mix.shape_at_zero() {
        if a <= n as f64 / 2.0 {
            return Err(Error::IntegrabilityFailure(format!(
                "E|ξ - λ| (αξ + (1-α)λ)^(-{n}/2) diverges for shape {a} <= {}",
                n as f64 / 2.0
            )));
        }
    }
    Ok(())
}

/// `d_{n,1}(Po(ξ), Po(λ)) <= |2/(n-2)| E|ξ^{(2-n)/2} - λ^{(2-n)/2}|`, or
/// `E|log(ξ/λ)|` when `n = 2`.
pub fn mp_bound(mix: &MixingDistribution, n: u32) -> Result<BoundReport> {
    let lambda = mix.mean();
    if n >= 1 {
        require_positive_mixing(mix, n)?;
    }
    let bound = if n == 2 {
        mix.expect(|x| (x / lambda).ln().abs(), &[lambda])
    } else {
        let e = (2.0 - n as f64) / 2.0;
        let target = lambda.powf(e);
        (2.0 / (n as f64 - 2.0)).abs() * mix.expect(|x| (x.powf(e) - target).abs(), &[lambda])
    };
    if !bound.is_finite() {
        return Err(Error::IntegrabilityFailure(format!(
            "mixing expectation for n = {n} is not finite"
        )));
    }
    let w = mixed_poisson(mix, BOUND_TAIL_EPS)?;
    let exact = d_np(&w, &poisson_for(lambda)?, MetricSpec::l1(n as i32))?;
    Ok(BoundReport::new(
        format!("mixed Poisson bound, n = {n}"),
        bound,
        Some(exact),
        None,
    ))
}

/// `d_TV(Po(ξ), Po(λ)) <= (E|ξ - λ|)^{1/2+ε} / λ^ε` for `ε ∈ [0, 1/2]`.
pub fn mp_tv_bound(mix: &MixingDistribution, eps: f64) -> Result<BoundReport> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(invalid(format!("epsilon = {eps} outside [0, 1/2]")));
    }
    require_positive_mixing(mix, 1)?;
    let lambda = mix.mean();
    let dev = mix.expect(|x| (x - lambda).abs(), &[lambda]);
    let bound = dev.powf(0.5 + eps) / lambda.powf(eps);
    let w = mixed_poisson(mix, BOUND_TAIL_EPS)?;
    Ok(BoundReport::new(
        format!("mixed Poisson total variation bound, epsilon = {eps}"),
        bound,
        Some(tv(&w, &poisson_for(lambda)?)?),
        None,
    ))
}

fn check_nb(beta: f64, q: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid(format!("beta = {beta} must be positive")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q = {q} outside (0, 1)")));
    }
    Ok(())
}

/// `E|ξ - λ| = 2qβ^β e^{-β} / ((1-q)Γ(β))` for `ξ ~ Gamma(β, q/(1-q))`.
pub fn gamma_mean_abs_dev(beta: f64, q: f64) -> Result<f64> {
    check_nb(beta, q)?;
    let ln = (2.0 * q / (1.0 - q)).ln() + beta * beta.ln() - beta - ln_gamma(beta);
    Ok(ln.exp())
}

/// The two total variation bounds for `NB(β, q)` against `Po(βq/(1-q))`:
/// the mixed Poisson one and the sharper one of order `q`.
pub fn nb_bounds(beta: f64, q: f64) -> Result<(BoundReport, BoundReport)> {
    check_nb(beta, q)?;
    let odds = q / (1.0 - q);
    let pi = std::f64::consts::PI;
    let b1 = odds.sqrt() * (2.0 / pi).sqrt().min((2.0 * beta / pi).powf(0.25));
    let b2 =
        beta * odds * odds * (3.0 * (1.0 - q) / (4.0 * std::f64::consts::E * beta * q)).min(1.0);
    let w = Pmf::negative_binomial(beta, q, BOUND_TAIL_EPS)?;
    let exact = tv(&w, &poisson_for(beta * odds)?)?;
    Ok((
        BoundReport::new(
            "negative binomial, mixed Poisson bound",
            b1,
            Some(exact),
            None,
        ),
        BoundReport::new("negative binomial, order-q bound", b2, Some(exact), None),
    ))
}

fn check_polya(population: usize, r: usize, c: usize) -> Result<()> {
    if r == 0 || r >= population {
        return Err(invalid(format!(
            "need 0 < r < N, got r = {r}, N = {population}"
        )));
    }
    if c == 0 {
        return Err(invalid("c must be >= 1"));
    }
    Ok(())
}

/// `σ² = mr(N+cm)(N-r) / (N²(N+c))`.
pub fn polya_variance(population: usize, r: usize, c: usize, m: usize) -> Result<f64> {
    check_polya(population, r, c)?;
    let (nn, r, c, m) = (population as f64, r as f64, c as f64, m as f64);
    Ok(m * r * (nn + c * m) * (nn - r) / (nn * nn * (nn + c)))
}

/// Wasserstein bounds for the Pólya law `BetaBinomial(m, r/c, (N-r)/c)`
/// against `Po(mr/N)`: the size-bias bound and the mixed Poisson bound.
pub fn polya_bounds(
    population: usize,
    r: usize,
    c: usize,
    m: usize,
) -> Result<(BoundReport, BoundReport)> {
    let sigma = polya_variance(population, r, c, m)?.sqrt();
    let (nn, rf, cf, mf) = (population as f64, r as f64, c as f64, m as f64);
    let first = sigma
        + ((mf * rf * (nn - rf) * (nn + cf * mf)).sqrt() + mf * (cf * rf * (nn - rf)).sqrt())
            / ((nn - rf) * (nn + cf).sqrt());
    let second = 1.15 * mf.sqrt() * (rf * (rf + cf) / (nn * (nn + cf))).powf(0.75)
        + mf * (cf * rf * (nn - rf) / (nn * nn * (nn + cf))).sqrt();
    let w = Pmf::beta_binomial(m, rf / cf, (nn - rf) / cf)?;
    let lambda = mf * rf / nn;
    let exact = if lambda > 0.0 {
        wasserstein(&w, &poisson_for(lambda)?)?
    } else {
        exact_value(0.0)
    };
    Ok((
        BoundReport::new("Polya size-bias bound", first, Some(exact), None),
        BoundReport::new("Polya mixed Poisson bound", second, Some(exact), None),
    ))
}

/// `d_{-k,∞}(W, Bin(n, r)) <= 2^{(-k)_+ - 1}(nr(1-r) - Var W)` for
/// `k ∈ {-1, 0, 1, 2}`, given that `W` is ULC(n) with mean `nr`.
pub fn binomial_approx_bound(p: &Pmf, n: usize, r: f64, k: i32) -> Result<BoundReport> {
    if !(-1..=2).contains(&k) {
        return Err(invalid(format!("k = {k} outside -1..=2")));
    }
    let z = Pmf::binomial(n, r)?;
    let scale = 2f64.powi(pos_part(-k as i64) as i32 - 1);
    let bound = scale * (n as f64 * r * (1.0 - r) - p.variance());
    Ok(BoundReport::new(
        format!("binomial variance bound, k = {k}"),
        bound,
        Some(d_np(p, &z, MetricSpec::sup(-k))?),
        Some(ulc_hypothesis(p, n, r)),
    ))
}

/// `d(X_0, X_t) <= (nr(1-r)/(n+1)) Σ_{u<t} d'(X_u⁺, X_u*)`, where `d` is the
/// metric `spec` and `d'` raises its difference order by one.
pub fn binomial_chain_bound(
    p: &Pmf,
    n: usize,
    r: f64,
    t: usize,
    spec: MetricSpec,
) -> Result<BoundReport> {
    let path = markov_path(p, n, r, t)?;
    let raised = MetricSpec::new(spec.n + 1, spec.p)?;
    let mut acc = CompensatedSum::new();
    let mut uncertainty = 0.0;
    for x in &path[..t] {
        let gap = d_np(&plus_transform(x, n, r)?, &size_bias(x)?, raised)?;
        acc.add(gap.value);
        uncertainty += gap.uncertainty;
    }
    let coef = n as f64 * r * (1.0 - r) / (n + 1) as f64;
    let mut exact = d_np(p, &path[t], spec)?;
    exact.uncertainty += coef * uncertainty;
    Ok(BoundReport::new(
        format!("binomial chain bound, t = {t}"),
        coef * acc.value(),
        Some(exact),
        None,
    ))
}

/// `β = 5.47 √n e^{-(n+1)/3}`.
pub fn lightbulb_beta(n: usize) -> f64 {
    5.47 * (n as f64).sqrt() * (-(n as f64 + 1.0) / 3.0).exp()
}

/// `H(W) <= H(Po((n-1)/2)) - β log(2β/(n+2))` for the lightbulb count
/// `W`, valid for `n >= 10`.
pub fn lightbulb_entropy_bound(n: usize) -> Result<BoundReport> {
    if n < 10 {
        return Err(Error::InvalidN(n));
    }
    let beta = lightbulb_beta(n);
    let bound = poisson_entropy((n as f64 - 1.0) / 2.0)? + entropy_diff_bound(beta, n / 2 + 1)?;
    let exact = entropy(&lightbulb(n)?);
    Ok(BoundReport::new(
        format!("lightbulb entropy bound, n = {n}"),
        bound,
        Some(exact_value(exact)),
        None,
    ))
}

/// `-β log(β/k)`, the entropy gap allowed between two laws on `k` points
/// whose `ℓ_1` distance is at most `β ≤ 1/2`.
pub fn entropy_diff_bound(beta: f64, k: usize) -> Result<f64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::InvalidBeta(beta));
    }
    if k == 0 {
        return Err(invalid("support size k must be >= 1"));
    }
    Ok(-beta * (beta / k as f64).ln())
}

/// `½ log(2πe(λ + 1/12))`.
pub fn poisson_entropy_upper(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda = {lambda} must be positive")));
    }
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    Ok(0.5 * (two_pi_e * (lambda + 1.0 / 12.0)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::MixingDistribution;

    fn hyper() -> Pmf {
        Pmf::hypergeometric(4, 2, 2).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hyp1_examples() {
        let r = hyp1_bound(&hyper(), 0).unwrap();
        assert!(close(r.bound, 1.0 / 3.0, 1e-14));
        assert_eq!(r.holds, Some(true));
        let r = hyp1_bound(&hyper(), -1).unwrap();
        assert!(close(r.bound, 2.0 / 3.0, 1e-14));
        let z = Pmf::poisson(2.5, 1e-15).unwrap();
        for k in -1..=2 {
            let r = hyp1_bound(&z, k).unwrap();
            assert!(r.bound < 1e-12 && r.exact.unwrap() < 1e-12);
        }
        assert!(hyp1_bound(&hyper(), 3).is_err());
    }

    #[test]
    fn cor_order_matches_direct_expectation() {
        let p = Pmf::binomial(6, 0.3).unwrap();
        let lambda = p.mean();
        let z = Pmf::poisson(lambda, 1e-16).unwrap();
        for s in 1..4u32 {
            let direct = z.expect(|j| binom(j as i64 + s as i64 + 1, s as i64 + 1))
                - p.expect(|j| binom(j as i64 + s as i64 + 1, s as i64 + 1));
            let r = cor_order_bound(&p, s, s as i32 + 1).unwrap();
            assert!(close(r.bound, direct, 1e-11), "s = {s}");
            assert_eq!(r.holds, Some(true));
        }
    }

    #[test]
    fn failed_hypothesis_withholds_verdict() {
        // two-point law far from Poisson: W* <=_st W + 1 fails
        let p = Pmf::new(0, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = hyp1_bound(&p, 0).unwrap();
        assert!(!r.hypothesis.as_ref().unwrap().satisfied);
        assert_eq!(r.holds, None);
        assert!(r.exact.is_some());
        assert!(r.bound >= 0.0);
    }

    #[test]
    fn thm_pois_examples() {
        let reports = thm_pois_bounds(&hyper(), 1).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(close(reports[2].bound, 1.0 / 3.0, 1e-14));
        let b = Pmf::binomial(5, 0.2).unwrap();
        let reports = thm_pois_bounds(&b, 1).unwrap();
        let star_minus = size_bias(&b).unwrap().shift(-1).unwrap();
        let direct = 0.5 * d_np(&b, &star_minus, MetricSpec::l1(0)).unwrap().value;
        assert!(close(reports[0].bound, direct, 1e-15));
        assert!(reports.iter().all(|r| r.holds == Some(true)));
        for s in 0..4 {
            let z = Pmf::poisson(1.7, 1e-30).unwrap();
            let reports = thm_pois_bounds(&z, s).unwrap();
            assert_eq!(reports.len(), if s == 0 { 1 } else { 4 + s as usize });
            for r in &reports {
                assert!(r.bound < 1e-12, "{} = {}", r.source, r.bound);
            }
        }
    }

    #[test]
    fn dw_examples() {
        let r = dw_var_bound(&hyper()).unwrap();
        assert!(close(r.bound, 2.0 / 3.0, 1e-14));
        assert_eq!(r.holds, Some(true));
        let r = dw_var_bound(&Pmf::binomial(100, 0.02).unwrap()).unwrap();
        assert_eq!(r.holds, Some(true));
    }

    #[test]
    fn concentration_examples() {
        let pois = ConcentrationKind::Poisson { lambda: 1.0 };
        let r = concentration(pois, 1.0, Tail::Upper, None).unwrap();
        assert!(close(r.bound, std::f64::consts::E / 4.0, 1e-15));
        let r = concentration(pois, 1e-9, Tail::Upper, None).unwrap();
        assert!(close(r.bound, 1.0, 1e-8));
        assert_eq!(
            concentration(pois, 1.0, Tail::Lower, None),
            Err(Error::InvalidT {
                t: 1.0,
                lambda: 1.0
            })
        );
        let h = Pmf::hypergeometric(20, 8, 6).unwrap();
        let kind = ConcentrationKind::Poisson { lambda: h.mean() };
        for t in [0.5, 1.0, 2.0] {
            let t = t * h.mean().sqrt();
            for tail in [Tail::Upper, Tail::Lower] {
                if tail == Tail::Lower && t >= h.mean() {
                    continue;
                }
                let r = concentration(kind, t, tail, Some(&h)).unwrap();
                assert_eq!(r.holds, Some(true));
            }
        }
    }

    #[test]
    fn binomial_concentration_edges() {
        let kind = ConcentrationKind::Binomial { n: 5, r: 0.4 };
        let b = Pmf::binomial(5, 0.4).unwrap();
        let r = concentration(kind, 3.0, Tail::Upper, Some(&b)).unwrap();
        assert!(close(r.bound, 0.4f64.powi(5), 1e-15));
        assert_eq!(r.holds, Some(true));
        let r = concentration(kind, 3.5, Tail::Upper, Some(&b)).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.exact, Some(0.0));
        for t in [0.3, 1.0, 1.9] {
            for tail in [Tail::Upper, Tail::Lower] {
                let r = concentration(kind, t, tail, Some(&b)).unwrap();
                assert_eq!(r.holds, Some(true));
                assert!(r.bound <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn mp_examples() {
        let point = MixingDistribution::atoms(vec![(2.0, 1.0)]).unwrap();
        for n in 0..4 {
            let r = mp_bound(&point, n).unwrap();
            assert_eq!(r.bound, 0.0);
            assert!(r.exact.unwrap() < 1e-15);
        }
        let two = MixingDistribution::atoms(vec![(0.5, 0.5), (1.5, 0.5)]).unwrap();
        let r = mp_bound(&two, 0).unwrap();
        assert!(close(r.bound, 0.5, 1e-15));
        let r = mp_bound(&two, 2).unwrap();
        assert!(close(r.bound, 0.5 * (2f64.ln() + 1.5f64.ln()), 1e-15));
        for n in 0..4 {
            assert_eq!(mp_bound(&two, n).unwrap().holds, Some(true));
        }
        let with_zero = MixingDistribution::atoms(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(mp_bound(&with_zero, 1), Err(Error::NonpositiveMixing));
        assert!(mp_bound(&with_zero, 0).is_ok());
        let thin = MixingDistribution::gamma(0.5, 1.0).unwrap();
        assert!(matches!(
            mp_bound(&thin, 1),
            Err(Error::IntegrabilityFailure(_))
        ));
        let g = MixingDistribution::gamma(3.0, 0.5).unwrap();
        for eps in [0.0, 0.25, 0.5] {
            assert_eq!(mp_tv_bound(&g, eps).unwrap().holds, Some(true));
        }
    }

    #[test]
    fn nb_examples() {
        let (b1, b2) = nb_bounds(1.0, 0.1).unwrap();
        let pi = std::f64::consts::PI;
        let e1 = (1.0f64 / 9.0).sqrt() * (2.0 / pi).sqrt();
        assert!(close(b1.bound, e1, 1e-15) && close(b1.bound, 0.2660, 1e-4));
        assert!(close(b2.bound, 1.0 / 81.0, 1e-15));
        assert_eq!(b1.holds, Some(true));
        assert_eq!(b2.holds, Some(true));
        let (s1, s2) = nb_bounds(2.0, 1e-9).unwrap();
        assert!(s1.bound < 1e-4 && s2.bound < 1e-8);
        assert!(nb_bounds(0.0, 0.5).is_err());
    }

    #[test]
    fn gamma_identity_matches_quadrature() {
        for beta in [0.5, 1.0, 3.0] {
            for q in [0.05, 0.1, 0.3] {
                let mix = MixingDistribution::gamma_for_negative_binomial(beta, q).unwrap();
                let lambda = mix.mean();
                let quad = mix.expect(|x| (x - lambda).abs(), &[lambda]);
                assert!(close(gamma_mean_abs_dev(beta, q).unwrap(), quad, 1e-12));
            }
        }
    }

    #[test]
    fn polya_examples() {
        let (a, b) = polya_bounds(10, 2, 1, 5).unwrap();
        assert!(a.bound > 0.0 && b.bound > 0.0);
        assert_eq!(a.holds, Some(true));
        assert_eq!(b.holds, Some(true));
        let small = polya_bounds(10, 2, 1, 5).unwrap().0.bound;
        let large = polya_bounds(10, 2, 4, 5).unwrap().0.bound;
        assert!(large > small);
        assert!(polya_bounds(10, 0, 1, 5).is_err());
        assert!(polya_bounds(10, 2, 0, 5).is_err());
    }

    #[test]
    fn binomial_approx_examples() {
        let b = Pmf::binomial(7, 0.35).unwrap();
        for k in -1..=2 {
            let r = binomial_approx_bound(&b, 7, 0.35, k).unwrap();
            assert!(r.bound < 1e-14 && r.exact.unwrap() < 1e-14);
        }
        let r = binomial_approx_bound(&hyper(), 2, 0.5, 0).unwrap();
        assert!(close(r.bound, 1.0 / 12.0, 1e-15));
        assert_eq!(r.holds, Some(true));
        let r = binomial_approx_bound(&hyper(), 1, 0.5, 0).unwrap();
        assert!(!r.hypothesis.unwrap().satisfied);
        assert_eq!(r.holds, None);
    }

    #[test]
    fn binomial_chain_examples() {
        let b = Pmf::binomial(5, 0.3).unwrap();
        let r = binomial_chain_bound(&b, 5, 0.3, 4, MetricSpec::l1(1)).unwrap();
        assert!(r.bound < 1e-14 && r.exact.unwrap() < 1e-14);
        let r = binomial_chain_bound(&hyper(), 2, 0.5, 0, MetricSpec::l1(1)).unwrap();
        assert_eq!((r.bound, r.exact), (0.0, Some(0.0)));
        let r = binomial_chain_bound(&hyper(), 2, 0.5, 3, MetricSpec::l1(1)).unwrap();
        assert_eq!(r.holds, Some(true));
    }

    #[test]
    fn lightbulb_examples() {
        assert!(lightbulb_beta(10) <= 0.5);
        assert_eq!(lightbulb_entropy_bound(9), Err(Error::InvalidN(9)));
        assert_eq!(lightbulb_entropy_bound(10).unwrap().holds, Some(true));
        assert!(close(poisson_entropy_upper(1.0).unwrap(), 1.459, 1e-3));
        assert_eq!(entropy_diff_bound(0.6, 3), Err(Error::InvalidBeta(0.6)));
        assert!(close(
            entropy_diff_bound(0.5, 1).unwrap(),
            0.5 * 2f64.ln(),
            1e-15
        ));
    }
}
