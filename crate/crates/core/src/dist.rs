//! The distribution value type and the named families built on it.
//!
//! A [`Pmf`] is a finitely supported mass function on a contiguous range
//! `offset..offset + weights.len()` of the non-negative integers, together
//! with `tail_mass`: an upper bound on probability that was cut away when a
//! law with unbounded support (Poisson, negative binomial, random sums) was
//! truncated. Truncated mass is never renormalised into the retained
//! weights; every consumer that compares against an untruncated law adds
//! `tail_mass` as explicit slack.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{self, binom, ln_gamma, truncated_by_ratio, CompensatedSum};

/// Tolerance on `sum(weights) + tail_mass` around one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Weights above this negative value are treated as rounding noise.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-15;
/// Weights below this at either support edge are trimmed.
pub const TRIM_THRESHOLD: f64 = 1e-300;
/// Default truncation budget for unbounded families.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfRepr", into = "PmfRepr")]
pub struct Pmf {
    offset: usize,
    weights: Vec<f64>,
    tail_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct PmfRepr {
    offset: usize,
    weights: Vec<f64>,
    #[serde(default)]
    tail_mass: f64,
}

impl TryFrom<PmfRepr> for Pmf {
    type Error = Error;

    fn try_from(r: PmfRepr) -> Result<Self> {
        Pmf::with_tail(r.offset, r.weights, r.tail_mass)
    }
}

impl From<Pmf> for PmfRepr {
    fn from(p: Pmf) -> Self {
        PmfRepr {
            offset: p.offset,
            weights: p.weights,
            tail_mass: p.tail_mass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub n_trunc: usize,
}

impl Pmf {
    /// Validated constructor for an exact finite-support distribution.
    pub fn new(offset: usize, weights: Vec<f64>) -> Result<Pmf> {
        Pmf::with_tail(offset, weights, 0.0)
    }

    /// Validated constructor that also carries a truncation budget.
    pub fn with_tail(offset: usize, weights: Vec<f64>, tail_mass: f64) -> Result<Pmf> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= -NEGATIVE_WEIGHT_TOL) {
                return Err(Error::NegativeWeight {
                    index: offset + i,
                    value: w,
                });
            }
        }
        if !(tail_mass >= 0.0) {
            return Err(invalid(format!(
                "tail_mass {tail_mass} must be non-negative"
            )));
        }
        let total = numeric::sum(weights.iter().copied()) + tail_mass;
        if !((total - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::NotNormalized(total));
        }
        Ok(Pmf::from_parts(offset, weights, tail_mass))
    }

    /// Unvalidated assembly used by transforms: clips rounding negatives and
    /// trims negligible edge weights.
    pub(crate) fn from_parts(offset: usize, mut weights: Vec<f64>, tail_mass: f64) -> Pmf {
        for w in weights.iter_mut() {
            if *w < 0.0 || w.is_nan() {
                *w = 0.0;
            }
        }
        let first = weights.iter().position(|&w| w >= TRIM_THRESHOLD);
        let last = weights.iter().rposition(|&w| w >= TRIM_THRESHOLD);
        match (first, last) {
            (Some(a), Some(b)) => {
                weights.truncate(b + 1);
                weights.drain(..a);
                Pmf {
                    offset: offset + a,
                    weights,
                    tail_mass,
                }
            }
            _ => Pmf {
                offset: 0,
                weights: vec![0.0],
                tail_mass,
            },
        }
    }

    pub(crate) fn from_dense(weights: Vec<f64>, tail_mass: f64) -> Pmf {
        Pmf::from_parts(0, weights, tail_mass)
    }

    /// Point mass at `c`.
    pub fn point(c: usize) -> Pmf {
        Pmf {
            offset: c,
            weights: vec![1.0],
            tail_mass: 0.0,
        }
    }

    pub fn bernoulli(p: f64) -> Result<Pmf> {
        Pmf::binomial(1, p)
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn support_min(&self) -> usize {
        self.offset
    }

    pub fn support_max(&self) -> usize {
        self.offset + self.weights.len() - 1
    }

    /// `P(X = j)`, zero off the stored range.
    pub fn prob(&self, j: i64) -> f64 {
        if j < self.offset as i64 {
            return 0.0;
        }
        self.weights
            .get((j - self.offset as i64) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// Weights indexed from zero through `support_max()`.
    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.offset];
        v.extend_from_slice(&self.weights);
        v
    }

    /// Weights indexed from zero, zero-padded to length `len` (or longer if
    /// the support needs it).
    pub fn dense_len(&self, len: usize) -> Vec<f64> {
        let mut v = self.dense();
        if v.len() < len {
            v.resize(len, 0.0);
        }
        v
    }

    pub fn total_mass(&self) -> f64 {
        numeric::sum(self.weights.iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.offset + i, w))
    }

    /// `E f(X)` over the retained support.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        numeric::sum(
            self.iter()
                .map(|(j, w)| if w == 0.0 { 0.0 } else { w * f(j) }),
        )
    }

    pub fn mean(&self) -> f64 {
        self.expect(|j| j as f64)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let v = self.expect(|j| (j as f64 - m) * (j as f64 - m));
        if v < 0.0 {
            0.0
        } else {
            v
        }
    }

    pub fn moments(&self) -> MomentSummary {
        MomentSummary {
            mean: self.mean(),
            variance: self.variance(),
            n_trunc: self.weights.len(),
        }
    }

    /// `E C(X, k)` with the convention `C(a, b) = 0` for `b > a`.
    pub fn factorial_moment(&self, k: u32) -> f64 {
        self.expect(|j| binom(j as i64, k as i64))
    }

    /// `P(X >= j)` over the retained support.
    pub fn survival(&self, j: i64) -> f64 {
        numeric::sum(self.iter().filter(|&(i, _)| i as i64 >= j).map(|(_, w)| w))
    }

    /// Distribution function on `0..=support_max()`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.dense()
            .into_iter()
            .map(|w| {
                acc.add(w);
                acc.value()
            })
            .collect()
    }

    pub fn is_point_mass(&self) -> bool {
        self.weights.len() == 1
    }

    /// Largest absolute pointwise difference, including `tail_mass`.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        let lo = self.offset.min(other.offset) as i64;
        let hi = self.support_max().max(other.support_max()) as i64;
        (lo..=hi)
            .map(|j| (self.prob(j) - other.prob(j)).abs())
            .fold((self.tail_mass - other.tail_mass).abs(), f64::max)
    }

    /// `sup |F - G|` is in `metrics`; this is the plain `½ Σ |p - q|`.
    pub fn tv_to(&self, other: &Pmf) -> f64 {
        let lo = self.offset.min(other.offset) as i64;
        let hi = self.support_max().max(other.support_max()) as i64;
        0.5 * numeric::sum((lo..=hi).map(|j| (self.prob(j) - other.prob(j)).abs()))
    }

    // -----------------------------------------------------------------
    // Families
    // -----------------------------------------------------------------

    /// Poisson law truncated where the upper tail drops below `tail_eps`.
    pub fn poisson(lambda: f64, tail_eps: f64) -> Result<Pmf> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid(format!(
                "Poisson mean {lambda} must be finite and >= 0"
            )));
        }
        check_tail_eps(tail_eps)?;
        if lambda == 0.0 {
            return Ok(Pmf::point(0));
        }
        let mode = lambda.floor() as usize;
        let ln_mode = numeric::poisson_ln_pmf(lambda, mode as u64);
        let t = truncated_by_ratio(
            mode,
            ln_mode,
            |k| lambda / (k + 1) as f64,
            |k| lambda / (k + 1) as f64,
            tail_eps,
        );
        Ok(Pmf::from_dense(t.weights, t.tail))
    }

    pub fn binomial(n: usize, r: f64) -> Result<Pmf> {
        if !(0.0..=1.0).contains(&r) {
            return Err(invalid(format!("binomial probability {r} outside [0, 1]")));
        }
        Ok(Pmf::from_dense(binomial_weights(n, r), 0.0))
    }

    /// Negative binomial: `P(k) = Γ(k+β)/(Γ(β) k!) (1-q)^β q^k`, mean `βq/(1-q)`.
    pub fn negative_binomial(beta: f64, q: f64, tail_eps: f64) -> Result<Pmf> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid(format!(
                "negative binomial shape {beta} must be > 0"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("negative binomial q = {q} outside (0, 1)")));
        }
        check_tail_eps(tail_eps)?;
        let mode = if beta > 1.0 {
            ((beta - 1.0) * q / (1.0 - q)).floor() as usize
        } else {
            0
        };
        let ln_p = |k: usize| {
            ln_gamma(k as f64 + beta) - ln_gamma(beta) - numeric::ln_factorial(k as u64)
                + beta * (1.0 - q).ln()
                + k as f64 * q.ln()
        };
        let ratio = move |k: usize| q * (k as f64 + beta) / (k + 1) as f64;
        let t = truncated_by_ratio(mode, ln_p(mode), ratio, move |k| ratio(k).max(q), tail_eps);
        Ok(Pmf::from_dense(t.weights, t.tail))
    }

    /// Beta-binomial (Pólya) law: `Bin(m, ξ)` with `ξ ~ Beta(a, b)`.
    pub fn beta_binomial(m: usize, a: f64, b: f64) -> Result<Pmf> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(invalid(format!(
                "beta-binomial shapes ({a}, {b}) must be > 0"
            )));
        }
        let ln_beta = |x: f64, y: f64| ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y);
        let base = ln_beta(a, b);
        let weights = (0..=m)
            .map(|k| {
                let ln_c = numeric::ln_binom(m as u64, k as u64);
                (ln_c + ln_beta(k as f64 + a, (m - k) as f64 + b) - base).exp()
            })
            .collect();
        Ok(Pmf::from_dense(weights, 0.0))
    }

    /// Number of marked items in a uniform `n`-subset of a population of
    /// `population` items, `marked` of which are marked.
    pub fn hypergeometric(population: usize, n: usize, marked: usize) -> Result<Pmf> {
        if marked > population || n > population {
            return Err(invalid(format!(
                "hypergeometric needs m, n <= N (N = {population}, n = {n}, m = {marked})"
            )));
        }
        let lo = (n + marked).saturating_sub(population);
        let hi = n.min(marked);
        let total = binom(population as i64, n as i64);
        let weights = (lo..=hi)
            .map(|k| {
                binom(marked as i64, k as i64) * binom((population - marked) as i64, (n - k) as i64)
                    / total
            })
            .collect();
        Ok(Pmf::from_parts(lo, weights, 0.0))
    }

    /// Binomial `Bin(n-1, 1/2)` mass clubbed onto integers of one parity.
    pub fn clubbed_binomial(n: usize, parity: Parity) -> Result<Pmf> {
        if n == 0 {
            return Err(invalid("clubbed binomial needs n >= 1"));
        }
        let x = binomial_weights(n - 1, 0.5);
        let px = |j: i64| {
            if j < 0 || j as usize >= x.len() {
                0.0
            } else {
                x[j as usize]
            }
        };
        let weights = (0..=n as i64)
            .map(|j| {
                if parity.matches(j as usize) {
                    px(j - 1) + px(j)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Pmf::from_dense(weights, 0.0))
    }

    // -----------------------------------------------------------------
    // Arithmetic
    // -----------------------------------------------------------------

    /// Law of the sum of independent copies.
    pub fn convolve(&self, other: &Pmf) -> Pmf {
        let a = &self.weights;
        let b = &other.weights;
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Pmf::from_parts(
            self.offset + other.offset,
            out,
            self.tail_mass + other.tail_mass,
        )
    }

    /// Translate the support by `c`.
    pub fn shift(&self, c: i64) -> Result<Pmf> {
        let new = self.offset as i64 + c;
        if new < 0 {
            return Err(Error::NegativeSupport {
                offset: self.offset,
                shift: c,
            });
        }
        Ok(Pmf {
            offset: new as usize,
            weights: self.weights.clone(),
            tail_mass: self.tail_mass,
        })
    }

    pub fn mixture(components: &[(f64, Pmf)]) -> Result<Pmf> {
        if components.is_empty() {
            return Err(Error::Empty);
        }
        let mut total = CompensatedSum::new();
        for (w, _) in components {
            if !(*w >= 0.0) {
                return Err(invalid(format!("mixture weight {w} must be >= 0")));
            }
            total.add(*w);
        }
        if (total.value() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total.value()));
        }
        Ok(mix_unchecked(components.iter().map(|(w, p)| (*w, p))))
    }

    /// Law of `X_1 + ... + X_W` with iid `X_i ~ summand` independent of `W ~ self`.
    pub fn compound(&self, summand: &Pmf, tail_eps: f64) -> Pmf {
        let max_count = self.support_max();
        let len = max_count * summand.support_max() + 1;
        let mut acc = vec![0.0; len];
        let mut power = Pmf::point(0);
        let mut missing = self.tail_mass;
        let summand_keep = 1.0 - summand.tail_mass;
        for k in 0..=max_count {
            let pk = self.prob(k as i64);
            if pk > 0.0 {
                for (j, w) in power.iter() {
                    acc[j] += pk * w;
                }
                if summand.tail_mass > 0.0 {
                    missing += pk * (1.0 - summand_keep.powi(k as i32));
                }
            }
            if k < max_count {
                power = power.convolve(summand);
                power.tail_mass = 0.0;
            }
        }
        // trim an upper tail of at most tail_eps
        let mut cut = acc.len();
        let mut dropped = CompensatedSum::new();
        while cut > 1 {
            let mut next = dropped;
            next.add(acc[cut - 1]);
            if next.value() > tail_eps {
                break;
            }
            dropped = next;
            cut -= 1;
        }
        acc.truncate(cut);
        Pmf::from_dense(acc, missing + dropped.value())
    }

    // -----------------------------------------------------------------
    // Shape predicates
    // -----------------------------------------------------------------

    fn has_interval_support(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// Interval support and `p(i)^2 >= p(i-1) p(i+1)`.
    pub fn is_log_concave(&self) -> bool {
        if !self.has_interval_support() {
            return false;
        }
        self.weights
            .windows(3)
            .all(|w| w[1] * w[1] >= w[0] * w[2] * (1.0 - SHAPE_TOL))
    }

    /// Ultra log-concavity of degree `n` (binomial reference) or infinite
    /// degree (Poisson reference).
    pub fn is_ulc(&self, degree: UlcDegree) -> Result<bool> {
        if let UlcDegree::Finite(n) = degree {
            if self.support_max() > n {
                return Err(Error::SupportExceedsDegree {
                    max: self.support_max(),
                    degree: n,
                });
            }
        }
        if !self.has_interval_support() {
            return Ok(false);
        }
        let ok = (self.offset..self.support_max().saturating_sub(1)).all(|i| {
            let (a, b, c) = (
                self.prob(i as i64),
                self.prob(i as i64 + 1),
                self.prob(i as i64 + 2),
            );
            match degree {
                UlcDegree::Finite(n) => {
                    let ca = binom(n as i64, i as i64);
                    let cb = binom(n as i64, i as i64 + 1);
                    let cc = binom(n as i64, i as i64 + 2);
                    (b / cb) * (b / cb) >= (a / ca) * (c / cc) * (1.0 - SHAPE_TOL)
                }
                UlcDegree::Infinite => {
                    (i + 1) as f64 * b * b >= (i + 2) as f64 * a * c * (1.0 - SHAPE_TOL)
                }
            }
        });
        Ok(ok)
    }
}

/// Multiplicative slack on each shape inequality.
pub const SHAPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlcDegree {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, j: usize) -> bool {
        Parity::of(j) == self
    }
}

/// Parametric families by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Poisson {
        lambda: f64,
        tail_eps: f64,
    },
    Binomial {
        n: usize,
        r: f64,
    },
    NegativeBinomial {
        beta: f64,
        q: f64,
        tail_eps: f64,
    },
    BetaBinomial {
        m: usize,
        a: f64,
        b: f64,
    },
    Hypergeometric {
        population: usize,
        n: usize,
        marked: usize,
    },
    ClubbedBinomial {
        n: usize,
        parity: Parity,
    },
}

impl Family {
    pub fn build(&self) -> Result<Pmf> {
        match *self {
            Family::Poisson { lambda, tail_eps } => Pmf::poisson(lambda, tail_eps),
            Family::Binomial { n, r } => Pmf::binomial(n, r),
            Family::NegativeBinomial { beta, q, tail_eps } => {
                Pmf::negative_binomial(beta, q, tail_eps)
            }
            Family::BetaBinomial { m, a, b } => Pmf::beta_binomial(m, a, b),
            Family::Hypergeometric {
                population,
                n,
                marked,
            } => Pmf::hypergeometric(population, n, marked),
            Family::ClubbedBinomial { n, parity } => Pmf::clubbed_binomial(n, parity),
        }
    }
}

fn check_tail_eps(tail_eps: f64) -> Result<()> {
    if tail_eps > 0.0 && tail_eps < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("tail_eps {tail_eps} outside (0, 1)")))
    }
}

/// Weighted sum of pmfs without normalisation checks.
pub(crate) fn mix_unchecked<'a>(components: impl IntoIterator<Item = (f64, &'a Pmf)>) -> Pmf {
    let comps: Vec<(f64, &Pmf)> = components.into_iter().collect();
    let lo = comps.iter().map(|(_, p)| p.offset).min().unwrap_or(0);
    let hi = comps
        .iter()
        .map(|(_, p)| p.support_max())
        .max()
        .unwrap_or(0);
    let mut acc: Vec<CompensatedSum> = vec![CompensatedSum::new(); hi - lo + 1];
    let mut tail = 0.0;
    for (w, p) in comps {
        if w == 0.0 {
            continue;
        }
        for (j, x) in p.iter() {
            acc[j - lo].add(w * x);
        }
        tail += w * p.tail_mass;
    }
    Pmf::from_parts(lo, acc.iter().map(|s| s.value()).collect(), tail)
}

/// `Bin(n, r)` weights on `0..=n`.
pub(crate) fn binomial_weights(n: usize, r: f64) -> Vec<f64> {
    if r == 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if r == 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let (ln_r, ln_s) = (r.ln(), (1.0 - r).ln());
    (0..=n)
        .map(|k| {
            if n <= 1020 {
                binom(n as i64, k as i64) * r.powi(k as i32) * (1.0 - r).powi((n - k) as i32)
            } else {
                (numeric::ln_binom(n as u64, k as u64) + k as f64 * ln_r + (n - k) as f64 * ln_s)
                    .exp()
            }
        })
        .collect()
}
