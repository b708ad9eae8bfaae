//! Distribution-to-distribution operators: thinning, size biasing, the
//! Poisson interpolation `U_α`, the shifted size bias `V`, hypergeometric
//! thinning, the `W⁺` reweighting and the binomial Markov chain, together
//! with mixed Poisson and mixed binomial constructions.

mod mixing;

pub use mixing::{
    MixingDistribution, MixingKind, Quadrature, DEFAULT_QUADRATURE_ORDER, MIN_QUADRATURE_ORDER,
};

use crate::dist::{binomial_weights, mix_unchecked, Pmf};
use crate::error::{invalid, Error, Result};
use crate::numeric;

/// Tolerance on `E W = nr` required by [`plus_transform`].
pub const PLUS_MEAN_TOL: f64 = 1e-9;
pub const DEFAULT_LEMMA1_STEP: f64 = 1e-4;

/// `P(W* = j) = j P(W = j) / E W`.
///
/// The normaliser is the first moment of the retained weights; for
/// truncated inputs the cut-off part of `Σ j P(j)` is carried as
/// `tail_mass · (support_max + 1) / mean`.
pub fn size_bias(p: &Pmf) -> Result<Pmf> {
    let m = p.mean();
    if !(m > 0.0) {
        return Err(Error::ZeroMean);
    }
    let weights: Vec<f64> = p.iter().map(|(j, w)| j as f64 * w / m).collect();
    let tail = p.tail_mass() * (p.support_max() + 1) as f64 / m;
    Ok(Pmf::from_parts(p.offset(), weights, tail))
}

/// `VW = W* - 1`.
pub fn v_op(p: &Pmf) -> Result<Pmf> {
    size_bias(p)?.shift(-1)
}

/// Binomial thinning `T_α`: each unit survives independently with
/// probability `alpha`.
pub fn thin(p: &Pmf, alpha: f64) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if alpha == 1.0 {
        return Ok(p.clone());
    }
    if alpha == 0.0 {
        return Ok(Pmf::from_parts(0, vec![p.total_mass()], p.tail_mass()));
    }
    let mut acc = vec![numeric::CompensatedSum::new(); p.support_max() + 1];
    for (i, w) in p.iter() {
        if w == 0.0 {
            continue;
        }
        for (j, b) in binomial_weights(i, alpha).into_iter().enumerate() {
            acc[j].add(w * b);
        }
    }
    Ok(Pmf::from_dense(
        acc.iter().map(|s| s.value()).collect(),
        p.tail_mass(),
    ))
}

/// A base law together with its mean and a point on the `U_α` path.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPath {
    base: Pmf,
    lambda: f64,
    alpha: f64,
    tail_eps: f64,
}

impl AlphaPath {
    pub fn new(base: Pmf, alpha: f64, tail_eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(tail_eps > 0.0 && tail_eps < 1.0) {
            return Err(invalid(format!("tail_eps {tail_eps} outside (0, 1)")));
        }
        let lambda = base.mean();
        if !(lambda > 0.0) {
            return Err(Error::ZeroMean);
        }
        Ok(AlphaPath {
            base,
            lambda,
            alpha,
            tail_eps,
        })
    }

    pub fn at(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(AlphaPath {
            alpha,
            ..self.clone()
        })
    }

    pub fn base(&self) -> &Pmf {
        &self.base
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }
}

/// `U_α W = T_α W + Z_{(1-α)λ}` with the Poisson part independent.
pub fn u_alpha(path: &AlphaPath) -> Result<Pmf> {
    let thinned = thin(&path.base, path.alpha)?;
    let replenish = Pmf::poisson((1.0 - path.alpha) * path.lambda, path.tail_eps)?;
    Ok(thinned.convolve(&replenish))
}

fn check_degree(p: &Pmf, n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("degree n must be >= 1"));
    }
    if p.support_max() > n {
        return Err(Error::SupportExceedsDegree {
            max: p.support_max(),
            degree: n,
        });
    }
    Ok(())
}

fn check_open_unit(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("r = {r} outside (0, 1)")))
    }
}

/// Hypergeometric thinning `H_n` of a law on `{0, …, n}`.
pub fn hyper_thin(p: &Pmf, n: usize) -> Result<Pmf> {
    check_degree(p, n)?;
    let nf = n as f64;
    let weights = (0..n)
        .map(|i| {
            let i64_ = i as i64;
            (n - i) as f64 / nf * p.prob(i64_) + (i + 1) as f64 / nf * p.prob(i64_ + 1)
        })
        .collect();
    Ok(Pmf::from_dense(weights, p.tail_mass()))
}

/// `P(W⁺ = j) = (n + 1 - j) / (n (1 - r)) · P(W = j - 1)` for `1 <= j <= n`.
/// Requires `E W = nr`, which is what makes the weights sum to one.
pub fn plus_transform(p: &Pmf, n: usize, r: f64) -> Result<Pmf> {
    check_open_unit(r)?;
    check_degree(p, n)?;
    let target = n as f64 * r;
    let mean = p.mean();
    if (mean - target).abs() > PLUS_MEAN_TOL {
        return Err(Error::MeanMismatch {
            expected: target,
            actual: mean,
        });
    }
    let scale = 1.0 / (n as f64 * (1.0 - r));
    let weights = (1..=n)
        .map(|j| (n + 1 - j) as f64 * scale * p.prob(j as i64 - 1))
        .collect();
    Ok(Pmf::from_parts(1, weights, p.tail_mass()))
}

/// One step of the binomial Markov chain through its closed recursion
/// `p'(i) = [(n+1-i)(s p(i) + r p(i-1)) + (i+1)(s p(i+1) + r p(i))] / (n+1)`.
pub fn markov_step(p: &Pmf, n: usize, r: f64) -> Result<Pmf> {
    check_open_unit(r)?;
    check_degree(p, n)?;
    Ok(step_unchecked(p, n, r))
}

fn step_unchecked(p: &Pmf, n: usize, r: f64) -> Pmf {
    let s = 1.0 - r;
    let at = |i: i64| p.prob(i);
    let weights = (0..=n as i64)
        .map(|i| {
            let up = (n as i64 + 1 - i) as f64 * (s * at(i) + r * at(i - 1));
            let down = (i + 1) as f64 * (s * at(i + 1) + r * at(i));
            (up + down) / (n + 1) as f64
        })
        .collect();
    Pmf::from_dense(weights, p.tail_mass())
}

/// `t` steps of [`markov_step`].
pub fn markov_chain(p: &Pmf, n: usize, r: f64, t: usize) -> Result<Pmf> {
    check_open_unit(r)?;
    check_degree(p, n)?;
    let mut cur = p.clone();
    for _ in 0..t {
        cur = step_unchecked(&cur, n, r);
    }
    Ok(cur)
}

/// The whole trajectory `X_0, …, X_t`.
pub fn markov_path(p: &Pmf, n: usize, r: f64, t: usize) -> Result<Vec<Pmf>> {
    check_open_unit(r)?;
    check_degree(p, n)?;
    let mut out = Vec::with_capacity(t + 1);
    out.push(p.clone());
    for u in 0..t {
        let next = step_unchecked(&out[u], n, r);
        out.push(next);
    }
    Ok(out)
}

/// `Po(ξ)` for a mixing law `ξ`.
///
/// Each quadrature node gets a share of the truncation budget in
/// proportion to its weight; the quadrature normalisation error is added
/// to `tail_mass`.
pub fn mixed_poisson(mix: &MixingDistribution, tail_eps: f64) -> Result<Pmf> {
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(invalid(format!("tail_eps {tail_eps} outside (0, 1)")));
    }
    let quad = mix.quadrature(&[]);
    let total = quad.total_weight();
    let live: Vec<(f64, f64)> = quad
        .points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(x, w)| (x, w / total))
        .collect();
    let count = live.len() as f64;
    let comps = live
        .iter()
        .map(|&(x, w)| {
            let eps = (tail_eps / (count * w)).clamp(1e-300, 0.5);
            Pmf::poisson(x, eps).map(|p| (w, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = mix_unchecked(comps.iter().map(|(w, p)| (*w, p)));
    out = Pmf::from_parts(
        out.offset(),
        out.weights().to_vec(),
        out.tail_mass() + quad.normalization_error,
    );
    Ok(out)
}

/// `Bin(m, ξ)` for a mixing law supported in `[0, 1]`.
pub fn mixed_binomial(m: usize, mix: &MixingDistribution) -> Result<Pmf> {
    if !mix.within_unit_interval() {
        return Err(Error::MixingSupportOutOfRange);
    }
    let quad = mix.quadrature(&[]);
    let total = quad.total_weight();
    let mut acc = vec![numeric::CompensatedSum::new(); m + 1];
    for &(x, w) in &quad.points {
        if w == 0.0 {
            continue;
        }
        for (k, b) in binomial_weights(m, x.clamp(0.0, 1.0))
            .into_iter()
            .enumerate()
        {
            acc[k].add(w / total * b);
        }
    }
    Ok(Pmf::from_dense(
        acc.iter().map(|s| s.value()).collect(),
        quad.normalization_error,
    ))
}

/// Largest pointwise gap in the thinning/size-biasing derivative identity
/// `∂/∂α P(W_α = j) = (λ/α) Δ[P(W_α + 1 = j) - P(W_α* = j)]`, with the
/// left side taken by central differences of step `h`.
pub fn lemma1_residual(path: &AlphaPath, h: f64) -> Result<f64> {
    let alpha = path.alpha;
    if !(h > 0.0) || alpha < h || alpha > 1.0 - h {
        return Err(invalid(format!(
            "alpha {alpha} must lie in [h, 1 - h] with h = {h} > 0"
        )));
    }
    let ahead = u_alpha(&path.at(alpha + h)?)?;
    let behind = u_alpha(&path.at(alpha - h)?)?;
    let here = u_alpha(path)?;
    let star = size_bias(&here)?;
    let gap = |j: i64| here.prob(j - 1) - star.prob(j);
    let hi = ahead
        .support_max()
        .max(behind.support_max())
        .max(star.support_max()) as i64
        + 1;
    let coef = path.lambda / alpha;
    let worst = (0..=hi)
        .map(|j| {
            let lhs = (ahead.prob(j) - behind.prob(j)) / (2.0 * h);
            let rhs = coef * (gap(j + 1) - gap(j));
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Largest pointwise gap in the exact chain identity
/// `P(X_t = j) - P(X_{t+1} = j) = (nr(1-r)/(n+1)) Δ[P(X_t⁺ = j) - P(X_t* = j)]`.
pub fn bin_lemma_residual(p: &Pmf, n: usize, r: f64) -> Result<f64> {
    let next = markov_step(p, n, r)?;
    let plus = plus_transform(p, n, r)?;
    let star = size_bias(p)?;
    let coef = n as f64 * r * (1.0 - r) / (n + 1) as f64;
    let gap = |j: i64| plus.prob(j) - star.prob(j);
    let worst = (0..=n as i64)
        .map(|j| {
            let lhs = p.prob(j) - next.prob(j);
            let rhs = coef * (gap(j + 1) - gap(j));
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}
