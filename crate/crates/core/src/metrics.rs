//! The `d_{n,p}` family: the `ℓ_p` norm of `Δ^n (F - G)` for distribution
//! functions `F`, `G`, with negative `n` meaning iterated tail sums.
//!
//! `F - G` is a function on all of `Z`. For `n >= 1` the differences
//! `Δ^n (F - G)(j)` are non-zero down to `j = -n`, and that range is kept
//! (so that `d_{1,1}` picks up `|P(0) - Q(0)|`). For `n <= -1` the tail sums
//! are taken over `j >= 0`.

use serde::{Deserialize, Serialize};

use crate::dist::Pmf;
use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;
use crate::orderings::{forward_diff, tail_sum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub n: i32,
    /// `f64::INFINITY` selects the sup norm.
    pub p: f64,
}

impl MetricSpec {
    pub fn new(n: i32, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(invalid(format!("norm exponent p = {p} must be >= 1")));
        }
        Ok(MetricSpec { n, p })
    }

    pub const fn sup(n: i32) -> Self {
        MetricSpec {
            n,
            p: f64::INFINITY,
        }
    }

    pub const fn l1(n: i32) -> Self {
        MetricSpec { n, p: 1.0 }
    }
}

/// A distance together with a bound on the error due to truncated tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub uncertainty: f64,
}

impl MetricValue {
    pub fn upper(&self) -> f64 {
        self.value + self.uncertainty
    }
}

pub fn seq_norm(seq: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        seq.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        seq.iter()
            .map(|x| x.abs())
            .collect::<CompensatedSum>()
            .value()
    } else {
        let top = seq.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        if top == 0.0 {
            return 0.0;
        }
        let s = seq
            .iter()
            .map(|x| (x.abs() / top).powf(p))
            .collect::<CompensatedSum>()
            .value();
        top * s.powf(1.0 / p)
    }
}

/// `F - G` on `j = -pad, …, M` where `M` is the largest retained support
/// point of either law.
fn cdf_difference(p: &Pmf, q: &Pmf, pad: usize) -> Vec<f64> {
    let len = p.support_max().max(q.support_max()) + 1;
    let mut out = vec![0.0; pad];
    let mut acc = CompensatedSum::new();
    for (a, b) in p.dense_len(len).into_iter().zip(q.dense_len(len)) {
        acc.add(a - b);
        out.push(acc.value());
    }
    out
}

/// `‖Δ^n (F - G)‖_p`.
///
/// For `n >= 1` the sequence starts at `j = -1`, so the norm is that of
/// `Δ^{n-1}(P - Q)` over `j >= 0` and `d_{1,1}` is twice the total variation.
///
/// The uncertainty covers the mass cut from either tail: it moves each
/// value of `F - G` by at most `δ = tail(P) + tail(Q)`, which `Δ^n` can
/// amplify by `2^n` per point and `Δ^{-m}` by `(M + 1)^m`.
pub fn d_np(p: &Pmf, q: &Pmf, spec: MetricSpec) -> Result<MetricValue> {
    if !(spec.p >= 1.0) {
        return Err(invalid(format!(
            "norm exponent p = {} must be >= 1",
            spec.p
        )));
    }
    let delta = p.tail_mass() + q.tail_mass();
    let top = p.support_max().max(q.support_max()) as f64;
    let (seq, uncertainty) = if spec.n >= 0 {
        let n = spec.n as u32;
        let h = cdf_difference(p, q, n.min(1) as usize);
        let points = if spec.p.is_infinite() {
            1.0
        } else {
            (top + n as f64 + 2.0).powf(1.0 / spec.p)
        };
        (forward_diff(&h, n), delta * 2f64.powi(n as i32) * points)
    } else {
        let m = spec.n.unsigned_abs();
        let h = cdf_difference(p, q, 0);
        let points = if spec.p.is_infinite() {
            1.0
        } else {
            (top + 2.0).powf(1.0 / spec.p)
        };
        (tail_sum(&h, m), delta * (top + 1.0).powi(m as i32) * points)
    };
    let value = seq_norm(&seq, spec.p);
    if !value.is_finite() {
        return Err(Error::DivergentTailSum);
    }
    Ok(MetricValue { value, uncertainty })
}

/// Total variation, `d_{1,1} / 2`.
pub fn tv(p: &Pmf, q: &Pmf) -> Result<MetricValue> {
    let d = d_np(p, q, MetricSpec::l1(1))?;
    Ok(MetricValue {
        value: d.value / 2.0,
        uncertainty: d.uncertainty / 2.0,
    })
}

/// `d_{0,∞}`.
pub fn kolmogorov(p: &Pmf, q: &Pmf) -> Result<MetricValue> {
    d_np(p, q, MetricSpec::sup(0))
}

/// `d_{0,1}`.
pub fn wasserstein(p: &Pmf, q: &Pmf) -> Result<MetricValue> {
    d_np(p, q, MetricSpec::l1(0))
}

/// `d_{-1,∞}`.
pub fn stop_loss(p: &Pmf, q: &Pmf) -> Result<MetricValue> {
    d_np(p, q, MetricSpec::sup(-1))
}

/// `d_{1,∞}`.
pub fn local_limit(p: &Pmf, q: &Pmf) -> Result<MetricValue> {
    d_np(p, q, MetricSpec::sup(1))
}
