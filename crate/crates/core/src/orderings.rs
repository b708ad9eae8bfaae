//! Forward differences, the `h_k` functionals and checks of the usual
//! stochastic, increasing convex, convex and `s`-convex orders.
//!
//! All comparisons run on the explicit difference sequence `P(j) - Q(j)`
//! rather than on two separately accumulated sets of tail sums, so that
//! tail functionals of nearly equal laws do not cancel catastrophically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::Pmf;
use crate::error::{Error, Result};
use crate::numeric::{binom, CompensatedSum};
use crate::transforms::size_bias;

pub const DEFAULT_ORDER_TOL: f64 = 1e-10;
/// Allowed gap between means for the convex order.
pub const CX_MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    St,
    Icx,
    Cx,
    SCx(u32),
    /// Total negative dependence of an indicator vector.
    Tnd,
    /// Negative relation of an indicator vector.
    NegRelated,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::St => write!(f, "st"),
            Relation::Icx => write!(f, "icx"),
            Relation::Cx => write!(f, "cx"),
            Relation::SCx(s) => write!(f, "{s}-cx"),
            Relation::Tnd => write!(f, "tnd"),
            Relation::NegRelated => write!(f, "nr"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub relation: Relation,
    pub holds: bool,
    pub max_violation: f64,
    /// Index of the worst tail comparison. Moment conditions carry none.
    pub witness: Option<i64>,
    pub tolerance: f64,
}

impl OrderingReport {
    pub(crate) fn from_violation(
        relation: Relation,
        max_violation: f64,
        witness: Option<i64>,
        tolerance: f64,
    ) -> Self {
        let max_violation = max_violation.max(0.0);
        OrderingReport {
            relation,
            holds: max_violation <= tolerance,
            max_violation,
            witness: if max_violation > 0.0 { witness } else { None },
            tolerance,
        }
    }
}

/// `Δ^n` with `Δf(j) = f(j + 1) - f(j)`, treating the sequence as zero past
/// its end. The output keeps the input length.
pub fn forward_diff(seq: &[f64], n: u32) -> Vec<f64> {
    let mut cur = seq.to_vec();
    for _ in 0..n {
        let len = cur.len();
        for j in 0..len {
            let next = if j + 1 < len { cur[j + 1] } else { 0.0 };
            cur[j] = next - cur[j];
        }
    }
    cur
}

/// `Δ^{-n}` with `Δ^{-1}f(j) = -Σ_{i >= j} f(i)`.
pub fn tail_sum(seq: &[f64], n: u32) -> Vec<f64> {
    let mut cur = seq.to_vec();
    for _ in 0..n {
        let mut acc = CompensatedSum::new();
        for j in (0..cur.len()).rev() {
            acc.add(cur[j]);
            cur[j] = -acc.value();
        }
    }
    cur
}

/// Suffix sums `Σ_{i >= j} f(i)` iterated `k` times; entry `j` is then
/// `Σ_x f(x) C(x - j + k - 1, k - 1)`.
fn iterated_suffix(seq: &[f64], k: u32) -> Vec<f64> {
    let mut cur = seq.to_vec();
    for _ in 0..k {
        let mut acc = CompensatedSum::new();
        for j in (0..cur.len()).rev() {
            acc.add(cur[j]);
            cur[j] = acc.value();
        }
    }
    cur
}

/// `h_k(X, j) = E C(X - j + k - 1, k - 1)` for `k >= 1`, and the pmf for
/// `k = 0`.
pub fn h_func(p: &Pmf, k: u32, j: i64) -> f64 {
    if k == 0 {
        return p.prob(j);
    }
    let k = k as i64;
    p.expect(|x| binom(x as i64 - j + k - 1, k - 1))
}

fn difference(p: &Pmf, q: &Pmf) -> Vec<f64> {
    let len = p.support_max().max(q.support_max()) + 1;
    p.dense_len(len)
        .into_iter()
        .zip(q.dense_len(len))
        .map(|(a, b)| a - b)
        .collect()
}

/// Default tolerance: `1e-10` plus the truncated mass of both arguments.
pub fn default_tolerance(p: &Pmf, q: &Pmf) -> f64 {
    DEFAULT_ORDER_TOL + p.tail_mass() + q.tail_mass()
}

/// Checks `P ≤ Q` in the given order at the default tolerance.
pub fn check_order(p: &Pmf, q: &Pmf, relation: Relation) -> Result<OrderingReport> {
    check_order_tol(p, q, relation, default_tolerance(p, q))
}

pub fn check_order_tol(
    p: &Pmf,
    q: &Pmf,
    relation: Relation,
    tolerance: f64,
) -> Result<OrderingReport> {
    let d = difference(p, q);
    let (violation, witness) = match relation {
        Relation::St => worst_tail(&d, 1, 1),
        Relation::Icx => worst_tail(&d, 2, 1),
        Relation::Cx => {
            let slack = CX_MEAN_TOL + p.tail_mass() + q.tail_mass();
            let (mp, mq) = (p.mean(), q.mean());
            if (mp - mq).abs() > tolerance.max(slack) {
                return Err(Error::MeanMismatch {
                    expected: mq,
                    actual: mp,
                });
            }
            worst_tail(&d, 2, 1)
        }
        Relation::SCx(s) => {
            if s == 0 {
                return Err(crate::error::invalid("s-convex order needs s >= 1"));
            }
            let moment_gap = (1..s)
                .map(|k| factorial_moment_of(&d, k))
                .fold(f64::NEG_INFINITY, f64::max);
            let (tail, witness) = worst_tail(&d, s, s as usize);
            if moment_gap > tail {
                (moment_gap, None)
            } else {
                (tail, witness)
            }
        }
        Relation::Tnd | Relation::NegRelated => {
            return Err(crate::error::invalid(
                "dependence relations are checked on indicator tables",
            ))
        }
    };
    Ok(OrderingReport::from_violation(
        relation, violation, witness, tolerance,
    ))
}

fn factorial_moment_of(d: &[f64], k: u32) -> f64 {
    crate::numeric::sum(
        d.iter()
            .enumerate()
            .map(|(x, v)| v * binom(x as i64, k as i64)),
    )
}

/// Largest `h_k(P, j) - h_k(Q, j)` over `j >= from`, with its index.
fn worst_tail(d: &[f64], k: u32, from: usize) -> (f64, Option<i64>) {
    let h = iterated_suffix(d, k);
    h.iter()
        .enumerate()
        .skip(from)
        .map(|(j, v)| (*v, Some(j as i64)))
        .fold(
            (f64::NEG_INFINITY, None),
            |a, b| if b.0 > a.0 { b } else { a },
        )
}

/// Checks `W* ≤_{s-cx} W + 1`.
pub fn check_eq_order1(p: &Pmf, s: u32) -> Result<OrderingReport> {
    let star = size_bias(p)?;
    let shifted = p.shift(1)?;
    check_order(&star, &shifted, Relation::SCx(s))
}

/// Randomised search for a function `f` with `Δ^i f >= 0` for
/// `i = 1, …, s` and `E f(P) > E f(Q)`.
///
/// Each trial draws a sparse non-negative `Δ^s f`, integrates it `s` times
/// with random non-negative constants, and scales `f` to unit maximum.
/// A violation above tolerance disproves the order; none is only evidence.
pub fn fs_random_oracle(p: &Pmf, q: &Pmf, s: u32, trials: usize, seed: u64) -> OrderingReport {
    let d = difference(p, q);
    let len = d.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut f: Vec<f64> = (0..len)
            .map(|_| {
                if rng.random_bool(0.3) {
                    rng.random::<f64>()
                } else {
                    0.0
                }
            })
            .collect();
        for _ in 0..s.max(1) {
            let mut acc = if rng.random_bool(0.5) {
                rng.random::<f64>()
            } else {
                0.0
            };
            f = f
                .iter()
                .map(|&g| {
                    let v = acc;
                    acc += g;
                    v
                })
                .collect();
        }
        let top = f.iter().copied().fold(0.0, f64::max);
        if top <= 0.0 {
            continue;
        }
        let gap = crate::numeric::sum(d.iter().zip(&f).map(|(a, b)| a * b / top));
        worst = worst.max(gap);
    }
    let worst = if worst.is_finite() { worst } else { 0.0 };
    OrderingReport::from_violation(Relation::SCx(s), worst, None, default_tolerance(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_diff_and_tail_sum() {
        assert_eq!(forward_diff(&[1.0, 1.0, 1.0], 1), vec![0.0, 0.0, -1.0]);
        let s = [0.2, 0.5, 0.3];
        let back = forward_diff(&tail_sum(&s, 1), 1);
        for (a, b) in back.iter().zip(&s) {
            assert!((a - b).abs() < 1e-16);
        }
        // applied to a pmf, Δ^{-1} gives minus the survival function
        assert_eq!(tail_sum(&s, 1), vec![-1.0, -0.8, -0.3]);
    }

    #[test]
    fn h_func_examples() {
        let b = Pmf::bernoulli(0.3).unwrap();
        assert!((h_func(&b, 1, 1) - 0.3).abs() < 1e-16);
        let z = Pmf::poisson(1.0, 1e-15).unwrap();
        assert!((h_func(&z, 2, 0) - 2.0).abs() < 1e-10);
        assert_eq!(h_func(&b, 1, 5), 0.0);
        assert_eq!(h_func(&b, 3, 5), 0.0);
        assert_eq!(h_func(&b, 0, 1), 0.3);
    }

    #[test]
    fn h_func_matches_iterated_suffix() {
        let p = Pmf::new(0, vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        for k in 1..5 {
            let h = iterated_suffix(&p.dense(), k);
            for (j, v) in h.iter().enumerate() {
                assert!((h_func(&p, k, j as i64) - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn basic_orders() {
        let z = Pmf::poisson(1.0, 1e-14).unwrap();
        let r = check_order(&z, &z, Relation::St).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_violation, 0.0);

        let d1 = Pmf::point(1);
        assert!(check_order(&d1, &z, Relation::Cx).unwrap().holds);
        assert!(!check_order(&z, &d1, Relation::Cx).unwrap().holds);

        let h = Pmf::hypergeometric(4, 2, 2).unwrap();
        assert!(check_order(&h, &z, Relation::Cx).unwrap().holds);
        assert!(matches!(
            check_order(&Pmf::point(2), &z, Relation::Cx),
            Err(Error::MeanMismatch { .. })
        ));
    }

    #[test]
    fn cx_against_cone_generators() {
        // E f(δ_1) <= E f(Po(1)) for the generators (x - j)_+ and ±x
        let z = Pmf::poisson(1.0, 1e-15).unwrap();
        for j in 0..20 {
            let lhs = (1.0f64 - j as f64).max(0.0);
            let rhs = z.expect(|x| (x as f64 - j as f64).max(0.0));
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn eq_order1_examples() {
        for s in 1..5 {
            let r = check_eq_order1(&Pmf::poisson(2.0, 1e-14).unwrap(), s).unwrap();
            assert!(r.holds && r.max_violation < 1e-12, "s = {s}");
        }
        assert!(
            check_eq_order1(&Pmf::binomial(6, 0.4).unwrap(), 1)
                .unwrap()
                .holds
        );
        let bad = Pmf::new(0, vec![0.5, 0.0, 0.5]).unwrap();
        let r = check_eq_order1(&bad, 1).unwrap();
        assert!(!r.holds);
        assert!((r.max_violation - 0.5).abs() < 1e-15);
        assert_eq!(r.witness, Some(2));
        assert_eq!(check_eq_order1(&Pmf::point(0), 1), Err(Error::ZeroMean));
    }

    #[test]
    fn random_oracle() {
        let h = Pmf::hypergeometric(4, 2, 2).unwrap();
        assert_eq!(fs_random_oracle(&h, &h, 2, 100, 7).max_violation, 0.0);
        let star = size_bias(&h).unwrap();
        let r = fs_random_oracle(&star, &h.shift(1).unwrap(), 1, 10_000, 1);
        assert!(r.holds);
        let bad = Pmf::new(0, vec![0.5, 0.0, 0.5]).unwrap();
        let r = fs_random_oracle(
            &size_bias(&bad).unwrap(),
            &bad.shift(1).unwrap(),
            1,
            1000,
            3,
        );
        assert!(!r.holds);
    }

    #[test]
    fn report_json_shape() {
        let r = check_order(&Pmf::point(0), &Pmf::point(1), Relation::SCx(2)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["relation", "holds", "max_violation", "witness", "tolerance"] {
            assert!(v.get(key).is_some());
        }
        assert_eq!(v["relation"], serde_json::json!({"s_cx": 2}));
    }
}
