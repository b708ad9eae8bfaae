//! Exactly solvable models built from negatively dependent indicators, and
//! checks of the dependence conditions on explicit joint tables.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::Pmf;
use crate::error::{invalid, Error, Result};
use crate::numeric::{self, binom, pascal_rows, CompensatedSum};
use crate::orderings::{OrderingReport, Relation, DEFAULT_ORDER_TOL};

/// Largest number of states or outcomes any exact enumeration may visit.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;
pub const MAX_TABLE_SIZE: usize = 20;
pub const MAX_PERMUTATION_SIZE: usize = 20;
pub const MAX_LIGHTBULB: usize = 200;
pub const MAX_EXACT_NR: usize = 5;

/// Number of urns holding at least `c` balls after `m` balls are dropped
/// independently and uniformly into `n` urns, by enumerating all `n^m`
/// placements.
pub fn occupancy_model(m: usize, n: usize, c: usize) -> Result<Pmf> {
    if n == 0 {
        return Err(invalid("occupancy needs at least one urn"));
    }
    let placements = (n as f64).powi(m as i32);
    if placements > ENUMERATION_LIMIT as f64 {
        return Err(Error::TooLarge(format!("{n}^{m} placements")));
    }
    let mut counts = vec![0usize; n];
    counts[0] = m;
    let mut hit = (0..n).filter(|&u| counts[u] >= c).count();
    let mut tally = vec![0u64; n + 1];
    let mut digits = vec![0usize; m];
    loop {
        tally[hit] += 1;
        // odometer step: move one ball at a time, updating the hit count
        let mut pos = 0;
        loop {
            if pos == m {
                let total = placements;
                let weights = tally.iter().map(|&t| t as f64 / total).collect();
                return Ok(Pmf::from_dense(weights, 0.0));
            }
            let from = digits[pos];
            let to = if from + 1 == n { 0 } else { from + 1 };
            let before = (counts[from] >= c) as usize + (counts[to] >= c) as usize;
            counts[from] -= 1;
            counts[to] += 1;
            let after = (counts[from] >= c) as usize + (counts[to] >= c) as usize;
            hit = hit + after - before;
            digits[pos] = to;
            if to != 0 {
                break;
            }
            pos += 1;
        }
    }
}

/// Number of colours never drawn in `m` Pólya draws from an urn that starts
/// with one ball of each of `n_colours` colours; each drawn ball is
/// returned with one extra ball of its colour.
///
/// With `t` draws made and `k` colours seen, every unseen colour still has
/// exactly one ball among `n + t`, so the seen count is a Markov chain.
pub fn polya_unseen(n_colours: usize, m: usize) -> Result<Pmf> {
    if n_colours == 0 {
        return Err(invalid("need at least one colour"));
    }
    if (n_colours as u64).saturating_mul(m as u64 + 1) > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!("{n_colours} colours, {m} draws")));
    }
    let n = n_colours;
    let mut seen = vec![0.0; n + 1];
    seen[0] = 1.0;
    for t in 0..m {
        let total = (n + t) as f64;
        let mut next = vec![0.0; n + 1];
        for k in 0..=n {
            if seen[k] == 0.0 {
                continue;
            }
            let fresh = (n - k) as f64 / total;
            next[k] += seen[k] * (1.0 - fresh);
            if k < n {
                next[k + 1] += seen[k] * fresh;
            }
        }
        seen = next;
    }
    let unseen = (0..=n).map(|w| seen[n - w]).collect();
    Ok(Pmf::from_dense(unseen, 0.0))
}

/// Number of columns with at most `m_threshold` ones in a `rows × n`
/// 0/1 matrix whose row `k` has `s[k]` ones in uniformly chosen positions.
///
/// The state after each row is the histogram of columns by their count of
/// ones, capped at `m_threshold + 1`.
pub fn matrix_occupancy(rows: usize, n: usize, s: &[usize], m_threshold: usize) -> Result<Pmf> {
    if s.len() != rows {
        return Err(invalid(format!(
            "{} row counts given for {rows} rows",
            s.len()
        )));
    }
    if let Some(&bad) = s.iter().find(|&&sk| sk > n) {
        return Err(invalid(format!("row count {bad} exceeds {n} columns")));
    }
    let cap = m_threshold + 1;
    let pascal = pascal_rows(n);
    let mut start = vec![0usize; cap + 1];
    start[0] = n;
    let mut states: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    states.insert(start, 1.0);
    for &sk in s {
        let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let norm = pascal[n][sk];
        for (hist, p) in &states {
            let mut pick = vec![0usize; cap + 1];
            distribute(hist, sk, 0, &mut pick, &mut |pick| {
                let ways: f64 = pick.iter().zip(hist).map(|(&x, &h)| pascal[h][x]).product();
                let mut moved = hist.clone();
                for (c, &x) in pick.iter().enumerate() {
                    moved[c] -= x;
                    moved[(c + 1).min(cap)] += x;
                }
                *next.entry(moved).or_insert(0.0) += p * ways / norm;
            });
        }
        if next.len() as u64 > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(format!("{} occupancy states", next.len())));
        }
        states = next;
    }
    let mut weights = vec![CompensatedSum::new(); n + 1];
    for (hist, p) in &states {
        let low: usize = hist[..cap].iter().sum();
        weights[low].add(*p);
    }
    Ok(Pmf::from_dense(
        weights.iter().map(|w| w.value()).collect(),
        0.0,
    ))
}

/// Calls `visit` with every way of taking `left` items from the categories
/// `hist[c..]`, at most `hist[c]` from each.
fn distribute(
    hist: &[usize],
    left: usize,
    c: usize,
    pick: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if c == hist.len() {
        if left == 0 {
            visit(pick);
        }
        return;
    }
    let room: usize = hist[c + 1..].iter().sum();
    let lo = left.saturating_sub(room);
    for x in lo..=left.min(hist[c]) {
        pick[c] = x;
        distribute(hist, left - x, c + 1, pick, visit);
    }
    pick[c] = 0;
}

/// Law of `W = Σ I(σ_i ≤ a_i)` for a uniform permutation `σ` of `{1, …, n}`.
///
/// Counted exactly through the rook polynomial of the Ferrers board
/// `{(i, j) : j ≤ a_i}`: with `r_j` the number of placements of `j`
/// non-attacking rooks, `#{W = k} = Σ_{j ≥ k} (-1)^{j-k} C(j, k) r_j (n-j)!`.
pub fn permutation_threshold(a: &[usize]) -> Result<Pmf> {
    let n = a.len();
    if n > MAX_PERMUTATION_SIZE {
        return Err(Error::TooLarge(format!(
            "permutations of {n} > {MAX_PERMUTATION_SIZE} points"
        )));
    }
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, &v)| v > n) {
        return Err(Error::InvalidThreshold { index, value });
    }
    let mut heights = a.to_vec();
    heights.sort_unstable();
    let mut rooks = vec![0i128; n + 1];
    rooks[0] = 1;
    for &b in &heights {
        for k in (1..=n).rev() {
            let free = b as i128 - (k as i128 - 1);
            if free > 0 {
                rooks[k] += rooks[k - 1] * free;
            }
        }
    }
    let mut fact = vec![1i128; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as i128;
    }
    let choose = |j: usize, k: usize| -> i128 {
        let mut c = 1i128;
        for i in 0..k {
            c = c * (j - i) as i128 / (i + 1) as i128;
        }
        c
    };
    let total = fact[n] as f64;
    let weights = (0..=n)
        .map(|k| {
            let count: i128 = (k..=n)
                .map(|j| {
                    let term = choose(j, k) * rooks[j] * fact[n - j];
                    if (j - k) % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum();
            count as f64 / total
        })
        .collect();
    Ok(Pmf::from_dense(weights, 0.0))
}

/// Number of lit bulbs after the `n`-day lightbulb process: all `n` bulbs
/// start off and on day `r` a uniformly chosen set of `r` bulbs is toggled.
pub fn lightbulb(n: usize) -> Result<Pmf> {
    if n == 0 {
        return Err(invalid("lightbulb process needs n >= 1"));
    }
    if n > MAX_LIGHTBULB {
        return Err(Error::TooLarge(format!(
            "lightbulb n = {n} > {MAX_LIGHTBULB}"
        )));
    }
    let pascal = pascal_rows(n);
    let mut on = vec![0.0; n + 1];
    on[0] = 1.0;
    for r in 1..=n {
        let mut next = vec![CompensatedSum::new(); n + 1];
        for (k, &p) in on.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            // j of the r toggled bulbs are currently on
            let lo = r.saturating_sub(n - k);
            for j in lo..=r.min(k) {
                let w = pascal[k][j] * pascal[n - k][r - j] / pascal[n][r];
                next[k - j + (r - j)].add(p * w);
            }
        }
        on = next.iter().map(|s| s.value()).collect();
    }
    Ok(Pmf::from_dense(on, 0.0))
}

/// Joint law of `n` indicators `X_1, …, X_n`, indexed by bitmask with bit
/// `i - 1` holding `X_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointIndicatorTable {
    n: usize,
    probs: Vec<f64>,
}

/// Sum of probabilities in a joint table must be within this of one.
pub const TABLE_NORMALIZATION_TOL: f64 = 1e-12;

impl JointIndicatorTable {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_SIZE {
            return Err(invalid(format!(
                "table size n = {n} outside 1..={MAX_TABLE_SIZE}"
            )));
        }
        if probs.len() != 1 << n {
            return Err(invalid(format!(
                "table over {n} indicators needs {} entries, got {}",
                1usize << n,
                probs.len()
            )));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let total = numeric::sum(probs.iter().copied());
        if (total - 1.0).abs() > TABLE_NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(JointIndicatorTable { n, probs })
    }

    /// Independent indicators with the given success probabilities.
    pub fn independent(ps: &[f64]) -> Result<Self> {
        if let Some(&bad) = ps.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return Err(invalid(format!("probability {bad} outside [0, 1]")));
        }
        let n = ps.len();
        if n == 0 || n > MAX_TABLE_SIZE {
            return Err(invalid(format!(
                "table size n = {n} outside 1..={MAX_TABLE_SIZE}"
            )));
        }
        let probs = (0..1usize << n)
            .map(|mask| {
                ps.iter()
                    .enumerate()
                    .map(|(i, &p)| if mask >> i & 1 == 1 { p } else { 1.0 - p })
                    .product()
            })
            .collect();
        Self::new(n, probs)
    }

    /// `X_i` = draw `i` is red, for `draws` draws without replacement from
    /// an urn of `red` red and `black` black balls.
    pub fn urn_draws(red: usize, black: usize, draws: usize) -> Result<Self> {
        if draws == 0 || draws > red + black {
            return Err(invalid(format!(
                "cannot make {draws} draws from {} balls",
                red + black
            )));
        }
        let probs = (0..1usize << draws)
            .map(|mask| {
                let (mut r, mut b, mut p) = (red, black, 1.0);
                for i in 0..draws {
                    let left = (r + b) as f64;
                    if mask >> i & 1 == 1 {
                        p *= r as f64 / left;
                        r = r.saturating_sub(1);
                    } else {
                        p *= b as f64 / left;
                        b = b.saturating_sub(1);
                    }
                }
                p
            })
            .collect();
        Self::new(draws, probs)
    }

    /// A table with independent Exp(1) weights, normalised.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::random_repulsive(n, 0.0, rng)
    }

    /// Exp(1) weights damped by `exp(-strength · C(|x|, 2))`, which favours
    /// outcomes with few ones and so tends to produce negative dependence.
    pub fn random_repulsive<R: Rng + ?Sized>(n: usize, strength: f64, rng: &mut R) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_SIZE {
            return Err(invalid(format!(
                "table size n = {n} outside 1..={MAX_TABLE_SIZE}"
            )));
        }
        let raw: Vec<f64> = (0..1usize << n)
            .map(|mask: usize| {
                let u: f64 = rng.random();
                let ones = mask.count_ones() as i64;
                -(1.0 - u).ln() * (-strength * binom(ones, 2)).exp()
            })
            .collect();
        let total = numeric::sum(raw.iter().copied());
        Self::new(n, raw.into_iter().map(|w| w / total).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(X = x)` for the outcome with bits `mask`.
    pub fn prob(&self, mask: usize) -> f64 {
        self.probs[mask]
    }

    pub fn marginal(&self, i: usize) -> f64 {
        numeric::sum(
            self.probs
                .iter()
                .enumerate()
                .filter(|(mask, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p),
        )
    }

    /// Outcome string with the leftmost character holding `X_1`.
    pub fn outcome_string(&self, mask: usize) -> String {
        (0..self.n)
            .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    fn parse_outcome(n: usize, s: &str) -> Result<usize> {
        if s.len() != n {
            return Err(invalid(format!("outcome '{s}' should have {n} characters")));
        }
        s.chars()
            .enumerate()
            .try_fold(0usize, |mask, (i, ch)| match ch {
                '0' => Ok(mask),
                '1' => Ok(mask | 1 << i),
                _ => Err(invalid(format!("outcome '{s}' must contain only 0 and 1"))),
            })
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    probs: BTreeMap<String, f64>,
}

impl Serialize for JointIndicatorTable {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let probs = self
            .probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(mask, p)| (self.outcome_string(mask), *p))
            .collect();
        TableRepr { n: self.n, probs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointIndicatorTable {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = TableRepr::deserialize(deserializer)?;
        if repr.n == 0 || repr.n > MAX_TABLE_SIZE {
            return Err(D::Error::custom(format!(
                "table size n = {} out of range",
                repr.n
            )));
        }
        let mut probs = vec![0.0; 1 << repr.n];
        for (key, p) in &repr.probs {
            let mask = Self::parse_outcome(repr.n, key).map_err(D::Error::custom)?;
            probs[mask] += p;
        }
        Self::new(repr.n, probs).map_err(D::Error::custom)
    }
}

/// Law of `W = X_1 + … + X_n`.
pub fn indicator_sum(t: &JointIndicatorTable) -> Pmf {
    let mut acc = vec![CompensatedSum::new(); t.n + 1];
    for (mask, &p) in t.probs.iter().enumerate() {
        acc[mask.count_ones() as usize].add(p);
    }
    Pmf::from_dense(acc.iter().map(|s| s.value()).collect(), 0.0)
}

/// Checks `Cov(X_i, 1{W - X_i ≥ t}) ≤ 0` for every `i` and threshold `t`.
///
/// Increasing functions of a single indicator are affine, and increasing
/// functions of `W - X_i` are non-negative combinations of threshold
/// indicators plus a constant, so these covariances decide total negative
/// dependence. The witness is the (1-based) indicator index.
pub fn tnd_check(t: &JointIndicatorTable) -> OrderingReport {
    let n = t.n;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 0..n {
        // joint[k][x] = P(W - X_i = k, X_i = x)
        let mut joint = vec![[0.0f64; 2]; n];
        for (mask, &p) in t.probs.iter().enumerate() {
            let x = mask >> i & 1;
            let rest = mask.count_ones() as usize - x;
            joint[rest][x] += p;
        }
        let px = numeric::sum(joint.iter().map(|j| j[1]));
        let mut tail_both = 0.0;
        let mut tail = 0.0;
        for k in (1..n).rev() {
            tail_both += joint[k][1];
            tail += joint[k][0] + joint[k][1];
            let cov = tail_both - px * tail;
            if cov > worst {
                worst = cov;
                witness = Some(i as i64 + 1);
            }
        }
    }
    OrderingReport::from_violation(Relation::Tnd, worst.max(0.0), witness, DEFAULT_ORDER_TOL)
}

/// How [`nr_check`] explores increasing functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NrMode {
    /// Every up-set indicator of `{0,1}^{n-1}`; needs `n ≤ 5`.
    Exact,
    /// Random non-negative combinations of principal up-set indicators.
    Randomized { trials: usize, seed: u64 },
}

/// Checks `E[φ(X_{-i}) | X_i = 1] ≤ E φ(X_{-i})` over increasing `φ`.
pub fn nr_check(t: &JointIndicatorTable, mode: NrMode) -> Result<OrderingReport> {
    let n = t.n;
    let d = n - 1;
    let cells = 1usize << d;
    // for each i: the conditional and unconditional laws of X_{-i}
    let mut laws = Vec::with_capacity(n);
    for i in 0..n {
        let px = t.marginal(i);
        let mut cond = vec![0.0; cells];
        let mut all = vec![0.0; cells];
        for (mask, &p) in t.probs.iter().enumerate() {
            let low = mask & ((1 << i) - 1);
            let high = mask >> (i + 1);
            let rest = low | high << i;
            all[rest] += p;
            if mask >> i & 1 == 1 && px > 0.0 {
                cond[rest] += p / px;
            }
        }
        laws.push((px, cond, all));
    }
    let gap = |f: &[f64], cond: &[f64], all: &[f64]| {
        numeric::sum(
            f.iter()
                .zip(cond.iter().zip(all))
                .map(|(v, (c, a))| v * (c - a)),
        )
    };
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let consider = |phi: &[f64], worst: &mut f64, witness: &mut Option<i64>| {
        for (i, (px, cond, all)) in laws.iter().enumerate() {
            if *px == 0.0 {
                continue;
            }
            let g = gap(phi, cond, all);
            if g > *worst {
                *worst = g;
                *witness = Some(i as i64 + 1);
            }
        }
    };
    match mode {
        NrMode::Exact => {
            if n > MAX_EXACT_NR {
                return Err(Error::TooLarge(format!(
                    "exact negative-relation check needs n <= {MAX_EXACT_NR}, got {n}"
                )));
            }
            for set in 0u64..1u64 << cells {
                let member = |x: usize| set >> x & 1 == 1;
                let upward = (0..cells)
                    .all(|x| !member(x) || (0..d).all(|b| x >> b & 1 == 1 || member(x | 1 << b)));
                if !upward {
                    continue;
                }
                let phi: Vec<f64> = (0..cells).map(|x| member(x) as u8 as f64).collect();
                consider(&phi, &mut worst, &mut witness);
            }
        }
        NrMode::Randomized { trials, seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let coef: Vec<f64> = (0..cells)
                    .map(|_| {
                        if rng.random_bool(0.3) {
                            rng.random()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let phi: Vec<f64> = (0..cells)
                    .map(|y| {
                        coef.iter()
                            .enumerate()
                            .filter(|(x, _)| x & y == *x)
                            .map(|(_, c)| c)
                            .sum()
                    })
                    .collect();
                let top = phi.iter().copied().fold(0.0, f64::max);
                if top > 0.0 {
                    let phi: Vec<f64> = phi.iter().map(|v| v / top).collect();
                    consider(&phi, &mut worst, &mut witness);
                }
            }
        }
    }
    Ok(OrderingReport::from_violation(
        Relation::NegRelated,
        worst.max(0.0),
        witness,
        DEFAULT_ORDER_TOL,
    ))
}

/// A model by name and parameters, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Occupancy {
        balls: usize,
        urns: usize,
        threshold: usize,
    },
    PolyaUnseen {
        colours: usize,
        draws: usize,
    },
    MatrixOccupancy {
        rows: usize,
        columns: usize,
        row_counts: Vec<usize>,
        threshold: usize,
    },
    PermutationThreshold {
        thresholds: Vec<usize>,
    },
    Lightbulb {
        n: usize,
    },
    IndicatorSum {
        table: JointIndicatorTable,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<Pmf> {
        match self {
            ModelSpec::Occupancy {
                balls,
                urns,
                threshold,
            } => occupancy_model(*balls, *urns, *threshold),
            ModelSpec::PolyaUnseen { colours, draws } => polya_unseen(*colours, *draws),
            ModelSpec::MatrixOccupancy {
                rows,
                columns,
                row_counts,
                threshold,
            } => matrix_occupancy(*rows, *columns, row_counts, *threshold),
            ModelSpec::PermutationThreshold { thresholds } => permutation_threshold(thresholds),
            ModelSpec::Lightbulb { n } => lightbulb(*n),
            ModelSpec::IndicatorSum { table } => Ok(indicator_sum(table)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn occupancy_examples() {
        let p = occupancy_model(2, 2, 1).unwrap();
        assert_eq!(p, Pmf::new(1, vec![0.5, 0.5]).unwrap());
        assert_eq!(occupancy_model(1, 5, 1).unwrap(), Pmf::point(1));
        assert_eq!(occupancy_model(2, 2, 3).unwrap(), Pmf::point(0));
        assert!(matches!(
            occupancy_model(30, 10, 1),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn occupancy_empty_urns_match_inclusion_exclusion() {
        // c = 1 counts occupied urns; n - W empty urns, E = n (1 - 1/n)^m
        let (m, n) = (6, 4);
        let p = occupancy_model(m, n, 1).unwrap();
        let expected = n as f64 * (1.0 - (1.0 - 1.0 / n as f64).powi(m as i32));
        assert!(close(p.mean(), expected, 1e-13));
    }

    #[test]
    fn polya_examples() {
        assert_eq!(polya_unseen(2, 1).unwrap(), Pmf::point(1));
        let p = polya_unseen(2, 2).unwrap();
        assert!(close(p.prob(0), 1.0 / 3.0, 1e-15));
        assert!(close(p.prob(1), 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn polya_matches_uniform_compositions() {
        // draw counts per colour are uniform over compositions of m
        for n in 1..7i64 {
            for m in 0..9i64 {
                let p = polya_unseen(n as usize, m as usize).unwrap();
                for w in 0..=n {
                    let oracle = if m == 0 {
                        (w == n) as u8 as f64
                    } else {
                        binom(n, w) * binom(m - 1, n - w - 1) / binom(m + n - 1, n - 1)
                    };
                    assert!(close(p.prob(w), oracle, 1e-14), "n={n} m={m} w={w}");
                }
            }
        }
    }

    #[test]
    fn matrix_occupancy_examples() {
        assert_eq!(
            matrix_occupancy(3, 4, &[4, 4, 4], 3).unwrap(),
            Pmf::point(4)
        );
        // one row, s ones: exactly n - s columns have zero ones
        let p = matrix_occupancy(1, 5, &[2], 0).unwrap();
        assert_eq!(p, Pmf::point(3));
    }

    #[test]
    fn matrix_occupancy_matches_brute_force() {
        let (n, s, m) = (4usize, [2usize, 1, 3], 1usize);
        let subsets = |k: usize| -> Vec<usize> {
            (0..1usize << n)
                .filter(|x| x.count_ones() as usize == k)
                .collect()
        };
        let rows: Vec<Vec<usize>> = s.iter().map(|&k| subsets(k)).collect();
        let mut tally = vec![0.0; n + 1];
        let total = rows.iter().map(|r| r.len()).product::<usize>() as f64;
        for &a in &rows[0] {
            for &b in &rows[1] {
                for &c in &rows[2] {
                    let low = (0..n)
                        .filter(|&col| {
                            let ones = [a, b, c].iter().filter(|&&r| r >> col & 1 == 1).count();
                            ones <= m
                        })
                        .count();
                    tally[low] += 1.0 / total;
                }
            }
        }
        let p = matrix_occupancy(3, n, &s, m).unwrap();
        for (w, t) in tally.iter().enumerate() {
            assert!(close(p.prob(w as i64), *t, 1e-15));
        }
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn permutation_threshold_examples() {
        assert_eq!(permutation_threshold(&[3, 3, 3]).unwrap(), Pmf::point(3));
        assert_eq!(permutation_threshold(&[0, 0, 0]).unwrap(), Pmf::point(0));
        let p = permutation_threshold(&[1, 2]).unwrap();
        assert_eq!(p, Pmf::new(1, vec![0.5, 0.5]).unwrap());
        assert_eq!(
            permutation_threshold(&[1, 4, 2]),
            Err(Error::InvalidThreshold { index: 1, value: 4 })
        );
    }

    #[test]
    fn permutation_threshold_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=7 {
            let perms = permutations(n);
            let mut cases = vec![(1..=n).collect::<Vec<_>>()];
            for _ in 0..5 {
                cases.push((0..n).map(|_| rng.random_range(0..=n)).collect());
            }
            for a in cases {
                let mut tally = vec![0.0; n + 1];
                for s in &perms {
                    let w = s.iter().zip(&a).filter(|(si, ai)| si <= ai).count();
                    tally[w] += 1.0 / perms.len() as f64;
                }
                let p = permutation_threshold(&a).unwrap();
                for (w, t) in tally.iter().enumerate() {
                    assert!(close(p.prob(w as i64), *t, 1e-14), "a = {a:?}");
                }
            }
        }
    }

    #[test]
    fn lightbulb_examples() {
        assert_eq!(lightbulb(1).unwrap(), Pmf::point(1));
        let two = lightbulb(2).unwrap();
        assert!(close(two.prob(1), 1.0, 1e-15));
        for n in 1..40 {
            let p = lightbulb(n).unwrap();
            let even = n % 4 == 0 || n % 4 == 3;
            for (k, w) in p.iter() {
                if w > 0.0 {
                    assert_eq!(k % 2 == 0, even, "n = {n}, k = {k}");
                }
            }
            assert!(close(p.total_mass(), 1.0, 1e-12));
        }
    }

    #[test]
    fn lightbulb_mean_matches_simulation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [5usize, 10, 15] {
            let exact = lightbulb(n).unwrap();
            let runs = 100_000;
            let (mut s1, mut s2) = (0.0, 0.0);
            let mut bulbs = vec![false; n];
            let mut idx: Vec<usize> = (0..n).collect();
            for _ in 0..runs {
                bulbs.iter_mut().for_each(|b| *b = false);
                for r in 1..=n {
                    // partial Fisher-Yates: the first r entries form a uniform r-subset
                    for i in 0..r {
                        let j = rng.random_range(i..n);
                        idx.swap(i, j);
                        bulbs[idx[i]] = !bulbs[idx[i]];
                    }
                }
                let w = bulbs.iter().filter(|&&b| b).count() as f64;
                s1 += w;
                s2 += w * w;
            }
            let mean = s1 / runs as f64;
            let se = ((s2 / runs as f64 - mean * mean) / runs as f64).sqrt();
            assert!((mean - exact.mean()).abs() <= 3.0 * se, "n = {n}");
        }
    }

    #[test]
    fn indicator_sums() {
        let t = JointIndicatorTable::independent(&[0.3; 5]).unwrap();
        assert!(indicator_sum(&t).max_abs_diff(&Pmf::binomial(5, 0.3).unwrap()) < 1e-15);
        let urn = JointIndicatorTable::urn_draws(2, 2, 2).unwrap();
        let h = Pmf::hypergeometric(4, 2, 2).unwrap();
        assert!(indicator_sum(&urn).max_abs_diff(&h) < 1e-15);
        let one = JointIndicatorTable::independent(&[0.4]).unwrap();
        assert_eq!(indicator_sum(&one), Pmf::bernoulli(0.4).unwrap());
    }

    #[test]
    fn dependence_checks() {
        let ind = JointIndicatorTable::independent(&[0.2, 0.5, 0.7]).unwrap();
        assert!(tnd_check(&ind).max_violation < 1e-15);
        assert!(nr_check(&ind, NrMode::Exact).unwrap().max_violation < 1e-15);

        let comonotone = JointIndicatorTable::new(2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = tnd_check(&comonotone);
        assert!(!r.holds);
        assert!(close(r.max_violation, 0.25, 1e-15));

        let urn = JointIndicatorTable::urn_draws(2, 2, 2).unwrap();
        assert!(tnd_check(&urn).holds);
        assert!(nr_check(&urn, NrMode::Exact).unwrap().holds);
        let rnd = nr_check(
            &urn,
            NrMode::Randomized {
                trials: 200,
                seed: 1,
            },
        )
        .unwrap();
        assert!(rnd.holds);
        assert!(!nr_check(&comonotone, NrMode::Exact).unwrap().holds);

        let big = JointIndicatorTable::independent(&[0.5; 6]).unwrap();
        assert!(matches!(
            nr_check(&big, NrMode::Exact),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn model_specs() {
        let spec: ModelSpec =
            serde_json::from_str(r#"{"kind": "occupancy", "balls": 2, "urns": 2, "threshold": 1}"#)
                .unwrap();
        assert_eq!(spec.build().unwrap(), occupancy_model(2, 2, 1).unwrap());
        let spec = ModelSpec::PermutationThreshold {
            thresholds: vec![1, 2],
        };
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn table_json() {
        let urn = JointIndicatorTable::urn_draws(3, 2, 3).unwrap();
        let s = serde_json::to_string(&urn).unwrap();
        let back: JointIndicatorTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, urn);
        let t: JointIndicatorTable =
            serde_json::from_str(r#"{"n": 2, "probs": {"10": 0.25, "01": 0.75}}"#).unwrap();
        assert_eq!(t.marginal(0), 0.25);
        assert!(
            serde_json::from_str::<JointIndicatorTable>(r#"{"n": 2, "probs": {"1": 1.0}}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<JointIndicatorTable>(r#"{"n": 1, "probs": {"1": 0.5}}"#)
                .is_err()
        );
    }
}
