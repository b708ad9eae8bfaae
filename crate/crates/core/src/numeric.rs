//! Small numerical kernels shared across the crate: compensated summation,
//! binomial coefficients under the `C(a, b) = 0 for b > a` convention,
//! log-gamma, Gauss–Legendre nodes and ratio-driven pmf tables.

pub use statrs::function::gamma::ln_gamma;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// `C(a, b)` for integer arguments, zero whenever `b > a` or `b < 0`.
pub fn binom(a: i64, b: i64) -> f64 {
    if b < 0 || b > a {
        return 0.0;
    }
    let k = b.min(a - b);
    if a <= 1020 {
        let mut c = 1.0f64;
        for i in 0..k {
            c = c * (a - i) as f64 / (i + 1) as f64;
        }
        c
    } else {
        ln_binom(a as u64, b as u64).exp()
    }
}

pub fn ln_binom(a: u64, b: u64) -> f64 {
    debug_assert!(b <= a);
    ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)
}

/// Pascal's triangle up to row `n` in floating point.
pub fn pascal_rows(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for a in 0..=n {
        let mut row = vec![1.0; a + 1];
        for b in 1..a {
            row[b] = rows[a - 1][b - 1] + rows[a - 1][b];
        }
        rows.push(row);
    }
    rows
}

/// `(x)_+ = max(x, 0)` for integers.
pub fn pos_part(x: i64) -> i64 {
    x.max(0)
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// A unimodal pmf table built from its mode outwards.
///
/// `ratio(k)` is `p(k + 1) / p(k)`; it must fall below one past the mode.
/// `ratio_sup(k)` bounds `ratio(i)` for all `i >= k`, and is used to bound
/// the geometric remainder beyond the last computed term.
pub(crate) struct RatioTable {
    pub weights: Vec<f64>,
    pub tail: f64,
}

pub(crate) fn truncated_by_ratio(
    mode: usize,
    ln_p_mode: f64,
    ratio: impl Fn(usize) -> f64,
    ratio_sup: impl Fn(usize) -> f64,
    tail_eps: f64,
) -> RatioTable {
    let mut below = Vec::with_capacity(mode + 1);
    let p_mode = ln_p_mode.exp();
    below.push(p_mode);
    let mut p = p_mode;
    for k in (0..mode).rev() {
        p /= ratio(k);
        below.push(p);
    }
    below.reverse();

    let mut weights = below;
    let mut p = p_mode;
    let mut k = mode;
    let remainder;
    loop {
        let sup = ratio_sup(k);
        if k > mode && sup < 1.0 {
            let geo = p * sup / (1.0 - sup);
            if geo < tail_eps * 1e-6 || p == 0.0 {
                remainder = geo;
                break;
            }
        }
        p *= ratio(k);
        k += 1;
        weights.push(p);
    }

    // suffix sums from the right, smallest terms first
    let mut suffix = CompensatedSum::new();
    suffix.add(remainder);
    let mut cut = weights.len() - 1;
    let mut tail = remainder;
    while cut > 0 {
        let mut next = suffix;
        next.add(weights[cut]);
        if next.value() > tail_eps {
            break;
        }
        suffix = next;
        tail = next.value();
        cut -= 1;
    }
    weights.truncate(cut + 1);
    RatioTable { weights, tail }
}

/// Poisson pmf on `0..=len-1` without truncation bookkeeping.
pub fn poisson_table(lambda: f64, len: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut v = vec![0.0; len.max(1)];
        v[0] = 1.0;
        v.truncate(len);
        return v;
    }
    let mode = lambda.floor() as usize;
    let ln_mode = -lambda + mode as f64 * lambda.ln() - ln_factorial(mode as u64);
    let mut out = vec![0.0; len];
    if mode < len {
        out[mode] = ln_mode.exp();
        for k in mode + 1..len {
            out[k] = out[k - 1] * lambda / k as f64;
        }
        for k in (0..mode).rev() {
            out[k] = out[k + 1] * (k + 1) as f64 / lambda;
        }
    } else {
        for (k, w) in out.iter_mut().enumerate() {
            *w = (-lambda + k as f64 * lambda.ln() - ln_factorial(k as u64)).exp();
        }
    }
    out
}

/// `ln P(Z_lambda = j)`; `-inf` for impossible points.
pub fn poisson_ln_pmf(lambda: f64, j: u64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -lambda + j as f64 * lambda.ln() - ln_factorial(j)
}
