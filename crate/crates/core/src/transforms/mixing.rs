//! Mixing laws over the non-negative reals, with quadrature rules for the
//! parametric kinds.
//!
//! Parametric densities are integrated by composite Gauss–Legendre after an
//! exponential change of variable: `ξ = scale · e^s` for the gamma law and
//! `ξ = 1 / (1 + e^{-s})` for the beta law. In `s` both integrands are
//! smooth and decay at least exponentially, including shapes below one
//! where the original density is singular at the origin. The `s` range is
//! cut where the neglected mass falls below 1e-18, split at caller supplied
//! breakpoints so that kinks such as `|ξ - λ|` fall on panel edges, and
//! further split into panels of bounded width.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{self, gauss_legendre, ln_gamma};

pub const DEFAULT_QUADRATURE_ORDER: usize = 200;
pub const MIN_QUADRATURE_ORDER: usize = 16;
const NEGLECTED_MASS: f64 = 1e-18;
const MAX_PANEL_WIDTH: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingKind {
    Atoms(Vec<(f64, f64)>),
    Gamma { shape: f64, scale: f64 },
    Beta { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingDistribution {
    kind: MixingKind,
    quadrature_order: usize,
}

/// Nodes and weights approximating the mixing law.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub points: Vec<(f64, f64)>,
    /// `|1 - Σ weights|`.
    pub normalization_error: f64,
}

impl Quadrature {
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        numeric::sum(self.points.iter().map(|&(x, w)| w * f(x)))
    }

    pub fn total_weight(&self) -> f64 {
        numeric::sum(self.points.iter().map(|&(_, w)| w))
    }
}

impl MixingDistribution {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("mixing distribution needs at least one atom"));
        }
        for &(x, w) in &atoms {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(invalid(format!("atom value {x} must be finite and >= 0")));
            }
            if !(w >= 0.0) {
                return Err(invalid(format!("atom weight {w} must be >= 0")));
            }
        }
        let total = numeric::sum(atoms.iter().map(|a| a.1));
        if (total - 1.0).abs() > 1e-9 {
            return Err(crate::Error::NotNormalized(total));
        }
        Ok(MixingDistribution {
            kind: MixingKind::Atoms(atoms),
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        })
    }

    /// Gamma law with the given shape and scale.
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
            return Err(invalid(format!(
                "gamma mixing needs shape, scale > 0 (got {shape}, {scale})"
            )));
        }
        Ok(MixingDistribution {
            kind: MixingKind::Gamma { shape, scale },
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        })
    }

    /// The gamma law whose Poisson mixture is `NegativeBinomial(beta, q)`.
    pub fn gamma_for_negative_binomial(beta: f64, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("q = {q} outside (0, 1)")));
        }
        Self::gamma(beta, q / (1.0 - q))
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(invalid(format!(
                "beta mixing needs a, b > 0 (got {a}, {b})"
            )));
        }
        Ok(MixingDistribution {
            kind: MixingKind::Beta { a, b },
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        })
    }

    pub fn with_order(mut self, order: usize) -> Result<Self> {
        if order < MIN_QUADRATURE_ORDER {
            return Err(invalid(format!(
                "quadrature order {order} below minimum {MIN_QUADRATURE_ORDER}"
            )));
        }
        self.quadrature_order = order;
        Ok(self)
    }

    pub fn kind(&self) -> &MixingKind {
        &self.kind
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    pub fn mean(&self) -> f64 {
        match &self.kind {
            MixingKind::Atoms(a) => numeric::sum(a.iter().map(|&(x, w)| x * w)),
            MixingKind::Gamma { shape, scale } => shape * scale,
            MixingKind::Beta { a, b } => a / (a + b),
        }
    }

    /// True when the law puts no mass at zero.
    pub fn is_strictly_positive(&self) -> bool {
        match &self.kind {
            MixingKind::Atoms(a) => a.iter().all(|&(x, w)| x > 0.0 || w == 0.0),
            _ => true,
        }
    }

    pub fn within_unit_interval(&self) -> bool {
        match &self.kind {
            MixingKind::Atoms(a) => a.iter().all(|&(x, w)| x <= 1.0 || w == 0.0),
            MixingKind::Gamma { .. } => false,
            MixingKind::Beta { .. } => true,
        }
    }

    /// Shape parameter governing behaviour near zero, for parametric kinds.
    pub fn shape_at_zero(&self) -> Option<f64> {
        match &self.kind {
            MixingKind::Atoms(_) => None,
            MixingKind::Gamma { shape, .. } => Some(*shape),
            MixingKind::Beta { a, .. } => Some(*a),
        }
    }

    /// Quadrature rule, with panels split at `breaks` (in ξ units).
    pub fn quadrature(&self, breaks: &[f64]) -> Quadrature {
        let points = match &self.kind {
            MixingKind::Atoms(a) => a.clone(),
            MixingKind::Gamma { shape, scale } => {
                let (lo, hi) = gamma_log_range(*shape);
                let cuts: Vec<f64> = breaks
                    .iter()
                    .filter(|&&b| b > 0.0)
                    .map(|&b| (b / scale).ln())
                    .collect();
                let ln_norm = ln_gamma(*shape);
                composite(lo, hi, &cuts, self.quadrature_order, |s| {
                    let y = s.exp();
                    let density = (shape * s - y - ln_norm).exp();
                    (scale * y, density)
                })
            }
            MixingKind::Beta { a, b } => {
                let ln_b = ln_gamma(*a) + ln_gamma(*b) - ln_gamma(a + b);
                let lo = ((NEGLECTED_MASS * a).ln() + ln_b) / a;
                let hi = -((NEGLECTED_MASS * b).ln() + ln_b) / b;
                let cuts: Vec<f64> = breaks
                    .iter()
                    .filter(|&&t| t > 0.0 && t < 1.0)
                    .map(|&t| (t / (1.0 - t)).ln())
                    .collect();
                composite(lo, hi, &cuts, self.quadrature_order, |s| {
                    let ln_t = -softplus(-s);
                    let ln_1mt = -softplus(s);
                    let density = (a * ln_t + b * ln_1mt - ln_b).exp();
                    (ln_t.exp(), density)
                })
            }
        };
        let total = numeric::sum(points.iter().map(|p| p.1));
        Quadrature {
            points,
            normalization_error: (1.0 - total).abs(),
        }
    }

    /// `E f(ξ)`, with panel breaks at `breaks`.
    pub fn expect(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        self.quadrature(breaks).expect(f)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Range of `s = ln y` for `y ~ Gamma(shape, 1)` outside which the mass is
/// below `NEGLECTED_MASS` on each side.
fn gamma_log_range(shape: f64) -> (f64, f64) {
    // P(Y < e^s) <= e^{shape s} / (shape Γ(shape))
    let lo = ((NEGLECTED_MASS * shape).ln() + ln_gamma(shape)) / shape;
    // P(Y > y) <= 2 y^{shape-1} e^{-y} / Γ(shape) once y >= 2 (shape - 1)
    let mut y = (2.0 * shape).max(2.0);
    while (shape - 1.0) * y.ln() - y - ln_gamma(shape) + 2f64.ln() > NEGLECTED_MASS.ln() {
        y *= 1.2;
    }
    (lo, y.ln())
}

/// Composite Gauss–Legendre over `[lo, hi]` split at `cuts`; `map(s)` gives
/// the mixing value and the density in `s`.
fn composite(
    lo: f64,
    hi: f64,
    cuts: &[f64],
    order: usize,
    map: impl Fn(f64) -> (f64, f64),
) -> Vec<(f64, f64)> {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > lo && c < hi).collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(hi);
    let edges: Vec<f64> = edges
        .windows(2)
        .flat_map(|pair| {
            let pieces = ((pair[1] - pair[0]) / MAX_PANEL_WIDTH).ceil().max(1.0) as usize;
            let step = (pair[1] - pair[0]) / pieces as f64;
            (0..pieces).map(move |i| pair[0] + step * i as f64)
        })
        .chain(std::iter::once(hi))
        .collect();
    let (nodes, weights) = gauss_legendre(order);
    let mut out = Vec::with_capacity(order * (edges.len() - 1));
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, w) in nodes.iter().zip(&weights) {
            let s = mid + half * x;
            let (value, density) = map(s);
            out.push((value, half * w * density));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_quadrature_moments() {
        for &shape in &[0.5, 1.0, 3.0, 10.0] {
            let mix = MixingDistribution::gamma(shape, 0.7).unwrap();
            let q = mix.quadrature(&[]);
            assert!(q.normalization_error < 1e-13, "shape {shape}");
            let m = q.expect(|x| x);
            assert!((m - shape * 0.7).abs() < 1e-12);
            let m2 = q.expect(|x| x * x);
            assert!((m2 - shape * (shape + 1.0) * 0.49).abs() < 1e-11);
        }
    }

    #[test]
    fn beta_quadrature_moments() {
        for &(a, b) in &[(0.5, 0.5), (2.0, 8.0), (0.2, 3.0), (5.0, 1.0)] {
            let mix = MixingDistribution::beta(a, b).unwrap();
            let q = mix.quadrature(&[0.3]);
            assert!(q.normalization_error < 1e-12, "a={a} b={b}");
            assert!((q.expect(|x| x) - a / (a + b)).abs() < 1e-12);
            let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
            let m2 = q.expect(|x| x * x);
            assert!((m2 - var - (a / (a + b)).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn breakpoints_resolve_kinks() {
        // E|ξ - λ| for Gamma has a closed form
        let (beta, q) = (3.0, 0.3);
        let mix = MixingDistribution::gamma_for_negative_binomial(beta, q).unwrap();
        let lam = mix.mean();
        let mad = mix.expect(|x| (x - lam).abs(), &[lam]);
        let exact = 2.0 * q * beta.powf(beta) * (-beta).exp() / ((1.0 - q) * ln_gamma(beta).exp());
        assert!((mad - exact).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(MixingDistribution::atoms(vec![(1.0, 0.5)]).is_err());
        assert!(MixingDistribution::atoms(vec![(-1.0, 1.0)]).is_err());
        assert!(MixingDistribution::gamma(0.0, 1.0).is_err());
        assert!(MixingDistribution::beta(1.0, 1.0)
            .unwrap()
            .with_order(8)
            .is_err());
    }
}
