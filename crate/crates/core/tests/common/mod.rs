#![allow(dead_code)]

use negdep::models::{occupancy_model, permutation_threshold, polya_unseen};
use negdep::orderings::check_eq_order1;
use negdep::Pmf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Model {
    pub name: String,
    pub pmf: Pmf,
}

fn model(name: impl Into<String>, pmf: Pmf) -> Model {
    Model {
        name: name.into(),
        pmf,
    }
}

pub fn hypergeometric_grid(max_population: usize) -> Vec<Model> {
    let mut out = Vec::new();
    for big_n in 2..=max_population {
        for n in 1..big_n {
            for m in 1..big_n {
                out.push(model(
                    format!("hypergeom({big_n},{n},{m})"),
                    Pmf::hypergeometric(big_n, n, m).unwrap(),
                ));
            }
        }
    }
    out
}

pub fn permutation_models(seed: u64) -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in 2..=8usize {
        let mut cases = vec![(1..=n).collect::<Vec<_>>()];
        for _ in 0..4 {
            cases.push((0..n).map(|_| rng.random_range(0..=n)).collect());
        }
        for a in cases {
            let p = permutation_threshold(&a).unwrap();
            if p.mean() > 0.0 {
                out.push(model(format!("permutation{a:?}"), p));
            }
        }
    }
    out
}

pub fn occupancy_models() -> Vec<Model> {
    let mut out = Vec::new();
    for urns in 2..=5usize {
        for balls in 1..=6usize {
            for c in 1..=3usize {
                let p = occupancy_model(balls, urns, c).unwrap();
                if p.mean() > 0.0 {
                    out.push(model(format!("occupancy({balls},{urns},{c})"), p));
                }
            }
        }
    }
    out
}

pub fn bernoulli_sums(seed: u64, count: usize) -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let len = rng.random_range(1..=7);
            let ps: Vec<f64> = (0..len).map(|_| rng.random_range(0.02..0.98)).collect();
            model(format!("bernoulli_sum#{i}"), bernoulli_sum(&ps))
        })
        .collect()
}

pub fn bernoulli_sum(ps: &[f64]) -> Pmf {
    ps.iter().fold(Pmf::point(0), |acc, &p| {
        acc.convolve(&Pmf::bernoulli(p).unwrap())
    })
}

pub fn polya_models() -> Vec<Model> {
    let mut out = Vec::new();
    for colours in 2..=5 {
        for draws in 1..=6 {
            let p = polya_unseen(colours, draws).unwrap();
            if p.mean() > 0.0 {
                out.push(model(format!("polya_unseen({colours},{draws})"), p));
            }
        }
    }
    out
}

/// The model set used throughout: every candidate satisfying
/// `W* <=_st W + 1`.
pub fn qualifying_models() -> Vec<Model> {
    let mut all = hypergeometric_grid(10);
    all.extend(permutation_models(7));
    all.extend(occupancy_models());
    all.extend(bernoulli_sums(3, 40));
    all.extend(polya_models());
    all.into_iter()
        .filter(|m| check_eq_order1(&m.pmf, 1).unwrap().holds)
        .collect()
}

/// `(pmf, n, r)` with the pmf ULC(n) of mean `nr`.
pub fn ulc_models(seed: u64) -> Vec<(String, Pmf, usize, f64)> {
    let mut out = Vec::new();
    for big_n in 2..=12usize {
        for n in 1..big_n {
            for m in 1..big_n {
                let p = Pmf::hypergeometric(big_n, n, m).unwrap();
                let r = p.mean() / n as f64;
                if r > 0.0 && r < 1.0 {
                    out.push((format!("hypergeom({big_n},{n},{m})"), p, n, r));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..40 {
        let n = rng.random_range(1..=10);
        let ps: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
        let p = bernoulli_sum(&ps);
        let r = p.mean() / n as f64;
        out.push((format!("bernoulli_sum#{i}"), p, n, r));
    }
    out
}

pub fn report(index: usize, title: &str, failures: &[String]) -> bool {
    if failures.is_empty() {
        println!("criterion {index:>2}: PASS  {title}");
        true
    } else {
        println!("criterion {index:>2}: FAIL  {title}");
        for f in failures.iter().take(10) {
            println!("    {f}");
        }
        if failures.len() > 10 {
            println!("    ... and {} more", failures.len() - 10);
        }
        false
    }
}
