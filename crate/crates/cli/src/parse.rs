//! The distribution mini-language used by `--dist`, `--target` and friends.

use std::fs;

use negdep::models::{JointIndicatorTable, ModelSpec};
use negdep::transforms::MixingDistribution;
use negdep::{Family, Parity, Pmf};
use serde::Deserialize;

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn numbers<T: std::str::FromStr>(kind: &str, args: &str, count: usize) -> Result<Vec<T>, CliError> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(usage(format!(
            "{kind} takes {count} comma-separated parameters, got '{args}'"
        )));
    }
    parts
        .iter()
        .map(|s| {
            s.parse()
                .map_err(|_| usage(format!("cannot parse '{s}' in {kind}:{args}")))
        })
        .collect()
}

fn list<T: std::str::FromStr>(kind: &str, args: &str) -> Result<Vec<T>, CliError> {
    let count = args.split(',').count();
    numbers(kind, args, count)
}

/// A file holding either a bare pmf or an object with a `pmf` field, as
/// written by the `dist` and `transform` subcommands.
#[derive(Deserialize)]
#[serde(untagged)]
enum PmfFile {
    Bare(Pmf),
    Wrapped { pmf: Pmf },
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))
}

/// Reads a pmf from JSON, or from CSV rows of `index,probability` with an
/// optional header.
pub fn pmf_from_file(path: &str) -> Result<Pmf, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let parsed: PmfFile = serde_json::from_str(&text)?;
        return Ok(match parsed {
            PmfFile::Bare(p) | PmfFile::Wrapped { pmf: p } => p,
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut weights: Vec<f64> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(usage(format!(
                "{path}: line {} needs index,probability",
                line + 1
            )));
        }
        let (Ok(j), Ok(p)) = (record[0].parse::<usize>(), record[1].parse::<f64>()) else {
            if line == 0 {
                continue;
            }
            return Err(usage(format!("{path}: cannot parse line {}", line + 1)));
        };
        if weights.len() <= j {
            weights.resize(j + 1, 0.0);
        }
        weights[j] += p;
    }
    Ok(Pmf::new(0, weights)?)
}

pub fn table_from_file(path: &str) -> Result<JointIndicatorTable, CliError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn parity(s: &str) -> Result<Parity, CliError> {
    match s.trim() {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(usage(format!("parity must be even or odd, got '{other}'"))),
    }
}

/// Parses one distribution term such as `poisson:2.5` or `hypergeom:10,4,5`.
pub fn pmf(spec: &str, tail_eps: f64) -> Result<Pmf, CliError> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("distribution '{spec}' must look like kind:params")))?;
    let family = match kind {
        "poisson" => {
            let v = numbers::<f64>(kind, args, 1)?;
            Family::Poisson {
                lambda: v[0],
                tail_eps,
            }
        }
        "binomial" => {
            let (n, r) = args
                .split_once(',')
                .ok_or_else(|| usage("binomial takes n,r"))?;
            Family::Binomial {
                n: numbers(kind, n, 1)?[0],
                r: numbers(kind, r, 1)?[0],
            }
        }
        "hypergeom" => {
            let v = numbers::<usize>(kind, args, 3)?;
            Family::Hypergeometric {
                population: v[0],
                n: v[1],
                marked: v[2],
            }
        }
        "negbin" => {
            let v = numbers::<f64>(kind, args, 2)?;
            Family::NegativeBinomial {
                beta: v[0],
                q: v[1],
                tail_eps,
            }
        }
        "betabin" => {
            let (m, rest) = args
                .split_once(',')
                .ok_or_else(|| usage("betabin takes m,a,b"))?;
            let ab = numbers::<f64>(kind, rest, 2)?;
            Family::BetaBinomial {
                m: numbers(kind, m, 1)?[0],
                a: ab[0],
                b: ab[1],
            }
        }
        "clubbed" => {
            let (n, side) = args
                .split_once(',')
                .ok_or_else(|| usage("clubbed takes n,parity"))?;
            Family::ClubbedBinomial {
                n: numbers(kind, n, 1)?[0],
                parity: parity(side)?,
            }
        }
        "point" => return Ok(Pmf::point(numbers(kind, args, 1)?[0])),
        "file" => return pmf_from_file(args),
        _ => return model(kind, args),
    };
    Ok(family.build()?)
}

fn model(kind: &str, args: &str) -> Result<Pmf, CliError> {
    let spec = match kind {
        "occupancy" => {
            let v = numbers::<usize>(kind, args, 3)?;
            ModelSpec::Occupancy {
                balls: v[0],
                urns: v[1],
                threshold: v[2],
            }
        }
        "polya-unseen" => {
            let v = numbers::<usize>(kind, args, 2)?;
            ModelSpec::PolyaUnseen {
                colours: v[0],
                draws: v[1],
            }
        }
        "permutation" => ModelSpec::PermutationThreshold {
            thresholds: list(kind, args)?,
        },
        "lightbulb" => ModelSpec::Lightbulb {
            n: numbers(kind, args, 1)?[0],
        },
        "table" => ModelSpec::IndicatorSum {
            table: table_from_file(args)?,
        },
        "model" => serde_json::from_str(args)?,
        _ => return Err(usage(format!("unknown distribution kind '{kind}'"))),
    };
    Ok(spec.build()?)
}

/// `atoms:x1,w1;x2,w2`, `gamma:shape,scale`, `beta:a,b` or
/// `negbin:beta,q` (the gamma law behind a negative binomial).
pub fn mixing(spec: &str) -> Result<MixingDistribution, CliError> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| {
        usage(format!(
            "mixing distribution '{spec}' must look like kind:params"
        ))
    })?;
    let mix = match kind {
        "atoms" => {
            let atoms = args
                .split(';')
                .map(|a| numbers::<f64>(kind, a, 2).map(|v| (v[0], v[1])))
                .collect::<Result<Vec<_>, _>>()?;
            MixingDistribution::atoms(atoms)?
        }
        "gamma" => {
            let v = numbers::<f64>(kind, args, 2)?;
            MixingDistribution::gamma(v[0], v[1])?
        }
        "beta" => {
            let v = numbers::<f64>(kind, args, 2)?;
            MixingDistribution::beta(v[0], v[1])?
        }
        "negbin" => {
            let v = numbers::<f64>(kind, args, 2)?;
            MixingDistribution::gamma_for_negative_binomial(v[0], v[1])?
        }
        _ => return Err(usage(format!("unknown mixing kind '{kind}'"))),
    };
    Ok(mix)
}

/// A comma-separated grid of reals.
pub fn grid(spec: &str) -> Result<Vec<f64>, CliError> {
    list("grid", spec)
}

/// `a..b` (inclusive) or a single integer.
pub fn range(spec: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("cannot parse range '{spec}'")))
    };
    match spec.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(parse(a)?..=parse(b)?)
        }
        None => {
            let v = parse(spec)?;
            Ok(v..=v)
        }
    }
}
