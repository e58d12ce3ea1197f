//! Seeded synthetic hypergraphs with a prescribed edge-size distribution.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

#[derive(Debug, Clone, PartialEq)]
pub enum SizeDistribution {
    Constant(usize),
    /// Geometric on `1, 2, ...` with the given mean.
    Geometric { mean: f64 },
    /// `weights[k]` is the relative frequency of size `k`.
    Histogram(Vec<f64>),
}

impl SizeDistribution {
    fn validate(&self) -> Result<()> {
        match self {
            SizeDistribution::Constant(0) => Err(Error::InvalidArgument("edge size must be positive".into())),
            SizeDistribution::Geometric { mean } if !(mean.is_finite() && *mean >= 1.0) => {
                Err(Error::InvalidArgument(format!("geometric mean {mean} must be at least 1")))
            }
            SizeDistribution::Histogram(w) => {
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().skip(1).all(|&x| x == 0.0) {
                    return Err(Error::InvalidArgument("histogram needs a positive weight at some size ≥ 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SizeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeDistribution::Constant(k) => write!(f, "constant:{k}"),
            SizeDistribution::Geometric { mean } => write!(f, "geometric:{mean}"),
            SizeDistribution::Histogram(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "histogram:{}", parts.join(","))
            }
        }
    }
}

/// Accepts `constant:K`, `geometric:MEAN` and `histogram:W0,W1,...`.
impl FromStr for SizeDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse size distribution {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let dist = match kind {
            "constant" => SizeDistribution::Constant(arg.trim().parse().map_err(|_| bad())?),
            "geometric" => SizeDistribution::Geometric { mean: arg.trim().parse().map_err(|_| bad())? },
            "histogram" => SizeDistribution::Histogram(
                arg.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?,
            ),
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Draws `m` edges on `n` vertices. Sizes above `n` are clamped to `n`;
/// members of each edge are a uniform sample without replacement.
pub fn generate(n: usize, m: usize, dist: &SizeDistribution, seed: u64) -> Result<Hypergraph> {
    dist.validate()?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1 and m ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hist = match dist {
        SizeDistribution::Histogram(w) => {
            let mut w = w.clone();
            w[0] = 0.0;
            Some(WeightedIndex::new(&w).map_err(|e| Error::InvalidArgument(e.to_string()))?)
        }
        _ => None,
    };
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let size = match dist {
            SizeDistribution::Constant(k) => *k,
            SizeDistribution::Geometric { mean } => geometric(&mut rng, 1.0 / mean),
            SizeDistribution::Histogram(_) => hist.as_ref().expect("histogram sampler").sample(&mut rng),
        };
        edges.push(sample(&mut rng, n, size.min(n)).into_vec());
    }
    Hypergraph::new(n, edges)
}

fn geometric<R: Rng>(rng: &mut R, p: f64) -> usize {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    1 + (u.ln() / (1.0 - p).ln()).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_distributions() {
        assert_eq!("constant:5".parse::<SizeDistribution>().unwrap(), SizeDistribution::Constant(5));
        assert_eq!("geometric:8".parse::<SizeDistribution>().unwrap(), SizeDistribution::Geometric { mean: 8.0 });
        assert_eq!(
            "histogram:0,1,2".parse::<SizeDistribution>().unwrap(),
            SizeDistribution::Histogram(vec![0.0, 1.0, 2.0])
        );
        for bad in ["constant:0", "geometric:0.5", "histogram:1,0", "uniform:3", "constant"] {
            assert!(bad.parse::<SizeDistribution>().is_err(), "{bad}");
        }
        let d = SizeDistribution::Geometric { mean: 2.5 };
        assert_eq!(d.to_string().parse::<SizeDistribution>().unwrap(), d);
    }

    #[test]
    fn generator_is_seeded_and_respects_sizes() {
        let a = generate(30, 50, &SizeDistribution::Constant(4), 7).unwrap();
        let b = generate(30, 50, &SizeDistribution::Constant(4), 7).unwrap();
        assert_eq!(a, b);
        assert!(a.edges().iter().all(|e| e.len() == 4));
        assert_ne!(a, generate(30, 50, &SizeDistribution::Constant(4), 8).unwrap());

        let h = generate(10, 200, &SizeDistribution::Histogram(vec![0.0, 0.0, 1.0, 0.0, 1.0]), 1).unwrap();
        assert!(h.edges().iter().all(|e| e.len() == 2 || e.len() == 4));

        let g = generate(500, 4000, &SizeDistribution::Geometric { mean: 8.0 }, 3).unwrap();
        let mean = g.volume() as f64 / g.m() as f64;
        assert!((mean - 8.0).abs() < 0.5, "mean {mean}");
    }
}
