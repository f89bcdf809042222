//! Seeded instance families.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::depth::{Atom, WeightedPointCloud};
use crate::error::{domain, Error, Result};
use crate::rational::{quantize, Point, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    UniformBall,
    GaussianQuantized,
    SimplexAtoms,
    Coplanar,
    AdversarialThreeCluster,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::UniformBall, Family::GaussianQuantized, Family::SimplexAtoms, Family::Coplanar, Family::AdversarialThreeCluster];

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformBall => "uniform-ball",
            Family::GaussianQuantized => "gaussian-quantized",
            Family::SimplexAtoms => "simplex-atoms",
            Family::Coplanar => "coplanar",
            Family::AdversarialThreeCluster => "adversarial-three-cluster",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub dim: usize,
    pub atoms: usize,
    pub seed: u64,
    /// Coordinates are multiples of `1/10^digits`.
    pub digits: u32,
    /// Weights are drawn from `1..=weight_max` and normalized; 1 gives uniform weights.
    pub weight_max: u32,
    /// Cluster radius for the three-cluster family.
    pub spread: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { dim: 2, atoms: 12, seed: 0, digits: 3, weight_max: 1, spread: 1e-3 }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn weights(rng: &mut ChaCha8Rng, k: usize, max: u32) -> Vec<Rational> {
    let raw: Vec<u32> = (0..k).map(|_| if max <= 1 { 1 } else { rng.random_range(1..=max) }).collect();
    let total: u64 = raw.iter().map(|&w| u64::from(w)).sum();
    raw.into_iter().map(|w| Rational::new(BigInt::from(w), BigInt::from(total))).collect()
}

fn cloud(points: Vec<Point>, ws: Vec<Rational>) -> Result<WeightedPointCloud> {
    let dim = points[0].len();
    WeightedPointCloud::new(dim, points.into_iter().zip(ws).map(|(point, weight)| Atom { point, weight }).collect())
}

fn quantized(x: &[f64], digits: u32) -> Point {
    x.iter().map(|&v| quantize(v, digits)).collect()
}

/// Deterministic instance of the given family.
pub fn generate(family: Family, p: &GenParams) -> Result<WeightedPointCloud> {
    if p.dim == 0 {
        return Err(domain("dimension must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    match family {
        Family::UniformBall | Family::GaussianQuantized => {
            if p.atoms == 0 {
                return Err(domain("need at least one atom"));
            }
            let points = (0..p.atoms)
                .map(|_| {
                    let g = gaussian(&mut rng, p.dim);
                    let x = if family == Family::UniformBall {
                        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                        let r: f64 = rng.random::<f64>().powf(1.0 / p.dim as f64);
                        g.iter().map(|v| v / norm * r).collect()
                    } else {
                        g
                    };
                    quantized(&x, p.digits)
                })
                .collect();
            let ws = weights(&mut rng, p.atoms, p.weight_max);
            cloud(points, ws)
        }
        Family::SimplexAtoms => {
            let points = (0..=p.dim)
                .map(|i| (0..p.dim).map(|k| Rational::from_integer(BigInt::from(u8::from(i == k + 1)))).collect())
                .collect();
            WeightedPointCloud::uniform(points)
        }
        Family::Coplanar => {
            if p.dim < 2 {
                return Err(domain("coplanar family needs dimension at least 2"));
            }
            let h = quantize(3f64.sqrt() / 2.0, p.digits);
            let one = Rational::from_integer(BigInt::from(1));
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let zero = Rational::from_integer(BigInt::from(0));
            let planar = [
                (one.clone(), zero.clone()),
                (half.clone(), h.clone()),
                (-half.clone(), h.clone()),
                (-one, zero),
                (-half.clone(), -h.clone()),
                (half, -h),
            ];
            let points = planar
                .into_iter()
                .map(|(x, y)| {
                    let mut v = vec![Rational::from_integer(BigInt::from(0)); p.dim];
                    v[0] = x;
                    v[1] = y;
                    v
                })
                .collect();
            WeightedPointCloud::uniform(points)
        }
        Family::AdversarialThreeCluster => {
            if p.dim < 2 {
                return Err(domain("three-cluster family needs dimension at least 2"));
            }
            let per = p.atoms.div_ceil(3).max(1);
            let mut points = Vec::with_capacity(3 * per);
            for c in 0..3 {
                for _ in 0..per {
                    let mut x: Vec<f64> = gaussian(&mut rng, p.dim).iter().map(|v| v * p.spread).collect();
                    if c > 0 {
                        x[c - 1] += 1.0;
                    }
                    points.push(quantized(&x, p.digits.max(6)));
                }
            }
            let w = Rational::new(BigInt::from(1), BigInt::from(3 * per));
            let n = points.len();
            cloud(points, vec![w; n])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centers::{classify, Classification};
    use crate::rational::int;

    #[test]
    fn simplex_atoms_is_the_triangle() {
        let c = generate(Family::SimplexAtoms, &GenParams::default()).unwrap();
        let pts: Vec<&Point> = c.points().collect();
        assert_eq!(pts, vec![&vec![int(0), int(0)], &vec![int(1), int(0)], &vec![int(0), int(1)]]);
    }

    #[test]
    fn deterministic_per_seed() {
        for f in Family::ALL {
            let p = GenParams { dim: 3, atoms: 9, seed: 7, weight_max: 4, ..GenParams::default() };
            assert_eq!(generate(f, &p).unwrap(), generate(f, &p).unwrap());
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn three_clusters_are_insufficient() {
        let c = generate(Family::AdversarialThreeCluster, &GenParams { atoms: 15, ..GenParams::default() }).unwrap();
        assert_eq!(classify(&c, 2).unwrap(), Classification::Insufficient);
    }
}
