//! Brute-force references on small integer data, kept independent of the
//! library's lattice code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transversal_core::depth::{Atom, WeightedPointCloud};
use transversal_core::rational::{rat, Point, Rational};

pub type P2 = [i128; 2];

/// Planar atoms with integer coordinates and positive integer weights.
#[derive(Debug, Clone)]
pub struct IntCloud {
    pub pts: Vec<P2>,
    pub wts: Vec<i128>,
}

impl IntCloud {
    pub fn total(&self) -> i128 {
        self.wts.iter().sum()
    }

    pub fn to_cloud(&self) -> WeightedPointCloud {
        let total = self.total() as i64;
        let atoms = self
            .pts
            .iter()
            .zip(&self.wts)
            .map(|(p, &w)| Atom { point: vec![rat(p[0] as i64, 1), rat(p[1] as i64, 1)], weight: rat(w as i64, total) })
            .collect();
        WeightedPointCloud::normalized(2, atoms).expect("valid cloud")
    }

    pub fn random(rng: &mut ChaCha8Rng, atoms: usize, coord: i128, weight_max: i128) -> Self {
        let pts = (0..atoms).map(|_| [rng.random_range(-coord..=coord), rng.random_range(-coord..=coord)]).collect();
        let wts = (0..atoms).map(|_| rng.random_range(1..=weight_max)).collect();
        Self { pts, wts }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dot(a: P2, b: P2) -> i128 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: P2, b: P2) -> i128 {
    a[0] * b[1] - a[1] * b[0]
}

/// Weight of atoms in the closed half-plane `{y : <q*y - x, u> >= 0}`, where the
/// query point is `x / q`.
pub fn closed_mass(c: &IntCloud, x: P2, q: i128, u: P2) -> i128 {
    c.pts.iter().zip(&c.wts).filter(|(p, _)| dot([q * p[0] - x[0], q * p[1] - x[1]], u) >= 0).map(|(_, w)| *w).sum()
}

/// Exact Tukey depth of `x / q` as an integer mass.
///
/// The closed half-plane mass only changes where the boundary passes through
/// an atom, so it suffices to test directions just to either side of every
/// `+-perp(d_i)`. With `M` above every `|<d_i, d_j>|`, `M perp(d_i) +- d_i` is
/// such a direction.
pub fn depth_at(c: &IntCloud, x: P2, q: i128) -> i128 {
    let ds: Vec<P2> = c.pts.iter().map(|p| [q * p[0] - x[0], q * p[1] - x[1]]).collect();
    let big = ds.iter().flat_map(|a| ds.iter().map(move |b| dot(*a, *b).abs())).max().unwrap_or(0) + 1;
    let mut best = closed_mass(c, x, q, [1, 0]).min(closed_mass(c, x, q, [-1, 0]));
    for d in ds.iter().filter(|d| d[0] != 0 || d[1] != 0) {
        for s in [1, -1] {
            for t in [1, -1] {
                let u = [s * big * -d[1] + t * d[0], s * big * d[0] + t * d[1]];
                best = best.min(closed_mass(c, x, q, u));
            }
        }
    }
    best
}

/// Candidate maximizers: the atoms and every intersection of two lines
/// through atom pairs, as `(x, q)` with `q > 0`.
pub fn arrangement_vertices(c: &IntCloud) -> Vec<(P2, i128)> {
    let mut out: Vec<(P2, i128)> = c.pts.iter().map(|p| (*p, 1)).collect();
    let mut lines = Vec::new();
    for i in 0..c.pts.len() {
        for j in i + 1..c.pts.len() {
            if c.pts[i] != c.pts[j] {
                lines.push((c.pts[i], [c.pts[j][0] - c.pts[i][0], c.pts[j][1] - c.pts[i][1]]));
            }
        }
    }
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            let (p, r) = lines[a];
            let (s, v) = lines[b];
            let den = cross(r, v);
            if den == 0 {
                continue;
            }
            // p + t r with t = cross(s - p, v) / den
            let t = cross([s[0] - p[0], s[1] - p[1]], v);
            let (x, q) = ([p[0] * den + t * r[0], p[1] * den + t * r[1]], den);
            out.push(if q < 0 { ([-x[0], -x[1]], -q) } else { (x, q) });
        }
    }
    out
}

/// Maximum depth over the arrangement vertices.
pub fn max_depth(c: &IntCloud) -> i128 {
    arrangement_vertices(c).into_iter().map(|(x, q)| depth_at(c, x, q)).max().unwrap_or(0)
}

/// Smallest closed half-plane mass over `k` evenly spaced directions, with
/// directions rounded to integers at scale `10^6`.
pub fn sampled_min_mass(c: &IntCloud, x: P2, q: i128, k: usize) -> i128 {
    (0..k)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
            let u = [(t.cos() * 1e6).round() as i128, (t.sin() * 1e6).round() as i128];
            closed_mass(c, x, q, u)
        })
        .min()
        .unwrap()
}

pub fn ratio(num: i128, den: i128) -> Rational {
    rat(num as i64, den as i64)
}

pub fn as_point(x: P2, q: i128) -> Point {
    vec![ratio(x[0], q), ratio(x[1], q)]
}
