//! Integer kernel for planar depth computations.
//!
//! A rational cloud is lifted to the integer lattice by multiplying every
//! coordinate by a common denominator (`scale`) and every weight by the common
//! weight denominator (`total`). Depth is invariant under positive scaling, so
//! all predicates run on integers and results are mapped back at the end.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::clip::{ConvexPolygon, Line};
use super::cloud::WeightedPointCloud;
use crate::rational::{lcm_of_denominators, Point, Rational};

pub(crate) type V2 = [BigInt; 2];

pub(crate) fn cross(a: &V2, b: &V2) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

pub(crate) fn dot(a: &V2, b: &V2) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1]
}

fn neg(a: &V2) -> V2 {
    [-&a[0], -&a[1]]
}

/// Quarter-turn counterclockwise.
pub(crate) fn perp(a: &V2) -> V2 {
    [-&a[1], a[0].clone()]
}

// 0 for angles in [0, pi), 1 for [pi, 2pi).
fn half(a: &V2) -> u8 {
    if a[1].is_positive() || (a[1].is_zero() && a[0].is_positive()) {
        0
    } else {
        1
    }
}

/// Total order of nonzero vectors by polar angle in `[0, 2pi)`.
pub(crate) fn angle_cmp(a: &V2, b: &V2) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| BigInt::zero().cmp(&cross(a, b)))
}

/// Minimum over generic directions `u` of the weight of `{d : <d, u> > 0}`,
/// together with a direction attaining it. All `d` must be nonzero.
///
/// For generic `u` the open half-plane is the open arc `(beta, beta + pi)` of
/// angles with `u = perp(beta)`. The weight only changes when `beta` crosses
/// some `d` or `-d`, so it suffices to take `beta` just past each such critical
/// direction `c`; the arc then covers exactly the angles in `(c, c + pi]`.
pub(crate) fn min_open_halfplane(vecs: &[(V2, BigInt)]) -> (BigInt, V2) {
    if vecs.is_empty() {
        return (BigInt::zero(), [BigInt::one(), BigInt::zero()]);
    }
    let mut sorted: Vec<&(V2, BigInt)> = vecs.iter().collect();
    sorted.sort_by(|a, b| angle_cmp(&a.0, &b.0));
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(BigInt::zero());
    for (_, w) in &sorted {
        let next = prefix.last().unwrap() + w;
        prefix.push(next);
    }
    let total = prefix.last().unwrap().clone();
    // Number of vectors with angle <= angle(c).
    let upto = |c: &V2| sorted.partition_point(|(d, _)| angle_cmp(d, c) != Ordering::Greater);

    let mut critical: Vec<V2> = vecs.iter().flat_map(|(d, _)| [d.clone(), neg(d)]).collect();
    critical.sort_by(angle_cmp);
    critical.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);

    let mut best: Option<(BigInt, usize)> = None;
    for (k, c) in critical.iter().enumerate() {
        let opposite = neg(c);
        let (lo, hi) = (upto(c), upto(&opposite));
        let mass = if half(c) == 0 { &prefix[hi] - &prefix[lo] } else { &total - &prefix[lo] + &prefix[hi] };
        if best.as_ref().is_none_or(|(m, _)| mass < *m) {
            best = Some((mass, k));
        }
    }
    let (mass, k) = best.expect("at least two critical directions");
    let c = &critical[k];
    let next = &critical[(k + 1) % critical.len()];
    // A direction strictly inside the angular gap between c and its successor.
    let beta = if cross(c, next).is_positive() { [&c[0] + &next[0], &c[1] + &next[1]] } else { perp(c) };
    (mass, perp(&beta))
}

/// A planar cloud on the integer lattice.
#[derive(Debug, Clone)]
pub(crate) struct PlaneCloud {
    pub pts: Vec<V2>,
    pub wts: Vec<BigInt>,
    pub total: BigInt,
}

/// Lattice shared by several planar clouds (and optional extra points).
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    pub scale: BigInt,
}

impl Lattice {
    pub fn for_clouds<'a>(clouds: &[&'a WeightedPointCloud], extra: &[&'a Point]) -> Self {
        let coords = clouds.iter().flat_map(|c| c.points().flatten()).chain(extra.iter().flat_map(|p| p.iter()));
        Self { scale: lcm_of_denominators(coords) }
    }

    pub fn lift_scalar(&self, x: &Rational) -> BigInt {
        let v = x * Rational::from_integer(self.scale.clone());
        debug_assert!(v.is_integer(), "coordinate not on the lattice");
        v.to_integer()
    }

    pub fn lift(&self, p: &[Rational]) -> V2 {
        [self.lift_scalar(&p[0]), self.lift_scalar(&p[1])]
    }

    pub fn unlift(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> Point {
        let den = z * &self.scale;
        vec![Rational::new(x.clone(), den.clone()), Rational::new(y.clone(), den)]
    }

    pub fn cloud(&self, cloud: &WeightedPointCloud) -> PlaneCloud {
        let total = lcm_of_denominators(cloud.atoms().iter().map(|a| &a.weight));
        let t = Rational::from_integer(total.clone());
        PlaneCloud {
            pts: cloud.points().map(|p| self.lift(p)).collect(),
            wts: cloud.atoms().iter().map(|a| (&a.weight * &t).to_integer()).collect(),
            total,
        }
    }
}

impl PlaneCloud {
    /// Smallest integer mass that meets the level `tau`.
    pub fn threshold(&self, tau: &Rational) -> BigInt {
        (tau * Rational::from_integer(self.total.clone())).ceil().to_integer()
    }

    pub fn bounds(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let xs = self.pts.iter().map(|p| &p[0]);
        let ys = self.pts.iter().map(|p| &p[1]);
        (
            xs.clone().min().unwrap().clone(),
            xs.max().unwrap().clone(),
            ys.clone().min().unwrap().clone(),
            ys.max().unwrap().clone(),
        )
    }
}

/// Primitive representative of the direction of `v` (positive scaling removed).
fn primitive(v: V2) -> V2 {
    let g = v[0].gcd(&v[1]);
    if g.is_zero() || g.is_one() {
        v
    } else {
        [&v[0] / &g, &v[1] / &g]
    }
}

/// One undirected critical direction with the atoms sorted along it.
#[derive(Debug, Clone)]
struct SortedAxis {
    u: V2,
    /// Projections `<p, u>` in ascending order.
    proj: Vec<BigInt>,
    /// `prefix[k]` = weight of the first `k` atoms in that order.
    prefix: Vec<BigInt>,
}

/// The half-plane description of the depth superlevel sets of one cloud.
///
/// For a direction `u`, `{x : depth(x) >= tau}` lies in `<x, u> <= s` where `s`
/// is the largest value with `mass(<y, u> >= s) >= tau`. The threshold `s`
/// moves linearly between consecutive critical directions (normals of atom
/// pairs), so those directions together with the coordinate axes describe the
/// region exactly.
#[derive(Debug, Clone)]
pub(crate) struct SuperlevelFamily {
    axes: Vec<SortedAxis>,
    pub cloud: PlaneCloud,
}

impl SuperlevelFamily {
    pub fn new(cloud: PlaneCloud) -> Self {
        let mut dirs: HashSet<V2> = HashSet::new();
        let canonical = |v: V2| {
            let v = primitive(v);
            if half(&v) == 0 {
                v
            } else {
                neg(&v)
            }
        };
        dirs.insert([BigInt::one(), BigInt::zero()]);
        dirs.insert([BigInt::zero(), BigInt::one()]);
        for (i, p) in cloud.pts.iter().enumerate() {
            for q in &cloud.pts[i + 1..] {
                let d = [&q[0] - &p[0], &q[1] - &p[1]];
                if !(d[0].is_zero() && d[1].is_zero()) {
                    dirs.insert(canonical(perp(&d)));
                }
            }
        }
        let mut dirs: Vec<V2> = dirs.into_iter().collect();
        dirs.sort_by(angle_cmp);
        let axes = dirs
            .into_iter()
            .map(|u| {
                let mut keyed: Vec<(BigInt, &BigInt)> = cloud.pts.iter().map(|p| dot(p, &u)).zip(&cloud.wts).collect();
                keyed.sort_by(|a, b| a.0.cmp(&b.0));
                let mut prefix = Vec::with_capacity(keyed.len() + 1);
                prefix.push(BigInt::zero());
                for (_, w) in &keyed {
                    let next = prefix.last().unwrap() + *w;
                    prefix.push(next);
                }
                SortedAxis { u, proj: keyed.into_iter().map(|(p, _)| p).collect(), prefix }
            })
            .collect();
        Self { axes, cloud }
    }

    /// Half-planes cutting out `{x : depth(x) >= threshold / total}`;
    /// `1 <= threshold <= total`.
    pub fn constraints(&self, threshold: &BigInt) -> Vec<Line> {
        let mut out = Vec::with_capacity(2 * self.axes.len());
        for ax in &self.axes {
            let n = ax.proj.len();
            let total = &ax.prefix[n];
            // +u: the largest k with weight(k..) >= threshold.
            let k = ax.prefix[..n].partition_point(|p| total - p >= *threshold) - 1;
            out.push(Line::new(ax.u[0].clone(), ax.u[1].clone(), ax.proj[k].clone()));
            // -u: the smallest j with weight(..=j) >= threshold.
            let j = ax.prefix[1..].partition_point(|p| p < threshold);
            out.push(Line::new(-&ax.u[0], -&ax.u[1], -&ax.proj[j]));
        }
        out
    }
}

/// Intersection of the superlevel regions of several clouds, each at its own
/// integer threshold.
pub(crate) fn common_region(families: &[&SuperlevelFamily], thresholds: &[BigInt]) -> ConvexPolygon {
    let (mut x0, mut x1, mut y0, mut y1) = families[0].cloud.bounds();
    for f in &families[1..] {
        let (a0, a1, b0, b1) = f.cloud.bounds();
        x0 = x0.min(a0);
        x1 = x1.max(a1);
        y0 = y0.min(b0);
        y1 = y1.max(b1);
    }
    let mut poly = ConvexPolygon::bbox(&x0, &x1, &y0, &y1);
    for (f, t) in families.iter().zip(thresholds) {
        for line in f.constraints(t) {
            poly.clip(line);
            if poly.is_empty() {
                return poly;
            }
        }
    }
    poly
}

/// Largest `k / denominator` (with `denominator` the lcm of all weight
/// denominators) at which the superlevel regions of all families intersect,
/// together with that intersection. Level zero is reported with `None`.
pub(crate) fn max_common_level(families: &[&SuperlevelFamily]) -> (Rational, Option<ConvexPolygon>) {
    let denominator = families.iter().fold(BigInt::one(), |acc, f| acc.lcm(&f.cloud.total));
    let region_at = |k: &BigInt| {
        let tau = Rational::new(k.clone(), denominator.clone());
        let ts: Vec<BigInt> = families.iter().map(|f| f.cloud.threshold(&tau)).collect();
        common_region(families, &ts)
    };
    let mut lo = BigInt::zero();
    let mut hi = denominator.clone();
    let mut best: Option<ConvexPolygon> = None;
    while lo < hi {
        let mid: BigInt = (&lo + &hi + 1u32) >> 1u32;
        let poly = region_at(&mid);
        if poly.is_empty() {
            hi = mid - 1u32;
        } else {
            lo = mid;
            best = Some(poly);
        }
    }
    if lo.is_zero() {
        return (Rational::zero(), None);
    }
    let poly = match best {
        Some(p) => p,
        None => region_at(&lo),
    };
    (Rational::new(lo, denominator), Some(poly))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> V2 {
        [BigInt::from(x), BigInt::from(y)]
    }

    #[test]
    fn angle_order() {
        let mut vs = vec![v(0, -1), v(-1, 0), v(1, 1), v(1, 0), v(0, 1), v(2, 0), v(-1, -1)];
        vs.sort_by(angle_cmp);
        assert_eq!(vs, vec![v(1, 0), v(2, 0), v(1, 1), v(0, 1), v(-1, 0), v(-1, -1), v(0, -1)]);
    }

    #[test]
    fn open_halfplane_min_on_triangle() {
        let one = BigInt::one();
        let vecs = vec![(v(1, 0), one.clone()), (v(0, 1), one.clone()), (v(-1, -1), one.clone())];
        let (m, u) = min_open_halfplane(&vecs);
        assert_eq!(m, one);
        let direct: BigInt = vecs.iter().filter(|(d, _)| dot(d, &u).is_positive()).map(|(_, w)| w).sum();
        assert_eq!(direct, m);
        assert!(vecs.iter().all(|(d, _)| !dot(d, &u).is_zero()));
    }

    #[test]
    fn open_halfplane_min_collinear() {
        let one = BigInt::one();
        let vecs = vec![(v(1, 0), one.clone()), (v(2, 0), one.clone()), (v(-3, 0), one.clone())];
        let (m, u) = min_open_halfplane(&vecs);
        assert_eq!(m, one);
        let direct: BigInt = vecs.iter().filter(|(d, _)| dot(d, &u).is_positive()).map(|(_, w)| w).sum();
        assert_eq!(direct, m);
    }

    #[test]
    fn open_halfplane_min_can_be_zero() {
        let one = BigInt::one();
        let vecs = vec![(v(1, 0), one.clone()), (v(1, 1), one.clone()), (v(1, -1), one)];
        assert_eq!(min_open_halfplane(&vecs).0, BigInt::zero());
    }
}
