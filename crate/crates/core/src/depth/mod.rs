//! Tukey half-space depth for atomic measures with exact rational weights.

mod clip;
mod cloud;
mod frame;
pub(crate) mod plane;
mod region;
mod space;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cloud::{Atom, WeightedPointCloud};
pub use frame::{OrthoFrame, FRAME_DIGITS, FRAME_TOLERANCE};
pub use region::{DepthRegion, Location};

use crate::error::{domain, Error, Result};
use crate::rational::{self, lcm_of_denominators, Point, Rational};
use plane::{Lattice, SuperlevelFamily};

/// Hyperplane subsets examined by the upper bound in dimension above three.
pub const HIGH_DIM_SUBSETS: usize = 5000;
/// Random directions added to the upper bound in dimension above three.
pub const HIGH_DIM_SAMPLES: usize = 1000;
const HIGH_DIM_SEED: u64 = 0x5eed_0001;

/// Which closed side of the hyperplane `<y, v> = a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfSpaceSide {
    /// `<y, v> >= a`
    Upper,
    /// `<y, v> <= a`
    Lower,
}

/// Depth of a point together with a closed half-space normal `u` attaining it:
/// the half-space is `{y : <y - x, u> >= 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthValue {
    #[serde(with = "rational::as_str")]
    pub value: Rational,
    #[serde(with = "rational::opt_vec_as_str")]
    pub witness_direction: Option<Vec<Rational>>,
    /// Set when `value` is only an upper bound.
    pub approximate: bool,
}

/// Total weight of the atoms in a closed half-space.
pub fn halfspace_mass(cloud: &WeightedPointCloud, v: &[Rational], a: &Rational, side: HalfSpaceSide) -> Result<Rational> {
    if v.len() != cloud.dim() {
        return Err(domain("direction has the wrong dimension"));
    }
    if v.iter().all(Zero::is_zero) {
        return Err(domain("direction must be nonzero"));
    }
    let mut mass = Rational::zero();
    for atom in cloud.atoms() {
        let s: Rational = atom.point.iter().zip(v).map(|(x, c)| x * c).sum();
        let inside = match side {
            HalfSpaceSide::Upper => s >= *a,
            HalfSpaceSide::Lower => s <= *a,
        };
        if inside {
            mass += &atom.weight;
        }
    }
    Ok(mass)
}

fn to_rational_vec(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

/// Exact Tukey depth for dimensions one to three; an upper bound flagged
/// approximate above that.
pub fn tukey_depth(cloud: &WeightedPointCloud, x: &[Rational]) -> Result<DepthValue> {
    let dim = cloud.dim();
    if x.len() != dim {
        return Err(domain(format!("point has dimension {}, cloud has {dim}", x.len())));
    }
    let scale = lcm_of_denominators(cloud.points().flatten().chain(x.iter()));
    let total = lcm_of_denominators(cloud.atoms().iter().map(|a| &a.weight));
    let s = Rational::from_integer(scale);
    let t = Rational::from_integer(total.clone());
    let lift = |p: &[Rational]| -> Vec<BigInt> { p.iter().map(|c| (c * &s).to_integer()).collect() };
    let x_lat = lift(x);
    let mut at_x = BigInt::zero();
    let mut vecs: Vec<(Vec<BigInt>, BigInt)> = Vec::with_capacity(cloud.len());
    for atom in cloud.atoms() {
        let d: Vec<BigInt> = lift(&atom.point).iter().zip(&x_lat).map(|(a, b)| a - b).collect();
        let w = (&atom.weight * &t).to_integer();
        if d.iter().all(Zero::is_zero) {
            at_x += w;
        } else {
            vecs.push((d, w));
        }
    }
    let (mass, dir, approximate) = match dim {
        1 => {
            let pos: BigInt = vecs.iter().filter(|(d, _)| d[0].is_positive()).map(|(_, w)| w).sum();
            let neg: BigInt = vecs.iter().filter(|(d, _)| d[0].is_negative()).map(|(_, w)| w).sum();
            if pos <= neg {
                (&at_x + pos, vec![BigInt::one()], false)
            } else {
                (&at_x + neg, vec![-BigInt::one()], false)
            }
        }
        2 => {
            let planar: Vec<_> = vecs.into_iter().map(|(d, w)| ([d[0].clone(), d[1].clone()], w)).collect();
            let (m, u) = plane::min_open_halfplane(&planar);
            (&at_x + m, u.to_vec(), false)
        }
        3 => {
            let (m, u) = space::min_open_halfspace3(&vecs);
            (&at_x + m, u, false)
        }
        _ => {
            let (m, u) =
                space::closed_halfspace_upper_bound(dim, &vecs, &at_x, HIGH_DIM_SUBSETS, HIGH_DIM_SAMPLES, HIGH_DIM_SEED);
            (m, u, true)
        }
    };
    Ok(DepthValue { value: Rational::new(mass, total), witness_direction: Some(to_rational_vec(&dir)), approximate })
}

/// Maximum depth over all points of the space and a point attaining it
/// (exact in dimensions one and two).
///
/// In the plane the maximum is found among the levels `k / W` (`W` the common
/// weight denominator) by bisection on the emptiness of the superlevel region;
/// the returned point is that region's centroid.
pub fn depth_of_measure(cloud: &WeightedPointCloud) -> Result<(DepthValue, Point)> {
    match cloud.dim() {
        1 => {
            let (level, region) = max_depth_interval(cloud);
            let x = region.barycenter().expect("nonempty interval");
            debug_assert!(!level.is_zero());
            let d = tukey_depth(cloud, &x)?;
            Ok((d, x))
        }
        2 => {
            let (level, region) = max_depth_region_2d(cloud)?;
            let x = region.barycenter().ok_or_else(|| Error::Internal("empty region at an achieved level".into()))?;
            let d = tukey_depth(cloud, &x)?;
            if d.value != level {
                return Err(Error::Internal(format!("centroid depth {} differs from level {level}", d.value)));
            }
            Ok((d, x))
        }
        d => Err(domain(format!("exact depth of a measure needs dimension 1 or 2, got {d}"))),
    }
}

/// Best depth found by evaluating candidate points (mean, coordinatewise
/// median, atoms, and centroids of random atom subsets); always flagged
/// approximate. Intended for dimension three and above.
pub fn depth_of_measure_heuristic(cloud: &WeightedPointCloud, samples: usize, seed: u64) -> Result<(DepthValue, Point)> {
    let dim = cloud.dim();
    let mut candidates: Vec<Point> = vec![cloud.mean(), coordinate_median(cloud)];
    candidates.extend(cloud.points().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = cloud.atoms();
    for _ in 0..samples {
        let chosen: Vec<&Atom> = atoms.choose_multiple(&mut rng, (dim + 1).min(atoms.len())).collect();
        let k = Rational::from_integer(BigInt::from(chosen.len()));
        let c = (0..dim).map(|i| chosen.iter().map(|a| &a.point[i]).sum::<Rational>() / &k).collect();
        candidates.push(c);
    }
    let mut best: Option<(DepthValue, Point)> = None;
    for c in candidates {
        let d = tukey_depth(cloud, &c)?;
        if best.as_ref().is_none_or(|(b, _)| d.value > b.value) {
            best = Some((d, c));
        }
    }
    let (mut d, x) = best.expect("at least one candidate");
    d.approximate = true;
    Ok((d, x))
}

fn coordinate_median(cloud: &WeightedPointCloud) -> Point {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    (0..cloud.dim())
        .map(|i| {
            let mut col: Vec<(&Rational, &Rational)> = cloud.atoms().iter().map(|a| (&a.point[i], &a.weight)).collect();
            col.sort();
            let mut acc = Rational::zero();
            for (x, w) in &col {
                acc += *w;
                if acc >= half {
                    return (*x).clone();
                }
            }
            col.last().unwrap().0.clone()
        })
        .collect()
}

/// `{x : depth(x) >= tau}` in dimension one or two.
pub fn depth_region(cloud: &WeightedPointCloud, tau: &Rational) -> Result<DepthRegion> {
    if !tau.is_positive() || *tau > Rational::one() {
        return Err(domain("level must lie in (0, 1]"));
    }
    match cloud.dim() {
        1 => Ok(interval_at(cloud, tau)),
        2 => {
            let lattice = Lattice::for_clouds(&[cloud], &[]);
            let family = SuperlevelFamily::new(lattice.cloud(cloud));
            let threshold = family.cloud.threshold(tau);
            let poly = plane::common_region(&[&family], &[threshold]);
            Ok(DepthRegion::from_polygon(&poly, &lattice))
        }
        d => Err(domain(format!("depth regions need dimension 1 or 2, got {d}"))),
    }
}

fn interval_at(cloud: &WeightedPointCloud, tau: &Rational) -> DepthRegion {
    let merged = cloud.merged();
    let atoms = merged.atoms();
    let mut acc = Rational::zero();
    let mut lo = None;
    for a in atoms {
        acc += &a.weight;
        if acc >= *tau {
            lo = Some(&a.point);
            break;
        }
    }
    let mut acc = Rational::zero();
    let mut hi = None;
    for a in atoms.iter().rev() {
        acc += &a.weight;
        if acc >= *tau {
            hi = Some(&a.point);
            break;
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l < h => DepthRegion { dim: 1, vertices: vec![l.clone(), h.clone()] },
        (Some(l), Some(h)) if l == h => DepthRegion { dim: 1, vertices: vec![l.clone()] },
        _ => DepthRegion::empty(1),
    }
}

fn max_depth_interval(cloud: &WeightedPointCloud) -> (Rational, DepthRegion) {
    let merged = cloud.merged();
    let atoms = merged.atoms();
    let mut below = Rational::zero();
    let depths: Vec<Rational> = atoms
        .iter()
        .map(|a| {
            below += &a.weight;
            let above = Rational::one() - &below + &a.weight;
            below.clone().min(above)
        })
        .collect();
    let best = depths.iter().max().unwrap().clone();
    let first = depths.iter().position(|d| *d == best).unwrap();
    let last = depths.iter().rposition(|d| *d == best).unwrap();
    let mut vertices = vec![atoms[first].point.clone()];
    if last != first {
        vertices.push(atoms[last].point.clone());
    }
    (best, DepthRegion { dim: 1, vertices })
}

/// The maximum depth and the region where it is attained, in the plane.
pub(crate) fn max_depth_region_2d(cloud: &WeightedPointCloud) -> Result<(Rational, DepthRegion)> {
    let lattice = Lattice::for_clouds(&[cloud], &[]);
    let family = SuperlevelFamily::new(lattice.cloud(cloud));
    let (level, poly) = plane::max_common_level(&[&family]);
    let poly = poly.ok_or_else(|| Error::Internal("no positive depth level".into()))?;
    Ok((level, DepthRegion::from_polygon(&poly, &lattice)))
}

/// The maximum depth of a measure together with its maximal-depth region.
pub fn max_depth_region(cloud: &WeightedPointCloud) -> Result<(Rational, DepthRegion)> {
    match cloud.dim() {
        1 => Ok(max_depth_interval(cloud)),
        2 => max_depth_region_2d(cloud),
        d => Err(domain(format!("maximal depth regions need dimension 1 or 2, got {d}"))),
    }
}

/// Pushforward under orthogonal projection onto the frame, in frame
/// coordinates. Frame entries are rounded to `FRAME_DIGITS` decimals first.
pub fn marginal(cloud: &WeightedPointCloud, frame: &OrthoFrame) -> Result<WeightedPointCloud> {
    marginal_with_digits(cloud, frame, FRAME_DIGITS)
}

pub fn marginal_with_digits(cloud: &WeightedPointCloud, frame: &OrthoFrame, digits: u32) -> Result<WeightedPointCloud> {
    if frame.ambient() != cloud.dim() {
        return Err(domain(format!("frame lives in dimension {}, cloud in {}", frame.ambient(), cloud.dim())));
    }
    let rows = frame.quantized_rows(digits);
    let offset = vec![Rational::zero(); rows.len()];
    Ok(cloud.map_affine(&rows, &offset)?.merged())
}

/// The baseline `1/(n+1)` and the improved level `1/(n+1) + 1/(3(n+1)^3)`.
pub fn thresholds(n: usize) -> Result<(Rational, Rational)> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let k = BigInt::from(n + 1);
    let rado = Rational::new(BigInt::one(), k.clone());
    let improved = &rado + Rational::new(BigInt::one(), BigInt::from(3) * &k * &k * &k);
    Ok((rado, improved))
}

/// Largest level `k/W` (`W` the lcm of all weight denominators) at which the
/// superlevel sets of all clouds share a point, with the common region at that
/// level and its centroid. Dimension one or two; level zero comes with the
/// origin and no region.
pub fn common_depth(clouds: &[&WeightedPointCloud]) -> Result<(Rational, Point, Option<DepthRegion>)> {
    let dim = clouds.first().map(|c| c.dim()).ok_or_else(|| domain("need at least one cloud"))?;
    if clouds.iter().any(|c| c.dim() != dim) {
        return Err(domain("clouds must share a dimension"));
    }
    let found = match dim {
        1 => {
            let denominator = clouds.iter().flat_map(|c| c.atoms()).fold(BigInt::one(), |acc, a| acc.lcm(a.weight.denom()));
            let region_at = |k: &BigInt| common_interval(clouds, &Rational::new(k.clone(), denominator.clone()));
            let (mut lo, mut hi) = (BigInt::zero(), denominator.clone());
            while lo < hi {
                let mid: BigInt = (&lo + &hi + 1u32) >> 1u32;
                if region_at(&mid).is_empty() {
                    hi = mid - 1u32;
                } else {
                    lo = mid;
                }
            }
            (!lo.is_zero()).then(|| (Rational::new(lo.clone(), denominator.clone()), region_at(&lo)))
        }
        2 => {
            let lattice = Lattice::for_clouds(clouds, &[]);
            let families: Vec<SuperlevelFamily> = clouds.iter().map(|c| SuperlevelFamily::new(lattice.cloud(c))).collect();
            let refs: Vec<&SuperlevelFamily> = families.iter().collect();
            let (level, poly) = plane::max_common_level(&refs);
            poly.map(|p| (level, DepthRegion::from_polygon(&p, &lattice)))
        }
        d => return Err(domain(format!("common depth needs dimension 1 or 2, got {d}"))),
    };
    Ok(match found {
        Some((level, region)) => {
            let x = region.barycenter().ok_or_else(|| Error::Internal("empty region at a feasible level".into()))?;
            (level, x, Some(region))
        }
        None => (Rational::zero(), vec![Rational::zero(); dim], None),
    })
}

/// Intersection of the superlevel sets of all clouds at level `tau`.
pub fn common_region(clouds: &[&WeightedPointCloud], tau: &Rational) -> Result<DepthRegion> {
    if !tau.is_positive() || *tau > Rational::one() {
        return Err(domain("level must lie in (0, 1]"));
    }
    let dim = clouds.first().map(|c| c.dim()).ok_or_else(|| domain("need at least one cloud"))?;
    if clouds.iter().any(|c| c.dim() != dim) {
        return Err(domain("clouds must share a dimension"));
    }
    match dim {
        1 => Ok(common_interval(clouds, tau)),
        2 => {
            let lattice = Lattice::for_clouds(clouds, &[]);
            let families: Vec<SuperlevelFamily> = clouds.iter().map(|c| SuperlevelFamily::new(lattice.cloud(c))).collect();
            let refs: Vec<&SuperlevelFamily> = families.iter().collect();
            let thresholds: Vec<BigInt> = families.iter().map(|f| f.cloud.threshold(tau)).collect();
            Ok(DepthRegion::from_polygon(&plane::common_region(&refs, &thresholds), &lattice))
        }
        d => Err(domain(format!("common regions need dimension 1 or 2, got {d}"))),
    }
}

fn common_interval(clouds: &[&WeightedPointCloud], tau: &Rational) -> DepthRegion {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for c in clouds {
        let r = interval_at(c, tau);
        let (Some(a), Some(b)) = (r.vertices.first(), r.vertices.last()) else {
            return DepthRegion::empty(1);
        };
        lo = Some(lo.map_or(a[0].clone(), |l| l.max(a[0].clone())));
        hi = Some(hi.map_or(b[0].clone(), |h| h.min(b[0].clone())));
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l < h => DepthRegion { dim: 1, vertices: vec![vec![l], vec![h]] },
        (Some(l), Some(h)) if l == h => DepthRegion { dim: 1, vertices: vec![vec![l]] },
        _ => DepthRegion::empty(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn line3() -> WeightedPointCloud {
        WeightedPointCloud::uniform(vec![vec![int(0)], vec![int(1)], vec![int(2)]]).unwrap()
    }

    fn triangle() -> WeightedPointCloud {
        WeightedPointCloud::uniform(vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap()
    }

    #[test]
    fn halfspace_masses() {
        assert_eq!(halfspace_mass(&line3(), &[int(1)], &int(1), HalfSpaceSide::Upper).unwrap(), rat(2, 3));
        assert_eq!(halfspace_mass(&line3(), &[int(1)], &int(-10), HalfSpaceSide::Upper).unwrap(), int(1));
        assert_eq!(halfspace_mass(&triangle(), &[int(1), int(0)], &int(1), HalfSpaceSide::Upper).unwrap(), rat(1, 3));
        assert!(halfspace_mass(&triangle(), &[int(0), int(0)], &int(1), HalfSpaceSide::Upper).is_err());
    }

    #[test]
    fn point_depths() {
        assert_eq!(tukey_depth(&line3(), &[int(1)]).unwrap().value, rat(2, 3));
        assert_eq!(tukey_depth(&triangle(), &[rat(1, 3), rat(1, 3)]).unwrap().value, rat(1, 3));
        assert_eq!(tukey_depth(&triangle(), &[int(2), int(2)]).unwrap().value, int(0));
        assert!(tukey_depth(&triangle(), &[int(0)]).is_err());
    }

    #[test]
    fn witness_attains_depth() {
        let x = vec![rat(1, 5), rat(1, 7)];
        let d = tukey_depth(&triangle(), &x).unwrap();
        let u = d.witness_direction.unwrap();
        let a: Rational = u.iter().zip(&x).map(|(p, q)| p * q).sum();
        assert_eq!(halfspace_mass(&triangle(), &u, &a, HalfSpaceSide::Upper).unwrap(), d.value);
    }

    #[test]
    fn measure_depths() {
        let (d, x) = depth_of_measure(&line3()).unwrap();
        assert_eq!((d.value, x), (rat(2, 3), vec![int(1)]));
        let (d, x) = depth_of_measure(&triangle()).unwrap();
        assert_eq!((d.value, x), (rat(1, 3), vec![rat(1, 3), rat(1, 3)]));
    }

    #[test]
    fn regions() {
        let r = depth_region(&triangle(), &rat(1, 3)).unwrap();
        assert_eq!(r.vertices, vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]]);
        assert!(depth_region(&triangle(), &rat(28, 81)).unwrap().is_empty());
        let single = WeightedPointCloud::uniform(vec![vec![rat(1, 2), int(3)]]).unwrap();
        assert_eq!(depth_region(&single, &int(1)).unwrap().vertices, vec![vec![rat(1, 2), int(3)]]);
        let r1 = depth_region(&line3(), &rat(2, 3)).unwrap();
        assert_eq!(r1.vertices, vec![vec![int(1)]]);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(thresholds(1).unwrap(), (rat(1, 2), rat(13, 24)));
        assert_eq!(thresholds(2).unwrap(), (rat(1, 3), rat(28, 81)));
        assert_eq!(thresholds(3).unwrap(), (rat(1, 4), rat(49, 192)));
    }

    #[test]
    fn marginal_merges_atoms() {
        let c = WeightedPointCloud::uniform(vec![vec![int(0), int(0), int(1)], vec![int(0), int(0), int(-1)]]).unwrap();
        let f = OrthoFrame::coordinate(3, &[0, 1]).unwrap();
        let m = marginal(&c, &f).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.atoms()[0].weight, int(1));
    }

    #[test]
    fn common_depth_of_two_clouds() {
        let a = triangle();
        let b = a.translated(&[int(1), int(0)]).unwrap();
        let (level, x, region) = common_depth(&[&a, &b]).unwrap();
        assert_eq!(level, rat(1, 3));
        assert_eq!(x, vec![int(1), int(0)]);
        assert_eq!(region.unwrap().vertices.len(), 1);
        let far = a.translated(&[int(5), int(5)]).unwrap();
        assert_eq!(common_depth(&[&a, &far]).unwrap().0, int(0));
        let (l1, x1, _) = common_depth(&[&line3(), &line3().translated(&[int(1)]).unwrap()]).unwrap();
        assert_eq!((l1, x1), (rat(1, 3), vec![rat(3, 2)]));
    }

    #[test]
    fn three_dimensional_depth() {
        let tet = WeightedPointCloud::uniform(vec![
            vec![int(0), int(0), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        let d = tukey_depth(&tet, &[rat(1, 4), rat(1, 4), rat(1, 4)]).unwrap();
        assert_eq!(d.value, rat(1, 4));
        assert!(!d.approximate);
        let d = tukey_depth(&tet, &[int(0), int(0), int(0)]).unwrap();
        assert_eq!(d.value, rat(1, 4));
    }
}
