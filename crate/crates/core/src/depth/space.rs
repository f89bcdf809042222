//! Point depth in dimension three (exact) and above (upper bound).

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::plane::{min_open_halfplane, V2};

pub(crate) type VN = Vec<BigInt>;

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross3(a: &[BigInt], b: &[BigInt]) -> VN {
    vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

fn is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

// Divides out the content and fixes the sign of the first nonzero entry.
fn canonical_line(v: VN) -> VN {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let first_negative = v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative);
    let g = if first_negative { -g } else { g };
    v.into_iter().map(|x| x / &g).collect()
}

/// Minimum over generic directions `u` of the weight of `{d : <d, u> > 0}` in
/// `Z^3`, and a direction attaining it. All `d` must be nonzero.
///
/// The weight is constant on the cells cut out on the sphere by the planes
/// `d^perp`, and every cell has a vertex `+-(d_i x d_j)` on its boundary, so
/// the minimum is found by perturbing each such vertex `u0` inside the plane
/// `u0^perp`: vectors off that plane keep their sign, those on it form a
/// planar instance.
pub(crate) fn min_open_halfspace3(vecs: &[(VN, BigInt)]) -> (BigInt, VN) {
    let mut normals: HashSet<VN> = HashSet::new();
    for (i, (a, _)) in vecs.iter().enumerate() {
        for (b, _) in &vecs[i + 1..] {
            let c = cross3(a, b);
            if !is_zero(&c) {
                normals.insert(canonical_line(c));
            }
        }
    }
    if normals.is_empty() {
        return collinear(vecs);
    }
    let mut normals: Vec<VN> = normals.into_iter().collect();
    normals.sort();
    let mut best: Option<(BigInt, VN)> = None;
    for n in normals {
        for u0 in [n.clone(), n.iter().map(|x| -x).collect::<VN>()] {
            let mut fixed = BigInt::zero();
            let mut in_plane: Vec<&(VN, BigInt)> = Vec::new();
            for entry in vecs {
                let s = dot(&entry.0, &u0);
                if s.is_positive() {
                    fixed += &entry.1;
                } else if s.is_zero() {
                    in_plane.push(entry);
                }
            }
            if best.as_ref().is_some_and(|(m, _)| fixed >= *m) {
                continue;
            }
            let e1 = in_plane[0].0.clone();
            let e2 = cross3(&u0, &e1);
            let planar: Vec<(V2, BigInt)> =
                in_plane.iter().map(|(d, w)| ([dot(d, &e1), dot(d, &e2)], w.clone())).collect();
            let (m, w2) = min_open_halfplane(&planar);
            let mass = fixed + m;
            if best.as_ref().is_none_or(|(m, _)| mass < *m) {
                let w: VN = (0..3).map(|k| &w2[0] * &e1[k] + &w2[1] * &e2[k]).collect();
                best = Some((mass, lift_witness(vecs, &u0, &w)));
            }
        }
    }
    best.expect("nonempty normal set")
}

// `K u0 + w` with `K` large enough that vectors off `u0^perp` keep the sign
// they have against `u0`.
fn lift_witness(vecs: &[(VN, BigInt)], u0: &[BigInt], w: &[BigInt]) -> VN {
    let mut k = BigInt::one();
    for (d, _) in vecs {
        let s = dot(d, u0).abs();
        if !s.is_zero() {
            let need = dot(d, w).abs() / &s + 1u32;
            if need > k {
                k = need;
            }
        }
    }
    u0.iter().zip(w).map(|(a, b)| &k * a + b).collect()
}

fn collinear(vecs: &[(VN, BigInt)]) -> (BigInt, VN) {
    let Some((d0, _)) = vecs.first() else {
        let mut u = vec![BigInt::zero(); 3];
        u[0] = BigInt::one();
        return (BigInt::zero(), u);
    };
    let forward: BigInt = vecs.iter().filter(|(d, _)| dot(d, d0).is_positive()).map(|(_, w)| w).sum();
    let total: BigInt = vecs.iter().map(|(_, w)| w).sum();
    let backward = &total - &forward;
    if forward <= backward {
        (forward, d0.clone())
    } else {
        (backward, d0.iter().map(|x| -x).collect())
    }
}

/// Upper bound on the closed half-space minimum in any dimension, with the
/// direction that attains the bound. `max_subsets` caps the number of
/// hyperplanes spanned by vector subsets; `samples` random directions are
/// added from the seeded stream.
pub(crate) fn closed_halfspace_upper_bound(
    dim: usize,
    vecs: &[(VN, BigInt)],
    at_x: &BigInt,
    max_subsets: usize,
    samples: usize,
    seed: u64,
) -> (BigInt, VN) {
    let mut candidates: Vec<VN> = Vec::new();
    let mut e0 = vec![BigInt::zero(); dim];
    e0[0] = BigInt::one();
    candidates.push(e0);
    let k = dim - 1;
    if k >= 1 && vecs.len() >= k {
        let mut subset: Vec<usize> = (0..k).collect();
        for _ in 0..max_subsets {
            let rows: Vec<&VN> = subset.iter().map(|&i| &vecs[i].0).collect();
            let n = generalized_cross(&rows, dim);
            if !is_zero(&n) {
                candidates.push(n);
            }
            if !next_combination(&mut subset, vecs.len()) {
                break;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let u: VN = (0..dim)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                BigInt::from((g * 1e6).round() as i64)
            })
            .collect();
        if !is_zero(&u) {
            candidates.push(u);
        }
    }
    let mut best: Option<(BigInt, VN)> = None;
    for u in candidates {
        let mut pos = at_x.clone();
        let mut neg = at_x.clone();
        for (d, w) in vecs {
            let s = dot(d, &u);
            if !s.is_negative() {
                pos += w;
            }
            if !s.is_positive() {
                neg += w;
            }
        }
        let (m, dir) = if pos <= neg { (pos, u) } else { (neg, u.iter().map(|x| -x).collect()) };
        if best.as_ref().is_none_or(|(b, _)| m < *b) {
            best = Some((m, dir));
        }
    }
    best.expect("at least one candidate")
}

// Advances to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A vector orthogonal to `dim - 1` given vectors (zero when they are dependent).
fn generalized_cross(rows: &[&VN], dim: usize) -> VN {
    (0..dim)
        .map(|skip| {
            let minor: Vec<Vec<BigInt>> =
                rows.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, x)| x.clone()).collect()).collect();
            let d = det(minor);
            if skip % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> VN {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn open_mass(vecs: &[(VN, BigInt)], u: &[BigInt]) -> BigInt {
        vecs.iter().filter(|(d, _)| dot(d, u).is_positive()).map(|(_, w)| w.clone()).sum()
    }

    #[test]
    fn tetrahedron_vertices_around_center() {
        let one = BigInt::one();
        let vecs: Vec<(VN, BigInt)> =
            [v(&[1, 1, 1]), v(&[1, -1, -1]), v(&[-1, 1, -1]), v(&[-1, -1, 1])].into_iter().map(|d| (d, one.clone())).collect();
        let (m, u) = min_open_halfspace3(&vecs);
        assert_eq!(m, one);
        assert_eq!(open_mass(&vecs, &u), m);
        assert!(vecs.iter().all(|(d, _)| !dot(d, &u).is_zero()));
    }

    #[test]
    fn coplanar_vectors_use_the_plane() {
        let one = BigInt::one();
        let vecs: Vec<(VN, BigInt)> =
            [v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[-1, -1, 0]), v(&[2, 0, 0])].into_iter().map(|d| (d, one.clone())).collect();
        let (m, u) = min_open_halfspace3(&vecs);
        assert_eq!(m, one);
        assert_eq!(open_mass(&vecs, &u), m);
    }

    #[test]
    fn determinant_and_cross() {
        assert_eq!(det(vec![v(&[2, 0, 1]), v(&[1, 3, 2]), v(&[1, 1, 2])]), BigInt::from(6));
        assert_eq!(det(vec![v(&[0, 1]), v(&[1, 0])]), BigInt::from(-1));
        let n = generalized_cross(&[&v(&[1, 0, 0]), &v(&[0, 1, 0])], 3);
        assert_eq!(n, v(&[0, 0, 1]));
    }
}
