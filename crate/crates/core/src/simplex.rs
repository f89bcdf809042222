//! The canonical regular simplex attached to a vertex tuple: positive
//! dependence, volume normalization, the linear map onto the reference
//! simplex, and its polar decomposition `A = S R`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize, Serializer};

use crate::centers::{self, Classification};
use crate::depth::WeightedPointCloud;
use crate::error::{domain, Error, Result};
use crate::linalg::{from_rows, jacobi_eigen, to_rows};
use crate::rational::{to_f64, Point};

/// Relative tolerance for kernel detection and positivity of coefficients.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-12;

/// `n + 1` vectors in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexTuple {
    pub n: usize,
    pub v: Vec<Vec<f64>>,
}

impl VertexTuple {
    pub fn new(v: Vec<Vec<f64>>) -> Result<Self> {
        let n = v.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| domain("need n + 1 >= 2 vectors"))?;
        if v.iter().any(|x| x.len() != n) {
            return Err(domain(format!("{} vectors must all have length {n}", n + 1)));
        }
        if v.iter().flatten().any(|x| !x.is_finite()) {
            return Err(domain("vertex entries must be finite"));
        }
        Ok(Self { n, v })
    }

    /// Applies the linear map `m` (rows) to every vector.
    pub fn mapped(&self, m: &[Vec<f64>]) -> Result<Self> {
        let m = from_rows(m);
        Self::new(self.v.iter().map(|x| (&m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()).collect())
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(perm.iter().map(|&i| self.v[i].clone()).collect())
    }
}

/// `lambda` with `sum lambda_i v_i = 0`, `lambda_0 = 1`, all entries positive.
pub fn positive_dependence(tuple: &VertexTuple) -> Result<Vec<f64>> {
    let n = tuple.n;
    let m = DMatrix::from_fn(n, n + 1, |i, j| tuple.v[j][i]);
    let gram = m.transpose() * &m;
    let eig = jacobi_eigen(&gram)?;
    let top = eig.values.amax().max(f64::MIN_POSITIVE);
    let kernel_dim = eig.values.iter().filter(|&&x| x <= DEPENDENCE_TOLERANCE * top).count();
    if kernel_dim != 1 {
        return Err(Error::Degenerate(format!("kernel of the vertex map has dimension {kernel_dim}, expected 1")));
    }
    let k = eig.vectors.column(0);
    let scale = k.amax();
    if k[0].abs() <= DEPENDENCE_TOLERANCE * scale {
        return Err(Error::OriginNotInterior);
    }
    let lambda: Vec<f64> = k.iter().map(|x| x / k[0]).collect();
    let biggest = lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if lambda.iter().any(|&x| x <= DEPENDENCE_TOLERANCE * biggest) {
        return Err(Error::OriginNotInterior);
    }
    Ok(lambda)
}

/// `|det(p_1 - p_0, ..., p_n - p_0)| / n!`.
pub fn simplex_volume(points: &[Vec<f64>]) -> f64 {
    let n = points.len() - 1;
    let m = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - points[0][i]);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    m.determinant().abs() / fact
}

/// The points `t lambda_i v_i` with `t > 0` chosen so their simplex has volume one.
pub fn normalize_volume(tuple: &VertexTuple, lambda: &[f64]) -> Result<(f64, Vec<Vec<f64>>)> {
    if lambda.len() != tuple.n + 1 {
        return Err(domain("lambda must have n + 1 entries"));
    }
    let scaled: Vec<Vec<f64>> = tuple.v.iter().zip(lambda).map(|(v, l)| v.iter().map(|x| x * l).collect()).collect();
    let vol = simplex_volume(&scaled);
    if !vol.is_finite() || vol <= 0.0 {
        return Err(Error::Degenerate("scaled vertices span no volume".into()));
    }
    let t = vol.powf(-1.0 / tuple.n as f64);
    Ok((t, scaled.into_iter().map(|v| v.into_iter().map(|x| x * t).collect()).collect()))
}

/// Regular simplex with unit edges centered at the origin. The first vertex
/// lies on the first axis; the rest are the reference simplex one dimension
/// lower, shifted back along that axis.
pub fn reference_simplex(n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 1, "simplex dimension must be positive");
    if n == 1 {
        return vec![vec![0.5], vec![-0.5]];
    }
    let r = (n as f64 / (2.0 * (n as f64 + 1.0))).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    let mut first = vec![0.0; n];
    first[0] = r;
    out.push(first);
    for lower in reference_simplex(n - 1) {
        let mut v = Vec::with_capacity(n);
        v.push(-r / n as f64);
        v.extend(lower);
        out.push(v);
    }
    out
}

/// The linear map sending reference vertex `i` to `sigma[i]`.
pub fn simplex_map(sigma: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = sigma.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| domain("need n + 1 >= 2 vertices"))?;
    if sigma.iter().any(|v| v.len() != n) {
        return Err(domain("vertices must have length n"));
    }
    let reference = reference_simplex(n);
    let refm = DMatrix::from_fn(n, n, |i, j| reference[j][i]);
    let sig = DMatrix::from_fn(n, n, |i, j| sigma[j][i]);
    let inv = refm.try_inverse().ok_or_else(|| Error::Degenerate("reference simplex is singular".into()))?;
    let a = sig * inv;
    if a.determinant().abs() <= f64::EPSILON * a.norm().powi(n as i32) {
        return Err(Error::Degenerate("vertices do not span".into()));
    }
    Ok(a)
}

/// `A = S R` with `S = sqrt(A A^t)` symmetric positive definite and `R` orthogonal.
pub fn polar_decompose(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !a.is_square() {
        return Err(domain("polar decomposition needs a square map"));
    }
    let eig = jacobi_eigen(&(a * a.transpose()))?;
    let top = eig.values.amax();
    if eig.values.min().partial_cmp(&(DEPENDENCE_TOLERANCE * top)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Degenerate("map is singular".into()));
    }
    let s = eig.map(f64::sqrt);
    let s_inv = eig.map(|x| 1.0 / x.sqrt());
    let r = s_inv * a;
    Ok((s, r))
}

/// Every stage of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSimplexPlacement {
    pub n: usize,
    #[serde(serialize_with = "sig15_vec")]
    pub lambda: Vec<f64>,
    pub volume_scale: f64,
    #[serde(serialize_with = "sig15_rows")]
    pub sigma_vertices: Vec<Vec<f64>>,
    #[serde(serialize_with = "sig15_rows")]
    pub map_a: Vec<Vec<f64>>,
    #[serde(serialize_with = "sig15_rows")]
    pub factor_s: Vec<Vec<f64>>,
    #[serde(serialize_with = "sig15_rows")]
    pub factor_r: Vec<Vec<f64>>,
    #[serde(serialize_with = "sig15_rows")]
    pub delta_vertices: Vec<Vec<f64>>,
}

fn sig15(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn sig15_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|&x| sig15(x)).collect::<Vec<_>>().serialize(s)
}

fn sig15_rows<S: Serializer>(v: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|r| r.iter().map(|&x| sig15(x)).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
}

/// The full pipeline; `delta_vertices = R` applied to the reference simplex.
pub fn delta_of_vertices(tuple: &VertexTuple) -> Result<RegularSimplexPlacement> {
    let lambda = positive_dependence(tuple)?;
    let (t, sigma) = normalize_volume(tuple, &lambda)?;
    let a = simplex_map(&sigma)?;
    let (s, r) = polar_decompose(&a)?;
    let delta = reference_simplex(tuple.n)
        .iter()
        .map(|v| (&r * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec())
        .collect();
    Ok(RegularSimplexPlacement {
        n: tuple.n,
        lambda,
        volume_scale: t,
        sigma_vertices: sigma,
        map_a: to_rows(&a),
        factor_s: to_rows(&s),
        factor_r: to_rows(&r),
        delta_vertices: delta,
    })
}

/// Largest distance from a vertex of one set to the nearest vertex of the other.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let one_way = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter().map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Surrogate vertex tuple for a measure of insufficient depth (labelled as
/// such wherever it is reported): the measure is centered at `c(mu)`,
/// directions are split into `n + 1` equal sectors, and each vertex is the
/// weighted mean of the atoms in its sector. The tuple is finally recentered
/// so its vertices average to zero. Up to `n + 1` sector rotations are tried.
///
/// With `force` the sufficiency check is skipped.
pub fn witness_vertices(cloud: &WeightedPointCloud, n: usize, force: bool) -> Result<VertexTuple> {
    let report = centers::center_point(cloud, n)?;
    if report.classification == Classification::Sufficient && !force {
        return Err(Error::NotInsufficient);
    }
    witness_vertices_about(cloud, &report.c)
}

/// As [`witness_vertices`], with an explicit center and no classification.
pub fn witness_vertices_about(cloud: &WeightedPointCloud, center: &Point) -> Result<VertexTuple> {
    let n = cloud.dim();
    if center.len() != n || !(1..=2).contains(&n) {
        return Err(domain("sector surrogate needs n = 1 or 2 and a center of that dimension"));
    }
    let atoms: Vec<(Vec<f64>, f64)> = cloud
        .atoms()
        .iter()
        .filter(|a| a.point != *center)
        .map(|a| (a.point.iter().zip(center).map(|(x, c)| to_f64(&(x - c))).collect(), to_f64(&a.weight)))
        .collect();
    let sectors = n + 1;
    let width = 2.0 * PI / sectors as f64;
    for attempt in 0..sectors {
        let offset = attempt as f64 * width / sectors as f64;
        let mut sums = vec![vec![0.0; n]; sectors];
        let mut mass = vec![0.0; sectors];
        for (p, w) in &atoms {
            let k = if n == 1 {
                usize::from(p[0] < 0.0)
            } else {
                let angle = (p[1].atan2(p[0]) - offset).rem_euclid(2.0 * PI);
                ((angle / width) as usize).min(sectors - 1)
            };
            for (s, x) in sums[k].iter_mut().zip(p) {
                *s += w * x;
            }
            mass[k] += w;
        }
        if mass.iter().any(|&m| m <= 0.0) {
            continue;
        }
        let mut v: Vec<Vec<f64>> = sums.iter().zip(&mass).map(|(s, m)| s.iter().map(|x| x / m).collect()).collect();
        let mean: Vec<f64> = (0..n).map(|i| v.iter().map(|x| x[i]).sum::<f64>() / sectors as f64).collect();
        for x in &mut v {
            for (xi, mi) in x.iter_mut().zip(&mean) {
                *xi -= mi;
            }
        }
        let tuple = VertexTuple::new(v)?;
        if positive_dependence(&tuple).is_ok() {
            return Ok(tuple);
        }
    }
    Err(Error::SurrogateUnavailable(format!("all {sectors} sector offsets leave an empty or degenerate sector")))
}
