use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::clip::ConvexPolygon;
use super::plane::Lattice;
use crate::rational::{self, Point, Rational};

/// Where a point sits relative to a closed convex region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// A closed convex depth superlevel set.
///
/// In the plane the vertices run counterclockwise and may describe an empty
/// set, a point, a segment, or a proper polygon. On the line the region is an
/// interval given by one or two endpoints in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthRegion {
    pub dim: usize,
    #[serde(with = "rational::points_as_str")]
    pub vertices: Vec<Point>,
}

impl DepthRegion {
    pub fn empty(dim: usize) -> Self {
        Self { dim, vertices: Vec::new() }
    }

    pub(crate) fn from_polygon(poly: &ConvexPolygon, lattice: &Lattice) -> Self {
        let vertices = poly.vertices().iter().map(|v| lattice.unlift(&v.x, &v.y, &v.z)).collect();
        Self { dim: 2, vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Twice the signed area (zero for degenerate regions).
    pub fn doubled_area(&self) -> Rational {
        if self.dim != 2 || self.vertices.len() < 3 {
            return Rational::zero();
        }
        let k = self.vertices.len();
        (0..k).map(|i| cross2(&self.vertices[i], &self.vertices[(i + 1) % k])).sum()
    }

    /// Exact centroid: area-weighted for polygons, midpoint for segments and
    /// intervals, the point itself for a single vertex.
    pub fn barycenter(&self) -> Option<Point> {
        match self.vertices.len() {
            0 => None,
            1 => Some(self.vertices[0].clone()),
            2 => Some(midpoint(&self.vertices[0], &self.vertices[1])),
            k => {
                let twice_area = self.doubled_area();
                let mut cx = Rational::zero();
                let mut cy = Rational::zero();
                for i in 0..k {
                    let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % k]);
                    let c = cross2(p, q);
                    cx += (&p[0] + &q[0]) * &c;
                    cy += (&p[1] + &q[1]) * &c;
                }
                let den = twice_area * Rational::from_integer(3.into());
                Some(vec![cx / &den, cy / den])
            }
        }
    }

    /// Exact membership test.
    pub fn locate(&self, p: &[Rational]) -> Location {
        if self.vertices.is_empty() {
            return Location::Outside;
        }
        if self.dim == 1 {
            let (lo, hi) = (&self.vertices[0][0], &self.vertices[self.vertices.len() - 1][0]);
            return if p[0] < *lo || p[0] > *hi {
                Location::Outside
            } else if p[0] == *lo || p[0] == *hi {
                Location::Boundary
            } else {
                Location::Inside
            };
        }
        match self.vertices.len() {
            1 => {
                if self.vertices[0].as_slice() == p {
                    Location::Boundary
                } else {
                    Location::Outside
                }
            }
            2 => {
                let (a, b) = (&self.vertices[0], &self.vertices[1]);
                let on_line = orient(a, b, p).is_zero();
                let within = (0..2).all(|k| {
                    let (lo, hi) = if a[k] <= b[k] { (&a[k], &b[k]) } else { (&b[k], &a[k]) };
                    *lo <= p[k] && p[k] <= *hi
                });
                if on_line && within {
                    Location::Boundary
                } else {
                    Location::Outside
                }
            }
            k => {
                let mut on_edge = false;
                for i in 0..k {
                    let o = orient(&self.vertices[i], &self.vertices[(i + 1) % k], p);
                    if o.is_negative() {
                        return Location::Outside;
                    }
                    on_edge |= o.is_zero();
                }
                if on_edge {
                    Location::Boundary
                } else {
                    Location::Inside
                }
            }
        }
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.locate(p) != Location::Outside
    }
}

fn cross2(p: &[Rational], q: &[Rational]) -> Rational {
    &p[0] * &q[1] - &p[1] * &q[0]
}

fn orient(a: &[Rational], b: &[Rational], p: &[Rational]) -> Rational {
    (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0])
}

fn midpoint(a: &[Rational], b: &[Rational]) -> Point {
    let half = Rational::new(1.into(), 2.into());
    a.iter().zip(b).map(|(x, y)| (x + y) * &half).collect()
}
