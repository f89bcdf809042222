//! Exact clipping of a convex polygon by closed half-planes.
//!
//! Half-planes are `a x + b y <= c` with integer coefficients. Every vertex is
//! stored in homogeneous integer coordinates `(X, Y, Z)`, `Z > 0`, and is always
//! the intersection of two input lines, so coordinate sizes never compound
//! across clips. Each vertex remembers the line carrying the edge to its
//! successor; new vertices are formed from that line and the clipping line.
//!
//! Signs are decided by a floating-point filter first and recomputed exactly
//! only when the filter cannot certify them.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub(crate) struct Line {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    af: f64,
    bf: f64,
    cf: f64,
}

impl Line {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        let (af, bf, cf) = (approx(&a), approx(&b), approx(&c));
        Self { a, b, c, af, bf, cf }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Vertex {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    xf: f64,
    yf: f64,
    /// Index into the polygon's line arena of the edge leaving this vertex.
    edge: usize,
}

impl Vertex {
    fn new(x: BigInt, y: BigInt, z: BigInt, edge: usize) -> Self {
        let zf = approx(&z);
        let (xf, yf) = (approx(&x) / zf, approx(&y) / zf);
        Self { x, y, z, xf, yf, edge }
    }

    fn same_point(&self, o: &Vertex) -> bool {
        let scale = self.xf.abs() + self.yf.abs() + o.xf.abs() + o.yf.abs();
        let gap = (self.xf - o.xf).abs() + (self.yf - o.yf).abs();
        if gap.is_finite() && scale.is_finite() && gap > 1e-9 * scale {
            return false;
        }
        &self.x * &o.z == &o.x * &self.z && &self.y * &o.z == &o.y * &self.z
    }
}

fn approx(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Sign of `a X + b Y - c Z`: negative inside, zero on the line, positive outside.
fn side(line: &Line, v: &Vertex) -> Ordering {
    let terms = [line.af * v.xf, line.bf * v.yf, line.cf];
    let val = terms[0] + terms[1] - terms[2];
    let mag: f64 = terms.iter().map(|t| t.abs()).sum();
    if val.is_finite() && mag.is_finite() && val.abs() > 1e-10 * mag {
        return if val < 0.0 { Ordering::Less } else { Ordering::Greater };
    }
    let exact = &line.a * &v.x + &line.b * &v.y - &line.c * &v.z;
    exact.sign_cmp()
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

fn intersect(l1: &Line, l2: &Line, edge: usize) -> Vertex {
    let det = &l1.a * &l2.b - &l2.a * &l1.b;
    debug_assert!(!det.is_zero(), "clipping parallel lines");
    let x = &l1.c * &l2.b - &l2.c * &l1.b;
    let y = &l1.a * &l2.c - &l2.a * &l1.c;
    if det.is_negative() {
        Vertex::new(-x, -y, -det, edge)
    } else {
        Vertex::new(x, y, det, edge)
    }
}

/// A possibly degenerate convex polygon (empty, point, segment, or proper),
/// vertices in counterclockwise order.
#[derive(Debug, Clone)]
pub(crate) struct ConvexPolygon {
    lines: Vec<Line>,
    verts: Vec<Vertex>,
}

impl ConvexPolygon {
    /// The axis-aligned box `[x0, x1] x [y0, y1]` (integer bounds, `x0 <= x1`, `y0 <= y1`).
    pub fn bbox(x0: &BigInt, x1: &BigInt, y0: &BigInt, y1: &BigInt) -> Self {
        let one = || BigInt::from(1);
        let zero = BigInt::zero;
        let lines = vec![
            Line::new(zero(), -one(), -y0.clone()), // bottom: y >= y0
            Line::new(one(), zero(), x1.clone()),   // right: x <= x1
            Line::new(zero(), one(), y1.clone()),   // top: y <= y1
            Line::new(-one(), zero(), -x0.clone()), // left: x >= x0
        ];
        let corners = [(x0, y0, 0), (x1, y0, 1), (x1, y1, 2), (x0, y1, 3)];
        let verts = corners.iter().map(|(x, y, e)| Vertex::new((*x).clone(), (*y).clone(), one(), *e)).collect();
        let mut poly = Self { lines, verts };
        poly.dedupe();
        poly
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    fn dedupe(&mut self) {
        if self.verts.len() < 2 {
            return;
        }
        let mut out: Vec<Vertex> = Vec::with_capacity(self.verts.len());
        for v in self.verts.drain(..) {
            match out.last_mut() {
                // Keep the outgoing edge of the later duplicate.
                Some(last) if last.same_point(&v) => last.edge = v.edge,
                _ => out.push(v),
            }
        }
        while out.len() > 1 && out[0].same_point(out.last().unwrap()) {
            let last = out.pop().unwrap();
            out[0] = Vertex { edge: out[0].edge, ..last };
        }
        self.verts = out;
    }

    /// Intersects with the closed half-plane `a x + b y <= c`.
    pub fn clip(&mut self, line: Line) {
        if self.verts.is_empty() {
            return;
        }
        let sides: Vec<Ordering> = self.verts.iter().map(|v| side(&line, v)).collect();
        if sides.iter().all(|s| *s != Ordering::Greater) {
            return;
        }
        if sides.iter().all(|s| *s == Ordering::Greater) {
            self.verts.clear();
            return;
        }
        let clip_idx = self.lines.len();
        self.lines.push(line);
        let k = self.verts.len();
        let mut out = Vec::with_capacity(k + 1);
        for i in 0..k {
            let j = (i + 1) % k;
            let cur = &self.verts[i];
            let (fc, fnx) = (sides[i], sides[j]);
            let edge_line = &self.lines[cur.edge];
            match fc {
                Ordering::Less | Ordering::Equal => {
                    let edge = if fnx == Ordering::Greater && fc == Ordering::Equal { clip_idx } else { cur.edge };
                    out.push(Vertex { edge, ..cur.clone() });
                    if fc == Ordering::Less && fnx == Ordering::Greater {
                        out.push(intersect(edge_line, &self.lines[clip_idx], clip_idx));
                    }
                }
                Ordering::Greater => {
                    if fnx == Ordering::Less {
                        out.push(intersect(edge_line, &self.lines[clip_idx], cur.edge));
                    }
                }
            }
        }
        self.verts = out;
        self.dedupe();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn coords(p: &ConvexPolygon) -> Vec<(f64, f64)> {
        p.vertices().iter().map(|v| (v.xf, v.yf)).collect()
    }

    #[test]
    fn clip_square_to_triangle() {
        let mut p = ConvexPolygon::bbox(&b(0), &b(2), &b(0), &b(2));
        p.clip(Line::new(b(1), b(1), b(2)));
        assert_eq!(coords(&p), vec![(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
    }

    #[test]
    fn clip_to_segment_and_point_and_empty() {
        let mut p = ConvexPolygon::bbox(&b(0), &b(2), &b(0), &b(2));
        p.clip(Line::new(b(0), b(1), b(0)));
        assert_eq!(coords(&p), vec![(0.0, 0.0), (2.0, 0.0)]);
        p.clip(Line::new(b(1), b(0), b(0)));
        assert_eq!(coords(&p), vec![(0.0, 0.0)]);
        p.clip(Line::new(b(1), b(1), b(-1)));
        assert!(p.is_empty());
    }

    #[test]
    fn segment_clipped_in_the_middle() {
        let mut p = ConvexPolygon::bbox(&b(0), &b(4), &b(1), &b(1));
        assert_eq!(p.vertices().len(), 2);
        p.clip(Line::new(b(1), b(0), b(3)));
        p.clip(Line::new(b(-1), b(0), b(-1)));
        assert_eq!(coords(&p), vec![(1.0, 1.0), (3.0, 1.0)]);
    }

    #[test]
    fn degenerate_box_is_a_point() {
        let p = ConvexPolygon::bbox(&b(3), &b(3), &b(5), &b(5));
        assert_eq!(coords(&p), vec![(3.0, 5.0)]);
    }

    #[test]
    fn vertex_on_clip_line_survives() {
        let mut p = ConvexPolygon::bbox(&b(0), &b(2), &b(0), &b(2));
        // x + y <= 0 touches only the corner (0, 0).
        p.clip(Line::new(b(1), b(1), b(0)));
        assert_eq!(coords(&p), vec![(0.0, 0.0)]);
    }
}
