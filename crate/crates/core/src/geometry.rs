//! Planar shapes, midpoint-quadrature meshes and strip hulls.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the initial box used for half-plane clipping.
const CLIP_BOX: f64 = 1e6;
/// Vertices closer than this are merged after clipping.
const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector `(cos φ, sin φ)`.
    pub fn from_angle(phi: f64) -> Self {
        Self::new(phi.cos(), phi.sin())
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise rotation by a right angle.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

fn triangle_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a) / 2.0
}

/// Proper crossing of segments `ab` and `cd` (touching and collinear overlap excluded).
fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    let eps = 1e-12 * (1.0 + (b - a).norm() * (d - c).norm());
    o1 * o2 < 0.0
        && o3 * o4 < 0.0
        && o1.abs() > eps
        && o2.abs() > eps
        && o3.abs() > eps
        && o4.abs() > eps
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.dist(a + ab * t)
}

/// Even–odd point-in-polygon test.
fn polygon_contains(vertices: &[Vec2], p: Vec2) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn boundary_distance(vertices: &[Vec2], p: Vec2) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Support of one source component.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rectangle {
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
    },
    Disc {
        center: Vec2,
        radius: f64,
    },
    /// Simple polygon, counterclockwise.
    Polygon {
        vertices: Vec<Vec2>,
    },
}

impl Shape {
    pub fn rectangle(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        let s = Shape::Rectangle {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn disc(center: Vec2, radius: f64) -> Result<Self> {
        let s = Shape::Disc { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        let s = Shape::Polygon { vertices };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Rectangle {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
            } => {
                if ![x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite()) {
                    return Err(Error::invalid("rectangle bounds must be finite"));
                }
                if !(x_lo < x_hi && y_lo < y_hi) {
                    return Err(Error::invalid(format!(
                        "rectangle needs x_lo < x_hi and y_lo < y_hi, got ({x_lo},{x_hi})x({y_lo},{y_hi})"
                    )));
                }
            }
            Shape::Disc { center, radius } => {
                if !center.is_finite() || !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::invalid(format!(
                        "disc needs a finite center and radius > 0, got r={radius}"
                    )));
                }
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::invalid(format!(
                        "polygon needs >= 3 vertices, got {n}"
                    )));
                }
                if !vertices.iter().all(|v| v.is_finite()) {
                    return Err(Error::invalid("polygon vertices must be finite"));
                }
                if signed_area(vertices) <= 0.0 {
                    return Err(Error::invalid(
                        "polygon must be counterclockwise with positive area",
                    ));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                        if segments_cross(a, b, c, d) {
                            return Err(Error::invalid(format!(
                                "polygon edges {i} and {j} intersect"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Rectangle {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
            } => (x_hi - x_lo) * (y_hi - y_lo),
            Shape::Disc { radius, .. } => PI * radius * radius,
            Shape::Polygon { vertices } => signed_area(vertices),
        }
    }

    /// Smallest disc centered at the bounding-box center that encloses the shape.
    pub fn bounding_disc(&self) -> (Vec2, f64) {
        match self {
            Shape::Disc { center, radius } => (*center, *radius),
            _ => {
                let outline = self.outline();
                let (lo, hi) = bbox(&outline);
                let c = (lo + hi) * 0.5;
                let r = outline.iter().map(|v| v.dist(c)).fold(0.0, f64::max);
                (c, r)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Disc { radius, .. } => 2.0 * radius,
            _ => {
                let o = self.outline();
                let mut d = 0.0f64;
                for (i, a) in o.iter().enumerate() {
                    for b in &o[i + 1..] {
                        d = d.max(a.dist(*b));
                    }
                }
                d
            }
        }
    }

    /// Boundary vertices for rectangles and polygons; empty for discs.
    pub fn outline(&self) -> Vec<Vec2> {
        match self {
            Shape::Rectangle {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
            } => vec![
                Vec2::new(*x_lo, *y_lo),
                Vec2::new(*x_hi, *y_lo),
                Vec2::new(*x_hi, *y_hi),
                Vec2::new(*x_lo, *y_hi),
            ],
            Shape::Disc { .. } => Vec::new(),
            Shape::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Closed-set membership with tolerance `tol`.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        match self {
            Shape::Disc { center, radius } => p.dist(*center) <= radius + tol,
            _ => {
                let o = self.outline();
                polygon_contains(&o, p) || boundary_distance(&o, p) <= tol
            }
        }
    }

    /// True when `p` lies in the interior at distance more than `tol` from the boundary.
    pub fn contains_strictly(&self, p: Vec2, tol: f64) -> bool {
        match self {
            Shape::Disc { center, radius } => p.dist(*center) < radius - tol,
            _ => {
                let o = self.outline();
                polygon_contains(&o, p) && boundary_distance(&o, p) > tol
            }
        }
    }

    /// Whether the interiors of two shapes intersect; shared boundaries are allowed.
    pub fn interiors_overlap(&self, other: &Shape) -> bool {
        let tol = 1e-9;
        let (c1, r1) = self.bounding_disc();
        let (c2, r2) = other.bounding_disc();
        if c1.dist(c2) >= r1 + r2 - tol {
            return false;
        }
        match (self, other) {
            (
                Shape::Disc {
                    center: a,
                    radius: ra,
                },
                Shape::Disc {
                    center: b,
                    radius: rb,
                },
            ) => a.dist(*b) < ra + rb - tol,
            (Shape::Disc { center, radius }, poly) | (poly, Shape::Disc { center, radius }) => {
                let o = poly.outline();
                polygon_contains(&o, *center) || boundary_distance(&o, *center) < radius - tol
            }
            _ => {
                let a = self.outline();
                let b = other.outline();
                let (na, nb) = (a.len(), b.len());
                for i in 0..na {
                    for j in 0..nb {
                        if segments_cross(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]) {
                            return true;
                        }
                    }
                }
                // no proper crossings: overlap only if some probe of one lies inside the other
                let probes = |poly: &[Vec2]| -> Vec<Vec2> {
                    let n = poly.len();
                    let mut pts: Vec<Vec2> = poly.to_vec();
                    pts.extend((0..n).map(|i| (poly[i] + poly[(i + 1) % n]) * 0.5));
                    if let Ok(tris) = ear_clip(poly) {
                        pts.extend(tris.iter().map(|[p, q, r]| (*p + *q + *r) * (1.0 / 3.0)));
                    }
                    pts
                };
                let inside = |pts: &[Vec2], poly: &[Vec2]| {
                    pts.iter()
                        .any(|p| polygon_contains(poly, *p) && boundary_distance(poly, *p) > tol)
                };
                inside(&probes(&a), &b) || inside(&probes(&b), &a)
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let c = vertices[(i + 2) % n];
                    (b - a).cross(c - b) >= -1e-14
                })
            }
            _ => true,
        }
    }

    /// Offset a copy of the shape by `t`.
    pub fn translated(&self, t: Vec2) -> Shape {
        match self {
            Shape::Rectangle {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
            } => Shape::Rectangle {
                x_lo: x_lo + t.x,
                x_hi: x_hi + t.x,
                y_lo: y_lo + t.y,
                y_hi: y_hi + t.y,
            },
            Shape::Disc { center, radius } => Shape::Disc {
                center: *center + t,
                radius: *radius,
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices.iter().map(|v| *v + t).collect(),
            },
        }
    }
}

fn bbox(points: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Triangulation with per-triangle centroid and area, in construction order.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    triangles: Vec<[Vec2; 3]>,
    centroids: Vec<Vec2>,
    areas: Vec<f64>,
}

impl TriangleMesh {
    fn from_triangles(triangles: Vec<[Vec2; 3]>) -> Result<Self> {
        let mut centroids = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for (i, [a, b, c]) in triangles.iter().enumerate() {
            let area = triangle_area(*a, *b, *c);
            if area.is_nan() || area <= 0.0 {
                return Err(Error::invalid(format!(
                    "triangle {i} has non-positive area {area}"
                )));
            }
            centroids.push((*a + *b + *c) * (1.0 / 3.0));
            areas.push(area);
        }
        Ok(Self {
            triangles,
            centroids,
            areas,
        })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangles(&self) -> &[[Vec2; 3]] {
        &self.triangles
    }

    pub fn centroids(&self) -> &[Vec2] {
        &self.centroids
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Longest edge over all triangles.
    pub fn max_diameter(&self) -> f64 {
        self.triangles
            .iter()
            .map(|[a, b, c]| a.dist(*b).max(b.dist(*c)).max(c.dist(*a)))
            .fold(0.0, f64::max)
    }
}

/// Mesh `shape` with triangles of diameter at most about `h`.
pub fn triangulate(shape: &Shape, h: f64) -> Result<TriangleMesh> {
    shape.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    let diam = shape.diameter();
    if h >= diam {
        return Err(Error::invalid(format!(
            "mesh size {h} must be smaller than the shape diameter {diam}"
        )));
    }
    let triangles = match shape {
        Shape::Rectangle {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        } => mesh_rectangle(*x_lo, *x_hi, *y_lo, *y_hi, h),
        Shape::Disc { center, radius } => mesh_disc(*center, *radius, h),
        Shape::Polygon { vertices } => {
            let coarse = if shape.is_convex() {
                let n = vertices.len() as f64;
                let c = vertices.iter().fold(Vec2::default(), |acc, v| acc + *v) * (1.0 / n);
                (0..vertices.len())
                    .map(|i| [c, vertices[i], vertices[(i + 1) % vertices.len()]])
                    .collect()
            } else {
                ear_clip(vertices)?
            };
            coarse
                .into_iter()
                .flat_map(|t| refine_triangle(t, h))
                .collect()
        }
    };
    TriangleMesh::from_triangles(triangles)
}

fn mesh_rectangle(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, h: f64) -> Vec<[Vec2; 3]> {
    let nx = ((x_hi - x_lo) / h).ceil().max(1.0) as usize;
    let ny = ((y_hi - y_lo) / h).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=nx)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / nx as f64)
        .collect();
    let ys: Vec<f64> = (0..=ny)
        .map(|j| y_lo + (y_hi - y_lo) * j as f64 / ny as f64)
        .collect();
    let mut out = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p00 = Vec2::new(xs[i], ys[j]);
            let p10 = Vec2::new(xs[i + 1], ys[j]);
            let p11 = Vec2::new(xs[i + 1], ys[j + 1]);
            let p01 = Vec2::new(xs[i], ys[j + 1]);
            out.push([p00, p10, p11]);
            out.push([p00, p11, p01]);
        }
    }
    out
}

/// Concentric rings with `6i` vertices on ring `i`, zipped by angle.
fn mesh_disc(center: Vec2, radius: f64, h: f64) -> Vec<[Vec2; 3]> {
    let rings = (radius / h).ceil().max(1.0) as usize;
    let ring = |i: usize| -> Vec<(f64, Vec2)> {
        let r = radius * i as f64 / rings as f64;
        let n = 6 * i;
        (0..n)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n as f64;
                (phi, center + Vec2::from_angle(phi) * r)
            })
            .collect()
    };
    let mut out = Vec::with_capacity(6 * rings * rings);
    let first = ring(1);
    for j in 0..first.len() {
        out.push([center, first[j].1, first[(j + 1) % first.len()].1]);
    }
    for i in 2..=rings {
        let inner = ring(i - 1);
        let outer = ring(i);
        let (ni, no) = (inner.len(), outer.len());
        let angle = |list: &[(f64, Vec2)], idx: usize| {
            // angles past the end wrap to 2π
            if idx == list.len() {
                2.0 * PI
            } else {
                list[idx].0
            }
        };
        let (mut a, mut b) = (0usize, 0usize);
        while a < ni || b < no {
            let next_a = if a < ni {
                angle(&inner, a + 1)
            } else {
                f64::INFINITY
            };
            let next_b = if b < no {
                angle(&outer, b + 1)
            } else {
                f64::INFINITY
            };
            let pa = inner[a % ni].1;
            let pb = outer[b % no].1;
            if next_b <= next_a {
                out.push([pa, pb, outer[(b + 1) % no].1]);
                b += 1;
            } else {
                out.push([pa, pb, inner[(a + 1) % ni].1]);
                a += 1;
            }
        }
    }
    out
}

/// Split a triangle into `s²` similar copies with `s = ceil(longest edge / h)`.
fn refine_triangle([a, b, c]: [Vec2; 3], h: f64) -> Vec<[Vec2; 3]> {
    let longest = a.dist(b).max(b.dist(c)).max(c.dist(a));
    let s = (longest / h).ceil().max(1.0) as usize;
    let sf = s as f64;
    let p = |i: usize, j: usize| a + (b - a) * (i as f64 / sf) + (c - a) * (j as f64 / sf);
    let mut out = Vec::with_capacity(s * s);
    for i in 0..s {
        for j in 0..(s - i) {
            out.push([p(i, j), p(i + 1, j), p(i, j + 1)]);
            if j + 1 < s - i {
                out.push([p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)]);
            }
        }
    }
    out
}

/// Ear clipping of a simple counterclockwise polygon.
fn ear_clip(vertices: &[Vec2]) -> Result<Vec<[Vec2; 3]>> {
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let mut out = Vec::with_capacity(vertices.len().saturating_sub(2));
    while idx.len() > 3 {
        let n = idx.len();
        let ear = (0..n).find(|&i| {
            let a = vertices[idx[(i + n - 1) % n]];
            let b = vertices[idx[i]];
            let c = vertices[idx[(i + 1) % n]];
            if triangle_area(a, b, c) <= 0.0 {
                return false;
            }
            idx.iter().all(|&k| {
                let p = vertices[k];
                if p == a || p == b || p == c {
                    return true;
                }
                // reject if p lies inside or on abc
                !(triangle_area(a, b, p) >= 0.0
                    && triangle_area(b, c, p) >= 0.0
                    && triangle_area(c, a, p) >= 0.0)
            })
        });
        let Some(i) = ear else {
            return Err(Error::invalid("ear clipping failed; polygon not simple"));
        };
        let n = idx.len();
        out.push([
            vertices[idx[(i + n - 1) % n]],
            vertices[idx[i]],
            vertices[idx[(i + 1) % n]],
        ]);
        idx.remove(i);
    }
    out.push([vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]]);
    Ok(out)
}

/// Region `{y : tau_lo <= y·theta <= tau_hi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    theta: Vec2,
    tau_lo: f64,
    tau_hi: f64,
}

impl Strip {
    pub fn new(theta: Vec2, tau_lo: f64, tau_hi: f64) -> Result<Self> {
        if (theta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "strip normal must be a unit vector, got {theta}"
            )));
        }
        if !tau_lo.is_finite() || !tau_hi.is_finite() || tau_lo > tau_hi {
            return Err(Error::invalid(format!(
                "strip offsets must be finite with tau_lo <= tau_hi, got [{tau_lo}, {tau_hi}]"
            )));
        }
        Ok(Self {
            theta,
            tau_lo,
            tau_hi,
        })
    }

    pub fn theta(&self) -> Vec2 {
        self.theta
    }

    pub fn tau_lo(&self) -> f64 {
        self.tau_lo
    }

    pub fn tau_hi(&self) -> f64 {
        self.tau_hi
    }

    pub fn width(&self) -> f64 {
        self.tau_hi - self.tau_lo
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let t = p.dot(self.theta);
        t >= self.tau_lo - tol && t <= self.tau_hi + tol
    }

    /// Whether `[tau_lo, tau_hi]` covers the other strip's interval (same normal assumed).
    pub fn covers(&self, other: &Strip) -> bool {
        self.tau_lo <= other.tau_lo && self.tau_hi >= other.tau_hi
    }
}

fn unit(theta: Vec2) -> Result<Vec2> {
    if (theta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "direction must be a unit vector, got {theta}"
        )));
    }
    Ok(theta)
}

/// Smallest strip with normal `theta` containing the shape.
pub fn true_strip(shape: &Shape, theta: Vec2) -> Result<Strip> {
    let theta = unit(theta)?;
    let (lo, hi) = match shape {
        Shape::Disc { center, radius } => {
            let c = center.dot(theta);
            (c - radius, c + radius)
        }
        _ => shape
            .outline()
            .iter()
            .map(|v| v.dot(theta))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t), hi.max(t))
            }),
    };
    Strip::new(theta, lo, hi)
}

/// Counterclockwise convex polygon; empty means the intersection was empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        if self.vertices.len() < 3 {
            0.0
        } else {
            signed_area(&self.vertices)
        }
    }

    /// Membership with tolerance: `p` is within `tol` of every edge's inner side.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            e.cross(p - a) / e.norm() >= -tol
        })
    }

    /// Sutherland–Hodgman step against `{p : normal·p <= offset}`.
    fn clip(&self, normal: Vec2, offset: f64) -> ConvexPolygon {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let dp = normal.dot(p) - offset;
            let dq = normal.dot(q) - offset;
            if dp <= 0.0 {
                out.push(p);
            }
            if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
                let t = dp / (dp - dq);
                out.push(p + (q - p) * t);
            }
        }
        ConvexPolygon { vertices: out }.cleaned()
    }

    fn cleaned(mut self) -> ConvexPolygon {
        let mut merged: Vec<Vec2> = Vec::with_capacity(self.vertices.len());
        for v in self.vertices.drain(..) {
            if merged.last().is_none_or(|last| last.dist(v) > MERGE_TOL) {
                merged.push(v);
            }
        }
        while merged.len() > 1 && merged[0].dist(*merged.last().unwrap()) <= MERGE_TOL {
            merged.pop();
        }
        if merged.len() < 3 || signed_area(&merged) <= MERGE_TOL * MERGE_TOL {
            return ConvexPolygon::empty();
        }
        ConvexPolygon { vertices: merged }
    }
}

/// Intersection of strips by incremental half-plane clipping.
pub fn intersect_strips(strips: &[Strip]) -> Result<ConvexPolygon> {
    if strips.len() < 2 {
        return Err(Error::Unbounded(format!(
            "need at least 2 strips, got {}",
            strips.len()
        )));
    }
    let independent = strips.iter().enumerate().any(|(i, a)| {
        strips[i + 1..]
            .iter()
            .any(|b| a.theta.cross(b.theta).abs() > 1e-12)
    });
    if !independent {
        return Err(Error::Unbounded(
            "strip normals are all parallel; the intersection is unbounded".into(),
        ));
    }
    let mut poly = ConvexPolygon {
        vertices: vec![
            Vec2::new(-CLIP_BOX, -CLIP_BOX),
            Vec2::new(CLIP_BOX, -CLIP_BOX),
            Vec2::new(CLIP_BOX, CLIP_BOX),
            Vec2::new(-CLIP_BOX, CLIP_BOX),
        ],
    };
    for s in strips {
        poly = poly.clip(s.theta, s.tau_hi);
        if poly.is_empty() {
            break;
        }
        poly = poly.clip(-s.theta, -s.tau_lo);
        if poly.is_empty() {
            break;
        }
    }
    Ok(poly)
}
