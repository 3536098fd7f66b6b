//! Plane geometry primitives shared by every module.
//!
//! Positions live in ℝ² ≅ ℂ. `Vec2` carries both the vector-space operations
//! and the complex product/conjugate used by the Levi-Civita coordinates.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `theta` from the positive x-axis.
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Scalar (z-component of the) cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n == 0.0 {
            Vec2::ZERO
        } else {
            self / n
        }
    }

    /// Complex product, reading (x, y) as x + iy.
    pub fn cmul(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)
    }

    /// Complex conjugate.
    pub fn conj(self) -> Vec2 {
        Vec2::new(self.x, -self.y)
    }

    /// Principal complex square root (argument in (-π/2, π/2]).
    pub fn csqrt(self) -> Vec2 {
        let r = self.norm();
        if r == 0.0 {
            return Vec2::ZERO;
        }
        let half = 0.5 * self.angle();
        Vec2::from_angle(half) * r.sqrt()
    }

    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { a: 0.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    /// u vᵀ outer product.
    pub fn outer(u: Vec2, v: Vec2) -> Mat2 {
        Mat2::new(u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y)
    }

    pub fn scale(s: f64) -> Mat2 {
        Mat2::new(s, 0.0, 0.0, s)
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn mul_mat(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }
}

impl std::ops::Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl std::ops::Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl std::ops::Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

/// Distance from point `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(d) / len_sq).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Transverse intersection of two open segments.
///
/// Returns the parameters `(s, u)` along each segment together with the
/// intersection point when the segments cross strictly in their interiors
/// (no tolerance applied here; callers impose their own genericity margin).
pub fn segment_intersection(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> Option<(f64, f64, Vec2)> {
    let r = p2 - p1;
    let w = q2 - q1;
    let denom = r.cross(w);
    if denom == 0.0 {
        return None;
    }
    let diff = q1 - p1;
    let s = diff.cross(w) / denom;
    let u = diff.cross(r) / denom;
    if s > 0.0 && s < 1.0 && u > 0.0 && u < 1.0 {
        Some((s, u, p1 + r * s))
    } else {
        None
    }
}

/// Total signed angle swept by the polygon `nodes` (closed cyclically) around
/// `center`, in radians. An exact multiple of 2π for closed polygons.
pub fn total_turning_about(nodes: &[Vec2], center: Vec2) -> f64 {
    let n = nodes.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = nodes[k] - center;
        let b = nodes[(k + 1) % n] - center;
        total += a.cross(b).atan2(a.dot(b));
    }
    total
}

/// Shoelace area of the closed polygon (signed; CCW positive).
pub fn polygon_area(nodes: &[Vec2]) -> f64 {
    let n = nodes.len();
    let mut acc = 0.0;
    for k in 0..n {
        acc += nodes[k].cross(nodes[(k + 1) % n]);
    }
    0.5 * acc
}

/// Diameter (max pairwise distance) of a point set; 0 for fewer than 2 points.
pub fn diameter(points: &[Vec2]) -> f64 {
    let mut best = 0.0f64;
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            best = best.max((p - q).norm());
        }
    }
    best
}
