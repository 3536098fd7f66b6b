//! The planar N-center problem: centers, loops, arcs, and the discrete
//! action functional.
//!
//! A test particle moves in the field of `N` fixed attracting centers with
//! masses `m_j` at positions `c_j` and force exponent `α ∈ [1, 2)`:
//!
//! ```text
//! ẍ = ∇V(x),   V(x) = Σ_j m_j / (α |x − c_j|^α)
//! ```
//!
//! (`V` is the negative potential, so it is positive and blows up at each
//! center.) Periodic loops are discretized as closed polygons on a uniform
//! time grid; the action uses the exact kinetic energy of the piecewise
//! linear interpolant plus a per-segment midpoint rule for the potential,
//! which keeps the functional differentiable in the node positions and
//! second-order accurate.

use crate::geom::{self, Vec2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid center system: {0}")]
    InvalidSystem(String),
    #[error("evaluation at singularity: point coincides with center {index}")]
    Singularity { index: usize },
    #[error("collision in quadrature: segment {index} passes through center {center}")]
    CollisionInQuadrature { index: usize, center: usize },
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("arc has no velocities")]
    MissingVelocities,
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
}

/// Masses, fixed positions, and force exponent of the N centers.
#[derive(Debug, Clone)]
pub struct CenterSystem {
    masses: Vec<f64>,
    positions: Vec<Vec2>,
    alpha: f64,
}

impl CenterSystem {
    pub fn new(masses: Vec<f64>, positions: Vec<Vec2>, alpha: f64) -> Result<Self, ModelError> {
        if masses.is_empty() || masses.len() != positions.len() {
            return Err(ModelError::InvalidSystem(
                "need one mass per center, at least one center".into(),
            ));
        }
        if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(ModelError::InvalidSystem("masses must be strictly positive".into()));
        }
        if !(1.0..2.0).contains(&alpha) {
            return Err(ModelError::InvalidSystem(format!(
                "force exponent must lie in [1, 2), got {alpha}"
            )));
        }
        for (i, &p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(ModelError::InvalidSystem("non-finite center position".into()));
            }
            for &q in &positions[..i] {
                if (p - q).norm() == 0.0 {
                    return Err(ModelError::InvalidSystem(
                        "center positions must be pairwise distinct".into(),
                    ));
                }
            }
        }
        Ok(CenterSystem { masses, positions, alpha })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Smallest distance between two distinct centers; +∞ for a single center.
    pub fn min_spacing(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, &p) in self.positions.iter().enumerate() {
            for &q in &self.positions[..i] {
                best = best.min((p - q).norm());
            }
        }
        best
    }

    /// Scale used for relative tolerances: the center diameter, or 1 when the
    /// system has a single center (caller units carry no intrinsic scale).
    pub fn scale(&self) -> f64 {
        let d = geom::diameter(&self.positions);
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }

    /// Proximity threshold below which a curve is considered to hit a center.
    pub fn collision_epsilon(&self) -> f64 {
        1e-9 * self.scale()
    }
}

/// Closed polygonal discretization of a T-periodic loop.
///
/// Node `k` sits at time `t_k = -T/2 + k T/n`; node `n` is identified with
/// node `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicLoop {
    period: f64,
    nodes: Vec<Vec2>,
}

impl PeriodicLoop {
    pub fn new(period: f64, nodes: Vec<Vec2>) -> Result<Self, ModelError> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(ModelError::InvalidLoop("period must be positive".into()));
        }
        if nodes.len() < 3 {
            return Err(ModelError::InvalidLoop(format!(
                "need at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::InvalidLoop("non-finite node".into()));
        }
        Ok(PeriodicLoop { period, nodes })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.period / self.nodes.len() as f64
    }

    pub fn node(&self, k: usize) -> Vec2 {
        self.nodes[k % self.nodes.len()]
    }

    pub fn diameter(&self) -> f64 {
        geom::diameter(&self.nodes)
    }

    /// Minimum over nodes and segment interiors of the distance to any
    /// center, together with the index of the closest center.
    pub fn min_center_distance(&self, sys: &CenterSystem) -> (f64, usize) {
        let n = self.nodes.len();
        let mut best = (f64::INFINITY, 0);
        for k in 0..n {
            let a = self.nodes[k];
            let b = self.nodes[(k + 1) % n];
            for (j, &c) in sys.positions().iter().enumerate() {
                let d = geom::point_segment_distance(c, a, b);
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        best
    }

    /// True when the loop keeps a positive margin from every center.
    pub fn is_collision_free(&self, sys: &CenterSystem) -> bool {
        self.min_center_distance(sys).0 > sys.collision_epsilon()
    }

    /// Rotate the node indexing so that node `k` becomes node 0 (a time
    /// shift; every loop functional here is invariant under it).
    pub fn rotated(&self, k: usize) -> PeriodicLoop {
        let n = self.nodes.len();
        let nodes = (0..n).map(|i| self.nodes[(i + k) % n]).collect();
        PeriodicLoop { period: self.period, nodes }
    }

    /// Traverse the same polygon backwards.
    pub fn reversed(&self) -> PeriodicLoop {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        PeriodicLoop { period: self.period, nodes }
    }

    /// Double the node count by inserting segment midpoints (same polygon).
    pub fn refined(&self) -> PeriodicLoop {
        let n = self.nodes.len();
        let mut nodes = Vec::with_capacity(2 * n);
        for k in 0..n {
            let a = self.nodes[k];
            let b = self.nodes[(k + 1) % n];
            nodes.push(a);
            nodes.push((a + b) * 0.5);
        }
        PeriodicLoop { period: self.period, nodes }
    }

    /// Sample the loop as an open arc over one period with 4th-order
    /// central-difference velocities (cyclic stencil).
    pub fn to_arc(&self) -> OpenArc {
        let n = self.nodes.len();
        let dt = self.dt();
        let t0 = -0.5 * self.period;
        let times: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).collect();
        let mut points: Vec<Vec2> = (0..=n).map(|k| self.node(k)).collect();
        points[n] = points[0];
        let vel = |k: usize| {
            let m2 = self.node(k + n - 2);
            let m1 = self.node(k + n - 1);
            let p1 = self.node(k + 1);
            let p2 = self.node(k + 2);
            (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * dt)
        };
        let mut velocities: Vec<Vec2> = (0..=n).map(|k| vel(k % n)).collect();
        velocities[n] = velocities[0];
        OpenArc::new(times, points, Some(velocities)).expect("uniform grid is valid")
    }
}

/// Time-sampled open curve, optionally with velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenArc {
    times: Vec<f64>,
    points: Vec<Vec2>,
    velocities: Option<Vec<Vec2>>,
}

impl OpenArc {
    pub fn new(
        times: Vec<f64>,
        points: Vec<Vec2>,
        velocities: Option<Vec<Vec2>>,
    ) -> Result<Self, ModelError> {
        if times.len() != points.len() {
            return Err(ModelError::InvalidArc("times and points differ in length".into()));
        }
        if times.len() < 2 {
            return Err(ModelError::InvalidArc("need at least 2 samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ModelError::InvalidArc("times must be strictly increasing".into()));
        }
        if let Some(v) = &velocities {
            if v.len() != points.len() {
                return Err(ModelError::InvalidArc("velocities length mismatch".into()));
            }
        }
        Ok(OpenArc { times, points, velocities })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn velocities(&self) -> Option<&[Vec2]> {
        self.velocities.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear interpolation of position (and velocity when present) at `t`.
    /// Clamps to the arc ends.
    pub fn sample(&self, t: f64) -> (Vec2, Option<Vec2>) {
        let n = self.times.len();
        if t <= self.times[0] {
            return (self.points[0], self.velocities.as_ref().map(|v| v[0]));
        }
        if t >= self.times[n - 1] {
            return (self.points[n - 1], self.velocities.as_ref().map(|v| v[n - 1]));
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return (self.points[i], self.velocities.as_ref().map(|v| v[i])),
            Err(i) => i - 1,
        };
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        let p = self.points[i] + (self.points[i + 1] - self.points[i]) * w;
        let v = self
            .velocities
            .as_ref()
            .map(|v| v[i] + (v[i + 1] - v[i]) * w);
        (p, v)
    }

    /// Time of closest approach to `center` (sample-resolution, refined by
    /// quadratic interpolation of |x − c|²).
    pub fn closest_approach(&self, center: Vec2) -> (f64, f64) {
        let mut k_best = 0;
        let mut d_best = f64::INFINITY;
        for (k, &p) in self.points.iter().enumerate() {
            let d = (p - center).norm_sq();
            if d < d_best {
                d_best = d;
                k_best = k;
            }
        }
        let n = self.len();
        if k_best == 0 || k_best == n - 1 {
            return (self.times[k_best], d_best.sqrt());
        }
        // Quadratic fit of |x-c|^2 through the bracketing samples.
        let (t0, t1, t2) = (self.times[k_best - 1], self.times[k_best], self.times[k_best + 1]);
        let f0 = (self.points[k_best - 1] - center).norm_sq();
        let f1 = d_best;
        let f2 = (self.points[k_best + 1] - center).norm_sq();
        let h1 = t1 - t0;
        let h2 = t2 - t1;
        let denom = h2 * (f0 - f1) + h1 * (f2 - f1);
        if denom <= 0.0 {
            return (t1, f1.sqrt());
        }
        let t_star = t1 + 0.5 * (h2 * h2 * (f0 - f1) - h1 * h1 * (f2 - f1)) / denom;
        let a = ((f2 - f1) / h2 + (f0 - f1) / h1) / (h1 + h2);
        let b = ((f2 - f1) / h2 - (f0 - f1) / h1) * 0.5 + a * 0.5 * (h1 - h2);
        let f_star = (f1 + b * (t_star - t1) + a * (t_star - t1).powi(2)).max(0.0);
        (t_star, f_star.sqrt())
    }
}

/// Energy constant of an arc plus the observed drift around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub h: f64,
    pub max_drift: f64,
}

/// Negative potential V(p) = Σ m_j / (α |p − c_j|^α). Positive, blows up at
/// the centers.
pub fn potential(p: Vec2, sys: &CenterSystem) -> Result<f64, ModelError> {
    let alpha = sys.alpha();
    let mut v = 0.0;
    for (j, (&m, &c)) in sys.masses().iter().zip(sys.positions()).enumerate() {
        let r2 = (p - c).norm_sq();
        if r2 == 0.0 {
            return Err(ModelError::Singularity { index: j });
        }
        v += m / (alpha * r2.powf(0.5 * alpha));
    }
    Ok(v)
}

/// ∇V(p) = −Σ m_j (p − c_j) / |p − c_j|^{α+2}; the acceleration field.
pub fn grad_potential(p: Vec2, sys: &CenterSystem) -> Result<Vec2, ModelError> {
    let alpha = sys.alpha();
    let mut g = Vec2::ZERO;
    for (j, (&m, &c)) in sys.masses().iter().zip(sys.positions()).enumerate() {
        let d = p - c;
        let r2 = d.norm_sq();
        if r2 == 0.0 {
            return Err(ModelError::Singularity { index: j });
        }
        g -= d * (m / r2.powf(0.5 * (alpha + 2.0)));
    }
    Ok(g)
}

/// Lagrangian L(p, v) = |v|²/2 + V(p).
pub fn lagrangian(p: Vec2, v: Vec2, sys: &CenterSystem) -> Result<f64, ModelError> {
    Ok(0.5 * v.norm_sq() + potential(p, sys)?)
}

fn guard_segments(loop_: &PeriodicLoop, sys: &CenterSystem) -> Result<(), ModelError> {
    let n = loop_.len();
    let eps = 1e-9 * sys.scale().max(loop_.diameter());
    for k in 0..n {
        let a = loop_.node(k);
        let b = loop_.node(k + 1);
        for (j, &c) in sys.positions().iter().enumerate() {
            if geom::point_segment_distance(c, a, b) < eps {
                return Err(ModelError::CollisionInQuadrature { index: k, center: j });
            }
        }
    }
    Ok(())
}

/// Action of one period of the loop: exact kinetic energy of the piecewise
/// linear interpolant plus midpoint-rule potential per segment.
pub fn action(loop_: &PeriodicLoop, sys: &CenterSystem) -> Result<f64, ModelError> {
    guard_segments(loop_, sys)?;
    let n = loop_.len();
    let dt = loop_.dt();
    let mut acc = 0.0;
    for k in 0..n {
        let a = loop_.node(k);
        let b = loop_.node(k + 1);
        acc += (b - a).norm_sq() / (2.0 * dt);
        acc += dt * potential((a + b) * 0.5, sys)?;
    }
    Ok(acc)
}

/// Gradient of [`action`] with respect to the node positions.
pub fn action_gradient(loop_: &PeriodicLoop, sys: &CenterSystem) -> Result<Vec<Vec2>, ModelError> {
    guard_segments(loop_, sys)?;
    let n = loop_.len();
    let dt = loop_.dt();
    let mut grad = vec![Vec2::ZERO; n];
    for k in 0..n {
        let a = loop_.node(k);
        let b = loop_.node(k + 1);
        let kin = (a - b) / dt;
        grad[k] += kin;
        grad[(k + 1) % n] -= kin;
        let gm = grad_potential((a + b) * 0.5, sys)? * (0.5 * dt);
        grad[k] += gm;
        grad[(k + 1) % n] += gm;
    }
    Ok(grad)
}

/// Trapezoid-rule action of an open arc (velocities required).
pub fn arc_action(arc: &OpenArc, sys: &CenterSystem) -> Result<f64, ModelError> {
    let vels = arc.velocities().ok_or(ModelError::MissingVelocities)?;
    let t = arc.times();
    let mut lag = Vec::with_capacity(arc.len());
    for (&p, &v) in arc.points().iter().zip(vels) {
        lag.push(lagrangian(p, v, sys)?);
    }
    let mut acc = 0.0;
    for k in 0..arc.len() - 1 {
        acc += 0.5 * (lag[k] + lag[k + 1]) * (t[k + 1] - t[k]);
    }
    Ok(acc)
}

/// Energy h = |ẋ|²/2 − V(x) along an arc; `h` is the median sample value and
/// `max_drift` the largest deviation from it.
pub fn energy(arc: &OpenArc, sys: &CenterSystem) -> Result<EnergyRecord, ModelError> {
    let vels = arc.velocities().ok_or(ModelError::MissingVelocities)?;
    let mut samples = Vec::with_capacity(arc.len());
    for (&p, &v) in arc.points().iter().zip(vels) {
        samples.push(0.5 * v.norm_sq() - potential(p, sys)?);
    }
    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let max_drift = samples.iter().map(|&e| (e - h).abs()).fold(0.0, f64::max);
    Ok(EnergyRecord { h, max_drift })
}

/// Max residual |ẍ − ∇V(x)| over interior samples, with ẍ from central
/// finite differences (nonuniform-grid safe). Acceleration units.
pub fn eom_residual(arc: &OpenArc, sys: &CenterSystem) -> Result<f64, ModelError> {
    let n = arc.len();
    if n < 3 {
        return Err(ModelError::TooFewSamples(n));
    }
    let t = arc.times();
    let x = arc.points();
    let mut worst = 0.0f64;
    for k in 1..n - 1 {
        let h1 = t[k] - t[k - 1];
        let h2 = t[k + 1] - t[k];
        let acc = ((x[k + 1] - x[k]) / h2 - (x[k] - x[k - 1]) / h1) * (2.0 / (h1 + h2));
        let g = grad_potential(x[k], sys)?;
        worst = worst.max((acc - g).norm());
    }
    Ok(worst)
}

/// Periodic version of [`eom_residual`]: every node is interior.
pub fn eom_residual_loop(loop_: &PeriodicLoop, sys: &CenterSystem) -> Result<f64, ModelError> {
    let n = loop_.len();
    let dt = loop_.dt();
    let mut worst = 0.0f64;
    for k in 0..n {
        let acc = (loop_.node(k + n - 1) - loop_.node(k) * 2.0 + loop_.node(k + 1)) / (dt * dt);
        let g = grad_potential(loop_.node(k), sys)?;
        worst = worst.max((acc - g).norm());
    }
    Ok(worst)
}

/// Uniformly sampled circle, CCW for `turns > 0`; `turns` full revolutions
/// per period. Shared by many fixtures.
pub fn circle_loop(center: Vec2, radius: f64, n: usize, period: f64, turns: i32) -> PeriodicLoop {
    let nodes = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * turns as f64 * k as f64 / n as f64;
            center + Vec2::from_angle(th) * radius
        })
        .collect();
    PeriodicLoop::new(period, nodes).expect("valid circle")
}
