//! The Kepler-type (one-center) problem.
//!
//! Zero-energy parabolic collision-ejection solutions, λ-rescaling and
//! blow-up diagnostics, the Maupertuis functional and its correspondence
//! with fixed-energy solutions, obstacle minimization outside a disk, the
//! closed-form angular sweep of grazing arcs, and the fixed-end action
//! comparison against the ejection.
//!
//! Throughout, the center sits at the origin with negative potential
//! `V̄(x) = m₁/(α|x|^α)`.
//!
//! ### Closed forms
//!
//! The parabolic ejection `x̄(t) = (μ|t|)^{2/(2+α)} e^{iφ±}` with
//! `μ = (α+2)√(m₁/(2α))` has zero energy, so its Lagrangian is `|ẋ̄|²` and
//!
//! ```text
//! Ā([-T,T]; x̄) = 8 μ^{4/(2+α)} T^{(2-α)/(2+α)} / ((2+α)(2-α)),
//! ```
//!
//! obtained by integrating `|ẋ̄|² = (2/(2+α))² μ^{4/(2+α)} t^{-2α/(2+α)}`
//! over both half-axes (cross-checked against quadrature in the tests).
//!
//! A zero-energy arc grazing the disk of radius ρ with angular momentum
//! pinned by the contact circle sweeps, between radius ρ and r*,
//!
//! ```text
//! Δθ(ρ, r*) = 2/(2-α) · (π/2 − arcsin((ρ/r*)^{(2-α)/2})),
//! ```
//!
//! the closed form of ∫ (J/r²)/√(2m₁/(ω²αr^α) − J²/r²) dr after the
//! substitutions ξ = ρ/r and ξ = η^{2/(2-α)} (both the mass and ω cancel).

use crate::geom::{Mat2, Vec2};
use crate::model::{CenterSystem, ModelError, OpenArc};
use crate::numeric::{self, LineFit};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KeplerError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible obstacle: radius {rho} reaches past the endpoint radius {r_endpoint}")]
    InfeasibleObstacle { rho: f64, r_endpoint: f64 },
    #[error("potential-plus-h integral is nonpositive; omega undefined")]
    NonpositivePotentialIntegral,
    #[error("arc is not a critical point (gradient residual {residual:.3e} > {tol:.3e})")]
    NotCritical { residual: f64, tol: f64 },
    #[error("arc has no collision with the origin")]
    NoCollision,
    #[error("minimization failed: {0}")]
    Minimization(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Zero-energy collision-ejection solution of the one-center problem:
/// collision ray at angle `phi_minus` (t ≤ 0), ejection ray at `phi_plus`
/// (t ≥ 0), radius `(μ|t|)^{2/(α+2)}`.
#[derive(Debug, Clone, Copy)]
pub struct ParabolicEjection {
    m1: f64,
    alpha: f64,
    phi_minus: f64,
    phi_plus: f64,
}

impl ParabolicEjection {
    pub fn new(m1: f64, alpha: f64, phi_minus: f64, phi_plus: f64) -> Result<Self, KeplerError> {
        if !(m1 > 0.0) {
            return Err(KeplerError::InvalidParameter("mass must be positive".into()));
        }
        if !(1.0..2.0).contains(&alpha) {
            return Err(KeplerError::InvalidParameter(format!(
                "force exponent must lie in [1, 2), got {alpha}"
            )));
        }
        if (phi_plus - phi_minus).abs() > 2.0 * std::f64::consts::PI + 1e-12 {
            return Err(KeplerError::InvalidParameter(
                "|phi_plus - phi_minus| must not exceed 2π".into(),
            ));
        }
        Ok(ParabolicEjection { m1, alpha, phi_minus, phi_plus })
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi_minus(&self) -> f64 {
        self.phi_minus
    }

    pub fn phi_plus(&self) -> f64 {
        self.phi_plus
    }

    /// μ = (α+2)·√(m₁/2α); the radial amplitude making the energy zero.
    pub fn mu(&self) -> f64 {
        (self.alpha + 2.0) * (self.m1 / (2.0 * self.alpha)).sqrt()
    }

    /// |x̄(t)| = (μ|t|)^{2/(α+2)}.
    pub fn radius(&self, t: f64) -> f64 {
        (self.mu() * t.abs()).powf(2.0 / (self.alpha + 2.0))
    }

    /// x̄(t); the origin at t = 0.
    pub fn point(&self, t: f64) -> Vec2 {
        let phi = if t >= 0.0 { self.phi_plus } else { self.phi_minus };
        Vec2::from_angle(phi) * self.radius(t)
    }

    /// ẋ̄(t); undefined at the collision instant.
    pub fn velocity(&self, t: f64) -> Option<Vec2> {
        if t == 0.0 {
            return None;
        }
        let mu = self.mu();
        let e = 2.0 / (self.alpha + 2.0);
        let speed = e * mu * (mu * t.abs()).powf(e - 1.0);
        let phi = if t > 0.0 { self.phi_plus } else { self.phi_minus };
        Some(Vec2::from_angle(phi) * speed * t.signum())
    }

    /// Sample [-T, T] on a grid geometric towards the collision, with
    /// analytic velocities; the t = 0 sample is excluded.
    pub fn sample_geometric(&self, t_max: f64, t_min: f64, per_decade: usize) -> OpenArc {
        let decades = (t_max / t_min).log10();
        let m = (decades * per_decade as f64).ceil() as usize + 1;
        let mut ts: Vec<f64> = (0..m)
            .map(|k| t_min * (t_max / t_min).powf(k as f64 / (m - 1) as f64))
            .collect();
        let mut times: Vec<f64> = ts.iter().rev().map(|&t| -t).collect();
        times.append(&mut ts);
        let points = times.iter().map(|&t| self.point(t)).collect();
        let velocities = times.iter().map(|&t| self.velocity(t).unwrap()).collect();
        OpenArc::new(times, points, Some(velocities)).expect("geometric grid is valid")
    }

    /// The one-center system this ejection solves.
    pub fn system(&self) -> CenterSystem {
        CenterSystem::new(vec![self.m1], vec![Vec2::ZERO], self.alpha).expect("valid one-center")
    }
}

/// Closed-form action of the ejection on [-T, T].
pub fn ejection_action(pe: &ParabolicEjection, t_half: f64) -> Result<f64, KeplerError> {
    if !(t_half > 0.0) {
        return Err(KeplerError::InvalidParameter("T must be positive".into()));
    }
    let a = pe.alpha;
    let mu = pe.mu();
    Ok(8.0 * mu.powf(4.0 / (2.0 + a)) * t_half.powf((2.0 - a) / (2.0 + a))
        / ((2.0 + a) * (2.0 - a)))
}

/// λ-rescale about `center`: t ↦ t/λ, x ↦ λ^{-2/(2+α)}(x − c) + c,
/// ẋ ↦ λ^{α/(2+α)} ẋ. Parabolic ejections are fixed points.
pub fn lambda_rescale(arc: &OpenArc, lambda: f64, center: Vec2, alpha: f64) -> OpenArc {
    assert!(lambda > 0.0, "lambda must be positive");
    let space = lambda.powf(-2.0 / (2.0 + alpha));
    let vel = lambda.powf(alpha / (2.0 + alpha));
    let times = arc.times().iter().map(|&t| t / lambda).collect();
    let points = arc.points().iter().map(|&p| (p - center) * space + center).collect();
    let velocities = arc.velocities().map(|vs| vs.iter().map(|&v| v * vel).collect());
    OpenArc::new(times, points, velocities).expect("rescale preserves validity")
}

/// Centers of the λ-rescaled N-center problem (blown up about center `k`).
pub fn rescale_system(sys: &CenterSystem, lambda: f64, k: usize) -> CenterSystem {
    let space = lambda.powf(-2.0 / (2.0 + sys.alpha()));
    let ck = sys.positions()[k];
    let positions = sys.positions().iter().map(|&c| (c - ck) * space + ck).collect();
    CenterSystem::new(sys.masses().to_vec(), positions, sys.alpha())
        .expect("rescale keeps validity")
}

/// Measured action-scaling law under λ-rescaling: fits
/// `log(A^λ(x_λ)/A(x))` against `log λ` over the given ladder and reports
/// the fit together with the two candidate exponents.
#[derive(Debug, Clone)]
pub struct RescaleLaw {
    pub fit: LineFit,
    /// −(2−α)/(2+α), obtained by substituting the rescaling into both
    /// action terms.
    pub exponent_derived: f64,
    /// −2/(2+α), the alternative stated alongside the rescaling lemma.
    pub exponent_stated: f64,
    pub ratios: Vec<(f64, f64)>,
}

pub fn measure_rescale_law(
    arc: &OpenArc,
    sys: &CenterSystem,
    k: usize,
    lambdas: &[f64],
) -> Result<RescaleLaw, KeplerError> {
    let a0 = crate::model::arc_action(arc, sys)?;
    let alpha = sys.alpha();
    let mut ratios = Vec::with_capacity(lambdas.len());
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &lam in lambdas {
        let arc_l = lambda_rescale(arc, lam, sys.positions()[k], alpha);
        let sys_l = rescale_system(sys, lam, k);
        let al = crate::model::arc_action(&arc_l, &sys_l)?;
        ratios.push((lam, al / a0));
        lx.push(lam.ln());
        ly.push((al / a0).ln());
    }
    let fit = numeric::fit_line(&lx, &ly);
    Ok(RescaleLaw {
        fit,
        exponent_derived: -(2.0 - alpha) / (2.0 + alpha),
        exponent_stated: -2.0 / (2.0 + alpha),
        ratios,
    })
}

/// One row of a blow-up convergence table.
#[derive(Debug, Clone, Copy)]
pub struct BlowupRow {
    pub lambda: f64,
    /// sup |y_λ(t) − ȳ(t)| over [-T, T].
    pub position_dist: f64,
    /// sup |ẏ_λ(t) − ẏ̄(t)| over T/4 ≤ |t| ≤ T.
    pub velocity_dist: f64,
}

/// Compare λ-rescales of a collision arc against the parabolic ejection:
/// positions on [-T, T], velocities away from the collision instant.
pub fn blowup_convergence(
    y: &OpenArc,
    pe: &ParabolicEjection,
    lambdas: &[f64],
) -> Result<Vec<BlowupRow>, KeplerError> {
    let (_, d_min) = y.closest_approach(Vec2::ZERO);
    let span = y.times().last().unwrap().min(-y.times()[0]);
    if d_min > 1e-3 * pe.radius(span) {
        return Err(KeplerError::NoCollision);
    }
    let lam_max = lambdas.iter().fold(0.0f64, |a, &b| a.max(b));
    if lam_max <= 0.0 {
        return Err(KeplerError::InvalidParameter("need positive lambdas".into()));
    }
    let t_max = 0.9 * span / lam_max;
    let alpha = pe.alpha;
    let vels = y.velocities();
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let space = lam.powf(-2.0 / (2.0 + alpha));
        let velf = lam.powf(alpha / (2.0 + alpha));
        // Supremum over the arc's own samples landing in the window; the
        // rescale is evaluated exactly (no interpolation), so a fixed point
        // reports zero.
        let mut pos_dist = 0.0f64;
        let mut vel_dist = 0.0f64;
        for (k, &tk) in y.times().iter().enumerate() {
            let t = tk / lam;
            if t.abs() > t_max || t == 0.0 {
                continue;
            }
            let p_l = y.points()[k] * space;
            pos_dist = pos_dist.max((p_l - pe.point(t)).norm());
            if t.abs() >= 0.25 * t_max {
                if let (Some(vs), Some(vbar)) = (vels, pe.velocity(t)) {
                    vel_dist = vel_dist.max((vs[k] * velf - vbar).norm());
                }
            }
        }
        rows.push(BlowupRow { lambda: lam, position_dist: pos_dist, velocity_dist: vel_dist });
    }
    Ok(rows)
}

/// Maupertuis functional value M̄_h = (∫|ẋ|²/2)·(∫ V̄ + h) with the time
/// rescaling factor ω² = ∫(V̄+h)/∫|ẋ|²/2.
#[derive(Debug, Clone, Copy)]
pub struct MaupertuisRecord {
    pub value: f64,
    pub omega: f64,
    pub h: f64,
}

fn kinetic_potential_integrals(
    arc: &OpenArc,
    h: f64,
    m1: f64,
    alpha: f64,
) -> Result<(f64, f64), KeplerError> {
    let t = arc.times();
    let n = arc.len();
    let vels: Vec<Vec2> = match arc.velocities() {
        Some(v) => v.to_vec(),
        None => central_velocities(arc),
    };
    let mut kin = 0.0;
    let mut pot = 0.0;
    for k in 0..n - 1 {
        let dt = t[k + 1] - t[k];
        kin += 0.25 * (vels[k].norm_sq() + vels[k + 1].norm_sq()) * dt;
        let va = bar_potential(arc.points()[k], m1, alpha)?;
        let vb = bar_potential(arc.points()[k + 1], m1, alpha)?;
        pot += 0.5 * ((va + h) + (vb + h)) * dt;
    }
    Ok((kin, pot))
}

fn bar_potential(p: Vec2, m1: f64, alpha: f64) -> Result<f64, KeplerError> {
    let r = p.norm();
    if r == 0.0 {
        return Err(KeplerError::InvalidParameter("arc touches the origin".into()));
    }
    Ok(m1 / (alpha * r.powf(alpha)))
}

fn grad_bar_potential(p: Vec2, m1: f64, alpha: f64) -> Vec2 {
    let r2 = p.norm_sq();
    -p * (m1 / r2.powf(0.5 * (alpha + 2.0)))
}

fn central_velocities(arc: &OpenArc) -> Vec<Vec2> {
    let t = arc.times();
    let x = arc.points();
    let n = arc.len();
    let mut v = vec![Vec2::ZERO; n];
    for k in 0..n {
        if k == 0 {
            v[k] = (x[1] - x[0]) / (t[1] - t[0]);
        } else if k == n - 1 {
            v[k] = (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2]);
        } else {
            v[k] = (x[k + 1] - x[k - 1]) / (t[k + 1] - t[k - 1]);
        }
    }
    v
}

pub fn maupertuis(
    arc: &OpenArc,
    h: f64,
    m1: f64,
    alpha: f64,
) -> Result<MaupertuisRecord, KeplerError> {
    let (kin, pot) = kinetic_potential_integrals(arc, h, m1, alpha)?;
    if pot <= 0.0 {
        return Err(KeplerError::NonpositivePotentialIntegral);
    }
    Ok(MaupertuisRecord { value: kin * pot, omega: (pot / kin).sqrt(), h })
}

/// Map a critical point of M̄_h to a solution arc of the one-center problem
/// with energy h: x(t) := y(ωt). Rejects arcs whose discrete M̄ gradient is
/// not small (relative residual above `tol`).
pub fn maupertuis_to_solution(
    arc: &OpenArc,
    record: &MaupertuisRecord,
    m1: f64,
    alpha: f64,
    tol: f64,
) -> Result<OpenArc, KeplerError> {
    let residual = maupertuis_gradient_residual(arc, record.h, m1, alpha)?;
    if residual > tol {
        return Err(KeplerError::NotCritical { residual, tol });
    }
    let omega = record.omega;
    let times = arc.times().iter().map(|&t| t / omega).collect();
    let points = arc.points().to_vec();
    let vels: Vec<Vec2> = match arc.velocities() {
        Some(v) => v.to_vec(),
        None => quartic_velocities(arc),
    };
    let velocities = vels.into_iter().map(|v| v * omega).collect();
    Ok(OpenArc::new(times, points, Some(velocities)).expect("time rescale keeps validity"))
}

/// 4th-order central-difference velocities on a uniform grid (one-sided at
/// the ends, second-order there).
fn quartic_velocities(arc: &OpenArc) -> Vec<Vec2> {
    let t = arc.times();
    let x = arc.points();
    let n = arc.len();
    if n < 5 {
        return central_velocities(arc);
    }
    let dt = t[1] - t[0];
    let mut v = central_velocities(arc);
    for k in 2..n - 2 {
        v[k] = (x[k - 2] - x[k + 2] + (x[k + 1] - x[k - 1]) * 8.0) / (12.0 * dt);
    }
    v
}

/// Max norm of the discrete M̄ gradient over interior nodes, relative to a
/// per-node scale; 0 at an exact discrete critical point.
fn maupertuis_gradient_residual(
    arc: &OpenArc,
    h: f64,
    m1: f64,
    alpha: f64,
) -> Result<f64, KeplerError> {
    let (kin, pot) = kinetic_potential_integrals(arc, h, m1, alpha)?;
    let t = arc.times();
    let x = arc.points();
    let n = arc.len();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for k in 1..n - 1 {
        let dt_m = t[k] - t[k - 1];
        let dt_p = t[k + 1] - t[k];
        let gk = (x[k] - x[k - 1]) / dt_m - (x[k + 1] - x[k]) / dt_p;
        let gu = grad_bar_potential(x[k], m1, alpha) * (0.5 * (dt_m + dt_p));
        let g = gk * pot + gu * kin;
        worst = worst.max(g.norm());
        scale = scale.max((gk * pot).norm().max((gu * kin).norm()));
    }
    Ok(worst / scale.max(1e-300))
}

/// Obstacle problem data: arcs on [-T, T] pinned to the ejection endpoints,
/// constrained to stay outside the disk of radius `rho`.
#[derive(Debug, Clone, Copy)]
pub struct ObstacleSpec {
    pub rho: f64,
    pub rho_bar: Option<f64>,
    pub t_half: f64,
}

impl ObstacleSpec {
    pub fn new(rho: f64, rho_bar: Option<f64>, t_half: f64) -> Result<Self, KeplerError> {
        if rho < 0.0 || !(t_half > 0.0) {
            return Err(KeplerError::InvalidParameter("rho ≥ 0 and T > 0 required".into()));
        }
        if let Some(rb) = rho_bar {
            if rb <= rho {
                return Err(KeplerError::InvalidParameter("rho_bar must exceed rho".into()));
            }
        }
        Ok(ObstacleSpec { rho, rho_bar, t_half })
    }
}

#[derive(Debug, Clone)]
pub struct ObstacleOutcome {
    pub arc: OpenArc,
    pub record: MaupertuisRecord,
    /// Node-index range of the contact set {|x| ≤ ρ(1+1e-8)}, when nonempty.
    pub contact: Option<(usize, usize)>,
    /// True when the contact nodes form one contiguous run.
    pub contact_single_interval: bool,
    /// Discrete angular momentum per segment, x_k × x_{k+1} / Δt.
    pub angular_momentum: Vec<f64>,
    /// Contact-circle angular momentum √(2m₁/(ω²α)) ρ^{(2-α)/2}.
    pub contact_momentum: f64,
    pub iterations: usize,
    pub grad_residual: f64,
}

/// Minimize M̄₀ over discrete arcs with the ejection's endpoints and total
/// winding φ₊ − φ₋, outside the disk of radius ρ (projected preconditioned
/// descent).
pub fn obstacle_minimize(
    spec: &ObstacleSpec,
    pe: &ParabolicEjection,
    n: usize,
) -> Result<ObstacleOutcome, KeplerError> {
    let t_half = spec.t_half;
    let r_end = pe.radius(t_half);
    if spec.rho > r_end * (1.0 + 1e-12) {
        return Err(KeplerError::InfeasibleObstacle { rho: spec.rho, r_endpoint: r_end });
    }
    let dphi = pe.phi_plus - pe.phi_minus;
    if dphi.abs() == 0.0 {
        return Err(KeplerError::InvalidParameter(
            "need a nonzero endpoint angle gap for the obstacle sweep".into(),
        ));
    }

    let seed = seeded_sweep_arc(pe, t_half, n, spec.rho.max(0.15 * r_end));
    let functional = Maupertuis0 { m1: pe.m1, alpha: pe.alpha };
    let mut sol = project_descent(&functional, seed, t_half, spec.rho, 6_000, 1e-6)?;
    let dt_grid = 2.0 * t_half / n as f64;
    sol.grad_residual = newton_polish(&functional, &mut sol.points, dt_grid, spec.rho);

    let points = sol.points;
    let dt = 2.0 * t_half / n as f64;
    let times: Vec<f64> = (0..=n).map(|k| -t_half + k as f64 * dt).collect();
    let arc = OpenArc::new(times, points.clone(), None).expect("grid valid");
    let record = maupertuis(&arc, 0.0, pe.m1, pe.alpha)?;

    // Contact set and discrete angular momentum.
    let contact_tol = spec.rho * (1.0 + 1e-8);
    let flags: Vec<bool> = points.iter().map(|p| p.norm() <= contact_tol).collect();
    let first = flags.iter().position(|&f| f);
    let last = flags.iter().rposition(|&f| f);
    let contact = match (first, last) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let contact_single_interval = match contact {
        Some((a, b)) => flags[a..=b].iter().all(|&f| f),
        None => true,
    };
    let angular_momentum: Vec<f64> =
        (0..n).map(|k| points[k].cross(points[k + 1]) / dt).collect();
    let contact_momentum = (2.0 * pe.m1 / (record.omega * record.omega * pe.alpha)).sqrt()
        * spec.rho.powf(0.5 * (2.0 - pe.alpha));

    Ok(ObstacleOutcome {
        arc,
        record,
        contact,
        contact_single_interval,
        angular_momentum,
        contact_momentum,
        iterations: sol.iterations,
        grad_residual: sol.grad_residual,
    })
}

/// Exact off-contact angle swept by a zero-energy grazing arc from radius
/// ρ to r*: `2/(2-α) (π/2 − arcsin((ρ/r*)^{(2-α)/2}))`.
pub fn angular_sweep(rho: f64, r_star: f64, alpha: f64) -> Result<f64, KeplerError> {
    if !(rho > 0.0) || rho > r_star {
        return Err(KeplerError::InvalidParameter(format!(
            "need 0 < rho ≤ r_star, got rho={rho}, r_star={r_star}"
        )));
    }
    if !(1.0..2.0).contains(&alpha) {
        return Err(KeplerError::InvalidParameter("alpha must lie in [1, 2)".into()));
    }
    let eta = (rho / r_star).powf(0.5 * (2.0 - alpha));
    Ok(2.0 / (2.0 - alpha) * (std::f64::consts::FRAC_PI_2 - eta.asin()))
}

/// Numerically integrate dθ/dr = (J/r²)/√(2m₁/(αr^α) − J²/r²) from ρ to r*
/// with J pinned at the contact-circle value. The mass enters the integrand
/// and cancels; the integrable endpoint singularity at r = ρ is removed by
/// the substitution r = ρ + u².
pub fn grazing_arc_sweep_numeric(
    rho: f64,
    r_star: f64,
    alpha: f64,
    m1: f64,
) -> Result<f64, KeplerError> {
    if !(rho > 0.0) || rho > r_star {
        return Err(KeplerError::InvalidParameter(format!(
            "need 0 < rho ≤ r_star, got rho={rho}, r_star={r_star}"
        )));
    }
    if rho == r_star {
        return Ok(0.0);
    }
    let k = (2.0 * m1 / alpha).sqrt();
    let j = k * rho.powf(0.5 * (2.0 - alpha));
    let f = |u: f64| {
        let r = rho + u * u;
        // r^{2-α} − ρ^{2-α}, cancellation-free near the contact radius.
        let d = rho.powf(2.0 - alpha) * ((2.0 - alpha) * (u * u / rho).ln_1p()).exp_m1();
        (j / r) * 2.0 * u / (k * d.sqrt())
    };
    Ok(numeric::integrate_adaptive(&f, 0.0, (r_star - rho).sqrt(), 1e-12))
}

/// Extrapolated ρ→0 limit of the total (both-sided) grazing sweep,
/// estimated from a geometric ρ ladder ending at `rho_floor · r_star`. The
/// limit is the class threshold 2π/(2−α).
///
/// The sweep behaves like `L − Σ_k c_k ρ^{(2k+1)p}` with `p = (2−α)/2`
/// (arcsin series in `η = (ρ/r*)^p`); four ladder points eliminate the
/// first three correction terms exactly.
pub fn total_sweep_limit(alpha: f64, r_star: f64, rho_floor: f64) -> Result<f64, KeplerError> {
    let p = 0.5 * (2.0 - alpha);
    let rhos = [64.0, 16.0, 4.0, 1.0].map(|f| rho_floor * r_star * f);
    let mut m = [[0.0f64; 4]; 4];
    let mut rhs = [0.0f64; 4];
    for (i, &rho) in rhos.iter().enumerate() {
        let u = (rho / r_star).powf(p);
        m[i] = [1.0, u, u.powi(3), u.powi(5)];
        rhs[i] = 2.0 * angular_sweep(rho, r_star, alpha)?;
    }
    // Gaussian elimination with partial pivoting on the 4×4 system.
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        if m[col][col] == 0.0 {
            return Err(KeplerError::Minimization("singular sweep extrapolation".into()));
        }
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for c2 in col..4 {
                m[row][c2] -= f * m[col][c2];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut sol = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut acc = rhs[row];
        for c2 in row + 1..4 {
            acc -= m[row][c2] * sol[c2];
        }
        sol[row] = acc / m[row][row];
    }
    Ok(sol[0])
}

#[derive(Debug, Clone)]
pub struct FixedEndOutcome {
    pub arc: OpenArc,
    pub action: f64,
    pub ejection_action: f64,
    /// (Ā(x̄) − Ā(γ)) / Ā(x̄).
    pub margin: f64,
    pub iterations: usize,
    pub grad_residual: f64,
}

/// Minimize the fixed-time action over arcs with the ejection's endpoints
/// and endpoint arguments, avoiding the origin; several deterministic
/// periapsis seeds, best kept.
pub fn fixed_end_minimize(
    pe: &ParabolicEjection,
    t_half: f64,
    n: usize,
) -> Result<FixedEndOutcome, KeplerError> {
    let r_end = pe.radius(t_half);
    let functional = FixedTimeAction { m1: pe.m1, alpha: pe.alpha };
    let dt = 2.0 * t_half / n as f64;
    let mut best: Option<(f64, DescentResult)> = None;
    for frac in [0.12, 0.25, 0.45, 0.65] {
        let seed = seeded_sweep_arc(pe, t_half, n, frac * r_end);
        let mut sol = match project_descent(&functional, seed, t_half, 0.0, 6_000, 1e-6) {
            Ok(s) => s,
            Err(_) => continue,
        };
        sol.grad_residual = newton_polish(&functional, &mut sol.points, dt, 0.0);
        let a = functional.eval(&sol.points, dt);
        if a.is_finite() && best.as_ref().map_or(true, |(ab, _)| a < *ab) {
            best = Some((a, sol));
        }
    }
    let (action, sol) =
        best.ok_or_else(|| KeplerError::Minimization("all fixed-end seeds failed".into()))?;
    let times: Vec<f64> = (0..=n).map(|k| -t_half + k as f64 * dt).collect();
    let arc = OpenArc::new(times, sol.points.clone(), None).expect("grid valid");
    let ea = ejection_action(pe, t_half)?;
    Ok(FixedEndOutcome {
        arc,
        action,
        ejection_action: ea,
        margin: (ea - action) / ea,
        iterations: sol.iterations,
        grad_residual: sol.grad_residual,
    })
}

// ---------------------------------------------------------------------------
// Discrete functionals and the projected preconditioned descent they share.

trait ArcFunctional {
    /// Value over the node set (endpoints included).
    fn eval(&self, x: &[Vec2], dt: f64) -> f64;
    /// Gradient at interior nodes (entries 1..n-1 used).
    fn grad(&self, x: &[Vec2], dt: f64, out: &mut [Vec2]);
    /// Scale of the Laplacian block (initial step sizing).
    fn stiffness(&self, x: &[Vec2], dt: f64) -> f64;
    /// Scalar coupling shared by all node equations (kinetic/potential
    /// ratio for the Maupertuis functional); recomputed once per sweep.
    fn context(&self, x: &[Vec2], dt: f64) -> f64;
    /// Discrete Euler–Lagrange residual at node k, in length units:
    /// `x_{k+1} − 2x_k + x_{k−1} − (force term)·Δt²`; zero at a critical
    /// point.
    fn el_residual(&self, x: &[Vec2], dt: f64, c: f64, k: usize) -> Vec2;
    /// Jacobian blocks of `el_residual` w.r.t. x_{k−1}, x_k, x_{k+1}.
    fn el_jacobian(&self, x: &[Vec2], dt: f64, c: f64, k: usize) -> (Mat2, Mat2, Mat2);
}

/// Hessian of V̄: −m[ r^{−(α+2)} I − (α+2) r^{−(α+4)} x xᵀ ].
fn hess_bar_potential(p: Vec2, m1: f64, alpha: f64) -> Mat2 {
    let r2 = p.norm_sq();
    let s = m1 / r2.powf(0.5 * (alpha + 2.0));
    Mat2::outer(p, p) * ((alpha + 2.0) * s / r2) - Mat2::scale(s)
}

/// M̄₀ = K·U with exact piecewise-linear kinetic energy and nodal trapezoid
/// potential. The nodal rule makes the discrete angular momentum
/// x_k × x_{k+1}/Δt exactly conserved at interior critical points (central
/// force), the discrete analogue of constancy off the contact set.
struct Maupertuis0 {
    m1: f64,
    alpha: f64,
}

impl Maupertuis0 {
    fn split(&self, x: &[Vec2], dt: f64) -> (f64, f64) {
        let n = x.len() - 1;
        let mut kin = 0.0;
        for k in 0..n {
            kin += (x[k + 1] - x[k]).norm_sq() / (2.0 * dt);
        }
        let mut pot = 0.0;
        for (k, p) in x.iter().enumerate() {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            pot += w * self.m1 / (self.alpha * p.norm().powf(self.alpha)) * dt;
        }
        (kin, pot)
    }
}

impl ArcFunctional for Maupertuis0 {
    fn eval(&self, x: &[Vec2], dt: f64) -> f64 {
        let (kin, pot) = self.split(x, dt);
        kin * pot
    }

    fn grad(&self, x: &[Vec2], dt: f64, out: &mut [Vec2]) {
        let (kin, pot) = self.split(x, dt);
        let n = x.len() - 1;
        for k in 1..n {
            let gk = (x[k] * 2.0 - x[k - 1] - x[k + 1]) / dt;
            let gu = grad_bar_potential(x[k], self.m1, self.alpha) * dt;
            out[k] = gk * pot + gu * kin;
        }
    }

    fn stiffness(&self, x: &[Vec2], dt: f64) -> f64 {
        self.split(x, dt).1
    }

    fn context(&self, x: &[Vec2], dt: f64) -> f64 {
        let (kin, pot) = self.split(x, dt);
        kin / pot
    }

    fn el_residual(&self, x: &[Vec2], dt: f64, c: f64, k: usize) -> Vec2 {
        x[k + 1] - x[k] * 2.0 + x[k - 1]
            - grad_bar_potential(x[k], self.m1, self.alpha) * (c * dt * dt)
    }

    fn el_jacobian(&self, x: &[Vec2], dt: f64, c: f64, k: usize) -> (Mat2, Mat2, Mat2) {
        let h = hess_bar_potential(x[k], self.m1, self.alpha) * (c * dt * dt);
        (Mat2::IDENTITY, Mat2::scale(-2.0) - h, Mat2::IDENTITY)
    }
}

/// Fixed-time action with midpoint-rule potential (same quadrature as the
/// loop action).
struct FixedTimeAction {
    m1: f64,
    alpha: f64,
}

impl ArcFunctional for FixedTimeAction {
    fn eval(&self, x: &[Vec2], dt: f64) -> f64 {
        let n = x.len() - 1;
        let mut acc = 0.0;
        for k in 0..n {
            acc += (x[k + 1] - x[k]).norm_sq() / (2.0 * dt);
            let mid = (x[k] + x[k + 1]) * 0.5;
            acc += dt * self.m1 / (self.alpha * mid.norm().powf(self.alpha));
        }
        acc
    }

    fn grad(&self, x: &[Vec2], dt: f64, out: &mut [Vec2]) {
        let n = x.len() - 1;
        for k in 1..n {
            let gk = (x[k] * 2.0 - x[k - 1] - x[k + 1]) / dt;
            let gm = (grad_bar_potential((x[k - 1] + x[k]) * 0.5, self.m1, self.alpha)
                + grad_bar_potential((x[k] + x[k + 1]) * 0.5, self.m1, self.alpha))
                * (0.5 * dt);
            out[k] = gk + gm;
        }
    }

    fn stiffness(&self, _x: &[Vec2], _dt: f64) -> f64 {
        1.0
    }

    fn context(&self, _x: &[Vec2], _dt: f64) -> f64 {
        1.0
    }

    fn el_residual(&self, x: &[Vec2], dt: f64, _c: f64, k: usize) -> Vec2 {
        let gm = (grad_bar_potential((x[k - 1] + x[k]) * 0.5, self.m1, self.alpha)
            + grad_bar_potential((x[k] + x[k + 1]) * 0.5, self.m1, self.alpha))
            * 0.5;
        x[k + 1] - x[k] * 2.0 + x[k - 1] - gm * (dt * dt)
    }

    fn el_jacobian(&self, x: &[Vec2], dt: f64, _c: f64, k: usize) -> (Mat2, Mat2, Mat2) {
        let hm = hess_bar_potential((x[k - 1] + x[k]) * 0.5, self.m1, self.alpha) * (dt * dt / 4.0);
        let hp = hess_bar_potential((x[k] + x[k + 1]) * 0.5, self.m1, self.alpha) * (dt * dt / 4.0);
        (
            Mat2::IDENTITY - hm,
            Mat2::scale(-2.0) - hm - hp,
            Mat2::IDENTITY - hp,
        )
    }
}

struct DescentResult {
    points: Vec<Vec2>,
    iterations: usize,
    grad_residual: f64,
}

/// Seed arc: parabolic radial profile clamped at `r_min`, angle sweeping
/// φ₋ → φ₊ with the transition concentrated near t = 0.
fn seeded_sweep_arc(pe: &ParabolicEjection, t_half: f64, n: usize, r_min: f64) -> Vec<Vec2> {
    let dt = 2.0 * t_half / n as f64;
    let sig = |t: f64| (t / (0.18 * t_half)).tanh();
    let lo = sig(-t_half);
    let hi = sig(t_half);
    (0..=n)
        .map(|k| {
            let t = -t_half + k as f64 * dt;
            let r = pe.radius(t).max(r_min);
            let s = (sig(t) - lo) / (hi - lo);
            let phi = pe.phi_minus + (pe.phi_plus - pe.phi_minus) * s;
            Vec2::from_angle(phi) * r
        })
        .collect()
}

/// Spectral projected gradient descent (Barzilai–Borwein steps with a
/// nonmonotone acceptance window): endpoints pinned, nodes clamped outside
/// the disk of radius `rho`, steps rejected when a segment would cross the
/// origin region (homotopy obstruction, so the endpoint-argument constraint
/// is maintained along the run).
fn project_descent<F: ArcFunctional>(
    f: &F,
    mut x: Vec<Vec2>,
    t_half: f64,
    rho: f64,
    max_iters: usize,
    tol: f64,
) -> Result<DescentResult, KeplerError> {
    let n = x.len() - 1;
    let dt = 2.0 * t_half / n as f64;
    let guard = if rho > 0.0 { 0.5 * rho } else { 1e-7 * x[n].norm().max(x[0].norm()) };

    let project = |p: Vec2| -> Vec2 {
        let r = p.norm();
        if rho > 0.0 && r < rho {
            if r == 0.0 {
                Vec2::new(rho, 0.0)
            } else {
                p * (rho / r)
            }
        } else {
            p
        }
    };
    for p in x.iter_mut().skip(1).take(n - 1) {
        *p = project(*p);
    }

    let mut grad = vec![Vec2::ZERO; n + 1];
    let mut value = f.eval(&x, dt);
    if !value.is_finite() {
        return Err(KeplerError::Minimization("seed arc has non-finite value".into()));
    }
    f.grad(&x, dt, &mut grad);

    let mut x_prev: Option<(Vec<Vec2>, Vec<Vec2>)> = None;
    let mut eta = dt / f.stiffness(&x, dt).max(1e-300);
    let mut recent = std::collections::VecDeque::from(vec![value]);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut stall = 0usize;

    for iter in 0..max_iters {
        iterations = iter + 1;

        // KKT residual: tangential part (plus inward push) on active
        // nodes, full gradient on free nodes.
        residual = 0.0;
        for k in 1..n {
            let g = grad[k];
            let r = x[k].norm();
            let active = rho > 0.0 && r <= rho * (1.0 + 1e-10);
            if active {
                let rhat = x[k] / r;
                let viol = g.dot(rhat.rot90()).abs() + (-g.dot(rhat)).max(0.0);
                residual = residual.max(viol);
            } else {
                residual = residual.max(g.norm());
            }
        }
        let vscale = (value.abs() / (2.0 * t_half) / x[n].norm().max(1e-300)).max(1e-300);
        if residual <= tol * vscale || stall > 400 {
            break;
        }

        // Barzilai–Borwein step from the last accepted move.
        if let Some((xp, gp)) = &x_prev {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for k in 1..n {
                let s = x[k] - xp[k];
                let y = grad[k] - gp[k];
                ss += s.dot(s);
                sy += s.dot(y);
            }
            if sy > 0.0 && ss > 0.0 {
                eta = (ss / sy).min(1e12 * dt);
            }
        }

        let mut accepted = false;
        let worst_recent = recent.iter().cloned().fold(f64::MIN, f64::max);
        let mut step = eta;
        for _ in 0..60 {
            let mut trial = x.clone();
            let mut decrease = 0.0;
            for k in 1..n {
                trial[k] = project(x[k] - grad[k] * step);
                decrease += grad[k].dot(x[k] - trial[k]);
            }
            let mut ok = decrease > 0.0;
            if ok {
                for k in 0..n {
                    if crate::geom::point_segment_distance(Vec2::ZERO, trial[k], trial[k + 1])
                        < guard
                        || (trial[k] - x[k]).norm() > 0.5 * x[k].norm().max(guard)
                    {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let v = f.eval(&trial, dt);
                if v.is_finite() && v <= worst_recent - 1e-4 * decrease {
                    x_prev = Some((x.clone(), grad.clone()));
                    if (value - v).abs() <= 1e-15 * value.abs() {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    x = trial;
                    value = v;
                    f.grad(&x, dt, &mut grad);
                    accepted = true;
                    break;
                }
            }
            step *= 0.4;
        }
        if !accepted {
            break;
        }
        recent.push_back(value);
        if recent.len() > 8 {
            recent.pop_front();
        }
    }

    Ok(DescentResult { points: x, iterations, grad_residual: residual })
}

/// Active-set Newton on the discrete Euler–Lagrange system, entered once
/// the projected descent has localized the minimizer. Active (contact)
/// nodes trade their radial equation for the constraint |x| = ρ; the
/// reduced system stays block-tridiagonal with 2×2 blocks and converges
/// quadratically, driving the criticality residual to rounding level.
fn newton_polish<F: ArcFunctional>(
    f: &F,
    x: &mut [Vec2],
    dt: f64,
    rho: f64,
) -> f64 {
    let n = x.len() - 1;
    if n < 3 {
        return f64::INFINITY;
    }
    let r_scale = x[0].norm().max(x[n].norm()).max(rho);
    let entry_value = f.eval(x, dt);
    let entry_points = x.to_vec();
    let mut active = vec![false; n + 1];
    for (k, p) in x.iter().enumerate().take(n).skip(1) {
        active[k] = rho > 0.0 && p.norm() <= rho * (1.0 + 1e-9);
    }

    let merit = |x: &[Vec2], active: &[bool]| -> f64 {
        let c = f.context(x, dt);
        let mut m = 0.0f64;
        for k in 1..n {
            let fk = f.el_residual(x, dt, c, k);
            if active[k] {
                let rhat = x[k].normalized();
                let g = fk.dot(rhat.rot90());
                let viol = x[k].norm() - rho;
                m += g * g + viol * viol;
            } else {
                m += fk.norm_sq();
            }
        }
        m
    };

    let mut best_residual = f64::INFINITY;
    for _outer in 0..60 {
        // Assemble the block-tridiagonal system J δ = −R.
        let ctx = f.context(x, dt);
        let mut sub = vec![Mat2::ZERO; n + 1];
        let mut diag = vec![Mat2::ZERO; n + 1];
        let mut sup = vec![Mat2::ZERO; n + 1];
        let mut rhs = vec![Vec2::ZERO; n + 1];
        let mut res_inf = 0.0f64;
        for k in 1..n {
            let fk = f.el_residual(x, dt, ctx, k);
            let (ja, jb, jc) = f.el_jacobian(x, dt, ctx, k);
            if active[k] {
                let r = x[k].norm();
                let rhat = x[k] / r;
                let that = rhat.rot90();
                // Row 1: tangential equilibrium; row 2: stay on the circle.
                // ∂t̂/∂x = R90 (I − r̂r̂ᵀ)/r; contribution (∂t̂/∂x)ᵀ F.
                let proj = (Mat2::IDENTITY - Mat2::outer(rhat, rhat)) * (1.0 / r);
                let r90 = Mat2::new(0.0, -1.0, 1.0, 0.0);
                let dt_dx = r90.mul_mat(proj);
                let extra = Vec2::new(
                    dt_dx.a * fk.x + dt_dx.c * fk.y,
                    dt_dx.b * fk.x + dt_dx.d * fk.y,
                );
                let row1_sub = Vec2::new(
                    that.x * ja.a + that.y * ja.c,
                    that.x * ja.b + that.y * ja.d,
                );
                let row1_diag = Vec2::new(
                    that.x * jb.a + that.y * jb.c + extra.x,
                    that.x * jb.b + that.y * jb.d + extra.y,
                );
                let row1_sup = Vec2::new(
                    that.x * jc.a + that.y * jc.c,
                    that.x * jc.b + that.y * jc.d,
                );
                sub[k] = Mat2::new(row1_sub.x, row1_sub.y, 0.0, 0.0);
                diag[k] = Mat2::new(row1_diag.x, row1_diag.y, rhat.x, rhat.y);
                sup[k] = Mat2::new(row1_sup.x, row1_sup.y, 0.0, 0.0);
                let g = fk.dot(that);
                let c = r - rho;
                rhs[k] = Vec2::new(-g, -c);
                res_inf = res_inf.max(g.abs()).max(c.abs());
            } else {
                sub[k] = ja;
                diag[k] = jb;
                sup[k] = jc;
                rhs[k] = -fk;
                res_inf = res_inf.max(fk.norm());
            }
        }
        best_residual = res_inf;
        if res_inf < 1e-13 * r_scale {
            break;
        }

        // Block Thomas elimination.
        let mut cprime = vec![Mat2::ZERO; n + 1];
        let mut dprime = vec![Vec2::ZERO; n + 1];
        let Some(inv1) = diag[1].inverse() else { break };
        cprime[1] = inv1.mul_mat(sup[1]);
        dprime[1] = inv1.mul_vec(rhs[1]);
        let mut singular = false;
        for k in 2..n {
            let denom = diag[k] - sub[k].mul_mat(cprime[k - 1]);
            let Some(inv) = denom.inverse() else {
                singular = true;
                break;
            };
            cprime[k] = inv.mul_mat(sup[k]);
            dprime[k] = inv.mul_vec(rhs[k] - sub[k].mul_vec(dprime[k - 1]));
        }
        if singular {
            break;
        }
        let mut delta = vec![Vec2::ZERO; n + 1];
        delta[n - 1] = dprime[n - 1];
        for k in (1..n - 1).rev() {
            delta[k] = dprime[k] - cprime[k].mul_vec(delta[k + 1]);
        }

        // Damped update on the merit function.
        let m0 = merit(x, &active);
        let mut s = 1.0;
        let mut moved = false;
        for _ in 0..12 {
            let mut trial: Vec<Vec2> = x.to_vec();
            for k in 1..n {
                trial[k] = x[k] + delta[k] * s;
            }
            let mut valid = trial.iter().all(|p| p.is_finite() && p.norm() > 0.0);
            if rho > 0.0 {
                for p in trial.iter_mut().take(n).skip(1) {
                    let r = p.norm();
                    if r < rho {
                        // Project slight violations back onto the circle.
                        if r < rho * 0.8 {
                            valid = false;
                            break;
                        }
                        *p = *p * (rho / r);
                    }
                }
            }
            if valid && merit(&trial, &active) < m0 {
                x.copy_from_slice(&trial);
                moved = true;
                break;
            }
            s *= 0.5;
        }

        // Active-set update: admit new contact nodes, release those whose
        // multiplier has the wrong sign (residual pointing outward).
        let ctx2 = f.context(x, dt);
        let mut changed = false;
        for k in 1..n {
            let r = x[k].norm();
            if !active[k] && rho > 0.0 && r <= rho * (1.0 + 1e-12) {
                active[k] = true;
                changed = true;
            } else if active[k] {
                let fk = f.el_residual(x, dt, ctx2, k);
                let mu = -fk.dot(x[k].normalized());
                if mu < -1e-11 * r_scale {
                    active[k] = false;
                    changed = true;
                }
            }
        }
        if !moved && !changed {
            break;
        }
    }
    // A polish that wandered to a worse critical point is discarded.
    let final_value = f.eval(x, dt);
    if !(final_value <= entry_value * (1.0 + 1e-9)) {
        x.copy_from_slice(&entry_points);
        return f64::INFINITY;
    }
    best_residual
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{arc_action, energy, eom_residual, OpenArc};
    use crate::numeric::integrate_dyadic_from_zero;
    use std::f64::consts::PI;

    fn pe(m1: f64, alpha: f64, dphi: f64) -> ParabolicEjection {
        ParabolicEjection::new(m1, alpha, 0.0, dphi).unwrap()
    }

    #[test]
    fn mu_and_point_values() {
        // α=1, m₁=2: μ = 3·√(2/2) = 3, |x̄(1)| = 3^{2/3}.
        let p = pe(2.0, 1.0, PI);
        assert!((p.mu() - 3.0).abs() < 1e-15);
        assert!((p.radius(1.0) - 3f64.powf(2.0 / 3.0)).abs() < 1e-14);
        assert_eq!(p.point(0.0), Vec2::ZERO);
    }

    #[test]
    fn ejection_is_zero_energy() {
        // Independent check: finite-difference velocity plus the energy
        // identity at sample points.
        for alpha in [1.0, 1.5, 1.75] {
            let p = pe(0.7, alpha, 2.0 * PI);
            let sys = p.system();
            for &t in &[0.05f64, 0.3, 1.0, -0.4] {
                let v = p.velocity(t).unwrap();
                let h = 1e-7 * t.abs();
                let fd = (p.point(t + h) - p.point(t - h)) / (2.0 * h);
                assert!((v - fd).norm() < 1e-5 * v.norm(), "velocity vs fd at t={t}");
                let e = 0.5 * v.norm_sq() - crate::model::potential(p.point(t), &sys).unwrap();
                assert!(e.abs() < 1e-10 * v.norm_sq(), "energy {e} at t={t}");
            }
        }
    }

    #[test]
    fn ejection_action_matches_quadrature() {
        // ∫|ẋ̄|² via dyadic Gauss panels (handles t^{-2α/(2+α)} at 0).
        for (alpha, m1, t_half) in [(1.0, 0.5, 1.0), (1.5, 1.0, 2.0), (1.0, 2.0, 0.7)] {
            let p = pe(m1, alpha, PI);
            let closed = ejection_action(&p, t_half).unwrap();
            let f = |t: f64| p.velocity(t).unwrap().norm_sq();
            let quad = 2.0 * integrate_dyadic_from_zero(&f, t_half, 700);
            assert!(
                (closed - quad).abs() < 1e-10 * closed,
                "alpha={alpha}: closed {closed} vs quad {quad}"
            );
        }

        // T-scaling: doubling T multiplies by 2^{(2-α)/(2+α)}.
        let p = pe(1.0, 1.5, PI);
        let a1 = ejection_action(&p, 1.0).unwrap();
        let a2 = ejection_action(&p, 2.0).unwrap();
        assert!((a2 / a1 - 2f64.powf(0.5 / 3.5)).abs() < 1e-12);
        assert!(ejection_action(&p, -1.0).is_err());
    }

    #[test]
    fn rescale_fixes_parabolic_ejections() {
        let p = pe(1.3, 1.25, 1.5 * PI);
        let arc = p.sample_geometric(1.0, 1e-6, 6);
        for lam in [1.0, 0.37, 0.01] {
            let r = lambda_rescale(&arc, lam, Vec2::ZERO, p.alpha());
            for (i, &t) in r.times().iter().enumerate() {
                let expect = p.point(t);
                assert!(
                    (r.points()[i] - expect).norm() <= 1e-12 * expect.norm().max(1e-12),
                    "lambda {lam}, sample {i}"
                );
            }
        }
        // λ=1 is the identity.
        let id = lambda_rescale(&arc, 1.0, Vec2::ZERO, p.alpha());
        assert_eq!(id, arc);
    }

    #[test]
    fn rescale_law_exponent() {
        // Generic two-center arc; the measured exponent must match the
        // substitution value -(2-α)/(2+α) and differ from -2/(2+α).
        let sys =
            CenterSystem::new(vec![1.0, 0.5], vec![Vec2::ZERO, Vec2::new(3.0, 1.0)], 1.0).unwrap();
        let m = 400;
        let times: Vec<f64> = (0..m).map(|k| 0.3 + 1.4 * k as f64 / (m - 1) as f64).collect();
        let points: Vec<Vec2> = times
            .iter()
            .map(|&t| Vec2::new(1.0 + 0.3 * (2.0 * t).cos() + 0.1 * t, 0.5 * (3.0 * t).sin()))
            .collect();
        let velocities: Vec<Vec2> = times
            .iter()
            .map(|&t| Vec2::new(-0.6 * (2.0 * t).sin() + 0.1, 1.5 * (3.0 * t).cos()))
            .collect();
        let arc = OpenArc::new(times, points, Some(velocities)).unwrap();
        let lambdas = [1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001];
        let law = measure_rescale_law(&arc, &sys, 0, &lambdas).unwrap();
        assert!(law.fit.r_squared > 1.0 - 1e-9, "r² = {}", law.fit.r_squared);
        assert!((law.fit.slope - law.exponent_derived).abs() < 1e-6);
        assert!((law.fit.slope - law.exponent_stated).abs() > 0.1);
    }

    #[test]
    fn blowup_fixed_point_is_exact() {
        let p = pe(1.0, 1.0, PI);
        let arc = p.sample_geometric(1.0, 1e-9, 24);
        let rows = blowup_convergence(&arc, &p, &[0.5, 0.1, 0.02]).unwrap();
        for row in rows {
            assert!(row.position_dist < 1e-9, "position {}", row.position_dist);
            assert!(row.velocity_dist < 1e-7, "velocity {}", row.velocity_dist);
        }
    }

    #[test]
    fn maupertuis_basics() {
        let p = pe(1.0, 1.5, PI);
        let arc = p.sample_geometric(1.0, 1e-30, 48);
        let rec = maupertuis(&arc, 0.0, 1.0, 1.5).unwrap();
        assert!(rec.value > 0.0);
        // Zero energy equates the kinetic and potential factors:
        // M̄ = (Ā/2)² and ω = 1.
        let closed = ejection_action(&p, 1.0).unwrap();
        assert!(
            (rec.value - (closed / 2.0).powi(2)).abs() < 1e-3 * rec.value,
            "M = {}, (A/2)² = {}",
            rec.value,
            (closed / 2.0).powi(2)
        );
        assert!((rec.omega - 1.0).abs() < 1e-3);

        // Affine time rescaling at h=0 trades the factors exactly.
        let times2: Vec<f64> = arc.times().iter().map(|&t| 0.5 * t).collect();
        let vels2: Vec<Vec2> = arc.velocities().unwrap().iter().map(|&v| v * 2.0).collect();
        let arc2 = OpenArc::new(times2, arc.points().to_vec(), Some(vels2)).unwrap();
        let rec2 = maupertuis(&arc2, 0.0, 1.0, 1.5).unwrap();
        assert!((rec2.value - rec.value).abs() < 1e-12 * rec.value);

        // Nonpositive potential integral: h far too negative.
        assert!(matches!(
            maupertuis(&arc, -1e6, 1.0, 1.5),
            Err(KeplerError::NonpositivePotentialIntegral)
        ));
    }

    #[test]
    fn angular_sweep_closed_form_values() {
        // α=1, ρ/r*=1/2: 2·(π/2 − arcsin(√(1/2))) = π/2, the classical
        // zero-energy parabola value (cos θ = 2ρ/r − 1).
        let got = angular_sweep(0.5, 1.0, 1.0).unwrap();
        assert!((got - PI / 2.0).abs() < 1e-14);
        // Independent antiderivative at α=1: 2·arctan(√((r*−ρ)/ρ)).
        for rho in [0.1f64, 0.35, 0.8] {
            let want = 2.0 * ((1.0 - rho) / rho).sqrt().atan();
            assert!((angular_sweep(rho, 1.0, 1.0).unwrap() - want).abs() < 1e-13);
        }
        // ρ→0 limits: π at α=1; 2π at α=1.5 (single side).
        assert!((angular_sweep(1e-14, 1.0, 1.0).unwrap() - PI).abs() < 1e-6);
        assert!((angular_sweep(1e-16, 1.0, 1.5).unwrap() - 2.0 * PI).abs() < 1e-3);
        // ρ = r* sweeps nothing.
        assert!(angular_sweep(1.0, 1.0, 1.3).unwrap().abs() < 1e-15);
        assert!(angular_sweep(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn numeric_sweep_matches_closed_form() {
        for &alpha in &[1.0, 1.25, 1.5, 1.75] {
            for &frac in &[0.07, 0.3, 0.55, 0.9] {
                let closed = angular_sweep(frac, 1.0, alpha).unwrap();
                let numeric = grazing_arc_sweep_numeric(frac, 1.0, alpha, 1.0).unwrap();
                assert!(
                    (closed - numeric).abs() < 1e-8,
                    "alpha={alpha} frac={frac}: {closed} vs {numeric}"
                );
            }
        }
        // Mass independence by cancellation.
        let a = grazing_arc_sweep_numeric(0.4, 1.0, 1.5, 0.1).unwrap();
        let b = grazing_arc_sweep_numeric(0.4, 1.0, 1.5, 10.0).unwrap();
        assert!((a - b).abs() < 1e-10);
        // Empty integral at ρ = r*.
        assert_eq!(grazing_arc_sweep_numeric(1.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sweep_limit_extrapolation_hits_threshold() {
        let l1 = total_sweep_limit(1.0, 1.0, 1e-4).unwrap();
        assert!((l1 - 2.0 * PI).abs() < 1e-8, "{l1}");
        let l15 = total_sweep_limit(1.5, 1.0, 1e-4).unwrap();
        assert!((l15 - 4.0 * PI).abs() < 1e-4, "{l15}");
    }

    #[test]
    fn obstacle_on_the_endpoint_circle_is_pure_sweep() {
        let p = pe(1.0, 1.5, 1.2 * PI);
        let t_half = 1.0;
        let r_end = p.radius(t_half);
        let spec = ObstacleSpec::new(r_end, None, t_half).unwrap();
        let out = obstacle_minimize(&spec, &p, 256).unwrap();
        for q in out.arc.points() {
            assert!((q.norm() - r_end).abs() < 1e-9 * r_end);
        }
        // Uniform angular sweep: discrete J constant everywhere.
        let mean: f64 =
            out.angular_momentum.iter().sum::<f64>() / out.angular_momentum.len() as f64;
        for j in &out.angular_momentum {
            assert!((j - mean).abs() < 1e-6 * mean.abs());
        }
        assert!(matches!(
            obstacle_minimize(&ObstacleSpec::new(2.0 * r_end, None, t_half).unwrap(), &p, 64),
            Err(KeplerError::InfeasibleObstacle { .. })
        ));
    }

    #[test]
    fn obstacle_small_radius_beats_the_ejection() {
        // Small obstacle: contact empty or a single interval, and the
        // minimizer does strictly better than the collision-ejection.
        let p = pe(1.0, 1.5, 2.0 * PI);
        let t_half = 1.0;
        let spec = ObstacleSpec::new(0.2 * p.radius(t_half), None, t_half).unwrap();
        let out = obstacle_minimize(&spec, &p, 512).unwrap();
        assert!(out.contact_single_interval);
        let closed = ejection_action(&p, t_half).unwrap();
        let m_ejection = (closed / 2.0).powi(2);
        assert!(
            out.record.value < m_ejection,
            "M = {} vs ejection {}",
            out.record.value,
            m_ejection
        );
    }

    #[test]
    fn obstacle_contact_structure_and_momentum() {
        // A large obstacle forces a genuine contact interval; the discrete
        // angular momentum is constant and matches the contact-circle value.
        let p = pe(1.0, 1.5, 2.0 * PI);
        let t_half = 1.0;
        let rho = 0.85 * p.radius(t_half);
        let spec = ObstacleSpec::new(rho, None, t_half).unwrap();
        let out = obstacle_minimize(&spec, &p, 1024).unwrap();
        let (a, b) = out.contact.expect("contact interval");
        assert!(out.contact_single_interval);
        assert!(b > a, "contact should be an interval, got ({a},{b})");

        let js = &out.angular_momentum;
        let mean: f64 = js.iter().sum::<f64>() / js.len() as f64;
        let max_dev = js.iter().map(|j| (j - mean).abs()).fold(0.0, f64::max);
        assert!(max_dev < 1e-6 * mean.abs(), "J deviation {max_dev} vs mean {mean}");
        assert!(
            (mean.abs() - out.contact_momentum).abs() < 1e-4 * out.contact_momentum,
            "J {} vs contact value {}",
            mean.abs(),
            out.contact_momentum
        );

        // Radial monotonicity outside the contact interval.
        let pts = out.arc.points();
        for k in 0..a.saturating_sub(1) {
            assert!(pts[k].norm() > pts[k + 1].norm() - 1e-12);
        }
        for k in b..pts.len() - 1 {
            assert!(pts[k + 1].norm() > pts[k].norm() - 1e-12);
        }
    }

    #[test]
    fn obstacle_solution_maps_to_zero_energy_arc() {
        let p = pe(1.0, 1.5, 2.0 * PI);
        let t_half = 1.0;
        let spec = ObstacleSpec::new(0.2 * p.radius(t_half), None, t_half).unwrap();
        let out = obstacle_minimize(&spec, &p, 2048).unwrap();
        let sol = maupertuis_to_solution(&out.arc, &out.record, p.m1(), p.alpha(), 1e-5).unwrap();
        // Interval shrinks by 1/ω.
        let len_in = out.arc.times().last().unwrap() - out.arc.times()[0];
        let len_out = sol.times().last().unwrap() - sol.times()[0];
        assert!((len_out - len_in / out.record.omega).abs() < 1e-12 * len_in);
        // Zero-energy identity along the arc.
        let sys = p.system();
        let rec = energy(&sol, &sys).unwrap();
        let vmax = sol
            .points()
            .iter()
            .map(|q| crate::model::potential(*q, &sys).unwrap())
            .fold(0.0, f64::max);
        assert!(rec.h.abs() < 1e-6 * vmax, "h = {}", rec.h);
        assert!(rec.max_drift < 2e-4 * vmax, "drift = {}", rec.max_drift);
        // And it solves the equation of motion.
        let res = eom_residual(&sol, &sys).unwrap();
        assert!(res < 2e-2, "eom residual {res}");

        // Identity map on the ejection itself (ω = 1).
        let arc = p.sample_geometric(1.0, 1e-6, 12);
        let rec0 = maupertuis(&arc, 0.0, p.m1(), p.alpha()).unwrap();
        let sol0 = maupertuis_to_solution(&arc, &rec0, p.m1(), p.alpha(), 1e-2).unwrap();
        assert!((rec0.omega - 1.0).abs() < 1e-3);
        for (i, &t) in sol0.times().iter().enumerate() {
            assert!((sol0.points()[i] - p.point(t * rec0.omega)).norm() < 1e-12);
        }
    }

    #[test]
    fn fixed_end_improves_for_weak_force() {
        // α ∈ (1,2), Δφ = 2π: strict improvement over the ejection.
        let p = pe(1.0, 1.5, 2.0 * PI);
        let out = fixed_end_minimize(&p, 1.0, 256).unwrap();
        assert!(
            out.margin > 1e-3,
            "margin {} (action {} vs ejection {})",
            out.margin,
            out.action,
            out.ejection_action
        );
        // Cross-check the reported action via the trapezoid rule.
        let sys = p.system();
        let pts = out.arc.points().to_vec();
        let vel = central_velocities(&out.arc);
        let arc_v = OpenArc::new(out.arc.times().to_vec(), pts, Some(vel)).unwrap();
        let a_trap = arc_action(&arc_v, &sys).unwrap();
        assert!((a_trap - out.action).abs() < 5e-2 * out.action);
    }
}
