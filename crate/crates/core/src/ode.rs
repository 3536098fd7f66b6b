//! Adaptive Dormand–Prince 5(4) integration.
//!
//! Small embedded Runge–Kutta pair with PI step-size control, enough for the
//! trajectory and regularized-flow integrations here. State dimension is a
//! const generic so trajectories ((x, v) in ℝ⁴) and regularized states
//! ((z, z', t) in ℝ⁵) share the code.

/// Right-hand side of an autonomous-or-not first-order system.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Cap on |Δt| per step; infinite by default.
    pub max_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000, max_step: f64::INFINITY }
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

#[derive(Debug, thiserror::Error)]
pub enum OdeError {
    #[error("step count exceeded {0}")]
    TooManySteps(usize),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate from `t0` to `t1` (either direction), recording every accepted
/// step.
pub fn integrate<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution<N>, OdeError> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut times = vec![t0];
    let mut states = vec![y0];
    if span == 0.0 {
        return Ok(OdeSolution { times, states });
    }

    let mut h = (span / 100.0).min(opts.max_step) * dir;
    let mut k1 = sys.rhs(t, &y);
    let mut err_prev: f64 = 1.0;

    for _ in 0..opts.max_steps {
        if (t - t1).abs() <= 1e-14 * span.max(1.0) {
            return Ok(OdeSolution { times, states });
        }
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-300 {
            return Err(OdeError::StepUnderflow(t));
        }

        let stage = |coeffs: &[(f64, &[f64; N])]| {
            let mut yn = y;
            for &(c, k) in coeffs {
                for i in 0..N {
                    yn[i] += h * c * k[i];
                }
            }
            yn
        };
        let k2 = sys.rhs(t + A21 * h, &stage(&[(A21, &k1)]));
        let k3 = sys.rhs(t + 0.3 * h, &stage(&[(A31, &k1), (A32, &k2)]));
        let k4 = sys.rhs(t + 0.8 * h, &stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = sys.rhs(
            t + 8.0 / 9.0 * h,
            &stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = sys.rhs(
            t + h,
            &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let mut y_new = y;
        for i in 0..N {
            y_new[i] += h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = sys.rhs(t + h, &y_new);

        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            if !y.iter().all(|v| v.is_finite()) {
                return Err(OdeError::NonFinite(t));
            }
            times.push(t);
            states.push(y);
            // PI controller.
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err.max(1e-10);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h.abs() > opts.max_step {
            h = opts.max_step * dir;
        }
    }
    Err(OdeError::TooManySteps(opts.max_steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_round_trip() {
        let rhs = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let sol = integrate(&rhs, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, &OdeOptions::default())
            .unwrap();
        let last = sol.states.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-9);
        assert!(last[1].abs() < 1e-9);
    }

    #[test]
    fn backward_integration() {
        let rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let sol = integrate(&rhs, 0.0, [1.0], -1.0, &OdeOptions::default()).unwrap();
        let last = sol.states.last().unwrap();
        assert!((last[0] - (-1.0f64).exp()).abs() < 1e-10);
    }
}
