//! Quadrature and regression helpers.

/// 16-point Gauss–Legendre nodes/weights on [-1, 1] (positive half; mirror
/// for the rest).
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// 16-point Gauss–Legendre rule on [a, b].
pub fn gauss16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL16_W[i] * (f(c + h * GL16_X[i]) + f(c - h * GL16_X[i]));
    }
    acc * h
}

/// Composite Gauss–Legendre with panel doubling until two successive levels
/// agree to `tol` (relative to the magnitude of the integral).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let mut panels = 4usize;
    let mut prev = composite(f, a, b, panels);
    loop {
        panels *= 2;
        let cur = composite(f, a, b, panels);
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) || panels >= 1 << 16 {
            return cur;
        }
        prev = cur;
    }
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| gauss16(f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Composite rule over a dyadic decomposition of (0, b]: octave panels
/// `[b·2^{-k-1}, b·2^{-k}]`, k = 0..levels, two Gauss panels per octave.
/// Handles integrable algebraic endpoint singularities at 0.
pub fn integrate_dyadic_from_zero<F: Fn(f64) -> f64>(f: &F, b: f64, levels: usize) -> f64 {
    let mut acc = 0.0;
    let mut hi = b;
    for _ in 0..levels {
        let lo = hi * 0.5;
        let mid = 0.75 * hi;
        acc += gauss16(f, lo, mid) + gauss16(f, mid, hi);
        hi = lo;
    }
    acc
}

/// Least-squares line y = intercept + slope·x with the coefficient of
/// determination R².
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LineFit { slope, intercept, r_squared }
}

/// Power-law fit y ≈ amplitude · x^exponent via log–log regression.
/// Inputs must be strictly positive.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> LineFit {
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    fit_line(&lx, &ly)
}

/// Median of a slice (copied and sorted internally).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if v.len() % 2 == 1 {
        v[v.len() / 2]
    } else {
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_on_polynomials() {
        let f = |x: f64| 3.0 * x * x * x * x * x - 2.0 * x + 1.0;
        let exact = |x: f64| 0.5 * x.powi(6) - x * x + x;
        let got = gauss16(&f, -1.0, 2.0);
        assert!((got - (exact(2.0) - exact(-1.0))).abs() < 1e-13);
    }

    #[test]
    fn dyadic_handles_inverse_sqrt() {
        // ∫₀¹ x^{-1/2} dx = 2.
        let got = integrate_dyadic_from_zero(&|x: f64| x.powf(-0.5), 1.0, 80);
        assert!((got - 2.0).abs() < 1e-12, "{got}");
        // ∫₀¹ x^{-6/7} dx = 7, the slowest tail used anywhere here.
        let got = integrate_dyadic_from_zero(&|x: f64| x.powf(-6.0 / 7.0), 1.0, 700);
        assert!((got - 7.0).abs() < 1e-10, "{got}");
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.5 * x - 0.7).collect();
        let fit = fit_line(&xs, &ys);
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 0.7).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }
}
