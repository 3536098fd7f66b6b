use ncenter_core::kepler::*;
fn main() {
    let p = ParabolicEjection::new(1.0, 1.5, 0.0, 2.0*std::f64::consts::PI).unwrap();
    let t_half = 1.0;
    for (rho_frac, n) in [(0.85, 1024usize), (0.2, 2048)] {
        let rho = rho_frac * p.radius(t_half);
        let spec = ObstacleSpec::new(rho, None, t_half).unwrap();
        let t0 = std::time::Instant::now();
        let out = obstacle_minimize(&spec, &p, n).unwrap();
        let js = &out.angular_momentum;
        let mean: f64 = js.iter().sum::<f64>() / js.len() as f64;
        let max_dev = js.iter().map(|j| (j - mean).abs()).fold(0.0, f64::max);
        println!("rho_frac {rho_frac} n {n}: iters {} residual {:.3e} Jdev {:.3e} mean {:.4} M {:.6} elapsed {:?}",
                 out.iterations, out.grad_residual, max_dev, mean, out.record.value, t0.elapsed());
    }
}
