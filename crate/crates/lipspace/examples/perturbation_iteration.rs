//! Frozen-coefficient iteration for a perturbed diffusion coefficient
//! 1 + delta * rough(x): the contraction rate scales linearly in delta and
//! the iteration diverges once the perturbation swallows the coercivity.

use lipspace::solver::{neumann_iteration, SquareDomain};

fn main() {
    let pi = std::f64::consts::PI;
    let rough = |x: f64, y: f64| (2.0 * pi * x).cos() * (2.0 * pi * y).cos();
    let source = |x: f64, y: f64| (pi * x).sin() * (pi * y).sin();
    let dom = SquareDomain::new(24, 1.0).unwrap();

    println!("{:>7} {:>6} {:>12} {:>12}", "delta", "iters", "contraction", "rate/delta");
    for delta in [0.01, 0.05, 0.1, 0.2] {
        let rep = neumann_iteration(&dom, delta, &rough, &source, 60, 1e-12).unwrap();
        println!(
            "{delta:>7} {:>6} {:>12.5} {:>12.3}",
            rep.iterations,
            rep.contraction,
            rep.contraction / delta
        );
    }

    // past the coercivity margin the fixed point repels
    let rep = neumann_iteration(&dom, 1.8, &rough, &source, 60, 1e-12).unwrap();
    println!();
    println!(
        "delta = 1.8: converged = {}, growth factor {:.3}",
        rep.converged, rep.contraction
    );
}
