//! Mollified graph flattening: forward/backward map round trip and the
//! decay table for the regularized extension of the graph function.

use lipspace::flatten::{verify_extension_estimates, Flattening, Mollifier};
use lipspace::geometry::GraphDomain;

fn main() {
    let dom = GraphDomain::sawtooth(0.5, 2, 1.0, 2.0, 16);
    let flat = Flattening::new(dom.clone(), 64).unwrap();

    let mut worst = 0.0f64;
    for i in 1..10 {
        for j in 1..10 {
            let x = [0.1 * i as f64, 0.15 + 0.18 * j as f64];
            let fwd = flat.lambda_map(&x).unwrap();
            let back = flat.kappa_map(&fwd).unwrap();
            worst = worst.max((back[0] - x[0]).abs().max((back[1] - x[1]).abs()));
        }
    }
    println!("map round trip over an interior probe grid: {worst:.2e}");
    println!("kappa0 (bi-Lipschitz aperture bound): {:.3}", flat.kappa0);

    let moll = Mollifier::new(1, 48).unwrap();
    let rep = verify_extension_estimates(&dom, &moll, 5, 96).unwrap();
    println!();
    println!("graph-gradient oscillation seminorm: {:.4}", rep.grad_bmo);
    println!("extension-gradient oscillation seminorm: {:.4}", rep.grad_extension_bmo);
    println!();
    println!("{:>9} {:>10} {:>10} {:>10}", "height", "sup|grad|", "sup|hess|", "sup gap");
    for (k, h) in rep.heights.iter().enumerate() {
        println!(
            "{h:>9.4} {:>10.4} {:>10.3} {:>10.5}",
            rep.sup_grad[k], rep.sup_hess[k], rep.sup_gap[k]
        );
    }
    println!();
    println!(
        "log-log slopes: hessian {:.3} (expect ~ -1), gap {:.3} (expect ~ +1)",
        rep.exponent_hess, rep.exponent_gap
    );
}
