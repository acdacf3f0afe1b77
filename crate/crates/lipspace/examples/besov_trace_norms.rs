//! Boundary Besov norms of a derivative array traced from a smooth field,
//! swept over the smoothness index.

use lipspace::multiindex::MultiIndex;
use lipspace::whitney::{trace_array, whitney_besov_norm, BoundaryGrid};
use lipspace::geometry::GraphDomain;

// U = sin(x1) e^{x2} and all of its derivatives
fn field(x: &[f64], alpha: MultiIndex) -> f64 {
    (x[0] + alpha[0] as f64 * std::f64::consts::FRAC_PI_2).sin() * x[1].exp()
}

fn main() {
    let dom = GraphDomain::sawtooth(0.5, 2, 1.0, 1.0, 64);
    let grid = BoundaryGrid::new(dom, 192).unwrap();
    let wa = trace_array(&grid, 2, field);

    println!("array components: {:?}", wa.index_set());
    println!();
    println!("{:>5} {:>12} {:>14}", "s", "lp part", "seminorm part");
    for s in [0.2, 0.4, 0.6, 0.8] {
        let rep = whitney_besov_norm(&wa, 2.0, s).unwrap();
        let lp: f64 = rep.lp_parts.iter().sum();
        let semi: f64 = rep.seminorm_parts.iter().sum();
        println!("{s:>5.1} {lp:>12.5} {semi:>14.5}   total {:.5}", rep.total);
    }

    // a constant array has nothing to oscillate
    let flat = GraphDomain::flat(2, 1.0, 1.0);
    let grid = BoundaryGrid::new(flat, 64).unwrap();
    let constant = trace_array(&grid, 2, |_: &[f64], alpha: MultiIndex| {
            if alpha == [0, 0, 0] { 1.0 } else { 0.0 }
    });
    let rep = whitney_besov_norm(&constant, 2.0, 0.5).unwrap();
    let semi: f64 = rep.seminorm_parts.iter().sum();
    println!();
    println!("constant array seminorm: {semi:.2e}");
}
