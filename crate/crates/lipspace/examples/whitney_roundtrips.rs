//! The two derivative-array round trips and their very different error
//! budgets.
//!
//! Rebuilding an array from its normal data and collapsing back is a finite
//! algebraic identity: it closes to machine precision on any surface, even
//! on random data. Tracing a field, collapsing, and rebuilding also has to
//! reconstruct tangential derivatives by differencing along the boundary,
//! so away from flat facets it carries an O(h) term.

use lipspace::geometry::GraphDomain;
use lipspace::multiindex::MultiIndex;
use lipspace::util::seeded_rng;
use lipspace::whitney::{
    compat_check, dirichlet_to_whitney, trace_array, whitney_to_dirichlet, BoundaryGrid,
    DirichletData,
};
use rand::Rng;

fn poly(x: &[f64], alpha: MultiIndex) -> f64 {
    // total degree two, so central differences are exact on it
    match (alpha[0], alpha[1]) {
        (0, 0) => 1.0 + 2.0 * x[0] - x[1] + x[0] * x[1] + 0.7 * x[0] * x[0],
        (1, 0) => 2.0 + x[1] + 1.4 * x[0],
        (0, 1) => -1.0 + x[0],
        (1, 1) => 1.0,
        (2, 0) => 1.4,
        _ => 0.0,
    }
}

fn trace_gap(dom: GraphDomain, res: usize) -> f64 {
    let grid = BoundaryGrid::new(dom, res).unwrap();
    let wa = trace_array(&grid, 2, poly);
    let back = dirichlet_to_whitney(&whitney_to_dirichlet(&wa)).unwrap();
    wa.comps
        .iter()
        .flatten()
        .zip(back.comps.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn data_gap(dom: GraphDomain, res: usize) -> f64 {
    let grid = BoundaryGrid::new(dom, res).unwrap();
    let mut rng = seeded_rng(7);
    let comps = (0..3)
        .map(|_| (0..grid.count()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let dd = DirichletData { grid, m: 3, comps };
    let back = whitney_to_dirichlet(&dirichlet_to_whitney(&dd).unwrap());
    dd.comps
        .iter()
        .flatten()
        .zip(back.comps.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn main() {
    println!("normal-data identity (random data, m = 3):");
    println!("  flat:     {:.2e}", data_gap(GraphDomain::flat(2, 1.0, 1.0), 128));
    println!(
        "  sawtooth: {:.2e}",
        data_gap(GraphDomain::sawtooth(0.9, 2, 1.0, 1.0, 16), 128)
    );

    println!();
    println!("trace round trip (quadratic field, m = 2):");
    println!("  flat:           {:.2e}", trace_gap(GraphDomain::flat(2, 1.0, 1.0), 128));
    for res in [64, 128, 256] {
        let gap = trace_gap(GraphDomain::sawtooth(0.6, 2, 1.0, 1.0, 64), res);
        println!("  sawtooth @{res:>4}: {gap:.2e}");
    }

    println!();
    println!("compatibility residual of trace arrays under refinement:");
    for res in [64, 128, 256] {
        let dom = GraphDomain::sawtooth(0.5, 2, 1.0, 1.0, 64);
        let grid = BoundaryGrid::new(dom, res).unwrap();
        let wa = trace_array(&grid, 2, poly);
        println!("  res {res:>4}: {:.3e}", compat_check(&wa).unwrap());
    }
}
