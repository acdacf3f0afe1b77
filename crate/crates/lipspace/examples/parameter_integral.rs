//! The two-weight parameter integral and its uniform bound: the quantity
//!   lhs(a, b, zeta) * a^eps * (|zeta| + a + b)^(N - delta)
//! stays bounded over the standard 27-point (a, b, zeta) sweep.

use lipspace::halfspace_ops::{lemma1_standard_sweep, lemma1_verify};

fn main() {
    // closed-form anchor: N=1, eps=1, delta=1/2, a=b=1, zeta=0
    let rep = lemma1_verify(1, 1.0, 0.5, &[(1.0, 1.0, 0.0)], 1e-10).unwrap();
    println!(
        "anchor: lhs {:.10} (exact 4/3), ratio {:.10} (exact 4*sqrt2/3)",
        rep.rows[0].lhs, rep.rows[0].ratio
    );

    for dim in [1usize, 2] {
        let rep = lemma1_verify(dim, 0.5, 0.5, &lemma1_standard_sweep(), 1e-8).unwrap();
        println!();
        println!("N = {dim}: max bounded ratio over the sweep = {:.6}", rep.max_ratio);
        let mut worst = rep.rows[0].clone();
        for r in &rep.rows {
            if r.ratio > worst.ratio {
                worst = r.clone();
            }
        }
        println!(
            "  attained at a={}, b={}, zeta={} (lhs {:.4e})",
            worst.a, worst.b, worst.zeta, worst.lhs
        );
    }
}
