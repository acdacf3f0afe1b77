//! Boundary Besov seminorm against the weighted bulk gradient norm on a
//! family of decaying null solutions: the ratio stays in one bracket, and
//! it is exactly scale invariant.

use lipspace::solver::{harmonic_extension_family, trace_equivalence_check};

fn main() {
    let family = harmonic_extension_family(5);
    for &(p, s) in &[(2.0, 0.3), (2.0, 0.5), (3.0, 0.4)] {
        let rep = trace_equivalence_check(&family, p, s, 96).unwrap();
        println!("p = {p}, s = {s}:");
        for row in &rep.rows {
            if row.skipped {
                println!("  {:<8} skipped (degenerate bulk side)", row.label);
            } else {
                println!(
                    "  {:<8} boundary {:>9.4}  bulk {:>9.4}  ratio {:>7.4}",
                    row.label, row.lhs, row.rhs, row.ratio
                );
            }
        }
        println!("  bracket (max ratio / min ratio): {:.3}", rep.bracket);
        println!();
    }
}
