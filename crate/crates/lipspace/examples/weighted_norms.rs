//! Weighted half-space norms of a closed-form field, plus the sharp Hardy
//! constant 1/s measured along the family u = x^(s+eps).

use lipspace::multiindex::MultiIndex;
use lipspace::spaces::{hardy_check, v_norm, w_norm, HalfspaceBox, SpaceParams};

fn field(x: &[f64], beta: &MultiIndex) -> f64 {
    // u = x2^2 on the planar half-space box
    match (beta[0], beta[1]) {
        (0, 0) => x[1] * x[1],
        (0, 1) => 2.0 * x[1],
        (0, 2) => 2.0,
        _ => 0.0,
    }
}

fn main() {
    let bx = HalfspaceBox::unit(2);
    for &(p, a) in &[(2.0, 0.0), (2.0, 0.3), (4.0, 0.1)] {
        let params = SpaceParams::new(p, a, 2).unwrap();
        let strong = v_norm(&bx, &params, 24, field).unwrap();
        let top = w_norm(&bx, &params, 24, field).unwrap();
        println!(
            "p={p} a={a} s={:.3}: strong norm {strong:.6}, top-derivative norm {top:.6}",
            params.s()
        );
    }

    println!();
    println!("Hardy ratio against the sharp constant 1/s:");
    let params = SpaceParams::new(2.0, 0.2, 1).unwrap();
    let s = params.s();
    for eps in [0.5, 0.1, 0.02] {
        let rep = hardy_check(
            &params,
            move |x: f64| x.powf(s + eps),
            move |x: f64| (s + eps) * x.powf(s + eps - 1.0),
        )
        .unwrap();
        println!(
            "  u = x^(s+{eps}): ratio {:.4}  (sharp bound {:.4})",
            rep.ratio, rep.sharp_constant
        );
    }
}
