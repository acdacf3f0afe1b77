//! Half-space Green-function residuals: after subtracting the whole-space
//! fundamental solution, mixed derivatives of the remaining (regular) part
//! decay against the anchor power |x - y*|, y* the reflected pole.

use lipspace::green::{residual_decay_check, ModelKind, ModelOperator};

fn main() {
    let op = ModelOperator::new(ModelKind::Laplace, 2).unwrap();
    println!("planar Laplace: normal-normal residual derivative at separation t");
    println!("{:>6} {:>13} {:>13}", "t", "value", "value * |x-y*|^2");
    for t in [1.0, 2.0, 4.0, 8.0] {
        let rep = residual_decay_check(&op, &[(vec![0.0, 1.0], vec![t, 1.0])]).unwrap();
        let row = rep
            .rows
            .iter()
            .find(|r| r.alpha == [0, 1] && r.beta == [0, 1])
            .unwrap();
        println!("{t:>6.1} {:>13.5e} {:>13.6}", row.value, row.product);
    }
    println!("(constant product = pure power decay; 1/(2pi) = {:.6})", 0.5 / std::f64::consts::PI);

    let op = ModelOperator::new(ModelKind::Bilaplace, 3).unwrap();
    let mut pairs = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            pairs.push((
                vec![0.0, 0.0, 0.5 + 0.2 * i as f64],
                vec![0.3 * j as f64, 0.0, 0.5 + 0.15 * j as f64],
            ));
        }
    }
    let rep = residual_decay_check(&op, &pairs).unwrap();
    println!();
    println!(
        "spatial bilaplace over a 6x6 pair grid: sup product {:.5}, derivative drift {:.2e}",
        rep.sup_product, rep.max_fd_drift
    );
}
