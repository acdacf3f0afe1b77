//! Mean-oscillation seminorms of boundary data: the Heaviside jump comes
//! out at exactly 1/2, and the gradient of a sawtooth graph stays bounded
//! no matter how many teeth it has.

use lipspace::geometry::{bmo_seminorm, star_oscillation, GraphDomain, Sample};

fn heaviside(samples: usize) -> Vec<Sample> {
    let h = 1.0 / samples as f64;
    (0..samples)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            Sample::scalar([x, 0.0, 0.0], h, if x < 0.5 { 0.0 } else { 1.0 })
        })
        .collect()
}

fn slope_samples(dom: &GraphDomain, count: usize) -> Vec<Sample> {
    let h = dom.cell_l / count as f64;
    (0..count)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            Sample::scalar([x, 0.0, 0.0], h, dom.phi_grad(&[x])[0])
        })
        .collect()
}

fn main() {
    let radii = [0.05, 0.1, 0.2];

    let step = bmo_seminorm(&heaviside(512), &radii).unwrap();
    println!("Heaviside seminorm: {:.5}", step.seminorm);
    for (r, osc) in &step.radius_table {
        println!("  radius {r:.2}: sup oscillation {osc:.5}");
    }

    println!();
    println!("sawtooth gradient seminorms (slope 0.7, varying teeth):");
    for teeth in [1usize, 2, 4, 8] {
        let dom = GraphDomain::sawtooth(0.7, teeth, 1.0, 1.0, 128);
        let rep = bmo_seminorm(&slope_samples(&dom, 512), &radii).unwrap();
        println!("  {teeth} teeth: {:.5}", rep.seminorm);
    }

    // the vanishing-oscillation functional on a shrinking schedule
    let dom = GraphDomain::sawtooth(0.7, 2, 1.0, 1.0, 128);
    let samples = slope_samples(&dom, 512);
    let star = star_oscillation(&samples, &[0.2, 0.1, 0.05, 0.025]).unwrap();
    println!();
    println!("sawtooth gradient star functional: {star:.5} (stays positive: not VMO)");
}
