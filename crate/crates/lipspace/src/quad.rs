//! One-dimensional quadrature: Gauss–Legendre rules and adaptive Simpson.

use crate::error::{Error, Result};

/// Nodes and weights of the k-point Gauss–Legendre rule on [-1, 1].
///
/// Nodes are the roots of the Legendre polynomial P_k, found by Newton
/// iteration from the Chebyshev initial guess; weights 2/((1-x²)P_k'(x)²).
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1, "rule order must be positive");
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let m = k.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_k and P_k' by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if k == 1 { x } else { p1 };
            dp = k as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[k - 1 - i] = x;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre integration of f over [a, b] with a k-point rule.
pub fn gl_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, k: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(k);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        s += w * f(c + h * x);
    }
    s * h
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    if !(left.is_finite() && right.is_finite() && whole.is_finite()) {
        return Err(Error::Numeric(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "adaptive quadrature failed to converge on [{a}, {b}]"
        )));
    }
    let l = adapt(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)?;
    let r = adapt(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Adaptive Simpson integration of f over the finite interval [a, b].
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(b > a) {
        return if b == a {
            Ok(0.0)
        } else {
            Err(Error::Parameter("empty integration interval".into()))
        };
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    adapt(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Adaptive integration over [a, ∞) by the substitution t = a + u/(1-u).
pub fn adaptive_to_infinity(f: &dyn Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    let g = move |u: f64| {
        let one_minus = 1.0 - u;
        let t = a + u / one_minus;
        f(t) / (one_minus * one_minus)
    };
    adaptive(&g, 0.0, 1.0 - 1e-12, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_is_exact_on_polynomials() {
        // 5-point rule integrates degree ≤ 9 exactly
        let f = |x: f64| 3.0 * x.powi(8) - x.powi(3) + 2.0;
        let got = gl_integrate(&f, -1.0, 1.0, 5);
        let exact = 3.0 * 2.0 / 9.0 + 4.0;
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn gl_weights_sum_to_interval() {
        let (_, w) = gauss_legendre(64);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_log_integral() {
        // ∫₁² dy/(1+y) = ln(3/2)
        let v = adaptive(&|y| 1.0 / (1.0 + y), 1.0, 2.0, 1e-12).unwrap();
        assert!((v - (1.5f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_tail_integral() {
        // ∫₀^∞ (t+1)^{-5/2} dt = 2/3
        let v = adaptive_to_infinity(&|t| (t + 1.0).powf(-2.5), 0.0, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }
}
