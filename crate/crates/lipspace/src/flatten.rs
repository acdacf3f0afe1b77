//! Smoothing extension of a Lipschitz graph function into the half-space and
//! the induced bi-Lipschitz change of variables that straightens the graph.
//!
//! The extension is (Tφ)(x′, x_n) = ∫ ζ(t) φ(x′ + x_n t) dt with ζ a smooth
//! bump on the unit ball. Derivatives of order two fall on ζ through
//! integration by parts, so only the (piecewise-constant) gradient of φ is
//! ever sampled.

use crate::error::{Error, Result};
use crate::geometry::{bmo_seminorm, GraphDomain, Sample};
use crate::quad::gauss_legendre;

/// Smooth bump ζ(t) = c · exp(−1/(1−|t|²)) on |t| < 1, normalized so that
/// ∫ζ = 1, together with the tensor Gauss–Legendre grid used against it.
#[derive(Debug, Clone)]
pub struct Mollifier {
    pub dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    norm_const: f64,
}

fn bump_raw(t2: f64) -> f64 {
    if t2 < 1.0 {
        (-1.0 / (1.0 - t2)).exp()
    } else {
        0.0
    }
}

impl Mollifier {
    pub fn new(dim: usize, nodes_per_dim: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::Parameter("mollifier dimension must be 1 or 2".into()));
        }
        if nodes_per_dim < 8 {
            return Err(Error::Parameter("need at least 8 quadrature nodes per dim".into()));
        }
        let (nodes, weights) = gauss_legendre(nodes_per_dim);
        let mut m = Mollifier { dim, nodes, weights, norm_const: 1.0 };
        let raw = m.integrate(|t| m.zeta_unnormalized(t));
        m.norm_const = 1.0 / raw;
        Ok(m)
    }

    fn zeta_unnormalized(&self, t: &[f64]) -> f64 {
        bump_raw(t.iter().map(|v| v * v).sum())
    }

    pub fn zeta(&self, t: &[f64]) -> f64 {
        self.norm_const * self.zeta_unnormalized(t)
    }

    /// ∇ζ(t); each component is ζ(t) · (−2 t_j / (1−|t|²)²).
    pub fn zeta_grad(&self, t: &[f64]) -> Vec<f64> {
        let t2: f64 = t.iter().map(|v| v * v).sum();
        if t2 >= 1.0 {
            return vec![0.0; self.dim];
        }
        let z = self.zeta(t);
        let g = 1.0 - t2;
        t.iter().map(|v| z * (-2.0 * v / (g * g))).collect()
    }

    /// Integral of f over the unit ball: Gauss–Legendre on (−1,1) for dim 1,
    /// Gauss–Legendre radial times uniform angular grid for dim 2 (the
    /// angular rule is spectrally accurate for periodic integrands, so the
    /// radially flat bump is integrated to near machine precision).
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        match self.dim {
            1 => self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(t, w)| w * f(&[*t]))
                .sum(),
            _ => {
                let sectors = 2 * self.nodes.len();
                let dth = std::f64::consts::TAU / sectors as f64;
                let mut acc = 0.0;
                for (t, w) in self.nodes.iter().zip(&self.weights) {
                    let r = 0.5 * (t + 1.0);
                    let wr = 0.5 * w * r * dth;
                    for j in 0..sectors {
                        let th = (j as f64 + 0.5) * dth;
                        acc += wr * f(&[r * th.cos(), r * th.sin()]);
                    }
                }
                acc
            }
        }
    }

    /// Deviation of the discrete ∫ζ from one on a finer grid.
    pub fn normalization_defect(&self) -> f64 {
        let fine = Mollifier::new(self.dim, self.nodes.len() + 32).unwrap();
        (fine.integrate(|t| self.zeta(t)) - 1.0).abs()
    }
}

/// Composite Gauss–Legendre integral of f(t)·(kernel in t) over (−1,1) with
/// breakpoints wherever x′ + x_n t crosses a grid node of φ, so piecewise
/// structure never degrades the quadrature (n = 2 only).
fn integrate_split<F: Fn(f64) -> f64>(dom: &GraphDomain, xp: f64, xn: f64, f: F) -> f64 {
    let d = dom.cell_l / dom.grid_m as f64;
    let mut cuts = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
    let k_lo = ((xp - xn) / d).ceil() as isize;
    let k_hi = ((xp + xn) / d).floor() as isize;
    for k in k_lo..=k_hi {
        let t = (k as f64 * d - xp) / xn;
        if t > -1.0 + 1e-14 && t < 1.0 - 1e-14 {
            cuts.push(t);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (gn, gw) = gauss_legendre(24);
    let mut acc = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 1e-15 {
            continue;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (t, w) in gn.iter().zip(&gw) {
            acc += w * half * f(mid + half * t);
        }
    }
    acc
}

fn check_point(dom: &GraphDomain, moll: &Mollifier, x: &[f64]) -> Result<()> {
    if moll.dim != dom.n - 1 {
        return Err(Error::Parameter("mollifier dimension must match the graph".into()));
    }
    if !(x[dom.n - 1] > 0.0) {
        return Err(Error::Domain("extension point must have positive height".into()));
    }
    Ok(())
}

/// (Tφ)(x′, x_n) = ∫ ζ(t) φ(x′ + x_n t) dt for x_n > 0. Reproduces φ exactly
/// wherever φ is affine on the ball of radius x_n around x′.
pub fn gagliardo_extend(dom: &GraphDomain, moll: &Mollifier, x: &[f64]) -> Result<f64> {
    check_point(dom, moll, x)?;
    let xn = x[dom.n - 1];
    if dom.n == 2 {
        Ok(integrate_split(dom, x[0], xn, |t| {
            moll.zeta(&[t]) * dom.phi_eval(&[x[0] + xn * t])
        }))
    } else {
        Ok(moll.integrate(|t| moll.zeta(t) * dom.phi_eval(&[x[0] + xn * t[0], x[1] + xn * t[1]])))
    }
}

/// Gradient of Tφ: horizontal entries ∫ζ ∂_jφ, vertical entry ∫ζ (t·∇φ).
pub fn gagliardo_grad(dom: &GraphDomain, moll: &Mollifier, x: &[f64]) -> Result<Vec<f64>> {
    check_point(dom, moll, x)?;
    let xn = x[dom.n - 1];
    let mut out = vec![0.0; dom.n];
    if dom.n == 2 {
        out[0] = integrate_split(dom, x[0], xn, |t| {
            moll.zeta(&[t]) * dom.phi_grad(&[x[0] + xn * t])[0]
        });
        out[1] = integrate_split(dom, x[0], xn, |t| {
            moll.zeta(&[t]) * t * dom.phi_grad(&[x[0] + xn * t])[0]
        });
    } else {
        for j in 0..2 {
            out[j] = moll.integrate(|t| {
                moll.zeta(t) * dom.phi_grad(&[x[0] + xn * t[0], x[1] + xn * t[1]])[j]
            });
        }
        out[2] = moll.integrate(|t| {
            let g = dom.phi_grad(&[x[0] + xn * t[0], x[1] + xn * t[1]]);
            moll.zeta(t) * (t[0] * g[0] + t[1] * g[1])
        });
    }
    Ok(out)
}

/// Hessian of Tφ via integration by parts in t: every second derivative is a
/// kernel built from ζ and ∇ζ paired with ∇φ minus its ζ-weighted mean, and
/// carries the 1/x_n factor explicitly.
pub fn gagliardo_hessian(dom: &GraphDomain, moll: &Mollifier, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_point(dom, moll, x)?;
    let n = dom.n;
    let xn = x[n - 1];
    let dim = n - 1;
    // ζ-weighted mean of each ∂_iφ over the ball, the constant whose
    // subtraction turns the kernels into mean-oscillation pairings
    let grad = gagliardo_grad(dom, moll, x)?;
    let mut h = vec![vec![0.0; n]; n];
    let pair = |kernel: &dyn Fn(&[f64]) -> f64, comp: usize| -> f64 {
        let c = grad[comp];
        if n == 2 {
            -1.0 / xn
                * integrate_split(dom, x[0], xn, |t| {
                    kernel(&[t]) * (dom.phi_grad(&[x[0] + xn * t])[0] - c)
                })
        } else {
            -1.0 / xn
                * moll.integrate(|t| {
                    kernel(t) * (dom.phi_grad(&[x[0] + xn * t[0], x[1] + xn * t[1]])[comp] - c)
                })
        }
    };
    // horizontal-horizontal: ∂_k∂_jT = −(1/x_n)∫ ∂_kζ (∂_jφ − c_j)
    for j in 0..dim {
        for k in 0..dim {
            let kernel = move |t: &[f64]| {
                let g = 1.0 - t.iter().map(|v| v * v).sum::<f64>();
                if g <= 0.0 {
                    0.0
                } else {
                    bump_raw(1.0 - g) * (-2.0 * t[k] / (g * g))
                }
            };
            let nc = moll.norm_const;
            h[j][k] = pair(&move |t: &[f64]| nc * kernel(t), j);
        }
    }
    // vertical-horizontal: ∂_n∂_jT = −(1/x_n)∫ ∇·(tζ) (∂_jφ − c_j)
    let div_tz = |m: &Mollifier, t: &[f64]| -> f64 {
        let z = m.zeta(t);
        let zg = m.zeta_grad(t);
        let tdg: f64 = t.iter().zip(&zg).map(|(a, b)| a * b).sum();
        m.dim as f64 * z + tdg
    };
    for j in 0..dim {
        let v = pair(&|t: &[f64]| div_tz(moll, t), j);
        h[n - 1][j] = v;
        h[j][n - 1] = v;
        // symmetrize the horizontal block against the transposed kernel
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let s = 0.5 * (h[j][k] + h[k][j]);
            h[j][k] = s;
            h[k][j] = s;
        }
    }
    // vertical-vertical: sum over i of −(1/x_n)∫ [ (dim+1) t_iζ + t_i (t·∇ζ) ] (∂_iφ − c_i)
    let mut acc = 0.0;
    for i in 0..dim {
        let kernel = |t: &[f64]| -> f64 {
            let z = moll.zeta(t);
            let zg = moll.zeta_grad(t);
            let tdg: f64 = t.iter().zip(&zg).map(|(a, b)| a * b).sum();
            (moll.dim as f64 + 1.0) * t[i] * z + t[i] * tdg
        };
        acc += pair(&kernel, i);
    }
    h[n - 1][n - 1] = acc;
    Ok(h)
}

/// Straightening map λ(x′, x_n) = (x′, κ₀ x_n + Tφ(x′, x_n)) carrying the
/// half-space onto the region above the graph.
#[derive(Debug, Clone)]
pub struct Flattening {
    pub dom: GraphDomain,
    pub moll: Mollifier,
    pub kappa0: f64,
}

impl Flattening {
    /// Default vertical dilation κ₀ = 1 + 4M keeps the map monotone with a
    /// margin of at least 1 + 3M in the vertical derivative.
    pub fn new(dom: GraphDomain, nodes_per_dim: usize) -> Result<Self> {
        let moll = Mollifier::new(dom.n - 1, nodes_per_dim)?;
        let kappa0 = 1.0 + 4.0 * dom.lip_const();
        Ok(Flattening { dom, moll, kappa0 })
    }

    /// Forward map λ; input lives in the open half-space x_n > 0.
    pub fn lambda_map(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dom.n;
        let t = gagliardo_extend(&self.dom, &self.moll, x)?;
        let mut out = x[..n].to_vec();
        out[n - 1] = self.kappa0 * x[n - 1] + t;
        Ok(out)
    }

    /// Inverse map κ: bisection bracket then Newton polish on the strictly
    /// increasing vertical profile x_n ↦ κ₀ x_n + Tφ(x′, x_n).
    pub fn kappa_map(&self, cap_x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dom.n;
        let xp = &cap_x[..n - 1];
        let target = cap_x[n - 1];
        let phi0 = self.dom.phi_eval(xp);
        if target <= phi0 {
            return Err(Error::Domain("point lies on or below the graph".into()));
        }
        let phi_min = self.dom.phi.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut lo = 0.0f64;
        let mut hi = (target - phi_min) / self.kappa0 + 1.0;
        let g = |xn: f64| -> Result<f64> {
            let mut x = xp.to_vec();
            x.push(xn);
            Ok(self.kappa0 * xn + gagliardo_extend(&self.dom, &self.moll, &x)? - target)
        };
        // bisection: g(0+) < 0, g(hi) ≥ κ₀ > 0
        let mut mid = 0.5 * hi;
        for _ in 0..48 {
            mid = 0.5 * (lo + hi);
            if g(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Newton polish with the analytic vertical derivative
        let mut xn = mid.max(1e-300);
        for _ in 0..4 {
            let mut x = xp.to_vec();
            x.push(xn);
            let gp = self.kappa0 + gagliardo_grad(&self.dom, &self.moll, &x)?[n - 1];
            let gv = g(xn)?;
            let step = gv / gp;
            let next = xn - step;
            if next > 0.0 {
                xn = next;
            }
            if step.abs() < 1e-14 * (1.0 + xn) {
                break;
            }
        }
        let mut out = xp.to_vec();
        out.push(xn);
        Ok(out)
    }

    /// Jacobian of λ: identity block on top, (∇′Tφ, κ₀ + ∂_nTφ) bottom row.
    pub fn jacobian_lambda(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.dom.n;
        let g = gagliardo_grad(&self.dom, &self.moll, x)?;
        let mut jac = vec![vec![0.0; n]; n];
        for (i, row) in jac.iter_mut().enumerate().take(n - 1) {
            row[i] = 1.0;
        }
        for j in 0..n - 1 {
            jac[n - 1][j] = g[j];
        }
        jac[n - 1][n - 1] = self.kappa0 + g[n - 1];
        Ok(jac)
    }

    pub fn jacobian_det(&self, x: &[f64]) -> Result<f64> {
        let n = self.dom.n;
        Ok(self.jacobian_lambda(x)?[n - 1][n - 1])
    }
}

/// Measured suprema of the extension estimates across a dyadic height sweep.
#[derive(Debug, Clone)]
pub struct ExtensionReport {
    /// Mean-oscillation seminorm of ∇φ used as the reference scale.
    pub grad_bmo: f64,
    pub heights: Vec<f64>,
    /// sup over x′ of |∇Tφ| per height (bounded, order-one estimate).
    pub sup_grad: Vec<f64>,
    /// sup over x′ of ‖D²Tφ‖ per height (should decay like 1/x_n).
    pub sup_hess: Vec<f64>,
    /// sup over x′ of |Tφ − φ| per height (should decay like x_n).
    pub sup_gap: Vec<f64>,
    /// Log-log slope of sup_hess against height (≈ −1).
    pub exponent_hess: f64,
    /// Log-log slope of sup_gap against height (≈ +1).
    pub exponent_gap: f64,
    /// Mean-oscillation seminorm of ∇Tφ sampled over the half-space box.
    pub grad_extension_bmo: f64,
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Sweep dyadic heights and measure the extension estimates against the
/// mean-oscillation seminorm of ∇φ (n = 2).
pub fn verify_extension_estimates(
    dom: &GraphDomain,
    moll: &Mollifier,
    levels: usize,
    samples_per_height: usize,
) -> Result<ExtensionReport> {
    if dom.n != 2 {
        return Err(Error::Unsupported("estimate sweep runs on planar graphs".into()));
    }
    if levels < 3 {
        return Err(Error::Parameter("need at least 3 height levels".into()));
    }
    // reference seminorm of the facet gradient over horizontal balls
    let m = 512usize;
    let hstep = dom.cell_l / m as f64;
    let grad_samples: Vec<Sample> = (0..m)
        .map(|i| {
            let xp = (i as f64 + 0.5) * hstep;
            Sample::scalar([xp, 0.0, 0.0], hstep, dom.phi_grad(&[xp])[0])
        })
        .collect();
    let radii: Vec<f64> = (2..7).map(|k| dom.cell_l / (1u32 << k) as f64).collect();
    let grad_bmo = bmo_seminorm(&grad_samples, &radii)?.seminorm;

    let mut heights = Vec::with_capacity(levels);
    let mut sup_grad = Vec::with_capacity(levels);
    let mut sup_hess = Vec::with_capacity(levels);
    let mut sup_gap = Vec::with_capacity(levels);
    for k in 0..levels {
        let xn = dom.cell_l / (1u64 << (k + 2)) as f64;
        let mut sg: f64 = 0.0;
        let mut sh: f64 = 0.0;
        let mut sp: f64 = 0.0;
        // uniform sweep plus points pinned near the facet joints, where the
        // suprema live once the height drops below the facet size
        let delta = dom.cell_l / dom.grid_m as f64;
        let mut probes: Vec<f64> = (0..samples_per_height)
            .map(|i| (i as f64 + 0.5) * dom.cell_l / samples_per_height as f64)
            .collect();
        for g in 0..dom.grid_m {
            for off in [-0.5, 0.0, 0.5] {
                let xp = (g as f64 * delta + off * xn).rem_euclid(dom.cell_l);
                probes.push(xp);
            }
        }
        for &xp in &probes {
            let x = [xp, xn];
            let g = gagliardo_grad(dom, moll, &x)?;
            let hess = gagliardo_hessian(dom, moll, &x)?;
            let tval = gagliardo_extend(dom, moll, &x)?;
            sg = sg.max((g[0] * g[0] + g[1] * g[1]).sqrt());
            let hnorm = hess
                .iter()
                .flat_map(|r| r.iter())
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            sh = sh.max(hnorm);
            sp = sp.max((tval - dom.phi_eval(&[xp])).abs());
        }
        heights.push(xn);
        sup_grad.push(sg);
        sup_hess.push(sh);
        sup_gap.push(sp);
    }
    // oscillation of the extension gradient over a box of interior samples
    let gm = 20usize;
    let mut box_samples = Vec::with_capacity(gm * gm);
    for i in 0..gm {
        for j in 0..gm {
            let xp = (i as f64 + 0.5) * dom.cell_l / gm as f64;
            let xn = (j as f64 + 0.5) * 0.5 * dom.cell_l / gm as f64;
            let g = gagliardo_grad(dom, moll, &[xp, xn])?;
            box_samples.push(Sample {
                pos: [xp, xn, 0.0],
                weight: 1.0,
                value: g,
            });
        }
    }
    let box_radii: Vec<f64> = (2..6).map(|k| dom.cell_l / (1u32 << k) as f64).collect();
    let grad_extension_bmo = bmo_seminorm(&box_samples, &box_radii)?.seminorm;

    let exponent_hess = loglog_slope(&heights, &sup_hess);
    let exponent_gap = loglog_slope(&heights, &sup_gap);
    Ok(ExtensionReport {
        grad_bmo,
        heights,
        sup_grad,
        sup_hess,
        sup_gap,
        exponent_hess,
        exponent_gap,
        grad_extension_bmo,
    })
}
