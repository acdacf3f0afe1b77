//! Arrays of compatible boundary derivatives on Lipschitz graph boundaries:
//! traces, Taylor remainders and their Besov norms, conversion between
//! derivative arrays and pure normal data, cutoff multiplication, a mollified
//! vertical lift, and the kernel-averaged interior extension.

use crate::error::{Error, Result};
use crate::flatten::Mollifier;
use crate::geometry::{regularized_distance, GraphDomain};
use crate::multiindex::{
    add, checked_sub, enumerate, enumerate_exact, factorial, mi_factorial, monomial, order,
    position, unit, MultiIndex,
};
use crate::quad::gauss_legendre;
use crate::util::seeded_rng;
use rand::Rng;
use serde::Serialize;

/// Cell-centered parameter grid along a graph boundary. Node positions sit
/// strictly inside facets, so each node carries the normal and metric of a
/// single facet.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub dom: GraphDomain,
    pub res: usize,
}

impl BoundaryGrid {
    pub fn new(dom: GraphDomain, res: usize) -> Result<Self> {
        if res < 4 {
            return Err(Error::Resolution("boundary grid needs at least 4 cells".into()));
        }
        Ok(BoundaryGrid { dom, res })
    }

    pub fn count(&self) -> usize {
        if self.dom.n == 2 {
            self.res
        } else {
            self.res * self.res
        }
    }

    fn step(&self) -> f64 {
        self.dom.cell_l / self.res as f64
    }

    pub fn param(&self, idx: usize) -> [f64; 2] {
        let h = self.step();
        if self.dom.n == 2 {
            [(idx as f64 + 0.5) * h, 0.0]
        } else {
            let i = idx / self.res;
            let j = idx % self.res;
            [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]
        }
    }

    pub fn node_pos(&self, idx: usize) -> [f64; 3] {
        let p = self.param(idx);
        if self.dom.n == 2 {
            [p[0], self.dom.phi_eval(&p[..1]), 0.0]
        } else {
            [p[0], p[1], self.dom.phi_eval(&p)]
        }
    }

    /// Outward unit normal of the facet under the node.
    pub fn normal(&self, idx: usize) -> [f64; 3] {
        let p = self.param(idx);
        let g = self.dom.phi_grad(&p);
        if self.dom.n == 2 {
            let nr = (1.0 + g[0] * g[0]).sqrt();
            [g[0] / nr, -1.0 / nr, 0.0]
        } else {
            let nr = (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt();
            [g[0] / nr, g[1] / nr, -1.0 / nr]
        }
    }

    /// Surface-measure weight of the node cell.
    pub fn weight(&self, idx: usize) -> f64 {
        let p = self.param(idx);
        let g = self.dom.phi_grad(&p);
        let h = self.step();
        if self.dom.n == 2 {
            h * (1.0 + g[0] * g[0]).sqrt()
        } else {
            h * h * (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt()
        }
    }

    /// Derivative of node values along one parameter axis: central while the
    /// surface stays smooth across the stencil (equal facet gradients),
    /// one-sided second order when a crease or the edge of the covered
    /// parameter patch blocks one direction, two-point one-sided when the
    /// facet strip is too narrow for that.
    fn param_derivative(&self, values: &[f64], axis: usize) -> Vec<f64> {
        let h = self.step();
        let res = self.res as isize;
        let mut out = vec![0.0; values.len()];
        for idx in 0..values.len() {
            let (i, j) = if self.dom.n == 2 {
                (idx as isize, 0isize)
            } else {
                ((idx / self.res) as isize, (idx % self.res) as isize)
            };
            let g_me = self.dom.phi_grad(&self.param(idx));
            // a step is usable if it stays on the patch and on the same
            // smooth piece of the graph
            let smooth = |step: isize| -> bool {
                let pos = if axis == 0 { i + step } else { j + step };
                if pos < 0 || pos >= res {
                    return false;
                }
                let mut p = self.param(idx);
                p[axis] += step as f64 * h;
                let g = self.dom.phi_grad(&p);
                (g[0] - g_me[0]).abs() < 1e-13 && (g[1] - g_me[1]).abs() < 1e-13
            };
            let val = |di: isize| -> f64 {
                let (ni, nj) = if axis == 0 { (i + di, j) } else { (i, j + di) };
                let iw = ni.rem_euclid(res) as usize;
                if self.dom.n == 2 {
                    values[iw]
                } else {
                    values[iw * self.res + nj.rem_euclid(res) as usize]
                }
            };
            out[idx] = if smooth(1) && smooth(-1) {
                (val(1) - val(-1)) / (2.0 * h)
            } else if smooth(1) && smooth(2) {
                (-3.0 * val(0) + 4.0 * val(1) - val(2)) / (2.0 * h)
            } else if smooth(-1) && smooth(-2) {
                (3.0 * val(0) - 4.0 * val(-1) + val(-2)) / (2.0 * h)
            } else if smooth(1) {
                (val(1) - val(0)) / h
            } else if smooth(-1) {
                (val(0) - val(-1)) / h
            } else {
                // isolated strip: fall back to a wrapped central difference
                (val(1) - val(-1)) / (2.0 * h)
            };
        }
        out
    }

    /// Tangential gradient of node values as ambient vectors, exactly
    /// orthogonal to the facet normal at every node.
    pub fn tangential_gradient(&self, values: &[f64]) -> Vec<[f64; 3]> {
        let n = self.dom.n;
        if n == 2 {
            let df = self.param_derivative(values, 0);
            (0..self.count())
                .map(|idx| {
                    let g = self.dom.phi_grad(&self.param(idx));
                    let met = 1.0 + g[0] * g[0];
                    // τ = (1, φ′), ∇_tan f = (∂f̃ / G) τ
                    [df[idx] / met, df[idx] * g[0] / met, 0.0]
                })
                .collect()
        } else {
            let d0 = self.param_derivative(values, 0);
            let d1 = self.param_derivative(values, 1);
            (0..self.count())
                .map(|idx| {
                    let g = self.dom.phi_grad(&self.param(idx));
                    // metric G = I + ∇φ ∇φᵀ, inverted in closed form
                    let (a, b, c) = (1.0 + g[0] * g[0], g[0] * g[1], 1.0 + g[1] * g[1]);
                    let det = a * c - b * b;
                    let gi = [[c / det, -b / det], [-b / det, a / det]];
                    let coef0 = gi[0][0] * d0[idx] + gi[0][1] * d1[idx];
                    let coef1 = gi[1][0] * d0[idx] + gi[1][1] * d1[idx];
                    // tangent basis τ_k = (e_k, ∂_kφ)
                    [coef0, coef1, coef0 * g[0] + coef1 * g[1]]
                })
                .collect()
        }
    }
}

/// Family {f_α}_{|α| ≤ m−1} of boundary functions on a shared grid.
#[derive(Debug, Clone)]
pub struct WhitneyArray {
    pub grid: BoundaryGrid,
    pub m: usize,
    /// Component values, indexed in step with `index_set()`.
    pub comps: Vec<Vec<f64>>,
}

impl WhitneyArray {
    pub fn index_set(&self) -> Vec<MultiIndex> {
        enumerate(self.grid.dom.n, self.m - 1)
    }

    pub fn comp(&self, alpha: MultiIndex) -> Result<&[f64]> {
        let set = self.index_set();
        let pos = position(&set, alpha)
            .ok_or_else(|| Error::Index(format!("component {alpha:?} outside the array")))?;
        Ok(&self.comps[pos])
    }

    /// Piecewise-linear periodic evaluation of one component at an arbitrary
    /// boundary parameter.
    pub fn comp_interp(&self, alpha: MultiIndex, param: &[f64]) -> Result<f64> {
        let vals = self.comp(alpha)?;
        let res = self.grid.res;
        let h = self.grid.dom.cell_l / res as f64;
        if self.grid.dom.n == 2 {
            let u = param[0] / h - 0.5;
            let i = u.floor();
            let t = u - i;
            let a = vals[(i as isize).rem_euclid(res as isize) as usize];
            let b = vals[(i as isize + 1).rem_euclid(res as isize) as usize];
            Ok(a + t * (b - a))
        } else {
            let u = param[0] / h - 0.5;
            let v = param[1] / h - 0.5;
            let (iu, iv) = (u.floor(), v.floor());
            let (tu, tv) = (u - iu, v - iv);
            let atv = |di: isize, dj: isize| -> f64 {
                let iw = (iu as isize + di).rem_euclid(res as isize) as usize;
                let jw = (iv as isize + dj).rem_euclid(res as isize) as usize;
                vals[iw * res + jw]
            };
            let a = atv(0, 0) + tu * (atv(1, 0) - atv(0, 0));
            let b = atv(0, 1) + tu * (atv(1, 1) - atv(0, 1));
            Ok(a + tv * (b - a))
        }
    }
}

/// Pure normal data {g_k}_{0 ≤ k ≤ m−1} on a boundary grid.
#[derive(Debug, Clone)]
pub struct DirichletData {
    pub grid: BoundaryGrid,
    pub m: usize,
    pub comps: Vec<Vec<f64>>,
}

/// Sample D^αU on the boundary nodes for all |α| ≤ m−1.
pub fn trace_array<F: Fn(&[f64], MultiIndex) -> f64>(
    grid: &BoundaryGrid,
    m: usize,
    field: F,
) -> WhitneyArray {
    let set = enumerate(grid.dom.n, m - 1);
    let comps = set
        .iter()
        .map(|&alpha| {
            (0..grid.count())
                .map(|idx| {
                    let pos = grid.node_pos(idx);
                    field(&pos[..grid.dom.n], alpha)
                })
                .collect()
        })
        .collect();
    WhitneyArray { grid: grid.clone(), m, comps }
}

/// Iterated directional derivatives along the frozen outward normal:
/// g_k = Σ_{|α|=k} (k!/α!) ν^α D^αU at each node.
pub fn normal_derivatives<F: Fn(&[f64], MultiIndex) -> f64>(
    grid: &BoundaryGrid,
    m: usize,
    field: F,
) -> DirichletData {
    let n = grid.dom.n;
    let mut comps = Vec::with_capacity(m);
    for k in 0..m {
        let mut vals = vec![0.0; grid.count()];
        for (idx, v) in vals.iter_mut().enumerate() {
            let nu = grid.normal(idx);
            let pos = grid.node_pos(idx);
            let mut acc = 0.0;
            for alpha in enumerate_exact(n, k) {
                acc += factorial(k) / mi_factorial(alpha)
                    * monomial(&nu, alpha)
                    * field(&pos[..n], alpha);
            }
            *v = acc;
        }
        comps.push(vals);
    }
    DirichletData { grid: grid.clone(), m, comps }
}

/// Collapse an array to pure normal data: g_k = Σ_{|α|=k} (k!/α!) ν^α f_α.
pub fn whitney_to_dirichlet(wa: &WhitneyArray) -> DirichletData {
    let n = wa.grid.dom.n;
    let set = wa.index_set();
    let mut comps = Vec::with_capacity(wa.m);
    for k in 0..wa.m {
        let mut vals = vec![0.0; wa.grid.count()];
        for alpha in enumerate_exact(n, k) {
            let pos = position(&set, alpha).unwrap();
            let coef = factorial(k) / mi_factorial(alpha);
            for (idx, v) in vals.iter_mut().enumerate() {
                let nu = wa.grid.normal(idx);
                *v += coef * monomial(&nu, alpha) * wa.comps[pos][idx];
            }
        }
        comps.push(vals);
    }
    DirichletData { grid: wa.grid.clone(), m: wa.m, comps }
}

/// Rebuild a full derivative array from pure normal data, order by order:
/// the ν^α g_ℓ part carries the new normal content and the correction sums
/// tangential derivatives of the components already built,
///   f_α = ν^α g_ℓ + (α!/ℓ!) Σ_{μ+δ+e_j=α, |θ|=|δ|}
///          (|δ|!/δ!)(|μ|!/μ!)(|θ|!/θ!) ν^{δ+θ} (∇_tan f_{μ+θ})_j.
pub fn dirichlet_to_whitney(dd: &DirichletData) -> Result<WhitneyArray> {
    let n = dd.grid.dom.n;
    let m = dd.m;
    let set = enumerate(n, m - 1);
    let count = dd.grid.count();
    let mut comps: Vec<Vec<f64>> = vec![vec![0.0; count]; set.len()];
    comps[0].copy_from_slice(&dd.comps[0]);
    // tangential gradients of finished components, computed lazily per order
    let mut tan: Vec<Option<Vec<[f64; 3]>>> = vec![None; set.len()];
    for ell in 1..m {
        // gradients of everything at order ℓ−1
        for (pos, &gamma) in set.iter().enumerate() {
            if order(gamma) == ell - 1 && tan[pos].is_none() {
                tan[pos] = Some(dd.grid.tangential_gradient(&comps[pos]));
            }
        }
        for &alpha in set.iter().filter(|a| order(**a) == ell) {
            let apos = position(&set, alpha).unwrap();
            let mut vals = vec![0.0; count];
            for (idx, v) in vals.iter_mut().enumerate() {
                let nu = dd.grid.normal(idx);
                *v = monomial(&nu, alpha) * dd.comps[ell][idx];
            }
            let scale = mi_factorial(alpha) / factorial(ell);
            for j in 0..n {
                let Some(ap) = checked_sub(alpha, unit(j)) else {
                    continue;
                };
                // δ ranges over sub-indices of α − e_j, μ is the rest
                for delta in enumerate(n, order(ap)) {
                    let Some(mu) = checked_sub(ap, delta) else {
                        continue;
                    };
                    let dord = order(delta);
                    let base = factorial(dord) / mi_factorial(delta) * factorial(order(mu))
                        / mi_factorial(mu);
                    for theta in enumerate_exact(n, dord) {
                        let gpos = position(&set, add(mu, theta)).unwrap();
                        let grads = tan[gpos].as_ref().ok_or_else(|| {
                            Error::Index("recursion touched an unbuilt component".into())
                        })?;
                        let coef =
                            scale * base * factorial(order(theta)) / mi_factorial(theta);
                        for (idx, v) in vals.iter_mut().enumerate() {
                            let nu = dd.grid.normal(idx);
                            *v += coef * monomial(&nu, add(delta, theta)) * grads[idx][j];
                        }
                    }
                }
            }
            comps[apos] = vals;
        }
    }
    Ok(WhitneyArray { grid: dd.grid.clone(), m, comps })
}

/// Taylor remainder of the array between two nodes:
/// R_α(X, Y) = f_α(X) − Σ_{|β| ≤ m−1−|α|} f_{α+β}(Y) (X−Y)^β / β!.
pub fn whitney_remainder(
    wa: &WhitneyArray,
    alpha: MultiIndex,
    x_idx: usize,
    y_idx: usize,
) -> Result<f64> {
    let n = wa.grid.dom.n;
    let set = wa.index_set();
    let apos = position(&set, alpha)
        .ok_or_else(|| Error::Index(format!("component {alpha:?} outside the array")))?;
    let x = wa.grid.node_pos(x_idx);
    let y = wa.grid.node_pos(y_idx);
    let diff = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let mut acc = wa.comps[apos][x_idx];
    for beta in enumerate(n, wa.m - 1 - order(alpha)) {
        let bpos = position(&set, add(alpha, beta)).unwrap();
        acc -= wa.comps[bpos][y_idx] * monomial(&diff, beta) / mi_factorial(beta);
    }
    Ok(acc)
}

/// Besov norm of the array: Σ_α ‖f_α‖_{L_p} plus, for each α, the double
/// integral of |R_α(X,Y)|^p / |X−Y|^{p(m−1+s−|α|) + (n−1)} over node pairs.
#[derive(Debug, Clone)]
pub struct WhitneyNormReport {
    pub lp_parts: Vec<f64>,
    pub seminorm_parts: Vec<f64>,
    pub total: f64,
}

pub fn whitney_besov_norm(wa: &WhitneyArray, p: f64, s: f64) -> Result<WhitneyNormReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter("smoothness s must lie in (0, 1)".into()));
    }
    let n = wa.grid.dom.n;
    let set = wa.index_set();
    let count = wa.grid.count();
    let weights: Vec<f64> = (0..count).map(|i| wa.grid.weight(i)).collect();
    let positions: Vec<[f64; 3]> = (0..count).map(|i| wa.grid.node_pos(i)).collect();
    let mut lp_parts = Vec::with_capacity(set.len());
    let mut seminorm_parts = Vec::with_capacity(set.len());
    for (pos, &alpha) in set.iter().enumerate() {
        let lp = wa.comps[pos]
            .iter()
            .zip(&weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        lp_parts.push(lp);
        let expo = p * (wa.m as f64 - 1.0 + s - order(alpha) as f64) + (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..count {
            for j in 0..count {
                if i == j {
                    continue;
                }
                let d2 = (0..3)
                    .map(|k| (positions[i][k] - positions[j][k]).powi(2))
                    .sum::<f64>();
                let r = whitney_remainder(wa, alpha, i, j)?;
                acc += weights[i] * weights[j] * r.abs().powf(p) / d2.sqrt().powf(expo);
            }
        }
        seminorm_parts.push(acc.powf(1.0 / p));
    }
    let total = lp_parts.iter().sum::<f64>() + seminorm_parts.iter().sum::<f64>();
    Ok(WhitneyNormReport { lp_parts, seminorm_parts, total })
}

/// Largest violation of the first-order chain-rule coupling along the graph:
/// ∂_j[f_α(X′, φ(X′))] − f_{α+e_j} − ∂_jφ · f_{α+e_n} over |α| ≤ m−2.
pub fn compat_check(wa: &WhitneyArray) -> Result<f64> {
    let n = wa.grid.dom.n;
    if wa.m < 2 {
        return Ok(0.0);
    }
    let set = wa.index_set();
    let mut worst: f64 = 0.0;
    for (pos, &alpha) in set.iter().enumerate() {
        if order(alpha) > wa.m - 2 {
            continue;
        }
        for j in 0..n - 1 {
            let dpar = wa.grid.param_derivative(&wa.comps[pos], j);
            let up = position(&set, add(alpha, unit(j))).unwrap();
            let vert = position(&set, add(alpha, unit(n - 1))).unwrap();
            for idx in 0..wa.grid.count() {
                let g = wa.grid.dom.phi_grad(&wa.grid.param(idx));
                let resid =
                    dpar[idx] - wa.comps[up][idx] - g[j] * wa.comps[vert][idx];
                worst = worst.max(resid.abs());
            }
        }
    }
    Ok(worst)
}

/// Multiply the array by a smooth window via the Leibniz rule:
/// (η f)_α = Σ_{β ≤ α} C(α, β) D^βη · f_{α−β}.
pub fn multiply_cutoff<F: Fn(&[f64], MultiIndex) -> f64>(
    wa: &WhitneyArray,
    eta: F,
) -> WhitneyArray {
    let set = wa.index_set();
    let count = wa.grid.count();
    let mut comps: Vec<Vec<f64>> = vec![vec![0.0; count]; set.len()];
    for (apos, &alpha) in set.iter().enumerate() {
        for beta in enumerate(wa.grid.dom.n, order(alpha)) {
            let Some(rest) = checked_sub(alpha, beta) else {
                continue;
            };
            let rpos = position(&set, rest).unwrap();
            let binom = mi_factorial(alpha) / (mi_factorial(beta) * mi_factorial(rest));
            for idx in 0..count {
                let pos = wa.grid.node_pos(idx);
                comps[apos][idx] += binom
                    * eta(&pos[..wa.grid.dom.n], beta)
                    * wa.comps[rpos][idx];
            }
        }
    }
    WhitneyArray { grid: wa.grid.clone(), m: wa.m, comps }
}

/// Mollified vertical lift of the array at an interior point:
/// F^ε_α(X) = Σ_{k ≤ m−1−|α|} (1/k!) [ (X_n−φ(·))^k f_{α+k e_n}(·) ] ∗ η_ε (X′).
pub fn mollified_lift(
    wa: &WhitneyArray,
    moll: &Mollifier,
    eps: f64,
    alpha: MultiIndex,
    x: &[f64],
) -> Result<f64> {
    let n = wa.grid.dom.n;
    if moll.dim != n - 1 {
        return Err(Error::Parameter("mollifier dimension must match the boundary".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Parameter("mollification scale must be positive".into()));
    }
    let kmax = wa
        .m
        .checked_sub(1 + order(alpha))
        .ok_or_else(|| Error::Index(format!("component {alpha:?} outside the array")))?;
    let xn = x[n - 1];
    let body = |yp: &[f64]| -> f64 {
        let phi = wa.grid.dom.phi_eval(yp);
        let mut acc = 0.0;
        let mut pow = 1.0;
        for k in 0..=kmax {
            let mut idxk = alpha;
            idxk[n - 1] += k;
            let f = wa.comp_interp(idxk, yp).unwrap_or(0.0);
            acc += pow / factorial(k) * f;
            pow *= xn - phi;
        }
        acc
    };
    if n == 2 {
        // composite quadrature with cuts at the φ grid and the value grid
        let cuts_from = |step: f64| -> Vec<f64> {
            let mut out = Vec::new();
            let lo = ((x[0] - eps) / step).ceil() as isize;
            let hi = ((x[0] + eps) / step).floor() as isize;
            for k in lo..=hi {
                let t = (k as f64 * step - x[0]) / eps;
                if t > -1.0 + 1e-13 && t < 1.0 - 1e-13 {
                    out.push(t);
                }
            }
            out
        };
        let mut cuts = vec![-1.0, 0.0, 1.0];
        cuts.extend(cuts_from(wa.grid.dom.cell_l / wa.grid.dom.grid_m as f64));
        cuts.extend(cuts_from(wa.grid.dom.cell_l / wa.grid.res as f64));
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let (gn, gw) = gauss_legendre(12);
        let mut acc = 0.0;
        for pair in cuts.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            let half = 0.5 * (pair[1] - pair[0]);
            if half < 1e-15 {
                continue;
            }
            for (t, w) in gn.iter().zip(&gw) {
                let tt = mid + half * t;
                acc += w * half * moll.zeta(&[tt]) * body(&[x[0] + eps * tt]);
            }
        }
        Ok(acc)
    } else {
        Ok(moll.integrate(|t| moll.zeta(t) * body(&[x[0] + eps * t[0], x[1] + eps * t[1]])))
    }
}

/// Smooth window: 1 on the unit ball, 0 outside radius 2.
fn window(r: f64) -> f64 {
    let chi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let up = chi(2.0 - r);
    let dn = chi(r - 1.0);
    if up + dn == 0.0 {
        0.0
    } else {
        up / (up + dn)
    }
}

/// Kernel-averaged interior extension of the array:
/// (E f)(X) = Σ_i w_i 𝒦(X, Y_i) Σ_{|α| ≤ m−1} f_α(Y_i)(X−Y_i)^α/α!,
/// where 𝒦 is the window at scale κ·ρ_reg(X), normalized to unit boundary
/// integral. Reproduces polynomials of degree ≤ m−1 exactly.
pub fn extend_besov(wa: &WhitneyArray, kappa: f64, x: &[f64]) -> Result<f64> {
    let n = wa.grid.dom.n;
    let rho = regularized_distance(&wa.grid.dom, x)?;
    let r = kappa * rho;
    let count = wa.grid.count();
    let set = wa.index_set();
    let mut wsum = 0.0;
    let mut acc = 0.0;
    let mut hits = 0usize;
    for idx in 0..count {
        let y = wa.grid.node_pos(idx);
        let d = (0..n)
            .map(|k| (x[k] - y[k]).powi(2))
            .sum::<f64>()
            .sqrt();
        let eta = window(d / r);
        if eta == 0.0 {
            continue;
        }
        hits += 1;
        let w = wa.grid.weight(idx) * eta;
        wsum += w;
        let mut diff = [0.0; 3];
        for k in 0..n {
            diff[k] = x[k] - y[k];
        }
        let mut taylor = 0.0;
        for (pos, &alpha) in set.iter().enumerate() {
            taylor += wa.comps[pos][idx] * monomial(&diff, alpha) / mi_factorial(alpha);
        }
        acc += w * taylor;
    }
    if hits < 8 {
        return Err(Error::Resolution(format!(
            "kernel window at scale {r:.3e} covers only {hits} boundary nodes"
        )));
    }
    Ok(acc / wsum)
}

/// Default window-scale multiplier for the kernel-averaged extension. The
/// averaging ball of radius 2κ·ρ_reg(X) has to straddle the nearest boundary
/// patch (distance ≈ ρ_reg) while staying proportional to the distance, and
/// steeper graphs need a wider ball to capture a patch of usable measure.
pub fn default_kernel_scale(dom: &GraphDomain) -> f64 {
    0.8 * (1.0 + dom.lip_const())
}

/// Nested central differences of the extension in ambient directions.
fn extension_derivative(
    wa: &WhitneyArray,
    kappa: f64,
    x: &[f64],
    gamma: MultiIndex,
    step: f64,
) -> Result<f64> {
    let Some(axis) = (0..wa.grid.dom.n).find(|&k| gamma[k] > 0) else {
        return extend_besov(wa, kappa, x);
    };
    let mut reduced = gamma;
    reduced[axis] -= 1;
    let mut fwd = x.to_vec();
    fwd[axis] += step;
    let mut bwd = x.to_vec();
    bwd[axis] -= step;
    let hi = extension_derivative(wa, kappa, &fwd, reduced, step)?;
    let lo = extension_derivative(wa, kappa, &bwd, reduced, step)?;
    Ok((hi - lo) / (2.0 * step))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionTraceRow {
    pub gamma: MultiIndex,
    /// sup over sampled nodes of |extrapolated D^γ(Eḟ) − f_γ|
    pub gap: f64,
    /// sup over sampled nodes of |f_γ|
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionTraceReport {
    pub rows: Vec<ExtensionTraceRow>,
    /// worst gap/scale over the array components
    pub worst_rel: f64,
}

/// Boundary extrapolation of every derivative of the kernel-averaged
/// extension against the array it was built from: D^γ(Eḟ) is formed by
/// central differences at heights t and t/2 above sampled nodes along the
/// normal, extrapolated linearly to the boundary, and compared with f_γ.
pub fn extension_trace_check(
    wa: &WhitneyArray,
    kappa: f64,
    t_far: f64,
    stride: usize,
) -> Result<ExtensionTraceReport> {
    if !(t_far > 0.0) {
        return Err(Error::Parameter("extrapolation height must be positive".into()));
    }
    if stride == 0 {
        return Err(Error::Parameter("node stride must be at least 1".into()));
    }
    let n = wa.grid.dom.n;
    let set = wa.index_set();
    let mut rows: Vec<ExtensionTraceRow> = set
        .iter()
        .map(|&gamma| ExtensionTraceRow { gamma, gap: 0.0, scale: 0.0 })
        .collect();
    // lateral margin keeping every finite-difference stencil point inside
    // the truncated cell
    let margin = t_far + wa.m as f64 * 0.2 * t_far;
    let mut sampled = 0usize;
    for idx in (0..wa.grid.count()).step_by(stride) {
        let pos = wa.grid.node_pos(idx);
        if (0..n - 1).any(|k| pos[k] < margin || pos[k] > wa.grid.dom.cell_l - margin) {
            continue;
        }
        sampled += 1;
        // the stored normal is outward; step against it into the domain
        let nu = wa.grid.normal(idx);
        let probe = |t: f64| -> Vec<f64> {
            (0..n).map(|k| pos[k] - t * nu[k]).collect()
        };
        for (c, &gamma) in set.iter().enumerate() {
            let step = 0.2 * t_far;
            let far = extension_derivative(wa, kappa, &probe(t_far), gamma, step)?;
            let near = extension_derivative(wa, kappa, &probe(0.5 * t_far), gamma, 0.5 * step)?;
            let extrapolated = 2.0 * near - far;
            let target = wa.comps[c][idx];
            rows[c].gap = rows[c].gap.max((extrapolated - target).abs());
            rows[c].scale = rows[c].scale.max(target.abs());
        }
    }
    if sampled == 0 {
        return Err(Error::Degenerate(
            "no boundary node clears the extrapolation margin".into(),
        ));
    }
    let worst_rel = rows
        .iter()
        .map(|r| if r.scale > 0.0 { r.gap / r.scale } else { r.gap })
        .fold(0.0f64, f64::max);
    Ok(ExtensionTraceReport { rows, worst_rel })
}

/// Check the chord-integral form of the remainder against an analytic field:
/// R_α(X,Y) = Σ_{|γ|=m−|α|} (|γ|/γ!) (X−Y)^γ ∫₀¹ (1−t)^{|γ|−1} D^{α+γ}U(Y+t(X−Y)) dt
/// at randomly drawn node pairs; returns the largest absolute mismatch.
pub fn remainder_identity_check<F: Fn(&[f64], MultiIndex) -> f64>(
    wa: &WhitneyArray,
    field: F,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    let n = wa.grid.dom.n;
    let mut rng = seeded_rng(seed);
    let (gn, gw) = gauss_legendre(24);
    let set = wa.index_set();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let i = rng.gen_range(0..wa.grid.count());
        let mut j = rng.gen_range(0..wa.grid.count());
        if j == i {
            j = (j + 1) % wa.grid.count();
        }
        let x = wa.grid.node_pos(i);
        let y = wa.grid.node_pos(j);
        let diff = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        for &alpha in set.iter() {
            let lhs = whitney_remainder(wa, alpha, i, j)?;
            let q = wa.m - order(alpha);
            let mut rhs = 0.0;
            for gamma in enumerate_exact(n, q) {
                let coef = q as f64 / mi_factorial(gamma) * monomial(&diff, gamma);
                let mut chord = 0.0;
                for (t, w) in gn.iter().zip(&gw) {
                    let tt = 0.5 * (t + 1.0);
                    let pt: Vec<f64> = (0..n).map(|k| y[k] + tt * diff[k]).collect();
                    chord += 0.5 * w * (1.0 - tt).powi(q as i32 - 1) * field(&pt, add(alpha, gamma));
                }
                rhs += coef * chord;
            }
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}
