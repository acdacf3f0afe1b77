//! Weighted Lebesgue and Sobolev norms on half-space boxes, the Hardy
//! inequality check, boundary Besov seminorms, and cell-centered grid data
//! with a compact binary format.

use crate::error::{Error, Result};
use crate::geometry::BoundaryNode;
use crate::multiindex::{enumerate, order, MultiIndex};
use crate::quad::gauss_legendre;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Integrability p, weight exponent a, and smoothness order m. The induced
/// boundary smoothness is s = 1 − a − 1/p, and the admissible window is
/// exactly 0 < s < 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: f64,
    pub a: f64,
    pub m: usize,
}

impl SpaceParams {
    pub fn new(p: f64, a: f64, m: usize) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Parameter(format!("p must lie in (1, ∞), got {p}")));
        }
        if m == 0 {
            return Err(Error::Parameter("order m must be at least 1".into()));
        }
        let sp = SpaceParams { p, a, m };
        let s = sp.s();
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Parameter(format!(
                "weight exponent a = {a} puts s = {s} outside (0, 1)"
            )));
        }
        Ok(sp)
    }

    /// Boundary smoothness s = 1 − a − 1/p.
    pub fn s(&self) -> f64 {
        1.0 - self.a - 1.0 / self.p
    }
}

/// Open box (0,L₁)×…×(0,H) with the last coordinate the distinguished
/// height direction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HalfspaceBox {
    pub n: usize,
    pub lengths: [f64; 2],
    pub height: f64,
}

impl HalfspaceBox {
    pub fn unit(n: usize) -> Self {
        HalfspaceBox { n, lengths: [1.0, 1.0], height: 1.0 }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        HalfspaceBox {
            n: self.n,
            lengths: [self.lengths[0] * lambda, self.lengths[1] * lambda],
            height: self.height * lambda,
        }
    }
}

/// ∫₀^H g(x_n) dx_n by geometric panels accumulating at 0 with fixed-order
/// Gauss–Legendre per panel; resolves weights x_n^q with q > −1 and fields
/// vanishing at the bottom without a graded grid.
fn vertical_integral<F: Fn(f64) -> f64>(height: f64, panels: usize, g: F) -> f64 {
    let (gn, gw) = gauss_legendre(8);
    let mut acc = 0.0;
    let mut top = height;
    for k in 0..panels {
        let bottom = if k + 1 == panels { 0.0 } else { top * 0.5 };
        let mid = 0.5 * (top + bottom);
        let half = 0.5 * (top - bottom);
        for (t, w) in gn.iter().zip(&gw) {
            acc += w * half * g(mid + half * t);
        }
        top = bottom;
    }
    acc
}

const VERTICAL_PANELS: usize = 44;

fn horizontal_cells(bx: &HalfspaceBox, res: usize) -> Vec<([f64; 2], f64)> {
    let mut out = Vec::new();
    if bx.n == 2 {
        let h = bx.lengths[0] / res as f64;
        for i in 0..res {
            out.push(([(i as f64 + 0.5) * h, 0.0], h));
        }
    } else {
        let h0 = bx.lengths[0] / res as f64;
        let h1 = bx.lengths[1] / res as f64;
        for i in 0..res {
            for j in 0..res {
                out.push(([(i as f64 + 0.5) * h0, (j as f64 + 0.5) * h1], h0 * h1));
            }
        }
    }
    out
}

/// ( ∫ |f|^p x_n^{pa} dx )^{1/p} over the box.
pub fn weighted_lp_norm<F: Fn(&[f64]) -> f64>(
    bx: &HalfspaceBox,
    p: f64,
    a: f64,
    res: usize,
    f: F,
) -> Result<f64> {
    if p * a <= -1.0 {
        return Err(Error::Parameter("weight exponent pa must exceed −1".into()));
    }
    let mut acc = 0.0;
    for (xp, warea) in horizontal_cells(bx, res) {
        acc += warea
            * vertical_integral(bx.height, VERTICAL_PANELS, |xn| {
                let x = [xp[0], xp[1], xn];
                let x = if bx.n == 2 { [x[0], xn, 0.0] } else { x };
                f(&x[..bx.n]).abs().powf(p) * xn.powf(p * a)
            });
    }
    Ok(acc.powf(1.0 / p))
}

/// Strong weighted norm: every derivative order |β| ≤ m enters with the
/// compensating power x_n^{|β|−m},
///   ( Σ_{|β|≤m} ∫ |x_n^{|β|−m} D^β u|^p x_n^{pa} dx )^{1/p}.
/// The field closure must return D^βu(x) for any requested β.
pub fn v_norm<F: Fn(&[f64], &MultiIndex) -> f64>(
    bx: &HalfspaceBox,
    params: &SpaceParams,
    res: usize,
    field: F,
) -> Result<f64> {
    let p = params.p;
    let m = params.m;
    let mut acc = 0.0;
    for beta in enumerate(bx.n, m) {
        let drop = order(beta) as f64 - m as f64;
        for (xp, warea) in horizontal_cells(bx, res) {
            acc += warea
                * vertical_integral(bx.height, VERTICAL_PANELS, |xn| {
                    let x = if bx.n == 2 {
                        [xp[0], xn, 0.0]
                    } else {
                        [xp[0], xp[1], xn]
                    };
                    let v = field(&x[..bx.n], &beta);
                    (xn.powf(drop) * v).abs().powf(p) * xn.powf(p * params.a)
                });
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// Top-derivative weighted norm plus a plain L_p anchor over the concentric
/// half-size box ω:
///   Σ_{|α|=m} ‖D^α u‖_{L_p(x_n^{pa})} + ‖u‖_{L_p(ω)}.
pub fn w_norm<F: Fn(&[f64], &MultiIndex) -> f64>(
    bx: &HalfspaceBox,
    params: &SpaceParams,
    res: usize,
    field: F,
) -> Result<f64> {
    let p = params.p;
    let m = params.m;
    let mut total = 0.0;
    for beta in enumerate(bx.n, m) {
        if order(beta) != m {
            continue;
        }
        let nrm = weighted_lp_norm(bx, p, params.a, res, |x| field(x, &beta))?;
        total += nrm;
    }
    // anchor term over the concentric half-size box
    let zero: MultiIndex = [0, 0, 0];
    let mut acc = 0.0;
    for (xp, warea) in horizontal_cells(bx, res) {
        let inside = |c: f64, l: f64| c > 0.25 * l && c < 0.75 * l;
        let keep = if bx.n == 2 {
            inside(xp[0], bx.lengths[0])
        } else {
            inside(xp[0], bx.lengths[0]) && inside(xp[1], bx.lengths[1])
        };
        if !keep {
            continue;
        }
        let (gn, gw) = gauss_legendre(8);
        let lo = 0.25 * bx.height;
        let hi = 0.75 * bx.height;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (t, w) in gn.iter().zip(&gw) {
            let xn = mid + half * t;
            let x = if bx.n == 2 {
                [xp[0], xn, 0.0]
            } else {
                [xp[0], xp[1], xn]
            };
            acc += warea * w * half * field(&x[..bx.n], &zero).abs().powf(p);
        }
    }
    Ok(total + acc.powf(1.0 / p))
}

/// Measured Hardy inequality on (0, 1): with u(0) = 0,
///   ‖u/x‖_{L_p(x^{pa})} ≤ (1/s) ‖u′‖_{L_p(x^{pa})},
/// and the constant 1/s is sharp along the family u = x^{s+ε} as ε → 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub sharp_constant: f64,
}

pub fn hardy_check<F, G>(params: &SpaceParams, u: F, du: G) -> Result<HardyReport>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let p = params.p;
    let a = params.a;
    let s = params.s();
    let lhs = vertical_integral(1.0, VERTICAL_PANELS, |x| (u(x) / x).abs().powf(p) * x.powf(p * a))
        .powf(1.0 / p);
    let rhs = vertical_integral(1.0, VERTICAL_PANELS, |x| du(x).abs().powf(p) * x.powf(p * a))
        .powf(1.0 / p);
    if rhs == 0.0 {
        return Err(Error::Degenerate("derivative term vanishes identically".into()));
    }
    Ok(HardyReport { lhs, rhs, ratio: lhs / rhs, sharp_constant: 1.0 / s })
}

/// Besov seminorm of boundary data sampled on quadrature nodes:
///   ( Σ_{i≠j} w_i w_j |f_i − f_j|^p / |X_i − X_j|^{(n−1) + ps} )^{1/p}.
/// The diagonal is excluded; its cell-pair mass vanishes like h^{p(1−s)}.
pub fn besov_seminorm(
    nodes: &[BoundaryNode],
    values: &[f64],
    n: usize,
    p: f64,
    s: f64,
) -> Result<f64> {
    if nodes.len() != values.len() {
        return Err(Error::Parameter("node and value counts differ".into()));
    }
    if nodes.len() < 2 {
        return Err(Error::Resolution("need at least two boundary nodes".into()));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter("smoothness s must lie in (0, 1)".into()));
    }
    let expo = (n - 1) as f64 + p * s;
    let mut acc = 0.0;
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let d2 = (0..3)
                .map(|k| (nodes[i].pos[k] - nodes[j].pos[k]).powi(2))
                .sum::<f64>();
            if d2 == 0.0 {
                return Err(Error::Degenerate("coincident boundary nodes".into()));
            }
            let d = d2.sqrt();
            acc += 2.0 * nodes[i].weight * nodes[j].weight * (values[i] - values[j]).abs().powf(p)
                / d.powf(expo);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// Plain L_p norm of boundary data against the surface measure.
pub fn boundary_lp_norm(nodes: &[BoundaryNode], values: &[f64], p: f64) -> Result<f64> {
    if nodes.len() != values.len() {
        return Err(Error::Parameter("node and value counts differ".into()));
    }
    Ok(nodes
        .iter()
        .zip(values)
        .map(|(nd, v)| nd.weight * v.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p))
}

/// Cell-centered values on a uniform box grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub n: usize,
    pub shape: Vec<usize>,
    pub origin: Vec<f64>,
    pub h: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn from_fn<F: Fn(&[f64]) -> f64>(
        n: usize,
        shape: &[usize],
        origin: &[f64],
        h: f64,
        f: F,
    ) -> Result<Self> {
        if shape.len() != n || origin.len() != n {
            return Err(Error::Parameter("shape/origin rank mismatch".into()));
        }
        let count: usize = shape.iter().product();
        let mut gf = GridFunction {
            n,
            shape: shape.to_vec(),
            origin: origin.to_vec(),
            h,
            values: vec![0.0; count],
        };
        for flat in 0..count {
            let idx = gf.unflatten(flat);
            let c = gf.center(&idx);
            gf.values[flat] = f(&c);
        }
        Ok(gf)
    }

    pub fn flatten_idx(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (d, &i) in idx.iter().enumerate() {
            flat = flat * self.shape[d] + i;
        }
        flat
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for d in (0..self.n).rev() {
            idx[d] = flat % self.shape[d];
            flat /= self.shape[d];
        }
        idx
    }

    pub fn center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(d, &i)| self.origin[d] + (i as f64 + 0.5) * self.h)
            .collect()
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.flatten_idx(idx)]
    }

    /// One-line JSON header followed by little-endian f64 payload.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::json!({
            "n": self.n,
            "shape": self.shape,
            "origin": self.origin,
            "h": self.h,
            "count": self.values.len(),
        });
        let mut line = serde_json::to_string(&header)
            .map_err(|e| Error::Parameter(format!("header encode: {e}")))?;
        line.push('\n');
        w.write_all(line.as_bytes())
            .map_err(|e| Error::Parameter(format!("write: {e}")))?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())
                .map_err(|e| Error::Parameter(format!("write: {e}")))?;
        }
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let mut header = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            r.read_exact(&mut byte)
                .map_err(|e| Error::Parameter(format!("read header: {e}")))?;
            if byte[0] == b'\n' {
                break;
            }
            header.push(byte[0]);
            if header.len() > 1 << 16 {
                return Err(Error::Parameter("unterminated header".into()));
            }
        }
        #[derive(Deserialize)]
        struct Header {
            n: usize,
            shape: Vec<usize>,
            origin: Vec<f64>,
            h: f64,
            count: usize,
        }
        let hd: Header = serde_json::from_slice(&header)
            .map_err(|e| Error::Parameter(format!("header decode: {e}")))?;
        if hd.shape.iter().product::<usize>() != hd.count {
            return Err(Error::Parameter("header count does not match shape".into()));
        }
        let mut values = vec![0.0f64; hd.count];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            r.read_exact(&mut buf)
                .map_err(|e| Error::Parameter(format!("read payload: {e}")))?;
            *v = f64::from_le_bytes(buf);
        }
        Ok(GridFunction { n: hd.n, shape: hd.shape, origin: hd.origin, h: hd.h, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GraphDomain;

    #[test]
    fn params_window() {
        assert!(SpaceParams::new(2.0, 0.25, 1).is_ok());
        // s = 1 − a − 1/p must stay strictly inside (0,1)
        assert!(SpaceParams::new(2.0, 0.4, 1).is_ok());
        assert!(SpaceParams::new(2.0, 0.5, 1).is_err()); // s = 0
        assert!(SpaceParams::new(2.0, -0.5, 1).is_err()); // s = 1
        assert!(SpaceParams::new(2.0, 0.7, 1).is_err()); // s < 0
        assert!(SpaceParams::new(0.5, 0.0, 1).is_err());
        let sp = SpaceParams::new(4.0, 0.25, 2).unwrap();
        assert!((sp.s() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weighted_norm_oracle() {
        // ∫₀¹ x^{1/2} dx = 2/3 for f ≡ 1, p = 2, a = 1/4
        let bx = HalfspaceBox::unit(2);
        let v = weighted_lp_norm(&bx, 2.0, 0.25, 8, |_| 1.0).unwrap();
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn v_norm_closed_form() {
        // u = x_n, m = 1, p = 2, a = 0: both surviving terms integrate to 1
        let bx = HalfspaceBox::unit(2);
        let params = SpaceParams::new(2.0, 0.0, 1).unwrap();
        let field = |x: &[f64], beta: &MultiIndex| -> f64 {
            match (beta[0], beta[1]) {
                (0, 0) => x[1],
                (0, 1) => 1.0,
                _ => 0.0,
            }
        };
        let v = v_norm(&bx, &params, 8, field).unwrap();
        assert!((v - 2.0f64.sqrt()).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn v_norm_dilation_homogeneity() {
        // u_λ(x) = u(λx) on the box shrunk by λ scales by λ^{m − a − n/p}
        let bx = HalfspaceBox::unit(2);
        let params = SpaceParams::new(3.0, 0.1, 2).unwrap();
        let u = |x: &[f64], beta: &MultiIndex| -> f64 {
            // u = x₁² x₂² restricted to derivatives that survive
            let f = |k: usize, e: usize| -> f64 {
                match e {
                    0 => x[k] * x[k],
                    1 => 2.0 * x[k],
                    2 => 2.0,
                    _ => 0.0,
                }
            };
            f(0, beta[0]) * f(1, beta[1])
        };
        let lam = 2.0;
        let v1 = v_norm(&bx, &params, 16, u).unwrap();
        let shrunk = bx.scaled(1.0 / lam);
        let v2 = v_norm(&shrunk, &params, 16, |x: &[f64], beta: &MultiIndex| {
            let y = [lam * x[0], lam * x[1], 0.0];
            lam.powi(order(*beta) as i32) * u(&y[..2], beta)
        })
        .unwrap();
        let expect = lam.powf(params.m as f64 - params.a - 2.0 / params.p);
        assert!(
            ((v2 / v1) - expect).abs() < 1e-8 * expect,
            "ratio {} expect {}",
            v2 / v1,
            expect
        );
    }

    #[test]
    fn w_norm_allows_constants() {
        let bx = HalfspaceBox::unit(2);
        let params = SpaceParams::new(2.0, 0.25, 1).unwrap();
        let v = w_norm(&bx, &params, 16, |_, beta: &MultiIndex| {
            if order(*beta) == 0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        // only the anchor survives: measure of ω is 1/4
        assert!((v - 0.5).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn hardy_ratio_below_sharp_and_attained() {
        let params = SpaceParams::new(2.0, 0.25, 1).unwrap();
        let s = params.s();
        // generic test function vanishing at 0
        let rep = hardy_check(&params, |x| x * x * (1.0 - x), |x| 2.0 * x - 3.0 * x * x).unwrap();
        assert!(rep.ratio <= rep.sharp_constant * (1.0 + 1e-12));
        // near-extremal profile x^{s + ε} with a gentle cutoff
        let eps = 0.02;
        let q = s + eps;
        let rep2 = hardy_check(
            &params,
            |x| x.powf(q) * (1.0 - x).powi(2),
            |x| {
                q * x.powf(q - 1.0) * (1.0 - x).powi(2)
                    - 2.0 * x.powf(q) * (1.0 - x)
            },
        )
        .unwrap();
        assert!(rep2.ratio <= rep2.sharp_constant * (1.0 + 1e-12));
        assert!(
            rep2.ratio > 0.6 * rep2.sharp_constant,
            "ratio {} sharp {}",
            rep2.ratio,
            rep2.sharp_constant
        );
    }

    #[test]
    fn besov_linear_oracle() {
        // f(x) = x on a flat boundary of length 1, p = 2, s = 1/2: the
        // integrand is identically 1, so the seminorm is 1
        let dom = GraphDomain::flat(2, 1.0, 1.0);
        let nodes = dom.boundary_quadrature(128); // 1024 nodes
        let values: Vec<f64> = nodes.iter().map(|b| b.pos[0]).collect();
        let v = besov_seminorm(&nodes, &values, 2, 2.0, 0.5).unwrap();
        assert!((v - 1.0).abs() < 5e-3, "got {v}");
        let zeros = vec![0.7; nodes.len()];
        assert_eq!(besov_seminorm(&nodes, &zeros, 2, 2.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn grid_function_round_trip() {
        let gf = GridFunction::from_fn(2, &[6, 4], &[0.0, 0.0], 0.25, |x| x[0] + 10.0 * x[1])
            .unwrap();
        let mut buf = Vec::new();
        gf.save(&mut buf).unwrap();
        let back = GridFunction::load(buf.as_slice()).unwrap();
        assert_eq!(gf, back);
        assert_eq!(gf.at(&[2, 1]), gf.values[gf.flatten_idx(&[2, 1])]);
        let c = gf.center(&[0, 0]);
        assert!((c[0] - 0.125).abs() < 1e-15);
        // corrupted header count rejected
        let mut bad = buf.clone();
        let pos = buf.iter().position(|&b| b == b'\n').unwrap();
        let hdr = String::from_utf8(buf[..pos].to_vec()).unwrap();
        let hdr = hdr.replace("\"count\":24", "\"count\":25");
        bad.splice(..pos, hdr.into_bytes());
        assert!(GridFunction::load(bad.as_slice()).is_err());
    }
}
