//! Shared numerical plumbing: deterministic reductions, a worker-count knob,
//! dense/matrix-free linear algebra helpers, and seeded smooth test fields.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pairwise tree sum: deterministic and far more accurate than naive
/// left-to-right accumulation on long vectors.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        k => {
            let mid = k / 2;
            tree_sum(&values[..mid]) + tree_sum(&values[mid..])
        }
    }
}

/// Worker cap from LIPSPACE_THREADS (defaults to available parallelism).
pub fn worker_count() -> usize {
    std::env::var("LIPSPACE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|k| k.get())
                .unwrap_or(1)
        })
}

/// Map f over 0..len chunk-wise on up to `worker_count()` scoped threads.
/// Output order is independent of the worker count.
pub fn parallel_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(usize) -> T + Sync,
{
    let workers = worker_count().min(len.max(1));
    if workers <= 1 || len < 64 {
        return (0..len).map(f).collect();
    }
    let mut out = vec![T::default(); len];
    let chunk = len.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slice) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, slot) in slice.iter_mut().enumerate() {
                    *slot = f(w * chunk + i);
                }
            });
        }
    });
    out
}

/// Seeded RNG used everywhere randomness is required; same seed, same stream.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random low-order trigonometric polynomial on [0, period]^dim — smooth,
/// periodic, and cheap to evaluate with closed-form derivatives.
#[derive(Debug, Clone)]
pub struct TrigField {
    pub dim: usize,
    pub period: f64,
    /// (amplitude, frequency per axis, phase per axis)
    pub terms: Vec<(f64, [usize; 3], [f64; 3])>,
}

impl TrigField {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize, period: f64, terms: usize, max_freq: usize) -> Self {
        let mut list = Vec::with_capacity(terms);
        for _ in 0..terms {
            let amp = rng.gen_range(-1.0..1.0);
            let mut freq = [0usize; 3];
            let mut phase = [0f64; 3];
            for j in 0..dim {
                freq[j] = rng.gen_range(1..=max_freq);
                phase[j] = rng.gen_range(0.0..std::f64::consts::TAU);
            }
            list.push((amp, freq, phase));
        }
        TrigField { dim, period, terms: list }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let k = std::f64::consts::TAU / self.period;
        let mut v = 0.0;
        for (amp, freq, phase) in &self.terms {
            let mut t = *amp;
            for j in 0..self.dim {
                t *= (k * freq[j] as f64 * x[j] + phase[j]).sin();
            }
            v += t;
        }
        v
    }

    /// Partial derivative along axis `j`.
    pub fn deriv(&self, x: &[f64], j: usize) -> f64 {
        let k = std::f64::consts::TAU / self.period;
        let mut v = 0.0;
        for (amp, freq, phase) in &self.terms {
            let mut t = *amp;
            for i in 0..self.dim {
                let arg = k * freq[i] as f64 * x[i] + phase[i];
                if i == j {
                    t *= k * freq[i] as f64 * arg.cos();
                } else {
                    t *= arg.sin();
                }
            }
            v += t;
        }
        v
    }
}

/// Dense row-major matrix; only what the kernel benchmarks and small Gram
/// systems need.
#[derive(Debug, Clone)]
pub struct DenseMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMat { rows, cols, data: vec![0.0; rows * cols] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut s = 0.0;
            for (a, b) in row.iter().zip(x) {
                s += a * b;
            }
            out[i] = s;
        }
    }

    pub fn matvec_transpose(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let xi = x[i];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
    }
}

/// Dominant singular value by power iteration on AᵀA.
pub fn dominant_singular_value(a: &DenseMat, iters: usize, seed: u64) -> f64 {
    let mut rng = seeded_rng(seed);
    let mut v: Vec<f64> = (0..a.cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut av = vec![0.0; a.rows];
    let mut atav = vec![0.0; a.cols];
    let mut sigma = 0.0;
    for _ in 0..iters {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        a.matvec(&v, &mut av);
        a.matvec_transpose(&av, &mut atav);
        sigma = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        std::mem::swap(&mut v, &mut atav);
    }
    sigma
}

/// Solve the small dense system M x = b by partial-pivot elimination.
pub fn solve_dense(m: &DenseMat, b: &[f64]) -> Result<Vec<f64>> {
    let n = m.rows;
    if m.cols != n || b.len() != n {
        return Err(Error::Parameter("solve_dense needs a square system".into()));
    }
    let mut a = m.data.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in (col + 1)..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Err(Error::Solve("singular matrix in solve_dense".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in (col + 1)..n {
            s -= a[col * n + j] * x[j];
        }
        x[col] = s / a[col * n + col];
    }
    Ok(x)
}

/// Conjugate gradients with Jacobi preconditioning for a symmetric
/// positive-definite operator given as a closure.
pub fn conjugate_gradient<F>(
    apply: F,
    diag: &[f64],
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, d)| ri / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let b_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Solve("operator not positive definite in CG".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if res <= tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solve(format!(
        "CG failed to reach tolerance {tol} in {max_iter} iterations"
    )))
}
