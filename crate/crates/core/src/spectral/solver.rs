//! Smallest eigenpairs of the pencil `K x = λ M x` with `M` diagonal.
//!
//! With `y = M^{1/2} x` the problem becomes the standard symmetric problem for
//! `B = M^{-1/2} K M^{-1/2}`. Small problems are solved densely. Larger ones
//! run a restarted block Krylov iteration on `S = (B + s I)^{-1}`, applying `S`
//! through preconditioned conjugate gradients on `K + s M`. Every returned
//! pair is certified by its residual against `B` itself.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Symmetric sparse stiffness (CSR, off-diagonal part plus diagonal) and a
/// positive diagonal mass.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub(crate) row: Vec<usize>,
    pub(crate) col: Vec<u32>,
    pub(crate) val: Vec<f64>,
    pub(crate) diag: Vec<f64>,
    pub(crate) mass: Vec<f64>,
}

impl Pencil {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// `out = K x`.
    pub fn apply_k(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.len() {
            let mut acc = self.diag[i] * x[i];
            for e in self.row[i]..self.row[i + 1] {
                acc += self.val[e] * x[self.col[e] as usize];
            }
            out[i] = acc;
        }
    }

    /// `x^T K x`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        let mut kx = vec![0.0; x.len()];
        self.apply_k(x, &mut kx);
        dot(x, &kx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual `‖B y - λ y‖ / (|λ| + s)` required of every pair.
    pub tolerance: f64,
    pub seed: u64,
    /// Shift `s`; `None` uses `0.01 · tr(K) / tr(M)`.
    pub shift: Option<f64>,
    /// Problems with at most this many unknowns are solved densely.
    pub dense_limit: usize,
    pub max_restarts: usize,
    /// Krylov blocks added per restart cycle.
    pub krylov_blocks: usize,
    /// Relative tolerance of the inner conjugate-gradient solves.
    pub inner_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-8,
            seed: 0x5eed,
            shift: None,
            dense_limit: 1200,
            max_restarts: 40,
            krylov_blocks: 4,
            inner_tolerance: 1e-12,
        }
    }
}

/// Eigenpairs in ascending order; vectors are `M`-orthonormal.
#[derive(Debug, Clone)]
pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

pub(crate) fn smallest_eigenpairs(p: &Pencil, count: usize, opts: &SolverOptions) -> Result<Eigenpairs> {
    let n = p.len();
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(format!("cannot compute {count} eigenpairs of a size-{n} problem")));
    }
    let shift = opts.shift.unwrap_or_else(|| {
        let tk: f64 = p.diag.iter().sum();
        let tm: f64 = p.mass.iter().sum();
        0.01 * tk / tm
    });
    if n <= opts.dense_limit || 2 * (count + 2) > n {
        dense(p, count, shift)
    } else {
        krylov(p, count, shift, opts)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Scaled<'a> {
    p: &'a Pencil,
    sq: Vec<f64>,
    inv_sq: Vec<f64>,
}

impl<'a> Scaled<'a> {
    fn new(p: &'a Pencil) -> Self {
        let sq: Vec<f64> = p.mass.iter().map(|m| m.sqrt()).collect();
        let inv_sq = sq.iter().map(|s| 1.0 / s).collect();
        Scaled { p, sq, inv_sq }
    }

    /// `B y`.
    fn apply_b(&self, y: &[f64]) -> Vec<f64> {
        let x: Vec<f64> = y.iter().zip(&self.inv_sq).map(|(a, b)| a * b).collect();
        let mut kx = vec![0.0; x.len()];
        self.p.apply_k(&x, &mut kx);
        kx.iter().zip(&self.inv_sq).map(|(a, b)| a * b).collect()
    }

    fn residual(&self, y: &[f64], lambda: f64, shift: f64) -> f64 {
        let mut by = self.apply_b(y);
        axpy(-lambda, y, &mut by);
        norm(&by) / (lambda.abs() + shift)
    }

    fn to_x(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.inv_sq).map(|(a, b)| a * b).collect()
    }
}

fn dense(p: &Pencil, count: usize, shift: f64) -> Result<Eigenpairs> {
    let n = p.len();
    let sc = Scaled::new(p);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = p.diag[i] * sc.inv_sq[i] * sc.inv_sq[i];
        for e in p.row[i]..p.row[i + 1] {
            let j = p.col[e] as usize;
            b[(i, j)] = p.val[e] * sc.inv_sq[i] * sc.inv_sq[j];
        }
    }
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]));
    let mut out = Eigenpairs {
        values: Vec::with_capacity(count),
        vectors: Vec::with_capacity(count),
        residuals: Vec::with_capacity(count),
    };
    for &k in order.iter().take(count) {
        let mut y: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        canonical_sign(&mut y);
        let lambda = eig.eigenvalues[k];
        out.residuals.push(sc.residual(&y, lambda, shift));
        out.vectors.push(sc.to_x(&y));
        out.values.push(lambda);
    }
    Ok(out)
}

/// Fix the sign so that the largest-magnitude entry is positive.
fn canonical_sign(y: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &v in y.iter() {
        if v.abs() > best * (1.0 + 1e-9) {
            best = v.abs();
            sign = v.signum();
        }
    }
    if sign < 0.0 {
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Solve `(K + s M) z = rhs` by Jacobi-preconditioned conjugate gradients.
///
/// Convergence is measured in the `M^{-1/2}`-weighted norm, the norm of the
/// mass-scaled problem the outer iteration works in. With strongly varying
/// mass the plain norm lets large scaled errors through where `M` is small.
fn pcg(p: &Pencil, shift: f64, rhs: &[f64], inv_sq: &[f64], tol: f64) -> Vec<f64> {
    let n = rhs.len();
    let wnorm = |v: &[f64]| v.iter().zip(inv_sq).map(|(a, w)| (a * w) * (a * w)).sum::<f64>().sqrt();
    let dinv: Vec<f64> = (0..n).map(|i| 1.0 / (p.diag[i] + shift * p.mass[i])).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        p.apply_k(x, out);
        for i in 0..n {
            out[i] += shift * p.mass[i] * x[i];
        }
    };
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let bnorm = wnorm(rhs);
    if bnorm == 0.0 {
        return x;
    }
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(a, b)| a * b).collect();
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    let mut ad = vec![0.0; n];
    for _ in 0..(10 * n).clamp(200, 4000) {
        apply(&d, &mut ad);
        let alpha = rz / dot(&d, &ad);
        axpy(alpha, &d, &mut x);
        axpy(-alpha, &ad, &mut r);
        if wnorm(&r) <= tol * bnorm {
            break;
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            d[i] = z[i] + beta * d[i];
        }
    }
    x
}

/// Orthonormalize `block` against `basis` and itself (two Gram-Schmidt
/// passes); columns that collapse are dropped.
fn orthonormalize(block: Vec<Vec<f64>>, basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(block.len());
    for mut v in block {
        let start = norm(&v);
        if start == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in basis.iter().chain(out.iter()) {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > 1e-10 * start {
            v.iter_mut().for_each(|x| *x /= nv);
            out.push(v);
        }
    }
    out
}

fn combine(cols: &[Vec<f64>], coef: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut y = vec![0.0; cols[0].len()];
    for (j, c) in cols.iter().enumerate() {
        axpy(coef(j), c, &mut y);
    }
    y
}

fn krylov(p: &Pencil, count: usize, shift: f64, opts: &SolverOptions) -> Result<Eigenpairs> {
    let n = p.len();
    let sc = Scaled::new(p);
    let block_size = count + 2;
    let keep = (2 * count + 2).min(n / 2);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = vec![sc.sq.clone()];
    for _ in 1..block_size {
        start.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }

    let apply_s = |y: &[f64]| -> Vec<f64> {
        let rhs: Vec<f64> = y.iter().zip(&sc.sq).map(|(a, b)| a * b).collect();
        let z = pcg(p, shift, &rhs, &sc.inv_sq, opts.inner_tolerance);
        z.iter().zip(&sc.sq).map(|(a, b)| a * b).collect()
    };

    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut sq: Vec<Vec<f64>> = Vec::new();
    let mut block = start;
    let mut worst = f64::INFINITY;
    let mut last_residuals = Vec::new();
    for _cycle in 0..opts.max_restarts {
        for _ in 0..opts.krylov_blocks {
            let b = orthonormalize(std::mem::take(&mut block), &q);
            if b.is_empty() {
                break;
            }
            let w: Vec<Vec<f64>> = b.iter().map(|c| apply_s(c)).collect();
            q.extend(b);
            sq.extend(w.iter().cloned());
            block = w;
        }

        // Rayleigh-Ritz for S in span(Q).
        let k = q.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = 0.5 * (dot(&q[i], &sq[j]) + dot(&q[j], &sq[i]));
                t[(i, j)] = v;
                t[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let r = keep.min(k);
        let mut ritz = Vec::with_capacity(r);
        let mut sritz = Vec::with_capacity(r);
        for &c in order.iter().take(r) {
            let z = eig.eigenvectors.column(c);
            ritz.push(combine(&q, |j| z[j]));
            sritz.push(combine(&sq, |j| z[j]));
        }

        let mut values = Vec::with_capacity(count);
        let mut residuals = Vec::with_capacity(count);
        let mut directions = Vec::with_capacity(block_size);
        for (i, y) in ritz.iter().take(block_size.max(count)).enumerate() {
            let by = sc.apply_b(y);
            let lambda = dot(y, &by) / dot(y, y);
            let mut res = by;
            axpy(-lambda, y, &mut res);
            let rn = norm(&res);
            if i < count {
                residuals.push(rn / norm(y) / (lambda.abs() + shift));
                values.push(lambda);
            }
            if i < block_size && rn > 0.0 {
                res.iter_mut().for_each(|v| *v /= rn);
                directions.push(res);
            }
        }
        worst = residuals.iter().copied().fold(0.0, f64::max);
        last_residuals = residuals.clone();
        if ritz.len() >= count && worst <= opts.tolerance {
            let mut idx: Vec<usize> = (0..count).collect();
            idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let mut out = Eigenpairs {
                values: Vec::with_capacity(count),
                vectors: Vec::with_capacity(count),
                residuals: Vec::with_capacity(count),
            };
            for i in idx {
                let mut y = ritz[i].clone();
                let ny = norm(&y);
                y.iter_mut().for_each(|v| *v /= ny);
                canonical_sign(&mut y);
                out.values.push(values[i]);
                out.residuals.push(residuals[i]);
                out.vectors.push(sc.to_x(&y));
            }
            return Ok(out);
        }

        // Thick restart: keep the leading Ritz vectors and expand from their
        // normalized residuals. Images of nearly converged Ritz vectors lie
        // in the kept span up to rounding and would be dropped as collapsed.
        block = directions;
        q = ritz;
        sq = sritz;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        worst_residual: worst,
        tolerance: opts.tolerance,
        residuals: last_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Path graph Laplacian with unit weights and mass `w`.
    fn path(n: usize, w: f64) -> Pencil {
        let mut row = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            for j in [i.wrapping_sub(1), i + 1] {
                if j < n {
                    col.push(j as u32);
                    val.push(-1.0);
                    diag[i] += 1.0;
                }
            }
            row.push(col.len());
        }
        Pencil {
            row,
            col,
            val,
            diag,
            mass: vec![w; n],
        }
    }

    #[test]
    fn dense_and_krylov_agree_on_path_graph() {
        let n = 400;
        let p = path(n, 0.5);
        let exact: Vec<f64> = (0..6)
            .map(|k| 4.0 * (std::f64::consts::PI * k as f64 / (2.0 * n as f64)).sin().powi(2) / 0.5)
            .collect();
        let d = smallest_eigenpairs(&p, 6, &SolverOptions::default()).unwrap();
        let opts = SolverOptions {
            dense_limit: 0,
            ..Default::default()
        };
        let k = smallest_eigenpairs(&p, 6, &opts).unwrap();
        for i in 0..6 {
            assert!((d.values[i] - exact[i]).abs() < 1e-10 * (1.0 + exact[i]));
            assert!((k.values[i] - exact[i]).abs() < 1e-9 * (1.0 + exact[i]), "{i}: {} vs {}", k.values[i], exact[i]);
            assert!(k.residuals[i] <= 1e-8);
        }
        // M-orthonormal eigenvectors.
        for i in 0..6 {
            for j in 0..6 {
                let g: f64 = (0..n).map(|v| k.vectors[i][v] * k.vectors[j][v] * 0.5).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-7, "{i} {j} {g}");
            }
        }
    }

    #[test]
    fn reproducible_for_a_seed() {
        let p = path(300, 1.0);
        let opts = SolverOptions {
            dense_limit: 0,
            ..Default::default()
        };
        let a = smallest_eigenpairs(&p, 4, &opts).unwrap();
        let b = smallest_eigenpairs(&p, 4, &opts).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn reports_non_convergence() {
        let p = path(300, 1.0);
        let opts = SolverOptions {
            dense_limit: 0,
            max_restarts: 1,
            krylov_blocks: 1,
            ..Default::default()
        };
        match smallest_eigenpairs(&p, 4, &opts) {
            Err(Error::NoConvergence { residuals, .. }) => assert_eq!(residuals.len(), 4),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
