//! Small linear-algebra toolbox: CSR storage, Lanczos, Krylov exponential action.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Compressed sparse row matrix (real).
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed, explicit zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = CsrMatrix { nrows, ncols, indptr, indices, values };
        m.prune(0.0);
        m
    }

    /// Drop entries with |v| <= tol.
    fn prune(&mut self, tol: f64) {
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k].abs() > tol {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != 0.0 {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push((c, r, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn matvec(&self, x: &DVector<f64>, exec: Exec) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        let row_dot = |r: usize| self.row(r).map(|(c, v)| v * x[c]).sum::<f64>();
        // Threading only pays off once rows outnumber scheduling overhead.
        let exec = if self.nrows < 2048 { Exec::Sequential } else { exec };
        exec.fill(&mut y, row_dot);
        DVector::from_vec(y)
    }

    /// max |A_ij - A_ji|
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut dev: f64 = 0.0;
        for r in 0..self.nrows {
            let a: Vec<_> = self.row(r).collect();
            let b: Vec<_> = t.row(r).collect();
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                match (a.get(i), b.get(j)) {
                    (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                        dev = dev.max((va - vb).abs());
                        i += 1;
                        j += 1;
                    }
                    (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                        dev = dev.max(va.abs());
                        i += 1;
                    }
                    (Some(_), Some(&(_, vb))) => {
                        dev = dev.max(vb.abs());
                        j += 1;
                    }
                    (Some(&(_, va)), None) => {
                        dev = dev.max(va.abs());
                        i += 1;
                    }
                    (None, Some(&(_, vb))) => {
                        dev = dev.max(vb.abs());
                        j += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
        }
        dev
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `AB - BA`
pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Dense matrix exponential (nalgebra's scaling-and-squaring Padé).
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().exp()
}

/// Eigenpairs of a dense symmetric matrix, ascending.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let eig = SymmetricEigen::new(m.clone());
    let mut pairs: Vec<(f64, DVector<f64>)> =
        eig.eigenvalues.iter().enumerate().map(|(i, &e)| (e, eig.eigenvectors.column(i).into_owned())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Lanczos settings.
#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-10, max_iter: 500, seed: 0x5eed }
    }
}

/// k lowest eigenpairs of a symmetric operator given only through its action.
///
/// Full reorthogonalisation; convergence is declared on the true residual
/// `||A v - e v||` of every requested Ritz pair.
pub fn lanczos_lowest<F>(apply: F, dim: usize, k: usize, opts: LanczosOptions) -> Result<Vec<(f64, DVector<f64>)>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    assert!(k >= 1 && k <= dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = DVector::from_fn(dim, |_, _| rng.random::<f64>() - 0.5);
    v /= v.norm();
    let mut basis: Vec<DVector<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let max_iter = opts.max_iter.min(dim);
    let mut best_res = f64::INFINITY;

    for it in 0..max_iter {
        let q = &basis[it];
        let mut w = apply(q);
        let a = q.dot(&w);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let bnorm = w.norm();
        let m = alpha.len();
        let check = m >= k && (m % 10 == 0 || bnorm < 1e-12 || m == max_iter);
        if check {
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let ritz = sym_eigen_sorted(&t);
            let estimates_ok = ritz[..k].iter().all(|(_, s)| (bnorm * s[m - 1]).abs() <= opts.tol * 0.1);
            if estimates_ok || bnorm < 1e-12 || m == max_iter {
                let mut out = Vec::with_capacity(k);
                let mut worst: f64 = 0.0;
                for (e, s) in &ritz[..k] {
                    let mut x = DVector::zeros(dim);
                    for (j, b) in basis.iter().enumerate() {
                        x.axpy(s[j], b, 1.0);
                    }
                    x /= x.norm();
                    let r = (apply(&x) - &x * *e).norm();
                    worst = worst.max(r);
                    out.push((*e, x));
                }
                best_res = best_res.min(worst);
                if worst <= opts.tol {
                    return Ok(out);
                }
            }
        }
        if bnorm < 1e-12 {
            break;
        }
        beta.push(bnorm);
        basis.push(w / bnorm);
    }
    Err(Error::NoConvergence(format!(
        "Lanczos did not reach residual {:e} within {} iterations (best {:e})",
        opts.tol, max_iter, best_res
    )))
}

/// Krylov settings for [`expv`].
#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    pub tol: f64,
    pub max_dim: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { tol: 1e-10, max_dim: 200 }
    }
}

/// `exp(tau A) v` by Arnoldi projection.
///
/// The subspace grows until the a-posteriori error estimate
/// `beta * h_{m+1,m} * |[exp(tau H_m)]_{m,1}|` drops below `tol`, or a happy
/// breakdown occurs.
pub fn expv<F>(apply: F, v: &DVector<f64>, tau: f64, opts: KrylovOptions) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let beta = v.norm();
    if beta == 0.0 || tau == 0.0 {
        return Ok(v.clone());
    }
    let n = v.len();
    let max_dim = opts.max_dim.min(n);
    let mut basis: Vec<DVector<f64>> = vec![v / beta];
    let mut h = DMatrix::<f64>::zeros(max_dim + 1, max_dim);
    let mut last_err = f64::INFINITY;

    for j in 0..max_dim {
        let mut w = apply(&basis[j]);
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = b.dot(&w);
                h[(i, j)] += c;
                w.axpy(-c, b, 1.0);
            }
        }
        let hn = w.norm();
        h[(j + 1, j)] = hn;
        let m = j + 1;
        let breakdown = hn < 1e-13;
        if breakdown || m % 2 == 0 || m == max_dim {
            let hm = h.view((0, 0), (m, m)) * tau;
            let e = hm.exp();
            let err = beta * hn * e[(m - 1, 0)].abs();
            last_err = err;
            if breakdown || err <= opts.tol {
                let mut out = DVector::zeros(n);
                for (i, b) in basis.iter().take(m).enumerate() {
                    out.axpy(beta * e[(i, 0)], b, 1.0);
                }
                return Ok(out);
            }
        }
        basis.push(w / hn);
    }
    Err(Error::NoConvergence(format!(
        "Krylov exponential not converged with {} vectors (error estimate {:e})",
        max_dim, last_err
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_sym(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
        &a + a.transpose()
    }

    #[test]
    fn csr_roundtrip_and_duplicates() {
        let m = CsrMatrix::from_triplets(3, 3, vec![(0, 1, 1.0), (0, 1, 2.0), (2, 0, -1.0), (1, 1, 0.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 3.0);
        let d = m.to_dense();
        assert_eq!(CsrMatrix::from_dense(&d), m);
        assert_eq!(m.transpose().get(1, 0), 3.0);
        assert_eq!(m.asymmetry(), 3.0);
    }

    #[test]
    fn lanczos_matches_dense() {
        let a = random_sym(120, 3);
        let dense = sym_eigen_sorted(&a);
        let lz = lanczos_lowest(|x| &a * x, 120, 3, LanczosOptions::default()).unwrap();
        for i in 0..3 {
            assert!((lz[i].0 - dense[i].0).abs() < 1e-10);
        }
    }

    #[test]
    fn expv_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = DMatrix::from_fn(60, 60, |_, _| rng.random::<f64>() - 0.5);
        let s = &a - a.transpose();
        let v = DVector::from_fn(60, |i, _| (i as f64).sin());
        let exact = expm(&(&s * 0.7)) * &v;
        let kr = expv(|x| &s * x, &v, 0.7, KrylovOptions::default()).unwrap();
        assert!((exact - kr).norm() < 1e-10);
    }
}
