//! Minimal dense linear algebra for the interior-point solver.
//!
//! Everything here operates on small dense symmetric matrices (a few hundred
//! rows) and is written for determinism: no pivoting, no randomization, so a
//! given input always produces the bit-identical factorization.

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, F::one())
    }

    pub fn scaled_identity(n: usize, s: F) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_rows(rows: &[&[F]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn fill(&mut self, v: F) {
        self.data.fill(v);
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Mat<F>, s: F) {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: F) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    /// Elementwise inner product. Equals `tr(A Bᵀ)`; for symmetric `B`
    /// this is `tr(A B)`.
    pub fn dot(&self, other: &Mat<F>) -> F {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> F {
        self.data.iter().map(|&a| a * a).sum::<F>().sqrt()
    }

    /// `self = (self + selfᵀ)/2`; squares only.
    pub fn symmetrize(&mut self) {
        debug_assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..i {
                let avg = (self[(i, j)] + self[(j, i)]) * F::half();
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// Dense product `self * other`.
    pub fn matmul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        // i-k-j order keeps the inner loop on contiguous rows.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == F::zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// Cholesky factorization `self = L Lᵀ` (lower triangular).
    /// Returns `None` if the matrix is not numerically positive definite.
    pub fn cholesky(&self) -> Option<Chol<F>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= F::zero() || !sum.is_finite() {
                        return None;
                    }
                    l[(i, i)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Some(Chol { l })
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
    /// returned in ascending order. Values only, no vectors.
    pub fn sym_eigenvalues(&self) -> Vec<F> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return vec![];
        }
        if n == 1 {
            return vec![self[(0, 0)]];
        }
        let mut a = self.clone();
        a.symmetrize();
        let eps = F::epsilon() * F::from_usize(n) * (a.norm_fro() + F::one());
        for _sweep in 0..64 {
            let mut off = F::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].abs();
                }
            }
            if off <= eps {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= F::epsilon() * (a[(p, p)].abs() + a[(q, q)].abs() + F::one()) {
                        continue;
                    }
                    // Classic Jacobi rotation annihilating a[p][q].
                    let theta = (a[(q, q)] - a[(p, p)]) / (F::two() * apq);
                    let t = {
                        let sign = if theta >= F::zero() { F::one() } else { -F::one() };
                        sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                    };
                    let c = F::one() / (t * t + F::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut vals: Vec<F> = (0..n).map(|i| a[(i, i)]).collect();
        vals.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        vals
    }

    pub fn min_eigenvalue(&self) -> F {
        self.sym_eigenvalues()[0]
    }
}

impl<F: Real> Index<(usize, usize)> for Mat<F> {
    type Output = F;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Real> IndexMut<(usize, usize)> for Mat<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor.
pub struct Chol<F> {
    l: Mat<F>,
}

impl<F: Real> Chol<F> {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor(&self) -> &Mat<F> {
        &self.l
    }

    /// Solve `L Lᵀ x = b`.
    pub fn solve_vec(&self, b: &[F]) -> Vec<F> {
        let n = self.dim();
        debug_assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let mut sum = x[i];
            for (&lk, &xk) in row[..i].iter().zip(&x[..i]) {
                sum -= lk * xk;
            }
            x[i] = sum / row[i];
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            // Column access of L, so no contiguous slice to zip here.
            for (k, &xk) in x.iter().enumerate().skip(i + 1) {
                sum -= self.l[(k, i)] * xk;
            }
            x[i] = sum / self.l[(i, i)];
        }
        x
    }

    /// Symmetric inverse `(L Lᵀ)⁻¹`.
    pub fn inverse(&self) -> Mat<F> {
        let n = self.dim();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![F::zero(); n];
        for j in 0..n {
            e[j] = F::one();
            let col = self.solve_vec(&e);
            e[j] = F::zero();
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv.symmetrize();
        inv
    }

    /// Congruence transform `L⁻¹ B L⁻ᵀ` for symmetric `B`; used to reduce
    /// the generalized step-length problem to an ordinary eigenproblem.
    pub fn inv_congruence(&self, b: &Mat<F>) -> Mat<F> {
        let n = self.dim();
        debug_assert_eq!(b.rows(), n);
        // Y = L⁻¹ B : forward-substitute on each column, expressed row-wise.
        let mut y = b.clone();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[(i, k)];
                if lik == F::zero() {
                    continue;
                }
                let (head, tail) = y.data.split_at_mut(i * n);
                let yk = &head[k * n..(k + 1) * n];
                let yi = &mut tail[..n];
                for (a, &b) in yi.iter_mut().zip(yk) {
                    *a -= lik * b;
                }
            }
            let d = F::one() / self.l[(i, i)];
            for v in y.row_mut(i) {
                *v *= d;
            }
        }
        // W = Y L⁻ᵀ : forward-substitute along each row.
        let mut w = y;
        for i in 0..n {
            let row = w.row_mut(i);
            for j in 0..n {
                let lrow = self.l.row(j);
                let mut sum = row[j];
                for (&ljk, &rk) in lrow[..j].iter().zip(row.iter()) {
                    sum -= ljk * rk;
                }
                row[j] = sum / lrow[j];
            }
        }
        w
    }
}

/// Sparse symmetric matrix stored as upper-triangle entries `(i, j, v)`
/// with `i <= j`; an off-diagonal entry stands for both `(i,j)` and `(j,i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym<F> {
    dim: usize,
    entries: Vec<(usize, usize, F)>,
}

impl<F: Real> SparseSym<F> {
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, F)>) -> Self {
        for e in &mut entries {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
            assert!(e.1 < dim, "sparse entry out of range");
        }
        SparseSym { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, F)] {
        &self.entries
    }

    /// `tr(A X)` for symmetric dense `X`.
    pub fn inner_sym(&self, x: &Mat<F>) -> F {
        let mut sum = F::zero();
        for &(i, j, v) in &self.entries {
            if i == j {
                sum += v * x[(i, i)];
            } else {
                sum += F::two() * v * x[(i, j)];
            }
        }
        sum
    }

    /// `tr(A S)` for an arbitrary dense `S` (not necessarily symmetric).
    pub fn inner_general(&self, s: &Mat<F>) -> F {
        let mut sum = F::zero();
        for &(i, j, v) in &self.entries {
            if i == j {
                sum += v * s[(i, i)];
            } else {
                sum += v * (s[(i, j)] + s[(j, i)]);
            }
        }
        sum
    }

    /// `M += s * A` densely.
    pub fn add_into(&self, m: &mut Mat<F>, s: F) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += s * v;
            if i != j {
                m[(j, i)] += s * v;
            }
        }
    }

    pub fn norm_fro(&self) -> F {
        let mut sum = F::zero();
        for &(i, j, v) in &self.entries {
            sum += if i == j { v * v } else { F::two() * v * v };
        }
        sum.sqrt()
    }

    pub fn to_dense(&self) -> Mat<F> {
        let mut m = Mat::zeros(self.dim, self.dim);
        self.add_into(&mut m, F::one());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_solves() {
        // SPD matrix with known solution.
        let a = Mat::from_rows(&[&[4.0, 2.0, 0.6], &[2.0, 5.0, 1.0], &[0.6, 1.0, 3.0]]);
        let ch = a.cholesky().unwrap();
        let x = ch.solve_vec(&[1.0, 2.0, 3.0]);
        // Check A x = b.
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..3 {
                acc += a[(i, j)] * x[j];
            }
            assert_relative_eq!(acc, [1.0, 2.0, 3.0][i], epsilon = 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(a.cholesky().is_none());
    }

    #[test]
    fn inverse_matches_identity() {
        let a = Mat::from_rows(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let inv = a.cholesky().unwrap().inverse();
        let prod = a.matmul(&inv);
        assert_relative_eq!(prod[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(prod[(0, 1)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(prod[(1, 1)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_eigenvalues_2x2() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let a = Mat::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let ev = a.sym_eigenvalues();
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn jacobi_eigenvalues_diag_heavy() {
        let n = 12;
        let mut a = Mat::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = (i + 1) as f64;
            if i + 1 < n {
                a[(i, i + 1)] = 0.01;
                a[(i + 1, i)] = 0.01;
            }
        }
        let ev = a.sym_eigenvalues();
        // Gershgorin: every eigenvalue within 0.02 of a diagonal entry.
        for (i, &v) in ev.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 0.05);
        }
        // Trace is preserved.
        let sum: f64 = ev.iter().sum();
        assert_relative_eq!(sum, a.trace(), epsilon = 1e-9);
    }

    #[test]
    fn inv_congruence_recovers_eigengap() {
        // X = I, so L = I and the transform is the identity map.
        let x = Mat::<f64>::identity(3);
        let b = Mat::from_rows(&[&[1.0, 0.5, 0.0], &[0.5, 2.0, 0.0], &[0.0, 0.0, -1.0]]);
        let ch = x.cholesky().unwrap();
        let w = ch.inv_congruence(&b);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(w[(i, j)], b[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sparse_inner_products() {
        // A = [[1, .5], [.5, 0]] as triangle entries.
        let a = SparseSym::new(2, vec![(0, 0, 1.0), (0, 1, 0.5)]);
        let x = Mat::from_rows(&[&[2.0, 3.0], &[3.0, 4.0]]);
        // tr(AX) = 1*2 + 2*0.5*3 = 5
        assert_relative_eq!(a.inner_sym(&x), 5.0);
        let s = Mat::from_rows(&[&[2.0, 1.0], &[3.0, 4.0]]);
        // tr(AS) = 1*2 + 0.5*(1+3) = 4
        assert_relative_eq!(a.inner_general(&s), 4.0);
        assert_relative_eq!(a.norm_fro(), (1.0f64 + 2.0 * 0.25).sqrt());
    }
}
