//! Standard-form semidefinite programming.
//!
//! Solves `max tr(CX)  s.t.  tr(A_j X) = b_j, X ⪰ 0` with a primal-dual
//! interior-point method (infeasible start, HKM search direction,
//! Mehrotra-style predictor-corrector, dense Schur complement). The dual
//! `min bᵀy  s.t.  Z = Σ y_j A_j − C ⪰ 0` provides the certified upper
//! bound consumers rely on.
//!
//! The method is deterministic: no pivoting or randomization, so a given
//! problem and parameter set always produce the identical iterate sequence.

use thiserror::Error;

use crate::linalg::{Chol, Mat, SparseSym};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum SdpError {
    #[error("cost matrix must be square, got {0}x{1}")]
    CostNotSquare(usize, usize),
    #[error("cost matrix is not symmetric")]
    CostNotSymmetric,
    #[error("constraint {0} has dimension {1}, problem has dimension {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error("tolerance must be positive and finite")]
    BadTolerance,
}

/// `max tr(cost · X)` subject to `tr(A_j X) = b_j` and `X ⪰ 0`.
#[derive(Clone, Debug)]
pub struct SdpProblem<F> {
    dim: usize,
    cost: Mat<F>,
    constraints: Vec<(SparseSym<F>, F)>,
}

impl<F: Real> SdpProblem<F> {
    pub fn new(cost: Mat<F>, constraints: Vec<(SparseSym<F>, F)>) -> Result<Self, SdpError> {
        let dim = cost.rows();
        if cost.cols() != dim {
            return Err(SdpError::CostNotSquare(cost.rows(), cost.cols()));
        }
        let scale = cost.norm_fro() + F::one();
        for i in 0..dim {
            for j in 0..i {
                if (cost[(i, j)] - cost[(j, i)]).abs() > F::epsilon() * scale {
                    return Err(SdpError::CostNotSymmetric);
                }
            }
        }
        for (k, (a, _)) in constraints.iter().enumerate() {
            if a.dim() != dim {
                return Err(SdpError::DimensionMismatch(k, a.dim(), dim));
            }
        }
        Ok(SdpProblem {
            dim,
            cost,
            constraints,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cost(&self) -> &Mat<F> {
        &self.cost
    }

    pub fn constraints(&self) -> &[(SparseSym<F>, F)] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Appends one equality constraint, returning a new problem.
    pub fn with_constraint(&self, a: SparseSym<F>, b: F) -> Result<Self, SdpError> {
        let mut constraints = self.constraints.clone();
        constraints.push((a, b));
        Self::new(self.cost.clone(), constraints)
    }

    /// Debug dump for cross-checking against external solvers: one line per
    /// nonzero as `j row col value`, where `j = 0` is the cost matrix and
    /// `j >= 1` is constraint `j`. Right-hand sides appear in a header
    /// comment. Indices are 1-based.
    pub fn dump_sparse(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# sdp dim={} constraints={}", self.dim, self.constraints.len());
        let rhs: Vec<String> = self.constraints.iter().map(|(_, b)| format!("{b}")).collect();
        let _ = writeln!(out, "# rhs {}", rhs.join(" "));
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.cost[(i, j)];
                if v != F::zero() {
                    let _ = writeln!(out, "0 {} {} {}", i + 1, j + 1, v);
                }
            }
        }
        for (k, (a, _)) in self.constraints.iter().enumerate() {
            for &(i, j, v) in a.entries() {
                let _ = writeln!(out, "{} {} {} {}", k + 1, i + 1, j + 1, v);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    /// Relative gap, primal and dual residuals all below tolerance.
    Optimal,
    /// Iteration cap reached; the iterate is still usable, with the dual
    /// residual reported so callers can certify bounds.
    MaxIterations,
    /// A factorization broke down and regularization did not recover it.
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<F> {
    pub primal_x: Mat<F>,
    pub dual_y: Vec<F>,
    pub primal_obj: F,
    pub dual_obj: F,
    /// `dual_obj - primal_obj`; nonnegative up to tolerance at optimality.
    pub gap: F,
    /// `max_j |tr(A_j X) - b_j|`.
    pub primal_residual: F,
    /// Frobenius norm of `Σ y_j A_j − C − Z`.
    pub dual_residual: F,
    pub iterations: usize,
    pub status: SdpStatus,
}

struct Iterate<F> {
    x: Mat<F>,
    y: Vec<F>,
    z: Mat<F>,
}

/// Solves the SDP. `tol` bounds the relative duality gap and the scaled
/// primal/dual residuals at termination (default elsewhere: 1e-7).
pub fn solve_sdp<F: Real>(
    p: &SdpProblem<F>,
    tol: F,
    max_iter: usize,
) -> Result<SdpSolution<F>, SdpError> {
    if !tol.is_finite() || tol <= F::zero() {
        return Err(SdpError::BadTolerance);
    }
    let n = p.dim;
    let m = p.constraints.len();

    // Cold start: scaled identity on both sides, sized from the data norms
    // so that neither side starts absurdly off-scale.
    let mut a_norm_max = F::zero();
    let mut b_over_a = F::one();
    for (a, b) in &p.constraints {
        let na = a.norm_fro();
        a_norm_max = a_norm_max.max(na);
        b_over_a = b_over_a.max(b.abs() / (F::one() + na));
    }
    let scale_p = F::one().max(F::from_usize(n).sqrt()).max(F::from_usize(n) * b_over_a);
    let scale_d = F::one() + p.cost.norm_fro().max(a_norm_max);
    let mut it = Iterate {
        x: Mat::scaled_identity(n, scale_p),
        y: vec![F::zero(); m],
        z: Mat::scaled_identity(n, scale_d),
    };

    let b_max = p
        .constraints
        .iter()
        .map(|(_, b)| b.abs())
        .fold(F::zero(), F::max);
    let c_norm = p.cost.norm_fro();
    let tau = F::from_f64(0.98); // fraction-to-boundary
    let mut iterations = 0;

    let finish = |it: &Iterate<F>, iterations: usize, status: SdpStatus| {
        let (rp_max, rd) = residuals(p, it);
        let primal_obj = p.cost.dot(&it.x);
        let dual_obj = dot_vec(&it.y, p.constraints.iter().map(|(_, b)| *b));
        SdpSolution {
            primal_x: it.x.clone(),
            dual_y: it.y.clone(),
            primal_obj,
            dual_obj,
            gap: dual_obj - primal_obj,
            primal_residual: rp_max,
            dual_residual: rd.norm_fro(),
            iterations,
            status,
        }
    };

    // Work buffers reused across iterations.
    let mut s_buf = Mat::zeros(n, n);
    let mut schur = Mat::zeros(m, m);

    for iter in 0..max_iter {
        let primal_obj = p.cost.dot(&it.x);
        let dual_obj = dot_vec(&it.y, p.constraints.iter().map(|(_, b)| *b));
        let (rp, rd) = residual_parts(p, &it);
        let rp_max = rp.iter().map(|r| r.abs()).fold(F::zero(), F::max);
        let rel_gap =
            (dual_obj - primal_obj).abs() / (F::one() + primal_obj.abs() + dual_obj.abs());
        let pinf = rp_max / (F::one() + b_max);
        let dinf = rd.norm_fro() / (F::one() + c_norm);
        if !rel_gap.is_finite() || !pinf.is_finite() || !dinf.is_finite() {
            return Ok(finish(&it, iter, SdpStatus::NumericalFailure));
        }
        if rel_gap <= tol && pinf <= tol && dinf <= tol {
            return Ok(finish(&it, iter, SdpStatus::Optimal));
        }

        let mu = it.x.dot(&it.z) / F::from_usize(n);

        let Some(z_chol) = it.z.cholesky() else {
            return Ok(finish(&it, iter, SdpStatus::NumericalFailure));
        };
        let Some(x_chol) = it.x.cholesky() else {
            return Ok(finish(&it, iter, SdpStatus::NumericalFailure));
        };
        let zinv = z_chol.inverse();

        // Schur complement M[j][k] = tr(A_j Z⁻¹ A_k X), built one column at
        // a time from S_k = Z⁻¹ A_k X.
        for k in 0..m {
            assemble_zinv_a_x(&zinv, &p.constraints[k].0, &it.x, &mut s_buf);
            for j in 0..m {
                schur[(j, k)] = p.constraints[j].0.inner_general(&s_buf);
            }
        }
        let Some(m_chol) = factor_regularized(&mut schur) else {
            return Ok(finish(&it, iter, SdpStatus::NumericalFailure));
        };

        let zinv_dot: Vec<F> = p.constraints.iter().map(|(a, _)| a.inner_sym(&zinv)).collect();
        // G = Z⁻¹ R_d X enters the right-hand side through tr(A_j G).
        let g_mat = zinv.matmul(&rd).matmul(&it.x);
        let g_dot: Vec<F> = p
            .constraints
            .iter()
            .map(|(a, _)| a.inner_general(&g_mat))
            .collect();

        // Predictor (affine scaling, nu = 0).
        let h_pred: Vec<F> = (0..m)
            .map(|j| g_dot[j] - p.constraints[j].1)
            .collect();
        let dy_pred = m_chol.solve_vec(&h_pred);
        let dz_pred = build_dz(p, &dy_pred, &rd);
        let mut dx_pred = zinv.matmul(&dz_pred).matmul(&it.x);
        dx_pred.scale(-F::one());
        dx_pred.add_scaled(&it.x, -F::one());
        dx_pred.symmetrize();

        let ap_aff = step_length(&x_chol, &dx_pred, tau);
        let ad_aff = step_length(&z_chol, &dz_pred, tau);

        // Mehrotra centering parameter.
        let mu_aff = (it.x.dot(&it.z)
            + ap_aff * dx_pred.dot(&it.z)
            + ad_aff * it.x.dot(&dz_pred)
            + ap_aff * ad_aff * dx_pred.dot(&dz_pred))
            / F::from_usize(n);
        let ratio = (mu_aff / mu).max(F::zero()).min(F::one());
        let sigma = ratio * ratio * ratio;
        let nu = sigma * mu;

        // Corrector with second-order term Z⁻¹ ΔZᵃ ΔXᵃ.
        let h_mat = zinv.matmul(&dz_pred).matmul(&dx_pred);
        let h: Vec<F> = (0..m)
            .map(|j| {
                nu * zinv_dot[j] - p.constraints[j].1 + g_dot[j]
                    - p.constraints[j].0.inner_general(&h_mat)
            })
            .collect();
        let dy = m_chol.solve_vec(&h);
        let dz = build_dz(p, &dy, &rd);
        // dX = nu Z⁻¹ − Z⁻¹ ΔZᵃ ΔXᵃ − X − Z⁻¹ ΔZ X, symmetrized.
        let mut dx = zinv.matmul(&dz).matmul(&it.x);
        dx.scale(-F::one());
        dx.add_scaled(&it.x, -F::one());
        dx.add_scaled(&h_mat, -F::one());
        dx.add_scaled(&zinv, nu);
        dx.symmetrize();

        let ap = step_length(&x_chol, &dx, tau);
        let ad = step_length(&z_chol, &dz, tau);

        it.x.add_scaled(&dx, ap);
        for (yj, dyj) in it.y.iter_mut().zip(&dy) {
            *yj += ad * *dyj;
        }
        it.z.add_scaled(&dz, ad);
        it.x.symmetrize();
        it.z.symmetrize();
        iterations = iter + 1;
    }

    Ok(finish(&it, iterations, SdpStatus::MaxIterations))
}

/// `S = Z⁻¹ A X` for sparse symmetric `A`, accumulated as outer products
/// `v · zinv[:,i] ⊗ x[j,:]` (plus the mirrored term for off-diagonals).
fn assemble_zinv_a_x<F: Real>(zinv: &Mat<F>, a: &SparseSym<F>, x: &Mat<F>, s: &mut Mat<F>) {
    let n = x.rows();
    s.fill(F::zero());
    for &(i, j, v) in a.entries() {
        add_outer(s, zinv.row(i), x.row(j), v, n);
        if i != j {
            add_outer(s, zinv.row(j), x.row(i), v, n);
        }
    }
}

#[inline]
fn add_outer<F: Real>(s: &mut Mat<F>, zcol: &[F], xrow: &[F], v: F, n: usize) {
    debug_assert_eq!(zcol.len(), n);
    for (r, &z) in zcol.iter().enumerate() {
        let coeff = v * z;
        if coeff == F::zero() {
            continue;
        }
        let dst = s.row_mut(r);
        for (d, &xv) in dst.iter_mut().zip(xrow) {
            *d += coeff * xv;
        }
    }
}

fn build_dz<F: Real>(p: &SdpProblem<F>, dy: &[F], rd: &Mat<F>) -> Mat<F> {
    let mut dz = rd.clone();
    dz.scale(-F::one());
    for (k, (a, _)) in p.constraints.iter().enumerate() {
        a.add_into(&mut dz, dy[k]);
    }
    dz
}

/// Residual pair: `r_p[j] = b_j − tr(A_j X)` and `R_d = C + Z − Σ y_j A_j`.
fn residual_parts<F: Real>(p: &SdpProblem<F>, it: &Iterate<F>) -> (Vec<F>, Mat<F>) {
    let rp: Vec<F> = p
        .constraints
        .iter()
        .map(|(a, b)| *b - a.inner_sym(&it.x))
        .collect();
    let mut rd = p.cost.clone();
    rd.add_scaled(&it.z, F::one());
    for (k, (a, _)) in p.constraints.iter().enumerate() {
        a.add_into(&mut rd, -it.y[k]);
    }
    (rp, rd)
}

fn residuals<F: Real>(p: &SdpProblem<F>, it: &Iterate<F>) -> (F, Mat<F>) {
    let (rp, rd) = residual_parts(p, it);
    let rp_max = rp.iter().map(|r| r.abs()).fold(F::zero(), F::max);
    (rp_max, rd)
}

/// Largest step `alpha = min(1, tau * alpha_max)` keeping `P + alpha*D ≻ 0`,
/// via the minimum eigenvalue of `L⁻¹ D L⁻ᵀ`.
fn step_length<F: Real>(chol: &Chol<F>, dir: &Mat<F>, tau: F) -> F {
    let w = chol.inv_congruence(dir);
    let lam = w.min_eigenvalue();
    if lam >= F::zero() {
        F::one()
    } else {
        (tau / -lam).min(F::one())
    }
}

/// Cholesky with escalating diagonal regularization, tolerating nearly
/// dependent constraint matrices. Mutates `m` only by adding to the
/// diagonal; returns `None` if even heavy regularization fails.
fn factor_regularized<F: Real>(m: &mut Mat<F>) -> Option<Chol<F>> {
    if m.rows() == 0 {
        return m.cholesky();
    }
    if let Some(ch) = m.cholesky() {
        return Some(ch);
    }
    let base = (m.trace().abs() / F::from_usize(m.rows()) + F::one()) * F::epsilon();
    let mut reg = base;
    for _ in 0..5 {
        for i in 0..m.rows() {
            m[(i, i)] += reg;
        }
        if let Some(ch) = m.cholesky() {
            return Some(ch);
        }
        reg *= F::from_f64(100.0);
    }
    None
}

fn dot_vec<F: Real>(y: &[F], b: impl Iterator<Item = F>) -> F {
    y.iter().zip(b).map(|(&yj, bj)| yj * bj).sum()
}
