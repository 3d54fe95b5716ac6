//! Dense complex factorizations: Schur form with cluster reordering,
//! eigendecomposition derived from it, SVD helpers.

pub mod expm;
pub mod funm;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{C64, PMatrix};

pub use expm::matrix_exp;
pub use funm::{principal_matrix_function, AnalyticFn, Exp, Identity, PrincipalPower};

/// Unitary Schur factorization `A = Q T Q^H` with `T` upper triangular.
pub struct SchurForm {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

pub fn schur(a: &PMatrix) -> SchurForm {
    let (q, t) = a.as_dmatrix().clone().schur().unpack();
    SchurForm { q, t }
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Swap the diagonal entries at positions `k`, `k+1` by a unitary
    /// similarity that keeps `T` upper triangular and updates `Q`.
    ///
    /// Requires `t[k,k] != t[k+1,k+1]`; callers only swap across clusters.
    fn swap_adjacent(&mut self, k: usize) {
        let t11 = self.t[(k, k)];
        let t12 = self.t[(k, k + 1)];
        let t22 = self.t[(k + 1, k + 1)];
        // eigenvector of the 2x2 block for eigenvalue t22
        let v0 = t12;
        let v1 = t22 - t11;
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        debug_assert!(norm > 0.0, "swap requested inside a cluster");
        let c0 = v0 / norm;
        let c1 = v1 / norm;
        // unitary G = [[c0, -conj(c1)], [c1, conj(c0)]]
        let n = self.t.nrows();
        // T <- G^H T (rows k, k+1)
        for j in 0..n {
            let a = self.t[(k, j)];
            let b = self.t[(k + 1, j)];
            self.t[(k, j)] = c0.conj() * a + c1.conj() * b;
            self.t[(k + 1, j)] = -c1 * a + c0 * b;
        }
        // T <- T G (columns k, k+1)
        for i in 0..n {
            let a = self.t[(i, k)];
            let b = self.t[(i, k + 1)];
            self.t[(i, k)] = a * c0 + b * c1;
            self.t[(i, k + 1)] = -a * c1.conj() + b * c0.conj();
        }
        // Q <- Q G
        for i in 0..n {
            let a = self.q[(i, k)];
            let b = self.q[(i, k + 1)];
            self.q[(i, k)] = a * c0 + b * c1;
            self.q[(i, k + 1)] = -a * c1.conj() + b * c0.conj();
        }
        self.t[(k + 1, k)] = C64::new(0.0, 0.0);
    }

    /// Reorder so that positions with equal `labels` values become contiguous,
    /// in order of first appearance. Returns the per-position labels after
    /// reordering. Only positions with distinct labels are ever swapped.
    pub fn reorder_clusters(&mut self, labels: &mut Vec<usize>) {
        let n = labels.len();
        // rank of each label = order of first appearance
        let mut rank = vec![usize::MAX; n + 1];
        let mut next = 0;
        for &l in labels.iter() {
            if rank[l] == usize::MAX {
                rank[l] = next;
                next += 1;
            }
        }
        // bubble adjacent out-of-order pairs
        loop {
            let mut swapped = false;
            for k in 0..n - 1 {
                if rank[labels[k]] > rank[labels[k + 1]] {
                    self.swap_adjacent(k);
                    labels.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
    }
}

/// Eigendecomposition `A = V diag(lambda) V^{-1}` obtained from the Schur
/// form by triangular back-substitution.
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: DMatrix<C64>,
    /// 2-norm condition number of the eigenvector matrix.
    pub vector_condition: f64,
}

pub fn eigendecomposition(a: &PMatrix) -> EigenDecomposition {
    let form = schur(a);
    let n = form.t.nrows();
    let t = &form.t;
    let scale = a.max_abs().max(1.0);
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::<C64>::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            // LAPACK-style floor on tiny denominators (repeated eigenvalues)
            let floor = f64::EPSILON * scale;
            if den.norm() < floor {
                den = C64::new(floor, 0.0);
            }
            y[i] = -s / den;
        }
        let col = &form.q * y;
        let nrm = col.norm();
        vectors.set_column(k, &(col / C64::new(nrm, 0.0)));
    }
    let svd = vectors.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    EigenDecomposition {
        values: form.eigenvalues(),
        vectors,
        vector_condition: cond,
    }
}

/// Largest singular value.
pub fn sigma_max(a: &PMatrix) -> f64 {
    let svd = a.as_dmatrix().clone().svd(false, false);
    svd.singular_values.max()
}

/// Numerical rank at relative tolerance `rel_tol * sigma_max`.
pub fn rank(a: &PMatrix, rel_tol: f64) -> usize {
    let svd = a.as_dmatrix().clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * smax)
        .count()
}

/// Solve `A X = B` by LU; errors if `A` is numerically singular.
pub fn solve(a: &DMatrix<C64>, b: DMatrix<C64>, op: &'static str) -> Result<DMatrix<C64>> {
    a.clone()
        .lu()
        .solve(&b)
        .ok_or(Error::Singular(op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn schur_reorder_collects_clusters() {
        // e_3 has eigenvalues {1, 0, 0}; nalgebra may interleave them.
        let e3 = gallery::make_en(3).unwrap();
        let mut form = schur(&e3);
        let eigs = form.eigenvalues();
        let mut labels: Vec<usize> = eigs
            .iter()
            .map(|l| if l.norm() < 1e-9 { 0 } else { 1 })
            .collect();
        form.reorder_clusters(&mut labels);
        // labels contiguous
        let mut seen_end = vec![false; 2];
        let mut prev = labels[0];
        for &l in &labels[1..] {
            if l != prev {
                seen_end[prev] = true;
                assert!(!seen_end[l], "cluster split after reordering");
                prev = l;
            }
        }
        // factorization still reconstructs
        let recon = &form.q * &form.t * form.q.adjoint();
        let diff = (&recon - e3.as_dmatrix()).map(|z| z.norm()).max();
        assert!(diff < 1e-12, "reordered Schur reconstruction off by {diff}");
        // still triangular
        for i in 0..3 {
            for j in 0..i {
                assert!(form.t[(i, j)].norm() < 1e-13);
            }
        }
    }

    #[test]
    fn eigendecomposition_reconstructs() {
        let a = PMatrix::from_rows(vec![
            vec![c(1.0, -1.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, -1.0)],
        ])
        .unwrap();
        let eig = eigendecomposition(&a);
        assert!(eig.vector_condition < 1e3);
        let lam = DMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                eig.values[i]
            } else {
                c(0.0, 0.0)
            }
        });
        let vinv = eig.vectors.clone().try_inverse().unwrap();
        let recon = &eig.vectors * lam * vinv;
        let diff = (&recon - a.as_dmatrix()).map(|z| z.norm()).max();
        assert!(diff < 1e-12);
    }

    #[test]
    fn rank_of_idempotent() {
        let e3 = gallery::make_en(3).unwrap();
        assert_eq!(rank(&e3, 1e-10), 1);
        let one_minus = PMatrix::identity(3) - e3;
        assert_eq!(rank(&one_minus, 1e-10), 2);
    }
}
