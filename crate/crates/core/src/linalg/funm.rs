//! Matrix functions via Schur factorization and the block Parlett recurrence.
//!
//! Eigenvalues are grouped into clusters (relative gap 0.1, with an exactly
//! separate cluster for numerically zero eigenvalues), the Schur form is
//! unitarily reordered so clusters are contiguous, diagonal blocks are
//! evaluated by a Taylor expansion about the cluster mean, and off-diagonal
//! blocks solve triangular Sylvester equations.
//!
//! Functions carrying a branch cut on the negative real axis (principal
//! powers) reject spectra touching the cut and handle a semisimple zero
//! eigenvalue by continuous extension (`0^t = 0`); a defective zero block is
//! an error.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{eigendecomposition, schur};
use crate::matrix::{C64, PMatrix};

/// A scalar function applicable to matrices through the Schur route.
pub trait AnalyticFn {
    fn name(&self) -> String;
    fn eval(&self, z: C64) -> C64;
    /// `f^(k)(mu) / k!`.
    fn taylor_coeff(&self, k: usize, mu: C64) -> C64;
    /// Whether `z` lies in the declared branch-cut region.
    fn cut_violation(&self, z: C64, rel_tol: f64) -> bool;
    /// Continuous extension at 0, if any. `None` means 0 sits on the cut.
    fn at_zero(&self) -> Option<C64>;
    /// True if `f` is analytic in a neighborhood of 0 (then 0 needs no
    /// special handling).
    fn analytic_at_zero(&self) -> bool;
}

/// Principal branch of `z -> z^t` (cut on the negative real axis).
#[derive(Clone, Copy, Debug)]
pub struct PrincipalPower {
    pub t: f64,
}

impl AnalyticFn for PrincipalPower {
    fn name(&self) -> String {
        format!("principal power t = {}", self.t)
    }

    fn eval(&self, z: C64) -> C64 {
        if z.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        z.powf(self.t)
    }

    fn taylor_coeff(&self, k: usize, mu: C64) -> C64 {
        // binom(t, k) * mu^(t - k), by recurrence
        let mut c = self.eval(mu);
        for j in 1..=k {
            c = c * C64::new(self.t - (j as f64) + 1.0, 0.0) / (mu * C64::new(j as f64, 0.0));
        }
        c
    }

    fn cut_violation(&self, z: C64, rel_tol: f64) -> bool {
        z.re < 0.0 && z.im.abs() <= rel_tol * z.norm()
    }

    fn at_zero(&self) -> Option<C64> {
        if self.t > 0.0 {
            Some(C64::new(0.0, 0.0))
        } else {
            None
        }
    }

    fn analytic_at_zero(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Exp;

impl AnalyticFn for Exp {
    fn name(&self) -> String {
        "exp".into()
    }

    fn eval(&self, z: C64) -> C64 {
        z.exp()
    }

    fn taylor_coeff(&self, k: usize, mu: C64) -> C64 {
        let mut c = mu.exp();
        for j in 1..=k {
            c /= C64::new(j as f64, 0.0);
        }
        c
    }

    fn cut_violation(&self, _z: C64, _rel_tol: f64) -> bool {
        false
    }

    fn at_zero(&self) -> Option<C64> {
        Some(C64::new(1.0, 0.0))
    }

    fn analytic_at_zero(&self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Identity;

impl AnalyticFn for Identity {
    fn name(&self) -> String {
        "identity".into()
    }

    fn eval(&self, z: C64) -> C64 {
        z
    }

    fn taylor_coeff(&self, k: usize, mu: C64) -> C64 {
        match k {
            0 => mu,
            1 => C64::new(1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        }
    }

    fn cut_violation(&self, _z: C64, _rel_tol: f64) -> bool {
        false
    }

    fn at_zero(&self) -> Option<C64> {
        Some(C64::new(0.0, 0.0))
    }

    fn analytic_at_zero(&self) -> bool {
        true
    }
}

pub struct FunmOptions {
    /// Eigenvalues with modulus below `zero_tol * max(1, spectral scale)`
    /// count as zero.
    pub zero_tol: f64,
    /// Relative gap below which eigenvalues share a cluster.
    pub cluster_rel: f64,
    /// Relative tolerance of the branch-cut test.
    pub cut_tol: f64,
    /// Residual above which the zero Schur block counts as defective.
    pub zero_block_tol: f64,
    pub taylor_tol: f64,
    pub max_taylor: usize,
}

impl Default for FunmOptions {
    fn default() -> Self {
        Self {
            zero_tol: 1e-9,
            cluster_rel: 0.1,
            cut_tol: 1e-9,
            zero_block_tol: 1e-8,
            taylor_tol: 1e-16,
            max_taylor: 300,
        }
    }
}

/// `f(a)` by Schur factorization and the block Parlett recurrence.
pub fn principal_matrix_function(a: &PMatrix, f: &dyn AnalyticFn) -> Result<PMatrix> {
    matrix_function(a, f, &FunmOptions::default())
}

pub fn matrix_function(a: &PMatrix, f: &dyn AnalyticFn, opts: &FunmOptions) -> Result<PMatrix> {
    let n = a.dim();
    if n == 1 {
        let z = a.entry(0, 0);
        let scale = z.norm().max(1.0);
        if z.norm() <= opts.zero_tol * scale.min(1.0 + z.norm()) && !f.analytic_at_zero() {
            let v = f
                .at_zero()
                .ok_or_else(|| Error::SpectrumOnCut {
                    function: f.name(),
                    value: z,
                })?;
            return Ok(PMatrix::from_fn(1, |_, _| v));
        }
        if f.cut_violation(z, opts.cut_tol) {
            return Err(Error::SpectrumOnCut {
                function: f.name(),
                value: z,
            });
        }
        return Ok(PMatrix::from_fn(1, |_, _| f.eval(z)));
    }

    let mut form = schur(a);
    let eigs = form.eigenvalues();
    let spectral_scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zero_abs = opts.zero_tol * spectral_scale.max(1.0);

    let special_zero = !f.analytic_at_zero();
    let is_zero: Vec<bool> = eigs
        .iter()
        .map(|z| special_zero && z.norm() <= zero_abs)
        .collect();

    for (i, z) in eigs.iter().enumerate() {
        if is_zero[i] {
            if f.at_zero().is_none() {
                return Err(Error::SpectrumOnCut {
                    function: f.name(),
                    value: *z,
                });
            }
        } else if f.cut_violation(*z, opts.cut_tol) {
            return Err(Error::SpectrumOnCut {
                function: f.name(),
                value: *z,
            });
        }
    }

    // Union-find clustering; zero eigenvalues form their own cluster.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let merge = if is_zero[i] || is_zero[j] {
                is_zero[i] && is_zero[j]
            } else {
                let gap = (eigs[i] - eigs[j]).norm();
                gap <= opts.cluster_rel * eigs[i].norm().max(eigs[j].norm())
            };
            if merge {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    form.reorder_clusters(&mut labels);

    // contiguous block ranges after reordering
    let mut blocks: Vec<(usize, usize)> = Vec::new(); // [start, end)
    let mut start = 0;
    for k in 1..=n {
        if k == n || labels[k] != labels[start] {
            blocks.push((start, k));
            start = k;
        }
    }

    let t = &form.t;
    let mut ft = DMatrix::<C64>::zeros(n, n);

    // diagonal blocks
    for &(s, e) in &blocks {
        let m = e - s;
        let block_is_zero = special_zero && t[(s, s)].norm() <= zero_abs;
        if block_is_zero {
            let mut residual = 0.0f64;
            for i in s..e {
                for j in s..e {
                    residual = residual.max(t[(i, j)].norm());
                }
            }
            if residual > opts.zero_block_tol * spectral_scale.max(1.0) {
                return Err(Error::NonSemisimpleKernel { residual });
            }
            let v = f.at_zero().expect("checked above");
            for i in s..e {
                ft[(i, i)] = v;
            }
            continue;
        }
        if m == 1 {
            ft[(s, s)] = f.eval(t[(s, s)]);
            continue;
        }
        // Taylor about the cluster mean
        let mu = (s..e).map(|i| t[(i, i)]).sum::<C64>() / C64::new(m as f64, 0.0);
        let mut nmat = DMatrix::<C64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                nmat[(i, j)] = t[(s + i, s + j)];
            }
            nmat[(i, i)] -= mu;
        }
        let mut fb = DMatrix::<C64>::identity(m, m) * f.taylor_coeff(0, mu);
        let mut pow = DMatrix::<C64>::identity(m, m);
        let mut small_streak = 0;
        let mut converged = false;
        for k in 1..=opts.max_taylor {
            pow = &pow * &nmat;
            let term = &pow * f.taylor_coeff(k, mu);
            fb += &term;
            let tmax = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let fmax = fb.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if tmax <= opts.taylor_tol * fmax.max(1.0) {
                small_streak += 1;
                if small_streak >= 2 && k >= m {
                    converged = true;
                    break;
                }
            } else {
                small_streak = 0;
            }
        }
        if !converged {
            return Err(Error::Inconsistent {
                op: "matrix_function",
                detail: format!(
                    "Taylor expansion of a diagonal block did not converge in {} terms",
                    opts.max_taylor
                ),
            });
        }
        for i in 0..m {
            for j in 0..m {
                ft[(s + i, s + j)] = fb[(i, j)];
            }
        }
    }

    // off-diagonal blocks by the Parlett recurrence, ordered by superdiagonal
    for sep in 1..blocks.len() {
        for bi in 0..(blocks.len() - sep) {
            let bj = bi + sep;
            let (is_, ie) = blocks[bi];
            let (js, je) = blocks[bj];
            let (mi, mj) = (ie - is_, je - js);
            // C = F_ii T_ij - T_ij F_jj + sum_k (F_ik T_kj - T_ik F_kj)
            let mut c = DMatrix::<C64>::zeros(mi, mj);
            for r in 0..mi {
                for scol in 0..mj {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..mi {
                        acc += ft[(is_ + r, is_ + k)] * t[(is_ + k, js + scol)];
                    }
                    for k in 0..mj {
                        acc -= t[(is_ + r, js + k)] * ft[(js + k, js + scol)];
                    }
                    c[(r, scol)] = acc;
                }
            }
            for bk in (bi + 1)..bj {
                let (ks, ke) = blocks[bk];
                for r in 0..mi {
                    for scol in 0..mj {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in ks..ke {
                            acc += ft[(is_ + r, k)] * t[(k, js + scol)];
                            acc -= t[(is_ + r, k)] * ft[(k, js + scol)];
                        }
                        c[(r, scol)] += acc;
                    }
                }
            }
            // solve T_ii X - X T_jj = C column by column
            let mut x = DMatrix::<C64>::zeros(mi, mj);
            for scol in 0..mj {
                let tjj_ss = t[(js + scol, js + scol)];
                let mut rhs: Vec<C64> = (0..mi).map(|r| c[(r, scol)]).collect();
                for r in 0..mi {
                    for rc in 0..scol {
                        rhs[r] += x[(r, rc)] * t[(js + rc, js + scol)];
                    }
                }
                for r in (0..mi).rev() {
                    let mut acc = rhs[r];
                    for k in (r + 1)..mi {
                        acc -= t[(is_ + r, is_ + k)] * x[(k, scol)];
                    }
                    let den = t[(is_ + r, is_ + r)] - tjj_ss;
                    x[(r, scol)] = acc / den;
                }
            }
            for r in 0..mi {
                for scol in 0..mj {
                    ft[(is_ + r, js + scol)] = x[(r, scol)];
                }
            }
        }
    }

    let result = &form.q * ft * form.q.adjoint();
    Ok(PMatrix::from_dmatrix(result))
}

/// Diagonalization route `V f(Lambda) V^{-1}`, used as a cross-check of the
/// Schur-Parlett path when the eigenvector matrix is well conditioned.
pub fn matrix_function_eig(a: &PMatrix, f: &dyn AnalyticFn) -> Result<(PMatrix, f64)> {
    let opts = FunmOptions::default();
    let eig = eigendecomposition(a);
    let scale = eig.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zero_abs = opts.zero_tol * scale.max(1.0);
    let n = a.dim();
    let mut lam = DMatrix::<C64>::zeros(n, n);
    for (i, z) in eig.values.iter().enumerate() {
        let v = if !f.analytic_at_zero() && z.norm() <= zero_abs {
            f.at_zero().ok_or_else(|| Error::SpectrumOnCut {
                function: f.name(),
                value: *z,
            })?
        } else {
            if f.cut_violation(*z, opts.cut_tol) {
                return Err(Error::SpectrumOnCut {
                    function: f.name(),
                    value: *z,
                });
            }
            f.eval(*z)
        };
        lam[(i, i)] = v;
    }
    let vinv = eig
        .vectors
        .clone()
        .try_inverse()
        .ok_or(Error::Singular("matrix_function_eig"))?;
    let out = &eig.vectors * lam * vinv;
    Ok((PMatrix::from_dmatrix(out), eig.vector_condition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_function_round_trips() {
        let a = PMatrix::from_rows(vec![
            vec![c(1.0, 0.5), c(-0.25, 1.0), c(0.0, 0.0)],
            vec![c(0.3, 0.0), c(2.0, -0.5), c(1.0, 1.0)],
            vec![c(0.0, 0.1), c(0.0, 0.0), c(-1.5, 0.2)],
        ])
        .unwrap();
        let f = principal_matrix_function(&a, &Identity).unwrap();
        assert!(f.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn square_root_of_diagonal() {
        let a = PMatrix::diag_real(&[4.0, 9.0]);
        let r = principal_matrix_function(&a, &PrincipalPower { t: 0.5 }).unwrap();
        assert!(r.max_abs_diff(&PMatrix::diag_real(&[2.0, 3.0])) < 1e-13);
    }

    #[test]
    fn idempotents_fixed_by_powers() {
        let e2 = gallery::make_en(2).unwrap();
        let r = principal_matrix_function(&e2, &PrincipalPower { t: 0.5 }).unwrap();
        assert!(r.max_abs_diff(&e2) < 1e-11);

        // repeated nonzero and zero eigenvalues: 1 - e_3 has spectrum {1,1,0}
        let m = PMatrix::identity(3) - gallery::make_en(3).unwrap();
        let r = principal_matrix_function(&m, &PrincipalPower { t: 0.25 }).unwrap();
        assert!(r.max_abs_diff(&m) < 1e-11);
    }

    #[test]
    fn power_of_jordan_block_at_one() {
        // analytic block: f(J) has the finite Taylor form
        let j = PMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 1.0]])
            .unwrap();
        let t = 0.5;
        let r = principal_matrix_function(&j, &PrincipalPower { t }).unwrap();
        // square should reproduce j
        assert!((&r * &r).max_abs_diff(&j) < 1e-10);
    }

    #[test]
    fn defective_zero_is_rejected() {
        let nilp = PMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        match principal_matrix_function(&nilp, &PrincipalPower { t: 0.5 }) {
            Err(Error::NonSemisimpleKernel { .. }) => {}
            other => panic!("expected NonSemisimpleKernel, got {other:?}"),
        }
    }

    #[test]
    fn negative_spectrum_hits_the_cut() {
        let a = PMatrix::diag_real(&[1.0, -2.0]);
        match principal_matrix_function(&a, &PrincipalPower { t: 0.5 }) {
            Err(Error::SpectrumOnCut { value, .. }) => {
                assert!((value - c(-2.0, 0.0)).norm() < 1e-12);
            }
            other => panic!("expected SpectrumOnCut, got {other:?}"),
        }
    }

    #[test]
    fn agrees_with_eigendecomposition_route() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = 2 + trial % 3;
            // shift to keep spectra away from the cut
            let a = PMatrix::from_fn(n, |i, j| {
                let base = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                if i == j {
                    base + c(3.0, 0.0)
                } else {
                    base
                }
            });
            let f = PrincipalPower { t: 0.37 };
            let via_schur = principal_matrix_function(&a, &f).unwrap();
            let (via_eig, cond) = matrix_function_eig(&a, &f).unwrap();
            if cond < 1e6 {
                assert!(
                    via_schur.max_abs_diff(&via_eig) < 1e-9 * cond.max(1.0),
                    "routes disagree at trial {trial}"
                );
            }
        }
    }

    #[test]
    fn exp_via_parlett_matches_pade() {
        let a = PMatrix::from_rows(vec![
            vec![c(0.2, 0.4), c(1.0, -0.3)],
            vec![c(-0.5, 0.0), c(1.3, 0.1)],
        ])
        .unwrap();
        let via_funm = principal_matrix_function(&a, &Exp).unwrap();
        let via_pade = crate::linalg::matrix_exp(&a);
        assert!(via_funm.max_abs_diff(&via_pade) < 1e-12);
    }

    #[test]
    fn fractional_power_semigroup() {
        let a = PMatrix::from_rows(vec![
            vec![c(2.0, 0.3), c(0.4, -0.2)],
            vec![c(0.1, 0.1), c(1.5, -0.4)],
        ])
        .unwrap();
        let s = 0.3;
        let t = 0.45;
        let xs = principal_matrix_function(&a, &PrincipalPower { t: s }).unwrap();
        let xt = principal_matrix_function(&a, &PrincipalPower { t }).unwrap();
        let xst = principal_matrix_function(&a, &PrincipalPower { t: s + t }).unwrap();
        assert!((xs * xt).max_abs_diff(&xst) < 1e-9);
    }
}
