//! Nonlinear power iteration for the `l^p -> l^p` operator norm.
//!
//! The iteration `x <- normalize(psi_q(A^H psi_p(A x)))` drives `||Ax||_p`
//! monotonically upward toward a stationary value; at `p = 2` it reduces to
//! the classical power method on `A^H A`.

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::{C64, PMatrix, PVector};

use super::{check_general_dim, p_norm_dvec, psi, NormEstimate, NormMethod};

const VALUE_TOL: f64 = 1e-12;

pub(super) fn run(
    a: &PMatrix,
    p: &PExponent,
    start: &PVector,
    max_iter: usize,
) -> Result<NormEstimate> {
    p.require_interior("pnorm_power")?;
    check_general_dim(a, "pnorm_power")?;
    if a.max_abs() == 0.0 {
        return Err(Error::Precondition {
            op: "pnorm_power",
            detail: "matrix must be nonzero".into(),
        });
    }
    if start.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "start vector has length {}, matrix has dimension {}",
            start.len(),
            a.dim()
        )));
    }

    let am = a.as_dmatrix();
    let ah = am.adjoint();
    let pe = p.p();
    let qe = p.q();

    let n0 = p_norm_dvec(start.as_dvector(), p);
    if n0 == 0.0 {
        return Err(Error::ZeroVector("pnorm_power"));
    }
    let mut x = start.as_dvector() / C64::new(n0, 0.0);
    let mut value = 0.0f64;
    let mut converged = false;

    for _ in 0..max_iter {
        let y = am * &x;
        let v = p_norm_dvec(&y, p);
        if v == 0.0 {
            // the start lies in the kernel; 0 is the stationary value here
            converged = true;
            break;
        }
        if (v - value).abs() < VALUE_TOL {
            converged = true;
            break;
        }
        debug_assert!(
            v >= value - 1e-10,
            "power iteration value decreased: {v} < {value}"
        );
        value = v;

        let z = &ah * psi(&y, pe);
        let w = psi(&z, qe);
        let wn = p_norm_dvec(&w, p);
        if wn == 0.0 {
            converged = true;
            break;
        }
        x = w / C64::new(wn, 0.0);
    }

    // final witness/value pair, recomputed so they agree to machine precision
    let xn = p_norm_dvec(&x, p);
    let x = x / C64::new(xn, 0.0);
    let value = p_norm_dvec(&(am * &x), p);

    Ok(NormEstimate {
        value,
        witness: PVector::from_dvector(x),
        upper: None,
        method: NormMethod::Power,
        restarts_used: 1,
        converged,
    restart_spread: None,
    })
}

/// Power-method lower bound from a deterministic bundle of starts: the
/// all-ones vector, each standard basis vector, and the conjugate phase
/// pattern of each row (the row-sum witnesses, which seed the right
/// orthant for sign-alternating maximizers).
pub(super) fn best_over_structured_starts(
    a: &PMatrix,
    p: &PExponent,
    max_iter: usize,
) -> Result<NormEstimate> {
    let n = a.dim();
    let mut best: Option<NormEstimate> = None;
    let mut starts = vec![PVector::ones(n)];
    for i in 0..n {
        starts.push(PVector::standard_basis(n, i));
    }
    for i in 0..n {
        let entries: Vec<C64> = (0..n)
            .map(|j| {
                let z = a.entry(i, j);
                let m = z.norm();
                if m == 0.0 {
                    C64::new(1.0, 0.0)
                } else {
                    z.conj() / m
                }
            })
            .collect();
        starts.push(PVector::new(entries).expect("finite phases"));
    }
    for s in starts {
        let est = run(a, p, &s, max_iter)?;
        if best.as_ref().map_or(true, |b| est.value > b.value) {
            best = Some(est);
        }
    }
    Ok(best.expect("at least one start"))
}
