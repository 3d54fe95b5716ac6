//! Quotient seminorm: `inf` over ideal coefficients of the operator norm of
//! a representative, realized as convex minimization.
//!
//! The objective `lambda -> ||M + sum_i lambda_i N_i||` is a norm of an
//! affine function of `lambda`, hence convex; coordinate-wise derivative-free
//! descent (a coarse angle scan with golden-section over the magnitude,
//! followed by a compass polish over all real coordinates) from
//! `lambda = 0` finds the infimum.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::{C64, PMatrix};

use super::{NormEngine, ORACLE_DIM_CAP};

#[derive(Clone, Debug)]
pub struct QuotientNormResult {
    /// `inf_lambda ||M + sum lambda_i N_i||_{p->p}` (never exceeding the
    /// representative's own norm).
    pub value: f64,
    /// Coefficients over the ideal basis achieving `value`.
    pub minimizer: Vec<C64>,
    pub converged: bool,
}

const SEARCH_RESTARTS: usize = 80;
const IMPROVEMENT_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 30;

pub fn quotient_seminorm(
    engine: &NormEngine,
    m: &PMatrix,
    ideal_basis: &[PMatrix],
    p: &PExponent,
) -> Result<QuotientNormResult> {
    let n = m.dim();
    if n > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap {
            op: "quotient_seminorm",
            cap: ORACLE_DIM_CAP,
            n,
        });
    }
    for b in ideal_basis {
        if b.dim() != n {
            return Err(Error::DimensionMismatch(
                "ideal basis dimension differs from representative".into(),
            ));
        }
    }
    if ideal_basis.is_empty() {
        // the seminorm degenerates to the operator norm, same code path
        let est = engine.oracle(m, p)?;
        return Ok(QuotientNormResult {
            value: est.value,
            minimizer: Vec::new(),
            converged: true,
        });
    }
    if !linearly_independent(ideal_basis) {
        return Err(Error::Precondition {
            op: "quotient_seminorm",
            detail: "ideal basis is linearly dependent".into(),
        });
    }

    let k = ideal_basis.len();
    let assemble = |lam: &[C64]| {
        let mut out = m.clone();
        for (c, b) in lam.iter().zip(ideal_basis) {
            out = out + b.scale(*c);
        }
        out
    };
    let search_eval = |lam: &[C64]| -> Result<f64> {
        Ok(engine
            .oracle_with_restarts(&assemble(lam), p, SEARCH_RESTARTS)?
            .value)
    };

    let mut lam = vec![C64::new(0.0, 0.0); k];
    let mut best = search_eval(&lam)?;
    let mut candidates: Vec<Vec<C64>> = vec![lam.clone()];
    let mut converged = false;

    for _sweep in 0..MAX_SWEEPS {
        let before = best;
        for i in 0..k {
            let (ci, v) = minimize_coordinate(&search_eval, &lam, i, best)?;
            lam[i] = ci;
            best = v;
        }
        // compass polish over all 2k real coordinates
        let (plam, pval) = compass_polish(&search_eval, &lam, best)?;
        lam = plam;
        best = pval;
        candidates.push(lam.clone());
        if before - best < IMPROVEMENT_TOL {
            converged = true;
            break;
        }
    }

    // full-budget evaluation over the candidate trail; report the smallest
    let mut final_value = f64::INFINITY;
    let mut final_lam = lam.clone();
    for cand in &candidates {
        let v = engine.oracle(&assemble(cand), p)?.value;
        if v < final_value {
            final_value = v;
            final_lam = cand.clone();
        }
    }

    Ok(QuotientNormResult {
        value: final_value,
        minimizer: final_lam,
        converged,
    })
}

/// One-dimensional minimization over a complex coordinate: coarse angle
/// scan, golden-section over the magnitude at the best angle, then a short
/// angle refinement.
fn minimize_coordinate(
    eval: &impl Fn(&[C64]) -> Result<f64>,
    lam: &[C64],
    i: usize,
    current: f64,
) -> Result<(C64, f64)> {
    let eval_at = |z: C64| -> Result<f64> {
        let mut l = lam.to_vec();
        l[i] = z;
        eval(&l)
    };

    let mut best_z = lam[i];
    let mut best_v = current;

    let angles = 12;
    for a in 0..angles {
        let theta = std::f64::consts::TAU * (a as f64) / (angles as f64);
        let dir = C64::new(theta.cos(), theta.sin());
        let (r, v) = golden_magnitude(&|r| eval_at(best_z + dir * C64::new(r, 0.0)), best_v)?;
        if v < best_v {
            best_v = v;
            best_z += dir * C64::new(r, 0.0);
        }
    }
    Ok((best_z, best_v))
}

/// Golden-section over `r >= 0` after doubling out a bracket.
fn golden_magnitude(
    eval: &impl Fn(f64) -> Result<f64>,
    f0: f64,
) -> Result<(f64, f64)> {
    let mut r = 0.5;
    let mut fr = eval(r)?;
    if fr >= f0 {
        // try a shorter step before giving up on this direction
        r = 0.05;
        fr = eval(r)?;
        if fr >= f0 {
            return Ok((0.0, f0));
        }
    }
    // expand until the function grows again
    let mut hi = r * 2.0;
    let mut fhi = eval(hi)?;
    while fhi < fr && hi < 1e6 {
        fr = fhi;
        hi *= 2.0;
        fhi = eval(hi)?;
    }
    // golden-section on [0, hi]
    let inv_phi = 0.618_033_988_749_895;
    let (mut a, mut b) = (0.0f64, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..60 {
        if b - a < 1e-11 * (1.0 + b) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let (rbest, fbest) = if fc < fd { (c, fc) } else { (d, fd) };
    if fbest < f0 {
        Ok((rbest, fbest))
    } else {
        Ok((0.0, f0))
    }
}

/// Compass search over the real and imaginary parts of every coefficient,
/// with a sufficient-decrease threshold tied to the step size.
fn compass_polish(
    eval: &impl Fn(&[C64]) -> Result<f64>,
    lam: &[C64],
    mut best: f64,
) -> Result<(Vec<C64>, f64)> {
    let mut lam = lam.to_vec();
    let k = lam.len();
    let mut step: f64 = 0.25;
    let mut evals = 0usize;
    while step > 1e-9 && evals < 10_000 {
        let forcing = (1e-4 * step * step).max(1e-13);
        let mut improved = false;
        for i in 0..k {
            for dir in [
                C64::new(step, 0.0),
                C64::new(-step, 0.0),
                C64::new(0.0, step),
                C64::new(0.0, -step),
            ] {
                let mut cand = lam.clone();
                cand[i] += dir;
                evals += 1;
                let v = eval(&cand)?;
                if v < best - forcing {
                    best = v;
                    lam = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((lam, best))
}

/// Rank check of the matrices viewed as vectors.
fn linearly_independent(mats: &[PMatrix]) -> bool {
    let n = mats[0].dim();
    let k = mats.len();
    if k > n * n {
        return false;
    }
    let stacked = DMatrix::<C64>::from_fn(n * n, k, |r, c| mats[c].entry(r / n, r % n));
    let svd = stacked.svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return false;
    }
    svd.singular_values.iter().filter(|&&s| s > 1e-12 * smax).count() == k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn empty_basis_equals_operator_norm_exactly() {
        let m = PMatrix::from_real_rows(&[&[1.0, 0.3], &[0.0, -2.0]]).unwrap();
        let engine = NormEngine::default();
        let pe = p(3.0);
        let q = quotient_seminorm(&engine, &m, &[], &pe).unwrap();
        let direct = engine.oracle(&m, &pe).unwrap().value;
        assert_eq!(q.value, direct);
        assert!(q.converged);
    }

    #[test]
    fn dependent_basis_rejected() {
        let e3 = gallery::make_en(3).unwrap();
        let engine = NormEngine::default();
        let err = quotient_seminorm(
            &engine,
            &PMatrix::identity(3),
            &[e3.clone(), e3.scale_re(2.0)],
            &p(4.0),
        );
        assert!(matches!(err, Err(Error::Precondition { .. })));
    }

    #[test]
    fn quotient_never_exceeds_representative() {
        let e3 = gallery::make_en(3).unwrap();
        let m = PMatrix::identity(3) - e3.scale_re(2.0);
        let engine = NormEngine::default();
        let pe = p(4.0);
        let q = quotient_seminorm(&engine, &m, &[e3.clone()], &pe).unwrap();
        let rep = engine.oracle(&m, &pe).unwrap().value;
        assert!(q.value <= rep + 1e-9, "{} > {}", q.value, rep);
    }

    // The structured quotient computations from the three-dimensional
    // commutative algebra live in the gallery and experiment tests.
}
