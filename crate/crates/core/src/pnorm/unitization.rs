//! Multiplier-unitization norm: `||a + lambda 1|| = sup { ||ac + lambda c|| :
//! c in Ball(A) }` over the unit ball of a spanned matrix subalgebra.
//!
//! Realized as a nested maximization: the outer search runs over ball
//! coefficients (scale-invariant ratio form), the inner norms come from the
//! oracle. The result is certified from below by the witnessing `c`. For
//! algebras acting nondegenerately the value agrees with
//! `||a + lambda * identity||_{p->p}`.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::{C64, PMatrix};

use super::{NormEngine, ORACLE_DIM_CAP};

const SEARCH_RESTARTS: usize = 48;
const RANDOM_CANDIDATES: usize = 24;
const CLOSURE_TOL: f64 = 1e-9;

pub fn unitization_norm(
    engine: &NormEngine,
    a: &PMatrix,
    lambda: C64,
    algebra_basis: &[PMatrix],
    p: &PExponent,
) -> Result<f64> {
    let n = a.dim();
    if n > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap {
            op: "unitization_norm",
            cap: ORACLE_DIM_CAP,
            n,
        });
    }
    if algebra_basis.is_empty() {
        return Err(Error::Precondition {
            op: "unitization_norm",
            detail: "empty algebra basis".into(),
        });
    }
    for b in algebra_basis {
        if b.dim() != n {
            return Err(Error::DimensionMismatch(
                "algebra basis dimension mismatch".into(),
            ));
        }
    }

    let span = SpanHelper::new(algebra_basis)?;

    // closure under products, checked to tolerance
    for bi in algebra_basis {
        for bj in algebra_basis {
            let prod = bi * bj;
            let residual = span.projection_residual(&prod);
            if residual > CLOSURE_TOL * (1.0 + prod.max_abs()) {
                return Err(Error::Precondition {
                    op: "unitization_norm",
                    detail: format!(
                        "basis does not span an algebra (product residual {residual:.3e})"
                    ),
                });
            }
        }
    }
    // a must lie in the span
    let res_a = span.projection_residual(a);
    if res_a > CLOSURE_TOL * (1.0 + a.max_abs()) {
        return Err(Error::Precondition {
            op: "unitization_norm",
            detail: format!("element lies outside the spanned algebra (residual {res_a:.3e})"),
        });
    }

    let k = algebra_basis.len();
    let shifted = a.add_scalar(lambda); // (a + lambda) c = ac + lambda c
    let assemble = |beta: &[C64]| {
        let mut c = PMatrix::zeros(n);
        for (co, b) in beta.iter().zip(algebra_basis) {
            c = c + b.scale(*co);
        }
        c
    };
    // scale-invariant objective ||(a + lambda) c|| / ||c||
    let ratio = |beta: &[C64], restarts: usize| -> Result<Option<f64>> {
        let c = assemble(beta);
        if c.max_abs() < 1e-14 {
            return Ok(None);
        }
        let den = engine.oracle_with_restarts(&c, p, restarts)?.value;
        if den < 1e-14 {
            return Ok(None);
        }
        let num = engine
            .oracle_with_restarts(&(&shifted * &c), p, restarts)?
            .value;
        Ok(Some(num / den))
    };

    // candidate coefficient vectors: identity's coordinates when the span
    // contains it, each basis element, then seeded random draws
    let mut candidates: Vec<Vec<C64>> = Vec::new();
    if let Some(id_coeffs) = span.coefficients_if_member(&PMatrix::identity(n)) {
        candidates.push(id_coeffs);
    }
    for i in 0..k {
        let mut beta = vec![C64::new(0.0, 0.0); k];
        beta[i] = C64::new(1.0, 0.0);
        candidates.push(beta);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(engine.seed ^ 0x756e_6974);
    for _ in 0..RANDOM_CANDIDATES {
        candidates.push(
            (0..k)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im)
                })
                .collect(),
        );
    }

    let mut best_beta: Option<Vec<C64>> = None;
    let mut best = f64::NEG_INFINITY;
    for beta in &candidates {
        if let Some(v) = ratio(beta, SEARCH_RESTARTS)? {
            if v > best {
                best = v;
                best_beta = Some(beta.clone());
            }
        }
    }
    let mut beta = best_beta.ok_or_else(|| Error::Precondition {
        op: "unitization_norm",
        detail: "degenerate basis: every candidate had zero norm".into(),
    })?;

    // compass ascent over the real coordinates of beta, with a
    // sufficient-increase threshold tied to the step size
    let mut step: f64 = 0.5;
    let mut evals = 0usize;
    while step > 1e-5 && evals < 8_000 {
        let forcing = (1e-4 * step * step).max(1e-12);
        let mut improved = false;
        for i in 0..k {
            for dir in [
                C64::new(step, 0.0),
                C64::new(-step, 0.0),
                C64::new(0.0, step),
                C64::new(0.0, -step),
            ] {
                let mut cand = beta.clone();
                cand[i] += dir;
                evals += 1;
                if let Some(v) = ratio(&cand, SEARCH_RESTARTS)? {
                    if v > best + forcing {
                        best = v;
                        beta = cand;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    // full-budget value at the winning coefficients
    let c = assemble(&beta);
    let den = engine.oracle(&c, p)?.value;
    let num = engine.oracle(&(&shifted * &c), p)?.value;
    Ok(num / den)
}

/// Least-squares helper over the span of vectorized matrices.
struct SpanHelper {
    stacked: DMatrix<C64>,
    n: usize,
}

impl SpanHelper {
    fn new(basis: &[PMatrix]) -> Result<Self> {
        let n = basis[0].dim();
        let k = basis.len();
        let stacked = DMatrix::<C64>::from_fn(n * n, k, |r, c| basis[c].entry(r / n, r % n));
        let svd = stacked.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-12 * smax.max(1e-300))
            .count();
        if rank < k {
            return Err(Error::Precondition {
                op: "unitization_norm",
                detail: "algebra basis is linearly dependent".into(),
            });
        }
        Ok(Self { stacked, n })
    }

    fn least_squares(&self, m: &PMatrix) -> (Vec<C64>, f64) {
        let n = self.n;
        let target = DMatrix::<C64>::from_fn(n * n, 1, |r, _| m.entry(r / n, r % n));
        let svd = self.stacked.clone().svd(true, true);
        let coeffs = svd
            .solve(&target, 1e-13)
            .expect("SVD least squares on full-rank basis");
        let residual = (&self.stacked * &coeffs - &target)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        (coeffs.iter().copied().collect(), residual)
    }

    fn projection_residual(&self, m: &PMatrix) -> f64 {
        self.least_squares(m).1
    }

    fn coefficients_if_member(&self, m: &PMatrix) -> Option<Vec<C64>> {
        let (coeffs, residual) = self.least_squares(m);
        if residual <= CLOSURE_TOL * (1.0 + m.max_abs()) {
            Some(coeffs)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn trivial_algebra_of_identity() {
        let engine = NormEngine::default();
        let v = unitization_norm(
            &engine,
            &PMatrix::zeros(2),
            C64::new(1.0, 0.0),
            &[PMatrix::identity(2)],
            &p(3.0),
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn rank_one_algebra_collapses_to_scalar_modulus() {
        // A = C e_2: ||mu e_2 + lambda 1||_{A^1} = |mu + lambda|
        let e2 = gallery::make_en(2).unwrap();
        let engine = NormEngine::default();
        for (mu, lambda) in [
            (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
            (C64::new(0.5, -1.0), C64::new(-0.25, 0.75)),
            (C64::new(-2.0, 0.0), C64::new(1.0, 1.0)),
        ] {
            let v = unitization_norm(&engine, &e2.scale(mu), lambda, &[e2.clone()], &p(4.0))
                .unwrap();
            let expect = (mu + lambda).norm();
            assert!((v - expect).abs() < 2e-6, "mu={mu} lambda={lambda}: {v} vs {expect}");
        }
    }

    #[test]
    fn nondegenerate_case_matches_shifted_norm() {
        // full matrix algebra M_2 acting nondegenerately
        let units: Vec<PMatrix> = (0..4)
            .map(|k| {
                PMatrix::from_fn(2, |i, j| {
                    if i == k / 2 && j == k % 2 {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let a = PMatrix::from_rows(vec![
            vec![C64::new(0.4, -0.3), C64::new(1.2, 0.0)],
            vec![C64::new(0.0, 0.5), C64::new(-0.7, 0.1)],
        ])
        .unwrap();
        let lambda = C64::new(0.6, 0.2);
        let engine = NormEngine::default();
        let pe = p(4.0);
        let v = unitization_norm(&engine, &a, lambda, &units, &pe).unwrap();
        let direct = engine.oracle(&a.add_scalar(lambda), &pe).unwrap().value;
        assert!((v - direct).abs() <= 2e-6, "{v} vs {direct}");
    }

    #[test]
    fn non_algebra_basis_rejected() {
        // span{ e_12 } alone is closed under products (e_12^2 = 0), but
        // span{ e_12 + e_21 } is not
        let m = PMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let engine = NormEngine::default();
        let err = unitization_norm(&engine, &m, C64::new(0.0, 0.0), &[m.clone()], &p(3.0));
        assert!(matches!(err, Err(Error::Precondition { .. })));
    }

    #[test]
    fn element_outside_span_rejected() {
        let e2 = gallery::make_en(2).unwrap();
        let engine = NormEngine::default();
        let err = unitization_norm(
            &engine,
            &PMatrix::identity(2),
            C64::new(0.0, 0.0),
            &[e2],
            &p(3.0),
        );
        assert!(matches!(err, Err(Error::Precondition { .. })));
    }
}
