//! Multi-start maximization of `||Ax||_p` over the unit sphere of `l^p_n`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::{C64, PMatrix, PVector};

use super::{p_norm_dvec, psi, NormEngine, NormEstimate, NormMethod, ORACLE_DIM_CAP};

pub(super) fn run(
    engine: &NormEngine,
    a: &PMatrix,
    p: &PExponent,
    restarts: usize,
) -> Result<NormEstimate> {
    p.require_interior("pnorm_oracle")?;
    let n = a.dim();
    if n > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap {
            op: "pnorm_oracle",
            cap: ORACLE_DIM_CAP,
            n,
        });
    }
    let restarts = restarts.max(1);
    let starts = start_sequence(n, restarts, engine.seed);

    let am = a.as_dmatrix();
    let ah = am.adjoint();

    let polished: Vec<(f64, DVector<C64>, bool)> = starts
        .par_iter()
        .map(|x0| polish(am, &ah, p, x0, engine.polish_max_iter))
        .collect();

    // deterministic reduction: max value, ties broken by restart index
    let mut best_idx = 0;
    for (i, cand) in polished.iter().enumerate() {
        if cand.0 > polished[best_idx].0 {
            best_idx = i;
        }
    }
    let mut values: Vec<f64> = polished.iter().map(|c| c.0).collect();
    values.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let median = values[values.len() / 2];
    let (best_value, best_x, plateaued) = &polished[best_idx];

    // re-normalize and recompute so the witness reproduces the value exactly
    let xn = p_norm_dvec(best_x, p);
    let witness = if xn > 0.0 {
        best_x / C64::new(xn, 0.0)
    } else {
        DVector::from_element(n, C64::new(0.0, 0.0))
    };
    let value = p_norm_dvec(&(am * &witness), p);

    Ok(NormEstimate {
        value,
        witness: PVector::from_dvector(witness),
        upper: None,
        method: NormMethod::Oracle,
        restarts_used: restarts,
        converged: *plateaued,
        restart_spread: Some(best_value - median),
    })
}

/// Deterministic start sequence: the `n` standard basis vectors first, then
/// alternately the all-ones vector with random unimodular phases and
/// normalized complex-Gaussian samples. A larger budget extends the sequence
/// without changing its prefix.
fn start_sequence(n: usize, restarts: usize, seed: u64) -> Vec<DVector<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(restarts);
    for i in 0..restarts.min(n) {
        let mut v = DVector::from_element(n, C64::new(0.0, 0.0));
        v[i] = C64::new(1.0, 0.0);
        starts.push(v);
    }
    let mut k = starts.len();
    while k < restarts {
        if k % 2 == 0 {
            let v = DVector::from_fn(n, |_, _| {
                let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                C64::new(theta.cos(), theta.sin())
            });
            starts.push(v);
        } else {
            let v = DVector::from_fn(n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            });
            starts.push(v);
        }
        k += 1;
    }
    starts
}

/// Projected gradient ascent with backtracking line search for the ratio
/// `R(x) = ||Ax||_p / ||x||_p`, retracting onto the unit p-sphere.
///
/// Returns `(value, x, plateaued)`; `value` is always a valid lower bound.
fn polish(
    a: &DMatrix<C64>,
    ah: &DMatrix<C64>,
    p: &PExponent,
    x0: &DVector<C64>,
    max_iter: usize,
) -> (f64, DVector<C64>, bool) {
    let pe = p.p();
    let nx0 = p_norm_dvec(x0, p);
    if nx0 == 0.0 {
        return (0.0, x0.clone(), true);
    }
    let mut x = x0 / C64::new(nx0, 0.0);
    let mut y = a * &x;
    let mut value = p_norm_dvec(&y, p);
    if value == 0.0 {
        // start lies in the kernel; stationary
        return (0.0, x, true);
    }

    let mut step = 1.0f64;
    let mut small_streak = 0usize;
    let mut plateaued = false;

    for _ in 0..max_iter {
        // gradient of the ratio at a unit vector:
        // grad = ||Ax||^{1-p} A^H psi_p(Ax) - ||Ax|| psi_p(x)
        let gy = psi(&y, pe);
        let mut grad = ah * gy * C64::new(value.powf(1.0 - pe), 0.0);
        grad -= psi(&x, pe) * C64::new(value, 0.0);
        let gn2: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
        if gn2.sqrt() <= 1e-14 * (1.0 + value) {
            plateaued = true;
            break;
        }

        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = &x + &grad * C64::new(alpha, 0.0);
            let cn = p_norm_dvec(&cand, p);
            if cn > 0.0 {
                let cand = cand / C64::new(cn, 0.0);
                let cy = a * &cand;
                let cv = p_norm_dvec(&cy, p);
                if cv > value + 1e-4 * alpha * gn2 {
                    accepted = Some((cand, cy, cv, alpha));
                    break;
                }
            }
            alpha *= 0.5;
        }

        match accepted {
            Some((cand, cy, cv, used)) => {
                if cv - value <= 1e-13 * (1.0 + cv) {
                    small_streak += 1;
                } else {
                    small_streak = 0;
                }
                x = cand;
                y = cy;
                value = cv;
                step = (used * 2.0).min(1.0e3);
                if small_streak >= 2 {
                    plateaued = true;
                    break;
                }
            }
            None => {
                // no ascent direction left at line-search resolution
                plateaued = true;
                break;
            }
        }
    }

    (value, x, plateaued)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn engine() -> NormEngine {
        NormEngine::default()
    }

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        let est = engine().oracle(&PMatrix::identity(3), &p(3.0)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
        assert!(est.converged);
    }

    #[test]
    fn invertible_isometry_has_norm_one() {
        // 1 - 2 e_2 is a complex permutation matrix
        let m = PMatrix::identity(2) - gallery::make_en(2).unwrap().scale_re(2.0);
        let est = engine().oracle(&m, &p(4.0)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "got {}", est.value);
    }

    #[test]
    fn one_minus_e3_exceeds_witness_bound() {
        // witness (1,-1,-1): ||(1-e_3)(1,-1,-1)||_4^4 / ||(1,-1,-1)||_4^4 = 288/243
        let m = PMatrix::identity(3) - gallery::make_en(3).unwrap();
        let est = engine().oracle(&m, &p(4.0)).unwrap();
        let bound = (288.0f64 / 243.0).powf(0.25);
        assert!(est.value >= bound - 1e-9, "value {} < {}", est.value, bound);
    }

    #[test]
    fn one_minus_2e3_exceeds_inverse_witness_bound() {
        // (1-2e_3)(1,0,0) has norm (33/81)^{1/4} < 1 and 1-2e_3 is its own
        // inverse, so the norm is at least (81/33)^{1/4}
        let m = PMatrix::identity(3) - gallery::make_en(3).unwrap().scale_re(2.0);
        let est = engine().oracle(&m, &p(4.0)).unwrap();
        let bound = (81.0f64 / 33.0).powf(0.25);
        assert!(est.value >= bound - 1e-9, "value {} < {}", est.value, bound);
    }

    #[test]
    fn witness_reproduces_value() {
        let m = PMatrix::from_real_rows(&[&[0.3, 1.7, -0.2], &[0.0, 0.5, 2.0], &[1.1, 0.0, 0.9]])
            .unwrap();
        let pe = p(2.5);
        let est = engine().oracle(&m, &pe).unwrap();
        let ratio = crate::matrix::vector_p_norm(&m.apply(&est.witness), &pe)
            / crate::matrix::vector_p_norm(&est.witness, &pe);
        assert!((ratio - est.value).abs() <= 1e-10);
    }

    #[test]
    fn oracle_matches_svd_at_p_two() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let m = PMatrix::from_fn(3, |_, _| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let est = engine().oracle(&m, &PExponent::two()).unwrap();
            let smax = crate::linalg::sigma_max(&m);
            assert!(
                (est.value - smax).abs() <= 1e-8,
                "oracle {} vs svd {}",
                est.value,
                smax
            );
        }
    }

    #[test]
    fn monotone_in_restart_budget() {
        let m = PMatrix::from_real_rows(&[&[0.1, 2.0, 0.4], &[1.5, -0.3, 0.8], &[0.0, 0.2, -1.9]])
            .unwrap();
        let pe = p(1.5);
        let mut prev = 0.0;
        for budget in [1, 2, 4, 8, 16, 64, 200] {
            let est = engine().oracle_with_restarts(&m, &pe, budget).unwrap();
            assert!(
                est.value >= prev - 1e-14,
                "budget {budget}: {} < {prev}",
                est.value
            );
            prev = est.value;
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let m = PMatrix::identity(9);
        match engine().oracle(&m, &p(3.0)) {
            Err(Error::DimensionCap { cap: 8, .. }) => {}
            other => panic!("expected DimensionCap, got {other:?}"),
        }
    }

    #[test]
    fn transpose_duality() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for pe in [1.5, 3.0] {
            for _ in 0..5 {
                let m = PMatrix::from_fn(3, |_, _| {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let pp = p(pe);
                let qq = pp.conjugate();
                let a = engine().oracle(&m, &pp).unwrap().value;
                let b = engine().oracle(&m.transpose(), &qq).unwrap().value;
                assert!((a - b).abs() <= 2e-6, "p={pe}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn invariance_under_complex_permutations_and_conjugation() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = PMatrix::from_fn(3, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let pe = p(3.0);
        let base = engine().oracle(&m, &pe).unwrap().value;

        // complex permutation: permutation times unimodular diagonal
        let perm = PMatrix::from_rows(vec![
            vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
            vec![C64::new(0.6, 0.8), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let conj_m = engine().oracle(&m.conj(), &pe).unwrap().value;
        let pre = engine().oracle(&(&perm * &m), &pe).unwrap().value;
        let post = engine().oracle(&(&m * &perm), &pe).unwrap().value;
        assert!((conj_m - base).abs() <= 2e-6);
        assert!((pre - base).abs() <= 2e-6);
        assert!((post - base).abs() <= 2e-6);
    }
}
