//! Transforms of accretive matrices: fractional powers (binomial series and
//! spectral routes), the Cayley-type transforms `x (x+1)^{-1}` and
//! `(x-1)(x+1)^{-1}`, and support idempotents computed along two independent
//! limits.
//!
//! Each limit object is computed twice: the support idempotent via the
//! fractional-power sequence `x^{1/n}` and via the resolvent curve
//! `x (x + eps)^{-1}`. Both sequences converge at rate `O(1/n)` resp.
//! `O(eps)`, so each is accelerated by one step of Richardson extrapolation
//! along its schedule (`n = 2^k`, `eps = 10^{-k}`); a disagreement beyond
//! tolerance is an error.

use crate::elements;
use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::linalg::funm::{matrix_function, FunmOptions, PrincipalPower};
use crate::linalg::rank;
use crate::matrix::{C64, PMatrix};
use crate::pnorm::NormEngine;

#[derive(Clone, Copy, Debug)]
pub struct PowerSeriesConfig {
    pub tolerance: f64,
    pub max_terms: usize,
    /// Value of `||1 - b||` above which the spectral route should replace
    /// the series.
    pub boundary_switch_threshold: f64,
}

impl Default for PowerSeriesConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_terms: 100_000,
            boundary_switch_threshold: 0.999,
        }
    }
}

/// `x (x + 1)^{-1}`; maps real-positive elements into the F-set.
pub fn f_transform(x: &PMatrix) -> Result<PMatrix> {
    let shifted = x.add_scalar(C64::new(1.0, 0.0));
    let inv = shifted
        .try_inverse()
        .ok_or(Error::Singular("f_transform: x + 1"))?;
    Ok(x * &inv)
}

/// Cayley transform `(x - 1)(x + 1)^{-1} = 2 F(x) - 1`.
pub fn cayley(x: &PMatrix) -> Result<PMatrix> {
    let shifted = x.add_scalar(C64::new(1.0, 0.0));
    let inv = shifted
        .try_inverse()
        .ok_or(Error::Singular("cayley: x + 1"))?;
    Ok(&x.add_scalar(C64::new(-1.0, 0.0)) * &inv)
}

/// Binomial series for `b^t` on the F-set:
/// `b^t = 1 + sum_k [t(t-1)...(t-k+1)/k!] (-1)^k (1-b)^k`.
///
/// All coefficients past the constant term are negative and sum to -1, so
/// when the powers `(1-b)^k` stabilize (idempotent-like `1-b`) the tail is
/// closed in one step with the remaining coefficient mass. Without
/// stabilization the partial sums run until the term norm drops below the
/// tolerance; exhausting `max_terms` suggests the spectral route.
pub fn power_series(
    engine: &NormEngine,
    b: &PMatrix,
    t: f64,
    p: &PExponent,
    cfg: &PowerSeriesConfig,
) -> Result<PMatrix> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition {
            op: "power_series",
            detail: format!("t must lie in (0, 1), got {t}"),
        });
    }
    let id = PMatrix::identity(b.dim());
    let one_minus = &id - b;
    let norm_one_minus = engine.oracle(&one_minus, p)?.value;
    if norm_one_minus > 1.0 + elements::Tolerances::default().norm {
        return Err(Error::Precondition {
            op: "power_series",
            detail: format!("||1 - b|| = {norm_one_minus} exceeds 1; b is outside the F-set"),
        });
    }

    let mut sum = id;
    let mut coeff = -t; // d_1
    let mut coeff_acc = 0.0; // running sum of d_k
    let mut pow = one_minus.clone();
    for k in 1..=cfg.max_terms {
        sum = sum + pow.scale_re(coeff);
        coeff_acc += coeff;

        let next_pow = &pow * &one_minus;
        if next_pow.max_abs_diff(&pow) < cfg.tolerance {
            // powers have stabilized; the tail sums to the remaining mass
            let remaining = -1.0 - coeff_acc;
            sum = sum + next_pow.scale_re(remaining);
            return Ok(sum);
        }

        let next_coeff = coeff * ((k as f64) - t) / ((k as f64) + 1.0);
        if next_coeff.abs() * next_pow.max_abs() < cfg.tolerance {
            return Ok(sum);
        }
        pow = next_pow;
        coeff = next_coeff;
    }
    Err(Error::SeriesBudget {
        max_terms: cfg.max_terms,
    })
}

/// Principal-branch power of an accretive matrix, `t in (0, 1)`, with
/// `0^t = 0` on a semisimple kernel.
pub fn power_accretive(
    engine: &NormEngine,
    x: &PMatrix,
    t: f64,
    p: &PExponent,
) -> Result<PMatrix> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition {
            op: "power_accretive",
            detail: format!("t must lie in (0, 1), got {t}"),
        });
    }
    let rp = elements::is_real_positive(engine, x, p)?;
    if !rp.flag {
        return Err(Error::Precondition {
            op: "power_accretive",
            detail: format!(
                "x is not real positive (semigroup norm reached {})",
                rp.max_grid_norm
            ),
        });
    }
    // a zero eigenvalue must be semisimple
    if rank(x, 1e-10) != rank(&(x * x), 1e-10) {
        return Err(Error::NonSemisimpleKernel {
            residual: f64::NAN,
        });
    }
    matrix_function(x, &PrincipalPower { t }, &FunmOptions::default())
}

/// The support idempotent with its route diagnostics.
///
/// Invariants enforced before returning: `s^2 = s` and `s x = x s = x`
/// (1e-8), `||1 - s|| <= 1` to oracle tolerance, and `rank(s) = rank(x)`.
#[derive(Clone, Debug)]
pub struct SupportIdempotentResult {
    pub s: PMatrix,
    /// Entrywise distance between the power route and the resolvent route.
    pub route_agreement: f64,
    /// Largest root order `n = 2^k` used by the power route.
    pub n_used: u64,
    /// Smallest `eps` used by the resolvent route.
    pub epsilon_used: f64,
    pub idempotency_residual: f64,
    pub fixes_x_residual: f64,
    pub norm_one_minus: f64,
}

const ROUTE_TOL: f64 = 1e-6;
const STABILITY_TOL: f64 = 1e-9;

/// Support idempotent of an accretive matrix: the limit of `x^{1/n}`,
/// equivalently of `x (x + eps)^{-1}`; the spectral projection onto
/// `range(x)` along `ker(x)`.
pub fn support_idempotent(
    engine: &NormEngine,
    x: &PMatrix,
    p: &PExponent,
) -> Result<SupportIdempotentResult> {
    let rp = elements::is_real_positive(engine, x, p)?;
    if !rp.flag {
        return Err(Error::Precondition {
            op: "support_idempotent",
            detail: "x is not real positive".into(),
        });
    }

    let (route_power, n_used) = support_via_roots(engine, x, p)?;
    let (route_resolvent, epsilon_used) = support_via_resolvent(x)?;

    let route_agreement = route_power.max_abs_diff(&route_resolvent);
    if route_agreement > ROUTE_TOL {
        return Err(Error::RouteDisagreement {
            op: "support_idempotent",
            disagreement: route_agreement,
            tol: ROUTE_TOL,
        });
    }

    let s = route_resolvent;
    let idempotency_residual = (&s * &s).max_abs_diff(&s);
    let fixes_x_residual = (&s * x).max_abs_diff(x).max((x * &s).max_abs_diff(x));
    let id = PMatrix::identity(x.dim());
    let norm_one_minus = engine.oracle(&(&id - &s), p)?.value;

    if idempotency_residual > 1e-8 {
        return Err(Error::Inconsistent {
            op: "support_idempotent",
            detail: format!("s^2 - s residual {idempotency_residual:.3e}"),
        });
    }
    if fixes_x_residual > 1e-8 {
        return Err(Error::Inconsistent {
            op: "support_idempotent",
            detail: format!("s x - x residual {fixes_x_residual:.3e}"),
        });
    }
    if norm_one_minus > 1.0 + elements::Tolerances::default().norm {
        return Err(Error::Inconsistent {
            op: "support_idempotent",
            detail: format!("||1 - s|| = {norm_one_minus} exceeds 1"),
        });
    }
    if rank(&s, 1e-8) != rank(x, 1e-8) {
        return Err(Error::Inconsistent {
            op: "support_idempotent",
            detail: "rank(s) differs from rank(x)".into(),
        });
    }

    Ok(SupportIdempotentResult {
        s,
        route_agreement,
        n_used,
        epsilon_used,
        idempotency_residual,
        fixes_x_residual,
        norm_one_minus,
    })
}

/// Power route: Richardson-extrapolated `x^{1/n}` along `n = 2^k`.
/// The plain sequence converges at `O(1/n)`; `2 x^{1/2n} - x^{1/n}` removes
/// the leading term.
fn support_via_roots(
    engine: &NormEngine,
    x: &PMatrix,
    p: &PExponent,
) -> Result<(PMatrix, u64)> {
    let _ = (engine, p);
    let opts = FunmOptions::default();
    let root = |k: u32| -> Result<PMatrix> {
        let t = 0.5f64.powi(k as i32);
        matrix_function(x, &PrincipalPower { t }, &opts)
    };
    let mut z_prev = root(1)?;
    let mut z = root(2)?;
    let mut extrap_prev = &z.scale_re(2.0) - &z_prev;
    let mut n_used = 4u64;
    for k in 3..=20u32 {
        z_prev = z;
        z = root(k)?;
        let extrap = &z.scale_re(2.0) - &z_prev;
        n_used = 1u64 << k;
        let diff = extrap.max_abs_diff(&extrap_prev);
        extrap_prev = extrap;
        if diff < STABILITY_TOL {
            break;
        }
    }
    Ok((extrap_prev, n_used))
}

/// Resolvent route: Richardson-extrapolated `x (x + eps)^{-1}` along
/// `eps = 10^{-k}`; `(10 s_{eps/10} - s_eps) / 9` removes the `O(eps)` term.
fn support_via_resolvent(x: &PMatrix) -> Result<(PMatrix, f64)> {
    let resolvent = |eps: f64| -> Result<PMatrix> {
        let shifted = x.add_scalar(C64::new(eps, 0.0));
        let inv = shifted
            .try_inverse()
            .ok_or(Error::Singular("support_idempotent: x + eps"))?;
        Ok(x * &inv)
    };
    let mut s_prev = resolvent(1e-2)?;
    let mut s = resolvent(1e-3)?;
    let mut extrap_prev = (&s.scale_re(10.0) - &s_prev).scale_re(1.0 / 9.0);
    let mut eps_used = 1e-3;
    for k in 4..=12u32 {
        let eps = 10f64.powi(-(k as i32));
        s_prev = s;
        s = resolvent(eps)?;
        let extrap = (&s.scale_re(10.0) - &s_prev).scale_re(1.0 / 9.0);
        eps_used = eps;
        let diff = extrap.max_abs_diff(&extrap_prev);
        extrap_prev = extrap;
        if diff < STABILITY_TOL {
            break;
        }
    }
    Ok((extrap_prev, eps_used))
}

#[derive(Clone, Copy, Debug)]
pub struct InvarianceCheck {
    pub holds: bool,
    pub distance: f64,
}

/// `s(F(x)) = s(x)`: the support idempotent is invariant under the
/// F-transform.
pub fn support_invariance_check(
    engine: &NormEngine,
    x: &PMatrix,
    p: &PExponent,
) -> Result<InvarianceCheck> {
    let sx = support_idempotent(engine, x, p)?;
    let fx = f_transform(x)?;
    let sfx = support_idempotent(engine, &fx, p)?;
    let distance = sx.s.max_abs_diff(&sfx.s);
    Ok(InvarianceCheck {
        holds: distance < ROUTE_TOL,
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    fn engine() -> NormEngine {
        NormEngine::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn f_transform_examples() {
        assert!(f_transform(&PMatrix::zeros(2)).unwrap().max_abs() < 1e-15);

        let half = f_transform(&PMatrix::identity(3)).unwrap();
        assert!(half.max_abs_diff(&PMatrix::identity(3).scale_re(0.5)) < 1e-15);

        // idempotent e: e (e + 1)^{-1} = e / 2, and the image is in the F-set
        let e2 = gallery::make_en(2).unwrap();
        let fe = f_transform(&e2).unwrap();
        assert!(fe.max_abs_diff(&e2.scale_re(0.5)) < 1e-14);
        let (in_fa, _) = crate::elements::in_fa(&engine(), &fe, &p(4.0)).unwrap();
        assert!(in_fa);

        // -1 in the spectrum is rejected
        assert!(f_transform(&PMatrix::diag_real(&[-1.0, 2.0])).is_err());
    }

    #[test]
    fn cayley_examples() {
        // the displayed transform of 2 e_2 - i
        let x = gallery::make_cayley_counterexample();
        let k = cayley(&x).unwrap();
        let expect = PMatrix::from_rows(vec![
            vec![c(0.2, -0.6), c(0.2, 0.4)],
            vec![c(0.2, 0.4), c(0.2, -0.6)],
        ])
        .unwrap();
        assert!(k.max_abs_diff(&expect) < 1e-13, "kappa(x) = {k:?}");

        assert!(cayley(&PMatrix::identity(2)).unwrap().max_abs() < 1e-15);
        let neg = cayley(&PMatrix::zeros(2)).unwrap();
        assert!(neg.max_abs_diff(&PMatrix::identity(2).scale_re(-1.0)) < 1e-15);
    }

    #[test]
    fn cayley_is_affine_in_f_transform() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let x = PMatrix::from_fn(3, |i, j| {
                let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                if i == j {
                    z + c(2.0, 0.0)
                } else {
                    z
                }
            });
            let k = cayley(&x).unwrap();
            let f = f_transform(&x).unwrap();
            let recomposed = f.scale_re(2.0).add_scalar(c(-1.0, 0.0));
            assert!(k.max_abs_diff(&recomposed) < 1e-12);
        }
    }

    #[test]
    fn power_series_examples() {
        let e = engine();
        let pe = p(4.0);
        let cfg = PowerSeriesConfig::default();

        // idempotent: the series collapses to e_2 exactly
        let e2 = gallery::make_en(2).unwrap();
        let r = power_series(&e, &e2, 0.5, &pe, &cfg).unwrap();
        assert!(r.max_abs_diff(&e2) < 1e-12, "series of e_2 off by {}", r.max_abs_diff(&e2));

        // identity
        let r = power_series(&e, &PMatrix::identity(3), 0.7, &pe, &cfg).unwrap();
        assert!(r.max_abs_diff(&PMatrix::identity(3)) < 1e-12);

        // scalar homogeneity: ((1/2) 1)^{1/2} = 2^{-1/2} 1
        let r = power_series(&e, &PMatrix::identity(2).scale_re(0.5), 0.5, &pe, &cfg).unwrap();
        let expect = PMatrix::identity(2).scale_re(2f64.powf(-0.5));
        assert!(r.max_abs_diff(&expect) < 1e-10);

        // outside the F-set: rejected
        let err = power_series(&e, &PMatrix::identity(2).scale_re(3.0), 0.5, &pe, &cfg);
        assert!(matches!(err, Err(Error::Precondition { .. })));

        // non-stabilizing boundary spectrum exhausts the budget
        let b = PMatrix::diag(&[c(1.0, -1.0), c(1.0, 0.0)]); // 1 - b = diag(i, 0)
        let small = PowerSeriesConfig {
            max_terms: 500,
            ..cfg
        };
        let err = power_series(&e, &b, 0.5, &pe, &small);
        assert!(matches!(err, Err(Error::SeriesBudget { .. })), "{err:?}");
    }

    #[test]
    fn power_accretive_examples() {
        let e = engine();
        let pe = p(4.0);

        let r = power_accretive(&e, &PMatrix::diag_real(&[4.0, 0.0]), 0.5, &pe).unwrap();
        assert!(r.max_abs_diff(&PMatrix::diag_real(&[2.0, 0.0])) < 1e-12);

        // idempotent fixed by all powers
        let m = PMatrix::identity(3) - gallery::make_en(3).unwrap();
        let r = power_accretive(&e, &m, 0.5, &pe).unwrap();
        assert!(r.max_abs_diff(&m) < 1e-10);

        // square root of the accretive counterexample round-trips
        let x = gallery::make_cayley_counterexample();
        let r = power_accretive(&e, &x, 0.5, &pe).unwrap();
        assert!((&r * &r).max_abs_diff(&x) < 1e-8);

        // non-accretive input rejected
        let err = power_accretive(&e, &PMatrix::identity(2).scale_re(-1.0), 0.5, &pe);
        assert!(matches!(err, Err(Error::Precondition { .. })));
    }

    #[test]
    fn series_agrees_with_spectral_route_inside_boundary() {
        use rand::Rng;
        use rand::SeedableRng;
        let e = engine();
        let pe = p(3.0);
        let cfg = PowerSeriesConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..6 {
            // b = 0.001 + 0.999 * F(x) for accretive x keeps ||1-b|| <= 0.999
            let x = crate::random::random_accretive(&e, 3, &pe, rng.gen()).unwrap();
            let b = f_transform(&x)
                .unwrap()
                .scale_re(0.999)
                .add_scalar(c(0.001, 0.0));
            let t = 0.5;
            let via_series = power_series(&e, &b, t, &pe, &cfg).unwrap();
            let via_spectral = power_accretive(&e, &b, t, &pe).unwrap();
            assert!(
                via_series.max_abs_diff(&via_spectral) < 1e-8,
                "series and spectral routes disagree"
            );
        }
    }

    #[test]
    fn power_semigroup_law() {
        let e = engine();
        let pe = p(4.0);
        let x = gallery::make_cayley_counterexample();
        let a = power_accretive(&e, &x, 0.3, &pe).unwrap();
        let b = power_accretive(&e, &x, 0.45, &pe).unwrap();
        let ab = power_accretive(&e, &x, 0.75, &pe).unwrap();
        assert!((a * b).max_abs_diff(&ab) < 1e-8);
    }

    #[test]
    fn support_idempotent_examples() {
        let e = engine();
        let pe = p(4.0);

        // an idempotent is its own support
        let e2 = gallery::make_en(2).unwrap();
        let r = support_idempotent(&e, &e2, &pe).unwrap();
        assert!(r.s.max_abs_diff(&e2) < 1e-8);
        assert!(r.route_agreement <= 1e-6);

        // 1 - e_3: support is itself, and it is NOT contractive
        let m = PMatrix::identity(3) - gallery::make_en(3).unwrap();
        let r = support_idempotent(&e, &m, &pe).unwrap();
        assert!(r.s.max_abs_diff(&m) < 1e-8);
        let norm_s = e.oracle(&r.s, &pe).unwrap().value;
        assert!(norm_s > 1.0 + 1e-3, "||s|| = {norm_s}");
        assert!(r.norm_one_minus <= 1.0 + 2e-6);

        // diagonal case
        let d = PMatrix::diag_real(&[5.0, 0.0, 3.0]);
        let r = support_idempotent(&e, &d, &pe).unwrap();
        assert!(r.s.max_abs_diff(&PMatrix::diag_real(&[1.0, 0.0, 1.0])) < 1e-8);

        // non-accretive rejected
        let err = support_idempotent(&e, &PMatrix::identity(2).scale_re(-1.0), &pe);
        assert!(matches!(err, Err(Error::Precondition { .. })));
    }

    #[test]
    fn support_invariance_examples() {
        let e = engine();
        let pe = p(4.0);
        for x in [
            gallery::make_en(2).unwrap(),
            PMatrix::diag_real(&[1.0, 0.0]),
            PMatrix::identity(3) - gallery::make_en(3).unwrap(),
        ] {
            let chk = support_invariance_check(&e, &x, &pe).unwrap();
            assert!(chk.holds, "distance {}", chk.distance);
        }
    }

    #[test]
    fn support_minimality() {
        // every idempotent f with f x = x satisfies f s = s
        let e = engine();
        let pe = p(4.0);
        let x = PMatrix::diag_real(&[5.0, 0.0, 3.0]);
        let s = support_idempotent(&e, &x, &pe).unwrap().s;
        for f in [
            PMatrix::identity(3),
            PMatrix::diag_real(&[1.0, 0.0, 1.0]),
            PMatrix::diag_real(&[1.0, 1.0, 1.0]),
        ] {
            if (&f * &x).max_abs_diff(&x) < 1e-12 {
                assert!((&f * &s).max_abs_diff(&s) < 1e-8);
            }
        }
    }
}
