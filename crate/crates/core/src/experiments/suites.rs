//! Statistical property suites: support idempotents, vector states,
//! M-projections, interpolation, and oracle validation.

use std::time::Instant;

use serde_json::Value;

use crate::elements;
use crate::error::Result;
use crate::exponent::PExponent;
use crate::gallery;
use crate::linalg;
use crate::matrix::{C64, PMatrix};
use crate::pnorm::unitization_norm;
use crate::random::{random_accretive, random_matrix};
use crate::states;
use crate::transforms;

use super::{json_float, params_map, Checks, ExperimentParams, ExperimentResult};

pub(super) fn support_suite(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(4.0)?;
    let count = params.count.unwrap_or(50);
    let mut checks = Checks::new();

    // seeded random accretive inputs plus the singular zoo
    let mut inputs: Vec<PMatrix> = Vec::new();
    for k in 0..count {
        inputs.push(random_accretive(
            &engine,
            3,
            &p,
            params.seed.wrapping_add(k as u64),
        )?);
    }
    inputs.push(gallery::make_en(2)?);
    inputs.push(PMatrix::identity(3) - gallery::make_en(3)?);
    inputs.push(PMatrix::diag_real(&[5.0, 0.0, 3.0]));

    let mut max_idem = 0.0f64;
    let mut max_fix = 0.0f64;
    let mut max_norm_one_minus = 0.0f64;
    let mut max_route = 0.0f64;
    let mut max_invariance = 0.0f64;
    let mut max_sqrt_roundtrip = 0.0f64;
    let mut max_series_spectral = 0.0f64;
    let mut min_power_bound_slack = f64::INFINITY;

    let series_cfg = transforms::PowerSeriesConfig::default();
    for x in &inputs {
        let sup = transforms::support_idempotent(&engine, x, &p)?;
        max_idem = max_idem.max(sup.idempotency_residual);
        max_fix = max_fix.max(sup.fixes_x_residual);
        max_norm_one_minus = max_norm_one_minus.max(sup.norm_one_minus);
        max_route = max_route.max(sup.route_agreement);

        let inv = transforms::support_invariance_check(&engine, x, &p)?;
        max_invariance = max_invariance.max(inv.distance);

        let root = transforms::power_accretive(&engine, x, 0.5, &p)?;
        max_sqrt_roundtrip = max_sqrt_roundtrip.max((&root * &root).max_abs_diff(x));

        // series vs spectral route on the overlap domain: pull x into
        // ||1 - b|| <= 0.999 through the F-transform
        let b = transforms::f_transform(x)?
            .scale_re(0.999)
            .add_scalar(C64::new(0.001, 0.0));
        let via_series = transforms::power_series(&engine, &b, 0.5, &p, &series_cfg)?;
        let via_spectral = transforms::power_accretive(&engine, &b, 0.5, &p)?;
        max_series_spectral = max_series_spectral.max(via_series.max_abs_diff(&via_spectral));

        // norm growth bound for fractional powers
        let norm_x = engine.oracle(x, &p)?.value;
        for t in [0.25, 0.5, 0.75] {
            let xt = transforms::power_accretive(&engine, x, t, &p)?;
            let norm_xt = engine.oracle(&xt, &p)?.value;
            let bound = 2.0 * norm_x.powf(t) / (1.0 - t);
            min_power_bound_slack = min_power_bound_slack.min(bound - norm_xt);
        }
    }

    checks.at_most("max ||s^2 - s||", max_idem, 1e-8, 0.0);
    checks.at_most("max ||s x - x||, ||x s - x||", max_fix, 1e-8, 0.0);
    checks.at_most("max ||1 - s||", max_norm_one_minus, 1.0, 2e-6);
    checks.at_most("max route disagreement", max_route, 1e-6, 0.0);
    checks.at_most("max ||s(F(x)) - s(x)||", max_invariance, 1e-6, 0.0);
    checks.at_most("max ||(x^{1/2})^2 - x||", max_sqrt_roundtrip, 1e-8, 0.0);
    checks.at_most(
        "max series/spectral disagreement on the overlap domain",
        max_series_spectral,
        1e-8,
        0.0,
    );
    checks.at_least(
        "min slack of ||x^t|| <= 2 ||x||^t / (1 - t)",
        min_power_bound_slack,
        0.0,
        1e-6,
    );

    Ok(checks.finish(
        "support-suite",
        params_map(&[
            ("p", json_float(p.p())),
            ("count", Value::Number(count.into())),
        ]),
        params.seed,
        started,
    ))
}

pub(super) fn states_suite(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(4.0)?;
    let count = params.count.unwrap_or(1000);
    let mut checks = Checks::new();

    // normalization of sampled states
    let sampled = states::sample_states(&p, 4, count.min(1000), params.seed)?;
    let max_norm_residual = sampled
        .iter()
        .map(|s| s.normalization_residual(&p))
        .fold(0.0, f64::max);
    checks.at_most("state normalization residual", max_norm_residual, 1e-10, 0.0);

    // vanishing law for the two bicontractive idempotents
    let rep = states::vanishing_state_suite(
        &engine,
        &PMatrix::diag_real(&[1.0, 0.0]),
        &[],
        &p,
        count,
        params.seed,
    )?;
    checks.at_most("vanishing residual for diag(1,0)", rep.max_residual, 1e-8, 0.0);

    let e2 = gallery::make_en(2)?;
    let rep = states::vanishing_state_suite(&engine, &e2, &[], &p, count, params.seed ^ 1)?;
    checks.at_most("vanishing residual for e_2", rep.max_residual, 1e-8, 0.0);

    // support-state law on the singular zoo
    let mut forward_max = 0.0f64;
    let mut converse_max = 0.0f64;
    let converse_count = count.min(200); // each converse state is found by optimization
    for (i, x) in [
        PMatrix::diag_real(&[5.0, 0.0]),
        e2.clone(),
        (PMatrix::identity(3) - gallery::make_en(3)?).scale_re(0.5),
    ]
    .iter()
    .enumerate()
    {
        let rep = states::support_state_suite(
            &engine,
            x,
            &p,
            converse_count,
            params.seed ^ (i as u64 + 2),
        )?;
        forward_max = forward_max.max(rep.forward_max);
        if let Some(c) = rep.converse_max {
            converse_max = converse_max.max(c);
        }
    }
    checks.at_most("support-state forward residual", forward_max, 1e-8, 0.0);
    checks.at_most("support-state converse residual", converse_max, 1e-8, 0.0);

    Ok(checks.finish(
        "states-suite",
        params_map(&[
            ("p", json_float(p.p())),
            ("count", Value::Number(count.into())),
        ]),
        params.seed,
        started,
    ))
}

pub(super) fn m_ideal_suite(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(4.0)?;
    let count = params.count.unwrap_or(1000);
    let mut checks = Checks::new();

    // z = diag(1,1,0) is central for the block algebra M_2 + M_1
    let z = PMatrix::diag_real(&[1.0, 1.0, 0.0]);
    let basis = states::block_diagonal_basis(3, 2);
    let rep = states::m_projection_check(&engine, &z, &basis, &p, count, params.seed)?;
    checks.at_least("min slack for z = diag(1,1,0)", rep.min_slack, 0.0, 2e-6);

    // trivial central idempotents
    let rep0 = states::m_projection_check(
        &engine,
        &PMatrix::zeros(2),
        &states::matrix_units(2),
        &p,
        count.min(50),
        params.seed ^ 1,
    )?;
    checks.at_least("min slack for z = 0", rep0.min_slack, 0.0, 2e-6);
    let rep1 = states::m_projection_check(
        &engine,
        &PMatrix::identity(2),
        &states::matrix_units(2),
        &p,
        count.min(50),
        params.seed ^ 2,
    )?;
    checks.at_least("min slack for z = 1", rep1.min_slack, 0.0, 2e-6);

    Ok(checks.finish(
        "m-ideal-suite",
        params_map(&[
            ("p", json_float(p.p())),
            ("count", Value::Number(count.into())),
        ]),
        params.seed,
        started,
    ))
}

pub(super) fn unitization_pair(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(4.0)?;
    let mut checks = Checks::new();

    let pair = gallery::make_unitization_pair()?;

    // all four idempotents of C f + C 1 are hermitian
    for (name, m) in pair.diagonal_idempotents() {
        let h = elements::is_hermitian(&engine, &m, &p)?;
        checks.flag(&format!("idempotent {name} of C f + C 1 hermitian"), h.flag, true);
    }

    // e_2 is a non-hermitian idempotent, witnessed dynamically
    let h = elements::is_hermitian(&engine, &pair.e, &p)?;
    checks.flag("e_2 hermitian", h.flag, false);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let exp_arg = pair.e.scale(C64::new(0.0, half_pi));
    let norm_at_witness = engine.oracle(&linalg::matrix_exp(&exp_arg), &p)?.value;
    checks.at_least(
        "||exp(i pi/2 e_2)|| at p = 4",
        norm_at_witness,
        1.189,
        1e-3,
    );

    // e_2 is bicontractive
    let r = elements::classify(&engine, &pair.e, &p)?;
    checks.flag("e_2 bicontractive", r.is_bicontractive, true);

    // multiplier unitization of the rank-one algebra C e_2 collapses to the
    // scalar modulus |mu + lambda|
    let mut max_dev = 0.0f64;
    for (mu, lambda) in [
        (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(0.4, -0.8), C64::new(-0.3, 0.5)),
    ] {
        let v = unitization_norm(&engine, &pair.e.scale(mu), lambda, &[pair.e.clone()], &p)?;
        max_dev = max_dev.max((v - (mu + lambda).norm()).abs());
    }
    checks.at_most("||mu e + lambda 1||_{A^1} = |mu + lambda|", max_dev, 2e-6, 0.0);

    // nondegenerate action: the unitization norm agrees with the shifted norm
    let a = random_matrix(2, params.seed ^ 77).scale_re(0.5);
    let lambda = C64::new(0.3, -0.4);
    let v = unitization_norm(&engine, &a, lambda, &states::matrix_units(2), &p)?;
    let direct = engine.oracle(&a.add_scalar(lambda), &p)?.value;
    checks.close("nondegenerate unitization norm = ||a + lambda 1||", v, direct, 2e-6);

    Ok(checks.finish(
        "unitization-pair",
        params_map(&[("p", json_float(p.p()))]),
        params.seed,
        started,
    ))
}

pub(super) fn riesz_thorin(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let count = params.count.unwrap_or(100);
    let mut checks = Checks::new();

    let p0 = PExponent::new(1.25)?;
    let p1 = PExponent::new(4.0)?;
    let theta = 0.5;
    let p_mid = PExponent::new(1.0 / ((1.0 - theta) / p0.p() + theta / p1.p()))?;

    let mut max_ratio = 0.0f64;
    for k in 0..count {
        let a = random_matrix(3, params.seed.wrapping_add(k as u64));
        let n0 = engine.oracle(&a, &p0)?.value;
        let n1 = engine.oracle(&a, &p1)?.value;
        let nm = engine.oracle(&a, &p_mid)?.value;
        let bound = n0.powf(1.0 - theta) * n1.powf(theta);
        max_ratio = max_ratio.max(nm / bound);
    }
    checks.at_most(
        "log-convexity ratio ||A||_{p_theta} / (||A||_{p_0}^{1-theta} ||A||_{p_1}^{theta})",
        max_ratio,
        1.0 + 1e-5,
        0.0,
    );

    Ok(checks.finish(
        "riesz-thorin",
        params_map(&[
            ("count", Value::Number(count.into())),
            ("p0", json_float(p0.p())),
            ("p1", json_float(p1.p())),
            ("p_theta", json_float(p_mid.p())),
        ]),
        params.seed,
        started,
    ))
}

pub(super) fn oracle_vs_power(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let count = params.count.unwrap_or(100);
    let mut checks = Checks::new();

    let mut max_svd_dev = 0.0f64;
    let mut max_transpose_dev = 0.0f64;
    let mut max_power_excess = f64::NEG_INFINITY;
    let two = PExponent::two();

    for k in 0..count {
        let a = random_matrix(3, params.seed.wrapping_add(k as u64));

        // p = 2: the optimization must reproduce the largest singular value
        let est = engine.oracle(&a, &two)?;
        max_svd_dev = max_svd_dev.max((est.value - linalg::sigma_max(&a)).abs());

        // transpose duality ||A||_p = ||A^T||_q
        for pv in [1.5, 3.0] {
            let pe = PExponent::new(pv)?;
            let qe = pe.conjugate();
            let v1 = engine.oracle(&a, &pe)?.value;
            let v2 = engine.oracle(&a.transpose(), &qe)?.value;
            max_transpose_dev = max_transpose_dev.max((v1 - v2).abs());
        }

        // the power method from the structured starts never beats the oracle
        let pe = PExponent::new(3.0)?;
        let power = engine
            .power(&a, &pe, &crate::matrix::PVector::ones(3), 5000)?
            .value;
        let oracle = engine.oracle(&a, &pe)?.value;
        max_power_excess = max_power_excess.max(power - oracle);
    }

    checks.at_most("max |oracle(A, 2) - sigma_max(A)|", max_svd_dev, 1e-8, 0.0);
    checks.at_most(
        "max |oracle(A, p) - oracle(A^T, q)|, p in {1.5, 3}",
        max_transpose_dev,
        2e-6,
        0.0,
    );
    checks.at_most(
        "power-method value never exceeds the oracle",
        max_power_excess,
        0.0,
        1e-9,
    );

    Ok(checks.finish(
        "oracle-vs-power",
        params_map(&[("count", Value::Number(count.into()))]),
        params.seed,
        started,
    ))
}
