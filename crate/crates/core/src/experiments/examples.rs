//! Experiments that machine-check the structured matrix examples.

use std::time::Instant;

use serde_json::Value;

use crate::elements;
use crate::error::Result;
use crate::exponent::PExponent;
use crate::gallery;
use crate::matrix::{vector_p_norm, C64, PMatrix, PVector};
use crate::pnorm::quotient_seminorm;
use crate::random::random_matrix;
use crate::transforms;

use super::{json_float, params_map, Checks, ExperimentParams, ExperimentResult};

/// Witness lower bound for `||1 - e_n||_p` from `xi = (1, -1, ..., -1)`:
/// `(1 - e_n) xi = ((2n-2)/n, -2/n, ..., -2/n)` over `||xi||_p^p = n`.
fn one_minus_en_witness_bound(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let head = (2.0 * nf - 2.0) / nf;
    let tail = 2.0 / nf;
    ((head.powf(p) + (nf - 1.0) * tail.powf(p)) / nf).powf(1.0 / p)
}

pub(super) fn example_mp(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let n = params.n.unwrap_or(3);
    let p = params.exponent(4.0)?;
    let mut checks = Checks::new();

    let en = gallery::make_en(n)?;
    let id = PMatrix::identity(n);

    let norm_en = engine.oracle(&en, &p)?.value;
    checks.close("norm(e_n) = 1", norm_en, 1.0, 2e-6);

    let one_minus = &id - &en;
    let norm_one_minus = engine.oracle(&one_minus, &p)?.value;
    if p.p() != 2.0 {
        let bound = one_minus_en_witness_bound(n, p.p());
        if n >= 3 {
            checks.at_least("norm(1 - e_n) >= witness bound", norm_one_minus, bound, 1e-9);
        } else {
            checks.close("norm(1 - e_2) = 1", norm_one_minus, 1.0, 2e-6);
        }
    }
    let (_, upper) = engine.bracket(&one_minus, &p)?;
    checks.at_most("norm(1 - e_n) <= 2 - 1e-3 (interpolation)", upper, 2.0 - 1e-3, 0.0);

    // 1 - 2 e_2 is an invertible isometry; 1 - 2 e_n is not for n >= 3
    let e2 = gallery::make_en(2)?;
    let iso2 = elements::is_invertible_isometry(
        &engine,
        &(PMatrix::identity(2) - e2.scale_re(2.0)),
        &p,
    )?;
    checks.flag("1 - 2 e_2 invertible isometry", iso2.is_some(), true);
    if n >= 3 {
        let iso_n =
            elements::is_invertible_isometry(&engine, &(&id - &en.scale_re(2.0)), &p)?;
        checks.flag("1 - 2 e_n not an isometry", iso_n.is_some(), false);
    }

    let rp = elements::is_real_positive(&engine, &en, &p)?;
    checks.flag("e_n real positive iff n = 2", rp.flag, n == 2);
    let herm = elements::is_hermitian(&engine, &en, &p)?;
    checks.flag("e_n not hermitian", herm.flag, false);

    if n >= 3 {
        let curve = gallery::g_curve(n, &[2.0, p.p()])?;
        checks.close("g(2) = 1", curve[0].g, 1.0, 1e-12);
        checks.flag("g' < 0", curve.iter().all(|pt| pt.g_prime < 0.0), true);
    }

    Ok(checks.finish(
        "example-mp",
        params_map(&[
            ("n", Value::Number(n.into())),
            ("p", json_float(p.p())),
        ]),
        params.seed,
        started,
    ))
}

pub(super) fn example_e7721(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(4.0)?;
    let mut checks = Checks::new();

    let klein = gallery::make_klein_pair()?;
    let max_identity_residual = klein
        .identities
        .iter()
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    checks.at_most(
        "construction identities (s^2=t^2=1, st=ts, ef=e_4, conjugation)",
        max_identity_residual,
        1e-12,
        0.0,
    );

    let e = klein.matrix("e");
    let f = klein.matrix("f");
    let g = klein.matrix("g");
    let id = PMatrix::identity(4);

    for (name, m) in [("e", e), ("f", f)] {
        let norm = engine.oracle(m, &p)?.value;
        let norm_c = engine.oracle(&(&id - m), &p)?.value;
        checks.at_most(&format!("norm({name}) <= 1"), norm, 1.0, 2e-6);
        checks.at_most(&format!("norm(1 - {name}) <= 1"), norm_c, 1.0, 2e-6);
    }

    let norm_g = engine.oracle(g, &p)?.value;
    checks.at_least("norm(e + f - ef) > 1", norm_g, 1.0 + 1e-3, 0.0);

    // the complements are real positive idempotents whose product is not
    let e0 = &id - e;
    let f0 = &id - f;
    let rp_e0 = elements::is_real_positive(&engine, &e0, &p)?;
    let rp_f0 = elements::is_real_positive(&engine, &f0, &p)?;
    let rp_prod = elements::is_real_positive(&engine, &(&e0 * &f0), &p)?;
    checks.flag("1 - e real positive", rp_e0.flag, true);
    checks.flag("1 - f real positive", rp_f0.flag, true);
    checks.flag("(1-e)(1-f) not real positive", rp_prod.flag, false);

    Ok(checks.finish(
        "example-e7721",
        params_map(&[("p", json_float(p.p()))]),
        params.seed,
        started,
    ))
}

pub(super) fn example_mp2(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(6.0)?;
    let q = p.q();
    let mut checks = Checks::new();

    let quot = gallery::make_mp2_quotient()?;
    let id = PMatrix::identity(3);
    let f1 = quot.f(1);

    let threshold = gallery::Mp2Quotient::threshold_p();
    checks.close(
        "threshold log4/(log4 - log3)",
        threshold,
        4.8188,
        1e-4,
    );

    let qf = quotient_seminorm(&engine, f1, &quot.ideal_basis, &p)?;
    checks.at_most("quotient norm of f <= 1", qf.value, 1.0, 2e-6);

    let q1f = quotient_seminorm(&engine, &(&id - f1), &quot.ideal_basis, &p)?;
    checks.at_most("quotient norm of 1 - f <= 1", q1f.value, 1.0, 2e-6);

    let m = &id - &f1.scale_re(2.0);
    let q2f = quotient_seminorm(&engine, &m, &quot.ideal_basis, &p)?;
    let bound = gallery::Mp2Quotient::quotient_lower_bound(q);
    if p.p() > threshold {
        checks.at_least(
            "quotient norm of 1 - 2f >= (2 * 3^{-q/2})^{1/q}",
            q2f.value,
            bound,
            1e-6,
        );
    } else {
        checks.info(
            "quotient norm of 1 - 2f (below the proven threshold)",
            json_float(q2f.value),
        );
    }

    Ok(checks.finish(
        "example-mp2",
        params_map(&[("p", json_float(p.p())), ("q", json_float(q))]),
        params.seed,
        started,
    ))
}

pub(super) fn cayley_sweep(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let grid: Vec<f64> = params.p_grid.clone().unwrap_or_else(|| {
        let mut g = Vec::new();
        let mut k = 0;
        loop {
            let p = 1.05 + 0.05 * k as f64;
            if p > 3.0 + 1e-12 {
                break;
            }
            g.push(p);
            k += 1;
        }
        g
    });
    let mut checks = Checks::new();

    let x = gallery::make_cayley_counterexample();
    let kappa = transforms::cayley(&x)?;
    let basis0 = PVector::standard_basis(2, 0);
    let column = kappa.apply(&basis0);

    // closed form vs the directly computed p-norm of kappa(x)(1, 0)
    let mut max_dev = 0.0f64;
    for &pv in &grid {
        let pe = PExponent::new(pv)?;
        let direct = vector_p_norm(&column, &pe);
        let closed = gallery::cayley_column_norm_closed_form(pv);
        max_dev = max_dev.max((direct - closed).abs());
    }
    checks.at_most("closed form matches direct column norm", max_dev, 1e-12, 0.0);

    // the transform of an accretive element fails contractivity near p = 1
    let p11 = PExponent::new(1.1)?;
    let closed_11 = gallery::cayley_column_norm_closed_form(1.1);
    checks.close("column norm at p = 1.1", closed_11, 1.0152, 1e-3);
    let norm_kappa_11 = engine.oracle(&kappa, &p11)?.value;
    checks.at_least("norm(kappa(x)) > 1 at p = 1.1", norm_kappa_11, closed_11, 1e-9);
    let rp = elements::is_real_positive(&engine, &x, &p11)?;
    checks.flag("x real positive at p = 1.1", rp.flag, true);

    // and is contractive at p = 2, as for Hilbert-space accretives
    let norm_kappa_2 = engine.oracle(&kappa, &PExponent::two())?.value;
    checks.at_most("norm(kappa(x)) <= 1 at p = 2", norm_kappa_2, 1.0, 2e-6);
    let closed_2 = gallery::cayley_column_norm_closed_form(2.0);
    checks.close("column norm at p = 2 is sqrt(15)/5", closed_2, 15f64.sqrt() / 5.0, 1e-12);

    // report where the closed-form column norm crosses 1
    let crossing = grid
        .windows(2)
        .find(|w| {
            gallery::cayley_column_norm_closed_form(w[0]) > 1.0
                && gallery::cayley_column_norm_closed_form(w[1]) <= 1.0
        })
        .map(|w| w[1]);
    checks.info(
        "closed-form crossing of 1 (first grid p with value <= 1)",
        crossing.map(json_float).unwrap_or(Value::Null),
    );

    Ok(checks.finish(
        "cayley-sweep",
        params_map(&[
            ("p_grid_len", Value::Number(grid.len().into())),
            ("p_min", json_float(*grid.first().unwrap())),
            ("p_max", json_float(*grid.last().unwrap())),
        ]),
        params.seed,
        started,
    ))
}

pub(super) fn uta_collapse(params: &ExperimentParams) -> Result<ExperimentResult> {
    let started = Instant::now();
    let engine = params.engine();
    let p = params.exponent(4.0)?;
    let count = params.count.unwrap_or(20);
    let n = params.n.unwrap_or(3);
    let mut checks = Checks::new();

    // block norm of [[lambda, x], [0, mu]] on l^p_{2n} vs the 2x2 scalar
    // model [[|lambda|, ||x||], [0, |mu|]]
    let mut max_dev = 0.0f64;
    for k in 0..count {
        let seed = params.seed.wrapping_add(k as u64).wrapping_mul(0x9e37_79b9);
        let x = random_matrix(n, seed);
        let lam = C64::new(((k as f64) * 0.37).cos(), ((k as f64) * 0.61).sin());
        let mu = C64::new(((k as f64) * 0.53).sin(), ((k as f64) * 0.29).cos());
        let xnorm = engine.oracle(&x, &p)?.value;
        let block = gallery::u_construction_block(lam, mu, &x);
        let block_norm = engine
            .oracle_with_restarts(&block, &p, 200)?
            .value;
        let reduced = gallery::u_construction_norm(&engine, lam, mu, xnorm, &p)?;
        max_dev = max_dev.max((block_norm - reduced).abs());
    }
    checks.at_most("block norm equals reduced 2x2 norm", max_dev, 2e-5, 0.0);

    // monotonicity of N(xnorm) on a 10-point grid
    let lam = C64::new(0.8, 0.0);
    let mu = C64::new(0.3, 0.4);
    let mut prev = f64::NEG_INFINITY;
    let mut min_step = f64::INFINITY;
    for i in 0..10 {
        let xnorm = 0.25 * (i as f64 + 1.0);
        let v = gallery::u_construction_norm(&engine, lam, mu, xnorm, &p)?;
        if prev.is_finite() {
            min_step = min_step.min(v - prev);
        }
        prev = v;
    }
    checks.at_least("N(xnorm) nondecreasing on the grid", min_step, 0.0, 2e-6);

    Ok(checks.finish(
        "uta-collapse",
        params_map(&[
            ("p", json_float(p.p())),
            ("n", Value::Number(n.into())),
            ("count", Value::Number(count.into())),
        ]),
        params.seed,
        started,
    ))
}
