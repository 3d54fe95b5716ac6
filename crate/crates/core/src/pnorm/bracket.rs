//! Two-sided bracket: power-method lower bound plus the interpolation upper
//! bound `||A||_1^{1/p} ||A||_inf^{1-1/p}` from the exact endpoint norms.

use crate::error::Result;
use crate::exponent::PExponent;
use crate::matrix::PMatrix;

use super::{check_general_dim, power, NormEngine};

pub(super) fn run(engine: &NormEngine, a: &PMatrix, p: &PExponent) -> Result<(f64, f64)> {
    check_general_dim(a, "pnorm_bracket")?;
    let l1 = a.norm_l1();
    let linf = a.norm_linf();
    let pe = p.p();
    if pe == 1.0 {
        return Ok((l1, l1));
    }
    if pe.is_infinite() {
        return Ok((linf, linf));
    }
    let upper = l1.powf(1.0 / pe) * linf.powf(1.0 - 1.0 / pe);
    if a.max_abs() == 0.0 {
        return Ok((0.0, 0.0));
    }
    let lower = power::best_over_structured_starts(a, p, engine.power_max_iter)?.value;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use crate::exponent::PExponent;
    use crate::gallery;
    use crate::matrix::PMatrix;
    use crate::pnorm::NormEngine;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn identity_bracket_is_tight() {
        let (lo, hi) = NormEngine::default()
            .bracket(&PMatrix::identity(4), &p(3.0))
            .unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn e3_bracket_collapses_to_one() {
        // all row and column sums of e_3 equal 1
        let e3 = gallery::make_en(3).unwrap();
        let (lo, hi) = NormEngine::default().bracket(&e3, &p(4.0)).unwrap();
        assert!((lo - 1.0).abs() < 1e-10, "lower {lo}");
        assert!((hi - 1.0).abs() < 1e-12, "upper {hi}");
    }

    #[test]
    fn one_minus_2e3_bracket() {
        // endpoint sums are 1/3 + 2/3 + 2/3 = 5/3 for every row and column
        let m = PMatrix::identity(3) - gallery::make_en(3).unwrap().scale_re(2.0);
        let (lo, hi) = NormEngine::default().bracket(&m, &p(4.0)).unwrap();
        assert!((hi - 5.0 / 3.0).abs() < 1e-12, "upper {hi}");
        let bound = (81.0f64 / 33.0).powf(0.25);
        assert!(lo >= bound - 1e-9, "lower {lo} < {bound}");
        assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn endpoints_are_exact() {
        let m = PMatrix::from_real_rows(&[&[1.0, -2.0], &[0.5, 0.0]]).unwrap();
        let (lo, hi) = NormEngine::default().bracket(&m, &p(1.0)).unwrap();
        assert_eq!(lo, hi);
        assert!((lo - 2.0).abs() < 1e-15); // max column sum
        let (lo, hi) = NormEngine::default()
            .bracket(&m, &PExponent::new(f64::INFINITY).unwrap())
            .unwrap();
        assert_eq!(lo, hi);
        assert!((lo - 3.0).abs() < 1e-15); // max row sum
    }

    #[test]
    fn lower_below_upper_on_random_matrices() {
        use crate::matrix::C64;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let m = PMatrix::from_fn(4, |_, _| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let (lo, hi) = NormEngine::default().bracket(&m, &p(2.7)).unwrap();
            assert!(lo <= hi + 1e-12, "bracket inverted: {lo} > {hi}");
        }
    }
}
