//! Seeded random matrix generators used by the experiment suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::exponent::PExponent;
use crate::matrix::{C64, PMatrix};
use crate::pnorm::NormEngine;
use crate::states;

/// Complex Gaussian matrix, entries `N(0,1) + i N(0,1)`, deterministic in
/// the seed.
pub fn random_matrix(n: usize, seed: u64) -> PMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PMatrix::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Random accretive matrix: draw a complex Gaussian `m`, estimate the
/// numerical-range abscissa by sampling plus polish, and shift
/// `m + (max(0, -alpha) + margin) * 1` into the right half plane.
///
/// The margin absorbs the estimation error of the abscissa; singular
/// accretive examples come from the structured gallery instead.
pub fn random_accretive(
    engine: &NormEngine,
    n: usize,
    p: &PExponent,
    seed: u64,
) -> Result<PMatrix> {
    const MARGIN: f64 = 0.05;
    let m = random_matrix(n, seed);
    let alpha = states::abscissa_estimate(&m, p, 100, seed ^ 0xacc3)?;
    let shift = (-alpha).max(0.0) + MARGIN;
    let _ = engine;
    Ok(m.add_scalar(C64::new(shift, 0.0)))
}

/// Random element of the unit ball of the span of `basis` (coefficientwise
/// Gaussian, normalized by the oracle norm). Returns `None` for a zero draw.
pub fn random_ball_element(
    engine: &NormEngine,
    basis: &[PMatrix],
    p: &PExponent,
    rng: &mut ChaCha8Rng,
    restarts: usize,
) -> Result<Option<PMatrix>> {
    let n = basis[0].dim();
    let mut m = PMatrix::zeros(n);
    for b in basis {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        m = m + b.scale(C64::new(re, im));
    }
    let norm = engine.oracle_with_restarts(&m, p, restarts)?.value;
    if norm < 1e-12 {
        return Ok(None);
    }
    Ok(Some(m.scale_re(1.0 / norm)))
}
