//! Classification of matrices as elements of the unital algebra `M_n^p`:
//! idempotency, contractivity, bicontractivity, hermitianness, real
//! positivity, invertible-isometry structure, and the hermitian
//! positive/negative decomposition.
//!
//! Hermitianness on `l^p_n` with `p != 2` is decided structurally (real
//! diagonal matrices are exactly the hermitian elements); the dynamical
//! `||exp(i lambda a)|| = 1` sweep is run as a guard against implementation
//! bugs, and a disagreement between the two is an error, never silently
//! resolved. Real positivity is decided by the contraction-semigroup test
//! `||exp(-t a)|| <= 1`, corroborated by spatial numerical range sampling.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::linalg::matrix_exp;
use crate::matrix::{C64, PMatrix};
use crate::pnorm::NormEngine;
use crate::states;

/// Module-wide default tolerances, overridable per call site.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Exact algebraic identities (idempotency, products, fits).
    pub algebraic: f64,
    /// Single-oracle norm comparisons.
    pub norm: f64,
    /// Dynamical sweeps (exponential grids), which stack two oracle calls
    /// with a matrix exponential.
    pub dynamical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-9,
            norm: 2e-6,
            dynamical: 2e-5,
        }
    }
}

/// Restart budget for the grid sweeps inside the hermitian / real-positive
/// tests; the sweep matrices are small and structured, so a reduced budget
/// saturates them.
const SWEEP_RESTARTS: usize = 32;

/// Lamperti structure of an invertible isometry of `l^p_n`, `p != 2`:
/// a unimodular diagonal times a permutation.
#[derive(Clone, Debug)]
pub struct IsometryCertificate {
    /// Column `j` has its unimodular entry in row `permutation[j]`.
    pub permutation: Vec<usize>,
    /// `diagonal[i]` is the entry in row `i`.
    pub diagonal: Vec<C64>,
}

impl IsometryCertificate {
    /// Rebuild `D(diagonal) * P(permutation)`.
    pub fn reconstruct(&self) -> PMatrix {
        let n = self.permutation.len();
        PMatrix::from_fn(n, |i, j| {
            if self.permutation[j] == i {
                self.diagonal[i]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DynamicalWitness {
    /// Grid parameter (`lambda` for the hermitian sweep, `t` for the
    /// semigroup sweep) at which the violation was observed.
    pub parameter: f64,
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct HermitianReport {
    pub flag: bool,
    /// Real diagonal entries when hermitian.
    pub diagonal: Option<Vec<f64>>,
    pub witness: Option<DynamicalWitness>,
    /// Largest `||exp(i lambda a)||` seen on the sweep grid.
    pub max_grid_norm: f64,
    /// True when `p = 2` forced the conjugate-symmetry fallback.
    pub fallback_p2: bool,
}

#[derive(Clone, Debug)]
pub struct RealPositiveReport {
    pub flag: bool,
    pub witness: Option<DynamicalWitness>,
    /// Largest `||exp(-t a)||` seen on the semigroup grid.
    pub max_grid_norm: f64,
    /// Smallest sampled `Re <a xi, eta>` over spatial vector states;
    /// corroboration only, the semigroup test decides.
    pub sampled_min_re: f64,
}

/// Classification certificate for one matrix.
#[derive(Clone, Debug)]
pub struct ElementReport {
    pub p: f64,
    pub is_idempotent: bool,
    pub is_contractive: bool,
    pub is_bicontractive: bool,
    pub is_real_positive: bool,
    pub is_hermitian: bool,
    pub is_invertible_isometry: bool,
    pub norm: f64,
    pub norm_one_minus: f64,
    pub idempotency_residual: f64,
    pub isometry: Option<IsometryCertificate>,
    pub hermitian: HermitianReport,
    pub real_positive: RealPositiveReport,
    pub tolerances: Tolerances,
}

/// Run every sub-check and populate the report; `p` must lie in `(1, inf)`.
/// At `p = 2` the hermitian check falls back to conjugate symmetry and the
/// isometry fit loses its converse (both flagged in the report).
pub fn classify(engine: &NormEngine, a: &PMatrix, p: &PExponent) -> Result<ElementReport> {
    p.require_interior("classify")?;
    let tol = Tolerances::default();
    let id = PMatrix::identity(a.dim());

    let norm = engine.oracle(a, p)?.value;
    let norm_one_minus = engine.oracle(&(&id - a), p)?.value;
    let idempotency_residual = (a * a).max_abs_diff(a);
    let is_idempotent = idempotency_residual <= tol.algebraic;
    let is_contractive = norm <= 1.0 + tol.norm;
    let in_fa = norm_one_minus <= 1.0 + tol.norm;
    let is_bicontractive = is_idempotent && is_contractive && in_fa;

    let hermitian = is_hermitian(engine, a, p)?;
    let real_positive = is_real_positive(engine, a, p)?;

    // membership in the F-set implies real positivity; for idempotents the
    // two norms tests must agree with the semigroup test
    if in_fa && !real_positive.flag {
        return Err(Error::Inconsistent {
            op: "classify",
            detail: format!(
                "||1 - a|| = {norm_one_minus} certifies real positivity but the semigroup test failed"
            ),
        });
    }
    if is_idempotent && real_positive.flag && !in_fa {
        return Err(Error::Inconsistent {
            op: "classify",
            detail: format!(
                "idempotent passed the semigroup test but ||1 - a|| = {norm_one_minus} > 1"
            ),
        });
    }

    let isometry = is_invertible_isometry(engine, a, p)?;

    Ok(ElementReport {
        p: p.p(),
        is_idempotent,
        is_contractive,
        is_bicontractive,
        is_real_positive: real_positive.flag,
        is_hermitian: hermitian.flag,
        is_invertible_isometry: isometry.is_some(),
        norm,
        norm_one_minus,
        idempotency_residual,
        isometry,
        hermitian,
        real_positive,
        tolerances: tol,
    })
}

/// Fit `a = D P` (unimodular diagonal times permutation). Succeeds iff the
/// residual is below 1e-9 and the support pattern is a permutation, and the
/// fit is cross-checked by `||a|| <= 1` and `||a^{-1}|| <= 1` to oracle
/// tolerance.
///
/// For `p != 2` these matrices are the only invertible isometries, so a
/// failed fit with both norm checks passing is reported as an inconsistency.
/// At `p = 2` rotations are isometries too and no converse is claimed.
pub fn is_invertible_isometry(
    engine: &NormEngine,
    a: &PMatrix,
    p: &PExponent,
) -> Result<Option<IsometryCertificate>> {
    p.require_interior("is_invertible_isometry")?;
    let tol = Tolerances::default();
    let fit = structural_isometry_fit(a, tol.algebraic);

    match fit {
        Some(cert) => {
            // the certificate makes a invertible with an explicit inverse
            let norm_checks_pass = isometry_norm_checks(engine, a, p, tol.norm)?;
            if !norm_checks_pass {
                return Err(Error::Inconsistent {
                    op: "is_invertible_isometry",
                    detail: "structural fit succeeded but a norm check failed".into(),
                });
            }
            Ok(Some(cert))
        }
        None => {
            if p.p() != 2.0 {
                if let Some(true) = try_isometry_norm_checks(engine, a, p, tol.norm)? {
                    return Err(Error::Inconsistent {
                        op: "is_invertible_isometry",
                        detail:
                            "no diagonal-permutation structure, yet both norm checks pass; \
                             tolerance conflict"
                                .into(),
                    });
                }
            }
            Ok(None)
        }
    }
}

fn structural_isometry_fit(a: &PMatrix, tol: f64) -> Option<IsometryCertificate> {
    let n = a.dim();
    let mut permutation = vec![usize::MAX; n];
    let mut diagonal = vec![C64::new(0.0, 0.0); n];
    let mut row_used = vec![false; n];
    for j in 0..n {
        // the unique entry of modulus ~ 1 in this column
        let mut best = (0.0f64, 0usize);
        for i in 0..n {
            let m = a.entry(i, j).norm();
            if m > best.0 {
                best = (m, i);
            }
        }
        let (mag, row) = best;
        if (mag - 1.0).abs() > tol || row_used[row] {
            return None;
        }
        row_used[row] = true;
        permutation[j] = row;
        diagonal[row] = a.entry(row, j);
    }
    let cert = IsometryCertificate {
        permutation,
        diagonal,
    };
    if a.max_abs_diff(&cert.reconstruct()) > tol {
        return None;
    }
    Some(cert)
}

fn isometry_norm_checks(
    engine: &NormEngine,
    a: &PMatrix,
    p: &PExponent,
    tol: f64,
) -> Result<bool> {
    Ok(try_isometry_norm_checks(engine, a, p, tol)?.unwrap_or(false))
}

/// `Some(true)` when `||a|| <= 1` and `||a^{-1}|| <= 1` to tolerance;
/// `None` when `a` is not invertible.
fn try_isometry_norm_checks(
    engine: &NormEngine,
    a: &PMatrix,
    p: &PExponent,
    tol: f64,
) -> Result<Option<bool>> {
    let Some(inv) = a.try_inverse() else {
        return Ok(None);
    };
    let na = engine.oracle(a, p)?.value;
    if na > 1.0 + tol {
        return Ok(Some(false));
    }
    let ninv = engine.oracle(&inv, p)?.value;
    Ok(Some(ninv <= 1.0 + tol))
}

/// Structural test (real diagonal) cross-checked by the dynamical sweep
/// `max_lambda ||exp(i lambda a)||` over `lambda in [-2pi, 2pi]` step
/// `pi/50`. The two must agree; at `p = 2` only conjugate symmetry is
/// testable and the report says so.
pub fn is_hermitian(engine: &NormEngine, a: &PMatrix, p: &PExponent) -> Result<HermitianReport> {
    p.require_interior("is_hermitian")?;
    let tol = Tolerances::default();
    let n = a.dim();

    if p.p() == 2.0 {
        let sym = a.max_abs_diff(&a.adjoint()) <= tol.algebraic;
        return Ok(HermitianReport {
            flag: sym,
            diagonal: sym.then(|| (0..n).map(|i| a.entry(i, i).re).collect()),
            witness: None,
            max_grid_norm: f64::NAN,
            fallback_p2: true,
        });
    }

    // structural: real diagonal
    let mut off_diag = 0.0f64;
    let mut diag_im = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag_im = diag_im.max(a.entry(i, i).im.abs());
            } else {
                off_diag = off_diag.max(a.entry(i, j).norm());
            }
        }
    }
    let structural = off_diag <= tol.algebraic && diag_im <= tol.algebraic;

    // dynamical: the norm of exp(i lambda a) along the grid
    let mut max_norm = 0.0f64;
    let mut witness: Option<DynamicalWitness> = None;
    for k in -100i32..=100 {
        let lambda = (k as f64) * std::f64::consts::PI / 50.0;
        let arg = a.scale(Complex64::new(0.0, lambda));
        let norm = engine
            .oracle_with_restarts(&matrix_exp(&arg), p, SWEEP_RESTARTS)?
            .value;
        if norm > max_norm {
            max_norm = norm;
            if norm > 1.0 + tol.dynamical {
                witness = Some(DynamicalWitness {
                    parameter: lambda,
                    norm,
                });
            }
        }
    }
    let dynamical = max_norm <= 1.0 + tol.dynamical;

    if structural != dynamical {
        return Err(Error::Inconsistent {
            op: "is_hermitian",
            detail: format!(
                "structural test says {structural}, dynamical sweep says {dynamical} \
                 (max grid norm {max_norm})"
            ),
        });
    }

    Ok(HermitianReport {
        flag: structural,
        diagonal: structural.then(|| (0..n).map(|i| a.entry(i, i).re).collect()),
        witness,
        max_grid_norm: max_norm,
        fallback_p2: false,
    })
}

/// Contraction-semigroup test: `||exp(-t a)|| <= 1` along the geometric grid
/// `t = 2^{-10}, ..., 2^4`, corroborated by sampling the spatial numerical
/// range (Lumer: the two views have the same convex hull).
pub fn is_real_positive(
    engine: &NormEngine,
    a: &PMatrix,
    p: &PExponent,
) -> Result<RealPositiveReport> {
    p.require_interior("is_real_positive")?;
    let tol = Tolerances::default();

    let mut max_norm = 0.0f64;
    let mut witness: Option<DynamicalWitness> = None;
    for k in -10i32..=4 {
        let t = 2f64.powi(k);
        let norm = engine
            .oracle_with_restarts(&matrix_exp(&a.scale_re(-t)), p, SWEEP_RESTARTS)?
            .value;
        if norm > max_norm {
            max_norm = norm;
            if norm > 1.0 + tol.dynamical && witness.is_none() {
                witness = Some(DynamicalWitness { parameter: t, norm });
            }
        }
    }
    let flag = max_norm <= 1.0 + tol.dynamical;

    let state_samples = states::sample_states(p, a.dim(), 200, engine.seed ^ 0x5250)?;
    let range = states::spatial_numerical_range(a, &state_samples);

    Ok(RealPositiveReport {
        flag,
        witness,
        max_grid_norm: max_norm,
        sampled_min_re: range.min_re,
    })
}

/// `||1 - a|| <= 1` to oracle tolerance; returns the flag and the norm.
pub fn in_fa(engine: &NormEngine, a: &PMatrix, p: &PExponent) -> Result<(bool, f64)> {
    let id = PMatrix::identity(a.dim());
    let norm = engine.oracle(&(&id - a), p)?.value;
    Ok((norm <= 1.0 + Tolerances::default().norm, norm))
}

/// Positive/negative split of a hermitian (real diagonal) matrix:
/// `a = b - c` with `b c = c b = 0`, both parts hermitian and real positive,
/// `||b||, ||c|| <= ||a||`. The construction is diagonal, hence exact.
pub fn hermitian_decomposition(a: &PMatrix) -> Result<(PMatrix, PMatrix)> {
    let n = a.dim();
    let tol = Tolerances::default().algebraic;
    for i in 0..n {
        for j in 0..n {
            let z = a.entry(i, j);
            let bad = if i == j {
                z.im.abs() > tol
            } else {
                z.norm() > tol
            };
            if bad {
                return Err(Error::Precondition {
                    op: "hermitian_decomposition",
                    detail: "input is not hermitian (not a real diagonal matrix)".into(),
                });
            }
        }
    }
    let pos: Vec<f64> = (0..n).map(|i| a.entry(i, i).re.max(0.0)).collect();
    let neg: Vec<f64> = (0..n).map(|i| (-a.entry(i, i).re).max(0.0)).collect();
    Ok((PMatrix::diag_real(&pos), PMatrix::diag_real(&neg)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderPrecondition {
    BothContractive,
    BothRealPositive,
    Unmet,
}

#[derive(Clone, Debug)]
pub struct OrderReport {
    /// Which precondition made the equivalence assertion applicable.
    pub precondition: OrderPrecondition,
    pub fe_eq_e: bool,
    pub ef_eq_e: bool,
    /// `e <= f`: `ef = fe = e`.
    pub le: bool,
    /// `e <=_r f`: `fe = e`.
    pub le_r: bool,
}

/// Order comparison of two idempotents. Under the precondition (both
/// contractive or both real positive) the one-sided identities `fe = e` and
/// `ef = e` are equivalent, and this is asserted; without it the report is
/// marked unchecked and nothing is asserted.
pub fn idempotent_order(
    engine: &NormEngine,
    e: &PMatrix,
    f: &PMatrix,
    p: &PExponent,
) -> Result<OrderReport> {
    let tol = Tolerances::default();
    if !e.is_idempotent(tol.algebraic) || !f.is_idempotent(tol.algebraic) {
        return Err(Error::Precondition {
            op: "idempotent_order",
            detail: "both arguments must be idempotent".into(),
        });
    }

    let both_contractive = engine.oracle(e, p)?.value <= 1.0 + tol.norm
        && engine.oracle(f, p)?.value <= 1.0 + tol.norm;
    let precondition = if both_contractive {
        OrderPrecondition::BothContractive
    } else {
        let rp = is_real_positive(engine, e, p)?.flag && is_real_positive(engine, f, p)?.flag;
        if rp {
            OrderPrecondition::BothRealPositive
        } else {
            OrderPrecondition::Unmet
        }
    };

    let fe_eq_e = (f * e).max_abs_diff(e) <= tol.algebraic;
    let ef_eq_e = (e * f).max_abs_diff(e) <= tol.algebraic;

    if precondition != OrderPrecondition::Unmet && fe_eq_e != ef_eq_e {
        return Err(Error::Inconsistent {
            op: "idempotent_order",
            detail: format!(
                "one-sided identities disagree under the precondition: fe=e is {fe_eq_e}, ef=e is {ef_eq_e}"
            ),
        });
    }

    Ok(OrderReport {
        precondition,
        fe_eq_e,
        ef_eq_e,
        le: fe_eq_e && ef_eq_e,
        le_r: fe_eq_e,
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

    #[test]
    fn classify_e2() {
        let e2 = gallery::make_en(2).unwrap();
        let r = classify(&engine(), &e2, &p(4.0)).unwrap();
        assert!(r.is_idempotent);
        assert!(r.is_contractive);
        assert!(r.is_bicontractive);
        assert!(r.is_real_positive);
        assert!(!r.is_hermitian);
        assert!(!r.is_invertible_isometry);
        assert!(r.hermitian.witness.is_some());
    }

    #[test]
    fn classify_e3() {
        let e3 = gallery::make_en(3).unwrap();
        let r = classify(&engine(), &e3, &p(4.0)).unwrap();
        assert!(r.is_idempotent);
        assert!(r.is_contractive);
        assert!(!r.is_bicontractive, "||1 - e_3|| = {}", r.norm_one_minus);
        assert!(!r.is_real_positive);
        assert!(!r.is_hermitian);
    }

    #[test]
    fn classify_real_diagonal_idempotent() {
        let d = PMatrix::diag_real(&[1.0, 0.0]);
        let r = classify(&engine(), &d, &p(3.0)).unwrap();
        assert!(r.is_idempotent);
        assert!(r.is_contractive);
        assert!(r.is_bicontractive);
        assert!(r.is_hermitian);
        assert!(r.is_real_positive);
    }

    #[test]
    fn isometry_certificates() {
        let e = engine();
        // 1 - 2 e_2 is the swap with signs flipped
        let m = PMatrix::identity(2) - gallery::make_en(2).unwrap().scale_re(2.0);
        let cert = is_invertible_isometry(&e, &m, &p(4.0)).unwrap().unwrap();
        assert_eq!(cert.permutation, vec![1, 0]);
        assert!((cert.diagonal[0] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((cert.diagonal[1] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(cert.reconstruct().max_abs_diff(&m) < 1e-12);

        // 1 - 2 e_3 is not an isometry
        let m3 = PMatrix::identity(3) - gallery::make_en(3).unwrap().scale_re(2.0);
        assert!(is_invertible_isometry(&e, &m3, &p(4.0)).unwrap().is_none());

        // identity
        let cert = is_invertible_isometry(&e, &PMatrix::identity(3), &p(1.5))
            .unwrap()
            .unwrap();
        assert_eq!(cert.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn hermitian_examples() {
        let e = engine();
        let d = PMatrix::diag_real(&[1.0, -2.5]);
        let r = is_hermitian(&e, &d, &p(3.0)).unwrap();
        assert!(r.flag);
        assert_eq!(r.diagonal.as_deref(), Some(&[1.0, -2.5][..]));

        // e_2 is not hermitian: at lambda = pi/2 the norm reaches 2^{1/4}
        let e2 = gallery::make_en(2).unwrap();
        let r = is_hermitian(&e, &e2, &p(4.0)).unwrap();
        assert!(!r.flag);
        let w = r.witness.unwrap();
        assert!(
            r.max_grid_norm >= 2f64.powf(0.25) - 1e-3,
            "max grid norm {} below 2^(1/4)",
            r.max_grid_norm
        );
        assert!(w.norm > 1.0 + 2e-5);

        // imaginary diagonal is not hermitian
        let im = PMatrix::diag(&[C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let r = is_hermitian(&e, &im, &p(3.0)).unwrap();
        assert!(!r.flag);
    }

    #[test]
    fn hermitian_p2_fallback() {
        let e = engine();
        let sym = PMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let r = is_hermitian(&e, &sym, &PExponent::two()).unwrap();
        assert!(r.fallback_p2);
        assert!(r.flag);
    }

    #[test]
    fn real_positive_examples() {
        let e = engine();
        let e2 = gallery::make_en(2).unwrap();
        assert!(is_real_positive(&e, &e2, &p(4.0)).unwrap().flag);

        // the Cayley counterexample matrix is accretive
        let x = gallery::make_cayley_counterexample();
        assert!(is_real_positive(&e, &x, &p(4.0)).unwrap().flag);

        // -identity is not, with witness at t = 1 where ||exp(1)|| = e
        let neg = PMatrix::identity(2).scale_re(-1.0);
        let r = is_real_positive(&e, &neg, &p(3.0)).unwrap();
        assert!(!r.flag);
        let w = r.witness.unwrap();
        assert!(w.parameter <= 1.0 + 1e-12);
        assert!(r.max_grid_norm >= std::f64::consts::E.powi(16) * 0.99);
    }

    #[test]
    fn in_fa_examples() {
        let e = engine();
        let e2 = gallery::make_en(2).unwrap();
        assert!(in_fa(&e, &e2, &p(4.0)).unwrap().0);
        let e3 = gallery::make_en(3).unwrap();
        assert!(!in_fa(&e, &e3, &p(4.0)).unwrap().0);
        assert!(in_fa(&e, &PMatrix::zeros(2), &p(4.0)).unwrap().0);
    }

    #[test]
    fn hermitian_decomposition_examples() {
        let (b, c) = hermitian_decomposition(&PMatrix::diag_real(&[3.0, -2.0])).unwrap();
        assert_eq!(b.max_abs_diff(&PMatrix::diag_real(&[3.0, 0.0])), 0.0);
        assert_eq!(c.max_abs_diff(&PMatrix::diag_real(&[0.0, 2.0])), 0.0);

        let (b, c) = hermitian_decomposition(&PMatrix::zeros(2)).unwrap();
        assert_eq!(b.max_abs(), 0.0);
        assert_eq!(c.max_abs(), 0.0);

        let (b, c) = hermitian_decomposition(&PMatrix::diag_real(&[1.0, 1.0])).unwrap();
        assert_eq!(b.max_abs_diff(&PMatrix::identity(2)), 0.0);
        assert_eq!(c.max_abs(), 0.0);

        // round trip is exact: b - c = a, bc = 0
        let a = PMatrix::diag_real(&[0.3, -0.7, 0.0, 5.0]);
        let (b, c) = hermitian_decomposition(&a).unwrap();
        assert_eq!((&b - &c).max_abs_diff(&a), 0.0);
        assert_eq!((&b * &c).max_abs(), 0.0);

        assert!(hermitian_decomposition(&gallery::make_en(2).unwrap()).is_err());
    }

    #[test]
    fn idempotent_order_examples() {
        let e = engine();
        let small = PMatrix::diag_real(&[1.0, 0.0, 0.0]);
        let large = PMatrix::diag_real(&[1.0, 1.0, 0.0]);
        let r = idempotent_order(&e, &small, &large, &p(3.0)).unwrap();
        assert_eq!(r.precondition, OrderPrecondition::BothContractive);
        assert!(r.le);
        assert!(r.le_r);

        // reflexivity
        let r = idempotent_order(&e, &small, &small, &p(3.0)).unwrap();
        assert!(r.le);

        // e_2 + 0 inside M_3 against the identity
        let e2 = gallery::make_en(2).unwrap();
        let embedded = PMatrix::from_fn(3, |i, j| {
            if i < 2 && j < 2 {
                e2.entry(i, j)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let r = idempotent_order(&e, &embedded, &PMatrix::identity(3), &p(4.0)).unwrap();
        assert!(r.le);

        // non-idempotent input rejected
        let bad = PMatrix::diag_real(&[2.0, 0.0]);
        assert!(idempotent_order(&e, &bad, &PMatrix::identity(2), &p(3.0)).is_err());
    }

    #[test]
    fn one_by_one_degenerate_cases() {
        let e = engine();
        let herm = PMatrix::diag_real(&[-3.0]);
        assert!(is_hermitian(&e, &herm, &p(3.0)).unwrap().flag);
        let rp = PMatrix::diag(&[C64::new(0.0, 5.0)]);
        // purely imaginary scalar: real positive (boundary) but not hermitian
        assert!(is_real_positive(&e, &rp, &p(3.0)).unwrap().flag);
        assert!(!is_hermitian(&e, &rp, &p(3.0)).unwrap().flag);
        let neg = PMatrix::diag_real(&[-0.5]);
        assert!(!is_real_positive(&e, &neg, &p(3.0)).unwrap().flag);
    }
}
