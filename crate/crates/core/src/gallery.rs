//! Constructors for the structured example matrices used throughout the
//! test suites, with their algebraic identities verified at construction.
//!
//! Construction-time checks fail hard: a silently wrong constructor would
//! corrupt every downstream experiment. Norm-dependent assertions (which
//! need a `p`) are exposed as separate functions and run by the experiment
//! registry.

use std::path::Path;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::{C64, PMatrix};
use crate::pnorm::NormEngine;

/// Tolerance for construction-time algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// A named bundle of matrices together with the identities checked when it
/// was built.
pub struct GalleryItem {
    pub name: String,
    pub matrices: Vec<(String, PMatrix)>,
    pub identities: Vec<IdentityCheck>,
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub tolerance: f64,
    pub residual: f64,
}

impl GalleryItem {
    pub fn matrix(&self, key: &str) -> &PMatrix {
        &self
            .matrices
            .iter()
            .find(|(k, _)| k == key)
            .unwrap_or_else(|| panic!("gallery item has no matrix '{key}'"))
            .1
    }

    fn check(&mut self, name: &str, residual: f64, tolerance: f64) -> Result<()> {
        self.identities.push(IdentityCheck {
            name: name.to_string(),
            tolerance,
            residual,
        });
        if residual > tolerance {
            return Err(Error::Inconsistent {
                op: "gallery construction",
                detail: format!(
                    "{}: identity '{name}' failed with residual {residual:.3e} (tol {tolerance:.1e})",
                    self.name
                ),
            });
        }
        Ok(())
    }

    /// Serialize every matrix to the standard JSON format next to a manifest
    /// listing the identities and their tolerances.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut entries = serde_json::Map::new();
        for (key, m) in &self.matrices {
            let file = format!("{key}.json");
            m.write_json(&dir.join(&file))?;
            entries.insert(key.clone(), serde_json::Value::String(file));
        }
        let identities: Vec<serde_json::Value> = self
            .identities
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "tolerance": c.tolerance,
                    "residual": c.residual,
                })
            })
            .collect();
        let manifest = serde_json::json!({
            "name": self.name,
            "matrices": serde_json::Value::Object(entries),
            "identities": identities,
        });
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(())
    }
}

/// The `n x n` matrix with every entry `1/n`: a rank-one idempotent of norm
/// one; bicontractive exactly when `n = 2`.
pub fn make_en(n: usize) -> Result<PMatrix> {
    if n < 2 {
        return Err(Error::Precondition {
            op: "make_en",
            detail: format!("n must be at least 2, got {n}"),
        });
    }
    let e = PMatrix::from_fn(n, |_, _| C64::new(1.0 / n as f64, 0.0));
    let residual = (&e * &e).max_abs_diff(&e);
    if residual > ALGEBRAIC_TOL {
        return Err(Error::Inconsistent {
            op: "make_en",
            detail: format!("idempotency residual {residual:.3e}"),
        });
    }
    Ok(e)
}

/// The commuting family `f_k = s^k e_n s^{-k}` built from the unimodular
/// diagonal `s = diag(1, zeta, ..., zeta^{n-1})`, plus the Fourier-type
/// unitary `u` that simultaneously diagonalizes it.
///
/// Matrices: `s`, `u`, `f0`, ..., `f{n-1}`. Checked identities: `u` unitary,
/// each `f_k` idempotent, orthogonality `f_j f_k = 0`, `sum f_k = 1`, and
/// `u^* e_n u = diag(1, 0, ..., 0)`.
pub fn make_dft_family(n: usize) -> Result<GalleryItem> {
    let en = make_en(n)?;
    let tau = std::f64::consts::TAU / n as f64;
    let zeta = |k: i64| {
        let angle = tau * k as f64;
        C64::new(angle.cos(), angle.sin())
    };
    let s = PMatrix::from_fn(n, |i, j| {
        if i == j {
            zeta(i as i64)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = PMatrix::from_fn(n, |j, k| zeta((j * k) as i64) / C64::new((n as f64).sqrt(), 0.0));

    let mut item = GalleryItem {
        name: format!("dft_family_{n}"),
        matrices: vec![("s".into(), s.clone()), ("u".into(), u.clone())],
        identities: Vec::new(),
    };

    let id = PMatrix::identity(n);
    item.check(
        "u unitary",
        (&u.adjoint() * &u).max_abs_diff(&id),
        ALGEBRAIC_TOL,
    )?;

    let mut fs = Vec::with_capacity(n);
    let mut spow = PMatrix::identity(n);
    for k in 0..n {
        let f = &(&spow * &en) * &spow.conj(); // s^k e_n s^{-k}; s^{-1} = conj(s)
        item.check(
            &format!("f{k} idempotent"),
            (&f * &f).max_abs_diff(&f),
            ALGEBRAIC_TOL,
        )?;
        fs.push(f);
        spow = &spow * &s;
    }
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let prod = &fs[j] * &fs[k];
                item.check(
                    &format!("f{j} f{k} = 0"),
                    prod.max_abs(),
                    ALGEBRAIC_TOL,
                )?;
            }
        }
    }
    let mut sum = PMatrix::zeros(n);
    for f in &fs {
        sum = sum + f.clone();
    }
    item.check("sum f_k = identity", sum.max_abs_diff(&id), ALGEBRAIC_TOL)?;

    let diag_e11 = PMatrix::from_fn(n, |i, j| {
        if i == 0 && j == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    item.check(
        "u* e_n u = diag(1,0,...,0)",
        (&(&u.adjoint() * &en) * &u).max_abs_diff(&diag_e11),
        ALGEBRAIC_TOL,
    )?;

    for (k, f) in fs.into_iter().enumerate() {
        item.matrices.push((format!("f{k}"), f));
    }
    Ok(item)
}

/// Two commuting order-2 isometries `s`, `t` of `l^p_4` and the idempotents
/// `e = (1+s)/2`, `f = (1+t)/2` they generate.
///
/// Matrices: `s`, `t`, `e`, `f`, `w = diag(1,-1,-1,1)`, `g = e + f - ef`.
/// Checked identities: `s^2 = t^2 = 1`, `st = ts`, `ef = e_4`,
/// `g` idempotent, and `w (1 - g) w^{-1} = e_4`.
pub fn make_klein_pair() -> Result<GalleryItem> {
    let s = PMatrix::from_real_rows(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])?;
    let t = PMatrix::from_real_rows(&[
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
    ])?;
    let id = PMatrix::identity(4);
    let e = (&id + &s).scale_re(0.5);
    let f = (&id + &t).scale_re(0.5);
    let w = PMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]);
    let g = &(&e + &f) - &(&e * &f);
    let e4 = make_en(4)?;

    let mut item = GalleryItem {
        name: "klein_pair".into(),
        matrices: vec![
            ("s".into(), s.clone()),
            ("t".into(), t.clone()),
            ("e".into(), e.clone()),
            ("f".into(), f.clone()),
            ("w".into(), w.clone()),
            ("g".into(), g.clone()),
            ("e4".into(), e4.clone()),
        ],
        identities: Vec::new(),
    };

    item.check("s^2 = 1", (&s * &s).max_abs_diff(&id), ALGEBRAIC_TOL)?;
    item.check("t^2 = 1", (&t * &t).max_abs_diff(&id), ALGEBRAIC_TOL)?;
    item.check("st = ts", (&s * &t).max_abs_diff(&(&t * &s)), ALGEBRAIC_TOL)?;
    item.check("ef = e_4", (&e * &f).max_abs_diff(&e4), ALGEBRAIC_TOL)?;
    item.check(
        "e + f - ef idempotent",
        (&g * &g).max_abs_diff(&g),
        ALGEBRAIC_TOL,
    )?;
    let winv = w.clone(); // w is its own inverse
    let conj = &(&w * &(&id - &g)) * &winv;
    item.check("w (1 - g) w^{-1} = e_4", conj.max_abs_diff(&e4), ALGEBRAIC_TOL)?;

    Ok(item)
}

/// The accretive matrix `2 e_2 - i 1` whose Cayley transform fails to be
/// contractive for `p` near 1.
pub fn make_cayley_counterexample() -> PMatrix {
    PMatrix::from_rows(vec![
        vec![C64::new(1.0, -1.0), C64::new(1.0, 0.0)],
        vec![C64::new(1.0, 0.0), C64::new(1.0, -1.0)],
    ])
    .expect("fixed entries")
}

/// Closed form for the p-norm of the first column of the Cayley transform of
/// [`make_cayley_counterexample`] applied to `(1, 0)`:
/// `(10^{p/2} + 5^{p/2})^{1/p} / 5`.
pub fn cayley_column_norm_closed_form(p: f64) -> f64 {
    (10f64.powf(p / 2.0) + 5f64.powf(p / 2.0)).powf(1.0 / p) / 5.0
}

/// Norm of the upper-triangular scalar model `[[|lambda|, xnorm], [0, |mu|]]`
/// in `M_2^p`; the norm of any block operator `[[lambda, x], [0, mu]]` on
/// `l^p + l^p` depends on `x` only through `||x||`.
pub fn u_construction_norm(
    engine: &NormEngine,
    lambda: C64,
    mu: C64,
    xnorm: f64,
    p: &PExponent,
) -> Result<f64> {
    if xnorm < 0.0 {
        return Err(Error::Precondition {
            op: "u_construction_norm",
            detail: "xnorm must be nonnegative".into(),
        });
    }
    let model = PMatrix::from_real_rows(&[&[lambda.norm(), xnorm], &[0.0, mu.norm()]])?;
    engine.norm_value(&model, p)
}

/// The `2n x 2n` block matrix `[[lambda I, x], [0, mu I]]` on
/// `l^p_n + l^p_n = l^p_{2n}`, for validating the scalar model.
pub fn u_construction_block(lambda: C64, mu: C64, x: &PMatrix) -> PMatrix {
    let n = x.dim();
    PMatrix::from_fn(2 * n, |i, j| {
        match (i < n, j < n) {
            (true, true) => {
                if i == j {
                    lambda
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            (true, false) => x.entry(i, j - n),
            (false, true) => C64::new(0.0, 0.0),
            (false, false) => {
                if i == j {
                    mu
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    })
}

/// The three-dimensional commutative algebra spanned by `f0, f1, f2` (the
/// DFT family at `n = 3`) with the rank-one ideal spanned by `e_3 = f0`.
pub struct Mp2Quotient {
    pub family: GalleryItem,
    pub algebra_basis: Vec<PMatrix>,
    pub ideal_basis: Vec<PMatrix>,
}

impl Mp2Quotient {
    /// `p` above which `||1 - 2f||_quot > 1` is proven:
    /// `log 4 / (log 4 - log 3)`.
    pub fn threshold_p() -> f64 {
        4f64.ln() / (4f64.ln() - 3f64.ln())
    }

    /// Lower bound for the quotient norm of `1 - 2 f1`:
    /// `(2 * 3^{-q/2})^{1/q}`.
    pub fn quotient_lower_bound(q: f64) -> f64 {
        (2.0 * 3f64.powf(-q / 2.0)).powf(1.0 / q)
    }

    pub fn f(&self, k: usize) -> &PMatrix {
        self.family.matrix(&format!("f{k}"))
    }

    pub fn e3(&self) -> &PMatrix {
        self.f(0)
    }
}

pub fn make_mp2_quotient() -> Result<Mp2Quotient> {
    let family = make_dft_family(3)?;
    let e3 = make_en(3)?;
    // f0 = s^0 e_3 s^0 = e_3 spans the ideal
    let residual = family.matrix("f0").max_abs_diff(&e3);
    if residual > ALGEBRAIC_TOL {
        return Err(Error::Inconsistent {
            op: "make_mp2_quotient",
            detail: format!("f0 differs from e_3 by {residual:.3e}"),
        });
    }
    let algebra_basis = vec![
        family.matrix("f0").clone(),
        family.matrix("f1").clone(),
        family.matrix("f2").clone(),
    ];
    Ok(Mp2Quotient {
        family,
        algebra_basis,
        ideal_basis: vec![e3],
    })
}

/// The distinguishing pair from the unitization comparison: `e = e_2`
/// against `f = diag(1, 0)`, with the four idempotents of `C f + C 1`.
pub struct UnitizationPair {
    pub e: PMatrix,
    pub f: PMatrix,
}

impl UnitizationPair {
    /// All idempotents of the commutative algebra `C f + C 1`:
    /// `0`, `f`, `1 - f`, `1`.
    pub fn diagonal_idempotents(&self) -> Vec<(String, PMatrix)> {
        let id = PMatrix::identity(2);
        vec![
            ("0".into(), PMatrix::zeros(2)),
            ("f".into(), self.f.clone()),
            ("1-f".into(), &id - &self.f),
            ("1".into(), id),
        ]
    }
}

pub fn make_unitization_pair() -> Result<UnitizationPair> {
    let e = make_en(2)?;
    let f = PMatrix::diag_real(&[1.0, 0.0]);
    Ok(UnitizationPair { e, f })
}

#[derive(Clone, Copy, Debug)]
pub struct GCurvePoint {
    pub p: f64,
    pub g: f64,
    pub g_prime: f64,
}

/// `g(p) = (1 - 2/n)^p + (n-1) (2/n)^p` and its derivative; `g(2) = 1` and
/// `g' < 0`, so `g(p) != 1` away from `p = 2`.
pub fn g_curve(n: usize, p_grid: &[f64]) -> Result<Vec<GCurvePoint>> {
    if n < 3 {
        return Err(Error::Precondition {
            op: "g_curve",
            detail: format!("n must be at least 3, got {n}"),
        });
    }
    if p_grid.iter().any(|&p| !(p >= 1.0)) {
        return Err(Error::Precondition {
            op: "g_curve",
            detail: "grid points must lie in [1, inf)".into(),
        });
    }
    let a = 1.0 - 2.0 / n as f64;
    let b = 2.0 / n as f64;
    let eval = |p: f64| GCurvePoint {
        p,
        g: a.powf(p) + (n as f64 - 1.0) * b.powf(p),
        g_prime: a.powf(p) * a.ln() + (n as f64 - 1.0) * b.powf(p) * b.ln(),
    };
    let at_two = eval(2.0);
    if (at_two.g - 1.0).abs() > ALGEBRAIC_TOL {
        return Err(Error::Inconsistent {
            op: "g_curve",
            detail: format!("g(2) = {} != 1", at_two.g),
        });
    }
    let points: Vec<GCurvePoint> = p_grid.iter().map(|&p| eval(p)).collect();
    for pt in &points {
        if pt.g_prime >= 0.0 {
            return Err(Error::Inconsistent {
                op: "g_curve",
                detail: format!("g'({}) = {} is not negative", pt.p, pt.g_prime),
            });
        }
    }
    Ok(points)
}

/// Default sweep grid: `1.1` to `6.0` in steps of `0.1`, with `p = 2`
/// explicitly included.
pub fn default_p_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let p = 1.1 + 0.1 * k as f64;
        if p > 6.0 + 1e-12 {
            break;
        }
        grid.push(p);
        k += 1;
    }
    if !grid.iter().any(|&p| (p - 2.0).abs() < 1e-12) {
        grid.push(2.0);
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::PExponent;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn en_construction() {
        let e2 = make_en(2).unwrap();
        assert!((e2.entry(0, 0) - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(make_en(1).is_err());
        let e3 = make_en(3).unwrap();
        assert!(e3.is_idempotent(1e-15));
        assert_eq!(crate::linalg::rank(&e3, 1e-10), 1);
    }

    #[test]
    fn e4_equals_klein_product() {
        let klein = make_klein_pair().unwrap();
        let prod = klein.matrix("e") * klein.matrix("f");
        assert!(prod.max_abs_diff(&make_en(4).unwrap()) < 1e-15);
    }

    #[test]
    fn dft_family_structure() {
        let fam = make_dft_family(3).unwrap();
        // f0 = e_3
        assert!(fam.matrix("f0").max_abs_diff(&make_en(3).unwrap()) < 1e-13);
        // each f_k similar to the rank-one coordinate projection
        let u = fam.matrix("u");
        let f1 = fam.matrix("f1");
        let conj = &(&u.adjoint() * f1) * u;
        let proj = PMatrix::diag_real(&[0.0, 1.0, 0.0]);
        assert!(conj.max_abs_diff(&proj) < 1e-12);

        let fam2 = make_dft_family(2).unwrap();
        assert!(fam2.matrix("f0").max_abs_diff(&make_en(2).unwrap()) < 1e-13);
        let expect = &PMatrix::identity(2) - &make_en(2).unwrap();
        assert!(fam2.matrix("f1").max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn cayley_counterexample_matches_algebraic_form() {
        let x = make_cayley_counterexample();
        let alt = make_en(2)
            .unwrap()
            .scale_re(2.0)
            .add_scalar(C64::new(0.0, -1.0));
        assert!(x.max_abs_diff(&alt) < 1e-15);
    }

    #[test]
    fn g_curve_values() {
        let pts = g_curve(3, &[2.0, 4.0]).unwrap();
        assert!((pts[0].g - 1.0).abs() < 1e-15);
        assert!((pts[1].g - 33.0 / 81.0).abs() < 1e-15);
        let pts4 = g_curve(4, &[2.0]).unwrap();
        assert!((pts4[0].g - 1.0).abs() < 1e-15);
        assert!(g_curve(2, &[2.0]).is_err());
        assert!(g_curve(3, &[0.5]).is_err());
    }

    #[test]
    fn u_construction_examples() {
        let engine = NormEngine::default();
        // nilpotent block: norm equals xnorm
        let v = u_construction_norm(&engine, C64::new(0.0, 0.0), C64::new(0.0, 0.0), 1.0, &p(3.0))
            .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // diagonal identity
        let v = u_construction_norm(&engine, C64::new(1.0, 0.0), C64::new(1.0, 0.0), 0.0, &p(3.0))
            .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // monotone in xnorm
        let lo = u_construction_norm(&engine, C64::new(0.7, 0.0), C64::new(0.4, 0.3), 0.5, &p(4.0))
            .unwrap();
        let hi = u_construction_norm(&engine, C64::new(0.7, 0.0), C64::new(0.4, 0.3), 1.5, &p(4.0))
            .unwrap();
        assert!(lo <= hi + 2e-6);
    }

    #[test]
    fn mp2_threshold_value() {
        let t = Mp2Quotient::threshold_p();
        assert!((t - 4.8188).abs() < 1e-4, "threshold {t}");
        // q = 1.2: lower bound about 1.0288
        let lb = Mp2Quotient::quotient_lower_bound(1.2);
        assert!((lb - 1.0288).abs() < 1e-4, "lower bound {lb}");
    }

    #[test]
    fn default_grid_contains_two() {
        let grid = default_p_grid();
        assert!(grid.iter().any(|&p| (p - 2.0).abs() < 1e-12));
        assert!(grid[0] > 1.0);
        assert!(*grid.last().unwrap() <= 6.0 + 1e-9);
    }

    #[test]
    fn gallery_serialization_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let fam = make_dft_family(3).unwrap();
        fam.write_to_dir(dir.path()).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["name"], "dft_family_3");
        assert!(manifest["identities"].as_array().unwrap().len() > 5);
        let back = PMatrix::read_json(&dir.path().join("f1.json")).unwrap();
        assert!(back.max_abs_diff(fam.matrix("f1")) < 1e-15);
    }
}
