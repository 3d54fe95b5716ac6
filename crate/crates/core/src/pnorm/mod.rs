//! Estimation and certification of `l^p -> l^p` operator norms.
//!
//! The two workhorses are a nonlinear power iteration ([`NormEngine::power`])
//! and a multi-start projected-gradient maximizer ([`NormEngine::oracle`]).
//! Both produce certified lower bounds together with a witness vector that
//! reproduces the bound. Upper bounds come from endpoint interpolation
//! ([`NormEngine::bracket`]). On top of those sit the quotient seminorm and
//! the multiplier-unitization norm.

mod bracket;
mod oracle;
mod power;
mod quotient;
mod unitization;

pub use quotient::{quotient_seminorm, QuotientNormResult};
pub use unitization::unitization_norm;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::linalg;
use crate::matrix::{C64, PMatrix, PVector};

/// Which route produced a [`NormEstimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Power,
    Oracle,
    ClosedForm,
    Svd,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::Power => "power",
            NormMethod::Oracle => "oracle",
            NormMethod::ClosedForm => "closed_form",
            NormMethod::Svd => "svd",
        }
    }
}

/// A certified lower bound for `||A||_{p->p}` with its witness.
///
/// Invariant: `||A w||_p / ||w||_p` reproduces `value` to 1e-10, and
/// `upper`, when present, dominates `value`.
#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: PVector,
    pub upper: Option<f64>,
    pub method: NormMethod,
    pub restarts_used: usize,
    pub converged: bool,
    /// Gap between the best and the median restart (oracle only); small
    /// spread means most restarts agree on the maximum.
    pub restart_spread: Option<f64>,
}

/// Dimension caps: multi-start maximization is only trusted at desk scale.
pub const ORACLE_DIM_CAP: usize = 8;
pub const GENERAL_DIM_CAP: usize = 256;

/// Norm computation engine: seeds, restart budgets, iteration caps.
///
/// All state is call-local; the engine is freely shareable across threads.
#[derive(Clone, Debug)]
pub struct NormEngine {
    pub seed: u64,
    /// Restart budget override; `None` picks 400 for n <= 4, 200 for n <= 8.
    pub restarts: Option<usize>,
    pub polish_max_iter: usize,
    pub power_max_iter: usize,
}

impl Default for NormEngine {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: None,
            polish_max_iter: 400,
            power_max_iter: 20_000,
        }
    }
}

impl NormEngine {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = Some(restarts);
        self
    }

    pub fn default_restarts(n: usize) -> usize {
        if n <= 4 {
            400
        } else {
            200
        }
    }

    /// `||A||_{p->p}` by the appropriate route: exact column/row sums at the
    /// endpoints, the largest singular value at `p = 2`, the multi-start
    /// oracle otherwise.
    pub fn operator_norm(&self, a: &PMatrix, p: &PExponent) -> Result<NormEstimate> {
        if p.p() == 1.0 || p.p().is_infinite() {
            return Ok(closed_form_endpoint(a, p));
        }
        if p.p() == 2.0 {
            return Ok(self.spectral_norm(a));
        }
        self.oracle(a, p)
    }

    /// Convenience: the value of [`NormEngine::operator_norm`].
    pub fn norm_value(&self, a: &PMatrix, p: &PExponent) -> Result<f64> {
        Ok(self.operator_norm(a, p)?.value)
    }

    /// Multi-start maximization of `||Ax||_p` over the unit sphere.
    ///
    /// Starts: each standard basis vector, the all-ones vector with random
    /// unimodular phases, and normalized complex-Gaussian samples, each
    /// polished by projected gradient ascent with backtracking line search.
    /// The restart sequence is a deterministic function of the seed, and a
    /// larger budget evaluates a superset of starts.
    pub fn oracle(&self, a: &PMatrix, p: &PExponent) -> Result<NormEstimate> {
        let restarts = self
            .restarts
            .unwrap_or_else(|| Self::default_restarts(a.dim()));
        self.oracle_with_restarts(a, p, restarts)
    }

    pub fn oracle_with_restarts(
        &self,
        a: &PMatrix,
        p: &PExponent,
        restarts: usize,
    ) -> Result<NormEstimate> {
        oracle::run(self, a, p, restarts)
    }

    /// Nonlinear power iteration from a given start vector.
    ///
    /// Iterates `x <- normalize(psi_q(A^H psi_p(A x)))`; the value sequence
    /// `||Ax||_p` is monotone nondecreasing. Returns a stationary-point lower
    /// bound; if the iteration budget runs out the estimate is still a valid
    /// lower bound, flagged `converged = false`.
    pub fn power(
        &self,
        a: &PMatrix,
        p: &PExponent,
        start: &PVector,
        max_iter: usize,
    ) -> Result<NormEstimate> {
        power::run(a, p, start, max_iter)
    }

    /// `(lower, upper)` with the lower bound from the power method and the
    /// upper bound from endpoint interpolation
    /// `||A||_1^{1/p} ||A||_inf^{1-1/p}`.
    pub fn bracket(&self, a: &PMatrix, p: &PExponent) -> Result<(f64, f64)> {
        bracket::run(self, a, p)
    }

    /// Largest singular value with its right singular vector as witness.
    pub fn spectral_norm(&self, a: &PMatrix) -> NormEstimate {
        let svd = a.as_dmatrix().clone().svd(false, true);
        let smax = svd.singular_values.max();
        let idx = svd
            .singular_values
            .iter()
            .position(|&s| s == smax)
            .unwrap_or(0);
        let vt = svd.v_t.expect("requested right singular vectors");
        let witness = PVector::from_dvector(vt.row(idx).transpose().map(|z| z.conj()));
        NormEstimate {
            value: linalg::sigma_max(a),
            witness,
            upper: Some(smax),
            method: NormMethod::Svd,
            restarts_used: 0,
            converged: true,
            restart_spread: None,
        }
    }
}

/// Exact endpoint norms with explicit witnesses.
fn closed_form_endpoint(a: &PMatrix, p: &PExponent) -> NormEstimate {
    let n = a.dim();
    let (value, witness) = if p.p() == 1.0 {
        // max column sum, attained at the corresponding basis vector
        let mut best = (0.0, 0usize);
        for j in 0..n {
            let s: f64 = (0..n).map(|i| a.entry(i, j).norm()).sum();
            if s > best.0 {
                best = (s, j);
            }
        }
        (best.0, PVector::standard_basis(n, best.1))
    } else {
        // max row sum, attained at conjugate phases of that row
        let mut best = (0.0, 0usize);
        for i in 0..n {
            let s: f64 = (0..n).map(|j| a.entry(i, j).norm()).sum();
            if s > best.0 {
                best = (s, i);
            }
        }
        let row = best.1;
        let witness = PVector::from_dvector(DVector::from_fn(n, |j, _| {
            let z = a.entry(row, j);
            let m = z.norm();
            if m == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                z.conj() / m
            }
        }));
        (best.0, witness)
    };
    NormEstimate {
        value,
        witness,
        upper: Some(value),
        method: NormMethod::ClosedForm,
        restarts_used: 0,
        converged: true,
        restart_spread: None,
    }
}

/// `psi_r` applied coordinatewise: `z -> |z|^{r-1} phase(z)`, `0 -> 0`.
///
/// This is the phase-preserving duality nonlinearity; coordinates at zero
/// take the one-sided subgradient 0.
pub(crate) fn psi(v: &DVector<C64>, r: f64) -> DVector<C64> {
    v.map(|z| {
        let m = z.norm();
        if m == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            (z / m) * m.powf(r - 1.0)
        }
    })
}

pub(crate) fn p_norm_dvec(v: &DVector<C64>, p: &PExponent) -> f64 {
    let pe = p.p();
    if pe.is_infinite() {
        return v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let mut powers: Vec<f64> = v.iter().map(|z| z.norm().powf(pe)).collect();
    powers.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    powers.iter().sum::<f64>().powf(1.0 / pe)
}

pub(crate) fn check_general_dim(a: &PMatrix, op: &'static str) -> Result<()> {
    if a.dim() > GENERAL_DIM_CAP {
        return Err(Error::DimensionCap {
            op,
            cap: GENERAL_DIM_CAP,
            n: a.dim(),
        });
    }
    Ok(())
}
