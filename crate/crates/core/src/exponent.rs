//! The exponent `p` together with its conjugate `q`.

use std::fmt;

use crate::error::{Error, Result};

/// An exponent `p` in `[1, inf]` carrying its conjugate `q` with
/// `1/p + 1/q = 1` (convention `1/inf = 0`).
///
/// The endpoints `p = 1` and `p = inf` are admitted only for the closed-form
/// endpoint norms; optimization-based routines require `p` in `(1, inf)` and
/// reject endpoints via [`PExponent::require_interior`].
#[derive(Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
    q: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            // also rejects NaN
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self {
            p,
            q: conjugate_of(p),
        })
    }

    pub fn two() -> Self {
        Self { p: 2.0, q: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The exponent `q` with the roles of `p` and `q` swapped.
    pub fn conjugate(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.p > 1.0 && self.p.is_finite()
    }

    pub fn require_interior(&self, op: &'static str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::ExponentNotInterior { op, p: self.p })
        }
    }
}

fn conjugate_of(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

impl fmt::Debug for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} (q={})", self.p, self.q)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        let p = PExponent::new(3.0).unwrap();
        assert!((p.q() - 1.5).abs() < 1e-15);
        assert!((1.0 / p.p() + 1.0 / p.q() - 1.0).abs() < 1e-15);

        let one = PExponent::new(1.0).unwrap();
        assert!(one.q().is_infinite());
        assert!(!one.is_interior());

        let inf = PExponent::new(f64::INFINITY).unwrap();
        assert_eq!(inf.q(), 1.0);
        assert!(!inf.is_interior());

        let two = PExponent::two();
        assert_eq!(two.q(), 2.0);
        assert!(two.is_interior());
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(PExponent::new(0.5).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert!(PExponent::new(-1.0).is_err());
    }

    #[test]
    fn conjugation_involutes() {
        for p in [1.0, 1.25, 2.0, 3.0, 17.5, f64::INFINITY] {
            let e = PExponent::new(p).unwrap();
            let back = e.conjugate().conjugate();
            assert_eq!(back.p(), e.p());
        }
    }
}
