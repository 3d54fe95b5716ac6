//! Matrix exponential by Pade approximation with scaling and squaring.
//!
//! Standard order-13 scheme with the lower-order shortcuts for small norms;
//! coefficients and switching thresholds are the usual ones.

use nalgebra::DMatrix;

use crate::matrix::{C64, PMatrix};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low(a: &DMatrix<C64>, b: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    // u = A * (sum of even powers), v = sum of even powers; orders 3..9
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;
    let mut even = id.clone() * C64::new(b[0], 0.0);
    let mut odd = id.clone() * C64::new(b[1], 0.0);
    let mut pow = id;
    for k in (2..b.len()).step_by(2) {
        pow = &pow * &a2;
        even += &pow * C64::new(b[k], 0.0);
        if k + 1 < b.len() {
            odd += &pow * C64::new(b[k + 1], 0.0);
        }
    }
    (a * odd, even)
}

fn pade_13(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let w1 = &a6 * C64::new(b[13], 0.0) + &a4 * C64::new(b[11], 0.0) + &a2 * C64::new(b[9], 0.0);
    let w2 = &a6 * C64::new(b[7], 0.0)
        + &a4 * C64::new(b[5], 0.0)
        + &a2 * C64::new(b[3], 0.0)
        + &id * C64::new(b[1], 0.0);
    let u = a * (&a6 * w1 + w2);
    let z1 = &a6 * C64::new(b[12], 0.0) + &a4 * C64::new(b[10], 0.0) + &a2 * C64::new(b[8], 0.0);
    let z2 = &a6 * C64::new(b[6], 0.0)
        + &a4 * C64::new(b[4], 0.0)
        + &a2 * C64::new(b[2], 0.0)
        + &id * C64::new(b[0], 0.0);
    let v = &a6 * z1 + z2;
    (u, v)
}

/// `exp(a)`.
pub fn matrix_exp(a: &PMatrix) -> PMatrix {
    let m = a.as_dmatrix();
    let norm = one_norm(m);
    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(m, &B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_low(m, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_low(m, &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_low(m, &B9);
        (u, v, 0)
    } else {
        let s = ((norm / THETA_13).log2().ceil().max(0.0)) as u32;
        let scaled = m * C64::new(0.5f64.powi(s as i32), 0.0);
        let (u, v) = pade_13(&scaled);
        (u, v, s)
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        r = &r * &r;
    }
    PMatrix::from_dmatrix(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::matrix::PMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = PMatrix::zeros(3);
        assert!(matrix_exp(&z).max_abs_diff(&PMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let d = PMatrix::diag(&[c(0.3, -1.0), c(-2.0, 0.5)]);
        let e = matrix_exp(&d);
        assert!((e.entry(0, 0) - c(0.3, -1.0).exp()).norm() < 1e-14);
        assert!((e.entry(1, 1) - c(-2.0, 0.5).exp()).norm() < 1e-14);
        assert!(e.entry(0, 1).norm() < 1e-15);
    }

    #[test]
    fn exp_of_idempotent_argument() {
        // exp(i*pi*e_2) = 1 + (e^{i*pi} - 1) e_2 = 1 - 2 e_2
        let e2 = gallery::make_en(2).unwrap();
        let arg = e2.scale(c(0.0, std::f64::consts::PI));
        let got = matrix_exp(&arg);
        let expect = PMatrix::identity(2) - e2.scale_re(2.0);
        assert!(got.max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn exp_inverse_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let n = 2 + trial % 4;
            let scale = if trial % 3 == 0 { 5.0 } else { 1.0 };
            let a = PMatrix::from_fn(n, |_, _| {
                C64::new(
                    scale * (rng.gen::<f64>() - 0.5),
                    scale * (rng.gen::<f64>() - 0.5),
                )
            });
            let prod = matrix_exp(&a) * matrix_exp(&a.scale_re(-1.0));
            assert!(
                prod.max_abs_diff(&PMatrix::identity(n)) < 1e-10,
                "exp(a)exp(-a) != 1 at trial {trial}"
            );
        }
    }
}
