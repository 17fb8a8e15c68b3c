//! Matrix exponential by scaling and squaring with a diagonal Pade
//! approximant.

use num_traits::Float;

use crate::C64;

use super::lu::LuFactors;
use super::Mat;

/// `exp(a)` for a square complex matrix.
///
/// Scales `a` by a power of two until its norm is at most 1/2, applies the
/// [6/6] Pade approximant, and squares back.
pub fn expm(a: &Mat) -> Mat {
    assert!(a.is_square());
    let norm = a.one_norm();
    let squarings = if norm > 0.5 {
        (Float::log2(norm / 0.5)).ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new(Float::powi(0.5, squarings), 0.0));

    // Pade [6/6]: N(A) = sum c_k A^k, D(A) = sum (-1)^k c_k A^k
    const DEGREE: usize = 6;
    let n = a.nrows();
    let mut coeff = 1.0f64;
    let mut numer = Mat::identity(n);
    let mut denom = Mat::identity(n);
    let mut power = Mat::identity(n);
    for k in 1..=DEGREE {
        coeff *= (DEGREE - k + 1) as f64 / ((2 * DEGREE - k + 1) as f64 * k as f64);
        power = power.matmul(&scaled);
        let term = power.scale(C64::new(coeff, 0.0));
        numer = numer.add(&term);
        if k % 2 == 0 {
            denom = denom.add(&term);
        } else {
            denom = denom.sub(&term);
        }
    }
    let mut result = LuFactors::factor(&denom, f64::MIN_POSITIVE)
        .expect("Pade denominator is nonsingular for scaled input")
        .solve(&numer);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn exp_of_zero_is_identity() {
        let a = Mat::zeros(4, 4);
        assert_close(&expm(&a), &Mat::identity(4), 1e-14);
    }

    #[test]
    fn exp_of_diagonal() {
        let a = Mat::from_rows_real(&[&[1.0, 0.0], &[0.0, -2.0]]);
        let e = expm(&a);
        assert!((e[(0, 0)].re - 1.0f64.exp()).abs() < 1e-12);
        assert!((e[(1, 1)].re - (-2.0f64).exp()).abs() < 1e-12);
        assert!(e[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn exp_inverse_identity() {
        let mut rng = Rng::seed_from(61);
        let a = random_mat(&mut rng, 5, 5);
        let prod = expm(&a).matmul(&expm(&a.neg()));
        assert_close(&prod, &Mat::identity(5), 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = Rng::seed_from(62);
        let a = random_mat(&mut rng, 4, 4);
        let h = 1e-6;
        let plus = expm(&a.scale(C64::new(1.0 + h, 0.0)));
        let minus = expm(&a.scale(C64::new(1.0 - h, 0.0)));
        let fd = plus.sub(&minus).scale(C64::new(0.5 / h, 0.0));
        let analytic = a.matmul(&expm(&a));
        assert_close(&fd, &analytic, 1e-6);
    }
}
