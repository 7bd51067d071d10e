//! `φ`-functions of exponential integrators, `φ_k(z) = Σ_n zⁿ/(n+k)!`.

use num_complex::Complex;

use crate::scalar::Real;

const TAYLOR_TERMS: usize = 30;

/// Returns `[φ1(z), φ2(z), φ3(z)]`.
///
/// A truncated Taylor series is used for `|z| < 1`, where the closed forms
/// cancel catastrophically; otherwise the recurrence
/// `φ_{k+1} = (φ_k − 1/k!)/z` starting from `φ0 = e^z`.
pub fn phi123<T: Real>(z: Complex<T>) -> [Complex<T>; 3] {
    let one = Complex::new(T::one(), T::zero());
    if z.norm() < T::one() {
        // Horner on φ3, then φ2 = 1/2 + zφ3, φ1 = 1 + zφ2.
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in (0..TAYLOR_TERMS).rev() {
            acc = acc * z + one * inv_factorial::<T>(n + 3);
        }
        let phi3 = acc;
        let phi2 = one * T::lit(0.5) + z * phi3;
        let phi1 = one + z * phi2;
        [phi1, phi2, phi3]
    } else {
        let e = z.exp();
        let phi1 = (e - one) / z;
        let phi2 = (phi1 - one) / z;
        let phi3 = (phi2 - one * T::lit(0.5)) / z;
        [phi1, phi2, phi3]
    }
}

fn inv_factorial<T: Real>(n: usize) -> T {
    let mut f = 1.0f64;
    for i in 2..=n {
        f *= i as f64;
    }
    T::lit(1.0 / f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_near_switch() {
        for &(re, im) in &[(0.999, 0.0), (-0.7, 0.7), (0.0, 0.9999), (-0.5, -0.86)] {
            let z = Complex::new(re, im);
            let inside = phi123(z);
            let w = z * 1.0001;
            let outside = phi123(w);
            for k in 0..3 {
                assert!((inside[k] - outside[k]).norm() < 1e-3);
            }
        }
    }

    #[test]
    fn matches_closed_forms() {
        for &(re, im) in &[(0.3, 0.2), (-2.0, 5.0), (-40.0, 300.0), (1.5, -0.5)] {
            let z: Complex<f64> = Complex::new(re, im);
            let e = z.exp();
            let p = phi123(z);
            assert!((p[0] - (e - 1.0) / z).norm() < 1e-13 * p[0].norm().max(1.0));
            assert!((p[1] - (e - 1.0 - z) / (z * z)).norm() < 1e-12);
        }
        let p = phi123(Complex::new(0.0f64, 0.0));
        assert!((p[0].re - 1.0).abs() < 1e-16);
        assert!((p[1].re - 0.5).abs() < 1e-16);
        assert!((p[2].re - 1.0 / 6.0).abs() < 1e-16);
    }
}
