//! Type-I discrete sine transform between interior `y` samples and
//! coefficients in the orthonormal basis `w_j`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, ZkbError};
use crate::scalar::Real;

/// DST-I on `n` interior points of `(0, B)`, realised with a complex FFT of
/// length `2(n+1)` on the odd extension.
///
/// `forward` maps samples `u(y_m)` to coefficients `a_j` with
/// `u(y_m) = Σ_j a_j w_j(y_m)`; `inverse` evaluates that sum. With the
/// interior rectangle rule the pair is exactly inverse and satisfies
/// `Σ a_j² = (B/(n+1)) Σ u(y_m)²`.
#[derive(Clone)]
pub struct SineTransform<T: Real> {
    n: usize,
    width: T,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for SineTransform<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform")
            .field("n", &self.n)
            .field("width", &self.width)
            .finish()
    }
}

impl<T: Real> SineTransform<T> {
    pub fn new(n: usize, width: T) -> Self {
        assert!(n >= 1, "sine transform needs at least one point");
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (n + 1));
        Self { n, width, fft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalised `S_k = Σ_m x_m sin(πkm/(n+1))`, `k = 1..=n`.
    fn raw(&self, input: &[T], out: &mut [T]) {
        let n = self.n;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); 2 * (n + 1)];
        for (m, &v) in input.iter().enumerate() {
            buf[m + 1] = Complex::new(v, T::zero());
            buf[2 * (n + 1) - (m + 1)] = Complex::new(-v, T::zero());
        }
        self.fft.process(&mut buf);
        let half = T::lit(0.5);
        for (k, o) in out.iter_mut().enumerate() {
            *o = -buf[k + 1].im * half;
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(ZkbError::Shape {
                expected: format!("{} samples", self.n),
                got: format!("{len}"),
            });
        }
        Ok(())
    }

    pub fn forward(&self, values: &[T]) -> Result<Vec<T>> {
        self.check(values.len())?;
        let mut out = vec![T::zero(); self.n];
        self.raw(values, &mut out);
        let scale = (T::lit(2.0) * self.width).sqrt() / T::from_count(self.n + 1);
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(out)
    }

    pub fn inverse(&self, coeffs: &[T]) -> Result<Vec<T>> {
        self.check(coeffs.len())?;
        let mut out = vec![T::zero(); self.n];
        self.raw(coeffs, &mut out);
        let scale = (T::lit(2.0) / self.width).sqrt();
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::evaluate_mode;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_mode_round_trip() {
        let (n, b) = (9, 2.3);
        let st = SineTransform::<f64>::new(n, b);
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let values = st.inverse(&e1).unwrap();
        for (m, v) in values.iter().enumerate() {
            let y = (m + 1) as f64 * b / (n + 1) as f64;
            assert!((v - evaluate_mode(1, y, b).unwrap()).abs() < 1e-14);
        }
        let back = st.forward(&values).unwrap();
        for (j, c) in back.iter().enumerate() {
            assert!((c - e1[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let st = SineTransform::<f64>::new(7, 1.0);
        assert!(st.forward(&[0.0; 7]).unwrap().iter().all(|&v| v == 0.0));
        assert!(st.inverse(&[0.0; 7]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        let st = SineTransform::<f64>::new(7, 1.0);
        assert!(matches!(st.forward(&[0.0; 6]), Err(ZkbError::Shape { .. })));
        assert!(matches!(st.inverse(&[0.0; 8]), Err(ZkbError::Shape { .. })));
    }

    #[test]
    fn random_round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..100 {
            let n = 1 + (seed % 37);
            let b = 0.5 + seed as f64 * 0.05;
            let st = SineTransform::<f64>::new(n, b);
            let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let c = st.forward(&v).unwrap();
            let back = st.inverse(&c).unwrap();
            let err = v.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "round trip error {err}");
            let coeff_sq: f64 = c.iter().map(|x| x * x).sum();
            let quad: f64 = v.iter().map(|x| x * x).sum::<f64>() * b / (n + 1) as f64;
            assert!((coeff_sq - quad).abs() < 1e-10 * quad.max(1.0));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let st = SineTransform::<f32>::new(5, 1.0);
        let c = [0.3f32, -1.0, 0.0, 2.0, 0.5];
        let back = st.forward(&st.inverse(&c).unwrap()).unwrap();
        for (a, b) in c.iter().zip(&back) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}
