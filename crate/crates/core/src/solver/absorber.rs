//! Absorbing layer at the periodic seam `x = ±Lx`.
//!
//! Every linear wave of the equation travels towards `−x` (group velocity
//! `3k² + λ_j > 0` leftward), so on the periodic box anything leaving the
//! left end re-enters on the right, where the weight `e^{2bx}` is largest.
//! On the infinite strip that material simply escapes. The layer adds a
//! damping term `−ν(x)u` supported in the outer tail bands so that outgoing
//! waves are absorbed before they wrap.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex;

use crate::diagnostics::TAIL_BAND_FRACTION;
use crate::field::Grid;
use crate::scalar::Real;

/// Smooth profile `ν(x) = ν_max·((1 + cos(π d/L))/2)²` for seam distance
/// `d = Lx − |x| < L`, zero elsewhere. `L` equals the tail band width.
pub fn absorber_profile<T: Real>(grid: &Grid<T>, peak: T) -> Vec<T> {
    let lx = grid.geometry().half_length;
    let layer = T::lit(2.0 * TAIL_BAND_FRACTION) * lx;
    grid.x()
        .iter()
        .map(|&x| {
            let d = lx - x.abs();
            if d >= layer {
                T::zero()
            } else {
                let c = (T::one() + (T::PI() * d / layer).cos()) / T::lit(2.0);
                peak * c * c
            }
        })
        .collect()
}

pub struct Absorber<T: Real> {
    grid: Arc<Grid<T>>,
    nu: Vec<T>,
    dealias: bool,
}

impl<T: Real> Absorber<T> {
    pub fn new(grid: &Arc<Grid<T>>, peak: T, dealias: bool) -> Self {
        Self {
            grid: Arc::clone(grid),
            nu: absorber_profile(grid, peak),
            dealias,
        }
    }

    /// Subtracts the coefficients of `ν·u` from `out`.
    pub fn subtract_damping(
        &self,
        coeffs: &Array2<Complex<T>>,
        out: &mut Array2<Complex<T>>,
    ) {
        let mut profiles = self.grid.profiles_from_coeffs(coeffs);
        for mut row in profiles.outer_iter_mut() {
            row.iter_mut().zip(&self.nu).for_each(|(v, &n)| *v *= n);
        }
        let damp = self.grid.coeffs_from_profiles(&profiles);
        let geom = self.grid.geometry();
        for ((j, m), o) in out.indexed_iter_mut() {
            if !self.dealias || geom.retained(m) {
                *o = *o - damp[[j, m]];
            }
        }
    }

    /// Energy drain `2(ν, u²)` of the layer.
    pub fn drain_rate(&self, coeffs: &Array2<Complex<T>>) -> T {
        let profiles = self.grid.profiles_from_coeffs(coeffs);
        let mut acc = T::zero();
        for row in profiles.outer_iter() {
            acc += row.iter().zip(&self.nu).map(|(&v, &n)| n * v * v).sum::<T>();
        }
        T::lit(2.0) * acc * self.grid.geometry().dx()
    }
}
