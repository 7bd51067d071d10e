//! Pseudospectral evaluation of the quadratic term `u u_x = ½∂x(u²)`.
//!
//! The `x` direction is treated with the FFT and, when dealiasing is on, the
//! 2/3 truncation. In `y` the product of two sine series is a cosine series
//! of degree `2·Ny`, whose projection onto `w_j` over the half period is not
//! an orthogonal pairing. With dealiasing on, `u²` is therefore sampled on a
//! refined grid with `Q = 2·Ny + 2` intervals, converted to exact cosine
//! coefficients with a type-I cosine transform and projected onto `w_j` with
//! the closed-form integrals `∫₀^B cos(mπy/B) w_j dy`. The result is the
//! Galerkin projection `∫₀^B u u_x w_j dy` of the truncated system, exact to
//! round-off. Without dealiasing the product is formed on the native
//! interior grid and transformed back with the discrete sine transform.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Result, ZkbError};
use crate::field::{Field, Grid};
use crate::scalar::Real;

/// Precomputed `y` evaluation / projection matrices for the product.
#[derive(Debug, Clone)]
pub struct NonlinearOperator<T: Real> {
    grid: Arc<Grid<T>>,
    dealias: bool,
    eval: Array2<T>,
    proj: Array2<T>,
}

/// Number of intervals of the refined `y` grid used for exact products.
pub fn product_intervals(ny: usize) -> usize {
    2 * ny + 2
}

/// Interior points `nB/Q`, `n = 1..Q`, of the refined product grid.
pub fn product_points<T: Real>(width: T, ny: usize) -> Vec<T> {
    let q = product_intervals(ny);
    (1..q)
        .map(|n| T::from_count(n) * width / T::from_count(q))
        .collect()
}

/// `∫₀^B cos(mπy/B) w_j(y) dy`.
fn cosine_sine_overlap(m: usize, j: usize, width: f64) -> f64 {
    if (j + m) % 2 == 0 {
        return 0.0;
    }
    let (jf, mf) = (j as f64, m as f64);
    let integral = 2.0 * jf / (jf * jf - mf * mf);
    (2.0 / width).sqrt() * width / std::f64::consts::PI * integral
}

/// Projection matrix `R[j, n]` mapping samples of a cosine polynomial of
/// degree `< Q` (vanishing at both walls) on the refined grid to
/// `∫₀^B f w_j dy`.
fn exact_projection<T: Real>(width: T, ny: usize) -> Array2<T> {
    let q = product_intervals(ny);
    let b = width.as_f64();
    let qf = q as f64;
    // DCT-I with zero end values: c_m = (ε_m/Q) Σ_n f_n cos(mπn/Q),
    // ε_0 = ε_Q = 1, otherwise 2.
    let mut out = Array2::<T>::zeros((ny, q - 1));
    for j in 1..=ny {
        for n in 1..q {
            let mut acc = 0.0;
            for m in 0..=q {
                let s = cosine_sine_overlap(m, j, b);
                if s == 0.0 {
                    continue;
                }
                let eps = if m == 0 || m == q { 1.0 } else { 2.0 };
                let c = eps / qf * (std::f64::consts::PI * (m * n) as f64 / qf).cos();
                acc += s * c;
            }
            out[[j - 1, n - 1]] = T::lit(acc);
        }
    }
    out
}

impl<T: Real> NonlinearOperator<T> {
    pub fn new(grid: &Arc<Grid<T>>, dealias: bool) -> Self {
        let geom = grid.geometry();
        let (eval, proj) = if dealias {
            let points = product_points(geom.width, geom.ny);
            (
                grid.evaluation_matrix(&points),
                exact_projection(geom.width, geom.ny),
            )
        } else {
            let eval = grid.evaluation_matrix(grid.y());
            let proj = eval.t().mapv(|v| v * geom.dy());
            (eval, proj)
        };
        Self {
            grid: Arc::clone(grid),
            dealias,
            eval,
            proj,
        }
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// Per-mode profiles of `P_j(u²)`, i.e. `∫₀^B u² w_j dy` at every `x_i`.
    pub fn project_square(&self, profiles: &Array2<T>) -> Array2<T> {
        let mut values = self.eval.dot(profiles);
        values.mapv_inplace(|v| v * v);
        self.proj.dot(&values)
    }

    /// Coefficients of `N(u) = P(u u_x)` given the coefficients of `u`.
    pub fn apply_coeffs(&self, coeffs: &Array2<Complex<T>>) -> Result<Array2<Complex<T>>> {
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(ZkbError::Numeric(
                "non-finite coefficient in nonlinear term".into(),
            ));
        }
        let geom = *self.grid.geometry();
        let profiles = if self.dealias {
            let mut c = coeffs.clone();
            truncate(&mut c, |m| geom.retained(m));
            self.grid.profiles_from_coeffs(&c)
        } else {
            self.grid.profiles_from_coeffs(coeffs)
        };
        let squared = self.project_square(&profiles);
        let mut out = self.grid.coeffs_from_profiles(&squared);
        let half = T::lit(0.5);
        let k = self.grid.k();
        for mut row in out.outer_iter_mut() {
            for (m, c) in row.iter_mut().enumerate() {
                // ½ ∂x
                *c = Complex::new(-c.im * k[m] * half, c.re * k[m] * half);
            }
        }
        if self.dealias {
            truncate(&mut out, |m| geom.retained(m));
        }
        Ok(out)
    }

    pub fn apply(&self, u: &Field<T>) -> Result<Field<T>> {
        if !Arc::ptr_eq(u.grid(), &self.grid) && u.geometry() != self.grid.geometry() {
            return Err(ZkbError::GridMismatch);
        }
        Field::from_coeffs(u.grid(), self.apply_coeffs(u.coeffs())?)
    }
}

fn truncate<T: Real>(coeffs: &mut Array2<Complex<T>>, keep: impl Fn(usize) -> bool) {
    for mut row in coeffs.outer_iter_mut() {
        for (m, c) in row.iter_mut().enumerate() {
            if !keep(m) {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
    }
}

/// Convenience wrapper building a one-off operator.
pub fn nonlinear_term<T: Real>(u: &Field<T>, dealias: bool) -> Result<Field<T>> {
    NonlinearOperator::new(u.grid(), dealias).apply(u)
}

/// Discrete pairing `(N(u), u)` over the strip, computed spectrally.
pub fn pairing<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    if !a.same_grid(b) {
        return Err(ZkbError::GridMismatch);
    }
    let grid = a.grid();
    let two_l = T::lit(2.0) * grid.geometry().half_length;
    let mut total = T::zero();
    for (ra, rb) in a.coeffs().outer_iter().zip(b.coeffs().outer_iter()) {
        for (m, (ca, cb)) in ra.iter().zip(rb.iter()).enumerate() {
            let mult = if m == 0 { T::one() } else { T::lit(2.0) };
            total += mult * (ca * cb.conj()).re;
        }
    }
    Ok(two_l * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{coupling_coefficient, evaluate_mode, StripGeometry};
    use std::f64::consts::PI;

    #[test]
    fn projection_of_first_mode_square_matches_coupling() {
        let geom = StripGeometry::new(PI, PI, 8, 10, 0.0).unwrap();
        let grid = Grid::new(geom).unwrap();
        let op = NonlinearOperator::new(&grid, true);
        // Profiles: only mode 1 set to 1 at every x.
        let mut profiles = Array2::<f64>::zeros((10, 8));
        profiles.row_mut(0).fill(1.0);
        let p = op.project_square(&profiles);
        for j in 1..=10 {
            let expect = coupling_coefficient(1, 1, j, PI).unwrap();
            assert!((p[[j - 1, 0]] - expect).abs() < 1e-13, "j={j}");
        }
    }

    #[test]
    fn overlap_integral_matches_quadrature() {
        let b = 1.3;
        for m in 0..6 {
            for j in 1..6 {
                let n = 20000;
                let h = b / n as f64;
                let mut acc = 0.0;
                for i in 0..=n {
                    let y = (i as f64 * h).min(b);
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    acc += w
                        * (m as f64 * PI * y / b).cos()
                        * evaluate_mode(j, y, b).unwrap();
                }
                acc *= h / 3.0;
                assert!((acc - cosine_sine_overlap(m, j, b)).abs() < 1e-8, "{m} {j} {acc} {}", cosine_sine_overlap(m, j, b));
            }
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let grid = Grid::new(StripGeometry::new(1.0, 4.0, 16, 3, 0.0).unwrap()).unwrap();
        let u = Field::zeros(&grid);
        for dealias in [true, false] {
            let n = nonlinear_term(&u, dealias).unwrap();
            assert!(n.coeffs().iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let grid = Grid::new(StripGeometry::new(1.0, 4.0, 16, 3, 0.0).unwrap()).unwrap();
        let mut u = Field::zeros(&grid);
        u.coeffs_mut()[[0, 1]] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(
            nonlinear_term(&u, true),
            Err(ZkbError::Numeric(_))
        ));
    }
}
