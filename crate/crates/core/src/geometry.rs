//! Strip geometry and the Dirichlet sine eigenbasis in `y`.
//!
//! The channel `x ∈ ℝ, y ∈ (0, B)` is truncated to the periodic box
//! `x ∈ [-Lx, Lx)`. In `y` the solution is expanded in the eigenfunctions of
//! `-∂yy` with homogeneous Dirichlet conditions,
//! `w_j(y) = √(2/B) sin(jπy/B)`, `λ_j = (jπ/B)²`, which are orthonormal in
//! `L²(0, B)`.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Physical extent and resolution of the truncated strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGeometry<T> {
    /// Strip width `B`, `y ∈ (0, B)`.
    pub width: T,
    /// Truncation half-length `Lx`, `x ∈ [-Lx, Lx)`.
    pub half_length: T,
    /// Number of `x` grid points (even, at least 4).
    pub nx: usize,
    /// Number of `y` modes, equal to the number of interior `y` grid points.
    pub ny: usize,
    /// Rate `b` of the weight `e^{2bx}`.
    pub weight_rate: T,
}

impl<T: Real> StripGeometry<T> {
    pub fn new(width: T, half_length: T, nx: usize, ny: usize, weight_rate: T) -> Result<Self> {
        let geom = Self {
            width,
            half_length,
            nx,
            ny,
            weight_rate,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > T::zero()) {
            return Err(domain(format!("strip width must be positive, got {}", self.width)));
        }
        if !(self.half_length.is_finite() && self.half_length > T::zero()) {
            return Err(domain(format!(
                "x half-length must be positive, got {}",
                self.half_length
            )));
        }
        if self.nx < 4 || self.nx % 2 != 0 {
            return Err(domain(format!("Nx must be even and >= 4, got {}", self.nx)));
        }
        if self.ny < 1 {
            return Err(domain("Ny must be >= 1"));
        }
        if !(self.weight_rate.is_finite() && self.weight_rate >= T::zero()) {
            return Err(domain(format!(
                "weight rate must be nonnegative, got {}",
                self.weight_rate
            )));
        }
        Ok(())
    }

    /// Returns a copy with a different weight rate.
    pub fn with_weight_rate(mut self, b: T) -> Result<Self> {
        self.weight_rate = b;
        self.validate()?;
        Ok(self)
    }

    /// Returns a copy with a different resolution.
    pub fn with_resolution(mut self, nx: usize, ny: usize) -> Result<Self> {
        self.nx = nx;
        self.ny = ny;
        self.validate()?;
        Ok(self)
    }

    pub fn dx(&self) -> T {
        T::lit(2.0) * self.half_length / T::from_count(self.nx)
    }

    pub fn dy(&self) -> T {
        self.width / T::from_count(self.ny + 1)
    }

    /// Uniform periodic grid `x_i = -Lx + i·dx`, `i = 0..Nx`.
    pub fn x_grid(&self) -> Vec<T> {
        let dx = self.dx();
        (0..self.nx)
            .map(|i| -self.half_length + T::from_count(i) * dx)
            .collect()
    }

    /// Interior grid `y_m = m·B/(Ny+1)`, `m = 1..=Ny`.
    pub fn y_grid(&self) -> Vec<T> {
        let dy = self.dy();
        (1..=self.ny).map(|m| T::from_count(m) * dy).collect()
    }

    /// Number of stored Fourier coefficients per `y` mode (`Nx/2 + 1`).
    pub fn n_half(&self) -> usize {
        self.nx / 2 + 1
    }

    /// Angular wavenumber of Fourier index `m`: `k_m = π m / Lx`.
    pub fn wavenumber(&self, m: usize) -> T {
        T::PI() * T::from_count(m) / self.half_length
    }

    /// Nonnegative wavenumbers `k_0..=k_{Nx/2}` of the half spectrum.
    pub fn wavenumbers(&self) -> Vec<T> {
        (0..self.n_half()).map(|m| self.wavenumber(m)).collect()
    }

    /// Whether Fourier index `m` survives the 2/3 truncation.
    pub fn retained(&self, m: usize) -> bool {
        3 * m < self.nx
    }

    pub fn basis(&self) -> DirichletBasis<T> {
        DirichletBasis::new(self.width, self.ny).expect("geometry validated")
    }
}

/// Eigenvalue `λ_j = (jπ/B)²` of the Dirichlet problem on `(0, B)`.
pub fn eigenvalue<T: Real>(j: usize, width: T) -> Result<T> {
    if j < 1 {
        return Err(domain("mode index must be >= 1"));
    }
    if !(width > T::zero()) {
        return Err(domain(format!("strip width must be positive, got {width}")));
    }
    let root = T::from_count(j) * T::PI() / width;
    Ok(root * root)
}

/// Evaluates `w_j(y) = √(2/B) sin(jπy/B)`.
pub fn evaluate_mode<T: Real>(j: usize, y: T, width: T) -> Result<T> {
    if j < 1 {
        return Err(domain("mode index must be >= 1"));
    }
    if !(width > T::zero()) {
        return Err(domain(format!("strip width must be positive, got {width}")));
    }
    if !(y >= T::zero() && y <= width) {
        return Err(domain(format!("y = {y} outside [0, {width}]")));
    }
    Ok(mode_value(j, y, width))
}

/// Unchecked `w_j(y)`.
#[inline]
pub(crate) fn mode_value<T: Real>(j: usize, y: T, width: T) -> T {
    (T::lit(2.0) / width).sqrt() * (T::from_count(j) * T::PI() * y / width).sin()
}

/// One entry of the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<T> {
    pub index: usize,
    pub eigenvalue: T,
    pub normalization: T,
}

/// The first `Ny` Dirichlet eigenfunctions on `(0, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletBasis<T> {
    pub width: T,
    pub modes: Vec<Mode<T>>,
}

impl<T: Real> DirichletBasis<T> {
    pub fn new(width: T, count: usize) -> Result<Self> {
        let normalization = (T::lit(2.0) / width).sqrt();
        let modes = (1..=count)
            .map(|j| {
                Ok(Mode {
                    index: j,
                    eigenvalue: eigenvalue(j, width)?,
                    normalization,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { width, modes })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }

    pub fn evaluate(&self, j: usize, y: T) -> Result<T> {
        evaluate_mode(j, y, self.width)
    }
}

/// `∫₀^π sin(qθ) dθ`, which is `2/q` for odd `q` and zero otherwise.
fn half_period_sine_integral(q: i64) -> f64 {
    if q % 2 == 0 {
        0.0
    } else {
        2.0 / q as f64
    }
}

/// Triple-product integral `T_ijk = ∫₀^B w_i w_j w_k dy` in closed form.
///
/// Used as an oracle for the pseudospectral nonlinearity: the projection of
/// `u u_x` onto `w_k` is `Σ_ij T_ijk g_i g_j,x`.
pub fn coupling_coefficient<T: Real>(i: usize, j: usize, k: usize, width: T) -> Result<T> {
    if i < 1 || j < 1 || k < 1 {
        return Err(domain("mode indices must be >= 1"));
    }
    if !(width > T::zero()) {
        return Err(domain(format!("strip width must be positive, got {width}")));
    }
    let (i, j, k) = (i as i64, j as i64, k as i64);
    // sin a sin b sin c = ¼[sin(a+b−c) + sin(b+c−a) + sin(c+a−b) − sin(a+b+c)]
    let integral = 0.25
        * (half_period_sine_integral(i + j - k)
            + half_period_sine_integral(j + k - i)
            + half_period_sine_integral(k + i - j)
            - half_period_sine_integral(i + j + k));
    let scale = (T::lit(2.0) / width).powf(T::lit(1.5)) * width / T::PI();
    Ok(scale * T::lit(integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(1, PI).unwrap(), 1.0);
        assert_eq!(eigenvalue(2, PI).unwrap(), 4.0);
        assert!((eigenvalue(1, PI / 2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(eigenvalue(0, PI).is_err());
        assert!(eigenvalue(1, 0.0).is_err());
        assert!(eigenvalue(1, -1.0).is_err());
    }

    #[test]
    fn eigenvalue_scaling_is_exact() {
        for j in 1..40 {
            for &b in &[0.3, 1.0, PI, 7.25] {
                assert_eq!(
                    eigenvalue(j, b).unwrap(),
                    4.0 * eigenvalue(j, 2.0 * b).unwrap()
                );
            }
        }
    }

    #[test]
    fn mode_examples() {
        assert!((evaluate_mode(1, 1.0, 2.0).unwrap() - 1.0f64).abs() < 1e-15);
        for &b in &[0.5, 2.0, PI] {
            assert!(evaluate_mode(2, b / 2.0, b).unwrap().abs() < 1e-15);
            assert!(evaluate_mode(3, 0.0, b).unwrap().abs() < 1e-15);
            assert!(evaluate_mode(3, b, b).unwrap().abs() < 1e-14);
        }
        let v = evaluate_mode(1, PI / 4.0, PI).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((v - 0.564190).abs() < 1e-6);
        assert!(evaluate_mode(1, -0.1, 1.0).is_err());
        assert!(evaluate_mode(1, 1.1, 1.0).is_err());
    }

    #[test]
    fn basis_is_increasing() {
        let basis = DirichletBasis::new(2.5_f64, 12).unwrap();
        let ev = basis.eigenvalues();
        assert!(ev.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(basis.len(), 12);
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(coupling_coefficient(1, 1, 2, PI).unwrap(), 0.0);
        let c111 = coupling_coefficient(1, 1, 1, PI).unwrap();
        assert!((c111 - (2.0 / PI).powf(1.5) * 4.0 / 3.0).abs() < 1e-15);
        // Quoted reference value, rounded.
        assert!((c111 - 0.677196).abs() < 1e-4);
        let c122 = coupling_coefficient(1, 2, 2, PI).unwrap();
        assert!((c122 - (2.0 / PI).powf(1.5) * 16.0 / 15.0).abs() < 1e-15);
        assert!((c122 - 0.541757).abs() < 1e-4);
        assert!(coupling_coefficient(0, 1, 1, PI).is_err());
    }

    #[test]
    fn coupling_is_symmetric_and_parity_selective() {
        for i in 1..=6 {
            for j in 1..=6 {
                for k in 1..=6 {
                    let c: f64 = coupling_coefficient(i, j, k, 1.7).unwrap();
                    assert!((c - coupling_coefficient(j, k, i, 1.7).unwrap()).abs() < 1e-15);
                    assert!((c - coupling_coefficient(k, j, i, 1.7).unwrap()).abs() < 1e-15);
                    if (i + j + k) % 2 == 0 {
                        assert_eq!(c, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(StripGeometry::new(PI, 10.0, 64, 8, 0.1).is_ok());
        assert!(StripGeometry::new(0.0, 10.0, 64, 8, 0.1).is_err());
        assert!(StripGeometry::new(PI, -1.0, 64, 8, 0.1).is_err());
        assert!(StripGeometry::new(PI, 10.0, 63, 8, 0.1).is_err());
        assert!(StripGeometry::new(PI, 10.0, 2, 8, 0.1).is_err());
        assert!(StripGeometry::new(PI, 10.0, 64, 0, 0.1).is_err());
        assert!(StripGeometry::new(PI, 10.0, 64, 8, -0.1).is_err());
    }
}
