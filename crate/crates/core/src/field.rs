//! Discrete fields on the truncated strip.
//!
//! A [`Field`] stores the Galerkin coefficients `ĝ_j(k)`: for every `y` mode
//! `w_j` the half spectrum of the real `x` profile `g_j(x)` (see
//! `u = Σ_j w_j(y) g_j(x)`). The normalisation is
//! `g_j(x_i) = Σ_m ĝ_j[m] e^{2πi m i / Nx}` over the full (Hermitian)
//! spectrum, so `ĝ_j[0]` is the mean of `g_j`.
//!
//! The Nyquist coefficient is always zero: a real field cannot carry a
//! complex-valued Nyquist amplitude under the dispersive linear flow.

use std::sync::Arc;

use ndarray::{Array2, ArrayView1, Axis};
use num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::FftPlanner;

use crate::error::{Result, ZkbError};
use crate::geometry::{mode_value, StripGeometry};
use crate::scalar::Real;
use crate::sine::SineTransform;

/// Precomputed coordinates, wavenumbers and transform plans for one
/// geometry. Shared between fields through an [`Arc`].
pub struct Grid<T: Real> {
    geometry: StripGeometry<T>,
    x: Vec<T>,
    y: Vec<T>,
    k: Vec<T>,
    lambda: Vec<T>,
    r2c: Arc<dyn RealToComplex<T>>,
    c2r: Arc<dyn ComplexToReal<T>>,
    sine: SineTransform<T>,
}

impl<T: Real> std::fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("geometry", &self.geometry).finish()
    }
}

impl<T: Real> Grid<T> {
    pub fn new(geometry: StripGeometry<T>) -> Result<Arc<Self>> {
        geometry.validate()?;
        let mut planner = RealFftPlanner::<T>::new();
        let r2c = planner.plan_fft_forward(geometry.nx);
        let c2r = planner.plan_fft_inverse(geometry.nx);
        Ok(Arc::new(Self {
            x: geometry.x_grid(),
            y: geometry.y_grid(),
            k: geometry.wavenumbers(),
            lambda: geometry.basis().eigenvalues(),
            sine: SineTransform::new(geometry.ny, geometry.width),
            geometry,
            r2c,
            c2r,
        }))
    }

    pub fn geometry(&self) -> &StripGeometry<T> {
        &self.geometry
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    /// Wavenumbers of the stored half spectrum.
    pub fn k(&self) -> &[T] {
        &self.k
    }

    /// Eigenvalues `λ_1..λ_Ny`.
    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn nx(&self) -> usize {
        self.geometry.nx
    }

    pub fn ny(&self) -> usize {
        self.geometry.ny
    }

    pub fn n_half(&self) -> usize {
        self.geometry.n_half()
    }

    pub fn sine(&self) -> &SineTransform<T> {
        &self.sine
    }

    /// Multiplicity of half-spectrum index `m` in the full spectrum.
    pub(crate) fn multiplicity(&self, m: usize) -> T {
        if m == 0 || m == self.nx() / 2 {
            T::one()
        } else {
            T::lit(2.0)
        }
    }

    /// Inverse real FFT of each row: coefficients `(Ny, Nx/2+1)` to `x`
    /// profiles `(Ny, Nx)`.
    pub fn profiles_from_coeffs(&self, coeffs: &Array2<Complex<T>>) -> Array2<T> {
        let (ny, nh, nx) = (coeffs.nrows(), self.n_half(), self.nx());
        let mut out = Array2::<T>::zeros((ny, nx));
        let mut input = vec![Complex::new(T::zero(), T::zero()); nh];
        let mut output = vec![T::zero(); nx];
        let mut scratch = self.c2r.make_scratch_vec();
        for (row, mut dst) in coeffs.outer_iter().zip(out.outer_iter_mut()) {
            for (slot, c) in input.iter_mut().zip(row.iter()) {
                *slot = *c;
            }
            input[0].im = T::zero();
            input[nh - 1] = Complex::new(T::zero(), T::zero());
            self.c2r
                .process_with_scratch(&mut input, &mut output, &mut scratch)
                .expect("buffer sizes fixed by the plan");
            for (d, v) in dst.iter_mut().zip(output.iter()) {
                *d = *v;
            }
        }
        out
    }

    /// Forward real FFT of each row, normalised by `1/Nx`, Nyquist dropped.
    pub fn coeffs_from_profiles(&self, profiles: &Array2<T>) -> Array2<Complex<T>> {
        let (ny, nh, nx) = (profiles.nrows(), self.n_half(), self.nx());
        let mut out = Array2::<Complex<T>>::zeros((ny, nh));
        let mut input = vec![T::zero(); nx];
        let mut output = vec![Complex::new(T::zero(), T::zero()); nh];
        let mut scratch = self.r2c.make_scratch_vec();
        let inv_n = T::one() / T::from_count(nx);
        for (row, mut dst) in profiles.outer_iter().zip(out.outer_iter_mut()) {
            for (slot, v) in input.iter_mut().zip(row.iter()) {
                *slot = *v;
            }
            self.r2c
                .process_with_scratch(&mut input, &mut output, &mut scratch)
                .expect("buffer sizes fixed by the plan");
            for (d, v) in dst.iter_mut().zip(output.iter()) {
                *d = *v * inv_n;
            }
            dst[0].im = T::zero();
            dst[nh - 1] = Complex::new(T::zero(), T::zero());
        }
        out
    }

    /// Matrix `E[n, j] = w_j(y_n)` evaluating the basis on arbitrary points.
    pub fn evaluation_matrix(&self, points: &[T]) -> Array2<T> {
        let b = self.geometry.width;
        Array2::from_shape_fn((points.len(), self.ny()), |(n, j)| {
            mode_value(j + 1, points[n], b)
        })
    }
}

/// Solution snapshot in Galerkin-Fourier coefficients.
#[derive(Clone)]
pub struct Field<T: Real> {
    grid: Arc<Grid<T>>,
    coeffs: Array2<Complex<T>>,
}

impl<T: Real> std::fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("geometry", self.grid.geometry())
            .field("l2_sq", &self.l2_sq())
            .finish()
    }
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self {
            grid: Arc::clone(grid),
            coeffs: Array2::zeros((grid.ny(), grid.n_half())),
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid<T>>, mut coeffs: Array2<Complex<T>>) -> Result<Self> {
        let expected = (grid.ny(), grid.n_half());
        if coeffs.dim() != expected {
            return Err(ZkbError::Shape {
                expected: format!("{expected:?}"),
                got: format!("{:?}", coeffs.dim()),
            });
        }
        let nh = grid.n_half();
        for mut row in coeffs.outer_iter_mut() {
            row[0].im = T::zero();
            row[nh - 1] = Complex::new(T::zero(), T::zero());
        }
        Ok(Self {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Builds a field from per-mode `x` profiles `g_j(x_i)`, shape `(Ny, Nx)`.
    pub fn from_profiles(grid: &Arc<Grid<T>>, profiles: &Array2<T>) -> Result<Self> {
        if profiles.dim() != (grid.ny(), grid.nx()) {
            return Err(ZkbError::Shape {
                expected: format!("{:?}", (grid.ny(), grid.nx())),
                got: format!("{:?}", profiles.dim()),
            });
        }
        Ok(Self {
            grid: Arc::clone(grid),
            coeffs: grid.coeffs_from_profiles(profiles),
        })
    }

    /// Builds a field from physical samples `u(x_i, y_m)`, shape `(Ny, Nx)`
    /// with rows indexing the interior `y` grid.
    pub fn from_physical(grid: &Arc<Grid<T>>, values: &Array2<T>) -> Result<Self> {
        let (ny, nx) = (grid.ny(), grid.nx());
        if values.dim() != (ny, nx) {
            return Err(ZkbError::Shape {
                expected: format!("{:?}", (ny, nx)),
                got: format!("{:?}", values.dim()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ZkbError::Numeric("non-finite sample in field".into()));
        }
        let mut profiles = Array2::<T>::zeros((ny, nx));
        for (i, column) in values.axis_iter(Axis(1)).enumerate() {
            let col: Vec<T> = column.to_vec();
            let modal = grid.sine().forward(&col)?;
            for (j, v) in modal.into_iter().enumerate() {
                profiles[[j, i]] = v;
            }
        }
        Self::from_profiles(grid, &profiles)
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn geometry(&self) -> &StripGeometry<T> {
        self.grid.geometry()
    }

    pub fn coeffs(&self) -> &Array2<Complex<T>> {
        &self.coeffs
    }

    /// Mutable access to the coefficients. Callers must keep the DC
    /// coefficients real and the Nyquist column zero.
    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex<T>> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex<T>> {
        self.coeffs
    }

    /// Per-mode `x` profiles `g_j(x_i)`, shape `(Ny, Nx)`.
    pub fn profiles(&self) -> Array2<T> {
        self.grid.profiles_from_coeffs(&self.coeffs)
    }

    /// Physical samples `u(x_i, y_m)` on the interior grid, shape `(Ny, Nx)`.
    pub fn to_physical(&self) -> Array2<T> {
        let profiles = self.profiles();
        let (ny, nx) = profiles.dim();
        let mut out = Array2::<T>::zeros((ny, nx));
        for (i, column) in profiles.axis_iter(Axis(1)).enumerate() {
            let values = self
                .grid
                .sine()
                .inverse(&column.to_vec())
                .expect("column length equals Ny");
            for (m, v) in values.into_iter().enumerate() {
                out[[m, i]] = v;
            }
        }
        out
    }

    pub fn same_grid(&self, other: &Field<T>) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.geometry() == other.grid.geometry()
    }

    pub(crate) fn ensure_same_grid(&self, other: &Field<T>) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(ZkbError::GridMismatch)
        }
    }

    /// `∂ⁿu/∂xⁿ`, exact on the stored modes.
    pub fn dx(&self, order: u32) -> Field<T> {
        let mut coeffs = self.coeffs.clone();
        let k = self.grid.k();
        for mut row in coeffs.outer_iter_mut() {
            for (c, &km) in row.iter_mut().zip(k) {
                *c = *c * ik_pow(km, order);
            }
        }
        Field {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    /// `∂²u/∂y²` in modal form, i.e. `-λ_j ĝ_j`.
    pub fn dyy(&self) -> Field<T> {
        let mut out = self.clone();
        for (mut row, &lam) in out.coeffs.outer_iter_mut().zip(self.grid.lambda()) {
            row.mapv_inplace(|c| c * (-lam));
        }
        out
    }

    /// Spectral sum `2Lx Σ_j Σ_m mult(m) |ĝ_j[m]|² c_j`.
    fn weighted_spectral_sum(&self, row_weight: impl Fn(usize) -> T) -> T {
        let two_l = T::lit(2.0) * self.geometry().half_length;
        let mut total = T::zero();
        for (j, row) in self.coeffs.outer_iter().enumerate() {
            let w = row_weight(j);
            let s: T = row
                .iter()
                .enumerate()
                .map(|(m, c)| self.grid.multiplicity(m) * c.norm_sqr())
                .sum();
            total += w * s;
        }
        two_l * total
    }

    /// `‖u‖²` over `[-Lx, Lx) × (0, B)`, exact for the stored modes.
    pub fn l2_sq(&self) -> T {
        self.weighted_spectral_sum(|_| T::one())
    }

    /// `‖u‖`.
    pub fn l2(&self) -> T {
        self.l2_sq().sqrt()
    }

    /// `‖u_x‖²`.
    pub fn dx_l2_sq(&self) -> T {
        let two_l = T::lit(2.0) * self.geometry().half_length;
        let k = self.grid.k();
        let mut total = T::zero();
        for row in self.coeffs.outer_iter() {
            for (m, c) in row.iter().enumerate() {
                total += self.grid.multiplicity(m) * k[m] * k[m] * c.norm_sqr();
            }
        }
        two_l * total
    }

    /// `‖u_y‖² = Σ_j λ_j ‖g_j‖²`.
    pub fn dy_l2_sq(&self) -> T {
        let lambda = self.grid.lambda().to_vec();
        self.weighted_spectral_sum(|j| lambda[j])
    }

    /// `‖∇u‖²`.
    pub fn grad_l2_sq(&self) -> T {
        self.dx_l2_sq() + self.dy_l2_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&mut self, factor: T) {
        self.coeffs.mapv_inplace(|c| c * factor);
    }

    pub fn scaled(&self, factor: T) -> Field<T> {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: T, other: &Field<T>) -> Result<()> {
        self.ensure_same_grid(other)?;
        self.coeffs
            .zip_mut_with(&other.coeffs, |a, &b| *a = *a + b * factor);
        Ok(())
    }

    /// `self − other`.
    pub fn difference(&self, other: &Field<T>) -> Result<Field<T>> {
        let mut out = self.clone();
        out.add_scaled(-T::one(), other)?;
        Ok(out)
    }

    /// Zeroes every Fourier index removed by the 2/3 rule.
    pub fn truncate_two_thirds(&mut self) {
        let geom = *self.geometry();
        for mut row in self.coeffs.outer_iter_mut() {
            for (m, c) in row.iter_mut().enumerate() {
                if !geom.retained(m) {
                    *c = Complex::new(T::zero(), T::zero());
                }
            }
        }
    }

    /// Largest imaginary part produced by a full complex inverse FFT of the
    /// Hermitian-extended spectrum; measures real-valuedness of the field.
    pub fn max_imaginary_residual(&self) -> T {
        let nx = self.grid.nx();
        let nh = self.grid.n_half();
        let mut planner = FftPlanner::<T>::new();
        let fft = planner.plan_fft_inverse(nx);
        let mut worst = T::zero();
        let mut buf = vec![Complex::new(T::zero(), T::zero()); nx];
        for row in self.coeffs.outer_iter() {
            fill_hermitian(row, nh, &mut buf);
            fft.process(&mut buf);
            for c in &buf {
                worst = worst.max(c.im.abs());
            }
        }
        worst
    }
}

fn fill_hermitian<T: Real>(row: ArrayView1<Complex<T>>, nh: usize, buf: &mut [Complex<T>]) {
    let nx = buf.len();
    for (m, c) in row.iter().enumerate() {
        buf[m] = *c;
    }
    for m in 1..nh - 1 {
        buf[nx - m] = row[m].conj();
    }
}

/// `(ik)ⁿ` as a complex multiplier.
#[inline]
pub(crate) fn ik_pow<T: Real>(k: T, order: u32) -> Complex<T> {
    let mag = k.powi(order as i32);
    match order % 4 {
        0 => Complex::new(mag, T::zero()),
        1 => Complex::new(T::zero(), mag),
        2 => Complex::new(-mag, T::zero()),
        _ => Complex::new(T::zero(), -mag),
    }
}
