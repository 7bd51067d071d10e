use std::sync::Arc;

use ndarray::Array2;

use crate::diagnostics::tail_mass;
use crate::error::{domain, Result, ZkbError};
use crate::field::{Field, Grid};
use crate::geometry::mode_value;
use crate::scalar::Real;

/// Largest tail mass accepted for localized initial data.
pub const INITIAL_TAIL_LIMIT: f64 = 1e-8;

/// Initial condition `u(x, y, 0) = u₀(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData<T> {
    /// `A·exp(−(x−x₀)²/s²)·w_j(y)`.
    GaussianMode {
        amplitude: T,
        center: T,
        width: T,
        mode: usize,
    },
    /// `A·sin(kx)·w_j(y)` with `k` a multiple of `π/Lx`. Periodic in `x`,
    /// hence exempt from the tail-mass admission check.
    SingleMode {
        amplitude: T,
        wavenumber: T,
        mode: usize,
    },
    /// Physical samples on the interior grid, shape `(Ny, Nx)`.
    CustomSamples { values: Array2<T> },
}

impl<T: Real> InitialData<T> {
    /// Gaussian mode with the amplitude chosen so that `‖u₀‖ = norm` on the
    /// whole line (`‖u₀‖² = A²·s·√(π/2)`).
    pub fn gaussian_with_norm(norm: T, center: T, width: T, mode: usize) -> Self {
        let unit = (width * (T::PI() / T::lit(2.0)).sqrt()).sqrt();
        InitialData::GaussianMode {
            amplitude: norm / unit,
            center,
            width,
            mode,
        }
    }

    pub fn is_localized(&self) -> bool {
        !matches!(self, InitialData::SingleMode { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InitialData::GaussianMode { .. } => "gaussian_mode",
            InitialData::SingleMode { .. } => "single_mode",
            InitialData::CustomSamples { .. } => "custom_samples",
        }
    }
}

/// Sampled initial field together with its reported norms.
#[derive(Debug, Clone)]
pub struct InitialField<T: Real> {
    pub field: Field<T>,
    /// `‖u₀‖`.
    pub l2: T,
    /// Fraction of `(e^{2bx}, u₀²)` in the outer bands.
    pub tail: T,
}

fn check_mode(mode: usize, ny: usize) -> Result<()> {
    if mode < 1 || mode > ny {
        return Err(domain(format!("y-mode {mode} outside 1..={ny}")));
    }
    Ok(())
}

/// Samples `u₀` on the grid. Localized data whose tail mass exceeds
/// [`INITIAL_TAIL_LIMIT`] is rejected.
pub fn make_initial_field<T: Real>(
    spec: &InitialData<T>,
    grid: &Arc<Grid<T>>,
) -> Result<InitialField<T>> {
    let geom = *grid.geometry();
    let (ny, nx) = (geom.ny, geom.nx);
    let field = match spec {
        InitialData::GaussianMode {
            amplitude,
            center,
            width,
            mode,
        } => {
            check_mode(*mode, ny)?;
            if !(*width > T::zero()) {
                return Err(domain("gaussian width must be positive"));
            }
            let mut profiles = Array2::<T>::zeros((ny, nx));
            for (i, &x) in grid.x().iter().enumerate() {
                let r = (x - *center) / *width;
                profiles[[mode - 1, i]] = *amplitude * (-(r * r)).exp();
            }
            Field::from_profiles(grid, &profiles)?
        }
        InitialData::SingleMode {
            amplitude,
            wavenumber,
            mode,
        } => {
            check_mode(*mode, ny)?;
            let index = *wavenumber * geom.half_length / T::PI();
            let rounded = index.round();
            if (index - rounded).abs() > T::lit(1e-9) * rounded.abs().max(T::one())
                || rounded < T::zero()
                || rounded.to_usize().unwrap_or(usize::MAX) >= nx / 2
            {
                return Err(domain(format!(
                    "wavenumber {wavenumber} is not a representable multiple of π/Lx"
                )));
            }
            let mut profiles = Array2::<T>::zeros((ny, nx));
            for (i, &x) in grid.x().iter().enumerate() {
                profiles[[mode - 1, i]] = *amplitude * (*wavenumber * x).sin();
            }
            Field::from_profiles(grid, &profiles)?
        }
        InitialData::CustomSamples { values } => Field::from_physical(grid, values)?,
    };
    if !field.is_finite() {
        return Err(ZkbError::Numeric("initial field is not finite".into()));
    }
    let tail = tail_mass(&field, geom.weight_rate);
    if spec.is_localized() && tail.as_f64() > INITIAL_TAIL_LIMIT {
        return Err(ZkbError::SupportTooWide {
            tail: tail.as_f64(),
            limit: INITIAL_TAIL_LIMIT,
        });
    }
    Ok(InitialField {
        l2: field.l2(),
        tail,
        field,
    })
}

/// Physical samples of `A·w_j(y)·φ(x)` for an arbitrary profile `φ`.
pub fn separable_samples<T: Real>(grid: &Grid<T>, mode: usize, profile: impl Fn(T) -> T) -> Array2<T> {
    let b = grid.geometry().width;
    Array2::from_shape_fn((grid.ny(), grid.nx()), |(m, i)| {
        profile(grid.x()[i]) * mode_value(mode, grid.y()[m], b)
    })
}
