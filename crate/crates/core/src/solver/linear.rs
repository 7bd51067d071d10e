use ndarray::Array2;
use num_complex::Complex;

use crate::field::Grid;
use crate::scalar::Real;

/// Growth rate `σ(k, λ)` of the Fourier–sine mode `e^{ikx} w(y)` under the
/// linear part of the equation, `ĝ' = σ ĝ`:
///
/// `σ = −k² + i·k·(k² + λ − c)`
///
/// The real part is the Burgers dissipation, the imaginary part the
/// dispersion from `u_xxx + u_xyy` and the optional convection `c·u_x`.
#[inline]
pub fn linear_symbol<T: Real>(k: T, lambda: T, convection: T) -> Complex<T> {
    debug_assert!(lambda >= T::zero());
    Complex::new(-k * k, k * (k * k + lambda - convection))
}

/// `σ` tabulated on the stored spectrum, shape `(Ny, Nx/2+1)`.
pub fn symbol_table<T: Real>(grid: &Grid<T>, convection: T) -> Array2<Complex<T>> {
    let k = grid.k();
    let lambda = grid.lambda();
    Array2::from_shape_fn((grid.ny(), grid.n_half()), |(j, m)| {
        linear_symbol(k[m], lambda[j], convection)
    })
}

/// `max |Im σ|` over the stored spectrum (Nyquist excluded).
pub fn max_dispersive_rate<T: Real>(grid: &Grid<T>, convection: T, dealias: bool) -> T {
    let geom = grid.geometry();
    let lambda_max = *grid.lambda().last().expect("Ny >= 1");
    (0..grid.n_half() - 1)
        .filter(|&m| !dealias || geom.retained(m))
        .map(|m| linear_symbol(grid.k()[m], lambda_max, convection).im.abs())
        .fold(T::zero(), T::max)
}
