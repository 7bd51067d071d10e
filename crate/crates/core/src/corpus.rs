//! Seeded corpus of localized, band-limited random fields used by the
//! inequality sweeps.

use std::sync::Arc;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::field::{Field, Grid};
use crate::geometry::mode_value;
use crate::scalar::Real;

/// Number of `x` harmonics under the envelope.
const HARMONICS: usize = 4;
/// Largest `y` mode populated.
const MAX_Y_MODES: usize = 6;

/// Random field `env(x−c)·Σ_{p,j} (a_pj cos(ω_p x) + b_pj sin(ω_p x))·w_j(y)`
/// with standard-normal coefficients damped as `1/((1+p)·j)`, a Gaussian
/// envelope of width `Lx/8` centred within `±Lx/8`, and frequencies up to a
/// quarter of the grid Nyquist wavenumber. Scaled to unit `L²` norm.
///
/// The envelope keeps the field negligible at the box ends, so inequalities
/// posed on the whole strip or plane apply to it.
pub fn random_field<T: Real>(grid: &Arc<Grid<T>>, seed: u64) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let geom = grid.geometry();
    let lx = geom.half_length.as_f64();
    let sigma = lx / 8.0;
    let center = (normal().clamp(-1.0, 1.0)) * lx / 8.0;
    let k_nyquist = std::f64::consts::PI * geom.nx as f64 / (2.0 * lx);
    let step = k_nyquist / (4.0 * HARMONICS as f64);
    let modes = geom.ny.min(MAX_Y_MODES);
    let mut cos_c = vec![vec![0.0; modes]; HARMONICS + 1];
    let mut sin_c = vec![vec![0.0; modes]; HARMONICS + 1];
    for p in 0..=HARMONICS {
        for j in 0..modes {
            let damp = 1.0 / ((1 + p) as f64 * (j + 1) as f64);
            cos_c[p][j] = normal() * damp;
            sin_c[p][j] = normal() * damp;
        }
    }
    let width = geom.width.as_f64();
    let xs: Vec<f64> = grid.x().iter().map(|x| x.as_f64()).collect();
    let ys: Vec<f64> = grid.y().iter().map(|y| y.as_f64()).collect();
    let values = Array2::from_shape_fn((geom.ny, geom.nx), |(m, i)| {
        let x = xs[i];
        let r = (x - center) / sigma;
        let env = (-0.5 * r * r).exp();
        let mut acc = 0.0;
        for j in 0..modes {
            let w = mode_value(j + 1, ys[m], width);
            let mut line = 0.0;
            for p in 0..=HARMONICS {
                let arg = step * p as f64 * (x - center);
                line += cos_c[p][j] * arg.cos() + sin_c[p][j] * arg.sin();
            }
            acc += line * w;
        }
        T::lit(env * acc)
    });
    let mut field = Field::from_physical(grid, &values)?;
    let norm = field.l2();
    if norm > T::zero() {
        field.scale(T::one() / norm);
    }
    Ok(field)
}

/// `count` fields with seeds `seed, seed+1, …`.
pub fn random_corpus<T: Real>(grid: &Arc<Grid<T>>, count: usize, seed: u64) -> Result<Vec<Field<T>>> {
    (0..count as u64)
        .map(|i| random_field(grid, seed.wrapping_add(i)))
        .collect()
}
