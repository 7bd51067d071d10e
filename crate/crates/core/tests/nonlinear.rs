//! Pseudospectral nonlinear term against the coupling-tensor projection.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex;
use zkb_core::corpus::random_field;
use zkb_core::solver::nonlinear::pairing;
use zkb_core::solver::NonlinearOperator;
use zkb_core::solver::initial::separable_samples;
use zkb_core::{coupling_coefficient, nonlinear_term, Field, Grid, StripGeometry};

fn grid(b: f64, lx: f64, nx: usize, ny: usize) -> Arc<Grid<f64>> {
    Grid::new(StripGeometry::new(b, lx, nx, ny, 0.1).unwrap()).unwrap()
}

/// `P_j(u u_x)` for `u = Σ a_{m,j} e^{i k_m x} w_j + c.c.` assembled directly
/// from the coupling coefficients: a convolution in `x` and `T_{ijl}` in `y`.
fn tensor_oracle(u: &Field<f64>) -> Array2<Complex<f64>> {
    let grid = u.grid();
    let geom = grid.geometry();
    let (ny, nh) = (geom.ny, geom.n_half());
    let c = u.coeffs();
    // Full two-sided spectrum indexed by signed m.
    let coef = |j: usize, m: i64| -> Complex<f64> {
        if m >= 0 {
            c[[j, m as usize]]
        } else {
            c[[j, (-m) as usize]].conj()
        }
    };
    let mut out = Array2::<Complex<f64>>::zeros((ny, nh));
    let nonzero: Vec<(usize, i64)> = (0..ny)
        .flat_map(|j| (-(nh as i64) + 1..nh as i64).map(move |m| (j, m)))
        .filter(|&(j, m)| coef(j, m).norm() > 0.0)
        .collect();
    for &(i, m1) in &nonzero {
        for &(j, m2) in &nonzero {
            let m = m1 + m2;
            if m < 0 || m as usize >= nh || !geom.retained(m as usize) {
                continue;
            }
            // u u_x = ½ ∂x(u²): the product mode carries i k_m / 2.
            let k = geom.wavenumber(m as usize);
            let prod = coef(i, m1) * coef(j, m2) * Complex::new(0.0, 0.5 * k);
            for l in 0..ny {
                let t = coupling_coefficient(i + 1, j + 1, l + 1, geom.width).unwrap();
                out[[l, m as usize]] += prod * t;
            }
        }
    }
    out
}

#[test]
fn single_mode_matches_coupling_projection() {
    // u = sin(x) w_1(y): u u_x = ½ sin(2x) w_1², so N_j = ½ sin(2x) T_{11j}.
    let g = grid(PI, PI, 32, 8);
    let u = Field::from_physical(&g, &separable_samples(&g, 1, |x: f64| x.sin())).unwrap();
    let n = nonlinear_term(&u, true).unwrap();
    for j in 0..8 {
        let t = coupling_coefficient(1, 1, j + 1, PI).unwrap();
        for m in 0..g.n_half() {
            let expect = if m == 2 {
                Complex::new(0.0, -0.25 * t)
            } else {
                Complex::new(0.0, 0.0)
            };
            let got = n.coeffs()[[j, m]];
            assert!((got - expect).norm() < 1e-8, "j={} m={m}: {got} vs {expect}", j + 1);
        }
    }
    let oracle = tensor_oracle(&u);
    let diff = (&oracle - n.coeffs()).iter().fold(0.0f64, |a, c| a.max(c.norm()));
    assert!(diff < 1e-12);
}

#[test]
fn multimode_field_matches_tensor_oracle() {
    let g = grid(2.0, PI, 24, 5);
    let mut c = Array2::<Complex<f64>>::zeros((5, 13));
    c[[0, 1]] = Complex::new(0.3, -0.1);
    c[[1, 2]] = Complex::new(-0.2, 0.25);
    c[[2, 0]] = Complex::new(0.15, 0.0);
    c[[4, 3]] = Complex::new(0.05, 0.07);
    let u = Field::from_coeffs(&g, c).unwrap();
    let n = nonlinear_term(&u, true).unwrap();
    let oracle = tensor_oracle(&u);
    let diff = (&oracle - n.coeffs()).iter().fold(0.0f64, |a, c| a.max(c.norm()));
    assert!(diff < 1e-13, "{diff}");
}

#[test]
fn dealiased_term_is_skew() {
    let g = grid(PI, 12.0, 96, 12);
    for seed in 0..10 {
        let u = random_field(&g, seed).unwrap();
        let n = nonlinear_term(&u, true).unwrap();
        let p = pairing(&n, &u).unwrap();
        let scale = n.l2() * u.l2();
        assert!(p.abs() < 1e-13 * scale.max(1.0), "seed {seed}: {p}");
    }
}

#[test]
fn output_is_real_valued() {
    let g = grid(PI, 10.0, 64, 8);
    let u = random_field(&g, 11).unwrap();
    for dealias in [true, false] {
        let n = nonlinear_term(&u, dealias).unwrap();
        assert!(n.max_imaginary_residual() < 1e-14);
        assert!(n.coeffs().column(0).iter().all(|c| c.im == 0.0));
    }
}

#[test]
fn exact_projection_versus_native_grid_product() {
    // P_j((w_1 + ½w_2)²) = T_{11j} + T_{12j} + ¼T_{22j}. The refined-grid
    // projection is exact; the native rectangle rule only converges
    // algebraically because half-range integrals of odd extensions are not
    // captured by the periodic trapezoid rule.
    let b = PI;
    let mut previous = f64::INFINITY;
    for ny in [8usize, 16, 32] {
        let g = grid(b, 10.0, 8, ny);
        let mut profiles = Array2::<f64>::zeros((ny, 8));
        profiles.row_mut(0).fill(1.0);
        profiles.row_mut(1).fill(0.5);
        let err = |dealias: bool| {
            let s = NonlinearOperator::new(&g, dealias).project_square(&profiles);
            (0..ny)
                .map(|j| {
                    let t = coupling_coefficient(1, 1, j + 1, b).unwrap()
                        + coupling_coefficient(1, 2, j + 1, b).unwrap()
                        + 0.25 * coupling_coefficient(2, 2, j + 1, b).unwrap();
                    (s[[j, 0]] - t).abs()
                })
                .fold(0.0f64, f64::max)
        };
        assert!(err(true) < 1e-14);
        let native = err(false);
        assert!(native > 1e-6 && native < previous / 4.0, "ny={ny}: {native}");
        previous = native;
    }
}
