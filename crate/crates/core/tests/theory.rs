//! Functional inequalities on the seeded random corpus and the
//! closed-form decay constants.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use zkb_core::corpus::{random_corpus, random_field};
use zkb_core::solver::initial::separable_samples;
use zkb_core::theory::{b_star_closed_form, l4_norm_pow4};
use zkb_core::{
    constants_for_width, gamma_tradeoff, verify_gn, verify_steklov, verify_sup_lemma, Field, Grid,
    StripGeometry,
};

fn grid(b: f64, lx: f64, nx: usize, ny: usize) -> Arc<Grid<f64>> {
    Grid::new(StripGeometry::new(b, lx, nx, ny, 0.1).unwrap()).unwrap()
}

fn separable(g: &Arc<Grid<f64>>, mode: usize, phi: impl Fn(f64) -> f64) -> Field<f64> {
    Field::from_physical(g, &separable_samples(g, mode, phi)).unwrap()
}

#[test]
fn steklov_equality_and_mode_ratios() {
    let g = grid(PI, 12.0, 128, 8);
    for &b in &[0.0, 0.1, 0.3] {
        let first = verify_steklov(&separable(&g, 1, |x| (-x * x / 2.0).exp() * (1.0 + 0.3 * x)), b);
        assert!(first.holds);
        assert!(((first.lhs - first.rhs) / first.rhs).abs() < 1e-10);
        for j in 1..=8 {
            let c = verify_steklov(&separable(&g, j, |x| (-x * x).exp()), b);
            let ratio = c.lhs / c.rhs;
            assert!((ratio - 1.0 / (j * j) as f64).abs() < 1e-10, "j={j}: {ratio}");
        }
    }
}

#[test]
fn steklov_gn_sup_hold_on_the_corpus() {
    let g = grid(PI, 10.0, 128, 8);
    let corpus = random_corpus(&g, 100, 7).unwrap();
    let mut worst = [f64::INFINITY; 3];
    for (n, u) in corpus.iter().enumerate() {
        let checks = [
            verify_steklov(u, 0.1),
            verify_gn(u),
            verify_sup_lemma(u, 0.1, 1.0, 1.0).unwrap(),
        ];
        for (w, c) in worst.iter_mut().zip(&checks) {
            assert!(c.holds, "field {n}: {c:?}");
            *w = w.min(c.relative_margin());
        }
    }
    assert!(worst.iter().all(|w| *w >= 0.0));
}

#[test]
fn sup_lemma_across_delta() {
    let g = grid(PI, 10.0, 128, 8);
    for u in random_corpus(&g, 20, 100).unwrap() {
        for &delta in &[0.1, 1.0, 10.0] {
            for &delta1 in &[0.5, 1.0, 2.0] {
                let c = verify_sup_lemma(&u, 0.1, delta, delta1).unwrap();
                assert!(c.holds, "δ={delta} δ₁={delta1}: {c:?}");
            }
        }
    }
    let u = random_field(&g, 1).unwrap();
    assert!(verify_sup_lemma(&u, 0.1, 0.0, 1.0).is_err());
    assert!(verify_sup_lemma(&u, 0.1, 1.0, -1.0).is_err());
}

#[test]
fn sup_lemma_gaussian_example() {
    let g = grid(PI, 12.0, 256, 8);
    let c = verify_sup_lemma(&separable(&g, 1, |x| (-x * x).exp()), 0.1, 1.0, 1.0).unwrap();
    assert!(c.holds && c.lhs > 0.0 && c.rhs > c.lhs);
}

#[test]
fn zero_field_gives_equalities() {
    let g = grid(PI, 10.0, 64, 4);
    let z = Field::zeros(&g);
    for c in [verify_gn(&z), verify_steklov(&z, 0.1), verify_sup_lemma(&z, 0.1, 1.0, 1.0).unwrap()] {
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(c.holds);
    }
}

#[test]
fn l4_norm_of_separable_gaussian() {
    // ∫e^{−4x²}dx · ∫w₁⁴dy = √(π)/2 · 3/(2B).
    let width = 2.0;
    let g = grid(width, 10.0, 128, 6);
    let u = separable(&g, 1, |x| (-x * x).exp());
    let expect = PI.sqrt() / 2.0 * 1.5 / width;
    assert!((l4_norm_pow4(&u) - expect).abs() < 1e-12);
}

#[test]
fn gn_radial_gaussian_desk_check() {
    // e^{−(x²+y²)} on the plane, by tensor-product quadrature.
    let (n, l) = (801, 8.0);
    let h = 2.0 * l / (n - 1) as f64;
    let (mut l4, mut l2, mut grad) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (-l + i as f64 * h, -l + j as f64 * h);
            let u = (-(x * x + y * y)).exp();
            l4 += u.powi(4);
            l2 += u * u;
            grad += 4.0 * (x * x + y * y) * u * u;
        }
    }
    let (l4, l2, grad) = (l4 * h * h, l2 * h * h, grad * h * h);
    let lhs = l4.sqrt();
    let rhs = 2.0 * l2.sqrt() * grad.sqrt();
    assert!((lhs - PI.sqrt() / 2.0).abs() < 1e-10);
    assert!((rhs - 2.0 * (PI / 2.0).sqrt() * PI.sqrt()).abs() < 1e-10);
    assert!((lhs - 0.8862).abs() < 1e-4 && (rhs - 4.4429).abs() < 1e-4);
}

#[test]
fn closed_forms_agree_across_widths() {
    for i in 1..=60 {
        let b = 0.1 * i as f64;
        let c = constants_for_width(b).unwrap();
        assert!((c.chi - c.chi_closed_form).abs() < 1e-14 * c.chi.max(1.0));
        assert!((c.b_star - b_star_closed_form(b).unwrap()).abs() < 1e-14 * c.b_star.max(1.0));
        let g = gamma_tradeoff(0.5, b).unwrap();
        assert_eq!((g.b, g.chi), (c.b_star, c.chi));
        assert_eq!(c.weak_threshold, c.reg_threshold / 2.0);
    }
}

#[test]
fn f32_smoke() {
    let c = constants_for_width(std::f32::consts::PI).unwrap();
    assert!((c.b_star - 0.1).abs() < 1e-6 && (c.chi - 0.025).abs() < 1e-6);
    let g = Grid::new(StripGeometry::new(std::f32::consts::PI, 10.0f32, 64, 4, 0.1).unwrap()).unwrap();
    let u = random_field(&g, 3).unwrap();
    assert!((u.l2() - 1.0).abs() < 1e-5);
    assert!(verify_steklov(&u, 0.1).holds);
    let mut cfg = zkb_core::SolverConfig::new(0.01f32, 0.2);
    cfg.output_every = 5;
    cfg.dissipation = zkb_core::solver::DissipationMode::PerStep;
    let s = zkb_core::run(&u.scaled(0.2), &cfg).unwrap();
    assert!(!matches!(s.status, zkb_core::RunStatus::BlowUp { .. }));
    let res = zkb_core::energy_residual(&s).unwrap();
    assert!(res < 1e-3, "{res}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inequalities_hold_for_arbitrary_seeds_and_rates(seed in any::<u64>(), b in 0.0f64..0.5, scale in 1e-3f64..1e3) {
        let g = grid(PI, 10.0, 128, 8);
        let u = random_field(&g, seed).unwrap().scaled(scale);
        prop_assert!(verify_steklov(&u, b).holds);
        prop_assert!(verify_gn(&u).holds);
        prop_assert!(verify_sup_lemma(&u, b, 1.0, 1.0).unwrap().holds);
    }

    #[test]
    fn gamma_tradeoff_solves_its_quadratic(gamma in 0.01f64..0.99, width in 0.2f64..20.0) {
        let t = gamma_tradeoff(gamma, width).unwrap();
        let r2 = (PI / width).powi(2);
        prop_assert!((4.0 * t.b + 10.0 * t.b * t.b - gamma * r2).abs() < 1e-13 * (1.0 + gamma * r2));
        prop_assert!((t.chi - t.b * gamma * (1.0 - gamma) * r2).abs() < 1e-15);
    }
}
