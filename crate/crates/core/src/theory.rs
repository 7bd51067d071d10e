//! Closed-form decay constants and numerical checks of the functional
//! inequalities behind the decay estimates.
//!
//! The weight rate `b`, the admissible data size and the decay rate `χ`
//! follow from balancing `4b + 10b² = γπ²/B²` against
//! `16‖u₀‖²/9 = (1−γ)²π²/B²`, which gives `χ = b·γ(1−γ)·π²/B²`; the product
//! `γ(1−γ)` is maximal at `γ = ½`.

use realfft::RealFftPlanner;

use crate::error::{domain, Result};
use crate::field::Field;
use crate::scalar::Real;
use crate::solver::nonlinear::product_points;

/// Multiplicative slack applied to the right-hand side of every inequality.
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// Decay constants for a strip of width `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstants<T> {
    pub width: T,
    /// Largest admissible weight rate `b* = (1/5)[−1 + √(1 + 5π²/(4B²))]`.
    pub b_star: T,
    /// `χ = b*·π²/(4B²)`.
    pub chi: T,
    /// Optimal trade-off parameter (`½`).
    pub gamma: T,
    /// Regular-solution smallness bound `3π/(8B)`.
    pub reg_threshold: T,
    /// Weak-solution smallness bound `3π/(16B)`.
    pub weak_threshold: T,
    /// `χ` evaluated through the closed form
    /// `(1/20)[−1 + √(1 + 5π²/(4B²))]·π²/B²`; agrees with `chi` to round-off.
    pub chi_closed_form: T,
}

/// Weight rate, data bound and decay rate for one value of `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTradeoff<T> {
    pub b: T,
    pub u0_bound: T,
    pub chi: T,
}

fn check_width<T: Real>(width: T) -> Result<()> {
    if !(width.is_finite() && width > T::zero()) {
        return Err(domain(format!("strip width must be positive, got {width}")));
    }
    Ok(())
}

/// Solves `4b + 10b² = γπ²/B²` for `b > 0` and returns the matching data
/// bound `3π(1−γ)/(4B)` and rate `χ = b·γ(1−γ)·π²/B²`.
pub fn gamma_tradeoff<T: Real>(gamma: T, width: T) -> Result<GammaTradeoff<T>> {
    check_width(width)?;
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(domain(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let r = T::PI() / width;
    let c = gamma * r * r;
    // b = (−4 + √(16 + 40c))/20, rationalised to avoid cancellation.
    let b = T::lit(2.0) * c / (T::lit(4.0) + (T::lit(16.0) + T::lit(40.0) * c).sqrt());
    let u0_bound = T::lit(3.0) * T::PI() * (T::one() - gamma) / (T::lit(4.0) * width);
    let chi = b * gamma * (T::one() - gamma) * r * r;
    Ok(GammaTradeoff { b, u0_bound, chi })
}

pub fn constants_for_width<T: Real>(width: T) -> Result<TheoremConstants<T>> {
    check_width(width)?;
    let gamma = T::lit(0.5);
    let opt = gamma_tradeoff(gamma, width)?;
    let r = T::PI() / width;
    let root = (T::one() + T::lit(1.25) * r * r).sqrt();
    let chi_closed_form = (root - T::one()) * r * r / T::lit(20.0);
    let reg_threshold = T::lit(3.0) * T::PI() / (T::lit(8.0) * width);
    Ok(TheoremConstants {
        width,
        b_star: opt.b,
        chi: opt.chi,
        gamma,
        reg_threshold,
        weak_threshold: reg_threshold / T::lit(2.0),
        chi_closed_form,
    })
}

/// `b*` through the closed form `(1/5)[−1 + √(1 + 5π²/(4B²))]`.
pub fn b_star_closed_form<T: Real>(width: T) -> Result<T> {
    check_width(width)?;
    let r = T::PI() / width;
    Ok(((T::one() + T::lit(1.25) * r * r).sqrt() - T::one()) / T::lit(5.0))
}

/// Solution class whose smallness condition is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `‖u₀‖ ≤ 3π/(8B)`.
    Regular,
    /// `‖u₀‖ ≤ 3π/(16B)`.
    Weak,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Regular => "regular",
            Regime::Weak => "weak",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = crate::error::ZkbError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(Regime::Regular),
            "weak" => Ok(Regime::Weak),
            other => Err(domain(format!("unknown regime: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smallness<T> {
    pub holds: bool,
    pub threshold: T,
    /// `threshold − ‖u₀‖`.
    pub margin: T,
}

pub fn check_smallness<T: Real>(u0_norm: T, width: T, regime: Regime) -> Result<Smallness<T>> {
    if !(u0_norm >= T::zero()) {
        return Err(domain(format!("norm must be nonnegative, got {u0_norm}")));
    }
    let c = constants_for_width(width)?;
    let threshold = match regime {
        Regime::Regular => c.reg_threshold,
        Regime::Weak => c.weak_threshold,
    };
    Ok(Smallness {
        holds: u0_norm <= threshold,
        threshold,
        margin: threshold - u0_norm,
    })
}

/// Both sides of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

impl<T: Real> InequalityCheck<T> {
    fn new(lhs: T, rhs: T) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs * (T::one() + T::lit(INEQUALITY_SLACK)),
        }
    }

    /// `(rhs − lhs)/rhs`; zero when both sides vanish.
    pub fn relative_margin(&self) -> T {
        if self.rhs == T::zero() {
            if self.lhs == T::zero() {
                T::zero()
            } else {
                -T::infinity()
            }
        } else {
            (self.rhs - self.lhs) / self.rhs
        }
    }
}

/// Weighted modal integrals `(e^{2bx}, ·)` of `u²`, `u_x²`, `u_y²`, `u_xy²`.
struct WeightedIntegrals<T> {
    u: T,
    ux: T,
    uy: T,
    uxy: T,
}

fn weighted_integrals<T: Real>(u: &Field<T>, b: T) -> WeightedIntegrals<T> {
    let grid = u.grid();
    let g = u.profiles();
    let gx = u.dx(1).profiles();
    let lambda = grid.lambda();
    let two_b = T::lit(2.0) * b;
    let mut acc = WeightedIntegrals {
        u: T::zero(),
        ux: T::zero(),
        uy: T::zero(),
        uxy: T::zero(),
    };
    for (i, &x) in grid.x().iter().enumerate() {
        let w = (two_b * x).exp();
        for j in 0..grid.ny() {
            let (v, vx) = (g[[j, i]], gx[[j, i]]);
            acc.u += w * v * v;
            acc.ux += w * vx * vx;
            acc.uy += w * lambda[j] * v * v;
            acc.uxy += w * lambda[j] * vx * vx;
        }
    }
    let dx = grid.geometry().dx();
    acc.u *= dx;
    acc.ux *= dx;
    acc.uy *= dx;
    acc.uxy *= dx;
    acc
}

/// Weighted Steklov (Poincaré) inequality in `y`:
/// `(e^{2bx}, u²) ≤ (B²/π²)(e^{2bx}, u_y²)`.
pub fn verify_steklov<T: Real>(u: &Field<T>, b: T) -> InequalityCheck<T> {
    let w = weighted_integrals(u, b);
    let scale = u.geometry().width / T::PI();
    InequalityCheck::new(w.u, scale * scale * w.uy)
}

/// `∫∫ u⁴` evaluated without quadrature error for the stored modes: `x` is
/// zero-padded to `2·Nx` points and `y` sampled on the refined product grid.
pub fn l4_norm_pow4<T: Real>(u: &Field<T>) -> T {
    let grid = u.grid();
    let geom = grid.geometry();
    let (ny, nx) = (geom.ny, geom.nx);
    let fine_nx = 2 * nx;
    let mut planner = RealFftPlanner::<T>::new();
    let c2r = planner.plan_fft_inverse(fine_nx);
    let mut profiles = ndarray::Array2::<T>::zeros((ny, fine_nx));
    let mut input = c2r.make_input_vec();
    let mut output = c2r.make_output_vec();
    for (row, mut dst) in u.coeffs().outer_iter().zip(profiles.outer_iter_mut()) {
        input.iter_mut().for_each(|c| *c = num_complex::Complex::new(T::zero(), T::zero()));
        for m in 0..geom.n_half() - 1 {
            input[m] = row[m];
        }
        input[0].im = T::zero();
        c2r.process(&mut input, &mut output)
            .expect("buffer sizes fixed by the plan");
        dst.iter_mut().zip(&output).for_each(|(d, v)| *d = *v);
    }
    let points = product_points(geom.width, ny);
    let values = grid.evaluation_matrix(&points).dot(&profiles);
    let sum: T = values.iter().map(|v| (*v * *v) * (*v * *v)).sum();
    let dx_fine = geom.dx() / T::lit(2.0);
    let dy_fine = geom.width / T::from_count(points.len() + 1);
    sum * dx_fine * dy_fine
}

/// Gagliardo–Nirenberg (Ladyzhenskaya-type) inequality on the plane for the
/// zero extension of `u`: `‖u‖²_{L⁴} ≤ 2‖u‖‖∇u‖`.
pub fn verify_gn<T: Real>(u: &Field<T>) -> InequalityCheck<T> {
    let lhs = l4_norm_pow4(u).sqrt();
    let rhs = T::lit(2.0) * u.l2() * u.grad_l2_sq().sqrt();
    InequalityCheck::new(lhs, rhs)
}

/// Weighted supremum bound
///
/// `sup|e^{bx}u|² ≤ δ(1+2b²)(e^{2bx},u_y²) + 2δ(e^{2bx},u_xy²)
///   + (2δ₁/δ)(e^{2bx},u_x²) + (1/δ)(1/δ₁ + 2δ₁b²)(e^{2bx},u²)`
///
/// with the supremum taken as the grid maximum.
pub fn verify_sup_lemma<T: Real>(
    u: &Field<T>,
    b: T,
    delta: T,
    delta1: T,
) -> Result<InequalityCheck<T>> {
    if !(delta > T::zero() && delta1 > T::zero()) {
        return Err(domain(format!(
            "delta and delta1 must be positive, got {delta} and {delta1}"
        )));
    }
    let w = weighted_integrals(u, b);
    let two = T::lit(2.0);
    let rhs = delta * (T::one() + two * b * b) * w.uy
        + two * delta * w.uxy
        + two * delta1 / delta * w.ux
        + (T::one() / delta1 + two * delta1 * b * b) / delta * w.u;
    let phys = u.to_physical();
    let mut sup = T::zero();
    for row in phys.outer_iter() {
        for (i, v) in row.iter().enumerate() {
            sup = sup.max(((b * u.grid().x()[i]).exp() * *v).abs());
        }
    }
    Ok(InequalityCheck::new(sup * sup, rhs))
}
