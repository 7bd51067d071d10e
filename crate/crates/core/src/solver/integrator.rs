//! One-step maps for `ĝ' = σ ĝ − N(ĝ)`.

use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex;

use super::absorber::Absorber;
use super::config::{Scheme, SolverConfig};
use super::linear::{max_dispersive_rate, symbol_table};
use super::nonlinear::NonlinearOperator;
use super::phi::phi123;
use crate::error::{Result, ZkbError};
use crate::field::{Field, Grid};
use crate::scalar::Real;

type Coeffs<T> = Array2<Complex<T>>;

/// Advisory bound on `dt·max|Im σ|`; beyond it the nonlinear stages are
/// unreliable even though the linear flow is integrated exactly.
pub const CFL_LIMIT: f64 = 50.0;

enum Kernel<T: Real> {
    Etd {
        e: Coeffs<T>,
        e_half: Coeffs<T>,
        q: Coeffs<T>,
        f1: Coeffs<T>,
        f2: Coeffs<T>,
        f3: Coeffs<T>,
    },
    Cnab {
        explicit: Coeffs<T>,
        implicit_inv: Coeffs<T>,
        previous: Option<Coeffs<T>>,
    },
}

/// Time stepper with precomputed scheme coefficients.
pub struct Stepper<T: Real> {
    grid: Arc<Grid<T>>,
    dt: T,
    nonlinear: Option<NonlinearOperator<T>>,
    absorber: Option<Absorber<T>>,
    kernel: Kernel<T>,
    cfl: T,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &Arc<Grid<T>>, cfg: &SolverConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let h = cfg.dt;
        let symbol = symbol_table(grid, cfg.convection);
        let kernel = match cfg.scheme {
            Scheme::ExponentialRk4 => {
                let shape = symbol.dim();
                let mut e = Coeffs::zeros(shape);
                let mut e_half = Coeffs::zeros(shape);
                let mut q = Coeffs::zeros(shape);
                let mut f1 = Coeffs::zeros(shape);
                let mut f2 = Coeffs::zeros(shape);
                let mut f3 = Coeffs::zeros(shape);
                let half = T::lit(0.5);
                Zip::indexed(&symbol).for_each(|idx, &s| {
                    let z = s * h;
                    let [p1, p2, p3] = phi123(z);
                    let [p1_half, _, _] = phi123(z * half);
                    e[idx] = z.exp();
                    e_half[idx] = (z * half).exp();
                    q[idx] = p1_half * (h * half);
                    f1[idx] = (p1 - p2 * T::lit(3.0) + p3 * T::lit(4.0)) * h;
                    f2[idx] = (p2 - p3 * T::lit(2.0)) * h;
                    f3[idx] = (p3 * T::lit(4.0) - p2) * h;
                });
                Kernel::Etd {
                    e,
                    e_half,
                    q,
                    f1,
                    f2,
                    f3,
                }
            }
            Scheme::ImexCnab2 => {
                let half_h = h * T::lit(0.5);
                let one = Complex::new(T::one(), T::zero());
                Kernel::Cnab {
                    explicit: symbol.mapv(|s| one + s * half_h),
                    implicit_inv: symbol.mapv(|s| one / (one - s * half_h)),
                    previous: None,
                }
            }
        };
        Ok(Self {
            grid: Arc::clone(grid),
            dt: h,
            nonlinear: cfg
                .nonlinear
                .then(|| NonlinearOperator::new(grid, cfg.dealias)),
            absorber: (cfg.absorber > T::zero())
                .then(|| Absorber::new(grid, cfg.absorber, cfg.dealias)),
            kernel,
            cfl: h * max_dispersive_rate(grid, cfg.convection, cfg.dealias),
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// `dt·max|Im σ|` for this grid and step.
    pub fn cfl_number(&self) -> T {
        self.cfl
    }

    /// Energy drain `2(ν, u²)` of the absorbing layer, zero without one.
    pub fn absorber_drain(&self, state: &Field<T>) -> T {
        self.absorber
            .as_ref()
            .map_or(T::zero(), |a| a.drain_rate(state.coeffs()))
    }

    /// Right-hand side contribution `−N(u) − ν u`.
    fn forcing(&self, coeffs: &Coeffs<T>) -> Result<Coeffs<T>> {
        let mut n = match &self.nonlinear {
            Some(op) => {
                let mut n = op.apply_coeffs(coeffs)?;
                n.mapv_inplace(|c| -c);
                n
            }
            None => Coeffs::zeros(coeffs.dim()),
        };
        if let Some(a) = &self.absorber {
            a.subtract_damping(coeffs, &mut n);
        }
        Ok(n)
    }

    /// Advances `state` (at time `t`) by one step.
    pub fn step(&mut self, state: &Field<T>, t: T) -> Result<Field<T>> {
        if !Arc::ptr_eq(state.grid(), &self.grid) && state.geometry() != self.grid.geometry() {
            return Err(ZkbError::GridMismatch);
        }
        let u = state.coeffs();
        let next = match &self.kernel {
            Kernel::Etd {
                e,
                e_half,
                q,
                f1,
                f2,
                f3,
            } => {
                let nu = self.forcing(u)?;
                let mut a = Coeffs::zeros(u.dim());
                Zip::from(&mut a)
                    .and(e_half)
                    .and(u)
                    .and(q)
                    .and(&nu)
                    .for_each(|a, &eh, &u, &q, &n| *a = eh * u + q * n);
                let na = self.forcing(&a)?;
                let mut b = Coeffs::zeros(u.dim());
                Zip::from(&mut b)
                    .and(e_half)
                    .and(u)
                    .and(q)
                    .and(&na)
                    .for_each(|b, &eh, &u, &q, &n| *b = eh * u + q * n);
                let nb = self.forcing(&b)?;
                let two = T::lit(2.0);
                let mut c = Coeffs::zeros(u.dim());
                Zip::from(&mut c)
                    .and(e_half)
                    .and(&a)
                    .and(q)
                    .and(&nb)
                    .and(&nu)
                    .for_each(|c, &eh, &a, &q, &nb, &nu| *c = eh * a + q * (nb * two - nu));
                let nc = self.forcing(&c)?;
                let mut out = Coeffs::zeros(u.dim());
                Zip::from(&mut out)
                    .and(e)
                    .and(u)
                    .and(f1)
                    .and(&nu)
                    .for_each(|o, &e, &u, &f1, &nu| *o = e * u + f1 * nu);
                Zip::from(&mut out)
                    .and(f2)
                    .and(&na)
                    .and(&nb)
                    .and(f3)
                    .and(&nc)
                    .for_each(|o, &f2, &na, &nb, &f3, &nc| {
                        *o = *o + f2 * (na + nb) * two + f3 * nc
                    });
                out
            }
            Kernel::Cnab { .. } => {
                let nu = self.forcing(u)?;
                let Kernel::Cnab {
                    explicit,
                    implicit_inv,
                    previous,
                } = &mut self.kernel
                else {
                    unreachable!()
                };
                let h = self.dt;
                let (w_now, w_prev) = if previous.is_some() {
                    (T::lit(1.5) * h, T::lit(-0.5) * h)
                } else {
                    (h, T::zero())
                };
                let prev = previous.take().unwrap_or_else(|| nu.clone());
                let mut out = Coeffs::zeros(u.dim());
                Zip::from(&mut out)
                    .and(&*explicit)
                    .and(u)
                    .and(&nu)
                    .and(&prev)
                    .and(&*implicit_inv)
                    .for_each(|o, &ex, &u, &n, &p, &inv| {
                        *o = (ex * u + n * w_now + p * w_prev) * inv
                    });
                *previous = Some(nu);
                out
            }
        };
        let field = Field::from_coeffs(&self.grid, next)?;
        if !field.is_finite() {
            return Err(ZkbError::BlowUp {
                t: (t + self.dt).as_f64(),
                l2: f64::NAN,
            });
        }
        Ok(field)
    }
}

/// Single step with a freshly built stepper. Multistep schemes start from
/// their one-step initialisation.
pub fn step<T: Real>(state: &Field<T>, t: T, cfg: &SolverConfig<T>) -> Result<Field<T>> {
    Stepper::new(state.grid(), cfg)?.step(state, t)
}
