//! Norms and functionals of solution fields, run time series, and
//! empirical decay-rate fits.
//!
//! Quadrature conventions: `y` integrals are evaluated in modal space, which
//! is exact for the stored sine modes (and agrees with the interior
//! rectangle rule for products of sines); `x` integrals use the uniform
//! trapezoid rule on the periodic grid. Weighted pairings carry an explicit
//! rate `b` and mean `∫∫ e^{2bx} f g dx dy`.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};

use crate::error::{Result, ZkbError};
use crate::field::Field;
use crate::geometry::StripGeometry;
use crate::scalar::Real;
use crate::solver::config::SolverConfig;
use crate::solver::nonlinear::product_points;

/// Fraction of the `x` domain (per end) counted as tail.
pub const TAIL_BAND_FRACTION: f64 = 0.1;
/// Tail mass beyond which a run is flagged as contaminated.
pub const CONTAMINATION_LIMIT: f64 = 1e-6;

/// Which column of a [`NormSample`] to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    DissCum,
    WeightedL2,
    WeightedH1,
    SupWeighted,
    Tail,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::L2 => "l2",
            NormKind::DissCum => "diss_cum",
            NormKind::WeightedL2 => "w_l2",
            NormKind::WeightedH1 => "w_h1",
            NormKind::SupWeighted => "sup_w",
            NormKind::Tail => "tail",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = ZkbError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "l2" => NormKind::L2,
            "diss_cum" => NormKind::DissCum,
            "w_l2" => NormKind::WeightedL2,
            "w_h1" => NormKind::WeightedH1,
            "sup_w" => NormKind::SupWeighted,
            "tail" => NormKind::Tail,
            other => return Err(ZkbError::Fit(format!("unknown norm: {other}"))),
        })
    }
}

/// Diagnostics of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample<T> {
    pub t: T,
    /// `‖u‖²`.
    pub l2: T,
    /// `2∫₀ᵗ‖u_x‖² ds`.
    pub diss_cum: T,
    /// `(e^{2bx}, u²)`.
    pub w_l2: T,
    /// `(e^{2bx}, u² + |∇u|²)`.
    pub w_h1: T,
    /// Grid maximum of `|e^{bx} u|`, a lower bound on the true supremum.
    pub sup_w: T,
    pub tail: T,
}

impl<T: Real> NormSample<T> {
    pub fn get(&self, kind: NormKind) -> T {
        match kind {
            NormKind::L2 => self.l2,
            NormKind::DissCum => self.diss_cum,
            NormKind::WeightedL2 => self.w_l2,
            NormKind::WeightedH1 => self.w_h1,
            NormKind::SupWeighted => self.sup_w,
            NormKind::Tail => self.tail,
        }
    }

    /// Measures every norm of `u` except the dissipation integral, which the
    /// caller accumulates over time.
    pub fn measure(u: &Field<T>, t: T, diss_cum: T) -> Self {
        let b = u.geometry().weight_rate;
        let d = Densities::of(u);
        let weights = exp_weights(u, b);
        let dx = u.geometry().dx();
        let mut w_l2 = T::zero();
        let mut w_h1 = T::zero();
        for i in 0..weights.len() {
            w_l2 += weights[i] * d.value[i];
            w_h1 += weights[i] * (d.value[i] + d.dx[i] + d.dy[i]);
        }
        Self {
            t,
            l2: u.l2_sq(),
            diss_cum,
            w_l2: w_l2 * dx,
            w_h1: w_h1 * dx,
            sup_w: sup_weighted(u, b),
            tail: band_fraction(u, &weights, &d.value),
        }
    }
}

/// `y`-integrated densities at every grid `x`.
struct Densities<T> {
    /// `∫ u² dy`
    value: Vec<T>,
    /// `∫ u_x² dy`
    dx: Vec<T>,
    /// `∫ u_y² dy`
    dy: Vec<T>,
}

impl<T: Real> Densities<T> {
    fn of(u: &Field<T>) -> Self {
        let g = u.profiles();
        let gx = u.dx(1).profiles();
        let lambda = u.grid().lambda();
        let nx = g.ncols();
        let mut value = vec![T::zero(); nx];
        let mut dx = vec![T::zero(); nx];
        let mut dy = vec![T::zero(); nx];
        for (j, (row, row_x)) in g.outer_iter().zip(gx.outer_iter()).enumerate() {
            for i in 0..nx {
                let v = row[i];
                let vx = row_x[i];
                value[i] += v * v;
                dx[i] += vx * vx;
                dy[i] += lambda[j] * v * v;
            }
        }
        Self { value, dx, dy }
    }
}

/// `Σ_j f_j(x) g_j(x)`, i.e. `∫₀^B f g dy` at every grid `x`.
fn y_pairing<T: Real>(f: &Array2<T>, g: &Array2<T>) -> Vec<T> {
    (f * g).sum_axis(Axis(0)).to_vec()
}

fn exp_weights<T: Real>(u: &Field<T>, b: T) -> Vec<T> {
    let two_b = T::lit(2.0) * b;
    u.grid().x().iter().map(|&x| (two_b * x).exp()).collect()
}

fn sup_weighted<T: Real>(u: &Field<T>, b: T) -> T {
    let phys = u.to_physical();
    let x = u.grid().x();
    let mut best = T::zero();
    for row in phys.outer_iter() {
        for (i, v) in row.iter().enumerate() {
            best = best.max(((b * x[i]).exp() * *v).abs());
        }
    }
    best
}

fn in_tail_band<T: Real>(geom: &StripGeometry<T>, x: T) -> bool {
    let band = T::lit(2.0 * TAIL_BAND_FRACTION) * geom.half_length;
    x < -geom.half_length + band || x >= geom.half_length - band
}

fn band_fraction<T: Real>(u: &Field<T>, weights: &[T], density: &[T]) -> T {
    let geom = u.geometry();
    let mut total = T::zero();
    let mut tail = T::zero();
    for (i, &x) in u.grid().x().iter().enumerate() {
        let w = weights[i] * density[i];
        total += w;
        if in_tail_band(geom, x) {
            tail += w;
        }
    }
    if total > T::zero() {
        tail / total
    } else {
        T::zero()
    }
}

/// `(e^{2bx} f, g) = ∫∫ e^{2bx} f g dx dy`.
pub fn weighted_inner<T: Real>(b: T, f: &Field<T>, g: &Field<T>) -> Result<T> {
    if !f.same_grid(g) {
        return Err(ZkbError::GridMismatch);
    }
    let pair = y_pairing(&f.profiles(), &g.profiles());
    let weights = exp_weights(f, b);
    let s: T = pair.iter().zip(&weights).map(|(p, w)| *p * *w).sum();
    Ok(s * f.geometry().dx())
}

/// Fraction of `(e^{2bx}, u²)` carried by the outer 10% of the `x` domain
/// at each end (bands of width `0.2·Lx`), summed. Zero for the zero field.
pub fn tail_mass<T: Real>(u: &Field<T>, b: T) -> T {
    let d = Densities::of(u);
    band_fraction(u, &exp_weights(u, b), &d.value)
}

/// Initial-data functional
/// `J₀ = ‖u₀‖² + (e^{2bx}, u₀² + |∇u₀|² + |∇u₀ₓ|² + u₀²u₀ₓ² + |Δu₀ₓ|²)`
/// with every derivative taken spectrally.
pub fn compute_j0<T: Real>(u0: &Field<T>, b: T) -> Result<T> {
    let grid = u0.grid();
    let lambda = grid.lambda();
    let g = u0.profiles();
    let gx = u0.dx(1).profiles();
    let gxx = u0.dx(2).profiles();
    let gxxx = u0.dx(3).profiles();
    let nx = grid.nx();
    let geom = grid.geometry();

    // Quartic term on the refined grid, exact in y for these degrees.
    let points = product_points(geom.width, geom.ny);
    let eval = grid.evaluation_matrix(&points);
    let u_vals = eval.dot(&g);
    let ux_vals = eval.dot(&gx);
    let dy_fine = geom.width / T::from_count(points.len() + 1);

    let weights = exp_weights(u0, b);
    let mut acc = T::zero();
    for i in 0..nx {
        let mut local = T::zero();
        for j in 0..grid.ny() {
            let lam = lambda[j];
            let (v, vx, vxx, vxxx) = (g[[j, i]], gx[[j, i]], gxx[[j, i]], gxxx[[j, i]]);
            let lap_x = vxxx - lam * vx;
            local += v * v + vx * vx + lam * v * v + vxx * vxx + lam * vx * vx + lap_x * lap_x;
        }
        let mut quartic = T::zero();
        for n in 0..points.len() {
            let p = u_vals[[n, i]] * ux_vals[[n, i]];
            quartic += p * p;
        }
        local += quartic * dy_fine;
        acc += weights[i] * local;
    }
    let j0 = u0.l2_sq() + acc * geom.dx();
    if !j0.is_finite() {
        return Err(ZkbError::Numeric("non-finite J0".into()));
    }
    Ok(j0)
}

/// Outcome flag of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Clean,
    /// Tail mass exceeded [`CONTAMINATION_LIMIT`], first at `first_time`.
    Contaminated { first_time: f64 },
    /// Non-finite values or runaway growth at `time`.
    BlowUp { time: f64, last_l2: f64 },
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Clean => "clean",
            RunStatus::Contaminated { .. } => "contaminated",
            RunStatus::BlowUp { .. } => "blow-up",
        }
    }

    pub fn is_clean(&self) -> bool {
        matches!(self, RunStatus::Clean)
    }
}

/// Diagnostics of one run.
#[derive(Debug, Clone)]
pub struct TimeSeries<T: Real> {
    pub geometry: StripGeometry<T>,
    pub config: SolverConfig<T>,
    /// Free-form description of the initial data.
    pub label: String,
    pub samples: Vec<NormSample<T>>,
    pub snapshots: Vec<(T, Field<T>)>,
    pub status: RunStatus,
    pub warnings: Vec<String>,
    /// `2∫₀ᵗ (ν, u²)` removed by the absorbing layer up to the last sample,
    /// accumulated like `diss_cum`. Not part of the energy residual.
    pub absorbed: T,
}

impl<T: Real> TimeSeries<T> {
    pub fn column(&self, kind: NormKind) -> Vec<T> {
        self.samples.iter().map(|s| s.get(kind)).collect()
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

/// Largest relative defect `|‖u‖²(t) + 2∫₀ᵗ‖u_x‖² − ‖u₀‖²| / ‖u₀‖²` of
/// the energy balance. Zero for the zero run.
pub fn energy_residual<T: Real>(series: &TimeSeries<T>) -> Result<T> {
    let first = series.samples.first().ok_or(ZkbError::EmptySeries)?;
    if let RunStatus::BlowUp { time, .. } = series.status {
        return Err(ZkbError::Domain(format!(
            "energy residual undefined for a run that blew up at t = {time}"
        )));
    }
    let l2_0 = first.l2;
    if l2_0 == T::zero() {
        let any = series
            .samples
            .iter()
            .any(|s| s.l2 != T::zero() || s.diss_cum != T::zero());
        return Ok(if any { T::infinity() } else { T::zero() });
    }
    Ok(series
        .samples
        .iter()
        .map(|s| ((s.l2 + s.diss_cum - l2_0) / l2_0).abs())
        .fold(T::zero(), T::max))
}

/// Least-squares fit of `−log(norm)` against `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub t0: T,
    pub t1: T,
    pub norm: NormKind,
    /// Fitted slope of `−log(norm)`.
    pub rate: T,
    pub intercept: T,
    /// RMS residual of the linear fit in `log` space.
    pub residual: T,
    pub samples: usize,
}

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Fits a decay rate over the samples with `t0 ≤ t ≤ t1`.
pub fn fit_samples<T: Real>(
    samples: &[NormSample<T>],
    norm: NormKind,
    t0: T,
    t1: T,
) -> Result<DecayFit<T>> {
    let (t, v): (Vec<T>, Vec<T>) = samples
        .iter()
        .filter(|s| s.t >= t0 && s.t <= t1)
        .map(|s| (s.t, s.get(norm)))
        .unzip();
    fit_points(&t, &v, norm, t0, t1)
}

/// Fits `−log v` against `t` for raw points inside `[t0, t1]`.
pub fn fit_points<T: Real>(
    times: &[T],
    values: &[T],
    norm: NormKind,
    t0: T,
    t1: T,
) -> Result<DecayFit<T>> {
    if !(t0 < t1) {
        return Err(ZkbError::Fit(format!("empty window: t0 = {t0} >= t1 = {t1}")));
    }
    let (t, y): (Vec<T>, Vec<T>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, v)| (*t, *v))
        .unzip();
    if t.len() < MIN_FIT_SAMPLES {
        return Err(ZkbError::Fit(format!(
            "{} samples in [{t0}, {t1}], need at least {MIN_FIT_SAMPLES}",
            t.len()
        )));
    }
    if let Some(bad) = y.iter().find(|v| !(**v > T::zero()) || !v.is_finite()) {
        return Err(ZkbError::Fit(format!(
            "nonpositive or non-finite {norm} value {bad} in window"
        )));
    }
    let y: Vec<T> = y.iter().map(|v| -v.ln()).collect();
    let n = T::from_count(t.len());
    let t_mean = t.iter().copied().sum::<T>() / n;
    let y_mean = y.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (ti, yi) in t.iter().zip(&y) {
        sxx += (*ti - t_mean) * (*ti - t_mean);
        sxy += (*ti - t_mean) * (*yi - y_mean);
    }
    let rate = sxy / sxx;
    let intercept = y_mean - rate * t_mean;
    let ss: T = t
        .iter()
        .zip(&y)
        .map(|(ti, yi)| {
            let r = *yi - (intercept + rate * *ti);
            r * r
        })
        .sum();
    Ok(DecayFit {
        t0,
        t1,
        norm,
        rate,
        intercept,
        residual: (ss / n).sqrt(),
        samples: t.len(),
    })
}

/// Fits over `[t0, t1]` of a run.
pub fn fit_decay_rate<T: Real>(
    series: &TimeSeries<T>,
    norm: NormKind,
    t0: T,
    t1: T,
) -> Result<DecayFit<T>> {
    fit_samples(&series.samples, norm, t0, t1)
}

/// Default window: the last half of the sampled time range.
pub fn last_half_window<T: Real>(samples: &[NormSample<T>]) -> Result<(T, T)> {
    let first = samples.first().ok_or(ZkbError::EmptySeries)?.t;
    let last = samples.last().ok_or(ZkbError::EmptySeries)?.t;
    Ok((first + (last - first) * T::lit(0.5), last))
}
