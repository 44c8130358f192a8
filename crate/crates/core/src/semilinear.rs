//! Picard fixed-point solvers for the semilinear second-, third- and
//! fourth-order problems.
//!
//! Every map works on whole trajectories. Nonlinear terms are evaluated
//! pointwise on the real part of `u` in physical space and dealiased before
//! they re-enter the Fourier side.

use crate::linear::{cumulative_integral, uniform_step, Propagators};
use crate::spectral::{uniform_times, Field, Space, SpectralTrajectory};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

type PointFn = dyn Fn(f64, &[f64], f64) -> f64 + Send + Sync;

#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearityKind {
    /// `f(u) = Σ c_k u^k`.
    Polynomial(Vec<f64>),
    /// Cubic Hermite interpolation through `(u_i, f_i)`, linear outside.
    Tabulated { u: Vec<f64>, f: Vec<f64> },
    /// Arbitrary pointwise closure in `(t, x, u)`.
    Custom,
}

#[derive(Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    growth: f64,
    eval: Arc<PointFn>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("kind", &self.kind)
            .field("growth", &self.growth)
            .finish()
    }
}

impl Nonlinearity {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let growth = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0) as f64;
        let c = coeffs.clone();
        Self {
            kind: NonlinearityKind::Polynomial(coeffs),
            growth,
            eval: Arc::new(move |_, _, u| c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck)),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn zero() -> Self {
        Self::polynomial(vec![])
    }

    pub fn tabulated(u: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if u.len() != f.len() || u.len() < 2 {
            return Err(Error::Parameter("tabulated nonlinearity needs ≥ 2 matching (u, f) pairs".into()));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("tabulated u nodes must be strictly increasing".into()));
        }
        let (uu, ff) = (u.clone(), f.clone());
        let n = u.len();
        let slope = move |i: usize| -> f64 {
            if i == 0 {
                (ff[1] - ff[0]) / (uu[1] - uu[0])
            } else if i == n - 1 {
                (ff[n - 1] - ff[n - 2]) / (uu[n - 1] - uu[n - 2])
            } else {
                (ff[i + 1] - ff[i - 1]) / (uu[i + 1] - uu[i - 1])
            }
        };
        let slopes: Vec<f64> = (0..n).map(slope).collect();
        let (uu, ff) = (u.clone(), f.clone());
        let eval = move |_: f64, _: &[f64], x: f64| -> f64 {
            if x <= uu[0] {
                return ff[0] + slopes[0] * (x - uu[0]);
            }
            if x >= uu[n - 1] {
                return ff[n - 1] + slopes[n - 1] * (x - uu[n - 1]);
            }
            let i = uu.partition_point(|&v| v <= x) - 1;
            let h = uu[i + 1] - uu[i];
            let s = (x - uu[i]) / h;
            let (h00, h10) = (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s);
            let (h01, h11) = (-2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
            h00 * ff[i] + h10 * h * slopes[i] + h01 * ff[i + 1] + h11 * h * slopes[i + 1]
        };
        Ok(Self {
            kind: NonlinearityKind::Tabulated { u, f },
            growth: 1.0,
            eval: Arc::new(eval),
        })
    }

    pub fn from_fn<F>(growth: f64, f: F) -> Self
    where
        F: Fn(f64, &[f64], f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: NonlinearityKind::Custom,
            growth,
            eval: Arc::new(f),
        }
    }

    /// Parse `poly:c0,c1,...`, `const:c` or `table:u0,u1,...;f0,f1,...`.
    pub fn parse(src: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parameter(format!("nonlinearity `{src}`: {msg}"));
        let nums = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number list")))
                .collect()
        };
        let (kind, body) = src.trim().split_once(':').ok_or_else(|| bad("expected `kind:values`"))?;
        match kind.trim() {
            "poly" => Ok(Self::polynomial(nums(body)?)),
            "const" => {
                let v = nums(body)?;
                if v.len() != 1 {
                    return Err(bad("const takes one value"));
                }
                Ok(Self::constant(v[0]))
            }
            "table" => {
                let (u, f) = body.split_once(';').ok_or_else(|| bad("table needs `u-list;f-list`"))?;
                Self::tabulated(nums(u)?, nums(f)?)
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn evaluate(&self, t: f64, x: &[f64], u: f64) -> f64 {
        (self.eval)(t, x, u)
    }

    /// `f(t, ·, u(t, ·))` for every snapshot, dealiased, in spectral space.
    pub fn apply(&self, traj: &SpectralTrajectory) -> Result<Vec<Field>> {
        traj.times()
            .par_iter()
            .zip(traj.snapshots().par_iter())
            .map(|(&t, snap)| self.apply_snapshot(t, snap))
            .collect()
    }

    pub fn apply_snapshot(&self, t: f64, u: &Field) -> Result<Field> {
        let phys = u.to_physical();
        let fu = phys.map_with_position(|x, v| Complex64::new(self.evaluate(t, x, v.re), 0.0))?;
        fu.dft_forward()?.dealias()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    pub t_end: f64,
    pub n_t: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub s_mon: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            t_end: 0.5,
            n_t: 129,
            max_iters: 50,
            tol: 1e-10,
            s_mon: 0.0,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Parameter(format!("horizon T must be positive, got {}", self.t_end)));
        }
        if self.n_t < 9 || self.n_t.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "n_t must be odd and at least 9, got {}",
                self.n_t
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Parameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        uniform_times(self.t_end, self.n_t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    pub iterate_distances: Vec<f64>,
    pub contraction_ratio: f64,
    pub converged: bool,
    pub wall_times: Vec<f64>,
}

impl PicardReport {
    fn from_distances(iterate_distances: Vec<f64>, wall_times: Vec<f64>, tol: f64) -> Self {
        let ratios = |from: usize| -> Vec<f64> {
            (from.max(1)..iterate_distances.len())
                .filter(|&k| iterate_distances[k - 1] > 0.0)
                .map(|k| iterate_distances[k] / iterate_distances[k - 1])
                .collect()
        };
        let mut r = ratios(2);
        if r.is_empty() {
            r = ratios(1);
        }
        let contraction_ratio = r.into_iter().fold(0.0, f64::max);
        let converged = iterate_distances.last().is_some_and(|&d| d <= tol);
        Self {
            iterate_distances,
            contraction_ratio,
            converged,
            wall_times,
        }
    }

    /// Rows `iteration,distance,ratio,wall_time`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,distance,ratio,wall_time\n");
        for (k, d) in self.iterate_distances.iter().enumerate() {
            let ratio = if k > 0 && self.iterate_distances[k - 1] > 0.0 {
                format!("{}", d / self.iterate_distances[k - 1])
            } else {
                String::new()
            };
            out.push_str(&format!("{},{},{},{}\n", k + 1, d, ratio, self.wall_times[k]));
        }
        out
    }
}

/// A self-map on trajectories whose fixed point solves one of the problems.
pub trait PicardMap: Sync {
    fn apply(&self, w: &SpectralTrajectory) -> Result<SpectralTrajectory>;
    fn initial(&self) -> Result<SpectralTrajectory>;
}

/// Iterate `w ↦ map(w)` from `map.initial()` until the sup-in-time
/// `H^{s_mon}` step is at most `tol`.
pub fn picard_iterate(
    map: &dyn PicardMap,
    cfg: &PicardConfig,
) -> Result<(SpectralTrajectory, PicardReport)> {
    let mut w = map.initial()?;
    let mut distances = Vec::new();
    let mut walls = Vec::new();
    let start = Instant::now();
    for _ in 0..cfg.max_iters {
        let next = map.apply(&w)?;
        let d = next.sup_distance(&w, cfg.s_mon)?;
        distances.push(d);
        walls.push(start.elapsed().as_secs_f64());
        w = next;
        if d <= cfg.tol {
            break;
        }
    }
    Ok((w, PicardReport::from_distances(distances, walls, cfg.tol)))
}

/// `⦀F(w_a) − F(w_b)⦀ / ⦀w_a − w_b⦀` in the sup-in-time `H^s` norm.
pub fn measure_contraction(
    map: &dyn PicardMap,
    w_a: &SpectralTrajectory,
    w_b: &SpectralTrajectory,
    s: f64,
) -> Result<f64> {
    let denom = w_a.sup_distance(w_b, s)?;
    if denom == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let num = map.apply(w_a)?.sup_distance(&map.apply(w_b)?, s)?;
    Ok(num / denom)
}

fn check_data(fields: &[&Field]) -> Result<()> {
    let g = fields[0].grid();
    if fields.iter().any(|f| f.grid() != g) {
        return Err(Error::GridMismatch("data fields live on different grids".into()));
    }
    Ok(())
}

/// `w ↦ Duhamel(m, f(u_hom + w))`.
pub struct SecondOrderMap {
    props: Propagators,
    f: Nonlinearity,
    u_hom: SpectralTrajectory,
}

impl SecondOrderMap {
    pub fn new(m: u32, f: Nonlinearity, phi0: &Field, phi1: &Field, cfg: &PicardConfig) -> Result<Self> {
        cfg.validate()?;
        check_data(&[phi0, phi1])?;
        let props = Propagators::new(m, phi0.grid(), &cfg.times())?;
        let u_hom = props.homogeneous(phi0, phi1)?;
        Ok(Self { props, f, u_hom })
    }

    pub fn solution(&self, w: &SpectralTrajectory) -> Result<SpectralTrajectory> {
        self.u_hom.add(w)
    }
}

impl PicardMap for SecondOrderMap {
    fn apply(&self, w: &SpectralTrajectory) -> Result<SpectralTrajectory> {
        let u = self.u_hom.add(w)?;
        self.props.duhamel_samples(&self.f.apply(&u)?)
    }

    fn initial(&self) -> Result<SpectralTrajectory> {
        SpectralTrajectory::zeros(self.props.grid(), self.props.times())
    }
}

pub fn solve_second_order(
    m: u32,
    f: &Nonlinearity,
    phi0: &Field,
    phi1: &Field,
    cfg: &PicardConfig,
) -> Result<(SpectralTrajectory, PicardReport)> {
    let map = SecondOrderMap::new(m, f.clone(), phi0, phi1, cfg)?;
    let (w, report) = picard_iterate(&map, cfg)?;
    Ok((map.solution(&w)?, report))
}

/// Running time integral of each mode.
fn cumulative_fields(samples: &[Field], h: f64) -> Result<Vec<Field>> {
    let grid = samples[0].grid().clone();
    let nt = samples.len();
    let cols: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let col: Vec<Complex64> = samples.iter().map(|s| s.values()[k]).collect();
            cumulative_integral(&col, h)
        })
        .collect::<Result<Vec<_>>>()?;
    (0..nt)
        .map(|i| Field::new(grid.clone(), cols.iter().map(|c| c[i]).collect(), Space::Spectral))
        .collect()
}

fn apply_e_with(props: &Propagators, g: &[Field]) -> Result<SpectralTrajectory> {
    let h = uniform_step(props.times())?;
    let spectral: Vec<Field> = g.iter().map(|f| f.to_spectral()).collect();
    props.duhamel_samples(&cumulative_fields(&spectral, h)?)
}

/// `E(g) = Duhamel(m, ∫₀^τ g)`.
pub fn apply_e(m: u32, g: &[Field], times: &[f64]) -> Result<SpectralTrajectory> {
    uniform_step(times)?;
    if g.len() != times.len() || g.is_empty() {
        return Err(Error::Parameter(format!("{} samples for {} times", g.len(), times.len())));
    }
    apply_e_with(&Propagators::new(m, g[0].grid(), times)?, g)
}

/// `w ↦ E(f(u1 + u2 + w) − f(·, 0))`.
pub struct ThirdOrderMap {
    props: Propagators,
    f: Nonlinearity,
    f_zero: Vec<Field>,
    base: SpectralTrajectory,
}

impl ThirdOrderMap {
    pub fn new(
        m: u32,
        f: Nonlinearity,
        phi0: &Field,
        phi1: &Field,
        phi2: &Field,
        cfg: &PicardConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        check_data(&[phi0, phi1, phi2])?;
        let times = cfg.times();
        let h = uniform_step(&times)?;
        let grid = phi0.grid();
        let props = Propagators::new(m, grid, &times)?;
        let u1 = props.homogeneous(phi0, phi1)?;
        let zero = SpectralTrajectory::zeros(grid, &times)?;
        let f_zero = f.apply(&zero)?;
        let integrated = cumulative_fields(&f_zero, h)?;
        let phi2_hat = phi2.to_spectral();
        let forcing = integrated
            .iter()
            .map(|g| g.add(&phi2_hat))
            .collect::<Result<Vec<_>>>()?;
        let u2 = props.duhamel_samples(&forcing)?;
        Ok(Self {
            props,
            f,
            f_zero,
            base: u1.add(&u2)?,
        })
    }

    pub fn solution(&self, w: &SpectralTrajectory) -> Result<SpectralTrajectory> {
        self.base.add(w)
    }
}

impl PicardMap for ThirdOrderMap {
    fn apply(&self, w: &SpectralTrajectory) -> Result<SpectralTrajectory> {
        let u = self.base.add(w)?;
        let g = self
            .f
            .apply(&u)?
            .iter()
            .zip(&self.f_zero)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        apply_e_with(&self.props, &g)
    }

    fn initial(&self) -> Result<SpectralTrajectory> {
        SpectralTrajectory::zeros(self.props.grid(), self.props.times())
    }
}

pub fn solve_third_order(
    m: u32,
    f: &Nonlinearity,
    phi0: &Field,
    phi1: &Field,
    phi2: &Field,
    cfg: &PicardConfig,
) -> Result<(SpectralTrajectory, PicardReport)> {
    let map = ThirdOrderMap::new(m, f.clone(), phi0, phi1, phi2, cfg)?;
    let (w, report) = picard_iterate(&map, cfg)?;
    Ok((map.solution(&w)?, report))
}

/// `u ↦ u_hom + Duhamel(m2, v1 + Duhamel(m1, f(u)))`, where `v1` solves
/// `Q_{m1} v = 0` with the data that `Q_{m2}u` inherits at `t = 0`.
pub struct FourthOrderMap {
    outer: Propagators,
    inner: Propagators,
    f: Nonlinearity,
    u_hom: SpectralTrajectory,
    v1: SpectralTrajectory,
}

impl FourthOrderMap {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m1: u32,
        m2: u32,
        f: Nonlinearity,
        psi: [&Field; 4],
        cfg: &PicardConfig,
    ) -> Result<Self> {
        if m1 == m2 {
            return Err(Error::Parameter(format!("need m1 ≠ m2, got m1 = m2 = {m1}")));
        }
        cfg.validate()?;
        check_data(&psi)?;
        let times = cfg.times();
        let grid = psi[0].grid();
        let outer = Propagators::new(m2, grid, &times)?;
        let inner = Propagators::new(m1, grid, &times)?;
        let u_hom = outer.homogeneous(psi[0], psi[1])?;
        // ∂t(∂t²u − t^{m2}Δu) at t = 0 picks up −Δψ0 exactly when m2 = 1
        let mut psi3 = psi[3].to_spectral();
        if m2 == 1 {
            psi3 = psi3.sub(&psi[0].to_spectral().laplacian()?)?;
        }
        let v1 = inner.homogeneous(psi[2], &psi3)?;
        Ok(Self {
            outer,
            inner,
            f,
            u_hom,
            v1,
        })
    }

    /// `Q_{m2} u` for the current iterate, i.e. `v1 + Duhamel(m1, f(u))`.
    pub fn inner_field(&self, u: &SpectralTrajectory) -> Result<SpectralTrajectory> {
        self.v1.add(&self.inner.duhamel_samples(&self.f.apply(u)?)?)
    }
}

impl PicardMap for FourthOrderMap {
    fn apply(&self, u: &SpectralTrajectory) -> Result<SpectralTrajectory> {
        let v = self.inner_field(u)?;
        self.u_hom.add(&self.outer.duhamel_samples(v.snapshots())?)
    }

    fn initial(&self) -> Result<SpectralTrajectory> {
        self.u_hom.add(&self.outer.duhamel_samples(self.v1.snapshots())?)
    }
}

pub fn solve_fourth_order(
    m1: u32,
    m2: u32,
    f: &Nonlinearity,
    psi: [&Field; 4],
    cfg: &PicardConfig,
) -> Result<(SpectralTrajectory, PicardReport)> {
    let map = FourthOrderMap::new(m1, m2, f.clone(), psi, cfg)?;
    picard_iterate(&map, cfg)
}

/// Fourth-order finite-difference `∂t` of a uniformly sampled sequence,
/// central in the interior and one-sided at the two ends on each side.
pub fn finite_difference_dt(samples: &[Field], h: f64) -> Result<Vec<Field>> {
    let n = samples.len();
    if n < 5 {
        return Err(Error::Quadrature(format!("need at least 5 samples, got {n}")));
    }
    let stencil = |i: usize| -> (usize, [f64; 5]) {
        match i {
            0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
            1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
            _ if i == n - 2 => (n - 5, [-1.0, 6.0, -18.0, 10.0, 3.0]),
            _ if i == n - 1 => (n - 5, [3.0, -16.0, 36.0, -48.0, 25.0]),
            _ => (i - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
        }
    };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let (start, w) = stencil(i);
            let grid = samples[start].grid();
            let values = (0..grid.len())
                .map(|k| {
                    (0..5)
                        .map(|a| samples[start + a].values()[k] * w[a])
                        .sum::<Complex64>()
                        / (12.0 * h)
                })
                .collect();
            Field::new(grid.clone(), values, samples[start].space())
        })
        .collect()
}

/// `‖Q_{m1}Q_{m2}u − f(u)‖ / max_t‖f(u)‖` in L², with time derivatives by
/// finite differences of the stored `∂t u`, over interior times.
pub fn fourth_order_residual(
    m1: u32,
    m2: u32,
    f: &Nonlinearity,
    traj: &SpectralTrajectory,
) -> Result<Vec<(f64, f64)>> {
    let times = traj.times();
    let h = uniform_step(times)?;
    if times.len() < 11 {
        return Err(Error::Quadrature("need at least 11 time points".into()));
    }
    let grid = traj.grid();
    let rho2: Vec<f64> = grid.frequency_magnitudes().iter().map(|r| r * r).collect();
    let apply_q = |m: u32, u: &[Field], d2u: &[Field]| -> Result<Vec<Field>> {
        u.iter()
            .zip(d2u)
            .zip(times)
            .map(|((u, d2), &t)| {
                let w = t.powi(m as i32);
                let values = u
                    .values()
                    .iter()
                    .zip(d2.values())
                    .zip(&rho2)
                    .map(|((u, d2), r2)| d2 + u * (w * r2))
                    .collect();
                Field::new(grid.clone(), values, Space::Spectral)
            })
            .collect()
    };
    let d2u = finite_difference_dt(traj.dt_snapshots(), h)?;
    let v = apply_q(m2, traj.snapshots(), &d2u)?;
    let dv = finite_difference_dt(&v, h)?;
    let d2v = finite_difference_dt(&dv, h)?;
    let lhs = apply_q(m1, &v, &d2v)?;
    let fu = f.apply(traj)?;
    let scale = fu.iter().map(|g| g.l2_norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let n = times.len();
    (4..n - 4)
        .map(|i| Ok((times[i], lhs[i].sub(&fu[i])?.l2_norm() / scale)))
        .collect()
}
