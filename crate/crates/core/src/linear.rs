//! Linear Cauchy problem `∂t²u − t^m Δu = F`, `u(0) = φ1`, `∂t u(0) = φ2`,
//! solved mode by mode with the propagator pair, plus an RK4 reference.

use crate::propagator::{PropagatorSample, PropagatorTable};
use crate::spectral::{validate_times, Field, Grid, Space, SpectralTrajectory};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Right-hand side `F(t, ·)` delivered as a spectral field.
pub trait Forcing: Sync {
    fn grid(&self) -> &Grid;
    fn at(&self, t: f64) -> Result<Field>;

    /// Samples on a time grid. Sampled forcings return their nodes verbatim.
    fn sample(&self, times: &[f64]) -> Result<Vec<Field>> {
        times.iter().map(|&t| self.at(t)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ZeroForcing {
    grid: Grid,
}

impl ZeroForcing {
    pub fn new(grid: &Grid) -> Self {
        Self { grid: grid.clone() }
    }
}

impl Forcing for ZeroForcing {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn at(&self, _t: f64) -> Result<Field> {
        Ok(Field::zeros(&self.grid, Space::Spectral))
    }
}

/// Forcing known on a time grid; off-node values use cubic Lagrange
/// interpolation through the four nearest nodes.
#[derive(Debug, Clone)]
pub struct SampledForcing {
    grid: Grid,
    times: Vec<f64>,
    fields: Vec<Field>,
}

impl SampledForcing {
    pub fn new(times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        if times.len() != fields.len() || times.is_empty() {
            return Err(Error::Parameter(format!(
                "{} forcing times for {} fields",
                times.len(),
                fields.len()
            )));
        }
        validate_times(&times)?;
        let grid = fields[0].grid().clone();
        let fields = fields
            .into_iter()
            .map(|f| {
                if f.grid() != &grid {
                    Err(Error::GridMismatch("forcing samples on different grids".into()))
                } else {
                    Ok(f.to_spectral())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            times,
            fields,
        })
    }

    /// Reuse the `u` snapshots of a trajectory as forcing samples.
    pub fn from_trajectory(traj: &SpectralTrajectory) -> Self {
        Self {
            grid: traj.grid().clone(),
            times: traj.times().to_vec(),
            fields: traj.snapshots().to_vec(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }
}

impl Forcing for SampledForcing {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn at(&self, t: f64) -> Result<Field> {
        let n = self.times.len();
        let last = self.times[n - 1];
        if t < 0.0 || t > last * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("forcing sampled on [0, {last}], asked for t={t}")));
        }
        if let Ok(i) = self.times.binary_search_by(|s| s.partial_cmp(&t).unwrap()) {
            return Ok(self.fields[i].clone());
        }
        if n < 4 {
            // linear fallback on very short grids
            let i = self.times.partition_point(|&s| s < t).clamp(1, n - 1);
            let (t0, t1) = (self.times[i - 1], self.times[i]);
            let w = (t - t0) / (t1 - t0);
            return self.fields[i - 1].combine(
                Complex64::new(1.0 - w, 0.0),
                &self.fields[i],
                Complex64::new(w, 0.0),
            );
        }
        let j = self.times.partition_point(|&s| s < t);
        let start = j.saturating_sub(2).min(n - 4);
        let nodes = &self.times[start..start + 4];
        let weights: Vec<f64> = (0..4)
            .map(|a| {
                (0..4)
                    .filter(|&b| b != a)
                    .map(|b| (t - nodes[b]) / (nodes[a] - nodes[b]))
                    .product()
            })
            .collect();
        let fields = &self.fields[start..start + 4];
        let values = (0..self.grid.len())
            .into_par_iter()
            .map(|k| (0..4).map(|a| fields[a].values()[k] * weights[a]).sum())
            .collect();
        Field::new(self.grid.clone(), values, Space::Spectral)
    }

    fn sample(&self, times: &[f64]) -> Result<Vec<Field>> {
        if times == self.times.as_slice() {
            return Ok(self.fields.clone());
        }
        times.iter().map(|&t| self.at(t)).collect()
    }
}

/// Forcing given as a closure of time; physical outputs are transformed.
pub struct FnForcing<F> {
    grid: Grid,
    f: F,
}

impl<F> FnForcing<F>
where
    F: Fn(f64) -> Field + Sync,
{
    pub fn new(grid: &Grid, f: F) -> Self {
        Self {
            grid: grid.clone(),
            f,
        }
    }
}

impl<F> Forcing for FnForcing<F>
where
    F: Fn(f64) -> Field + Sync,
{
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn at(&self, t: f64) -> Result<Field> {
        let f = (self.f)(t);
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("forcing closure returned a field on another grid".into()));
        }
        Ok(f.to_spectral())
    }
}

/// Step of a uniform time grid, or a quadrature error.
pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::Quadrature(format!(
            "need at least 3 time points, got {}",
            times.len()
        )));
    }
    let h = times[1] - times[0];
    let tol = 1e-9 * times[times.len() - 1].abs().max(1.0);
    for (i, &t) in times.iter().enumerate() {
        if (t - i as f64 * h).abs() > tol {
            return Err(Error::Quadrature("time grid is not uniform".into()));
        }
    }
    Ok(h)
}

/// Fourth-order running integral `∫₀^{t_i} f` on a uniform grid.
///
/// Even indices use composite Simpson, odd indices ≥ 3 finish with a
/// three-eighths panel, index 1 uses a four-point one-interval rule.
pub fn cumulative_integral(f: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let n = f.len();
    if n < 3 {
        return Err(Error::Quadrature(format!("need at least 3 samples, got {n}")));
    }
    let mut out = vec![ZERO; n];
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2] + (f[i - 2] + f[i - 1] * 4.0 + f[i]) * (h / 3.0);
    }
    out[1] = if n >= 4 {
        (f[0] * 9.0 + f[1] * 19.0 - f[2] * 5.0 + f[3]) * (h / 24.0)
    } else {
        (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0)
    };
    for i in (3..n).step_by(2) {
        out[i] = out[i - 3] + (f[i - 3] + f[i - 2] * 3.0 + f[i - 1] * 3.0 + f[i]) * (3.0 * h / 8.0);
    }
    Ok(out)
}

/// Propagator samples for every mode of a grid on a fixed time grid.
///
/// Modes sharing `|k|²` share one table row, so the cache holds one entry
/// per distinct frequency magnitude.
/// Per-mode values of `u` and `∂tu` over the time grid.
type Column = (Vec<Complex64>, Vec<Complex64>);

#[derive(Debug, Clone)]
pub struct Propagators {
    m: u32,
    grid: Grid,
    mode_row: Vec<usize>,
    table: PropagatorTable,
}

impl Propagators {
    pub fn new(m: u32, grid: &Grid, times: &[f64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("degeneracy order m must be at least 1".into()));
        }
        validate_times(times)?;
        let mut keys = BTreeMap::new();
        let mode_keys: Vec<u64> = (0..grid.len())
            .map(|f| {
                let idx = grid.unravel(f);
                (0..grid.dim())
                    .map(|a| grid.wavenumber(a, idx[a]).pow(2) as u64)
                    .sum()
            })
            .collect();
        for &k in &mode_keys {
            let next = keys.len();
            keys.entry(k).or_insert(next);
        }
        let mut rhos = vec![0.0; keys.len()];
        for (&k, &row) in &keys {
            rhos[row] = grid.frequency_step() * (k as f64).sqrt();
        }
        let table = PropagatorTable::new(m, times, &rhos)?;
        Ok(Self {
            m,
            grid: grid.clone(),
            mode_row: mode_keys.iter().map(|k| keys[k]).collect(),
            table,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.table.times()
    }

    pub fn mode(&self, flat: usize) -> &[PropagatorSample] {
        self.table.row(self.mode_row[flat])
    }

    fn spectral(&self, f: &Field) -> Result<Field> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("data field lives on a different grid".into()));
        }
        Ok(f.to_spectral())
    }

    /// `û(t) = V1 φ̂1 + V2 φ̂2` per mode.
    pub fn homogeneous(&self, phi1: &Field, phi2: &Field) -> Result<SpectralTrajectory> {
        let p1 = self.spectral(phi1)?;
        let p2 = self.spectral(phi2)?;
        let (a, b) = (p1.values(), p2.values());
        let nt = self.times().len();
        let build = |deriv: bool| -> Result<Vec<Field>> {
            (0..nt)
                .into_par_iter()
                .map(|i| {
                    let values = (0..self.grid.len())
                        .map(|k| {
                            let s = &self.mode(k)[i];
                            if deriv {
                                s.dt_v1 * a[k] + s.dt_v2 * b[k]
                            } else {
                                s.v1 * a[k] + s.v2 * b[k]
                            }
                        })
                        .collect();
                    Field::new(self.grid.clone(), values, Space::Spectral)
                })
                .collect()
        };
        let mut snaps = build(false)?;
        let mut dts = build(true)?;
        // exact data at t = 0
        snaps[0] = p1;
        dts[0] = p2;
        SpectralTrajectory::new(self.grid.clone(), self.times().to_vec(), snaps, dts)
    }

    /// Duhamel integral of forcing samples given on this time grid.
    pub fn duhamel_samples(&self, forcing: &[Field]) -> Result<SpectralTrajectory> {
        let times = self.times();
        let h = uniform_step(times)?;
        if forcing.len() != times.len() {
            return Err(Error::Parameter(format!(
                "{} forcing samples for {} times",
                forcing.len(),
                times.len()
            )));
        }
        let forcing = forcing
            .iter()
            .map(|f| self.spectral(f))
            .collect::<Result<Vec<_>>>()?;
        let nt = times.len();
        let columns: Vec<Column> = (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                let row = self.mode(k);
                let f: Vec<Complex64> = forcing.iter().map(|s| s.values()[k]).collect();
                if f.iter().all(|v| *v == ZERO) {
                    return (vec![ZERO; nt], vec![ZERO; nt]);
                }
                let g1: Vec<Complex64> = f.iter().zip(row).map(|(f, s)| s.v1 * f).collect();
                let g2: Vec<Complex64> = f.iter().zip(row).map(|(f, s)| s.v2 * f).collect();
                let a = cumulative_integral(&g1, h).expect("length checked");
                let b = cumulative_integral(&g2, h).expect("length checked");
                let u = (0..nt).map(|i| row[i].v2 * a[i] - row[i].v1 * b[i]).collect();
                let du = (0..nt).map(|i| row[i].dt_v2 * a[i] - row[i].dt_v1 * b[i]).collect();
                (u, du)
            })
            .collect();
        let gather = |pick: fn(&Column) -> &Vec<Complex64>| -> Result<Vec<Field>> {
            (0..nt)
                .into_par_iter()
                .map(|i| {
                    let values = columns.iter().map(|c| pick(c)[i]).collect();
                    Field::new(self.grid.clone(), values, Space::Spectral)
                })
                .collect()
        };
        let snaps = gather(|c| &c.0)?;
        let dts = gather(|c| &c.1)?;
        SpectralTrajectory::new(self.grid.clone(), times.to_vec(), snaps, dts)
    }

    pub fn duhamel(&self, forcing: &dyn Forcing) -> Result<SpectralTrajectory> {
        if forcing.grid() != &self.grid {
            return Err(Error::GridMismatch("forcing lives on a different grid".into()));
        }
        let samples = forcing.sample(self.times())?;
        self.duhamel_samples(&samples)
    }
}

pub fn solve_homogeneous(
    m: u32,
    phi1: &Field,
    phi2: &Field,
    times: &[f64],
) -> Result<SpectralTrajectory> {
    if phi1.grid() != phi2.grid() {
        return Err(Error::GridMismatch("φ1 and φ2 live on different grids".into()));
    }
    Propagators::new(m, phi1.grid(), times)?.homogeneous(phi1, phi2)
}

pub fn duhamel(m: u32, forcing: &dyn Forcing, times: &[f64]) -> Result<SpectralTrajectory> {
    uniform_step(times)?;
    Propagators::new(m, forcing.grid(), times)?.duhamel(forcing)
}

pub fn solve_inhomogeneous(
    m: u32,
    phi1: &Field,
    phi2: &Field,
    forcing: &dyn Forcing,
    times: &[f64],
) -> Result<SpectralTrajectory> {
    if phi1.grid() != phi2.grid() || phi1.grid() != forcing.grid() {
        return Err(Error::GridMismatch("data and forcing live on different grids".into()));
    }
    uniform_step(times)?;
    let props = Propagators::new(m, phi1.grid(), times)?;
    props.homogeneous(phi1, phi2)?.add(&props.duhamel(forcing)?)
}

/// Substeps per output interval so that `h·max|ξ|·T^{m/2} ≤ 0.01`.
fn default_substeps(m: u32, grid: &Grid, times: &[f64]) -> usize {
    let h = times[1] - times[0];
    let t_end = times[times.len() - 1];
    let rho_max = grid.frequency_magnitudes().into_iter().fold(0.0, f64::max);
    let omega = rho_max * t_end.powf(f64::from(m) / 2.0);
    ((h * omega / 0.01).ceil() as usize).max(1)
}

/// Classical RK4 per mode on `(û, v̂)' = (v̂, −t^m|ξ|²û + F̂)`.
pub fn rk4_oracle(
    m: u32,
    phi1: &Field,
    phi2: &Field,
    forcing: &dyn Forcing,
    times: &[f64],
) -> Result<SpectralTrajectory> {
    uniform_step(times)?;
    let substeps = default_substeps(m, phi1.grid(), times);
    rk4_oracle_with_substeps(m, phi1, phi2, forcing, times, substeps)
}

pub fn rk4_oracle_with_substeps(
    m: u32,
    phi1: &Field,
    phi2: &Field,
    forcing: &dyn Forcing,
    times: &[f64],
    substeps: usize,
) -> Result<SpectralTrajectory> {
    if m == 0 {
        return Err(Error::Parameter("degeneracy order m must be at least 1".into()));
    }
    let grid = phi1.grid().clone();
    if phi2.grid() != &grid || forcing.grid() != &grid {
        return Err(Error::GridMismatch("data and forcing live on different grids".into()));
    }
    validate_times(times)?;
    let h_out = uniform_step(times)?;
    let h = h_out / substeps.max(1) as f64;
    let rho2: Vec<f64> = grid.frequency_magnitudes().iter().map(|r| r * r).collect();
    let mut u: Vec<Complex64> = phi1.to_spectral().into_values();
    let mut v: Vec<Complex64> = phi2.to_spectral().into_values();
    let mut snaps = vec![Field::new(grid.clone(), u.clone(), Space::Spectral)?];
    let mut dts = vec![Field::new(grid.clone(), v.clone(), Space::Spectral)?];
    let mi = m as i32;
    let rhs = |t: f64, u: &[Complex64], v: &[Complex64], f: &Field| -> (Vec<Complex64>, Vec<Complex64>) {
        let w = t.powi(mi);
        let du = v.to_vec();
        let dv = u
            .par_iter()
            .zip(f.values().par_iter())
            .zip(rho2.par_iter())
            .map(|((u, f), r2)| -u * (w * r2) + f)
            .collect();
        (du, dv)
    };
    let axpy = |x: &[Complex64], a: f64, y: &[Complex64]| -> Vec<Complex64> {
        x.iter().zip(y).map(|(x, y)| x + y * a).collect()
    };
    for step in 0..times.len() - 1 {
        for sub in 0..substeps.max(1) {
            let t = times[step] + sub as f64 * h;
            let f0 = forcing.at(t.min(times[times.len() - 1]))?;
            let fh = forcing.at((t + h / 2.0).min(times[times.len() - 1]))?;
            let f1 = forcing.at((t + h).min(times[times.len() - 1]))?;
            let (k1u, k1v) = rhs(t, &u, &v, &f0);
            let (k2u, k2v) = rhs(t + h / 2.0, &axpy(&u, h / 2.0, &k1u), &axpy(&v, h / 2.0, &k1v), &fh);
            let (k3u, k3v) = rhs(t + h / 2.0, &axpy(&u, h / 2.0, &k2u), &axpy(&v, h / 2.0, &k2v), &fh);
            let (k4u, k4v) = rhs(t + h, &axpy(&u, h, &k3u), &axpy(&v, h, &k3v), &f1);
            for k in 0..u.len() {
                u[k] += (k1u[k] + k2u[k] * 2.0 + k3u[k] * 2.0 + k4u[k]) * (h / 6.0);
                v[k] += (k1v[k] + k2v[k] * 2.0 + k3v[k] * 2.0 + k4v[k]) * (h / 6.0);
            }
        }
        snaps.push(Field::new(grid.clone(), u.clone(), Space::Spectral)?);
        dts.push(Field::new(grid.clone(), v.clone(), Space::Spectral)?);
    }
    SpectralTrajectory::new(grid, times.to_vec(), snaps, dts)
}

/// `‖a(t) − b(t)‖ / ‖b(t)‖` in L² at time index `i`.
pub fn relative_l2_error(a: &SpectralTrajectory, b: &SpectralTrajectory, i: usize) -> Result<f64> {
    let diff = a.snapshot(i).sub(b.snapshot(i))?;
    let denom = b.snapshot(i).l2_norm();
    if denom == 0.0 {
        return Ok(diff.l2_norm());
    }
    Ok(diff.l2_norm() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::uniform_times;

    fn zero_mode_field(grid: &Grid, value: f64) -> Field {
        // physical constant `value`, i.e. spectral mass only at k = 0
        Field::from_real_fn(grid, move |_| value)
    }

    fn zero_mode(f: &Field) -> Complex64 {
        f.values()[0] / (f.grid().len() as f64).sqrt()
    }

    #[test]
    fn cumulative_integral_is_fourth_order() {
        let errs: Vec<f64> = [32usize, 64]
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                let f: Vec<Complex64> = (0..=n).map(|i| Complex64::new((3.0 * i as f64 * h).cos(), 0.0)).collect();
                let c = cumulative_integral(&f, h).unwrap();
                (0..=n)
                    .map(|i| (c[i].re - (3.0 * i as f64 * h).sin() / 3.0).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 3.7, "order {order}");
        let cubic: Vec<Complex64> = (0..9).map(|i| Complex64::new((i as f64 * 0.125).powi(3), 0.0)).collect();
        let c = cumulative_integral(&cubic, 0.125).unwrap();
        for (i, v) in c.iter().enumerate() {
            assert!((v.re - (i as f64 * 0.125).powi(4) / 4.0).abs() < 1e-14);
        }
        assert!(matches!(cumulative_integral(&cubic[..2], 0.1), Err(Error::Quadrature(_))));
    }

    #[test]
    fn zero_mode_homogeneous() {
        let g = Grid::new(&[16], 4.0).unwrap();
        let times = uniform_times(1.0, 9);
        let traj = solve_homogeneous(1, &zero_mode_field(&g, 2.0), &zero_mode_field(&g, 3.0), &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert!((zero_mode(traj.snapshot(i)) - (2.0 + 3.0 * t)).norm() < 1e-12);
            assert!((zero_mode(traj.dt_snapshot(i)) - 3.0).norm() < 1e-12);
        }
    }

    #[test]
    fn duhamel_of_constant_is_half_t_squared() {
        let g = Grid::new(&[8], 1.0).unwrap();
        let times = uniform_times(1.0, 17);
        let one = zero_mode_field(&g, 1.0);
        let forcing = FnForcing::new(&g, move |_| one.clone());
        let traj = duhamel(2, &forcing, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert!((zero_mode(traj.snapshot(i)) - t * t / 2.0).norm() < 1e-14);
            assert!((zero_mode(traj.dt_snapshot(i)) - t).norm() < 1e-14);
        }
        let zero = duhamel(1, &ZeroForcing::new(&g), &times).unwrap();
        assert_eq!(zero.sup_sobolev_norm(0.0), 0.0);
        assert!(matches!(duhamel(1, &ZeroForcing::new(&g), &[0.0, 1.0]), Err(Error::Quadrature(_))));
    }

    fn gaussian(g: &Grid) -> Field {
        Field::from_real_fn(g, |x| (-2.0 * x[0] * x[0]).exp())
    }

    #[test]
    fn homogeneous_matches_rk4() {
        let g = Grid::new(&[64], 6.0).unwrap();
        let times = uniform_times(1.0, 33);
        let phi1 = gaussian(&g);
        let phi2 = phi1.scale(0.5);
        let exact = solve_homogeneous(1, &phi1, &phi2, &times).unwrap();
        let oracle = rk4_oracle(1, &phi1, &phi2, &ZeroForcing::new(&g), &times).unwrap();
        assert!(relative_l2_error(&exact, &oracle, 32).unwrap() < 1e-6);
    }

    #[test]
    fn single_mode_duhamel_matches_rk4() {
        let g = Grid::new(&[16], std::f64::consts::PI).unwrap();
        let times = uniform_times(1.0, 257);
        let mode = Field::from_real_fn(&g, |x| (2.0 * x[0]).cos());
        let forcing = FnForcing::new(&g, move |_| mode.clone());
        let exact = duhamel(1, &forcing, &times).unwrap();
        let z = Field::zeros(&g, Space::Physical);
        let oracle = rk4_oracle(1, &z, &z, &forcing, &times).unwrap();
        assert!(relative_l2_error(&exact, &oracle, 256).unwrap() < 1e-6);
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let g = Grid::new(&[8], 1.0).unwrap();
        let times = uniform_times(1.0, 5);
        let phi1 = Field::from_real_fn(&g, |x| (std::f64::consts::PI * x[0]).cos());
        let z = Field::zeros(&g, Space::Physical);
        let exact = solve_homogeneous(2, &phi1, &z, &times).unwrap();
        let err = |s| {
            let o = rk4_oracle_with_substeps(2, &phi1, &z, &ZeroForcing::new(&g), &times, s).unwrap();
            exact.snapshot(4).sub(o.snapshot(4)).unwrap().l2_norm()
        };
        let (e1, e2) = (err(8), err(16));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn sampled_forcing_interpolates_cubics_exactly() {
        let g = Grid::new(&[8], 1.0).unwrap();
        let times = uniform_times(1.0, 9);
        let fields: Vec<Field> = times.iter().map(|t| zero_mode_field(&g, t * t * t - t)).collect();
        let s = SampledForcing::new(times, fields).unwrap();
        for t in [0.03, 0.41, 0.99] {
            let v = zero_mode(&s.at(t).unwrap());
            assert!((v.re - (t * t * t - t)).abs() < 1e-13);
        }
        assert!(s.at(1.5).is_err());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g1 = Grid::new(&[8], 1.0).unwrap();
        let g2 = Grid::new(&[16], 1.0).unwrap();
        let times = uniform_times(1.0, 5);
        let r = solve_homogeneous(1, &Field::zeros(&g1, Space::Physical), &Field::zeros(&g2, Space::Physical), &times);
        assert!(matches!(r, Err(Error::GridMismatch(_))));
    }
}
