//! Periodic grids on `[-L, L)^n`, unitary DFTs and Fourier multipliers.
//!
//! Grid point `j` on an axis of size `N` sits at `x_j = -L + j·2L/N`.
//! Spectral index `j` carries the integer wavenumber `k` (`j` for `j < N/2`,
//! `j - N` otherwise) and angular frequency `ξ = πk/L`.

mod io;

pub use io::{
    export_trajectory, import_trajectory, read_cwgrid, read_cwgrid_file, write_csv, write_cwgrid, write_cwgrid_file,
    CWGRID_MAGIC,
};

use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use std::cell::RefCell;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    sizes: Vec<usize>,
    half_length: f64,
}

impl Grid {
    pub fn new(sizes: &[usize], half_length: f64) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 {
            return Err(Error::Dimension(format!(
                "grid dimension must be 1, 2 or 3, got {}",
                sizes.len()
            )));
        }
        for &s in sizes {
            if s < 8 || !s.is_power_of_two() {
                return Err(Error::Parameter(format!(
                    "axis size {s} must be a power of two and at least 8"
                )));
            }
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::Parameter(format!(
                "box half length must be positive, got {half_length}"
            )));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            half_length,
        })
    }

    /// Cubic grid with `size` points on each of `n` axes.
    pub fn cube(n: usize, size: usize, half_length: f64) -> Result<Self> {
        Self::new(&vec![size; n], half_length)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_length / self.sizes[axis] as f64
    }

    pub fn cell_measure(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Distance between adjacent angular frequencies, `π/L`.
    pub fn frequency_step(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing(axis)
    }

    pub fn wavenumber(&self, axis: usize, j: usize) -> i64 {
        let n = self.sizes[axis];
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    pub fn frequency(&self, axis: usize, j: usize) -> f64 {
        self.wavenumber(axis, j) as f64 * self.frequency_step()
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for axis in (0..self.dim()).rev() {
            out[axis] = flat % self.sizes[axis];
            flat /= self.sizes[axis];
        }
        out
    }

    pub fn ravel(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim() {
            x[axis] = self.coordinate(axis, idx[axis]);
        }
        x
    }

    pub fn frequency_vector(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut xi = [0.0; 3];
        for axis in 0..self.dim() {
            xi[axis] = self.frequency(axis, idx[axis]);
        }
        xi
    }

    /// `|ξ|` for every spectral index, in flat order.
    pub fn frequency_magnitudes(&self) -> Vec<f64> {
        (0..self.len())
            .map(|f| {
                let xi = self.frequency_vector(f);
                xi.iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect()
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "sizes {:?} with L={} vs sizes {:?} with L={}",
                self.sizes, self.half_length, other.sizes, other.half_length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    space: Space,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

const NORM_CHUNK: usize = 4096;

fn transform(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let sizes = grid.sizes();
    let total = data.len();
    for axis in 0..sizes.len() {
        let len = sizes[axis];
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction));
        let stride: usize = sizes[axis + 1..].iter().product();
        if stride == 1 {
            data.par_chunks_mut(len).for_each_init(
                || vec![ZERO; fft.get_inplace_scratch_len()],
                |scratch, line| fft.process_with_scratch(line, scratch),
            );
        } else {
            let lines = total / len;
            let src = &*data;
            let processed: Vec<Vec<Complex64>> = (0..lines)
                .into_par_iter()
                .map(|l| {
                    let base = (l / stride) * len * stride + l % stride;
                    let mut buf: Vec<Complex64> = (0..len).map(|j| src[base + j * stride]).collect();
                    fft.process(&mut buf);
                    buf
                })
                .collect();
            for (l, buf) in processed.into_iter().enumerate() {
                let base = (l / stride) * len * stride + l % stride;
                for (j, v) in buf.into_iter().enumerate() {
                    data[base + j * stride] = v;
                }
            }
        }
    }
    let scale = 1.0 / (total as f64).sqrt();
    data.par_iter_mut().for_each(|v| *v *= scale);
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            space,
        })
    }

    pub fn zeros(grid: &Grid, space: Space) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![ZERO; grid.len()],
            space,
        }
    }

    /// Sample a function of position on the physical grid.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let n = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)[..n]))
            .collect();
        Self {
            grid: grid.clone(),
            values,
            space: Space::Physical,
        }
    }

    pub fn from_real_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Build a spectral field from a function of the frequency vector.
    pub fn from_spectral_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let n = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.frequency_vector(i)[..n]))
            .collect();
        Self {
            grid: grid.clone(),
            values,
            space: Space::Spectral,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    fn expect(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::Domain(format!(
                "expected a {space:?} field, got {:?}",
                self.space
            )));
        }
        Ok(())
    }

    pub fn dft_forward(&self) -> Result<Field> {
        self.expect(Space::Physical)?;
        let mut values = self.values.clone();
        transform(&self.grid, &mut values, FftDirection::Forward);
        Ok(Field {
            grid: self.grid.clone(),
            values,
            space: Space::Spectral,
        })
    }

    pub fn dft_inverse(&self) -> Result<Field> {
        self.expect(Space::Spectral)?;
        let mut values = self.values.clone();
        transform(&self.grid, &mut values, FftDirection::Inverse);
        Ok(Field {
            grid: self.grid.clone(),
            values,
            space: Space::Physical,
        })
    }

    /// The field in spectral space, transforming if needed.
    pub fn to_spectral(&self) -> Field {
        match self.space {
            Space::Spectral => self.clone(),
            Space::Physical => self.dft_forward().expect("space checked"),
        }
    }

    pub fn to_physical(&self) -> Field {
        match self.space {
            Space::Physical => self.clone(),
            Space::Spectral => self.dft_inverse().expect("space checked"),
        }
    }

    /// `(Σ|f|² · cell_measure)^{1/2}` in whichever space the field lives.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_measure()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete `H^s` norm with the exact multiplier `(1+|ξ|²)^{s/2}`.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        self.expect(Space::Spectral)?;
        let grid = &self.grid;
        // fixed chunking keeps the sum independent of the thread count
        let partial: Vec<f64> = self
            .values
            .par_chunks(NORM_CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                chunk
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let xi = grid.frequency_vector(c * NORM_CHUNK + j);
                        let xi2: f64 = xi.iter().map(|x| x * x).sum();
                        (1.0 + xi2).powf(s) * v.norm_sqr()
                    })
                    .sum::<f64>()
            })
            .collect();
        let sum: f64 = partial.iter().sum();
        Ok((sum * grid.cell_measure()).sqrt())
    }

    /// Multiply each spectral coefficient by `m(ξ)`.
    pub fn apply_multiplier<F>(&self, m: F) -> Result<Field>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        self.expect(Space::Spectral)?;
        let grid = &self.grid;
        let n = grid.dim();
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| v * m(&grid.frequency_vector(i)[..n]))
            .collect();
        Ok(Field {
            grid: grid.clone(),
            values,
            space: Space::Spectral,
        })
    }

    /// `iξ_axis · f̂`, with the unpaired Nyquist mode dropped on that axis.
    pub fn spectral_derivative(&self, axis: usize) -> Result<Field> {
        if axis >= self.grid.dim() {
            return Err(Error::Dimension(format!(
                "axis {axis} out of range for a {}-D grid",
                self.grid.dim()
            )));
        }
        self.expect(Space::Spectral)?;
        let grid = &self.grid;
        let nyq = -(grid.sizes()[axis] as i64) / 2;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| {
                let j = grid.unravel(i)[axis];
                if grid.wavenumber(axis, j) == nyq {
                    ZERO
                } else {
                    v * Complex64::new(0.0, grid.frequency(axis, j))
                }
            })
            .collect();
        Ok(Field {
            grid: grid.clone(),
            values,
            space: Space::Spectral,
        })
    }

    pub fn laplacian(&self) -> Result<Field> {
        self.apply_multiplier(|xi| Complex64::new(-xi.iter().map(|x| x * x).sum::<f64>(), 0.0))
    }

    /// Zero every mode with some `|k| > N/3`.
    pub fn dealias(&self) -> Result<Field> {
        self.expect(Space::Spectral)?;
        let grid = &self.grid;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| {
                let idx = grid.unravel(i);
                let keep = (0..grid.dim()).all(|a| {
                    let k = grid.wavenumber(a, idx[a]).unsigned_abs() as f64;
                    k <= grid.sizes()[a] as f64 / 3.0
                });
                if keep {
                    *v
                } else {
                    ZERO
                }
            })
            .collect();
        Ok(Field {
            grid: grid.clone(),
            values,
            space: Space::Spectral,
        })
    }

    /// Hilbert transform of a 1-D physical field: multiplier `−i·sign(ξ)`,
    /// zero on the mean and on the unpaired Nyquist mode.
    pub fn hilbert_transform_1d(&self) -> Result<Field> {
        if self.grid.dim() != 1 {
            return Err(Error::Dimension(format!(
                "Hilbert transform needs a 1-D grid, got {}-D",
                self.grid.dim()
            )));
        }
        self.expect(Space::Physical)?;
        let nyq = -(self.grid.sizes()[0] as i64) / 2;
        let grid = self.grid.clone();
        let mut spec = self.dft_forward()?;
        for (j, v) in spec.values.iter_mut().enumerate() {
            let k = grid.wavenumber(0, j);
            *v = if k == 0 || k == nyq {
                ZERO
            } else {
                *v * Complex64::new(0.0, -(k.signum() as f64))
            };
        }
        spec.dft_inverse()
    }

    pub fn map<F>(&self, f: F) -> Field
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        Field {
            grid: self.grid.clone(),
            values: self.values.par_iter().map(|&v| f(v)).collect(),
            space: self.space,
        }
    }

    /// Pointwise map with access to the physical coordinates.
    pub fn map_with_position<F>(&self, f: F) -> Result<Field>
    where
        F: Fn(&[f64], Complex64) -> Complex64 + Sync,
    {
        self.expect(Space::Physical)?;
        let grid = &self.grid;
        let n = grid.dim();
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| f(&grid.point(i)[..n], v))
            .collect();
        Ok(Field {
            grid: grid.clone(),
            values,
            space: Space::Physical,
        })
    }

    fn check_compatible(&self, other: &Field) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.space != other.space {
            return Err(Error::Domain(format!(
                "cannot combine {:?} and {:?} fields",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Field, b: Complex64) -> Result<Field> {
        self.check_compatible(other)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Field {
            grid: self.grid.clone(),
            values,
            space: self.space,
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, a: f64) -> Field {
        self.map(|v| v * a)
    }

    /// Pointwise product; both fields must be physical.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        self.expect(Space::Physical)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(x, y)| x * y)
            .collect();
        Ok(Field {
            grid: self.grid.clone(),
            values,
            space: Space::Physical,
        })
    }

    /// Keep only the real part of every sample.
    pub fn real_part(&self) -> Field {
        self.map(|v| Complex64::new(v.re, 0.0))
    }
}

/// Time-indexed spectral snapshots of `u` and `∂t u`.
#[derive(Debug, Clone)]
pub struct SpectralTrajectory {
    grid: Grid,
    times: Vec<f64>,
    snapshots: Vec<Field>,
    dt_snapshots: Vec<Field>,
}

impl SpectralTrajectory {
    pub fn new(
        grid: Grid,
        times: Vec<f64>,
        snapshots: Vec<Field>,
        dt_snapshots: Vec<Field>,
    ) -> Result<Self> {
        if times.len() != snapshots.len() || times.len() != dt_snapshots.len() {
            return Err(Error::Parameter(format!(
                "{} times, {} snapshots and {} time-derivative snapshots",
                times.len(),
                snapshots.len(),
                dt_snapshots.len()
            )));
        }
        validate_times(&times)?;
        for f in snapshots.iter().chain(&dt_snapshots) {
            grid.check_same(f.grid())?;
            f.expect(Space::Spectral)?;
        }
        Ok(Self {
            grid,
            times,
            snapshots,
            dt_snapshots,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }

    pub fn dt_snapshots(&self) -> &[Field] {
        &self.dt_snapshots
    }

    pub fn snapshot(&self, i: usize) -> &Field {
        &self.snapshots[i]
    }

    pub fn dt_snapshot(&self, i: usize) -> &Field {
        &self.dt_snapshots[i]
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory is non-empty")
    }

    pub fn into_parts(self) -> (Grid, Vec<f64>, Vec<Field>, Vec<Field>) {
        (self.grid, self.times, self.snapshots, self.dt_snapshots)
    }

    /// `a·self + b·other` snapshot by snapshot.
    pub fn combine(&self, a: f64, other: &SpectralTrajectory, b: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if self.times != other.times {
            return Err(Error::GridMismatch("trajectories use different time grids".into()));
        }
        let (a, b) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
        let snapshots = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(x, y)| x.combine(a, y, b))
            .collect::<Result<Vec<_>>>()?;
        let dt_snapshots = self
            .dt_snapshots
            .iter()
            .zip(&other.dt_snapshots)
            .map(|(x, y)| x.combine(a, y, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid.clone(),
            times: self.times.clone(),
            snapshots,
            dt_snapshots,
        })
    }

    pub fn add(&self, other: &SpectralTrajectory) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    /// `max_t ‖u(t)‖_{H^s}`.
    pub fn sup_sobolev_norm(&self, s: f64) -> f64 {
        self.snapshots
            .iter()
            .map(|f| f.sobolev_norm(s).expect("snapshots are spectral"))
            .fold(0.0, f64::max)
    }

    /// `max_t ‖u(t) − v(t)‖_{H^s}`.
    pub fn sup_distance(&self, other: &SpectralTrajectory, s: f64) -> Result<f64> {
        let diff = self.combine(1.0, other, -1.0)?;
        Ok(diff.sup_sobolev_norm(s))
    }

    pub fn zeros(grid: &Grid, times: &[f64]) -> Result<Self> {
        validate_times(times)?;
        let z = Field::zeros(grid, Space::Spectral);
        Ok(Self {
            grid: grid.clone(),
            times: times.to_vec(),
            snapshots: vec![z.clone(); times.len()],
            dt_snapshots: vec![z; times.len()],
        })
    }
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::Parameter("time grid must start at t = 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `n` equally spaced times on `[0, t_end]`.
pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}
