//! Fourier-side fundamental pair of `∂t² + t^m ρ²`.
//!
//! With `z = (4i/(m+2)) t^{(m+2)/2} ρ`,
//!
//! ```text
//! V1(t, ρ) = e^{-z/2} Φ(m/(2(m+2)), m/(m+2); z)
//! V2(t, ρ) = t e^{-z/2} Φ((m+4)/(2(m+2)), (m+4)/(m+2); z)
//! ```
//!
//! normalised to `(V1, ∂tV1) = (1, 0)` and `(V2, ∂tV2) = (0, 1)` at `t = 0`.
//! Time derivatives use the chain rule `dz/dt = 2i t^{m/2} ρ` and the exact
//! contiguous derivative of Φ.
//!
//! The Fourier transform throughout the crate uses the angular kernel
//! `e^{-i x·ξ}`, so `ρ = |ξ|` with no factors of 2π.

use crate::kummer::{kummer_m, kummer_m_dz, KummerParams};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSample {
    pub m: u32,
    pub t: f64,
    pub rho: f64,
    pub v1: Complex64,
    pub v2: Complex64,
    pub dt_v1: Complex64,
    pub dt_v2: Complex64,
}

impl PropagatorSample {
    /// `v1·∂tv2 − v2·∂tv1`, identically 1.
    pub fn wronskian(&self) -> Complex64 {
        self.v1 * self.dt_v2 - self.v2 * self.dt_v1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    V1,
    V2,
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Parameter("degeneracy order m must be at least 1".into()));
    }
    Ok(())
}

/// Evaluate the fundamental pair and its time derivatives at `(m, t, ρ)`.
pub fn sample(m: u32, t: f64, rho: f64) -> Result<PropagatorSample> {
    check_m(m)?;
    if t < 0.0 || rho < 0.0 {
        return Err(Error::Domain(format!("need t ≥ 0 and ρ ≥ 0, got t={t}, ρ={rho}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if rho == 0.0 {
        return Ok(PropagatorSample {
            m,
            t,
            rho,
            v1: one,
            v2: Complex64::new(t, 0.0),
            dt_v1: zero,
            dt_v2: one,
        });
    }
    let mf = f64::from(m);
    let z = Complex64::new(0.0, 4.0 / (mf + 2.0) * t.powf((mf + 2.0) / 2.0) * rho);
    let dz_dt = Complex64::new(0.0, 2.0 * t.powf(mf / 2.0) * rho);
    let damp = (-z / 2.0).exp();

    let p1 = KummerParams::first_propagator(m);
    let p2 = KummerParams::second_propagator(m);
    let f1 = kummer_m(p1, z)?;
    let f1z = kummer_m_dz(p1, z)?;
    let f2 = kummer_m(p2, z)?;
    let f2z = kummer_m_dz(p2, z)?;

    let v1 = damp * f1;
    let dt_v1 = damp * (f1z - f1 / 2.0) * dz_dt;
    let g2 = damp * f2;
    let v2 = g2 * t;
    let dt_v2 = g2 + damp * (f2z - f2 / 2.0) * dz_dt * t;
    Ok(PropagatorSample {
        m,
        t,
        rho,
        v1,
        v2,
        dt_v1,
        dt_v2,
    })
}

/// `|∂t²V + t^m ρ² V|` with a five-point central second difference at
/// step `h = 1e-4·max(t, 1)`.
pub fn ode_residual(m: u32, t: f64, rho: f64, which: Which) -> Result<f64> {
    check_m(m)?;
    let h = 1e-4 * t.max(1.0);
    if t - 2.0 * h < 0.0 {
        return Err(Error::Domain(format!(
            "t={t} is too close to 0 for the five-point stencil (h={h})"
        )));
    }
    let value = |s: f64| -> Result<Complex64> {
        let p = sample(m, s, rho)?;
        Ok(match which {
            Which::V1 => p.v1,
            Which::V2 => p.v2,
        })
    };
    let fm2 = value(t - 2.0 * h)?;
    let fm1 = value(t - h)?;
    let f0 = value(t)?;
    let fp1 = value(t + h)?;
    let fp2 = value(t + 2.0 * h)?;
    let d2 = (-fp2 + fp1 * 16.0 - f0 * 30.0 + fm1 * 16.0 - fm2) / (12.0 * h * h);
    Ok((d2 + f0 * (t.powi(m as i32) * rho * rho)).norm())
}

/// Propagator samples on a `(ρ, t)` product grid, computed once and reused.
#[derive(Debug, Clone)]
pub struct PropagatorTable {
    m: u32,
    times: Vec<f64>,
    rhos: Vec<f64>,
    // row-major: rho index outer, time index inner
    samples: Vec<PropagatorSample>,
}

impl PropagatorTable {
    pub fn new(m: u32, times: &[f64], rhos: &[f64]) -> Result<Self> {
        check_m(m)?;
        let rows: Vec<Vec<PropagatorSample>> = rhos
            .par_iter()
            .map(|&rho| times.iter().map(|&t| sample(m, t, rho)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            m,
            times: times.to_vec(),
            rhos: rhos.to_vec(),
            samples: rows.into_iter().flatten().collect(),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    /// All time samples for the `ρ` at index `rho_index`.
    pub fn row(&self, rho_index: usize) -> &[PropagatorSample] {
        let nt = self.times.len();
        &self.samples[rho_index * nt..(rho_index + 1) * nt]
    }

    pub fn get(&self, rho_index: usize, time_index: usize) -> &PropagatorSample {
        &self.row(rho_index)[time_index]
    }
}
