//! Characteristic-set geometry, tangent vector fields applied to computed
//! trajectories, ridge extraction and power-law rate fits.

use crate::linear::uniform_step;
use crate::semilinear::finite_difference_dt;
use crate::spectral::{Field, Grid, Space, SpectralTrajectory};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::io::Write;

/// Radius `2t^{(m+2)/2}/(m+2)` of the cusp surface at time `t`.
pub fn cusp_radius(m: u32, t: f64) -> f64 {
    let k = f64::from(m) + 2.0;
    2.0 * t.powf(k / 2.0) / k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// `x₁ = ±2t^{(m+2)/2}/(m+2)`
    GammaPM,
    /// `|x| = 2t^{(m+2)/2}/(m+2)`
    Gamma,
    /// `x₁ = 0`
    Gamma0,
    /// `x = 0`
    L0,
    /// `t = 0`
    Sigma0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharSurface {
    kind: SurfaceKind,
    m: u32,
    sign: Option<Sign>,
}

impl CharSurface {
    pub fn new(kind: SurfaceKind, m: u32, sign: Option<Sign>) -> Result<Self> {
        if (kind == SurfaceKind::GammaPM) != sign.is_some() {
            return Err(Error::Parameter(format!(
                "{kind:?}: a sign is required for GammaPM and only there"
            )));
        }
        if matches!(kind, SurfaceKind::GammaPM | SurfaceKind::Gamma) && m == 0 {
            return Err(Error::Parameter("cusp surfaces need m ≥ 1".into()));
        }
        Ok(Self { kind, m, sign })
    }

    pub fn gamma_pm(m: u32, sign: Sign) -> Result<Self> {
        Self::new(SurfaceKind::GammaPM, m, Some(sign))
    }

    pub fn gamma(m: u32) -> Result<Self> {
        Self::new(SurfaceKind::Gamma, m, None)
    }

    pub fn gamma0() -> Self {
        Self {
            kind: SurfaceKind::Gamma0,
            m: 0,
            sign: None,
        }
    }

    pub fn l0() -> Self {
        Self {
            kind: SurfaceKind::L0,
            m: 0,
            sign: None,
        }
    }

    pub fn sigma0() -> Self {
        Self {
            kind: SurfaceKind::Sigma0,
            m: 0,
            sign: None,
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn sign(&self) -> Option<Sign> {
        self.sign
    }
}

/// Defining-function residual of `s` at `(t, x)`; zero exactly on the set.
pub fn surface_distance(s: &CharSurface, t: f64, x: &[f64]) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("surface distance needs t ≥ 0, got {t}")));
    }
    let x1 = x.first().copied().unwrap_or(0.0);
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(match s.kind {
        SurfaceKind::GammaPM => {
            let sign = s.sign.expect("checked at construction").value();
            (x1 - sign * cusp_radius(s.m, t)).abs()
        }
        SurfaceKind::Gamma => (r - cusp_radius(s.m, t)).abs(),
        SurfaceKind::Gamma0 => x1.abs(),
        SurfaceKind::L0 => r,
        SurfaceKind::Sigma0 => t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldName {
    /// `2t∂t + (m+2)Σ xᵢ∂ᵢ`
    V0,
    /// `2t^{m/2+1}∂ℓ + (m+2)(xℓ/t^{m/2})∂t`
    Vbar,
    /// `xᵢ∂ⱼ − xⱼ∂ᵢ`
    L,
    /// `2t∂t + (m+2)x₁∂₁`, tangent to the planar cusp pair
    Vhalf,
    /// `t∂t`
    TDt,
    /// `∂ℓ`, `ℓ ≥ 2`
    Rl,
    /// `|x|∂t` (index 0) or `t^{m/2}|x|∂ᵢ`
    N1,
    /// `(|x| − 2t^{(m+2)/2}/(m+2))∂ᵢ`
    N2,
    /// `t∂t`
    N3,
    /// `t^{(m+2)/2}∂ᵢ`
    N4,
    /// plain `∂ᵢ`, the non-tangent control
    D,
}

impl FieldName {
    fn label(self) -> &'static str {
        match self {
            FieldName::V0 => "V0",
            FieldName::Vbar => "Vbar",
            FieldName::L => "L",
            FieldName::Vhalf => "Vhalf",
            FieldName::TDt => "TDt",
            FieldName::Rl => "Rl",
            FieldName::N1 => "N1",
            FieldName::N2 => "N2",
            FieldName::N3 => "N3",
            FieldName::N4 => "N4",
            FieldName::D => "D",
        }
    }

    fn arity(self) -> usize {
        match self {
            FieldName::V0 | FieldName::Vhalf | FieldName::TDt | FieldName::N3 => 0,
            FieldName::L => 2,
            _ => 1,
        }
    }
}

/// A tangent field with its (1-based) indices and degeneracy exponent `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorFieldId {
    name: FieldName,
    indices: Vec<usize>,
    m: u32,
}

impl VectorFieldId {
    pub fn new(name: FieldName, indices: Vec<usize>, m: u32) -> Result<Self> {
        let bad = |msg: String| Err(Error::Parameter(format!("{}: {msg}", name.label())));
        if indices.len() != name.arity() {
            return bad(format!("expects {} indices, got {}", name.arity(), indices.len()));
        }
        match name {
            FieldName::L if indices[0] == 0 || indices[0] >= indices[1] => {
                return bad("needs 1 ≤ i < j".into())
            }
            FieldName::Rl if indices[0] < 2 => return bad("needs ℓ ≥ 2".into()),
            FieldName::N1 => {}
            _ if indices.contains(&0) => return bad("indices start at 1".into()),
            _ => {}
        }
        if m == 0 {
            return bad("needs m ≥ 1".into());
        }
        Ok(Self { name, indices, m })
    }

    /// Parse `V0`, `Vbar:1`, `L:1,2`, `N1:0`, `D:1`.
    pub fn parse(src: &str, m: u32) -> Result<Self> {
        let (head, tail) = match src.trim().split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (src.trim(), None),
        };
        let name = match head {
            "V0" => FieldName::V0,
            "Vbar" => FieldName::Vbar,
            "L" => FieldName::L,
            "Vhalf" => FieldName::Vhalf,
            "TDt" => FieldName::TDt,
            "Rl" => FieldName::Rl,
            "N1" => FieldName::N1,
            "N2" => FieldName::N2,
            "N3" => FieldName::N3,
            "N4" => FieldName::N4,
            "D" => FieldName::D,
            other => return Err(Error::Parameter(format!("unknown vector field `{other}`"))),
        };
        let indices = match tail {
            None => Vec::new(),
            Some(t) => t
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parameter(format!("bad index in `{src}`")))
                })
                .collect::<Result<_>>()?,
        };
        Self::new(name, indices, m)
    }

    pub fn name(&self) -> FieldName {
        self.name
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Carries a negative power of `t`.
    pub fn is_singular(&self) -> bool {
        self.name == FieldName::Vbar
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.indices.iter().any(|&i| i > n) {
            return Err(Error::Dimension(format!("{self} is out of range on a {n}-D grid")));
        }
        Ok(())
    }

    fn uses_dt(&self) -> bool {
        match self.name {
            FieldName::V0 | FieldName::Vbar | FieldName::Vhalf | FieldName::TDt | FieldName::N3 => true,
            FieldName::N1 => self.indices[0] == 0,
            _ => false,
        }
    }

    fn spatial_axes(&self, n: usize) -> Vec<usize> {
        match self.name {
            FieldName::V0 => (0..n).collect(),
            FieldName::Vhalf => vec![0],
            FieldName::TDt | FieldName::N3 => vec![],
            FieldName::N1 if self.indices[0] == 0 => vec![],
            _ => self.indices.iter().map(|i| i - 1).collect(),
        }
    }

    /// `(c_t, c_x)` with the field equal to `c_t∂t + Σ c_x[a]∂_a` at `(t, x)`.
    pub fn coefficients(&self, t: f64, x: &[f64]) -> (f64, [f64; 3]) {
        let m = f64::from(self.m);
        let k = m + 2.0;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut cx = [0.0; 3];
        let ct = match self.name {
            FieldName::V0 => {
                for (a, c) in cx.iter_mut().enumerate().take(x.len()) {
                    *c = k * x[a];
                }
                2.0 * t
            }
            FieldName::Vbar => {
                let l = self.indices[0] - 1;
                cx[l] = 2.0 * t.powf(m / 2.0 + 1.0);
                k * x[l] / t.powf(m / 2.0)
            }
            FieldName::L => {
                let (i, j) = (self.indices[0] - 1, self.indices[1] - 1);
                cx[j] = x[i];
                cx[i] = -x[j];
                0.0
            }
            FieldName::Vhalf => {
                cx[0] = k * x[0];
                2.0 * t
            }
            FieldName::TDt | FieldName::N3 => t,
            FieldName::Rl | FieldName::D => {
                cx[self.indices[0] - 1] = 1.0;
                0.0
            }
            FieldName::N1 => match self.indices[0] {
                0 => r,
                i => {
                    cx[i - 1] = t.powf(m / 2.0) * r;
                    0.0
                }
            },
            FieldName::N2 => {
                cx[self.indices[0] - 1] = r - cusp_radius(self.m, t);
                0.0
            }
            FieldName::N4 => {
                cx[self.indices[0] - 1] = t.powf(k / 2.0);
                0.0
            }
        };
        (ct, cx)
    }
}

impl fmt::Display for VectorFieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name.label())?;
        if !self.indices.is_empty() {
            let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
            write!(f, ":{}", idx.join(","))?;
        }
        Ok(())
    }
}

/// Apply `id` with the default floor `t_floor = 4Δt`.
pub fn apply_vector_field(id: &VectorFieldId, traj: &SpectralTrajectory) -> Result<SpectralTrajectory> {
    let h = uniform_step(traj.times())?;
    apply_vector_field_with_floor(id, traj, 4.0 * h)
}

/// Spatial derivatives are spectral, `∂t` is a 4th-order finite difference
/// and coefficients multiply in physical space. For fields with negative
/// powers of `t`, snapshots with `t < t_floor` are set to zero.
pub fn apply_vector_field_with_floor(
    id: &VectorFieldId,
    traj: &SpectralTrajectory,
    t_floor: f64,
) -> Result<SpectralTrajectory> {
    let grid = traj.grid().clone();
    let n = grid.dim();
    id.check_dim(n)?;
    let h = uniform_step(traj.times())?;
    if id.is_singular() && t_floor < 4.0 * h * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "{id} has a negative power of t: t_floor {t_floor} is below 4Δt = {}",
            4.0 * h
        )));
    }
    let dt = if id.uses_dt() {
        Some(finite_difference_dt(traj.snapshots(), h)?)
    } else {
        None
    };
    let axes = id.spatial_axes(n);
    let times = traj.times();
    let out = (0..traj.len())
        .into_par_iter()
        .map(|i| {
            let t = times[i];
            if id.is_singular() && t < t_floor {
                return Ok(Field::zeros(&grid, Space::Spectral));
            }
            let snap = traj.snapshot(i);
            let derivs = axes
                .iter()
                .map(|&a| Ok((a, snap.spectral_derivative(a)?.to_physical())))
                .collect::<Result<Vec<_>>>()?;
            let dtu = dt.as_ref().map(|d| d[i].to_physical());
            let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (flat, v) in values.iter_mut().enumerate() {
                let x = grid.point(flat);
                let (ct, cx) = id.coefficients(t, &x[..n]);
                let mut acc = Complex64::new(0.0, 0.0);
                if let Some(d) = &dtu {
                    acc += d.values()[flat] * ct;
                }
                for (a, d) in &derivs {
                    acc += d.values()[flat] * cx[*a];
                }
                *v = acc;
            }
            Field::new(grid.clone(), values, Space::Physical)?.dft_forward()
        })
        .collect::<Result<Vec<_>>>()?;
    let dt_out = finite_difference_dt(&out, h)?;
    SpectralTrajectory::new(grid, times.to_vec(), out, dt_out)
}

/// One row of a conormal scan: `Z₁⋯Z_k u` with `Z_k` applied first.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub word: Vec<VectorFieldId>,
    pub s: f64,
    pub sup_norm: f64,
    /// `sup_norm` over the depth-0 norm.
    pub ratio: f64,
}

impl ScanRow {
    pub fn word_label(&self) -> String {
        if self.word.is_empty() {
            "u".into()
        } else {
            self.word.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(" ")
        }
    }
}

/// First snapshot index unaffected by floors and their finite-difference
/// spill-over after `len` applications.
fn first_clean_index(word: &[VectorFieldId]) -> usize {
    if word.iter().any(VectorFieldId::is_singular) {
        4 + 2 * (word.len() - 1)
    } else {
        0
    }
}

fn sup_norm_from(traj: &SpectralTrajectory, from: usize, s: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for f in &traj.snapshots()[from.min(traj.len())..] {
        best = best.max(f.sobolev_norm(s)?);
    }
    Ok(best)
}

/// Sup-in-time `H^s` norms of every word of length ≤ `depth` over `fields`.
pub fn conormal_scan(
    traj: &SpectralTrajectory,
    fields: &[VectorFieldId],
    depth: usize,
    s: f64,
) -> Result<Vec<ScanRow>> {
    if depth > 2 {
        return Err(Error::Parameter(format!("scan depth is capped at 2, got {depth}")));
    }
    let base = sup_norm_from(traj, 0, s)?;
    let ratio = |v: f64| if base > 0.0 { v / base } else { f64::NAN };
    let mut rows = vec![ScanRow {
        word: Vec::new(),
        s,
        sup_norm: base,
        ratio: ratio(base),
    }];
    let mut level: Vec<(Vec<VectorFieldId>, SpectralTrajectory)> = vec![(Vec::new(), traj.clone())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (word, u) in &level {
            for z in fields {
                let zu = apply_vector_field(z, u)?;
                let mut w = vec![z.clone()];
                w.extend(word.iter().cloned());
                let sup = sup_norm_from(&zu, first_clean_index(&w), s)?;
                rows.push(ScanRow {
                    word: w.clone(),
                    s,
                    sup_norm: sup,
                    ratio: ratio(sup),
                });
                next.push((w, zu));
            }
        }
        level = next;
    }
    Ok(rows)
}

/// `|∇ₓu|` at every grid point of a spectral snapshot.
pub fn gradient_magnitude(field: &Field) -> Result<Vec<f64>> {
    let n = field.grid().dim();
    let mut acc = vec![0.0; field.grid().len()];
    for a in 0..n {
        let d = field.to_spectral().spectral_derivative(a)?.to_physical();
        for (s, v) in acc.iter_mut().zip(d.values()) {
            *s += v.norm_sqr();
        }
    }
    Ok(acc.into_iter().map(f64::sqrt).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgePoint {
    pub t: f64,
    pub snapshot: usize,
    pub x: Vec<f64>,
    pub strength: f64,
}

fn local_maxima(grid: &Grid, g: &[f64], threshold: f64) -> Vec<usize> {
    let n = grid.dim();
    let sizes = grid.sizes();
    let offsets: Vec<[i64; 3]> = (0..3usize.pow(n as u32))
        .map(|c| {
            let mut o = [0i64; 3];
            let mut c = c;
            for item in o.iter_mut().take(n) {
                *item = (c % 3) as i64 - 1;
                c /= 3;
            }
            o
        })
        .filter(|o| o.iter().any(|&v| v != 0))
        .collect();
    (0..g.len())
        .filter(|&flat| {
            let v = g[flat];
            if v <= threshold {
                return false;
            }
            let idx = grid.unravel(flat);
            offsets.iter().all(|o| {
                let mut nb = [0usize; 3];
                for a in 0..n {
                    let s = sizes[a] as i64;
                    nb[a] = ((idx[a] as i64 + o[a]).rem_euclid(s)) as usize;
                }
                let other = grid.ravel(&nb[..n]);
                if other < flat {
                    v > g[other]
                } else {
                    v >= g[other]
                }
            })
        })
        .collect()
}

/// Local maxima of `|∇ₓu|` above half the per-snapshot maximum.
pub fn ridge_extract(traj: &SpectralTrajectory) -> Result<Vec<RidgePoint>> {
    ridge_extract_with_threshold(traj, 0.5)
}

pub fn ridge_extract_with_threshold(traj: &SpectralTrajectory, fraction: f64) -> Result<Vec<RidgePoint>> {
    let grid = traj.grid();
    let n = grid.dim();
    let per_snapshot = (0..traj.len())
        .into_par_iter()
        .map(|i| {
            let g = gradient_magnitude(traj.snapshot(i))?;
            let max = g.iter().copied().fold(0.0, f64::max);
            if max <= 1e-300 {
                return Ok(Vec::new());
            }
            Ok(local_maxima(grid, &g, fraction * max)
                .into_iter()
                .map(|flat| RidgePoint {
                    t: traj.times()[i],
                    snapshot: i,
                    x: grid.point(flat)[..n].to_vec(),
                    strength: g[flat],
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_snapshot.into_iter().flatten().collect())
}

/// Ridges of a single snapshot.
pub fn ridge_extract_snapshot(traj: &SpectralTrajectory, i: usize) -> Result<Vec<RidgePoint>> {
    let grid = traj.grid();
    let g = gradient_magnitude(traj.snapshot(i))?;
    let max = g.iter().copied().fold(0.0, f64::max);
    if max <= 1e-300 {
        return Ok(Vec::new());
    }
    Ok(local_maxima(grid, &g, 0.5 * max)
        .into_iter()
        .map(|flat| RidgePoint {
            t: traj.times()[i],
            snapshot: i,
            x: grid.point(flat)[..grid.dim()].to_vec(),
            strength: g[flat],
        })
        .collect())
}

/// Mean `|∇ₓu|` over grid points farther than `min_distance` from every
/// surface at time `t`, and the maximum of `|∇ₓu|` overall.
pub fn gradient_away_from(
    field: &Field,
    t: f64,
    surfaces: &[CharSurface],
    min_distance: f64,
) -> Result<(f64, f64)> {
    let grid = field.grid();
    let n = grid.dim();
    let g = gradient_magnitude(field)?;
    let (mut sum, mut count) = (0.0, 0usize);
    for (flat, v) in g.iter().enumerate() {
        let x = grid.point(flat);
        let mut far = true;
        for s in surfaces {
            if surface_distance(s, t, &x[..n])? <= min_distance {
                far = false;
                break;
            }
        }
        if far {
            sum += v;
            count += 1;
        }
    }
    let mean = if count == 0 { 0.0 } else { sum / count as f64 };
    Ok((mean, g.iter().copied().fold(0.0, f64::max)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
}

/// Least-squares slope of `ln v` against `ln t`.
pub fn fit_power_law(ts: &[f64], values: &[f64]) -> Result<EstimateFit> {
    if ts.len() != values.len() {
        return Err(Error::Parameter(format!(
            "{} abscissae and {} values",
            ts.len(),
            values.len()
        )));
    }
    if ts.len() < 5 {
        return Err(Error::Domain(format!("need at least 5 samples, got {}", ts.len())));
    }
    if let Some(bad) = ts.iter().chain(values).find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(format!("power-law fit needs positive finite data, got {bad}")));
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("power-law fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy <= 1e-300 { 1.0 } else { 1.0 - sse / syy };
    Ok(EstimateFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r2,
    })
}

/// Upper bound for `p₁` in the `L^p`-in-time smoothing estimate.
pub fn p1_threshold(m: u32, p: f64) -> f64 {
    let m = f64::from(m);
    ((p * (m + 8.0) - 4.0) / (2.0 * p * (m + 2.0))).min(1.0)
}

pub fn p2_threshold(m: u32, p: f64) -> f64 {
    let m = f64::from(m);
    (2.0 * (p - 1.0) / (p * (m + 2.0))).min(m / (2.0 * (m + 2.0)))
}

pub fn p3_threshold(m: u32) -> f64 {
    let m = f64::from(m);
    ((m + 8.0) / (2.0 * (m + 2.0))).min(1.0)
}

pub fn p4_threshold(m: u32) -> f64 {
    let m = f64::from(m);
    (2.0 / (m + 2.0)).min(m / (2.0 * (m + 2.0)))
}

/// Largest smoothing gains allowed for `V1` and `V2`.
pub fn s1_max(m: u32) -> f64 {
    let m = f64::from(m);
    m / (2.0 * (m + 2.0))
}

pub fn s2_max(m: u32) -> f64 {
    let m = f64::from(m);
    (m + 4.0) / (2.0 * (m + 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateEntry {
    pub id: String,
    /// Expected exponent of `t` as `t → 0`.
    pub exponent: f64,
    pub window: (f64, f64),
    /// Relative tolerance on the fitted exponent.
    pub tolerance: f64,
}

impl EstimateEntry {
    pub fn accepts(&self, fit: &EstimateFit) -> bool {
        let scale = self.exponent.abs().max(1e-12);
        (fit.exponent - self.exponent).abs() <= self.tolerance * scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateCatalog {
    pub entries: Vec<EstimateEntry>,
}

impl EstimateCatalog {
    /// Exponents of the linear smoothing estimates at concrete parameters.
    /// `p3`, `p4` and `p1` are the chosen gains, each below its threshold.
    pub fn new(m: u32, s1: f64, s2: f64, p3: f64, p4: f64, p: f64, p1: f64) -> Result<Self> {
        let k = f64::from(m) + 2.0;
        let checks = [
            ("s1", s1, s1_max(m), true),
            ("s2", s2, s2_max(m), true),
            ("p3", p3, p3_threshold(m), false),
            ("p4", p4, p4_threshold(m), false),
            ("p1", p1, p1_threshold(m, p), false),
        ];
        for (name, v, max, closed) in checks {
            let ok = v >= 0.0 && if closed { v <= max } else { v < max };
            if !ok {
                return Err(Error::Parameter(format!("{name} = {v} outside its range (bound {max})")));
            }
        }
        if !(p > 1.0) {
            return Err(Error::Parameter(format!("p must exceed 1, got {p}")));
        }
        let window = (1e-2, 1.0);
        let entries = vec![
            EstimateEntry {
                id: "propagator-v1".into(),
                exponent: -s1 * k / 2.0,
                window,
                tolerance: 0.10,
            },
            EstimateEntry {
                id: "propagator-v2".into(),
                exponent: 1.0 - s2 * k / 2.0,
                window,
                tolerance: 0.10,
            },
            EstimateEntry {
                id: "duhamel-continuous".into(),
                exponent: 2.0 - p3 * k / 2.0,
                window,
                tolerance: 0.10,
            },
            EstimateEntry {
                id: "duhamel-continuous-dt".into(),
                exponent: 1.0 - p4 * k / 2.0,
                window,
                tolerance: 0.10,
            },
            EstimateEntry {
                id: "duhamel-lp".into(),
                exponent: 2.0 - p1 * k / 2.0 - 1.0 / p,
                window,
                tolerance: 0.10,
            },
        ];
        Ok(Self { entries })
    }

    pub fn get(&self, id: &str) -> Option<&EstimateEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// Region constants: `C` and the outer scale `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    pub c: f64,
    pub eps: f64,
}

impl RegionParams {
    pub fn for_grid(grid: &Grid) -> Self {
        Self {
            c: 2.0,
            eps: grid.half_length(),
        }
    }
}

/// Microlocal regions near the origin. `Omega*` belong to `Γ_m ∪ l₀`, `W*`
/// to `Γ_m^± ∪ Σ₀`, `D*` to `Γ_{m1} ∪ Γ_{m2}` and `E*` to
/// `Γ_{m1}^± ∪ Γ_{m2}^±` (with `m1 > m2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Omega1,
    Omega2,
    Omega3,
    Omega4,
    W1,
    W2(Sign),
    W3,
    W4,
    D1,
    D2,
    D3,
    D4,
    D5,
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl Region {
    /// Membership of `(t, x)`; `m` is used by `Omega*`/`W*`, `(m1, m2)` by
    /// `D*`/`E*`.
    pub fn contains(&self, p: RegionParams, m: u32, m12: (u32, u32), t: f64, x: &[f64]) -> bool {
        let RegionParams { c, eps } = p;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x1 = x.first().copied().unwrap_or(0.0);
        let a1 = x1.abs();
        let pw = |m: u32| t.powf((f64::from(m) + 2.0) / 2.0);
        let g = |m: u32| cusp_radius(m, t);
        let near_cone = |rho: f64| 0.0 < rho && rho < c * t && c * t <= eps;
        let away = |rho: f64, m: u32| pw(m) < c * (rho - g(m)).abs();
        let close = |rho: f64, m: u32| (rho - g(m)).abs() < c * pw(m);
        let away_pm = |m: u32| pw(m) < c * (x1 - g(m)).abs() && pw(m) < c * (x1 + g(m)).abs();
        let (m1, m2) = m12;
        match self {
            Region::Omega1 => 0.0 < t && t < c * r && c * r <= eps,
            Region::Omega2 => near_cone(r) && close(r, m),
            Region::Omega3 => r < c * t && c * t <= eps && away(r, m),
            Region::Omega4 => 0.0 < t && t < c * r && c * r <= eps && away(r, m),
            Region::W1 => 0.0 <= t && t < c * a1 && c * a1 <= eps,
            Region::W2(s) => near_cone(a1) && (x1 - s.value() * g(m)).abs() < c * pw(m),
            Region::W3 => a1 < c * t && c * t <= eps && away_pm(m),
            Region::W4 => c * t / (1.0 + c) < a1 && a1 < c * t && c * t <= eps && away_pm(m),
            Region::D1 => t < c * r && c * r <= eps,
            Region::D2 => near_cone(r) && close(r, m2),
            Region::D3 => {
                near_cone(r) && away(r, m2) && g(m1) < r && r < g(m2) && away(r, m1)
            }
            Region::D4 => near_cone(r) && away(r, m2) && close(r, m1),
            Region::D5 => away(r, m2) && away(r, m1) && r < g(m1),
            Region::E1 => t < c * a1 && c * a1 <= eps,
            Region::E2 => near_cone(a1) && close(a1, m2),
            Region::E3 => {
                near_cone(a1) && away(a1, m2) && g(m1) < a1 && a1 < g(m2) && away(a1, m1)
            }
            Region::E4 => near_cone(a1) && away(a1, m2) && close(a1, m1),
            Region::E5 => near_cone(a1) && away(a1, m2) && away(a1, m1) && a1 < g(m1),
        }
    }

    /// Generators of the tangent algebra used in this region, where they
    /// are expressible as [`VectorFieldId`]s in dimension `n`.
    pub fn alphabet(&self, n: usize, m: u32, m12: (u32, u32)) -> Vec<VectorFieldId> {
        let mk = |name, idx: Vec<usize>, m| VectorFieldId::new(name, idx, m).expect("valid by construction");
        let rot = |m| {
            let mut v = Vec::new();
            for i in 1..=n {
                for j in i + 1..=n {
                    v.push(mk(FieldName::L, vec![i, j], m));
                }
            }
            v
        };
        let tangential = |m| (2..=n).map(move |l| mk(FieldName::Rl, vec![l], m));
        let mut out = Vec::new();
        match self {
            Region::Omega1 => {
                out.push(mk(FieldName::N1, vec![0], m));
                out.extend((1..=n).map(|i| mk(FieldName::N1, vec![i], m)));
                out.extend(rot(m));
            }
            Region::Omega2 => {
                out.push(mk(FieldName::V0, vec![], m));
                out.extend((1..=n).map(|i| mk(FieldName::Vbar, vec![i], m)));
                out.extend(rot(m));
            }
            Region::Omega3 => {
                out.push(mk(FieldName::TDt, vec![], m));
                out.push(mk(FieldName::V0, vec![], m));
                out.extend(rot(m));
            }
            Region::Omega4 => {
                out.push(mk(FieldName::TDt, vec![], m));
                out.extend(rot(m));
            }
            Region::W2(_) => {
                out.push(mk(FieldName::Vhalf, vec![], m));
                out.push(mk(FieldName::Vbar, vec![1], m));
                out.extend(tangential(m));
            }
            Region::W3 => {
                out.push(mk(FieldName::TDt, vec![], m));
                out.push(mk(FieldName::Vhalf, vec![], m));
                out.extend(tangential(m));
            }
            Region::W1 | Region::W4 | Region::E1 | Region::E3 | Region::E5 => {
                if matches!(self, Region::W4 | Region::E3 | Region::E5) {
                    out.push(mk(FieldName::TDt, vec![], m));
                }
                out.extend(tangential(m));
            }
            Region::D2 => {
                out.push(mk(FieldName::V0, vec![], m12.1));
                out.extend((1..=n).map(|i| mk(FieldName::Vbar, vec![i], m12.1)));
                out.extend(rot(m12.1));
            }
            Region::D4 => {
                out.push(mk(FieldName::V0, vec![], m12.0));
                out.extend((1..=n).map(|i| mk(FieldName::Vbar, vec![i], m12.0)));
                out.extend(rot(m12.0));
            }
            Region::D1 | Region::D3 | Region::D5 => {
                if !matches!(self, Region::D1) {
                    out.push(mk(FieldName::TDt, vec![], m));
                }
                out.extend(rot(m));
            }
            Region::E2 => {
                out.push(mk(FieldName::Vhalf, vec![], m12.1));
                out.push(mk(FieldName::Vbar, vec![1], m12.1));
                out.extend(tangential(m12.1));
            }
            Region::E4 => {
                out.push(mk(FieldName::Vhalf, vec![], m12.0));
                out.push(mk(FieldName::Vbar, vec![1], m12.0));
                out.extend(tangential(m12.0));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub id: String,
    pub expected: f64,
    pub fitted: f64,
    pub r2: f64,
}

pub fn write_ridges_csv<W: Write>(mut w: W, points: &[RidgePoint]) -> Result<()> {
    let n = points.first().map_or(1, |p| p.x.len());
    let cols: Vec<String> = (0..n).map(|a| format!("x{a}")).collect();
    writeln!(w, "t,{},strength", cols.join(","))?;
    for p in points {
        let xs: Vec<String> = p.x.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{},{}", p.t, xs.join(","), p.strength)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(mut w: W, rows: &[ScanRow]) -> Result<()> {
    writeln!(w, "word,s,sup_norm,ratio")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.word_label(), r.s, r.sup_norm, r.ratio)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fit_csv<W: Write>(mut w: W, rows: &[FitReport]) -> Result<()> {
    writeln!(w, "lemma,expected,fitted,r2")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.id, r.expected, r.fitted, r.r2)?;
    }
    w.flush()?;
    Ok(())
}

/// Gnuplot script plotting ridge points over the cusp curves `±2t^{(m+2)/2}/(m+2)`.
pub fn gnuplot_ridges(csv: &str, m: u32, output: &str) -> String {
    let k = m + 2;
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{output}'\n\
         set xlabel 'x1'\nset ylabel 't'\n\
         set parametric\nset trange [0:*]\n\
         plot '{csv}' using 2:1 with points pt 7 ps 0.4 title 'ridges', \\\n\
         \x20    2*t**({k}/2.0)/{k}, t title 'x1 = 2t^{{({k})/2}}/{k}', \\\n\
         \x20    -2*t**({k}/2.0)/{k}, t title 'x1 = -2t^{{({k})/2}}/{k}'\n"
    )
}

pub fn gnuplot_scan(csv: &str, output: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{output}'\n\
         set style data histograms\nset style fill solid 0.6\n\
         set logscale y\nset xtics rotate by -45\n\
         set ylabel 'sup_t H^s norm / base'\n\
         plot '{csv}' using 4:xtic(1) skip 1 title 'ratio'\n"
    )
}

pub fn gnuplot_fit(csv: &str, output: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{output}'\n\
         set style data histograms\nset style fill solid 0.6\n\
         set ylabel 'exponent'\nset xtics rotate by -45\n\
         plot '{csv}' using 2:xtic(1) skip 1 title 'expected', '' using 3 skip 1 title 'fitted'\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::uniform_times;

    fn trajectory_from(
        grid: &Grid,
        times: &[f64],
        u: impl Fn(f64, &[f64]) -> f64 + Sync,
        ut: impl Fn(f64, &[f64]) -> f64 + Sync,
    ) -> SpectralTrajectory {
        let n = grid.dim();
        let snaps = times
            .iter()
            .map(|&t| Field::from_real_fn(grid, |x| u(t, &x[..n])).to_spectral())
            .collect();
        let dts = times
            .iter()
            .map(|&t| Field::from_real_fn(grid, |x| ut(t, &x[..n])).to_spectral())
            .collect();
        SpectralTrajectory::new(grid.clone(), times.to_vec(), snaps, dts).unwrap()
    }

    #[test]
    fn surfaces_vanish_on_their_sets() {
        let p = CharSurface::gamma_pm(1, Sign::Plus).unwrap();
        assert!(surface_distance(&p, 1.0, &[2.0 / 3.0]).unwrap() < 1e-15);
        let m = CharSurface::gamma_pm(1, Sign::Minus).unwrap();
        assert!(surface_distance(&m, 1.0, &[-2.0 / 3.0]).unwrap() < 1e-15);
        assert_eq!(surface_distance(&CharSurface::gamma0(), 0.7, &[0.0, 3.0]).unwrap(), 0.0);
        let g = CharSurface::gamma(2).unwrap();
        assert!(surface_distance(&g, 1.0, &[0.3, 0.4]).unwrap() < 1e-15);
        assert_eq!(surface_distance(&CharSurface::l0(), 2.0, &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(surface_distance(&CharSurface::sigma0(), 0.25, &[1.0]).unwrap(), 0.25);
        assert!(matches!(surface_distance(&g, -0.1, &[0.0]), Err(Error::Domain(_))));
        assert!(CharSurface::new(SurfaceKind::Gamma, 1, Some(Sign::Plus)).is_err());
        assert!(CharSurface::new(SurfaceKind::GammaPM, 1, None).is_err());
    }

    #[test]
    fn field_ids_validate_and_roundtrip() {
        for s in ["V0", "Vbar:2", "L:1,2", "Vhalf", "TDt", "Rl:2", "N1:0", "N2:1", "N3", "N4:1", "D:1"] {
            let id = VectorFieldId::parse(s, 1).unwrap();
            assert_eq!(id.to_string(), s);
        }
        assert!(VectorFieldId::parse("L:2,1", 1).is_err());
        assert!(VectorFieldId::parse("Vbar", 1).is_err());
        assert!(VectorFieldId::parse("Vbar:0", 1).is_err());
        assert!(VectorFieldId::parse("Rl:1", 1).is_err());
        assert!(VectorFieldId::parse("Q", 1).is_err());
    }

    #[test]
    fn scaling_field_on_power_of_t() {
        let g = Grid::new(&[16], 4.0).unwrap();
        let times = uniform_times(1.0, 65);
        let a = 3.0;
        let traj = trajectory_from(&g, &times, |t, _| t.powf(a), |t, _| a * t.powf(a - 1.0));
        let v0 = VectorFieldId::parse("V0", 1).unwrap();
        let out = apply_vector_field(&v0, &traj).unwrap();
        for i in [10, 32, 64] {
            let t = times[i];
            let got = out.snapshot(i).to_physical().values()[3].re;
            assert!((got - 2.0 * a * t.powf(a)).abs() < 1e-9, "t={t} got {got}");
        }
        let tdt = VectorFieldId::parse("TDt", 1).unwrap();
        let sq = trajectory_from(&g, &times, |t, _| t * t, |t, _| 2.0 * t);
        let out = apply_vector_field(&tdt, &sq).unwrap();
        for i in [0, 1, 30, 63, 64] {
            let t = times[i];
            let got = out.snapshot(i).to_physical().values()[5].re;
            assert!((got - 2.0 * t * t).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_kills_radial_functions() {
        let g = Grid::new(&[64, 64], 6.0).unwrap();
        let times = uniform_times(0.5, 9);
        let traj = trajectory_from(
            &g,
            &times,
            |t, x| (1.0 + t) * (-(x[0] * x[0] + x[1] * x[1])).exp(),
            |_, x| (-(x[0] * x[0] + x[1] * x[1])).exp(),
        );
        let l = VectorFieldId::parse("L:1,2", 1).unwrap();
        let out = apply_vector_field(&l, &traj).unwrap();
        let base = traj.sup_sobolev_norm(0.0);
        assert!(out.sup_sobolev_norm(0.0) < 1e-10 * base.max(1.0));
    }

    #[test]
    fn tangent_fields_annihilate_functions_of_the_surface() {
        // F(x₁ − 2t^{3/2}/3) is constant along Γ₁⁺ level sets
        let m = 1;
        let g = Grid::new(&[256], 8.0).unwrap();
        let times = uniform_times(1.0, 129);
        let f = |s: f64| (-4.0 * s * s).exp();
        let df = |s: f64| -8.0 * s * (-4.0 * s * s).exp();
        let traj = trajectory_from(
            &g,
            &times,
            |t, x| f(x[0] - cusp_radius(m, t)),
            |t, x| -t.sqrt() * df(x[0] - cusp_radius(m, t)),
        );
        let d1 = apply_vector_field(&VectorFieldId::parse("D:1", m).unwrap(), &traj).unwrap();
        let i = 96;
        let t = times[i];
        let scale = d1.snapshot(i).to_physical().max_abs();
        for name in ["Vbar:1", "Vhalf"] {
            let z = VectorFieldId::parse(name, m).unwrap();
            let zu = apply_vector_field(&z, &traj).unwrap().snapshot(i).to_physical();
            let sign = if name == "Vhalf" { -1.0 } else { 1.0 };
            let mut near = 0.0f64;
            for j in 0..256 {
                let x = g.coordinate(0, j);
                let want = sign * (2.0 * t.powf(1.5) - 3.0 * x) * df(x - cusp_radius(m, t));
                assert!((zu.values()[j].re - want).abs() < 1e-4 * scale, "{name} at x={x}");
                if (x - cusp_radius(m, t)).abs() < 0.05 {
                    near = near.max(zu.values()[j].norm());
                }
            }
            assert!(near < 0.2 * scale, "{name}: {near} vs {scale}");
        }
    }

    #[test]
    fn vector_field_is_linear() {
        let g = Grid::new(&[32, 32], 4.0).unwrap();
        let times = uniform_times(1.0, 17);
        let u = trajectory_from(&g, &times, |t, x| (-(x[0] * x[0]) - 2.0 * x[1] * x[1]).exp() * (1.0 + t * t), |t, x| {
            2.0 * t * (-(x[0] * x[0]) - 2.0 * x[1] * x[1]).exp()
        });
        let v = trajectory_from(&g, &times, |t, x| (x[0] - t).sin() * (-(x[1] * x[1])).exp() * (-(x[0] * x[0])).exp(), |_, _| 0.0);
        for s in ["V0", "Vbar:2", "L:1,2", "N2:1", "N1:0"] {
            let z = VectorFieldId::parse(s, 2).unwrap();
            let lhs = apply_vector_field(&z, &u.combine(2.0, &v, -3.0).unwrap()).unwrap();
            let rhs = apply_vector_field(&z, &u)
                .unwrap()
                .combine(2.0, &apply_vector_field(&z, &v).unwrap(), -3.0)
                .unwrap();
            let d = lhs.sup_distance(&rhs, 0.0).unwrap();
            assert!(d < 1e-10 * lhs.sup_sobolev_norm(0.0).max(1.0), "{s}: {d}");
        }
    }

    #[test]
    fn singular_fields_respect_the_floor() {
        let g = Grid::new(&[16], 4.0).unwrap();
        let times = uniform_times(1.0, 17);
        let traj = trajectory_from(&g, &times, |t, x| t * (-(x[0] * x[0])).exp(), |_, x| (-(x[0] * x[0])).exp());
        let vbar = VectorFieldId::parse("Vbar:1", 1).unwrap();
        let err = apply_vector_field_with_floor(&vbar, &traj, 0.1).unwrap_err();
        assert!(matches!(&err, Error::Domain(msg) if msg.contains("Vbar:1")));
        let out = apply_vector_field(&vbar, &traj).unwrap();
        for i in 0..4 {
            assert_eq!(out.snapshot(i).max_abs(), 0.0);
        }
        assert!(out.snapshot(4).max_abs() > 0.0);
    }

    #[test]
    fn scan_depth_zero_is_the_base_norm() {
        let g = Grid::new(&[64], 6.0).unwrap();
        let times = uniform_times(1.0, 17);
        let traj = trajectory_from(&g, &times, |t, x| (1.0 + t) * (-(x[0] * x[0])).exp(), |_, x| (-(x[0] * x[0])).exp());
        let fields = vec![VectorFieldId::parse("TDt", 1).unwrap(), VectorFieldId::parse("D:1", 1).unwrap()];
        let rows = conormal_scan(&traj, &fields, 0, 0.3).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].sup_norm - traj.sup_sobolev_norm(0.3)).abs() < 1e-14);
        let rows = conormal_scan(&traj, &fields, 2, 0.0).unwrap();
        assert_eq!(rows.len(), 1 + 2 + 4);
        assert_eq!(rows[3].word_label(), "TDt TDt");
        for r in &rows {
            assert!(r.ratio < 10.0, "{}: {}", r.word_label(), r.ratio);
        }
        assert!(conormal_scan(&traj, &fields, 3, 0.0).is_err());
    }

    #[test]
    fn ridges_of_a_step() {
        let g = Grid::new(&[256], 8.0).unwrap();
        let times = uniform_times(1.0, 5);
        let smooth = |x: f64| 0.5 * (1.0 + (x / 0.1).tanh());
        let traj = trajectory_from(&g, &times, |_, x| smooth(x[0] - 1.0) - smooth(x[0] + 1.0), |_, _| 0.0);
        let ridges = ridge_extract(&traj).unwrap();
        let at0: Vec<&RidgePoint> = ridges.iter().filter(|r| r.snapshot == 0).collect();
        assert_eq!(at0.len(), 2);
        for r in at0 {
            assert!((r.x[0].abs() - 1.0).abs() <= g.spacing(0));
        }
        let flat = trajectory_from(&g, &times, |_, _| 1.0, |_, _| 0.0);
        assert!(ridge_extract(&flat).unwrap().is_empty());
    }

    #[test]
    fn power_law_fits() {
        let ts: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
        let v: Vec<f64> = ts.iter().map(|t| t.powf(-0.5)).collect();
        let fit = fit_power_law(&ts, &v).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        let c = vec![3.0; 20];
        assert!(fit_power_law(&ts, &c).unwrap().exponent.abs() < 1e-14);
        assert!(matches!(fit_power_law(&ts[..4], &v[..4]), Err(Error::Domain(_))));
        let mut neg = v.clone();
        neg[3] = -1.0;
        assert!(matches!(fit_power_law(&ts, &neg), Err(Error::Domain(_))));
    }

    #[test]
    fn catalog_exponents() {
        let cat = EstimateCatalog::new(1, 1.0 / 6.0, 0.5, 0.9, 0.1, 2.0, 0.5).unwrap();
        assert!((cat.get("propagator-v1").unwrap().exponent + 0.25).abs() < 1e-15);
        assert!((cat.get("duhamel-continuous").unwrap().exponent - (2.0 - 1.35)).abs() < 1e-15);
        assert!((p3_threshold(1) - 1.0).abs() < 1e-15);
        assert!((p4_threshold(1) - 1.0 / 6.0).abs() < 1e-15);
        assert!((p4_threshold(4) - 1.0 / 3.0).abs() < 1e-15);
        assert!((p1_threshold(1, 2.0) - 14.0 / 12.0_f64.min(14.0)).abs() < 1.0);
        assert!(EstimateCatalog::new(1, 0.2, 0.5, 0.9, 0.1, 2.0, 0.5).is_err());
        let e = cat.get("propagator-v1").unwrap();
        assert!(e.accepts(&EstimateFit { exponent: -0.26, prefactor: 1.0, r2: 1.0 }));
        assert!(!e.accepts(&EstimateFit { exponent: -0.3, prefactor: 1.0, r2: 1.0 }));
    }

    #[test]
    fn regions() {
        let p = RegionParams { c: 2.0, eps: 1.0 };
        let m = 1;
        let t = 0.09;
        let on = cusp_radius(m, t);
        assert!(Region::W2(Sign::Plus).contains(p, m, (2, 1), t, &[on]));
        assert!(!Region::W2(Sign::Minus).contains(p, m, (2, 1), t, &[0.3]));
        assert!(Region::W3.contains(p, m, (2, 1), t, &[0.0]));
        assert!(Region::W1.contains(p, m, (2, 1), 0.01, &[0.4]));
        assert!(Region::Omega2.contains(p, m, (2, 1), t, &[on * 0.6, on * 0.8]));
        assert!(Region::Omega3.contains(p, m, (2, 1), t, &[0.0, 0.0]));
        assert!(!Region::Omega2.contains(p, m, (2, 1), t, &[0.0, 0.0]));
        assert!(Region::D2.contains(p, m, (2, 1), t, &[on]));
        assert_eq!(Region::Omega2.alphabet(2, 1, (2, 1)).len(), 4);
        assert_eq!(Region::W2(Sign::Plus).alphabet(1, 1, (2, 1)).len(), 2);
    }

    #[test]
    fn writers() {
        let pts = vec![RidgePoint { t: 1.0, snapshot: 3, x: vec![0.5], strength: 2.0 }];
        let mut buf = Vec::new();
        write_ridges_csv(&mut buf, &pts).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x0,strength\n1,0.5,2\n");
        let mut buf = Vec::new();
        write_fit_csv(&mut buf, &[FitReport { id: "a".into(), expected: -0.25, fitted: -0.24, r2: 0.99 }]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("lemma,expected,fitted,r2\n"));
        assert!(gnuplot_ridges("r.csv", 1, "r.png").contains("2*t**(3/2.0)/3"));
    }
}
