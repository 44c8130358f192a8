//! Initial data: smooth bumps, jumps across `x₁ = 0` (A1) and profiles
//! homogeneous of degree zero near the origin (A2).
//!
//! Spec files are key-value text:
//!
//! ```text
//! family = A1            # A1 | A2 | smooth
//! slots = 3
//!
//! [slot0]
//! right = bump center=0 width=2 amp=1     # x₁ ≥ 0 side
//! left = zero                             # x₁ < 0 side
//!
//! [slot1]
//! value = zero
//!
//! [slot2]                                 # A2 slot
//! radial = bump center=0,0 width=1 amp=1
//! angular = 1 ; 0.5 w1 ; 0.25 w1^2 w2
//! ```
//!
//! Several bumps are separated by `;`. Angular terms are a coefficient times
//! powers of the unit-vector components `w1, w2, w3`.

use crate::keyvalue::KeyValues;
use crate::spectral::{Field, Grid, Space};
use crate::{Error, Result};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// `amp · exp(1 − 1/(1 − (r/width)²))` inside `r < width`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(center: Vec<f64>, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Parameter(format!("bump width must be positive, got {width}")));
        }
        Ok(Self {
            center,
            width,
            amplitude,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| (xi - self.center.get(i).copied().unwrap_or(0.0)).powi(2))
            .sum();
        let s = r2 / (self.width * self.width);
        if s >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - s)).exp()
        }
    }

    /// Largest distance from the origin at which the bump is nonzero.
    pub fn reach(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt() + self.width
    }

    fn parse(src: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parameter(format!("bump `{src}`: {m}"));
        let mut words = src.split_whitespace();
        if words.next() != Some("bump") {
            return Err(bad("expected `bump key=value ...`"));
        }
        let (mut center, mut width, mut amp) = (vec![0.0], None, 1.0);
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("not a number"));
            match k {
                "center" => center = v.split(',').map(num).collect::<Result<_>>()?,
                "width" => width = Some(num(v)?),
                "amp" => amp = num(v)?,
                _ => return Err(bad(&format!("unknown key `{k}`"))),
            }
        }
        Self::new(center, width.ok_or_else(|| bad("missing width"))?, amp)
    }

    fn render(&self) -> String {
        let c: Vec<String> = self.center.iter().map(|v| v.to_string()).collect();
        format!("bump center={} width={} amp={}", c.join(","), self.width, self.amplitude)
    }
}

fn sum_bumps(bumps: &[Bump], x: &[f64]) -> f64 {
    bumps.iter().map(|b| b.eval(x)).sum()
}

fn parse_bumps(src: &str) -> Result<Vec<Bump>> {
    if src.trim() == "zero" {
        return Ok(Vec::new());
    }
    src.split(';').map(|s| Bump::parse(s.trim())).collect()
}

fn render_bumps(bumps: &[Bump]) -> String {
    if bumps.is_empty() {
        "zero".into()
    } else {
        bumps.iter().map(Bump::render).collect::<Vec<_>>().join(" ; ")
    }
}

/// `coefficient · Π ω_i^{e_i}` on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularTerm {
    pub coefficient: f64,
    pub powers: [u32; 3],
}

impl AngularTerm {
    pub fn eval(&self, omega: &[f64]) -> f64 {
        let mut v = self.coefficient;
        for (i, &e) in self.powers.iter().enumerate() {
            if e > 0 {
                v *= omega.get(i).copied().unwrap_or(0.0).powi(e as i32);
            }
        }
        v
    }

    /// Mean over the unit sphere `S^{n-1}` (for `n = 1`, over `{±1}`).
    pub fn sphere_average(&self, n: usize) -> f64 {
        let e = &self.powers[..n];
        if self.powers[n..].iter().any(|&p| p > 0) {
            return 0.0;
        }
        if e.iter().any(|&p| p % 2 == 1) {
            return 0.0;
        }
        let total: u32 = e.iter().sum();
        let nf = n as f64;
        let half = 0.5f64;
        let ln = ln_gamma(nf / 2.0) - ln_gamma((nf + f64::from(total)) / 2.0)
            + e.iter()
                .map(|&p| ln_gamma((f64::from(p) + 1.0) / 2.0) - ln_gamma(half))
                .sum::<f64>();
        self.coefficient * ln.exp()
    }

    fn parse(src: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parameter(format!("angular term `{src}`: {m}"));
        let mut words = src.split_whitespace();
        let coefficient = words
            .next()
            .ok_or_else(|| bad("empty term"))?
            .parse::<f64>()
            .map_err(|_| bad("coefficient is not a number"))?;
        let mut powers = [0u32; 3];
        for w in words {
            let (var, exp) = match w.split_once('^') {
                Some((v, e)) => (v, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                None => (w, 1),
            };
            let axis = match var {
                "w1" => 0,
                "w2" => 1,
                "w3" => 2,
                _ => return Err(bad(&format!("unknown factor `{var}`"))),
            };
            powers[axis] += exp;
        }
        Ok(Self {
            coefficient,
            powers,
        })
    }

    fn render(&self) -> String {
        let mut s = self.coefficient.to_string();
        for (i, &p) in self.powers.iter().enumerate() {
            match p {
                0 => {}
                1 => s.push_str(&format!(" w{}", i + 1)),
                _ => s.push_str(&format!(" w{}^{}", i + 1, p)),
            }
        }
        s
    }
}

/// One data slot `φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotSpec {
    Zero,
    Smooth(Vec<Bump>),
    /// `φ = left + (right − left)·E(x₁)`, with `E(0) = 1`.
    Jump { right: Vec<Bump>, left: Vec<Bump> },
    /// `radial(x) · Σ angular(x/|x|)`.
    Homogeneous { radial: Bump, angular: Vec<AngularTerm> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    A1,
    A2,
    Smooth,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a1" => Ok(Family::A1),
            "a2" => Ok(Family::A2),
            "smooth" => Ok(Family::Smooth),
            other => Err(Error::Parameter(format!("unknown data family `{other}`"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::A1 => "A1",
            Family::A2 => "A2",
            Family::Smooth => "smooth",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialDataSpec {
    pub family: Family,
    pub slots: Vec<SlotSpec>,
}

impl InitialDataSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_key_values(&KeyValues::parse(text)?)
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let family: Family = kv.require("family")?.parse()?;
        let count: usize = kv
            .parse_value("slots")?
            .ok_or_else(|| Error::Parameter("missing key `slots`".into()))?;
        let mut slots = Vec::with_capacity(count);
        for j in 0..count {
            let key = |k: &str| format!("slot{j}.{k}");
            let slot = if let Some(v) = kv.get(&key("value")) {
                match parse_bumps(v)? {
                    b if b.is_empty() => SlotSpec::Zero,
                    b => SlotSpec::Smooth(b),
                }
            } else if kv.get(&key("right")).is_some() || kv.get(&key("left")).is_some() {
                SlotSpec::Jump {
                    right: parse_bumps(kv.get(&key("right")).unwrap_or("zero"))?,
                    left: parse_bumps(kv.get(&key("left")).unwrap_or("zero"))?,
                }
            } else if let Some(r) = kv.get(&key("radial")) {
                let mut radial = parse_bumps(r)?;
                if radial.len() != 1 {
                    return Err(Error::Parameter(format!("slot{j}: radial needs exactly one bump")));
                }
                let angular = kv
                    .get(&key("angular"))
                    .unwrap_or("1")
                    .split(';')
                    .map(|s| AngularTerm::parse(s.trim()))
                    .collect::<Result<Vec<_>>>()?;
                SlotSpec::Homogeneous {
                    radial: radial.remove(0),
                    angular,
                }
            } else {
                SlotSpec::Zero
            };
            match (&slot, family) {
                (SlotSpec::Jump { .. }, Family::A2 | Family::Smooth)
                | (SlotSpec::Homogeneous { .. }, Family::A1 | Family::Smooth) => {
                    return Err(Error::Parameter(format!(
                        "slot{j} does not belong to the {family} family"
                    )))
                }
                _ => {}
            }
            slots.push(slot);
        }
        Ok(Self { family, slots })
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("family", self.family.to_string());
        kv.set("slots", self.slots.len().to_string());
        for (j, s) in self.slots.iter().enumerate() {
            let key = |k: &str| format!("slot{j}.{k}");
            match s {
                SlotSpec::Zero => kv.set(key("value"), "zero"),
                SlotSpec::Smooth(b) => kv.set(key("value"), render_bumps(b)),
                SlotSpec::Jump { right, left } => {
                    kv.set(key("right"), render_bumps(right));
                    kv.set(key("left"), render_bumps(left));
                }
                SlotSpec::Homogeneous { radial, angular } => {
                    kv.set(key("radial"), radial.render());
                    kv.set(
                        key("angular"),
                        angular.iter().map(AngularTerm::render).collect::<Vec<_>>().join(" ; "),
                    );
                }
            }
        }
        kv
    }

    /// Field for slot `j`, or zero if the spec has fewer slots.
    pub fn field(&self, j: usize, grid: &Grid) -> Result<Field> {
        match self.slots.get(j) {
            None => Ok(Field::zeros(grid, Space::Physical)),
            Some(s) => make_slot(s, grid),
        }
    }

    /// Soft problems: A1 slots without a jump at the origin, data reaching
    /// past half the box.
    pub fn warnings(&self, grid: &Grid) -> Vec<String> {
        let mut out = Vec::new();
        let origin = vec![0.0; grid.dim()];
        for (j, s) in self.slots.iter().enumerate() {
            if let SlotSpec::Jump { right, left } = s {
                if (sum_bumps(right, &origin) - sum_bumps(left, &origin)).abs() < 1e-12 {
                    out.push(format!("slot{j}: left and right values agree at x1 = 0, no jump"));
                }
            }
            let reach = match s {
                SlotSpec::Zero => 0.0,
                SlotSpec::Smooth(b) => b.iter().map(Bump::reach).fold(0.0, f64::max),
                SlotSpec::Jump { right, left } => {
                    right.iter().chain(left).map(Bump::reach).fold(0.0, f64::max)
                }
                SlotSpec::Homogeneous { radial, .. } => radial.reach(),
            };
            if reach > grid.half_length() / 2.0 {
                out.push(format!(
                    "slot{j}: support radius {reach} exceeds half the box half-length {}",
                    grid.half_length() / 2.0
                ));
            }
        }
        out
    }
}

pub fn make_slot(slot: &SlotSpec, grid: &Grid) -> Result<Field> {
    match slot {
        SlotSpec::Zero => Ok(Field::zeros(grid, Space::Physical)),
        SlotSpec::Smooth(b) => Ok(make_smooth(b, grid)),
        SlotSpec::Jump { .. } => make_a1(slot, grid),
        SlotSpec::Homogeneous { .. } => make_a2(slot, grid),
    }
}

pub fn make_smooth(bumps: &[Bump], grid: &Grid) -> Field {
    Field::from_real_fn(grid, |x| sum_bumps(bumps, x))
}

/// Jump across `x₁ = 0`; grid points with `x₁ = 0` take the right limit.
pub fn make_a1(slot: &SlotSpec, grid: &Grid) -> Result<Field> {
    let SlotSpec::Jump { right, left } = slot else {
        return Err(Error::Domain("make_a1 needs a jump slot".into()));
    };
    Ok(Field::from_real_fn(grid, |x| {
        if x[0] >= 0.0 {
            sum_bumps(right, x)
        } else {
            sum_bumps(left, x)
        }
    }))
}

/// Pointwise `radial(x)·g(x/|x|)`, with the sphere average of `g` at `x = 0`.
pub fn make_a2(slot: &SlotSpec, grid: &Grid) -> Result<Field> {
    let SlotSpec::Homogeneous { radial, angular } = slot else {
        return Err(Error::Domain("make_a2 needs a homogeneous-profile slot".into()));
    };
    let n = grid.dim();
    let at_origin: f64 = angular.iter().map(|a| a.sphere_average(n)).sum();
    Ok(Field::from_real_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let g = if r == 0.0 {
            at_origin
        } else {
            let omega: Vec<f64> = x.iter().map(|v| v / r).collect();
            angular.iter().map(|a| a.eval(&omega)).sum()
        };
        radial.eval(x) * g
    }))
}

/// Split the spectrum of a 1-D jump field as
/// `φ̂ = ½(φ̂₁ + φ̂₂) − (i/2)·H(φ̂₁ − φ̂₂)`, with `H` the discrete Hilbert
/// transform taken along the frequency index.
///
/// The box offset `x = −L` puts the interface at index `N/2`, so the
/// sequence is modulated by `(−1)^k` before and after `H`. Returns
/// `(even_part, hilbert_part)` as spectral fields whose sum is the DFT of
/// [`make_a1`]: the two samples where the discrete sign vanishes (`x = 0`
/// and `x = −L`) are corrected explicitly.
pub fn heaviside_fourier_split(slot: &SlotSpec, grid: &Grid) -> Result<(Field, Field)> {
    let SlotSpec::Jump { right, left } = slot else {
        return Err(Error::Domain("Heaviside split needs a jump slot".into()));
    };
    if grid.dim() != 1 {
        return Err(Error::Dimension("Heaviside split is one-dimensional".into()));
    }
    let n = grid.sizes()[0];
    let phi1 = make_smooth(right, grid).dft_forward()?;
    let phi2 = make_smooth(left, grid).dft_forward()?;
    let even = phi1.add(&phi2)?.scale(0.5);
    let diff = phi1.sub(&phi2)?;

    let parity = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let modulated: Vec<Complex64> = diff
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * parity(k))
        .collect();
    let h = Field::new(grid.clone(), modulated, Space::Physical)?.hilbert_transform_1d()?;

    let jump = |x: f64| sum_bumps(right, &[x]) - sum_bumps(left, &[x]);
    let norm = (n as f64).sqrt();
    let at_zero = 0.5 * jump(0.0) / norm;
    let at_edge = -0.5 * jump(-grid.half_length()) / norm;
    let values = h
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let p = parity(k);
            Complex64::new(0.0, -0.5) * v * p + at_zero * p + at_edge
        })
        .collect();
    let hilbert = Field::new(grid.clone(), values, Space::Spectral)?;
    Ok((even, hilbert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heaviside_bump() -> SlotSpec {
        SlotSpec::Jump {
            right: vec![Bump::new(vec![0.0], 2.0, 1.0).unwrap()],
            left: vec![],
        }
    }

    #[test]
    fn bump_shape() {
        let b = Bump::new(vec![0.0], 2.0, 3.0).unwrap();
        assert_eq!(b.eval(&[0.0]), 3.0);
        assert_eq!(b.eval(&[2.0]), 0.0);
        assert_eq!(b.eval(&[-5.0]), 0.0);
        assert!(b.eval(&[1.0]) > 0.0 && b.eval(&[1.0]) < 3.0);
        assert!(Bump::new(vec![0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn a1_jump_and_right_limit() {
        let g = Grid::new(&[64], 8.0).unwrap();
        let f = make_a1(&heaviside_bump(), &g).unwrap();
        let j0 = 32; // x = 0
        assert_eq!(g.coordinate(0, j0), 0.0);
        assert_eq!(f.values()[j0].re, 1.0);
        assert_eq!(f.values()[j0 - 1].re, 0.0);
    }

    #[test]
    fn a1_jump_along_interface_2d() {
        let g = Grid::new(&[32, 32], 4.0).unwrap();
        let right = vec![Bump::new(vec![0.0, 0.0], 1.5, 2.0).unwrap()];
        let left = vec![Bump::new(vec![0.0, 0.5], 1.0, 0.5).unwrap()];
        let slot = SlotSpec::Jump {
            right: right.clone(),
            left: left.clone(),
        };
        let f = make_a1(&slot, &g).unwrap();
        for j in 0..32 {
            let at = g.ravel(&[16, j]);
            let x = g.point(at);
            let want = sum_bumps(&right, &x[..2]);
            assert!((f.values()[at].re - want).abs() < 1e-14);
            let before = g.ravel(&[15, j]);
            let y = g.point(before);
            assert!((f.values()[before].re - sum_bumps(&left, &y[..2])).abs() < 1e-14);
        }
    }

    #[test]
    fn a2_profile_at_origin_is_sphere_average() {
        let g = Grid::new(&[16, 16], 2.0).unwrap();
        let slot = SlotSpec::Homogeneous {
            radial: Bump::new(vec![0.0, 0.0], 1.0, 1.0).unwrap(),
            angular: vec![
                AngularTerm { coefficient: 1.0, powers: [0, 0, 0] },
                AngularTerm { coefficient: 2.0, powers: [1, 0, 0] },
                AngularTerm { coefficient: 4.0, powers: [2, 0, 0] },
            ],
        };
        let f = make_a2(&slot, &g).unwrap();
        let origin = g.ravel(&[8, 8]);
        // mean of 1 + 2ω₁ + 4ω₁² over the circle is 1 + 0 + 2
        assert!((f.values()[origin].re - 3.0).abs() < 1e-12);
        let t = AngularTerm { coefficient: 1.0, powers: [2, 2, 0] };
        assert!((t.sphere_average(3) - 1.0 / 15.0).abs() < 1e-14);
        assert!((t.sphere_average(2) - 1.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn a2_constant_profile_is_plain_bump() {
        let g = Grid::new(&[16, 16], 2.0).unwrap();
        let radial = Bump::new(vec![0.0, 0.0], 1.0, 1.0).unwrap();
        let slot = SlotSpec::Homogeneous {
            radial: radial.clone(),
            angular: vec![AngularTerm { coefficient: 1.0, powers: [0, 0, 0] }],
        };
        let f = make_a2(&slot, &g).unwrap();
        assert_eq!(f, make_smooth(&[radial], &g));
    }

    #[test]
    fn split_recombines_to_dft() {
        let g = Grid::new(&[256], 8.0).unwrap();
        let slot = SlotSpec::Jump {
            right: vec![Bump::new(vec![0.3], 2.0, 1.0).unwrap()],
            left: vec![Bump::new(vec![-0.5], 1.5, -0.7).unwrap()],
        };
        let (even, hilb) = heaviside_fourier_split(&slot, &g).unwrap();
        let direct = make_a1(&slot, &g).unwrap().dft_forward().unwrap();
        let sum = even.add(&hilb).unwrap();
        let err = sum.sub(&direct).unwrap().l2_norm() / direct.l2_norm();
        assert!(err < 1e-12, "relative error {err}");
    }

    #[test]
    fn split_without_jump_has_no_hilbert_part() {
        let g = Grid::new(&[128], 8.0).unwrap();
        let b = vec![Bump::new(vec![0.0], 2.0, 1.0).unwrap()];
        let slot = SlotSpec::Jump {
            right: b.clone(),
            left: b,
        };
        let (_, hilb) = heaviside_fourier_split(&slot, &g).unwrap();
        assert!(hilb.max_abs() < 1e-12);
        assert!(matches!(
            heaviside_fourier_split(&SlotSpec::Zero, &g),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn spec_file_roundtrip() {
        let text = "family = A1\nslots = 3\n[slot0]\nright = bump center=0 width=2 amp=1\nleft = zero\n\
                    [slot1]\nvalue = zero\n[slot2]\nright = bump center=0 width=4 amp=15\n";
        let spec = InitialDataSpec::parse(text).unwrap();
        assert_eq!(spec.family, Family::A1);
        assert_eq!(spec.slots.len(), 3);
        assert_eq!(spec.slots[1], SlotSpec::Zero);
        let again = InitialDataSpec::from_key_values(&spec.to_key_values()).unwrap();
        assert_eq!(again, spec);
        let bad = "family = smooth\nslots = 1\n[slot0]\nright = bump width=1\n";
        assert!(InitialDataSpec::parse(bad).is_err());
        let a2 = "family = A2\nslots = 1\n[slot0]\nradial = bump center=0,0 width=1 amp=1\nangular = 1 ; 0.5 w1^2 w2\n";
        let spec = InitialDataSpec::parse(a2).unwrap();
        assert_eq!(InitialDataSpec::from_key_values(&spec.to_key_values()).unwrap(), spec);
    }

    #[test]
    fn warnings_flag_missing_jump_and_wide_support() {
        let g = Grid::new(&[64], 2.0).unwrap();
        let b = vec![Bump::new(vec![0.0], 2.0, 1.0).unwrap()];
        let spec = InitialDataSpec {
            family: Family::A1,
            slots: vec![SlotSpec::Jump { right: b.clone(), left: b }],
        };
        let w = spec.warnings(&g);
        assert_eq!(w.len(), 2);
    }
}
