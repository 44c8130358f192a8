//! `CWGRID1` binary grids, CSV export and trajectory directories.
//!
//! Layout: the 7 ASCII bytes `CWGRID1`, then little-endian `u32 n`,
//! `u32 sizes[n]`, `f64 L`, and `f64` interleaved `(re, im)` samples in
//! row-major order.

use super::{Field, Grid, Space, SpectralTrajectory};
use crate::{Error, Result};
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

pub const CWGRID_MAGIC: &[u8; 7] = b"CWGRID1";

pub fn write_cwgrid<W: Write>(mut w: W, grid: &Grid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} values for a grid of {} points",
            values.len(),
            grid.len()
        )));
    }
    w.write_all(CWGRID_MAGIC)?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &s in grid.sizes() {
        w.write_all(&(s as u32).to_le_bytes())?;
    }
    w.write_all(&grid.half_length().to_le_bytes())?;
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_cwgrid<R: Read>(mut r: R) -> Result<(Grid, Vec<Complex64>)> {
    let mut magic = [0u8; 7];
    r.read_exact(&mut magic)?;
    if &magic != CWGRID_MAGIC {
        return Err(Error::Format("missing CWGRID1 magic".into()));
    }
    let n = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&n) {
        return Err(Error::Format(format!("unsupported dimension {n}")));
    }
    let sizes = (0..n)
        .map(|_| read_u32(&mut r).map(|s| s as usize))
        .collect::<Result<Vec<_>>>()?;
    let half_length = read_f64(&mut r)?;
    let grid = Grid::new(&sizes, half_length).map_err(|e| Error::Format(e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        values.push(Complex64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after sample block".into()));
    }
    Ok((grid, values))
}

pub fn write_cwgrid_file(path: &Path, field: &Field) -> Result<()> {
    write_cwgrid(BufWriter::new(File::create(path)?), field.grid(), field.values())
}

/// Read a grid file as a field in the given space.
pub fn read_cwgrid_file(path: &Path, space: Space) -> Result<Field> {
    let (grid, values) = read_cwgrid(BufReader::new(File::open(path)?))?;
    Field::new(grid, values, space)
}

/// One row per sample: zero-based index per axis, then `re,im`.
pub fn write_csv<W: Write>(mut w: W, field: &Field) -> Result<()> {
    let grid = field.grid();
    let n = grid.dim();
    let header: Vec<String> = (0..n)
        .map(|a| format!("i{a}"))
        .chain(["re".to_string(), "im".to_string()])
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (flat, v) in field.values().iter().enumerate() {
        let idx = grid.unravel(flat);
        for &i in &idx[..n] {
            write!(w, "{i},")?;
        }
        writeln!(w, "{},{}", v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Write every snapshot as a physical-space grid file plus `trajectory.csv`
/// listing time, file name and the requested `H^s` norms.
pub fn export_trajectory(
    dir: &Path,
    traj: &SpectralTrajectory,
    sobolev_indices: &[f64],
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let manifest = dir.join("trajectory.csv");
    let mut w = BufWriter::new(File::create(&manifest)?);
    let mut header = vec!["time".to_string(), "file".to_string()];
    header.extend(sobolev_indices.iter().map(|s| format!("hs_{s}")));
    writeln!(w, "{}", header.join(","))?;
    for (i, (t, snap)) in traj.times().iter().zip(traj.snapshots()).enumerate() {
        let name = format!("snap_{i:05}.cwgrid");
        write_cwgrid_file(&dir.join(&name), &snap.to_physical())?;
        write!(w, "{t},{name}")?;
        for &s in sobolev_indices {
            write!(w, ",{}", snap.sobolev_norm(s)?)?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(manifest)
}

/// Read a directory written by [`export_trajectory`]: times and the
/// physical-space snapshots, in manifest order.
pub fn import_trajectory(dir: &Path) -> Result<(Vec<f64>, Vec<Field>)> {
    let manifest = dir.join("trajectory.csv");
    let text = std::fs::read_to_string(&manifest)
        .map_err(|e| Error::Format(format!("{}: {e}", manifest.display())))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty trajectory manifest".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 2 || cols[0] != "time" || cols[1] != "file" {
        return Err(Error::Format(format!("unexpected manifest header `{header}`")));
    }
    let mut times = Vec::new();
    let mut fields = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut parts = line.split(',');
        let t: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format(format!("manifest row {}: bad time", k + 1)))?;
        let file = parts
            .next()
            .ok_or_else(|| Error::Format(format!("manifest row {}: missing file", k + 1)))?;
        times.push(t);
        fields.push(read_cwgrid_file(&dir.join(file), Space::Physical)?);
    }
    if fields.is_empty() {
        return Err(Error::Format("trajectory manifest lists no snapshots".into()));
    }
    Ok((times, fields))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_layout_is_exact() {
        let g = Grid::new(&[8], 2.5).unwrap();
        let values: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, -0.5)).collect();
        let mut buf = Vec::new();
        write_cwgrid(&mut buf, &g, &values).unwrap();
        assert_eq!(&buf[..7], b"CWGRID1");
        assert_eq!(&buf[7..11], &1u32.to_le_bytes());
        assert_eq!(&buf[11..15], &8u32.to_le_bytes());
        assert_eq!(&buf[15..23], &2.5f64.to_le_bytes());
        assert_eq!(&buf[23..31], &0.0f64.to_le_bytes());
        assert_eq!(&buf[31..39], &(-0.5f64).to_le_bytes());
        assert_eq!(buf.len(), 7 + 4 + 4 + 8 + 16 * 8);
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let g = Grid::new(&[8, 16], 1.0 / 3.0).unwrap();
        let values: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64).sin() / 7.0, (i as f64).sqrt()))
            .collect();
        let mut buf = Vec::new();
        write_cwgrid(&mut buf, &g, &values).unwrap();
        let (g2, v2) = read_cwgrid(&buf[..]).unwrap();
        assert_eq!(g, g2);
        for (a, b) in values.iter().zip(&v2) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_cwgrid(&b"CWGRID2...."[..]), Err(Error::Format(_))));
        let g = Grid::new(&[8], 1.0).unwrap();
        let mut buf = Vec::new();
        write_cwgrid(&mut buf, &g, &[Complex64::new(0.0, 0.0); 8]).unwrap();
        buf.push(0);
        assert!(matches!(read_cwgrid(&buf[..]), Err(Error::Format(_))));
        assert!(matches!(read_cwgrid(&buf[..20]), Err(Error::Io(_))));
    }

    #[test]
    fn trajectory_directory_roundtrip() {
        let g = Grid::new(&[16], 2.0).unwrap();
        let times = crate::spectral::uniform_times(1.0, 5);
        let snaps: Vec<Field> = times
            .iter()
            .map(|&t| Field::from_real_fn(&g, |x| t * x[0].cos()).to_spectral())
            .collect();
        let traj = SpectralTrajectory::new(g.clone(), times.clone(), snaps.clone(), snaps.clone()).unwrap();
        let dir = std::env::temp_dir().join(format!("cwtraj-{}", std::process::id()));
        export_trajectory(&dir, &traj, &[0.0, 1.0]).unwrap();
        let (t2, f2) = import_trajectory(&dir).unwrap();
        assert_eq!(t2, times);
        for (a, b) in f2.iter().zip(&snaps) {
            let d = a.to_spectral().sub(b).unwrap().l2_norm();
            assert!(d < 1e-13, "{d}");
        }
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(import_trajectory(&dir).is_err());
    }

    #[test]
    fn csv_rows() {
        let g = Grid::new(&[8, 8], 1.0).unwrap();
        let f = Field::from_real_fn(&g, |x| x[0] + 2.0 * x[1]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i0,i1,re,im");
        assert_eq!(lines.len(), 65);
        assert_eq!(lines[2], "0,1,-2.5,0");
    }
}
