use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};

/// Buffered writer for the per-run trace CSV.
///
/// Header: `t,E_original,E_modified,s_r[,s_q],mass[,mass_rho],inner_iters,solves`
/// with values at full double precision (17 significant digits).
pub struct TraceWriter {
    out: BufWriter<File>,
    pair: bool,
}

impl TraceWriter {
    pub fn create(path: &Path, pair: bool) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        if pair {
            writeln!(
                out,
                "t,E_original,E_modified,s_r,s_q,mass,mass_rho,inner_iters,solves"
            )?;
        } else {
            writeln!(out, "t,E_original,E_modified,s_r,mass,inner_iters,solves")?;
        }
        Ok(TraceWriter { out, pair })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn row(
        &mut self,
        t: f64,
        e_original: f64,
        e_modified: f64,
        s_r: f64,
        s_q: Option<f64>,
        mass: f64,
        mass_rho: Option<f64>,
        inner_iters: usize,
        solves: usize,
    ) -> Result<()> {
        if self.pair {
            writeln!(
                self.out,
                "{t:.16e},{e_original:.16e},{e_modified:.16e},{s_r:.16e},{:.16e},{mass:.16e},{:.16e},{inner_iters},{solves}",
                s_q.unwrap_or(f64::NAN),
                mass_rho.unwrap_or(f64::NAN),
            )?;
        } else {
            writeln!(
                self.out,
                "{t:.16e},{e_original:.16e},{e_modified:.16e},{s_r:.16e},{mass:.16e},{inner_iters},{solves}"
            )?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Write a field snapshot: ASCII header
/// `ESAVSNAP v1 <nx> <ny> <lx> <ly> <time>\n` followed by `nx*ny`
/// little-endian IEEE f64 samples, row-major.
pub fn write_snapshot(path: &Path, field: &RealField, time: f64) -> Result<()> {
    let g = field.grid();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "ESAVSNAP v1 {} {} {:.17e} {:.17e} {:.17e}",
        g.nx(),
        g.ny(),
        g.lx(),
        g.ly(),
        time
    )?;
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Read a snapshot back; returns the field and its time stamp.
pub fn read_snapshot(path: &Path) -> Result<(RealField, f64)> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header = Vec::new();
    reader.read_until(b'\n', &mut header)?;
    let header = String::from_utf8(header)
        .map_err(|_| Error::InvalidArgument("snapshot header is not ASCII".into()))?;
    let parts: Vec<&str> = header.trim_end().split(' ').collect();
    if parts.len() != 7 || parts[0] != "ESAVSNAP" || parts[1] != "v1" {
        return Err(Error::InvalidArgument(format!(
            "bad snapshot header: {header:?}"
        )));
    }
    let bad = |what: &str| Error::InvalidArgument(format!("snapshot header field {what}"));
    let nx: usize = parts[2].parse().map_err(|_| bad("nx"))?;
    let ny: usize = parts[3].parse().map_err(|_| bad("ny"))?;
    let lx: f64 = parts[4].parse().map_err(|_| bad("lx"))?;
    let ly: f64 = parts[5].parse().map_err(|_| bad("ly"))?;
    let time: f64 = parts[6].parse().map_err(|_| bad("time"))?;
    let grid = Grid::new(nx, ny, lx, ly)?;
    let mut bytes = vec![0u8; nx * ny * 8];
    reader.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((RealField::from_values(grid, values)?, time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn snapshot_roundtrip_is_bit_exact() {
        let g = Grid::new(16, 32, 2.0 * PI, 1.0).unwrap();
        let f = RealField::from_fn(g, |x, y| (x * 1.7).sin() + y / 3.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.bin");
        write_snapshot(&path, &f, 0.125).unwrap();
        let (back, t) = read_snapshot(&path).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(back.grid(), g);
        assert_eq!(back.values(), f.values());
    }
}
