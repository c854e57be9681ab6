//! Binary `.fld` fields and `.cvol` coefficient volumes, all little-endian.
//!
//! `.fld`: `"SHFL"`, version `u32`, `n1` and `n2` as `u64`, origin and
//! spacing as four `f64`, then `n1·n2` complex values as interleaved
//! `(re, im)` pairs with `b1` fastest.
//!
//! `.cvol`: `"SHCV"`, version, the same grid header, then `|s|` as `u64`
//! followed by the `s` values, `|a|` and the `a` values, then the
//! coefficients in `(b1, b2, s, a)` order with `b1` fastest.

use std::path::Path;

use num_complex::Complex64;
use shearkit_core::coeffspace::{CoefficientVolume, ParamGrid};
use shearkit_core::field::{Grid2D, SampledField2D};

use crate::error::{CliError, Result};

pub const FLD_MAGIC: [u8; 4] = *b"SHFL";
pub const CVOL_MAGIC: [u8; 4] = *b"SHCV";
pub const VERSION: u32 = 1;

fn put_grid(out: &mut Vec<u8>, g: &Grid2D) {
    out.extend_from_slice(&(g.n1 as u64).to_le_bytes());
    out.extend_from_slice(&(g.n2 as u64).to_le_bytes());
    for v in [g.origin[0], g.origin[1], g.spacing[0], g.spacing[1]] {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn put_values(out: &mut Vec<u8>, values: &[Complex64]) {
    out.reserve(16 * values.len());
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

fn header(magic: [u8; 4], capacity: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(capacity);
    out.extend_from_slice(&magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out
}

pub fn encode_field(f: &SampledField2D) -> Vec<u8> {
    let mut out = header(FLD_MAGIC, 48 + 16 * f.values.len());
    put_grid(&mut out, &f.grid);
    put_values(&mut out, &f.values);
    out
}

pub fn encode_volume(v: &CoefficientVolume) -> Vec<u8> {
    let p = &v.pgrid;
    let mut out = header(CVOL_MAGIC, 64 + 8 * (p.ns() + p.na()) + 16 * v.values.len());
    put_grid(&mut out, &p.b_grid);
    for axis in [&p.s_values, &p.a_values] {
        out.extend_from_slice(&(axis.len() as u64).to_le_bytes());
        for x in axis.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    put_values(&mut out, &v.values);
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| CliError::Malformed(format!("file ends early at byte {}", self.buf.len())))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A count that must fit in the remaining bytes at `unit` bytes each.
    fn count(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        let left = (self.buf.len() - self.pos) as u64;
        if n.checked_mul(unit as u64).is_none_or(|b| b > left) {
            return Err(CliError::Malformed(format!("length {n} exceeds the file size")));
        }
        Ok(n as usize)
    }

    fn grid(&mut self) -> Result<Grid2D> {
        let (n1, n2) = (self.u64()?, self.u64()?);
        let origin = [self.f64()?, self.f64()?];
        let spacing = [self.f64()?, self.f64()?];
        let (n1, n2) = (usize::try_from(n1), usize::try_from(n2));
        let (Ok(n1), Ok(n2)) = (n1, n2) else {
            return Err(CliError::Malformed("grid size overflows".into()));
        };
        Ok(Grid2D::new(n1, n2, origin, spacing)?)
    }

    fn values(&mut self, n: usize) -> Result<Vec<Complex64>> {
        let bytes = self.take(n.checked_mul(16).ok_or_else(|| CliError::Malformed("value count overflows".into()))?)?;
        Ok(bytes
            .chunks_exact(16)
            .map(|c| Complex64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
            .collect())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(CliError::Malformed(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn open(buf: &[u8], magic: [u8; 4]) -> Result<Cursor<'_>> {
    let mut c = Cursor { buf, pos: 0 };
    let found = c.take(4).map_err(|_| CliError::BadMagic {
        expected: String::from_utf8_lossy(&magic).into(),
        found: String::from_utf8_lossy(buf).into(),
    })?;
    if found != magic {
        return Err(CliError::BadMagic {
            expected: String::from_utf8_lossy(&magic).into(),
            found: String::from_utf8_lossy(found).into(),
        });
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(CliError::VersionMismatch { found: version, expected: VERSION });
    }
    Ok(c)
}

pub fn decode_field(buf: &[u8]) -> Result<SampledField2D> {
    let mut c = open(buf, FLD_MAGIC)?;
    let grid = c.grid()?;
    let values = c.values(grid.len())?;
    c.finish()?;
    Ok(SampledField2D::new(grid, values)?)
}

pub fn decode_volume(buf: &[u8]) -> Result<CoefficientVolume> {
    let mut c = open(buf, CVOL_MAGIC)?;
    let grid = c.grid()?;
    let mut axes = Vec::with_capacity(2);
    for _ in 0..2 {
        let n = c.count(8)?;
        axes.push((0..n).map(|_| c.f64()).collect::<Result<Vec<f64>>>()?);
    }
    let a_values = axes.pop().unwrap();
    let s_values = axes.pop().unwrap();
    let pgrid = ParamGrid::from_values(grid, s_values, a_values)?;
    let values = c.values(pgrid.len())?;
    c.finish()?;
    Ok(CoefficientVolume::new(pgrid, values)?)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn load_field(path: &Path) -> Result<SampledField2D> {
    decode_field(&read(path)?)
}

pub fn save_field(path: &Path, f: &SampledField2D) -> Result<()> {
    write(path, &encode_field(f))
}

pub fn load_volume(path: &Path) -> Result<CoefficientVolume> {
    decode_volume(&read(path)?)
}

pub fn save_volume(path: &Path, v: &CoefficientVolume) -> Result<()> {
    write(path, &encode_volume(v))
}
