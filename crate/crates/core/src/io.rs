//! `QAFLD1` binary field files.
//!
//! Layout: magic `QAFLD1`, `u8` dimension, `u8` component count, `u32` LE
//! samples per axis, `f64` LE period, then every component's samples as
//! interleaved `(re, im)` `f64` LE pairs in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, VectorField};

pub const MAGIC: &[u8; 6] = b"QAFLD1";

pub fn write_fields<W: Write>(mut w: W, fields: &[ScalarField]) -> Result<()> {
    let grid = *fields
        .first()
        .ok_or_else(|| Error::Format("no components to write".into()))?
        .grid();
    if fields.iter().any(|f| *f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let count = u8::try_from(fields.len())
        .map_err(|_| Error::Format(format!("{} components exceed 255", fields.len())))?;
    let size = u32::try_from(grid.size())
        .map_err(|_| Error::Format(format!("N = {} exceeds u32", grid.size())))?;
    w.write_all(MAGIC)?;
    w.write_all(&[grid.dim() as u8, count])?;
    w.write_all(&size.to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    for f in fields {
        for v in f.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_fields<R: Read>(mut r: R) -> Result<Vec<ScalarField>> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", String::from_utf8_lossy(&magic))));
    }
    let mut head = [0u8; 14];
    r.read_exact(&mut head)
        .map_err(|_| Error::Format("truncated header".into()))?;
    let dim = head[0] as usize;
    let count = head[1] as usize;
    let size = u32::from_le_bytes(head[2..6].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(head[6..14].try_into().unwrap());
    if !size.is_power_of_two() {
        return Err(Error::Format(format!("N = {size} is not a power of two")));
    }
    if count == 0 {
        return Err(Error::Format("component count is zero".into()));
    }
    let grid = Grid::new(dim, size, length).map_err(|e| Error::Format(e.to_string()))?;
    let mut buf = vec![0u8; grid.len() * 16];
    let mut fields = Vec::with_capacity(count);
    for c in 0..count {
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format(format!("truncated data in component {c}")))?;
        let values = buf
            .chunks_exact(16)
            .map(|b| {
                Complex64::new(
                    f64::from_le_bytes(b[..8].try_into().unwrap()),
                    f64::from_le_bytes(b[8..].try_into().unwrap()),
                )
            })
            .collect();
        fields.push(ScalarField::new(grid, values)?);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after last component".into()));
    }
    Ok(fields)
}

pub fn save(path: impl AsRef<Path>, fields: &[ScalarField]) -> Result<()> {
    write_fields(BufWriter::new(File::create(path)?), fields)
}

pub fn load(path: impl AsRef<Path>) -> Result<Vec<ScalarField>> {
    read_fields(BufReader::new(File::open(path)?))
}

pub fn save_vector(path: impl AsRef<Path>, v: &VectorField) -> Result<()> {
    save(path, v.components())
}

/// Loads a file whose component count equals its dimension.
pub fn load_vector(path: impl AsRef<Path>) -> Result<VectorField> {
    VectorField::new(load(path)?)
}
