//! Flat binary containers for fields and blocks.
//!
//! Field: `b"ZLF1"`, `u32 d`, `u32 n`, `f64 L`, `u8 rep` (0 physical,
//! 1 spectral), then `n^d` little-endian `(re, im)` pairs, row-major.
//! Block: `b"ZLB1"`, `u32 d`, `u32 n`, `f64 L`, `f64 t0`, `f64 dt`,
//! `u32 m`, then `m·n^d` physical values, time-major.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::block::SpaceTimeBlock;
use super::field::{Field, Rep};
use super::grid::Grid;
use crate::error::{Result, ZlabError};

const FIELD_MAGIC: &[u8; 4] = b"ZLF1";
const BLOCK_MAGIC: &[u8; 4] = b"ZLB1";

fn put_values(w: &mut impl Write, data: &[Complex64]) -> Result<()> {
    let mut buf = Vec::with_capacity(16 * data.len());
    for v in data {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn get_values(r: &mut impl Read, count: usize) -> Result<Vec<Complex64>> {
    let mut buf = vec![0u8; 16 * count];
    r.read_exact(&mut buf)
        .map_err(|_| ZlabError::Format("truncated value section".into()))?;
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}

fn get<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|_| ZlabError::Format("truncated header".into()))?;
    Ok(b)
}

fn get_grid(r: &mut impl Read) -> Result<Grid> {
    let d = u32::from_le_bytes(get(r)?) as usize;
    let n = u32::from_le_bytes(get(r)?) as usize;
    let l = f64::from_le_bytes(get(r)?);
    Grid::new(d, n, l)
}

fn put_grid(w: &mut impl Write, g: &Grid) -> Result<()> {
    w.write_all(&(g.d() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    Ok(())
}

pub fn write_field(w: &mut impl Write, f: &Field) -> Result<()> {
    w.write_all(FIELD_MAGIC)?;
    put_grid(w, f.grid())?;
    w.write_all(&[match f.rep() {
        Rep::Physical => 0u8,
        Rep::Spectral => 1u8,
    }])?;
    put_values(w, f.data())
}

pub fn read_field(r: &mut impl Read) -> Result<Field> {
    if &get::<4>(r)? != FIELD_MAGIC {
        return Err(ZlabError::Format("not a field container".into()));
    }
    let grid = get_grid(r)?;
    let rep = match get::<1>(r)?[0] {
        0 => Rep::Physical,
        1 => Rep::Spectral,
        x => return Err(ZlabError::Format(format!("unknown representation tag {x}"))),
    };
    let data = get_values(r, grid.len())?;
    Field::from_vec(grid, data, rep)
}

pub fn write_block(w: &mut impl Write, b: &SpaceTimeBlock) -> Result<()> {
    w.write_all(BLOCK_MAGIC)?;
    put_grid(w, b.grid())?;
    w.write_all(&b.t0().to_le_bytes())?;
    w.write_all(&b.dt().to_le_bytes())?;
    w.write_all(&(b.len() as u32).to_le_bytes())?;
    put_values(w, b.data())
}

pub fn read_block(r: &mut impl Read) -> Result<SpaceTimeBlock> {
    if &get::<4>(r)? != BLOCK_MAGIC {
        return Err(ZlabError::Format("not a block container".into()));
    }
    let grid = get_grid(r)?;
    let t0 = f64::from_le_bytes(get(r)?);
    let dt = f64::from_le_bytes(get(r)?);
    let m = u32::from_le_bytes(get(r)?) as usize;
    let data = get_values(r, m * grid.len())?;
    SpaceTimeBlock::from_flat(grid, t0, dt, m, data)
}

pub fn save_field(path: &std::path::Path, f: &Field) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_field(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &std::path::Path) -> Result<Field> {
    read_field(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn save_block(path: &std::path::Path, b: &SpaceTimeBlock) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_block(&mut w, b)?;
    w.flush()?;
    Ok(())
}

pub fn load_block(path: &std::path::Path) -> Result<SpaceTimeBlock> {
    read_block(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let g = Grid::new(2, 8, 3.5).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0], x[1] * x[1])).spectral();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 1 + 16 * 64);
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn block_round_trip_and_bad_magic() {
        let g = Grid::new(1, 4, 1.0).unwrap();
        let b = SpaceTimeBlock::from_fn(g, 0.5, 0.1, 3, |t, x| Complex64::new(t, x[0])).unwrap();
        let mut buf = Vec::new();
        write_block(&mut buf, &b).unwrap();
        assert_eq!(read_block(&mut buf.as_slice()).unwrap(), b);
        buf[0] = b'X';
        assert!(read_block(&mut buf.as_slice()).is_err());
    }
}
