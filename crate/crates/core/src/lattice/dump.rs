//! Binary wavefunction dump.
//!
//! Layout (little endian): `b"DSWF"`, `u32` version, `u32` particles,
//! `u32` dims per particle, `u32` points per axis, `f64` half extent, then
//! interleaved `f64` real/imaginary pairs in row-major site order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{GridSpec, WaveFunction};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DSWF";
pub const VERSION: u32 = 1;

pub fn write_dump<W: Write>(psi: &WaveFunction, mut w: W) -> Result<()> {
    let g = psi.grid();
    let mut buf = Vec::with_capacity(28 + 16 * g.len());
    buf.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        g.particles() as u32,
        g.dims_per_particle() as u32,
        g.points() as u32,
    ] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&g.half_extent().to_le_bytes());
    for z in psi.amplitudes() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<WaveFunction> {
    let mut head = [0u8; 28];
    r.read_exact(&mut head)?;
    if &head[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().unwrap());
    if word(4) != VERSION {
        return Err(Error::Format(format!("unsupported version {}", word(4))));
    }
    if word(12) != 1 {
        return Err(Error::Format(format!("{} dims per particle", word(12))));
    }
    let half = f64::from_le_bytes(head[20..28].try_into().unwrap());
    let grid = GridSpec::new(word(8) as usize, word(16) as usize, half)
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut body = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut body)
        .map_err(|_| Error::Format("truncated amplitude block".into()))?;
    let amps = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    WaveFunction::new(grid, amps)
}

pub fn save(psi: &WaveFunction, path: &std::path::Path) -> Result<()> {
    write_dump(psi, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load(path: &std::path::Path) -> Result<WaveFunction> {
    read_dump(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_grid;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = make_grid(2, 8, 3.5).unwrap();
        let psi = WaveFunction::from_fn(g, |x, y| Complex64::new(x.sin(), y * 0.25));
        let mut bytes = Vec::new();
        write_dump(&psi, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 28 + 16 * 64);
        assert_eq!(&bytes[0..4], b"DSWF");
        let back = read_dump(bytes.as_slice()).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_dump(&b"NOPE"[..]), Err(Error::Io(_))));
        let mut bytes = vec![0u8; 28];
        bytes[0..4].copy_from_slice(b"XXXX");
        assert!(matches!(read_dump(bytes.as_slice()), Err(Error::Format(_))));
    }
}
