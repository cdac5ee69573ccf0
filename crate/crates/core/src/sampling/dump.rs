//! Little-endian binary dumps.
//!
//! Header: magic `HYPF`, version `u16`, `d` `u16`, `λ` `f64`, `R` `f64`,
//! seed `u64`, count `u64`. Version 1 carries `count` records of `(s, u_1..u_d)`
//! as `f64`. Version 2 carries `count` scalar `f64` samples of a limit law; its
//! `R` slot holds the truncation point `T0` of the sampler.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::ModelConfig;

use super::{HyperplaneCoord, ProcessSample};

pub const MAGIC: [u8; 4] = *b"HYPF";
pub const VERSION_PROCESS: u16 = 1;
pub const VERSION_SCALAR: u16 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumpHeader {
    pub version: u16,
    pub d: u16,
    pub lambda: f64,
    pub radius: f64,
    pub seed: u64,
    pub count: u64,
}

impl DumpHeader {
    pub const BYTES: usize = 4 + 2 + 2 + 8 + 8 + 8 + 8;

    fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&self.version.to_le_bytes())?;
        w.write_all(&self.d.to_le_bytes())?;
        w.write_all(&self.lambda.to_le_bytes())?;
        w.write_all(&self.radius.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.count.to_le_bytes())?;
        Ok(())
    }

    fn read<R: Read>(r: &mut R) -> Result<Self> {
        let mut buf = [0u8; Self::BYTES];
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if buf[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u16_at = |i: usize| u16::from_le_bytes([buf[i], buf[i + 1]]);
        let b8 = |i: usize| -> [u8; 8] { buf[i..i + 8].try_into().unwrap() };
        let header = Self {
            version: u16_at(4),
            d: u16_at(6),
            lambda: f64::from_le_bytes(b8(8)),
            radius: f64::from_le_bytes(b8(16)),
            seed: u64::from_le_bytes(b8(24)),
            count: u64::from_le_bytes(b8(32)),
        };
        if header.version != VERSION_PROCESS && header.version != VERSION_SCALAR {
            return Err(Error::Format(format!("unknown version {}", header.version)));
        }
        Ok(header)
    }
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|_| Error::Format("truncated payload".into()))?;
    Ok(f64::from_le_bytes(b))
}

/// Writes a process sample. Every hyperplane must carry its direction.
pub fn write_process<W: Write>(w: &mut W, sample: &ProcessSample) -> Result<()> {
    let d = sample.config.d;
    if sample.coords.iter().any(|c| c.u.len() != d) {
        return Err(Error::Format(
            "process dump needs directions; sample with directions enabled".into(),
        ));
    }
    DumpHeader {
        version: VERSION_PROCESS,
        d: d as u16,
        lambda: sample.config.lambda,
        radius: sample.config.radius,
        seed: sample.seed,
        count: sample.coords.len() as u64,
    }
    .write(w)?;
    for c in &sample.coords {
        w.write_all(&c.s.to_le_bytes())?;
        for x in &c.u {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a version-1 dump. The intensity multiplier is not stored and comes back as 1.
pub fn read_process<R: Read>(r: &mut R) -> Result<ProcessSample> {
    let h = DumpHeader::read(r)?;
    if h.version != VERSION_PROCESS {
        return Err(Error::Format(format!(
            "expected a process dump, found version {}",
            h.version
        )));
    }
    let config = ModelConfig::new(h.d as usize, h.lambda, h.radius)
        .map_err(|e| Error::Format(format!("invalid header: {e}")))?;
    let mut coords = Vec::with_capacity(h.count.min(1 << 20) as usize);
    for _ in 0..h.count {
        let s = read_f64(r)?;
        let u = (0..h.d).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
        coords.push(HyperplaneCoord { s, u });
    }
    Ok(ProcessSample {
        config,
        coords,
        seed: h.seed,
        replicate_index: 0,
    })
}

/// Writes scalar samples (version 2); `truncation` lands in the `R` slot.
pub fn write_scalar<W: Write>(
    w: &mut W,
    d: usize,
    lambda: f64,
    truncation: f64,
    seed: u64,
    values: &[f64],
) -> Result<()> {
    DumpHeader {
        version: VERSION_SCALAR,
        d: d as u16,
        lambda,
        radius: truncation,
        seed,
        count: values.len() as u64,
    }
    .write(w)?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_scalar<R: Read>(r: &mut R) -> Result<(DumpHeader, Vec<f64>)> {
    let h = DumpHeader::read(r)?;
    if h.version != VERSION_SCALAR {
        return Err(Error::Format(format!(
            "expected a scalar dump, found version {}",
            h.version
        )));
    }
    let values = (0..h.count).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
    Ok((h, values))
}
