//! `QSTATE1` binary state files.
//!
//! Layout: magic `QSTATE1\0`, `u32` LE qubit count, `u8` kind (0 state vector,
//! 1 density matrix), then row-major `(re, im)` pairs of LE `f64`.

use std::io::{Read, Write};
use std::path::Path;

use super::linalg::{dim_of, CMatrix, CVector, C64};
use super::state::{DensityMatrix, StateVector};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"QSTATE1\0";

#[derive(Clone, Debug, PartialEq)]
pub enum StoredState {
    Vector(StateVector),
    Density(DensityMatrix),
}

impl StoredState {
    pub fn n(&self) -> usize {
        match self {
            StoredState::Vector(v) => v.n(),
            StoredState::Density(d) => d.n(),
        }
    }

    pub fn into_density(self) -> DensityMatrix {
        match self {
            StoredState::Vector(v) => v.to_density(),
            StoredState::Density(d) => d,
        }
    }
}

fn push_c64(out: &mut Vec<u8>, z: C64) {
    out.extend_from_slice(&z.re.to_le_bytes());
    out.extend_from_slice(&z.im.to_le_bytes());
}

pub fn encode(state: &StoredState) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(state.n() as u32).to_le_bytes());
    match state {
        StoredState::Vector(v) => {
            out.push(0);
            for &z in v.amplitudes().iter() {
                push_c64(&mut out, z);
            }
        }
        StoredState::Density(d) => {
            out.push(1);
            let m = d.matrix();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    push_c64(&mut out, m[(r, c)]);
                }
            }
        }
    }
    out
}

/// Maximum qubit count accepted when decoding, so a corrupt header cannot request huge buffers.
pub const MAX_DECODE_QUBITS: u32 = 14;

pub fn decode(bytes: &[u8]) -> Result<StoredState> {
    if bytes.len() < 13 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing QSTATE1 magic".into()));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if n > MAX_DECODE_QUBITS {
        return Err(Error::Format(format!("qubit count {n} exceeds {MAX_DECODE_QUBITS}")));
    }
    let n = n as usize;
    let kind = bytes[12];
    let d = dim_of(n);
    let count = match kind {
        0 => d,
        1 => d * d,
        k => return Err(Error::Format(format!("unknown kind byte {k}"))),
    };
    let body = &bytes[13..];
    if body.len() != count * 16 {
        return Err(Error::Format(format!("expected {} payload bytes, found {}", count * 16, body.len())));
    }
    let vals: Vec<C64> = body
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(match kind {
        0 => StoredState::Vector(StateVector::new(n, CVector::from_vec(vals))?),
        _ => StoredState::Density(DensityMatrix::new(n, CMatrix::from_row_slice(d, d, &vals))?),
    })
}

pub fn write_state(path: &Path, state: &StoredState) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode(state))?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<StoredState> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode(&buf)
}
