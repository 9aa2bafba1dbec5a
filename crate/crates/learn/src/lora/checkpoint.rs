//! Adapter files: magic, version, d, k, r, alpha, then A and B row-major as
//! little-endian f64.

use nalgebra::DMatrix;

use super::{LoraAdapter, LoraError};

const MAGIC: &[u8; 4] = b"PMLA";
const VERSION: u16 = 1;

pub fn write_adapter(ad: &LoraAdapter) -> Vec<u8> {
    let (d, k) = ad.w0().shape();
    let r = ad.rank();
    let mut out = Vec::with_capacity(38 + 8 * ad.trainable_params());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for n in [d, k, r] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    out.extend_from_slice(&ad.alpha.to_le_bytes());
    for m in [&ad.a, &ad.b] {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.extend_from_slice(&m[(i, j)].to_le_bytes());
            }
        }
    }
    out
}

/// Rebuild an adapter from its file and the frozen matrix it was trained on.
pub fn read_adapter(bytes: &[u8], w0: DMatrix<f64>) -> Result<LoraAdapter, LoraError> {
    let bad = |m: &str| LoraError::Checkpoint(m.to_string());
    if bytes.len() < 38 || &bytes[..4] != MAGIC {
        return Err(bad("not an adapter file"));
    }
    if u16::from_le_bytes([bytes[4], bytes[5]]) != VERSION {
        return Err(bad("unsupported version"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[6 + 8 * i..14 + 8 * i].try_into().expect("8 bytes"));
    let (d, k, r) = (word(0) as usize, word(1) as usize, word(2) as usize);
    let alpha = f64::from_bits(word(3));
    if (d, k) != w0.shape() {
        return Err(bad("frozen matrix shape differs from the file"));
    }
    let body = &bytes[38..];
    if body.len() != 8 * r * (d + k) {
        return Err(bad("parameter block has the wrong length"));
    }
    let f = |i: usize| f64::from_le_bytes(body[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    let a = DMatrix::from_fn(r, k, |i, j| f(i * k + j));
    let b = DMatrix::from_fn(d, r, |i, j| f(r * k + i * r + j));
    LoraAdapter::from_parts(w0, a, b, alpha)
}
