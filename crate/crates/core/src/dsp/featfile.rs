//! Binary feature-file format.
//!
//! Little-endian: magic "MTLF", u32 version = 1, u8 kind (0 = MEL,
//! 1 = LINEAR), u32 T, u32 F, then T*F float32 values row-major.

use super::{FeatureKind, FeatureMatrix, SpectroConfig};
use crate::error::FormatError;
use crate::scalar::Scalar;
use ndarray::Array2;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"MTLF";
const VERSION: u32 = 1;

pub fn write_feature<T: Scalar>(path: &Path, fm: &FeatureMatrix<T>) -> Result<(), FormatError> {
    let io_err = |e| FormatError::Io { path: path.to_path_buf(), source: e };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&[fm.kind.tag()]).map_err(io_err)?;
    w.write_all(&(fm.frames() as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(fm.bins() as u32).to_le_bytes()).map_err(io_err)?;
    for v in fm.values.iter() {
        w.write_all(&v.to_f32().to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read a feature file; the config snapshot is supplied by the caller (it
/// lives beside the corpus manifest, not inside the binary file).
pub fn read_feature<T: Scalar>(
    path: &Path,
    config: &SpectroConfig,
) -> Result<FeatureMatrix<T>, FormatError> {
    let io_err = |e| FormatError::Io { path: path.to_path_buf(), source: e };
    let file = File::open(path).map_err(io_err)?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(FormatError::BadMagic { path: path.to_path_buf() });
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(io_err)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(FormatError::BadVersion { path: path.to_path_buf(), version });
    }
    let mut kind_byte = [0u8; 1];
    r.read_exact(&mut kind_byte).map_err(io_err)?;
    let kind = FeatureKind::from_tag(kind_byte[0]).ok_or_else(|| FormatError::Corrupt {
        path: path.to_path_buf(),
        msg: format!("unknown kind tag {}", kind_byte[0]),
    })?;
    r.read_exact(&mut u32buf).map_err(io_err)?;
    let t = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf).map_err(io_err)?;
    let f = u32::from_le_bytes(u32buf) as usize;

    let mut raw = vec![0u8; t * f * 4];
    r.read_exact(&mut raw).map_err(io_err)?;
    let mut values = Array2::zeros((t, f));
    for (i, chunk) in raw.chunks_exact(4).enumerate() {
        let bits = [chunk[0], chunk[1], chunk[2], chunk[3]];
        values[(i / f.max(1), i % f.max(1))] = T::from_f32(f32::from_le_bytes(bits));
    }
    Ok(FeatureMatrix { values, kind, config: config.clone() })
}
