//! Minimal RIFF/WAVE reader and writer, PCM 16-bit mono only.

use super::Waveform;
use crate::error::FormatError;
use crate::scalar::Scalar;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn read_wav<T: Scalar>(path: &Path) -> Result<Waveform<T>, FormatError> {
    let io_err = |e| FormatError::Io { path: path.to_path_buf(), source: e };
    let corrupt = |msg: &str| FormatError::Corrupt { path: path.to_path_buf(), msg: msg.into() };
    let mut r = BufReader::new(File::open(path).map_err(io_err)?);

    let mut hdr = [0u8; 12];
    r.read_exact(&mut hdr).map_err(io_err)?;
    if &hdr[0..4] != b"RIFF" || &hdr[8..12] != b"WAVE" {
        return Err(FormatError::BadMagic { path: path.to_path_buf() });
    }

    let mut sample_rate = 0u32;
    let mut data: Option<Vec<u8>> = None;
    let mut fmt_seen = false;
    loop {
        let mut chunk_hdr = [0u8; 8];
        match r.read_exact(&mut chunk_hdr) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(io_err(e)),
        }
        let size = u32::from_le_bytes([chunk_hdr[4], chunk_hdr[5], chunk_hdr[6], chunk_hdr[7]]) as usize;
        let mut body = vec![0u8; size + (size & 1)]; // chunks are word-aligned
        r.read_exact(&mut body).map_err(io_err)?;
        body.truncate(size);
        match &chunk_hdr[0..4] {
            b"fmt " => {
                if size < 16 {
                    return Err(corrupt("fmt chunk too small"));
                }
                let format = u16::from_le_bytes([body[0], body[1]]);
                let channels = u16::from_le_bytes([body[2], body[3]]);
                sample_rate = u32::from_le_bytes([body[4], body[5], body[6], body[7]]);
                let bits = u16::from_le_bytes([body[14], body[15]]);
                if format != 1 {
                    return Err(corrupt(&format!("unsupported format tag {format}, need PCM")));
                }
                if channels != 1 {
                    return Err(corrupt(&format!("unsupported channel count {channels}, need mono")));
                }
                if bits != 16 {
                    return Err(corrupt(&format!("unsupported bit depth {bits}, need 16")));
                }
                fmt_seen = true;
            }
            b"data" => data = Some(body),
            _ => {} // skip auxiliary chunks
        }
    }
    if !fmt_seen {
        return Err(corrupt("missing fmt chunk"));
    }
    let data = data.ok_or_else(|| corrupt("missing data chunk"))?;
    let scale = 1.0 / 32768.0;
    let samples = data
        .chunks_exact(2)
        .map(|b| T::from_f64(i16::from_le_bytes([b[0], b[1]]) as f64 * scale))
        .collect();
    Ok(Waveform::new(samples, sample_rate))
}

pub fn write_wav<T: Scalar>(path: &Path, w: &Waveform<T>) -> Result<(), FormatError> {
    let io_err = |e| FormatError::Io { path: path.to_path_buf(), source: e };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    let data_len = (w.len() * 2) as u32;

    out.write_all(b"RIFF").map_err(io_err)?;
    out.write_all(&(36 + data_len).to_le_bytes()).map_err(io_err)?;
    out.write_all(b"WAVE").map_err(io_err)?;
    out.write_all(b"fmt ").map_err(io_err)?;
    out.write_all(&16u32.to_le_bytes()).map_err(io_err)?;
    out.write_all(&1u16.to_le_bytes()).map_err(io_err)?; // PCM
    out.write_all(&1u16.to_le_bytes()).map_err(io_err)?; // mono
    out.write_all(&w.sample_rate.to_le_bytes()).map_err(io_err)?;
    out.write_all(&(w.sample_rate * 2).to_le_bytes()).map_err(io_err)?; // byte rate
    out.write_all(&2u16.to_le_bytes()).map_err(io_err)?; // block align
    out.write_all(&16u16.to_le_bytes()).map_err(io_err)?; // bits
    out.write_all(b"data").map_err(io_err)?;
    out.write_all(&data_len.to_le_bytes()).map_err(io_err)?;
    for s in &w.samples {
        let clamped = s.to_f64().clamp(-1.0, 1.0);
        let q = (clamped * 32767.0).round() as i16;
        out.write_all(&q.to_le_bytes()).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
