//! Minimal reverse-mode autodiff and parameter plumbing for the model.

pub mod init;
pub mod params;
pub mod tape;

pub use params::{Bound, ParamId, ParamSet};
pub use tape::{Tape, VarId};

/// A sequence living on the tape: value shape is `(len*batch) x dim`,
/// time-major (row `t*batch + b` is frame `t` of batch element `b`).
#[derive(Clone, Copy, Debug)]
pub struct SeqVar {
    pub id: VarId,
    pub len: usize,
    pub batch: usize,
}

impl SeqVar {
    pub fn new(id: VarId, len: usize, batch: usize) -> Self {
        SeqVar { id, len, batch }
    }

    pub fn rows(&self) -> usize {
        self.len * self.batch
    }
}
