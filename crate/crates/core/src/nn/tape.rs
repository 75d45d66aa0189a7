//! Reverse-mode automatic differentiation over 2-D arrays.
//!
//! A [`Tape`] is an append-only arena of nodes; every operation records its
//! parents and enough auxiliary data to replay the chain rule backwards.
//! Sequences are stored time-major as `(len*batch) x dim` matrices so that
//! per-timestep input transforms and convolutions become single matmuls.
//!
//! Gradients are only propagated into nodes that (transitively) depend on a
//! grad-requiring leaf, so feeding large constant inputs is cheap.

use crate::scalar::Scalar;
use ndarray::{s, Array2};

pub type VarId = usize;

enum Op<T: Scalar> {
    Leaf,
    MatMul(VarId, VarId),
    Add(VarId, VarId),
    /// Sum of several same-shaped terms.
    Sum(Vec<VarId>),
    Sub(VarId, VarId),
    Mul(VarId, VarId),
    /// x * mul + add, elementwise with scalar constants.
    Affine(VarId, T, T),
    /// x (n x d) + row vector (1 x d), broadcast over rows.
    AddRow(VarId, VarId),
    Sigmoid(VarId),
    Tanh(VarId),
    Relu(VarId),
    /// Elementwise maximum of two same-shaped arrays.
    MaxElem(VarId, VarId),
    /// x ⊙ mask * scale; mask entries are 0 or 1.
    Dropout(VarId, Array2<T>, T),
    ConcatCols(Vec<VarId>),
    SliceCols(VarId, usize, usize),
    ConcatRows(Vec<VarId>),
    SliceRows(VarId, usize, usize),
    /// Row-shifted copy with zero fill: out[r] = x[r - offset] where valid.
    ShiftRows(VarId, isize),
    /// Row gather: out[i] = table[rows[i]].
    GatherRows(VarId, Vec<usize>),
    SoftmaxRows(VarId),
    /// Additive attention energies.
    /// query: B x d (already projected), keys: (L*B) x d (already projected),
    /// v: d x 1. out: B x L with out[b,i] = tanh(q[b]+k[i*B+b]) . v
    Energies {
        query: VarId,
        keys: VarId,
        v: VarId,
        len: usize,
        batch: usize,
    },
    /// Attention context: weights B x L, values (L*B) x e -> B x e.
    Context {
        weights: VarId,
        values: VarId,
        len: usize,
        batch: usize,
    },
    /// Mean absolute difference against a constant target; output is 1 x 1.
    MeanAbsDiff(VarId, Array2<T>),
}

struct Node<T: Scalar> {
    value: Array2<T>,
    grad: Option<Array2<T>>,
    needs_grad: bool,
    op: Op<T>,
}

pub struct Tape<T: Scalar> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Tape { nodes: Vec::with_capacity(4096) }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: VarId) -> &Array2<T> {
        &self.nodes[id].value
    }

    pub fn grad(&self, id: VarId) -> Option<&Array2<T>> {
        self.nodes[id].grad.as_ref()
    }

    pub fn take_grad(&mut self, id: VarId) -> Option<Array2<T>> {
        self.nodes[id].grad.take()
    }

    fn push(&mut self, value: Array2<T>, needs_grad: bool, op: Op<T>) -> VarId {
        let id = self.nodes.len();
        self.nodes.push(Node { value, grad: None, needs_grad, op });
        id
    }

    fn needs(&self, id: VarId) -> bool {
        self.nodes[id].needs_grad
    }

    fn needs_any(&self, ids: &[VarId]) -> bool {
        ids.iter().any(|&i| self.needs(i))
    }

    /// Trainable leaf.
    pub fn leaf(&mut self, value: Array2<T>) -> VarId {
        self.push(value, true, Op::Leaf)
    }

    /// Constant input; no gradient is propagated into it.
    pub fn input(&mut self, value: Array2<T>) -> VarId {
        self.push(value, false, Op::Leaf)
    }

    pub fn matmul(&mut self, a: VarId, b: VarId) -> VarId {
        let v = self.nodes[a].value.dot(&self.nodes[b].value);
        let ng = self.needs(a) || self.needs(b);
        self.push(v, ng, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: VarId, b: VarId) -> VarId {
        let v = &self.nodes[a].value + &self.nodes[b].value;
        let ng = self.needs(a) || self.needs(b);
        self.push(v, ng, Op::Add(a, b))
    }

    pub fn sum_many(&mut self, parts: &[VarId]) -> VarId {
        assert!(!parts.is_empty());
        let mut v = self.nodes[parts[0]].value.clone();
        for &p in &parts[1..] {
            v += &self.nodes[p].value;
        }
        let ng = self.needs_any(parts);
        self.push(v, ng, Op::Sum(parts.to_vec()))
    }

    pub fn sub(&mut self, a: VarId, b: VarId) -> VarId {
        let v = &self.nodes[a].value - &self.nodes[b].value;
        let ng = self.needs(a) || self.needs(b);
        self.push(v, ng, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: VarId, b: VarId) -> VarId {
        let v = &self.nodes[a].value * &self.nodes[b].value;
        let ng = self.needs(a) || self.needs(b);
        self.push(v, ng, Op::Mul(a, b))
    }

    pub fn affine(&mut self, x: VarId, mul: T, add: T) -> VarId {
        let v = self.nodes[x].value.mapv(|e| e * mul + add);
        let ng = self.needs(x);
        self.push(v, ng, Op::Affine(x, mul, add))
    }

    pub fn add_row(&mut self, x: VarId, bias: VarId) -> VarId {
        debug_assert_eq!(self.nodes[bias].value.nrows(), 1);
        let v = &self.nodes[x].value + &self.nodes[bias].value;
        let ng = self.needs(x) || self.needs(bias);
        self.push(v, ng, Op::AddRow(x, bias))
    }

    pub fn sigmoid(&mut self, x: VarId) -> VarId {
        let one = T::one();
        let v = self.nodes[x].value.mapv(|e| one / (one + (-e).exp()));
        let ng = self.needs(x);
        self.push(v, ng, Op::Sigmoid(x))
    }

    pub fn tanh(&mut self, x: VarId) -> VarId {
        let v = self.nodes[x].value.mapv(|e| e.tanh());
        let ng = self.needs(x);
        self.push(v, ng, Op::Tanh(x))
    }

    pub fn relu(&mut self, x: VarId) -> VarId {
        let v = self.nodes[x].value.mapv(|e| if e > T::zero() { e } else { T::zero() });
        let ng = self.needs(x);
        self.push(v, ng, Op::Relu(x))
    }

    pub fn max_elem(&mut self, a: VarId, b: VarId) -> VarId {
        let va = &self.nodes[a].value;
        let vb = &self.nodes[b].value;
        let mut v = va.clone();
        v.zip_mut_with(vb, |x, &y| {
            if y > *x {
                *x = y;
            }
        });
        let ng = self.needs(a) || self.needs(b);
        self.push(v, ng, Op::MaxElem(a, b))
    }

    /// Inverted dropout: mask entries are {0,1}; scale is 1/(1-p).
    pub fn dropout(&mut self, x: VarId, mask: Array2<T>, scale: T) -> VarId {
        let v = (&self.nodes[x].value * &mask).mapv(|e| e * scale);
        let ng = self.needs(x);
        self.push(v, ng, Op::Dropout(x, mask, scale))
    }

    pub fn concat_cols(&mut self, parts: &[VarId]) -> VarId {
        assert!(!parts.is_empty());
        let rows = self.nodes[parts[0]].value.nrows();
        let total: usize = parts.iter().map(|&p| self.nodes[p].value.ncols()).sum();
        let mut v = Array2::zeros((rows, total));
        let mut off = 0;
        for &p in parts {
            let w = self.nodes[p].value.ncols();
            v.slice_mut(s![.., off..off + w]).assign(&self.nodes[p].value);
            off += w;
        }
        let ng = self.needs_any(parts);
        self.push(v, ng, Op::ConcatCols(parts.to_vec()))
    }

    pub fn slice_cols(&mut self, x: VarId, start: usize, end: usize) -> VarId {
        let v = self.nodes[x].value.slice(s![.., start..end]).to_owned();
        let ng = self.needs(x);
        self.push(v, ng, Op::SliceCols(x, start, end))
    }

    pub fn concat_rows(&mut self, parts: &[VarId]) -> VarId {
        assert!(!parts.is_empty());
        let cols = self.nodes[parts[0]].value.ncols();
        let total: usize = parts.iter().map(|&p| self.nodes[p].value.nrows()).sum();
        let mut v = Array2::zeros((total, cols));
        let mut off = 0;
        for &p in parts {
            let h = self.nodes[p].value.nrows();
            v.slice_mut(s![off..off + h, ..]).assign(&self.nodes[p].value);
            off += h;
        }
        let ng = self.needs_any(parts);
        self.push(v, ng, Op::ConcatRows(parts.to_vec()))
    }

    pub fn slice_rows(&mut self, x: VarId, start: usize, end: usize) -> VarId {
        let v = self.nodes[x].value.slice(s![start..end, ..]).to_owned();
        let ng = self.needs(x);
        self.push(v, ng, Op::SliceRows(x, start, end))
    }

    pub fn shift_rows(&mut self, x: VarId, offset: isize) -> VarId {
        let src = &self.nodes[x].value;
        let (n, d) = (src.nrows(), src.ncols());
        let mut v = Array2::zeros((n, d));
        for r in 0..n {
            let sr = r as isize - offset;
            if sr >= 0 && (sr as usize) < n {
                v.row_mut(r).assign(&src.row(sr as usize));
            }
        }
        let ng = self.needs(x);
        self.push(v, ng, Op::ShiftRows(x, offset))
    }

    pub fn gather_rows(&mut self, table: VarId, rows: Vec<usize>) -> VarId {
        let src = &self.nodes[table].value;
        let d = src.ncols();
        let mut v = Array2::zeros((rows.len(), d));
        for (i, &r) in rows.iter().enumerate() {
            v.row_mut(i).assign(&src.row(r));
        }
        let ng = self.needs(table);
        self.push(v, ng, Op::GatherRows(table, rows))
    }

    pub fn softmax_rows(&mut self, x: VarId) -> VarId {
        let src = &self.nodes[x].value;
        let mut v = src.clone();
        for mut row in v.rows_mut() {
            let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
            let mut sum = T::zero();
            for e in row.iter_mut() {
                *e = (*e - max).exp();
                sum += *e;
            }
            for e in row.iter_mut() {
                *e /= sum;
            }
        }
        let ng = self.needs(x);
        self.push(v, ng, Op::SoftmaxRows(x))
    }

    pub fn attention_energies(
        &mut self,
        query: VarId,
        keys: VarId,
        v: VarId,
        len: usize,
        batch: usize,
    ) -> VarId {
        let q = &self.nodes[query].value;
        let k = &self.nodes[keys].value;
        let vv = &self.nodes[v].value;
        debug_assert_eq!(k.nrows(), len * batch);
        debug_assert_eq!(q.nrows(), batch);
        let d = q.ncols();
        let mut out = Array2::zeros((batch, len));
        for i in 0..len {
            for b in 0..batch {
                let mut e = T::zero();
                let krow = k.row(i * batch + b);
                let qrow = q.row(b);
                for j in 0..d {
                    e += (qrow[j] + krow[j]).tanh() * vv[(j, 0)];
                }
                out[(b, i)] = e;
            }
        }
        let ng = self.needs(query) || self.needs(keys) || self.needs(v);
        self.push(out, ng, Op::Energies { query, keys, v, len, batch })
    }

    pub fn attention_context(
        &mut self,
        weights: VarId,
        values: VarId,
        len: usize,
        batch: usize,
    ) -> VarId {
        let w = &self.nodes[weights].value;
        let vals = &self.nodes[values].value;
        let e = vals.ncols();
        let mut out = Array2::zeros((batch, e));
        for i in 0..len {
            for b in 0..batch {
                let wi = w[(b, i)];
                let src = vals.row(i * batch + b);
                let mut dst = out.row_mut(b);
                for j in 0..e {
                    dst[j] += wi * src[j];
                }
            }
        }
        let ng = self.needs(weights) || self.needs(values);
        self.push(out, ng, Op::Context { weights, values, len, batch })
    }

    pub fn mean_abs_diff(&mut self, pred: VarId, target: Array2<T>) -> VarId {
        let p = &self.nodes[pred].value;
        assert_eq!(p.dim(), target.dim(), "loss shape mismatch");
        let n = T::from_usize(p.len());
        let mut acc = T::zero();
        for (a, b) in p.iter().zip(target.iter()) {
            acc += (*a - *b).abs();
        }
        let v = Array2::from_elem((1, 1), acc / n);
        let ng = self.needs(pred);
        self.push(v, ng, Op::MeanAbsDiff(pred, target))
    }

    /// Run the chain rule from `root` (which must be 1x1) back to the leaves.
    pub fn backward(&mut self, root: VarId) {
        assert_eq!(self.nodes[root].value.dim(), (1, 1), "backward root must be scalar");
        self.nodes[root].grad = Some(Array2::from_elem((1, 1), T::one()));
        for i in (0..=root).rev() {
            if self.nodes[i].grad.is_none() || !self.nodes[i].needs_grad {
                continue;
            }
            let (head, tail) = self.nodes.split_at_mut(i);
            let node = &mut tail[0];
            let g = node.grad.as_ref().unwrap();
            match &node.op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    if head[*a].needs_grad {
                        let da = g.dot(&head[*b].value.t());
                        accumulate(&mut head[*a].grad, da);
                    }
                    if head[*b].needs_grad {
                        let db = head[*a].value.t().dot(g);
                        accumulate(&mut head[*b].grad, db);
                    }
                }
                Op::Add(a, b) => {
                    for &p in &[*a, *b] {
                        if head[p].needs_grad {
                            accumulate(&mut head[p].grad, g.clone());
                        }
                    }
                }
                Op::Sum(parts) => {
                    for &p in parts {
                        if head[p].needs_grad {
                            accumulate(&mut head[p].grad, g.clone());
                        }
                    }
                }
                Op::Sub(a, b) => {
                    if head[*a].needs_grad {
                        accumulate(&mut head[*a].grad, g.clone());
                    }
                    if head[*b].needs_grad {
                        accumulate(&mut head[*b].grad, g.mapv(|e| -e));
                    }
                }
                Op::Mul(a, b) => {
                    if head[*a].needs_grad {
                        let da = g * &head[*b].value;
                        accumulate(&mut head[*a].grad, da);
                    }
                    if head[*b].needs_grad {
                        let db = g * &head[*a].value;
                        accumulate(&mut head[*b].grad, db);
                    }
                }
                Op::Affine(x, m, _) => {
                    if head[*x].needs_grad {
                        let m = *m;
                        accumulate(&mut head[*x].grad, g.mapv(|e| e * m));
                    }
                }
                Op::AddRow(x, bias) => {
                    if head[*x].needs_grad {
                        accumulate(&mut head[*x].grad, g.clone());
                    }
                    if head[*bias].needs_grad {
                        let db = g.sum_axis(ndarray::Axis(0)).insert_axis(ndarray::Axis(0));
                        accumulate(&mut head[*bias].grad, db);
                    }
                }
                Op::Sigmoid(x) => {
                    if head[*x].needs_grad {
                        let one = T::one();
                        let mut dx = node.value.mapv(|y| y * (one - y));
                        dx *= g;
                        accumulate(&mut head[*x].grad, dx);
                    }
                }
                Op::Tanh(x) => {
                    if head[*x].needs_grad {
                        let one = T::one();
                        let mut dx = node.value.mapv(|y| one - y * y);
                        dx *= g;
                        accumulate(&mut head[*x].grad, dx);
                    }
                }
                Op::Relu(x) => {
                    if head[*x].needs_grad {
                        let mut dx = g.clone();
                        dx.zip_mut_with(&head[*x].value, |d, &xv| {
                            if xv <= T::zero() {
                                *d = T::zero();
                            }
                        });
                        accumulate(&mut head[*x].grad, dx);
                    }
                }
                Op::MaxElem(a, b) => {
                    // ties route to the first argument
                    if head[*a].needs_grad {
                        let mut da = g.clone();
                        ndarray::Zip::from(&mut da)
                            .and(&head[*a].value)
                            .and(&head[*b].value)
                            .for_each(|d, &x, &y| {
                                if y > x {
                                    *d = T::zero();
                                }
                            });
                        accumulate(&mut head[*a].grad, da);
                    }
                    if head[*b].needs_grad {
                        let mut db = g.clone();
                        ndarray::Zip::from(&mut db)
                            .and(&head[*a].value)
                            .and(&head[*b].value)
                            .for_each(|d, &x, &y| {
                                if y <= x {
                                    *d = T::zero();
                                }
                            });
                        accumulate(&mut head[*b].grad, db);
                    }
                }
                Op::Dropout(x, mask, scale) => {
                    if head[*x].needs_grad {
                        let s = *scale;
                        let dx = (g * mask).mapv(|e| e * s);
                        accumulate(&mut head[*x].grad, dx);
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut off = 0;
                    for &p in parts {
                        let w = head[p].value.ncols();
                        if head[p].needs_grad {
                            let dp = g.slice(s![.., off..off + w]).to_owned();
                            accumulate(&mut head[p].grad, dp);
                        }
                        off += w;
                    }
                }
                Op::SliceCols(x, start, end) => {
                    if head[*x].needs_grad {
                        let (start, end) = (*start, *end);
                        let dim = head[*x].value.raw_dim();
                        let gslice = g.clone();
                        let gx = head[*x].grad.get_or_insert_with(|| Array2::zeros(dim));
                        let mut view = gx.slice_mut(s![.., start..end]);
                        view += &gslice;
                    }
                }
                Op::ConcatRows(parts) => {
                    let mut off = 0;
                    for &p in parts {
                        let h = head[p].value.nrows();
                        if head[p].needs_grad {
                            let dp = g.slice(s![off..off + h, ..]).to_owned();
                            accumulate(&mut head[p].grad, dp);
                        }
                        off += h;
                    }
                }
                Op::SliceRows(x, start, end) => {
                    if head[*x].needs_grad {
                        let (start, end) = (*start, *end);
                        let dim = head[*x].value.raw_dim();
                        let gslice = g.clone();
                        let gx = head[*x].grad.get_or_insert_with(|| Array2::zeros(dim));
                        let mut view = gx.slice_mut(s![start..end, ..]);
                        view += &gslice;
                    }
                }
                Op::ShiftRows(x, offset) => {
                    if head[*x].needs_grad {
                        let offset = *offset;
                        let n = g.nrows() as isize;
                        let dim = head[*x].value.raw_dim();
                        let gc = g.clone();
                        let gx = head[*x].grad.get_or_insert_with(|| Array2::zeros(dim));
                        for r in 0..n {
                            let sr = r - offset;
                            if sr >= 0 && sr < n {
                                let mut dst = gx.row_mut(sr as usize);
                                dst += &gc.row(r as usize);
                            }
                        }
                    }
                }
                Op::GatherRows(table, rows) => {
                    if head[*table].needs_grad {
                        let dim = head[*table].value.raw_dim();
                        let rows = rows.clone();
                        let gc = g.clone();
                        let gt = head[*table].grad.get_or_insert_with(|| Array2::zeros(dim));
                        for (i, &r) in rows.iter().enumerate() {
                            let mut dst = gt.row_mut(r);
                            dst += &gc.row(i);
                        }
                    }
                }
                Op::SoftmaxRows(x) => {
                    if head[*x].needs_grad {
                        let y = &node.value;
                        let mut dx = Array2::zeros(y.raw_dim());
                        for r in 0..y.nrows() {
                            let yr = y.row(r);
                            let gr = g.row(r);
                            let dot: T = yr.iter().zip(gr.iter()).map(|(&a, &b)| a * b).sum();
                            let mut dr = dx.row_mut(r);
                            for c in 0..yr.len() {
                                dr[c] = yr[c] * (gr[c] - dot);
                            }
                        }
                        accumulate(&mut head[*x].grad, dx);
                    }
                }
                Op::Energies { query, keys, v, len, batch } => {
                    let (query, keys, v, len, batch) = (*query, *keys, *v, *len, *batch);
                    let q = &head[query].value;
                    let k = &head[keys].value;
                    let vv = &head[v].value;
                    let d = q.ncols();
                    let mut dq = Array2::zeros((batch, d));
                    let mut dk = Array2::zeros((len * batch, d));
                    let mut dv = Array2::zeros((d, 1));
                    for i in 0..len {
                        for b in 0..batch {
                            let go = g[(b, i)];
                            if go == T::zero() {
                                continue;
                            }
                            let krow = k.row(i * batch + b);
                            let qrow = q.row(b);
                            for j in 0..d {
                                let t = (qrow[j] + krow[j]).tanh();
                                let dt = (T::one() - t * t) * vv[(j, 0)] * go;
                                dq[(b, j)] += dt;
                                dk[(i * batch + b, j)] += dt;
                                dv[(j, 0)] += t * go;
                            }
                        }
                    }
                    if head[query].needs_grad {
                        accumulate(&mut head[query].grad, dq);
                    }
                    if head[keys].needs_grad {
                        accumulate(&mut head[keys].grad, dk);
                    }
                    if head[v].needs_grad {
                        accumulate(&mut head[v].grad, dv);
                    }
                }
                Op::Context { weights, values, len, batch } => {
                    let (weights, values, len, batch) = (*weights, *values, *len, *batch);
                    let w = &head[weights].value;
                    let vals = &head[values].value;
                    let e = vals.ncols();
                    let mut dw = Array2::zeros((batch, len));
                    let mut dvals = Array2::zeros((len * batch, e));
                    for i in 0..len {
                        for b in 0..batch {
                            let src = vals.row(i * batch + b);
                            let grow = g.row(b);
                            let mut acc = T::zero();
                            let wi = w[(b, i)];
                            let mut dst = dvals.row_mut(i * batch + b);
                            for j in 0..e {
                                acc += grow[j] * src[j];
                                dst[j] += wi * grow[j];
                            }
                            dw[(b, i)] = acc;
                        }
                    }
                    if head[weights].needs_grad {
                        accumulate(&mut head[weights].grad, dw);
                    }
                    if head[values].needs_grad {
                        accumulate(&mut head[values].grad, dvals);
                    }
                }
                Op::MeanAbsDiff(pred, target) => {
                    if head[*pred].needs_grad {
                        let gs = g[(0, 0)];
                        let n = T::from_usize(head[*pred].value.len());
                        let scale = gs / n;
                        let mut dp = head[*pred].value.clone();
                        dp.zip_mut_with(target, |p, &t| {
                            *p = if *p > t {
                                scale
                            } else if *p < t {
                                -scale
                            } else {
                                T::zero()
                            };
                        });
                        accumulate(&mut head[*pred].grad, dp);
                    }
                }
            }
        }
    }
}

fn accumulate<T: Scalar>(slot: &mut Option<Array2<T>>, g: Array2<T>) {
    match slot {
        Some(acc) => *acc += &g,
        None => *slot = Some(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.gen_range(-1.0..1.0))
    }

    /// Central finite difference of `f` w.r.t. one leaf, compared against the
    /// tape gradient. `f` builds the graph and returns the scalar root.
    fn check_grad<F>(leaf_val: Array2<f64>, f: F)
    where
        F: Fn(&mut Tape<f64>, VarId) -> VarId,
    {
        let mut tape = Tape::new();
        let x = tape.leaf(leaf_val.clone());
        let root = f(&mut tape, x);
        tape.backward(root);
        let analytic = tape.grad(x).unwrap().clone();

        let h = 1e-6;
        for i in 0..leaf_val.nrows() {
            for j in 0..leaf_val.ncols() {
                let mut plus = leaf_val.clone();
                plus[(i, j)] += h;
                let mut tp = Tape::new();
                let xp = tp.leaf(plus);
                let rp = f(&mut tp, xp);
                let fp = tp.value(rp)[(0, 0)];

                let mut minus = leaf_val.clone();
                minus[(i, j)] -= h;
                let mut tm = Tape::new();
                let xm = tm.leaf(minus);
                let rm = tm.input(array![[0.0]]); // placeholder to keep ids distinct
                let _ = rm;
                let rm = f(&mut tm, xm);
                let fm = tm.value(rm)[(0, 0)];

                let fd = (fp - fm) / (2.0 * h);
                let an = analytic[(i, j)];
                let denom = an.abs().max(fd.abs()).max(1e-8);
                assert!(
                    ((an - fd).abs() / denom) < 1e-5,
                    "grad mismatch at ({i},{j}): analytic {an}, fd {fd}"
                );
            }
        }
    }

    #[test]
    fn matmul_sigmoid_chain_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = rand_mat(&mut rng, 3, 2);
        let x0 = rand_mat(&mut rng, 2, 3);
        check_grad(x0, move |t, x| {
            let wv = t.input(w.clone());
            let y = t.matmul(x, wv);
            let y = t.sigmoid(y);
            let target = Array2::zeros((2, 2));
            t.mean_abs_diff(y, target)
        });
    }

    #[test]
    fn fused_attention_ops_match_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (len, batch, d, e) = (3, 2, 4, 3);
        let keys = rand_mat(&mut rng, len * batch, d);
        let v = rand_mat(&mut rng, d, 1);
        let vals = rand_mat(&mut rng, len * batch, e);
        let q0 = rand_mat(&mut rng, batch, d);

        // gradient w.r.t. the query through energies -> softmax -> context
        let (keys2, v2, vals2) = (keys.clone(), v.clone(), vals.clone());
        check_grad(q0.clone(), move |t, q| {
            let k = t.leaf(keys2.clone());
            let vv = t.leaf(v2.clone());
            let vl = t.leaf(vals2.clone());
            let en = t.attention_energies(q, k, vv, len, batch);
            let w = t.softmax_rows(en);
            let c = t.attention_context(w, vl, len, batch);
            let target = Array2::zeros((batch, e));
            t.mean_abs_diff(c, target)
        });

        // gradient w.r.t. the keys on the same graph
        check_grad(keys, move |t, k| {
            let q = t.leaf(q0.clone());
            let vv = t.leaf(v.clone());
            let vl = t.leaf(vals.clone());
            let en = t.attention_energies(q, k, vv, len, batch);
            let w = t.softmax_rows(en);
            let c = t.attention_context(w, vl, len, batch);
            let target = Array2::zeros((batch, e));
            t.mean_abs_diff(c, target)
        });
    }

    #[test]
    fn structural_ops_match_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x0 = rand_mat(&mut rng, 6, 3);
        check_grad(x0, |t, x| {
            let a = t.slice_rows(x, 0, 4);
            let b = t.shift_rows(a, 2);
            let c = t.max_elem(a, b);
            let d = t.concat_cols(&[c, a]);
            let e = t.relu(d);
            let f = t.slice_cols(e, 1, 5);
            let g = t.gather_rows(f, vec![0, 3, 3, 1]);
            let target = Array2::from_elem((4, 4), 0.1);
            t.mean_abs_diff(g, target)
        });
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = rand_mat(&mut rng, 5, 7).mapv(|v| v * 10.0);
        let mut tape = Tape::new();
        let xid = tape.input(x);
        let sm = tape.softmax_rows(xid);
        for row in tape.value(sm).rows() {
            let s: f64 = row.sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn no_grad_flows_into_inputs() {
        let mut tape = Tape::new();
        let x = tape.input(array![[1.0, 2.0]]);
        let w = tape.leaf(array![[0.5], [0.25]]);
        let y = tape.matmul(x, w);
        let loss = tape.mean_abs_diff(y, array![[0.0]]);
        tape.backward(loss);
        assert!(tape.grad(x).is_none());
        assert!(tape.grad(w).is_some());
    }
}
