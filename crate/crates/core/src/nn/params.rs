//! Named trainable parameters, enumerable for checkpointing and
//! finite-difference gradient checks.

use crate::nn::tape::{Tape, VarId};
use crate::scalar::Scalar;
use ndarray::Array2;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamId(pub usize);

pub struct ParamSet<T: Scalar> {
    names: Vec<String>,
    values: Vec<Array2<T>>,
    by_name: HashMap<String, usize>,
}

impl<T: Scalar> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ParamSet<T> {
    pub fn new() -> Self {
        ParamSet { names: Vec::new(), values: Vec::new(), by_name: HashMap::new() }
    }

    pub fn register(&mut self, name: impl Into<String>, value: Array2<T>) -> ParamId {
        let name = name.into();
        assert!(!self.by_name.contains_key(&name), "duplicate parameter name {name}");
        let id = self.values.len();
        self.by_name.insert(name.clone(), id);
        self.names.push(name);
        self.values.push(value);
        ParamId(id)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Array2<T> {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Array2<T> {
        &mut self.values[id.0]
    }

    pub fn lookup(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied().map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array2<T>)> {
        self.names.iter().map(|n| n.as_str()).zip(self.values.iter())
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    /// Total number of scalar parameters.
    pub fn num_scalars(&self) -> usize {
        self.values.iter().map(|v| v.len()).sum()
    }

    /// Convert every array to another scalar type (used for f64 grad checks).
    pub fn cast<U: Scalar>(&self) -> ParamSet<U> {
        let mut out = ParamSet::new();
        for (name, value) in self.iter() {
            out.register(name, value.mapv(|x| U::from_f64(x.to_f64())));
        }
        out
    }
}

/// Per-forward-pass binding of every parameter to a tape leaf.
pub struct Bound {
    vars: Vec<VarId>,
}

impl Bound {
    pub fn bind<T: Scalar>(params: &ParamSet<T>, tape: &mut Tape<T>) -> Bound {
        let vars = params.values.iter().map(|v| tape.leaf(v.clone())).collect();
        Bound { vars }
    }

    pub fn var(&self, id: ParamId) -> VarId {
        self.vars[id.0]
    }

    /// Collect accumulated gradients per parameter; zero arrays where a
    /// parameter did not participate in the graph.
    pub fn grads<T: Scalar>(&self, params: &ParamSet<T>, tape: &mut Tape<T>) -> Vec<Array2<T>> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                tape.take_grad(v)
                    .unwrap_or_else(|| Array2::zeros(params.values[i].raw_dim()))
            })
            .collect()
    }
}
