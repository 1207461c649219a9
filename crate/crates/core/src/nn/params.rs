//! Named parameter storage with stable integer ids.

use serde::{Deserialize, Serialize};

use crate::rng::Prng;

use super::scalar::Real;
use super::tensor::Tensor;

/// All trainable tensors of a model, in registration order. The id handed
/// back by [`ParamSet::add`] indexes this set, its gradients, and the
/// optimizer moments alike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet<T> {
    names: Vec<String>,
    tensors: Vec<Tensor<T>>,
}

impl<T: Real> ParamSet<T> {
    pub fn new() -> ParamSet<T> {
        ParamSet { names: Vec::new(), tensors: Vec::new() }
    }

    /// Register a tensor initialized uniformly in `[-scale, scale]`.
    pub fn add(&mut self, name: &str, shape: &[usize], rng: &mut Prng, scale: f64) -> usize {
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| T::from_f64((rng.next_f64() * 2.0 - 1.0) * scale))
            .collect();
        self.add_tensor(name, Tensor { shape: shape.to_vec(), data })
    }

    pub fn add_zeros(&mut self, name: &str, shape: &[usize]) -> usize {
        self.add_tensor(name, Tensor::zeros(shape))
    }

    pub fn add_tensor(&mut self, name: &str, tensor: Tensor<T>) -> usize {
        assert!(
            !self.names.iter().any(|n| n == name),
            "duplicate parameter name {name:?}"
        );
        self.names.push(name.to_string());
        self.tensors.push(tensor);
        self.names.len() - 1
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn get(&self, id: usize) -> &Tensor<T> {
        &self.tensors[id]
    }

    pub fn get_mut(&mut self, id: usize) -> &mut Tensor<T> {
        &mut self.tensors[id]
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor<T>)> {
        self.names.iter().map(|s| s.as_str()).zip(self.tensors.iter())
    }

    pub fn scalar_count(&self) -> usize {
        self.tensors.iter().map(|t| t.numel()).sum()
    }

    /// Convert every tensor between precisions (e.g. f32 checkpoints into an
    /// f64 gradient-check run).
    pub fn map_precision<U: Real>(&self) -> ParamSet<U> {
        ParamSet {
            names: self.names.clone(),
            tensors: self.tensors.iter().map(|t| t.map_precision()).collect(),
        }
    }
}

impl<T: Real> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}
