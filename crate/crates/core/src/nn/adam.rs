//! Adam with global-norm clipping and stepwise learning-rate decay.

use serde::{Deserialize, Serialize};

use super::math::global_norm;
use super::params::ParamSet;
use super::scalar::Real;
use super::tensor::Tensor;
use super::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimHyper {
    pub lr0: f64,
    /// Multiplicative decay applied once per `decay_interval` steps.
    pub decay: f64,
    pub decay_interval: u64,
    pub clip_norm: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for OptimHyper {
    fn default() -> Self {
        OptimHyper {
            lr0: 1e-3,
            decay: 0.9,
            decay_interval: 6000,
            clip_norm: 5.0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl OptimHyper {
    /// Effective learning rate at a (1-based) update step.
    pub fn lr_at(&self, step: u64) -> f64 {
        self.lr0 * self.decay.powi((step / self.decay_interval) as i32)
    }
}

/// First/second moment accumulators plus the update counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimState<T> {
    pub hyper: OptimHyper,
    pub step: u64,
    pub m: Vec<Tensor<T>>,
    pub v: Vec<Tensor<T>>,
}

impl<T: Real> OptimState<T> {
    pub fn new(params: &ParamSet<T>, hyper: OptimHyper) -> OptimState<T> {
        let zeros: Vec<Tensor<T>> =
            (0..params.len()).map(|i| Tensor::zeros(params.get(i).shape.as_slice())).collect();
        OptimState { hyper, step: 0, m: zeros.clone(), v: zeros }
    }
}

/// One optimizer update: clip gradients to the global norm, then apply the
/// standard Adam rule at the decayed learning rate. Gradients are consumed
/// (scaled in place by clipping). Returns the effective learning rate.
pub fn adam_step<T: Real>(
    params: &mut ParamSet<T>,
    grads: &mut [Tensor<T>],
    state: &mut OptimState<T>,
) -> Result<f64, NnError> {
    assert_eq!(grads.len(), params.len(), "one gradient per parameter");
    for g in grads.iter() {
        if g.data.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFiniteGradient);
        }
    }

    let norm = global_norm(grads);
    if norm > state.hyper.clip_norm {
        let scale = T::from_f64(state.hyper.clip_norm / norm);
        for g in grads.iter_mut() {
            for v in &mut g.data {
                *v = *v * scale;
            }
        }
    }

    state.step += 1;
    let lr = state.hyper.lr_at(state.step);

    let b1 = T::from_f64(state.hyper.beta1);
    let b2 = T::from_f64(state.hyper.beta2);
    let one_m_b1 = T::ONE - b1;
    let one_m_b2 = T::ONE - b2;
    let corr1 = T::from_f64(1.0 - state.hyper.beta1.powi(state.step.min(1 << 30) as i32));
    let corr2 = T::from_f64(1.0 - state.hyper.beta2.powi(state.step.min(1 << 30) as i32));
    let lr_t = T::from_f64(lr);
    let eps = T::from_f64(state.hyper.eps);

    for pid in 0..params.len() {
        let p = params.get_mut(pid);
        let g = &grads[pid];
        let m = &mut state.m[pid];
        let v = &mut state.v[pid];
        for i in 0..p.data.len() {
            let gi = g.data[i];
            m.data[i] = b1 * m.data[i] + one_m_b1 * gi;
            v.data[i] = b2 * v.data[i] + one_m_b2 * gi * gi;
            let m_hat = m.data[i] / corr1;
            let v_hat = v.data[i] / corr2;
            p.data[i] -= lr_t * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(lr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    fn small_params() -> ParamSet<f64> {
        let mut rng = Prng::seed_from(&[1]);
        let mut ps = ParamSet::new();
        ps.add("w", &[4], &mut rng, 0.5);
        ps
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut ps = small_params();
        let before = ps.get(0).clone();
        let mut st = OptimState::new(&ps, OptimHyper::default());
        let mut grads = vec![Tensor::zeros(&[4])];
        adam_step(&mut ps, &mut grads, &mut st).unwrap();
        assert_eq!(ps.get(0), &before);
        assert_eq!(st.step, 1);
    }

    #[test]
    fn learning_rate_decays_by_0_9_every_6000_steps() {
        let h = OptimHyper::default();
        assert_eq!(h.lr_at(1), 1e-3);
        assert_eq!(h.lr_at(5999), 1e-3);
        assert!((h.lr_at(6000) - 9e-4).abs() < 1e-18);
        assert!((h.lr_at(12000) - 8.1e-4).abs() < 1e-18);
    }

    #[test]
    fn oversized_gradient_is_scaled_to_the_clip_norm() {
        let mut ps = small_params();
        let mut st = OptimState::new(&ps, OptimHyper::default());
        // norm 50 with clip 5.0: scaled by 0.1 before entering the moments
        let mut grads = vec![Tensor::vector(vec![50.0, 0.0, 0.0, 0.0])];
        adam_step(&mut ps, &mut grads, &mut st).unwrap();
        assert!((grads[0].data[0] - 5.0).abs() < 1e-12);
        assert!((st.m[0].data[0] - 0.1 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut ps = small_params();
        let mut st = OptimState::new(&ps, OptimHyper::default());
        let mut grads = vec![Tensor::vector(vec![f64::NAN, 0.0, 0.0, 0.0])];
        assert_eq!(
            adam_step(&mut ps, &mut grads, &mut st).unwrap_err(),
            NnError::NonFiniteGradient
        );
    }
}
