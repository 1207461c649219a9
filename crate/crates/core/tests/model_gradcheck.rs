//! Finite-difference verification of the full composite loss at f64, over
//! every parameter tensor of the model (and of the property-signatures
//! baseline). The analytic gradients come from one backward pass; the
//! numeric ones from central differences with the loss re-evaluated from
//! scratch, so the two paths share nothing but the parameter values.

use lasynth_core::datagen::IoPair;
use lasynth_core::model::{forward_teacher_forced, Baseline, ModelConfig, ModelParams};
use lasynth_core::nn::{grad_check, Graph, ParamSet};

fn tiny_episode() -> (Vec<u32>, Vec<IoPair>) {
    let tokens = vec![3, 9, 14, 2, 17];
    let pairs = vec![
        (vec![1, -2, 0], vec![1, 2, 0]),
        (vec![3, 0, -4], vec![3, 1, -4]),
    ];
    (tokens, pairs)
}

fn check(cfg: ModelConfig, seed: u64) {
    let mut mp: ModelParams<f64> = ModelParams::init(cfg, seed);
    let (tokens, pairs) = tiny_episode();

    let mut g = Graph::new();
    let out = forward_teacher_forced(&mut g, &mp, &tokens, &pairs).unwrap();
    let analytic = g.backward(out.total, &mp.set);
    assert!(
        (out.report.total - (out.report.l_prog + out.report.l_exec + out.report.l_op)).abs()
            < 1e-9,
        "loss components sum to the total"
    );

    let arch = std::mem::replace(&mut mp.set, ParamSet::new());
    let mut set = arch;
    let report = grad_check(
        &mut set,
        &analytic,
        |s| {
            let probe = ModelParams { set: s.clone(), ..mp.clone() };
            let mut g = Graph::new();
            forward_teacher_forced(&mut g, &probe, &tokens, &pairs).unwrap().report.total
        },
        1e-5,
    );
    assert!(
        report.passes(1e-4),
        "max rel err {:.3e} at {} over {} coords",
        report.max_rel_err,
        report.worst,
        report.checked
    );
}

#[test]
fn full_model_composite_loss_matches_finite_differences() {
    check(ModelConfig::tiny(), 31);
}

#[test]
fn property_signatures_loss_matches_finite_differences() {
    check(
        ModelConfig { baseline: Baseline::PropertySignatures, ..ModelConfig::tiny() },
        32,
    );
}
