//! Central-difference gradient verification (f64 only; f32 has too little
//! precision for the quotient).

use super::params::ParamSet;
use super::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub checked: usize,
    /// `name[flat_index]` of the worst coordinate.
    pub worst: String,
    /// Worst relative error per parameter tensor.
    pub per_param: Vec<(String, f64)>,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_err <= tolerance
    }
}

/// Compare `analytic` gradients against central differences of `eval` over
/// every parameter coordinate. `eval` must be a pure function of the
/// parameter values. Relative error uses `max(|a|, |b|, 1e-4)` in the
/// denominator: below that scale the central difference itself drowns in
/// f64 cancellation noise (the subtraction of two O(1) losses), so the
/// comparison is error-per-1e-4-gradient-unit there.
pub fn grad_check<F>(
    params: &mut ParamSet<f64>,
    analytic: &[Tensor<f64>],
    mut eval: F,
    h: f64,
) -> GradCheckReport
where
    F: FnMut(&ParamSet<f64>) -> f64,
{
    assert_eq!(analytic.len(), params.len());
    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        checked: 0,
        worst: String::new(),
        per_param: Vec::new(),
    };
    for pid in 0..params.len() {
        let mut tensor_worst = 0.0f64;
        for i in 0..params.get(pid).numel() {
            let orig = params.get(pid).data[i];
            params.get_mut(pid).data[i] = orig + h;
            let up = eval(params);
            params.get_mut(pid).data[i] = orig - h;
            let down = eval(params);
            params.get_mut(pid).data[i] = orig;

            let numeric = (up - down) / (2.0 * h);
            let a = analytic[pid].data[i];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4);
            report.checked += 1;
            tensor_worst = tensor_worst.max(rel);
            if rel > report.max_rel_err {
                report.max_rel_err = rel;
                report.worst = format!("{}[{}]", params.name(pid), i);
            }
        }
        report.per_param.push((params.name(pid).to_string(), tensor_worst));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::graph::Graph;
    use super::super::tensor::Tensor;
    use super::*;
    use crate::rng::Prng;

    /// Composite of every primitive op, checked against finite differences.
    #[test]
    fn composite_graph_matches_finite_differences() {
        let mut rng = Prng::seed_from(&[42]);
        let mut ps: ParamSet<f64> = ParamSet::new();
        ps.add("w", &[3, 4], &mut rng, 0.6);
        ps.add("b", &[3], &mut rng, 0.6);
        ps.add("emb", &[5, 4], &mut rng, 0.6);
        ps.add("q", &[4], &mut rng, 0.6);

        let build = |ps: &ParamSet<f64>| {
            let mut g = Graph::new();
            let w = g.param(ps, 0);
            let b = g.param(ps, 1);
            let emb = g.param(ps, 2);
            let q = g.param(ps, 3);

            let keys = g.gather(emb, vec![0, 2, 4]);
            let scores = g.matmul(keys, q);
            let raw = g.softmax(scores);
            let prod = g.mul(raw, raw);
            let attn = g.normalize_floor(prod, 1e-12);
            let ctx = g.matmul(attn, keys);
            let lin = g.matmul(w, ctx);
            let pre = g.add(lin, b);
            let act = g.tanh(pre);
            let sig = g.sigmoid(pre);
            let mixed = g.mul(act, sig);
            let e0 = g.row(emb, 1);
            let e0 = g.slice(e0, 0, 3);
            let both = g.stack(&[mixed, e0]);
            let pooled = g.maxpool_rows(both);
            let cat = g.concat(&[pooled, mixed]);
            let half = g.scalar_mul(cat, 0.5);
            let p = g.softmax(half);
            let target = Tensor::vector(vec![0.1, 0.3, 0.2, 0.05, 0.05, 0.3]);
            let a_loss = g.cross_entropy(p, target);
            let b_loss = g.cross_entropy_index(p, 2);
            let total = g.add_n(&[a_loss, b_loss]);
            (g, total)
        };

        let (g, loss) = build(&ps);
        let analytic = g.backward(loss, &ps);
        let report = grad_check(
            &mut ps,
            &analytic,
            |p| {
                let (g, loss) = build(p);
                g.value(loss).item()
            },
            1e-5,
        );
        assert!(report.passes(1e-4), "max rel err {} at {}", report.max_rel_err, report.worst);
    }

    /// The fused recurrent cell's hand-derived backward rule against finite
    /// differences, including gradients through x, h, and c.
    #[test]
    fn lstm_step_matches_finite_differences() {
        let mut rng = Prng::seed_from(&[7]);
        let mut ps: ParamSet<f64> = ParamSet::new();
        let hid = 3;
        let inp = 2;
        ps.add("w", &[4 * hid, inp + hid], &mut rng, 0.7);
        ps.add("b", &[4 * hid], &mut rng, 0.7);
        ps.add("x", &[inp], &mut rng, 0.9);
        ps.add("h0", &[hid], &mut rng, 0.9);
        ps.add("c0", &[hid], &mut rng, 0.9);

        let build = |ps: &ParamSet<f64>| {
            let mut g = Graph::new();
            let cell = super::super::graph::LstmCell {
                w: g.param(ps, 0),
                b: g.param(ps, 1),
                hidden: hid,
            };
            let x = g.param(ps, 2);
            let h0 = g.param(ps, 3);
            let c0 = g.param(ps, 4);
            let (h1, c1) = super::super::graph::lstm_step(&mut g, &cell, x, h0, c0);
            let (h2, _c2) = super::super::graph::lstm_step(&mut g, &cell, x, h1, c1);
            let ones = g.constant(Tensor::matrix(1, hid, vec![1.0; hid]));
            let total = g.matmul(ones, h2);
            (g, total)
        };

        let (g, loss) = build(&ps);
        let analytic = g.backward(loss, &ps);
        let report = grad_check(
            &mut ps,
            &analytic,
            |p| {
                let (g, loss) = build(p);
                g.value(loss).item()
            },
            1e-5,
        );
        assert!(report.passes(1e-4), "max rel err {} at {}", report.max_rel_err, report.worst);
    }
}
