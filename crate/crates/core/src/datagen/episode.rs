//! Episodes: one synthesis task and its post-processing filters.

use serde::{Deserialize, Serialize};

use crate::lang::{interpret, ControlFlowClass, Program, RunError};
use crate::rng::Prng;

use super::config::GenConfig;

/// One input list paired with the output the program produced for it.
pub type IoPair = (Vec<i64>, Vec<i64>);

/// One synthesis task: a program's canonical token sequence, the
/// specification pairs shown to the synthesizer, and the held-out pairs used
/// only to judge correctness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub id: u64,
    pub tokens: Vec<u32>,
    pub spec: Vec<IoPair>,
    pub heldout: Vec<IoPair>,
    pub class: ControlFlowClass,
    pub n_tokens: usize,
}

impl Episode {
    pub fn all_pairs(&self) -> impl Iterator<Item = &IoPair> {
        self.spec.iter().chain(self.heldout.iter())
    }
}

fn random_input(rng: &mut Prng, cfg: &GenConfig) -> Vec<i64> {
    (0..cfg.list_len).map(|_| rng.int_in(cfg.vmin, cfg.vmax)).collect()
}

/// Probabilistic triviality test: over `triviality_probe_count` random
/// in-range inputs, a program is trivial iff it is the identity on all of
/// them or maps all (distinct) probes to one output. Interpreter failures
/// propagate to the caller, which treats the candidate as unusable.
pub fn is_trivial(program: &Program, rng: &mut Prng, cfg: &GenConfig) -> Result<bool, RunError> {
    let mut identity = true;
    let mut constant = true;
    let mut first_out: Option<Vec<i64>> = None;
    let mut first_in: Option<Vec<i64>> = None;
    let mut saw_distinct_inputs = false;

    for _ in 0..cfg.triviality_probe_count {
        let input = random_input(rng, cfg);
        let output = interpret(program, &input, cfg.step_budget)?;
        if output != input {
            identity = false;
        }
        match (&first_in, &first_out) {
            (Some(fi), Some(fo)) => {
                if *fi != input {
                    saw_distinct_inputs = true;
                }
                if *fo != output {
                    constant = false;
                }
            }
            _ => {
                first_in = Some(input);
                first_out = Some(output);
            }
        }
        if !identity && !constant {
            return Ok(false);
        }
    }
    Ok(identity || (constant && saw_distinct_inputs))
}

/// Draw `k_spec + k_test` random inputs and execute the program on each.
/// Returns `None` — discarding the whole episode, never a single pair — if
/// any run fails or any output value leaves `[vmin, vmax]`.
pub fn sample_io(
    program: &Program,
    rng: &mut Prng,
    cfg: &GenConfig,
) -> Option<(Vec<IoPair>, Vec<IoPair>)> {
    let total = cfg.k_spec + cfg.k_test;
    let mut pairs = Vec::with_capacity(total);
    for _ in 0..total {
        let input = random_input(rng, cfg);
        let output = interpret(program, &input, cfg.step_budget).ok()?;
        if output.iter().any(|&v| v < cfg.vmin || v > cfg.vmax) {
            return None;
        }
        pairs.push((input, output));
    }
    let heldout = pairs.split_off(cfg.k_spec);
    Some((pairs, heldout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, tokenize, Vocab};

    fn prog(body: &str) -> Program {
        let v = Vocab::default_vocab();
        let src = format!("int * func_1(int a[]) {{ {body} return a; }}");
        parse(&tokenize(&src, &v).unwrap(), &v, 5).unwrap()
    }

    #[test]
    fn bare_return_is_identity_trivial() {
        let cfg = GenConfig::desk(0);
        let mut rng = Prng::seed_from(&[1]);
        assert!(is_trivial(&prog(""), &mut rng, &cfg).unwrap());
    }

    #[test]
    fn constant_mapping_is_trivial() {
        let cfg = GenConfig::desk(0);
        let mut rng = Prng::seed_from(&[2]);
        let p = prog("int p_0 = 0; for (p_0 = 0; p_0 <= 4; p_0++) { a[p_0] = 1; }");
        assert!(is_trivial(&p, &mut rng, &cfg).unwrap());
    }

    #[test]
    fn input_dependent_program_is_not_trivial() {
        let cfg = GenConfig::desk(0);
        let mut rng = Prng::seed_from(&[3]);
        let p = prog("int p_0 = 2; a[p_0] = 3;");
        assert!(!is_trivial(&p, &mut rng, &cfg).unwrap());
    }

    #[test]
    fn out_of_range_outputs_reject_the_episode() {
        let cfg = GenConfig::desk(0);
        let mut rng = Prng::seed_from(&[4]);
        // 4 + 4 + 4 leaves the range for inputs near the top
        let p = prog("a[0] = a[0] + a[1] + 4;");
        let mut saw_rejection = false;
        for _ in 0..50 {
            if sample_io(&p, &mut rng, &cfg).is_none() {
                saw_rejection = true;
                break;
            }
        }
        assert!(saw_rejection);
    }

    #[test]
    fn sampled_pairs_revalidate_under_the_interpreter() {
        let cfg = GenConfig::desk(0);
        let mut rng = Prng::seed_from(&[5]);
        let p = prog("int p_0 = 2; a[p_0] = 3;");
        let (spec, heldout) = sample_io(&p, &mut rng, &cfg).unwrap();
        assert_eq!(spec.len(), cfg.k_spec);
        assert_eq!(heldout.len(), cfg.k_test);
        for (input, output) in spec.iter().chain(heldout.iter()) {
            assert_eq!(&interpret(&p, input, cfg.step_budget).unwrap(), output);
        }
    }
}
