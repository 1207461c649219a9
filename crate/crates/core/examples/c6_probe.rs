use lasynth_core::datagen::*;
use lasynth_core::engine::*;
use lasynth_core::model::*;
use lasynth_core::nn::{Graph, OptimHyper};

fn main() {
    let gcfg = GenConfig::tiny(3, 200);
    let eps = generate_split(&gcfg, 0x11, 200).unwrap();
    let vocab = gcfg.vocab();
    let mcfg = ModelConfig::desk(vocab.len());
    let mut mp: ModelParams<f32> = ModelParams::init(mcfg, 1);
    let tc = TrainConfig {
        steps: 2000, batch_size: 12, seed: 5, log_every: 500,
        optim: OptimHyper { lr0: 5e-3, decay: 0.8, decay_interval: 300, ..Default::default() },
        early_stop: None, ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let rows = train(&mut mp, &eps, &tc);
    println!("train {:?}", t0.elapsed());
    for r in &rows { println!("step {} prog {:.4} exec {:.4} op {:.4}", r.step, r.l_prog, r.l_exec, r.l_op); }

    let t1 = std::time::Instant::now();
    let mut exact = 0usize; let mut exec_strict = 0usize; let mut pair_hits = 0usize; let mut pair_total = 0usize;
    for ep in &eps {
        let cands = beam_search(&mp, &ep.spec, 8, mp.cfg.max_decode);
        if cands.first().map(|c| c.program_tokens() == ep.tokens.as_slice()).unwrap_or(false) { exact += 1; }
        let mut g = Graph::new();
        let out = forward_teacher_forced(&mut g, &mp, &ep.tokens, &ep.spec).unwrap();
        if let Some(am) = out.exec_argmax {
            let ok = am.iter().zip(ep.spec.iter()).all(|(a, (_i, o))| a == o);
            if ok { exec_strict += 1; }
            for (a, (_i, o)) in am.iter().zip(ep.spec.iter()) {
                pair_total += 1;
                if a == o { pair_hits += 1; }
            }
        }
    }
    println!("beam8 exact {}/200, exec strict {}/200, per-pair {}/{} ({:?})",
             exact, exec_strict, pair_hits, pair_total, t1.elapsed());
}
