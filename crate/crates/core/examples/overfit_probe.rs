use lasynth_core::datagen::*;
use lasynth_core::engine::*;
use lasynth_core::model::*;
use lasynth_core::nn::Graph;

fn main() {
    let gcfg = GenConfig::tiny(3, 200);
    let eps = generate_split(&gcfg, 0x11, 200).unwrap();
    let vocab = gcfg.vocab();
    let mcfg = ModelConfig::desk(vocab.len());
    let mut mp: ModelParams<f32> = ModelParams::init(mcfg, 1);
    let tc = TrainConfig {
        steps: 2000, batch_size: 8, seed: 5, log_every: 100,
        early_stop: Some(EarlyStop { every: 250, sample: 64, exact_frac: 1.0, exec_frac: 0.97 }),
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let rows = train(&mut mp, &eps, &tc);
    println!("trained {} logged rows in {:?}", rows.len(), t0.elapsed());
    for r in rows.iter().rev().take(3) { println!("step {} total {:.4} prog {:.4} exec {:.4}", r.step, r.total, r.l_prog, r.l_exec); }

    // beam-8 exact match on the training set
    let t1 = std::time::Instant::now();
    let mut exact = 0usize; let mut exec_ok = 0usize;
    for ep in &eps {
        let cands = beam_search(&mp, &ep.spec, 8, mp.cfg.max_decode);
        if cands.first().map(|c| c.program_tokens() == ep.tokens.as_slice()).unwrap_or(false) { exact += 1; }
        let mut g = Graph::new();
        let out = forward_teacher_forced(&mut g, &mp, &ep.tokens, &ep.spec).unwrap();
        if let Some(am) = out.exec_argmax {
            if am.iter().zip(ep.spec.iter()).all(|(a, (_i, o))| a == o) { exec_ok += 1; }
        }
    }
    println!("beam-8 top-1 exact: {}/200, exec argmax: {}/200 (eval {:?})", exact, exec_ok, t1.elapsed());
}
