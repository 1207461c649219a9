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
        steps: 1200, batch_size: 8, seed: 5, log_every: 600,
        optim: OptimHyper { lr0: 3e-3, decay: 0.85, decay_interval: 400, ..Default::default() },
        early_stop: None, ..Default::default()
    };
    train(&mut mp, &eps, &tc);

    // per-position mean CE over the training set
    let mut pos_ce = vec![(0.0f64, 0usize); 30];
    let mut shown = 0;
    for ep in eps.iter() {
        let mut g = Graph::new();
        let out = forward_teacher_forced(&mut g, &mp, &ep.tokens, &ep.spec).unwrap();
        let mut seq = vec![1u32];
        seq.extend_from_slice(&ep.tokens);
        seq.push(2);
        for (t, logits) in out.step_logits.iter().enumerate() {
            let target = seq[t + 1] as usize;
            let mx = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = logits.iter().map(|x| (x - mx).exp()).sum::<f64>().ln() + mx;
            pos_ce[t].0 += lse - logits[target];
            pos_ce[t].1 += 1;
        }
        if shown < 6 {
            let greedy = greedy_decode(&mp, &ep.spec, mp.cfg.max_decode);
            if greedy.program_tokens() != ep.tokens.as_slice() {
                let gt: Vec<&str> = ep.tokens.iter().map(|&t| vocab.text(t)).collect();
                let pr: Vec<&str> = greedy.program_tokens().iter().map(|&t| vocab.text(t)).collect();
                println!("GT : {}", gt.join(" "));
                println!("PR : {}", pr.join(" "));
                shown += 1;
            }
        }
    }
    println!("\nper-position mean CE:");
    for (t, (ce, n)) in pos_ce.iter().enumerate() {
        if *n > 0 { println!("  pos {:2}: {:.4} (n={})", t, ce / *n as f64, n); }
    }
}
