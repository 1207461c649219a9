use lasynth_core::datagen::*;
use lasynth_core::engine::*;
use lasynth_core::model::*;

fn main() {
    let gcfg = GenConfig::tiny(3, 64);
    let eps = generate_split(&gcfg, 0x11, 64).unwrap();
    let vocab = gcfg.vocab();
    println!("vocab {}, mean tokens {:.1}", vocab.len(), compute_stats(&eps, 4).mean_tokens);

    let mcfg = ModelConfig::desk(vocab.len());
    let mut mp: ModelParams<f32> = ModelParams::init(mcfg, 1);
    println!("params: {} tensors, {} scalars", mp.set.len(), mp.set.scalar_count());

    let tc = TrainConfig { steps: 150, batch_size: 8, seed: 5, log_every: 25, ..Default::default() };
    let t0 = std::time::Instant::now();
    let rows = train(&mut mp, &eps, &tc);
    let dt = t0.elapsed();
    for r in &rows {
        println!("step {:4}  total {:.4}  prog {:.4}  exec {:.4}  op {:.4}", r.step, r.total, r.l_prog, r.l_exec, r.l_op);
    }
    println!("150 steps in {dt:?} ({:?}/step)", dt / 150);

    let greedy = greedy_decode(&mp, &eps[0].spec, mp.cfg.max_decode);
    println!("greedy after 150 steps: {} tokens, target {} tokens", greedy.program_tokens().len(), eps[0].tokens.len());
}
