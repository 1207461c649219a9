use lasynth_core::datagen::*;
use lasynth_core::engine::*;
use lasynth_core::model::*;
use lasynth_core::nn::OptimHyper;

fn main() {
    let mut gcfg = GenConfig::desk(7);
    gcfg.splits = SplitSizes { train: 5000, valid: 0, test: 500 };
    let t0 = std::time::Instant::now();
    let train_eps = generate_split(&gcfg, 0x11, 5000).unwrap();
    let test_eps = generate_split(&gcfg, 0x33, 500).unwrap();
    println!("gen {:?}; mean tokens {:.1}", t0.elapsed(), compute_stats(&train_eps, 16).mean_tokens);
    let vocab = gcfg.vocab();

    let tc = TrainConfig {
        steps: 3000, batch_size: 8, seed: 5, log_every: 500,
        optim: OptimHyper { lr0: 2e-3, decay: 0.9, decay_interval: 500, ..Default::default() },
        early_stop: None, ..Default::default()
    };
    for (name, ablation) in [
        ("full", Ablation::default()),
        ("no-executor", Ablation { no_executor: true, ..Default::default() }),
    ] {
        let mcfg = ModelConfig { ablation, ..ModelConfig::desk(vocab.len()) };
        let mut mp: ModelParams<f32> = ModelParams::init(mcfg, 5);
        let t1 = std::time::Instant::now();
        let rows = train(&mut mp, &train_eps, &tc);
        let tt = t1.elapsed();
        let last = rows.last().unwrap();
        let t2 = std::time::Instant::now();
        let report = evaluate(&mp, &test_eps, &gcfg, &EvalConfig { beam: 8, bucket_width: 16 });
        println!("{name}: train {tt:?} (prog {:.3} exec {:.3}) eval {:?} -> gen {:.4} exact {:.4}",
                 last.l_prog, last.l_exec, t2.elapsed(), report.generalization, report.exact_match);
        for c in &report.per_class {
            println!("   {:8} {:3} episodes, gen {}", c.class.name(), c.total, c.generalized);
        }
    }
}
