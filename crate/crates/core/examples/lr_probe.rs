use lasynth_core::datagen::*;
use lasynth_core::engine::*;
use lasynth_core::model::*;
use lasynth_core::nn::OptimHyper;

fn main() {
    let gcfg = GenConfig::tiny(3, 200);
    let eps = generate_split(&gcfg, 0x11, 200).unwrap();
    let vocab = gcfg.vocab();
    for (lr, interval) in [(1e-3, 10_000u64), (2e-3, 400), (3e-3, 400)] {
        let mcfg = ModelConfig::desk(vocab.len());
        let mut mp: ModelParams<f32> = ModelParams::init(mcfg, 1);
        let tc = TrainConfig {
            steps: 700, batch_size: 8, seed: 5, log_every: 350,
            optim: OptimHyper { lr0: lr, decay: 0.85, decay_interval: interval, ..Default::default() },
            early_stop: None, ..Default::default()
        };
        let rows = train(&mut mp, &eps, &tc);
        let last = rows.last().unwrap();
        println!("lr {lr:.0e}/{interval}: step {} prog {:.4} exec {:.4} op {:.4}", last.step, last.l_prog, last.l_exec, last.l_op);
    }
}
