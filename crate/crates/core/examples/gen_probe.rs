use lasynth_core::datagen::*;
use lasynth_core::lang::*;

fn main() {
    let t0 = std::time::Instant::now();
    let mut cfg = GenConfig::desk(7);
    cfg.splits.train = 2000;
    let eps = generate_split(&cfg, 0x11, 2000).unwrap();
    let dt = t0.elapsed();
    let vocab = cfg.vocab();
    let with_for = eps.iter().filter(|e| {
        let ast = parse(&e.tokens, &vocab, 5).unwrap();
        contains_for(&ast)
    }).count();
    let stats = compute_stats(&eps, 16);
    println!("2000 episodes in {dt:?}");
    println!("for fraction: {}", with_for as f64 / 2000.0);
    println!("class fractions: {:?}", stats.class_fractions);
    println!("mean tokens: {:.1}", stats.mean_tokens);
    println!("len buckets: {:?}", stats.length_buckets);
    let tiny = GenConfig::tiny(3, 300);
    let teps = generate_split(&tiny, 0x11, 300).unwrap();
    let tstats = compute_stats(&teps, 4);
    println!("tiny mean tokens {:.1} buckets {:?}", tstats.mean_tokens, tstats.length_buckets);
}
