//! Command implementations, generic over numeric precision.

use std::path::{Path, PathBuf};

use lasynth_core::datagen::{
    compute_stats, generate_dataset, read_dataset, write_dataset, Dataset, DatasetHeader, Episode,
};
use lasynth_core::engine::{
    audit_dataset, evaluate, loss_rows_csv, regenerate, retrain_loop, EvalConfig, ReplacementRule,
    RetrainConfig, TrainConfig,
};
use lasynth_core::model::{
    build_op_table, forward_teacher_forced, load_checkpoint, save_checkpoint, Ablation, Baseline,
    ModelConfig, ModelParams,
};
use lasynth_core::nn::{grad_check as nn_grad_check, Graph, ParamSet, Real};

use crate::runcfg::{err, out_dir, resolve, write_run_record, CliError, Precision, Resolved};
use crate::Common;

type R = Result<(), CliError>;

pub fn gen_data(common: Common) -> R {
    let r = resolve(&common)?;
    let dir = out_dir(&common, "dataset")?;
    let dataset = generate_dataset(&r.gen).map_err(|e| CliError(e.to_string()))?;
    for (name, eps) in
        [("train", &dataset.train), ("valid", &dataset.valid), ("test", &dataset.test)]
    {
        write_dataset(&dir.join(format!("{name}.jsonl")), &dataset.header, eps)
            .map_err(|e| CliError(e.to_string()))?;
    }
    write_run_record(&dir, "gen-data", &r, &[])?;
    let stats = compute_stats(&dataset.train, 16);
    println!(
        "wrote {}/{}/{} episodes to {} (train mean tokens {:.1}, classes {:?})",
        dataset.train.len(),
        dataset.valid.len(),
        dataset.test.len(),
        dir.display(),
        stats.mean_tokens,
        stats.class_counts,
    );
    Ok(())
}

fn read_split(path: &Path) -> Result<(DatasetHeader, Vec<Episode>), CliError> {
    read_dataset(path).map_err(|e| CliError(e.to_string()))
}

fn model_config(r: &Resolved, header: &DatasetHeader, ablation: &str, baseline: &str) -> Result<ModelConfig, CliError> {
    let gen = &header.config;
    let vocab = gen.vocab();
    let Some(ablation) = Ablation::parse(ablation) else {
        return err(format!("unknown ablation {ablation:?}"));
    };
    let Some(baseline) = Baseline::parse(baseline) else {
        return err(format!("unknown baseline {baseline:?}"));
    };
    let cfg = ModelConfig {
        hidden: r.model.hidden,
        embed: r.model.embed,
        layers: r.model.layers,
        k_spec: gen.k_spec,
        list_len: gen.list_len,
        vocab_size: vocab.len(),
        vmin: gen.vmin,
        vmax: gen.vmax,
        max_decode: r.model.max_decode.min(gen.max_tokens + 2),
        init_scale: r.model.init_scale,
        ablation,
        baseline,
    };
    cfg.validate().map_err(CliError)?;
    Ok(cfg)
}

pub fn train(
    common: Common,
    dataset_dir: PathBuf,
    iterations: usize,
    ablation: String,
    baseline: String,
    beam: Option<usize>,
) -> R {
    let r = resolve(&common)?;
    match r.precision {
        Precision::F32 => train_run::<f32>(common, r, dataset_dir, iterations, ablation, baseline, beam),
        Precision::F64 => train_run::<f64>(common, r, dataset_dir, iterations, ablation, baseline, beam),
    }
}

fn train_run<T: Real>(
    common: Common,
    r: Resolved,
    dataset_dir: PathBuf,
    iterations: usize,
    ablation: String,
    baseline: String,
    beam: Option<usize>,
) -> R {
    if iterations < 1 {
        return err("--iterations must be at least 1");
    }
    let dir = out_dir(&common, "run")?;
    let train_path = dataset_dir.join("train.jsonl");
    let test_path = dataset_dir.join("test.jsonl");
    let (header, train_eps) = read_split(&train_path)?;
    let (_, test_eps) = read_split(&test_path)?;
    let model_cfg = model_config(&r, &header, &ablation, &baseline)?;

    let mut dataset = Dataset {
        header: header.clone(),
        train: train_eps,
        valid: Vec::new(),
        test: test_eps,
    };
    let rtc = RetrainConfig {
        train: TrainConfig {
            steps: r.train.steps,
            batch_size: r.train.batch_size,
            seed: r.seed,
            optim: r.train.optim,
            log_every: r.train.log_every,
            early_stop: None,
        },
        eval: EvalConfig { beam: beam.unwrap_or(r.eval_beam), bucket_width: 16 },
        regen_beam: r.regen_beam,
        rule: ReplacementRule::HighestScoring,
        iterations,
    };

    let dataset_hash = lasynth_core::hashing::hash_file(&train_path)?;
    let dir2 = dir.clone();
    let train_path_label = train_path.display().to_string();
    retrain_loop::<T>(&model_cfg, &mut dataset, &rtc, move |iter, mp, ds, outcome| {
        let save = |res: std::io::Result<()>| res.expect("write iteration outputs");
        save(save_checkpoint(
            &dir2.join(format!("checkpoint-iter{iter}.ckpt")),
            mp,
            None,
            &dataset_hash,
        ));
        save(std::fs::write(
            dir2.join(format!("loss-iter{iter}.csv")),
            loss_rows_csv(&outcome.loss_rows),
        ));
        save(std::fs::write(
            dir2.join(format!("eval-iter{iter}.csv")),
            outcome.eval.to_csv(),
        ));
        save(std::fs::write(
            dir2.join(format!("eval-iter{iter}.json")),
            outcome.eval.summary_json(),
        ));
        save(std::fs::write(
            dir2.join(format!("stats-iter{iter}.classes.csv")),
            outcome.train_stats.classes_csv(),
        ));
        save(std::fs::write(
            dir2.join(format!("stats-iter{iter}.lengths.csv")),
            outcome.train_stats.lengths_csv(),
        ));
        if let Some(regen) = &outcome.regen {
            save(std::fs::write(
                dir2.join(format!("regen-iter{iter}.csv")),
                regen.to_csv(),
            ));
            write_dataset(
                &dir2.join(format!("dataset-iter{}.jsonl", iter + 1)),
                &ds.header,
                &ds.train,
            )
            .expect("write regenerated dataset");
        }
        let card = format!(
            "model: {}\nprecision: {}\nconfig: {}\ndataset: {}\ndataset_hash: {}\n",
            mp.config_hash(),
            T::PRECISION_NAME,
            serde_json::to_string(&mp.cfg).unwrap(),
            train_path_label,
            dataset_hash,
        );
        save(std::fs::write(dir2.join("model_card.txt"), card));
        println!(
            "iter {iter}: generalization {:.4}, exact {:.4}{}",
            outcome.eval.generalization,
            outcome.eval.exact_match,
            outcome
                .regen
                .as_ref()
                .map(|r| format!(
                    ", regen replaced {}/{} (mean tokens {:.1} -> {:.1})",
                    r.replaced, r.episodes, r.mean_tokens_before, r.mean_tokens_after
                ))
                .unwrap_or_default(),
        );
    });

    write_run_record(&dir, "train", &r, &[("train", train_path.as_path()), ("test", test_path.as_path())])?;
    Ok(())
}

pub fn eval(common: Common, checkpoint: PathBuf, dataset: PathBuf, beam: Option<usize>) -> R {
    let r = resolve(&common)?;
    match r.precision {
        Precision::F32 => eval_run::<f32>(common, r, checkpoint, dataset, beam),
        Precision::F64 => eval_run::<f64>(common, r, checkpoint, dataset, beam),
    }
}

fn eval_run<T: Real>(
    common: Common,
    r: Resolved,
    checkpoint: PathBuf,
    dataset: PathBuf,
    beam: Option<usize>,
) -> R {
    let dir = out_dir(&common, "eval")?;
    let (mp, _, _) = load_checkpoint::<T>(&checkpoint).map_err(|e| CliError(e.to_string()))?;
    let (header, eps) = read_split(&dataset)?;
    let ecfg = EvalConfig { beam: beam.unwrap_or(r.eval_beam), bucket_width: 16 };
    let report = evaluate(&mp, &eps, &header.config, &ecfg);
    std::fs::write(dir.join("eval.csv"), report.to_csv())?;
    std::fs::write(dir.join("eval.json"), report.summary_json())?;
    write_run_record(&dir, "eval", &r, &[("checkpoint", checkpoint.as_path()), ("dataset", dataset.as_path())])?;
    println!(
        "beam {}: generalization {:.4} ({}/{}), exact {:.4}",
        ecfg.beam, report.generalization, report.generalized, report.episodes, report.exact_match
    );
    Ok(())
}

pub fn regen(
    common: Common,
    checkpoint: PathBuf,
    dataset: PathBuf,
    beam: Option<usize>,
    shortest: bool,
) -> R {
    let r = resolve(&common)?;
    match r.precision {
        Precision::F32 => regen_run::<f32>(common, r, checkpoint, dataset, beam, shortest),
        Precision::F64 => regen_run::<f64>(common, r, checkpoint, dataset, beam, shortest),
    }
}

fn regen_run<T: Real>(
    common: Common,
    r: Resolved,
    checkpoint: PathBuf,
    dataset: PathBuf,
    beam: Option<usize>,
    shortest: bool,
) -> R {
    let dir = out_dir(&common, "regen")?;
    let (mp, _, _) = load_checkpoint::<T>(&checkpoint).map_err(|e| CliError(e.to_string()))?;
    let (mut header, eps) = read_split(&dataset)?;
    let rule = if shortest { ReplacementRule::ShortestPassing } else { ReplacementRule::HighestScoring };
    let (new_eps, report) =
        regenerate(&mp, &eps, &header.config, beam.unwrap_or(r.regen_beam), rule);
    let violations = audit_dataset(&new_eps, &header.config);
    header.iteration += 1;
    write_dataset(&dir.join("dataset.jsonl"), &header, &new_eps)
        .map_err(|e| CliError(e.to_string()))?;
    std::fs::write(dir.join("regen.csv"), report.to_csv())?;
    std::fs::write(dir.join("regen.json"), report.summary_json())?;
    write_run_record(&dir, "regen", &r, &[("checkpoint", checkpoint.as_path()), ("dataset", dataset.as_path())])?;
    println!(
        "replaced {}/{} programs (mean tokens {:.1} -> {:.1}), audit violations: {violations}",
        report.replaced, report.episodes, report.mean_tokens_before, report.mean_tokens_after
    );
    if violations > 0 {
        return err(format!("{violations} regenerated episodes fail their own pairs"));
    }
    Ok(())
}

pub fn stats(common: Common, dataset: PathBuf) -> R {
    let r = resolve(&common)?;
    let dir = out_dir(&common, "stats")?;
    let (_, eps) = read_split(&dataset)?;
    let stats = compute_stats(&eps, 16);
    std::fs::write(dir.join("classes.csv"), stats.classes_csv())?;
    std::fs::write(dir.join("lengths.csv"), stats.lengths_csv())?;
    std::fs::write(
        dir.join("stats.json"),
        serde_json::to_string_pretty(&stats).map_err(|e| CliError(e.to_string()))?,
    )?;
    write_run_record(&dir, "stats", &r, &[("dataset", dataset.as_path())])?;
    println!(
        "{} episodes, classes {:?}, mean tokens {:.1}",
        stats.episode_count, stats.class_counts, stats.mean_tokens
    );
    Ok(())
}

pub fn op_table(common: Common) -> R {
    let r = resolve(&common)?;
    let dir = out_dir(&common, "op-table")?;
    let table = build_op_table(r.gen.vmin, r.gen.vmax);
    std::fs::write(dir.join("op_table.csv"), table.to_csv())?;
    write_run_record(&dir, "op-table", &r, &[])?;
    println!("{} rows over [{}, {}] -> {}", table.len(), r.gen.vmin, r.gen.vmax, dir.display());
    Ok(())
}

/// Full finite-difference sweep at the gradient-check scale; always f64
/// (central differences need the precision).
pub fn grad_check(common: Common) -> R {
    let r = resolve(&common)?;
    let dir = out_dir(&common, "grad-check")?;
    let tolerance = 1e-4;
    let mut results = Vec::new();
    for baseline in [Baseline::LaSynth, Baseline::PropertySignatures] {
        let cfg = ModelConfig { baseline, ..ModelConfig::tiny() };
        let mut mp: ModelParams<f64> = ModelParams::init(cfg, r.seed);
        let tokens = vec![3u32, 9, 14, 2, 17];
        let pairs = vec![
            (vec![1, -2, 0], vec![1, 2, 0]),
            (vec![3, 0, -4], vec![3, 1, -4]),
        ];
        let mut g = Graph::new();
        let out = forward_teacher_forced(&mut g, &mp, &tokens, &pairs)
            .map_err(|e| CliError(e.to_string()))?;
        let analytic = g.backward(out.total, &mp.set);
        let mut set = std::mem::replace(&mut mp.set, ParamSet::new());
        let report = nn_grad_check(
            &mut set,
            &analytic,
            |s| {
                let probe = ModelParams { set: s.clone(), ..mp.clone() };
                let mut g = Graph::new();
                forward_teacher_forced(&mut g, &probe, &tokens, &pairs).unwrap().report.total
            },
            1e-5,
        );
        println!(
            "{}: max rel err {:.3e} over {} coordinates ({})",
            baseline.name(),
            report.max_rel_err,
            report.checked,
            if report.passes(tolerance) { "pass" } else { "FAIL" },
        );
        results.push((baseline.name().to_string(), report));
    }
    let passed = results.iter().all(|(_, rep)| rep.passes(tolerance));
    let json = serde_json::json!({
        "schema_version": 1,
        "tolerance": tolerance,
        "passed": passed,
        "checks": results.iter().map(|(name, rep)| serde_json::json!({
            "baseline": name,
            "max_rel_err": rep.max_rel_err,
            "checked": rep.checked,
            "worst": rep.worst,
            "per_param": rep.per_param.iter().map(|(n, e)| serde_json::json!({"name": n, "max_rel_err": e})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    std::fs::write(
        dir.join("grad_check.json"),
        serde_json::to_string_pretty(&json).map_err(|e| CliError(e.to_string()))?,
    )?;
    write_run_record(&dir, "grad-check", &r, &[])?;
    if passed {
        Ok(())
    } else {
        err("gradient check failed")
    }
}
