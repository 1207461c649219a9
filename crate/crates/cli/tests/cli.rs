//! End-to-end command tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> PathBuf {
    // target/<profile>/lasynth next to the test binary's directory
    let mut p = std::env::current_exe().unwrap();
    p.pop();
    p.pop();
    p.push(format!("lasynth{}", std::env::consts::EXE_SUFFIX));
    p
}

fn run(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("lasynth_cli_tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn gen_data_is_deterministic_per_seed() {
    let dir = tmp("gendata");
    let cfg = write_cfg(&dir, "gen.train = 30\ngen.valid = 5\ngen.test = 5\n");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let (ok, _, err) = run(&[
            "gen-data",
            "--preset",
            "desk",
            "--seed",
            "7",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(ok, "{err}");
    }
    for name in ["train.jsonl", "valid.jsonl", "test.jsonl", "run.json"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn op_table_has_122_data_rows_for_the_default_range() {
    let dir = tmp("optable");
    let (ok, stdout, err) =
        run(&["op-table", "--out", dir.join("t").to_str().unwrap()]);
    assert!(ok, "{err}");
    assert!(stdout.contains("122 rows"), "{stdout}");
    let csv = std::fs::read_to_string(dir.join("t/op_table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 123); // header + 122 rows
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tmp("badcfg");
    let cfg = write_cfg(&dir, "gen.trian = 30\n");
    let (ok, _, err) = run(&[
        "gen-data",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("o").to_str().unwrap(),
    ]);
    assert!(!ok);
    assert!(err.contains("unknown config key"), "{err}");
}

#[test]
fn train_eval_regen_round_trip_on_a_tiny_run() {
    let dir = tmp("pipeline");
    let cfg = write_cfg(
        &dir,
        "gen.train = 12\ngen.valid = 2\ngen.test = 6\ngen.max_tokens = 40\n\
         model.hidden = 16\nmodel.embed = 16\nmodel.max_decode = 24\n\
         train.steps = 12\ntrain.batch_size = 4\ntrain.log_every = 6\n",
    );
    let data = dir.join("data");
    let (ok, _, err) = run(&[
        "gen-data",
        "--seed",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");

    let rundir = dir.join("run");
    let (ok, _, err) = run(&[
        "train",
        "--seed",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--dataset",
        data.to_str().unwrap(),
        "--out",
        rundir.to_str().unwrap(),
        "--beam",
        "2",
    ]);
    assert!(ok, "{err}");
    let ckpt = rundir.join("checkpoint-iter0.ckpt");
    assert!(ckpt.exists());
    assert!(rundir.join("loss-iter0.csv").exists());
    assert!(rundir.join("eval-iter0.json").exists());
    assert!(rundir.join("model_card.txt").exists());
    assert!(rundir.join("run.json").exists());

    // beam-1 evaluation twice: identical reports (and identical to greedy
    // by the engine's equivalence test)
    let (e1, e2) = (dir.join("e1"), dir.join("e2"));
    for out in [&e1, &e2] {
        let (ok, _, err) = run(&[
            "eval",
            "--config",
            cfg.to_str().unwrap(),
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--dataset",
            data.join("test.jsonl").to_str().unwrap(),
            "--beam",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(ok, "{err}");
    }
    assert_eq!(
        std::fs::read(e1.join("eval.json")).unwrap(),
        std::fs::read(e2.join("eval.json")).unwrap()
    );

    let regen = dir.join("regen");
    let (ok, stdout, err) = run(&[
        "regen",
        "--config",
        cfg.to_str().unwrap(),
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--dataset",
        data.join("train.jsonl").to_str().unwrap(),
        "--beam",
        "2",
        "--out",
        regen.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    assert!(stdout.contains("audit violations: 0"), "{stdout}");
    assert!(regen.join("dataset.jsonl").exists());

    let stats = dir.join("stats");
    let (ok, _, err) = run(&[
        "stats",
        "--dataset",
        data.join("train.jsonl").to_str().unwrap(),
        "--out",
        stats.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    let classes = std::fs::read_to_string(stats.join("classes.csv")).unwrap();
    assert!(classes.starts_with("class,count,fraction\n"));
}

#[test]
fn grad_check_command_passes() {
    let dir = tmp("gradcheck");
    let (ok, stdout, err) =
        run(&["grad-check", "--seed", "5", "--out", dir.join("g").to_str().unwrap()]);
    assert!(ok, "{stdout}\n{err}");
    let json = std::fs::read_to_string(dir.join("g/grad_check.json")).unwrap();
    assert!(json.contains("\"passed\": true"), "{json}");
}
