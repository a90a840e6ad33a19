use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use phosc::formats::{checkpoint, log, report};
use phosc_core::metrics::harmonic_mean;
use phosc_core::model::ModelConfig;
use tempfile::TempDir;

const TINY: &str = r#"{
  "corpus": {"n_seen": 6, "n_unseen": 3, "styles": 1, "copies_per_word": 3},
  "phoscnet_training": {"max_epochs": 2, "batch_size": 4},
  "ctc_training": {"max_epochs": 2, "batch_size": 4}
}"#;

fn phosc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phosc"))
        .arg("--workdir")
        .arg(dir)
        .args(args)
        .env_remove("PHOSC_SEED")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = phosc(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), TINY).unwrap();
    dir
}

fn files_under(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn full_pipeline_is_deterministic() {
    let runs: Vec<TempDir> = (0..2).map(|_| workspace()).collect();
    for ws in &runs {
        let d = ws.path();
        let manifest = ok(d, &["--config", "cfg.json", "synth"]);
        assert!(manifest.trim().ends_with("manifest.tsv"));
        ok(d, &["--config", "cfg.json", "train", "--variant", "phoscnet", "--quiet"]);
        ok(d, &["--config", "cfg.json", "train", "--variant", "ctc", "--quiet"]);
        ok(
            d,
            &["--config", "cfg.json", "train", "--variant", "ctc_p", "--source", "runs/phoscnet.ckpt", "--quiet"],
        );
        let table = ok(
            d,
            &[
                "--config",
                "cfg.json",
                "eval",
                "--checkpoint",
                "runs/ctc.ckpt",
                "--checkpoint",
                "runs/ctc_p.ckpt",
                "--checkpoint",
                "runs/phoscnet.ckpt",
            ],
        );
        let header = table.lines().next().unwrap();
        for col in ["ctc:A_u", "ctc_p:A_s", "phoscnet:h", "ctc_p:CER"] {
            assert!(header.split('\t').any(|c| c == col), "{header}");
        }
    }
    let (a, b) = (files_under(runs[0].path()), files_under(runs[1].path()));
    assert_eq!(a.len(), b.len());
    for ((pa, ca), (pb, cb)) in a.iter().zip(&b) {
        assert_eq!(pa, pb);
        assert!(ca == cb, "{pa} differs between identical runs");
    }

    let d = runs[0].path();
    for (name, pretrained) in [("phoscnet", None), ("ctc", Some(false)), ("ctc_p", Some(true))] {
        let ckpt = checkpoint::read(&d.join(format!("runs/{name}.ckpt"))).unwrap();
        match (&ckpt.header.model, pretrained) {
            (ModelConfig::PhoscNet(_), None) => {
                ckpt.to_phoscnet::<f32>().unwrap();
            }
            (ModelConfig::Ctc(_), Some(p)) => assert_eq!(ckpt.to_ctc::<f32>().unwrap().is_pretrained(), p),
            _ => panic!("{name} has the wrong architecture"),
        }
        let records = log::read(&d.join(format!("runs/{name}.log.jsonl"))).unwrap();
        assert_eq!(records.len(), 2);
    }
    let summary = report::read_json(&d.join("runs/eval_gzsl.json")).unwrap();
    assert_eq!(summary.models.len(), 3);
    for m in &summary.models {
        let r = &m.report;
        for v in [r.a_u, r.a_s, r.h] {
            assert!((0.0..=1.0).contains(&v));
        }
        assert_eq!(r.h, harmonic_mean(r.a_u, r.a_s).unwrap());
        assert_eq!(r.cer.is_some(), m.decoder.is_some());
    }
}

#[test]
fn seeds_follow_flag_then_env_then_config() {
    let ws = workspace();
    let d = ws.path();
    let manifest = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_phosc"));
        cmd.arg("--workdir").arg(d).args(["--config", "cfg.json"]).args(args).arg("synth");
        match env {
            Some(v) => cmd.env("PHOSC_SEED", v),
            None => cmd.env_remove("PHOSC_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        fs::read(d.join("corpus/train/00000_the.pgm")).unwrap()
    };
    let base = manifest(&[], None);
    let env7 = manifest(&[], Some("7"));
    assert_ne!(base, env7);
    assert_eq!(manifest(&["--seed", "7"], None), env7);
    assert_eq!(manifest(&["--seed", "0"], Some("7")), base);
    let bad = {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_phosc"));
        cmd.arg("--workdir").arg(d).arg("synth").env("PHOSC_SEED", "seven");
        cmd.output().unwrap()
    };
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let ws = workspace();
    let d = ws.path();
    fs::write(d.join("bad.json"), r#"{"corpus": {"colour": "blue"}}"#).unwrap();
    let out = phosc(d, &["--config", "bad.json", "synth"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    assert_eq!(phosc(d, &["--config", "missing.json", "synth"]).status.code(), Some(2));
    assert_eq!(phosc(d, &["train", "--variant", "ctc_p"]).status.code(), Some(2));
    assert_eq!(phosc(d, &["train", "--variant", "bogus"]).status.code(), Some(2));
    assert_eq!(phosc(d, &["decode", "--input", "nope.tsv"]).status.code(), Some(2));
    assert_eq!(phosc(d, &["eval", "--checkpoint", "nope.ckpt"]).status.code(), Some(2));
    assert_eq!(phosc(d, &[]).status.code(), Some(2));
}

#[test]
fn encode_widths_order_and_unknown_characters() {
    let ws = workspace();
    let d = ws.path();
    fs::write(d.join("words.txt"), "silent\nlisten\nzebra\n").unwrap();
    for (mode, width) in [("phos", 165), ("phoc", 364), ("phosc", 529)] {
        let text = ok(d, &["encode", "--words", "words.txt", "--mode", mode]);
        let rows: Vec<(&str, usize)> = text
            .lines()
            .map(|l| {
                let (w, v) = l.split_once('\t').unwrap();
                (w, v.split(',').count())
            })
            .collect();
        assert_eq!(rows, vec![("silent", width), ("listen", width), ("zebra", width)]);
    }
    ok(d, &["encode", "--words", "words.txt", "--out", "sig.tsv"]);
    assert_eq!(fs::read_to_string(d.join("sig.tsv")).unwrap().lines().count(), 3);

    fs::write(d.join("odd.txt"), "fine\nca$h\n").unwrap();
    let out = phosc(d, &["encode", "--words", "odd.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'$'"));
}

#[test]
fn decode_probability_matrices() {
    let ws = workspace();
    let d = ws.path();
    fs::write(
        d.join("pm.tsv"),
        "# symbols=ab blank=last\n1\t0\t0\n1\t0\t0\n0\t0\t1\n1\t0\t0\n0\t1\t0\n",
    )
    .unwrap();
    assert_eq!(ok(d, &["decode", "--input", "pm.tsv"]), "aab\n");
    assert_eq!(ok(d, &["decode", "--input", "pm.tsv", "--best-path"]), "aab\n");
    let verbose = ok(d, &["decode", "--input", "pm.tsv", "--beam", "4", "--verbose"]);
    let mut lines = verbose.lines();
    assert_eq!(lines.next(), Some("aab"));
    let first: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(first[1], "aab");
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);

    fs::write(d.join("broken.tsv"), "# symbols=ab blank=last\n0.5\t0.2\n").unwrap();
    assert_eq!(phosc(d, &["decode", "--input", "broken.tsv"]).status.code(), Some(2));
}

#[test]
fn gradcheck_passes() {
    let ws = workspace();
    let text = ok(ws.path(), &["gradcheck", "--ctc-instances", "20"]);
    assert!(text.lines().count() > 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with("\tpass")), "{text}");
}
