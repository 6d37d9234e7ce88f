use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lcvmark::image::quantize;
use lcvmark::GrayImage;
use tempfile::TempDir;

fn textured(seed: usize) -> GrayImage {
    GrayImage::from_fn(128, 128, |r, c| {
        let t = (r as f64 * 0.21 + seed as f64).sin() * (c as f64 * 0.13).cos();
        quantize(120.0 + 60.0 * t + ((r * 37 + c * 11 + seed * 5) % 29) as f64)
    })
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcvmark")).args(args).output().expect("spawn lcvmark")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "lcvmark {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fail(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "lcvmark {args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    /// Two-image dataset plus its stats file.
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let data = dir.path().join("data");
        std::fs::create_dir(&data).unwrap();
        for seed in 0..2 {
            textured(seed).save(data.join(format!("img{seed}.png"))).unwrap();
        }
        let f = Self { dir };
        ok(&["stats", "--dataset", s(&f.data()), "--out", s(&f.path("stats.json"))]);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn data(&self) -> PathBuf {
        self.path("data")
    }

    fn cover(&self) -> PathBuf {
        self.data().join("img0.png")
    }
}

#[test]
fn stats_writes_dataset_summary() {
    let f = Fixture::new();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(f.path("stats.json")).unwrap()).unwrap();
    assert_eq!(v["image_count"], 2);
    assert!(v["mu_D"].as_f64().unwrap() > 0.0);
    assert!(v["sigma_D"].as_f64().unwrap() >= 0.0);
}

#[test]
fn embed_then_extract_recovers_keyed_payload() {
    let f = Fixture::new();
    let (marked, bits, report) = (f.path("m.png"), f.path("bits.txt"), f.path("r.json"));
    ok(&[
        "embed",
        "--image",
        s(&f.cover()),
        "--key",
        "0x1234abcd",
        "--payload-len",
        "64",
        "--stats",
        s(&f.path("stats.json")),
        "--out",
        s(&marked),
        "--report",
        s(&report),
    ]);
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["payload_len"], 64);
    assert_eq!(r["adaptive"], true);

    let stdout = ok(&[
        "extract",
        "--image",
        s(&marked),
        "--key",
        "1234abcd",
        "--payload-len",
        "64",
        "--out",
        s(&bits),
        "--confidences",
        s(&f.path("c.json")),
    ]);
    assert!(stdout.contains("ber 0.0000"), "{stdout}");
    let text = std::fs::read_to_string(&bits).unwrap();
    assert_eq!(text.trim().len(), 64);
    assert!(text.trim().chars().all(|c| c == '0' || c == '1'));
    let conf: serde_json::Value = serde_json::from_slice(&std::fs::read(f.path("c.json")).unwrap()).unwrap();
    assert_eq!(conf.as_array().unwrap().len(), 64);
}

#[test]
fn payload_file_round_trip_and_length_check() {
    let f = Fixture::new();
    let payload = f.path("payload.txt");
    let bits: String = (0..40).map(|i| if (i * 7) % 3 == 0 { '1' } else { '0' }).collect();
    std::fs::write(&payload, format!("{bits}\n")).unwrap();
    let marked = f.path("m.png");
    ok(&[
        "embed",
        "--image",
        s(&f.cover()),
        "--key",
        "1",
        "--payload-file",
        s(&payload),
        "--stats",
        s(&f.path("stats.json")),
        "--non-adaptive",
        "--out",
        s(&marked),
    ]);
    let out = f.path("bits.txt");
    let stdout = ok(&[
        "extract",
        "--image",
        s(&marked),
        "--key",
        "1",
        "--payload-len",
        "40",
        "--payload-file",
        s(&payload),
        "--out",
        s(&out),
    ]);
    assert!(stdout.contains("ber 0.0000"), "{stdout}");
    assert_eq!(std::fs::read_to_string(&out).unwrap().trim(), bits);

    let err = fail(&[
        "embed",
        "--image",
        s(&f.cover()),
        "--key",
        "1",
        "--payload-file",
        s(&payload),
        "--payload-len",
        "41",
        "--stats",
        s(&f.path("stats.json")),
        "--out",
        s(&marked),
    ]);
    assert!(err.contains("does not match"), "{err}");
}

#[test]
fn dump_subbands_writes_pgm_files() {
    let f = Fixture::new();
    let dump = f.path("dump");
    ok(&[
        "embed",
        "--image",
        s(&f.cover()),
        "--key",
        "7",
        "--stats",
        s(&f.path("stats.json")),
        "--out",
        s(&f.path("m.png")),
        "--dump-subbands",
        s(&dump),
    ]);
    for stem in ["cover", "marked"] {
        for band in ["approx", "dir0", "dir1", "dir2", "dir3"] {
            let img = GrayImage::load(dump.join(format!("{stem}_{band}.pgm"))).unwrap();
            assert_eq!((img.width(), img.height()), (64, 64));
        }
    }
}

#[test]
fn attack_keeps_dimensions_and_is_seeded() {
    let f = Fixture::new();
    for spec in ["jpeg:50", "crop:0.25", "rotate:2", "resize:0.5", "median:3", "histeq"] {
        let out = f.path("a.png");
        ok(&["attack", "--image", s(&f.cover()), "--spec", spec, "--out", s(&out)]);
        let img = GrayImage::load(&out).unwrap();
        assert_eq!((img.width(), img.height()), (128, 128), "{spec}");
    }
    let noisy = |seed: &str, name: &str| {
        let out = f.path(name);
        ok(&["attack", "--image", s(&f.cover()), "--spec", "gaussian:0.01", "--seed", seed, "--out", s(&out)]);
        std::fs::read(out).unwrap()
    };
    assert_eq!(noisy("3", "n1.png"), noisy("3", "n2.png"));
    assert_ne!(noisy("3", "n3.png"), noisy("4", "n4.png"));
}

#[test]
fn evaluate_emits_one_row_per_key_and_attack() {
    let f = Fixture::new();
    let csv = f.path("e.csv");
    ok(&[
        "evaluate",
        "--image",
        s(&f.cover()),
        "--keys",
        "3",
        "--attacks",
        "jpeg:90,crop:0.1",
        "--stats",
        s(&f.path("stats.json")),
        "--csv",
        s(&csv),
        "--json",
        s(&f.path("e.json")),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("mode,image,key,attack,attack_seed,psnr,ssim,nc,ber"));
    assert_eq!(lines.count(), 3 * 3);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(f.path("e.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 9);
    assert_eq!(json["manifest"][0]["name"], "img0.png");
}

#[test]
fn bench_is_byte_deterministic() {
    let f = Fixture::new();
    let run_once = |tag: &str| {
        let (csv, json) = (f.path(&format!("{tag}.csv")), f.path(&format!("{tag}.json")));
        ok(&[
            "bench",
            "--dataset",
            s(&f.data()),
            "--runs",
            "2",
            "--attacks",
            "jpeg:80,gaussian:0.001",
            "--compare-modes",
            "--seed",
            "11",
            "--csv",
            s(&csv),
            "--json",
            s(&json),
        ]);
        (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap())
    };
    let (csv_a, json_a) = run_once("a");
    let (csv_b, json_b) = run_once("b");
    assert_eq!(csv_a, csv_b);
    assert_eq!(json_a, json_b);
    let text = String::from_utf8(csv_a).unwrap();
    // 2 modes x 2 images x 2 keys x (1 + 2 attacks)
    assert_eq!(text.lines().count(), 1 + 24);
    let json: serde_json::Value = serde_json::from_slice(&json_a).unwrap();
    assert_eq!(json["diff"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_inputs_are_reported() {
    let f = Fixture::new();
    let stats = f.path("stats.json");
    let err = fail(&["embed", "--image", s(&f.cover()), "--key", "xyz", "--stats", s(&stats), "--out", "o.png"]);
    assert!(err.contains("--key"), "{err}");
    let err = fail(&[
        "embed",
        "--image",
        s(&f.cover()),
        "--key",
        "1",
        "--stats",
        s(&f.path("missing.json")),
        "--out",
        "o.png",
    ]);
    assert!(err.contains("missing.json"), "{err}");
    let odd = f.path("odd.png");
    GrayImage::filled(100, 100, 9).save(&odd).unwrap();
    let err = fail(&["embed", "--image", s(&odd), "--key", "1", "--stats", s(&stats), "--out", s(&f.path("o.png"))]);
    assert!(err.contains("not divisible"), "{err}");
    let err = fail(&["bench", "--dataset", s(&f.data()), "--runs", "0", "--csv", s(&f.path("b.csv"))]);
    assert!(err.contains("at least one key"), "{err}");
    let err =
        fail(&["bench", "--dataset", s(&f.data()), "--compare-modes", "--non-adaptive", "--csv", s(&f.path("b.csv"))]);
    assert!(err.contains("cannot be used with"), "{err}");
}
