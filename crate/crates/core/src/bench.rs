//! Experiment orchestration: embed, attack, extract and score over a corpus
//! and a list of keys, with deterministic CSV/JSON emission.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `mode` | `adaptive` or `non_adaptive` |
//! | `image` | corpus file name |
//! | `key` | 16-digit hex key |
//! | `attack` | compact attack spec, `none` for the no-attack row |
//! | `attack_seed` | seed used by noise attacks (0 otherwise) |
//! | `psnr`, `ssim` | watermarked vs original; empty on attack rows |
//! | `nc`, `ber` | extracted vs embedded payload |
//! | `mu_i` | mean pixel complexity of the cover |
//! | `alpha_i_approx`, `alpha_i_detail` | initial strengths |
//! | `alpha_mean_approx`, `alpha_mean_detail` | mean per-block strengths |
//! | `config` | resolved configuration as compact JSON |

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attacks::{apply_attack, AttackSpec};
use crate::codec::{embed_payload, extract_payload, keystream, EmbedConfig, SecretKey, SplitMix64};
use crate::complexity::DatasetStats;
use crate::error::{input, Result};
use crate::image::GrayImage;
use crate::metrics::{psnr, similarity, ssim};

pub const DEFAULT_PAYLOAD_LEN: usize = 128;
pub const DEFAULT_RUNS: usize = 20;
pub const NO_ATTACK: &str = "none";

const IMAGE_EXTENSIONS: [&str; 7] = ["png", "pgm", "pnm", "bmp", "tif", "tiff", "jpg"];

/// A named cover image together with a content hash for the manifest.
#[derive(Clone, Debug)]
pub struct CorpusImage {
    pub name: String,
    pub sha256: String,
    pub image: GrayImage,
}

impl CorpusImage {
    /// Wraps an in-memory image; the hash covers its raw samples.
    pub fn from_image(name: impl Into<String>, image: GrayImage) -> Self {
        let sha256 = hex::encode(Sha256::digest(image.samples()));
        Self { name: name.into(), sha256, image }
    }

    /// Loads an image file; the hash covers the file bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)?;
        let decoded = image::load_from_memory(&bytes)?;
        let name =
            path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string());
        Ok(Self { name, sha256: hex::encode(Sha256::digest(&bytes)), image: GrayImage::from_dynamic(&decoded) })
    }
}

/// Loads every image file in `dir`, sorted by file name.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<CorpusImage>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir.as_ref())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(input(format!("no images found in {}", dir.as_ref().display())));
    }
    paths.iter().map(CorpusImage::load).collect()
}

/// `n` keys drawn from a SplitMix64 stream seeded with `seed`.
pub fn derive_keys(seed: u64, n: usize) -> Vec<SecretKey> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| SecretKey(rng.next_u64())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub width: usize,
    pub height: usize,
}

/// Everything a run depends on besides the corpus.
#[derive(Clone, Debug)]
pub struct BenchSetup {
    pub keys: Vec<SecretKey>,
    pub attacks: Vec<AttackSpec>,
    pub config: EmbedConfig,
    pub stats: DatasetStats,
    pub payload_len: usize,
}

impl BenchSetup {
    pub fn new(keys: Vec<SecretKey>, attacks: Vec<AttackSpec>, config: EmbedConfig, stats: DatasetStats) -> Self {
        Self { keys, attacks, config, stats, payload_len: DEFAULT_PAYLOAD_LEN }
    }

    fn validate(&self) -> Result<()> {
        if self.keys.is_empty() {
            return Err(input("at least one key is required"));
        }
        if self.payload_len == 0 {
            return Err(input("payload length must be at least 1"));
        }
        for a in &self.attacks {
            a.validate()?;
        }
        self.config.validate()?;
        self.stats.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub mode: String,
    pub image: String,
    pub key: String,
    pub attack: String,
    pub attack_seed: u64,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub nc: f64,
    pub ber: f64,
    pub mu_i: f64,
    pub alpha_i_approx: f64,
    pub alpha_i_detail: f64,
    pub alpha_mean_approx: f64,
    pub alpha_mean_detail: f64,
    pub config: String,
}

impl ResultRow {
    pub fn is_fidelity(&self) -> bool {
        self.attack == NO_ATTACK
    }
}

/// Means over the rows sharing `(image, attack)`; `image` is `*` for the
/// corpus-wide mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub image: String,
    pub attack: String,
    pub runs: usize,
    pub mean_psnr: Option<f64>,
    pub mean_ssim: Option<f64>,
    pub mean_nc: f64,
    pub mean_ber: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mode: String,
    pub config: EmbedConfig,
    pub stats: DatasetStats,
    pub payload_len: usize,
    pub keys: Vec<String>,
    pub attacks: Vec<AttackSpec>,
    pub manifest: Vec<ManifestEntry>,
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<Aggregate>,
}

impl EvaluationReport {
    pub fn fidelity_rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.is_fidelity())
    }

    pub fn robustness_rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| !r.is_fidelity())
    }

    /// Corpus-wide aggregate for `attack` (`none` for fidelity).
    pub fn overall(&self, attack: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.image == "*" && a.attack == attack)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(self.rows.iter(), out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Writes rows with the fixed column layout documented on this module.
pub fn write_rows_csv<'a, W: Write>(rows: impl IntoIterator<Item = &'a ResultRow>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn mode_name(config: &EmbedConfig) -> &'static str {
    if config.adaptive {
        "adaptive"
    } else {
        "non_adaptive"
    }
}

/// Seed for a noise attack: the attack's own seed offset by the key.
fn attack_seed(spec: &AttackSpec, key: SecretKey) -> (AttackSpec, u64) {
    match spec {
        AttackSpec::GaussianNoise { seed, .. } | AttackSpec::SaltPepper { seed, .. } => {
            let s = seed.wrapping_add(key.0);
            (spec.with_seed(s), s)
        }
        _ => (*spec, 0),
    }
}

fn run_key(item: &CorpusImage, key: SecretKey, setup: &BenchSetup, config_json: &str) -> Result<Vec<ResultRow>> {
    let payload = keystream(key, setup.payload_len)?;
    let (marked, report) = embed_payload(&item.image, &payload, &setup.config, &setup.stats)?;
    let details: Vec<f64> = report.subbands.iter().skip(1).map(|s| s.alpha_mean).collect();
    let template = ResultRow {
        mode: mode_name(&setup.config).to_string(),
        image: item.name.clone(),
        key: key.to_string(),
        attack: NO_ATTACK.to_string(),
        attack_seed: 0,
        psnr: None,
        ssim: None,
        nc: 0.0,
        ber: 0.0,
        mu_i: report.mu_i,
        alpha_i_approx: report.alpha_i_approx,
        alpha_i_detail: report.alpha_i_detail,
        alpha_mean_approx: report.subbands[0].alpha_mean,
        alpha_mean_detail: details.iter().sum::<f64>() / details.len() as f64,
        config: config_json.to_string(),
    };

    let mut rows = Vec::with_capacity(1 + setup.attacks.len());
    let (bits, _) = extract_payload(&marked, setup.payload_len, &setup.config)?;
    let sim = similarity(&payload, &bits)?;
    rows.push(ResultRow {
        psnr: Some(psnr(&item.image, &marked)?),
        ssim: Some(ssim(&item.image, &marked)?),
        nc: sim.nc,
        ber: sim.ber,
        ..template.clone()
    });
    for spec in &setup.attacks {
        let (seeded, seed) = attack_seed(spec, key);
        let attacked = apply_attack(&marked, &seeded)?;
        let (bits, _) = extract_payload(&attacked, setup.payload_len, &setup.config)?;
        let sim = similarity(&payload, &bits)?;
        rows.push(ResultRow { attack: spec.label(), attack_seed: seed, nc: sim.nc, ber: sim.ber, ..template.clone() });
    }
    Ok(rows)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Recomputes the aggregates of `rows`: per image and corpus-wide, in
/// first-seen attack order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<Aggregate> {
    let mut attack_order: Vec<&str> = Vec::new();
    let mut image_order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(&str, &str), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        if !attack_order.contains(&row.attack.as_str()) {
            attack_order.push(&row.attack);
        }
        if !image_order.contains(&row.image.as_str()) {
            image_order.push(&row.image);
        }
        groups.entry((&row.image, &row.attack)).or_default().push(row);
        groups.entry(("*", &row.attack)).or_default().push(row);
    }
    let mut out = Vec::new();
    for image in image_order.iter().copied().chain(["*"]) {
        for &attack in &attack_order {
            let Some(members) = groups.get(&(image, attack)) else { continue };
            out.push(Aggregate {
                image: image.to_string(),
                attack: attack.to_string(),
                runs: members.len(),
                mean_psnr: mean(members.iter().filter_map(|r| r.psnr)),
                mean_ssim: mean(members.iter().filter_map(|r| r.ssim)),
                mean_nc: mean(members.iter().map(|r| r.nc)).unwrap_or(0.0),
                mean_ber: mean(members.iter().map(|r| r.ber)).unwrap_or(0.0),
            });
        }
    }
    out
}

/// Runs every `(image, key)` pair of the corpus; rows are ordered by image,
/// then key, then attack, whatever the scheduling.
pub fn evaluate_corpus(corpus: &[CorpusImage], setup: &BenchSetup) -> Result<EvaluationReport> {
    setup.validate()?;
    if corpus.is_empty() {
        return Err(input("corpus is empty"));
    }
    let config_json = serde_json::to_string(&setup.config)?;
    let jobs: Vec<(&CorpusImage, SecretKey)> =
        corpus.iter().flat_map(|item| setup.keys.iter().map(move |&k| (item, k))).collect();
    let chunks =
        jobs.par_iter().map(|&(item, key)| run_key(item, key, setup, &config_json)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<ResultRow> = chunks.into_iter().flatten().collect();
    Ok(EvaluationReport {
        mode: mode_name(&setup.config).to_string(),
        config: setup.config,
        stats: setup.stats,
        payload_len: setup.payload_len,
        keys: setup.keys.iter().map(|k| k.to_string()).collect(),
        attacks: setup.attacks.clone(),
        manifest: corpus
            .iter()
            .map(|c| ManifestEntry {
                name: c.name.clone(),
                sha256: c.sha256.clone(),
                width: c.image.width(),
                height: c.image.height(),
            })
            .collect(),
        aggregates: aggregate(&rows),
        rows,
    })
}

/// Single-image evaluation.
pub fn evaluate(image: &CorpusImage, setup: &BenchSetup) -> Result<EvaluationReport> {
    evaluate_corpus(std::slice::from_ref(image), setup)
}

/// Corpus-wide adaptive minus non-adaptive difference for one attack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeDiff {
    pub attack: String,
    pub delta_psnr: Option<f64>,
    pub delta_ber: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub adaptive: EvaluationReport,
    pub non_adaptive: EvaluationReport,
    pub diff: Vec<ModeDiff>,
}

impl ModeComparison {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(self.adaptive.rows.iter().chain(&self.non_adaptive.rows), out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evaluates the corpus twice, differing only in the adaptive flag.
pub fn compare_modes(corpus: &[CorpusImage], setup: &BenchSetup) -> Result<ModeComparison> {
    let adaptive_setup = BenchSetup { config: EmbedConfig { adaptive: true, ..setup.config }, ..setup.clone() };
    let fixed_setup = BenchSetup { config: setup.config.non_adaptive(), ..setup.clone() };
    let adaptive = evaluate_corpus(corpus, &adaptive_setup)?;
    let non_adaptive = evaluate_corpus(corpus, &fixed_setup)?;
    let diff = adaptive
        .aggregates
        .iter()
        .filter(|a| a.image == "*")
        .filter_map(|a| {
            let b = non_adaptive.overall(&a.attack)?;
            Some(ModeDiff {
                attack: a.attack.clone(),
                delta_psnr: a.mean_psnr.zip(b.mean_psnr).map(|(x, y)| x - y),
                delta_ber: a.mean_ber - b.mean_ber,
            })
        })
        .collect();
    Ok(ModeComparison { adaptive, non_adaptive, diff })
}
