use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use lcvmark::attacks::{apply_attack, parse_attack_list, AttackSpec};
use lcvmark::bench::{
    compare_modes, derive_keys, evaluate, evaluate_corpus, load_corpus, Aggregate, BenchSetup, CorpusImage,
    DEFAULT_PAYLOAD_LEN, DEFAULT_RUNS,
};
use lcvmark::codec::{embed_payload, extract_payload, keystream, Watermark};
use lcvmark::complexity::dataset_stats;
use lcvmark::metrics::{psnr, similarity, ssim};
use lcvmark::transforms::ct_decompose;
use lcvmark::{DatasetStats, EmbedConfig, GrayImage, SecretKey};

const DEFAULT_KEY_SEED: u64 = 0x5EED;

#[derive(Parser, Debug)]
#[command(name = "lcvmark", version, about = "Blind adaptive contourlet + DCT image watermarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute reference complexity statistics over a directory of images.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a keyed payload into an image.
    Embed(EmbedArgs),
    /// Blindly extract a payload from an image.
    Extract(ExtractArgs),
    /// Apply one attack to an image.
    Attack {
        #[arg(long)]
        image: PathBuf,
        /// Compact attack spec such as `jpeg:70`, `crop:0.25` or `rotate:1`.
        #[arg(long)]
        spec: AttackSpec,
        /// Seed for noise attacks.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed, attack and score one image under several keys.
    Evaluate(EvaluateArgs),
    /// Embed, attack and score a whole corpus.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// JSON embedding configuration; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the fixed initial strength for every block.
    #[arg(long)]
    non_adaptive: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<EmbedConfig> {
        let config = match &self.config {
            Some(path) => EmbedConfig::load(path).with_context(|| format!("loading config {}", path.display()))?,
            None => EmbedConfig::default(),
        };
        Ok(if self.non_adaptive { config.non_adaptive() } else { config })
    }
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long)]
    image: PathBuf,
    /// 64-bit key as hex; seeds the payload unless `--payload-file` is given.
    #[arg(long)]
    key: SecretKey,
    #[arg(long)]
    payload_len: Option<usize>,
    /// ASCII '0'/'1' payload; overrides the keyed payload.
    #[arg(long)]
    payload_file: Option<PathBuf>,
    #[arg(long)]
    stats: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: PathBuf,
    /// JSON embedding report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory for PGM dumps of the cover and marked subbands.
    #[arg(long)]
    dump_subbands: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    image: PathBuf,
    /// Key of the expected payload; only used to score the extraction.
    #[arg(long)]
    key: SecretKey,
    #[arg(long, default_value_t = DEFAULT_PAYLOAD_LEN)]
    payload_len: usize,
    /// Expected payload to score against instead of the keyed payload.
    #[arg(long)]
    payload_file: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output bits as ASCII '0'/'1'.
    #[arg(long)]
    out: PathBuf,
    /// JSON per-bit vote totals.
    #[arg(long)]
    confidences: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Comma-separated attack specs, `all` for the standard suite or `none`.
    #[arg(long, default_value = "all")]
    attacks: String,
    /// Seed of the key sequence.
    #[arg(long, default_value_t = DEFAULT_KEY_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_PAYLOAD_LEN)]
    payload_len: usize,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    image: PathBuf,
    /// Number of keys.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    keys: usize,
    #[arg(long)]
    stats: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Number of keys per image.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// Reference statistics; computed from the dataset when omitted.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Run both modes and report their difference.
    #[arg(long, conflicts_with = "non_adaptive")]
    compare_modes: bool,
    #[command(flatten)]
    run: RunArgs,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Stats { dataset, out } => run_stats(&dataset, &out),
        Command::Embed(args) => run_embed(&args),
        Command::Extract(args) => run_extract(&args),
        Command::Attack { image, spec, seed, out } => run_attack(&image, spec, seed, &out),
        Command::Evaluate(args) => run_evaluate(&args),
        Command::Bench(args) => run_bench(&args),
    }
}

fn load_image(path: &Path) -> Result<GrayImage> {
    GrayImage::load(path).with_context(|| format!("reading image {}", path.display()))
}

fn save_image(image: &GrayImage, path: &Path) -> Result<()> {
    image.save(path).with_context(|| format!("writing image {}", path.display()))
}

fn load_stats(path: &Path) -> Result<DatasetStats> {
    DatasetStats::load(path).with_context(|| format!("reading stats {}", path.display()))
}

fn load_payload(path: &Path) -> Result<Watermark> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading payload {}", path.display()))?;
    Watermark::from_ascii(&text).with_context(|| format!("parsing payload {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_stats(dataset: &Path, out: &Path) -> Result<()> {
    let corpus = load_corpus(dataset).with_context(|| format!("loading dataset {}", dataset.display()))?;
    let images: Vec<GrayImage> = corpus.into_iter().map(|c| c.image).collect();
    let stats = dataset_stats(&images)?;
    stats.save(out).with_context(|| format!("writing {}", out.display()))?;
    println!("{} images: mu_D {:.4} sigma_D {:.4}", stats.image_count, stats.mu_d, stats.sigma_d);
    Ok(())
}

fn run_embed(args: &EmbedArgs) -> Result<()> {
    let cover = load_image(&args.image)?;
    let stats = load_stats(&args.stats)?;
    let config = args.config.resolve()?;
    let payload = match &args.payload_file {
        Some(path) => {
            let payload = load_payload(path)?;
            if let Some(len) = args.payload_len {
                ensure!(
                    len == payload.len(),
                    "--payload-len {len} does not match the {} bits in {}",
                    payload.len(),
                    path.display()
                );
            }
            payload
        }
        None => keystream(args.key, args.payload_len.unwrap_or(DEFAULT_PAYLOAD_LEN))?,
    };
    let (marked, report) = embed_payload(&cover, &payload, &config, &stats)?;
    save_image(&marked, &args.out)?;
    if report.alpha_i_approx == 0.0 || report.alpha_i_detail == 0.0 {
        eprintln!("warning: initial strength is zero for this cover and dataset; the mark will not be recoverable");
    }
    if let Some(path) = &args.report {
        write_text(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    if let Some(dir) = &args.dump_subbands {
        ct_decompose(&cover)?.dump_pgm(dir, "cover")?;
        ct_decompose(&marked)?.dump_pgm(dir, "marked")?;
    }
    println!(
        "embedded {} bits ({}): psnr {:.3} dB ssim {:.4} alpha_i {:.3}/{:.3}",
        payload.len(),
        if config.adaptive { "adaptive" } else { "non-adaptive" },
        psnr(&cover, &marked)?,
        ssim(&cover, &marked)?,
        report.alpha_i_approx,
        report.alpha_i_detail,
    );
    Ok(())
}

fn run_extract(args: &ExtractArgs) -> Result<()> {
    let image = load_image(&args.image)?;
    let config = match &args.config {
        Some(path) => EmbedConfig::load(path).with_context(|| format!("loading config {}", path.display()))?,
        None => EmbedConfig::default(),
    };
    let expected = match &args.payload_file {
        Some(path) => load_payload(path)?,
        None => keystream(args.key, args.payload_len)?,
    };
    ensure!(
        expected.len() == args.payload_len,
        "--payload-len {} does not match the {} expected bits",
        args.payload_len,
        expected.len()
    );
    let (bits, confidences) = extract_payload(&image, args.payload_len, &config)?;
    write_text(&args.out, &(bits.to_ascii() + "\n"))?;
    if let Some(path) = &args.confidences {
        write_text(path, &(serde_json::to_string_pretty(&confidences)? + "\n"))?;
    }
    let sim = similarity(&expected, &bits)?;
    println!("extracted {} bits: nc {:.4} ber {:.4}", bits.len(), sim.nc, sim.ber);
    Ok(())
}

fn run_attack(image: &Path, spec: AttackSpec, seed: Option<u64>, out: &Path) -> Result<()> {
    let spec = seed.map_or(spec, |s| spec.with_seed(s));
    let attacked = apply_attack(&load_image(image)?, &spec)?;
    save_image(&attacked, out)?;
    println!("applied {spec}");
    Ok(())
}

fn setup(run: &RunArgs, keys: usize, stats: DatasetStats) -> Result<BenchSetup> {
    if keys == 0 {
        bail!("at least one key is required");
    }
    let attacks = parse_attack_list(&run.attacks)?;
    let mut setup = BenchSetup::new(derive_keys(run.seed, keys), attacks, run.config.resolve()?, stats);
    setup.payload_len = run.payload_len;
    Ok(setup)
}

fn print_summary(label: &str, aggregates: &[Aggregate]) {
    println!("{label}");
    println!("  {:<14} {:>5} {:>9} {:>7} {:>7} {:>7}", "attack", "runs", "psnr", "ssim", "nc", "ber");
    for a in aggregates.iter().filter(|a| a.image == "*") {
        let psnr = a.mean_psnr.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        let ssim = a.mean_ssim.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        println!("  {:<14} {:>5} {:>9} {:>7} {:>7.4} {:>7.4}", a.attack, a.runs, psnr, ssim, a.mean_nc, a.mean_ber);
    }
}

fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let item = CorpusImage::load(&args.image).with_context(|| format!("reading image {}", args.image.display()))?;
    let setup = setup(&args.run, args.keys, load_stats(&args.stats)?)?;
    let report = evaluate(&item, &setup)?;
    report.write_csv(create(&args.run.csv)?)?;
    if let Some(path) = &args.run.json {
        write_text(path, &(report.to_json()? + "\n"))?;
    }
    print_summary(&report.mode, &report.aggregates);
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let corpus = load_corpus(&args.dataset).with_context(|| format!("loading dataset {}", args.dataset.display()))?;
    let stats = match &args.stats {
        Some(path) => load_stats(path)?,
        None => dataset_stats(&corpus.iter().map(|c| c.image.clone()).collect::<Vec<_>>())?,
    };
    let setup = setup(&args.run, args.runs, stats)?;
    if args.compare_modes {
        let cmp = compare_modes(&corpus, &setup)?;
        let mut csv = create(&args.run.csv)?;
        cmp.write_csv(&mut csv)?;
        csv.flush()?;
        if let Some(path) = &args.run.json {
            write_text(path, &(cmp.to_json()? + "\n"))?;
        }
        print_summary("adaptive", &cmp.adaptive.aggregates);
        print_summary("non_adaptive", &cmp.non_adaptive.aggregates);
        println!("adaptive - non_adaptive");
        for d in &cmp.diff {
            let dp = d.delta_psnr.map_or_else(|| "-".to_string(), |v| format!("{v:+.3}"));
            println!("  {:<14} psnr {:>8} ber {:+.4}", d.attack, dp, d.delta_ber);
        }
    } else {
        let report = evaluate_corpus(&corpus, &setup)?;
        report.write_csv(create(&args.run.csv)?)?;
        if let Some(path) = &args.run.json {
            write_text(path, &(report.to_json()? + "\n"))?;
        }
        print_summary(&report.mode, &report.aggregates);
    }
    Ok(())
}
