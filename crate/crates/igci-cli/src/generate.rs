//! The `generate` subcommand: synthetic pair files for fixtures.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use igci::synth::{random_density, random_diffeomorphism, sample_pair, GeneratorConfig};
use serde::Serialize;

use crate::pairfile::{write_rows, PairFormat};
use crate::report;
use crate::{EXIT_FAILURE, EXIT_OK};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Whitespace,
    Csv,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Generator config file (key=value lines); flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of observations.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub map_roughness: Option<f64>,
    #[arg(long)]
    pub density_roughness: Option<f64>,
    /// Output pair file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Whitespace)]
    pub format: FormatArg,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct GeneratePayload {
    seed: u64,
    n: usize,
    noise_level: f64,
    bins: usize,
    map_roughness: f64,
    density_roughness: f64,
    output: String,
    format: String,
}

pub fn run(args: &GenerateArgs) -> i32 {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return EXIT_FAILURE;
                }
            };
            match GeneratorConfig::from_key_value_str(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return EXIT_FAILURE;
                }
            }
        }
        None => GeneratorConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(noise) = args.noise {
        cfg.noise_level = noise;
    }
    if let Some(bins) = args.bins {
        cfg.bins = bins;
    }
    if let Some(r) = args.map_roughness {
        cfg.map_roughness = r;
    }
    if let Some(r) = args.density_roughness {
        cfg.density_roughness = r;
    }

    let result = (|| -> igci::Result<String> {
        cfg.validate()?;
        let p = random_density(&cfg)?;
        let f = random_diffeomorphism(&cfg)?;
        let sample = sample_pair(&p, &f, args.n, cfg.noise_level, cfg.seed)?;
        let rows: Vec<(f64, f64)> = sample
            .xs()
            .iter()
            .copied()
            .zip(sample.ys().iter().copied())
            .collect();
        let format = match args.format {
            FormatArg::Whitespace => PairFormat::WhitespaceTwoCol,
            FormatArg::Csv => PairFormat::CsvTwoCol,
        };
        Ok(write_rows(&rows, format))
    })();
    let text = match result {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    if let Err(e) = std::fs::write(&args.out, &text) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_FAILURE;
    }
    let payload = GeneratePayload {
        seed: cfg.seed,
        n: args.n,
        noise_level: cfg.noise_level,
        bins: cfg.bins,
        map_roughness: cfg.map_roughness,
        density_roughness: cfg.density_roughness,
        output: args.out.display().to_string(),
        format: match args.format {
            FormatArg::Whitespace => "whitespace_two_col".into(),
            FormatArg::Csv => "csv_two_col".into(),
        },
    };
    match report::render("generate", payload)
        .and_then(|text| report::emit(&text, args.report.as_deref()))
    {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
