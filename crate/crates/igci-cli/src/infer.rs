//! The `infer` subcommand.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use igci::inference::{infer_direction, Method, OrderingMode, Reference};
use igci::{Error, SamplePair};
use serde::Serialize;

use crate::pairfile::{self, PairFile};
use crate::report;
use crate::{EXIT_DEGENERATE, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Slope,
    Entropy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrderingArg {
    Det,
    Noisy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReferenceArg {
    Uniform,
    Gaussian,
}

#[derive(Args)]
pub struct InferArgs {
    /// Input pair file (two-column CSV or whitespace-separated).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Slope)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = OrderingArg::Det)]
    pub ordering: OrderingArg,
    /// Reference measure for the entropy method.
    #[arg(long, value_enum, default_value_t = ReferenceArg::Uniform)]
    pub reference: ReferenceArg,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerdictPayload {
    input: InputInfo,
    verdict: VerdictInfo,
}

#[derive(Serialize)]
struct InputInfo {
    path: String,
    format: String,
    header: bool,
    n: usize,
}

#[derive(Serialize)]
struct VerdictInfo {
    score_xy: f64,
    score_yx: f64,
    direction: String,
    confidence: f64,
    method: String,
    ordering: String,
}

pub fn resolve_method(method: MethodArg, reference: ReferenceArg) -> Result<Method, String> {
    match (method, reference) {
        (MethodArg::Slope, ReferenceArg::Uniform) => Ok(Method::Slope),
        (MethodArg::Slope, ReferenceArg::Gaussian) => {
            Err("the slope method supports only the uniform reference".into())
        }
        (MethodArg::Entropy, ReferenceArg::Uniform) => Ok(Method::Entropy(Reference::Uniform)),
        (MethodArg::Entropy, ReferenceArg::Gaussian) => Ok(Method::Entropy(Reference::Gaussian)),
    }
}

pub fn run(args: &InferArgs) -> i32 {
    let method = match resolve_method(args.method, args.reference) {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let ordering = match args.ordering {
        OrderingArg::Det => OrderingMode::Deterministic,
        OrderingArg::Noisy => OrderingMode::Noisy,
    };
    let file = match pairfile::parse_path(&args.input) {
        Ok(file) => file,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input.display());
            return EXIT_FAILURE;
        }
    };
    // Duplicate coordinates break the invertible-function assumption; point
    // at the offending rows before the library loses the line numbers.
    if matches!(method, Method::Slope) && matches!(ordering, OrderingMode::Deterministic) {
        if let Some(code) = reject_duplicates(&file) {
            return code;
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = file.rows.iter().copied().unzip();
    let sample = match SamplePair::new(xs, ys) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_DEGENERATE;
        }
    };
    let verdict = match infer_direction(&sample, method, ordering) {
        Ok(v) => v,
        Err(e @ (Error::DegenerateData(_) | Error::InsufficientData { .. })) => {
            eprintln!("error: {e}");
            return EXIT_DEGENERATE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let payload = VerdictPayload {
        input: InputInfo {
            path: args.input.display().to_string(),
            format: file.format.to_string(),
            header: file.header,
            n: file.rows.len(),
        },
        verdict: VerdictInfo {
            score_xy: verdict.score_xy,
            score_yx: verdict.score_yx,
            direction: verdict.direction.to_string(),
            confidence: verdict.confidence,
            method: verdict.method.to_string(),
            ordering: verdict.ordering.to_string(),
        },
    };
    match report::render("infer", payload).and_then(|text| report::emit(&text, args.out.as_deref()))
    {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn reject_duplicates(file: &PairFile) -> Option<i32> {
    for (pick_x, axis) in [(true, "x"), (false, "y")] {
        if let Some((value, first, second)) =
            pairfile::find_duplicate(&file.rows, &file.lines, pick_x)
        {
            eprintln!(
                "error: duplicate {axis} value {value} at lines {first} and {second}: \
                 deterministic ordering assumes an invertible function (use --ordering noisy)"
            );
            return Some(EXIT_DEGENERATE);
        }
    }
    None
}
