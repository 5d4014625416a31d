use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use normattain::an::sample_subspace_restrictions;
use normattain::spectral::norm::NormOptions;
use normattain::suite::run_suite;
use normattain::{check_n, classify_an, deflate, numrange, operator_norm, parse_spec, Error, SpecDocument};

#[derive(Parser, Debug)]
#[command(name = "normattain", version, about = "Norm attainment checks for structured operators on l2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operator norm with lower/upper bounds and attainment.
    Norm(Common),
    /// Certify whether the operator attains its norm.
    CheckN(Common),
    /// Classify absolute norm attainment.
    ClassifyAn {
        #[command(flatten)]
        common: Common,
        /// Also run the random-subspace falsifier (needs a seed).
        #[arg(long)]
        falsify: bool,
    },
    /// Deflate a positive operator into top eigenpairs plus a remainder.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Maximum number of extracted terms.
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Trace the numerical range boundary.
    Numrange(Common),
    /// Run the built-in example suite.
    PaperSuite,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Operator spec document (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Truncation dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Number of angles for the numerical range.
    #[arg(long)]
    angles: Option<usize>,
    /// Number of falsifier trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Seed for sampling commands.
    #[arg(long)]
    seed: Option<u64>,
    /// Numerical tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write numerical range points to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

const DEFAULT_DIM: usize = 256;
const DEFAULT_ANGLES: usize = 360;
const DEFAULT_TRIALS: usize = 200;
const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_TERMS: usize = 32;

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage { kind: &'static str, message: String },
    Compute(Error),
    /// The suite ran but some checks failed; carries the full report.
    Suite(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            Failure::Usage { kind: e.kind(), message: e.to_string() }
        } else {
            Failure::Compute(e)
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage { .. } => 2,
            Failure::Compute(_) | Failure::Suite(_) => 1,
        }
    }

    fn to_value(&self, command: &str) -> Value {
        let (kind, message) = match self {
            Failure::Usage { kind, message } => (*kind, message.clone()),
            Failure::Compute(e) => (e.kind(), e.to_string()),
            Failure::Suite(report) => ("SuiteFailed", failed_checks(report)),
        };
        let mut v = json!({ "command": command, "error": { "kind": kind, "message": message, "exit_code": self.exit_code() } });
        if let Failure::Suite(report) = self {
            v["report"] = report.clone();
        }
        v
    }
}

/// Options after merging flags over document options over defaults.
struct Resolved {
    dim: usize,
    angles: usize,
    trials: usize,
    seed: Option<u64>,
    tol: f64,
}

struct Loaded {
    doc: SpecDocument,
    digest: String,
    opts: Resolved,
}

fn load(common: &Common) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(&common.spec).map_err(|e| Failure::Usage {
        kind: "IoError",
        message: format!("cannot read {}: {e}", common.spec.display()),
    })?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let doc = parse_spec(&text)?;
    let o = &doc.options;
    let opts = Resolved {
        dim: common.dim.or(o.dim).unwrap_or(DEFAULT_DIM),
        angles: common.angles.or(o.angles).unwrap_or(DEFAULT_ANGLES),
        trials: common.trials.or(o.trials).unwrap_or(DEFAULT_TRIALS),
        seed: common.seed.or(o.seed),
        tol: common.tol.or(o.tol).unwrap_or(DEFAULT_TOL),
    };
    if opts.dim == 0 || opts.angles == 0 || opts.trials == 0 {
        return Err(usage("dim, angles and trials must be positive"));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(usage("tol must be a positive finite number"));
    }
    Ok(Loaded { doc, digest, opts })
}

fn usage(message: &str) -> Failure {
    Failure::Usage { kind: "UsageError", message: message.to_string() }
}

fn norm_options(opts: &Resolved) -> NormOptions {
    NormOptions { max_dim: opts.dim, tolerance: opts.tol, ..Default::default() }
}

fn report(command: &str, loaded: &Loaded, result: Value, derivation: Value) -> Value {
    let o = &loaded.opts;
    json!({
        "command": command,
        "input_digest": loaded.digest,
        "result": result,
        "derivation": derivation,
        "tolerances": { "tol": o.tol, "dim": o.dim, "angles": o.angles, "trials": o.trials },
        "seed": o.seed,
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn run_norm(common: &Common) -> Result<Value, Failure> {
    let l = load(common)?;
    let r = operator_norm(&l.doc.operator, &norm_options(&l.opts))?;
    let derivation = json!([r.method]);
    Ok(report("norm", &l, to_value(&r), derivation))
}

fn run_check_n(common: &Common) -> Result<Value, Failure> {
    let l = load(common)?;
    let c = check_n(&l.doc.operator, &norm_options(&l.opts))?;
    let derivation = json!([c.method, c.status.tag()]);
    Ok(report("check-n", &l, to_value(&c), derivation))
}

fn run_classify(common: &Common, falsify: bool) -> Result<Value, Failure> {
    let l = load(common)?;
    if falsify && l.opts.seed.is_none() {
        return Err(usage("--falsify needs --seed"));
    }
    let v = classify_an(&l.doc.operator);
    let mut result = json!({ "verdict": v.verdict, "rule": v.rule, "evidence": v.evidence });
    if falsify {
        let f = sample_subspace_restrictions(&l.doc.operator, l.opts.dim, l.opts.trials, l.opts.seed.unwrap_or(0))?;
        result["falsifier"] = to_value(&f);
    }
    let derivation = to_value(&v.derivation);
    Ok(report("classify-an", &l, result, derivation))
}

fn run_decompose(common: &Common, terms: Option<usize>) -> Result<Value, Failure> {
    let l = load(common)?;
    let n_max = terms.unwrap_or(DEFAULT_TERMS);
    if n_max == 0 {
        return Err(usage("--terms must be positive"));
    }
    let dec = deflate(&l.doc.operator, n_max, l.opts.dim, l.opts.tol)?;
    let v = classify_an(&l.doc.operator);
    let mut derivation = to_value(&v.derivation);
    if let Value::Array(steps) = &mut derivation {
        steps.push(json!(format!("deflation: {} terms at dimension {}", dec.betas.len(), dec.dim)));
    }
    Ok(report("decompose", &l, to_value(&dec.summary()), derivation))
}

fn run_numrange(common: &Common) -> Result<Value, Failure> {
    let l = load(common)?;
    let b = numrange::numrange_boundary(&l.doc.operator, l.opts.dim, l.opts.angles)?;
    if let Some(path) = &common.csv {
        write_csv(path, &b)?;
    }
    let points: Vec<Value> =
        b.points.iter().map(|p| json!({ "theta": p.theta, "re": p.point.re, "im": p.point.im })).collect();
    let result = json!({
        "angles": b.points.len(),
        "points": points,
        "csv": common.csv.as_ref().map(|p| p.display().to_string()),
    });
    let derivation = json!(["support points from top eigenvectors of rotated Hermitian parts"]);
    Ok(report("numrange", &l, result, derivation))
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, b: &numrange::NumRangeBoundary) -> Result<(), Failure> {
    let mut out = String::from("theta,re,im\n");
    for p in &b.points {
        let _ = writeln!(out, "{},{},{}", sig17(p.theta), sig17(p.point.re), sig17(p.point.im));
    }
    std::fs::write(path, out).map_err(|e| Failure::Compute(Error::InvalidArgument(format!(
        "cannot write {}: {e}",
        path.display()
    ))))
}

fn run_suite_command() -> Result<Value, Failure> {
    let r = run_suite();
    let value = json!({
        "command": "paper-suite",
        "input_digest": null,
        "result": r,
        "derivation": [],
        "tolerances": {},
        "seed": null,
    });
    if r.all_passed() {
        Ok(value)
    } else {
        Err(Failure::Suite(value))
    }
}

fn failed_checks(report: &Value) -> String {
    let names: Vec<&str> = report["result"]["checks"]
        .as_array()
        .map(|cs| cs.iter().filter(|c| c["passed"] == json!(false)).filter_map(|c| c["name"].as_str()).collect())
        .unwrap_or_default();
    format!("failed checks: {}", names.join(", "))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Norm(_) => "norm",
        Command::CheckN(_) => "check-n",
        Command::ClassifyAn { .. } => "classify-an",
        Command::Decompose { .. } => "decompose",
        Command::Numrange(_) => "numrange",
        Command::PaperSuite => "paper-suite",
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json output"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            print(&usage(msg.trim()).to_value(""));
            return ExitCode::from(2);
        }
    };
    let name = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Norm(c) => run_norm(c),
        Command::CheckN(c) => run_check_n(c),
        Command::ClassifyAn { common, falsify } => run_classify(common, *falsify),
        Command::Decompose { common, terms } => run_decompose(common, *terms),
        Command::Numrange(c) => run_numrange(c),
        Command::PaperSuite => run_suite_command(),
    };
    match outcome {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(f) => {
            print(&f.to_value(name));
            ExitCode::from(f.exit_code())
        }
    }
}
