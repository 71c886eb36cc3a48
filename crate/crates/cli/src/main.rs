//! Command-line front end: construct pairs, verify files, sweep the
//! parameter family, and audit the built-in examples.
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 usage or parse
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use umeb23::audit::run_audit;
use umeb23::construct::{
    build_pair, sample_valid_params, BasisPair, FirstBasisSpec, SignBranch, ThetaParams,
};
use umeb23::scalar::{parse_rational, AngleFrac, Backend, DEFAULT_TOLERANCE};
use umeb23::verify::{verify_pair, verify_pair_both, GridSpec, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "umeb23",
    version,
    about = "Construct and verify mutually unbiased unextendible maximally entangled basis pairs in C2 x C3"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a basis pair from angle parameters and write it as JSON.
    Construct(ConstructArgs),
    /// Verify a basis-pair file and write a machine report.
    Verify(VerifyArgs),
    /// Sample the valid parameter family and verify every sample.
    Sweep(SweepArgs),
    /// Rebuild and adjudicate a built-in example end to end.
    Audit(AuditArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Six W angles as multiples of pi, comma separated (e.g. "0,1/3,0,1,0,1/3").
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Two S angles as multiples of pi (e.g. "1/3,11/6").
    #[arg(long, allow_hyphen_values = true)]
    theta_prime: Option<String>,
    /// Sign branch of the S template.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    s_branch: String,
    /// Take all parameters from a built-in example (1, 2, or 3) instead.
    #[arg(long, conflicts_with_all = ["theta", "theta_prime", "params"])]
    example: Option<u8>,
    /// Read a ThetaParams JSON file instead of --theta/--theta-prime.
    #[arg(long)]
    params: Option<PathBuf>,
    /// First-basis completion: "default" or "tilted".
    #[arg(long, default_value = "default")]
    first_basis: String,
    /// Scalar backend: "exact", "float", or "auto".
    #[arg(long, default_value = "auto")]
    backend: String,
    /// Build even when the angles violate the unitarity closure.
    #[arg(long)]
    unchecked: bool,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Output path for the basis-pair JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Basis-pair JSON file to verify.
    input: PathBuf,
    /// Backend to verify with: "exact", "float", "both", or "auto"
    /// (the file's own backend).
    #[arg(long, default_value = "auto")]
    backend: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Unextendibility scan resolution, e.g. "181x360".
    #[arg(long, default_value = "181x360")]
    grid: String,
    /// Skip the numeric grid oracle where the exact certificate suffices.
    #[arg(long)]
    no_grid_oracle: bool,
    /// Write the machine-readable report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// "exact" restricts the free angles to the pi/12 grid; "float" samples
    /// the whole family.
    #[arg(long, default_value = "float")]
    backend: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(Args)]
struct AuditArgs {
    /// Which built-in example to audit: 1, 2, 3, or "all".
    #[arg(long, default_value = "all")]
    example: String,
    /// Unextendibility scan resolution, e.g. "181x360".
    #[arg(long, default_value = "181x360")]
    grid: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Write the machine-readable audit report(s) here (JSON array).
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_angle_list<const N: usize>(text: &str, what: &str) -> Result<[AngleFrac; N], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("{what} needs {N} comma-separated angles, got {}", parts.len()));
    }
    let mut out = Vec::with_capacity(N);
    for p in parts {
        let frac = if p.contains('/') {
            parse_rational(p).map_err(|e| e.to_string())?
        } else {
            parse_rational(&format!("{p}/1")).map_err(|e| e.to_string())?
        };
        out.push(AngleFrac::from_ratio(frac));
    }
    Ok(out.try_into().expect("length checked"))
}

fn parse_branch(text: &str) -> Result<SignBranch, String> {
    match text {
        "+" | "plus" => Ok(SignBranch::Plus),
        "-" | "minus" => Ok(SignBranch::Minus),
        other => Err(format!("sign branch must be + or -, got `{other}`")),
    }
}

fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let (nt, nphi) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must look like 181x360, got `{text}`"))?;
    let nt: usize = nt.parse().map_err(|_| format!("bad grid size `{nt}`"))?;
    let nphi: usize = nphi.parse().map_err(|_| format!("bad grid size `{nphi}`"))?;
    if nt < 2 || nphi < 4 {
        return Err("grid too coarse; need at least 2x4".into());
    }
    Ok(GridSpec { nt, nphi })
}

fn usage_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn check_tol(tol: f64) -> Result<(), String> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(format!("--tol must be a positive finite number, got {tol}"))
    }
}

fn cmd_construct(args: &ConstructArgs) -> ExitCode {
    if let Err(e) = check_tol(args.tol) {
        return usage_err(e);
    }
    let params: ThetaParams = if let Some(n) = args.example {
        match umeb23::fixtures::example(n) {
            Ok(ex) => ex.params,
            Err(e) => return usage_err(e),
        }
    } else if let Some(path) = &args.params {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return usage_err(format!("{}: {e}", path.display())),
        };
        match serde_json::from_str(&text) {
            Ok(p) => p,
            Err(e) => return usage_err(format!("{}: {e}", path.display())),
        }
    } else {
        let (Some(theta), Some(theta_prime)) = (&args.theta, &args.theta_prime) else {
            return usage_err("provide --theta and --theta-prime, or --params, or --example");
        };
        let theta = match parse_angle_list::<6>(theta, "--theta") {
            Ok(a) => a,
            Err(e) => return usage_err(e),
        };
        let theta_prime = match parse_angle_list::<2>(theta_prime, "--theta-prime") {
            Ok(a) => a,
            Err(e) => return usage_err(e),
        };
        let s_branch = match parse_branch(&args.s_branch) {
            Ok(b) => b,
            Err(e) => return usage_err(e),
        };
        ThetaParams {
            theta,
            theta_prime,
            s_branch,
        }
    };

    // When constructing from a built-in example, use its own completion
    // unless the user overrode it.
    let first_basis_name = if let (Some(n), "default") =
        (args.example, args.first_basis.as_str())
    {
        umeb23::fixtures::example(n)
            .map(|ex| ex.first_basis_kind.to_string())
            .unwrap_or_else(|_| args.first_basis.clone())
    } else {
        args.first_basis.clone()
    };

    let backend = match args.backend.as_str() {
        "exact" => Backend::Exact,
        "float" => Backend::Float,
        "auto" => params.preferred_backend(),
        other => return usage_err(format!("unknown backend `{other}`")),
    };
    let spec = match FirstBasisSpec::by_name(&first_basis_name, backend) {
        Ok(s) => s,
        Err(e) => return usage_err(e),
    };
    let pair = match build_pair(&params, &spec, backend, !args.unchecked, args.tol) {
        Ok(p) => p,
        Err(e) => return usage_err(e),
    };
    if let Err(e) = std::fs::write(&args.out, pair.to_json()) {
        return usage_err(format!("{}: {e}", args.out.display()));
    }
    println!(
        "wrote {} ({} backend, first basis `{first_basis_name}`)",
        args.out.display(),
        match backend {
            Backend::Exact => "exact",
            Backend::Float => "float",
        },
    );
    ExitCode::SUCCESS
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    if let Err(e) = check_tol(args.tol) {
        return usage_err(e);
    }
    let grid = match parse_grid(&args.grid) {
        Ok(g) => g,
        Err(e) => return usage_err(e),
    };
    let opts = VerifyOptions {
        tol: args.tol,
        grid,
        grid_oracle: !args.no_grid_oracle,
        ..VerifyOptions::default()
    };
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return usage_err(format!("{}: {e}", args.input.display())),
    };
    let pair = match BasisPair::from_json(&text, args.tol) {
        Ok(p) => p,
        Err(e) => return usage_err(format!("{}: {e}", args.input.display())),
    };
    let report = match args.backend.as_str() {
        "auto" => verify_pair(&pair, &opts),
        "exact" => {
            if pair.backend != Backend::Exact {
                return usage_err("exact backend refused: the file stores float amplitudes");
            }
            verify_pair(&pair, &opts)
        }
        "float" => verify_pair(&pair.to_float(), &opts),
        "both" => verify_pair_both(&pair, &opts),
        other => return usage_err(format!("unknown backend `{other}`")),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return usage_err(e),
    };
    print!("{}", report.render_text());
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return usage_err(format!("{}: {e}", path.display()));
        }
    }
    if report.overall {
        ExitCode::SUCCESS
    } else {
        if let Some(worst) = report.worst_failure() {
            println!(
                "worst failure: {} residual={:.3e} witness={:?}",
                worst.name, worst.residual, worst.witness
            );
        }
        ExitCode::from(1)
    }
}

fn cmd_sweep(args: &SweepArgs) -> ExitCode {
    if let Err(e) = check_tol(args.tol) {
        return usage_err(e);
    }
    let exact_grid = match args.backend.as_str() {
        "exact" => true,
        "float" => false,
        other => return usage_err(format!("unknown sweep backend `{other}`")),
    };
    let backend = if exact_grid {
        Backend::Exact
    } else {
        Backend::Float
    };
    if args.count == 0 {
        return usage_err("--count must be at least 1");
    }
    let opts = VerifyOptions {
        tol: args.tol,
        grid_oracle: false,
        ..VerifyOptions::default()
    };
    let params = sample_valid_params(args.seed, args.count, exact_grid);
    let spec = FirstBasisSpec::computational(backend);
    let mut pass = 0usize;
    let mut printed_condition_disagreements = 0usize;
    let mut worst = 0.0f64;
    // Histogram of worst mandatory residual per sample, log-decade buckets.
    let edges = [1e-15, 1e-12, 1e-9, 1e-6, 1e-3];
    let mut hist = [0usize; 6];
    for p in &params {
        let pair = match build_pair(p, &spec, backend, true, args.tol) {
            Ok(pair) => pair,
            Err(e) => return usage_err(format!("sampler produced invalid params: {e}")),
        };
        let report = match verify_pair(&pair, &opts) {
            Ok(r) => r,
            Err(e) => return usage_err(e),
        };
        let sample_worst = report
            .checks
            .iter()
            .filter(|c| c.mandatory)
            .map(|c| c.residual)
            .fold(0.0, f64::max);
        worst = worst.max(sample_worst);
        if report.overall {
            pass += 1;
        }
        if report
            .checks
            .iter()
            .any(|c| c.name.starts_with("params: phase-sum") && !c.pass)
        {
            printed_condition_disagreements += 1;
        }
        let bucket = edges.iter().position(|e| sample_worst < *e).unwrap_or(5);
        hist[bucket] += 1;
    }
    println!(
        "sweep seed={} count={} backend={}",
        args.seed,
        args.count,
        args.backend
    );
    println!("pass: {pass}/{}", args.count);
    println!("worst mandatory residual: {worst:.3e}");
    println!("printed-condition disagreements (branch not covered): {printed_condition_disagreements}/{}", args.count);
    let labels = [
        "< 1e-15",
        "[1e-15, 1e-12)",
        "[1e-12, 1e-9)",
        "[1e-9, 1e-6)",
        "[1e-6, 1e-3)",
        ">= 1e-3",
    ];
    println!("residual histogram:");
    for (label, n) in labels.iter().zip(hist.iter()) {
        println!("  {label:<15} {n}");
    }
    if pass == args.count {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_audit(args: &AuditArgs) -> ExitCode {
    if let Err(e) = check_tol(args.tol) {
        return usage_err(e);
    }
    let grid = match parse_grid(&args.grid) {
        Ok(g) => g,
        Err(e) => return usage_err(e),
    };
    let opts = VerifyOptions {
        tol: args.tol,
        grid,
        ..VerifyOptions::default()
    };
    let numbers: Vec<u8> = match args.example.as_str() {
        "all" => vec![1, 2, 3],
        n => match n.parse::<u8>() {
            Ok(n @ 1..=3) => vec![n],
            _ => return usage_err(format!("--example must be 1, 2, 3, or all, got `{n}`")),
        },
    };
    let mut reports = Vec::new();
    for n in numbers {
        match run_audit(n, &opts) {
            Ok(r) => {
                print!("{}", r.render_text());
                println!();
                reports.push(r);
            }
            Err(e) => return usage_err(e),
        }
    }
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&reports).expect("serializable");
        if let Err(e) = std::fs::write(path, json) {
            return usage_err(format!("{}: {e}", path.display()));
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Construct(args) => cmd_construct(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Audit(args) => cmd_audit(args),
    }
}
