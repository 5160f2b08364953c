//! Command-line front end: the staged paper verification plus small exact
//! utilities (PSD decisions, kernels, rational intersections, positivity,
//! smoothness, PSD-point discovery, report rechecking).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use soscert::exactnum::{rat_to_string, AlgebraicNumber, BetaRoot, Embedding};
use soscert::gram::{find_psd_point, space_from_text, FindConfig, FindOutcome};
use soscert::groebner::{projective_smoothness, SmoothnessConfig};
use soscert::linalg::{
    matrix_from_text, matrix_to_text, nullspace, psd_decide, rational_intersection, Matrix,
    PsdCertificate, PsdOutcome,
};
use soscert::multipoly::{parse_poly_file, Polynomial};
use soscert::pipeline::{
    canonical_json, exit_code, full_report, recheck_report, PipelineConfig, RootPolicy,
    StageStatus, VerificationReport,
};
use soscert::positivity::{
    interior_gram_certificate, interval_bnb, BnbConfig, BnbOutcome, InteriorGramConfig,
};

type K = AlgebraicNumber;

const EXIT_VERIFIED: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "soscert",
    version,
    about = "Exact sums-of-squares certificates over a cubic-quadratic tower"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RootArg {
    Auto,
    First,
    Second,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Gram,
    Bnb,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the staged verification of the certified example end to end
    VerifyPaper {
        /// Skip the budgeted smoothness stage
        #[arg(long)]
        skip_groebner: bool,
        /// Skip the variant experiments
        #[arg(long)]
        skip_variants: bool,
        /// Which root of the quadratic generator to embed
        #[arg(long, value_enum, default_value_t = RootArg::Auto)]
        beta_root: RootArg,
        /// Bits of precision for the recorded generator enclosures
        #[arg(long, default_value_t = 64)]
        precision_bits: u32,
        /// Denominator bound for the numeric rounding fallbacks
        #[arg(long)]
        max_denominator: Option<u64>,
        /// Wall-clock budget for the smoothness stage
        #[arg(long, default_value_t = 1800)]
        timeout_seconds: u64,
        /// Write the full JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide exact positive semidefiniteness of a symmetric matrix
    Psd {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Print an exact kernel basis of a matrix
    Kernel {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Basis of the rational vectors inside the span of tower vectors
    RationalIntersect {
        /// Matrix file whose rows span the subspace
        #[arg(long)]
        vectors: PathBuf,
    },
    /// Certify strict positivity of a form away from the origin
    Positivity {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Bnb)]
        method: Method,
    },
    /// Budgeted projective nonsingularity check of a hypersurface
    Smooth {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Search an affine constraint space for an exact PSD moment matrix
    Discover {
        #[arg(long)]
        space: PathBuf,
    },
    /// Re-verify every certificate payload inside a report
    Recheck {
        #[arg(long)]
        report: PathBuf,
    },
}

fn read_file(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn print_certificate(cert: &PsdCertificate<K>) {
    println!("psd: yes");
    println!("rank: {}", cert.rank);
    for (idx, d) in &cert.pivots {
        println!("pivot {}: {}", idx, d.to_text());
    }
    if !cert.kernel.is_empty() {
        println!("kernel dimension: {}", cert.kernel.len());
    }
}

fn run_verify_paper(
    skip_groebner: bool,
    skip_variants: bool,
    beta_root: RootArg,
    precision_bits: u32,
    max_denominator: Option<u64>,
    timeout_seconds: u64,
    report_path: Option<PathBuf>,
) -> ExitCode {
    let cfg = PipelineConfig {
        root: match beta_root {
            RootArg::Auto => RootPolicy::Auto,
            RootArg::First => RootPolicy::Fixed(BetaRoot::First),
            RootArg::Second => RootPolicy::Fixed(BetaRoot::Second),
        },
        skip_groebner,
        skip_variants,
        precision_bits,
        max_denominator,
        smoothness_timeout: Duration::from_secs(timeout_seconds),
    };
    let report = full_report(&cfg);
    for s in &report.stages {
        let status = match s.status {
            StageStatus::Pass => "pass",
            StageStatus::Fail => "fail",
            StageStatus::Inconclusive => "inconclusive",
            StageStatus::Skipped => "skipped",
        };
        let numbers: Vec<String> = s
            .numbers
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!("stage {}: {} ({:.2}s) {}", s.name, status, s.seconds, numbers.join(" "));
    }
    println!("verdict: {} (beta root: {})", report.verdict, report.beta_root);
    if let Some(path) = report_path {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = fs::write(&path, json) {
            return input_error(&format!("cannot write {}: {e}", path.display()));
        }
        println!("report written to {}", path.display());
    }
    ExitCode::from(exit_code(&report.verdict) as u8)
}

fn run_psd(path: PathBuf) -> ExitCode {
    let text = match read_file(&path) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let m: Matrix<K> = match matrix_from_text(&text) {
        Ok(m) => m,
        Err(e) => return input_error(&e.to_string()),
    };
    let emb = Embedding::new(BetaRoot::First);
    match psd_decide(&m, &emb) {
        Ok(PsdOutcome::Certificate(cert)) => {
            print_certificate(&cert);
            ExitCode::from(EXIT_VERIFIED)
        }
        Ok(PsdOutcome::Refutation(r)) => {
            println!("psd: no");
            let w: Vec<String> = r.witness.iter().map(|x| x.to_text()).collect();
            println!("witness: {}", w.join(", "));
            ExitCode::from(EXIT_REFUTED)
        }
        Err(e) => input_error(&e.to_string()),
    }
}

fn run_kernel(path: PathBuf) -> ExitCode {
    let text = match read_file(&path) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let m: Matrix<K> = match matrix_from_text(&text) {
        Ok(m) => m,
        Err(e) => return input_error(&e.to_string()),
    };
    let basis = nullspace(&m);
    println!("kernel dimension: {}", basis.len());
    if !basis.is_empty() {
        print!("{}", matrix_to_text(&Matrix::from_rows(basis)));
    }
    ExitCode::from(EXIT_VERIFIED)
}

fn run_rational_intersect(path: PathBuf) -> ExitCode {
    let text = match read_file(&path) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let m: Matrix<K> = match matrix_from_text(&text) {
        Ok(m) => m,
        Err(e) => return input_error(&e.to_string()),
    };
    let basis = rational_intersection(&m.rows_vec());
    println!("rational dimension: {}", basis.len());
    if !basis.is_empty() {
        print!("{}", matrix_to_text(&Matrix::from_rows(basis)));
    }
    ExitCode::from(EXIT_VERIFIED)
}

fn load_rational_form(path: &PathBuf) -> Result<Polynomial<soscert::exactnum::Rat>, String> {
    let text = read_file(path)?;
    let file = parse_poly_file::<K>(&text)?;
    let p = file
        .polys
        .first()
        .ok_or_else(|| "no polynomial in file".to_string())?;
    let p = p
        .demote()
        .ok_or_else(|| "polynomial has irrational coefficients".to_string())?;
    if p.is_zero() || !p.is_homogeneous() {
        return Err("need a nonzero homogeneous form".to_string());
    }
    Ok(p)
}

fn run_positivity(path: PathBuf, method: Method) -> ExitCode {
    let p = match load_rational_form(&path) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    match method {
        Method::Bnb => match interval_bnb(&p, &BnbConfig::default()) {
            BnbOutcome::Certified(cert) => {
                println!("strictly positive on the unit box boundary");
                println!("boxes: {}", cert.boxes.len());
                println!("min lower bound: {}", rat_to_string(&cert.min_lower_bound));
                ExitCode::from(EXIT_VERIFIED)
            }
            BnbOutcome::Counterbox { bounds, value } => {
                println!("not strictly positive: interval value sign failed");
                let bs: Vec<String> = bounds
                    .iter()
                    .map(|iv| format!("[{}, {}]", rat_to_string(&iv.lo), rat_to_string(&iv.hi)))
                    .collect();
                println!("box: {}", bs.join(" x "));
                println!(
                    "value: [{}, {}]",
                    rat_to_string(&value.lo),
                    rat_to_string(&value.hi)
                );
                ExitCode::from(EXIT_REFUTED)
            }
            BnbOutcome::Inconclusive { boxes_processed } => {
                println!("inconclusive after {boxes_processed} boxes");
                ExitCode::from(EXIT_INCONCLUSIVE)
            }
        },
        Method::Gram => match interior_gram_certificate(&p, &InteriorGramConfig::default()) {
            Ok(ig) => {
                println!("positive definite Gram matrix found");
                println!("basis size: {}", ig.basis.len());
                println!("rank: {}", ig.certificate.rank);
                ExitCode::from(EXIT_VERIFIED)
            }
            Err(e) => {
                println!("no interior certificate: {e}");
                ExitCode::from(EXIT_INCONCLUSIVE)
            }
        },
    }
}

fn run_smooth(path: PathBuf) -> ExitCode {
    let p = match load_rational_form(&path) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let cfg = SmoothnessConfig::default();
    let out = projective_smoothness(&p, 8, &cfg);
    let rep = out.report();
    println!("exact: {}", rep.exact);
    println!("basis size: {}", rep.basis_size);
    for (d, dim) in &rep.quotient_dims {
        println!("quotient dimension at degree {d}: {dim}");
    }
    for (i, pw) in rep.power_by_var.iter().enumerate() {
        match pw {
            Some(k) => println!("variable {i}: power {k} lies in the Jacobian ideal"),
            None => println!("variable {i}: no power up to {} found", rep.max_power),
        }
    }
    for note in &rep.notes {
        println!("note: {note}");
    }
    if out.is_nonsingular() {
        println!("nonsingular: yes");
        ExitCode::from(EXIT_VERIFIED)
    } else {
        println!("nonsingular: not certified at this budget");
        ExitCode::from(EXIT_INCONCLUSIVE)
    }
}

fn run_discover(path: PathBuf) -> ExitCode {
    let text = match read_file(&path) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let (space, _names) = match space_from_text::<K>(&text) {
        Ok(s) => s,
        Err(e) => return input_error(&e.to_string()),
    };
    let quad = soscert::multipoly::monomial_basis(
        space.n,
        space.d,
        soscert::multipoly::MonomialOrder::Lex,
    );
    let emb = Embedding::new(BetaRoot::First);
    let to_f64 = |x: &K| emb.to_f64(x);
    let accept = |_: &PsdCertificate<K>| true;
    match find_psd_point(
        &space,
        &quad,
        &emb,
        &to_f64,
        &accept,
        Some(&emb),
        &FindConfig::default(),
    ) {
        FindOutcome::Found(fp) => {
            println!("found: {}", fp.description);
            println!("rank: {}", fp.certificate.rank);
            println!("kernel dimension: {}", fp.certificate.kernel.len());
            print!("{}", matrix_to_text(&fp.moment.mat));
            ExitCode::from(EXIT_VERIFIED)
        }
        FindOutcome::Inconclusive { candidates_tried } => {
            println!("inconclusive after {candidates_tried} candidates");
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
    }
}

fn run_recheck(path: PathBuf) -> ExitCode {
    let text = match read_file(&path) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let report: VerificationReport = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return input_error(&format!("malformed report: {e}")),
    };
    let mut all_ok = true;
    for (name, outcome) in recheck_report(&report) {
        match outcome {
            Ok(()) => println!("stage {name}: certificate ok"),
            Err(e) => {
                all_ok = false;
                println!("stage {name}: REJECTED ({e})");
            }
        }
    }
    // a canonical form exists for byte-level comparison between runs
    let _ = canonical_json(&report);
    if !all_ok {
        println!("recheck: certificates rejected");
        return ExitCode::from(EXIT_REFUTED);
    }
    println!("recheck: all certificates ok");
    println!("verdict: {}", report.verdict);
    ExitCode::from(exit_code(&report.verdict) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::VerifyPaper {
            skip_groebner,
            skip_variants,
            beta_root,
            precision_bits,
            max_denominator,
            timeout_seconds,
            report,
        } => run_verify_paper(
            skip_groebner,
            skip_variants,
            beta_root,
            precision_bits,
            max_denominator,
            timeout_seconds,
            report,
        ),
        Cmd::Psd { matrix } => run_psd(matrix),
        Cmd::Kernel { matrix } => run_kernel(matrix),
        Cmd::RationalIntersect { vectors } => run_rational_intersect(vectors),
        Cmd::Positivity { poly, method } => run_positivity(poly, method),
        Cmd::Smooth { poly } => run_smooth(poly),
        Cmd::Discover { space } => run_discover(space),
        Cmd::Recheck { report } => run_recheck(report),
    }
}
