//! Command-line surface for the correlation-integral and determinism
//! library: reproducible runs, machine-readable output.

mod eps_expr;
mod svg;

use clap::{Args, Parser, Subcommand};
use detcorr::analysis::{
    det_extremes_capped, det_profile_capped, find_alpha_for_liminf, utdet_recheck, CriticalKind,
};
use detcorr::distmatrix::{build_matrix, close_pair_count_inf, verify_patterns, Ell};
use detcorr::exact::rat_to_f64;
use detcorr::maps::{orbit, ApproxMap, DelahayeMap, Map};
use detcorr::rqa::corr_integral_f_capped;
use detcorr::words::Word;
use detcorr::{Alpha, Error, Rat};
use eps_expr::EpsExpr;
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Hard ceiling on the level cap override.
const HARD_K_CEILING: u32 = 30;

#[derive(Parser)]
#[command(
    name = "detcorr",
    version,
    about = "Correlation integrals, recurrence rates and determinism for adding-machine interval maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an orbit as CSV (columns: iter, x)
    Orbit(OrbitArgs),
    /// Build a distance matrix; emit PBM and/or a JSON summary
    Matrix(MatrixArgs),
    /// Certified correlation integral of the limit map
    Integral(IntegralArgs),
    /// Determinism profile over one fundamental domain (CSV/SVG)
    Profile(ProfileArgs),
    /// Liminf/limsup of the determinism with certified radii
    Extremes(ExtremesArgs),
    /// Find alpha whose liminf determinism hits a target
    ScanAlpha(ScanAlphaArgs),
    /// Check the six structural patterns on a distance matrix
    Verify(VerifyArgs),
    /// Compare brute-force and accelerated close-pair counting
    Bench(BenchArgs),
}

#[derive(Args)]
struct OrbitArgs {
    /// Map parameter, `p/q` or an exact decimal in (0, 1/2)
    #[arg(long)]
    alpha: String,
    /// Which map to iterate: `f` (limit) or `fk` (approximation)
    #[arg(long, default_value = "f")]
    map: String,
    /// Approximation order (required for --map fk)
    #[arg(long)]
    k: Option<u32>,
    /// Start point: a 0/1 word (meaning kappa(word)), `p/q`, or a float
    #[arg(long)]
    x: String,
    /// Number of orbit points
    #[arg(long)]
    n: usize,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    k: u32,
    /// Horizon: a positive integer or `inf`
    #[arg(long, default_value = "1")]
    ell: String,
    /// Threshold expression in `a`, e.g. `1-a^2`
    #[arg(long)]
    eps: String,
    /// PBM (bit image) output path
    #[arg(long)]
    pbm: Option<String>,
    /// JSON summary output path (stdout when omitted)
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct IntegralArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value = "1")]
    ell: String,
    #[arg(long)]
    eps: String,
    /// Certified radius target
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    alpha: String,
    /// Grid points per fundamental domain
    #[arg(long, default_value_t = detcorr::analysis::DEFAULT_GRID)]
    points: usize,
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    /// SVG output path
    #[arg(long)]
    svg: Option<String>,
    /// CSV output path (columns: eps, det, err)
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args)]
struct ExtremesArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
}

#[derive(Args)]
struct ScanAlphaArgs {
    /// Target liminf value in (1/3, 8/15]
    #[arg(long)]
    target: f64,
    #[arg(long, default_value_t = 0.005)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    eps: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    alpha: String,
    /// Level range, e.g. `4..12`
    #[arg(long, default_value = "4..10")]
    k_range: String,
    /// Horizon to benchmark: `1` or `inf`
    #[arg(long, default_value = "inf")]
    ell: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

#[derive(Debug)]
enum CliError {
    Domain(String),
    TolUnreachable(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(m) | CliError::TolUnreachable(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::TolUnreachable { .. } => CliError::TolUnreachable(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Domain(_) => 2,
        CliError::TolUnreachable(_) => 3,
        CliError::Io(_) => 1,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Orbit(a) => cmd_orbit(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Integral(a) => cmd_integral(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Extremes(a) => cmd_extremes(a),
        Command::ScanAlpha(a) => cmd_scan_alpha(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn parse_alpha(s: &str) -> Result<Alpha, CliError> {
    s.parse::<Alpha>()
        .map_err(|_| CliError::Domain("alpha must lie in (0, 1/2)".into()))
}

fn parse_ell(s: &str) -> Result<Ell, CliError> {
    s.parse::<Ell>()
        .map_err(|e| CliError::Domain(e.to_string()))
}

fn parse_eps(s: &str) -> Result<EpsExpr, CliError> {
    EpsExpr::parse(s).map_err(|e| CliError::Domain(format!("bad eps expression: {e}")))
}

/// Level cap with the `RQA_MAX_K` override (hard ceiling 30).
fn k_cap() -> u32 {
    match std::env::var("RQA_MAX_K") {
        Ok(v) => v
            .parse::<u32>()
            .map(|k| k.min(HARD_K_CEILING))
            .unwrap_or(HARD_K_CEILING),
        Err(_) => HARD_K_CEILING,
    }
}

fn rat_json(r: &Rat) -> serde_json::Value {
    json!({
        "decimal": format!("{}", rat_to_f64(r)),
        "rational": format!("{}", r),
    })
}

fn write_or_stdout(path: &Option<String>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn cmd_orbit(a: OrbitArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let config = format!(
        "orbit alpha={alpha} map={} k={} x={} n={}",
        a.map,
        a.k.map_or("-".to_string(), |k| k.to_string()),
        a.x,
        a.n
    );
    let map = match a.map.as_str() {
        "f" => Map::Limit(DelahayeMap::new(alpha)),
        "fk" => {
            let k =
                a.k.ok_or_else(|| CliError::Domain("--map fk needs --k".into()))?;
            Map::Approx(ApproxMap::new(alpha, k))
        }
        other => return Err(CliError::Domain(format!("unknown map `{other}`"))),
    };
    let x0 = parse_start_point(&a.x, &alpha)?;
    let points = orbit(&map, x0, a.n)?;
    let mut out = String::new();
    out.push_str(&format!("# detcorr v{VERSION} | {config}\n"));
    out.push_str("iter,x\n");
    for (i, x) in points.iter().enumerate() {
        out.push_str(&format!("{i},{x}\n"));
    }
    write_or_stdout(&a.csv, &out)
}

fn parse_start_point(s: &str, alpha: &Alpha) -> Result<f64, CliError> {
    let s = s.trim();
    if !s.is_empty() && s.bytes().all(|b| b == b'0' || b == b'1') {
        let w: Word = s
            .parse()
            .map_err(|e: Error| CliError::Domain(e.to_string()))?;
        return Ok(w.kappa().eval_f64(alpha));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| CliError::Domain(format!("bad start point `{s}`")))?;
        let q: f64 = q
            .trim()
            .parse()
            .map_err(|_| CliError::Domain(format!("bad start point `{s}`")))?;
        return Ok(p / q);
    }
    s.parse::<f64>()
        .map_err(|_| CliError::Domain(format!("bad start point `{s}`")))
}

fn cmd_matrix(a: MatrixArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let ell = parse_ell(&a.ell)?;
    let eps = parse_eps(&a.eps)?;
    let eps_val = eps.eval(&alpha);
    let config = format!(
        "matrix alpha={alpha} k={} ell={ell} eps={}",
        a.k,
        eps.canonical()
    );
    let m = build_matrix(a.k, &alpha, ell, &eps_val)?;
    if let Some(path) = &a.pbm {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        m.write_pbm(&format!("detcorr v{VERSION} | {config}"), &mut f)?;
    }
    let summary = json!({
        "config": config,
        "version": VERSION,
        "k": a.k,
        "alpha": format!("{alpha}"),
        "ell": format!("{ell}"),
        "eps": rat_json(&eps_val),
        "ones_count": m.ones_count(),
    });
    write_or_stdout(
        &a.json,
        &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()),
    )
}

fn cmd_integral(a: IntegralArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let ell = parse_ell(&a.ell)?;
    let eps = parse_eps(&a.eps)?;
    let eps_val = eps.eval(&alpha);
    let config = format!(
        "integral alpha={alpha} ell={ell} eps={} tol={}",
        eps.canonical(),
        a.tol
    );
    let v = corr_integral_f_capped(&alpha, ell, &eps_val, a.tol, k_cap())?;
    let out = json!({
        "config": config,
        "version": VERSION,
        "alpha": format!("{alpha}"),
        "ell": format!("{ell}"),
        "eps": rat_json(&eps_val),
        "value": rat_json(&v.value),
        "error_radius": rat_json(&v.error_radius),
        "k_used": v.k_used,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_profile(a: ProfileArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let config = format!("profile alpha={alpha} points={} tol={}", a.points, a.tol);
    let profile = det_profile_capped(&alpha, a.points, a.tol, k_cap())?;
    if let Some(path) = &a.csv {
        let mut out = String::new();
        out.push_str(&format!("# detcorr v{VERSION} | {config}\n"));
        out.push_str("eps,det,err\n");
        for p in &profile.points {
            out.push_str(&format!(
                "{},{},{}\n",
                rat_to_f64(&p.eps),
                p.det.value_f64(),
                p.det.radius_f64()
            ));
        }
        std::fs::write(path, out)?;
    }
    if let Some(path) = &a.svg {
        let pts: Vec<(f64, f64)> = profile
            .points
            .iter()
            .map(|p| (rat_to_f64(&p.eps), p.det.value_f64()))
            .collect();
        let marked: Vec<usize> = profile
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.critical.is_some())
            .map(|(i, _)| i)
            .collect();
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        svg::write_plot(
            &mut f,
            &format!("detcorr v{VERSION} | {config}"),
            "eps",
            "det",
            &svg::Series {
                points: &pts,
                marked: &marked,
            },
        )?;
    }
    let minimum = profile
        .points
        .iter()
        .find(|p| p.critical == Some(CriticalKind::Minimum));
    let summary = json!({
        "config": config,
        "version": VERSION,
        "alpha": format!("{alpha}"),
        "fundamental_scale": profile.s,
        "points": profile.points.len(),
        "max_det": profile.max_point().det.value_f64(),
        "min_det": profile.min_point().det.value_f64(),
        "det_at_located_minimum": minimum.map(|p| p.det.value_f64()),
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn cmd_extremes(a: ExtremesArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let config = format!("extremes alpha={alpha} tol={}", a.tol);
    let e = det_extremes_capped(&alpha, a.tol, k_cap())?;
    let out = json!({
        "config": config,
        "version": VERSION,
        "alpha": format!("{alpha}"),
        "utdet": {
            "value": rat_json(&e.utdet.value),
            "error_radius": rat_json(&e.utdet.error_radius),
            "k_used": e.utdet.k_used,
            "argmin_eps": rat_json(&e.argmin_eps),
        },
        "otdet": {
            "value": rat_json(&e.otdet.value),
            "error_radius": rat_json(&e.otdet.error_radius),
            "k_used": e.otdet.k_used,
            "argmax_eps": rat_json(&e.argmax_eps),
            "grid_estimate": e.otdet_grid_estimate,
        },
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_scan_alpha(a: ScanAlphaArgs) -> Result<(), CliError> {
    let config = format!("scan-alpha target={} tol={}", a.target, a.tol);
    let alpha = find_alpha_for_liminf(a.target, a.tol)?;
    let recheck = utdet_recheck(&alpha, a.tol)?;
    let out = json!({
        "config": config,
        "version": VERSION,
        "target": a.target,
        "alpha": format!("{alpha}"),
        "alpha_decimal": alpha.to_f64(),
        "utdet_recheck": {
            "value": rat_json(&recheck.value),
            "error_radius": rat_json(&recheck.error_radius),
            "k_used": recheck.k_used,
        },
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let eps = parse_eps(&a.eps)?;
    let eps_val = eps.eval(&alpha);
    let config = format!("verify alpha={alpha} k={} eps={}", a.k, eps.canonical());
    println!("# detcorr v{VERSION} | {config}");
    let m = build_matrix(a.k, &alpha, Ell::Finite(1), &eps_val)?;
    let report = verify_patterns(&m)?;
    let mut all = true;
    for (name, check) in [
        ("A0", report.a0),
        ("A1", report.a1),
        ("B0", report.b0),
        ("B1", report.b1),
        ("C0", report.c0),
        ("C1", report.c1),
    ] {
        if check.holds {
            println!("pattern {name}: PASS");
        } else {
            all = false;
            let ((si, sj), (vi, vj)) = check.first_violation.unwrap();
            println!("pattern {name}: FAIL (from ({si},{sj}) at ({vi},{vj}))");
        }
    }
    println!("ones_count: {}", m.ones_count());
    if all {
        Ok(())
    } else {
        Err(CliError::Domain("pattern violations found".into()))
    }
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let ell = parse_ell(&a.ell)?;
    let (k_lo, k_hi) = parse_range(&a.k_range)?;
    let eps = alpha.one_minus(); // a representative mid-range threshold
    let config = format!("bench alpha={alpha} k-range={}..{} ell={ell}", k_lo, k_hi);
    println!("# detcorr v{VERSION} | {config}");
    println!(
        "{:>3} {:>14} {:>14} {:>8}",
        "k", "naive_ms", "fast_ms", "equal"
    );
    const NAIVE_CAP_L1: u32 = 11;
    const NAIVE_CAP_INF: u32 = 8;
    for k in k_lo..=k_hi.min(k_cap()) {
        let t = Instant::now();
        let fast = match ell {
            Ell::Inf => close_pair_count_inf(k, &alpha, &eps)?,
            _ => detcorr::distmatrix::count_close_pairs(k, &alpha, ell, &eps)?,
        };
        let fast_ms = t.elapsed().as_secs_f64() * 1e3;
        let naive_cap = if ell == Ell::Inf {
            NAIVE_CAP_INF
        } else {
            NAIVE_CAP_L1
        };
        if k <= naive_cap {
            let t = Instant::now();
            let naive = naive_count(k, &alpha, ell, &eps);
            let naive_ms = t.elapsed().as_secs_f64() * 1e3;
            let equal = naive == fast;
            println!("{k:>3} {naive_ms:>14.3} {fast_ms:>14.3} {equal:>8}");
            if !equal {
                return Err(CliError::Domain(format!(
                    "count mismatch at k={k}: naive {naive} vs fast {fast}"
                )));
            }
        } else {
            println!("{k:>3} {:>14} {fast_ms:>14.3} {:>8}", "cap", "-");
        }
    }
    Ok(())
}

fn naive_count(k: u32, alpha: &Alpha, ell: Ell, eps: &Rat) -> u64 {
    let mut count = 0u64;
    for u in Word::all(k as usize) {
        for v in Word::all(k as usize) {
            let d = detcorr::distmatrix::rho_ell(&u, &v, ell, alpha).unwrap();
            if d.le_rat(eps, alpha) {
                count += 1;
            }
        }
    }
    count
}

fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| CliError::Domain(format!("bad k range `{s}`, expected lo..hi")))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::Domain(format!("bad k range `{s}`")))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::Domain(format!("bad k range `{s}`")))?;
    if lo == 0 || hi < lo {
        return Err(CliError::Domain(format!("bad k range `{s}`")));
    }
    Ok((lo, hi))
}
