mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use golden_gates::approx::{coverage_fraction, efficiency_table, synthesize, t_prime};
use golden_gates::covering::{conjecture_report, construct_hole, ConjectureVariant};
use golden_gates::haar::sample_haar;
use golden_gates::lattice::bijection_check;
use golden_gates::words::{count_closed_form, enumerate_shells, shells_to_csv};
use golden_gates::{Error, GateSet, LipschitzQuaternion, Psu2Point};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "golden-gates", version, about = "Golden-gate approximation experiments on PSU(2)")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate V(t) shell by shell and compare with the closed forms.
    Enumerate(EnumerateArgs),
    /// Find the nearest word to a target.
    Synthesize(SynthesizeArgs),
    /// Sampled covering radius of V_Ω(t) against the conjectured scaling.
    Covering(CoveringArgs),
    /// Covering heights and efficiency estimates over a list of radii.
    Efficiency(EfficiencyArgs),
    /// Fraction of Haar targets within epsilon of V(t).
    Coverage(CoverageArgs),
    /// Certified empty ball near y/|y|.
    Hole(HoleArgs),
    /// Check words of V_Ω(t) against primitive four-square solutions.
    Bijection(BijectionArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long = "set", default_value = "S")]
    gate_set: GateSet,
    #[arg(long = "t-max", visible_alias = "t", default_value_t = 3)]
    t_max: u32,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Directory for per-shell CSV files and the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthesizeArgs {
    /// Four comma-separated coordinates, normalized internally.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "random")]
    target: Option<String>,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long = "set", default_value = "T")]
    gate_set: GateSet,
    #[arg(long = "t-max", default_value_t = 8)]
    t_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoveringArgs {
    /// First height of the range.
    #[arg(long, default_value_t = 2)]
    t: u32,
    #[arg(long = "t-max", default_value_t = 6)]
    t_max: u32,
    #[arg(long, default_value_t = 100_000)]
    probes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Test the radius t^n·5^{-t/4} instead of 2·5^{-t/4}.
    #[arg(long = "n-exponent", allow_hyphen_values = true)]
    n_exponent: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scatter of (log₅ N, log₅ radius).
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EfficiencyArgs {
    #[arg(long = "set", default_value = "T")]
    gate_set: GateSet,
    /// Strictly decreasing, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05])]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "t-max", default_value_t = 9)]
    t_max: u32,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scatter of (log₅ 1/ε, log₅ |V|).
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long = "set", default_value = "S")]
    gate_set: GateSet,
    #[arg(long)]
    eps: f64,
    /// Height to test (default: t'_ε).
    #[arg(long)]
    t: Option<u32>,
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HoleArgs {
    /// Integer quaternion a,b,c,d.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long)]
    t: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BijectionArgs {
    #[arg(long, default_value_t = 3)]
    t: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(PathBuf, std::io::Error),
    Check(String),
    Finding(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Budget { .. }) => 3,
            Failure::Lib(Error::Range { .. } | Error::Validation(_)) | Failure::Usage(_) => 2,
            Failure::Lib(_) | Failure::Check(_) => 1,
            Failure::Finding(_) => 4,
            Failure::Io(..) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Usage(m) | Failure::Check(m) => m.clone(),
            Failure::Finding(m) => format!("FINDING: {m}"),
            Failure::Io(p, e) => format!("{}: {e}", p.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(p.to_path_buf(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(command: &str, config: serde_json::Value, result: &T) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<[T; 4], Failure> {
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("malformed {what} {s:?}")))?;
    parts
        .try_into()
        .map_err(|_| Failure::Usage(format!("{what} needs exactly four comma-separated values")))
}

fn run_enumerate(a: EnumerateArgs) -> Outcome {
    let shells = enumerate_shells(a.gate_set, a.t_max)?;
    let mut rows = Vec::new();
    let mut v = 0u128;
    for s in &shells {
        let u = s.elements.len() as u128;
        v += u;
        let (cu, cv) = count_closed_form(a.gate_set, s.t);
        rows.push(json!({
            "t": s.t, "u": u, "u_closed_form": cu, "v": v, "v_closed_form": cv,
            "status": if u == cu && v == cv { "OK" } else { "MISMATCH" },
        }));
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.clone(), e))?;
        for s in &shells {
            let p = dir.join(format!("{}_shell_{}.csv", a.gate_set, s.t));
            let csv = shells_to_csv(s.elements.iter().map(|q| (s.t, q)));
            fs::write(&p, csv).map_err(|e| Failure::Io(p, e))?;
        }
    }
    let text = match a.format {
        Format::Json => to_json(
            "enumerate",
            json!({"set": a.gate_set, "t_max": a.t_max}),
            &rows,
        ),
        Format::Csv => {
            let mut s = String::from("t,u,u_closed_form,v,v_closed_form,status\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r["t"], r["u"], r["u_closed_form"], r["v"], r["v_closed_form"],
                    r["status"].as_str().unwrap_or_default()
                );
            }
            s
        }
    };
    let summary = a.out.as_ref().map(|d| {
        d.join(match a.format {
            Format::Csv => "summary.csv",
            Format::Json => "summary.json",
        })
    });
    emit(summary.as_deref(), &text)?;
    if rows.iter().any(|r| r["status"] != "OK") {
        return Err(Failure::Check("enumerated counts differ from the closed forms".into()));
    }
    Ok(())
}

fn run_synthesize(a: SynthesizeArgs) -> Outcome {
    let target = match (&a.target, a.random) {
        (Some(s), false) => {
            Psu2Point::new(parse_list::<f64>(s, "target")?).map_err(|e| Failure::Usage(e.to_string()))?
        }
        (None, true) => sample_haar(1, a.seed)[0],
        _ => return Err(Failure::Usage("give either --target a,b,c,d or --random".into())),
    };
    if !(a.eps > 0.0) {
        return Err(Failure::Usage(format!("--eps must be positive, got {}", a.eps)));
    }
    let r = synthesize(&target, a.eps, a.gate_set, a.t_max)?;
    let converged = r.achieved_distance < a.eps;
    let text = match a.format {
        Format::Json => to_json(
            "synthesize",
            json!({"set": a.gate_set, "eps": a.eps, "t_max": a.t_max,
                   "target": a.target, "random": a.random, "seed": a.seed}),
            &json!({
                "target": r.target,
                "word": r.word_text,
                "height": r.height,
                "achieved_distance": r.achieved_distance,
                "t_searched": r.t_searched,
                "converged": converged,
            }),
        ),
        Format::Csv => {
            let c = r.target.coords();
            format!(
                "target,word,height,achieved_distance,t_searched,converged\n{} {} {} {},{},{},{},{},{}\n",
                c[0], c[1], c[2], c[3], r.word_text, r.height, r.achieved_distance, r.t_searched, converged
            )
        }
    };
    emit(a.out.as_deref(), &text)?;
    if !converged {
        return Err(Failure::Check(format!(
            "distance {} is not below {} at t = {}",
            r.achieved_distance, a.eps, a.t_max
        )));
    }
    Ok(())
}

fn run_covering(a: CoveringArgs) -> Outcome {
    if a.t < 1 || a.t > a.t_max {
        return Err(Failure::Usage(format!("empty or invalid height range {}..={}", a.t, a.t_max)));
    }
    let variant = match a.n_exponent {
        Some(n) => ConjectureVariant::C5Polylog { n },
        None => ConjectureVariant::C4Exact,
    };
    let report = conjecture_report(a.t..=a.t_max, variant, a.probes, a.seed)?;
    let text = match a.format {
        Format::Json => to_json(
            "covering",
            json!({"t": a.t, "t_max": a.t_max, "probes": a.probes, "seed": a.seed, "n_exponent": a.n_exponent}),
            &report,
        ),
        Format::Csv => {
            let mut s = String::from(
                "t,points,conjectured_radius,radius_lower_bound,ratio,status,log5_points,log5_radius,n_quarter\n",
            );
            for r in &report.rows {
                let status = if r.radius_lower_bound <= r.conjectured_radius { "PASS" } else { "FINDING" };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.t, r.point_count, r.conjectured_radius, r.radius_lower_bound, r.ratio, status,
                    r.log5_points, r.log5_radius, r.n_quarter
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.svg {
        let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.log5_points, r.log5_radius)).collect();
        let doc = svg::scatter("sampled covering radius", "log5 N", "log5 radius", &pts);
        fs::write(p, doc).map_err(|e| Failure::Io(p.clone(), e))?;
    }
    if report.has_finding() {
        let ts: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.radius_lower_bound > r.conjectured_radius)
            .map(|r| r.t.to_string())
            .collect();
        return Err(Failure::Finding(format!(
            "sampled radius exceeds the conjectured radius at t = {}",
            ts.join(", ")
        )));
    }
    Ok(())
}

fn run_efficiency(a: EfficiencyArgs) -> Outcome {
    let report = efficiency_table(a.gate_set, &a.eps, a.probes, a.seed, a.t_max)?;
    let text = match a.format {
        Format::Json => to_json(
            "efficiency",
            json!({"set": a.gate_set, "eps": a.eps, "probes": a.probes, "seed": a.seed, "t_max": a.t_max}),
            &json!({
                "report": report,
                "packing_holds": report.packing_holds(),
                "conditional_limit": "4/3 (conditional on the covering conjecture)",
            }),
        ),
        Format::Csv => {
            let mut s = String::from(
                "epsilon,t_epsilon,covered,sampled_radius,v_count,k_hat,packing_product,lower_bound_form,\
                 upper_bound_form,conditional_bound,budget3_fraction,budget4_fraction,log5_inv_epsilon,log5_v\n",
            );
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.epsilon, r.t_epsilon, r.covered, r.sampled_radius, r.v_count, r.k_hat,
                    r.packing_product, opt(r.lower_bound_form), opt(r.upper_bound_form),
                    r.conditional_bound, r.budget3_fraction, r.budget4_fraction,
                    r.log5_inv_epsilon, r.log5_v
                );
            }
            let _ = writeln!(s, "# fitted_c,{}", opt(report.fitted_c));
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.svg {
        let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.log5_inv_epsilon, r.log5_v)).collect();
        let doc = svg::scatter("covering height growth", "log5 1/eps", "log5 |V|", &pts);
        fs::write(p, doc).map_err(|e| Failure::Io(p.clone(), e))?;
    }
    if !report.packing_holds() {
        return Err(Failure::Check("packing bound |V|·μ(B(ε)) >= 1 violated".into()));
    }
    Ok(())
}

fn run_coverage(a: CoverageArgs) -> Outcome {
    let t = match a.t {
        Some(t) => t,
        None => t_prime(a.eps, 5)?,
    };
    let fraction = coverage_fraction(a.gate_set, t, a.eps, a.probes, a.seed)?;
    let v = count_closed_form(a.gate_set, t).1;
    let text = match a.format {
        Format::Json => to_json(
            "coverage",
            json!({"set": a.gate_set, "eps": a.eps, "t": a.t, "probes": a.probes, "seed": a.seed}),
            &json!({"t": t, "v_count": v, "fraction": fraction}),
        ),
        Format::Csv => format!("t,v_count,fraction\n{t},{v},{fraction}\n"),
    };
    emit(a.out.as_deref(), &text)
}

fn run_hole(a: HoleArgs) -> Outcome {
    let [p, q, r, s] = parse_list::<i64>(&a.y, "y")?;
    let y = LipschitzQuaternion::new(p, q, r, s);
    let cert = construct_hole(&y, a.t)?;
    let text = match a.format {
        Format::Json => to_json("hole", json!({"y": a.y, "t": a.t}), &cert),
        Format::Csv => {
            let c = cert.center.coords();
            format!(
                "y,t,center,radius,delta,annulus,clearance,points_scanned,verified_empty\n\
                 {},{},{} {} {} {},{},{},{},{},{},{}\n",
                cert.y, cert.t, c[0], c[1], c[2], c[3], cert.radius, cert.delta, cert.annulus,
                cert.clearance, cert.points_scanned, cert.verified_empty
            )
        }
    };
    emit(a.out.as_deref(), &text)?;
    if !cert.verified_empty {
        return Err(Failure::Check("hole certificate failed verification".into()));
    }
    Ok(())
}

fn run_bijection(a: BijectionArgs) -> Outcome {
    let report = bijection_check(a.t)?;
    let text = match a.format {
        Format::Json => to_json("bijection", json!({"t": a.t}), &report),
        Format::Csv => {
            let mut s = String::from("h,from_words,from_lattice\n");
            for r in &report.shells {
                let _ = writeln!(s, "{},{},{}", r.h, r.from_words, r.from_lattice);
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Enumerate(a) => run_enumerate(a),
        Command::Synthesize(a) => run_synthesize(a),
        Command::Covering(a) => run_covering(a),
        Command::Efficiency(a) => run_efficiency(a),
        Command::Coverage(a) => run_coverage(a),
        Command::Hole(a) => run_hole(a),
        Command::Bijection(a) => run_bijection(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
