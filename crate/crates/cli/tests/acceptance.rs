//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Run with `cargo test -p golden-gates-cli --test acceptance`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use golden_gates::approx::{coverage_fraction, dominance, efficiency_table, t_prime, EfficiencyReport};
use golden_gates::covering::{conjecture_report, construct_hole, ConjectureVariant};
use golden_gates::haar::{ball_measure_s3, monte_carlo_s3, sample_haar};
use golden_gates::lattice::{bijection_check, enumerate_nu, exact_synthesis};
use golden_gates::quat::{to_su2, Su2Matrix};
use golden_gates::words::{count_closed_form, enumerate_shells, evaluate_word};
use golden_gates::{metric_d, GateSet, GateWord, Generator, LipschitzQuaternion, Prefix};

const SEED: u64 = 1;
const EPS_LIST: [f64; 7] = [0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_time(o: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed > limit {
        outcome(false, format!("{} (took {elapsed:?}, limit {limit:?})", o.detail))
    } else {
        o
    }
}

fn counting() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for gs in [GateSet::S, GateSet::T] {
        let shells = match enumerate_shells(gs, 6) {
            Ok(s) => s,
            Err(e) => return outcome(false, e.to_string()),
        };
        let mut v = 0u128;
        for s in &shells {
            let u = s.elements.len() as u128;
            v += u;
            if (u, v) != count_closed_form(gs, s.t) {
                bad.push(format!("{gs} t={} got ({u},{v})", s.t));
            }
        }
    }
    let examples = count_closed_form(GateSet::S, 3) == (150, 187) && count_closed_form(GateSet::T, 3).1 == 748;
    let o = outcome(
        bad.is_empty() && examples,
        if bad.is_empty() {
            "|U|,|V|,|U_Ω|,|V_Ω| exact for t <= 6; |U(3)|=150 |V(3)|=187 |V_Ω(3)|=748".to_string()
        } else {
            bad.join("; ")
        },
    );
    within_time(o, start.elapsed(), Duration::from_secs(60))
}

fn bijection() -> Outcome {
    let start = Instant::now();
    let mut totals = Vec::new();
    for t in 0..=4 {
        match bijection_check(t) {
            Ok(r) => totals.push(r.total.to_string()),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let o = outcome(true, format!("set equality for t = 0..4, sizes {}", totals.join(", ")));
    within_time(o, start.elapsed(), Duration::from_secs(60))
}

fn brute_r4(n: i64) -> u128 {
    let m = (n as f64).sqrt() as i64 + 1;
    let mut count = 0;
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                for d in -m..=m {
                    if a * a + b * b + c * c + d * d == n {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn lattice_oracle() -> Outcome {
    let bad: Vec<String> = (1..=50u64)
        .filter_map(|n| {
            let got = enumerate_nu(n, false).map(|s| s.points.len() as u128).unwrap_or(0);
            let want = brute_r4(n as i64) / 2;
            (got != want).then(|| format!("n={n}: {got} vs {want}"))
        })
        .collect();
    outcome(bad.is_empty(), if bad.is_empty() { "|ν(n)| = r4(n)/2 for n = 1..50".into() } else { bad.join("; ") })
}

fn random_word(rng: &mut ChaCha8Rng, max_height: usize) -> GateWord {
    let prefix = Prefix::ALL[rng.random_range(0..4)];
    let len = rng.random_range(0..=max_height);
    let mut body: Vec<Generator> = Vec::with_capacity(len);
    while body.len() < len {
        let g = Generator::S_TYPE[rng.random_range(0..6)];
        if body.last().is_some_and(|&l| l == g.inverse()) {
            continue;
        }
        body.push(g);
    }
    GateWord::new(prefix, body).expect("reduced by construction")
}

fn synthesis_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for _ in 0..1000 {
        let w = random_word(&mut rng, 8);
        match exact_synthesis(&evaluate_word(&w)) {
            Ok(back) if back == w && back.height() == w.height() => {}
            _ => failures += 1,
        }
    }
    let o = outcome(failures == 0, format!("{failures} failures in 1000 words of height <= 8"));
    within_time(o, start.elapsed(), Duration::from_secs(10))
}

fn metric_invariance() -> Outcome {
    let pts = sample_haar(3000, 77);
    let mut worst = 0.0f64;
    for tri in pts.chunks(3) {
        let (x, y, g) = (&tri[0], &tri[1], &tri[2]);
        let d = metric_d(x, y);
        let neg = Su2Matrix::from_coords(y.coords().map(|v| -v));
        for e in [
            metric_d(&g.mul(x), &g.mul(y)),
            metric_d(&x.mul(g), &y.mul(g)),
            to_su2(x).distance(&neg),
        ] {
            worst = worst.max((e - d).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e} over 1000 triples (tol 1e-10)"))
}

fn holes() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for y in [
        LipschitzQuaternion::new(1, 0, 0, 0),
        LipschitzQuaternion::new(1, 2, 0, 0),
        LipschitzQuaternion::new(3, 4, 0, 0),
    ] {
        for t in 2..=6 {
            match construct_hole(&y, t) {
                Ok(h) if h.verified_empty => {}
                Ok(h) => bad.push(format!("{y} t={t} clearance {}", h.clearance)),
                Err(e) => bad.push(format!("{y} t={t}: {e}")),
            }
        }
    }
    let o = outcome(
        bad.is_empty(),
        if bad.is_empty() { "15 certificates verified by exhaustive scan".into() } else { bad.join("; ") },
    );
    within_time(o, start.elapsed(), Duration::from_secs(120))
}

fn ball_measure(reports: &[&EfficiencyReport]) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for eps in [0.05, 0.1, 0.2, 0.4] {
        let exact = ball_measure_s3(eps).unwrap();
        let mc = monte_carlo_s3(eps, 1_000_000, SEED).unwrap();
        let rel = (mc.measure - exact) / exact;
        pass &= rel.abs() <= 0.02;
        parts.push(format!("ε={eps}: {:+.2}%", 100.0 * rel));
    }
    let packing = reports.iter().all(|r| r.packing_holds());
    let min_packing = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(|row| row.packing_product))
        .fold(f64::INFINITY, f64::min);
    pass &= packing;
    outcome(
        pass,
        format!("MC vs closed form (tol 2%, 1e6 samples) {}; min |V|μ(B) = {min_packing:.2}", parts.join(", ")),
    )
}

fn t_prime_coverage() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut ratios = Vec::new();
    for eps in [0.3, 0.2, 0.15, 0.1] {
        let t = t_prime(eps, 5).unwrap();
        let frac = coverage_fraction(GateSet::S, t, eps, 10_000, SEED).unwrap();
        let v = count_closed_form(GateSet::S, t).1 as f64;
        let ratio = v.ln() / (1.0 / (eps * eps)).ln();
        pass &= frac >= 0.99 && (0.9..=1.3).contains(&ratio);
        ratios.push(ratio);
        parts.push(format!("ε={eps} t'={t} cover={frac:.4} ratio={ratio:.3}"));
    }
    let monotone = ratios.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs());
    pass &= monotone;
    outcome(pass, format!("{}; trend toward 1 {}", parts.join(", "), if monotone { "yes" } else { "no" }))
}

fn conjecture(t_report: &EfficiencyReport) -> Outcome {
    let report = match conjecture_report(2..=8, ConjectureVariant::C4Exact, 100_000, SEED) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let ratios: Vec<String> = report.rows.iter().map(|r| format!("t{}:{:.3}", r.t, r.ratio)).collect();
    let last = t_report.rows.last().expect("nonempty");
    let gap = (last.conditional_bound - 4.0 / 3.0).abs();
    outcome(
        !report.has_finding() && gap <= 0.15,
        format!(
            "{} (ratio to 2·5^(-t/4)); conditional bound at ε={} is {:.3}, |·-4/3| = {gap:.3} (tol 0.15)",
            if report.has_finding() { "FINDING" } else { "no sampled hole above conjecture" },
            last.epsilon,
            last.conditional_bound,
        ) + &format!(" [{}]", ratios.join(" ")),
    )
}

fn efficiency(s: &EfficiencyReport, t: &EfficiencyReport) -> Outcome {
    let all_ge_one = s.rows.iter().chain(&t.rows).all(|r| r.k_hat >= 1.0);
    let ks = s.rows.last().unwrap().k_hat;
    let kt = t.rows.last().unwrap().k_hat;
    let bracket = (1.2..=2.2).contains(&ks) && (1.2..=2.2).contains(&kt);
    let dom = dominance(s, t).map(|v| v.iter().all(|&b| b)).unwrap_or(false);
    let covered = s.rows.iter().chain(&t.rows).all(|r| r.covered);
    let ts: Vec<String> = s
        .rows
        .iter()
        .zip(&t.rows)
        .map(|(a, b)| format!("{}:{}/{}", a.epsilon, b.t_epsilon, a.t_epsilon))
        .collect();
    outcome(
        all_ge_one && bracket && dom && covered,
        format!(
            "K_hat >= 1 {all_ge_one}; smallest ε K_hat S={ks:.3} T={kt:.3}; t_ε(T)/t_ε(S) [{}]",
            ts.join(" ")
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_golden-gates"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = walk(dir)
        .into_iter()
        .map(|p| (p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap().flatten() {
        let p = e.path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 7] = [
        &["enumerate", "--set", "T", "--t-max", "4", "--out", "shells"],
        &["synthesize", "--random", "--seed", "7", "--eps", "0.05"],
        &["covering", "--t", "2", "--t-max", "5", "--probes", "20000", "--svg", "c.svg"],
        &["efficiency", "--set", "S", "--probes", "5000", "--format", "json", "--svg", "e.svg"],
        &["coverage", "--eps", "0.15", "--probes", "5000"],
        &["hole", "--y", "1,2,0,0", "--t", "4"],
        &["bijection", "--t", "3", "--format", "csv"],
    ];
    let mut bad = Vec::new();
    for args in commands {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ra = run_cli(args, a.path());
        let rb = run_cli(args, b.path());
        if ra != rb || read_dir_bytes(a.path()) != read_dir_bytes(b.path()) || ra.1 != Some(0) {
            bad.push(args[0].to_string());
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { "7 commands byte-identical across repeated runs".into() } else { format!("differs: {}", bad.join(", ")) },
    )
}

fn main() -> ExitCode {
    let tables = (
        efficiency_table(GateSet::S, &EPS_LIST, 10_000, SEED, 9).expect("S efficiency table"),
        efficiency_table(GateSet::T, &EPS_LIST, 10_000, SEED, 9).expect("T efficiency table"),
    );
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("counting formulas", Box::new(counting)),
        ("lattice bijection", Box::new(bijection)),
        ("four-square oracle", Box::new(lattice_oracle)),
        ("exact synthesis round trip", Box::new(synthesis_round_trip)),
        ("metric invariance", Box::new(metric_invariance)),
        ("hole certificates", Box::new(holes)),
        ("ball measure and packing", Box::new(|| ball_measure(&[&tables.0, &tables.1]))),
        ("t' coverage", Box::new(t_prime_coverage)),
        ("conjecture consistency", Box::new(|| conjecture(&tables.1))),
        ("efficiency bracket", Box::new(|| efficiency(&tables.0, &tables.1))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
