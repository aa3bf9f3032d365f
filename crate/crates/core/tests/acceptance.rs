//! Acceptance runner. Prints one line per criterion and exits non-zero if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use nullsubject::domain::{build_fixture_domain, Domain, Grammar};
use nullsubject::iarc::GrowthKind;
use nullsubject::population::{estimate_sigma, TailSide};
use nullsubject::runner::{run_cohort, CohortRun, Execution, RunContext, Trajectory};
use nullsubject::{Calendar, ExperimentConfig};

use common::*;

const MASTER_SEED: u64 = 1;
const THRESHOLD: f64 = 0.02;
const RATE_SWITCH: u64 = 3_566_210;
const SLOPE_WINDOW: u64 = 200_000;

type Outcome = Result<String, String>;
type NamedCheck = Box<dyn Fn() -> Check>;
type StageRuns = [(GrowthKind, Result<CohortRun<f64>, String>)];

fn run(cfg: &ExperimentConfig, domain: &Domain, cal: &Calendar) -> Result<CohortRun<f64>, String> {
    let ctx = RunContext::new(cfg, domain, cal).map_err(|e| e.to_string())?;
    let run = run_cohort(&ctx, Execution::Parallel, None).map_err(|e| e.to_string())?;
    if run.summary.is_partial() || run.summary.children != cfg.cohort_size {
        return Err(format!(
            "only {} of {} children simulated",
            run.summary.children, cfg.cohort_size
        ));
    }
    Ok(run)
}

fn calendar_exactness(cal: &Calendar) -> Outcome {
    let per_range: Vec<u64> = cal
        .ranges()
        .iter()
        .map(|r| cal.utterances_in_range(r))
        .collect();
    let expected_ranges = [799_898, 877_665, 1_888_647, 2_044_183, 2_177_499, 2_266_376];
    let expected_cum = [
        799_898, 1_677_563, 3_566_210, 5_610_392, 7_787_891, 10_054_267,
    ];
    if per_range != expected_ranges {
        return Err(format!("per-range totals {per_range:?}"));
    }
    if cal.cumulative_totals() != expected_cum {
        return Err(format!("cumulative totals {:?}", cal.cumulative_totals()));
    }
    let at = cal.cumulative_utterances(3.3).map_err(|e| e.to_string())?;
    if at != 6_254_310 {
        return Err(format!("cumulative(3.3) = {at}"));
    }
    Ok(format!(
        "cumulative {:?}, cumulative(3.3) = {at}",
        cal.cumulative_totals()
    ))
}

fn sigma_reproduction() -> Outcome {
    let cases = [
        (0.4, 0.25, 0.2, TailSide::Below, 0.1785, 0.005),
        (0.64, 0.75, 0.4, TailSide::Above, 0.43, 0.01),
        (0.9, 0.75, 0.2, TailSide::Below, 0.179, 0.005),
    ];
    let mut got = Vec::new();
    for (mu, tail, p, side, want, tol) in cases {
        let s = estimate_sigma(mu, tail, p, side).map_err(|e| e.to_string())?;
        got.push(format!("{s:.4}"));
        if (s - want).abs() > tol {
            return Err(format!("sigma {s:.4} vs {want} (tolerance {tol})"));
        }
    }
    Ok(format!("sigma = {}", got.join(", ")))
}

fn final_ns_range(run: &CohortRun<f64>) -> (f64, f64) {
    run.trajectories()
        .map(Trajectory::final_ns)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
            (lo.min(w), hi.max(w))
        })
}

fn ns_english_noiseless(
    domain: &Domain,
    cal: &Calendar,
    aggressive: f64,
    target_ns: f64,
) -> Outcome {
    let cfg = ExperimentConfig {
        target: Grammar::NS_ENGLISH,
        noise: false,
        aggressive_rate: aggressive,
        conservative_rate: 0.001,
        cohort_size: 20,
        scale: 10,
        seed: Some(MASTER_SEED),
        ..ExperimentConfig::default()
    };
    let run = run(&cfg, domain, cal)?;
    let hits = run
        .trajectories()
        .filter(|t| (t.final_ns() - target_ns).abs() <= THRESHOLD)
        .count();
    let (lo, hi) = final_ns_range(&run);
    let detail =
        format!("{hits}/20 end within {THRESHOLD} of {target_ns}; final NS in [{lo:.4}, {hi:.4}]");
    if hits == 20 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn noiseless_english(domain: &Domain, cal: &Calendar) -> Outcome {
    let cfg = ExperimentConfig {
        noise: false,
        cohort_size: 10,
        seed: Some(MASTER_SEED),
        ..ExperimentConfig::default()
    };
    let run = run(&cfg, domain, cal)?;
    let median = run.summary.median;
    let t = run
        .trajectories()
        .find(|t| t.child_id == median)
        .ok_or("median child missing")?;
    match t.convergence_u {
        Some(u) if u < RATE_SWITCH => Ok(format!("median child {median} converges at u = {u}")),
        Some(u) => Err(format!("median child {median} converges at u = {u}")),
        None => Err(format!("median child {median} never converges")),
    }
}

fn ns_stage_run(
    domain: &Domain,
    cal: &Calendar,
    kind: GrowthKind,
) -> Result<CohortRun<f64>, String> {
    let cfg = ExperimentConfig {
        growth: kind,
        cohort_size: 10,
        seed: Some(MASTER_SEED),
        ..ExperimentConfig::default()
    };
    run(&cfg, domain, cal)
}

fn ns_stage_shape(runs: &StageRuns, cal: &Calendar) -> Outcome {
    let age4 = cal.cumulative_utterances(4.0).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for (kind, run) in runs {
        let run = run.as_ref().map_err(|e| format!("{kind}: {e}"))?;
        let s = &run.summary;
        let (_, final_max) = final_ns_range(run);
        let latest_peak = run.trajectories().map(|t| t.peak_u).max().unwrap_or(0);
        details.push(format!(
            "{kind}: peak [{:.3}, {:.3}], final max {final_max:.4}, latest peak age {:.2}",
            s.peak_min,
            s.peak_max,
            cal.age_at_utterance(latest_peak).unwrap_or(f64::NAN)
        ));
        for t in run.trajectories() {
            let mut bad = Vec::new();
            if !(0.65..=0.95).contains(&t.peak_ns) {
                bad.push(format!("peak {:.4}", t.peak_ns));
            }
            if t.final_ns().abs() > 0.05 {
                bad.push(format!("final {:.4}", t.final_ns()));
            }
            if t.peak_u >= age4 {
                bad.push(format!("peak at u = {}", t.peak_u));
            }
            if !bad.is_empty() {
                failures.push(format!("{kind} child {}: {}", t.child_id, bad.join(", ")));
            }
        }
    }
    let detail = details.join("; ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!(
            "{detail}; {} violations: {}",
            failures.len(),
            failures.join("; ")
        ))
    }
}

/// NS weight at `u`, linearly interpolated between samples.
fn ns_at(t: &Trajectory<f64>, u: u64) -> Option<f64> {
    let i = t.samples.partition_point(|s| s.u_index < u);
    let b = t.samples.get(i)?;
    if b.u_index == u || i == 0 {
        return Some(b.ns_weight);
    }
    let a = &t.samples[i - 1];
    let f = (u - a.u_index) as f64 / (b.u_index - a.u_index) as f64;
    Some(a.ns_weight + f * (b.ns_weight - a.ns_weight))
}

fn rate_switch_bump(runs: &StageRuns) -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (kind, run) in runs {
        let run = run.as_ref().map_err(|e| format!("{kind}: {e}"))?;
        let median = run.summary.median;
        let t = run
            .trajectories()
            .find(|t| t.child_id == median)
            .ok_or("median child missing")?;
        let w = |u| ns_at(t, u).ok_or(format!("no samples around u = {u}"));
        let window = SLOPE_WINDOW as f64;
        let before = (w(RATE_SWITCH)? - w(RATE_SWITCH - SLOPE_WINDOW)?) / window;
        let after = (w(RATE_SWITCH + SLOPE_WINDOW)? - w(RATE_SWITCH)?) / window;
        ok &= after > before;
        details.push(format!(
            "{kind} median child {median}: slope {before:.3e} -> {after:.3e}"
        ));
    }
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn property_suites() -> Outcome {
    let checks: Vec<(&str, NamedCheck)> = vec![
        (
            "boundedness",
            Box::new(|| weights_stay_bounded(17, 1_000_000, 0.3, 0.05)),
        ),
        (
            "parse-failure no-op",
            Box::new(|| unparsed_input_is_noop(5, [0.3; 13])),
        ),
        (
            "empty registry",
            Box::new(|| empty_registry_matches_vl(11, 20_000)),
        ),
        (
            "linear IARC",
            Box::new(|| iarc_shape(GrowthKind::Linear, 1.4e-7, -0.2, &[0.0, 1e6, 3e6, 6e6, 1e7])),
        ),
        (
            "logistic IARC",
            Box::new(|| {
                iarc_shape(
                    GrowthKind::Logistic,
                    1.5e-6,
                    5.6e6,
                    &[0.0, 1e6, 3e6, 6e6, 1e7],
                )
            }),
        ),
        (
            "truncated sampler",
            Box::new(|| truncated_sampler(3, 0.4, 0.18, 0.0, 0.75, 50_000)),
        ),
        (
            "linear fit",
            Box::new(|| fit_round_trip(GrowthKind::Linear, 1.2e-7, -0.3, [2.7, 3.2, 3.8])),
        ),
        (
            "logistic fit",
            Box::new(|| fit_round_trip(GrowthKind::Logistic, 1.1e-6, 6.0e6, [2.7, 3.2, 3.8])),
        ),
        ("determinism", Box::new(|| determinism(42))),
        ("domain index", Box::new(domain_consistency)),
    ];
    let mut failed = Vec::new();
    for (name, check) in &checks {
        if let Err(e) = check() {
            failed.push(format!("{name}: {e}"));
        }
    }
    if failed.is_empty() {
        Ok(format!("{} checks", checks.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn report(id: usize, name: &str, started: Instant, outcome: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("[{tag}] criterion {id} {name} ({secs:.1}s): {detail}");
    ok
}

fn main() -> ExitCode {
    let domain = build_fixture_domain();
    let cal = Calendar::standard();
    let mut all = true;

    let t = Instant::now();
    all &= report(1, "calendar exactness", t, calendar_exactness(&cal));
    let t = Instant::now();
    all &= report(2, "sigma reproduction", t, sigma_reproduction());
    let t = Instant::now();
    all &= report(
        3,
        "subset preference failure",
        t,
        ns_english_noiseless(&domain, &cal, 0.001, 0.0),
    );
    let t = Instant::now();
    all &= report(
        4,
        "superset success",
        t,
        ns_english_noiseless(&domain, &cal, 0.008, 1.0),
    );
    let t = Instant::now();
    all &= report(5, "noiseless English", t, noiseless_english(&domain, &cal));

    let t = Instant::now();
    let runs: Vec<_> = [GrowthKind::Linear, GrowthKind::Logistic]
        .into_iter()
        .map(|k| (k, ns_stage_run(&domain, &cal, k)))
        .collect();
    all &= report(6, "NS-stage shape", t, ns_stage_shape(&runs, &cal));
    let t = Instant::now();
    all &= report(7, "rate-switch bump", t, rate_switch_bump(&runs));
    let t = Instant::now();
    all &= report(8, "property suites", t, property_suites());

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
