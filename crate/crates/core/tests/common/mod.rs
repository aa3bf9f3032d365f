//! Checks shared by the property suite and the acceptance runner. Each returns
//! `Err(detail)` on the first violation.
#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::OnceLock;

use nullsubject::domain::{
    build_fixture_domain, load_domain, save_domain, Domain, Force, Grammar, Sentence,
    SupersetRegistry,
};
use nullsubject::iarc::{fit_growth, GrowthKind, GrowthParams};
use nullsubject::learner::{ssvl_step, vl_step, LearningRates, WeightVector};
use nullsubject::population::sample_truncated_gaussian;
use nullsubject::runner::{run_cohort, write_trajectories_csv, Execution, RunContext};
use nullsubject::seed::rng_from_seed;
use nullsubject::Calendar;
use nullsubject::ExperimentConfig;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

pub type Check = Result<(), String>;

pub fn fixture() -> &'static Domain {
    static D: OnceLock<Domain> = OnceLock::new();
    D.get_or_init(build_fixture_domain)
}

/// `steps` SSVL updates on random domain sentences (and some non-domain
/// ones) with weights checked after every step.
pub fn weights_stay_bounded(seed: u64, steps: usize, aggressive: f64, conservative: f64) -> Check {
    let d = fixture();
    let rates = LearningRates::new(aggressive, conservative).map_err(|e| e.to_string())?;
    let registry = SupersetRegistry::default();
    let outside = Sentence::parse("O3 O2 O1", Force::Q).unwrap();
    let mut rng = rng_from_seed(seed);
    let mut w = WeightVector::<f64>::init();
    let n = d.sentences().len();
    for step in 0..steps {
        let s = if rng.random_bool(0.05) {
            &outside
        } else {
            &d.sentences()[rng.random_range(0..n)]
        };
        w = ssvl_step(&w, d, s, &rates, &registry, &mut rng).0;
        if let Some((i, x)) = w
            .as_array()
            .iter()
            .enumerate()
            .find(|(_, x)| !(0.0..=1.0).contains(*x))
        {
            return Err(format!("step {step}: weight {i} = {x}"));
        }
    }
    Ok(())
}

/// A sentence no sampled grammar parses leaves the weights bit-identical.
pub fn unparsed_input_is_noop(seed: u64, weights: [f64; 13]) -> Check {
    let d = fixture();
    let w = WeightVector::from_array(weights).map_err(|e| e.to_string())?;
    let rates = LearningRates::new(0.01, 0.001).unwrap();
    let outside = Sentence::parse("Aux Aux Aux", Force::Dec).unwrap();
    let english_only = Sentence::parse("S Verb O1", Force::Dec).unwrap();
    let mut rng = rng_from_seed(seed);
    for _ in 0..200 {
        for s in [&outside, &english_only] {
            let (next, out) = vl_step(&w, d, s, &rates, &mut rng);
            if !out.parsed && next.as_array().map(f64::to_bits) != w.as_array().map(f64::to_bits) {
                return Err(format!("weights changed on a parse failure of {s}"));
            }
            if s == &outside && out.parsed {
                return Err("sentence outside the domain parsed".into());
            }
        }
    }
    Ok(())
}

/// SSVL with no registered parameters matches VL step for step.
pub fn empty_registry_matches_vl(seed: u64, steps: usize) -> Check {
    let d = fixture();
    let rates = LearningRates::new(0.02, 0.004).unwrap();
    let empty = SupersetRegistry::empty();
    let mut pick = rng_from_seed(seed ^ 0xABCD);
    let (mut ra, mut rb) = (rng_from_seed(seed), rng_from_seed(seed));
    let (mut wa, mut wb) = (WeightVector::<f64>::init(), WeightVector::<f64>::init());
    for step in 0..steps {
        let s = &d.sentences()[pick.random_range(0..d.sentences().len())];
        let (na, oa) = vl_step(&wa, d, s, &rates, &mut ra);
        let (nb, ob) = ssvl_step(&wb, d, s, &rates, &empty, &mut rb);
        if oa != ob || na.as_array().map(f64::to_bits) != nb.as_array().map(f64::to_bits) {
            return Err(format!("diverged at step {step}"));
        }
        wa = na;
        wb = nb;
    }
    Ok(())
}

/// Bounds, monotonicity in `u` for positive `m`, and the midpoint value.
pub fn iarc_shape(kind: GrowthKind, m: f64, c: f64, us: &[f64]) -> Check {
    let p = GrowthParams { kind, m, c };
    let mut sorted = us.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut prev = f64::NEG_INFINITY;
    for &u in &sorted {
        let v = p.evaluate(u).map_err(|e| e.to_string())?;
        if !(0.0..=1.0).contains(&v) {
            return Err(format!("IARC({u}) = {v}"));
        }
        if m > 0.0 && v < prev {
            return Err(format!("decreasing at {u}: {prev} -> {v}"));
        }
        prev = v;
    }
    let mid = match kind {
        GrowthKind::Logistic => p.evaluate(c).unwrap(),
        GrowthKind::Linear => p.evaluate((0.5 - c) / m).unwrap(),
    };
    if (mid - 0.5).abs() > 1e-9 {
        return Err(format!("midpoint value {mid}"));
    }
    Ok(())
}

fn truncated_mean(mu: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    let n = Normal::standard();
    let (a, b) = ((lo - mu) / sigma, (hi - mu) / sigma);
    let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    mu + sigma * (pdf(a) - pdf(b)) / (n.cdf(b) - n.cdf(a))
}

/// All draws inside the bounds and the sample mean within 4 standard errors
/// of the analytic truncated mean.
pub fn truncated_sampler(seed: u64, mu: f64, sigma: f64, lo: f64, hi: f64, n: usize) -> Check {
    let mut rng = rng_from_seed(seed);
    let v = sample_truncated_gaussian(mu, sigma, lo, hi, n, &mut rng).map_err(|e| e.to_string())?;
    if let Some(x) = v.iter().find(|x| !(lo..=hi).contains(*x)) {
        return Err(format!("draw {x} outside [{lo}, {hi}]"));
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let expected = truncated_mean(mu, sigma, lo, hi);
    let se = (var / n as f64).sqrt().max(1e-12);
    if (mean - expected).abs() > 4.0 * se {
        return Err(format!(
            "mean {mean} vs truncated mean {expected} (se {se})"
        ));
    }
    if var > sigma * sigma * 1.01 {
        return Err(format!(
            "variance {var} exceeds the untruncated {}",
            sigma * sigma
        ));
    }
    Ok(())
}

/// Points generated from known parameters are recovered within `1e-6`
/// relative error (for the intercept of a line, relative to `max(|c|, 1)`).
pub fn fit_round_trip(kind: GrowthKind, m: f64, c: f64, ages: [f64; 3]) -> Check {
    let cal = Calendar::standard();
    let truth = GrowthParams { kind, m, c };
    let pts = ages.map(|a| {
        let u = cal.cumulative_utterances(a).unwrap() as f64;
        (a, truth.evaluate(u).unwrap())
    });
    if kind == GrowthKind::Linear && pts.iter().any(|&(_, y)| y <= 0.0 || y >= 1.0) {
        return Err(format!("generating line is clamped at {pts:?}"));
    }
    let fit = fit_growth(&pts, kind, &cal).map_err(|e| e.to_string())?;
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
    let c_err = match kind {
        GrowthKind::Linear => (fit.c - c).abs() / c.abs().max(1.0),
        GrowthKind::Logistic => rel(fit.c, c),
    };
    if rel(fit.m, m) > 1e-6 || c_err > 1e-6 {
        return Err(format!(
            "fit ({}, {}) vs truth ({m}, {c}) from {pts:?}",
            fit.m, fit.c
        ));
    }
    Ok(())
}

fn small_run_csv(seed: u64, execution: Execution) -> Vec<u8> {
    let cal = Calendar::standard();
    let cfg = ExperimentConfig {
        seed: Some(seed),
        cohort_size: 4,
        total_utterances: 200_000,
        stride: 5_000,
        ..ExperimentConfig::default()
    };
    let ctx = RunContext::new(&cfg, fixture(), &cal).unwrap();
    let run = run_cohort(&ctx, execution, None).unwrap();
    let mut buf = Vec::new();
    write_trajectories_csv(run.trajectories(), false, &mut buf).unwrap();
    buf
}

/// Same seed gives byte-identical output, sequential or parallel.
pub fn determinism(seed: u64) -> Check {
    let a = small_run_csv(seed, Execution::Parallel);
    let b = small_run_csv(seed, Execution::Parallel);
    let c = small_run_csv(seed, Execution::Sequential);
    if a != b {
        return Err("two parallel runs differ".into());
    }
    if a != c {
        return Err("parallel and sequential runs differ".into());
    }
    Ok(())
}

/// `licenses` agrees with `language_of` for every grammar and sentence, and
/// NS-English strictly contains English with only subjectless DEC/Q extras.
pub fn domain_consistency() -> Check {
    let d = fixture();
    for g in Grammar::all() {
        let lang: HashSet<&Sentence> = match d.language_of(g) {
            Ok(l) => l.into_iter().collect(),
            Err(_) => HashSet::new(),
        };
        if !d.contains_grammar(g) && d.sentences().iter().any(|s| d.licenses(g, s)) {
            return Err(format!("absent grammar {g} licenses something"));
        }
        for s in d.sentences() {
            if d.licenses(g, s) != lang.contains(s) {
                return Err(format!("index mismatch for {g} on {s}"));
            }
        }
    }
    let en: HashSet<&Sentence> = d
        .language_of(Grammar::COLAG_ENGLISH)
        .unwrap()
        .into_iter()
        .collect();
    let ns: HashSet<&Sentence> = d
        .language_of(Grammar::NS_ENGLISH)
        .unwrap()
        .into_iter()
        .collect();
    if !en.is_subset(&ns) || en.len() >= ns.len() {
        return Err("NS-English does not strictly contain English".into());
    }
    for extra in ns.difference(&en) {
        if extra.force() == Force::Imp || extra.has_subject() {
            return Err(format!("unexpected NS-English extra {extra}"));
        }
    }
    if d.sentences()
        .iter()
        .any(|s| s.force() == Force::Imp && s.has_subject())
    {
        return Err("imperative with a subject".into());
    }
    let mut buf = Vec::new();
    save_domain(d, &mut buf).map_err(|e| e.to_string())?;
    if &load_domain(buf.as_slice()).map_err(|e| e.to_string())? != d {
        return Err("fixture does not survive save/load".into());
    }
    Ok(())
}
