//! Simulation of single e-children and whole cohorts.

use std::io::Write;

use rayon::prelude::*;

use crate::calendar::Calendar;
use crate::domain::{Domain, NS, NUM_PARAMS};
use crate::environment::{
    write_trace_header, write_trace_row, Environment, IarcSource, InputSchedule,
};
use crate::error::{ensure, Error, Result};
use crate::learner::{step_in_place, WeightVector};
use crate::num::Real;
use crate::population::{build_cohort, study_groups, Cohort, EChildProfile};
use crate::seed::rng_from_seed;

use super::config::ExperimentConfig;
use super::summary::{summarize, Summary};

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    /// Full-scale utterance index.
    pub u_index: u64,
    pub age_years: T,
    pub ns_weight: T,
    pub iarc: T,
    /// All thirteen weights, when requested.
    pub weights: Option<[T; NUM_PARAMS]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub child_id: usize,
    pub seed: u64,
    pub samples: Vec<Sample<T>>,
    pub final_weights: WeightVector<T>,
    pub converged: bool,
    /// First sampled index from which the NS weight stays within the threshold
    /// of the target value.
    pub convergence_u: Option<u64>,
    pub peak_ns: T,
    pub peak_u: u64,
}

impl<T: Real> Trajectory<T> {
    pub fn final_ns(&self) -> T {
        self.final_weights.ns()
    }
}

/// Everything a run needs besides the per-child profile.
#[derive(Clone, Copy, Debug)]
pub struct RunContext<'a, T> {
    pub config: &'a ExperimentConfig<T>,
    pub domain: &'a Domain,
    pub calendar: &'a Calendar<T>,
    pub schedule: InputSchedule,
}

impl<'a, T: Real> RunContext<'a, T> {
    pub fn new(
        config: &'a ExperimentConfig<T>,
        domain: &'a Domain,
        calendar: &'a Calendar<T>,
    ) -> Result<Self> {
        config.validate()?;
        ensure!(
            domain.contains_grammar(config.target),
            Error::Config(format!("target {} is not in the domain", config.target))
        );
        ensure!(
            config.total_utterances <= calendar.total_utterances(),
            Error::Config(format!(
                "total_utterances {} exceeds the calendar's {}",
                config.total_utterances,
                calendar.total_utterances()
            ))
        );
        Ok(RunContext {
            config,
            domain,
            calendar,
            schedule: InputSchedule {
                rate_switch_utterance: calendar
                    .cumulative_utterances(T::lit(2.0))
                    .unwrap_or(u64::MAX),
                ..InputSchedule::default()
            },
        })
    }

    fn iarc_source(&self, profile: &EChildProfile<T>) -> IarcSource<T> {
        if self.config.noise {
            IarcSource::Growth(profile.growth)
        } else {
            IarcSource::Fixed(T::one())
        }
    }
}

/// First index of the all-remaining-within-threshold suffix, if non-empty.
fn stable_suffix_start<T: Real>(samples: &[Sample<T>], target: T, threshold: T) -> Option<usize> {
    let mut start = None;
    for (i, s) in samples.iter().enumerate().rev() {
        if (s.ns_weight - target).abs() <= threshold {
            start = Some(i);
        } else {
            break;
        }
    }
    start
}

/// Simulates one e-child. Utterance `i` of a run at scale `k` is emitted with
/// the environment and IARC of full-scale utterance `i * k`.
pub fn run_echild<T: Real>(
    ctx: &RunContext<'_, T>,
    profile: &EChildProfile<T>,
) -> Result<Trajectory<T>> {
    run_echild_traced(ctx, profile, None)
}

pub fn run_echild_traced<T: Real>(
    ctx: &RunContext<'_, T>,
    profile: &EChildProfile<T>,
    mut trace: Option<&mut dyn Write>,
) -> Result<Trajectory<T>> {
    let cfg = ctx.config;
    let env = Environment::new(
        ctx.domain,
        cfg.target,
        ctx.schedule,
        ctx.iarc_source(profile),
    )?;
    let rates = cfg.effective_rates()?;
    let k = cfg.scale;
    let steps = cfg.total_utterances / k;
    let stride = (cfg.stride / k).max(1);
    let mut rng = rng_from_seed(profile.seed);
    let mut w = WeightVector::<T>::init();

    let sample = |w: &WeightVector<T>, u_index: u64| -> Result<Sample<T>> {
        Ok(Sample {
            u_index,
            age_years: ctx.calendar.age_at_utterance(u_index)?,
            ns_weight: w.ns(),
            iarc: env.iarc_source().at(u_index),
            weights: cfg.record_all_weights.then(|| *w.as_array()),
        })
    };
    let mut samples = Vec::with_capacity((steps / stride) as usize + 2);
    samples.push(sample(&w, 0)?);
    if let Some(out) = trace.as_deref_mut() {
        write_trace_header(out)?;
    }

    for step in 0..steps {
        let u_index = step * k;
        let emission = env.next_sentence(u_index, &mut rng);
        if let Some(out) = trace.as_deref_mut() {
            write_trace_row(out, ctx.domain, u_index, &emission)?;
        }
        step_in_place(
            cfg.learner,
            &mut w,
            ctx.domain,
            emission.presented,
            &rates,
            &cfg.registry,
            &mut rng,
            |_| {},
        );
        let done = step + 1;
        if done % stride == 0 || done == steps {
            samples.push(sample(&w, done * k)?);
        }
    }

    let target_ns = T::from_u8(cfg.target.value(NS)).expect("bit");
    let suffix = stable_suffix_start(&samples, target_ns, cfg.threshold);
    let (peak_u, peak_ns) = samples.iter().fold((0, T::neg_infinity()), |(u, best), s| {
        if s.ns_weight > best {
            (s.u_index, s.ns_weight)
        } else {
            (u, best)
        }
    });
    Ok(Trajectory {
        child_id: profile.id,
        seed: profile.seed,
        convergence_u: suffix.map(|i| samples[i].u_index),
        converged: suffix.is_some(),
        samples,
        final_weights: w,
        peak_ns,
        peak_u,
    })
}

/// Outcome of one child in a cohort run.
#[derive(Debug)]
pub struct ChildRun<T> {
    pub child_id: usize,
    pub result: Result<Trajectory<T>>,
}

#[derive(Debug)]
pub struct CohortRun<T> {
    pub cohort: Cohort<T>,
    pub runs: Vec<ChildRun<T>>,
    pub summary: Summary<T>,
}

impl<T: Real> CohortRun<T> {
    pub fn trajectories(&self) -> impl Iterator<Item = &Trajectory<T>> {
        self.runs.iter().filter_map(|r| r.result.as_ref().ok())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Sequential,
}

/// Builds the cohort from the master seed and runs every fitted child. The
/// first child's emissions go to `trace` when given.
pub fn run_cohort<T: Real>(
    ctx: &RunContext<'_, T>,
    execution: Execution,
    trace: Option<&mut dyn Write>,
) -> Result<CohortRun<T>> {
    let cfg = ctx.config;
    let seed = cfg
        .seed
        .ok_or_else(|| Error::Config("a master seed is required".into()))?;
    let cohort = build_cohort(
        &study_groups(),
        cfg.cohort_size,
        cfg.growth,
        ctx.calendar,
        seed,
    )?;
    let runs = run_profiles(ctx, &cohort.children, execution, trace);
    let summary = summarize(
        &runs
            .iter()
            .filter_map(|r| r.result.as_ref().ok())
            .collect::<Vec<_>>(),
        cohort.excluded.len(),
        runs.iter().filter(|r| r.result.is_err()).count(),
    )?;
    Ok(CohortRun {
        cohort,
        runs,
        summary,
    })
}

/// Runs the given profiles, returning results sorted by child id.
pub fn run_profiles<T: Real>(
    ctx: &RunContext<'_, T>,
    profiles: &[EChildProfile<T>],
    execution: Execution,
    mut trace: Option<&mut dyn Write>,
) -> Vec<ChildRun<T>> {
    let first_id = profiles.iter().map(|p| p.id).min();
    let traced = |p: &EChildProfile<T>, trace: Option<&mut dyn Write>| ChildRun {
        child_id: p.id,
        result: run_echild_traced(ctx, p, trace),
    };
    let mut runs: Vec<ChildRun<T>> = match execution {
        Execution::Sequential => profiles
            .iter()
            .map(|p| {
                let t = if Some(p.id) == first_id {
                    trace.take()
                } else {
                    None
                };
                traced(p, t)
            })
            .collect(),
        Execution::Parallel => {
            let (head, rest): (Vec<_>, Vec<_>) = profiles
                .iter()
                .partition(|p| Some(p.id) == first_id && trace.is_some());
            let mut runs: Vec<ChildRun<T>> = rest.par_iter().map(|p| traced(p, None)).collect();
            runs.extend(head.into_iter().map(|p| traced(p, trace.take())));
            runs
        }
    };
    runs.sort_by_key(|r| r.child_id);
    for r in &runs {
        if let Err(e) = &r.result {
            log::warn!("e-child {} failed: {e}", r.child_id);
        }
    }
    runs
}
