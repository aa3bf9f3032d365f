//! Input stream for one e-child: uniform draws from the target language with
//! an age-dependent imperative share, and imperatives misheard as
//! declaratives with probability `1 - IARC`.

use std::io::Write;

use rand::Rng;

use crate::domain::{Domain, Force, Grammar, Sentence, SentenceId};
use crate::error::{ensure, Error, Result};
use crate::iarc::{GrowthKind, GrowthParams};
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputSchedule {
    pub imperative_rate_early: f64,
    pub imperative_rate_late: f64,
    /// First utterance index that uses the late rate (age 2;0).
    pub rate_switch_utterance: u64,
}

impl Default for InputSchedule {
    fn default() -> Self {
        InputSchedule {
            imperative_rate_early: 0.16,
            imperative_rate_late: 0.18,
            rate_switch_utterance: 3_566_210,
        }
    }
}

impl InputSchedule {
    pub fn validate(&self) -> Result<()> {
        for r in [self.imperative_rate_early, self.imperative_rate_late] {
            ensure!(
                r > 0.0 && r < 1.0,
                Error::Config(format!("imperative rate {r} outside (0, 1)"))
            );
        }
        Ok(())
    }
}

pub fn imperative_rate(u_index: u64, sched: &InputSchedule) -> f64 {
    if u_index < sched.rate_switch_utterance {
        sched.imperative_rate_early
    } else {
        sched.imperative_rate_late
    }
}

/// Where the IARC of each utterance comes from. `Fixed(1)` switches
/// misinterpretation off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IarcSource<T> {
    Fixed(T),
    Growth(GrowthParams<T>),
}

impl<T: Real> IarcSource<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IarcSource::Fixed(v) => ensure!(
                v >= T::zero() && v <= T::one(),
                Error::Config(format!("fixed IARC {v} outside [0, 1]"))
            ),
            IarcSource::Growth(p) => {
                ensure!(
                    p.m.is_finite() && p.c.is_finite(),
                    Error::Config("growth parameters must be finite".into())
                );
                ensure!(
                    p.kind != GrowthKind::Linear || p.m != T::zero(),
                    Error::Config("linear growth needs a non-zero slope".into())
                );
            }
        }
        Ok(())
    }

    pub fn at(&self, u_index: u64) -> T {
        match self {
            IarcSource::Fixed(v) => *v,
            IarcSource::Growth(p) => p
                .evaluate(T::from_u64(u_index).expect("utterance index fits the scalar"))
                .expect("validated growth parameters"),
        }
    }
}

/// One utterance as heard. `presented` is the sentence the learner parses:
/// the original, or its declarative relabeling, which is `None` when that
/// relabeling lies outside the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emission<T> {
    pub original: SentenceId,
    pub presented: Option<SentenceId>,
    pub force: Force,
    pub was_imperative: bool,
    pub was_misinterpreted: bool,
    pub iarc: T,
}

impl<T> Emission<T> {
    pub fn sentence(&self, domain: &Domain) -> Sentence {
        domain
            .sentence(self.original)
            .with_force(self.force)
            .expect("relabeling only turns imperatives into declaratives")
    }
}

#[derive(Clone, Debug)]
pub struct Environment<'a, T> {
    domain: &'a Domain,
    imperatives: Vec<SentenceId>,
    /// Declarative reading of each imperative, parallel to `imperatives`.
    relabeled: Vec<Option<SentenceId>>,
    others: Vec<SentenceId>,
    schedule: InputSchedule,
    iarc: IarcSource<T>,
}

impl<'a, T: Real> Environment<'a, T> {
    pub fn new(
        domain: &'a Domain,
        target: Grammar,
        schedule: InputSchedule,
        iarc: IarcSource<T>,
    ) -> Result<Self> {
        schedule.validate()?;
        iarc.validate()?;
        let language = domain.language_ids(target)?;
        let (imperatives, others): (Vec<SentenceId>, Vec<SentenceId>) = language
            .iter()
            .partition(|&&id| domain.sentence(id).force() == Force::Imp);
        ensure!(
            !imperatives.is_empty(),
            Error::Config(format!("target {target} has no imperatives"))
        );
        ensure!(
            !others.is_empty(),
            Error::Config(format!("target {target} has no declaratives or questions"))
        );
        let relabeled = imperatives
            .iter()
            .map(|&id| {
                let dec = domain
                    .sentence(id)
                    .with_force(Force::Dec)
                    .expect("declaratives accept any tokens");
                domain.id_of(&dec)
            })
            .collect();
        Ok(Environment {
            domain,
            imperatives,
            relabeled,
            others,
            schedule,
            iarc,
        })
    }

    pub fn domain(&self) -> &'a Domain {
        self.domain
    }

    pub fn schedule(&self) -> &InputSchedule {
        &self.schedule
    }

    pub fn iarc_source(&self) -> &IarcSource<T> {
        &self.iarc
    }

    /// Emits utterance number `u_index`.
    #[inline]
    pub fn next_sentence<R: Rng + ?Sized>(&self, u_index: u64, rng: &mut R) -> Emission<T> {
        let iarc = self.iarc.at(u_index);
        if rng.random::<f64>() < imperative_rate(u_index, &self.schedule) {
            let k = rng.random_range(0..self.imperatives.len());
            let original = self.imperatives[k];
            if rng.random::<f64>() >= iarc.as_f64() {
                return Emission {
                    original,
                    presented: self.relabeled[k],
                    force: Force::Dec,
                    was_imperative: true,
                    was_misinterpreted: true,
                    iarc,
                };
            }
            Emission {
                original,
                presented: Some(original),
                force: Force::Imp,
                was_imperative: true,
                was_misinterpreted: false,
                iarc,
            }
        } else {
            let original = self.others[rng.random_range(0..self.others.len())];
            Emission {
                original,
                presented: Some(original),
                force: self.domain.sentence(original).force(),
                was_imperative: false,
                was_misinterpreted: false,
                iarc,
            }
        }
    }
}

pub fn write_trace_header<W: Write>(mut out: W) -> Result<()> {
    writeln!(out, "u_index,tokens,force_original,force_emitted,iarc")?;
    Ok(())
}

pub fn write_trace_row<T: Real, W: Write>(
    mut out: W,
    domain: &Domain,
    u_index: u64,
    e: &Emission<T>,
) -> Result<()> {
    let s = domain.sentence(e.original);
    writeln!(
        out,
        "{u_index},{},{},{},{}",
        s.tokens_string(),
        s.force(),
        e.force,
        e.iarc
    )?;
    Ok(())
}
