//! Cohort construction: per-group truncated Gaussian ages and IARC values,
//! sorted within each group and paired by rank into three observations per
//! e-child.

use std::io::Write;

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::calendar::Calendar;
use crate::error::{ensure, Error, Result};
use crate::iarc::{fit_growth, GrowthKind, GrowthParams};
use crate::num::Real;
use crate::seed::{child_seed, rng_from_seed};

/// Smallest untruncated probability mass the sampler accepts.
const MIN_MASS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailSide {
    Below,
    Above,
}

impl std::str::FromStr for TailSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "below" | "<" => Ok(TailSide::Below),
            "above" | ">" => Ok(TailSide::Above),
            _ => Err(Error::InvalidArgument(format!("unknown tail side {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec<T> {
    pub label: String,
    pub age_min: T,
    pub age_max: T,
    pub age_mean: T,
    pub age_sigma: T,
    pub iarc_mean: T,
    pub iarc_sigma: T,
    pub iarc_min: T,
    pub iarc_max: T,
}

impl<T: Real> GroupSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Error::InvalidArgument(format!("group {}: {what}", self.label));
        ensure!(self.age_min < self.age_max, bad("age range is empty"));
        ensure!(
            self.age_mean > self.age_min && self.age_mean < self.age_max,
            bad("mean age outside its range")
        );
        ensure!(self.iarc_min < self.iarc_max, bad("IARC range is empty"));
        ensure!(
            self.iarc_min >= T::zero() && self.iarc_max <= T::one(),
            bad("IARC bounds outside [0, 1]")
        );
        ensure!(
            self.iarc_mean > self.iarc_min && self.iarc_mean < self.iarc_max,
            bad("mean IARC outside its range")
        );
        ensure!(
            self.age_sigma > T::zero() && self.iarc_sigma > T::zero(),
            bad("standard deviations must be positive")
        );
        Ok(())
    }
}

/// The three age groups of the truth-value judgment study, with IARC spreads
/// estimated from their tail probabilities.
pub fn study_groups<T: Real>() -> [GroupSpec<T>; 3] {
    let group =
        |label: &str, ages: (f64, f64, f64), iarc: (f64, f64, f64), tail: (f64, f64, TailSide)| {
            let sigma = estimate_sigma(iarc.0, tail.0, tail.1, tail.2)
                .expect("tabulated tails are consistent");
            GroupSpec {
                label: label.to_string(),
                age_min: T::lit(ages.0),
                age_max: T::lit(ages.1),
                age_mean: T::lit(ages.2),
                age_sigma: T::lit(0.1),
                iarc_mean: T::lit(iarc.0),
                iarc_sigma: T::lit(sigma),
                iarc_min: T::lit(iarc.1),
                iarc_max: T::lit(iarc.2),
            }
        };
    [
        group(
            "2;6-2;11",
            (2.54, 2.96, 2.73),
            (0.4, 0.0, 0.75),
            (0.25, 0.2, TailSide::Below),
        ),
        group(
            "3;0-3;5",
            (3.12, 3.48, 3.3),
            (0.64, 0.25, 1.0),
            (0.75, 0.4, TailSide::Above),
        ),
        group(
            "3;6-3;11",
            (3.64, 3.98, 3.82),
            (0.9, 0.25, 1.0),
            (0.75, 0.2, TailSide::Below),
        ),
    ]
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// Standard deviation of `Normal(mu, sigma)` that puts `tail_prob` of its mass
/// below (or above) `tail_value`.
pub fn estimate_sigma(mu: f64, tail_value: f64, tail_prob: f64, side: TailSide) -> Result<f64> {
    ensure!(
        tail_prob > 0.0 && tail_prob < 1.0,
        Error::InvalidArgument(format!("tail probability {tail_prob} outside (0, 1)"))
    );
    ensure!(
        tail_value != mu,
        Error::InvalidArgument("tail value equals the mean".into())
    );
    let z = match side {
        TailSide::Below => std_normal().inverse_cdf(tail_prob),
        TailSide::Above => std_normal().inverse_cdf(1.0 - tail_prob),
    };
    let sigma = (tail_value - mu) / z;
    ensure!(
        sigma.is_finite() && sigma > 0.0,
        Error::InvalidArgument(format!(
            "no positive standard deviation puts {tail_prob} {side:?} {tail_value} with mean {mu}"
        ))
    );
    Ok(sigma)
}

/// `n` draws from `Normal(mu, sigma)` conditioned on `[lo, hi]`, by inverse
/// CDF. Intervals above the mean are sampled in the mirrored lower tail where
/// the CDF keeps its precision.
pub fn sample_truncated_gaussian<T: Real, R: Rng + ?Sized>(
    mu: T,
    sigma: T,
    lo: T,
    hi: T,
    n: usize,
    rng: &mut R,
) -> Result<Vec<T>> {
    ensure!(
        lo < hi,
        Error::InvalidArgument(format!("empty truncation interval [{lo}, {hi}]"))
    );
    ensure!(
        sigma > T::zero() && sigma.is_finite(),
        Error::InvalidArgument(format!("standard deviation {sigma} must be positive"))
    );
    let (mu, sigma) = (mu.as_f64(), sigma.as_f64());
    let a = (lo.as_f64() - mu) / sigma;
    let b = (hi.as_f64() - mu) / sigma;
    let mirrored = a > 0.0;
    let (a, b) = if mirrored { (-b, -a) } else { (a, b) };
    let normal = std_normal();
    let (pa, pb) = (normal.cdf(a), normal.cdf(b));
    let mass = pb - pa;
    ensure!(
        mass >= MIN_MASS,
        Error::Sampling(format!(
            "[{lo}, {hi}] holds negligible mass under Normal({mu}, {sigma})"
        ))
    );
    let draws = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let z = normal.inverse_cdf(pa + u * mass).clamp(a, b);
            let z = if mirrored { -z } else { z };
            T::lit(mu + sigma * z).max(lo).min(hi)
        })
        .collect();
    Ok(draws)
}

/// One simulated child: three (age, IARC) observations ordered by age and the
/// growth curve fitted through them.
#[derive(Clone, Debug, PartialEq)]
pub struct EChildProfile<T> {
    pub id: usize,
    pub observations: [(T, T); 3],
    pub growth: GrowthParams<T>,
    pub seed: u64,
}

/// A child whose growth curve could not be fitted.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcludedChild<T> {
    pub id: usize,
    pub observations: [(T, T); 3],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cohort<T> {
    pub master_seed: u64,
    pub kind: GrowthKind,
    pub children: Vec<EChildProfile<T>>,
    pub excluded: Vec<ExcludedChild<T>>,
}

fn sorted_draws<T: Real, R: Rng + ?Sized>(
    mu: T,
    sigma: T,
    lo: T,
    hi: T,
    n: usize,
    rng: &mut R,
) -> Result<Vec<T>> {
    let mut v = sample_truncated_gaussian(mu, sigma, lo, hi, n, rng)?;
    // stable: equal values keep draw order
    v.sort_by(|x, y| x.partial_cmp(y).expect("finite draws"));
    Ok(v)
}

/// Samples `n` ages and `n` IARC values per group from `master_seed`, pairs
/// them by rank and fits a growth curve per child.
pub fn build_cohort<T: Real>(
    groups: &[GroupSpec<T>; 3],
    n: usize,
    kind: GrowthKind,
    calendar: &Calendar<T>,
    master_seed: u64,
) -> Result<Cohort<T>> {
    ensure!(
        n >= 1,
        Error::InvalidArgument("cohort size must be at least 1".into())
    );
    for pair in groups.windows(2) {
        ensure!(
            pair[0].age_mean < pair[1].age_mean,
            Error::InvalidArgument("groups must be ordered by age".into())
        );
    }
    for g in groups {
        g.validate()?;
    }
    let mut rng = rng_from_seed(master_seed);
    let mut columns: Vec<(Vec<T>, Vec<T>)> = Vec::with_capacity(3);
    for g in groups {
        let ages = sorted_draws(g.age_mean, g.age_sigma, g.age_min, g.age_max, n, &mut rng)?;
        let iarcs = sorted_draws(
            g.iarc_mean,
            g.iarc_sigma,
            g.iarc_min,
            g.iarc_max,
            n,
            &mut rng,
        )?;
        columns.push((ages, iarcs));
    }

    let mut children = Vec::with_capacity(n);
    let mut excluded = Vec::new();
    for id in 0..n {
        let observations: [(T, T); 3] =
            std::array::from_fn(|k| (columns[k].0[id], columns[k].1[id]));
        match fit_growth(&observations, kind, calendar) {
            Ok(growth) => children.push(EChildProfile {
                id,
                observations,
                growth,
                seed: child_seed(master_seed, id as u64),
            }),
            Err(e) => {
                log::warn!("e-child {id} excluded: {e}");
                excluded.push(ExcludedChild {
                    id,
                    observations,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(Cohort {
        master_seed,
        kind,
        children,
        excluded,
    })
}

/// Writes `id,age1,iarc1,age2,iarc2,age3,iarc3,kind,m,c,seed`, one row per
/// fitted child.
pub fn write_cohort_csv<T: Real, W: Write>(cohort: &Cohort<T>, mut out: W) -> Result<()> {
    writeln!(out, "id,age1,iarc1,age2,iarc2,age3,iarc3,kind,m,c,seed")?;
    for child in &cohort.children {
        write!(out, "{}", child.id)?;
        for (age, iarc) in child.observations {
            write!(out, ",{age},{iarc}")?;
        }
        writeln!(
            out,
            ",{},{:e},{:e},{}",
            child.growth.kind,
            child.growth.m.as_f64(),
            child.growth.c.as_f64(),
            child.seed
        )?;
    }
    out.flush()?;
    Ok(())
}
