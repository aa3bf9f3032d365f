//! Reward-only variational learners over per-parameter weights.
//!
//! Both learners sample a grammar from the weights, try it on the input and,
//! only when it parses, nudge weights with the linear reward scheme
//!
//! ```text
//! toward 0:  w <- w - rate * w
//! toward 1:  w <- w + rate * (1 - w)
//! ```
//!
//! The plain learner rewards every parameter toward its sampled value. The
//! superset-subset learner does the same except for registered parameters
//! sampled at their superset value: if flipping that one bit to the subset
//! value still parses the input, the subset value is rewarded conservatively;
//! otherwise the superset value is rewarded aggressively.

use rand::Rng;

use crate::domain::{Domain, Grammar, Sentence, SentenceId, SupersetRegistry, NS, NUM_PARAMS};
use crate::error::{ensure, Error, Result};
use crate::num::Real;

/// One confidence value per parameter, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightVector<T> {
    weights: [T; NUM_PARAMS],
}

impl<T: Real> WeightVector<T> {
    /// Every weight at 0.5.
    pub fn init() -> Self {
        WeightVector {
            weights: [T::lit(0.5); NUM_PARAMS],
        }
    }

    pub fn from_array(weights: [T; NUM_PARAMS]) -> Result<Self> {
        for (i, w) in weights.iter().enumerate() {
            ensure!(
                *w >= T::zero() && *w <= T::one(),
                Error::InvalidArgument(format!("weight {i} = {w} outside [0, 1]"))
            );
        }
        Ok(WeightVector { weights })
    }

    /// Weights equal to the bits of `g`.
    pub fn at_grammar(g: Grammar) -> Self {
        WeightVector {
            weights: std::array::from_fn(|i| T::from_u8(g.value(i)).expect("bit")),
        }
    }

    #[inline]
    pub fn get(&self, param: usize) -> T {
        self.weights[param]
    }

    #[inline]
    pub fn ns(&self) -> T {
        self.weights[NS]
    }

    pub fn as_array(&self) -> &[T; NUM_PARAMS] {
        &self.weights
    }

    pub fn sum(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, &w| acc + w)
    }

    #[inline]
    fn nudge(&mut self, param: usize, toward: u8, rate: T) {
        let w = &mut self.weights[param];
        if toward == 0 {
            *w = *w - rate * *w;
        } else {
            *w = *w + rate * (T::one() - *w);
        }
    }
}

impl<T: Real> Default for WeightVector<T> {
    fn default() -> Self {
        Self::init()
    }
}

/// Aggressive (`R`) and conservative (`r`) reward rates, `0 < r <= R < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearningRates<T> {
    aggressive: T,
    conservative: T,
}

impl<T: Real> LearningRates<T> {
    pub fn new(aggressive: T, conservative: T) -> Result<Self> {
        ensure!(
            conservative > T::zero() && conservative <= aggressive && aggressive < T::one(),
            Error::InvalidArgument(format!(
                "learning rates need 0 < r <= R < 1, got R={aggressive}, r={conservative}"
            ))
        );
        Ok(LearningRates {
            aggressive,
            conservative,
        })
    }

    /// Same rate for both branches.
    pub fn uniform(rate: T) -> Result<Self> {
        Self::new(rate, rate)
    }

    pub fn aggressive(&self) -> T {
        self.aggressive
    }

    pub fn conservative(&self) -> T {
        self.conservative
    }

    /// Both rates multiplied by `k`; fails if either leaves `(0, 1)`.
    pub fn scaled(&self, k: T) -> Result<Self> {
        Self::new(self.aggressive * k, self.conservative * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    Vl,
    Ssvl,
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vl" => Ok(LearnerKind::Vl),
            "ssvl" => Ok(LearnerKind::Ssvl),
            _ => Err(Error::InvalidArgument(format!("unknown learner {s:?}"))),
        }
    }
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LearnerKind::Vl => "vl",
            LearnerKind::Ssvl => "ssvl",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reward<T> {
    pub param: usize,
    pub toward: u8,
    pub rate: T,
}

/// Trace of one learner step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome<T> {
    pub parsed: bool,
    pub sampled_grammar: Grammar,
    /// One entry per parameter when `parsed`, otherwise empty.
    pub rewards: Vec<Reward<T>>,
}

/// Draws each parameter value independently, 1 with probability `w_i`.
pub fn sample_grammar<T: Real, R: Rng + ?Sized>(w: &WeightVector<T>, rng: &mut R) -> Grammar {
    let mut g = Grammar::default();
    for (i, &wi) in w.weights.iter().enumerate() {
        let u: f64 = rng.random();
        if T::lit(u) < wi {
            g = g.with_value(i, 1);
        }
    }
    g
}

/// Moves weight `param` toward `toward` by `rate`.
pub fn reward<T: Real>(
    w: &WeightVector<T>,
    param: usize,
    toward: u8,
    rate: T,
) -> Result<WeightVector<T>> {
    ensure!(
        param < NUM_PARAMS,
        Error::InvalidArgument(format!("parameter index {param} out of range"))
    );
    ensure!(
        toward <= 1,
        Error::InvalidArgument(format!("reward direction {toward} is not binary"))
    );
    ensure!(
        rate >= T::zero() && rate < T::one(),
        Error::InvalidArgument(format!("rate {rate} outside [0, 1)"))
    );
    let mut out = *w;
    out.nudge(param, toward, rate);
    Ok(out)
}

/// One step on an already-interned input. `None` stands for a sentence outside
/// the domain, which no grammar parses. Every reward applied is reported to
/// `sink`; the returned pair is (parsed, sampled grammar).
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn step_in_place<T, R, F>(
    kind: LearnerKind,
    w: &mut WeightVector<T>,
    domain: &Domain,
    input: Option<SentenceId>,
    rates: &LearningRates<T>,
    registry: &SupersetRegistry,
    rng: &mut R,
    mut sink: F,
) -> (bool, Grammar)
where
    T: Real,
    R: Rng + ?Sized,
    F: FnMut(Reward<T>),
{
    let current = sample_grammar(w, rng);
    let Some(id) = input else {
        return (false, current);
    };
    if !domain.licenses_id(current, id) {
        return (false, current);
    }
    let r = rates.conservative;
    for param in 0..NUM_PARAMS {
        let value = current.value(param);
        let superset = match kind {
            LearnerKind::Vl => None,
            LearnerKind::Ssvl => registry.superset_value(param),
        };
        let (toward, rate) = match superset {
            Some(sv) if sv == value => {
                let temp = current.flipped(param);
                if domain.licenses_id(temp, id) {
                    (1 - value, r)
                } else {
                    (value, rates.aggressive)
                }
            }
            _ => (value, r),
        };
        w.nudge(param, toward, rate);
        sink(Reward {
            param,
            toward,
            rate,
        });
    }
    (true, current)
}

fn traced_step<T: Real, R: Rng + ?Sized>(
    kind: LearnerKind,
    w: &WeightVector<T>,
    domain: &Domain,
    s: &Sentence,
    rates: &LearningRates<T>,
    registry: &SupersetRegistry,
    rng: &mut R,
) -> (WeightVector<T>, StepOutcome<T>) {
    let mut next = *w;
    let mut rewards = Vec::new();
    let (parsed, sampled_grammar) = step_in_place(
        kind,
        &mut next,
        domain,
        domain.id_of(s),
        rates,
        registry,
        rng,
        |r| rewards.push(r),
    );
    (
        next,
        StepOutcome {
            parsed,
            sampled_grammar,
            rewards,
        },
    )
}

/// Reward-only variational learner step; all rewards use the conservative rate.
pub fn vl_step<T: Real, R: Rng + ?Sized>(
    w: &WeightVector<T>,
    domain: &Domain,
    s: &Sentence,
    rates: &LearningRates<T>,
    rng: &mut R,
) -> (WeightVector<T>, StepOutcome<T>) {
    traced_step(
        LearnerKind::Vl,
        w,
        domain,
        s,
        rates,
        &SupersetRegistry::empty(),
        rng,
    )
}

/// Superset-subset learner step.
pub fn ssvl_step<T: Real, R: Rng + ?Sized>(
    w: &WeightVector<T>,
    domain: &Domain,
    s: &Sentence,
    rates: &LearningRates<T>,
    registry: &SupersetRegistry,
    rng: &mut R,
) -> (WeightVector<T>, StepOutcome<T>) {
    traced_step(LearnerKind::Ssvl, w, domain, s, rates, registry, rng)
}

/// Every weight within `threshold` of the target bit.
pub fn has_converged<T: Real>(w: &WeightVector<T>, target: Grammar, threshold: T) -> bool {
    (0..NUM_PARAMS).all(|i| param_converged(w, target, i, threshold))
}

/// Weight `param` within `threshold` of the target bit.
pub fn param_converged<T: Real>(
    w: &WeightVector<T>,
    target: Grammar,
    param: usize,
    threshold: T,
) -> bool {
    let t = T::from_u8(target.value(param)).expect("bit");
    (w.get(param) - t).abs() <= threshold
}
