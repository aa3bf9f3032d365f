//! Simulation of null-subject acquisition with variational learners over a
//! 13-parameter syntactic domain, where misheard imperatives feed the learner
//! subjectless declaratives.
//!
//! The numeric core is generic over [`num::Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod calendar;
pub mod domain;
pub mod environment;
pub mod error;
pub mod iarc;
pub mod learner;
pub mod num;
pub mod population;
pub mod runner;
pub mod seed;

pub use error::{Error, Result};

pub type Calendar = calendar::Calendar<f64>;
pub type AgeRange = calendar::AgeRange<f64>;
pub type GrowthParams = iarc::GrowthParams<f64>;
pub type WeightVector = learner::WeightVector<f64>;
pub type LearningRates = learner::LearningRates<f64>;
pub type GroupSpec = population::GroupSpec<f64>;
pub type EChildProfile = population::EChildProfile<f64>;
pub type Cohort = population::Cohort<f64>;
pub type Emission = environment::Emission<f64>;
pub type IarcSource = environment::IarcSource<f64>;
pub type ExperimentConfig = runner::ExperimentConfig<f64>;
pub type Trajectory = runner::Trajectory<f64>;
pub type Summary = runner::Summary<f64>;
