//! Cohort-level statistics over finished trajectories.

use crate::error::{ensure, Error, Result};
use crate::num::Real;

use super::sim::Trajectory;

#[derive(Clone, Debug, PartialEq)]
pub struct Summary<T> {
    pub children: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    /// Children dropped before simulation because their growth fit failed.
    pub excluded: usize,
    /// Children whose run returned an error.
    pub failed: usize,
    pub peak_mean: T,
    pub peak_min: T,
    pub peak_max: T,
    pub final_ns_mean: T,
    /// Convergence indices of converged children: 25th, 50th and 75th
    /// percentiles (nearest rank).
    pub speed_quantiles: Option<[u64; 3]>,
    pub fastest: usize,
    pub median: usize,
    pub slowest: usize,
}

impl<T> Summary<T> {
    pub fn is_partial(&self) -> bool {
        self.excluded > 0 || self.failed > 0
    }
}

fn nearest_rank(sorted: &[u64], q: f64) -> u64 {
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Children are ranked by convergence index, non-converged last, ties by id.
/// The median is the lower median of that ranking.
pub fn summarize<T: Real>(
    trajectories: &[&Trajectory<T>],
    excluded: usize,
    failed: usize,
) -> Result<Summary<T>> {
    ensure!(
        !trajectories.is_empty(),
        Error::InvalidArgument("no trajectories to summarize".into())
    );
    let n = trajectories.len();
    let mut ranked: Vec<&Trajectory<T>> = trajectories.to_vec();
    ranked.sort_by_key(|t| (t.convergence_u.is_none(), t.convergence_u, t.child_id));

    let mut speeds: Vec<u64> = trajectories
        .iter()
        .filter_map(|t| t.convergence_u)
        .collect();
    speeds.sort_unstable();
    let converged = speeds.len();
    let speed_quantiles =
        (!speeds.is_empty()).then(|| [0.25, 0.5, 0.75].map(|q| nearest_rank(&speeds, q)));

    let count = T::from_usize(n).expect("count fits the scalar");
    let peaks = trajectories.iter().map(|t| t.peak_ns);
    Ok(Summary {
        children: n,
        converged,
        convergence_rate: converged as f64 / n as f64,
        excluded,
        failed,
        peak_mean: peaks.clone().fold(T::zero(), |a, b| a + b) / count,
        peak_min: peaks.clone().fold(T::infinity(), T::min),
        peak_max: peaks.fold(T::neg_infinity(), T::max),
        final_ns_mean: trajectories.iter().fold(T::zero(), |a, t| a + t.final_ns()) / count,
        speed_quantiles,
        fastest: ranked[0].child_id,
        median: ranked[(n - 1) / 2].child_id,
        slowest: ranked[n - 1].child_id,
    })
}
