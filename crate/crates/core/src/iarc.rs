//! Illocution ambiguity resolution coefficient (IARC): the probability that a
//! subjectless imperative is understood as an imperative, as a bounded
//! function of cumulative utterances heard.

use crate::calendar::Calendar;
use crate::error::{ensure, Error, Result};
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrowthKind {
    Linear,
    Logistic,
}

impl std::str::FromStr for GrowthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(GrowthKind::Linear),
            "logistic" => Ok(GrowthKind::Logistic),
            _ => Err(Error::InvalidArgument(format!("unknown growth kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GrowthKind::Linear => "linear",
            GrowthKind::Logistic => "logistic",
        })
    }
}

/// `m` is the slope (linear) or growth rate (logistic) per utterance; `c` is
/// the intercept (linear) or the midpoint in utterances (logistic).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthParams<T> {
    pub kind: GrowthKind,
    pub m: T,
    pub c: T,
}

impl<T: Real> GrowthParams<T> {
    pub fn linear(m: T, c: T) -> Self {
        GrowthParams {
            kind: GrowthKind::Linear,
            m,
            c,
        }
    }

    pub fn logistic(m: T, c: T) -> Self {
        GrowthParams {
            kind: GrowthKind::Logistic,
            m,
            c,
        }
    }

    /// IARC after `u` utterances.
    pub fn evaluate(&self, u: T) -> Result<T> {
        match self.kind {
            GrowthKind::Linear => iarc_linear(u, self),
            GrowthKind::Logistic => iarc_logistic(u, self),
        }
    }
}

/// Clamped line: 0 up to `-c/m`, `m*u + c` in between, 1 from `(1-c)/m`.
pub fn iarc_linear<T: Real>(u: T, p: &GrowthParams<T>) -> Result<T> {
    ensure!(
        p.kind == GrowthKind::Linear,
        Error::InvalidArgument("iarc_linear needs linear parameters".into())
    );
    ensure!(
        p.m != T::zero() && p.m.is_finite(),
        Error::InvalidArgument(format!(
            "linear slope must be finite and non-zero, got {}",
            p.m
        ))
    );
    if p.m > T::zero() {
        if u <= -p.c / p.m {
            return Ok(T::zero());
        }
        if u >= (T::one() - p.c) / p.m {
            return Ok(T::one());
        }
    }
    Ok((p.m * u + p.c).max(T::zero()).min(T::one()))
}

/// `1 / (1 + exp(-m (u - c)))`, evaluated without overflow for large `|m (u - c)|`.
pub fn iarc_logistic<T: Real>(u: T, p: &GrowthParams<T>) -> Result<T> {
    ensure!(
        p.kind == GrowthKind::Logistic,
        Error::InvalidArgument("iarc_logistic needs logistic parameters".into())
    );
    Ok(sigmoid(p.m * (u - p.c)))
}

#[inline]
fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Least-squares growth parameters through three (age in years, IARC)
/// observations. Ages are mapped to cumulative utterances first; the fit is
/// in IARC space.
pub fn fit_growth<T: Real>(
    points: &[(T, T); 3],
    kind: GrowthKind,
    calendar: &Calendar<T>,
) -> Result<GrowthParams<T>> {
    for &(age, iarc) in points {
        ensure!(
            iarc >= T::zero() && iarc <= T::one(),
            Error::Fit(format!("IARC observation {iarc} outside [0, 1]"))
        );
        ensure!(
            age.is_finite(),
            Error::Fit(format!("age {age} is not finite"))
        );
    }
    let mut sorted = *points;
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite ages"));
    ensure!(
        sorted[0].0 < sorted[1].0 && sorted[1].0 < sorted[2].0,
        Error::Fit("observation ages must be distinct".into())
    );
    let mut xs = [0.0f64; 3];
    let mut ys = [0.0f64; 3];
    for (i, &(age, iarc)) in sorted.iter().enumerate() {
        xs[i] = calendar.cumulative_utterances(age)? as f64;
        ys[i] = iarc.as_f64();
    }
    let (m, c) = match kind {
        GrowthKind::Linear => fit_line(&xs, &ys)?,
        GrowthKind::Logistic => fit_logistic(&xs, &ys)?,
    };
    Ok(GrowthParams {
        kind,
        m: T::lit(m),
        c: T::lit(c),
    })
}

fn fit_line(xs: &[f64; 3], ys: &[f64; 3]) -> Result<(f64, f64)> {
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - xm) * (y - ym);
        sxx += (x - xm) * (x - xm);
    }
    ensure!(
        sxx > 0.0,
        Error::Fit("observations map to the same utterance count".into())
    );
    let m = sxy / sxx;
    ensure!(
        m != 0.0,
        Error::Fit("flat IARC observations give a zero slope".into())
    );
    Ok((m, ym - m * xm))
}

/// Sum of squared residuals and its Gauss-Newton pieces for `y = s(a (x - b))`
/// in standardized coordinates.
struct LogisticProblem {
    x: [f64; 3],
    y: [f64; 3],
}

impl LogisticProblem {
    fn sse(&self, a: f64, b: f64) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(&x, &y)| {
                let r = sigmoid(a * (x - b)) - y;
                r * r
            })
            .sum()
    }

    /// Returns (J^T J, J^T r).
    fn normal_equations(&self, a: f64, b: f64) -> ([[f64; 2]; 2], [f64; 2]) {
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for (&x, &y) in self.x.iter().zip(&self.y) {
            let s = sigmoid(a * (x - b));
            let ds = s * (1.0 - s);
            let j = [ds * (x - b), -ds * a];
            let r = s - y;
            for i in 0..2 {
                jtr[i] += j[i] * r;
                for k in 0..2 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        (jtj, jtr)
    }

    /// Damped Gauss-Newton (Levenberg-Marquardt) from `(a, b)`.
    fn solve(&self, mut a: f64, mut b: f64) -> Option<(f64, f64, f64)> {
        const TOL: f64 = 1e-9;
        let mut lambda = 1e-3;
        let mut sse = self.sse(a, b);
        for _ in 0..500 {
            let (jtj, jtr) = self.normal_equations(a, b);
            let grad = jtr[0].abs().max(jtr[1].abs());
            if grad < 1e-15 {
                break;
            }
            let mut accepted = false;
            while lambda < 1e12 {
                let m00 = jtj[0][0] * (1.0 + lambda);
                let m11 = jtj[1][1] * (1.0 + lambda);
                let m01 = jtj[0][1];
                let det = m00 * m11 - m01 * m01;
                if det.abs() < 1e-300 {
                    lambda *= 10.0;
                    continue;
                }
                let da = -(m11 * jtr[0] - m01 * jtr[1]) / det;
                let db = -(m00 * jtr[1] - m01 * jtr[0]) / det;
                let (na, nb) = (a + da, b + db);
                let nsse = self.sse(na, nb);
                if nsse.is_finite() && nsse <= sse {
                    a = na;
                    b = nb;
                    let small =
                        da.abs() <= TOL * (1.0 + a.abs()) && db.abs() <= TOL * (1.0 + b.abs());
                    sse = nsse;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if small {
                        return Some((a, b, sse));
                    }
                    break;
                }
                lambda *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        (a.is_finite() && b.is_finite()).then_some((a, b, sse))
    }
}

fn fit_logistic(xs: &[f64; 3], ys: &[f64; 3]) -> Result<(f64, f64)> {
    ensure!(
        !(ys[0] == ys[1] && ys[1] == ys[2]),
        Error::Fit("logistic growth is unidentifiable from equal IARC values".into())
    );
    // standardize utterance counts around the middle observation
    let center = xs[1];
    let scale = (xs[2] - xs[0]) / 2.0;
    let problem = LogisticProblem {
        x: xs.map(|x| (x - center) / scale),
        y: *ys,
    };
    let secant = (ys[2] - ys[0]) / (problem.x[2] - problem.x[0]);
    let mut best = problem.solve(4.0 * secant, 0.0);

    // fallback: coarse grid over slope and midpoint, refined from the best cell
    let needs_fallback = best.is_none_or(|(a, b, _)| a.abs() > 1e6 || b.abs() > 1e6);
    if needs_fallback {
        let mut grid_best = (f64::INFINITY, 0.0, 0.0);
        for i in -40..=40 {
            let a = i as f64 * 0.5;
            for j in -40..=40 {
                let b = j as f64 * 0.25;
                let sse = problem.sse(a, b);
                if sse < grid_best.0 {
                    grid_best = (sse, a, b);
                }
            }
        }
        let refined = problem.solve(grid_best.1, grid_best.2);
        best = match (best, refined) {
            (Some(x), Some(y)) => Some(if y.2 < x.2 { y } else { x }),
            (x, y) => x.or(y),
        };
    }
    let (a, b, _) = best.ok_or_else(|| Error::Fit("logistic fit did not converge".into()))?;
    ensure!(
        a.abs() <= 1e6 && b.abs() <= 1e6,
        Error::Fit("logistic fit diverged".into())
    );
    Ok((a / scale, center + b * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_clamps() {
        let p = GrowthParams::linear(1e-7f64, 0.1);
        assert_eq!(iarc_linear(-0.1 / 1e-7, &p).unwrap(), 0.0);
        assert_eq!(iarc_linear((1.0 - 0.1) / 1e-7, &p).unwrap(), 1.0);
        assert!((iarc_linear(4e6, &p).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            iarc_linear(0.0, &GrowthParams::linear(1e-7, -0.3)).unwrap(),
            0.0
        );
        assert_eq!(iarc_linear(2e7, &p).unwrap(), 1.0);
    }

    #[test]
    fn linear_rejects_zero_slope() {
        assert!(iarc_linear(1.0, &GrowthParams::linear(0.0, 0.5)).is_err());
        assert!(iarc_linear(1.0, &GrowthParams::logistic(1.0, 0.5)).is_err());
    }

    #[test]
    fn logistic_values() {
        let p = GrowthParams::logistic(1e-6, 5e6);
        assert_eq!(iarc_logistic(5e6, &p).unwrap(), 0.5);
        let expected = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((iarc_logistic(6e6, &p).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.7311).abs() < 1e-4);
        let steep = GrowthParams::logistic(1.0f64, 0.0);
        let hi = iarc_logistic(40.0, &steep).unwrap();
        assert!((1.0 - hi).abs() < 1e-15);
        let far = iarc_logistic(1e6, &steep).unwrap();
        assert_eq!(far, 1.0);
        let low = iarc_logistic(-1e6, &steep).unwrap();
        assert!(low >= 0.0 && low.is_finite());
        assert!(iarc_logistic(1.0, &GrowthParams::linear(1.0, 0.0)).is_err());
    }

    #[test]
    fn collinear_points_fit_exactly() {
        let cal = Calendar::<f64>::standard();
        let ages = [2.6, 3.3, 3.9];
        let (m0, c0) = (1.5e-7, -0.5);
        let pts: [(f64, f64); 3] = ages.map(|a| {
            let u = cal.cumulative_utterances(a).unwrap() as f64;
            (a, m0 * u + c0)
        });
        let p = fit_growth(&pts, GrowthKind::Linear, &cal).unwrap();
        assert!((p.m - m0).abs() / m0 < 1e-9);
        assert!((p.c - c0).abs() < 1e-9);
    }

    #[test]
    fn logistic_round_trip() {
        let cal = Calendar::<f64>::standard();
        let (m0, c0) = (8e-7, 6.2e6);
        let ages = [2.7, 3.3, 3.9];
        let pts: [(f64, f64); 3] = ages.map(|a| {
            let u = cal.cumulative_utterances(a).unwrap() as f64;
            (a, sigmoid(m0 * (u - c0)))
        });
        let p = fit_growth(&pts, GrowthKind::Logistic, &cal).unwrap();
        assert!((p.m - m0).abs() / m0 < 1e-6, "m={}", p.m);
        assert!((p.c - c0).abs() / c0 < 1e-6, "c={}", p.c);
    }

    #[test]
    fn group_means_linear_fit() {
        let cal = Calendar::<f64>::standard();
        let pts = [(2.73, 0.4), (3.3, 0.64), (3.82, 0.9)];
        let p = fit_growth(&pts, GrowthKind::Linear, &cal).unwrap();
        assert!(p.m > 0.0);
        let rss: f64 = pts
            .iter()
            .map(|&(a, y)| {
                let u = cal.cumulative_utterances(a).unwrap() as f64;
                (p.m * u + p.c - y).powi(2)
            })
            .sum();
        assert!(rss.sqrt() < 0.05, "residual {}", rss.sqrt());
    }

    #[test]
    fn fit_errors() {
        let cal = Calendar::<f64>::standard();
        let dup = [(3.0, 0.4), (3.0, 0.5), (3.5, 0.9)];
        assert!(matches!(
            fit_growth(&dup, GrowthKind::Linear, &cal),
            Err(Error::Fit(_))
        ));
        let flat = [(2.7, 0.5), (3.3, 0.5), (3.8, 0.5)];
        assert!(matches!(
            fit_growth(&flat, GrowthKind::Logistic, &cal),
            Err(Error::Fit(_))
        ));
        let bad = [(2.7, 1.5), (3.3, 0.5), (3.8, 0.5)];
        assert!(fit_growth(&bad, GrowthKind::Linear, &cal).is_err());
    }

    #[test]
    fn fit_ignores_point_order() {
        let cal = Calendar::<f64>::standard();
        let pts = [(2.73, 0.4), (3.3, 0.64), (3.82, 0.9)];
        let shuffled = [pts[2], pts[0], pts[1]];
        for kind in [GrowthKind::Linear, GrowthKind::Logistic] {
            assert_eq!(
                fit_growth(&pts, kind, &cal).unwrap(),
                fit_growth(&shuffled, kind, &cal).unwrap()
            );
        }
    }
}
