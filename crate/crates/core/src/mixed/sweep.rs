//! Critical points over a grid of directions.

use serde::Serialize;

use super::{check_minimality, critical_point, Direction, FactorSystem, MixedError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t0: f64,
    pub x: Option<f64>,
    pub minimal: bool,
    pub margin: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// Largest `|x(mid) - (x(a) + x(b))/2| - |x(b) - x(a)|/2` over adjacent
    /// pairs; positive means the midpoint left the interval.
    pub midpoint_excess: f64,
    pub continuous: bool,
}

/// Direction with `t_0` given and the rest split in proportion to `n`.
fn direction_at(system: &FactorSystem, t0: f64) -> Result<Direction, MixedError> {
    let total: u64 = system.weights.iter().sum();
    let d = system.d();
    let t = system
        .weights
        .iter()
        .map(|&n| {
            let share = if total == 0 { 1.0 / d as f64 } else { n as f64 / total as f64 };
            (1.0 - t0) * share
        })
        .collect();
    Direction::new(t0, t)
}

/// `steps + 1` values of `t_0` evenly spaced in `[lo, hi]`. Each adjacent pair
/// is probed at its midpoint: the critical point there must fall between the
/// two neighbours.
pub fn sweep(system: &FactorSystem, lo: f64, hi: f64, steps: usize, samples: usize) -> Result<SweepReport, MixedError> {
    if !(0.0 < lo && lo < hi && hi < 1.0) || steps == 0 {
        return Err(MixedError::InvalidDirection(format!("t0 range [{lo}, {hi}] with {steps} steps")));
    }
    let solve = |t0: f64| -> Result<(f64, f64), MixedError> {
        let dir = direction_at(system, t0)?;
        let mut cp = critical_point(system, &dir, 1.0)?;
        let report = check_minimality(system, &mut cp, samples);
        Ok((cp.x, report.margin))
    };
    let grid: Vec<f64> = (0..=steps).map(|j| lo + (hi - lo) * j as f64 / steps as f64).collect();
    let points: Vec<SweepPoint> = grid
        .iter()
        .map(|&t0| match solve(t0) {
            Ok((x, margin)) => SweepPoint {
                t0,
                x: Some(x),
                minimal: margin > super::MIN_MARGIN,
                margin: Some(margin),
                error: None,
            },
            Err(e) => SweepPoint { t0, x: None, minimal: false, margin: None, error: Some(e.to_string()) },
        })
        .collect();

    let mut excess = f64::NEG_INFINITY;
    let mut continuous = true;
    for pair in points.windows(2) {
        let (Some(a), Some(b)) = (pair[0].x, pair[1].x) else {
            continuous = false;
            continue;
        };
        match solve(0.5 * (pair[0].t0 + pair[1].t0)) {
            Ok((mid, _)) => {
                let e = (mid - 0.5 * (a + b)).abs() - 0.5 * (b - a).abs();
                excess = excess.max(e);
            }
            Err(_) => continuous = false,
        }
    }
    continuous &= excess <= 1e-9;
    Ok(SweepReport { points, midpoint_excess: excess, continuous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed::{binomial_factor, exponential_factor};

    #[test]
    fn exponential_sweep_is_linear() {
        let (f, _) = exponential_factor(80, 1.0);
        let sys = FactorSystem::new(vec![f], vec![1], 1).unwrap();
        let report = sweep(&sys, 0.2, 0.8, 12, 256).unwrap();
        assert!(report.continuous);
        for p in &report.points {
            // x = t0 / t1
            assert!((p.x.unwrap() - p.t0 / (1.0 - p.t0)).abs() < 1e-9);
            assert!(p.minimal);
        }
    }

    #[test]
    fn binomial_sweep_hits_the_cone_edge() {
        let (f, _) = binomial_factor(10, 1);
        let sys = FactorSystem::new(vec![f], vec![1], 1).unwrap();
        // x/(1 + x) = t0/(1 - t0) has no solution once t0 >= 1/2
        let report = sweep(&sys, 0.2, 0.8, 6, 256).unwrap();
        assert!(!report.continuous);
        assert!(report.points.last().unwrap().error.is_some());
        assert!(report.points[0].x.is_some());
    }

    #[test]
    fn rejects_bad_range() {
        let (f, _) = binomial_factor(10, 1);
        let sys = FactorSystem::new(vec![f], vec![1], 1).unwrap();
        assert!(sweep(&sys, 0.8, 0.2, 4, 64).is_err());
    }
}
