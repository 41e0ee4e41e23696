//! Confidence budget and per-midpoint radius allocation.
//!
//! A total failure probability `delta_total` is split into a Lipschitz
//! share (assumed, recorded) and a pointwise share (enforced). The
//! pointwise budget is distributed over the band midpoints by a union
//! bound, which stays valid for correlated process values, and each
//! midpoint's mass becomes a two-sided normal sigma-multiplier.

use crate::special::normal_quantile;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfidenceError {
    #[error("delta_total must lie in (0,1), got {0}")]
    BadDelta(f64),
    #[error("shares ({0}, {1}) must lie in (0,1) and multiply to 1 - delta_total")]
    BadShares(f64, f64),
    #[error("no midpoints to allocate over")]
    NoMidpoints,
    #[error("weight at midpoint {index} must be positive and finite, got {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("failure mass {delta} >= 1 at midpoint {index}; weights too skewed")]
    DeltaTooLarge { index: usize, delta: f64 },
}

/// How the total failure probability splits between the Lipschitz
/// assumption and the pointwise bands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBudget {
    pub delta_total: f64,
    pub lipschitz_share: f64,
    pub pointwise_share: f64,
}

impl ConfidenceBudget {
    /// Default split: both shares `sqrt(1 - delta_total)`.
    pub fn split_evenly(delta_total: f64) -> Result<Self, ConfidenceError> {
        if !(delta_total > 0.0 && delta_total < 1.0) {
            return Err(ConfidenceError::BadDelta(delta_total));
        }
        let s = (1.0 - delta_total).sqrt();
        Ok(ConfidenceBudget {
            delta_total,
            lipschitz_share: s,
            pointwise_share: s,
        })
    }

    /// Custom split; the shares must multiply back to `1 - delta_total`.
    pub fn with_shares(
        delta_total: f64,
        lipschitz_share: f64,
        pointwise_share: f64,
    ) -> Result<Self, ConfidenceError> {
        if !(delta_total > 0.0 && delta_total < 1.0) {
            return Err(ConfidenceError::BadDelta(delta_total));
        }
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(lipschitz_share)
            || !in_unit(pointwise_share)
            || (lipschitz_share * pointwise_share - (1.0 - delta_total)).abs() > 1e-12
        {
            return Err(ConfidenceError::BadShares(lipschitz_share, pointwise_share));
        }
        Ok(ConfidenceBudget {
            delta_total,
            lipschitz_share,
            pointwise_share,
        })
    }
}

/// The user-supplied Lipschitz bound together with the confidence it is
/// assumed to hold at. Recorded verbatim in reports; never estimated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzAssumption {
    pub l: f64,
    pub assumed_confidence: f64,
}

impl LipschitzAssumption {
    pub fn new(l: f64, assumed_confidence: f64) -> Self {
        assert!(l > 0.0, "Lipschitz bound must be positive");
        LipschitzAssumption {
            l,
            assumed_confidence,
        }
    }
}

/// Relative weights for distributing failure mass over midpoints. A higher
/// weight spends more of the budget at that midpoint, giving a narrower
/// band there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weights {
    Uniform,
    /// Last matching region wins; midpoints outside every region get
    /// weight 1.
    Regions(Vec<RegionWeight>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionWeight {
    pub interval: (f64, f64),
    pub weight: f64,
}

/// Per-midpoint failure masses and sigma-multipliers.
#[derive(Clone, Debug)]
pub struct RadiusAssignment {
    deltas: Vec<f64>,
    z: Vec<f64>,
}

impl RadiusAssignment {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Failure mass spent at midpoint `i`.
    pub fn delta(&self, i: usize) -> f64 {
        self.deltas[i]
    }

    /// Sigma-multiplier at midpoint `i`: the band is `mu +- z * sigma`.
    pub fn z(&self, i: usize) -> f64 {
        self.z[i]
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z
    }

    /// Uniform scaling of every multiplier (coverage experiments).
    pub fn scaled(&self, factor: f64) -> RadiusAssignment {
        RadiusAssignment {
            deltas: self.deltas.clone(),
            z: self.z.iter().map(|z| z * factor).collect(),
        }
    }
}

/// Splits the pointwise failure budget `1 - pointwise_share` over the
/// midpoints proportionally to the weights and converts each mass to a
/// two-sided normal multiplier `z = Phi^{-1}(1 - delta_v / 2)`.
///
/// The union bound `sum delta_v = 1 - pointwise_share` guarantees joint
/// coverage at least `pointwise_share` regardless of correlations.
pub fn allocate(
    budget: &ConfidenceBudget,
    midpoints: &[f64],
    weights: &Weights,
) -> Result<RadiusAssignment, ConfidenceError> {
    if midpoints.is_empty() {
        return Err(ConfidenceError::NoMidpoints);
    }
    let w: Vec<f64> = match weights {
        Weights::Uniform => vec![1.0; midpoints.len()],
        Weights::Regions(regions) => midpoints
            .iter()
            .map(|&m| {
                let mut wv = 1.0;
                for r in regions {
                    if m >= r.interval.0 && m <= r.interval.1 {
                        wv = r.weight;
                    }
                }
                wv
            })
            .collect(),
    };
    for (i, &wv) in w.iter().enumerate() {
        if !(wv > 0.0 && wv.is_finite()) {
            return Err(ConfidenceError::BadWeight {
                index: i,
                weight: wv,
            });
        }
    }
    let total_weight: f64 = w.iter().sum();
    let budget_mass = 1.0 - budget.pointwise_share;
    let mut deltas = Vec::with_capacity(w.len());
    let mut z = Vec::with_capacity(w.len());
    for (i, &wv) in w.iter().enumerate() {
        let d = wv / total_weight * budget_mass;
        if d >= 1.0 {
            return Err(ConfidenceError::DeltaTooLarge { index: i, delta: d });
        }
        deltas.push(d);
        z.push(normal_quantile(1.0 - d / 2.0));
    }
    Ok(RadiusAssignment { deltas, z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{normal_cdf, normal_quantile};

    fn budget_95() -> ConfidenceBudget {
        ConfidenceBudget::split_evenly(0.05).unwrap()
    }

    #[test]
    fn even_split_product() {
        let b = budget_95();
        assert!((b.lipschitz_share * b.pointwise_share - 0.95).abs() < 1e-15);
    }

    #[test]
    fn share_validation() {
        assert!(ConfidenceBudget::with_shares(0.05, 0.96, 0.95 / 0.96).is_ok());
        assert!(ConfidenceBudget::with_shares(0.05, 0.9, 0.9).is_err());
        assert!(ConfidenceBudget::split_evenly(0.0).is_err());
        assert!(ConfidenceBudget::split_evenly(1.0).is_err());
    }

    #[test]
    fn uniform_256_midpoints() {
        let b = budget_95();
        let midpoints: Vec<f64> = (0..256).map(|i| i as f64 / 256.0).collect();
        let r = allocate(&b, &midpoints, &Weights::Uniform).unwrap();
        // (1 - sqrt(0.95)) / 256, z from a bisection oracle on the CDF
        let expect_delta = (1.0 - 0.95f64.sqrt()) / 256.0;
        assert!((r.delta(0) - expect_delta).abs() < 1e-12);
        assert!((expect_delta - 9.891e-5).abs() < 1e-7);

        let target = 1.0 - r.delta(0) / 2.0;
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if normal_cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z_oracle = 0.5 * (lo + hi);
        assert!((r.z(0) - z_oracle).abs() < 1e-9);
        assert!((r.z(0) - 3.8932540910).abs() < 1e-6);
    }

    #[test]
    fn single_midpoint() {
        let b = ConfidenceBudget {
            delta_total: 0.05,
            lipschitz_share: 0.95f64.sqrt(),
            pointwise_share: 0.95,
        };
        let r = allocate(&b, &[0.5], &Weights::Uniform).unwrap();
        assert!((r.delta(0) - 0.05).abs() < 1e-15);
        assert!((r.z(0) - 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn weight_scale_invariance() {
        let b = budget_95();
        let midpoints = [0.1, 0.5, 0.9];
        let w1 = Weights::Regions(vec![RegionWeight {
            interval: (0.4, 0.6),
            weight: 3.0,
        }]);
        let w2 = Weights::Regions(vec![
            RegionWeight {
                interval: (-1.0, 2.0),
                weight: 2.0,
            },
            RegionWeight {
                interval: (0.4, 0.6),
                weight: 6.0,
            },
        ]);
        let a = allocate(&b, &midpoints, &w1).unwrap();
        let c = allocate(&b, &midpoints, &w2).unwrap();
        for i in 0..3 {
            assert!((a.delta(i) - c.delta(i)).abs() < 1e-15);
            assert_eq!(a.z(i), c.z(i));
        }
    }

    #[test]
    fn union_bound_never_looser_than_root_rule() {
        // d/n <= 1 - (1-d)^{1/n} (Bernoulli), so the union bound spends at
        // most the root rule's mass per point and its multiplier is at
        // least as large: never less conservative.
        let d = 1.0 - 0.95f64.sqrt();
        let mut n = 1usize;
        while n <= 1 << 15 {
            let root_rule = 1.0 - (1.0 - d).powf(1.0 / n as f64);
            let union = d / n as f64;
            assert!(union <= root_rule * (1.0 + 1e-12), "n={n}");
            n *= 2;
        }
    }

    #[test]
    fn budget_sums_and_monotonicity() {
        let b = budget_95();
        let midpoints: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let w = Weights::Regions(vec![RegionWeight {
            interval: (0.0, 0.3),
            weight: 5.0,
        }]);
        let r = allocate(&b, &midpoints, &w).unwrap();
        let total: f64 = (0..r.len()).map(|i| r.delta(i)).sum();
        assert!(total <= 1.0 - b.pointwise_share + 1e-12);
        for i in 0..r.len() {
            for j in 0..r.len() {
                if r.delta(i) < r.delta(j) {
                    assert!(r.z(i) > r.z(j));
                }
            }
        }
    }

    #[test]
    fn z_matches_quantile_contract() {
        let b = budget_95();
        let midpoints = [0.2, 0.8];
        let r = allocate(&b, &midpoints, &Weights::Uniform).unwrap();
        for i in 0..2 {
            assert_eq!(r.z(i), normal_quantile(1.0 - r.delta(i) / 2.0));
        }
    }
}
