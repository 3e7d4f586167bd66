//! Simplified comparison strategies.
//!
//! These are stand-ins that share the node pipeline with DRR-MDPF and differ only in how a face
//! is chosen and how feedback is kept. They are labelled `*-like` wherever they are reported and
//! are not reimplementations of the published algorithms.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Multiplicative decay applied to a face's success weight on timeout.
pub const SUCCESS_DECAY: f64 = 0.9;
/// Step towards 1 taken by a face's success weight on Data.
pub const SUCCESS_RECOVERY: f64 = 0.1;
const MIN_SUCCESS_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineKind {
    /// Lowest smoothed RTT; the first FIB candidate until any RTT is known.
    BestRoute,
    /// Uniform draw over the candidates. Also the stand-in for SMDPF.
    UniformRandom,
    /// Candidate with the fewest forwards so far (RFA-like).
    UniformMultipathRank,
    /// Sample proportional to per-face success weights (SAF-like; stand-in for LA-MDPF).
    StochasticAdaptive,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [
        BaselineKind::BestRoute,
        BaselineKind::UniformRandom,
        BaselineKind::UniformMultipathRank,
        BaselineKind::StochasticAdaptive,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BaselineKind::BestRoute => "best-route",
            BaselineKind::UniformRandom => "uniform-random",
            BaselineKind::UniformMultipathRank => "rfa-like",
            BaselineKind::StochasticAdaptive => "saf-like",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "best-route" => BaselineKind::BestRoute,
            "uniform-random" | "smdpf-like" => BaselineKind::UniformRandom,
            "rfa-like" | "uniform-multipath-rank" => BaselineKind::UniformMultipathRank,
            "saf-like" | "la-mdpf-like" | "stochastic-adaptive" => BaselineKind::StochasticAdaptive,
            other => return Err(Error::usage(format!("unknown baseline strategy {other:?}"))),
        })
    }
}

/// Per-face history a node keeps for the baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceStats {
    forwards: Vec<u64>,
    rtt: Vec<Option<f64>>,
    success_weight: Vec<f64>,
}

impl FaceStats {
    pub fn new(faces: usize) -> Self {
        Self {
            forwards: vec![0; faces],
            rtt: vec![None; faces],
            success_weight: vec![1.0; faces],
        }
    }

    pub fn faces(&self) -> usize {
        self.forwards.len()
    }

    pub fn forwards(&self, face: usize) -> u64 {
        self.forwards[face]
    }

    pub fn rtt(&self, face: usize) -> Option<f64> {
        self.rtt[face]
    }

    pub fn success_weight(&self, face: usize) -> f64 {
        self.success_weight[face]
    }

    pub fn set_forwards(&mut self, face: usize, count: u64) {
        self.forwards[face] = count;
    }

    pub fn on_forward(&mut self, face: usize) {
        self.forwards[face] += 1;
    }

    pub fn on_success(&mut self, face: usize, rtt: f64) {
        let alpha = crate::strategy::RTT_ALPHA;
        self.rtt[face] = Some(match self.rtt[face] {
            None => rtt,
            Some(d) => (1.0 - alpha) * d + alpha * rtt,
        });
        let w = &mut self.success_weight[face];
        *w += SUCCESS_RECOVERY * (1.0 - *w);
    }

    pub fn on_timeout(&mut self, face: usize) {
        let w = &mut self.success_weight[face];
        *w = (*w * SUCCESS_DECAY).max(MIN_SUCCESS_WEIGHT);
    }
}

/// Picks one of `candidates` (listed in FIB preference order).
pub fn baseline_select<R: Rng + ?Sized>(
    kind: BaselineKind,
    candidates: &[usize],
    stats: &FaceStats,
    rng: &mut R,
) -> Result<usize> {
    let (&first, _) = candidates
        .split_first()
        .ok_or_else(|| Error::usage("no candidate faces"))?;
    if let Some(&bad) = candidates.iter().find(|&&c| c >= stats.faces()) {
        return Err(Error::usage(format!("face {bad} out of range")));
    }
    let face = match kind {
        BaselineKind::BestRoute => candidates
            .iter()
            .filter_map(|&c| stats.rtt(c).map(|r| (c, r)))
            .fold(None, |best: Option<(usize, f64)>, (c, r)| match best {
                Some((_, b)) if r >= b => best,
                _ => Some((c, r)),
            })
            .map_or(first, |(c, _)| c),
        BaselineKind::UniformRandom => candidates[rng.random_range(0..candidates.len())],
        BaselineKind::UniformMultipathRank => {
            let mut best = first;
            for &c in &candidates[1..] {
                if stats.forwards(c) < stats.forwards(best)
                    || (stats.forwards(c) == stats.forwards(best) && c < best)
                {
                    best = c;
                }
            }
            best
        }
        BaselineKind::StochasticAdaptive => {
            let weights: Vec<f64> = candidates.iter().map(|&c| stats.success_weight(c)).collect();
            let pv = crate::prob::normalize(&weights)?;
            candidates[pv.sample_index(rng)]
        }
    };
    Ok(face)
}
