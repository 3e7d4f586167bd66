//! DRR-MDPF interface selection.
//!
//! Per content class the table keeps a probability vector over faces together with the
//! observations that form each face's state: pending (unsatisfied) Interests and a smoothed
//! delay. Available bandwidth is supplied by the caller at decision time.
//!
//! Two update rules act on the probabilities:
//!
//! * at Interest time, [`StrategyTable::select_interface`] computes rewards and the
//!   reward-weighted probabilities `wpro`, then blends `p ← (1 − λ)·p + λ·wpro`;
//! * at Data time, [`StrategyTable::positive_feedback`] applies the linear reward-inaction
//!   update with rate `λ_r`. Timeouts leave the probabilities untouched.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::packet::ClassId;
use crate::prob::{normalize, ProbabilityVector};
use crate::scalar::Scalar;

/// Raw observation for one face and one content class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InterfaceState<T: Scalar> {
    /// Available bandwidth, bits per second.
    pub bandwidth_avail: T,
    /// Interests of this class forwarded on the face whose PIT entries are still live.
    pub unsatisfied: T,
    /// Smoothed round-trip time, seconds. Zero before the first sample.
    pub delay: T,
}

/// Column-normalized face observations. Each column sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedState<T: Scalar> {
    pub beta: Vec<T>,
    pub theta: Vec<T>,
    pub delta: Vec<T>,
}

impl<T: Scalar> NormalizedState<T> {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

pub fn normalized_state<T: Scalar>(raw: &[InterfaceState<T>]) -> Result<NormalizedState<T>> {
    if raw.is_empty() {
        return Err(Error::usage("normalized state needs at least one face"));
    }
    let column = |f: fn(&InterfaceState<T>) -> T| -> Result<Vec<T>> {
        let values: Vec<T> = raw.iter().map(f).collect();
        Ok(normalize(&values)?.into_vec())
    };
    Ok(NormalizedState {
        beta: column(|s| s.bandwidth_avail)?,
        theta: column(|s| s.unsatisfied)?,
        delta: column(|s| s.delay)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewardMode {
    /// `R_l = δ_l + β_l · θ_l`.
    #[default]
    AsWritten,
    /// `R_l ∝ β_l + (1 − δ_l) + (1 − θ_l)`: favours spare bandwidth, low delay and few
    /// pending Interests. Rescaled onto the simplex.
    Qualitative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// Highest probability wins; ties go to the earliest candidate.
    #[default]
    Argmax,
    Sample,
}

pub fn interface_rewards<T: Scalar>(norm: &NormalizedState<T>, mode: RewardMode) -> Vec<T> {
    let faces = norm.beta.iter().zip(&norm.theta).zip(&norm.delta);
    match mode {
        RewardMode::AsWritten => faces.map(|((&b, &t), &d)| d + b * t).collect(),
        RewardMode::Qualitative => {
            let raw: Vec<T> = faces
                .map(|((&b, &t), &d)| b + (T::one() - d) + (T::one() - t))
                .map(|r| r.max(T::zero()))
                .collect();
            normalize(&raw).expect("rewards are finite and non-negative").into_vec()
        }
    }
}

/// `wpro_l = R_l·p_l / Σ_j R_j·p_j`; uniform when every product is zero.
pub fn weighted_probabilities<T: Scalar>(
    rewards: &[T],
    probs: &ProbabilityVector<T>,
) -> Result<ProbabilityVector<T>> {
    if rewards.len() != probs.len() {
        return Err(Error::usage(format!(
            "{} rewards for {} probabilities",
            rewards.len(),
            probs.len()
        )));
    }
    let products: Vec<T> = rewards.iter().zip(probs.iter()).map(|(&r, &p)| r * p).collect();
    normalize(&products)
}

/// Linear reward-inaction step towards `winner`: every other entry shrinks by `lambda_r` and the
/// winner absorbs the freed mass.
pub fn reward_inaction_update<T: Scalar>(
    probs: &mut ProbabilityVector<T>,
    winner: usize,
    lambda_r: T,
) -> Result<()> {
    if winner >= probs.len() {
        return Err(Error::usage(format!("face {winner} out of range")));
    }
    let entries = probs.entries_mut();
    let mut others = T::zero();
    for (j, p) in entries.iter_mut().enumerate() {
        if j != winner {
            *p = lambda_r * *p;
            others = others + *p;
        }
    }
    entries[winner] = (T::one() - others).max(T::zero()).min(T::one());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyParams<T: Scalar> {
    /// Reward-inaction learning rate, `0 < λ_r < 1`.
    pub lambda_r: T,
    /// Interest-time smoothing rate, `0 ≤ λ ≤ 1`. Zero disables smoothing.
    pub lambda_smooth: T,
    pub reward_mode: RewardMode,
    pub selection_mode: SelectionMode,
}

impl<T: Scalar> Default for StrategyParams<T> {
    fn default() -> Self {
        Self {
            lambda_r: T::lit(0.9),
            lambda_smooth: T::lit(0.1),
            reward_mode: RewardMode::AsWritten,
            selection_mode: SelectionMode::Argmax,
        }
    }
}

impl<T: Scalar> StrategyParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_r > T::zero() && self.lambda_r < T::one()) {
            return Err(Error::usage(format!("lambda_r = {} outside (0, 1)", self.lambda_r)));
        }
        if !(self.lambda_smooth >= T::zero() && self.lambda_smooth <= T::one()) {
            return Err(Error::usage(format!(
                "lambda_smooth = {} outside [0, 1]",
                self.lambda_smooth
            )));
        }
        Ok(())
    }
}

/// Outcome reported for an Interest previously forwarded on `face`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<T: Scalar> {
    /// Data came back after `rtt` seconds.
    Positive { rtt: T },
    /// The PIT entry expired.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedback<T: Scalar> {
    pub class: ClassId,
    pub face: usize,
    pub outcome: Outcome<T>,
}

/// Smoothing constant of the delay estimate.
pub const RTT_ALPHA: f64 = 0.125;

#[derive(Debug, Clone, PartialEq)]
struct ClassState<T: Scalar> {
    probs: ProbabilityVector<T>,
    delay: Vec<Option<T>>,
    pending: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyTable<T: Scalar> {
    faces: usize,
    params: StrategyParams<T>,
    classes: BTreeMap<ClassId, ClassState<T>>,
}

impl<T: Scalar> StrategyTable<T> {
    pub fn new(faces: usize, params: StrategyParams<T>) -> Result<Self> {
        if faces == 0 {
            return Err(Error::usage("strategy table needs at least one face"));
        }
        params.validate()?;
        Ok(Self {
            faces,
            params,
            classes: BTreeMap::new(),
        })
    }

    pub fn faces(&self) -> usize {
        self.faces
    }

    pub fn params(&self) -> &StrategyParams<T> {
        &self.params
    }

    /// Starts `class` with uniform probabilities and no observations. No-op if already present.
    pub fn init_class(&mut self, class: ClassId) {
        let faces = self.faces;
        self.classes.entry(class).or_insert_with(|| ClassState {
            probs: ProbabilityVector::uniform(faces).expect("faces > 0"),
            delay: vec![None; faces],
            pending: vec![0; faces],
        });
    }

    pub fn has_class(&self, class: ClassId) -> bool {
        self.classes.contains_key(&class)
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.classes.keys().copied()
    }

    fn class(&self, class: ClassId) -> Result<&ClassState<T>> {
        self.classes
            .get(&class)
            .ok_or_else(|| Error::usage(format!("class {class:?} not initialised")))
    }

    fn class_mut(&mut self, class: ClassId) -> Result<&mut ClassState<T>> {
        self.classes
            .get_mut(&class)
            .ok_or_else(|| Error::usage(format!("class {class:?} not initialised")))
    }

    fn check_face(&self, face: usize) -> Result<()> {
        if face >= self.faces {
            return Err(Error::usage(format!("face {face} out of range ({} faces)", self.faces)));
        }
        Ok(())
    }

    pub fn probs(&self, class: ClassId) -> Option<&ProbabilityVector<T>> {
        self.classes.get(&class).map(|c| &c.probs)
    }

    /// Replaces the probability vector of an initialised class.
    pub fn set_probs(&mut self, class: ClassId, probs: ProbabilityVector<T>) -> Result<()> {
        if probs.len() != self.faces {
            return Err(Error::usage("probability vector length differs from face count"));
        }
        self.class_mut(class)?.probs = probs;
        Ok(())
    }

    pub fn pending(&self, class: ClassId, face: usize) -> u32 {
        self.classes.get(&class).map_or(0, |c| c.pending[face])
    }

    pub fn delay(&self, class: ClassId, face: usize) -> Option<T> {
        self.classes.get(&class).and_then(|c| c.delay[face])
    }

    /// Raw state of `face` for `class`, given the face's available bandwidth.
    pub fn interface_state(&self, class: ClassId, face: usize, bandwidth_avail: T) -> InterfaceState<T> {
        InterfaceState {
            bandwidth_avail,
            unsatisfied: T::from_u32(self.pending(class, face)).unwrap(),
            delay: self.delay(class, face).unwrap_or_else(T::zero),
        }
    }

    /// Chooses among all faces. `norm` must cover every face in index order.
    pub fn select_interface<R: Rng + ?Sized>(
        &mut self,
        class: ClassId,
        norm: &NormalizedState<T>,
        rng: &mut R,
    ) -> Result<usize> {
        let all: Vec<usize> = (0..self.faces).collect();
        self.select_among(class, &all, norm, rng)
    }

    /// Chooses among `candidates` (for example the FIB next hops). `norm` is indexed like
    /// `candidates`; the earliest candidate wins argmax ties.
    ///
    /// Faces outside `candidates` receive zero weighted probability, so the blend moves their
    /// mass towards the candidates.
    pub fn select_among<R: Rng + ?Sized>(
        &mut self,
        class: ClassId,
        candidates: &[usize],
        norm: &NormalizedState<T>,
        rng: &mut R,
    ) -> Result<usize> {
        if candidates.is_empty() {
            return Err(Error::usage("no candidate faces"));
        }
        if norm.len() != candidates.len() {
            return Err(Error::usage("normalized state does not match candidate set"));
        }
        for &c in candidates {
            self.check_face(c)?;
        }
        let params = self.params;
        let faces = self.faces;
        let state = self.class_mut(class)?;

        let prior: Vec<T> = candidates.iter().map(|&c| state.probs[c]).collect();
        let prior = normalize(&prior)?;
        let rewards = interface_rewards(norm, params.reward_mode);
        let wpro = weighted_probabilities(&rewards, &prior)?;

        if params.lambda_smooth > T::zero() {
            let mut target = vec![T::zero(); faces];
            for (&c, &w) in candidates.iter().zip(wpro.iter()) {
                target[c] = w;
            }
            let lambda = params.lambda_smooth;
            for (p, &w) in state.probs.entries_mut().iter_mut().zip(&target) {
                *p = ((T::one() - lambda) * *p + lambda * w).min(T::one());
            }
        }

        let updated: Vec<T> = candidates.iter().map(|&c| state.probs[c]).collect();
        let pick = match params.selection_mode {
            SelectionMode::Argmax => {
                crate::prob::simplex::argmax_over(&updated, 0..updated.len()).unwrap()
            }
            SelectionMode::Sample => normalize(&updated)?.sample_index(rng),
        };
        Ok(candidates[pick])
    }

    pub fn positive_feedback(&mut self, class: ClassId, face: usize) -> Result<()> {
        self.check_face(face)?;
        let lambda_r = self.params.lambda_r;
        reward_inaction_update(&mut self.class_mut(class)?.probs, face, lambda_r)
    }

    /// Timeouts keep the previous probabilities.
    pub fn negative_feedback(&mut self, class: ClassId, face: usize) -> Result<()> {
        self.check_face(face)?;
        self.class(class)?;
        Ok(())
    }

    /// Folds an RTT sample into the class/face delay estimate (EWMA, α = 0.125).
    pub fn record_rtt(&mut self, class: ClassId, face: usize, sample: T) -> Result<()> {
        self.check_face(face)?;
        if !(sample > T::zero()) || !sample.is_finite() {
            return Err(Error::usage(format!("RTT sample {sample} must be positive")));
        }
        let alpha = T::lit(RTT_ALPHA);
        let slot = &mut self.class_mut(class)?.delay[face];
        *slot = Some(match *slot {
            None => sample,
            Some(d) => (T::one() - alpha) * d + alpha * sample,
        });
        Ok(())
    }

    pub fn apply_feedback(&mut self, fb: &Feedback<T>) -> Result<()> {
        match fb.outcome {
            Outcome::Positive { rtt } => {
                self.record_rtt(fb.class, fb.face, rtt)?;
                self.positive_feedback(fb.class, fb.face)
            }
            Outcome::Negative => self.negative_feedback(fb.class, fb.face),
        }
    }

    pub fn note_forwarded(&mut self, class: ClassId, face: usize) -> Result<()> {
        self.check_face(face)?;
        self.class_mut(class)?.pending[face] += 1;
        Ok(())
    }

    /// Decrements the pending count after Data or a timeout resolved a forwarded Interest.
    pub fn note_resolved(&mut self, class: ClassId, face: usize) -> Result<()> {
        self.check_face(face)?;
        let slot = &mut self.class_mut(class)?.pending[face];
        if *slot == 0 {
            return Err(Error::usage(format!("no pending Interest on face {face}")));
        }
        *slot -= 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const K: ClassId = ClassId(0);

    fn state(b: f64, c: f64, d: f64) -> InterfaceState<f64> {
        InterfaceState { bandwidth_avail: b, unsatisfied: c, delay: d }
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn normalized_state_scales_columns() {
        let n = normalized_state(&[state(5e6, 3.0, 0.02), state(5e6, 1.0, 0.02)]).unwrap();
        assert_eq!(n.beta, [0.5, 0.5]);
        assert_eq!(n.theta, [0.75, 0.25]);
        assert_eq!(n.delta, [0.5, 0.5]);
    }

    #[test]
    fn normalized_state_single_face_and_zero_column() {
        let n = normalized_state(&[state(1.0, 4.0, 0.1)]).unwrap();
        assert_eq!((n.beta[0], n.theta[0], n.delta[0]), (1.0, 1.0, 1.0));
        let n = normalized_state(&[state(1.0, 0.0, 1.0); 3]).unwrap();
        assert!(close(&n.theta, &[1.0 / 3.0; 3], 1e-15));
        assert!(normalized_state::<f64>(&[]).is_err());
        assert!(normalized_state(&[state(-1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn as_written_rewards() {
        let uniform = NormalizedState { beta: vec![0.5; 2], theta: vec![0.5; 2], delta: vec![0.5; 2] };
        assert_eq!(interface_rewards(&uniform, RewardMode::AsWritten), [0.75, 0.75]);
        let skew = NormalizedState { beta: vec![1.0, 0.0], theta: vec![0.5; 2], delta: vec![0.5; 2] };
        assert_eq!(interface_rewards(&skew, RewardMode::AsWritten), [1.0, 0.5]);
    }

    #[test]
    fn qualitative_rewards_prefer_idle_fast_faces() {
        let n = NormalizedState {
            beta: vec![0.8, 0.2],
            theta: vec![0.1, 0.9],
            delta: vec![0.3, 0.7],
        };
        let r = interface_rewards(&n, RewardMode::Qualitative);
        assert!(r[0] > r[1]);
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_probabilities_worked_example() {
        let p = ProbabilityVector::uniform(5).unwrap();
        let w = weighted_probabilities(&[0.25, 0.2, 0.3, 0.2, 0.2], &p).unwrap();
        assert!(close(w.as_slice(), &[0.217, 0.173, 0.260, 0.173, 0.173], 1e-3));
    }

    #[test]
    fn weighted_probabilities_identity_and_mass() {
        let p = ProbabilityVector::new(vec![0.1, 0.6, 0.3]).unwrap();
        let w = weighted_probabilities(&[0.4, 0.4, 0.4], &p).unwrap();
        assert!(close(w.as_slice(), p.as_slice(), 1e-15));
        let point = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let w = weighted_probabilities(&[0.3, 0.9], &point).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
        assert!(weighted_probabilities(&[0.3], &point).is_err());
    }

    #[test]
    fn positive_feedback_worked_example() {
        // three-place wpro values; the winner's own entry does not enter the update, so it is
        // chosen to close the simplex
        let wpro = vec![0.217, 0.173, 0.264, 0.173, 0.173];
        let mut t = StrategyTable::<f64>::new(5, StrategyParams::default()).unwrap();
        t.init_class(K);
        t.set_probs(K, ProbabilityVector::new(wpro).unwrap()).unwrap();
        t.positive_feedback(K, 2).unwrap();
        let p = t.probs(K).unwrap();
        assert!(close(p.as_slice(), &[0.1953, 0.1557, 0.3376, 0.1557, 0.1557], 1e-4));
        assert!((p.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn positive_feedback_single_face_fixed_point() {
        let mut t = StrategyTable::<f64>::new(1, StrategyParams::default()).unwrap();
        t.init_class(K);
        t.positive_feedback(K, 0).unwrap();
        assert_eq!(t.probs(K).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn repeated_wins_converge_monotonically() {
        let mut t = StrategyTable::<f64>::new(4, StrategyParams::default()).unwrap();
        t.init_class(K);
        let mut last = t.probs(K).unwrap()[1];
        for _ in 0..100 {
            t.positive_feedback(K, 1).unwrap();
            let now = t.probs(K).unwrap()[1];
            assert!(now >= last);
            last = now;
        }
        // The losers' mass shrinks by λ_r per win: 0.75 · 0.9^100 ≈ 2e-5 remains.
        assert!(((1.0 - last) - 0.75 * 0.9f64.powi(100)).abs() < 1e-12);
        for _ in 0..100 {
            t.positive_feedback(K, 1).unwrap();
        }
        assert!(1.0 - t.probs(K).unwrap()[1] < 1e-6);
    }

    #[test]
    fn negative_feedback_is_noop() {
        let mut t = StrategyTable::<f64>::new(3, StrategyParams::default()).unwrap();
        t.init_class(K);
        t.positive_feedback(K, 0).unwrap();
        let before = t.clone();
        t.negative_feedback(K, 2).unwrap();
        assert_eq!(t, before);
        assert!(t.negative_feedback(ClassId(5), 0).is_err());
    }

    #[test]
    fn argmax_selection_worked_example() {
        let mut t = StrategyTable::<f64>::new(5, StrategyParams::default()).unwrap();
        t.init_class(K);
        // rewards fed through a Qualitative-free path: build a state whose AsWritten reward is
        // proportional to the example rewards (δ carries everything, θ·β constant)
        let target = [0.25, 0.2, 0.3, 0.2, 0.2];
        let sum: f64 = target.iter().sum();
        let norm = NormalizedState {
            beta: vec![0.2; 5],
            theta: vec![0.0; 5],
            delta: target.iter().map(|r| r / sum).collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(t.select_interface(K, &norm, &mut rng).unwrap(), 2);
    }

    #[test]
    fn unknown_class_errors() {
        let mut t = StrategyTable::new(2, StrategyParams::<f64>::default()).unwrap();
        let norm = normalized_state(&[state(1.0, 0.0, 0.0); 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(t.select_interface(K, &norm, &mut rng).is_err());
    }

    #[test]
    fn single_face_always_zero() {
        let mut t = StrategyTable::<f64>::new(1, StrategyParams::default()).unwrap();
        t.init_class(K);
        let norm = normalized_state(&[state(1.0, 2.0, 0.3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            assert_eq!(t.select_interface(K, &norm, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn restricted_argmax_skips_non_candidates() {
        let mut t = StrategyTable::<f64>::new(4, StrategyParams::default()).unwrap();
        t.init_class(K);
        t.set_probs(K, ProbabilityVector::new(vec![0.05, 0.15, 0.7, 0.1]).unwrap()).unwrap();
        let norm = normalized_state(&[state(1.0, 0.0, 0.0); 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(t.select_among(K, &[1, 3], &norm, &mut rng).unwrap(), 1);
    }

    #[test]
    fn rtt_ewma() {
        let mut t = StrategyTable::<f64>::new(2, StrategyParams::default()).unwrap();
        t.init_class(K);
        t.record_rtt(K, 0, 0.020).unwrap();
        assert_eq!(t.delay(K, 0), Some(0.020));
        t.record_rtt(K, 0, 0.020).unwrap();
        assert!((t.delay(K, 0).unwrap() - 0.020).abs() < 1e-15);
        t.record_rtt(K, 1, 0.010).unwrap();
        t.record_rtt(K, 1, 0.090).unwrap();
        assert!((t.delay(K, 1).unwrap() - 0.020).abs() < 1e-15);
        assert!(t.record_rtt(K, 1, 0.0).is_err());
        assert!(t.record_rtt(K, 1, -1.0).is_err());
    }

    #[test]
    fn pending_counts() {
        let mut t = StrategyTable::new(2, StrategyParams::<f64>::default()).unwrap();
        t.init_class(K);
        for _ in 0..5 {
            t.note_forwarded(K, 1).unwrap();
        }
        t.note_resolved(K, 1).unwrap();
        assert_eq!(t.pending(K, 1), 4);
        assert!(t.note_resolved(K, 0).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = StrategyParams::<f64> { lambda_r: 1.0, ..StrategyParams::default() };
        assert!(StrategyTable::new(2, p).is_err());
        p.lambda_r = 0.5;
        p.lambda_smooth = 1.5;
        assert!(StrategyTable::new(2, p).is_err());
        assert!(StrategyTable::new(0, StrategyParams::<f64>::default()).is_err());
    }
}
