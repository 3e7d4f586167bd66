use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite, fully observable MDP with dense transition and reward tensors.
///
/// Tensors are stored flat in `[state][action][next_state]` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMdp<T: Scalar> {
    state_count: usize,
    action_count: usize,
    transition: Vec<T>,
    reward: Vec<T>,
    discount: T,
}

/// Result of [`FiniteMdp::value_iteration`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSolution<T: Scalar> {
    pub values: Vec<T>,
    pub iterations: usize,
    /// Sup-norm change of every sweep, in order. The last entry is below the requested tolerance.
    pub residuals: Vec<T>,
}

impl<T: Scalar> FiniteMdp<T> {
    pub fn new(
        state_count: usize,
        action_count: usize,
        transition: Vec<T>,
        reward: Vec<T>,
        discount: T,
    ) -> Result<Self> {
        if state_count == 0 || action_count == 0 {
            return Err(Error::usage("MDP needs at least one state and one action"));
        }
        let len = state_count * action_count * state_count;
        if transition.len() != len || reward.len() != len {
            return Err(Error::usage(format!(
                "tensors must have {len} entries (got {} transitions, {} rewards)",
                transition.len(),
                reward.len()
            )));
        }
        if !(discount >= T::zero() && discount < T::one()) {
            return Err(Error::usage(format!("discount {discount} outside [0, 1)")));
        }
        if reward.iter().any(|r| !r.is_finite()) {
            return Err(Error::usage("rewards must be finite"));
        }
        let tol = T::simplex_tolerance(state_count);
        for (row_idx, row) in transition.chunks(state_count).enumerate() {
            if row.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
                return Err(Error::usage(format!(
                    "transition row {row_idx} has an entry outside [0, 1]"
                )));
            }
            let sum = row.iter().fold(T::zero(), |a, &p| a + p);
            if (sum - T::one()).abs() > tol {
                let (s, a) = (row_idx / action_count, row_idx % action_count);
                return Err(Error::usage(format!(
                    "P[{s}][{a}][*] sums to {sum}, not 1"
                )));
            }
        }
        Ok(Self {
            state_count,
            action_count,
            transition,
            reward,
            discount,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn discount(&self) -> T {
        self.discount
    }

    fn row(&self, s: usize, a: usize) -> std::ops::Range<usize> {
        let start = (s * self.action_count + a) * self.state_count;
        start..start + self.state_count
    }

    pub fn transition(&self, s: usize, a: usize, next: usize) -> T {
        self.transition[self.row(s, a)][next]
    }

    pub fn reward(&self, s: usize, a: usize, next: usize) -> T {
        self.reward[self.row(s, a)][next]
    }

    fn check_indices(&self, s: usize, a: usize) -> Result<()> {
        if s >= self.state_count {
            return Err(Error::usage(format!("state {s} out of range")));
        }
        if a >= self.action_count {
            return Err(Error::usage(format!("action {a} out of range")));
        }
        Ok(())
    }

    /// Expected one-step reward `Σ_s' R[s][a][s'] · P[s][a][s']`.
    pub fn expected_reward(&self, s: usize, a: usize) -> Result<T> {
        self.check_indices(s, a)?;
        Ok(self.expected_reward_unchecked(s, a))
    }

    fn expected_reward_unchecked(&self, s: usize, a: usize) -> T {
        let row = self.row(s, a);
        self.transition[row.clone()]
            .iter()
            .zip(&self.reward[row])
            .fold(T::zero(), |acc, (&p, &r)| acc + p * r)
    }

    /// Q-value of `(s, a)` against the value estimate `values`.
    fn backup(&self, s: usize, a: usize, values: &[T]) -> T {
        let row = self.row(s, a);
        let future = self.transition[row]
            .iter()
            .zip(values)
            .fold(T::zero(), |acc, (&p, &v)| acc + p * v);
        self.expected_reward_unchecked(s, a) + self.discount * future
    }

    /// Synchronous value iteration from `V = 0` until the sup-norm change of a sweep drops below `tol`.
    pub fn value_iteration(&self, tol: T, max_iter: usize) -> Result<ValueSolution<T>> {
        if !(tol > T::zero()) {
            return Err(Error::usage("tolerance must be positive"));
        }
        let mut values = vec![T::zero(); self.state_count];
        let mut next = values.clone();
        let mut residuals = Vec::new();
        for iteration in 1..=max_iter {
            let mut residual = T::zero();
            for s in 0..self.state_count {
                let best = (0..self.action_count)
                    .map(|a| self.backup(s, a, &values))
                    .fold(T::neg_infinity(), T::max);
                residual = residual.max((best - values[s]).abs());
                next[s] = best;
            }
            std::mem::swap(&mut values, &mut next);
            residuals.push(residual);
            if residual < tol {
                return Ok(ValueSolution {
                    values,
                    iterations: iteration,
                    residuals,
                });
            }
        }
        Err(Error::Convergence {
            iterations: max_iter,
            residual: residuals.last().map_or(f64::INFINITY, |r| r.to_f64().unwrap()),
        })
    }

    /// Greedy policy with respect to `values`; ties go to the lowest action.
    pub fn greedy_policy(&self, values: &[T]) -> Vec<usize> {
        (0..self.state_count)
            .map(|s| {
                let q: Vec<T> = (0..self.action_count)
                    .map(|a| self.backup(s, a, values))
                    .collect();
                crate::prob::simplex::argmax_over(&q, 0..q.len()).unwrap()
            })
            .collect()
    }
}
