use std::ops::Index;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point on the probability simplex: non-negative weights summing to one.
///
/// Entries are indexed by action, which for the forwarding strategy is a face id.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector<T: Scalar> {
    entries: Vec<T>,
}

impl<T: Scalar> ProbabilityVector<T> {
    /// Validates `entries` against the simplex invariants without rescaling.
    pub fn new(entries: Vec<T>) -> Result<Self> {
        let pv = Self { entries };
        pv.check()?;
        Ok(pv)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("probability vector needs at least one entry"));
        }
        let w = T::one() / T::from_usize(n).unwrap();
        Ok(Self { entries: vec![w; n] })
    }

    /// Point mass on `index`.
    pub fn one_hot(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::usage(format!("index {index} out of range for {n} entries")));
        }
        let mut entries = vec![T::zero(); n];
        entries[index] = T::one();
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn sum(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, &p| acc + p)
    }

    /// Checks every invariant: non-empty, entries in `[0, 1]`, sum within tolerance of one.
    pub fn check(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::usage("probability vector needs at least one entry"));
        }
        for (i, &p) in self.entries.iter().enumerate() {
            if !p.is_finite() || p < T::zero() || p > T::one() {
                return Err(Error::usage(format!("entry {i} = {p} outside [0, 1]")));
            }
        }
        let tol = T::simplex_tolerance(self.entries.len());
        let sum = self.sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::usage(format!("entries sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax_over(&self.entries, 0..self.entries.len()).expect("non-empty")
    }

    /// Draws an index with probability equal to its entry.
    ///
    /// Consumes exactly one `f64` from `rng`, so equal seeds give equal sequences.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = T::from_f64(rng.random::<f64>()).unwrap();
        let mut cumulative = T::zero();
        let mut last_positive = 0;
        for (i, &p) in self.entries.iter().enumerate() {
            if p <= T::zero() {
                continue;
            }
            last_positive = i;
            cumulative = cumulative + p;
            if u < cumulative {
                return i;
            }
        }
        // Rounding left the cumulative sum just below one.
        last_positive
    }

    /// Mutable access for in-crate update rules that re-establish the invariants themselves.
    pub(crate) fn entries_mut(&mut self) -> &mut [T] {
        &mut self.entries
    }
}

impl<T: Scalar> Index<usize> for ProbabilityVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.entries[i]
    }
}

/// Rescales non-negative `weights` onto the simplex. An all-zero input maps to the uniform vector.
pub fn normalize<T: Scalar>(weights: &[T]) -> Result<ProbabilityVector<T>> {
    if weights.is_empty() {
        return Err(Error::usage("cannot normalize an empty weight vector"));
    }
    let mut total = T::zero();
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < T::zero() {
            return Err(Error::usage(format!("weight {i} = {w} is negative or non-finite")));
        }
        total = total + w;
    }
    if total <= T::zero() {
        return ProbabilityVector::uniform(weights.len());
    }
    if !total.is_finite() {
        return Err(Error::usage("weights overflow when summed"));
    }
    let entries = weights.iter().map(|&w| (w / total).min(T::one())).collect();
    Ok(ProbabilityVector { entries })
}

/// Argmax of `values` restricted to the positions yielded by `order`; the first maximum wins.
pub(crate) fn argmax_over<T: Scalar>(
    values: &[T],
    order: impl IntoIterator<Item = usize>,
) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for i in order {
        let v = values[i];
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalize_proportional() {
        let pv = normalize(&[2.0f64, 3.0, 5.0]).unwrap();
        for (got, want) in pv.iter().zip([0.2, 0.3, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_all_zero_is_uniform() {
        let pv = normalize(&[0.0f64, 0.0, 0.0]).unwrap();
        assert_eq!(pv.as_slice(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn normalize_worked_example_weights() {
        let pv = normalize(&[0.05f64, 0.04, 0.06, 0.04, 0.04]).unwrap();
        for (got, want) in pv.iter().zip([0.217, 0.173, 0.260, 0.173, 0.173]) {
            assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        }
    }

    #[test]
    fn normalize_rejects_bad_input() {
        assert!(matches!(normalize::<f64>(&[]), Err(Error::Usage(_))));
        assert!(matches!(normalize(&[1.0, -0.1]), Err(Error::Usage(_))));
        assert!(matches!(normalize(&[1.0, f64::NAN]), Err(Error::Usage(_))));
        assert!(matches!(normalize(&[f64::INFINITY]), Err(Error::Usage(_))));
    }

    #[test]
    fn new_validates() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.4]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityVector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn sample_degenerate_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let single = ProbabilityVector::new(vec![1.0]).unwrap();
        let mass = ProbabilityVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        for _ in 0..1000 {
            assert_eq!(single.sample_index(&mut rng), 0);
            assert_eq!(mass.sample_index(&mut rng), 1);
        }
    }

    #[test]
    fn sample_fair_coin_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let pv = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let zeros = (0..100_000).filter(|_| pv.sample_index(&mut rng) == 0).count();
        let freq = zeros as f64 / 100_000.0;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn sample_is_deterministic_per_seed() {
        let pv = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64).map(|_| pv.sample_index(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn argmax_ties_lowest_index() {
        let pv = ProbabilityVector::new(vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(pv.argmax(), 0);
    }

    #[test]
    fn works_in_f32() {
        let pv = normalize(&[2.0f32, 3.0, 5.0]).unwrap();
        pv.check().unwrap();
        assert!((pv[2] - 0.5).abs() < 1e-6);
    }
}
