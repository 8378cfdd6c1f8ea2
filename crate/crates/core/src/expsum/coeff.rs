use num_complex::Complex64;

use super::accum::sum_f64;
use crate::error::{Error, Result};

/// A finitely supported complex sequence indexed by integers, with its
/// taxicab, Euclidean and supremum norms cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    indices: Vec<i64>,
    weights: Vec<Complex64>,
    norm_l1: f64,
    norm_l2: f64,
    norm_sup: f64,
}

impl CoeffSeq {
    /// Builds a sequence from `(index, weight)` pairs. Indices must be
    /// distinct and the support nonempty; use [`CoeffSeq::zero`] for the
    /// empty sequence.
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut pairs: Vec<(i64, Complex64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidParams("empty support".into()));
        }
        pairs.sort_by_key(|p| p.0);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParams(format!("duplicate index {}", w[0].0)));
        }
        if pairs.iter().any(|p| !p.1.re.is_finite() || !p.1.im.is_finite()) {
            return Err(Error::InvalidParams("non-finite weight".into()));
        }
        let (indices, weights) = pairs.into_iter().unzip();
        Ok(Self::from_sorted(indices, weights))
    }

    fn from_sorted(indices: Vec<i64>, weights: Vec<Complex64>) -> Self {
        let norm_l1 = sum_f64(weights.iter().map(|w| w.norm()));
        let norm_l2 = sum_f64(weights.iter().map(|w| w.norm_sqr())).sqrt();
        let norm_sup = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        CoeffSeq {
            indices,
            weights,
            norm_l1,
            norm_l2,
            norm_sup,
        }
    }

    /// The zero sequence with empty support.
    pub fn zero() -> Self {
        Self::from_sorted(Vec::new(), Vec::new())
    }

    /// Constant weight 1 on `support`.
    pub fn ones(support: &[i64]) -> Result<Self> {
        Self::new(support.iter().map(|&i| (i, Complex64::new(1.0, 0.0))))
    }

    /// Same support, every weight replaced by zero.
    pub fn zeroed(&self) -> Self {
        Self::from_sorted(self.indices.clone(), vec![Complex64::new(0.0, 0.0); self.len()])
    }

    pub fn map_weights(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let weights = self
            .iter()
            .map(|(i, w)| f(i, w))
            .collect();
        Self::from_sorted(self.indices.clone(), weights)
    }

    pub fn map_indices(&self, f: impl Fn(i64) -> i64) -> Result<Self> {
        if self.is_empty() {
            return Ok(Self::zero());
        }
        Self::new(self.iter().map(|(i, w)| (f(i), w)))
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn support(&self) -> &[i64] {
        &self.indices
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.indices.iter().copied().zip(self.weights.iter().copied())
    }

    /// Weight at `index`, zero off the support.
    pub fn get(&self, index: i64) -> Complex64 {
        self.indices
            .binary_search(&index)
            .map(|p| self.weights[p])
            .unwrap_or_default()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.indices.first().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.indices.last().copied()
    }

    pub fn norm_l1(&self) -> f64 {
        self.norm_l1
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_l2
    }

    pub fn norm_sup(&self) -> f64 {
        self.norm_sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_match_definitions() {
        let s = CoeffSeq::new([
            (3, Complex64::new(3.0, 4.0)),
            (-1, Complex64::new(0.0, -1.0)),
            (7, Complex64::new(-2.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(s.support(), &[-1, 3, 7]);
        assert_eq!(s.norm_l1(), 8.0);
        assert_eq!(s.norm_l2(), 30f64.sqrt());
        assert_eq!(s.norm_sup(), 5.0);
        assert_eq!(s.get(3), Complex64::new(3.0, 4.0));
        assert_eq!(s.get(4), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_duplicates_and_empty_support() {
        let one = Complex64::new(1.0, 0.0);
        assert!(CoeffSeq::new([(1, one), (1, one)]).is_err());
        assert!(CoeffSeq::new(std::iter::empty()).is_err());
        assert!(CoeffSeq::new([(1, Complex64::new(f64::NAN, 0.0))]).is_err());
        let z = CoeffSeq::zero();
        assert!(z.is_empty());
        assert_eq!((z.norm_l1(), z.norm_l2(), z.norm_sup()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn zeroed_keeps_support() {
        let s = CoeffSeq::ones(&[1, 2, 3]).unwrap().zeroed();
        assert_eq!(s.len(), 3);
        assert_eq!(s.norm_l1(), 0.0);
    }
}
