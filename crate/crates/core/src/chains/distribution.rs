use crate::error::{Error, Result};

/// A probability vector on the consecutive integers `offset, offset+1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    offset: usize,
    probs: Vec<f64>,
}

impl Distribution {
    /// Entries must be finite and nonnegative; the total is not forced to 1
    /// so truncated laws can be represented.
    pub fn new(offset: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution must have at least one entry"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and nonnegative"));
        }
        Ok(Distribution { offset, probs })
    }

    pub fn point(n: usize) -> Self {
        Distribution {
            offset: n,
            probs: vec![1.0],
        }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest state carrying an entry (possibly zero).
    pub fn max_state(&self) -> usize {
        self.offset + self.probs.len() - 1
    }

    pub fn prob(&self, n: usize) -> f64 {
        n.checked_sub(self.offset)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| n as f64 * p).sum::<f64>() / self.total()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i, p))
    }

    /// `½ Σ |p_n - r_n|`.
    pub fn tv_distance(&self, other: &Distribution) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.max_state().max(other.max_state());
        0.5 * (lo..=hi).map(|n| (self.prob(n) - other.prob(n)).abs()).sum::<f64>()
    }

    /// Index `n` with `Σ_{k<n} p_k ≤ u·total < Σ_{k≤n} p_k`.
    pub(crate) fn quantile(&self, u: f64) -> usize {
        let target = u * self.total();
        let mut acc = 0.0;
        for (n, p) in self.iter() {
            acc += p;
            if target < acc {
                return n;
            }
        }
        self.max_state()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_accessors() {
        let d = Distribution::new(2, vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(d.prob(1), 0.0);
        assert_eq!(d.prob(3), 0.5);
        assert_eq!(d.max_state(), 4);
        assert_eq!(d.mean(), 3.0);
        assert_eq!(d.quantile(0.1), 2);
        assert_eq!(d.quantile(0.6), 3);
        assert_eq!(d.quantile(0.99), 4);
        assert_eq!(d.tv_distance(&Distribution::point(3)), 0.5);
        assert!(Distribution::new(0, vec![]).is_err());
        assert!(Distribution::new(0, vec![-0.1]).is_err());
    }
}
