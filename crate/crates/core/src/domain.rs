//! Finite index domains and probability distributions over them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`Distribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// An indexed finite value set `0..size`, optionally with one element
/// reserved as NULL ("nothing").
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteDomain {
    name: String,
    size: usize,
    null_index: Option<usize>,
}

impl FiniteDomain {
    pub fn new(name: impl Into<String>, size: usize, null_index: Option<usize>) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidDomain(format!("domain '{name}' must have size >= 1")));
        }
        if let Some(null) = null_index {
            if null >= size {
                return Err(Error::InvalidDomain(format!(
                    "null index {null} of domain '{name}' is not below size {size}"
                )));
            }
        }
        Ok(FiniteDomain { name, size, null_index })
    }

    /// `Z_n` without a NULL element.
    pub fn plain(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, size, None)
    }

    /// `n` ordinary elements followed by NULL at index `n` (total size `n + 1`).
    pub fn with_null(name: impl Into<String>, base_size: usize) -> Result<Self> {
        if base_size == 0 {
            return Err(Error::InvalidDomain(
                "a domain with NULL needs at least one ordinary element".into(),
            ));
        }
        Self::new(name, base_size + 1, Some(base_size))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn null_index(&self) -> Option<usize> {
        self.null_index
    }

    pub fn is_null(&self, index: usize) -> bool {
        self.null_index == Some(index)
    }

    /// Number of ordinary (non-NULL) elements.
    pub fn base_size(&self) -> usize {
        self.size - usize::from(self.null_index.is_some())
    }

    /// True when NULL, if present, is the last index. Built-in rule
    /// families require this layout.
    pub fn null_is_last(&self) -> bool {
        self.null_index.is_none_or(|null| null + 1 == self.size)
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.size {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                domain: self.name.clone(),
                index,
                size: self.size,
            })
        }
    }
}

/// A probability vector over a [`FiniteDomain`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    domain: FiniteDomain,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(domain: FiniteDomain, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != domain.size() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities, got {}",
                domain.size(),
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || p.is_sign_negative() && **p != 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} at index {i} is not a finite non-negative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Distribution { domain, probs })
    }

    pub fn uniform(domain: &FiniteDomain) -> Self {
        let p = 1.0 / domain.size() as f64;
        Distribution {
            domain: domain.clone(),
            probs: vec![p; domain.size()],
        }
    }

    pub fn point_mass(domain: &FiniteDomain, index: usize) -> Result<Self> {
        domain.check_index(index)?;
        let mut probs = vec![0.0; domain.size()];
        probs[index] = 1.0;
        Ok(Distribution {
            domain: domain.clone(),
            probs,
        })
    }

    pub(crate) fn from_parts_unchecked(domain: FiniteDomain, probs: Vec<f64>) -> Self {
        debug_assert_eq!(domain.size(), probs.len());
        Distribution { domain, probs }
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Shannon entropy in bits. Zero-probability entries contribute nothing.
    pub fn entropy(&self) -> f64 {
        let h: f64 = self.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
        // -0.0 and tiny negative rounding from p == 1.0
        h.max(0.0)
    }

    /// Number of strictly positive entries.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Structural test: more than one outcome has positive probability.
    pub fn contains_information(&self) -> bool {
        self.support_size() > 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(n: usize) -> FiniteDomain {
        FiniteDomain::plain("D", n).unwrap()
    }

    #[test]
    fn domain_rejects_zero_size_and_bad_null() {
        assert!(FiniteDomain::plain("D", 0).is_err());
        assert!(FiniteDomain::new("D", 4, Some(4)).is_err());
        let d = FiniteDomain::with_null("M", 8).unwrap();
        assert_eq!(d.size(), 9);
        assert_eq!(d.null_index(), Some(8));
        assert_eq!(d.base_size(), 8);
        assert!(d.null_is_last());
        assert!(!FiniteDomain::new("D", 4, Some(1)).unwrap().null_is_last());
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(dom(2), vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(dom(2), vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(dom(2), vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(dom(3), vec![0.5, 0.5]).is_err());
        assert!(Distribution::new(dom(2), vec![f64::NAN, 1.0]).is_err());
        // within tolerance
        assert!(Distribution::new(dom(2), vec![0.5, 0.5 + 1e-10]).is_ok());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(Distribution::uniform(&dom(4)).entropy(), 2.0);
        assert_eq!(Distribution::point_mass(&dom(4), 2).unwrap().entropy(), 0.0);
        let d = Distribution::new(dom(3), vec![0.5, 0.25, 0.25]).unwrap();
        assert!((d.entropy() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn information_uses_exact_zero_convention() {
        assert!(!Distribution::point_mass(&dom(3), 0).unwrap().contains_information());
        assert!(Distribution::uniform(&dom(2)).contains_information());
        let d = Distribution::new(dom(3), vec![1.0 - 1e-12, 1e-12, 0.0]).unwrap();
        assert!(d.contains_information());
    }
}
