//! Multipartite system shapes.
//!
//! A shape `d_1 x d_2 x ... x d_n` lists the local dimension of each party.
//! Parties are indexed from 0 throughout the crate, and flattened indices are
//! row-major: the last party varies fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local dimensions of a multipartite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SystemShape {
    dims: Vec<usize>,
}

impl SystemShape {
    /// Validates that every party has dimension at least 1 and the total
    /// dimension fits in `usize`.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyShape);
        }
        for (party, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(Error::ZeroDimension { party });
            }
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.checked_mul(d).ok_or(Error::IndexOverflow)?;
        }
        Ok(SystemShape { dims })
    }

    /// Local dimensions in party order.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of parties.
    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of one party.
    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    /// Product of all local dimensions.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the dimensions of the listed parties.
    pub fn subset_dim(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&p| self.dims[p]).product()
    }

    /// True when not all local dimensions are equal.
    pub fn is_heterogeneous(&self) -> bool {
        self.dims.windows(2).any(|w| w[0] != w[1])
    }

    /// Checks a multi-index against the shape.
    pub fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.dims.len() {
            return Err(Error::IndexArity {
                got: index.len(),
                expected: self.dims.len(),
            });
        }
        for (party, (&i, &d)) in index.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return Err(Error::IndexOutOfRange {
                    party,
                    index: i,
                    dim: d,
                });
            }
        }
        Ok(())
    }

    /// Validates a party subset: sorted, unique, in range, nonempty, and a
    /// strict subset of the parties.
    pub fn check_proper_subset(&self, parties: &[usize]) -> Result<()> {
        if parties.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        if parties.len() >= self.dims.len() {
            return Err(Error::InvalidSubset(format!(
                "subset of {} parties is not strict in a {}-party system",
                parties.len(),
                self.dims.len()
            )));
        }
        for w in parties.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidSubset(format!(
                    "subset {parties:?} is not strictly increasing"
                )));
            }
        }
        if let Some(&last) = parties.last() {
            if last >= self.dims.len() {
                return Err(Error::InvalidSubset(format!(
                    "party {last} out of range for {} parties",
                    self.dims.len()
                )));
            }
        }
        Ok(())
    }

    /// Parties not in the given sorted subset.
    pub fn complement(&self, parties: &[usize]) -> Vec<usize> {
        (0..self.dims.len())
            .filter(|p| !parties.contains(p))
            .collect()
    }

    /// Row-major flattened index of a full multi-index.
    pub fn flat_index(&self, index: &[usize]) -> usize {
        let mut flat = 0;
        for (&i, &d) in index.iter().zip(&self.dims) {
            flat = flat * d + i;
        }
        flat
    }

    /// Row-major flattened index over a party subset.
    pub fn flat_index_over(&self, parties: &[usize], index: &[usize]) -> usize {
        let mut flat = 0;
        for &p in parties {
            flat = flat * self.dims[p] + index[p];
        }
        flat
    }

    /// Inverse of [`Self::flat_index`].
    ///
    /// Panics if `flat` is not below the total dimension.
    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        assert!(
            flat < self.total_dim(),
            "flat index {flat} out of range for shape {self}"
        );
        let mut rest = flat;
        let mut index = vec![0; self.dims.len()];
        for (p, &d) in self.dims.iter().enumerate().rev() {
            index[p] = rest % d;
            rest /= d;
        }
        index
    }
}

impl std::fmt::Display for SystemShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}
