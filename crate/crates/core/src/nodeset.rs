use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::NodeId;

/// A subset of `[n] = {1, ..., n}`.
///
/// Ids are 1-based on every public method; bit `i - 1` stores membership of node `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    bits: FixedBitSet,
}

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        NodeSet { bits }
    }

    pub fn singleton(n: usize, id: NodeId) -> Result<Self> {
        Self::from_ids(n, [id])
    }

    pub fn from_ids<I: IntoIterator<Item = NodeId>>(n: usize, ids: I) -> Result<Self> {
        let mut set = Self::empty(n);
        for id in ids {
            set.insert(id)?;
        }
        Ok(set)
    }

    pub(crate) fn from_bits(bits: FixedBitSet) -> Self {
        NodeSet { bits }
    }

    /// Ambient node count.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, id: NodeId) -> Result<()> {
        if id == 0 || id > self.universe() {
            return Err(Error::InvalidNode(id));
        }
        self.bits.insert(id - 1);
        Ok(())
    }

    pub fn remove(&mut self, id: NodeId) {
        if id >= 1 && id <= self.universe() {
            self.bits.set(id - 1, false);
        }
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id >= 1 && id <= self.universe() && self.bits.contains(id - 1)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits.ones().map(|b| b + 1)
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<NodeId> {
        self.bits.minimum().map(|b| b + 1)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &NodeSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        !self.bits.is_disjoint(&other.bits)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// Smallest common member, if any.
    pub fn first_common(&self, other: &NodeSet) -> Option<NodeId> {
        self.bits.intersection(&other.bits).next().map(|b| b + 1)
    }

    /// Smallest id in `[n]` that is not a member.
    pub fn first_missing(&self) -> Option<NodeId> {
        self.bits.zeroes().next().map(|b| b + 1)
    }

    pub(crate) fn check_universe(&self, n: usize) -> Result<()> {
        if self.universe() != n {
            return Err(Error::SizeMismatch {
                left: self.universe(),
                right: n,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Space-separated ascending ids.
impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for id in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{id}")?;
            first = false;
        }
        Ok(())
    }
}
