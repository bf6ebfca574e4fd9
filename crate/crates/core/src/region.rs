use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use crate::cayley::Window;
use crate::group::Element;

/// A subset of a window, indexed by element id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    bits: FixedBitSet,
}

impl Region {
    pub fn empty(window: &Window) -> Self {
        Region {
            bits: FixedBitSet::with_capacity(window.len()),
        }
    }

    pub fn full(window: &Window) -> Self {
        let mut bits = FixedBitSet::with_capacity(window.len());
        bits.insert_range(..);
        Region { bits }
    }

    /// The ball `B(r)` of the window.
    pub fn ball(window: &Window, r: u32) -> Self {
        let mut bits = FixedBitSet::with_capacity(window.len());
        bits.insert_range(..window.ball_end(r));
        Region { bits }
    }

    pub fn from_ids(window: &Window, ids: impl IntoIterator<Item = u32>) -> Self {
        let mut region = Self::empty(window);
        for id in ids {
            region.insert(id);
        }
        region
    }

    pub fn from_predicate(window: &Window, mut keep: impl FnMut(u32, &Element) -> bool) -> Self {
        Self::from_ids(
            window,
            window.elements().filter(|(id, g)| keep(*id, g)).map(|(id, _)| id),
        )
    }

    /// Elements of `set` lying in the window; the rest are ignored.
    pub fn from_elements<'a>(window: &Window, set: impl IntoIterator<Item = &'a Element>) -> Self {
        Self::from_ids(window, set.into_iter().filter_map(|g| window.id(g)))
    }

    pub fn insert(&mut self, id: u32) {
        self.bits.insert(id as usize);
    }

    pub fn contains(&self, id: u32) -> bool {
        self.bits.contains(id as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.ones().map(|i| i as u32)
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Region { bits }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Region { bits }
    }

    pub fn difference(&self, other: &Region) -> Region {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Region { bits }
    }

    pub fn symmetric_difference(&self, other: &Region) -> Region {
        let mut bits = self.bits.clone();
        bits.symmetric_difference_with(&other.bits);
        Region { bits }
    }

    /// Complement within the window.
    pub fn complement(&self) -> Region {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Region { bits }
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// Largest norm in the region, or -1 when empty. Ids are sorted by norm.
    pub fn max_norm(&self, window: &Window) -> i64 {
        self.bits.maximum().map_or(-1, |id| window.norm(id as u32) as i64)
    }

    pub fn to_elements(&self, window: &Window) -> HashSet<Element> {
        self.iter().map(|id| window.element(id).clone()).collect()
    }

    /// Printed elements in lexicographic order.
    pub fn names(&self, window: &Window) -> Vec<String> {
        let mut names: Vec<String> = self.iter().map(|id| window.name(id).to_string()).collect();
        names.sort();
        names
    }
}
