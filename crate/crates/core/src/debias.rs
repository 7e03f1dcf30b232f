//! Rotation debiasing: split a passage at a random token index and swap the
//! two halves, so answer positions spread uniformly without touching the
//! passage-level relevance judgments.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Collection, Passage};
use crate::error::CoreError;
use crate::rng::{draw_below, SplitMix64};
use crate::Result;

/// Per-passage rotation record: the 1-based split index `r` drawn from
/// `{1..n}` and the token count `n` at rotation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rotation {
    pub r: usize,
    pub n: usize,
}

/// Rotation indices for a debiased collection, keyed by passage id.
#[derive(Debug, Clone, Default)]
pub struct RotationMap {
    entries: BTreeMap<String, Rotation>,
}

impl RotationMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pid: impl Into<String>, rotation: Rotation) {
        self.entries.insert(pid.into(), rotation);
    }

    pub fn get(&self, pid: &str) -> Option<Rotation> {
        self.entries.get(pid).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Rotation)> {
        self.entries.iter().map(|(pid, &rot)| (pid.as_str(), rot))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Rotate a token sequence at 1-based index `r`: the output is
/// `[tokens[r..n]; tokens[1..r-1]]`, so `r = 1` is the identity.
pub fn rotate<T: Clone>(tokens: &[T], r: usize) -> Result<Vec<T>> {
    let n = tokens.len();
    if n == 0 {
        return Err(CoreError::invalid("cannot rotate an empty sequence"));
    }
    if r < 1 || r > n {
        return Err(CoreError::invalid(format!(
            "rotation index {r} out of range 1..={n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&tokens[r - 1..]);
    out.extend_from_slice(&tokens[..r - 1]);
    Ok(out)
}

/// New 1-based index of the token originally at `s` after rotating at `r`:
/// `((s - r) mod n) + 1`.
pub fn map_position(s: usize, r: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(CoreError::invalid("empty sequence has no positions"));
    }
    if s < 1 || s > n {
        return Err(CoreError::invalid(format!(
            "position {s} out of range 1..={n}"
        )));
    }
    if r < 1 || r > n {
        return Err(CoreError::invalid(format!(
            "rotation index {r} out of range 1..={n}"
        )));
    }
    let shifted = (s as i64 - r as i64).rem_euclid(n as i64);
    Ok(shifted as usize + 1)
}

/// Debias a whole collection: each passage is rotated at an index drawn
/// uniformly from `{1..n}`. The draw for the passage with ordinal `k` is the
/// k-th value of the SplitMix64 stream started at `seed`, so the result does
/// not depend on evaluation order. Ids and judgments are untouched; the
/// rotated text is the space-joined token list.
pub fn debias_collection(collection: &Collection, seed: u64) -> Result<(Collection, RotationMap)> {
    let mut rotated = Vec::with_capacity(collection.len());
    let mut map = RotationMap::new();
    for (ordinal, passage) in collection.iter().enumerate() {
        let n = passage.len();
        let draw = SplitMix64::nth_draw(seed, ordinal as u64);
        let r = draw_below(draw, n as u64) as usize + 1;
        let tokens = rotate(&passage.tokens, r)?;
        rotated.push(Passage::from_tokens(passage.id.clone(), tokens)?);
        map.insert(passage.id.clone(), Rotation { r, n });
    }
    let debiased = Collection::new(rotated)?;
    Ok((debiased, map))
}
