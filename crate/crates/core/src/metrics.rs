//! Conductance, the quality score `f(S) = D_in / (D_in + E_out)` and the
//! incremental formulas for adding or removing a batch of vertices.
//!
//! Everything here is a ratio of edge counts. Counts are kept as integers and
//! only converted to a [`Scalar`] at the final division, so exact and
//! floating-point evaluation share one code path.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{connected_within, Graph, VertexId};
use crate::scalar::{cmp_fractions, Scalar};

/// Internal volume and cut size of a vertex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CutCounts {
    /// `2 × links(S, S)`.
    pub d_in: u64,
    /// `links(S, V \ S)`.
    pub e_out: u64,
}

impl CutCounts {
    pub fn new(d_in: u64, e_out: u64) -> Self {
        CutCounts { d_in, e_out }
    }

    pub fn volume(&self) -> u64 {
        self.d_in + self.e_out
    }

    /// Quality as an unreduced fraction `(d_in, d_in + e_out)`.
    pub fn quality_fraction(&self) -> Result<(u64, u64)> {
        if self.volume() == 0 {
            return Err(Error::DegenerateCut {
                volume: 0,
                total: 0,
            });
        }
        Ok((self.d_in, self.volume()))
    }

    /// Counts of `S ∪ batch`.
    pub fn after_add(&self, b: &BatchStats) -> Result<CutCounts> {
        let d_in = self.d_in + b.d_in_cross;
        let e_out = (i128::from(self.e_out) + i128::from(b.e_out_sbar) - i128::from(b.e_out_s))
            .try_into()
            .map_err(|_| inconsistent())?;
        Ok(CutCounts { d_in, e_out })
    }

    /// Counts of `S \ batch`, with `b` measured against `S \ batch`.
    pub fn after_remove(&self, b: &BatchStats) -> Result<CutCounts> {
        let d_in = self.d_in.checked_sub(b.d_in_cross).ok_or_else(inconsistent)?;
        let e_out = (i128::from(self.e_out) + i128::from(b.e_out_s) - i128::from(b.e_out_sbar))
            .try_into()
            .map_err(|_| inconsistent())?;
        Ok(CutCounts { d_in, e_out })
    }
}

fn inconsistent() -> Error {
    Error::InvalidParameter("batch statistics are inconsistent with the community".into())
}

impl From<&Community> for CutCounts {
    fn from(c: &Community) -> Self {
        c.counts()
    }
}

/// Link counts between a batch and a community.
///
/// For an addition, `S` is the community; for a removal, `S` is the community
/// with the batch taken out. `e_out_sbar` counts batch edges leaving both the
/// batch and the (original) community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BatchStats {
    /// `2 × (links(S, batch) + links(batch, batch))`.
    pub d_in_cross: u64,
    /// `links(S, batch)`.
    pub e_out_s: u64,
    /// `links(S̄, batch)`.
    pub e_out_sbar: u64,
}

/// A vertex set with cached internal volume and cut size.
///
/// The set always contains its anchor (the query vertex). Counts are relative
/// to the graph the community was built on; callers must keep passing that
/// same graph to the mutating methods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    members: BTreeSet<VertexId>,
    flags: Vec<bool>,
    counts: CutCounts,
    anchor: VertexId,
}

impl Community {
    /// Builds a community and counts its cut from scratch.
    pub fn new<I>(g: &Graph, members: I, anchor: VertexId) -> Result<Self>
    where
        I: IntoIterator<Item = VertexId>,
    {
        g.check_vertex(anchor)?;
        let mut c = Community {
            members: BTreeSet::new(),
            flags: vec![false; g.n()],
            counts: CutCounts::default(),
            anchor,
        };
        for v in members.into_iter().chain([anchor]) {
            g.check_vertex(v)?;
            if c.members.insert(v) {
                c.flags[v] = true;
            }
        }
        c.counts = recount(g, &c.flags, c.members.iter().copied());
        Ok(c)
    }

    pub fn singleton(g: &Graph, anchor: VertexId) -> Result<Self> {
        Self::new(g, [], anchor)
    }

    pub fn anchor(&self) -> VertexId {
        self.anchor
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.flags.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in ascending order.
    pub fn members(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.members().collect()
    }

    pub fn d_in(&self) -> u64 {
        self.counts.d_in
    }

    pub fn e_out(&self) -> u64 {
        self.counts.e_out
    }

    pub fn volume(&self) -> u64 {
        self.counts.volume()
    }

    pub fn counts(&self) -> CutCounts {
        self.counts
    }

    pub fn quality<T: Scalar>(&self) -> Result<T> {
        quality_score(self)
    }

    /// Number of neighbours of `v` inside the community.
    pub fn links_to(&self, g: &Graph, v: VertexId) -> u64 {
        g.neighbors(v).iter().filter(|&&u| self.flags[u]).count() as u64
    }

    pub fn add(&mut self, g: &Graph, v: VertexId) -> Result<()> {
        g.check_vertex(v)?;
        if self.flags[v] {
            return Err(Error::BatchOverlap(v));
        }
        let k = self.links_to(g, v);
        let d = g.degree(v) as u64;
        self.counts.d_in += 2 * k;
        self.counts.e_out = self.counts.e_out + d - 2 * k;
        self.flags[v] = true;
        self.members.insert(v);
        Ok(())
    }

    pub fn remove(&mut self, g: &Graph, v: VertexId) -> Result<()> {
        g.check_vertex(v)?;
        if v == self.anchor {
            return Err(Error::AnchorInBatch(v));
        }
        if !self.flags[v] {
            return Err(Error::BatchNotMember(v));
        }
        let k = self.links_to(g, v);
        let d = g.degree(v) as u64;
        self.counts.d_in -= 2 * k;
        self.counts.e_out = self.counts.e_out + 2 * k - d;
        self.flags[v] = false;
        self.members.remove(&v);
        Ok(())
    }

    /// Members other than the anchor with at least one neighbour outside,
    /// ascending.
    pub fn boundary(&self, g: &Graph) -> Vec<VertexId> {
        self.members()
            .filter(|&v| v != self.anchor)
            .filter(|&v| g.neighbors(v).iter().any(|&u| !self.flags[u]))
            .collect()
    }

    /// Whether the community minus `v` is still connected.
    pub fn connected_without(&self, g: &Graph, v: VertexId) -> bool {
        let mut inside = self.flags.clone();
        inside[v] = false;
        let start = if v == self.anchor {
            match self.members().find(|&u| u != v) {
                Some(u) => u,
                None => return true,
            }
        } else {
            self.anchor
        };
        let target = self.len() - usize::from(self.flags[v]);
        connected_within(g, start, &mut inside) == target
    }

    pub fn is_connected(&self, g: &Graph) -> bool {
        let mut inside = self.flags.clone();
        connected_within(g, self.anchor, &mut inside) == self.len()
    }

    /// Whether the cached counts match a full recount on `g`.
    pub fn is_consistent(&self, g: &Graph) -> bool {
        self.flags.len() == g.n()
            && self.members.contains(&self.anchor)
            && recount(g, &self.flags, self.members()) == self.counts
    }
}

fn recount<I>(g: &Graph, flags: &[bool], members: I) -> CutCounts
where
    I: IntoIterator<Item = VertexId>,
{
    let mut counts = CutCounts::default();
    for v in members {
        for &u in g.neighbors(v) {
            if flags[u] {
                counts.d_in += 1;
            } else {
                counts.e_out += 1;
            }
        }
    }
    counts
}

fn membership(g: &Graph, s: &[VertexId]) -> Result<Vec<bool>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut flags = vec![false; g.n()];
    for &v in s {
        g.check_vertex(v)?;
        flags[v] = true;
    }
    Ok(flags)
}

/// Cut size and volume of `s` as an unreduced fraction
/// `(|E(s, s̄)|, min(vol(s), 2m − vol(s)))`.
pub fn conductance_fraction(g: &Graph, s: &[VertexId]) -> Result<(u64, u64)> {
    let flags = membership(g, s)?;
    let members = flags.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v);
    let counts = recount(g, &flags, members);
    let total = g.total_volume();
    let volume = counts.volume();
    let den = volume.min(total - volume);
    if den == 0 {
        return Err(Error::DegenerateCut { volume, total });
    }
    Ok((counts.e_out, den))
}

/// `|E(s, s̄)| / min(vol(s), 2m − vol(s))`.
pub fn conductance<T: Scalar>(g: &Graph, s: &[VertexId]) -> Result<T> {
    let (cut, den) = conductance_fraction(g, s)?;
    Ok(T::from_ratio(cut, den))
}

/// `E_out / vol(S)`, the conductance with the complement's volume ignored.
pub fn subgraph_conductance<T: Scalar>(c: impl Into<CutCounts>) -> Result<T> {
    let counts = c.into();
    let (_, den) = counts.quality_fraction()?;
    Ok(T::from_ratio(counts.e_out, den))
}

/// `f(S) = D_in / (D_in + E_out)`.
pub fn quality_score<T: Scalar>(c: impl Into<CutCounts>) -> Result<T> {
    let (num, den) = c.into().quality_fraction()?;
    Ok(T::from_ratio(num, den))
}

/// Link counts for adding `batch` to `c`.
pub fn batch_stats_add(g: &Graph, c: &Community, batch: &[VertexId]) -> Result<BatchStats> {
    let mut in_batch = vec![false; g.n()];
    for &v in batch {
        g.check_vertex(v)?;
        if c.contains(v) {
            return Err(Error::BatchOverlap(v));
        }
        in_batch[v] = true;
    }
    let mut stats = BatchStats::default();
    let mut batch_batch = 0;
    for v in distinct(batch, &in_batch) {
        for &u in g.neighbors(v) {
            if c.contains(u) {
                stats.e_out_s += 1;
            } else if in_batch[u] {
                batch_batch += 1;
            } else {
                stats.e_out_sbar += 1;
            }
        }
    }
    // each batch-internal edge was seen from both ends
    stats.d_in_cross = 2 * stats.e_out_s + batch_batch;
    Ok(stats)
}

/// Link counts for removing `batch` from `c`, measured against `c \ batch`.
pub fn batch_stats_remove(g: &Graph, c: &Community, batch: &[VertexId]) -> Result<BatchStats> {
    let mut in_batch = vec![false; g.n()];
    for &v in batch {
        g.check_vertex(v)?;
        if v == c.anchor() {
            return Err(Error::AnchorInBatch(v));
        }
        if !c.contains(v) {
            return Err(Error::BatchNotMember(v));
        }
        in_batch[v] = true;
    }
    let mut stats = BatchStats::default();
    let mut batch_batch = 0;
    for v in distinct(batch, &in_batch) {
        for &u in g.neighbors(v) {
            if in_batch[u] {
                batch_batch += 1;
            } else if c.contains(u) {
                stats.e_out_s += 1;
            } else {
                stats.e_out_sbar += 1;
            }
        }
    }
    stats.d_in_cross = 2 * stats.e_out_s + batch_batch;
    Ok(stats)
}

fn distinct<'a>(batch: &'a [VertexId], flags: &'a [bool]) -> impl Iterator<Item = VertexId> + 'a {
    let mut seen = std::collections::HashSet::new();
    batch
        .iter()
        .copied()
        .filter(move |&v| flags[v] && seen.insert(v))
}

/// `f(S ∪ batch)` from the cached counts and the batch's link counts.
pub fn quality_after_add<T: Scalar>(c: impl Into<CutCounts>, b: &BatchStats) -> Result<T> {
    quality_score(c.into().after_add(b)?)
}

/// `f(S \ batch)` from the cached counts and the batch's link counts.
pub fn quality_after_remove<T: Scalar>(c: impl Into<CutCounts>, b: &BatchStats) -> Result<T> {
    quality_score(c.into().after_remove(b)?)
}

/// `Δf = f(S ∪ batch) − f(S)`.
pub fn gain_add<T: Scalar>(c: impl Into<CutCounts>, b: &BatchStats) -> Result<T> {
    let counts = c.into();
    Ok(quality_after_add::<T>(counts, b)? - quality_score::<T>(counts)?)
}

/// `Δf = f(S \ batch) − f(S)`.
pub fn gain_remove<T: Scalar>(c: impl Into<CutCounts>, b: &BatchStats) -> Result<T> {
    let counts = c.into();
    Ok(quality_after_remove::<T>(counts, b)? - quality_score::<T>(counts)?)
}

/// Exact ordering of `f(after)` against `f(before)`.
pub(crate) fn compare_quality(after: CutCounts, before: CutCounts) -> Result<std::cmp::Ordering> {
    let (a, b) = after.quality_fraction()?;
    let (c, d) = before.quality_fraction()?;
    Ok(cmp_fractions(a, b, c, d))
}
