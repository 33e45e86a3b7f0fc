//! Sampled clique seeding, gain-driven expansion and boundary verification.
//!
//! The search runs on a BFS sample around the query. Quality is
//! `f(S) = D_in / (D_in + E_out)` measured inside the sample. Expansion adds
//! batches of up to `count` vertices whose combined effect does not lower `f`;
//! verification drops boundary vertices whose removal raises `f` while keeping
//! the set connected. The two alternate until neither changes the set.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clique::max_clique_containing;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::metrics::{batch_stats_remove, compare_quality, Community, CutCounts};
use crate::sampler::{sample_subgraph, SamplingParams};
use crate::scalar::cmp_fractions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccsParams {
    #[serde(flatten)]
    pub sampling: SamplingParams,
    /// Longest run of tentative additions tried before giving up.
    pub count: usize,
    /// Cap on expansion/verification alternations.
    pub max_rounds: usize,
}

impl Default for SccsParams {
    fn default() -> Self {
        SccsParams {
            sampling: SamplingParams::default(),
            count: 2,
            max_rounds: 100,
        }
    }
}

impl SccsParams {
    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        if self.count < 1 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        if self.max_rounds < 1 {
            return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
        }
        Ok(())
    }
}

/// Tentative additions not yet committed, with their combined gain over the
/// committed community.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpansionBatch {
    pub vertices: Vec<VertexId>,
    pub cumulative_gain: f64,
}

/// Non-anchor members with at least one edge leaving the community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySet {
    pub vertices: Vec<VertexId>,
}

impl BoundarySet {
    pub fn of(g: &Graph, c: &Community) -> Self {
        BoundarySet {
            vertices: c.boundary(g),
        }
    }
}

/// One change to the community, in the ids of the graph it happened on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEvent {
    Commit {
        batch: Vec<VertexId>,
        before: (u64, u64),
        after: (u64, u64),
    },
    Remove {
        vertex: VertexId,
        before: (u64, u64),
        after: (u64, u64),
    },
}

impl TraceEvent {
    fn counts(&self) -> (CutCounts, CutCounts) {
        let (before, after) = match self {
            TraceEvent::Commit { before, after, .. } | TraceEvent::Remove { before, after, .. } => {
                (before, after)
            }
        };
        (CutCounts::new(before.0, before.1), CutCounts::new(after.0, after.1))
    }
}

/// Record of an instrumented search.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SccsTrace {
    pub sample_size: usize,
    /// Seed clique in parent ids.
    pub seed: Vec<VertexId>,
    /// Events in sample-local ids; counts are `(d_in, e_out)` in the sample.
    pub events: Vec<TraceEvent>,
    pub rounds: usize,
}

impl SccsTrace {
    /// Whether every commit kept `f` from falling and every removal raised it.
    pub fn is_monotone(&self) -> bool {
        self.events.iter().all(|e| {
            let (before, after) = e.counts();
            let Ok(ord) = compare_quality(after, before) else {
                return false;
            };
            match e {
                TraceEvent::Commit { .. } => ord != Ordering::Less,
                TraceEvent::Remove { .. } => ord == Ordering::Greater,
            }
        }) && self.events.windows(2).all(|w| w[0].counts().1 == w[1].counts().0)
    }

    fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }
}

fn pair(c: CutCounts) -> (u64, u64) {
    (c.d_in, c.e_out)
}

/// Largest clique through `q` in the sample, as a community anchored at `q`.
pub fn initial_community(g_sample: &Graph, q: VertexId) -> Result<Community> {
    let clique = max_clique_containing(g_sample, q)?;
    Community::new(g_sample, clique, q)
}

/// One expansion pass. Returns the community and whether anything was
/// committed.
pub fn expansion(g_sample: &Graph, c: Community, count: usize) -> Result<(Community, bool)> {
    expand(g_sample, c, count, &mut SccsTrace::default())
}

fn expand(g: &Graph, mut committed: Community, count: usize, trace: &mut SccsTrace) -> Result<(Community, bool)> {
    let mut tentative = committed.clone();
    let mut batch = ExpansionBatch::default();
    let mut changed = false;

    // frontier vertex -> links into the tentative set
    let mut frontier: BTreeMap<VertexId, u64> = BTreeMap::new();
    for v in tentative.members() {
        for &u in g.neighbors(v) {
            if !tentative.contains(u) {
                *frontier.entry(u).or_default() += 1;
            }
        }
    }

    while !frontier.is_empty() && batch.vertices.len() < count {
        let base = tentative.counts();
        let mut top: Option<(VertexId, u64, u64)> = None;
        for (&v, &links) in &frontier {
            let num = base.d_in + 2 * links;
            let den = base.volume() + g.degree(v) as u64;
            let better = match top {
                None => true,
                Some((_, bn, bd)) => cmp_fractions(num, den, bn, bd) == Ordering::Greater,
            };
            if better {
                top = Some((v, num, den));
            }
        }
        let (v_top, _, _) = top.expect("frontier is non-empty");

        tentative.add(g, v_top)?;
        frontier.remove(&v_top);
        for &u in g.neighbors(v_top) {
            if !tentative.contains(u) {
                *frontier.entry(u).or_default() += 1;
            }
        }
        batch.vertices.push(v_top);
        let ord = compare_quality(tentative.counts(), committed.counts())?;
        batch.cumulative_gain =
            tentative.quality::<f64>()? - committed.quality::<f64>()?;

        if ord != Ordering::Less {
            let before = committed.counts();
            for &v in &batch.vertices {
                committed.add(g, v)?;
            }
            trace.push(TraceEvent::Commit {
                batch: std::mem::take(&mut batch.vertices),
                before: pair(before),
                after: pair(committed.counts()),
            });
            changed = true;
        }
    }
    Ok((committed, changed))
}

/// One verification pass over the boundary, ascending. Returns the community
/// and whether any vertex was removed.
pub fn verification(g_sample: &Graph, c: Community) -> Result<(Community, bool)> {
    verify(g_sample, c, &mut SccsTrace::default())
}

fn verify(g: &Graph, mut c: Community, trace: &mut SccsTrace) -> Result<(Community, bool)> {
    let boundary = BoundarySet::of(g, &c);
    let mut changed = false;
    for v in boundary.vertices {
        let before = c.counts();
        let stats = batch_stats_remove(g, &c, &[v])?;
        let after = before.after_remove(&stats)?;
        if after.volume() == 0 || compare_quality(after, before)? != Ordering::Greater {
            continue;
        }
        if !c.connected_without(g, v) {
            continue;
        }
        c.remove(g, v)?;
        trace.push(TraceEvent::Remove {
            vertex: v,
            before: pair(before),
            after: pair(c.counts()),
        });
        changed = true;
    }
    Ok((c, changed))
}

/// Runs the full search and returns the community in parent-graph ids.
pub fn sccs_search(g: &Graph, q: VertexId, p: &SccsParams) -> Result<Community> {
    sccs_search_traced(g, q, p).map(|(c, _)| c)
}

/// [`sccs_search`] plus a record of every commit and removal.
pub fn sccs_search_traced(g: &Graph, q: VertexId, p: &SccsParams) -> Result<(Community, SccsTrace)> {
    g.check_vertex(q)?;
    p.validate()?;
    let sample = sample_subgraph(g, q, &p.sampling)?;
    let sg = &sample.graph;
    let mut trace = SccsTrace {
        sample_size: sample.len(),
        ..SccsTrace::default()
    };

    let mut c = initial_community(sg, sample.query())?;
    trace.seed = c.members().map(|v| sample.parent_of(v)).collect();

    for _ in 0..p.max_rounds {
        trace.rounds += 1;
        let (expanded, grew) = expand(sg, c, p.count, &mut trace)?;
        let (pruned, shrank) = verify(sg, expanded, &mut trace)?;
        c = pruned;
        if !grew && !shrank {
            break;
        }
    }

    let members = c.members().map(|v| sample.parent_of(v));
    let result = Community::new(g, members, q)?;
    Ok((result, trace))
}
