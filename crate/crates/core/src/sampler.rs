//! Depth- and size-bounded BFS sampling around a query vertex.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, DepthMap, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingParams {
    /// Depth admitted unconditionally.
    pub dp: u32,
    /// Keep going past `dp`, one whole level at a time, until this many
    /// vertices are admitted.
    pub l: usize,
    /// Hard cap on admitted vertices.
    pub h: usize,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            dp: 3,
            l: 300,
            h: 5000,
        }
    }
}

impl SamplingParams {
    pub fn validate(&self) -> Result<()> {
        if self.dp < 1 {
            return Err(Error::InvalidParameter("dp must be at least 1".into()));
        }
        if self.l < 1 || self.l > self.h {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= l <= h, got l={} h={}",
                self.l, self.h
            )));
        }
        Ok(())
    }
}

/// Induced subgraph on the sampled vertices.
///
/// Local ids follow ascending parent id.
#[derive(Debug, Clone)]
pub struct SampledSubgraph {
    pub graph: Graph,
    pub to_parent: Vec<VertexId>,
    /// Depth from the query in local ids.
    pub depths: DepthMap,
    query: VertexId,
    from_parent: HashMap<VertexId, VertexId>,
}

impl SampledSubgraph {
    /// Local id of the query vertex.
    pub fn query(&self) -> VertexId {
        self.query
    }

    pub fn local_of(&self, parent: VertexId) -> Option<VertexId> {
        self.from_parent.get(&parent).copied()
    }

    pub fn parent_of(&self, local: VertexId) -> VertexId {
        self.to_parent[local]
    }

    pub fn len(&self) -> usize {
        self.to_parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_parent.is_empty()
    }
}

/// BFS from `q`, level by level.
///
/// Every level up to `dp` is admitted; further levels are admitted while fewer
/// than `l` vertices are in. Within a level, parents are expanded in ascending
/// id and neighbours in ascending id. Admission stops the moment `h` vertices
/// are in.
pub fn sample_subgraph(g: &Graph, q: VertexId, p: &SamplingParams) -> Result<SampledSubgraph> {
    g.check_vertex(q)?;
    p.validate()?;

    let mut depth_of: HashMap<VertexId, u32> = HashMap::from([(q, 0)]);
    let mut admitted = vec![q];
    let mut frontier = vec![q];
    let mut level = 0u32;

    'levels: while !frontier.is_empty() && (level < p.dp || admitted.len() < p.l) {
        if admitted.len() >= p.h {
            break;
        }
        frontier.sort_unstable();
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if depth_of.contains_key(&v) {
                    continue;
                }
                depth_of.insert(v, level + 1);
                admitted.push(v);
                next.push(v);
                if admitted.len() >= p.h {
                    break 'levels;
                }
            }
        }
        frontier = next;
        level += 1;
    }

    let (graph, to_parent) = induced_subgraph(g, &admitted)?;
    let from_parent: HashMap<VertexId, VertexId> =
        to_parent.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let depths = DepthMap::from_raw(to_parent.iter().map(|v| depth_of[v]).collect());
    Ok(SampledSubgraph {
        query: from_parent[&q],
        graph,
        to_parent,
        depths,
        from_parent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_depths;
    use crate::graph::test_graphs::*;
    use proptest::prelude::*;

    fn params(dp: u32, l: usize, h: usize) -> SamplingParams {
        SamplingParams { dp, l, h }
    }

    #[test]
    fn one_hop_ball_on_path() {
        let s = sample_subgraph(&path(5), 2, &params(1, 1, 100)).unwrap();
        assert_eq!(s.to_parent, vec![1, 2, 3]);
        assert_eq!(s.query(), 1);
        assert_eq!(s.graph.m(), 2);
    }

    #[test]
    fn hard_cap_on_star() {
        let s = sample_subgraph(&star(5), 0, &params(1, 1, 3)).unwrap();
        assert_eq!(s.to_parent, vec![0, 1, 2]);
    }

    #[test]
    fn extends_past_dp_to_reach_l() {
        let s = sample_subgraph(&path(7), 0, &params(1, 4, 100)).unwrap();
        assert_eq!(s.to_parent, vec![0, 1, 2, 3]);
        assert_eq!(s.depths.get(3), Some(3));
    }

    #[test]
    fn finishes_the_level_that_reaches_l() {
        // star: level 1 has 5 leaves, l = 3 is met mid-level
        let s = sample_subgraph(&star(5), 0, &params(1, 3, 100)).unwrap();
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn small_component_is_returned_whole() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let s = sample_subgraph(&g, 0, &params(1, 50, 100)).unwrap();
        assert_eq!(s.to_parent, vec![0, 1, 2]);
    }

    #[test]
    fn g_star_depth_three() {
        let s = sample_subgraph(&g_star(), 7, &params(3, 1, 100)).unwrap();
        assert_eq!(s.to_parent, vec![4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(s.graph.m(), 9);
        assert_eq!(s.local_of(7), Some(s.query()));
        assert_eq!(s.parent_of(0), 4);
    }

    #[test]
    fn validates_parameters() {
        let g = path(3);
        assert!(sample_subgraph(&g, 0, &params(0, 1, 5)).is_err());
        assert!(sample_subgraph(&g, 0, &params(1, 6, 5)).is_err());
        assert!(sample_subgraph(&g, 0, &params(1, 0, 5)).is_err());
        assert!(sample_subgraph(&g, 9, &params(1, 1, 5)).is_err());
    }

    proptest! {
        #[test]
        fn sample_invariants(
            n in 2usize..50,
            raw in prop::collection::vec((0usize..50, 0usize..50), 1..150),
            q in 0usize..50,
            dp in 1u32..4,
            l in 1usize..30,
            extra in 0usize..30,
        ) {
            let g = Graph::from_edges(n, raw.iter().map(|&(u, v)| (u % n, v % n))).unwrap();
            let q = q % n;
            let h = l + extra;
            let p = params(dp, l, h);
            let s = sample_subgraph(&g, q, &p).unwrap();
            let parent_depths = bfs_depths(&g, q).unwrap();
            let component = g.vertices().filter(|&v| parent_depths.is_reachable(v)).count();

            prop_assert!(s.len() <= h);
            prop_assert!(s.len() >= l.min(component));
            prop_assert_eq!(s.depths.get(s.query()), Some(0));
            prop_assert_eq!(bfs_depths(&s.graph, s.query()).unwrap(), s.depths.clone());
            for (i, &v) in s.to_parent.iter().enumerate() {
                prop_assert_eq!(s.depths.get(i), parent_depths.get(v));
            }
            for (a, &u) in s.to_parent.iter().enumerate() {
                for (b, &v) in s.to_parent.iter().enumerate() {
                    prop_assert_eq!(g.has_edge(u, v), s.graph.has_edge(a, b));
                }
            }
            let again = sample_subgraph(&g, q, &p).unwrap();
            prop_assert_eq!(again.to_parent, s.to_parent);
        }
    }
}
