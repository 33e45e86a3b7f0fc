//! Immutable undirected graph in compressed adjacency form.

use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use crate::error::{Error, Result};

/// Dense vertex index in `0..n`.
pub type VertexId = usize;

/// Simple undirected graph with sorted neighbour lists.
///
/// Vertices are dense indices; the id each vertex had in its source file is
/// kept in [`Graph::external_id`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    external_ids: Vec<u64>,
    index: HashMap<u64, VertexId>,
}

impl Graph {
    /// Builds a graph from edges over external ids.
    ///
    /// Vertices are numbered in ascending external-id order. Self-loops and
    /// duplicates (in either orientation) are dropped.
    pub fn from_external_edges<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let edges: Vec<(u64, u64)> = edges.into_iter().filter(|(u, v)| u != v).collect();
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut ids: Vec<u64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<u64, VertexId> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let dense: Vec<(VertexId, VertexId)> = edges.iter().map(|(u, v)| (index[u], index[v])).collect();
        Ok(Self::assemble(ids.len(), dense, ids, index))
    }

    /// Builds a graph on vertices `0..n` whose external ids equal the dense ids.
    ///
    /// Unlike [`Graph::from_external_edges`], vertices without edges are kept.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let edges: Vec<(VertexId, VertexId)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= n {
                return Err(Error::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(Error::VertexOutOfRange(v));
            }
        }
        let ids: Vec<u64> = (0..n as u64).collect();
        let index = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        Ok(Self::assemble(n, edges, ids, index))
    }

    fn assemble<I>(n: usize, edges: I, external_ids: Vec<u64>, index: HashMap<u64, VertexId>) -> Self
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            external_ids,
            index,
        }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    /// Total volume `2m`.
    pub fn total_volume(&self) -> u64 {
        self.targets.len() as u64
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbours of `v`, ascending.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Sum of degrees over `set`.
    pub fn volume<'a, I>(&self, set: I) -> u64
    where
        I: IntoIterator<Item = &'a VertexId>,
    {
        set.into_iter().map(|&v| self.degree(v) as u64).sum()
    }

    pub fn external_id(&self, v: VertexId) -> u64 {
        self.external_ids[v]
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    /// Dense id of an external id, if present.
    pub fn vertex_of(&self, external: u64) -> Option<VertexId> {
        self.index.get(&external).copied()
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }
}

/// Parses a whitespace-separated edge list.
///
/// Blank lines and lines starting with `#` are skipped. Tokens after the first
/// two on a line are ignored.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    let mut edges = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("missing {what} vertex"),
            })?;
            token.parse::<u64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid vertex id {token:?}"),
            })
        };
        let u = next("first")?;
        let v = next("second")?;
        edges.push((u, v));
    }
    Graph::from_external_edges(edges)
}

impl Graph {
    /// Convenience wrapper around [`load_edge_list`].
    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        load_edge_list(source)
    }
}

/// Hop distances from a root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthMap {
    depth: Vec<u32>,
}

impl DepthMap {
    /// Marker for vertices outside the root's component.
    pub const UNREACHABLE: u32 = u32::MAX;

    /// Raw depth, [`DepthMap::UNREACHABLE`] for other components.
    pub fn raw(&self, v: VertexId) -> u32 {
        self.depth[v]
    }

    pub fn get(&self, v: VertexId) -> Option<u32> {
        match self.depth[v] {
            Self::UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.depth[v] != Self::UNREACHABLE
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    pub(crate) fn from_raw(depth: Vec<u32>) -> Self {
        DepthMap { depth }
    }
}

pub fn bfs_depths(g: &Graph, q: VertexId) -> Result<DepthMap> {
    g.check_vertex(q)?;
    let mut depth = vec![DepthMap::UNREACHABLE; g.n()];
    depth[q] = 0;
    let mut queue = VecDeque::from([q]);
    while let Some(u) = queue.pop_front() {
        let next = depth[u] + 1;
        for &v in g.neighbors(u) {
            if depth[v] == DepthMap::UNREACHABLE {
                depth[v] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(DepthMap { depth })
}

/// Whether the subgraph induced by `set` is connected.
pub fn is_connected_subset(g: &Graph, set: &[VertexId]) -> Result<bool> {
    let first = *set.first().ok_or(Error::EmptySet)?;
    let mut inside = vec![false; g.n()];
    for &v in set {
        g.check_vertex(v)?;
        inside[v] = true;
    }
    let target = inside.iter().filter(|&&b| b).count();
    Ok(connected_within(g, first, &mut inside) == target)
}

/// BFS from `start` through vertices flagged in `inside`, clearing flags as it
/// goes. Returns the number of vertices reached.
pub(crate) fn connected_within(g: &Graph, start: VertexId, inside: &mut [bool]) -> usize {
    if !inside[start] {
        return 0;
    }
    inside[start] = false;
    let mut reached = 1;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if inside[v] {
                inside[v] = false;
                reached += 1;
                stack.push(v);
            }
        }
    }
    reached
}

/// Subgraph induced by `set`.
///
/// Local ids follow ascending parent id. The returned vector maps local ids
/// back to parent ids; external ids are inherited from the parent.
pub fn induced_subgraph(g: &Graph, set: &[VertexId]) -> Result<(Graph, Vec<VertexId>)> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut to_parent = set.to_vec();
    for &v in &to_parent {
        g.check_vertex(v)?;
    }
    to_parent.sort_unstable();
    to_parent.dedup();
    let local: HashMap<VertexId, VertexId> =
        to_parent.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut offsets = Vec::with_capacity(to_parent.len() + 1);
    offsets.push(0);
    let mut targets = Vec::new();
    for &u in &to_parent {
        // parent lists are sorted and the map is monotone, so local lists stay sorted
        targets.extend(g.neighbors(u).iter().filter_map(|v| local.get(v).copied()));
        offsets.push(targets.len());
    }
    let external_ids: Vec<u64> = to_parent.iter().map(|&v| g.external_id(v)).collect();
    let index = external_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let sub = Graph {
        offsets,
        targets,
        external_ids,
        index,
    };
    Ok((sub, to_parent))
}


#[cfg(test)]
mod tests {
    use super::test_graphs::*;
    use super::*;
    use proptest::prelude::*;

    fn load(text: &str) -> Result<Graph> {
        load_edge_list(text.as_bytes())
    }

    #[test]
    fn loads_triangle() {
        let g = load("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.vertices().all(|v| g.degree(v) == 2));
    }

    #[test]
    fn drops_duplicates_and_self_loops() {
        let g = load("0 1\n1 0\n0 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
    }

    #[test]
    fn remaps_external_ids() {
        let g = load("# comment\n5 9\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.external_ids(), &[5, 9]);
        assert_eq!(g.vertex_of(9), Some(1));
        assert_eq!(g.vertex_of(7), None);
    }

    #[test]
    fn accepts_tabs_and_trailing_columns() {
        let g = load("1\t2\t0.5\n\n2 3\n").unwrap();
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn rejects_malformed_lines() {
        match load("0 1\n1 x\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected parse error on line 2, got {other:?}"),
        }
        assert!(matches!(load("0 1\n7\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(load("-1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn rejects_empty_graphs() {
        assert!(matches!(load("# nothing\n"), Err(Error::EmptyGraph)));
        assert!(matches!(load("3 3\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn depths_on_path() {
        let d = bfs_depths(&path(3), 0).unwrap();
        assert_eq!((0..3).map(|v| d.get(v)).collect::<Vec<_>>(), vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn depths_mark_other_components_unreachable() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let d = bfs_depths(&g, 0).unwrap();
        assert_eq!(d.raw(2), DepthMap::UNREACHABLE);
        assert!(!d.is_reachable(3));
        assert_eq!(d.get(1), Some(1));
    }

    #[test]
    fn depths_in_triangle() {
        for q in 0..3 {
            let d = bfs_depths(&triangle(), q).unwrap();
            assert!((0..3).all(|v| d.get(v).unwrap() <= 1));
        }
        assert!(bfs_depths(&triangle(), 3).is_err());
    }

    #[test]
    fn connectivity_of_subsets() {
        assert!(is_connected_subset(&triangle(), &[0, 1, 2]).unwrap());
        assert!(!is_connected_subset(&path(3), &[0, 2]).unwrap());
        assert!(is_connected_subset(&path(3), &[2]).unwrap());
        assert!(matches!(is_connected_subset(&path(3), &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn induced_subgraphs() {
        let (sub, map) = induced_subgraph(&triangle(), &[0, 1]).unwrap();
        assert_eq!((sub.n(), sub.m()), (2, 1));
        assert_eq!(map, vec![0, 1]);

        let g = two_k4_bridge();
        let (sub, map) = induced_subgraph(&g, &[3, 2, 1, 0]).unwrap();
        assert_eq!((sub.n(), sub.m()), (4, 6));
        assert_eq!(map, vec![0, 1, 2, 3]);

        let (sub, map) = induced_subgraph(&g, &[4, 7]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(sub.external_id(1), 7);
        assert_eq!(map[1], 7);

        assert!(matches!(induced_subgraph(&g, &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn g_star_shape() {
        let g = g_star();
        assert_eq!((g.n(), g.m()), (11, 15));
        assert_eq!(g.volume(&[0, 1, 2, 3]), 11);
        assert_eq!(g.volume(&[7, 8, 9, 10]), 13);
    }

    fn arb_edges() -> impl Strategy<Value = Vec<(u64, u64)>> {
        prop::collection::vec((0u64..40, 0u64..40), 1..120)
    }

    proptest! {
        #[test]
        fn loaded_graphs_are_simple_and_symmetric(edges in arb_edges()) {
            let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
            match load(&text) {
                Err(Error::EmptyGraph) => prop_assert!(edges.iter().all(|(u, v)| u == v)),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
                Ok(g) => {
                    let degree_sum: usize = g.vertices().map(|v| g.degree(v)).sum();
                    prop_assert_eq!(degree_sum, 2 * g.m());
                    for u in g.vertices() {
                        let nbrs = g.neighbors(u);
                        prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
                        prop_assert!(!nbrs.contains(&u));
                        for &v in nbrs {
                            prop_assert!(g.has_edge(v, u));
                        }
                    }
                }
            }
        }

        #[test]
        fn depths_differ_by_at_most_one_across_edges(edges in arb_edges(), q in 0usize..40) {
            if let Ok(g) = Graph::from_external_edges(edges) {
                let q = q % g.n();
                let d = bfs_depths(&g, q).unwrap();
                prop_assert_eq!(d.get(q), Some(0));
                for (u, v) in g.edges() {
                    prop_assert_eq!(d.is_reachable(u), d.is_reachable(v));
                    if let (Some(a), Some(b)) = (d.get(u), d.get(v)) {
                        prop_assert!(a.abs_diff(b) <= 1);
                    }
                }
            }
        }

        #[test]
        fn induced_on_everything_is_a_copy(edges in arb_edges()) {
            if let Ok(g) = Graph::from_external_edges(edges) {
                let all: Vec<_> = g.vertices().collect();
                let (sub, map) = induced_subgraph(&g, &all).unwrap();
                prop_assert_eq!(map, all);
                prop_assert_eq!(sub, g);
            }
        }
    }
}
