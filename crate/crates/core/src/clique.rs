//! Maximum clique through a given vertex.
//!
//! Bron–Kerbosch with Tomita pivoting over the neighbourhood of the vertex,
//! with bitset candidate sets and a size bound.

use crate::error::Result;
use crate::graph::{Graph, VertexId};

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Self::empty(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

struct Search<'a> {
    candidates: &'a [VertexId],
    adjacency: Vec<Bits>,
    clique: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, p: Bits, x: Bits) {
        let p_count = p.count();
        if self.clique.len() + p_count < self.best.len() {
            return;
        }
        if p_count == 0 {
            if x.is_empty() {
                self.offer();
            }
            return;
        }
        let union = p.or(&x);
        let pivot = union
            .ones()
            .max_by_key(|&u| (p.and_count(&self.adjacency[u]), std::cmp::Reverse(u)))
            .expect("p is non-empty");
        let branch: Vec<usize> = p.and_not(&self.adjacency[pivot]).ones().collect();
        let (mut p, mut x) = (p, x);
        for v in branch {
            self.clique.push(v);
            self.run(p.and(&self.adjacency[v]), x.and(&self.adjacency[v]));
            self.clique.pop();
            p.clear(v);
            x.set(v);
        }
    }

    fn offer(&mut self) {
        let mut found = self.clique.clone();
        found.sort_unstable();
        // candidate indices are monotone in vertex id, so index order is id order
        if found.len() > self.best.len() || (found.len() == self.best.len() && found < self.best) {
            self.best = found;
        }
    }
}

/// Largest clique containing `q`, ties broken by the lexicographically
/// smallest ascending member list. Returns `[q]` for an isolated vertex.
pub fn max_clique_containing(g: &Graph, q: VertexId) -> Result<Vec<VertexId>> {
    g.check_vertex(q)?;
    let candidates = g.neighbors(q);
    let k = candidates.len();
    let adjacency: Vec<Bits> = candidates
        .iter()
        .map(|&u| {
            let mut b = Bits::empty(k);
            // both lists are sorted: merge
            let (mut i, mut j) = (0, 0);
            let nu = g.neighbors(u);
            while i < k && j < nu.len() {
                match candidates[i].cmp(&nu[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        b.set(i);
                        i += 1;
                        j += 1;
                    }
                }
            }
            b
        })
        .collect();
    let mut search = Search {
        candidates,
        adjacency,
        clique: Vec::new(),
        best: Vec::new(),
    };
    search.run(Bits::full(k), Bits::empty(k));
    let mut members: Vec<VertexId> = search.best.iter().map(|&i| search.candidates[i]).collect();
    members.push(q);
    members.sort_unstable();
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;
    use proptest::prelude::*;

    /// Every subset of N(q), largest first, lexicographic within a size.
    fn brute_force(g: &Graph, q: VertexId) -> Vec<VertexId> {
        let nbrs = g.neighbors(q);
        let mut best: Vec<VertexId> = vec![q];
        for mask in 0u32..(1 << nbrs.len()) {
            let mut set: Vec<VertexId> = (0..nbrs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| nbrs[i])
                .collect();
            let is_clique = set
                .iter()
                .enumerate()
                .all(|(i, &u)| set[i + 1..].iter().all(|&v| g.has_edge(u, v)));
            if !is_clique {
                continue;
            }
            set.push(q);
            set.sort_unstable();
            if set.len() > best.len() || (set.len() == best.len() && set < best) {
                best = set;
            }
        }
        best
    }

    #[test]
    fn nested_cliques_pick_the_largest() {
        // a 6-clique on 0..5 containing a 4- and 5-clique, plus a 4-clique
        // {5, 6, 7, 8} sharing vertex 5
        let mut edges = clique_edges(&[0, 1, 2, 3, 4, 5]);
        edges.extend(clique_edges(&[5, 6, 7, 8]));
        let g = Graph::from_edges(9, edges).unwrap();
        assert_eq!(max_clique_containing(&g, 0).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(max_clique_containing(&g, 5).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(max_clique_containing(&g, 7).unwrap(), vec![5, 6, 7, 8]);
    }

    #[test]
    fn path_falls_back_to_an_edge() {
        assert_eq!(max_clique_containing(&path(5), 2).unwrap(), vec![1, 2]);
    }

    #[test]
    fn isolated_vertex_is_a_singleton() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(max_clique_containing(&g, 2).unwrap(), vec![2]);
    }

    #[test]
    fn g_star_query_seven() {
        assert_eq!(max_clique_containing(&g_star(), 7).unwrap(), vec![7, 8, 9, 10]);
        assert_eq!(max_clique_containing(&g_star(), 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn wide_neighbourhood_crosses_word_boundaries() {
        // star with 130 leaves plus a triangle among leaves 100, 120, 129
        let mut edges: Vec<_> = (1..=130).map(|i| (0, i)).collect();
        edges.extend([(100, 120), (120, 129), (100, 129)]);
        let g = Graph::from_edges(131, edges).unwrap();
        assert_eq!(max_clique_containing(&g, 0).unwrap(), vec![0, 100, 120, 129]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            n in 2usize..14,
            raw in prop::collection::vec((0usize..14, 0usize..14), 1..60),
            q in 0usize..14,
        ) {
            let g = Graph::from_edges(n, raw.iter().map(|&(u, v)| (u % n, v % n))).unwrap();
            let q = q % n;
            prop_assert_eq!(max_clique_containing(&g, q).unwrap(), brute_force(&g, q));
        }
    }
}
