//! Forward-push personalized PageRank and the connected sweep cut built on it.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::metrics::Community;
use crate::scalar::cmp_fractions;
use crate::union_find::UnionFind;

/// Jump probability and push threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PprParams<T> {
    pub alpha: T,
    pub r_max: T,
}

impl<T: Float + FromPrimitive> PprParams<T> {
    pub fn new(alpha: T, r_max: T) -> Result<Self> {
        let p = PprParams { alpha, r_max };
        p.validate()?;
        Ok(p)
    }

    /// `alpha = 0.15`, `r_max = 1/n`.
    pub fn defaults_for(g: &Graph) -> Self {
        PprParams {
            alpha: T::from_f64(0.15).unwrap(),
            r_max: T::one() / T::from_usize(g.n()).unwrap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {:?}",
                self.alpha.to_f64()
            )));
        }
        if !(self.r_max > T::zero() && self.r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r_max must be positive, got {:?}",
                self.r_max.to_f64()
            )));
        }
        Ok(())
    }
}

/// Sparse estimate and residual vectors left by [`forward_push`].
#[derive(Debug, Clone, PartialEq)]
pub struct PprState<T> {
    pi_hat: HashMap<VertexId, T>,
    residual: HashMap<VertexId, T>,
    pushes: usize,
}

impl<T: Float> PprState<T> {
    pub fn pi_hat(&self, v: VertexId) -> T {
        self.pi_hat.get(&v).copied().unwrap_or_else(T::zero)
    }

    pub fn residual(&self, v: VertexId) -> T {
        self.residual.get(&v).copied().unwrap_or_else(T::zero)
    }

    /// Vertices with a non-zero estimate, ascending.
    pub fn support(&self) -> Vec<VertexId> {
        let mut vs: Vec<_> = self
            .pi_hat
            .iter()
            .filter(|(_, &p)| p > T::zero())
            .map(|(&v, _)| v)
            .collect();
        vs.sort_unstable();
        vs
    }

    /// Non-zero residual entries, ascending by vertex.
    pub fn residual_entries(&self) -> Vec<(VertexId, T)> {
        let mut es: Vec<_> = self
            .residual
            .iter()
            .filter(|(_, &r)| r > T::zero())
            .map(|(&v, &r)| (v, r))
            .collect();
        es.sort_unstable_by_key(|&(v, _)| v);
        es
    }

    pub fn estimate_mass(&self) -> T {
        sorted_sum(&self.pi_hat)
    }

    pub fn residual_mass(&self) -> T {
        sorted_sum(&self.residual)
    }

    /// Number of push operations performed.
    pub fn pushes(&self) -> usize {
        self.pushes
    }
}

fn sorted_sum<T: Float>(map: &HashMap<VertexId, T>) -> T {
    let mut entries: Vec<_> = map.iter().collect();
    entries.sort_unstable_by_key(|(&v, _)| v);
    entries.into_iter().fold(T::zero(), |acc, (_, &x)| acc + x)
}

/// Runs forward push from `q` until every residual is below `r_max · d(v)`.
///
/// Vertices above threshold are processed in FIFO order; a vertex sits in the
/// queue at most once at a time.
pub fn forward_push<T>(g: &Graph, q: VertexId, p: &PprParams<T>) -> Result<PprState<T>>
where
    T: Float + FromPrimitive + Debug,
{
    g.check_vertex(q)?;
    p.validate()?;
    if g.degree(q) == 0 {
        return Err(Error::IsolatedQuery(q));
    }
    let threshold = |v: VertexId| p.r_max * T::from_usize(g.degree(v)).unwrap();

    let mut pi_hat: HashMap<VertexId, T> = HashMap::new();
    let mut residual: HashMap<VertexId, T> = HashMap::from([(q, T::one())]);
    let mut queued: HashMap<VertexId, bool> = HashMap::new();
    let mut queue = VecDeque::new();
    if T::one() >= threshold(q) {
        queue.push_back(q);
        queued.insert(q, true);
    }
    let mut pushes = 0;

    while let Some(t) = queue.pop_front() {
        queued.insert(t, false);
        let r = residual.get(&t).copied().unwrap_or_else(T::zero);
        if r < threshold(t) {
            continue;
        }
        pushes += 1;
        let degree = T::from_usize(g.degree(t)).unwrap();
        let share = (T::one() - p.alpha) * r / degree;
        let estimate = pi_hat.entry(t).or_insert_with(T::zero);
        *estimate = *estimate + p.alpha * r;
        residual.insert(t, T::zero());
        for &u in g.neighbors(t) {
            let ru = residual.entry(u).or_insert_with(T::zero);
            *ru = *ru + share;
            if *ru >= threshold(u) && !queued.get(&u).copied().unwrap_or(false) {
                queued.insert(u, true);
                queue.push_back(u);
            }
        }
    }

    Ok(PprState {
        pi_hat,
        residual,
        pushes,
    })
}

/// Sweep order: `q` first, then vertices with a positive estimate by
/// descending `π̂(v) / d(v)`, ties by ascending id.
pub fn sweep_order<T: Float + FromPrimitive>(g: &Graph, q: VertexId, state: &PprState<T>) -> Vec<VertexId> {
    let mut scored: Vec<(VertexId, T)> = state
        .support()
        .into_iter()
        .filter(|&v| v != q)
        .map(|v| (v, state.pi_hat(v) / T::from_usize(g.degree(v)).unwrap()))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    std::iter::once(q).chain(scored.into_iter().map(|(v, _)| v)).collect()
}

/// Scans every prefix of `order` and returns the connected prefix with the
/// smallest conductance (earliest on ties). Falls back to `{order[0]}` when no
/// prefix has a well-defined cut.
pub fn sweep_cut(g: &Graph, order: &[VertexId]) -> Result<Community> {
    let q = *order.first().ok_or(Error::EmptySet)?;
    let total = g.total_volume();
    let mut position: HashMap<VertexId, usize> = HashMap::with_capacity(order.len());
    let mut uf = UnionFind::new();
    let (mut volume, mut cut) = (0u64, 0u64);
    let mut best: Option<(usize, u64, u64)> = None;

    for (i, &v) in order.iter().enumerate() {
        g.check_vertex(v)?;
        let id = uf.push();
        position.insert(v, id);
        let mut links = 0u64;
        for u in g.neighbors(v) {
            if let Some(&j) = position.get(u) {
                links += 1;
                uf.union(id, j);
            }
        }
        volume += g.degree(v) as u64;
        cut = cut + g.degree(v) as u64 - 2 * links;
        let den = volume.min(total - volume);
        if uf.components() != 1 || den == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, bc, bd)) => cmp_fractions(cut, den, bc, bd) == Ordering::Less,
        };
        if better {
            best = Some((i, cut, den));
        }
    }

    let len = best.map_or(1, |(i, _, _)| i + 1);
    Community::new(g, order[..len].iter().copied(), q)
}

/// Forward push from `q`, then the connected sweep cut over `π̂ D⁻¹`.
pub fn pprcs_search<T>(g: &Graph, q: VertexId, p: &PprParams<T>) -> Result<Community>
where
    T: Float + FromPrimitive + Debug,
{
    let state = forward_push(g, q, p)?;
    sweep_cut(g, &sweep_order(g, q, &state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;
    use crate::metrics::conductance;
    use crate::Rational;
    use proptest::prelude::*;

    #[test]
    fn single_edge_hand_trace() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = forward_push(&g, 0, &PprParams { alpha: 0.5, r_max: 0.3 }).unwrap();
        assert_eq!(s.pushes(), 2);
        assert_eq!(s.pi_hat(0), 0.5);
        assert_eq!(s.pi_hat(1), 0.25);
        assert_eq!(s.residual(0), 0.25);
        assert_eq!(s.residual(1), 0.0);
    }

    #[test]
    fn threshold_above_unit_mass_means_no_push() {
        let g = star(3);
        let s = forward_push(&g, 0, &PprParams { alpha: 0.15, r_max: 0.5 }).unwrap();
        assert_eq!(s.pushes(), 0);
        assert!(s.support().is_empty());
        assert_eq!(s.residual(0), 1.0);
    }

    #[test]
    fn triangle_is_symmetric_and_conserves_mass() {
        let s = forward_push(&triangle(), 0, &PprParams { alpha: 0.15, r_max: 1e-6 }).unwrap();
        assert!((s.estimate_mass() + s.residual_mass() - 1.0).abs() < 1e-9);
        // FIFO order breaks the symmetry by at most the residual threshold
        assert!((s.pi_hat(1) - s.pi_hat(2)).abs() < 2.0 * 1e-6 * 2.0);
        for v in 0..3 {
            assert!(s.residual(v) < 1e-6 * 2.0);
        }
    }

    #[test]
    fn single_precision_push() {
        let s = forward_push(&triangle(), 0, &PprParams::<f32> { alpha: 0.15, r_max: 1e-4 }).unwrap();
        assert!((s.estimate_mass() + s.residual_mass() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_isolated_query_and_bad_params() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(
            forward_push(&g, 2, &PprParams { alpha: 0.15, r_max: 0.01 }),
            Err(Error::IsolatedQuery(2))
        ));
        assert!(forward_push(&g, 0, &PprParams { alpha: 1.0, r_max: 0.01 }).is_err());
        assert!(forward_push(&g, 0, &PprParams { alpha: 0.1, r_max: 0.0 }).is_err());
        assert!(PprParams::new(0.2, f64::NAN).is_err());
    }

    #[test]
    fn pprcs_on_g_star_reaches_the_optimum() {
        // the K4 {7..10} scores 1/13, but {6..10} splits the volume evenly
        // and scores 1/15, which the oracle confirms is optimal
        let g = g_star();
        let c = pprcs_search(&g, 7, &PprParams { alpha: 0.10, r_max: 1e-4 }).unwrap();
        assert_eq!(c.to_vec(), vec![6, 7, 8, 9, 10]);
        let phi = conductance::<Rational>(&g, &c.to_vec()).unwrap();
        assert_eq!(phi, Rational::new(1, 15));
        assert_eq!(phi, crate::oracle::brute_force_ccs(&g, 7).unwrap().best_conductance);
    }

    #[test]
    fn pprcs_stays_in_query_component() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let c = pprcs_search(&g, 4, &PprParams { alpha: 0.15, r_max: 1e-5 }).unwrap();
        assert!(c.contains(4));
        assert!(c.members().all(|v| (3..6).contains(&v)));
    }

    #[test]
    fn pprcs_star_contains_centre() {
        let g = star(6);
        let c = pprcs_search(&g, 0, &PprParams::<f64>::defaults_for(&g)).unwrap();
        assert!(c.contains(0));
        assert!(c.is_connected(&g));
    }

    #[test]
    fn sweep_skips_disconnected_prefixes() {
        // order 0, 2, 1: the prefix {0, 2} is disconnected on a path
        let g = path(6);
        let c = sweep_cut(&g, &[0, 2, 1]).unwrap();
        assert!(c.is_connected(&g));
        assert_eq!(c.to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn sweep_order_puts_query_first_and_breaks_ties_by_id() {
        let g = star(4);
        let s = forward_push(&g, 1, &PprParams { alpha: 0.2, r_max: 1e-6 }).unwrap();
        let order = sweep_order(&g, 1, &s);
        assert_eq!(order[0], 1);
        // leaves 2, 3, 4 are symmetric
        let tail: Vec<_> = order.iter().copied().filter(|&v| v >= 2).collect();
        assert_eq!(tail, vec![2, 3, 4]);
    }

    proptest! {
        #[test]
        fn push_invariants_hold(
            n in 2usize..60,
            raw in prop::collection::vec((0usize..60, 0usize..60), 1..200),
            alpha in 0.05f64..0.95,
            log_r in -6.0f64..-1.0,
        ) {
            let g = Graph::from_edges(n, raw.iter().map(|&(u, v)| (u % n, v % n))).unwrap();
            let Some(q) = g.vertices().find(|&v| g.degree(v) > 0) else { return Ok(()); };
            let p = PprParams { alpha, r_max: 10f64.powf(log_r) };
            let s = forward_push(&g, q, &p).unwrap();
            prop_assert!((s.estimate_mass() + s.residual_mass() - 1.0).abs() < 1e-9);
            for v in g.vertices() {
                prop_assert!(s.residual(v) >= 0.0 && s.pi_hat(v) >= 0.0);
                if g.degree(v) > 0 {
                    prop_assert!(s.residual(v) < p.r_max * g.degree(v) as f64);
                } else {
                    prop_assert_eq!(s.residual(v), 0.0);
                }
            }
            let c = pprcs_search(&g, q, &p).unwrap();
            prop_assert!(c.contains(q) && c.is_connected(&g));
        }
    }
}
