//! Ground-truth evaluation: F1 against labelled communities, query selection,
//! per-query reports and a planted-partition generator.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::metrics::{conductance_fraction, Community};
use crate::ppr::{pprcs_search, PprParams};
use crate::sccs::{sccs_search, SccsParams};

/// Labelled communities in dense vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    pub communities: Vec<Vec<VertexId>>,
    /// Vertex to the indices of the communities containing it.
    pub index: HashMap<VertexId, Vec<usize>>,
    /// Members dropped because their id is not in the graph.
    pub skipped_members: usize,
    /// Communities dropped for having fewer than three mapped members.
    pub dropped_communities: usize,
}

impl GroundTruth {
    pub const MIN_SIZE: usize = 3;

    /// Keeps communities with at least [`GroundTruth::MIN_SIZE`] distinct
    /// members, each sorted ascending.
    pub fn from_communities<I>(communities: I) -> Self
    where
        I: IntoIterator<Item = Vec<VertexId>>,
    {
        let mut gt = GroundTruth::default();
        for members in communities {
            gt.push(members);
        }
        gt
    }

    fn push(&mut self, mut members: Vec<VertexId>) {
        members.sort_unstable();
        members.dedup();
        if members.len() < Self::MIN_SIZE {
            self.dropped_communities += 1;
            return;
        }
        let idx = self.communities.len();
        for &v in &members {
            self.index.entry(v).or_default().push(idx);
        }
        self.communities.push(members);
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// Indices of the communities containing `v`, ascending.
    pub fn communities_of(&self, v: VertexId) -> &[usize] {
        self.index.get(&v).map_or(&[], Vec::as_slice)
    }
}

/// Reads one community per line of whitespace-separated external ids.
pub fn load_ground_truth<R: BufRead>(source: R, g: &Graph) -> Result<GroundTruth> {
    let mut gt = GroundTruth::default();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut members = Vec::new();
        for token in trimmed.split_whitespace() {
            let id: u64 = token.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid vertex id {token:?}"),
            })?;
            match g.vertex_of(id) {
                Some(v) => members.push(v),
                None => gt.skipped_members += 1,
            }
        }
        gt.push(members);
    }
    Ok(gt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision and recall of `found` against `truth`, treated as sets.
pub fn f1_score(found: &[VertexId], truth: &[VertexId]) -> Result<F1Score> {
    let found: BTreeSet<VertexId> = found.iter().copied().collect();
    let truth: BTreeSet<VertexId> = truth.iter().copied().collect();
    if found.is_empty() || truth.is_empty() {
        return Err(Error::EmptySet);
    }
    let hits = found.intersection(&truth).count();
    if hits == 0 {
        return Ok(F1Score {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        });
    }
    let precision = hits as f64 / found.len() as f64;
    let recall = hits as f64 / truth.len() as f64;
    Ok(F1Score {
        precision,
        recall,
        f1: 2.0 * precision * recall / (precision + recall),
    })
}

/// A query vertex and, when drawn from ground truth, the community it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuerySpec {
    pub vertex: VertexId,
    pub community: Option<usize>,
}

/// `k` distinct communities chosen uniformly, then one member of each.
pub fn select_queries(gt: &GroundTruth, k: usize, seed: u64) -> Result<Vec<QuerySpec>> {
    if k > gt.len() {
        return Err(Error::NotEnoughCommunities {
            requested: k,
            available: gt.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = index::sample(&mut rng, gt.len(), k);
    Ok(chosen
        .into_iter()
        .map(|c| {
            let members = &gt.communities[c];
            QuerySpec {
                vertex: members[rng.random_range(0..members.len())],
                community: Some(c),
            }
        })
        .collect())
}

/// Edges and blocks of a planted-partition graph, in external ids
/// `0..blocks * block_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedPartition {
    pub edges: Vec<(u64, u64)>,
    pub blocks: Vec<Vec<u64>>,
}

impl PlantedPartition {
    /// One `u v` line per edge.
    pub fn write_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// One line of member ids per block.
    pub fn write_blocks<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(u64::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Builds the graph and maps the blocks onto it.
    pub fn build(&self) -> Result<(Graph, GroundTruth)> {
        let g = Graph::from_external_edges(self.edges.iter().copied())?;
        let mut gt = GroundTruth::default();
        for block in &self.blocks {
            let mut members = Vec::with_capacity(block.len());
            for &id in block {
                match g.vertex_of(id) {
                    Some(v) => members.push(v),
                    None => gt.skipped_members += 1,
                }
            }
            gt.push(members);
        }
        Ok((g, gt))
    }
}

/// Samples a planted partition: every intra-block pair is an edge with
/// probability `p_in`, every inter-block pair with `p_out`.
///
/// Pairs are visited in row-major order and skipped geometrically, so the cost
/// is proportional to the number of edges rather than pairs.
pub fn planted_partition(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<PlantedPartition> {
    if blocks < 1 {
        return Err(Error::InvalidParameter("need at least one block".into()));
    }
    if block_size < GroundTruth::MIN_SIZE {
        return Err(Error::InvalidParameter(format!(
            "block_size must be at least {}, got {block_size}",
            GroundTruth::MIN_SIZE
        )));
    }
    for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {p}")));
        }
    }
    let bs = block_size as u64;
    let base = |b: usize| b as u64 * bs;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();

    let intra = (0..blocks).flat_map(|b| (0..bs).map(move |i| (base(b) + i, base(b) + i + 1, bs - i - 1)));
    sample_rows(&mut rng, p_in, intra, &mut edges);
    let inter = (0..blocks).flat_map(|a| {
        (a + 1..blocks).flat_map(move |b| (0..bs).map(move |i| (base(a) + i, base(b), bs)))
    });
    sample_rows(&mut rng, p_out, inter, &mut edges);

    edges.sort_unstable();
    let blocks = (0..blocks).map(|b| (base(b)..base(b) + bs).collect()).collect();
    Ok(PlantedPartition { edges, blocks })
}

/// Each row `(u, first, len)` stands for the pairs `(u, first + j)` with
/// `j < len`; each pair is kept independently with probability `p`.
fn sample_rows<R, I>(rng: &mut R, p: f64, rows: I, edges: &mut Vec<(u64, u64)>)
where
    R: Rng,
    I: Iterator<Item = (u64, u64, u64)>,
{
    if p <= 0.0 {
        return;
    }
    let gap = Geometric::new(p).expect("probability checked by caller");
    let mut skip = gap.sample(rng);
    for (u, first, len) in rows {
        while skip < len {
            edges.push((u, first + skip));
            skip = skip.saturating_add(1).saturating_add(gap.sample(rng));
        }
        skip -= len;
    }
}

/// [`planted_partition`] built into a graph with its blocks as ground truth.
pub fn generate_planted_partition(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, GroundTruth)> {
    planted_partition(blocks, block_size, p_in, p_out, seed)?.build()
}

/// A search method with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    Pprcs(PprParams<f64>),
    Sccs(SccsParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Pprcs(_) => "pprcs",
            Algorithm::Sccs(_) => "sccs",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Algorithm::Pprcs(p) => p.validate(),
            Algorithm::Sccs(p) => p.validate(),
        }
    }

    pub fn run(&self, g: &Graph, q: VertexId) -> Result<Community> {
        match self {
            Algorithm::Pprcs(p) => pprcs_search(g, q, p),
            Algorithm::Sccs(p) => sccs_search(g, q, p),
        }
    }
}

/// Outcome of one query. Vertex ids are external.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub query: u64,
    pub algorithm: String,
    pub params: Algorithm,
    pub community: Vec<u64>,
    /// `None` when the community or its complement has no volume.
    pub conductance: Option<f64>,
    /// `None` when the community has no volume.
    pub quality: Option<f64>,
    pub size: usize,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f1: Option<f64>,
}

/// Runs `algorithm` for one query and scores the result.
///
/// With ground truth, F1 is measured against the community the query was
/// drawn from, or the first community containing it when none is given.
pub fn evaluate_query(
    g: &Graph,
    gt: Option<&GroundTruth>,
    algorithm: &Algorithm,
    query: QuerySpec,
) -> Result<EvalReport> {
    let q = query.vertex;
    g.check_vertex(q)?;
    let external = g.external_id(q);
    let with_context = |e: Error| Error::Query {
        vertex: external,
        source: Box::new(e),
    };

    let truth = match gt {
        None => None,
        Some(gt) => {
            let idx = match query.community {
                Some(c) => c,
                None => *gt
                    .communities_of(q)
                    .first()
                    .ok_or(Error::NotInGroundTruth(external))?,
            };
            let members = gt.communities.get(idx).ok_or_else(|| {
                Error::InvalidParameter(format!("no ground-truth community {idx}"))
            })?;
            Some(members.as_slice())
        }
    };

    let start = Instant::now();
    let found = algorithm.run(g, q).map_err(with_context)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    if !found.contains(q) {
        return Err(with_context(Error::Contract("community misses the query".into())));
    }
    if !found.is_connected(g) {
        return Err(with_context(Error::Contract("community is disconnected".into())));
    }

    let members = found.to_vec();
    let conductance = match conductance_fraction(g, &members) {
        Ok((cut, den)) => Some(cut as f64 / den as f64),
        Err(Error::DegenerateCut { .. }) => None,
        Err(e) => return Err(with_context(e)),
    };
    let quality = found.quality::<f64>().ok();
    let score = truth.map(|t| f1_score(&members, t)).transpose()?;

    Ok(EvalReport {
        query: external,
        algorithm: algorithm.name().to_string(),
        params: *algorithm,
        community: members.iter().map(|&v| g.external_id(v)).collect(),
        conductance,
        quality,
        size: members.len(),
        runtime_ms,
        precision: score.map(|s| s.precision),
        recall: score.map(|s| s.recall),
        f1: score.map(|s| s.f1),
    })
}

/// Arithmetic means over a set of reports. Undefined values are left out of
/// their mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub algorithm: String,
    pub queries: usize,
    pub mean_runtime_ms: f64,
    pub mean_f1: Option<f64>,
    pub mean_precision: Option<f64>,
    pub mean_recall: Option<f64>,
    pub mean_conductance: Option<f64>,
    pub mean_quality: Option<f64>,
    pub mean_size: f64,
}

impl EvalSummary {
    pub fn of(reports: &[EvalReport]) -> Self {
        fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
            let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
            (n > 0).then(|| sum / n as f64)
        }
        let n = reports.len();
        let algorithm = reports.first().map_or_else(String::new, |r| r.algorithm.clone());
        EvalSummary {
            algorithm,
            queries: n,
            mean_runtime_ms: mean(reports.iter().map(|r| Some(r.runtime_ms))).unwrap_or(0.0),
            mean_f1: mean(reports.iter().map(|r| r.f1)),
            mean_precision: mean(reports.iter().map(|r| r.precision)),
            mean_recall: mean(reports.iter().map(|r| r.recall)),
            mean_conductance: mean(reports.iter().map(|r| r.conductance)),
            mean_quality: mean(reports.iter().map(|r| r.quality)),
            mean_size: mean(reports.iter().map(|r| Some(r.size as f64))).unwrap_or(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;
    use crate::sampler::SamplingParams;
    use proptest::prelude::*;

    fn external_graph(edges: &[(u64, u64)]) -> Graph {
        Graph::from_external_edges(edges.iter().copied()).unwrap()
    }

    #[test]
    fn ground_truth_filters_and_remaps() {
        let g = external_graph(&[(10, 20), (20, 30), (30, 40), (40, 10)]);
        let text = "10 20 30 40\n10 20\n\n10 20 99 30\n";
        let gt = load_ground_truth(text.as_bytes(), &g).unwrap();
        assert_eq!(gt.communities, vec![vec![0, 1, 2, 3], vec![0, 1, 2]]);
        assert_eq!(gt.skipped_members, 1);
        assert_eq!(gt.dropped_communities, 1);
        assert_eq!(gt.communities_of(0), &[0, 1]);
        assert_eq!(gt.communities_of(3), &[0]);
        assert!(load_ground_truth("1 x 3".as_bytes(), &g).is_err());
    }

    #[test]
    fn f1_examples() {
        let s = f1_score(&[1, 2, 3], &[1, 2, 3]).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = f1_score(&[1, 2], &[3, 4]).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = f1_score(&[0, 1, 2], &[1, 2, 3]).unwrap();
        for x in [s.precision, s.recall, s.f1] {
            assert!((x - 2.0 / 3.0).abs() < 1e-15);
        }
        assert!(matches!(f1_score(&[], &[1]), Err(Error::EmptySet)));
        assert!(matches!(f1_score(&[1], &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn query_selection() {
        let gt = GroundTruth::from_communities((0..5000).map(|c| vec![3 * c, 3 * c + 1, 3 * c + 2]));
        let picks = select_queries(&gt, 50, 7).unwrap();
        let distinct: BTreeSet<usize> = picks.iter().map(|p| p.community.unwrap()).collect();
        assert_eq!(distinct.len(), 50);
        for p in &picks {
            assert!(gt.communities[p.community.unwrap()].contains(&p.vertex));
        }
        assert_eq!(select_queries(&gt, 50, 7).unwrap(), picks);
        assert_ne!(select_queries(&gt, 50, 8).unwrap(), picks);

        let single = GroundTruth::from_communities([vec![4, 5, 6]]);
        let p = select_queries(&single, 1, 0).unwrap();
        assert_eq!(p[0].community, Some(0));
        assert!([4, 5, 6].contains(&p[0].vertex));
        assert!(matches!(
            select_queries(&single, 2, 0),
            Err(Error::NotEnoughCommunities { requested: 2, available: 1 })
        ));
    }

    #[test]
    fn planted_extremes() {
        let (g, gt) = generate_planted_partition(3, 5, 1.0, 0.0, 1).unwrap();
        assert_eq!(g.m(), 3 * 10);
        assert_eq!(gt.communities.len(), 3);
        for block in &gt.communities {
            assert!(crate::graph::is_connected_subset(&g, block).unwrap());
            assert_eq!(g.volume(block.iter()), 5 * 4);
        }
        assert!(matches!(
            generate_planted_partition(2, 5, 0.0, 0.0, 1),
            Err(Error::EmptyGraph)
        ));
        assert!(generate_planted_partition(2, 2, 0.5, 0.1, 1).is_err());
        assert!(generate_planted_partition(2, 5, 1.5, 0.1, 1).is_err());
    }

    #[test]
    fn planted_edge_counts_are_binomial() {
        let (p_in, p_out) = (0.5, 0.02);
        let intra_pairs = 120.0;
        let inter_pairs = 256.0;
        for seed in 0..5 {
            let pp = planted_partition(2, 16, p_in, p_out, seed).unwrap();
            let block = |v: u64| v / 16;
            let mut intra = [0.0f64; 2];
            let mut inter = 0.0;
            for &(u, v) in &pp.edges {
                if block(u) == block(v) {
                    intra[block(u) as usize] += 1.0;
                } else {
                    inter += 1.0;
                }
            }
            let sd_in = (intra_pairs * p_in * (1.0 - p_in)).sqrt();
            for count in intra {
                assert!((count - intra_pairs * p_in).abs() <= 3.0 * sd_in, "seed {seed}: {count}");
            }
            let sd_out = (inter_pairs * p_out * (1.0 - p_out)).sqrt();
            assert!((inter - inter_pairs * p_out).abs() <= 3.0 * sd_out, "seed {seed}: {inter}");
        }
    }

    #[test]
    fn planted_is_deterministic_and_round_trips() {
        let a = planted_partition(3, 8, 0.6, 0.05, 42).unwrap();
        assert_eq!(a, planted_partition(3, 8, 0.6, 0.05, 42).unwrap());
        let mut edges = Vec::new();
        a.write_edges(&mut edges).unwrap();
        let mut blocks = Vec::new();
        a.write_blocks(&mut blocks).unwrap();
        let g = crate::graph::load_edge_list(edges.as_slice()).unwrap();
        let gt = load_ground_truth(blocks.as_slice(), &g).unwrap();
        assert_eq!((g.clone(), gt.clone()), a.build().unwrap());
        assert_eq!(g.total_volume(), 2 * a.edges.len() as u64);
    }

    #[test]
    fn evaluate_on_g_star() {
        let g = g_star();
        let gt = GroundTruth::from_communities([vec![7, 8, 9, 10], vec![0, 1, 2, 3]]);
        let pprcs = Algorithm::Pprcs(PprParams { alpha: 0.10, r_max: 1e-4 });
        let r = evaluate_query(&g, Some(&gt), &pprcs, QuerySpec { vertex: 7, community: None }).unwrap();
        assert_eq!(r.community, vec![6, 7, 8, 9, 10]);
        assert!((r.conductance.unwrap() - 1.0 / 15.0).abs() < 1e-15);
        assert!((r.precision.unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(r.recall, Some(1.0));
        assert_eq!(r.size, 5);

        let sccs = Algorithm::Sccs(SccsParams {
            sampling: SamplingParams { dp: 3, l: 1, h: 100 },
            ..SccsParams::default()
        });
        let r = evaluate_query(&g, None, &sccs, QuerySpec { vertex: 7, community: None }).unwrap();
        assert!(r.f1.is_none());
        assert!(r.community.contains(&7));

        let err = evaluate_query(&g, Some(&gt), &pprcs, QuerySpec { vertex: 5, community: None });
        assert!(matches!(err, Err(Error::NotInGroundTruth(5))));
    }

    #[test]
    fn report_json_shape() {
        let g = two_k4_bridge();
        let alg = Algorithm::Sccs(SccsParams::default());
        let r = evaluate_query(&g, None, &alg, QuerySpec { vertex: 0, community: None }).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["algorithm"], "sccs");
        assert_eq!(json["params"]["name"], "sccs");
        assert_eq!(json["params"]["dp"], 3);
        assert!(json.get("f1").is_none());
        let summary = EvalSummary::of(&[r.clone(), r]);
        assert_eq!(summary.queries, 2);
        assert_eq!(summary.mean_f1, None);
        assert_eq!(summary.mean_size, 4.0);
    }

    proptest! {
        #[test]
        fn f1_bounds_and_symmetry(
            found in prop::collection::btree_set(0usize..30, 1..15),
            truth in prop::collection::btree_set(0usize..30, 1..15),
        ) {
            let found: Vec<_> = found.into_iter().collect();
            let truth: Vec<_> = truth.into_iter().collect();
            let s = f1_score(&found, &truth).unwrap();
            for x in [s.precision, s.recall, s.f1] {
                prop_assert!((0.0..=1.0).contains(&x));
            }
            prop_assert_eq!(s.f1 == 0.0, s.precision * s.recall == 0.0);
            let t = f1_score(&truth, &found).unwrap();
            prop_assert_eq!(s.precision, t.recall);
            prop_assert_eq!(s.recall, t.precision);
            prop_assert!((s.f1 - t.f1).abs() < 1e-15);
        }
    }
}
