//! Exhaustive minimum-conductance search for tiny graphs.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::scalar::cmp_fractions;
use crate::Rational;

/// Largest graph [`brute_force_ccs`] will enumerate.
pub const ORACLE_MAX_VERTICES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub best_set: Vec<VertexId>,
    pub best_conductance: Rational,
    /// Number of distinct connected sets containing `q` attaining the minimum.
    pub optima_count: usize,
}

/// Minimum conductance over every connected vertex set containing `q`.
///
/// Sets whose cut denominator vanishes (including `V` itself) are infeasible.
/// Ties go to the smaller set, then the lexicographically smaller member
/// list.
pub fn brute_force_ccs(g: &Graph, q: VertexId) -> Result<OracleResult> {
    let n = g.n();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_MAX_VERTICES,
        });
    }
    g.check_vertex(q)?;
    let adj: Vec<u32> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let degree: Vec<u64> = g.vertices().map(|v| g.degree(v) as u64).collect();
    let total = g.total_volume();
    let q_bit = 1u32 << q;

    let mut best: Option<(u32, u64, u64)> = None;
    let mut optima_count = 0;

    // enumerate subsets of V \ {q} and add q back
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != q).collect();
    for sub in 0u32..(1u32 << others.len()) {
        let mut mask = q_bit;
        for (i, &v) in others.iter().enumerate() {
            if sub >> i & 1 == 1 {
                mask |= 1 << v;
            }
        }
        if !connected(mask, q_bit, &adj) {
            continue;
        }
        let (mut volume, mut d_in) = (0u64, 0u64);
        for v in ones(mask) {
            volume += degree[v];
            d_in += u64::from((adj[v] & mask).count_ones());
        }
        let den = volume.min(total - volume);
        if den == 0 {
            continue;
        }
        let cut = volume - d_in;
        let ord = match best {
            None => Ordering::Less,
            Some((_, bc, bd)) => cmp_fractions(cut, den, bc, bd),
        };
        match ord {
            Ordering::Less => {
                best = Some((mask, cut, den));
                optima_count = 1;
            }
            Ordering::Equal => {
                optima_count += 1;
                let (current, _, _) = best.expect("set above");
                if tie_break(mask, current) == Ordering::Less {
                    best = Some((mask, cut, den));
                }
            }
            Ordering::Greater => {}
        }
    }

    let (mask, cut, den) = best.ok_or(Error::DegenerateCut {
        volume: degree[q],
        total,
    })?;
    Ok(OracleResult {
        best_set: ones(mask).collect(),
        best_conductance: Rational::new(cut as i64, den as i64),
        optima_count,
    })
}

fn ones(mask: u32) -> impl Iterator<Item = VertexId> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

fn connected(mask: u32, start: u32, adj: &[u32]) -> bool {
    let mut reached = start;
    loop {
        let mut next = reached;
        for v in ones(reached) {
            next |= adj[v] & mask;
        }
        if next == reached {
            return reached == mask;
        }
        reached = next;
    }
}

fn tie_break(a: u32, b: u32) -> Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| ones(a).cmp(ones(b)))
}
