//! Executable hardness and non-convergence evidence: the reduction from
//! minimum edge-deletion bipartization to bilinear optimization, and the two
//! counterexamples showing enclosure error can grow.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PzError, Result};
use crate::oracles::{corner_min, interval_hull_1d};
use crate::overapprox::{error_bound, overapproximate};
use crate::sets::PolyZonotope;
use crate::splitting::split_factor;

pub const GRAPH_VERTEX_CAP: usize = 20;

/// Undirected simple graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Edges are 0-based pairs `(i, j)` with `i < j < vertex_count`.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= j {
                return Err(PzError::Representation(format!(
                    "edge ({i}, {j}) must satisfy i < j"
                )));
            }
            if j >= vertex_count {
                return Err(PzError::Representation(format!(
                    "edge ({i}, {j}) exceeds vertex count {vertex_count}"
                )));
            }
            if !set.insert((i, j)) {
                return Err(PzError::Representation(format!(
                    "duplicate edge ({i}, {j})"
                )));
            }
        }
        Ok(Graph {
            vertex_count,
            edges: set,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| {
            let j = (i + 1) % n;
            (i.min(j), i.max(j))
        });
        Graph::new(n, edges).expect("cycle is simple for n ≥ 3")
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p.clamp(0.0, 1.0)) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(n, edges).expect("generated edges are simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }
}

/// One-dimensional set `Σ_{(i,j) ∈ E} ½ α_i α_j`.
///
/// Isolated vertices carry no term, so canonical form drops their factors.
pub fn graph_to_bilinear_pz(g: &Graph) -> PolyZonotope {
    let n = g.vertex_count();
    let exponents = g
        .edges()
        .map(|(i, j)| {
            let mut col = vec![0u32; n];
            col[i] = 1;
            col[j] = 1;
            col
        })
        .collect();
    PolyZonotope::new(
        vec![0.0],
        vec![],
        vec![vec![0.5]; g.edge_count()],
        exponents,
    )
    .expect("bilinear encoding is well formed")
}

fn check_vertex_cap(g: &Graph) -> Result<()> {
    if g.vertex_count() > GRAPH_VERTEX_CAP {
        return Err(PzError::Budget {
            what: "graph vertices",
            needed: g.vertex_count() as u128,
            cap: GRAPH_VERTEX_CAP as u128,
        });
    }
    Ok(())
}

/// `δ = |E|/2 + min over sign corners of the bilinear objective`.
pub fn bipartization_via_pz(g: &Graph) -> Result<usize> {
    check_vertex_cap(g)?;
    let pz = graph_to_bilinear_pz(g);
    let delta = g.edge_count() as f64 / 2.0 + corner_min(&pz)?.value;
    let rounded = delta.round();
    if (delta - rounded).abs() >= 1e-9 || rounded < 0.0 {
        return Err(PzError::Precondition(format!(
            "bipartization value {delta} is not a nonnegative integer"
        )));
    }
    Ok(rounded as usize)
}

/// Fewest edges inside the parts over every 2-colouring of the vertices.
pub fn bipartization_brute(g: &Graph) -> Result<usize> {
    check_vertex_cap(g)?;
    let n = g.vertex_count();
    if n == 0 {
        return Ok(0);
    }
    // the last vertex stays on side 0, halving the search
    let best = (0u32..1 << (n - 1))
        .map(|side| {
            g.edges()
                .filter(|&(i, j)| (side >> i & 1) == (side >> j & 1))
                .count()
        })
        .min()
        .unwrap_or(0);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartizeInstance {
    pub seed: u64,
    pub n: usize,
    pub edge_probability: f64,
    pub edges: usize,
    pub via_pz: usize,
    pub brute: usize,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartizeBench {
    pub instances: Vec<BipartizeInstance>,
    pub all_agree: bool,
}

/// Compare both bipartization routes on `count` random graphs with seeds
/// `seed, seed+1, …`.
pub fn bench_bipartize(n: usize, p: f64, seed: u64, count: usize) -> Result<BipartizeBench> {
    let instances = (0..count as u64)
        .map(|i| {
            let s = seed.wrapping_add(i);
            let g = Graph::random(n, p, s);
            let via_pz = bipartization_via_pz(&g)?;
            let brute = bipartization_brute(&g)?;
            Ok(BipartizeInstance {
                seed: s,
                n,
                edge_probability: p,
                edges: g.edge_count(),
                via_pz,
                brute,
                agree: via_pz == brute,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BipartizeBench {
        all_agree: instances.iter().all(|x| x.agree),
        instances,
    })
}

/// Coefficients of the Chebyshev polynomial `T_k`, indexed by degree, from
/// `T_{k+1} = 2x·T_k − T_{k−1}` in exact integers.
pub fn chebyshev_coefficients(k: usize) -> Result<Vec<i64>> {
    let mut prev = vec![1i64];
    let mut cur = vec![0i64, 1];
    if k == 0 {
        return Ok(prev);
    }
    for _ in 1..k {
        let mut next = vec![0i64; cur.len() + 1];
        for (d, &c) in cur.iter().enumerate() {
            next[d + 1] = c
                .checked_mul(2)
                .and_then(|v| v.checked_add(next[d + 1]))
                .ok_or_else(|| PzError::Precondition("Chebyshev coefficient overflow".into()))?;
        }
        for (d, &c) in prev.iter().enumerate() {
            next[d] = next[d]
                .checked_sub(c)
                .ok_or_else(|| PzError::Precondition("Chebyshev coefficient overflow".into()))?;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// `T_k` as a one-dimensional set, highest degree first. `k` must be odd and
/// in `1..=25`.
pub fn chebyshev_pz(k: usize) -> Result<PolyZonotope> {
    if k.is_multiple_of(2) || !(1..=25).contains(&k) {
        return Err(PzError::Precondition(format!(
            "Chebyshev order must be odd and in 1..=25, got {k}"
        )));
    }
    let coeffs = chebyshev_coefficients(k)?;
    let (dep, exps): (Vec<Vec<f64>>, Vec<Vec<u32>>) = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(d, &c)| (vec![c as f64], vec![d as u32]))
        .unzip();
    PolyZonotope::dependent(dep, exps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevRow {
    pub k: usize,
    pub terms: usize,
    pub error_bound: f64,
    /// Sampled range of `T_k` on `[−1, 1]`.
    pub hull: (f64, f64),
    /// Range of the zonotope enclosure.
    pub enclosure: (f64, f64),
}

pub fn chebyshev_report(max_order: usize, points: usize) -> Result<Vec<ChebyshevRow>> {
    (1..=max_order)
        .step_by(2)
        .map(|k| {
            let pz = chebyshev_pz(k)?;
            Ok(ChebyshevRow {
                k,
                terms: pz.term_count(),
                error_bound: error_bound(&pz),
                hull: interval_hull_1d(&pz, points)?,
                enclosure: overapproximate(&pz).interval()?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop2Report {
    pub parent: (f64, f64),
    pub children: Vec<(f64, f64)>,
    pub child_union: (f64, f64),
    /// Hausdorff distance between the parent enclosure and the children's
    /// enclosure union.
    pub hausdorff: f64,
    pub error_increased: bool,
}

/// Enclose `{α²}`, split it once, and enclose both halves.
pub fn prop2_counterexample() -> Prop2Report {
    let pz = crate::fixtures::square();
    let parent = overapproximate(&pz).interval().expect("one-dimensional");
    let (a, b) = split_factor(&pz, 0).expect("square has one factor");
    let children: Vec<(f64, f64)> = [a, b]
        .iter()
        .map(|c| overapproximate(c).interval().expect("one-dimensional"))
        .collect();
    let child_union = children
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
            (acc.0.min(c.0), acc.1.max(c.1))
        });
    let hausdorff = (parent.0 - child_union.0)
        .abs()
        .max((parent.1 - child_union.1).abs());
    Prop2Report {
        error_increased: child_union.0 < parent.0 || child_union.1 > parent.1,
        parent,
        children,
        child_union,
        hausdorff,
    }
}
