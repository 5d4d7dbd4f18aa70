//! Overapproximate-and-split halfspace intersection checking.
//!
//! Each node of the split tree is first enclosed in a zonotope. If the
//! enclosure misses the halfspace the node is closed. Otherwise member points
//! are sampled and tested; a point inside the halfspace ends the search with
//! a witness. Failing both, the node is split and its children queued.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PzError, Result};
use crate::oracles::{certified_lower_bound, BoundMethod};
use crate::overapprox::{contraction_factor, error_bound, overapproximate};
use crate::sets::{Halfspace, PolyZonotope};
use crate::splitting::{split_once, SplitNode, SplitStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Every leaf's enclosure is disjoint from the halfspace.
    Separated,
    /// A verified member point lies in the halfspace.
    Witness,
    /// The split budget ran out first.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionVerdict {
    pub outcome: Outcome,
    #[serde(rename = "witness", skip_serializing_if = "Option::is_none")]
    pub witness_point: Option<Vec<f64>>,
    /// `(α, β)` of the witness in the input set's factors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_factors: Option<(Vec<f64>, Vec<f64>)>,
    pub splits_used: usize,
    pub leaves_closed: usize,
    /// Largest `‖G_D‖` among nodes left open when the search stopped.
    pub residual_bound: f64,
    /// Deepest node examined.
    pub max_depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub strategy: SplitStrategy,
    /// Number of split operations allowed.
    pub max_splits: usize,
    pub samples_per_node: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strategy: SplitStrategy::Cyclic,
            max_splits: 4096,
            samples_per_node: 1,
            seed: 0,
        }
    }
}

struct Queued {
    node: SplitNode,
    seq: u64,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // loosest node first, FIFO among equals
    fn cmp(&self, other: &Self) -> Ordering {
        self.node
            .dep_norm
            .total_cmp(&other.node.dep_norm)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn witness(
    pz: &PolyZonotope,
    hs: &Halfspace,
    node: &SplitNode,
    alpha: &[f64],
    beta: Vec<f64>,
) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let root_alpha = node.root_factors(alpha);
    let point = pz.evaluate(&root_alpha, &beta).ok()?;
    hs.contains(&point).then_some((point, root_alpha, beta))
}

/// Decide whether `pz` meets `hs`.
///
/// `Separated` is only returned when every node has been closed by its
/// zonotope enclosure, and `Witness` only with a point re-evaluated on `pz`
/// itself.
pub fn check_halfspace(
    pz: &PolyZonotope,
    hs: &Halfspace,
    opts: CheckOptions,
) -> Result<IntersectionVerdict> {
    if hs.dim() != pz.dim() {
        return Err(PzError::DimensionMismatch {
            context: "halfspace normal",
            expected: pz.dim(),
            found: hs.dim(),
        });
    }
    if opts.samples_per_node == 0 {
        return Err(PzError::Precondition(
            "samples_per_node must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Queued {
        node: SplitNode::root(pz.clone()),
        seq,
    });

    let mut verdict = IntersectionVerdict {
        outcome: Outcome::Separated,
        witness_point: None,
        witness_factors: None,
        splits_used: 0,
        leaves_closed: 0,
        residual_bound: 0.0,
        max_depth: 0,
    };
    let mut open = false;

    while let Some(Queued { node, .. }) = heap.pop() {
        verdict.max_depth = verdict.max_depth.max(node.depth);
        let set = &node.set;
        let z = overapproximate(set);
        if z.support_min(hs.normal())? > hs.offset() {
            verdict.leaves_closed += 1;
            continue;
        }

        let r = set.factor_count();
        let q = set.indep_count();
        if r == 0 {
            // the enclosure is exact; its minimizer is a member
            let beta = z.argmin_factors(hs.normal())?;
            if let Some((p, a, b)) = witness(pz, hs, &node, &[], beta) {
                verdict.outcome = Outcome::Witness;
                verdict.witness_point = Some(p);
                verdict.witness_factors = Some((a, b));
                return Ok(verdict);
            }
        }
        for k in 0..opts.samples_per_node {
            let (alpha, beta): (Vec<f64>, Vec<f64>) = if k == 0 {
                (vec![0.0; r], vec![0.0; q])
            } else {
                (
                    (0..r).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
                    (0..q).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
                )
            };
            if !hs.contains(&set.evaluate(&alpha, &beta)?) {
                continue;
            }
            if let Some((p, a, b)) = witness(pz, hs, &node, &alpha, beta) {
                verdict.outcome = Outcome::Witness;
                verdict.witness_point = Some(p);
                verdict.witness_factors = Some((a, b));
                return Ok(verdict);
            }
        }

        if r == 0 || verdict.splits_used >= opts.max_splits {
            open = true;
            verdict.residual_bound = verdict.residual_bound.max(node.dep_norm);
            continue;
        }
        let (a, b) = split_once(&node, opts.strategy)?;
        verdict.splits_used += 1;
        for child in [a, b] {
            seq += 1;
            heap.push(Queued { node: child, seq });
        }
    }
    if open {
        verdict.outcome = Outcome::Exhausted;
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminationEstimate {
    /// Certified `min_{x ∈ PZ} normalᵀx − offset`.
    pub margin: f64,
    pub margin_method: BoundMethod,
    /// `‖G_D‖` of the set projected onto the normal.
    pub projected_error_bound: f64,
    pub rho: Option<f64>,
    /// Smallest `R` with `ρ^R · projected_error_bound < margin`.
    pub rounds: usize,
    /// `rounds · r`: the split depth by which cyclic splitting must separate.
    pub split_depth: usize,
}

/// Smallest `R ≥ 0` with `rho^R · bound < margin`.
pub fn rounds_needed(rho: f64, bound: f64, margin: f64) -> usize {
    if bound < margin {
        return 0;
    }
    let mut rounds = ((margin / bound).ln() / rho.ln()).ceil().max(0.0) as usize;
    while rho.powi(rounds as i32) * bound >= margin {
        rounds += 1;
    }
    while rounds > 0 && rho.powi(rounds as i32 - 1) * bound < margin {
        rounds -= 1;
    }
    rounds
}

/// Predict how many cyclic rounds guarantee separation when the set and
/// halfspace are disjoint. Diagnostic only.
pub fn termination_margin(pz: &PolyZonotope, hs: &Halfspace) -> Result<TerminationEstimate> {
    let proj = pz.scalar_project(hs.normal())?;
    let lower = certified_lower_bound(&proj)?;
    let margin = lower.value - hs.offset();
    if margin <= 0.0 {
        return Err(PzError::NotComputable(format!(
            "margin {margin} is not positive; separation is impossible"
        )));
    }
    let bound = error_bound(&proj);
    let rho = contraction_factor(&proj).ok();
    let rounds = match rho {
        Some(rho) => rounds_needed(rho, bound, margin),
        None => 0,
    };
    Ok(TerminationEstimate {
        margin,
        margin_method: lower.method,
        projected_error_bound: bound,
        rho,
        rounds,
        split_depth: rounds * pz.factor_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, square};

    fn opts() -> CheckOptions {
        CheckOptions {
            max_splits: 10_000,
            ..Default::default()
        }
    }

    #[test]
    fn example2_is_separated_after_splitting() {
        let hs = Halfspace::new(vec![1.0, 1.0], 0.0).unwrap();
        let v = check_halfspace(&example1(), &hs, opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Separated);
        assert!(v.splits_used >= 1);
        assert_eq!(v.residual_bound, 0.0);
    }

    #[test]
    fn square_witness_at_center() {
        let hs = Halfspace::new(vec![1.0], 0.5).unwrap();
        let v = check_halfspace(&square(), &hs, opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Witness);
        assert_eq!(v.witness_point, Some(vec![0.0]));
        assert_eq!(v.splits_used, 0);
    }

    #[test]
    fn square_separated_without_splitting() {
        let hs = Halfspace::new(vec![1.0], -0.1).unwrap();
        let v = check_halfspace(&square(), &hs, opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Separated);
        assert_eq!(v.splits_used, 0);
        assert_eq!(v.leaves_closed, 1);
    }

    #[test]
    fn zero_budget_exhausts() {
        let hs = Halfspace::new(vec![1.0, 1.0], 0.0).unwrap();
        let v = check_halfspace(
            &example1(),
            &hs,
            CheckOptions {
                max_splits: 0,
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::Exhausted);
        assert_eq!(v.residual_bound, 9.0);
    }

    #[test]
    fn zonotope_input_resolves_exactly() {
        let z = crate::sets::Zonotope::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        let pz = PolyZonotope::from_zonotope(&z);
        let hs = Halfspace::new(vec![1.0, 1.0], -1.5).unwrap();
        let v = check_halfspace(&pz, &hs, opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Witness);
        assert_eq!(v.witness_point, Some(vec![-1.0, -1.0]));
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let hs = Halfspace::new(vec![1.0], 0.0).unwrap();
        assert!(check_halfspace(&example1(), &hs, opts()).is_err());
        let hs = Halfspace::new(vec![1.0], 0.0).unwrap();
        assert!(check_halfspace(
            &square(),
            &hs,
            CheckOptions {
                samples_per_node: 0,
                ..opts()
            }
        )
        .is_err());
    }

    #[test]
    fn termination_for_example2() {
        let hs = Halfspace::new(vec![1.0, 1.0], 0.0).unwrap();
        let t = termination_margin(&example1(), &hs).unwrap();
        assert!((t.margin - 2.0).abs() < 1e-8);
        assert_eq!(t.projected_error_bound, 9.0);
        assert_eq!(t.rho, Some(15.0 / 16.0));
        assert_eq!(t.rounds, 24);
    }

    #[test]
    fn termination_edge_cases() {
        let hs = Halfspace::new(vec![1.0], 0.5).unwrap();
        assert!(matches!(
            termination_margin(&square(), &hs),
            Err(PzError::NotComputable(_))
        ));
        let z = crate::sets::Zonotope::new(vec![2.0], vec![vec![1.0]]).unwrap();
        let t = termination_margin(&PolyZonotope::from_zonotope(&z), &hs).unwrap();
        assert_eq!(t.rounds, 0);
    }

    #[test]
    fn rounds_formula() {
        assert_eq!(rounds_needed(15.0 / 16.0, 9.0, 2.0), 24);
        assert_eq!(rounds_needed(0.5, 1.0, 2.0), 0);
        assert_eq!(rounds_needed(0.5, 1.0, 0.5), 2);
    }
}
