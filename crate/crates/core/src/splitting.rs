//! Splitting a dependent factor's domain in half.
//!
//! Splitting factor `α_s` uses `[-1, 1] = {(1+α)/2} ∪ {−(1+α)/2}`. Each term
//! `α_s^e · A` expands binomially into `e + 1` terms
//! `(±1)^e · C(e, j) / 2^e · α_s^j · A` for `j = 0..=e`, after which like terms
//! are merged and constants folded into the center.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PzError, Result};
use crate::overapprox::{contraction_factor, error_bound, exponent_norm};
use crate::sets::{one_norm, PolyZonotope, RawPolyZonotope};

pub const DEFAULT_LEAF_CAP: u128 = 1 << 20;

pub const LEAF_CAP_ENV: &str = "PZ_LEAF_CAP";

/// Leaf cap from `PZ_LEAF_CAP`, or [`DEFAULT_LEAF_CAP`] when unset.
pub fn leaf_cap_from_env() -> Result<u128> {
    match std::env::var(LEAF_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            PzError::Representation(format!("{LEAF_CAP_ENV}={v:?} is not a nonnegative integer"))
        }),
        Err(_) => Ok(DEFAULT_LEAF_CAP),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SplitStrategy {
    /// Split factor `depth mod r`, so every factor is chosen once per `r`
    /// consecutive splits along any root-to-leaf path.
    #[default]
    Cyclic,
    /// Split the factor maximizing `Σ_i E(k,i)·‖G_D(·,i)‖₁`.
    MaxExponentNorm,
}

/// Which half of a factor's domain a child covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `α_s ← (1 + α_s)/2`, covering `[0, 1]`.
    Upper,
    /// `α_s ← −(1 + α_s)/2`, covering `[−1, 0]`.
    Lower,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Substitute one side into factor `s` (0-based). Returns the canonical child
/// and, for each child factor, the parent factor it came from.
pub(crate) fn substitute(
    pz: &PolyZonotope,
    s: usize,
    side: Side,
) -> Result<(PolyZonotope, Vec<usize>)> {
    let r = pz.factor_count();
    if s >= r {
        return Err(PzError::Index { index: s, bound: r });
    }
    let mut dep = Vec::new();
    let mut exps = Vec::new();
    for (g, e) in pz.dep_generators().iter().zip(pz.exponents()) {
        let deg = e[s];
        if deg == 0 {
            dep.push(g.clone());
            exps.push(e.clone());
            continue;
        }
        let sign = if side == Side::Lower && deg % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let scale = sign * 0.5f64.powi(deg as i32);
        for j in 0..=deg {
            let coef = scale * binomial(deg, j);
            dep.push(g.iter().map(|x| coef * x).collect());
            let mut col = e.clone();
            col[s] = j;
            exps.push(col);
        }
    }
    RawPolyZonotope {
        center: pz.center().to_vec(),
        indep_generators: pz.indep_generators().to_vec(),
        dep_generators: dep,
        exponents: exps,
    }
    .canonicalize_tracked()
}

/// Split factor `s` (0-based) into the `Upper` and `Lower` children.
pub fn split_factor(pz: &PolyZonotope, s: usize) -> Result<(PolyZonotope, PolyZonotope)> {
    let (upper, _) = substitute(pz, s, Side::Upper)?;
    let (lower, _) = substitute(pz, s, Side::Lower)?;
    Ok((upper, lower))
}

/// One node of a split tree.
///
/// Besides the set itself, a node remembers how each factor of the root set
/// relates to its own factors (`α_root = scale·α_node + offset`) so that
/// points found in a leaf can be reported in root coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitNode {
    pub set: PolyZonotope,
    pub depth: usize,
    pub sign_path: Vec<Side>,
    /// Cached `‖G_D‖` of `set`.
    pub dep_norm: f64,
    node_to_root: Vec<usize>,
    root_affine: Vec<(f64, f64)>,
}

impl SplitNode {
    pub fn root(pz: PolyZonotope) -> Self {
        let r = pz.factor_count();
        SplitNode {
            dep_norm: error_bound(&pz),
            set: pz,
            depth: 0,
            sign_path: Vec::new(),
            node_to_root: (0..r).collect(),
            root_affine: vec![(1.0, 0.0); r],
        }
    }

    pub fn root_factor_count(&self) -> usize {
        self.root_affine.len()
    }

    /// Per-node contraction factor, a diagnostic.
    pub fn rho(&self) -> Option<f64> {
        contraction_factor(&self.set).ok()
    }

    /// Map this node's dependent factor values to the root's.
    pub fn root_factors(&self, alpha: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.root_affine.iter().map(|&(_, offset)| offset).collect();
        for (k, &a) in alpha.iter().enumerate() {
            let root = self.node_to_root[k];
            let (scale, offset) = self.root_affine[root];
            out[root] = (scale * a + offset).clamp(-1.0, 1.0);
        }
        out
    }

    /// Factor (0-based, in this node's numbering) the strategy splits next.
    pub fn select_factor(&self, strategy: SplitStrategy) -> Result<usize> {
        let r = self.set.factor_count();
        if r == 0 {
            return Err(PzError::CannotSplit);
        }
        match strategy {
            SplitStrategy::Cyclic => {
                // keyed to root factor numbering; if the scheduled factor has
                // vanished from this node, take the next one that is present
                let total = self.root_factor_count();
                let target = self.depth % total;
                let pick = (0..total)
                    .map(|off| (target + off) % total)
                    .find_map(|root| self.node_to_root.iter().position(|&x| x == root))
                    .expect("node has at least one factor");
                Ok(pick)
            }
            SplitStrategy::MaxExponentNorm => {
                let mut weight = vec![0.0; r];
                for (g, e) in self.set.dep_generators().iter().zip(self.set.exponents()) {
                    let gn = one_norm(g);
                    for (w, &ek) in weight.iter_mut().zip(e) {
                        *w += f64::from(ek) * gn;
                    }
                }
                let mut best = 0;
                for k in 1..r {
                    if weight[k] > weight[best] {
                        best = k;
                    }
                }
                Ok(best)
            }
        }
    }

    fn child(&self, s: usize, side: Side) -> Result<SplitNode> {
        let (set, kept) = substitute(&self.set, s, side)?;
        let mut root_affine = self.root_affine.clone();
        let root = self.node_to_root[s];
        let (scale, offset) = root_affine[root];
        // α_parent = sign·(1 + α_child)/2
        let sign = side.sign();
        root_affine[root] = (scale * sign * 0.5, offset + scale * sign * 0.5);
        let node_to_root = kept.iter().map(|&k| self.node_to_root[k]).collect();
        let mut sign_path = self.sign_path.clone();
        sign_path.push(side);
        Ok(SplitNode {
            dep_norm: error_bound(&set),
            set,
            depth: self.depth + 1,
            sign_path,
            node_to_root,
            root_affine,
        })
    }
}

/// Split a node according to `strategy`, returning `(Upper, Lower)` children.
pub fn split_once(node: &SplitNode, strategy: SplitStrategy) -> Result<(SplitNode, SplitNode)> {
    let s = node.select_factor(strategy)?;
    Ok((node.child(s, Side::Upper)?, node.child(s, Side::Lower)?))
}

fn check_leaf_cap(steps: usize, cap: u128) -> Result<()> {
    let needed = 1u128.checked_shl(steps as u32).unwrap_or(u128::MAX);
    if steps >= 128 || needed > cap {
        return Err(PzError::Budget {
            what: "split tree leaves",
            needed,
            cap,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelStats {
    pub depth: usize,
    pub leaf_count: usize,
    pub max_dep_norm: f64,
}

/// Expand every branch `steps` times and hand each level to `visit`.
/// Nodes without dependent factors are exact and are carried down unsplit.
pub fn expand_levels<F>(
    root: SplitNode,
    strategy: SplitStrategy,
    steps: usize,
    leaf_cap: u128,
    mut visit: F,
) -> Result<Vec<SplitNode>>
where
    F: FnMut(usize, &[SplitNode]),
{
    check_leaf_cap(steps, leaf_cap)?;
    let mut level = vec![root];
    visit(0, &level);
    for depth in 1..=steps {
        let next: Result<Vec<Vec<SplitNode>>> = level
            .par_iter()
            .map(|node| {
                if node.set.factor_count() == 0 {
                    let mut carried = node.clone();
                    carried.depth += 1;
                    return Ok(vec![carried]);
                }
                let (a, b) = split_once(node, strategy)?;
                Ok(vec![a, b])
            })
            .collect();
        level = next?.into_iter().flatten().collect();
        visit(depth, &level);
    }
    Ok(level)
}

/// Max leaf `‖G_D‖` at every depth `0..=steps`.
pub fn level_stats(
    pz: &PolyZonotope,
    strategy: SplitStrategy,
    steps: usize,
    leaf_cap: u128,
) -> Result<Vec<LevelStats>> {
    let mut stats = Vec::with_capacity(steps + 1);
    expand_levels(
        SplitNode::root(pz.clone()),
        strategy,
        steps,
        leaf_cap,
        |depth, nodes| {
            stats.push(LevelStats {
                depth,
                leaf_count: nodes.len(),
                max_dep_norm: nodes.iter().map(|n| n.dep_norm).fold(0.0, f64::max),
            })
        },
    )?;
    Ok(stats)
}

/// Max leaf `‖G_D‖` after `rounds` full cyclic rounds (`rounds · r` splits).
pub fn norm_after_round(pz: &PolyZonotope, rounds: usize, leaf_cap: u128) -> Result<f64> {
    let steps = rounds
        .checked_mul(pz.factor_count())
        .ok_or(PzError::Budget {
            what: "split steps",
            needed: u128::MAX,
            cap: leaf_cap,
        })?;
    let stats = level_stats(pz, SplitStrategy::Cyclic, steps, leaf_cap)?;
    Ok(stats.last().map_or(0.0, |s| s.max_dep_norm))
}

/// Largest exponent of each factor over all terms.
pub fn max_degrees(pz: &PolyZonotope) -> Vec<u32> {
    let mut out = vec![0; pz.factor_count()];
    for e in pz.exponents() {
        for (m, &x) in out.iter_mut().zip(e) {
            *m = (*m).max(x);
        }
    }
    out
}

/// Largest `‖E(·,i)‖₁` over the terms.
pub fn max_exponent_norm(pz: &PolyZonotope) -> u64 {
    pz.exponents()
        .iter()
        .map(|e| exponent_norm(e))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, square};

    #[test]
    fn square_split_matches_hand_expansion() {
        let (a, b) = split_factor(&square(), 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.center(), &[0.25]);
        assert_eq!(a.dep_generators(), &[vec![0.5], vec![0.25]]);
        assert_eq!(a.exponents(), &[vec![1], vec![2]]);
    }

    #[test]
    fn cubic_term_expansion() {
        let pz = PolyZonotope::dependent(vec![vec![1.0]], vec![vec![3, 1]]).unwrap();
        let (upper, lower) = split_factor(&pz, 0).unwrap();
        assert_eq!(
            upper.exponents(),
            &[vec![0, 1], vec![1, 1], vec![2, 1], vec![3, 1]]
        );
        assert_eq!(
            upper.dep_generators(),
            &[vec![0.125], vec![0.375], vec![0.375], vec![0.125]]
        );
        // odd degree: the lower child negates every coefficient
        assert_eq!(
            lower.dep_generators(),
            &[vec![-0.125], vec![-0.375], vec![-0.375], vec![-0.125]]
        );
    }

    #[test]
    fn absent_factor_leaves_term_alone() {
        let pz = PolyZonotope::dependent(vec![vec![1.0], vec![2.0]], vec![vec![1, 0], vec![0, 1]])
            .unwrap();
        let (upper, lower) = split_factor(&pz, 0).unwrap();
        for child in [upper, lower] {
            let idx = child
                .exponents()
                .iter()
                .position(|e| e == &vec![0, 1])
                .unwrap();
            assert_eq!(child.dep_generators()[idx], vec![2.0]);
        }
    }

    #[test]
    fn split_index_out_of_range() {
        assert!(matches!(
            split_factor(&square(), 1),
            Err(PzError::Index { .. })
        ));
    }

    #[test]
    fn split_once_square_norms() {
        let root = SplitNode::root(square());
        let (a, b) = split_once(&root, SplitStrategy::Cyclic).unwrap();
        assert_eq!(a.dep_norm, 0.75);
        assert_eq!(b.dep_norm, 0.75);
        assert_eq!(a.depth, 1);
        assert_eq!(a.sign_path, vec![Side::Upper]);
        assert_eq!(b.sign_path, vec![Side::Lower]);
    }

    #[test]
    fn cyclic_schedule_follows_depth() {
        let (_, pzd) = example1().minkowski_decompose();
        let root = SplitNode::root(pzd);
        assert_eq!(root.select_factor(SplitStrategy::Cyclic).unwrap(), 0);
        let (a, b) = split_once(&root, SplitStrategy::Cyclic).unwrap();
        assert_eq!(a.select_factor(SplitStrategy::Cyclic).unwrap(), 1);
        assert_eq!(b.select_factor(SplitStrategy::Cyclic).unwrap(), 1);
        let (aa, _) = split_once(&a, SplitStrategy::Cyclic).unwrap();
        assert_eq!(aa.select_factor(SplitStrategy::Cyclic).unwrap(), 0);

        let mut node = SplitNode::root(square());
        for _ in 0..4 {
            assert_eq!(node.select_factor(SplitStrategy::Cyclic).unwrap(), 0);
            node = split_once(&node, SplitStrategy::Cyclic).unwrap().0;
        }
    }

    #[test]
    fn max_exponent_norm_selection() {
        // factor 1 (0-based) weight 3·1 = 3 beats factor 0 weight 1·2 = 2
        let pz = PolyZonotope::dependent(vec![vec![2.0], vec![1.0]], vec![vec![1, 0], vec![0, 3]])
            .unwrap();
        let node = SplitNode::root(pz);
        assert_eq!(
            node.select_factor(SplitStrategy::MaxExponentNorm).unwrap(),
            1
        );
        // tie goes to the smallest index
        let tie = PolyZonotope::dependent(vec![vec![1.0]], vec![vec![1, 1]]).unwrap();
        assert_eq!(
            SplitNode::root(tie)
                .select_factor(SplitStrategy::MaxExponentNorm)
                .unwrap(),
            0
        );
    }

    #[test]
    fn cannot_split_zonotope() {
        let z = crate::sets::Zonotope::new(vec![0.0], vec![vec![1.0]]).unwrap();
        let node = SplitNode::root(PolyZonotope::from_zonotope(&z));
        assert_eq!(
            split_once(&node, SplitStrategy::Cyclic),
            Err(PzError::CannotSplit)
        );
    }

    #[test]
    fn root_factor_mapping() {
        let root = SplitNode::root(square());
        let (up, lo) = split_once(&root, SplitStrategy::Cyclic).unwrap();
        assert_eq!(up.root_factors(&[-1.0]), vec![0.0]);
        assert_eq!(up.root_factors(&[1.0]), vec![1.0]);
        assert_eq!(lo.root_factors(&[1.0]), vec![-1.0]);
        let (lo_up, _) = split_once(&lo, SplitStrategy::Cyclic).unwrap();
        // lower half of [-1,0], upper quarter: [-1,-0.5]
        assert_eq!(lo_up.root_factors(&[-1.0]), vec![-0.5]);
        assert_eq!(lo_up.root_factors(&[1.0]), vec![-1.0]);
    }

    #[test]
    fn norm_after_round_examples() {
        assert_eq!(
            norm_after_round(&square(), 1, DEFAULT_LEAF_CAP).unwrap(),
            0.75
        );
        assert_eq!(
            norm_after_round(&square(), 0, DEFAULT_LEAF_CAP).unwrap(),
            1.0
        );
        let (_, pzd) = example1().minkowski_decompose();
        let v = norm_after_round(&pzd, 1, DEFAULT_LEAF_CAP).unwrap();
        assert!(v <= 15.0 / 16.0 * 9.0 + 1e-10, "{v}");
    }

    #[test]
    fn leaf_cap_enforced() {
        let err = level_stats(&square(), SplitStrategy::Cyclic, 5, 16).unwrap_err();
        assert!(matches!(
            err,
            PzError::Budget {
                needed: 32,
                cap: 16,
                ..
            }
        ));
        assert!(level_stats(&square(), SplitStrategy::Cyclic, 4, 16).is_ok());
    }

    #[test]
    fn degrees_never_increase() {
        let pz = example1();
        let before = max_degrees(&pz);
        let (a, b) = split_factor(&pz, 0).unwrap();
        for child in [a, b] {
            for (x, y) in max_degrees(&child).iter().zip(&before) {
                assert!(x <= y);
            }
        }
    }
}
