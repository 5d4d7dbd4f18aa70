//! Ground-truth minimizers for one-dimensional polynomial zonotopes.
//!
//! These never split or overapproximate; they evaluate the polynomial over
//! sign corners, a uniform grid, or interval boxes. Independent factors are
//! handled analytically: `β` contributes exactly `±Σ_j |G_I(·,j)|` to the
//! extremes, so only the `r` dependent factors are searched.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PzError, Result};
use crate::sets::PolyZonotope;

pub const CORNER_FACTOR_CAP: usize = 20;
pub const GRID_FACTOR_CAP: usize = 4;
pub const BNB_FACTOR_CAP: usize = 6;
pub const BNB_TOLERANCE: f64 = 1e-9;
pub const BNB_BOX_CAP: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiAffineCheck {
    pub is_multi_affine: bool,
    /// First `(factor row, term column)` of `E` holding an exponent above 1.
    pub violating_entry: Option<(usize, usize)>,
}

pub fn check_multi_affine(pz: &PolyZonotope) -> MultiAffineCheck {
    let violating_entry = pz
        .exponents()
        .iter()
        .enumerate()
        .find_map(|(i, e)| e.iter().position(|&x| x > 1).map(|k| (k, i)));
    MultiAffineCheck {
        is_multi_affine: violating_entry.is_none(),
        violating_entry,
    }
}

fn require_1d(pz: &PolyZonotope) -> Result<()> {
    if pz.dim() != 1 {
        return Err(PzError::Precondition(format!(
            "oracle needs a one-dimensional set, got dimension {}",
            pz.dim()
        )));
    }
    Ok(())
}

fn indep_spread(pz: &PolyZonotope) -> f64 {
    pz.indep_generators().iter().map(|g| g[0].abs()).sum()
}

fn dependent_value(pz: &PolyZonotope, alpha: &[f64]) -> f64 {
    pz.dep_generators()
        .iter()
        .zip(pz.exponents())
        .map(|(g, e)| g[0] * crate::sets::monomial(alpha, e))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerMin {
    pub value: f64,
    /// Minimizing dependent factor assignment, entries in `{−1, 1}`.
    pub argmin: Vec<f64>,
}

pub fn corner_min(pz: &PolyZonotope) -> Result<CornerMin> {
    corner_min_capped(pz, CORNER_FACTOR_CAP)
}

/// Exact minimum of a multi-affine one-dimensional set by enumerating all
/// `2^r` sign corners.
pub fn corner_min_capped(pz: &PolyZonotope, cap: usize) -> Result<CornerMin> {
    require_1d(pz)?;
    let check = check_multi_affine(pz);
    if let Some((k, i)) = check.violating_entry {
        return Err(PzError::Precondition(format!(
            "set is not multi-affine: exponents[{i}][{k}] = {}",
            pz.exponents()[i][k]
        )));
    }
    let r = pz.factor_count();
    if r > cap || r >= 64 {
        return Err(PzError::Budget {
            what: "corner enumeration factors",
            needed: r as u128,
            cap: cap as u128,
        });
    }
    let terms: Vec<(f64, u64)> = pz
        .dep_generators()
        .iter()
        .zip(pz.exponents())
        .map(|(g, e)| {
            let mask = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == 1)
                .fold(0u64, |m, (k, _)| m | (1 << k));
            (g[0], mask)
        })
        .collect();
    // bit k of the corner index set ⟺ α_k = +1
    let (best, mask) = (0..1u64 << r)
        .into_par_iter()
        .map(|corner| {
            let v: f64 = terms
                .iter()
                .map(|&(g, tm)| {
                    if (!corner & tm).count_ones() % 2 == 0 {
                        g
                    } else {
                        -g
                    }
                })
                .sum();
            (v, corner)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| match a.0.total_cmp(&b.0) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal => (a.0, a.1.min(b.1)),
            },
        );
    let argmin = (0..r)
        .map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 })
        .collect();
    Ok(CornerMin {
        value: pz.center()[0] - indep_spread(pz) + best,
        argmin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMin {
    /// Smallest value on the grid; an upper bound on the true minimum.
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Distance between neighbouring grid values along each axis.
    pub spacing: f64,
    /// `Σ_k max |∂p/∂α_k|` bounded by `Σ_k Σ_i E(k,i)·|G_D(i)|`.
    pub gradient_bound: f64,
    /// `spacing/2 · gradient_bound`: the true minimum is at least
    /// `value − resolution`.
    pub resolution: f64,
}

impl GridMin {
    pub fn lower_bound(&self) -> f64 {
        self.value - self.resolution
    }
}

fn grid_axis(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64)
        .collect()
}

fn gradient_bound(pz: &PolyZonotope) -> f64 {
    pz.dep_generators()
        .iter()
        .zip(pz.exponents())
        .map(|(g, e)| g[0].abs() * e.iter().map(|&x| f64::from(x)).sum::<f64>())
        .sum()
}

/// A value and the factor assignment producing it.
type Extreme = (f64, Vec<f64>);

/// Scan `points^r` grid points; returns the minimum and maximum dependent
/// values with their arguments.
fn grid_scan(pz: &PolyZonotope, points: usize, cap: usize) -> Result<(Extreme, Extreme)> {
    require_1d(pz)?;
    let r = pz.factor_count();
    if r > cap {
        return Err(PzError::Budget {
            what: "grid oracle factors",
            needed: r as u128,
            cap: cap as u128,
        });
    }
    if points < 2 {
        return Err(PzError::Precondition(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    let axis = grid_axis(points);
    let total = (points as u128).pow(r as u32);
    if total > u64::MAX as u128 {
        return Err(PzError::Budget {
            what: "grid points",
            needed: total,
            cap: u64::MAX as u128,
        });
    }
    let decode = |mut idx: u64| -> Vec<f64> {
        (0..r)
            .map(|_| {
                let a = axis[(idx % points as u64) as usize];
                idx /= points as u64;
                a
            })
            .collect()
    };
    let (lo, hi) = (0..total as u64)
        .into_par_iter()
        .map(|idx| {
            let v = dependent_value(pz, &decode(idx));
            ((v, idx), (v, idx))
        })
        .reduce(
            || ((f64::INFINITY, u64::MAX), (f64::NEG_INFINITY, u64::MAX)),
            |(alo, ahi), (blo, bhi)| {
                let lo = match alo.0.total_cmp(&blo.0) {
                    Ordering::Less => alo,
                    Ordering::Greater => blo,
                    Ordering::Equal => (alo.0, alo.1.min(blo.1)),
                };
                let hi = match ahi.0.total_cmp(&bhi.0) {
                    Ordering::Greater => ahi,
                    Ordering::Less => bhi,
                    Ordering::Equal => (ahi.0, ahi.1.min(bhi.1)),
                };
                (lo, hi)
            },
        );
    Ok(((lo.0, decode(lo.1)), (hi.0, decode(hi.1))))
}

pub fn grid_min(pz: &PolyZonotope, points_per_dim: usize) -> Result<GridMin> {
    grid_min_capped(pz, points_per_dim, GRID_FACTOR_CAP)
}

pub fn grid_min_capped(pz: &PolyZonotope, points_per_dim: usize, cap: usize) -> Result<GridMin> {
    let ((v, argmin), _) = grid_scan(pz, points_per_dim, cap)?;
    let spacing = 2.0 / (points_per_dim - 1) as f64;
    let gb = gradient_bound(pz);
    Ok(GridMin {
        value: pz.center()[0] - indep_spread(pz) + v,
        argmin,
        spacing,
        gradient_bound: gb,
        resolution: 0.5 * spacing * gb,
    })
}

/// `(grid min, grid max)`: an inner approximation of the set's range.
pub fn interval_hull_1d(pz: &PolyZonotope, points_per_dim: usize) -> Result<(f64, f64)> {
    let ((lo, _), (hi, _)) = grid_scan(pz, points_per_dim, GRID_FACTOR_CAP)?;
    let c = pz.center()[0];
    let spread = indep_spread(pz);
    Ok((c - spread + lo, c + spread + hi))
}

fn pow_range(lo: f64, hi: f64, e: u32) -> (f64, f64) {
    let (a, b) = (lo.powi(e as i32), hi.powi(e as i32));
    if e % 2 == 1 || lo >= 0.0 {
        (a, b)
    } else if hi <= 0.0 {
        (b, a)
    } else {
        (0.0, a.max(b))
    }
}

fn mul_range(x: (f64, f64), y: (f64, f64)) -> (f64, f64) {
    let p = [x.0 * y.0, x.0 * y.1, x.1 * y.0, x.1 * y.1];
    (
        p.iter().copied().fold(f64::INFINITY, f64::min),
        p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

struct Cell {
    lower: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.lower.total_cmp(&other.lower) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // reversed: BinaryHeap pops the smallest lower bound first
    fn cmp(&self, other: &Self) -> Ordering {
        other.lower.total_cmp(&self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BnbBound {
    /// Certified lower bound on the minimum.
    pub lower: f64,
    /// Best value found at a sampled point.
    pub upper: f64,
    pub cells: usize,
    /// `upper − lower ≤ tolerance` was reached before the cell cap.
    pub converged: bool,
}

/// Interval branch and bound over the dependent factor box.
///
/// Each cell is bounded below by summing exact monomial ranges (a product of
/// independent per-factor power ranges); cells are bisected along their widest
/// axis, smallest lower bound first.
pub fn branch_and_bound_min(
    pz: &PolyZonotope,
    tolerance: f64,
    max_cells: usize,
) -> Result<BnbBound> {
    require_1d(pz)?;
    let r = pz.factor_count();
    let base = pz.center()[0] - indep_spread(pz);
    let terms: Vec<(f64, &Vec<u32>)> = pz
        .dep_generators()
        .iter()
        .map(|g| g[0])
        .zip(pz.exponents())
        .collect();
    let cell_lower = |lo: &[f64], hi: &[f64]| -> f64 {
        terms
            .iter()
            .map(|&(g, e)| {
                let m = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .fold((1.0, 1.0), |acc, (k, &x)| {
                        mul_range(acc, pow_range(lo[k], hi[k], x))
                    });
                if g >= 0.0 {
                    g * m.0
                } else {
                    g * m.1
                }
            })
            .sum()
    };
    let midpoint_value = |lo: &[f64], hi: &[f64]| -> f64 {
        let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        dependent_value(pz, &mid)
    };

    let lo = vec![-1.0; r];
    let hi = vec![1.0; r];
    let mut upper = midpoint_value(&lo, &hi);
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        lower: cell_lower(&lo, &hi),
        lo,
        hi,
    });
    let mut cells = 1;
    loop {
        let cell = heap.pop().expect("heap is never emptied before returning");
        if upper - cell.lower <= tolerance || r == 0 || cells >= max_cells {
            return Ok(BnbBound {
                lower: base + cell.lower.min(upper),
                upper: base + upper,
                cells,
                converged: upper - cell.lower <= tolerance || r == 0,
            });
        }
        let axis = (0..r)
            .max_by(|&a, &b| {
                (cell.hi[a] - cell.lo[a])
                    .total_cmp(&(cell.hi[b] - cell.lo[b]))
                    .then(b.cmp(&a))
            })
            .expect("r > 0");
        let split = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        for (l, h) in [(cell.lo[axis], split), (split, cell.hi[axis])] {
            let mut clo = cell.lo.clone();
            let mut chi = cell.hi.clone();
            clo[axis] = l;
            chi[axis] = h;
            upper = upper.min(midpoint_value(&clo, &chi));
            let lower = cell_lower(&clo, &chi);
            if lower < upper - tolerance {
                heap.push(Cell {
                    lower,
                    lo: clo,
                    hi: chi,
                });
            }
            cells += 1;
        }
        if heap.is_empty() {
            return Ok(BnbBound {
                lower: base + upper - tolerance,
                upper: base + upper,
                cells,
                converged: true,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Exact,
    Corners,
    BranchAndBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub method: BoundMethod,
}

/// A certified lower bound on the minimum of a one-dimensional set, picking
/// the cheapest applicable oracle.
pub fn certified_lower_bound(pz: &PolyZonotope) -> Result<LowerBound> {
    require_1d(pz)?;
    if pz.term_count() == 0 {
        return Ok(LowerBound {
            value: pz.center()[0] - indep_spread(pz),
            method: BoundMethod::Exact,
        });
    }
    if pz.is_multi_affine() && pz.factor_count() <= CORNER_FACTOR_CAP {
        return Ok(LowerBound {
            value: corner_min(pz)?.value,
            method: BoundMethod::Corners,
        });
    }
    if pz.factor_count() <= BNB_FACTOR_CAP {
        let b = branch_and_bound_min(pz, BNB_TOLERANCE, BNB_BOX_CAP)?;
        return Ok(LowerBound {
            value: b.lower,
            method: BoundMethod::BranchAndBound,
        });
    }
    Err(PzError::NotComputable(format!(
        "no oracle for a set with {} factors and degree above one",
        pz.factor_count()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, square};

    fn one_d(dep: &[f64], exps: Vec<Vec<u32>>) -> PolyZonotope {
        PolyZonotope::dependent(dep.iter().map(|&g| vec![g]).collect(), exps).unwrap()
    }

    #[test]
    fn corners_of_linear_part() {
        let pz = one_d(&[2.0, 3.0], vec![vec![1, 0], vec![0, 1]]);
        let m = corner_min(&pz).unwrap();
        assert_eq!(m.value, -5.0);
        assert_eq!(m.argmin, vec![-1.0, -1.0]);
    }

    #[test]
    fn corners_of_bilinear_product() {
        let m = corner_min(&one_d(&[1.0], vec![vec![1, 1]])).unwrap();
        assert_eq!(m.value, -1.0);
        assert_eq!(m.argmin, vec![1.0, -1.0]);
    }

    #[test]
    fn corners_of_triangle() {
        let pz = one_d(
            &[0.5, 0.5, 0.5],
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]],
        );
        assert_eq!(corner_min(&pz).unwrap().value, -0.5);
    }

    #[test]
    fn corners_reject_bad_input() {
        let err = corner_min(&square()).unwrap_err();
        assert!(matches!(err, PzError::Precondition(_)));
        assert_eq!(
            check_multi_affine(&square()),
            MultiAffineCheck {
                is_multi_affine: false,
                violating_entry: Some((0, 0))
            }
        );
        assert!(matches!(
            corner_min(&example1()),
            Err(PzError::Precondition(_))
        ));
        let wide = one_d(&[1.0], vec![vec![1, 1, 1]]);
        assert!(matches!(
            corner_min_capped(&wide, 2),
            Err(PzError::Budget { .. })
        ));
    }

    #[test]
    fn grid_reproduces_example2() {
        let p = example1().scalar_project(&[1.0, 1.0]).unwrap();
        let g = grid_min(&p, 101).unwrap();
        assert!((g.value - 2.0).abs() < 1e-12);
        assert_eq!(g.spacing, 0.02);
    }

    #[test]
    fn grid_of_constant_and_square() {
        let c = PolyZonotope::new(vec![3.5], vec![], vec![], vec![]).unwrap();
        assert_eq!(grid_min(&c, 3).unwrap().value, 3.5);
        assert_eq!(grid_min(&square(), 11).unwrap().value, 0.0);
        assert_eq!(interval_hull_1d(&square(), 11).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn prop2_child_hull() {
        let child = one_d(&[0.5, 0.25], vec![vec![1], vec![2]]);
        let shifted = PolyZonotope::new(
            vec![0.25],
            vec![],
            child.dep_generators().to_vec(),
            child.exponents().to_vec(),
        )
        .unwrap();
        let (lo, hi) = interval_hull_1d(&shifted, 101).unwrap();
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_caps() {
        let pz = one_d(&[1.0], vec![vec![1, 1, 1, 1, 1]]);
        assert!(matches!(grid_min(&pz, 3), Err(PzError::Budget { .. })));
        assert!(matches!(
            grid_min(&square(), 1),
            Err(PzError::Precondition(_))
        ));
        assert!(matches!(
            grid_min(&example1(), 3),
            Err(PzError::Precondition(_))
        ));
    }

    #[test]
    fn branch_and_bound_on_example2() {
        let p = example1().scalar_project(&[1.0, 1.0]).unwrap();
        let b = branch_and_bound_min(&p, 1e-9, BNB_BOX_CAP).unwrap();
        assert!(b.converged);
        assert!(b.lower <= 2.0 && b.lower > 2.0 - 2e-9, "{b:?}");
    }

    #[test]
    fn branch_and_bound_interior_minimum() {
        // α² − α has its minimum −1/4 at α = 1/2
        let pz = one_d(&[1.0, -1.0], vec![vec![2], vec![1]]);
        let b = branch_and_bound_min(&pz, 1e-9, BNB_BOX_CAP).unwrap();
        assert!(b.converged);
        assert!(b.lower <= -0.25 && b.lower > -0.25 - 2e-9, "{b:?}");
    }

    #[test]
    fn power_ranges() {
        assert_eq!(pow_range(-1.0, 0.5, 2), (0.0, 1.0));
        assert_eq!(pow_range(-1.0, -0.5, 2), (0.25, 1.0));
        assert_eq!(pow_range(-1.0, 0.5, 3), (-1.0, 0.125));
    }
}
