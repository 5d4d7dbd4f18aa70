//! Zonotope enclosure of a polynomial zonotope and the error diagnostics
//! that drive convergence of overapproximate-and-split.

use serde::Serialize;

use crate::error::{PzError, Result};
use crate::sets::{one_norm, PolyZonotope, Zonotope};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverapproxDiagnostics {
    /// Entry-wise one-norm of `G_D`.
    pub dep_norm: f64,
    /// `None` when there are no dependent terms.
    pub rho: Option<f64>,
    /// Terms whose exponents are all even (the set `H`).
    pub even_index_count: usize,
    pub odd_index_count: usize,
}

/// A term is all-even when every exponent is even. Canonical form rules out
/// the all-zero column, so such a term's monomial ranges over `[0, 1]`.
pub fn is_all_even(exps: &[u32]) -> bool {
    exps.iter().all(|e| e % 2 == 0)
}

pub(crate) fn exponent_norm(exps: &[u32]) -> u64 {
    exps.iter().map(|&e| u64::from(e)).sum()
}

/// Replace each dependent monomial by a fresh independent factor.
///
/// All-even monomials lie in `[0, 1]` and become `(β + 1)/2`, which shifts the
/// center by `G_D(·,i)/2` and contributes the generator `G_D(·,i)/2`. Every
/// other monomial becomes `β` with generator `G_D(·,i)`.
pub fn overapproximate(pz: &PolyZonotope) -> Zonotope {
    let mut center = pz.center().to_vec();
    let mut generators = pz.indep_generators().to_vec();
    for (g, e) in pz.dep_generators().iter().zip(pz.exponents()) {
        if is_all_even(e) {
            let half: Vec<f64> = g.iter().map(|x| 0.5 * x).collect();
            for (c, hx) in center.iter_mut().zip(&half) {
                *c += hx;
            }
            generators.push(half);
        } else {
            generators.push(g.clone());
        }
    }
    Zonotope::new(center, generators).expect("canonical set has finite, consistent entries")
}

/// `‖G_D‖`, an upper bound on the Hausdorff distance between `pz` and
/// [`overapproximate`]`(pz)`.
pub fn error_bound(pz: &PolyZonotope) -> f64 {
    pz.dep_generators().iter().map(|g| one_norm(g)).sum()
}

/// `ρ = max_i (1 − 2^{−‖E(·,i)‖₁})`.
pub fn contraction_factor(pz: &PolyZonotope) -> Result<f64> {
    pz.exponents()
        .iter()
        .map(|e| 1.0 - 0.5f64.powf(exponent_norm(e) as f64))
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        })
        .ok_or(PzError::UndefinedFactor)
}

pub fn diagnostics(pz: &PolyZonotope) -> OverapproxDiagnostics {
    let even = pz.exponents().iter().filter(|e| is_all_even(e)).count();
    OverapproxDiagnostics {
        dep_norm: error_bound(pz),
        rho: contraction_factor(pz).ok(),
        even_index_count: even,
        odd_index_count: pz.term_count() - even,
    }
}
