//! Seeded random sets and factor draws for benches and property checks.

use rand::Rng;

use crate::sets::PolyZonotope;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSetSpec {
    pub dim: usize,
    pub factors: usize,
    pub terms: usize,
    pub indep: usize,
    /// Largest per-factor exponent; 1 gives multi-affine sets.
    pub max_degree: u32,
}

/// A random canonical set. Entries are uniform in `[-2, 2]`, the center in
/// `[-1, 1]`; every term has at least one positive exponent. Canonicalization
/// may merge terms or drop unused factors, so the result can be smaller than
/// requested.
pub fn random_set<R: Rng + ?Sized>(rng: &mut R, spec: RandomSetSpec) -> PolyZonotope {
    let n = spec.dim;
    let center = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let indep = (0..spec.indep)
        .map(|_| (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect())
        .collect();
    let mut dep = Vec::with_capacity(spec.terms);
    let mut exps = Vec::with_capacity(spec.terms);
    if spec.factors > 0 && spec.max_degree > 0 {
        for _ in 0..spec.terms {
            let mut e: Vec<u32> = (0..spec.factors)
                .map(|_| rng.gen_range(0..=spec.max_degree))
                .collect();
            if e.iter().all(|&x| x == 0) {
                let k = rng.gen_range(0..spec.factors);
                e[k] = rng.gen_range(1..=spec.max_degree);
            }
            exps.push(e);
            dep.push((0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect());
        }
    }
    PolyZonotope::new(center, indep, dep, exps).expect("random entries are finite and consistent")
}

/// Uniform `(α, β)` for a set.
pub fn random_factors<R: Rng + ?Sized>(rng: &mut R, pz: &PolyZonotope) -> (Vec<f64>, Vec<f64>) {
    (
        (0..pz.factor_count())
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect(),
        (0..pz.indep_count())
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect(),
    )
}

/// A random member point.
pub fn random_member<R: Rng + ?Sized>(rng: &mut R, pz: &PolyZonotope) -> Vec<f64> {
    let (a, b) = random_factors(rng, pz);
    pz.evaluate(&a, &b)
        .expect("factors drawn inside the unit box")
}

/// A direction with entries uniform in `[-1, 1]`, never the zero vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if d.iter().any(|x| x.abs() > 1e-3) {
            return d;
        }
    }
}
