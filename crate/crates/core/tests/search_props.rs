use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyzono::hardness::{bipartization_brute, bipartization_via_pz, chebyshev_pz, Graph};
use polyzono::intersect::{check_halfspace, termination_margin, CheckOptions, Outcome};
use polyzono::oracles::{corner_min, grid_min, interval_hull_1d};
use polyzono::random::{random_direction, random_set, RandomSetSpec};
use polyzono::splitting::SplitStrategy;
use polyzono::{Halfspace, PolyZonotope};

fn random(rng: &mut ChaCha8Rng, dim: usize, max_factors: usize, max_degree: u32) -> PolyZonotope {
    loop {
        let spec = RandomSetSpec {
            dim,
            factors: rng.gen_range(1..=max_factors),
            terms: rng.gen_range(1..=6),
            indep: rng.gen_range(0..=2),
            max_degree: rng.gen_range(1..=max_degree),
        };
        let pz = random_set(rng, spec);
        if pz.term_count() > 0 {
            return pz;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_agree_with_the_grid(seed in any::<u64>(), cyclic in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pz = random(&mut rng, 2, 4, 3);
        let d = random_direction(&mut rng, 2);
        let proj = pz.scalar_project(&d).unwrap();
        let grid = grid_min(&proj, 11).unwrap();
        let offset = grid.value + rng.gen_range(-1.0..0.5);
        let hs = Halfspace::new(d, offset).unwrap();
        let opts = CheckOptions {
            strategy: if cyclic { SplitStrategy::Cyclic } else { SplitStrategy::MaxExponentNorm },
            max_splits: 4096,
            samples_per_node: 2,
            seed,
        };
        let v = check_halfspace(&pz, &hs, opts).unwrap();
        match v.outcome {
            // the grid minimizer is a member inside the halfspace
            Outcome::Separated => prop_assert!(grid.value > offset),
            Outcome::Witness => {
                let x = v.witness_point.clone().unwrap();
                let (a, b) = v.witness_factors.clone().unwrap();
                prop_assert!(a.iter().chain(&b).all(|t| t.abs() <= 1.0));
                let again = pz.evaluate(&a, &b).unwrap();
                for (u, w) in x.iter().zip(&again) {
                    prop_assert!((u - w).abs() <= 1e-12 * u.abs().max(1.0));
                }
                prop_assert!(hs.contains(&x));
            }
            Outcome::Exhausted => prop_assert!(v.splits_used >= 4096 && v.residual_bound > 0.0),
        }
    }

    #[test]
    fn separation_depth_within_prediction(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pz = random(&mut rng, 2, 3, 2);
        let d = random_direction(&mut rng, 2);
        let proj = pz.scalar_project(&d).unwrap();
        prop_assume!(proj.term_count() > 0);
        let low = grid_min(&proj, 11).unwrap().lower_bound();
        let hs = Halfspace::new(d, low - 0.3).unwrap();
        let est = termination_margin(&pz, &hs).unwrap();
        let v = check_halfspace(&pz, &hs, CheckOptions { max_splits: 200_000, ..Default::default() }).unwrap();
        prop_assert_eq!(v.outcome, Outcome::Separated);
        prop_assert!(v.max_depth <= est.split_depth);
    }

    #[test]
    fn corner_and_grid_oracles_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pz = random(&mut rng, 1, 4, 1);
        let corner = corner_min(&pz).unwrap();
        let coarse = grid_min(&pz, 11).unwrap();
        // both finer grids contain every point of the 11-point grid
        let fine_points = if pz.factor_count() <= 3 { 101 } else { 41 };
        let fine = grid_min(&pz, fine_points).unwrap();
        let two = grid_min(&pz, 2).unwrap();
        prop_assert!(corner.value <= coarse.value + 1e-12);
        prop_assert!(fine.value <= coarse.value + 1e-12);
        prop_assert!((two.value - corner.value).abs() <= 1e-12 * corner.value.abs().max(1.0));
        // a multi-affine minimum over a box is never beaten nearby
        for _ in 0..50 {
            let a: Vec<f64> = corner
                .argmin
                .iter()
                .map(|&c| (c - c * rng.gen_range(0.0..0.2)).clamp(-1.0, 1.0))
                .collect();
            let b: Vec<f64> = (0..pz.indep_count()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            prop_assert!(pz.evaluate(&a, &b).unwrap()[0] >= corner.value - 1e-12);
        }
    }

    #[test]
    fn reduction_matches_brute_force(seed in any::<u64>(), n in 2usize..=9, p in 0.1f64..0.9) {
        let g = Graph::random(n, p, seed);
        prop_assert_eq!(bipartization_via_pz(&g).unwrap(), bipartization_brute(&g).unwrap());
    }
}

#[test]
fn chebyshev_range_stays_in_unit_interval() {
    for k in (1..=15).step_by(2) {
        let pz = chebyshev_pz(k).unwrap();
        let (lo, hi) = interval_hull_1d(&pz, 2001).unwrap();
        assert!(
            (lo + 1.0).abs() <= 1e-6 && (hi - 1.0).abs() <= 1e-6,
            "T_{k}: [{lo}, {hi}]"
        );
        for i in 0..=200 {
            let x = -1.0 + i as f64 / 100.0;
            let want = (k as f64 * f64::acos(x)).cos();
            let got = pz.evaluate(&[x], &[]).unwrap()[0];
            assert!(
                (got - want).abs() <= 1e-9,
                "T_{k}({x}) = {got}, cos form {want}"
            );
        }
    }
}

#[test]
fn small_graphs() {
    assert_eq!(bipartization_via_pz(&Graph::complete(3)).unwrap(), 1);
    assert_eq!(bipartization_via_pz(&Graph::complete(4)).unwrap(), 2);
    assert_eq!(bipartization_via_pz(&Graph::complete(5)).unwrap(), 4);
    assert_eq!(bipartization_via_pz(&Graph::cycle(4)).unwrap(), 0);
    assert_eq!(bipartization_via_pz(&Graph::cycle(5)).unwrap(), 1);
}
