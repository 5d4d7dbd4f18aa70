use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyzono::fixtures::example1;
use polyzono::overapprox::contraction_factor;
use polyzono::plot::{
    plot, polygon_contains, to_csv, to_svg, PlotArtifact, PlotDepth, PlotOptions,
};
use polyzono::random::{random_member, random_set, RandomSetSpec};
use polyzono::PolyZonotope;

fn random(rng: &mut ChaCha8Rng) -> PolyZonotope {
    loop {
        let spec = RandomSetSpec {
            dim: 3,
            factors: rng.gen_range(1..=3),
            terms: rng.gen_range(1..=5),
            indep: rng.gen_range(0..=2),
            max_degree: rng.gen_range(1..=3),
        };
        let pz = random_set(rng, spec);
        if pz.term_count() > 0 {
            return pz;
        }
    }
}

fn options(depth: PlotDepth, dims: (usize, usize)) -> PlotOptions {
    PlotOptions {
        dims,
        depth,
        samples: 50,
        ..Default::default()
    }
}

#[test]
fn polygons_cover_member_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..6 {
        let pz = random(&mut rng);
        for depth in [
            PlotDepth::Rounds(0),
            PlotDepth::Rounds(1),
            PlotDepth::Splits(5),
        ] {
            let art = plot(&pz, &options(depth, (0, 2))).unwrap();
            for _ in 0..2000 {
                let x = random_member(&mut rng, &pz);
                let p = [x[0], x[2]];
                assert!(
                    art.polygons
                        .iter()
                        .any(|poly| polygon_contains(poly, p, 1e-9)),
                    "{p:?} outside every leaf at {depth:?}"
                );
            }
        }
    }
}

fn parse_csv(text: &str) -> Vec<Vec<[f64; 2]>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,leaf_id,x,y"));
    let mut polys: Vec<Vec<[f64; 2]>> = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == "vertex" {
            let id: usize = f[1].parse().unwrap();
            if polys.len() <= id {
                polys.resize(id + 1, Vec::new());
            }
            polys[id].push([f[2].parse().unwrap(), f[3].parse().unwrap()]);
        } else {
            assert_eq!(f[0], "sample");
        }
    }
    polys
}

fn parse_svg(text: &str) -> Vec<Vec<[f64; 2]>> {
    text.lines()
        .filter(|l| l.starts_with("<polygon"))
        .map(|l| {
            let start = l.find("points=\"").unwrap() + 8;
            let end = start + l[start..].find('"').unwrap();
            l[start..end]
                .split(' ')
                .map(|pair| {
                    let (x, y) = pair.split_once(',').unwrap();
                    [x.parse().unwrap(), y.parse().unwrap()]
                })
                .collect()
        })
        .collect()
}

fn check_renderings(art: &PlotArtifact) {
    let csv = parse_csv(&to_csv(art));
    let svg = parse_svg(&to_svg(art));
    assert_eq!(csv, art.polygons);
    assert_eq!(svg, art.polygons);
}

#[test]
fn csv_and_svg_share_vertices() {
    let art = plot(&example1(), &options(PlotDepth::Rounds(1), (0, 1))).unwrap();
    assert_eq!(art.leaf_count, 4);
    check_renderings(&art);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let art = plot(&random(&mut rng), &options(PlotDepth::Splits(3), (1, 0))).unwrap();
        check_renderings(&art);
    }
}

#[test]
fn residual_shrinks_each_round() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut sets = vec![example1()];
    sets.extend((0..5).map(|_| random(&mut rng)));
    for pz in sets {
        let rho = contraction_factor(&pz).unwrap();
        let rounds = if pz.factor_count() <= 2 { 3 } else { 2 };
        let residuals: Vec<f64> = (0..=rounds)
            .map(|k| {
                plot(&pz, &options(PlotDepth::Rounds(k), (0, 1)))
                    .unwrap()
                    .max_residual
            })
            .collect();
        for w in residuals.windows(2) {
            assert!(w[1] <= rho * w[0] + 1e-10, "{residuals:?} with rho {rho}");
        }
    }
}

#[test]
fn example1_hexagon_and_lifted_square() {
    let art = plot(&example1(), &options(PlotDepth::Rounds(0), (0, 1))).unwrap();
    assert_eq!(art.polygons.len(), 1);
    // (1,0) and (2,0) are parallel, so four generators give six vertices
    assert_eq!(art.polygons[0].len(), 6);

    let lifted = PolyZonotope::dependent(vec![vec![1.0, 1.0]], vec![vec![2]]).unwrap();
    let art = plot(&lifted, &options(PlotDepth::Rounds(1), (0, 1))).unwrap();
    assert_eq!(art.leaf_count, 2);
    for poly in &art.polygons {
        assert_eq!(poly.len(), 2);
        let xs: Vec<f64> = poly.iter().map(|p| p[0]).collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 0.25).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }
}
