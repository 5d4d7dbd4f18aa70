//! Plotting by overapproximate-and-split: enclose every leaf of a split tree
//! in a zonotope, project to two coordinates, and draw the polygons together
//! with sampled member points.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PzError, Result};
use crate::io::write_atomic;
use crate::overapprox::{error_bound, overapproximate};
use crate::random::random_member;
use crate::sets::{PolyZonotope, Zonotope};
use crate::splitting::{expand_levels, SplitNode, SplitStrategy, DEFAULT_LEAF_CAP};

pub type Point2 = [f64; 2];

pub const CSV_HEADER: &str = "kind,leaf_id,x,y";

/// Vertices of a 2-D zonotope, counterclockwise, starting at the lowest point.
///
/// Parallel generators are summed first, so the result has `2m` vertices for
/// `m` distinct generator directions; a single direction gives a 2-point
/// segment and no generators give the center alone.
pub fn zonotope_to_polygon(z: &Zonotope) -> Result<Vec<Point2>> {
    if z.dim() != 2 {
        return Err(PzError::DimensionMismatch {
            context: "polygon of zonotope",
            expected: 2,
            found: z.dim(),
        });
    }
    let mut gens: Vec<Point2> = z
        .generators()
        .iter()
        .filter(|g| g[0] != 0.0 || g[1] != 0.0)
        .map(|g| {
            // fold into the upper half plane, angle in [0, π)
            if g[1] < 0.0 || (g[1] == 0.0 && g[0] < 0.0) {
                [-g[0], -g[1]]
            } else {
                [g[0], g[1]]
            }
        })
        .collect();
    gens.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));

    let mut merged: Vec<Point2> = Vec::with_capacity(gens.len());
    for g in gens {
        if let Some(last) = merged.last_mut() {
            let cross = last[0] * g[1] - last[1] * g[0];
            let scale = last[0].hypot(last[1]) * g[0].hypot(g[1]);
            if cross.abs() <= 1e-12 * scale {
                last[0] += g[0];
                last[1] += g[1];
                continue;
            }
        }
        merged.push(g);
    }

    let c = z.center();
    let mut p = [c[0], c[1]];
    for g in &merged {
        p[0] -= g[0];
        p[1] -= g[1];
    }
    let mut verts = vec![p];
    for (step, g) in merged
        .iter()
        .map(|g| (2.0, g))
        .chain(merged.iter().map(|g| (-2.0, g)))
    {
        p = [p[0] + step * g[0], p[1] + step * g[1]];
        verts.push(p);
    }
    if !merged.is_empty() {
        // the walk ends back at the start
        verts.pop();
    }
    Ok(verts)
}

/// Whether `p` lies in the convex counterclockwise loop `poly`, up to `tol`.
pub fn polygon_contains(poly: &[Point2], p: Point2, tol: f64) -> bool {
    match poly.len() {
        0 => false,
        1 => (poly[0][0] - p[0]).hypot(poly[0][1] - p[1]) <= tol,
        2 => {
            let (a, b) = (poly[0], poly[1]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
            let q = [a[0] + t * d[0], a[1] + t * d[1]];
            (q[0] - p[0]).hypot(q[1] - p[1]) <= tol
        }
        n => (0..n).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let e = [b[0] - a[0], b[1] - a[1]];
            let cross = e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]);
            cross >= -tol * e[0].hypot(e[1])
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotDepth {
    /// Full cyclic rounds: `rounds · r` splits on every branch.
    Rounds(usize),
    /// A fixed number of splits on every branch.
    Splits(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub dims: (usize, usize),
    pub depth: PlotDepth,
    pub strategy: SplitStrategy,
    pub samples: usize,
    pub seed: u64,
    pub leaf_cap: u128,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            dims: (0, 1),
            depth: PlotDepth::Rounds(0),
            strategy: SplitStrategy::Cyclic,
            samples: 200,
            seed: 0,
            leaf_cap: DEFAULT_LEAF_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotArtifact {
    /// One loop per leaf enclosure.
    pub polygons: Vec<Vec<Point2>>,
    pub samples: Vec<Point2>,
    /// Splits applied along every branch.
    pub depth: usize,
    pub leaf_count: usize,
    pub initial_dep_norm: f64,
    /// Largest leaf `‖G_D‖`.
    pub max_residual: f64,
}

pub fn plot(pz: &PolyZonotope, opts: &PlotOptions) -> Result<PlotArtifact> {
    let steps = match opts.depth {
        PlotDepth::Rounds(k) => k.checked_mul(pz.factor_count()).ok_or(PzError::Budget {
            what: "split tree leaves",
            needed: u128::MAX,
            cap: opts.leaf_cap,
        })?,
        PlotDepth::Splits(s) => s,
    };
    // validate the projection before doing any work
    pz.project(opts.dims)?;
    let leaves = expand_levels(
        SplitNode::root(pz.clone()),
        opts.strategy,
        steps,
        opts.leaf_cap,
        |_, _| {},
    )?;
    let polygons = leaves
        .iter()
        .map(|leaf| zonotope_to_polygon(&overapproximate(&leaf.set).project(opts.dims)?))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let samples = (0..opts.samples)
        .map(|_| {
            let x = random_member(&mut rng, pz);
            [x[opts.dims.0], x[opts.dims.1]]
        })
        .collect();
    Ok(PlotArtifact {
        polygons,
        samples,
        depth: steps,
        leaf_count: leaves.len(),
        initial_dep_norm: error_bound(pz),
        max_residual: leaves.iter().map(|l| l.dep_norm).fold(0.0, f64::max),
    })
}

pub fn to_csv(art: &PlotArtifact) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (id, poly) in art.polygons.iter().enumerate() {
        for v in poly {
            let _ = writeln!(out, "vertex,{id},{},{}", v[0], v[1]);
        }
    }
    for s in &art.samples {
        let _ = writeln!(out, "sample,,{},{}", s[0], s[1]);
    }
    out
}

pub fn to_svg(art: &PlotArtifact) -> String {
    let pts = art.polygons.iter().flatten().chain(&art.samples);
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in pts {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (-1.0, -1.0, 1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.05 * span;
    let dot = 0.004 * span;
    let stroke = 0.002 * span;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
        x0 - pad,
        -(y1 + pad),
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    for (id, poly) in art.polygons.iter().enumerate() {
        let points: Vec<String> = poly.iter().map(|v| format!("{},{}", v[0], v[1])).collect();
        let _ = writeln!(
            out,
            r##"<polygon data-leaf="{id}" points="{}" fill="#d3d3d3" fill-opacity="0.6" stroke="#808080" stroke-width="{stroke}"/>"##,
            points.join(" ")
        );
    }
    for s in &art.samples {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{dot}" fill="black"/>"#,
            s[0], s[1]
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Write the SVG and CSV renderings, each atomically.
pub fn write_plot(art: &PlotArtifact, svg: &Path, csv: &Path) -> Result<()> {
    write_atomic(svg, to_svg(art).as_bytes())?;
    write_atomic(csv, to_csv(art).as_bytes())
}
