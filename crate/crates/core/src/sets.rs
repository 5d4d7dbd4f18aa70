//! Zonotopes, polynomial zonotopes and halfspaces.
//!
//! A polynomial zonotope is stored in sparse form
//!
//! ```text
//! PZ = { c + Σ_i (Π_k α_k^E(k,i)) G_D(·,i) + Σ_j β_j G_I(·,j) | α, β ∈ [-1,1] }
//! ```
//!
//! Matrices are stored column-major by generator: `dep_generators[i]` is the
//! column `G_D(·,i)` and `exponents[i]` is the matching exponent column
//! `E(·,i)`, so rows of the exponent matrix are factors and columns are terms.
//!
//! [`PolyZonotope`] values are always canonical. Non-canonical data lives in
//! [`RawPolyZonotope`] until [`RawPolyZonotope::canonicalize`] is called.

use indexmap::IndexMap;

use crate::error::{PzError, Result};

/// Dependent generator columns with a one-norm below this are dropped during
/// canonicalization.
pub const DUST: f64 = 1e-14;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn one_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn check_finite(what: &str, v: &[f64]) -> Result<()> {
    if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
        return Err(PzError::Representation(format!(
            "{what}[{pos}] is not finite"
        )));
    }
    Ok(())
}

fn check_columns(what: &str, cols: &[Vec<f64>], n: usize) -> Result<()> {
    for (j, col) in cols.iter().enumerate() {
        if col.len() != n {
            return Err(PzError::Representation(format!(
                "{what}[{j}] has length {}, expected dim {n}",
                col.len()
            )));
        }
        check_finite(&format!("{what}[{j}]"), col)?;
    }
    Ok(())
}

fn check_factors(what: &str, values: &[f64]) -> Result<()> {
    for (k, v) in values.iter().enumerate() {
        if v.is_nan() || v.abs() > 1.0 {
            return Err(PzError::Domain(format!(
                "{what}[{k}] = {v} lies outside [-1, 1]"
            )));
        }
    }
    Ok(())
}

pub(crate) fn monomial(alpha: &[f64], exps: &[u32]) -> f64 {
    alpha
        .iter()
        .zip(exps)
        .map(|(a, &e)| a.powi(e as i32))
        .product()
}

/// A zonotope `⟨c, G⟩ = { c + Σ_j β_j G(·,j) | β ∈ [-1,1]^p }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    center: Vec<f64>,
    generators: Vec<Vec<f64>>,
}

impl Zonotope {
    pub fn new(center: Vec<f64>, generators: Vec<Vec<f64>>) -> Result<Self> {
        check_finite("center", &center)?;
        check_columns("generators", &generators, center.len())?;
        Ok(Self { center, generators })
    }

    /// The single point `c`.
    pub fn point(center: Vec<f64>) -> Result<Self> {
        Self::new(center, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    fn check_direction(&self, d: &[f64]) -> Result<()> {
        if d.len() != self.dim() {
            return Err(PzError::DimensionMismatch {
                context: "direction",
                expected: self.dim(),
                found: d.len(),
            });
        }
        Ok(())
    }

    /// Exact `min_{x ∈ Z} xᵀd = cᵀd − Σ_j |G(·,j)ᵀd|`.
    pub fn support_min(&self, d: &[f64]) -> Result<f64> {
        self.check_direction(d)?;
        let spread: f64 = self.generators.iter().map(|g| dot(g, d).abs()).sum();
        Ok(dot(&self.center, d) - spread)
    }

    /// Exact `max_{x ∈ Z} xᵀd`.
    pub fn support_max(&self, d: &[f64]) -> Result<f64> {
        self.check_direction(d)?;
        let spread: f64 = self.generators.iter().map(|g| dot(g, d).abs()).sum();
        Ok(dot(&self.center, d) + spread)
    }

    /// Factor assignment attaining [`Zonotope::support_min`]: `β_j = −sign(G(·,j)ᵀd)`.
    pub fn argmin_factors(&self, d: &[f64]) -> Result<Vec<f64>> {
        self.check_direction(d)?;
        Ok(self
            .generators
            .iter()
            .map(|g| {
                let s = dot(g, d);
                if s > 0.0 {
                    -1.0
                } else if s < 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn evaluate(&self, beta: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.generator_count() {
            return Err(PzError::DimensionMismatch {
                context: "zonotope factors",
                expected: self.generator_count(),
                found: beta.len(),
            });
        }
        check_factors("beta", beta)?;
        let mut x = self.center.clone();
        for (b, g) in beta.iter().zip(&self.generators) {
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi += b * gi;
            }
        }
        Ok(x)
    }

    /// Restrict to two coordinates.
    pub fn project(&self, dims: (usize, usize)) -> Result<Zonotope> {
        let n = self.dim();
        for idx in [dims.0, dims.1] {
            if idx >= n {
                return Err(PzError::Index {
                    index: idx,
                    bound: n,
                });
            }
        }
        let pick = |v: &[f64]| vec![v[dims.0], v[dims.1]];
        Ok(Zonotope {
            center: pick(&self.center),
            generators: self.generators.iter().map(|g| pick(g)).collect(),
        })
    }

    /// `[min, max]` of a one-dimensional zonotope.
    pub fn interval(&self) -> Result<(f64, f64)> {
        if self.dim() != 1 {
            return Err(PzError::DimensionMismatch {
                context: "interval of zonotope",
                expected: 1,
                found: self.dim(),
            });
        }
        Ok((self.support_min(&[1.0])?, self.support_max(&[1.0])?))
    }
}

/// Polynomial zonotope data that may violate canonical form.
///
/// Fields are public so callers can assemble arbitrary (even redundant)
/// representations; [`RawPolyZonotope::canonicalize`] turns them into a
/// [`PolyZonotope`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawPolyZonotope {
    pub center: Vec<f64>,
    pub indep_generators: Vec<Vec<f64>>,
    pub dep_generators: Vec<Vec<f64>>,
    pub exponents: Vec<Vec<u32>>,
}

impl RawPolyZonotope {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn factor_count(&self) -> usize {
        self.exponents.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        check_finite("center", &self.center)?;
        check_columns("indep_generators", &self.indep_generators, n)?;
        check_columns("dep_generators", &self.dep_generators, n)?;
        if self.exponents.len() != self.dep_generators.len() {
            return Err(PzError::Representation(format!(
                "exponents has {} columns but dep_generators has {}",
                self.exponents.len(),
                self.dep_generators.len()
            )));
        }
        let r = self.factor_count();
        for (i, col) in self.exponents.iter().enumerate() {
            if col.len() != r {
                return Err(PzError::Representation(format!(
                    "exponents[{i}] has length {}, expected {r}",
                    col.len()
                )));
            }
            // powi takes i32; larger powers only arise from malformed input
            if let Some(k) = col.iter().position(|&e| e > i32::MAX as u32) {
                return Err(PzError::Representation(format!(
                    "exponents[{i}][{k}] overflows the supported exponent range"
                )));
            }
        }
        Ok(())
    }

    /// Evaluate the (possibly redundant) representation at one factor point.
    pub fn evaluate(&self, alpha: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        evaluate_parts(
            &self.center,
            &self.indep_generators,
            &self.dep_generators,
            &self.exponents,
            self.factor_count(),
            alpha,
            beta,
        )
    }

    pub fn canonicalize(&self) -> Result<PolyZonotope> {
        self.canonicalize_tracked().map(|(pz, _)| pz)
    }

    /// Canonicalize and report which input factor rows survived, in order.
    ///
    /// `kept[k]` is the input factor index that became factor `k` of the
    /// result.
    pub fn canonicalize_tracked(&self) -> Result<(PolyZonotope, Vec<usize>)> {
        self.validate()?;
        let r = self.factor_count();
        let mut center = self.center.clone();
        let mut terms: IndexMap<Vec<u32>, Vec<f64>> = IndexMap::new();
        for (g, e) in self.dep_generators.iter().zip(&self.exponents) {
            if e.iter().all(|&x| x == 0) {
                for (ci, gi) in center.iter_mut().zip(g) {
                    *ci += gi;
                }
                continue;
            }
            match terms.get_mut(e) {
                Some(acc) => {
                    for (ai, gi) in acc.iter_mut().zip(g) {
                        *ai += gi;
                    }
                }
                None => {
                    terms.insert(e.clone(), g.clone());
                }
            }
        }
        terms.retain(|_, g| one_norm(g) >= DUST);

        let kept: Vec<usize> = (0..r)
            .filter(|&k| terms.keys().any(|e| e[k] != 0))
            .collect();
        let (exponents, dep_generators): (Vec<Vec<u32>>, Vec<Vec<f64>>) = terms
            .into_iter()
            .map(|(e, g)| (kept.iter().map(|&k| e[k]).collect(), g))
            .unzip();
        let pz = PolyZonotope {
            center,
            indep_generators: self.indep_generators.clone(),
            dep_generators,
            exponents,
            factors: kept.len(),
        };
        Ok((pz, kept))
    }
}

fn evaluate_parts(
    center: &[f64],
    indep: &[Vec<f64>],
    dep: &[Vec<f64>],
    exponents: &[Vec<u32>],
    r: usize,
    alpha: &[f64],
    beta: &[f64],
) -> Result<Vec<f64>> {
    if alpha.len() != r {
        return Err(PzError::DimensionMismatch {
            context: "dependent factors",
            expected: r,
            found: alpha.len(),
        });
    }
    if beta.len() != indep.len() {
        return Err(PzError::DimensionMismatch {
            context: "independent factors",
            expected: indep.len(),
            found: beta.len(),
        });
    }
    check_factors("alpha", alpha)?;
    check_factors("beta", beta)?;
    let mut x = center.to_vec();
    for (g, e) in dep.iter().zip(exponents) {
        let m = monomial(alpha, e);
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi += m * gi;
        }
    }
    for (b, g) in beta.iter().zip(indep) {
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi += b * gi;
        }
    }
    Ok(x)
}

/// A polynomial zonotope in canonical form.
///
/// Canonical form: no all-zero exponent column, no duplicate exponent
/// columns, no (near) zero dependent generator, and every factor row is used.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyZonotope {
    center: Vec<f64>,
    indep_generators: Vec<Vec<f64>>,
    dep_generators: Vec<Vec<f64>>,
    exponents: Vec<Vec<u32>>,
    factors: usize,
}

impl PolyZonotope {
    /// Build from parts, canonicalizing.
    pub fn new(
        center: Vec<f64>,
        indep_generators: Vec<Vec<f64>>,
        dep_generators: Vec<Vec<f64>>,
        exponents: Vec<Vec<u32>>,
    ) -> Result<Self> {
        RawPolyZonotope {
            center,
            indep_generators,
            dep_generators,
            exponents,
        }
        .canonicalize()
    }

    /// Purely dependent set `⟨G_D, E⟩` with zero center.
    pub fn dependent(dep_generators: Vec<Vec<f64>>, exponents: Vec<Vec<u32>>) -> Result<Self> {
        let n = dep_generators.first().map_or(0, Vec::len);
        Self::new(vec![0.0; n], Vec::new(), dep_generators, exponents)
    }

    pub fn from_zonotope(z: &Zonotope) -> Self {
        PolyZonotope {
            center: z.center.clone(),
            indep_generators: z.generators.clone(),
            dep_generators: Vec::new(),
            exponents: Vec::new(),
            factors: 0,
        }
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Number of dependent factors `r`.
    pub fn factor_count(&self) -> usize {
        self.factors
    }

    /// Number of independent generators `q`.
    pub fn indep_count(&self) -> usize {
        self.indep_generators.len()
    }

    /// Number of dependent terms `h`.
    pub fn term_count(&self) -> usize {
        self.dep_generators.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn indep_generators(&self) -> &[Vec<f64>] {
        &self.indep_generators
    }

    pub fn dep_generators(&self) -> &[Vec<f64>] {
        &self.dep_generators
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn to_raw(&self) -> RawPolyZonotope {
        RawPolyZonotope {
            center: self.center.clone(),
            indep_generators: self.indep_generators.clone(),
            dep_generators: self.dep_generators.clone(),
            exponents: self.exponents.clone(),
        }
    }

    /// True when every exponent is 0 or 1.
    pub fn is_multi_affine(&self) -> bool {
        self.exponents.iter().flatten().all(|&e| e <= 1)
    }

    /// `c + Σ_i (Π_k α_k^E(k,i)) G_D(·,i) + Σ_j β_j G_I(·,j)`.
    pub fn evaluate(&self, alpha: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
        evaluate_parts(
            &self.center,
            &self.indep_generators,
            &self.dep_generators,
            &self.exponents,
            self.factors,
            alpha,
            beta,
        )
    }

    /// `PZ = Z_I ⊕ PZ_D`.
    pub fn minkowski_decompose(&self) -> (Zonotope, PolyZonotope) {
        let zi = Zonotope {
            center: self.center.clone(),
            generators: self.indep_generators.clone(),
        };
        let pzd = PolyZonotope {
            center: vec![0.0; self.dim()],
            indep_generators: Vec::new(),
            dep_generators: self.dep_generators.clone(),
            exponents: self.exponents.clone(),
            factors: self.factors,
        };
        (zi, pzd)
    }

    /// Keep only coordinates `dims.0` and `dims.1`. Duplicate indices are
    /// allowed and give a set on the diagonal.
    pub fn project(&self, dims: (usize, usize)) -> Result<PolyZonotope> {
        let n = self.dim();
        for idx in [dims.0, dims.1] {
            if idx >= n {
                return Err(PzError::Index {
                    index: idx,
                    bound: n,
                });
            }
        }
        let pick = |v: &Vec<f64>| vec![v[dims.0], v[dims.1]];
        RawPolyZonotope {
            center: pick(&self.center),
            indep_generators: self.indep_generators.iter().map(pick).collect(),
            dep_generators: self.dep_generators.iter().map(pick).collect(),
            exponents: self.exponents.clone(),
        }
        .canonicalize()
    }

    /// The one-dimensional set `{ xᵀd | x ∈ PZ }`.
    pub fn scalar_project(&self, d: &[f64]) -> Result<PolyZonotope> {
        self.scalar_project_tracked(d).map(|(pz, _)| pz)
    }

    /// As [`PolyZonotope::scalar_project`], also returning which input factors
    /// survive canonicalization.
    pub fn scalar_project_tracked(&self, d: &[f64]) -> Result<(PolyZonotope, Vec<usize>)> {
        if d.len() != self.dim() {
            return Err(PzError::DimensionMismatch {
                context: "projection direction",
                expected: self.dim(),
                found: d.len(),
            });
        }
        check_finite("direction", d)?;
        let proj = |v: &Vec<f64>| vec![dot(v, d)];
        RawPolyZonotope {
            center: vec![dot(&self.center, d)],
            indep_generators: self.indep_generators.iter().map(proj).collect(),
            dep_generators: self.dep_generators.iter().map(proj).collect(),
            exponents: self.exponents.clone(),
        }
        .canonicalize_tracked()
    }
}

/// `H = { x | xᵀ normal ≤ offset }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        check_finite("normal", &normal)?;
        if !offset.is_finite() {
            return Err(PzError::Representation("offset is not finite".into()));
        }
        if normal.iter().all(|&x| x == 0.0) {
            return Err(PzError::Representation("normal is the zero vector".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dot(x, &self.normal) <= self.offset
    }
}
