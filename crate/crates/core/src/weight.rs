//! Weight homology of a variety with a simple normal crossing
//! compactification, computed from the incidence of boundary strata, plus
//! total complexes and the first two pages of their spectral sequences.
//!
//! Level `a` of a configuration lists the connected components of the
//! `a`-fold intersections of boundary components, level 0 being the
//! compactification itself. A stratum at level `a >= 1` has `a` faces: face
//! `j` is the level-`a-1` stratum containing it obtained by dropping its
//! `j`-th smallest boundary component.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{
    direct_sum, localize, snf, sum_map, AbGroupError, ComplexMap, DirectSum, FGAbGroup,
    FGComplex, FGMap, IntMatrix, LesKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("{levels} levels exceed dim + 1 = {}", dim + 1)]
    TooManyLevels { levels: usize, dim: usize },
    #[error("stratum id {0:?} is declared twice")]
    DuplicateStratum(String),
    #[error("face references unknown stratum {0:?}")]
    UnknownStratum(String),
    #[error("stratum {stratum:?} has no face for drop position {drop}")]
    MissingFace { stratum: String, drop: usize },
    #[error("stratum {stratum:?} has two faces for drop position {drop}")]
    DuplicateFace { stratum: String, drop: usize },
    #[error("face {drop} of {stratum:?} must point one level down and drop a position below the level")]
    BadFace { stratum: String, drop: usize },
    #[error("faces {j} and {k} of {stratum:?} violate the simplicial identity")]
    IncoherentIncidence { stratum: String, j: usize, k: usize },
    #[error("weight complex of length {length} exceeds dim + 1 = {}", dim + 1)]
    TooLong { length: usize, dim: usize },
    #[error("double complex: {0}")]
    SignIncoherent(String),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

/// Coefficients: `Z`, or `Z[1/p]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Lambda {
    #[default]
    Z,
    InvertP(u64),
}

impl Lambda {
    pub fn apply(&self, g: &FGAbGroup) -> FGAbGroup {
        match self {
            Lambda::Z => g.clone(),
            Lambda::InvertP(p) => localize(g, *p),
        }
    }
}

impl std::fmt::Display for Lambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lambda::Z => write!(f, "Z"),
            Lambda::InvertP(p) => write!(f, "Z[1/{p}]"),
        }
    }
}

impl Serialize for Lambda {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "Z" {
            return Ok(Lambda::Z);
        }
        s.strip_prefix("Z[1/")
            .and_then(|r| r.strip_suffix(']'))
            .and_then(|p| p.parse().ok())
            .map(Lambda::InvertP)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown coefficient ring {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    #[serde(deserialize_with = "id_string")]
    pub from: String,
    pub drop: usize,
    #[serde(deserialize_with = "id_string")]
    pub to: String,
}

fn id_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        Num(u64),
        Text(String),
    }
    Ok(match Id::deserialize(d)? {
        Id::Num(n) => n.to_string(),
        Id::Text(s) => s,
    })
}

fn id_strings<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Vec<String>>, D::Error> {
    #[derive(Deserialize)]
    struct Wrapped(#[serde(deserialize_with = "id_string")] String);
    let v: Vec<Vec<Wrapped>> = Vec::deserialize(d)?;
    Ok(v.into_iter()
        .map(|l| l.into_iter().map(|w| w.0).collect())
        .collect())
}

/// Incidence data of the strata. Construct with [`SNCConfig::new`], which
/// validates every invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SNCConfigData", into = "SNCConfigData")]
pub struct SNCConfig {
    dim: usize,
    levels: Vec<Vec<String>>,
    faces: Vec<Face>,
    /// `face_of[level][stratum index][drop] = index at level - 1`
    face_of: Vec<Vec<Vec<usize>>>,
}

/// Unvalidated configuration as read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SNCConfigData {
    pub dim: usize,
    #[serde(deserialize_with = "id_strings")]
    pub levels: Vec<Vec<String>>,
    #[serde(default)]
    pub faces: Vec<Face>,
}

impl SNCConfigData {
    pub fn build(self) -> Result<SNCConfig, WeightError> {
        SNCConfig::new(self.dim, self.levels, self.faces)
    }
}

impl TryFrom<SNCConfigData> for SNCConfig {
    type Error = WeightError;
    fn try_from(r: SNCConfigData) -> Result<Self, WeightError> {
        r.build()
    }
}

impl From<SNCConfig> for SNCConfigData {
    fn from(c: SNCConfig) -> Self {
        SNCConfigData {
            dim: c.dim,
            levels: c.levels,
            faces: c.faces,
        }
    }
}

impl SNCConfig {
    pub fn new(dim: usize, levels: Vec<Vec<String>>, faces: Vec<Face>) -> Result<Self, WeightError> {
        if levels.len() > dim + 1 {
            return Err(WeightError::TooManyLevels {
                levels: levels.len(),
                dim,
            });
        }
        let mut where_is: HashMap<&str, (usize, usize)> = HashMap::new();
        for (a, level) in levels.iter().enumerate() {
            for (k, id) in level.iter().enumerate() {
                if where_is.insert(id.as_str(), (a, k)).is_some() {
                    return Err(WeightError::DuplicateStratum(id.clone()));
                }
            }
        }
        let mut face_of: Vec<Vec<Vec<Option<usize>>>> = levels
            .iter()
            .enumerate()
            .map(|(a, l)| vec![vec![None; a]; l.len()])
            .collect();
        for f in &faces {
            let &(a, k) = where_is
                .get(f.from.as_str())
                .ok_or_else(|| WeightError::UnknownStratum(f.from.clone()))?;
            let &(b, t) = where_is
                .get(f.to.as_str())
                .ok_or_else(|| WeightError::UnknownStratum(f.to.clone()))?;
            if a == 0 || b + 1 != a || f.drop >= a {
                return Err(WeightError::BadFace {
                    stratum: f.from.clone(),
                    drop: f.drop,
                });
            }
            let slot = &mut face_of[a][k][f.drop];
            if slot.is_some() {
                return Err(WeightError::DuplicateFace {
                    stratum: f.from.clone(),
                    drop: f.drop,
                });
            }
            *slot = Some(t);
        }
        let mut resolved: Vec<Vec<Vec<usize>>> = Vec::new();
        for (a, level) in face_of.into_iter().enumerate() {
            let mut lv = Vec::new();
            for (k, drops) in level.into_iter().enumerate() {
                let ds = drops
                    .into_iter()
                    .enumerate()
                    .map(|(j, t)| {
                        t.ok_or_else(|| WeightError::MissingFace {
                            stratum: levels[a][k].clone(),
                            drop: j,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                lv.push(ds);
            }
            resolved.push(lv);
        }
        // face_j ∘ face_k = face_{k-1} ∘ face_j for j < k
        for a in 2..levels.len() {
            for (s, drops) in resolved[a].iter().enumerate() {
                for k in 1..a {
                    for j in 0..k {
                        let lhs = resolved[a - 1][drops[k]][j];
                        let rhs = resolved[a - 1][drops[j]][k - 1];
                        if lhs != rhs {
                            return Err(WeightError::IncoherentIncidence {
                                stratum: levels[a][s].clone(),
                                j,
                                k,
                            });
                        }
                    }
                }
            }
        }
        Ok(SNCConfig {
            dim,
            levels,
            faces,
            face_of: resolved,
        })
    }

    /// A smooth projective variety with `components` connected components
    /// and empty boundary.
    pub fn closed(dim: usize, components: usize) -> Self {
        let level0 = (0..components).map(|k| format!("X{k}")).collect();
        SNCConfig::new(dim, vec![level0], Vec::new()).expect("no faces to check")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[Vec<String>] {
        &self.levels
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn stratum_count(&self, level: usize) -> usize {
        self.levels.get(level).map_or(0, Vec::len)
    }

    /// `d_a: Z^{level a} -> Z^{level a-1}`, column `s` equal to
    /// `sum_j (-1)^j e_{face_j(s)}`.
    pub fn differential_matrix(&self, a: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.stratum_count(a - 1), self.stratum_count(a));
        for (s, drops) in self.face_of[a].iter().enumerate() {
            for (j, &t) in drops.iter().enumerate() {
                let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                m[(t, s)] += sign;
            }
        }
        m
    }

    /// Weight complex of the boundary alone: level `a + 1` in degree `a`,
    /// with all `a + 1` faces of each stratum. `None` when there is no
    /// boundary.
    pub fn boundary_complex(&self) -> Option<FGComplex> {
        if self.levels.len() < 2 {
            return None;
        }
        let top = self.levels.len() - 1;
        let groups: Vec<FGAbGroup> = (1..=top)
            .map(|a| FGAbGroup::free(self.stratum_count(a)))
            .collect();
        let diffs = (2..=top)
            .map(|a| {
                FGMap::new(groups[a - 1].clone(), groups[a - 2].clone(), self.differential_matrix(a))
                    .expect("shapes follow the levels")
            })
            .collect();
        Some(FGComplex::new(0, groups, diffs).expect("simplicial identities give d∘d = 0"))
    }
}

/// `Λ^{π_0(Y^(a))}` in degree `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightComplex {
    complex: FGComplex,
    lambda: Lambda,
    dim: usize,
}

impl WeightComplex {
    /// Enforces the length bound `length <= dim + 1`.
    pub fn new(complex: FGComplex, lambda: Lambda, dim: usize) -> Result<Self, WeightError> {
        let length = (complex.highest() - complex.lowest() + 1) as usize;
        if complex.lowest() < 0 || length > dim + 1 || complex.highest() > dim as i64 {
            return Err(WeightError::TooLong { length, dim });
        }
        Ok(WeightComplex {
            complex,
            lambda,
            dim,
        })
    }

    pub fn complex(&self) -> &FGComplex {
        &self.complex
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn build_snc_complex(cfg: &SNCConfig, lambda: Lambda) -> Result<WeightComplex, WeightError> {
    let top = cfg.levels.len().max(1) - 1;
    let groups: Vec<FGAbGroup> = (0..=top)
        .map(|a| FGAbGroup::free(cfg.stratum_count(a)))
        .collect();
    let diffs = (1..=top)
        .map(|a| FGMap::new(groups[a].clone(), groups[a - 1].clone(), cfg.differential_matrix(a)))
        .collect::<Result<Vec<_>, _>>()?;
    let complex = FGComplex::new(0, groups, diffs).map_err(|e| match e {
        AbGroupError::NotAComplex { degree } => WeightError::IncoherentIncidence {
            stratum: format!("level {degree}"),
            j: 0,
            k: 0,
        },
        other => other.into(),
    })?;
    WeightComplex::new(complex, lambda, cfg.dim)
}

/// `H_i^W` for `i = 0..=dim`.
pub fn weight_homology(w: &WeightComplex) -> Vec<FGAbGroup> {
    (0..=w.dim as i64)
        .map(|i| w.lambda.apply(&w.complex.homology_at(i)))
        .collect()
}

/// Independent route for complexes of free groups: `H_i` has free rank
/// `n_i - rank d_i - rank d_{i+1}` and torsion given by the nontrivial
/// invariant factors of `d_{i+1}`.
pub fn weight_homology_by_ranks(w: &WeightComplex) -> Vec<FGAbGroup> {
    let c = &w.complex;
    (0..=w.dim as i64)
        .map(|i| {
            let n = c.group(i).ngens();
            let out_rank = snf(&c.diff(i).matrix).rank();
            let inv_in = snf(&c.diff(i + 1).matrix).invariants();
            let torsion: Vec<BigInt> = inv_in.iter().filter(|d| !d.is_one()).cloned().collect();
            let g = FGAbGroup::new(n - out_rank - inv_in.len(), torsion)
                .expect("invariant factors of a Smith form form a chain");
            w.lambda.apply(&g)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalizationReport {
    pub boundary: Vec<FGAbGroup>,
    pub compactification: Vec<FGAbGroup>,
    /// Homology of the mapping cone.
    pub open: Vec<FGAbGroup>,
    /// Degrees where the long sequence fails to be exact.
    pub inexact_degrees: Vec<i64>,
    /// Cone homology agrees with the weight homology of the full complex.
    pub matches_direct: bool,
}

impl LocalizationReport {
    pub fn is_exact(&self) -> bool {
        self.inexact_degrees.is_empty()
    }
}

/// `... -> H_i^W(Y) -> H_i^W(X̄) -> H_i^W(U) -> H_{i-1}^W(Y) -> ...`, with
/// `H^W(U)` the homology of the cone of the boundary pushforward.
pub fn localization_check(cfg: &SNCConfig, lambda: Lambda) -> Result<LocalizationReport, WeightError> {
    let d = cfg.dim as i64;
    let xbar = FGComplex::concentrated(0, FGAbGroup::free(cfg.stratum_count(0)));
    let (ycomplex, push) = match cfg.boundary_complex() {
        Some(ycomplex) => {
            let push = FGMap::new(
                FGAbGroup::free(cfg.stratum_count(1)),
                FGAbGroup::free(cfg.stratum_count(0)),
                cfg.differential_matrix(1),
            )?;
            (ycomplex, push)
        }
        None => (
            FGComplex::concentrated(0, FGAbGroup::zero()),
            FGMap::zero(FGAbGroup::zero(), FGAbGroup::free(cfg.stratum_count(0))),
        ),
    };
    let f = ComplexMap::new(&ycomplex, &xbar, 0, vec![push])?;
    let les = f.cone_les()?;
    let mut inexact: Vec<i64> = les
        .inexact_terms()
        .into_iter()
        .map(|k| les.terms[k].degree)
        .collect();
    inexact.dedup();
    let pick = |kind: LesKind| -> Vec<FGAbGroup> {
        (0..=d)
            .map(|i| {
                les.terms
                    .iter()
                    .find(|t| t.kind == kind && t.degree == i)
                    .map(|t| lambda.apply(&t.group))
                    .unwrap_or_else(FGAbGroup::zero)
            })
            .collect()
    };
    let open = pick(LesKind::Cone);
    let direct = weight_homology(&build_snc_complex(cfg, lambda)?);
    Ok(LocalizationReport {
        boundary: pick(LesKind::Source),
        compactification: pick(LesKind::Target),
        matches_direct: open == direct,
        open,
        inexact_degrees: inexact,
    })
}

/// A bounded grid `D_{a,b}` with horizontal maps `D_{a,b} -> D_{a-1,b}` and
/// vertical maps `D_{a,b} -> D_{a,b-1}` that commute; the total differential
/// is `h + (-1)^a v`.
#[derive(Debug, Clone)]
pub struct DoubleComplexFG {
    cols: usize,
    rows: usize,
    /// `groups[a][b]`
    groups: Vec<Vec<FGAbGroup>>,
    horizontal: BTreeMap<(usize, usize), FGMap>,
    vertical: BTreeMap<(usize, usize), FGMap>,
}

impl DoubleComplexFG {
    /// Maps keyed by their source position; absent maps are zero.
    pub fn new(
        groups: Vec<Vec<FGAbGroup>>,
        horizontal: BTreeMap<(usize, usize), FGMap>,
        vertical: BTreeMap<(usize, usize), FGMap>,
    ) -> Result<Self, WeightError> {
        let cols = groups.len();
        let rows = groups.first().map_or(0, Vec::len);
        if groups.iter().any(|c| c.len() != rows) {
            return Err(WeightError::SignIncoherent("ragged grid".into()));
        }
        let dc = DoubleComplexFG {
            cols,
            rows,
            groups,
            horizontal,
            vertical,
        };
        for (&(a, b), f) in &dc.horizontal {
            if a == 0 || a >= cols || b >= rows || f.source != dc.groups[a][b] || f.target != dc.groups[a - 1][b] {
                return Err(WeightError::SignIncoherent(format!("horizontal map at ({a}, {b}) misplaced")));
            }
        }
        for (&(a, b), f) in &dc.vertical {
            if b == 0 || a >= cols || b >= rows || f.source != dc.groups[a][b] || f.target != dc.groups[a][b - 1] {
                return Err(WeightError::SignIncoherent(format!("vertical map at ({a}, {b}) misplaced")));
            }
        }
        for a in 0..cols {
            for b in 0..rows {
                if a >= 2 && !dc.h(a, b).then(&dc.h(a - 1, b))?.is_zero() {
                    return Err(WeightError::SignIncoherent(format!("row {b} is not a complex at {a}")));
                }
                if b >= 2 && !dc.v(a, b).then(&dc.v(a, b - 1))?.is_zero() {
                    return Err(WeightError::SignIncoherent(format!("column {a} is not a complex at {b}")));
                }
                if a >= 1 && b >= 1 {
                    let hv = dc.h(a, b).then(&dc.v(a - 1, b))?;
                    let vh = dc.v(a, b).then(&dc.h(a, b - 1))?;
                    if hv.matrix != vh.matrix {
                        return Err(WeightError::SignIncoherent(format!("square at ({a}, {b}) does not commute")));
                    }
                }
            }
        }
        Ok(dc)
    }

    /// A single row `b = 0` given as a complex starting in degree 0.
    pub fn from_row(row: &FGComplex) -> Result<Self, WeightError> {
        let n = (row.highest() + 1).max(0) as usize;
        let groups = (0..n).map(|a| vec![row.group(a as i64)]).collect();
        let horizontal = (1..n).map(|a| ((a, 0), row.diff(a as i64))).collect();
        DoubleComplexFG::new(groups, horizontal, BTreeMap::new())
    }

    pub fn group(&self, a: usize, b: usize) -> &FGAbGroup {
        &self.groups[a][b]
    }

    fn h(&self, a: usize, b: usize) -> FGMap {
        self.horizontal.get(&(a, b)).cloned().unwrap_or_else(|| {
            let tgt = if a == 0 { FGAbGroup::zero() } else { self.groups[a - 1][b].clone() };
            FGMap::zero(self.groups[a][b].clone(), tgt)
        })
    }

    fn v(&self, a: usize, b: usize) -> FGMap {
        self.vertical.get(&(a, b)).cloned().unwrap_or_else(|| {
            let tgt = if b == 0 { FGAbGroup::zero() } else { self.groups[a][b - 1].clone() };
            FGMap::zero(self.groups[a][b].clone(), tgt)
        })
    }

    fn column(&self, a: usize) -> FGComplex {
        let diffs = (1..self.rows).map(|b| self.v(a, b)).collect();
        FGComplex::new(0, self.groups[a].clone(), diffs).expect("columns checked")
    }
}

fn positions(dc: &DoubleComplexFG, n: usize) -> Vec<(usize, usize)> {
    (0..dc.cols)
        .filter(|&a| n >= a && n - a < dc.rows)
        .map(|a| (a, n - a))
        .collect()
}

/// `tot_n = ⊕_{a+b=n} D_{a,b}`.
pub fn total_complex(dc: &DoubleComplexFG) -> Result<FGComplex, WeightError> {
    if dc.cols == 0 || dc.rows == 0 {
        return Ok(FGComplex::concentrated(0, FGAbGroup::zero()));
    }
    let top = dc.cols + dc.rows - 2;
    let sums: Vec<(Vec<(usize, usize)>, DirectSum)> = (0..=top)
        .map(|n| {
            let pos = positions(dc, n);
            let parts: Vec<FGAbGroup> = pos.iter().map(|&(a, b)| dc.groups[a][b].clone()).collect();
            let ds = direct_sum(&parts);
            (pos, ds)
        })
        .collect();
    let mut diffs = Vec::new();
    for n in 1..=top {
        let (src_pos, src) = &sums[n];
        let (tgt_pos, tgt) = &sums[n - 1];
        let mut owned: Vec<Vec<Option<FGMap>>> = vec![vec![None; src_pos.len()]; tgt_pos.len()];
        for (j, &(a, b)) in src_pos.iter().enumerate() {
            if a >= 1 {
                if let Some(i) = tgt_pos.iter().position(|&p| p == (a - 1, b)) {
                    owned[i][j] = Some(dc.h(a, b));
                }
            }
            if b >= 1 {
                if let Some(i) = tgt_pos.iter().position(|&p| p == (a, b - 1)) {
                    let v = dc.v(a, b);
                    let v = if a % 2 == 0 {
                        v
                    } else {
                        FGMap::new(v.source.clone(), v.target.clone(), v.matrix.neg())?
                    };
                    owned[i][j] = Some(v);
                }
            }
        }
        let blocks: Vec<Vec<Option<&FGMap>>> = owned
            .iter()
            .map(|r| r.iter().map(Option::as_ref).collect())
            .collect();
        diffs.push(sum_map(src, tgt, &blocks)?);
    }
    let groups = sums.into_iter().map(|(_, ds)| ds.sum).collect();
    FGComplex::new(0, groups, diffs).map_err(|e| WeightError::SignIncoherent(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralPages {
    /// `e1[a][b] = H_b` of column `a`.
    pub e1: Vec<Vec<FGAbGroup>>,
    /// `e2[a][b] = H_a` of row `b` of `E1`.
    pub e2: Vec<Vec<FGAbGroup>>,
    /// When `E2` sits in one row or one column: whether
    /// `E2` in total degree `n` matches `H_n(tot)` for every `n`.
    pub degenerate_convergence: Option<bool>,
}

pub fn ss_pages(dc: &DoubleComplexFG) -> Result<SpectralPages, WeightError> {
    let columns: Vec<FGComplex> = (0..dc.cols).map(|a| dc.column(a)).collect();
    let e1: Vec<Vec<FGAbGroup>> = columns
        .iter()
        .map(|c| (0..dc.rows as i64).map(|b| c.homology_at(b)).collect())
        .collect();
    let mut e2 = vec![vec![FGAbGroup::zero(); dc.rows]; dc.cols];
    for b in 0..dc.rows {
        let sqs: Vec<_> = columns.iter().map(|c| c.homology_sq(b as i64)).collect();
        let diffs = (1..dc.cols)
            .map(|a| {
                let m = sqs[a].induced(&dc.h(a, b).matrix, &sqs[a - 1])?;
                FGMap::new(sqs[a].group.clone(), sqs[a - 1].group.clone(), m)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let groups: Vec<FGAbGroup> = sqs.iter().map(|s| s.group.clone()).collect();
        if groups.is_empty() {
            continue;
        }
        let row = FGComplex::new(0, groups, diffs)?;
        for (a, col) in e2.iter_mut().enumerate() {
            col[b] = row.homology_at(a as i64);
        }
    }
    let nonzero: Vec<(usize, usize)> = (0..dc.cols)
        .flat_map(|a| (0..dc.rows).map(move |b| (a, b)))
        .filter(|&(a, b)| !e2[a][b].is_zero())
        .collect();
    let one_row = nonzero.windows(2).all(|w| w[0].1 == w[1].1);
    let one_col = nonzero.windows(2).all(|w| w[0].0 == w[1].0);
    let degenerate_convergence = if one_row || one_col {
        let tot = total_complex(dc)?;
        let top = (dc.cols + dc.rows).saturating_sub(2);
        Some((0..=top).all(|n| {
            let e = positions(dc, n)
                .into_iter()
                .find(|&(a, b)| !e2[a][b].is_zero())
                .map(|(a, b)| e2[a][b].clone())
                .unwrap_or_else(FGAbGroup::zero);
            e == tot.homology_at(n as i64)
        }))
    } else {
        None
    };
    Ok(SpectralPages {
        e1,
        e2,
        degenerate_convergence,
    })
}

/// One weight-homology result to audit.
#[derive(Debug, Clone)]
pub struct AuditEntry {
    pub label: String,
    pub dim: usize,
    pub homology: Vec<FGAbGroup>,
    /// The variety is a product with the affine line, so everything vanishes.
    pub a1_product: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingFlag {
    pub label: String,
    pub degree: usize,
    pub group: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct VanishingReport {
    pub checked: usize,
    pub flags: Vec<VanishingFlag>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Flags `H_j != 0` for `j > dim`, and any nonzero group of a product with
/// the affine line.
pub fn vanishing_audit(entries: &[AuditEntry]) -> VanishingReport {
    let mut report = VanishingReport::default();
    for e in entries {
        report.checked += 1;
        for (j, g) in e.homology.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            if j > e.dim {
                report.flags.push(VanishingFlag {
                    label: e.label.clone(),
                    degree: j,
                    group: g.to_string(),
                    reason: "degree exceeds dimension",
                });
            } else if e.a1_product {
                report.flags.push(VanishingFlag {
                    label: e.label.clone(),
                    degree: j,
                    group: g.to_string(),
                    reason: "product with the affine line",
                });
            }
        }
    }
    report
}

/// Homology of an arbitrary complex of free groups, for auditing complexes
/// that did not come from a configuration.
pub fn homology_up_to(c: &FGComplex, top: usize) -> Vec<FGAbGroup> {
    (0..=top as i64).map(|i| c.homology_at(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn face(from: &str, drop: usize, to: &str) -> Face {
        Face {
            from: from.into(),
            drop,
            to: to.into(),
        }
    }

    pub(crate) fn gm() -> SNCConfig {
        SNCConfig::new(
            1,
            vec![ids(&["P1"]), ids(&["0", "inf"])],
            vec![face("0", 0, "P1"), face("inf", 0, "P1")],
        )
        .unwrap()
    }

    pub(crate) fn two_lines() -> SNCConfig {
        SNCConfig::new(
            2,
            vec![ids(&["P2"]), ids(&["L1", "L2"]), ids(&["pt"])],
            vec![
                face("L1", 0, "P2"),
                face("L2", 0, "P2"),
                face("pt", 0, "L2"),
                face("pt", 1, "L1"),
            ],
        )
        .unwrap()
    }

    fn z(r: usize) -> FGAbGroup {
        FGAbGroup::free(r)
    }

    #[test]
    fn gm_complex_and_homology() {
        let w = build_snc_complex(&gm(), Lambda::Z).unwrap();
        assert_eq!(w.complex().diff(1).matrix, IntMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(weight_homology(&w), vec![z(0), z(1)]);
        assert_eq!(weight_homology_by_ranks(&w), vec![z(0), z(1)]);
    }

    #[test]
    fn empty_boundary() {
        let w = build_snc_complex(&SNCConfig::closed(2, 1), Lambda::InvertP(3)).unwrap();
        assert_eq!(weight_homology(&w), vec![z(1), z(0), z(0)]);
        let w = build_snc_complex(&SNCConfig::closed(1, 3), Lambda::Z).unwrap();
        assert_eq!(weight_homology(&w), vec![z(3), z(0)]);
    }

    #[test]
    fn two_lines_complex_is_acyclic() {
        let w = build_snc_complex(&two_lines(), Lambda::Z).unwrap();
        // the point has face 0 = L2 (+1), face 1 = L1 (-1)
        assert_eq!(w.complex().diff(2).matrix, IntMatrix::from_i64(&[&[-1], &[1]]));
        assert_eq!(weight_homology(&w), vec![z(0); 3]);
        assert_eq!(weight_homology_by_ranks(&w), vec![z(0); 3]);
    }

    #[test]
    fn incoherent_incidence_rejected() {
        // A triangle of three lines with the point faces wired inconsistently.
        let levels = vec![ids(&["P2"]), ids(&["A", "B", "C"]), ids(&["AB", "AC", "BC"]), ids(&["ABC"])];
        let mut faces = vec![face("A", 0, "P2"), face("B", 0, "P2"), face("C", 0, "P2")];
        for (p, x, y) in [("AB", "A", "B"), ("AC", "A", "C"), ("BC", "B", "C")] {
            faces.push(face(p, 0, y));
            faces.push(face(p, 1, x));
        }
        let good = faces
            .iter()
            .cloned()
            .chain([face("ABC", 0, "BC"), face("ABC", 1, "AC"), face("ABC", 2, "AB")])
            .collect::<Vec<_>>();
        assert!(SNCConfig::new(3, levels.clone(), good).is_ok());
        let bad = faces
            .into_iter()
            .chain([face("ABC", 0, "AC"), face("ABC", 1, "BC"), face("ABC", 2, "AB")])
            .collect::<Vec<_>>();
        assert!(matches!(
            SNCConfig::new(3, levels, bad),
            Err(WeightError::IncoherentIncidence { .. })
        ));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            SNCConfig::new(0, vec![ids(&["X"]), ids(&["Y"])], vec![face("Y", 0, "X")]),
            Err(WeightError::TooManyLevels { levels: 2, dim: 0 })
        ));
        assert!(matches!(
            SNCConfig::new(1, vec![ids(&["X"]), ids(&["Y"])], vec![]),
            Err(WeightError::MissingFace { .. })
        ));
        assert!(matches!(
            SNCConfig::new(1, vec![ids(&["X"]), ids(&["Y"])], vec![face("Y", 0, "Z")]),
            Err(WeightError::UnknownStratum(_))
        ));
        assert!(matches!(
            SNCConfig::new(1, vec![ids(&["X"]), ids(&["Y"])], vec![face("Y", 1, "X")]),
            Err(WeightError::BadFace { .. })
        ));
        assert!(matches!(
            SNCConfig::new(1, vec![ids(&["X", "X"])], vec![]),
            Err(WeightError::DuplicateStratum(_))
        ));
    }

    #[test]
    fn complex_length_bound_is_enforced() {
        let c = FGComplex::from_diffs(0, vec![FGMap::zero(z(1), z(1)), FGMap::zero(z(1), z(1))]).unwrap();
        assert!(matches!(
            WeightComplex::new(c, Lambda::Z, 1),
            Err(WeightError::TooLong { length: 3, dim: 1 })
        ));
    }

    #[test]
    fn json_config() {
        let js = r#"{"dim":1,"levels":[["P1"],[0,"inf"]],
                     "faces":[{"from":0,"drop":0,"to":"P1"},{"from":"inf","drop":0,"to":"P1"}]}"#;
        let cfg: SNCConfig = serde_json::from_str(js).unwrap();
        assert_eq!(cfg.levels()[1], ids(&["0", "inf"]));
        let back: SNCConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let bad = r#"{"dim":0,"levels":[["P1"],["a"]],"faces":[{"from":"a","drop":0,"to":"P1"}]}"#;
        assert!(serde_json::from_str::<SNCConfig>(bad).is_err());
        assert_eq!(serde_json::from_str::<Lambda>(r#""Z[1/3]""#).unwrap(), Lambda::InvertP(3));
    }

    #[test]
    fn localization_examples() {
        let r = localization_check(&SNCConfig::closed(1, 1), Lambda::Z).unwrap();
        assert!(r.is_exact() && r.matches_direct);
        assert_eq!(r.open, r.compactification);
        let r = localization_check(&gm(), Lambda::Z).unwrap();
        assert!(r.is_exact() && r.matches_direct);
        assert_eq!(r.boundary, vec![z(2), z(0)]);
        assert_eq!(r.compactification, vec![z(1), z(0)]);
        assert_eq!(r.open, vec![z(0), z(1)]);
        let r = localization_check(&two_lines(), Lambda::InvertP(2)).unwrap();
        assert!(r.is_exact() && r.matches_direct);
        assert_eq!(r.open, vec![z(0); 3]);
    }

    #[test]
    fn total_complex_examples() {
        let row = FGComplex::from_diffs(0, vec![FGMap::scalar(z(1), 2)]).unwrap();
        let dc = DoubleComplexFG::from_row(&row).unwrap();
        let tot = total_complex(&dc).unwrap();
        assert_eq!(tot.homology(), row.homology());

        let id = FGMap::identity(z(1));
        let grid = vec![vec![z(1), z(1)], vec![z(1), z(1)]];
        let h: BTreeMap<_, _> = [((1, 0), id.clone()), ((1, 1), id.clone())].into();
        let v: BTreeMap<_, _> = [((0, 1), id.clone()), ((1, 1), id.clone())].into();
        let dc = DoubleComplexFG::new(grid.clone(), h, v).unwrap();
        assert!(total_complex(&dc).unwrap().is_exact());

        let dc = DoubleComplexFG::new(
            vec![vec![z(1), FGAbGroup::cyclic(3)], vec![z(2), z(0)]],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let tot = total_complex(&dc).unwrap();
        assert_eq!(tot.homology(), vec![z(1), FGAbGroup::from_orders(2, &[BigInt::from(3)]), z(0)]);
    }

    #[test]
    fn non_commuting_square_rejected() {
        let id = FGMap::identity(z(1));
        let two = FGMap::scalar(z(1), 2);
        let grid = vec![vec![z(1), z(1)], vec![z(1), z(1)]];
        let h: BTreeMap<_, _> = [((1, 0), id.clone()), ((1, 1), two)].into();
        let v: BTreeMap<_, _> = [((0, 1), id.clone()), ((1, 1), id)].into();
        assert!(matches!(
            DoubleComplexFG::new(grid, h, v),
            Err(WeightError::SignIncoherent(_))
        ));
    }

    #[test]
    fn spectral_pages() {
        let w = build_snc_complex(&gm(), Lambda::Z).unwrap();
        let dc = DoubleComplexFG::from_row(w.complex()).unwrap();
        let pages = ss_pages(&dc).unwrap();
        assert_eq!(pages.e2[1][0], z(1));
        assert_eq!(pages.degenerate_convergence, Some(true));

        // exact columns: Z --1--> Z in each of two columns
        let id = FGMap::identity(z(1));
        let grid = vec![vec![z(1), z(1)], vec![z(1), z(1)]];
        let h: BTreeMap<_, _> = [((1, 0), id.clone()), ((1, 1), id.clone())].into();
        let v: BTreeMap<_, _> = [((0, 1), id.clone()), ((1, 1), id)].into();
        let dc = DoubleComplexFG::new(grid, h, v).unwrap();
        let pages = ss_pages(&dc).unwrap();
        assert!(pages.e1.iter().flatten().all(FGAbGroup::is_zero));
        assert_eq!(pages.degenerate_convergence, Some(true));

        // single column Z --3--> Z
        let dc = DoubleComplexFG::new(
            vec![vec![z(1), z(1)]],
            BTreeMap::new(),
            [((0, 1), FGMap::scalar(z(1), 3))].into(),
        )
        .unwrap();
        let pages = ss_pages(&dc).unwrap();
        assert_eq!(pages.e1[0], vec![FGAbGroup::cyclic(3), z(0)]);
        assert_eq!(pages.degenerate_convergence, Some(true));
    }

    #[test]
    fn audit() {
        let gm_h = weight_homology(&build_snc_complex(&gm(), Lambda::Z).unwrap());
        let tl = weight_homology(&build_snc_complex(&two_lines(), Lambda::Z).unwrap());
        let r = vanishing_audit(&[
            AuditEntry { label: "gm".into(), dim: 1, homology: gm_h, a1_product: false },
            AuditEntry { label: "gm x A1".into(), dim: 2, homology: tl, a1_product: true },
        ]);
        assert!(r.passed());
        let c = FGComplex::concentrated(3, z(1)).padded(0, 3);
        let r = vanishing_audit(&[AuditEntry {
            label: "corrupt".into(),
            dim: 1,
            homology: homology_up_to(&c, 3),
            a1_product: false,
        }]);
        assert_eq!(r.flags.len(), 1);
        assert_eq!(r.flags[0].degree, 3);
    }

    #[test]
    fn localized_homology_commutes() {
        // Z --2--> Z has H_0 = Z/2, which vanishes after inverting 2.
        let c = FGComplex::from_diffs(0, vec![FGMap::scalar(z(1), 2)]).unwrap();
        let wz = WeightComplex::new(c.clone(), Lambda::Z, 1).unwrap();
        let w2 = WeightComplex::new(c, Lambda::InvertP(2), 1).unwrap();
        assert_eq!(weight_homology(&wz)[0], FGAbGroup::cyclic(2));
        assert_eq!(weight_homology(&w2)[0], z(0));
        assert_eq!(weight_homology_by_ranks(&w2), weight_homology(&w2));
    }
}
