//! Higher Chow groups of small varieties over finite fields, and the
//! Euler characteristics of the regulator assembled from them.
//!
//! Profiles are classical inputs (finite field K-groups, the projective
//! bundle formula, Picard groups of curves); nothing here is derived from the
//! identities it is later used to test.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{chi, AbGroupError, DivisibleRank, FGAbGroup, FGMap, FQGroup, IntMatrix};
use crate::geometry::BaseField;
use crate::weight::Lambda;
use crate::zeta::strip_sign_ppower;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChowError {
    #[error("base profile {tag:?} lacks CH_{r}(-, {i})")]
    IncompleteBase { tag: String, r: i64, i: u32 },
    #[error("profile {tag:?} lacks CH_{r}(-, {i})")]
    IncompleteProfile { tag: String, r: i64, i: u32 },
    #[error("P(1) = {0} is not a positive integer")]
    NonIntegralP1(BigInt),
    #[error("degree map of term {term} has cokernel of free rank {free_rank}")]
    NotFQ { term: usize, free_rank: usize },
    #[error("the index of the degree image of {0:?} is unknown")]
    UnknownDegreeIndex(String),
    #[error("weight complex of length {length} exceeds dim + 1 = {}", dim + 1)]
    TooLong { length: usize, dim: usize },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("catalog has no profile {0:?}")]
    UnknownTag(String),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

fn is_squarefree(n: &BigInt) -> bool {
    let n = n.abs();
    let mut k = BigInt::from(2);
    let limit = n.sqrt();
    while k <= limit {
        if (&n % (&k * &k)).is_zero() {
            return false;
        }
        k += 1;
    }
    true
}

/// Torsion known as a group, or only through its order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Torsion {
    Group(FGAbGroup),
    Order(BigInt),
}

impl Torsion {
    /// A squarefree order determines the group, so it is stored as one.
    pub fn of_order(n: BigInt) -> Torsion {
        if is_squarefree(&n) {
            let g = if n.is_one() {
                FGAbGroup::zero()
            } else {
                FGAbGroup::from_orders(0, &[n])
            };
            Torsion::Group(g)
        } else {
            Torsion::Order(n)
        }
    }

    pub fn order(&self) -> BigInt {
        match self {
            Torsion::Group(g) => g.torsion_order(),
            Torsion::Order(n) => n.clone(),
        }
    }

    fn sum(&self, other: &Torsion) -> Torsion {
        match (self, other) {
            (Torsion::Group(a), Torsion::Group(b)) => Torsion::Group(a.direct_sum(b).sum),
            _ => Torsion::of_order(self.order() * other.order()),
        }
    }
}

/// `Z^free ⊕ (finite) ⊕ (uniquely divisible)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowGroup {
    pub free_rank: usize,
    pub torsion: Torsion,
    pub divisible_rank: DivisibleRank,
}

impl ChowGroup {
    pub fn zero() -> Self {
        ChowGroup::finite(FGAbGroup::zero())
    }

    pub fn free(rank: usize) -> Self {
        ChowGroup {
            free_rank: rank,
            ..ChowGroup::zero()
        }
    }

    pub fn finite(g: FGAbGroup) -> Self {
        ChowGroup {
            free_rank: g.free_rank(),
            torsion: Torsion::Group(g.torsion_part()),
            divisible_rank: DivisibleRank::Known(0),
        }
    }

    pub fn cyclic(n: BigInt) -> Self {
        ChowGroup {
            torsion: Torsion::of_order(n),
            ..ChowGroup::zero()
        }
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.order()
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0
            && self.torsion_order().is_one()
            && self.divisible_rank == DivisibleRank::Known(0)
    }

    /// Dimension after tensoring with `Q`, if known.
    pub fn rational_rank(&self) -> Option<u64> {
        match self.divisible_rank {
            DivisibleRank::Known(d) => Some(d + self.free_rank as u64),
            DivisibleRank::Unknown => None,
        }
    }

    /// The group as an FQ group, when it has no free summand and its torsion
    /// is known as a group.
    pub fn as_fq(&self) -> Option<FQGroup> {
        match (&self.torsion, self.free_rank) {
            (Torsion::Group(g), 0) => FQGroup::new(g.clone(), self.divisible_rank).ok(),
            _ => None,
        }
    }

    pub fn direct_sum(&self, other: &ChowGroup) -> ChowGroup {
        let divisible_rank = match (self.divisible_rank, other.divisible_rank) {
            (DivisibleRank::Known(a), DivisibleRank::Known(b)) => DivisibleRank::Known(a + b),
            _ => DivisibleRank::Unknown,
        };
        ChowGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: self.torsion.sum(&other.torsion),
            divisible_rank,
        }
    }
}

impl fmt::Display for ChowGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match &self.torsion {
            Torsion::Group(g) if !g.is_zero() => parts.push(g.to_string()),
            Torsion::Order(n) => parts.push(format!("(finite of order {n})")),
            _ => {}
        }
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".into()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        match self.divisible_rank {
            DivisibleRank::Known(0) => {}
            DivisibleRank::Known(d) => parts.push(format!("(divisible of rank {d})")),
            DivisibleRank::Unknown => parts.push("(divisible of unknown rank)".into()),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChowGroupRepr {
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    free: usize,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_bigint_vec")]
    torsion: Option<Vec<BigInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_bigint")]
    torsion_order: Option<BigInt>,
    #[serde(default = "known_zero", skip_serializing_if = "is_known_zero")]
    divisible: DivisibleRank,
}

fn is_zero_usize(n: &usize) -> bool {
    *n == 0
}

fn known_zero() -> DivisibleRank {
    DivisibleRank::Known(0)
}

fn is_known_zero(d: &DivisibleRank) -> bool {
    *d == DivisibleRank::Known(0)
}

mod opt_bigint_vec {
    use super::*;
    pub fn serialize<S: serde::Serializer>(x: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        crate::serial::bigint_vec::serialize(x.as_deref().unwrap_or_default(), s)
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        crate::serial::bigint_vec::deserialize(d).map(Some)
    }
}

mod opt_bigint {
    use super::*;
    pub fn serialize<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        crate::serial::bigint::serialize(x.as_ref().expect("skipped when absent"), s)
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        crate::serial::bigint::deserialize(d).map(Some)
    }
}

impl Serialize for ChowGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (torsion, torsion_order) = match &self.torsion {
            Torsion::Group(g) if g.is_zero() => (None, None),
            Torsion::Group(g) => (Some(g.torsion().to_vec()), None),
            Torsion::Order(n) => (None, Some(n.clone())),
        };
        ChowGroupRepr {
            free: self.free_rank,
            torsion,
            torsion_order,
            divisible: self.divisible_rank,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChowGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = ChowGroupRepr::deserialize(d)?;
        let torsion = match (r.torsion, r.torsion_order) {
            (Some(_), Some(_)) => return Err(D::Error::custom("give torsion or torsion_order, not both")),
            (Some(t), None) => Torsion::Group(FGAbGroup::from_orders(0, &t)),
            (None, Some(n)) if n.is_positive() => Torsion::of_order(n),
            (None, Some(n)) => return Err(D::Error::custom(format!("torsion order {n} is not positive"))),
            (None, None) => Torsion::Group(FGAbGroup::zero()),
        };
        Ok(ChowGroup {
            free_rank: r.free,
            torsion,
            divisible_rank: r.divisible,
        })
    }
}

/// `CH^j(F_q, i)`: `Z` in bidegree `(0, 0)`, `Z/(q^j - 1)` for `i = 2j - 1`,
/// and zero otherwise.
pub fn tate_chow(q: &BigInt, j: u32, i: u32) -> ChowGroup {
    match (j, i) {
        (0, 0) => ChowGroup::free(1),
        (j, i) if j >= 1 && i == 2 * j - 1 => ChowGroup::cyclic(num_traits::pow(q.clone(), j as usize) - 1),
        _ => ChowGroup::zero(),
    }
}

/// A connected component: the degree of its field of constants over the
/// base, and the index of the image of the degree map over that field
/// (1 whenever there is a zero-cycle of degree 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub constant_field_degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_index")]
    pub degree_index: Option<BigInt>,
}

mod opt_index {
    use super::*;
    pub fn serialize<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        crate::serial::bigint::serialize(x.as_ref().expect("skipped when absent"), s)
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        crate::serial::bigint::deserialize(d).map(Some)
    }
}

impl Component {
    pub fn geometrically_connected() -> Self {
        Component {
            constant_field_degree: 1,
            degree_index: Some(BigInt::one()),
        }
    }
}

/// `CH_r(X, i)` for a smooth projective `X`, indexed by cycle dimension
/// `r` and degree `i`.
///
/// Lookup rules: `r > dim` is zero; with `vanishing_bound` set, `i >
/// 2(dim - r)` is zero; anything else not in the table is unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowProfile {
    tag: String,
    base: BaseField,
    lambda: Lambda,
    dim: usize,
    components: Vec<Component>,
    vanishing_bound: bool,
    table: BTreeMap<(i64, u32), ChowGroup>,
}

impl ChowProfile {
    pub fn new(
        tag: impl Into<String>,
        base: BaseField,
        dim: usize,
        components: Vec<Component>,
        vanishing_bound: bool,
        table: BTreeMap<(i64, u32), ChowGroup>,
    ) -> Result<Self, ChowError> {
        let tag = tag.into();
        if components.is_empty() {
            return Err(ChowError::InvalidProfile(format!("{tag}: no components")));
        }
        if components.iter().any(|c| c.constant_field_degree == 0) {
            return Err(ChowError::InvalidProfile(format!("{tag}: constant field degree 0")));
        }
        for (&(r, i), g) in &table {
            if r > dim as i64 {
                return Err(ChowError::InvalidProfile(format!(
                    "{tag}: CH_{r} above the dimension"
                )));
            }
            if r == 0 && i as usize <= 2 * dim && g.divisible_rank == DivisibleRank::Unknown {
                return Err(ChowError::InvalidProfile(format!(
                    "{tag}: CH_0(-, {i}) must have known divisible rank"
                )));
            }
        }
        Ok(ChowProfile {
            tag,
            base,
            lambda: Lambda::Z,
            dim,
            components,
            vanishing_bound,
            table,
        })
    }

    pub fn with_lambda(mut self, lambda: Lambda) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn base(&self) -> BaseField {
        self.base
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn table(&self) -> &BTreeMap<(i64, u32), ChowGroup> {
        &self.table
    }

    pub fn min_r(&self) -> Option<i64> {
        self.table.keys().map(|k| k.0).min()
    }

    pub fn get(&self, r: i64, i: u32) -> Option<ChowGroup> {
        if r > self.dim as i64 {
            return Some(ChowGroup::zero());
        }
        if let Some(g) = self.table.get(&(r, i)) {
            return Some(g.clone());
        }
        let top = 2 * (self.dim as i64 - r);
        (self.vanishing_bound && i as i64 > top).then(ChowGroup::zero)
    }

    pub fn require(&self, r: i64, i: u32) -> Result<ChowGroup, ChowError> {
        self.get(r, i).ok_or_else(|| ChowError::IncompleteProfile {
            tag: self.tag.clone(),
            r,
            i,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    tag: String,
    base: BaseField,
    #[serde(default)]
    lambda: Lambda,
    dim: usize,
    components: Vec<Component>,
    #[serde(default)]
    vanishing_bound: bool,
    table: BTreeMap<String, ChowGroup>,
}

impl Serialize for ChowProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ProfileRepr {
            tag: self.tag.clone(),
            base: self.base,
            lambda: self.lambda,
            dim: self.dim,
            components: self.components.clone(),
            vanishing_bound: self.vanishing_bound,
            table: self
                .table
                .iter()
                .map(|(&(r, i), g)| (format!("{r},{i}"), g.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChowProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = ProfileRepr::deserialize(d)?;
        let mut table = BTreeMap::new();
        for (k, g) in r.table {
            let key = k
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| D::Error::custom(format!("table key {k:?} is not \"r,i\"")))?;
            table.insert(key, g);
        }
        ChowProfile::new(r.tag, r.base, r.dim, r.components, r.vanishing_bound, table)
            .map(|p| p.with_lambda(r.lambda))
            .map_err(D::Error::custom)
    }
}

/// `Spec K` for `K` of degree `f` over the base: `CH_r(Spec K, i) =
/// CH^{-r}(K, i)`, tabulated for `min_r <= r <= 0`.
pub fn point_profile(base: BaseField, f: u32, min_r: i64) -> ChowProfile {
    let qf = num_traits::pow(base.q(), f as usize);
    let mut table = BTreeMap::new();
    for r in min_r..=0 {
        for i in 0..=(-2 * r) as u32 {
            table.insert((r, i), tate_chow(&qf, (-r) as u32, i));
        }
    }
    let tag = if f == 1 {
        format!("point/F{}", base.q())
    } else {
        format!("Spec F{}/F{}", qf, base.q())
    };
    let component = Component {
        constant_field_degree: f,
        degree_index: Some(BigInt::one()),
    };
    ChowProfile::new(tag, base, 0, vec![component], true, table).expect("well-formed by construction")
}

/// `CH_r(X × P^n, i) = ⊕_{b=0}^{n} CH_{r-b}(X, i)`, tabulated wherever
/// the base profile determines it.
pub fn projective_bundle_profile(base: &ChowProfile, n: usize) -> Result<ChowProfile, ChowError> {
    let Some(min_r) = base.min_r() else {
        return Err(ChowError::IncompleteBase {
            tag: base.tag.clone(),
            r: 0,
            i: 0,
        });
    };
    let dim = base.dim + n;
    let mut table = BTreeMap::new();
    for r in min_r + n as i64..=dim as i64 {
        for i in 0..=(2 * (dim as i64 - r)) as u32 {
            let mut g = ChowGroup::zero();
            for b in 0..=n as i64 {
                let part = base.get(r - b, i).ok_or_else(|| ChowError::IncompleteBase {
                    tag: base.tag.clone(),
                    r: r - b,
                    i,
                })?;
                g = g.direct_sum(&part);
            }
            table.insert((r, i), g);
        }
    }
    let tag = if n == 0 {
        base.tag.clone()
    } else {
        format!("{} x P{n}", base.tag)
    };
    ChowProfile::new(
        tag,
        base.base,
        dim,
        base.components.clone(),
        base.vanishing_bound,
        table,
    )
    .map(|p| p.with_lambda(base.lambda))
}

/// `P^n` over the base, tabulated from `r = min_r` up.
pub fn projective_space_profile(base: BaseField, n: usize, min_r: i64) -> ChowProfile {
    let pt = point_profile(base, 1, min_r - n as i64);
    projective_bundle_profile(&pt, n)
        .expect("point profiles are complete")
        .with_tag(format!("P{n}/F{}", base.q()))
}

/// A smooth projective curve whose zeta function has numerator `P` over
/// the base, connected with a constant field of degree `f`.
pub fn curve_profile(
    tag: impl Into<String>,
    base: BaseField,
    p_coeffs: &[BigInt],
    f: u32,
) -> Result<ChowProfile, ChowError> {
    let tag = tag.into();
    if p_coeffs.first().is_none_or(|c| !c.is_one()) {
        return Err(ChowError::InvalidProfile(format!("{tag}: P(0) must be 1")));
    }
    if !(p_coeffs.len() - 1).is_multiple_of(2) {
        return Err(ChowError::InvalidProfile(format!("{tag}: deg P must be even")));
    }
    if f == 0 {
        return Err(ChowError::InvalidProfile(format!("{tag}: constant field degree 0")));
    }
    let p1: BigInt = p_coeffs.iter().sum();
    if !p1.is_positive() {
        return Err(ChowError::NonIntegralP1(p1));
    }
    let qf = num_traits::pow(base.q(), f as usize);
    let mut pic = ChowGroup::cyclic(p1);
    pic.free_rank = 1;
    let table: BTreeMap<_, _> = [
        ((1, 0), ChowGroup::free(1)),
        ((0, 0), pic),
        ((0, 1), ChowGroup::cyclic(qf - 1)),
        ((0, 2), ChowGroup::zero()),
    ]
    .into();
    let component = Component {
        constant_field_degree: f,
        degree_index: Some(BigInt::one()),
    };
    ChowProfile::new(tag, base, 1, vec![component], true, table)
}

/// `∏_{i=0}^{2d} #CH_0(X, i)_tor^{(-1)^i}` for a smooth projective
/// geometrically connected profile.
pub fn smooth_proper_product(profile: &ChowProfile) -> Result<BigRational, ChowError> {
    let mut out = BigRational::one();
    for i in 0..=(2 * profile.dim) as u32 {
        let n = profile.require(0, i)?.torsion_order();
        out *= if i % 2 == 0 {
            BigRational::from_integer(n)
        } else {
            BigRational::new(BigInt::one(), n)
        };
    }
    Ok(localize_rational(&out, profile.lambda, profile.base.p))
}

/// `Negative special values`: `∏_i #CH_r(X, i)_tor^{(-1)^i}` over
/// `0 <= i <= 2(d - r)`.
pub fn chow_product_at(profile: &ChowProfile, r: i64) -> Result<BigRational, ChowError> {
    let top = 2 * (profile.dim as i64 - r).max(0);
    let mut out = BigRational::one();
    for i in 0..=top as u32 {
        let n = profile.require(r, i)?.torsion_order();
        out *= if i % 2 == 0 {
            BigRational::from_integer(n)
        } else {
            BigRational::new(BigInt::one(), n)
        };
    }
    Ok(localize_rational(&out, profile.lambda, profile.base.p))
}

fn localize_rational(x: &BigRational, lambda: Lambda, p: u64) -> BigRational {
    match lambda {
        Lambda::Z => x.clone(),
        Lambda::InvertP(_) => strip_sign_ppower(x, p).expect("orders are nonzero"),
    }
}

/// Terms `X_a` of a weight complex of a variety of dimension `dim`, each a
/// disjoint union of connected smooth projective pieces.
#[derive(Debug, Clone)]
pub struct RegulatorAssembly {
    dim: usize,
    terms: Vec<Vec<ChowProfile>>,
}

impl RegulatorAssembly {
    pub fn new(dim: usize, terms: Vec<Vec<ChowProfile>>) -> Result<Self, ChowError> {
        if terms.len() > dim + 1 {
            return Err(ChowError::TooLong {
                length: terms.len(),
                dim,
            });
        }
        for piece in terms.iter().flatten() {
            if piece.components.len() != 1 {
                return Err(ChowError::InvalidProfile(format!(
                    "{}: pieces of an assembly must be connected",
                    piece.tag
                )));
            }
        }
        Ok(RegulatorAssembly { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Vec<ChowProfile>] {
        &self.terms
    }

    /// `deg_a: CH_0(X_a) -> Z^{π_0(X_a)}`. A piece's free generator is a
    /// zero-cycle of least positive degree, `[K:k]` times the degree index
    /// over `K`; torsion lies in the kernel and only its order matters for
    /// χ, so order-only torsion is stood in for by a cyclic group.
    pub fn degree_map(&self, a: usize) -> Result<FGMap, ChowError> {
        let pieces = &self.terms[a];
        let mut free_degrees = Vec::new();
        let mut torsion = Vec::new();
        for (c, piece) in pieces.iter().enumerate() {
            let ch = piece.require(0, 0)?;
            if ch.free_rank > 1 {
                return Err(ChowError::InvalidProfile(format!(
                    "{}: CH_0 of a connected piece has rank {}",
                    piece.tag, ch.free_rank
                )));
            }
            if ch.free_rank == 1 {
                let comp = &piece.components[0];
                let idx = comp
                    .degree_index
                    .clone()
                    .ok_or_else(|| ChowError::UnknownDegreeIndex(piece.tag.clone()))?;
                free_degrees.push((c, idx * comp.constant_field_degree));
            }
            match &ch.torsion {
                Torsion::Group(g) => torsion.extend(g.torsion().iter().cloned()),
                Torsion::Order(n) => torsion.push(n.clone()),
            }
        }
        let source = FGAbGroup::from_orders(free_degrees.len(), &torsion);
        let target = FGAbGroup::free(pieces.len());
        let nt = source.torsion().len();
        let mut m = IntMatrix::zeros(pieces.len(), source.ngens());
        for (k, (c, deg)) in free_degrees.iter().enumerate() {
            m[(*c, nt + k)] = deg.clone();
        }
        Ok(FGMap::new(source, target, m)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionFactor {
    pub term: usize,
    pub piece: String,
    pub degree: u32,
    #[serde(with = "crate::serial::bigint")]
    pub order: BigInt,
    pub exponent: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeFactor {
    pub term: usize,
    #[serde(with = "crate::serial::rational")]
    pub chi: BigRational,
    pub exponent: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegulatorChi {
    pub lambda: Lambda,
    pub convention: &'static str,
    pub torsion_factors: Vec<TorsionFactor>,
    pub degree_factors: Vec<DegreeFactor>,
    #[serde(with = "crate::serial::rational")]
    pub product: BigRational,
}

pub const REGULATOR_CONVENTION: &str =
    "prod_{a, b>0} #CH_0(X_a, b)_tor^((-1)^(a+b)) * prod_a chi(deg_a)^((-1)^(a+1))";

fn signed_power(x: &BigRational, exponent: i32) -> BigRational {
    if exponent > 0 {
        x.clone()
    } else {
        x.recip()
    }
}

/// `∏_i χ(Reg_i)^{(-1)^{i+1}}`, assembled from the higher torsion of the
/// pieces and the Euler characteristics of the degree maps.
pub fn regulator_chi(assembly: &RegulatorAssembly, lambda: Lambda) -> Result<RegulatorChi, ChowError> {
    let mut product = BigRational::one();
    let mut torsion_factors = Vec::new();
    let mut degree_factors = Vec::new();
    for (a, pieces) in assembly.terms.iter().enumerate() {
        for piece in pieces {
            let p = piece.base.p;
            for b in 1..=(2 * piece.dim) as u32 {
                let order = piece.require(0, b)?.torsion_order();
                let order = match lambda {
                    Lambda::Z => order,
                    Lambda::InvertP(_) => strip_sign_ppower(&BigRational::from_integer(order), p)
                        .expect("nonzero")
                        .to_integer(),
                };
                let exponent = if (a + b as usize).is_multiple_of(2) { 1 } else { -1 };
                product *= signed_power(&BigRational::from_integer(order.clone()), exponent);
                torsion_factors.push(TorsionFactor {
                    term: a,
                    piece: piece.tag.clone(),
                    degree: b,
                    order,
                    exponent,
                });
            }
        }
        let deg = assembly.degree_map(a)?;
        let coker_free = deg.cokernel().free_rank();
        if coker_free > 0 {
            return Err(ChowError::NotFQ {
                term: a,
                free_rank: coker_free,
            });
        }
        let mut c = chi(&deg)?;
        if let (Lambda::InvertP(_), Some(piece)) = (lambda, pieces.first()) {
            c = strip_sign_ppower(&c, piece.base.p).expect("χ is nonzero");
        }
        let exponent = if a % 2 == 0 { -1 } else { 1 };
        product *= signed_power(&c, exponent);
        degree_factors.push(DegreeFactor {
            term: a,
            chi: c,
            exponent,
        });
    }
    Ok(RegulatorChi {
        lambda,
        convention: REGULATOR_CONVENTION,
        torsion_factors,
        degree_factors,
        product,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Satisfied,
    Failed,
    Undeterminable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpadesuitDegree {
    pub degree: usize,
    pub status: Certification,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpadesuitReport {
    pub status: Certification,
    pub degrees: Vec<SpadesuitDegree>,
}

/// Rational surjectivity of `Reg_i` for `2 <= i <= dim`, as far as the
/// supplied data decides it. `weight_homology` may be omitted when the
/// assembly has a single term.
pub fn spadesuit_check(assembly: &RegulatorAssembly, weight_homology: Option<&[FGAbGroup]>) -> SpadesuitReport {
    let e1_rank = |a: usize, b: u32| -> Option<u64> {
        let mut total = 0;
        for piece in assembly.terms.get(a)? {
            total += piece.get(0, b)?.rational_rank()?;
        }
        Some(total)
    };
    let mut degrees = Vec::new();
    for i in 2..=assembly.dim {
        let target = match weight_homology {
            Some(h) => Some(h.get(i).map_or(0, FGAbGroup::free_rank)),
            None if assembly.terms.len() <= 1 => Some(0),
            None => None,
        };
        let (status, reason) = match target {
            None => (Certification::Undeterminable, "weight homology not supplied".to_string()),
            Some(0) => (Certification::Satisfied, "H_i^W is torsion".to_string()),
            Some(rank) => {
                let bound: Option<u64> = (0..=i).map(|a| e1_rank(a, (i - a) as u32)).sum();
                // deg_a rationally bijective, and nothing for differentials out
                // of the bottom row to hit
                let bottom_row_iso = assembly.terms.iter().all(|pieces| {
                    pieces
                        .iter()
                        .all(|p| p.get(0, 0).is_some_and(|g| g.rational_rank() == Some(1)))
                });
                let off_row_zero = (0..i).all(|a| e1_rank(a, (i - 1 - a) as u32) == Some(0) || i - 1 - a == 0);
                match bound {
                    Some(s) if s < rank as u64 => (
                        Certification::Failed,
                        format!("rational rank of CH_0(X, {i}) is at most {s} < {rank}"),
                    ),
                    _ if bottom_row_iso && off_row_zero => (
                        Certification::Satisfied,
                        "degree maps are rational isomorphisms and higher rows vanish rationally".to_string(),
                    ),
                    _ => (
                        Certification::Undeterminable,
                        "rational ranks of higher Chow groups do not decide surjectivity".to_string(),
                    ),
                }
            }
        };
        degrees.push(SpadesuitDegree {
            degree: i,
            status,
            reason,
        });
    }
    let status = if degrees.iter().any(|d| d.status == Certification::Failed) {
        Certification::Failed
    } else if degrees.iter().any(|d| d.status == Certification::Undeterminable) {
        Certification::Undeterminable
    } else {
        Certification::Satisfied
    };
    SpadesuitReport { status, degrees }
}

fn bigints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// Profiles shipped in `data/catalog.json`, regenerated from the classical
/// formulas.
pub fn standard_catalog() -> Vec<ChowProfile> {
    let mut out = Vec::new();
    for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let base = BaseField { p, e };
        out.push(point_profile(base, 1, -4));
        for n in 1..=3 {
            out.push(projective_space_profile(base, n, -1));
        }
    }
    let f2 = BaseField { p: 2, e: 1 };
    let f3 = BaseField { p: 3, e: 1 };
    out.push(point_profile(f2, 2, -4));
    out.push(curve_profile("E: y^2+y=x^3 / F2", f2, &bigints(&[1, 0, 2]), 1).expect("valid curve"));
    out.push(curve_profile("y^2=x^3-x / F3", f3, &bigints(&[1, 0, 3]), 1).expect("valid curve"));
    out.push(curve_profile("P1/F4 over F2", f2, &bigints(&[1]), 2).expect("valid curve"));
    out
}

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone)]
pub struct Catalog {
    profiles: Vec<ChowProfile>,
}

impl Catalog {
    pub fn bundled() -> Self {
        Catalog::from_json(CATALOG_JSON).expect("bundled catalog parses")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        Ok(Catalog {
            profiles: serde_json::from_str(s)?,
        })
    }

    /// Earlier profiles shadow later ones with the same tag.
    pub fn from_profiles(profiles: Vec<ChowProfile>) -> Self {
        Catalog { profiles }
    }

    pub fn profiles(&self) -> &[ChowProfile] {
        &self.profiles
    }

    pub fn get(&self, tag: &str) -> Result<&ChowProfile, ChowError> {
        self.profiles
            .iter()
            .find(|p| p.tag == tag)
            .ok_or_else(|| ChowError::UnknownTag(tag.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{count_points, CountOptions, MultiPoly, Variety, VarietySpec};
    use crate::zeta::{base_change, RationalFunctionQ};

    fn q(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(q(n), q(d))
    }

    const F2: BaseField = BaseField { p: 2, e: 1 };
    const F3: BaseField = BaseField { p: 3, e: 1 };

    #[test]
    fn tate_examples() {
        assert_eq!(tate_chow(&q(2), 0, 0), ChowGroup::free(1));
        assert_eq!(tate_chow(&q(2), 2, 3), ChowGroup::cyclic(q(3)));
        assert!(tate_chow(&q(3), 1, 2).is_zero());
        assert!(tate_chow(&q(2), 1, 1).is_zero());
        assert_eq!(tate_chow(&q(2), 1, 1).as_fq().unwrap().finite_part(), &FGAbGroup::zero());
    }

    #[test]
    fn projective_line_profile() {
        for qq in [2i64, 3, 5] {
            let base = BaseField { p: qq as u64, e: 1 };
            let p1 = projective_space_profile(base, 1, -1);
            assert_eq!(p1.get(0, 0).unwrap(), ChowGroup::free(1));
            assert_eq!(p1.get(0, 1).unwrap().torsion_order(), q(qq - 1));
            assert!(p1.get(0, 2).unwrap().is_zero());
            assert!(p1.get(0, 3).unwrap().is_zero());
        }
        let pt = point_profile(F2, 1, -3);
        assert_eq!(projective_bundle_profile(&pt, 0).unwrap(), pt);
    }

    /// `CH_r(P^n, i) = ⊕_{a=0}^{n} CH^{a-r}(F_q, i)` directly from the twists.
    fn direct_twists(qq: &BigInt, n: usize, r: i64, i: u32) -> ChowGroup {
        (0..=n as i64)
            .filter(|a| a - r >= 0)
            .fold(ChowGroup::zero(), |g, a| g.direct_sum(&tate_chow(qq, (a - r) as u32, i)))
    }

    #[test]
    fn bundle_agrees_with_twists() {
        for base in [F2, F3, BaseField { p: 2, e: 2 }] {
            for n in 0..=3 {
                let pn = projective_space_profile(base, n, -2);
                for (&(r, i), g) in pn.table() {
                    assert_eq!(g, &direct_twists(&base.q(), n, r, i), "P{n} ({r},{i})");
                }
            }
            // P1 x P1 two ways: iterated bundle against twist multiplicities 1, 2, 1
            let pt = point_profile(base, 1, -6);
            let p1p1 = projective_bundle_profile(&projective_bundle_profile(&pt, 1).unwrap(), 1).unwrap();
            for (&(r, i), g) in p1p1.table() {
                let direct = [(0, 1), (1, 2), (2, 1)].iter().fold(ChowGroup::zero(), |acc, &(a, m)| {
                    (0..m).fold(acc, |acc, _| {
                        if a - r >= 0 {
                            acc.direct_sum(&tate_chow(&base.q(), (a - r) as u32, i))
                        } else {
                            acc
                        }
                    })
                });
                assert_eq!(g, &direct);
            }
        }
    }

    #[test]
    fn incomplete_base_is_reported() {
        let mut table = BTreeMap::new();
        table.insert((0, 0), ChowGroup::free(1));
        let partial = ChowProfile::new("partial", F2, 1, vec![Component::geometrically_connected()], false, table).unwrap();
        assert!(matches!(
            projective_bundle_profile(&partial, 1),
            Err(ChowError::IncompleteBase { .. })
        ));
    }

    #[test]
    fn curve_examples() {
        let p1 = curve_profile("P1", F3, &bigints(&[1]), 1).unwrap();
        assert_eq!(p1.get(0, 0).unwrap().torsion_order(), q(1));
        assert_eq!(p1.get(0, 1).unwrap().torsion_order(), q(2));
        let e = curve_profile("E", F2, &bigints(&[1, 0, 2]), 1).unwrap();
        assert_eq!(e.get(0, 0).unwrap().torsion_order(), q(3));
        let c = curve_profile("C", F2, &bigints(&[1]), 2).unwrap();
        assert_eq!(c.get(0, 1).unwrap().torsion_order(), q(3));
        assert!(matches!(
            curve_profile("bad", F2, &bigints(&[1, -3, 1]), 1),
            Err(ChowError::NonIntegralP1(_))
        ));
        let y2 = curve_profile("y2", F3, &bigints(&[1, 0, 3]), 1).unwrap();
        assert_eq!(y2.get(0, 0).unwrap().torsion, Torsion::Order(q(4)));
    }

    fn elliptic_curve_f2() -> Variety {
        // y^2 z + y z^2 + x^3 in P^2 with coordinates (x, y, z)
        let f = MultiPoly::from_terms(&[(&[0, 2, 1], 1), (&[0, 1, 2], 1), (&[3, 0, 0], 1)]);
        Variety::new(F2, VarietySpec::projective_sub(2, vec![f])).unwrap()
    }

    #[test]
    fn picard_order_matches_point_count() {
        // genus one: Pic^0 is the group of rational points
        let opts = CountOptions::default();
        let e = elliptic_curve_f2();
        let n1 = count_points(&e, 1, &opts).unwrap();
        let profile = curve_profile("E", F2, &bigints(&[1, 0, 2]), 1).unwrap();
        assert_eq!(profile.get(0, 0).unwrap().torsion_order(), n1);

        // over F_4 the numerator P_2 satisfies P_2(t^2) = P(t) P(-t)
        let p_at_minus_1 = q(3);
        let p2_at_1 = profile.get(0, 0).unwrap().torsion_order() * p_at_minus_1;
        assert_eq!(p2_at_1, count_points(&e, 2, &opts).unwrap());
    }

    #[test]
    fn restriction_of_scalars_keeps_orders() {
        // a curve over F_4 seen over F_2: Z_{/F_2}(t) = Z_{/F_4}(t^2)
        let f4 = BaseField { p: 2, e: 2 };
        let z = RationalFunctionQ::from_int_coeffs(&[1, 3, 4], &[1, -5, 4]).unwrap();
        let over_k = base_change(&z, 2).unwrap();
        let num: Vec<BigInt> = over_k.num().coeffs().iter().map(|c| c.to_integer()).collect();
        let a = curve_profile("C/F4", f4, &bigints(&[1, 3, 4]), 1).unwrap();
        let b = curve_profile("C/F2", F2, &num, 2).unwrap();
        for i in 0..=2 {
            assert_eq!(a.get(0, i).unwrap().torsion_order(), b.get(0, i).unwrap().torsion_order());
        }
        assert_eq!(a.get(0, 0).unwrap().torsion_order(), q(8));
    }

    fn single(profile: ChowProfile) -> RegulatorAssembly {
        let dim = profile.dim();
        RegulatorAssembly::new(dim, vec![vec![profile]]).unwrap()
    }

    #[test]
    fn regulator_examples() {
        let pt = point_profile(F2, 1, 0);
        assert_eq!(regulator_chi(&single(pt), Lambda::Z).unwrap().product, rat(1, 1));
        let e = curve_profile("E", F2, &bigints(&[1, 0, 2]), 1).unwrap();
        assert_eq!(regulator_chi(&single(e.clone()), Lambda::Z).unwrap().product, rat(3, 1));
        assert_eq!(smooth_proper_product(&e).unwrap(), rat(3, 1));
        let p1 = projective_space_profile(F3, 1, 0);
        assert_eq!(regulator_chi(&single(p1.clone()), Lambda::Z).unwrap().product, rat(1, 2));
        assert_eq!(smooth_proper_product(&p1).unwrap(), rat(1, 2));
        // constant field F_4: χ(deg) = 2
        let k = point_profile(F2, 2, 0);
        assert_eq!(regulator_chi(&single(k), Lambda::Z).unwrap().product, rat(1, 2));
    }

    #[test]
    fn regulator_of_boundary_assemblies() {
        let f = |p: u64| BaseField { p, e: 1 };
        for qq in [2u64, 3, 5] {
            let pt = point_profile(f(qq), 1, 0);
            let p1 = projective_space_profile(f(qq), 1, 0);
            let p2 = projective_space_profile(f(qq), 2, 0);
            let gm = RegulatorAssembly::new(1, vec![vec![p1.clone()], vec![pt.clone(), pt.clone()]]).unwrap();
            assert_eq!(regulator_chi(&gm, Lambda::Z).unwrap().product, rat(1, qq as i64 - 1));
            let two_lines =
                RegulatorAssembly::new(2, vec![vec![p2], vec![p1.clone(), p1], vec![pt]]).unwrap();
            assert_eq!(regulator_chi(&two_lines, Lambda::Z).unwrap().product, rat(1, qq as i64 + 1));
        }
    }

    #[test]
    fn regulator_errors() {
        let mut table = BTreeMap::new();
        table.insert((0, 0), ChowGroup::cyclic(q(2)));
        let no_free = ChowProfile::new("torsion only", F2, 0, vec![Component::geometrically_connected()], true, table).unwrap();
        assert!(matches!(
            regulator_chi(&single(no_free), Lambda::Z),
            Err(ChowError::NotFQ { term: 0, free_rank: 1 })
        ));
        let mut table = BTreeMap::new();
        table.insert((0, 0), ChowGroup::free(1));
        let unknown = ChowProfile::new("unknown", F2, 1, vec![Component::geometrically_connected()], false, table).unwrap();
        assert!(matches!(
            regulator_chi(&single(unknown), Lambda::Z),
            Err(ChowError::IncompleteProfile { r: 0, i: 1, .. })
        ));
        let pt = point_profile(F2, 1, 0);
        assert!(matches!(
            RegulatorAssembly::new(0, vec![vec![pt.clone()], vec![pt]]),
            Err(ChowError::TooLong { length: 2, dim: 0 })
        ));
    }

    #[test]
    fn localized_regulator_drops_p_parts() {
        let k = point_profile(F2, 2, 0);
        assert_eq!(regulator_chi(&single(k), Lambda::InvertP(2)).unwrap().product, rat(1, 1));
        let p1 = projective_space_profile(F3, 1, 0);
        assert_eq!(regulator_chi(&single(p1), Lambda::InvertP(3)).unwrap().product, rat(1, 2));
    }

    #[test]
    fn spadesuit() {
        let p2 = projective_space_profile(F2, 2, 0);
        assert_eq!(spadesuit_check(&single(p2.clone()), None).status, Certification::Satisfied);
        let p1 = projective_space_profile(F2, 1, 0);
        let pt = point_profile(F2, 1, 0);
        let a = RegulatorAssembly::new(2, vec![vec![p2.clone()], vec![p1.clone(), p1.clone()], vec![pt.clone()]]).unwrap();
        assert_eq!(spadesuit_check(&a, None).status, Certification::Undeterminable);
        let zero = vec![FGAbGroup::zero(); 3];
        assert_eq!(spadesuit_check(&a, Some(&zero)).status, Certification::Satisfied);
        let h2 = vec![FGAbGroup::zero(), FGAbGroup::zero(), FGAbGroup::free(1)];
        assert_eq!(spadesuit_check(&a, Some(&h2)).status, Certification::Satisfied);
        // unknown higher Chow groups against nonzero H_2
        // only d_2: E_{2,0} -> E_{0,1} can obstruct, so an unknown CH_0(P^2, 1) matters
        let mut table = p2.table().clone();
        table.remove(&(0, 1));
        let vague = ChowProfile::new("vague", F2, 2, vec![Component::geometrically_connected()], false, table).unwrap();
        let b = RegulatorAssembly::new(2, vec![vec![vague], vec![p1.clone(), p1], vec![pt]]).unwrap();
        assert_eq!(spadesuit_check(&b, Some(&h2)).status, Certification::Undeterminable);
    }

    #[test]
    fn negative_products() {
        let pt = point_profile(F2, 1, -3);
        for r in 1..=3i64 {
            let expect = BigRational::new(BigInt::one(), num_traits::pow(q(2), r as usize) - 1);
            assert_eq!(chow_product_at(&pt, -r).unwrap(), expect);
        }
        let p1 = projective_space_profile(F2, 1, -1);
        assert_eq!(chow_product_at(&p1, -1).unwrap(), rat(1, 3));
    }

    #[test]
    fn profile_json_round_trip() {
        for p in standard_catalog() {
            let js = serde_json::to_string(&p).unwrap();
            let back: ChowProfile = serde_json::from_str(&js).unwrap();
            assert_eq!(back, p);
        }
        let bad = r#"{"tag":"x","base":{"p":2,"e":1},"dim":1,"components":[{"constant_field_degree":1}],
                      "table":{"0,1":{"divisible":"unknown"}}}"#;
        assert!(serde_json::from_str::<ChowProfile>(bad).is_err());
    }

    #[test]
    fn bundled_catalog_is_current() {
        assert_eq!(Catalog::bundled().profiles(), standard_catalog().as_slice());
        assert!(Catalog::bundled().get("E: y^2+y=x^3 / F2").is_ok());
    }
}
