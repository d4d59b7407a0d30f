//! Compositional variety descriptions and exact point counts `#X(F_{q^n})`.
//!
//! Counting is brute force. Affine and projective subvarieties are counted
//! by enumerating every candidate point of the ambient affine space (the
//! affine cone, for projective ones); everything else is assembled from
//! those counts: products multiply, disjoint unions add, complements
//! subtract.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{
    build_field, Budget, DenseArith, FieldArith, FieldDesc, FieldError, LogTableArith,
    LOG_TABLE_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("enumeration of {cost} candidate points exceeds the budget {budget}")]
    BudgetExceeded { cost: u128, budget: u64 },
    #[error("projective polynomial {index} is not homogeneous")]
    NonHomogeneous { index: usize },
    #[error("affine cone count {cone} minus one is not divisible by {modulus}")]
    InexactQuotient { cone: BigInt, modulus: BigInt },
    #[error("closed point census is negative in degree {degree}")]
    NegativeCensus { degree: usize },
    #[error("closed point census is not integral in degree {degree}")]
    NonIntegralCensus { degree: usize },
    #[error("complement count is negative: closed part is not contained in the ambient")]
    NegativeCount,
    #[error("invalid complement: {0}")]
    InvalidComplement(String),
    #[error("invalid polynomial: {0}")]
    BadPolynomial(String),
    #[error("point counts are requested for n >= 1")]
    ZeroExtension,
}

/// The base field of a variety, `F_q` with `q = p^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseField {
    pub p: u64,
    pub e: u32,
}

impl BaseField {
    pub fn new(p: u64, e: u32) -> Result<Self, FieldError> {
        build_field(p, e)?;
        Ok(BaseField { p, e })
    }

    pub fn q(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.e as usize)
    }

    fn extend(&self, n: u32) -> BaseField {
        BaseField {
            p: self.p,
            e: self.e * n,
        }
    }
}

/// A polynomial coefficient: a prime-field residue or a residue vector over
/// the base field's power basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Prime(u64),
    Vector(Vec<u64>),
}

impl Coeff {
    fn residues(&self) -> Vec<u64> {
        match self {
            Coeff::Prime(c) => vec![*c],
            Coeff::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exp: Vec<u32>,
    pub coeff: Coeff,
}

/// A multivariate polynomial over the base field. The variable count is
/// fixed by the ambient space the polynomial lives in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiPoly {
    terms: Vec<Term>,
}

impl MultiPoly {
    /// Normalizes: merges equal exponent vectors and drops zero coefficients.
    pub fn new(nvars: usize, terms: Vec<Term>, base: BaseField) -> Result<Self, GeometryError> {
        let mut merged: Vec<(Vec<u32>, Vec<u64>)> = Vec::new();
        for t in terms {
            if t.exp.len() != nvars {
                return Err(GeometryError::BadPolynomial(format!(
                    "exponent vector {:?} has length {}, expected {nvars}",
                    t.exp,
                    t.exp.len()
                )));
            }
            let mut c = t.coeff.residues();
            if c.len() > base.e as usize || c.iter().any(|&r| r >= base.p) {
                return Err(GeometryError::BadPolynomial(format!(
                    "coefficient {c:?} is not a residue vector over F_{}^{}",
                    base.p, base.e
                )));
            }
            c.resize(base.e as usize, 0);
            match merged.iter_mut().find(|(e, _)| *e == t.exp) {
                Some((_, acc)) => {
                    for (a, b) in acc.iter_mut().zip(&c) {
                        *a = (*a + b) % base.p;
                    }
                }
                None => merged.push((t.exp, c)),
            }
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.iter().any(|&r| r != 0))
            .map(|(exp, c)| Term {
                exp,
                coeff: if c.len() == 1 {
                    Coeff::Prime(c[0])
                } else {
                    Coeff::Vector(c)
                },
            })
            .collect();
        Ok(MultiPoly { terms })
    }

    /// Convenience constructor for prime-field coefficients.
    pub fn from_terms(terms: &[(&[u32], u64)]) -> Self {
        MultiPoly {
            terms: terms
                .iter()
                .map(|(e, c)| Term {
                    exp: e.to_vec(),
                    coeff: Coeff::Prime(*c),
                })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.iter().map(|t| t.exp.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }
}

/// A variety as an expression tree. Leaves carry equations over the base
/// field in effect at that point of the tree; [`VarietySpec::BaseRestriction`]
/// switches its subtree to a degree-`degree` extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarietySpec {
    AffineSpace {
        n: usize,
    },
    ProjectiveSpace {
        n: usize,
    },
    AffineSub {
        ambient: usize,
        polys: Vec<MultiPoly>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    ProjectiveSub {
        ambient: usize,
        polys: Vec<MultiPoly>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Product {
        left: Box<VarietySpec>,
        right: Box<VarietySpec>,
    },
    DisjointUnion {
        parts: Vec<VarietySpec>,
    },
    Complement {
        ambient: Box<VarietySpec>,
        closed: Box<VarietySpec>,
    },
    /// A variety over `F_{q^degree}` regarded as a variety over `F_q`.
    BaseRestriction {
        degree: u32,
        inner: Box<VarietySpec>,
    },
}

impl VarietySpec {
    pub fn affine_sub(ambient: usize, polys: Vec<MultiPoly>) -> Self {
        VarietySpec::AffineSub {
            ambient,
            polys,
            dim: None,
        }
    }

    pub fn projective_sub(ambient: usize, polys: Vec<MultiPoly>) -> Self {
        VarietySpec::ProjectiveSub {
            ambient,
            polys,
            dim: None,
        }
    }

    pub fn complement(ambient: VarietySpec, closed: VarietySpec) -> Self {
        VarietySpec::Complement {
            ambient: Box::new(ambient),
            closed: Box::new(closed),
        }
    }

    pub fn product(left: VarietySpec, right: VarietySpec) -> Self {
        VarietySpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn point() -> Self {
        VarietySpec::AffineSpace { n: 0 }
    }

    /// Structural dimension: complete intersections get `ambient - #equations`
    /// unless a dimension is declared.
    pub fn dim(&self) -> usize {
        match self {
            VarietySpec::AffineSpace { n } | VarietySpec::ProjectiveSpace { n } => *n,
            VarietySpec::AffineSub {
                ambient, polys, dim, ..
            }
            | VarietySpec::ProjectiveSub {
                ambient, polys, dim, ..
            } => dim.unwrap_or(ambient.saturating_sub(polys.len())),
            VarietySpec::Product { left, right } => left.dim() + right.dim(),
            VarietySpec::DisjointUnion { parts } => {
                parts.iter().map(VarietySpec::dim).max().unwrap_or(0)
            }
            VarietySpec::Complement { ambient, .. } => ambient.dim(),
            VarietySpec::BaseRestriction { inner, .. } => inner.dim(),
        }
    }

    fn validate(&mut self, base: BaseField) -> Result<(), GeometryError> {
        match self {
            VarietySpec::AffineSpace { .. } | VarietySpec::ProjectiveSpace { .. } => Ok(()),
            VarietySpec::AffineSub { ambient, polys, .. } => {
                for p in polys.iter_mut() {
                    *p = MultiPoly::new(*ambient, std::mem::take(&mut p.terms), base)?;
                }
                Ok(())
            }
            VarietySpec::ProjectiveSub { ambient, polys, .. } => {
                for (index, p) in polys.iter_mut().enumerate() {
                    *p = MultiPoly::new(*ambient + 1, std::mem::take(&mut p.terms), base)?;
                    if !p.is_homogeneous() {
                        return Err(GeometryError::NonHomogeneous { index });
                    }
                }
                Ok(())
            }
            VarietySpec::Product { left, right } => {
                left.validate(base)?;
                right.validate(base)
            }
            VarietySpec::DisjointUnion { parts } => {
                parts.iter_mut().try_for_each(|p| p.validate(base))
            }
            VarietySpec::Complement { ambient, closed } => {
                ambient.validate(base)?;
                closed.validate(base)?;
                check_complement(ambient, closed)
            }
            VarietySpec::BaseRestriction { degree, inner } => {
                if *degree == 0 {
                    return Err(GeometryError::Field(FieldError::ZeroDegree));
                }
                inner.validate(base.extend(*degree))
            }
        }
    }
}

/// The closed part must be cut out inside the same ambient space by a
/// superset of the ambient's own equations.
fn check_complement(ambient: &VarietySpec, closed: &VarietySpec) -> Result<(), GeometryError> {
    use VarietySpec::*;
    let (amb_proj, amb_n, amb_polys): (bool, usize, &[MultiPoly]) = match ambient {
        AffineSpace { n } => (false, *n, &[]),
        ProjectiveSpace { n } => (true, *n, &[]),
        AffineSub { ambient, polys, .. } => (false, *ambient, polys),
        ProjectiveSub { ambient, polys, .. } => (true, *ambient, polys),
        _ => {
            return Err(GeometryError::InvalidComplement(
                "ambient must be a space or a subvariety of one".into(),
            ))
        }
    };
    let (cl_proj, cl_n, cl_polys) = match closed {
        AffineSub { ambient, polys, .. } => (false, *ambient, polys),
        ProjectiveSub { ambient, polys, .. } => (true, *ambient, polys),
        _ => {
            return Err(GeometryError::InvalidComplement(
                "closed part must be a subvariety".into(),
            ))
        }
    };
    if amb_proj != cl_proj || amb_n != cl_n {
        return Err(GeometryError::InvalidComplement(
            "closed part lives in a different ambient space".into(),
        ));
    }
    if !amb_polys.iter().all(|p| cl_polys.contains(p)) {
        return Err(GeometryError::InvalidComplement(
            "closed part does not contain the ambient's equations".into(),
        ));
    }
    Ok(())
}

/// A validated variety over a fixed base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variety {
    base: BaseField,
    spec: VarietySpec,
    dim: usize,
}

impl Variety {
    pub fn new(base: BaseField, mut spec: VarietySpec) -> Result<Self, GeometryError> {
        build_field(base.p, base.e)?;
        spec.validate(base)?;
        let dim = spec.dim();
        Ok(Variety { base, spec, dim })
    }

    pub fn base(&self) -> BaseField {
        self.base
    }

    pub fn spec(&self) -> &VarietySpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Knobs for [`count_points`].
#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    pub budget: Budget,
    /// Candidate points per parallel work item.
    pub chunk_size: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: Budget::default(),
            chunk_size: 1 << 16,
        }
    }
}

impl CountOptions {
    pub fn with_budget(budget: Budget) -> Self {
        CountOptions {
            budget,
            ..Default::default()
        }
    }
}

/// Number of candidate points visited by [`count_points`] for this `n`.
pub fn enumeration_cost(variety: &Variety, n: u32) -> u128 {
    node_cost(&variety.spec, variety.base, n)
}

fn node_cost(spec: &VarietySpec, base: BaseField, n: u32) -> u128 {
    let q = |k: usize| (base.p as u128).saturating_pow(base.e * n * k as u32);
    match spec {
        VarietySpec::AffineSpace { .. } | VarietySpec::ProjectiveSpace { .. } => 0,
        VarietySpec::AffineSub { ambient, .. } => q(*ambient),
        VarietySpec::ProjectiveSub { ambient, .. } => q(*ambient + 1),
        VarietySpec::Product { left, right } => {
            node_cost(left, base, n).saturating_add(node_cost(right, base, n))
        }
        VarietySpec::DisjointUnion { parts } => parts
            .iter()
            .fold(0u128, |acc, p| acc.saturating_add(node_cost(p, base, n))),
        VarietySpec::Complement { ambient, closed } => {
            node_cost(ambient, base, n).saturating_add(node_cost(closed, base, n))
        }
        VarietySpec::BaseRestriction { degree, inner } => {
            if n.is_multiple_of(*degree) {
                node_cost(inner, base.extend(*degree), n / degree)
            } else {
                0
            }
        }
    }
}

/// Exact `#X(F_{q^n})`.
pub fn count_points(variety: &Variety, n: u32, opts: &CountOptions) -> Result<BigInt, GeometryError> {
    if n == 0 {
        return Err(GeometryError::ZeroExtension);
    }
    let cost = enumeration_cost(variety, n);
    if !opts.budget.allows(cost) {
        return Err(GeometryError::BudgetExceeded {
            cost,
            budget: opts.budget.0,
        });
    }
    count_node(&variety.spec, variety.base, n, opts)
}

/// Counts `N_1, N_2, ...` up to `max_n`, stopping early at the first `n`
/// whose enumeration would exceed the budget. At least `N_1` is required.
pub fn counts_within_budget(
    variety: &Variety,
    max_n: u32,
    opts: &CountOptions,
) -> Result<Vec<BigInt>, GeometryError> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let cost = enumeration_cost(variety, n);
        if !opts.budget.allows(cost) {
            if out.is_empty() {
                return Err(GeometryError::BudgetExceeded {
                    cost,
                    budget: opts.budget.0,
                });
            }
            break;
        }
        out.push(count_node(&variety.spec, variety.base, n, opts)?);
    }
    Ok(out)
}

fn big_pow(base: &BigInt, k: usize) -> BigInt {
    num_traits::pow(base.clone(), k)
}

fn count_node(
    spec: &VarietySpec,
    base: BaseField,
    n: u32,
    opts: &CountOptions,
) -> Result<BigInt, GeometryError> {
    let q_n = big_pow(&BigInt::from(base.p), (base.e * n) as usize);
    match spec {
        VarietySpec::AffineSpace { n: k } => Ok(big_pow(&q_n, *k)),
        VarietySpec::ProjectiveSpace { n: k } => {
            Ok((big_pow(&q_n, k + 1) - 1u32) / (&q_n - 1u32))
        }
        VarietySpec::AffineSub { ambient, polys, .. } => {
            Ok(BigInt::from(count_affine(base, n, *ambient, polys, opts)?))
        }
        VarietySpec::ProjectiveSub { ambient, polys, .. } => {
            let cone = BigInt::from(count_affine(base, n, *ambient + 1, polys, opts)?);
            let modulus = &q_n - 1u32;
            let (quot, rem) = (&cone - 1u32).div_rem(&modulus);
            if !rem.is_zero() {
                return Err(GeometryError::InexactQuotient { cone, modulus });
            }
            Ok(quot)
        }
        VarietySpec::Product { left, right } => {
            Ok(count_node(left, base, n, opts)? * count_node(right, base, n, opts)?)
        }
        VarietySpec::DisjointUnion { parts } => parts
            .iter()
            .map(|p| count_node(p, base, n, opts))
            .sum(),
        VarietySpec::Complement { ambient, closed } => {
            let diff = count_node(ambient, base, n, opts)? - count_node(closed, base, n, opts)?;
            if diff.is_negative() {
                return Err(GeometryError::NegativeCount);
            }
            Ok(diff)
        }
        VarietySpec::BaseRestriction { degree, inner } => {
            if !n.is_multiple_of(*degree) {
                return Ok(BigInt::zero());
            }
            let inner_count = count_node(inner, base.extend(*degree), n / degree, opts)?;
            Ok(inner_count * BigInt::from(*degree))
        }
    }
}

/// Solutions in `F_{q^n}^nvars` of all `polys`.
fn count_affine(
    base: BaseField,
    n: u32,
    nvars: usize,
    polys: &[MultiPoly],
    opts: &CountOptions,
) -> Result<u64, GeometryError> {
    let big = build_field(base.p, base.e * n)?;
    if big.order() <= LOG_TABLE_LIMIT as u128 {
        let arith = LogTableArith::new(Arc::clone(&big));
        count_with(&arith, base, nvars, polys, opts)
    } else {
        let arith = DenseArith::new(Arc::clone(&big));
        count_with(&arith, base, nvars, polys, opts)
    }
}

/// Image of the base field's generator in the big field: the least root, in
/// index order, of the base modulus.
fn embed_generator<A: FieldArith>(arith: &A, base_modulus: &[u64]) -> u64 {
    let q = arith.order();
    (0..q)
        .find(|&x| {
            let val = base_modulus
                .iter()
                .rev()
                .fold(0u64, |acc, &c| arith.add(arith.mul(acc, x), c));
            val == 0
        })
        .expect("a finite field contains every subfield of its order")
}

struct PreparedPoly {
    terms: Vec<(u64, Vec<u32>)>,
}

fn prepare<A: FieldArith>(arith: &A, base: BaseField, polys: &[MultiPoly]) -> Vec<PreparedPoly> {
    let embed = |residues: Vec<u64>| -> u64 {
        if base.e == 1 {
            return residues[0] % base.p;
        }
        let base_desc: Arc<FieldDesc> = build_field(base.p, base.e).expect("validated base field");
        let beta = embed_generator(arith, base_desc.modulus());
        residues
            .iter()
            .rev()
            .fold(0u64, |acc, &c| arith.add(arith.mul(acc, beta), c % base.p))
    };
    polys
        .iter()
        .map(|p| PreparedPoly {
            terms: p
                .terms
                .iter()
                .map(|t| (embed(t.coeff.residues()), t.exp.clone()))
                .collect(),
        })
        .collect()
}

fn count_with<A: FieldArith>(
    arith: &A,
    base: BaseField,
    nvars: usize,
    polys: &[MultiPoly],
    opts: &CountOptions,
) -> Result<u64, GeometryError> {
    let q = arith.order();
    let total = (q as u128).saturating_pow(nvars as u32);
    if !opts.budget.allows(total) {
        return Err(GeometryError::BudgetExceeded {
            cost: total,
            budget: opts.budget.0,
        });
    }
    let total = total as u64;
    let prepared = prepare(arith, base, polys);
    let chunk = opts.chunk_size.max(1);
    let chunks = total.div_ceil(chunk);
    let count = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            count_range(arith, nvars, &prepared, start, end)
        })
        .sum();
    Ok(count)
}

fn count_range<A: FieldArith>(
    arith: &A,
    nvars: usize,
    polys: &[PreparedPoly],
    start: u64,
    end: u64,
) -> u64 {
    let q = arith.order();
    let mut point = vec![0u64; nvars];
    let mut idx = start;
    for x in point.iter_mut() {
        *x = idx % q;
        idx /= q;
    }
    let mut found = 0;
    for _ in start..end {
        let on = polys.iter().all(|p| {
            p.terms.iter().fold(0u64, |acc, (c, exp)| {
                let mono = exp
                    .iter()
                    .zip(&point)
                    .fold(*c, |m, (&k, &x)| if k == 0 { m } else { arith.mul(m, arith.pow(x, k as u64)) });
                arith.add(acc, mono)
            }) == 0
        });
        if on {
            found += 1;
        }
        for x in point.iter_mut() {
            *x += 1;
            if *x < q {
                break;
            }
            *x = 0;
        }
    }
    found
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Closed points by degree from `counts[n-1] = N_n`:
/// `a_d = (1/d) sum_{m | d} mu(d/m) N_m`.
pub fn census_from_counts(counts: &[BigInt]) -> Result<Vec<BigInt>, GeometryError> {
    (1..=counts.len())
        .map(|d| {
            let sum: BigInt = (1..=d)
                .filter(|m| d % m == 0)
                .map(|m| &counts[m - 1] * mobius(d / m))
                .sum();
            let (a, rem) = sum.div_rem(&BigInt::from(d));
            if !rem.is_zero() {
                Err(GeometryError::NonIntegralCensus { degree: d })
            } else if a.is_negative() {
                Err(GeometryError::NegativeCensus { degree: d })
            } else {
                Ok(a)
            }
        })
        .collect()
}

/// `a_1, ..., a_D`, the number of closed points of each degree.
pub fn closed_point_census(
    variety: &Variety,
    max_degree: u32,
    opts: &CountOptions,
) -> Result<Vec<BigInt>, GeometryError> {
    let counts = (1..=max_degree)
        .map(|n| count_points(variety, n, opts))
        .collect::<Result<Vec<_>, _>>()?;
    census_from_counts(&counts)
}

/// Point counts of the strata `Y^(a)` of a normal crossing configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SncCensus {
    /// `table[a][n-1] = N_n(Y^(a))`.
    pub table: Vec<Vec<BigInt>>,
}

impl SncCensus {
    /// `sum_a (-1)^a N_n(Y^(a))`, which is `N_n(U)` for the open complement.
    pub fn alternating_sum(&self, n: u32) -> BigInt {
        self.table
            .iter()
            .enumerate()
            .map(|(a, row)| {
                let v = row[n as usize - 1].clone();
                if a % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .sum()
    }

    pub fn max_n(&self) -> u32 {
        self.table.first().map_or(0, |r| r.len() as u32)
    }
}

/// Sums the counts of every stratum at each level, for `n = 1..=max_n`.
pub fn snc_census(
    strata: &[(Variety, usize)],
    max_n: u32,
    opts: &CountOptions,
) -> Result<SncCensus, GeometryError> {
    let levels = strata.iter().map(|(_, a)| a + 1).max().unwrap_or(0);
    let mut table = vec![vec![BigInt::zero(); max_n as usize]; levels];
    for (variety, level) in strata {
        for n in 1..=max_n {
            table[*level][n as usize - 1] += count_points(variety, n, opts)?;
        }
    }
    Ok(SncCensus { table })
}

/// `1` when `x` is one; used by callers building counts by hand.
pub fn is_one(x: &BigInt) -> bool {
    x.is_one()
}

/// `N_n` as a `u64`, for display.
pub fn as_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}
