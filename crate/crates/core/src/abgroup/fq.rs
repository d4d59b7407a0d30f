//! Groups of the form (finite) + (uniquely divisible), and localization at
//! `Λ = Z[1/p]`.
//!
//! The divisible summand is never presented; only its rank is carried, and
//! possibly not even that. χ only ever reads torsion.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::chi::chi;
use super::group::{FGAbGroup, FGComplex, FGMap};
use super::AbGroupError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivisibleRank {
    Known(u64),
    Unknown,
}

impl fmt::Display for DivisibleRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisibleRank::Known(n) => write!(f, "{n}"),
            DivisibleRank::Unknown => write!(f, "unknown"),
        }
    }
}

impl Serialize for DivisibleRank {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DivisibleRank::Known(n) => s.serialize_u64(*n),
            DivisibleRank::Unknown => s.serialize_str("unknown"),
        }
    }
}

impl<'de> Deserialize<'de> for DivisibleRank {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Known(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Known(n) => Ok(DivisibleRank::Known(n)),
            Repr::Text(s) if s == "unknown" => Ok(DivisibleRank::Unknown),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "divisible rank must be a number or \"unknown\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FQGroup {
    finite: FGAbGroup,
    divisible_rank: DivisibleRank,
}

impl FQGroup {
    pub fn new(finite: FGAbGroup, divisible_rank: DivisibleRank) -> Result<Self, AbGroupError> {
        if !finite.is_finite() {
            return Err(AbGroupError::InvalidGroup(format!(
                "finite part {finite} has positive free rank"
            )));
        }
        Ok(FQGroup {
            finite,
            divisible_rank,
        })
    }

    pub fn finite(finite: FGAbGroup) -> Result<Self, AbGroupError> {
        FQGroup::new(finite, DivisibleRank::Known(0))
    }

    pub fn finite_part(&self) -> &FGAbGroup {
        &self.finite
    }

    pub fn divisible_rank(&self) -> DivisibleRank {
        self.divisible_rank
    }

    /// The torsion subgroup, which is exactly the finite part.
    pub fn torsion(&self) -> &FGAbGroup {
        &self.finite
    }
}

/// What a map of FQ groups does on the divisible summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisibleBehavior {
    Zero,
    Iso,
    Unspecified,
}

/// A map of FQ groups: an honest map on finite parts plus declared behavior
/// on the divisible parts (no map between a finite and a uniquely divisible
/// group is nonzero, so these are the only components).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FQMap {
    pub source: FQGroup,
    pub target: FQGroup,
    pub finite_map: FGMap,
    pub divisible: DivisibleBehavior,
}

impl FQMap {
    pub fn new(
        source: FQGroup,
        target: FQGroup,
        finite_map: FGMap,
        divisible: DivisibleBehavior,
    ) -> Result<Self, AbGroupError> {
        if finite_map.source != source.finite || finite_map.target != target.finite {
            return Err(AbGroupError::ShapeMismatch(
                "finite map does not match the finite parts".into(),
            ));
        }
        if divisible == DivisibleBehavior::Iso {
            if let (DivisibleRank::Known(a), DivisibleRank::Known(b)) =
                (source.divisible_rank, target.divisible_rank)
            {
                if a != b {
                    return Err(AbGroupError::InvalidMap(format!(
                        "divisible parts of ranks {a} and {b} cannot be isomorphic"
                    )));
                }
            }
        }
        Ok(FQMap {
            source,
            target,
            finite_map,
            divisible,
        })
    }
}

/// χ of a map of FQ groups. Kernel and cokernel of the divisible component
/// are torsion free, so only the finite component contributes; the divisible
/// behavior must nevertheless be pinned down when the ranks could differ.
pub fn chi_fq(f: &FQMap) -> Result<BigRational, AbGroupError> {
    if f.divisible == DivisibleBehavior::Unspecified {
        let ok = matches!(
            (f.source.divisible_rank, f.target.divisible_rank),
            (DivisibleRank::Known(a), DivisibleRank::Known(b)) if a == b || a == 0 || b == 0
        );
        if !ok {
            return Err(AbGroupError::DivisibleBehaviorUnspecified {
                source_rank: f.source.divisible_rank.to_string(),
                target_rank: f.target.divisible_rank.to_string(),
            });
        }
    }
    chi(&f.finite_map)
}

fn strip(d: &BigInt, p: &BigInt) -> BigInt {
    let mut d = d.clone();
    while !d.is_zero() && d.is_multiple_of(p) {
        d /= p;
    }
    d
}

/// `G ⊗ Z[1/p]` described by its invariants: `p`-parts of the torsion are
/// removed, the free rank is unchanged.
pub fn localize(g: &FGAbGroup, p: u64) -> FGAbGroup {
    let p = BigInt::from(p);
    let torsion: Vec<BigInt> = g
        .torsion()
        .iter()
        .map(|d| strip(d, &p))
        .filter(|d| d > &BigInt::from(1))
        .collect();
    FGAbGroup::new(g.free_rank(), torsion).expect("stripping p keeps the divisibility chain")
}

/// Homology of `C ⊗ Λ`; localization is exact, so this is `H(C) ⊗ Λ`.
pub fn localize_complex_homology(c: &FGComplex, p: Option<u64>) -> Vec<FGAbGroup> {
    let h = c.homology();
    match p {
        None => h,
        Some(p) => h.iter().map(|g| localize(g, p)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn localize_examples() {
        assert_eq!(localize(&FGAbGroup::cyclic(12), 2), FGAbGroup::cyclic(3));
        assert_eq!(localize(&FGAbGroup::cyclic(8), 2), FGAbGroup::zero());
        let g = FGAbGroup::from_orders(1, &[z(6)]);
        assert_eq!(localize(&g, 3), FGAbGroup::from_orders(1, &[z(2)]));
    }

    #[test]
    fn fq_chi_reads_torsion_only() {
        let src = FQGroup::new(FGAbGroup::cyclic(6), DivisibleRank::Unknown).unwrap();
        let tgt = FQGroup::new(FGAbGroup::cyclic(4), DivisibleRank::Known(2)).unwrap();
        let fm = FGMap::zero(FGAbGroup::cyclic(6), FGAbGroup::cyclic(4));
        let f = FQMap::new(src.clone(), tgt.clone(), fm.clone(), DivisibleBehavior::Zero).unwrap();
        assert_eq!(chi_fq(&f).unwrap(), BigRational::new(z(2), z(3)));
        let g = FQMap::new(src, tgt, fm, DivisibleBehavior::Unspecified).unwrap();
        assert!(matches!(chi_fq(&g), Err(AbGroupError::DivisibleBehaviorUnspecified { .. })));
    }

    #[test]
    fn fq_validation() {
        assert!(FQGroup::finite(FGAbGroup::free(1)).is_err());
        let a = FQGroup::new(FGAbGroup::zero(), DivisibleRank::Known(1)).unwrap();
        let b = FQGroup::new(FGAbGroup::zero(), DivisibleRank::Known(2)).unwrap();
        let r = FQMap::new(a, b, FGMap::identity(FGAbGroup::zero()), DivisibleBehavior::Iso);
        assert!(r.is_err());
    }

    #[test]
    fn fq_json() {
        let g = FQGroup::new(FGAbGroup::cyclic(3), DivisibleRank::Unknown).unwrap();
        let js = serde_json::to_string(&g).unwrap();
        assert_eq!(js, r#"{"finite":{"free":0,"torsion":[3]},"divisible_rank":"unknown"}"#);
        assert_eq!(serde_json::from_str::<FQGroup>(&js).unwrap(), g);
    }
}
