//! The Euler characteristic of a homomorphism and its three identities:
//! multiplicativity under composition, the snake identity for a map of short
//! exact sequences, and invariance under passing to homology.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::group::{ComplexMap, FGAbGroup, FGComplex, FGMap};
use super::AbGroupError;
use crate::serial;

/// `#Coker(f)_tor / #Ker(f)_tor`, defined when both are finite.
pub fn chi(f: &FGMap) -> Result<BigRational, AbGroupError> {
    let ker = f.kernel();
    let coker = f.cokernel();
    if !ker.is_finite() {
        return Err(AbGroupError::NotFQ {
            part: "kernel",
            free_rank: ker.free_rank(),
        });
    }
    if !coker.is_finite() {
        return Err(AbGroupError::NotFQ {
            part: "cokernel",
            free_rank: coker.free_rank(),
        });
    }
    Ok(BigRational::new(coker.torsion_order(), ker.torsion_order()))
}

/// Both sides of an identity between products of χ values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiIdentity {
    #[serde(with = "serial::rational")]
    pub lhs: BigRational,
    #[serde(with = "serial::rational")]
    pub rhs: BigRational,
}

impl ChiIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `χ(g f)` against `χ(g) χ(f)`.
pub fn chi_compose_check(f: &FGMap, g: &FGMap) -> Result<ChiIdentity, AbGroupError> {
    let gf = f.then(g)?;
    Ok(ChiIdentity {
        lhs: chi(&gf)?,
        rhs: chi(g)? * chi(f)?,
    })
}

/// `0 -> A --first--> B --second--> C -> 0`.
#[derive(Debug, Clone)]
pub struct ShortExactRow {
    pub first: FGMap,
    pub second: FGMap,
}

impl ShortExactRow {
    pub fn verify(&self) -> Result<(), AbGroupError> {
        let a = self.first.source.clone();
        let c = self.second.target.clone();
        let c = FGComplex::from_diffs(
            0,
            vec![
                FGMap::zero(c.clone(), FGAbGroup::zero()),
                self.second.clone(),
                self.first.clone(),
                FGMap::zero(FGAbGroup::zero(), a),
            ],
        )
        .map_err(|e| AbGroupError::RowsNotExact(e.to_string()))?;
        match c.homology().iter().position(|h| !h.is_zero()) {
            None => Ok(()),
            Some(k) => Err(AbGroupError::RowsNotExact(format!(
                "homology at position {k} of 0 -> A -> B -> C -> 0 is nonzero"
            ))),
        }
    }
}

/// Two short exact rows joined by vertical maps `f: A -> A'`, `g: B -> B'`,
/// `h: C -> C'`.
#[derive(Debug, Clone)]
pub struct SnakeDiagram {
    pub top: ShortExactRow,
    pub bottom: ShortExactRow,
    pub f: FGMap,
    pub g: FGMap,
    pub h: FGMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnakeReport {
    #[serde(with = "serial::rational")]
    pub chi_f: BigRational,
    #[serde(with = "serial::rational")]
    pub chi_g: BigRational,
    #[serde(with = "serial::rational")]
    pub chi_h: BigRational,
    /// `χ(f) χ(g)^{-1} χ(h)`
    #[serde(with = "serial::rational")]
    pub product: BigRational,
}

impl SnakeReport {
    pub fn holds(&self) -> bool {
        self.product.is_one()
    }
}

pub fn chi_snake_check(d: &SnakeDiagram) -> Result<SnakeReport, AbGroupError> {
    d.top.verify()?;
    d.bottom.verify()?;
    let left = d.top.first.then(&d.g)?;
    let right = d.f.then(&d.bottom.first)?;
    if left.matrix != right.matrix {
        return Err(AbGroupError::NotCommutative("left square".into()));
    }
    let left = d.top.second.then(&d.h)?;
    let right = d.g.then(&d.bottom.second)?;
    if left.matrix != right.matrix {
        return Err(AbGroupError::NotCommutative("right square".into()));
    }
    let chi_f = chi(&d.f)?;
    let chi_h = chi(&d.h)?;
    let chi_g = chi(&d.g)?;
    let product = &chi_f / &chi_g * &chi_h;
    Ok(SnakeReport {
        chi_f,
        chi_g,
        chi_h,
        product,
    })
}

fn alternating(i: i64, x: BigRational) -> BigRational {
    if i.rem_euclid(2) == 0 {
        x
    } else {
        x.recip()
    }
}

/// `prod_i χ(H_i(f))^{(-1)^i}` against `prod_i χ(f_i)^{(-1)^i}`, for a
/// chain map of bounded complexes whose components have finite kernel and
/// cokernel.
pub fn chi_complex_check(f: &ComplexMap) -> Result<ChiIdentity, AbGroupError> {
    let mut rhs = BigRational::one();
    for i in f.lowest()..=f.highest() {
        let c = chi(f.component(i)).map_err(|e| {
            AbGroupError::HypothesisViolated(format!("component in degree {i}: {e}"))
        })?;
        rhs *= alternating(i, c);
    }
    let mut lhs = BigRational::one();
    for i in f.lowest()..=f.highest() {
        lhs *= alternating(i, chi(&f.on_homology(i)?)?);
    }
    Ok(ChiIdentity { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::IntMatrix;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(&FGMap::scalar(FGAbGroup::free(1), 5)).unwrap(), q(5, 1));
        let zero = FGMap::zero(FGAbGroup::cyclic(6), FGAbGroup::cyclic(4));
        assert_eq!(chi(&zero).unwrap(), q(2, 3));
        let src = FGAbGroup::from_orders(1, &[BigInt::from(3)]);
        let proj = FGMap::new(src, FGAbGroup::free(1), m(&[&[0, 1]])).unwrap();
        assert_eq!(chi(&proj).unwrap(), q(1, 3));
        let not_fq = FGMap::zero(FGAbGroup::free(1), FGAbGroup::zero());
        assert_eq!(chi(&not_fq), Err(AbGroupError::NotFQ { part: "kernel", free_rank: 1 }));
    }

    #[test]
    fn compose_examples() {
        let z = FGAbGroup::free(1);
        let r = chi_compose_check(&FGMap::scalar(z.clone(), 2), &FGMap::scalar(z, 3)).unwrap();
        assert_eq!(r.lhs, q(6, 1));
        assert!(r.holds());
        let f = FGMap::zero(FGAbGroup::cyclic(2), FGAbGroup::cyclic(4));
        let g = FGMap::identity(FGAbGroup::cyclic(4));
        let r = chi_compose_check(&f, &g).unwrap();
        assert_eq!(r.lhs, q(2, 1));
        assert!(r.holds());
    }

    fn split_row(a: usize, c: usize) -> ShortExactRow {
        let b = a + c;
        let first = IntMatrix::from_fn(b, a, |i, j| if i == j { 1.into() } else { 0.into() });
        let second = IntMatrix::from_fn(c, b, |i, j| if j == a + i { 1.into() } else { 0.into() });
        ShortExactRow {
            first: FGMap::new(FGAbGroup::free(a), FGAbGroup::free(b), first).unwrap(),
            second: FGMap::new(FGAbGroup::free(b), FGAbGroup::free(c), second).unwrap(),
        }
    }

    #[test]
    fn snake_free_example() {
        let z = FGAbGroup::free(1);
        let d = SnakeDiagram {
            top: split_row(1, 1),
            bottom: split_row(1, 1),
            f: FGMap::scalar(z.clone(), 2),
            g: FGMap::new(FGAbGroup::free(2), FGAbGroup::free(2), m(&[&[2, 0], &[0, 3]])).unwrap(),
            h: FGMap::scalar(z, 3),
        };
        let r = chi_snake_check(&d).unwrap();
        assert_eq!((r.chi_f.clone(), r.chi_g.clone(), r.chi_h.clone()), (q(2, 1), q(6, 1), q(3, 1)));
        assert!(r.holds());
    }

    #[test]
    fn snake_torsion_example() {
        let z2 = FGAbGroup::cyclic(2);
        let z4 = FGAbGroup::cyclic(4);
        let row = ShortExactRow {
            first: FGMap::new(z2.clone(), z4.clone(), m(&[&[2]])).unwrap(),
            second: FGMap::new(z4.clone(), z2.clone(), m(&[&[1]])).unwrap(),
        };
        let d = SnakeDiagram {
            top: row.clone(),
            bottom: row,
            f: FGMap::scalar(z2.clone(), 2),
            g: FGMap::scalar(z4, 2),
            h: FGMap::scalar(z2, 2),
        };
        assert!(chi_snake_check(&d).unwrap().holds());
    }

    #[test]
    fn snake_identity_maps() {
        let row = split_row(2, 1);
        let d = SnakeDiagram {
            top: row.clone(),
            bottom: row,
            f: FGMap::identity(FGAbGroup::free(2)),
            g: FGMap::identity(FGAbGroup::free(3)),
            h: FGMap::identity(FGAbGroup::free(1)),
        };
        let r = chi_snake_check(&d).unwrap();
        assert_eq!(r.chi_g, q(1, 1));
    }

    #[test]
    fn snake_rejects_non_exact_rows() {
        let z = FGAbGroup::free(1);
        let bad = ShortExactRow {
            first: FGMap::scalar(z.clone(), 2),
            second: FGMap::identity(z.clone()),
        };
        let d = SnakeDiagram {
            top: bad.clone(),
            bottom: bad,
            f: FGMap::identity(z.clone()),
            g: FGMap::identity(z.clone()),
            h: FGMap::identity(z),
        };
        assert!(matches!(chi_snake_check(&d), Err(AbGroupError::RowsNotExact(_))));
    }

    #[test]
    fn complex_check_examples() {
        let c = FGComplex::from_diffs(0, vec![FGMap::scalar(FGAbGroup::free(1), 2)]).unwrap();
        let id = ComplexMap::new(&c, &c, 0, vec![FGMap::identity(FGAbGroup::free(1)); 2]).unwrap();
        let r = chi_complex_check(&id).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(1, 1), q(1, 1)));
        for degree in [0i64, 1] {
            let c = FGComplex::concentrated(degree, FGAbGroup::free(1));
            let f = ComplexMap::new(&c, &c, degree, vec![FGMap::scalar(FGAbGroup::free(1), 7)]).unwrap();
            let r = chi_complex_check(&f).unwrap();
            let expect = if degree == 0 { q(7, 1) } else { q(1, 7) };
            assert_eq!(r.lhs, expect);
            assert!(r.holds());
        }
        let c = FGComplex::concentrated(0, FGAbGroup::free(1));
        let zero = ComplexMap::new(&c, &c, 0, vec![FGMap::scalar(FGAbGroup::free(1), 0)]).unwrap();
        assert!(matches!(chi_complex_check(&zero), Err(AbGroupError::HypothesisViolated(_))));
    }
}
