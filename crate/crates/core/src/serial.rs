//! Stable textual forms: rationals as `"num/den"` strings in lowest terms
//! with a positive denominator, polynomials as ascending coefficient arrays.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

pub fn rat_to_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `"a/b"` and plain integers `"a"`.
pub fn parse_rat(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
    let d = BigInt::from_str(d).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

pub fn int_rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), BigInt::one())
}

/// `#[serde(with = "crate::serial::rational")]`
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "crate::serial::rational_vec")]`
pub mod rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&rat_to_string(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Signed(i64),
    Unsigned(u64),
    Text(String),
}

fn int_from_repr<E: serde::de::Error>(r: IntRepr) -> Result<BigInt, E> {
    match r {
        IntRepr::Signed(v) => Ok(v.into()),
        IntRepr::Unsigned(v) => Ok(v.into()),
        IntRepr::Text(s) => BigInt::from_str(s.trim()).map_err(E::custom),
    }
}

fn int_to_repr<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    use num_traits::ToPrimitive;
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

/// Integers as JSON numbers, falling back to decimal strings beyond 64 bits.
/// `#[serde(with = "crate::serial::bigint")]`
pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        int_to_repr(x, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        int_from_repr(IntRepr::deserialize(d)?)
    }
}

/// `#[serde(with = "crate::serial::bigint_vec")]`
pub mod bigint_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    struct One<'a>(&'a BigInt);

    impl serde::Serialize for One<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            int_to_repr(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&One(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<IntRepr>::deserialize(d)?
            .into_iter()
            .map(int_from_repr)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let x = parse_rat("6/-4").unwrap();
        assert_eq!(rat_to_string(&x), "-3/2");
        assert_eq!(rat_to_string(&parse_rat("3").unwrap()), "3/1");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[derive(serde::Serialize, serde::Deserialize, PartialEq, Debug)]
    struct Ints(#[serde(with = "bigint_vec")] Vec<BigInt>);

    #[test]
    fn integers_as_numbers() {
        let big = BigInt::from(10).pow(30);
        let v = Ints(vec![BigInt::from(-6), big.clone()]);
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(js, format!("[-6,\"{big}\"]"));
        assert_eq!(serde_json::from_str::<Ints>(&js).unwrap(), v);
        assert_eq!(serde_json::from_str::<Ints>("[18446744073709551615]").unwrap().0[0], BigInt::from(u64::MAX));
    }
}
