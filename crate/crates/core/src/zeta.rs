//! Zeta functions as truncated power series and as exact rational functions,
//! and their special values as leading Laurent coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Poly;
use crate::scalar::ExactField;
use crate::serial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error("no point counts given")]
    EmptyCounts,
    #[error("point count N_{n} is negative")]
    NegativeCount { n: usize },
    #[error("coefficient {index} of the zeta series is not an integer; the counts are inconsistent")]
    NonIntegralSeries { index: usize },
    #[error("census covers degrees up to {have}, order {need} requested")]
    InsufficientCensus { have: usize, need: usize },
    #[error("no rational function with {guard} spare coefficients fits the series to order {order}")]
    NotStabilized { order: usize, guard: usize },
    #[error("degree bound ({deg_num}, {deg_den}) needs order at least {need}, series has order {order}")]
    InsufficientOrder {
        deg_num: usize,
        deg_den: usize,
        need: usize,
        order: usize,
    },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes at t = 0 after reduction")]
    NotAPowerSeries,
    #[error("the zero function has no Laurent expansion")]
    ZeroFunction,
    #[error("strip_sign_ppower of zero")]
    ZeroInput,
    #[error("base change degree must be positive")]
    ZeroDegree,
}

/// Spare coefficients a reconstructed rational function must additionally
/// match.
pub const DEFAULT_GUARD: usize = 2;

/// `c_0 + c_1 t + ... + c_m t^m + O(t^{m+1})`.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSeries<F> {
    coeffs: Vec<F>,
}

pub type PowerSeriesQ = PowerSeries<BigRational>;

impl<F: ExactField> PowerSeries<F> {
    /// Truncation order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<F>) -> Self {
        assert!(!coeffs.is_empty(), "a power series keeps at least c_0");
        PowerSeries { coeffs }
    }

    pub fn from_poly(p: &Poly<F>, order: usize) -> Self {
        PowerSeries::new((0..=order).map(|k| p.coeff(k)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &F {
        &self.coeffs[k]
    }

    pub fn truncate(&self, order: usize) -> Self {
        PowerSeries::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        PowerSeries::new(
            (0..=m)
                .map(|k| self.coeffs[k].clone() + other.coeffs[k].clone())
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        PowerSeries::new(
            (0..=m)
                .map(|k| {
                    (0..=k).fold(F::zero(), |acc, i| {
                        acc + self.coeffs[i].clone() * other.coeffs[k - i].clone()
                    })
                })
                .collect(),
        )
    }

    /// Multiplicative inverse; `None` if `c_0 = 0`.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return None;
        }
        let mut out: Vec<F> = vec![F::one() / c0.clone()];
        for k in 1..=self.order() {
            let s = (1..=k).fold(F::zero(), |acc, i| {
                acc + self.coeffs[i].clone() * out[k - i].clone()
            });
            out.push(-s / c0.clone());
        }
        Some(PowerSeries::new(out))
    }

    /// `p(t) * self` truncated to this order.
    pub fn mul_poly(&self, p: &Poly<F>) -> Self {
        self.mul(&PowerSeries::from_poly(p, self.order()))
    }
}

impl<F: ExactField + std::fmt::Display> std::fmt::Debug for PowerSeries<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = Poly::new(self.coeffs.clone());
        write!(f, "{p} + O(t^{})", self.order() + 1)
    }
}

/// `exp(sum_n N_n t^n / n)` to order `m = counts.len()`, via
/// `n c_n = sum_{k=1}^{n} N_k c_{n-k}`. Every coefficient must be integral.
pub fn zeta_series(counts: &[BigInt]) -> Result<PowerSeriesQ, ZetaError> {
    if counts.is_empty() {
        return Err(ZetaError::EmptyCounts);
    }
    if let Some(n) = counts.iter().position(|c| c.is_negative()) {
        return Err(ZetaError::NegativeCount { n: n + 1 });
    }
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=counts.len() {
        let s: BigInt = (1..=n).map(|k| &counts[k - 1] * &c[n - k]).sum();
        let (q, r) = s.div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(ZetaError::NonIntegralSeries { index: n });
        }
        c.push(q);
    }
    Ok(PowerSeries::new(c.into_iter().map(serial::int_rat).collect()))
}

/// `prod_d (1 - t^d)^(-a_d)` to order `m`, from `census[d-1] = a_d`.
pub fn euler_product_check(census: &[BigInt], m: usize) -> Result<PowerSeriesQ, ZetaError> {
    if census.len() < m {
        return Err(ZetaError::InsufficientCensus {
            have: census.len(),
            need: m,
        });
    }
    let mut acc = vec![BigInt::zero(); m + 1];
    acc[0] = BigInt::one();
    for (i, a) in census.iter().take(m).enumerate() {
        let d = i + 1;
        if a.is_zero() {
            continue;
        }
        // (1 - t^d)^(-a) = sum_k binom(a + k - 1, k) t^{dk}
        let mut factor = vec![BigInt::zero(); m + 1];
        let mut binom = BigInt::one();
        let mut k = 0usize;
        while d * k <= m {
            factor[d * k] = binom.clone();
            k += 1;
            binom = binom * (a + BigInt::from(k - 1)) / BigInt::from(k);
        }
        acc = (0..=m)
            .map(|n| (0..=n).map(|j| &acc[j] * &factor[n - j]).sum())
            .collect();
    }
    Ok(PowerSeries::new(acc.into_iter().map(serial::int_rat).collect()))
}

/// `num / den` in lowest terms with `den(0) = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction<F> {
    num: Poly<F>,
    den: Poly<F>,
}

pub type RationalFunctionQ = RationalFunction<BigRational>;

impl<F: ExactField> RationalFunction<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self, ZetaError> {
        if den.is_zero() {
            return Err(ZetaError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                num,
                den: Poly::one(),
            });
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let d0 = den.coeff(0);
        if d0.is_zero() {
            return Err(ZetaError::NotAPowerSeries);
        }
        let inv = F::one() / d0;
        Ok(RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunction::from_poly(Poly::one())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn series(&self, order: usize) -> PowerSeries<F> {
        let inv = PowerSeries::from_poly(&self.den, order)
            .inverse()
            .expect("den(0) = 1");
        inv.mul_poly(&self.num)
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den)
            .expect("product of normalized functions")
    }

    /// `None` for the zero function or when `num(0) = 0`.
    pub fn inverse(&self) -> Option<Self> {
        RationalFunction::new(self.den.clone(), self.num.clone()).ok()
    }

    pub fn powi(&self, k: i32) -> Option<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        Some(RationalFunction {
            num: base.num.pow(k.unsigned_abs()),
            den: base.den.pow(k.unsigned_abs()),
        })
    }

    /// `Z(t^e)`.
    pub fn base_change(&self, e: usize) -> Result<Self, ZetaError> {
        if e == 0 {
            return Err(ZetaError::ZeroDegree);
        }
        Ok(RationalFunction {
            num: self.num.substitute_power(e),
            den: self.den.substitute_power(e),
        })
    }

    /// Order of vanishing and leading coefficient at `t0`, found by exact
    /// division by `(t - t0)`: `Z = c (t - t0)^order (1 + O(t - t0))`.
    pub fn laurent_at(&self, t0: &F) -> Result<LaurentData<F>, ZetaError> {
        if self.is_zero() {
            return Err(ZetaError::ZeroFunction);
        }
        let lin = Poly::linear(-t0.clone(), F::one());
        let strip = |mut p: Poly<F>| -> (i64, Poly<F>) {
            let mut k = 0;
            while let Some(q) = p.div_exact(&lin) {
                p = q;
                k += 1;
            }
            (k, p)
        };
        let (kn, n) = strip(self.num.clone());
        let (kd, d) = strip(self.den.clone());
        Ok(LaurentData {
            point: t0.clone(),
            order: kn - kd,
            leading: n.eval(t0) / d.eval(t0),
        })
    }
}

impl RationalFunctionQ {
    /// All coefficients of `num` and `den` are integers.
    pub fn is_integral(&self) -> bool {
        self.num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .all(|c| c.is_integer())
    }

    pub fn from_int_coeffs(num: &[i64], den: &[i64]) -> Result<Self, ZetaError> {
        let p = |cs: &[i64]| Poly::new(cs.iter().map(|&c| serial::int_rat(c)).collect());
        RationalFunction::new(p(num), p(den))
    }
}

impl<F: ExactField + std::fmt::Display> std::fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalFunctionRepr {
    #[serde(with = "serial::rational_vec")]
    num: Vec<BigRational>,
    #[serde(with = "serial::rational_vec")]
    den: Vec<BigRational>,
}

impl Serialize for RationalFunctionQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalFunctionRepr {
            num: self.num.coeffs().to_vec(),
            den: self.den.coeffs().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunctionQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RationalFunctionRepr::deserialize(d)?;
        RationalFunction::new(Poly::new(r.num), Poly::new(r.den))
            .map_err(serde::de::Error::custom)
    }
}

/// `Z(t) = leading * (t - point)^order * (1 + O(t - point))`; poles have
/// negative order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentData<F> {
    pub point: F,
    pub order: i64,
    pub leading: F,
}

pub type LaurentQ = LaurentData<BigRational>;

#[derive(Serialize)]
struct LaurentRepr<'a> {
    #[serde(with = "serial::rational")]
    point: &'a BigRational,
    order: i64,
    #[serde(with = "serial::rational")]
    leading: &'a BigRational,
}

impl Serialize for LaurentQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LaurentRepr {
            point: &self.point,
            order: self.order,
            leading: &self.leading,
        }
        .serialize(s)
    }
}

/// `q^{-r}` as an exact rational.
pub fn special_point(q: &BigInt, r: i64) -> BigRational {
    let qr = num_traits::pow(q.clone(), r.unsigned_abs() as usize);
    if r >= 0 {
        BigRational::new(BigInt::one(), qr)
    } else {
        serial::int_rat(qr)
    }
}

/// `zeta_X(r)^*`: the Laurent data of `Z` at `t = q^{-r}`.
pub fn special_value(z: &RationalFunctionQ, q: &BigInt, r: i64) -> Result<LaurentQ, ZetaError> {
    z.laurent_at(&special_point(q, r))
}

pub fn base_change(z: &RationalFunctionQ, e: usize) -> Result<RationalFunctionQ, ZetaError> {
    z.base_change(e)
}

/// `p`-adic valuation of a nonzero integer.
fn valuation(mut n: BigInt, p: &BigInt) -> (i64, BigInt) {
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

/// `|x| p^{-v_p(x)}`: the representative of `x` modulo signs and powers of `p`.
pub fn strip_sign_ppower(x: &BigRational, p: u64) -> Result<BigRational, ZetaError> {
    if x.is_zero() {
        return Err(ZetaError::ZeroInput);
    }
    let p = BigInt::from(p);
    let (_, n) = valuation(x.numer().abs(), &p);
    let (_, d) = valuation(x.denom().abs(), &p);
    Ok(BigRational::new(n, d))
}

/// Rational function matching `series` to its full order.
///
/// Without a bound the shortest linear recurrence is found by
/// Berlekamp–Massey and accepted only if the reduced fit leaves at least
/// `guard` coefficients unused, i.e. `deg num + deg den <= m - guard`.
/// With a bound `(deg_num, deg_den)` the Padé system is solved directly.
pub fn reconstruct_rational<F: ExactField>(
    series: &PowerSeries<F>,
    bound: Option<(usize, usize)>,
    guard: usize,
) -> Result<RationalFunction<F>, ZetaError> {
    let m = series.order();
    let not_stable = ZetaError::NotStabilized { order: m, guard };
    let (den, num_len) = match bound {
        None => berlekamp_massey(series.coeffs()),
        Some((dn, dd)) => {
            let need = dn + dd + guard;
            if m < need {
                return Err(ZetaError::InsufficientOrder {
                    deg_num: dn,
                    deg_den: dd,
                    need,
                    order: m,
                });
            }
            let den = pade_denominator(series.coeffs(), dn, dd).ok_or(not_stable.clone())?;
            (den, dn + 1)
        }
    };
    // Coefficients of series * den past the numerator must vanish.
    let prod = series.mul_poly(&den);
    let num = Poly::new(prod.coeffs()[..num_len.min(m + 1)].to_vec());
    if prod.coeffs()[num_len.min(m + 1)..].iter().any(|c| !c.is_zero()) {
        return Err(not_stable);
    }
    let f = RationalFunction::new(num, den)?;
    let dn = f.num.degree().unwrap_or(0);
    let dd = f.den.degree().unwrap_or(0);
    if bound.is_none() && dn + dd + guard > m {
        return Err(not_stable);
    }
    if f.series(m) != *series {
        return Err(not_stable);
    }
    Ok(f)
}

/// Connection polynomial `C` with `C(0) = 1` and length `L` of the shortest
/// linear recurrence generating `s`.
fn berlekamp_massey<F: ExactField>(s: &[F]) -> (Poly<F>, usize) {
    let mut c: Vec<F> = vec![F::one()];
    let mut b: Vec<F> = vec![F::one()];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = F::one();
    for n in 0..s.len() {
        let d = (0..=l.min(c.len() - 1)).fold(F::zero(), |acc, i| {
            acc + c[i].clone() * s[n - i].clone()
        });
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = d.clone() / last.clone();
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, F::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].clone() - coef.clone() * bi.clone();
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = c;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
        c = next;
    }
    (Poly::new(c), l)
}

/// `D` of degree `<= dd` with `D(0) = 1` and `(S D)_n = 0` for
/// `dn < n <= dn + dd`; free unknowns are set to zero.
fn pade_denominator<F: ExactField>(s: &[F], dn: usize, dd: usize) -> Option<Poly<F>> {
    let at = |k: isize| -> F {
        if k < 0 {
            F::zero()
        } else {
            s[k as usize].clone()
        }
    };
    // Row n: sum_{j=1}^{dd} d_j s_{n-j} = -s_n.
    let mut rows: Vec<Vec<F>> = (dn + 1..=dn + dd)
        .map(|n| {
            let mut row: Vec<F> = (1..=dd).map(|j| at(n as isize - j as isize)).collect();
            row.push(-at(n as isize));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..dd {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[dd].is_zero()) {
        return None;
    }
    let mut d = vec![F::zero(); dd + 1];
    d[0] = F::one();
    for (i, &col) in pivots.iter().enumerate() {
        d[col + 1] = rows[i][dd].clone();
    }
    Some(Poly::new(d))
}
