//! Finite fields `F_{p^e}` as `F_p[x]/(m(x))`.
//!
//! The modulus `m` is the lexicographically least monic irreducible of degree
//! `e`, comparing coefficient vectors from the constant term upwards. That
//! makes [`build_field`] a pure function of `(p, e)`; moduli never need to be
//! stored anywhere.
//!
//! Two layers of arithmetic are provided:
//!
//! * [`FFElem`]: a value type holding a dense coefficient vector and a shared
//!   [`FieldDesc`]. Checked, allocation-heavy, used for the public API.
//! * [`FieldArith`]: the arithmetic interface used by the point counter. Field
//!   elements are plain `u64` indices `sum c_i p^i`. [`DenseArith`] computes
//!   directly on coefficient digits; [`LogTableArith`] uses discrete log/exp
//!   tables. Either can be swapped in behind the counter.

use std::sync::Arc;

use thiserror::Error;

/// Default cap on the number of candidate points a single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ZETAREG_BUDGET";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {size} exceeds the enumeration budget {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("coefficient vector of length {got} does not fit a degree-{degree} field")]
    BadCoefficients { got: usize, degree: u32 },
}

/// Enumeration budget in candidate points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Reads [`BUDGET_ENV`], falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().replace('_', "").parse().ok())
            .map(Budget)
            .unwrap_or_default()
    }

    pub fn allows(&self, cost: u128) -> bool {
        cost <= self.0 as u128
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomials over `F_p` as coefficient vectors, low degree first.
mod fp_poly {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or(0);
                    let y = b.get(i).copied().unwrap_or(0);
                    (x + p - y) % p
                })
                .collect(),
        )
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    pub fn inv_mod_p(x: u64, p: u64) -> u64 {
        pow_mod_p(x, p - 2, p)
    }

    pub fn pow_mod_p(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (j, &mj) in m.iter().enumerate() {
                r[k + j] = (r[k + j] + p - c * mj % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    /// `x^(p^k) mod m` by repeated p-th powering.
    pub fn frobenius_x(k: u32, m: &[u64], p: u64) -> Vec<u64> {
        let mut x = rem(&[0, 1], m, p);
        for _ in 0..k {
            x = powmod(&x, p, m, p);
        }
        x
    }

    pub fn powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }
}

/// Rabin's irreducibility test for a monic `m` of degree `e` over `F_p`.
pub fn is_irreducible(m: &[u64], p: u64) -> bool {
    let e = match m.len().checked_sub(1) {
        Some(e) if e >= 1 => e as u32,
        _ => return false,
    };
    if e == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let full = fp_poly::frobenius_x(e, m, p);
    if fp_poly::sub(&full, &fp_poly::rem(&x, m, p), p) != Vec::<u64>::new() {
        return false;
    }
    for r in prime_factors(e as u64) {
        let h = fp_poly::frobenius_x(e / r as u32, m, p);
        let g = fp_poly::gcd(m, &fp_poly::sub(&h, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// An immutable description of `F_{p^e}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    p: u64,
    e: u32,
    /// Monic, `e + 1` entries, constant term first.
    modulus: Vec<u64>,
}

impl FieldDesc {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `p^e`, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        (self.p as u128).saturating_pow(self.e)
    }

    pub fn elem(self: &Arc<Self>, coeffs: &[u64]) -> Result<FFElem, FieldError> {
        if coeffs.len() > self.e as usize {
            return Err(FieldError::BadCoefficients {
                got: coeffs.len(),
                degree: self.e,
            });
        }
        let mut v: Vec<u64> = coeffs.iter().map(|c| c % self.p).collect();
        v.resize(self.e as usize, 0);
        Ok(FFElem {
            field: Arc::clone(self),
            coeffs: v,
        })
    }

    pub fn zero(self: &Arc<Self>) -> FFElem {
        FFElem {
            field: Arc::clone(self),
            coeffs: vec![0; self.e as usize],
        }
    }

    pub fn one(self: &Arc<Self>) -> FFElem {
        let mut coeffs = vec![0; self.e as usize];
        coeffs[0] = 1;
        FFElem {
            field: Arc::clone(self),
            coeffs,
        }
    }

    /// The class of `x`; a prime field has `x = 0` under the modulus `x`.
    pub fn generator(self: &Arc<Self>) -> FFElem {
        let reduced = fp_poly::rem(&[0, 1], &self.modulus, self.p);
        self.elem(&reduced).expect("reduced below degree e")
    }
}

/// Constructs `F_{p^e}` with its canonical modulus.
pub fn build_field(p: u64, e: u32) -> Result<Arc<FieldDesc>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if e == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let n = e as usize;
    // Counter over (c_0, ..., c_{e-1}) with c_0 most significant.
    let mut low = vec![0u64; n];
    loop {
        let mut m = low.clone();
        m.push(1);
        if is_irreducible(&m, p) {
            return Ok(Arc::new(FieldDesc { p, e, modulus: m }));
        }
        let mut i = n;
        loop {
            // A monic irreducible of every degree exists, so this never runs off the end.
            i -= 1;
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
        }
    }
}

/// An element of a finite field as a dense coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FFElem {
    field: Arc<FieldDesc>,
    coeffs: Vec<u64>,
}

impl FFElem {
    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &FFElem) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    fn with(&self, coeffs: Vec<u64>) -> FFElem {
        let mut coeffs = coeffs;
        coeffs.resize(self.field.e as usize, 0);
        FFElem {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn add(&self, other: &FFElem) -> Result<FFElem, FieldError> {
        self.check(other)?;
        let p = self.field.p;
        Ok(self.with(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a + b) % p)
                .collect(),
        ))
    }

    pub fn neg(&self) -> FFElem {
        let p = self.field.p;
        self.with(self.coeffs.iter().map(|a| (p - a) % p).collect())
    }

    pub fn sub(&self, other: &FFElem) -> Result<FFElem, FieldError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FFElem) -> Result<FFElem, FieldError> {
        self.check(other)?;
        let f = &self.field;
        Ok(self.with(fp_poly::mulmod(
            &self.coeffs,
            &other.coeffs,
            &f.modulus,
            f.p,
        )))
    }

    pub fn pow(&self, e: u64) -> FFElem {
        let f = &self.field;
        self.with(fp_poly::powmod(&self.coeffs, e, &f.modulus, f.p))
    }

    /// Multiplicative inverse via `x^(q-2)`.
    pub fn inv(&self) -> Result<FFElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let q = self.field.order();
        Ok(self.pow((q - 2) as u64))
    }
}

/// All `p^e` elements, coefficient vectors in lexicographic order (constant
/// term compared first).
pub fn enumerate(field: &Arc<FieldDesc>, budget: Budget) -> Result<Vec<FFElem>, FieldError> {
    let size = field.order();
    if !budget.allows(size) {
        return Err(FieldError::BudgetExceeded {
            size,
            budget: budget.0,
        });
    }
    let n = field.e as usize;
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![0u64; n];
    for _ in 0..size {
        out.push(field.elem(&cur).expect("length e"));
        for i in (0..n).rev() {
            cur[i] += 1;
            if cur[i] < field.p {
                break;
            }
            cur[i] = 0;
        }
    }
    Ok(out)
}

/// Arithmetic on field elements encoded as `u64` indices `sum c_i p^i`.
///
/// This is the interface the point counter is written against. Index `0` is
/// zero and index `1` is one in every implementation.
pub trait FieldArith: Sync {
    fn desc(&self) -> &FieldDesc;

    fn order(&self) -> u64 {
        self.desc().order() as u64
    }

    fn add(&self, a: u64, b: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    fn neg(&self, a: u64) -> u64;

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn encode(&self, coeffs: &[u64]) -> u64 {
        let p = self.desc().p;
        coeffs.iter().rev().fold(0, |acc, &c| acc * p + c % p)
    }

    fn decode(&self, mut idx: u64) -> Vec<u64> {
        let d = self.desc();
        (0..d.e)
            .map(|_| {
                let c = idx % d.p;
                idx /= d.p;
                c
            })
            .collect()
    }
}

const MAX_DIGITS: usize = 64;

fn digit_add(p: u64, e: u32, mut a: u64, mut b: u64) -> u64 {
    if e == 1 {
        return (a + b) % p;
    }
    if p == 2 {
        return a ^ b;
    }
    let mut out = 0;
    let mut place = 1;
    for _ in 0..e {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn digit_neg(p: u64, e: u32, mut a: u64) -> u64 {
    if p == 2 {
        return a;
    }
    let mut out = 0;
    let mut place = 1;
    for _ in 0..e {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}

/// Schoolbook multiplication on digits, reduced by the modulus.
#[derive(Debug, Clone)]
pub struct DenseArith {
    desc: Arc<FieldDesc>,
}

impl DenseArith {
    pub fn new(desc: Arc<FieldDesc>) -> Self {
        assert!((desc.e as usize) <= MAX_DIGITS / 2, "extension degree too large");
        DenseArith { desc }
    }
}

impl FieldArith for DenseArith {
    fn desc(&self) -> &FieldDesc {
        &self.desc
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        digit_add(self.desc.p, self.desc.e, a, b)
    }

    fn neg(&self, a: u64) -> u64 {
        digit_neg(self.desc.p, self.desc.e, a)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let (p, e) = (self.desc.p, self.desc.e as usize);
        if e == 1 {
            return ((a as u128 * b as u128) % p as u128) as u64;
        }
        let mut da = [0u64; MAX_DIGITS];
        let mut db = [0u64; MAX_DIGITS];
        let (mut x, mut y) = (a, b);
        for i in 0..e {
            da[i] = x % p;
            db[i] = y % p;
            x /= p;
            y /= p;
        }
        let mut prod = [0u64; MAX_DIGITS];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        let m = &self.desc.modulus;
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            // modulus is monic: x^e = -(m_0 + ... + m_{e-1} x^{e-1})
            for j in 0..e {
                prod[k - e + j] = (prod[k - e + j] + (p - c) * m[j]) % p;
            }
            prod[k] = 0;
        }
        let mut out = 0;
        for i in (0..e).rev() {
            out = out * p + prod[i];
        }
        out
    }
}

/// Multiplication through discrete log/exp tables of a primitive element.
#[derive(Debug, Clone)]
pub struct LogTableArith {
    desc: Arc<FieldDesc>,
    /// `exp[k] = g^k` for `k` in `0..2(q-1)`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

/// Fields up to this size use [`LogTableArith`] in the counter.
pub const LOG_TABLE_LIMIT: u64 = 1 << 16;

impl LogTableArith {
    pub fn new(desc: Arc<FieldDesc>) -> Self {
        let dense = DenseArith::new(Arc::clone(&desc));
        let q = dense.order();
        assert!(q <= u32::MAX as u64, "field too large for log tables");
        let group = q - 1;
        let factors = prime_factors(group);
        let g = (2..q.max(2))
            .find(|&g| factors.iter().all(|&r| dense.pow(g, group / r) != 1))
            .unwrap_or(1);
        let mut exp = vec![0u32; (2 * group).max(1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for k in 0..group {
            exp[k as usize] = x as u32;
            exp[(k + group) as usize] = x as u32;
            log[x as usize] = k as u32;
            x = dense.mul(x, g);
        }
        LogTableArith { desc, exp, log }
    }
}

impl FieldArith for LogTableArith {
    fn desc(&self) -> &FieldDesc {
        &self.desc
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        digit_add(self.desc.p, self.desc.e, a, b)
    }

    fn neg(&self, a: u64) -> u64 {
        digit_neg(self.desc.p, self.desc.e, a)
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[k] as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: no monic factor of degree 1..=deg/2 divides `m`.
    fn irreducible_by_trial_division(m: &[u64], p: u64) -> bool {
        let deg = m.len() - 1;
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut f: Vec<u64> = (0..d).map(|i| idx / p.pow(i as u32) % p).collect();
                f.push(1);
                if fp_poly::rem(m, &f, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = build_field(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(enumerate(&f, Budget::default()).unwrap().len(), 2);
    }

    #[test]
    fn f4_modulus_matches_brute_force() {
        // x^2, x^2 + x, x^2 + 1 are reducible over F_2; x^2 + x + 1 is not.
        let monic_quadratics = [[0, 0, 1], [0, 1, 1], [1, 0, 1], [1, 1, 1]];
        let irreducible: Vec<_> = monic_quadratics
            .iter()
            .filter(|m| irreducible_by_trial_division(&m[..], 2))
            .collect();
        assert_eq!(irreducible, vec![&[1, 1, 1]]);
        assert_eq!(build_field(2, 2).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for (p, e) in [(2u64, 3u32), (2, 4), (3, 2), (3, 3), (5, 2)] {
            let count = p.pow(e);
            for idx in 0..count {
                let mut m: Vec<u64> = (0..e).map(|i| idx / p.pow(i) % p).collect();
                m.push(1);
                assert_eq!(
                    is_irreducible(&m, p),
                    irreducible_by_trial_division(&m, p),
                    "p={p} m={m:?}"
                );
            }
        }
    }

    #[test]
    fn not_prime_is_rejected() {
        assert_eq!(build_field(4, 1), Err(FieldError::NotPrime(4)));
        assert_eq!(build_field(3, 0), Err(FieldError::ZeroDegree));
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(build_field(3, 4).unwrap(), build_field(3, 4).unwrap());
    }

    #[test]
    fn inverse_in_f5() {
        let f = build_field(5, 1).unwrap();
        let two = f.elem(&[2]).unwrap();
        assert_eq!(two.inv().unwrap().coeffs(), &[3]);
        assert_eq!(f.zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn generator_of_f4_has_order_three() {
        let f = build_field(2, 2).unwrap();
        let x = f.generator();
        assert_eq!(x.pow(3), f.one());
        assert_eq!(x.pow(4), x);
    }

    #[test]
    fn add_neg_is_zero_and_mismatch_detected() {
        let f = build_field(3, 2).unwrap();
        let g = build_field(5, 1).unwrap();
        let a = f.elem(&[2, 1]).unwrap();
        assert!(a.add(&a.neg()).unwrap().is_zero());
        assert_eq!(a.add(&g.one()), Err(FieldError::FieldMismatch));
    }

    #[test]
    fn enumerate_sizes_and_budget() {
        let f9 = build_field(3, 2).unwrap();
        let all = enumerate(&f9, Budget::default()).unwrap();
        assert_eq!(all.len(), 9);
        let mut seen = std::collections::HashSet::new();
        assert!(all.iter().all(|x| seen.insert(x.coeffs().to_vec())));
        assert!(matches!(
            enumerate(&f9, Budget(8)),
            Err(FieldError::BudgetExceeded { size: 9, budget: 8 })
        ));
    }

    #[test]
    fn fermat_little_theorem_by_enumeration() {
        for (p, e) in [(2, 1), (2, 3), (3, 2), (7, 1), (5, 2), (2, 6)] {
            let f = build_field(p, e).unwrap();
            let q = f.order() as u64;
            for x in enumerate(&f, Budget::default()).unwrap() {
                if !x.is_zero() {
                    assert_eq!(x.pow(q - 1), f.one());
                    assert_eq!(x.mul(&x.inv().unwrap()).unwrap(), f.one());
                }
            }
        }
    }

    #[test]
    fn arith_backends_agree_with_ffelem() {
        for (p, e) in [(2, 4), (3, 3), (5, 2), (7, 1)] {
            let f = build_field(p, e).unwrap();
            let dense = DenseArith::new(Arc::clone(&f));
            let table = LogTableArith::new(Arc::clone(&f));
            let elems = enumerate(&f, Budget::default()).unwrap();
            for a in &elems {
                for b in &elems {
                    let (ia, ib) = (dense.encode(a.coeffs()), dense.encode(b.coeffs()));
                    let prod = dense.encode(a.mul(b).unwrap().coeffs());
                    let sum = dense.encode(a.add(b).unwrap().coeffs());
                    assert_eq!(dense.mul(ia, ib), prod);
                    assert_eq!(table.mul(ia, ib), prod);
                    assert_eq!(dense.add(ia, ib), sum);
                    assert_eq!(table.add(ia, ib), sum);
                }
                let ia = dense.encode(a.coeffs());
                assert_eq!(dense.neg(ia), dense.encode(a.neg().coeffs()));
                assert_eq!(dense.decode(ia), a.coeffs());
            }
        }
    }
}
