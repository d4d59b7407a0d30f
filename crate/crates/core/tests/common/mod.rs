//! Random instance generators and small independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use zetareg::abgroup::{
    direct_sum, kernel_basis, sum_map, ComplexMap, FGAbGroup, FGComplex, FGMap, IntMatrix, ShortExactRow,
    SnakeDiagram,
};
use zetareg::weight::{Face, SNCConfig};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

// ---------------------------------------------------------------------------
// Oracles on plain row vectors, independent of the library's matrix code.

pub fn rows_of(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Fraction-free Bareiss elimination.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `det(m) m^{-1}` by cofactors.
pub fn adjugate(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let minor = |r: usize, c: usize| -> Vec<Vec<BigInt>> {
        m.iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
            .collect()
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = det(&minor(j, i));
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect()
        })
        .collect()
}

/// `χ(f)` through the torsion/free filtration: `#B_tor / #A_tor` times the
/// determinant of the induced map on free quotients. Requires equal free
/// ranks.
pub fn chi_oracle(f: &FGMap) -> Option<BigRational> {
    let src = &f.source;
    let tgt = &f.target;
    if src.free_rank() != tgt.free_rank() {
        return None;
    }
    let free_cols: Vec<usize> = (0..src.ngens()).filter(|&j| src.gen_order(j).is_zero()).collect();
    let free_rows: Vec<usize> = (0..tgt.ngens()).filter(|&i| tgt.gen_order(i).is_zero()).collect();
    let block: Vec<Vec<BigInt>> = free_rows
        .iter()
        .map(|&i| free_cols.iter().map(|&j| f.matrix[(i, j)].clone()).collect())
        .collect();
    let d = det(&block).abs();
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(d * tgt.torsion_order(), src.torsion_order()))
}

// ---------------------------------------------------------------------------
// Groups and maps.

/// Small group with `free` free generators and at most `max_torsion` cyclic
/// torsion summands.
pub fn random_group(r: &mut impl Rng, free: usize, max_torsion: usize) -> FGAbGroup {
    const ORDERS: [i64; 8] = [2, 3, 4, 5, 6, 8, 9, 12];
    let k = r.gen_range(0..=max_torsion);
    let orders: Vec<BigInt> = (0..k).map(|_| big(ORDERS[r.gen_range(0..ORDERS.len())])).collect();
    FGAbGroup::from_orders(free, &orders)
}

/// A random homomorphism: free targets receive nothing from torsion, and a
/// torsion generator of order `n` lands in multiples of `m / gcd(m, n)` in a
/// summand of order `m`.
pub fn random_map(r: &mut impl Rng, src: &FGAbGroup, tgt: &FGAbGroup, bound: i64) -> FGMap {
    let m = IntMatrix::from_fn(tgt.ngens(), src.ngens(), |_, _| BigInt::zero());
    let mut m = m;
    for i in 0..tgt.ngens() {
        let oi = tgt.gen_order(i);
        for j in 0..src.ngens() {
            let oj = src.gen_order(j);
            let x = big(r.gen_range(-bound..=bound));
            m[(i, j)] = match (oi.is_zero(), oj.is_zero()) {
                (true, true) => x,
                (true, false) => BigInt::zero(),
                (false, true) => x,
                (false, false) => x * (&oi / oi.gcd(&oj)),
            };
        }
    }
    FGMap::new(src.clone(), tgt.clone(), m).expect("generated map respects generator orders")
}

/// A random map with finite kernel and cokernel between groups of equal free
/// rank; retried until the free block is nonsingular.
pub fn random_fq_map(r: &mut impl Rng, src: &FGAbGroup, tgt: &FGAbGroup, bound: i64) -> FGMap {
    loop {
        let f = random_map(r, src, tgt, bound);
        if chi_oracle(&f).is_some() {
            return f;
        }
    }
}

/// `0 -> A -> A+C -> C -> 0` on both rows, with `g = [[f, x], [0, h]]`.
pub fn random_snake(r: &mut impl Rng, bound: i64) -> SnakeDiagram {
    let fa = r.gen_range(0..=2);
    let fc = r.gen_range(0..=2);
    let a = random_group(r, fa, 1);
    let c = random_group(r, fc, 1);
    let a2 = random_group(r, fa, 1);
    let c2 = random_group(r, fc, 1);
    let top = direct_sum(&[a.clone(), c.clone()]);
    let bottom = direct_sum(&[a2.clone(), c2.clone()]);
    let f = random_fq_map(r, &a, &a2, bound);
    let h = random_fq_map(r, &c, &c2, bound);
    let x = random_map(r, &c, &a2, bound);
    let g = sum_map(&top, &bottom, &[vec![Some(&f), Some(&x)], vec![None, Some(&h)]]).expect("block map");
    SnakeDiagram {
        top: ShortExactRow {
            first: top.inclusions[0].clone(),
            second: top.projections[1].clone(),
        },
        bottom: ShortExactRow {
            first: bottom.inclusions[0].clone(),
            second: bottom.projections[1].clone(),
        },
        f,
        g,
        h,
    }
}

fn to_matrix(rows: &[Vec<BigInt>], cols: usize) -> IntMatrix {
    IntMatrix::from_rows(rows.to_vec(), cols)
}

fn random_rows(r: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> Vec<Vec<BigInt>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| big(r.gen_range(-bound..=bound))).collect())
        .collect()
}

fn nonsingular(r: &mut impl Rng, n: usize, bound: i64) -> Vec<Vec<BigInt>> {
    loop {
        let m = random_rows(r, n, n, bound);
        if !det(&m).is_zero() {
            return m;
        }
    }
}

/// A chain map between three-term complexes of free groups whose components
/// are injective with finite cokernel, together with `prod_i |det f_i|^{(-1)^i}`.
///
/// Source `C_2 -> C_1 -> C_0` is random with `d_1 d_2 = 0`; with `α_i`
/// nonsingular, `f_2 = α_2`, `f_1 = det(α_2) α_1`, `f_0 = det(f_1) α_0` and
/// target differentials `α_1 d_2 adj(α_2)`, `α_0 d_1 adj(f_1)` the squares
/// commute.
pub fn random_chain_map(r: &mut impl Rng, bound: i64) -> (ComplexMap, BigRational) {
    let n: Vec<usize> = (0..3).map(|_| r.gen_range(1..=3)).collect();
    let d2 = random_rows(r, n[1], n[2], bound);
    let d2m = to_matrix(&d2, n[2]);
    let left = kernel_basis(&d2m.transpose()).transpose();
    let coeffs = random_rows(r, n[0], left.rows(), bound);
    let d1 = if left.rows() == 0 {
        vec![vec![BigInt::zero(); n[1]]; n[0]]
    } else {
        mat_mul(&coeffs, &rows_of(&left), left.rows(), n[1])
    };
    let alpha: Vec<Vec<Vec<BigInt>>> = (0..3).map(|i| nonsingular(r, n[i], bound.min(5))).collect();
    let f2 = alpha[2].clone();
    let det2 = det(&f2);
    let f1: Vec<Vec<BigInt>> = alpha[1].iter().map(|row| row.iter().map(|x| x * &det2).collect()).collect();
    let det1 = det(&f1);
    let f0: Vec<Vec<BigInt>> = alpha[0].iter().map(|row| row.iter().map(|x| x * &det1).collect()).collect();
    let e2 = mat_mul(&mat_mul(&alpha[1], &d2, n[1], n[2]), &adjugate(&f2), n[2], n[2]);
    let e1 = mat_mul(&mat_mul(&alpha[0], &d1, n[0], n[1]), &adjugate(&f1), n[1], n[1]);

    let free = |k: usize| FGAbGroup::free(k);
    let map = |s: usize, t: usize, m: &[Vec<BigInt>]| FGMap::new(free(s), free(t), to_matrix(m, s)).expect("free map");
    let src = FGComplex::new(0, vec![free(n[0]), free(n[1]), free(n[2])], vec![map(n[1], n[0], &d1), map(n[2], n[1], &d2)])
        .expect("d1 d2 = 0 by construction");
    let tgt = FGComplex::new(0, vec![free(n[0]), free(n[1]), free(n[2])], vec![map(n[1], n[0], &e1), map(n[2], n[1], &e2)])
        .expect("target differentials compose to zero");
    let comps = vec![map(n[0], n[0], &f0), map(n[1], n[1], &f1), map(n[2], n[2], &f2)];
    let cm = ComplexMap::new(&src, &tgt, 0, comps).expect("squares commute by construction");
    let d = [det(&f0).abs(), det(&f1).abs(), det(&f2).abs()];
    let expected = BigRational::new(&d[0] * &d[2], d[1].clone());
    (cm, expected)
}

// ---------------------------------------------------------------------------
// Normal crossing configurations.

/// Random valid configuration: `components <= 5` divisors, `dim <= 3`, a
/// downward closed family of intersections `Y_S` (`|S| <= dim`), each with
/// `m_S ∈ {1, 2}` connected pieces, `m` non-decreasing along inclusions.
/// Piece `c` of `Y_S` lies in piece `min(c, m_T - 1)` of `Y_T`.
pub fn random_snc(r: &mut impl Rng) -> SNCConfig {
    let dim = r.gen_range(0..=3usize);
    let n = r.gen_range(1..=5usize);
    let mut mult: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    mult.insert(Vec::new(), 1);
    if dim >= 1 {
        for v in 0..n {
            mult.insert(vec![v], 1);
        }
    }
    for size in 2..=dim {
        let prev: BTreeSet<Vec<usize>> = mult.keys().filter(|s| s.len() == size - 1).cloned().collect();
        for s in subsets(n, size) {
            let faces: Vec<Vec<usize>> = (0..size).map(|j| drop_at(&s, j)).collect();
            if faces.iter().all(|t| prev.contains(t)) && r.gen_bool(0.6) {
                let floor = faces.iter().map(|t| mult[t]).max().unwrap_or(1);
                let m = if floor == 2 || r.gen_bool(0.6) { floor } else { 2 };
                mult.insert(s, m);
            }
        }
    }
    let id = |s: &[usize], c: usize| -> String {
        let body: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        format!("[{}]#{c}", body.join(","))
    };
    let top = mult.keys().map(Vec::len).max().unwrap_or(0);
    let mut levels = vec![Vec::new(); top + 1];
    let mut faces = Vec::new();
    for (s, &m) in &mult {
        for c in 0..m {
            levels[s.len()].push(id(s, c));
            for j in 0..s.len() {
                let t = drop_at(s, j);
                faces.push(Face {
                    from: id(s, c),
                    drop: j,
                    to: id(&t, c.min(mult[&t] - 1)),
                });
            }
        }
    }
    SNCConfig::new(dim, levels, faces).expect("generator produces valid incidence")
}

fn drop_at(s: &[usize], j: usize) -> Vec<usize> {
    let mut t = s.to_vec();
    t.remove(j);
    t
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}
