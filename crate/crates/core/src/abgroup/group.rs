//! Finitely generated abelian groups in invariant-factor form, maps between
//! them, and complexes.
//!
//! A canonical group `Z/d_1 + ... + Z/d_k + Z^r` has generators ordered
//! torsion first, then free. Elements are integer coordinate vectors in those
//! generators, torsion coordinates reduced into `[0, d_i)`. Every kernel,
//! cokernel, image and homology group is computed by one engine,
//! [`Subquotient`], which presents `L / N` for lattices `N ⊆ L ⊆ Z^n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::snf::{kernel_basis, snf};
use super::AbGroupError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct FGAbGroup {
    free: usize,
    torsion: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    free: usize,
    #[serde(with = "crate::serial::bigint_vec", default)]
    torsion: Vec<BigInt>,
}

impl TryFrom<GroupRepr> for FGAbGroup {
    type Error = AbGroupError;
    fn try_from(r: GroupRepr) -> Result<Self, AbGroupError> {
        FGAbGroup::new(r.free, r.torsion)
    }
}

impl From<FGAbGroup> for GroupRepr {
    fn from(g: FGAbGroup) -> Self {
        GroupRepr {
            free: g.free,
            torsion: g.torsion,
        }
    }
}

impl FGAbGroup {
    /// Checks the chain `d_1 | d_2 | ...` with every `d_i >= 2`.
    pub fn new(free: usize, torsion: Vec<BigInt>) -> Result<Self, AbGroupError> {
        if torsion.iter().any(|d| d < &BigInt::from(2)) {
            return Err(AbGroupError::InvalidGroup(format!(
                "invariant factors must be at least 2: {torsion:?}"
            )));
        }
        if torsion.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(AbGroupError::InvalidGroup(format!(
                "invariant factors do not form a divisibility chain: {torsion:?}"
            )));
        }
        Ok(FGAbGroup { free, torsion })
    }

    pub fn zero() -> Self {
        FGAbGroup::free(0)
    }

    pub fn free(rank: usize) -> Self {
        FGAbGroup {
            free: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: i64) -> Self {
        match n.unsigned_abs() {
            0 => FGAbGroup::free(1),
            1 => FGAbGroup::zero(),
            m => FGAbGroup {
                free: 0,
                torsion: vec![BigInt::from(m)],
            },
        }
    }

    /// The canonical form of an arbitrary `Z/n_1 + ... + Z/n_k + Z^r`.
    pub fn from_orders(free: usize, orders: &[BigInt]) -> Self {
        let rel = IntMatrix::diagonal(orders.len(), orders.len(), orders);
        let pres = FGAbGroup::presented(orders.len(), &rel);
        let mut g = pres;
        g.free += free;
        g
    }

    /// `Z^n / (column span of rel)`.
    pub fn presented(n: usize, rel: &IntMatrix) -> Self {
        assert_eq!(rel.rows(), n, "relation matrix has the wrong height");
        Subquotient::new(&IntMatrix::identity(n), rel).group
    }

    pub fn free_rank(&self) -> usize {
        self.free
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.free
    }

    pub fn is_zero(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free == 0
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn torsion_part(&self) -> FGAbGroup {
        FGAbGroup {
            free: 0,
            torsion: self.torsion.clone(),
        }
    }

    /// Order of generator `i`, zero for free generators.
    pub fn gen_order(&self, i: usize) -> BigInt {
        self.torsion.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn gen_orders(&self) -> Vec<BigInt> {
        (0..self.ngens()).map(|i| self.gen_order(i)).collect()
    }

    /// Columns `d_i e_i` for the torsion generators.
    pub fn relations(&self) -> IntMatrix {
        let n = self.ngens();
        let k = self.torsion.len();
        IntMatrix::from_fn(n, k, |i, j| {
            if i == j {
                self.torsion[i].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn reduce(&self, v: &mut [BigInt]) {
        for (x, d) in v.iter_mut().zip(&self.torsion) {
            *x = x.mod_floor(d);
        }
    }

    pub fn reduce_matrix(&self, m: &mut IntMatrix) {
        for (i, d) in self.torsion.iter().enumerate() {
            for j in 0..m.cols() {
                m[(i, j)] = m[(i, j)].mod_floor(d);
            }
        }
    }

    /// `self + other` in canonical form, with inclusions and projections.
    pub fn direct_sum(&self, other: &FGAbGroup) -> DirectSum {
        direct_sum(&[self.clone(), other.clone()])
    }
}

impl std::fmt::Display for FGAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `L / N` for lattices `N ⊆ L ⊆ Z^n`, given by generating columns.
#[derive(Debug, Clone)]
pub struct Subquotient {
    pub group: FGAbGroup,
    /// `n × ngens`: ambient representatives of the canonical generators.
    pub gens: IntMatrix,
    ambient: usize,
    /// Coordinates of `v ∈ L` in the lattice basis: `x_i = (u1 v)_i / d1_i`.
    u1: IntMatrix,
    d1: Vec<BigInt>,
    /// Canonical coordinates are rows `skip..` of `u2 x`.
    u2: IntMatrix,
    skip: usize,
}

impl Subquotient {
    /// The caller guarantees `N ⊆ L`; violations panic.
    pub fn new(l_gens: &IntMatrix, n_gens: &IntMatrix) -> Self {
        let n = l_gens.rows();
        assert_eq!(n_gens.rows(), n, "lattices live in different ambients");
        let s1 = snf(l_gens);
        let d1 = s1.invariants();
        let r = d1.len();
        // Basis b_i = d1_i * (column i of u1^{-1}).
        let basis = IntMatrix::from_fn(n, r, |i, j| &s1.u_inv[(i, j)] * &d1[j]);
        let mut sq = Subquotient {
            group: FGAbGroup::zero(),
            gens: IntMatrix::zeros(n, 0),
            ambient: n,
            u1: s1.u,
            d1,
            u2: IntMatrix::identity(r),
            skip: 0,
        };
        let x_cols: Vec<Vec<BigInt>> = (0..n_gens.cols())
            .map(|j| {
                sq.lattice_coords(&n_gens.col(j))
                    .expect("sublattice generator lies outside the lattice")
            })
            .collect();
        let x = IntMatrix::from_cols(x_cols, r);
        let s2 = snf(&x);
        let inv2 = s2.invariants();
        let skip = inv2.iter().take_while(|d| d.is_one()).count();
        let torsion = inv2[skip..].to_vec();
        let free = r - inv2.len();
        let gens_all = basis.mul(&s2.u_inv);
        let gens = gens_all.submatrix(0..n, skip..r);
        sq.group = FGAbGroup { free, torsion };
        sq.gens = gens;
        sq.u2 = s2.u;
        sq.skip = skip;
        sq
    }

    fn lattice_coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let uv = self.u1.mul_vec(v);
        let r = self.d1.len();
        if uv[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        uv[..r]
            .iter()
            .zip(&self.d1)
            .map(|(a, d)| a.is_multiple_of(d).then(|| a / d))
            .collect()
    }

    /// Canonical coordinates of the class of `v ∈ L`; `None` if `v ∉ L`.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient);
        let x = self.lattice_coords(v)?;
        let mut y = self.u2.mul_vec(&x).split_off(self.skip);
        self.group.reduce(&mut y);
        Some(y)
    }

    /// Matrix of the map induced by `f: ambient -> other.ambient` on the
    /// subquotients, assuming `f(L) ⊆ L'` and `f(N) ⊆ N'`.
    pub fn induced(&self, f: &IntMatrix, target: &Subquotient) -> Result<IntMatrix, AbGroupError> {
        let cols = (0..self.gens.cols())
            .map(|j| {
                target.coords(&f.mul_vec(&self.gens.col(j))).ok_or_else(|| {
                    AbGroupError::InvalidMap("map does not preserve the subquotient".into())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntMatrix::from_cols(cols, target.group.ngens()))
    }
}

/// A homomorphism given by its matrix on canonical generators: column `j` is
/// the image of source generator `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FGMap {
    pub source: FGAbGroup,
    pub target: FGAbGroup,
    pub matrix: IntMatrix,
}

impl FGMap {
    /// Checks shape and that each generator's order kills its image; torsion
    /// rows are reduced.
    pub fn new(source: FGAbGroup, target: FGAbGroup, mut matrix: IntMatrix) -> Result<Self, AbGroupError> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(AbGroupError::ShapeMismatch(format!(
                "matrix is {}×{}, map {} -> {} needs {}×{}",
                matrix.rows(),
                matrix.cols(),
                source,
                target,
                target.ngens(),
                source.ngens()
            )));
        }
        target.reduce_matrix(&mut matrix);
        for j in 0..source.ngens() {
            let d = source.gen_order(j);
            let mut image: Vec<BigInt> = matrix.col(j).iter().map(|x| x * &d).collect();
            target.reduce(&mut image);
            if image.iter().any(|x| !x.is_zero()) {
                return Err(AbGroupError::InvalidMap(format!(
                    "generator {j} of order {d} has an image of different order"
                )));
            }
        }
        Ok(FGMap {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: FGAbGroup, target: FGAbGroup) -> Self {
        let matrix = IntMatrix::zeros(target.ngens(), source.ngens());
        FGMap {
            source,
            target,
            matrix,
        }
    }

    pub fn identity(g: FGAbGroup) -> Self {
        let matrix = IntMatrix::identity(g.ngens());
        FGMap {
            source: g.clone(),
            target: g,
            matrix,
        }
    }

    pub fn scalar(g: FGAbGroup, n: i64) -> Self {
        FGMap::new(g.clone(), g.clone(), IntMatrix::identity(g.ngens()).scale(&BigInt::from(n)))
            .expect("multiplication by an integer is a homomorphism")
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w = self.matrix.mul_vec(v);
        self.target.reduce(&mut w);
        w
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FGMap) -> Result<FGMap, AbGroupError> {
        if self.target != other.source {
            return Err(AbGroupError::ShapeMismatch(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.source, self.target, other.source, other.target
            )));
        }
        FGMap::new(
            self.source.clone(),
            other.target.clone(),
            other.matrix.mul(&self.matrix),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn kernel_sq(&self) -> Subquotient {
        let rel_t = self.target.relations();
        let k = kernel_basis(&self.matrix.hstack(&rel_t));
        let n = self.source.ngens();
        let lattice = k.submatrix(0..n, 0..k.cols());
        Subquotient::new(&lattice, &self.source.relations())
    }

    pub fn cokernel_sq(&self) -> Subquotient {
        let m = self.target.ngens();
        Subquotient::new(
            &IntMatrix::identity(m),
            &self.matrix.hstack(&self.target.relations()),
        )
    }

    pub fn image_sq(&self) -> Subquotient {
        let rel_t = self.target.relations();
        Subquotient::new(&self.matrix.hstack(&rel_t), &rel_t)
    }

    pub fn kernel(&self) -> FGAbGroup {
        self.kernel_sq().group
    }

    pub fn cokernel(&self) -> FGAbGroup {
        self.cokernel_sq().group
    }

    pub fn image(&self) -> FGAbGroup {
        self.image_sq().group
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_zero()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// `(Ker f, Coker f)` in canonical form.
pub fn ker_coker(f: &FGMap) -> (FGAbGroup, FGAbGroup) {
    (f.kernel(), f.cokernel())
}

/// Canonical sum with structure maps.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub sum: FGAbGroup,
    pub inclusions: Vec<FGMap>,
    pub projections: Vec<FGMap>,
}

pub fn direct_sum(parts: &[FGAbGroup]) -> DirectSum {
    let n: usize = parts.iter().map(FGAbGroup::ngens).sum();
    let mut rel = IntMatrix::zeros(0, 0);
    for g in parts {
        let r = g.relations();
        rel = rel.block_diag(&r);
    }
    let sq = Subquotient::new(&IntMatrix::identity(n), &rel);
    let sum = sq.group.clone();
    let mut inclusions = Vec::new();
    let mut projections = Vec::new();
    let mut offset = 0;
    for g in parts {
        let k = g.ngens();
        let cols = (0..k)
            .map(|j| {
                let mut e = vec![BigInt::zero(); n];
                e[offset + j] = BigInt::one();
                sq.coords(&e).expect("summand generator lies in the sum")
            })
            .collect();
        let inc = IntMatrix::from_cols(cols, sum.ngens());
        inclusions.push(FGMap::new(g.clone(), sum.clone(), inc).expect("inclusion"));
        let proj = sq.gens.submatrix(offset..offset + k, 0..sum.ngens());
        projections.push(FGMap::new(sum.clone(), g.clone(), proj).expect("projection"));
        offset += k;
    }
    DirectSum {
        sum,
        inclusions,
        projections,
    }
}

/// Block matrix of a map `⊕ A_j -> ⊕ B_i` given by components `blocks[i][j]`
/// between the summands, expressed on the canonical generators of the sums.
pub fn sum_map(
    src: &DirectSum,
    tgt: &DirectSum,
    blocks: &[Vec<Option<&FGMap>>],
) -> Result<FGMap, AbGroupError> {
    let mut m = IntMatrix::zeros(tgt.sum.ngens(), src.sum.ngens());
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            if let Some(b) = b {
                let term = tgt.inclusions[i]
                    .matrix
                    .mul(&b.matrix)
                    .mul(&src.projections[j].matrix);
                m = m.add(&term);
            }
        }
    }
    FGMap::new(src.sum.clone(), tgt.sum.clone(), m)
}

/// Bounded chain complex, homological indexing: `diffs[k]` maps
/// `groups[k + 1]` (degree `lowest + k + 1`) to `groups[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FGComplex {
    lowest: i64,
    groups: Vec<FGAbGroup>,
    diffs: Vec<FGMap>,
}

impl FGComplex {
    pub fn new(lowest: i64, groups: Vec<FGAbGroup>, diffs: Vec<FGMap>) -> Result<Self, AbGroupError> {
        if diffs.len() + 1 != groups.len().max(1) || (groups.is_empty() && !diffs.is_empty()) {
            return Err(AbGroupError::ShapeMismatch(format!(
                "{} groups need {} differentials, got {}",
                groups.len(),
                groups.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.source != groups[k + 1] || d.target != groups[k] {
                return Err(AbGroupError::ShapeMismatch(format!(
                    "differential out of degree {} has the wrong endpoints",
                    lowest + k as i64 + 1
                )));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].then(&diffs[k - 1])?.is_zero() {
                return Err(AbGroupError::NotAComplex {
                    degree: lowest + k as i64 + 1,
                });
            }
        }
        Ok(FGComplex {
            lowest,
            groups,
            diffs,
        })
    }

    /// Builds a complex from differentials alone, `d_k: C_k -> C_{k-1}` for
    /// `k = lowest + 1, ...`.
    pub fn from_diffs(lowest: i64, diffs: Vec<FGMap>) -> Result<Self, AbGroupError> {
        let mut groups: Vec<FGAbGroup> = diffs.iter().map(|d| d.target.clone()).collect();
        match diffs.last() {
            Some(d) => groups.push(d.source.clone()),
            None => return Err(AbGroupError::ShapeMismatch("no differentials".into())),
        }
        FGComplex::new(lowest, groups, diffs)
    }

    pub fn concentrated(degree: i64, g: FGAbGroup) -> Self {
        FGComplex {
            lowest: degree,
            groups: vec![g],
            diffs: Vec::new(),
        }
    }

    pub fn lowest(&self) -> i64 {
        self.lowest
    }

    pub fn highest(&self) -> i64 {
        self.lowest + self.groups.len() as i64 - 1
    }

    /// Number of nonzero terms between the outermost nonzero terms.
    pub fn length(&self) -> usize {
        let first = self.groups.iter().position(|g| !g.is_zero());
        let last = self.groups.iter().rposition(|g| !g.is_zero());
        match (first, last) {
            (Some(a), Some(b)) => b - a + 1,
            _ => 0,
        }
    }

    pub fn groups(&self) -> &[FGAbGroup] {
        &self.groups
    }

    pub fn diffs(&self) -> &[FGMap] {
        &self.diffs
    }

    /// `C_i`, zero outside the stored range.
    pub fn group(&self, i: i64) -> FGAbGroup {
        self.index(i)
            .map(|k| self.groups[k].clone())
            .unwrap_or_else(FGAbGroup::zero)
    }

    fn index(&self, i: i64) -> Option<usize> {
        let k = i - self.lowest;
        (k >= 0 && (k as usize) < self.groups.len()).then_some(k as usize)
    }

    /// `d_i: C_i -> C_{i-1}` (zero map outside the stored range).
    pub fn diff(&self, i: i64) -> FGMap {
        match self.index(i).filter(|&k| k >= 1) {
            Some(k) => self.diffs[k - 1].clone(),
            None => FGMap::zero(self.group(i), self.group(i - 1)),
        }
    }

    /// The same complex stored on `[lo, hi]` (padding with zero groups).
    pub fn padded(&self, lo: i64, hi: i64) -> FGComplex {
        let lo = lo.min(self.lowest);
        let hi = hi.max(self.highest());
        let groups = (lo..=hi).map(|i| self.group(i)).collect();
        let diffs = (lo + 1..=hi).map(|i| self.diff(i)).collect();
        FGComplex {
            lowest: lo,
            groups,
            diffs,
        }
    }

    /// `Ker d_i / Im d_{i+1}` as a subquotient of the ambient of `C_i`.
    pub fn homology_sq(&self, i: i64) -> Subquotient {
        let ci = self.group(i);
        let ker = self.diff(i).kernel_sq();
        let lattice = ker.gens.hstack(&ci.relations());
        let d_next = self.diff(i + 1);
        Subquotient::new(&lattice, &d_next.matrix.hstack(&ci.relations()))
    }

    pub fn homology_at(&self, i: i64) -> FGAbGroup {
        self.homology_sq(i).group
    }

    /// `H_i` for `i = lowest..=highest`.
    pub fn homology(&self) -> Vec<FGAbGroup> {
        (self.lowest..=self.highest())
            .map(|i| self.homology_at(i))
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        self.homology().iter().all(FGAbGroup::is_zero)
    }

    pub fn map_groups(&self, f: impl Fn(&FGAbGroup) -> FGAbGroup) -> Vec<FGAbGroup> {
        self.groups.iter().map(f).collect()
    }
}

/// A chain map `f_i: C_i -> C'_i`, checked to commute with differentials.
#[derive(Debug, Clone)]
pub struct ComplexMap {
    pub source: FGComplex,
    pub target: FGComplex,
    lowest: i64,
    maps: Vec<FGMap>,
}

impl ComplexMap {
    /// `maps[k]` is the component in degree `lowest + k`; both complexes are
    /// padded to the common range.
    pub fn new(source: &FGComplex, target: &FGComplex, lowest: i64, maps: Vec<FGMap>) -> Result<Self, AbGroupError> {
        let hi = lowest + maps.len() as i64 - 1;
        let lo = lowest.min(source.lowest).min(target.lowest);
        let hi = hi.max(source.highest()).max(target.highest());
        let source = source.padded(lo, hi);
        let target = target.padded(lo, hi);
        let full: Vec<FGMap> = (lo..=hi)
            .map(|i| {
                let k = i - lowest;
                if k >= 0 && (k as usize) < maps.len() {
                    maps[k as usize].clone()
                } else {
                    FGMap::zero(source.group(i), target.group(i))
                }
            })
            .collect();
        for (k, f) in full.iter().enumerate() {
            let i = lo + k as i64;
            if f.source != source.group(i) || f.target != target.group(i) {
                return Err(AbGroupError::ShapeMismatch(format!(
                    "chain map component in degree {i} has the wrong endpoints"
                )));
            }
            if i > lo {
                let lhs = source.diff(i).then(&full[k - 1])?;
                let rhs = f.then(&target.diff(i))?;
                if lhs.matrix != rhs.matrix {
                    return Err(AbGroupError::NotCommutative(format!(
                        "chain map does not commute with the differential in degree {i}"
                    )));
                }
            }
        }
        Ok(ComplexMap {
            source,
            target,
            lowest: lo,
            maps: full,
        })
    }

    pub fn lowest(&self) -> i64 {
        self.lowest
    }

    pub fn highest(&self) -> i64 {
        self.lowest + self.maps.len() as i64 - 1
    }

    pub fn component(&self, i: i64) -> &FGMap {
        &self.maps[(i - self.lowest) as usize]
    }

    /// `H_i(f)`.
    pub fn on_homology(&self, i: i64) -> Result<FGMap, AbGroupError> {
        let hs = self.source.homology_sq(i);
        let ht = self.target.homology_sq(i);
        let m = hs.induced(&self.component(i).matrix, &ht)?;
        FGMap::new(hs.group, ht.group, m)
    }

    /// Mapping cone: `Cone_i = C_{i-1} + C'_i`,
    /// `d(x, y) = (-d x, f x + d' y)`.
    pub fn cone(&self) -> Result<FGComplex, AbGroupError> {
        Ok(self.cone_data()?.complex)
    }

    fn cone_data(&self) -> Result<Cone, AbGroupError> {
        let lo = self.lowest;
        let hi = self.highest() + 1;
        let sums: Vec<DirectSum> = (lo..=hi)
            .map(|i| direct_sum(&[self.source.group(i - 1), self.target.group(i)]))
            .collect();
        let groups: Vec<FGAbGroup> = sums.iter().map(|s| s.sum.clone()).collect();
        let mut diffs = Vec::new();
        for i in lo + 1..=hi {
            let k = (i - lo) as usize;
            let neg_d = {
                let d = self.source.diff(i - 1);
                FGMap::new(d.source.clone(), d.target.clone(), d.matrix.neg())?
            };
            let f = if i - 1 <= self.highest() {
                self.component(i - 1).clone()
            } else {
                FGMap::zero(self.source.group(i - 1), self.target.group(i - 1))
            };
            let d_t = self.target.diff(i);
            let blocks = vec![vec![Some(&neg_d), None], vec![Some(&f), Some(&d_t)]];
            diffs.push(sum_map(&sums[k], &sums[k - 1], &blocks)?);
        }
        let complex = FGComplex::new(lo, groups, diffs)?;
        // C[-1]: degree i holds C_{i-1}, differential -d.
        let shifted_groups: Vec<FGAbGroup> = (lo..=hi).map(|i| self.source.group(i - 1)).collect();
        let shifted_diffs = (lo + 1..=hi)
            .map(|i| {
                let d = self.source.diff(i - 1);
                FGMap::new(d.source.clone(), d.target.clone(), d.matrix.neg())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let shifted = FGComplex::new(lo, shifted_groups, shifted_diffs)?;
        Ok(Cone {
            complex,
            shifted,
            sums,
        })
    }

    /// `... -> H_i(C) -> H_i(C') -> H_i(Cone f) -> H_{i-1}(C) -> ...`, from
    /// the top degree down, with zero groups at both ends.
    pub fn cone_les(&self) -> Result<LongExactSequence, AbGroupError> {
        let cone = self.cone_data()?;
        let lo = self.lowest;
        let hi = self.highest() + 1;
        let target = self.target.padded(lo, hi);
        let base = |i: i64| (i - lo) as usize;
        let mut terms: Vec<LesTerm> = Vec::new();
        let mut maps: Vec<FGMap> = Vec::new();
        let mut prev: Option<Subquotient> = None;
        for i in (lo..=hi).rev() {
            // H_i(C'), reached from H_{i+1}(C[-1]) = H_i(C) via f_i.
            let ht = target.homology_sq(i);
            match prev.take() {
                Some(hs) => {
                    let m = hs.induced(&self.component(i).matrix, &ht)?;
                    maps.push(FGMap::new(hs.group.clone(), ht.group.clone(), m)?);
                }
                None => maps.push(FGMap::zero(FGAbGroup::zero(), ht.group.clone())),
            }
            terms.push(LesTerm { kind: LesKind::Target, degree: i, group: ht.group.clone() });
            // H_i(C') -> H_i(Cone) via y -> (0, y).
            let hc = cone.complex.homology_sq(i);
            let sum = &cone.sums[base(i)];
            maps.push(induced_map(&ht, &sum.inclusions[1].matrix, &hc)?);
            terms.push(LesTerm { kind: LesKind::Cone, degree: i, group: hc.group.clone() });
            // H_i(Cone) -> H_i(C[-1]) via (x, y) -> x.
            let hsh = cone.shifted.homology_sq(i);
            maps.push(induced_map(&hc, &sum.projections[0].matrix, &hsh)?);
            terms.push(LesTerm { kind: LesKind::Source, degree: i - 1, group: hsh.group.clone() });
            prev = Some(hsh);
        }
        if let Some(hs) = prev {
            maps.push(FGMap::zero(hs.group, FGAbGroup::zero()));
        }
        Ok(LongExactSequence { terms, maps })
    }
}

fn induced_map(src: &Subquotient, f: &IntMatrix, tgt: &Subquotient) -> Result<FGMap, AbGroupError> {
    let m = src.induced(f, tgt)?;
    FGMap::new(src.group.clone(), tgt.group.clone(), m)
}

struct Cone {
    complex: FGComplex,
    shifted: FGComplex,
    sums: Vec<DirectSum>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LesKind {
    Source,
    Target,
    Cone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesTerm {
    pub kind: LesKind,
    pub degree: i64,
    pub group: FGAbGroup,
}

/// `terms[k]` receives `maps[k]` and emits `maps[k + 1]`; the first map
/// starts and the last map ends at the zero group.
#[derive(Debug, Clone)]
pub struct LongExactSequence {
    pub terms: Vec<LesTerm>,
    pub maps: Vec<FGMap>,
}

impl LongExactSequence {
    /// Indices of terms where the sequence fails to be exact.
    pub fn inexact_terms(&self) -> Vec<usize> {
        (0..self.terms.len())
            .filter(|&k| {
                let incoming = &self.maps[k];
                let outgoing = &self.maps[k + 1];
                let composite = incoming.then(outgoing).expect("consecutive maps compose");
                if !composite.is_zero() {
                    return true;
                }
                let c = FGComplex::new(
                    0,
                    vec![
                        outgoing.target.clone(),
                        incoming.target.clone(),
                        incoming.source.clone(),
                    ],
                    vec![outgoing.clone(), incoming.clone()],
                )
                .expect("checked composite");
                !c.homology_at(1).is_zero()
            })
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        self.inexact_terms().is_empty()
    }
}
