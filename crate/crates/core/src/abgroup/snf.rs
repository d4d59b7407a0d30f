//! Smith normal form with unimodular transforms and their inverses.

use crate::scalar::ExactInt;

use super::matrix::Matrix;

/// `u * a * v = d`, with `u_inv`, `v_inv` the inverses of `u`, `v`.
#[derive(Debug, Clone)]
pub struct Snf<T> {
    pub u: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
    pub v_inv: Matrix<T>,
}

impl<T: ExactInt> Snf<T> {
    /// Nonzero diagonal entries, `d_1 | d_2 | ...`, all positive.
    pub fn invariants(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }

    /// Re-derives the contract: `u a v = d`, `d` diagonal with a divisibility
    /// chain of positive entries followed by zeros, `u`, `v` unimodular with
    /// the stored inverses.
    pub fn verify(&self, a: &Matrix<T>) -> Result<(), String> {
        if self.u.mul(a).mul(&self.v) != self.d {
            return Err("U A V != D".into());
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d[(i, j)].is_zero() {
                    return Err(format!("D has off-diagonal entry at ({i}, {j})"));
                }
            }
        }
        let diag: Vec<T> = (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect();
        for w in diag.windows(2) {
            let ok = if w[0].is_zero() {
                w[1].is_zero()
            } else {
                w[1].is_multiple_of(&w[0])
            };
            if !ok {
                return Err("diagonal is not a divisibility chain".into());
            }
        }
        if diag.iter().any(|x| x.is_negative()) {
            return Err("negative invariant factor".into());
        }
        for (m, name) in [(&self.u, "U"), (&self.v, "V")] {
            if !m.det().abs().is_one() {
                return Err(format!("{name} is not unimodular"));
            }
        }
        if self.u.mul(&self.u_inv) != Matrix::identity(self.u.rows())
            || self.v.mul(&self.v_inv) != Matrix::identity(self.v.rows())
        {
            return Err("stored inverse is wrong".into());
        }
        Ok(())
    }
}

/// Elimination pivoting on the least nonzero `|entry|`.
pub fn snf<T: ExactInt>(a: &Matrix<T>) -> Snf<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut u_inv = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    let mut v_inv = Matrix::identity(n);

    // Row and column operations applied to D together with the transforms.
    macro_rules! swap_rows {
        ($i:expr, $j:expr) => {{
            d.swap_rows($i, $j);
            u.swap_rows($i, $j);
            u_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! swap_cols {
        ($i:expr, $j:expr) => {{
            d.swap_cols($i, $j);
            v.swap_cols($i, $j);
            v_inv.swap_rows($i, $j);
        }};
    }
    macro_rules! add_row {
        ($i:expr, $j:expr, $k:expr) => {{
            let k: T = $k;
            d.add_row($i, $j, &k);
            u.add_row($i, $j, &k);
            u_inv.add_col($j, $i, &-k);
        }};
    }
    macro_rules! add_col {
        ($i:expr, $j:expr, $k:expr) => {{
            let k: T = $k;
            d.add_col($i, $j, &k);
            v.add_col($i, $j, &k);
            v_inv.add_row($j, $i, &-k);
        }};
    }

    'outer: for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'outer;
            };
            swap_rows!(t, pi);
            swap_cols!(t, pj);
            let mut dirty = false;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    add_row!(i, t, -q);
                    dirty |= !d[(i, t)].is_zero();
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    add_col!(j, t, -q);
                    dirty |= !d[(t, j)].is_zero();
                }
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)]))
            });
            match offender {
                Some(i) => add_row!(t, i, T::one()),
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    Snf { u, u_inv, d, v, v_inv }
}

/// Columns spanning the integer kernel `{x : a x = 0}`.
pub fn kernel_basis<T: ExactInt>(a: &Matrix<T>) -> Matrix<T> {
    let s = snf(a);
    let r = s.rank();
    s.v.submatrix(0..a.cols(), r..a.cols())
}

/// Integral `x` with `a x = b`, if one exists.
pub fn solve_integral<T: ExactInt>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let s = snf(a);
    let ub = s.u.mul_vec(b);
    let inv = s.invariants();
    if ub[inv.len()..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut y = vec![T::zero(); a.cols()];
    for (i, d) in inv.iter().enumerate() {
        if !ub[i].is_multiple_of(d) {
            return None;
        }
        y[i] = ub[i].clone() / d.clone();
    }
    Some(s.v.mul_vec(&y))
}
