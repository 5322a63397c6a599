//! Exact integer and rational matrices, Smith normal form, and the lattice
//! operations built on it (saturated kernels, cokernels, integer solving).
//!
//! Nothing here uses floating point. Every normal form is deterministic, so
//! outputs are reproducible across runs and platforms.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A dense matrix of arbitrary-precision integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows of anything convertible to `BigInt`.
    ///
    /// Panics on ragged input; use [`IntegerMatrix::try_from_rows`] for
    /// untrusted data.
    pub fn from_rows<R, T>(rows: &[R]) -> Self
    where
        R: AsRef<[T]>,
        T: Clone + Into<BigInt>,
    {
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.as_ref().iter().cloned().map(Into::into).collect())
            .collect();
        Self::try_from_rows(big).expect("ragged matrix rows")
    }

    pub fn try_from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(IntegerMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != nrows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {}, expected {nrows}",
                    c.len()
                )));
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !v[j].is_zero())
                    .map(|j| self.get(i, j) * &v[j])
                    .sum()
            })
            .collect())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(r, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (c, &j) in idx.iter().enumerate() {
                m.set(i, c, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().cloned().map(BigRational::from_integer).collect(),
        }
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_i64()).collect())
            .collect()
    }

    /// Rank and, for square input, determinant, by fraction-free elimination.
    fn bareiss(&self) -> (usize, Option<BigInt>) {
        let mut a = self.to_rows();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        let mut sign = 1i32;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            if p != rank {
                a.swap(p, rank);
                sign = -sign;
            }
            for i in rank + 1..m {
                for j in col + 1..n {
                    let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                    a[i][j] = v / &prev;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        let det = if m == n {
            if rank < n {
                Some(BigInt::zero())
            } else {
                let d = a[n - 1][n - 1].clone();
                Some(if sign < 0 { -d } else { d })
            }
        } else {
            None
        };
        (rank, det)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().0
    }

    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        if self.rows == 0 {
            return Ok(BigInt::one());
        }
        Ok(self.bareiss().1.expect("square"))
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().is_ok_and(|d| d.abs().is_one())
    }

    /// Integer inverse of a unimodular matrix; `None` otherwise.
    pub fn inverse_unimodular(&self) -> Option<IntegerMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        let snf = smith_normal_form(self);
        // A = U I V, so A^-1 = V^-1 U^-1.
        Some(&snf.v_inv * &snf.u_inv)
    }

    // Elementary operations used by the normal forms.

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let k = i * self.cols + j;
            self.data[k] = -std::mem::take(&mut self.data[k]);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let k = i * self.cols + j;
            self.data[k] = -std::mem::take(&mut self.data[k]);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if !s.is_zero() {
                self.data[dst * self.cols + j] += c * s;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.data[i * self.cols + src].clone();
            if !s.is_zero() {
                self.data[i * self.cols + dst] += c * s;
            }
        }
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;

    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A dense matrix of reduced rationals, used for the skew form, which may be
/// `Q`-valued on the frozen block.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn try_from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension("rational matrix product".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i..self.cols).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(p, rank);
            let pivot = a[rank][col].clone();
            for i in rank + 1..m {
                if a[i][col].is_zero() {
                    continue;
                }
                let f = &a[i][col] / &pivot;
                for j in col..n {
                    let v = &f * &a[rank][j];
                    a[i][j] -= v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Exact conversion when every entry is an integer.
    pub fn to_integer(&self) -> Option<IntegerMatrix> {
        if !self.data.iter().all(BigRational::is_integer) {
            return None;
        }
        Some(IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(BigRational::to_integer).collect(),
        })
    }
}

/// `A = U * S * V` with `U`, `V` unimodular and `S` diagonal,
/// `s_1 | s_2 | ...`, all `s_i >= 0`. The inverses are kept because solving and
/// cokernel coordinates need them.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub s: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The `min(rows, cols)` diagonal entries of `S`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    // Invariant: s = p * a * q.
    let mut p = IntegerMatrix::identity(m);
    let mut p_inv = IntegerMatrix::identity(m);
    let mut q = IntegerMatrix::identity(n);
    let mut q_inv = IntegerMatrix::identity(n);

    let mut rank = 0;
    'outer: for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s.get(i, j);
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'outer;
            };
            s.swap_rows(t, pi);
            p.swap_rows(t, pi);
            p_inv.swap_cols(t, pi);
            s.swap_cols(t, pj);
            q.swap_cols(t, pj);
            q_inv.swap_rows(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let c = -(s.get(i, t) / s.get(t, t));
                s.add_row_multiple(i, t, &c);
                p.add_row_multiple(i, t, &c);
                p_inv.add_col_multiple(t, i, &-&c);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let c = -(s.get(t, j) / s.get(t, t));
                s.add_col_multiple(j, t, &c);
                q.add_col_multiple(j, t, &c);
                q_inv.add_row_multiple(t, j, &-&c);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = s.get(t, t).clone();
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).is_multiple_of(&pivot));
            if let Some((i, _)) = offender {
                let one = BigInt::one();
                s.add_row_multiple(t, i, &one);
                p.add_row_multiple(t, i, &one);
                p_inv.add_col_multiple(i, t, &-&one);
                continue;
            }
            break;
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            p.negate_row(t);
            p_inv.negate_col(t);
        }
        rank = t + 1;
    }

    SmithForm {
        u: p_inv,
        s,
        v: q_inv,
        u_inv: p,
        v_inv: q,
        rank,
    }
}

/// Row-style Hermite normal form of a matrix with linearly independent rows:
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut h: Vec<Vec<BigInt>> = rows.to_vec();
    let r = h.len();
    let n = h.first().map_or(0, Vec::len);
    let mut pr = 0;
    for col in 0..n {
        if pr == r {
            break;
        }
        loop {
            let Some(best) = (pr..r)
                .filter(|&i| !h[i][col].is_zero())
                .min_by(|&a, &b| h[a][col].abs().cmp(&h[b][col].abs()))
            else {
                break;
            };
            h.swap(pr, best);
            let mut done = true;
            for i in pr + 1..r {
                if h[i][col].is_zero() {
                    continue;
                }
                let c = h[i][col].div_floor(&h[pr][col]);
                for j in 0..n {
                    let v = &c * &h[pr][j];
                    h[i][j] -= v;
                }
                if !h[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pr][col].is_zero() {
            continue;
        }
        if h[pr][col].is_negative() {
            for x in h[pr].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        for i in 0..pr {
            let c = h[i][col].div_floor(&h[pr][col]);
            if c.is_zero() {
                continue;
            }
            for j in 0..n {
                let v = &c * &h[pr][j];
                h[i][j] -= v;
            }
        }
        pr += 1;
    }
    h.truncate(pr);
    h
}

/// Basis of the saturated integer kernel `{x : A x = 0}`, in Hermite normal
/// form so the output is canonical for the kernel lattice.
pub fn kernel_basis(a: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    // A * v_inv = u * S, whose columns past the rank vanish.
    let raw: Vec<Vec<BigInt>> = (snf.rank..a.cols()).map(|j| snf.v_inv.column(j)).collect();
    hermite_rows(&raw)
}

/// Invariant factors of `Z^rows / A Z^cols`: the non-unit diagonal entries of
/// the Smith form, followed by one `0` per free summand.
pub fn cokernel_invariants(a: &IntegerMatrix) -> Vec<BigInt> {
    let snf = smith_normal_form(a);
    let mut out: Vec<BigInt> = snf
        .diagonal()
        .into_iter()
        .take(snf.rank)
        .filter(|d| !d.is_one())
        .collect();
    out.extend(std::iter::repeat_n(BigInt::zero(), a.rows() - snf.rank));
    out
}

/// gcd of the entries; `v / index` is primitive.
pub fn divisibility_index(v: &[BigInt]) -> Result<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        Err(Error::ZeroVector)
    } else {
        Ok(g)
    }
}

/// Some integer `x` with `A x = b`, or `None` when no integer solution exists.
pub fn solve_integer(a: &IntegerMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let snf = smith_normal_form(a);
    let c = snf.u_inv.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let d = snf.s.get(i, i);
            if !ci.is_multiple_of(d) {
                return Ok(None);
            }
            y[i] = ci / d;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v_inv.mul_vec(&y)?))
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
