//! Exact integer linear algebra: Smith and Hermite normal forms, sublattices
//! of `Z^n`, saturation, annihilators and quotient complements.
//!
//! Everything here works over arbitrary-precision integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("inner lattice is not contained in the outer lattice")]
    NotContained,
    #[error("quotient has torsion (invariant factor {0})")]
    Torsion(Int),
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).fold(Int::zero(), |acc, (x, y)| acc + x * y)
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed to type an empty row list.
    pub fn from_rows(cols: usize, rows: &[Vec<Int>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Int>> = rows.iter().map(|r| int_vec(r)).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
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

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
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
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Int::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * self.get(i, j);
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn rank(&self) -> usize {
        hnf(self).rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if !s.is_zero() {
                self.data[dst * self.cols + j] += q * s;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.data[i * self.cols + src].clone();
            if !s.is_zero() {
                self.data[i * self.cols + dst] += q * s;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = -v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = std::mem::take(&mut self.data[i * self.cols + c]);
            self.data[i * self.cols + c] = -v;
        }
    }

    /// Applies the 2x2 unimodular combination
    /// (row a, row b) <- (x*a + y*b, u*a + v*b).
    fn combine_rows(&mut self, a: usize, b: usize, x: &Int, y: &Int, u: &Int, v: &Int) {
        for j in 0..self.cols {
            let ra = self.data[a * self.cols + j].clone();
            let rb = self.data[b * self.cols + j].clone();
            if ra.is_zero() && rb.is_zero() {
                continue;
            }
            self.data[a * self.cols + j] = x * &ra + y * &rb;
            self.data[b * self.cols + j] = u * ra + v * rb;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Result of a Smith normal form computation.
///
/// With transforms retained, `left * M * right` is the diagonal matrix whose
/// leading entries are `invariant_factors`; `left_inverse` and
/// `right_inverse` are the exact inverses of the two transforms.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub invariant_factors: Vec<Int>,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
    pub left_inverse: Option<IntMatrix>,
    pub right_inverse: Option<IntMatrix>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Product of the invariant factors (the torsion order of the cokernel
    /// restricted to the saturation).
    pub fn index(&self) -> Int {
        self.invariant_factors.iter().product()
    }
}

struct Tracker {
    on: bool,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Tracker {
    fn new(rows: usize, cols: usize, on: bool) -> Self {
        let (r, c) = if on { (rows, cols) } else { (0, 0) };
        Tracker {
            on,
            u: IntMatrix::identity(r),
            u_inv: IntMatrix::identity(r),
            v: IntMatrix::identity(c),
            v_inv: IntMatrix::identity(c),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if self.on {
            self.u.swap_rows(a, b);
            self.u_inv.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if self.on {
            self.v.swap_cols(a, b);
            self.v_inv.swap_rows(a, b);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, q: &Int) {
        if self.on {
            self.u.add_row(dst, src, q);
            self.u_inv.add_col(src, dst, &-q);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, q: &Int) {
        if self.on {
            self.v.add_col(dst, src, q);
            self.v_inv.add_row(src, dst, &-q);
        }
    }

    fn negate_row(&mut self, r: usize) {
        if self.on {
            self.u.negate_row(r);
            self.u_inv.negate_col(r);
        }
    }
}

/// Smith normal form. Invariant factors are positive and form a divisibility
/// chain; their count is the rank of `m`.
pub fn snf(m: &IntMatrix, with_transforms: bool) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut tr = Tracker::new(rows, cols, with_transforms);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        tr.swap_rows(t, pi);
        a.swap_cols(t, pj);
        tr.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -(a.get(i, t).div_floor(a.get(t, t)));
                a.add_row(i, t, &q);
                tr.add_row(i, t, &q);
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -(a.get(t, j).div_floor(a.get(t, t)));
                a.add_col(j, t, &q);
                tr.add_col(j, t, &q);
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // a remainder smaller than the pivot survived; move it in
                let mut best = (t, t);
                for i in t + 1..rows {
                    let x = a.get(i, t);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let x = a.get(t, j);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                a.swap_rows(t, best.0);
                tr.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                tr.swap_cols(t, best.1);
                continue;
            }
            let p = a.get(t, t).clone();
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    a.add_row(t, i, &Int::one());
                    tr.add_row(t, i, &Int::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            tr.negate_row(t);
        }
        t += 1;
    }
    let invariant_factors = (0..t).map(|i| a.get(i, i).clone()).collect();
    if with_transforms {
        SnfResult {
            invariant_factors,
            left: Some(tr.u),
            right: Some(tr.v),
            left_inverse: Some(tr.u_inv),
            right_inverse: Some(tr.v_inv),
        }
    } else {
        SnfResult {
            invariant_factors,
            left: None,
            right: None,
            left_inverse: None,
            right_inverse: None,
        }
    }
}

pub struct HnfResult {
    /// Row echelon form: the first `rank` rows are nonzero with positive
    /// pivots, entries above each pivot reduced into `[0, pivot)`.
    pub h: IntMatrix,
    /// Unimodular `u` with `u * M = h`.
    pub u: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Row-style Hermite normal form.
pub fn hnf(m: &IntMatrix) -> HnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if a.get(i, j).is_zero() {
                continue;
            }
            // extended gcd step between rows r and i on column j
            let x = a.get(r, j).clone();
            let y = a.get(i, j).clone();
            let e = x.extended_gcd(&y);
            let (p, q) = (&x / &e.gcd, &y / &e.gcd);
            // [e.x e.y; -q p] has determinant (e.x*p + e.y*q) = 1
            a.combine_rows(r, i, &e.x, &e.y, &-&q, &p);
            u.combine_rows(r, i, &e.x, &e.y, &-q, &p);
        }
        if a.get(r, j).is_zero() {
            continue;
        }
        if a.get(r, j).is_negative() {
            a.negate_row(r);
            u.negate_row(r);
        }
        let p = a.get(r, j).clone();
        for i in 0..r {
            let q = -(a.get(i, j).div_floor(&p));
            a.add_row(i, r, &q);
            u.add_row(i, r, &q);
        }
        pivots.push(j);
        r += 1;
    }
    HnfResult {
        h: a,
        u,
        rank: r,
        pivots,
    }
}

/// A sublattice of `Z^n`, stored by its canonical HNF basis so that derived
/// equality is lattice equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl fmt::Debug for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?} in Z^{}>", self.basis, self.ambient_rank)
    }
}

impl Sublattice {
    /// The lattice spanned by `generators` (any number, possibly dependent).
    pub fn new(ambient_rank: usize, generators: &[Vec<Int>]) -> Result<Self, LinAlgError> {
        for g in generators {
            if g.len() != ambient_rank {
                return Err(LinAlgError::Dimension {
                    expected: ambient_rank,
                    got: g.len(),
                });
            }
        }
        Ok(Self::from_matrix(&IntMatrix::from_rows(
            ambient_rank,
            generators,
        )))
    }

    pub fn from_i64(ambient_rank: usize, generators: &[&[i64]]) -> Self {
        let g: Vec<Vec<Int>> = generators.iter().map(|r| int_vec(r)).collect();
        Self::new(ambient_rank, &g).expect("generator length")
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        let h = hnf(m);
        let rows: Vec<Vec<Int>> = (0..h.rank).map(|i| h.h.row(i).to_vec()).collect();
        Sublattice {
            ambient_rank: m.cols,
            basis: IntMatrix::from_rows(m.cols, &rows),
        }
    }

    pub fn zero(n: usize) -> Self {
        Sublattice {
            ambient_rank: n,
            basis: IntMatrix::zeros(0, n),
        }
    }

    pub fn full(n: usize) -> Self {
        Sublattice {
            ambient_rank: n,
            basis: IntMatrix::identity(n),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Int>> {
        self.basis.to_rows()
    }

    /// Coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(v.len(), self.ambient_rank);
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row
                .iter()
                .position(|x| !x.is_zero())
                .expect("HNF row is nonzero");
            // every entry of rest before this pivot must already be cleared
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for j in p..self.ambient_rank {
                rest[j] -= &q * &row[j];
            }
            coords.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subset_of(&self, other: &Sublattice) -> bool {
        (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }

    pub fn sum(&self, other: &Sublattice) -> Sublattice {
        Sublattice::from_matrix(&self.basis.stack(&other.basis))
    }

    /// Index of the lattice inside its saturation.
    pub fn saturation_index(&self) -> Int {
        snf(&self.basis, false).index()
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation_index().is_one()
    }

    /// Reduces `v` modulo this lattice (entries at pivot columns are brought
    /// into `[0, pivot)`); deterministic representative of the coset.
    pub fn reduce(&self, v: &[Int]) -> Vec<Int> {
        let mut out = v.to_vec();
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row
                .iter()
                .position(|x| !x.is_zero())
                .expect("HNF row is nonzero");
            let q = out[p].div_floor(&row[p]);
            if !q.is_zero() {
                for j in p..self.ambient_rank {
                    out[j] -= &q * &row[j];
                }
            }
        }
        out
    }
}

/// `(L ⊗ Q) ∩ Z^n`.
pub fn saturate(l: &Sublattice) -> Sublattice {
    if l.rank() == 0 {
        return l.clone();
    }
    let s = snf(&l.basis, true);
    let v_inv = s.right_inverse.expect("transforms requested");
    let rows: Vec<Vec<Int>> = (0..s.invariant_factors.len())
        .map(|i| v_inv.row(i).to_vec())
        .collect();
    Sublattice::new(l.ambient_rank, &rows).expect("dimensions agree")
}

/// `{v in Z^n : <chi, v> = 0 for every chi in L}`.
pub fn annihilator(l: &Sublattice) -> Sublattice {
    let n = l.ambient_rank;
    if l.rank() == 0 {
        return Sublattice::full(n);
    }
    let s = snf(&l.basis, true);
    let v = s.right.expect("transforms requested");
    let r = s.invariant_factors.len();
    let rows: Vec<Vec<Int>> = (r..n).map(|j| v.column(j)).collect();
    Sublattice::new(n, &rows).expect("dimensions agree")
}

/// Vectors of `outer` whose images form a basis of `outer / inner`.
///
/// Construction: write the inner basis in outer coordinates as `C`, take
/// `U C V = D`; the rows of `V^{-1}` times the outer basis beyond the rank of
/// `C` complete an adapted basis. The result is then put in HNF and reduced
/// modulo `inner`, so the output depends only on the two lattices.
pub fn complement_basis(
    inner: &Sublattice,
    outer: &Sublattice,
) -> Result<Vec<Vec<Int>>, LinAlgError> {
    if inner.ambient_rank != outer.ambient_rank {
        return Err(LinAlgError::Dimension {
            expected: outer.ambient_rank,
            got: inner.ambient_rank,
        });
    }
    let m = outer.rank();
    let k = inner.rank();
    let mut coords = Vec::with_capacity(k);
    for i in 0..k {
        coords.push(
            outer
                .coordinates(inner.basis.row(i))
                .ok_or(LinAlgError::NotContained)?,
        );
    }
    if m == k {
        // equal rank and contained: quotient must be finite, and trivial
        let idx = snf(&IntMatrix::from_rows(m, &coords), false).index();
        if !idx.is_one() {
            return Err(LinAlgError::Torsion(idx));
        }
        return Ok(Vec::new());
    }
    let (tail, v_inv) = if k == 0 {
        (0, IntMatrix::identity(m))
    } else {
        let s = snf(&IntMatrix::from_rows(m, &coords), true);
        if let Some(d) = s.invariant_factors.iter().find(|d| !d.is_one()) {
            return Err(LinAlgError::Torsion(d.clone()));
        }
        (
            s.invariant_factors.len(),
            s.right_inverse.expect("transforms requested"),
        )
    };
    let new_outer = v_inv.mul(&outer.basis);
    let raw: Vec<Vec<Int>> = (tail..m).map(|i| new_outer.row(i).to_vec()).collect();
    let h = hnf(&IntMatrix::from_rows(outer.ambient_rank, &raw));
    Ok((0..h.rank).map(|i| inner.reduce(h.h.row(i))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: usize, rows: &[&[i64]]) -> Sublattice {
        Sublattice::from_i64(n, rows)
    }

    fn check_snf(m: &IntMatrix) {
        let s = snf(m, true);
        let d = s
            .left
            .as_ref()
            .unwrap()
            .mul(m)
            .mul(s.right.as_ref().unwrap());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let want = if i == j && i < s.rank() {
                    s.invariant_factors[i].clone()
                } else {
                    Int::zero()
                };
                assert_eq!(d.get(i, j), &want);
            }
        }
        let u = s.left.unwrap();
        let v = s.right.unwrap();
        assert_eq!(
            u.mul(&s.left_inverse.unwrap()),
            IntMatrix::identity(m.rows())
        );
        assert_eq!(
            v.mul(&s.right_inverse.unwrap()),
            IntMatrix::identity(m.cols())
        );
    }

    #[test]
    fn snf_examples() {
        assert_eq!(
            snf(&IntMatrix::identity(3), false).invariant_factors,
            int_vec(&[1, 1, 1])
        );
        let m = IntMatrix::from_i64(3, &[&[1, 0, 0], &[1, -3, 0]]);
        assert_eq!(snf(&m, false).invariant_factors, int_vec(&[1, 3]));
        check_snf(&m);
        let m = IntMatrix::from_i64(3, &[&[1, 0, 0], &[1, 0, -1], &[2, -3, 0]]);
        assert_eq!(snf(&m, false).invariant_factors, int_vec(&[1, 1, 3]));
        assert_eq!(m.determinant().abs(), int(3));
        assert!(snf(&IntMatrix::zeros(0, 0), false)
            .invariant_factors
            .is_empty());
    }

    #[test]
    fn snf_divisibility_needs_fixup() {
        // diag(2,3) has factors 1, 6
        let m = IntMatrix::from_i64(2, &[&[2, 0], &[0, 3]]);
        assert_eq!(snf(&m, false).invariant_factors, int_vec(&[1, 6]));
        check_snf(&m);
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate(&lat(2, &[&[2, 0]])), lat(2, &[&[1, 0]]));
        assert_eq!(
            saturate(&lat(3, &[&[1, 0, 0], &[1, -3, 0]])),
            lat(3, &[&[1, 0, 0], &[0, 1, 0]])
        );
        let gc = lat(3, &[&[1, 0, -1], &[2, -3, 0]]);
        assert_eq!(saturate(&gc), gc);
    }

    #[test]
    fn annihilator_examples() {
        let gc = lat(3, &[&[1, 0, -1], &[2, -3, 0]]);
        assert_eq!(annihilator(&gc), lat(3, &[&[3, 2, 3]]));
        assert_eq!(annihilator(&Sublattice::zero(3)), Sublattice::full(3));
        assert_eq!(annihilator(&Sublattice::full(3)), Sublattice::zero(3));
    }

    #[test]
    fn complement_examples() {
        let a = lat(3, &[&[1, 0, 0]]);
        assert!(complement_basis(&a, &a).unwrap().is_empty());
        assert_eq!(
            complement_basis(&Sublattice::zero(3), &a).unwrap(),
            vec![int_vec(&[1, 0, 0])]
        );
        let l1 = lat(3, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(
            complement_basis(&a, &l1).unwrap(),
            vec![int_vec(&[0, 1, 0])]
        );
        assert_eq!(complement_basis(&l1, &a), Err(LinAlgError::NotContained));
        let twice = lat(3, &[&[2, 0, 0]]);
        assert_eq!(
            complement_basis(&twice, &a),
            Err(LinAlgError::Torsion(int(2)))
        );
    }

    #[test]
    fn hnf_is_canonical() {
        let x = lat(3, &[&[1, 0, 0], &[1, -3, 0]]);
        let y = lat(3, &[&[2, -3, 0], &[1, -3, 0]]);
        assert_eq!(x, y);
        assert!(x.contains(&int_vec(&[5, 6, 0])));
        assert!(!x.contains(&int_vec(&[0, 1, 0])));
    }
}
