//! Exact linear algebra over Q and Q(ζ): dense Gaussian elimination, sparse
//! rational vectors, and an incremental echelon basis for coordinate expansion.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalars::{Rational, Scalar};

/// The operations Gaussian elimination needs.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn inverse(&self) -> Option<Self>;
}

impl Field for Rational {
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Field for Scalar {
    fn inverse(&self) -> Option<Self> {
        Scalar::inverse(self)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<F> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
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

    pub fn mul(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + &(a.clone() * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.get(r, c).inverse().expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = self.get(r, j).clone() * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in 0..self.cols {
                    let rj = self.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j).clone() - &(f.clone() * rj);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A basis of the right kernel {x : Ax = 0}.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let mut a = self.clone();
        let pivots = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![F::zero(); self.cols];
                x[f] = F::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -a.get(r, f).clone();
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Mat<F>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols);
        let mut a = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det = det * &piv;
            let inv = piv.inverse().expect("nonzero pivot");
            for i in c + 1..n {
                if a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone() * &inv;
                for j in c..n {
                    let v = a.get(i, j).clone() - &(f.clone() * a.get(c, j));
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solves Ax = b for square invertible A.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        let inv = self.inverse()?;
        Some(
            (0..self.rows)
                .map(|i| (0..self.cols).fold(F::zero(), |acc, j| acc + &(inv.get(i, j).clone() * &b[j])))
                .collect(),
        )
    }
}

/// Sparse rational vector keyed by basis index. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct SparseVec(BTreeMap<usize, Rational>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = SparseVec::new();
        v.0.insert(i, Rational::one());
        v
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut v = SparseVec::new();
        for (i, r) in pairs {
            v.add_at(i, &r);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_at(&mut self, i: usize, r: &Rational) {
        if r.is_zero() {
            return;
        }
        let e = self.0.entry(i).or_insert_with(Rational::zero);
        *e += r;
        if e.is_zero() {
            self.0.remove(&i);
        }
    }

    /// self += f·other
    pub fn axpy(&mut self, f: &Rational, other: &SparseVec) {
        if f.is_zero() {
            return;
        }
        for (i, v) in other.iter() {
            self.add_at(i, &(f * v));
        }
    }

    pub fn scaled(&self, f: &Rational) -> SparseVec {
        if f.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(k, v)| (*k, v * f)).collect())
    }

    pub fn plus(&self, o: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&Rational::one(), o);
        out
    }

    pub fn minus(&self, o: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&-Rational::one(), o);
        out
    }

    /// Keeps only the coordinates accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> SparseVec {
        SparseVec(self.0.iter().filter(|(k, _)| keep(**k)).map(|(k, v)| (*k, v.clone())).collect())
    }

    /// Reindexes through `map`, dropping coordinates that map to `None`.
    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(self.iter().filter_map(|(k, v)| map(k).map(|j| (j, v.clone()))))
    }

    /// Σ self_i·w_i for a dense weight vector.
    pub fn dot_dense(&self, w: &[Rational]) -> Rational {
        self.iter().fold(Rational::zero(), |acc, (i, v)| acc + v * &w[i])
    }
}

impl FromIterator<(usize, Rational)> for SparseVec {
    fn from_iter<T: IntoIterator<Item = (usize, Rational)>>(iter: T) -> Self {
        SparseVec::from_pairs(iter)
    }
}

/// (pivot key, reduced row, combination of the original vectors)
type ReducedRow<K, F> = (K, BTreeMap<K, F>, BTreeMap<usize, F>);

/// Incremental echelon form of a list of sparse vectors over `F`, used to
/// read off coordinates of a vector in their span.
#[derive(Clone, Debug)]
pub struct Expander<K: Ord + Clone, F: Field> {
    count: usize,
    // in insertion order
    rows: Vec<ReducedRow<K, F>>,
}

impl<K: Ord + Clone + fmt::Debug, F: Field> Expander<K, F> {
    pub fn new() -> Self {
        Expander { count: 0, rows: Vec::new() }
    }

    /// Adds a basis vector; returns false (and ignores it) if it is dependent.
    pub fn push(&mut self, v: &BTreeMap<K, F>) -> bool {
        let mut row = v.clone();
        let mut comb: BTreeMap<usize, F> = BTreeMap::new();
        comb.insert(self.count, F::one());
        for (p, r, c) in &self.rows {
            let Some(x) = row.get(p).cloned() else { continue };
            let f = x * &r[p].inverse().expect("pivot nonzero");
            sub_scaled(&mut row, &f, r);
            sub_scaled(&mut comb, &f, c);
        }
        let Some(pivot) = row.keys().next().cloned() else {
            return false;
        };
        self.rows.push((pivot, row, comb));
        self.count += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Coordinates of `v` in the pushed basis, or `None` if `v` is outside the span.
    pub fn coords(&self, v: &BTreeMap<K, F>) -> Option<BTreeMap<usize, F>> {
        let mut rest = v.clone();
        let mut out: BTreeMap<usize, F> = BTreeMap::new();
        for (p, r, c) in &self.rows {
            let Some(x) = rest.get(p).cloned() else { continue };
            let f = x * &r[p].inverse().expect("pivot nonzero");
            sub_scaled(&mut rest, &f, r);
            sub_scaled(&mut out, &-f, c);
        }
        rest.is_empty().then_some(out)
    }
}

impl<K: Ord + Clone + fmt::Debug, F: Field> Default for Expander<K, F> {
    fn default() -> Self {
        Self::new()
    }
}

fn sub_scaled<K: Ord + Clone, F: Field>(dst: &mut BTreeMap<K, F>, f: &F, src: &BTreeMap<K, F>) {
    for (k, v) in src {
        let d = f.clone() * v;
        if d.is_zero() {
            continue;
        }
        match dst.get_mut(k) {
            Some(e) => {
                let nv = e.clone() - &d;
                if nv.is_zero() {
                    dst.remove(k);
                } else {
                    *e = nv;
                }
            }
            None => {
                dst.insert(k.clone(), -d);
            }
        }
    }
}

/// Inverse of a sparse symmetric-pattern Gram matrix by inverting each
/// connected component of its nonzero pattern separately.
/// Rows are indexed 0..n; returns the inverse as sparse rows.
pub fn sparse_inverse(rows: &[SparseVec]) -> Option<Vec<SparseVec>> {
    let n = rows.len();
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        comp[start] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            let nbrs: Vec<usize> = rows[i].support().chain((0..n).filter(|&j| !rows[j].get(i).is_zero())).collect();
            for j in nbrs {
                if j < n && comp[j] == usize::MAX {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    let mut out = vec![SparseVec::new(); n];
    for members in &comps {
        let k = members.len();
        let mut m = Mat::<Rational>::zeros(k, k);
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                m.set(a, b, rows[i].get(j));
            }
        }
        let inv = m.inverse()?;
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                out[i].add_at(j, inv.get(a, b));
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn inverse_and_det() {
        let a = Mat::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        assert_eq!(a.det(), int(1));
        let sing = Mat::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert!(sing.inverse().is_none());
        assert_eq!(sing.det(), int(0));
        assert_eq!(sing.kernel().len(), 1);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = Mat::from_rows(vec![
            vec![int(1), int(2), int(3), int(4)],
            vec![int(2), int(4), int(6), int(8)],
            vec![int(0), int(1), int(1), int(0)],
        ]);
        let ker = a.kernel();
        assert_eq!(ker.len(), 2);
        for x in ker {
            for i in 0..a.rows {
                let s = (0..a.cols).fold(int(0), |acc, j| acc + a.get(i, j) * &x[j]);
                assert_eq!(s, int(0));
            }
        }
    }

    #[test]
    fn expander_over_scalars() {
        let i = Scalar::imag();
        let mut e: Expander<usize, Scalar> = Expander::new();
        let a: BTreeMap<usize, Scalar> = [(0, Scalar::one()), (1, -Scalar::one())].into();
        let b: BTreeMap<usize, Scalar> = [(0, i.clone()), (1, i.clone())].into();
        assert!(e.push(&a));
        assert!(e.push(&b));
        assert!(!e.push(&a));
        let target: BTreeMap<usize, Scalar> = [(0, Scalar::from_int(2))].into();
        let c = e.coords(&target).unwrap();
        // 2·e0 = A − ı·B
        assert_eq!(c[&0], Scalar::one());
        assert_eq!(c[&1], -i);
        let outside: BTreeMap<usize, Scalar> = [(5, Scalar::one())].into();
        assert!(e.coords(&outside).is_none());
    }

    #[test]
    fn sparse_inverse_of_block_pattern() {
        let rows = vec![
            SparseVec::from_pairs([(0, int(2))]),
            SparseVec::from_pairs([(2, int(3))]),
            SparseVec::from_pairs([(1, int(-3))]),
        ];
        let inv = sparse_inverse(&rows).unwrap();
        assert_eq!(inv[0].get(0), rat(1, 2));
        assert_eq!(inv[1].get(2), rat(-1, 3));
        assert_eq!(inv[2].get(1), rat(1, 3));
    }

    proptest! {
        #[test]
        fn random_inverse(entries in proptest::collection::vec(-5i64..=5, 9)) {
            let a = Mat::from_rows(entries.chunks(3).map(|r| r.iter().map(|&x| int(x)).collect()).collect());
            match a.inverse() {
                Some(inv) => {
                    prop_assert_eq!(a.mul(&inv), Mat::identity(3));
                    prop_assert!(!a.det().is_zero());
                }
                None => prop_assert!(a.det().is_zero()),
            }
        }
    }
}
