//! Square matrices over a [`RingSpec`], acting on row vectors from the right.

mod embed;
mod wreath;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingSpec};

pub use embed::{ExtensionMap, RingRepresentation, RingTarget};
pub use wreath::{wreath_compose, wreath_rep, Perm, WreathMode};
pub(crate) use embed::crt_check;

/// An `n x n` matrix. Entries are flat ring elements stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    ring: Ring,
    data: Vec<u64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}", self.rows_json())
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Matrix {
    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zero(ring, n);
        let one = ring.one_flat();
        for i in 0..n {
            m.set_flat(i, i, &one);
        }
        m
    }

    pub fn zero(ring: &Ring, n: usize) -> Self {
        assert!(n >= 1, "matrix degree must be positive");
        Matrix { n, ring: ring.clone(), data: vec![0; n * n * ring.width()] }
    }

    /// Builds a matrix from integer entries mapped through `Z -> R`.
    pub fn from_ints(ring: &Ring, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("rows must form a nonempty square".into()));
        }
        let mut m = Self::zero(ring, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set_flat(i, j, &ring.int_flat(v));
            }
        }
        Ok(m)
    }

    pub fn from_elements(ring: &Ring, rows: &[Vec<RingElement>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("rows must form a nonempty square".into()));
        }
        let mut m = Self::zero(ring, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !same_ring(e.ring(), ring) {
                    return Err(Error::RingMismatch);
                }
                m.set_flat(i, j, e.flat());
            }
        }
        Ok(m)
    }

    pub(crate) fn from_flat_data(ring: &Ring, n: usize, data: Vec<u64>) -> Self {
        debug_assert_eq!(data.len(), n * n * ring.width());
        Matrix { n, ring: ring.clone(), data }
    }

    /// Scalar matrix `lambda * I`.
    pub fn scalar(ring: &Ring, n: usize, lambda: &[u64]) -> Self {
        let mut m = Self::zero(ring, n);
        for i in 0..n {
            m.set_flat(i, i, lambda);
        }
        m
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// The raw row-major flat entries. Two matrices over the same ring are
    /// equal iff these words are equal.
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> &[u64] {
        let w = self.ring.width();
        let k = (i * self.n + j) * w;
        &self.data[k..k + w]
    }

    pub fn element(&self, i: usize, j: usize) -> RingElement {
        RingElement::from_flat(&self.ring, self.entry(i, j).to_vec()).expect("entries are reduced")
    }

    pub fn set_flat(&mut self, i: usize, j: usize, v: &[u64]) {
        let w = self.ring.width();
        let k = (i * self.n + j) * w;
        self.data[k..k + w].copy_from_slice(v);
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ring, self.n)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!("degrees {} and {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.n;
        let ring = &self.ring;
        let w = ring.width();
        let mut out = vec![0u64; n * n * w];
        for (s, spec) in ring.summands().iter().enumerate() {
            let q = ring.char_of(s) as u128;
            let off = ring.offset(s);
            let r = spec.r;
            // Below 2^32 products fit in 64 bits, so u128 sums over a row
            // cannot overflow and one reduction per entry suffices.
            let small = q < (1 << 32);
            let mut prod = vec![0u128; 2 * r - 1];
            for i in 0..n {
                for j in 0..n {
                    prod.iter_mut().for_each(|c| *c = 0);
                    for k in 0..n {
                        let a = &self.data[(i * n + k) * w + off..][..r];
                        if a.iter().all(|&c| c == 0) {
                            continue;
                        }
                        let b = &other.data[(k * n + j) * w + off..][..r];
                        for (x, &ax) in a.iter().enumerate() {
                            if ax == 0 {
                                continue;
                            }
                            for (y, &by) in b.iter().enumerate() {
                                if small {
                                    prod[x + y] += ax as u128 * by as u128;
                                } else {
                                    prod[x + y] = (prod[x + y] + ax as u128 * by as u128 % q) % q;
                                }
                            }
                        }
                    }
                    prod.iter_mut().for_each(|c| *c %= q);
                    for k in (r..2 * r - 1).rev() {
                        let c = prod[k];
                        if c == 0 {
                            continue;
                        }
                        for (jj, &mj) in spec.modulus[..r].iter().enumerate() {
                            let idx = k - r + jj;
                            prod[idx] = (prod[idx] + q - c * mj as u128 % q) % q;
                        }
                        prod[k] = 0;
                    }
                    let dst = (i * n + j) * w + off;
                    for k in 0..r {
                        out[dst + k] = prod[k] as u64;
                    }
                }
            }
        }
        Matrix { n, ring: ring.clone(), data: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let w = self.ring.width();
        let mut out = self.data.clone();
        for k in 0..self.n * self.n {
            let (a, b) = (&self.data[k * w..(k + 1) * w], &other.data[k * w..(k + 1) * w]);
            self.ring.add_into(a, b, &mut out[k * w..(k + 1) * w]);
        }
        Ok(Matrix { n: self.n, ring: self.ring.clone(), data: out })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let w = self.ring.width();
        let mut out = self.data.clone();
        for k in 0..self.n * self.n {
            let (a, b) = (&self.data[k * w..(k + 1) * w], &other.data[k * w..(k + 1) * w]);
            self.ring.sub_into(a, b, &mut out[k * w..(k + 1) * w]);
        }
        Ok(Matrix { n: self.n, ring: self.ring.clone(), data: out })
    }

    /// Applies `f` to every flat entry.
    pub fn map_entries(&self, mut f: impl FnMut(&[u64]) -> Vec<u64>) -> Self {
        let w = self.ring.width();
        let data = self.data.chunks(w).flat_map(|e| f(e)).collect();
        Matrix { n: self.n, ring: self.ring.clone(), data }
    }

    /// Multiplies every entry by the ring element `c`.
    pub fn scale(&self, c: &[u64]) -> Self {
        let w = self.ring.width();
        let mut out = self.data.clone();
        for k in 0..self.n * self.n {
            self.ring.mul_into(&self.data[k * w..(k + 1) * w], c, &mut out[k * w..(k + 1) * w]);
        }
        Matrix { n: self.n, ring: self.ring.clone(), data: out }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(&self.ring, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set_flat(j, i, self.entry(i, j));
            }
        }
        out
    }

    /// Matrix over the single summand `s`.
    pub fn project(&self, s: usize) -> Matrix {
        let sub = self.ring.summand_ring(s);
        self.project_into(s, &sub)
    }

    pub(crate) fn project_into(&self, s: usize, sub: &Ring) -> Matrix {
        let off = self.ring.offset(s);
        let r = self.ring.summands()[s].r;
        let w = self.ring.width();
        let mut data = Vec::with_capacity(self.n * self.n * r);
        for k in 0..self.n * self.n {
            data.extend_from_slice(&self.data[k * w + off..k * w + off + r]);
        }
        Matrix { n: self.n, ring: sub.clone(), data }
    }

    /// Reassembles a matrix from one matrix per summand (CRT).
    pub fn assemble(ring: &Ring, parts: &[Matrix]) -> Result<Matrix> {
        if parts.len() != ring.summand_count() {
            return Err(Error::ShapeMismatch("one part per summand".into()));
        }
        let n = parts[0].n;
        let w = ring.width();
        let mut data = vec![0u64; n * n * w];
        for (s, part) in parts.iter().enumerate() {
            if part.n != n || part.ring.summands() != &ring.summands()[s..s + 1] {
                return Err(Error::RingMismatch);
            }
            let off = ring.offset(s);
            let r = ring.summands()[s].r;
            for k in 0..n * n {
                data[k * w + off..k * w + off + r].copy_from_slice(&part.data[k * r..(k + 1) * r]);
            }
        }
        Ok(Matrix { n, ring: ring.clone(), data })
    }

    /// Two-sided inverse, by Gaussian elimination with unit pivots in every
    /// local summand.
    pub fn inv(&self) -> Result<Self> {
        if self.ring.summand_count() == 1 {
            return invert_local(self);
        }
        let parts = (0..self.ring.summand_count())
            .map(|s| invert_local(&self.project(s)))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(&self.ring, &parts)
    }

    pub fn is_invertible(&self) -> bool {
        self.inv().is_ok()
    }

    /// Determinant when the matrix is invertible; `None` otherwise.
    pub fn det_if_invertible(&self) -> Option<Vec<u64>> {
        let mut det = Vec::with_capacity(self.ring.width());
        for s in 0..self.ring.summand_count() {
            det.extend(det_local(&self.project(s))?);
        }
        Some(det)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::identity(&self.ring, self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    /// `self^-1 * g * self`.
    pub fn conjugate_by(&self, c: &Matrix) -> Result<Matrix> {
        let ci = c.inv()?;
        ci.mul(self)?.mul(c)
    }

    /// Kronecker product; `(A⊗B)[(i,k),(j,l)] = A[i,j] B[k,l]`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        let (na, nb) = (self.n, other.n);
        let n = na * nb;
        let mut out = Self::zero(&self.ring, n);
        let w = self.ring.width();
        let mut tmp = vec![0u64; w];
        for i in 0..na {
            for j in 0..na {
                let a = self.entry(i, j);
                if a.iter().all(|&c| c == 0) {
                    continue;
                }
                for k in 0..nb {
                    for l in 0..nb {
                        self.ring.mul_into(a, other.entry(k, l), &mut tmp);
                        out.set_flat(i * nb + k, j * nb + l, &tmp);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn kron_all(factors: &[Matrix]) -> Result<Matrix> {
        let mut it = factors.iter();
        let mut acc = it.next().ok_or_else(|| Error::ShapeMismatch("no factors".into()))?.clone();
        for f in it {
            acc = acc.kron(f)?;
        }
        Ok(acc)
    }

    /// Block `(bi, bj)` of size `b`.
    pub fn block(&self, bi: usize, bj: usize, b: usize) -> Matrix {
        let mut out = Self::zero(&self.ring, b);
        for i in 0..b {
            for j in 0..b {
                out.set_flat(i, j, self.entry(bi * b + i, bj * b + j));
            }
        }
        out
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, m: &Matrix) {
        let b = m.n;
        for i in 0..b {
            for j in 0..b {
                self.set_flat(bi * b + i, bj * b + j, m.entry(i, j));
            }
        }
    }

    pub fn rows_json(&self) -> String {
        serde_json::to_string(&self.rows_parts()).expect("serializable")
    }

    /// Rows of per-summand coefficient arrays; the ring is left implicit.
    pub fn rows_parts(&self) -> Vec<Vec<Vec<Vec<u64>>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.ring.split_flat(self.entry(i, j))).collect())
            .collect()
    }

    pub fn from_rows_parts(ring: &Ring, rows: &[Vec<Vec<Vec<u64>>>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("rows must form a nonempty square".into()));
        }
        let mut data = Vec::with_capacity(n * n * ring.width());
        for row in rows {
            for e in row {
                data.extend(ring.join_flat(e)?);
            }
        }
        Ok(Matrix { n, ring: ring.clone(), data })
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Integer rendering for `r = 1` rings; used by tests and examples.
    pub fn to_int_rows(&self) -> Option<Vec<Vec<u128>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.ring.to_integer(self.entry(i, j))).collect()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    ring: RingSpec,
    rows: Vec<Vec<Vec<Vec<u64>>>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr { n: self.n, ring: (*self.ring).clone(), rows: self.rows_parts() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(d)?;
        let ring = Arc::new(repr.ring);
        if repr.n == 0 || repr.rows.len() != repr.n || repr.rows.iter().any(|r| r.len() != repr.n) {
            return Err(D::Error::custom("matrix rows do not match n"));
        }
        let mut data = Vec::with_capacity(repr.n * repr.n * ring.width());
        for row in &repr.rows {
            for e in row {
                data.extend(ring.join_flat(e).map_err(D::Error::custom)?);
            }
        }
        Ok(Matrix { n: repr.n, ring, data })
    }
}

/// Elimination over a single local summand.
fn invert_local(a: &Matrix) -> Result<Matrix> {
    let ring = a.ring.clone();
    let n = a.n;
    let mut m = a.clone();
    let mut inv = Matrix::identity(&ring, n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| ring.is_unit_flat(m.entry(r, col))).ok_or(Error::NonInvertible)?;
        if pivot != col {
            m.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
        }
        let p_inv = ring.inv_flat(m.entry(col, col))?;
        m.scale_row(col, &p_inv);
        inv.scale_row(col, &p_inv);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m.entry(r, col).to_vec();
            if ring.is_zero_flat(&f) {
                continue;
            }
            m.sub_row_multiple(r, col, &f);
            inv.sub_row_multiple(r, col, &f);
        }
    }
    Ok(inv)
}

fn det_local(a: &Matrix) -> Option<Vec<u64>> {
    let ring = a.ring.clone();
    let n = a.n;
    let mut m = a.clone();
    let mut det = ring.one_flat();
    for col in 0..n {
        let pivot = (col..n).find(|&r| ring.is_unit_flat(m.entry(r, col)))?;
        if pivot != col {
            m.swap_rows(pivot, col);
            det = ring.neg_flat(&det);
        }
        let pv = m.entry(col, col).to_vec();
        det = ring.mul_flat(&det, &pv);
        let p_inv = ring.inv_flat(&pv).ok()?;
        m.scale_row(col, &p_inv);
        for r in col + 1..n {
            let f = m.entry(r, col).to_vec();
            if !ring.is_zero_flat(&f) {
                m.sub_row_multiple(r, col, &f);
            }
        }
    }
    Some(det)
}

impl Matrix {
    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        let w = self.ring.width();
        let len = self.n * w;
        for k in 0..len {
            self.data.swap(a * len + k, b * len + k);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, c: &[u64]) {
        let w = self.ring.width();
        let mut tmp = vec![0u64; w];
        for j in 0..self.n {
            self.ring.mul_into(self.entry(r, j), c, &mut tmp);
            self.set_flat(r, j, &tmp);
        }
    }

    /// row[r] -= f * row[src]
    pub(crate) fn sub_row_multiple(&mut self, r: usize, src: usize, f: &[u64]) {
        let w = self.ring.width();
        let mut tmp = vec![0u64; w];
        let mut out = vec![0u64; w];
        for j in 0..self.n {
            self.ring.mul_into(self.entry(src, j), f, &mut tmp);
            self.ring.sub_into(self.entry(r, j), &tmp, &mut out);
            self.set_flat(r, j, &out);
        }
    }
}

/// A word in a generator list: `+i` is generator `i` (1-based), `-i` its
/// inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord(pub Vec<i32>);

impl GroupWord {
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::Format("group words cannot contain 0".into()));
        }
        Ok(GroupWord(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|&l| -l).collect())
    }
}

/// Ordered product of generators and their inverses; the empty word gives
/// the identity.
pub fn word_eval(gens: &[Matrix], w: &GroupWord) -> Result<Matrix> {
    let first = gens.first().ok_or(Error::IndexOutOfRange { index: w.0.first().copied().unwrap_or(1) as i64, len: 0 })?;
    let mut inverses: Vec<Option<Matrix>> = vec![None; gens.len()];
    let mut acc = Matrix::identity(first.ring(), first.degree());
    for &l in &w.0 {
        let idx = l.unsigned_abs() as usize;
        if l == 0 || idx > gens.len() {
            return Err(Error::IndexOutOfRange { index: l as i64, len: gens.len() });
        }
        let g = if l > 0 {
            &gens[idx - 1]
        } else {
            if inverses[idx - 1].is_none() {
                inverses[idx - 1] = Some(gens[idx - 1].inv()?);
            }
            inverses[idx - 1].as_ref().unwrap()
        };
        acc = acc.mul(g)?;
    }
    Ok(acc)
}


/// A row vector over a ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RowVector {
    ring: Ring,
    data: Vec<u64>,
}

impl fmt::Debug for RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vec{}", self.canonical_json())
    }
}

impl RowVector {
    pub fn zero(ring: &Ring, n: usize) -> Self {
        RowVector { ring: ring.clone(), data: vec![0; n * ring.width()] }
    }

    pub fn from_ints(ring: &Ring, v: &[i64]) -> Self {
        let mut data = Vec::with_capacity(v.len() * ring.width());
        for &x in v {
            data.extend(ring.int_flat(x));
        }
        RowVector { ring: ring.clone(), data }
    }

    pub fn from_elements(ring: &Ring, v: &[RingElement]) -> Result<Self> {
        let mut data = Vec::new();
        for e in v {
            if !same_ring(e.ring(), ring) {
                return Err(Error::RingMismatch);
            }
            data.extend_from_slice(e.flat());
        }
        Ok(RowVector { ring: ring.clone(), data })
    }

    pub(crate) fn from_flat(ring: &Ring, data: Vec<u64>) -> Self {
        RowVector { ring: ring.clone(), data }
    }

    /// Standard basis vector `e_i` of length `n`.
    pub fn basis(ring: &Ring, n: usize, i: usize) -> Self {
        let mut v = Self::zero(ring, n);
        v.set(i, &ring.one_flat());
        v
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.ring.width()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, i: usize) -> &[u64] {
        let w = self.ring.width();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn set(&mut self, i: usize, v: &[u64]) {
        let w = self.ring.width();
        self.data[i * w..(i + 1) * w].copy_from_slice(v);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    /// Entries `start .. start + len`.
    pub fn slice(&self, start: usize, len: usize) -> RowVector {
        let w = self.ring.width();
        RowVector { ring: self.ring.clone(), data: self.data[start * w..(start + len) * w].to_vec() }
    }

    pub fn concat(parts: &[RowVector]) -> RowVector {
        let ring = parts[0].ring.clone();
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        RowVector { ring, data }
    }

    pub fn scale(&self, c: &[u64]) -> RowVector {
        let w = self.ring.width();
        let mut out = self.data.clone();
        for i in 0..self.len() {
            self.ring.mul_into(&self.data[i * w..(i + 1) * w], c, &mut out[i * w..(i + 1) * w]);
        }
        RowVector { ring: self.ring.clone(), data: out }
    }

    pub fn kron(&self, other: &RowVector) -> RowVector {
        let w = self.ring.width();
        let mut data = Vec::with_capacity(self.len() * other.len() * w);
        let mut tmp = vec![0; w];
        for i in 0..self.len() {
            for j in 0..other.len() {
                self.ring.mul_into(self.get(i), other.get(j), &mut tmp);
                data.extend_from_slice(&tmp);
            }
        }
        RowVector { ring: self.ring.clone(), data }
    }

    pub fn project(&self, s: usize) -> RowVector {
        let sub = self.ring.summand_ring(s);
        let data = (0..self.len()).flat_map(|i| self.ring.project_flat(s, self.get(i))).collect();
        RowVector { ring: sub, data }
    }

    pub fn assemble(ring: &Ring, parts: &[RowVector]) -> Result<RowVector> {
        if parts.len() != ring.summand_count() {
            return Err(Error::ShapeMismatch("one part per summand".into()));
        }
        let n = parts[0].len();
        let w = ring.width();
        let mut data = vec![0; n * w];
        for (s, part) in parts.iter().enumerate() {
            let off = ring.offset(s);
            let r = ring.summands()[s].r;
            if part.len() != n || part.ring.summands() != &ring.summands()[s..s + 1] {
                return Err(Error::RingMismatch);
            }
            for i in 0..n {
                data[i * w + off..i * w + off + r].copy_from_slice(part.get(i));
            }
        }
        Ok(RowVector { ring: ring.clone(), data })
    }

    pub fn canonical_json(&self) -> String {
        let parts: Vec<Vec<Vec<u64>>> = (0..self.len()).map(|i| self.ring.split_flat(self.get(i))).collect();
        serde_json::to_string(&parts).expect("serializable")
    }

    pub fn from_json(ring: &Ring, text: &str) -> Result<Self> {
        let parts: Vec<Vec<Vec<u64>>> = serde_json::from_str(text)?;
        let mut data = Vec::new();
        for p in &parts {
            data.extend(ring.join_flat(p)?);
        }
        Ok(RowVector { ring: ring.clone(), data })
    }

    pub fn to_ints(&self) -> Option<Vec<u128>> {
        (0..self.len()).map(|i| self.ring.to_integer(self.get(i))).collect()
    }
}

/// `v * g`.
pub fn vector_act(v: &RowVector, g: &Matrix) -> Result<RowVector> {
    if !same_ring(&v.ring, &g.ring) {
        return Err(Error::RingMismatch);
    }
    if v.len() != g.n {
        return Err(Error::ShapeMismatch(format!("vector of length {} against degree {}", v.len(), g.n)));
    }
    let ring = &g.ring;
    let w = ring.width();
    let mut out = vec![0u64; g.n * w];
    for i in 0..g.n {
        let a = v.get(i);
        if a.iter().all(|&c| c == 0) {
            continue;
        }
        for j in 0..g.n {
            ring.mul_add_into(a, g.entry(i, j), &mut out[j * w..(j + 1) * w]);
        }
    }
    Ok(RowVector { ring: ring.clone(), data: out })
}
