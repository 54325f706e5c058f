use serde::{Deserialize, Serialize};

use super::{same_ring, Matrix};
use crate::error::{Error, Result};

/// A permutation of `{0, .., m-1}` stored as its image list. Serialized
/// 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(m: usize) -> Self {
        Perm((0..m).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Format(format!("not a permutation: {images:?}")));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// The transposition of `a` and `b` in `S_m`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..m).collect();
        v.swap(a, b);
        Perm(v)
    }

    /// `i -> i + 1 mod m`.
    pub fn cycle(m: usize) -> Self {
        Perm((0..m).map(|i| (i + 1) % m).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut v = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j] = i;
        }
        Perm(v)
    }

    /// Apply `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Self {
        Perm(self.0.iter().map(|&i| other.0[i]).collect())
    }
}

impl Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.iter().map(|&i| i + 1).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<usize>::deserialize(d)?;
        if v.contains(&0) {
            return Err(D::Error::custom("permutation images are 1-based"));
        }
        Perm::new(v.into_iter().map(|i| i - 1).collect()).map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WreathMode {
    Imprimitive,
    Product,
}

/// Linear representation of the wreath element `(h_1, .., h_m; k)`.
///
/// Coordinate `i` is transformed by `h_i` and moved to position `k(i)`.
pub fn wreath_rep(hs: &[Matrix], k: &Perm, mode: WreathMode) -> Result<Matrix> {
    let m = hs.len();
    if k.degree() != m {
        return Err(Error::ArityMismatch { expected: k.degree(), got: m });
    }
    let first = hs.first().ok_or(Error::ArityMismatch { expected: 1, got: 0 })?;
    let n = first.degree();
    for h in hs {
        if !same_ring(h.ring(), first.ring()) {
            return Err(Error::RingMismatch);
        }
        if h.degree() != n {
            return Err(Error::DegreeMismatch(format!("block degrees {} and {}", n, h.degree())));
        }
    }
    match mode {
        WreathMode::Imprimitive => {
            let mut out = Matrix::zero(first.ring(), n * m);
            for (i, h) in hs.iter().enumerate() {
                out.set_block(i, k.apply(i), h);
            }
            Ok(out)
        }
        WreathMode::Product => {
            let size = n.checked_pow(m as u32).filter(|&s| s <= 1 << 12).ok_or_else(|| {
                Error::DegreeMismatch(format!("product action degree {n}^{m} too large"))
            })?;
            let kron = Matrix::kron_all(hs)?;
            let perm = tensor_position_matrix(first, n, k, size);
            kron.mul(&perm)
        }
    }
}

/// Permutation matrix sending `e_{a_0} ⊗ .. ⊗ e_{a_{m-1}}` to the tensor
/// whose factor at position `k(i)` is `e_{a_i}`.
fn tensor_position_matrix(like: &Matrix, n: usize, k: &Perm, size: usize) -> Matrix {
    let m = k.degree();
    let mut out = Matrix::zero(like.ring(), size);
    let one = like.ring().one_flat();
    let mut digits = vec![0usize; m];
    for src in 0..size {
        let mut x = src;
        for i in (0..m).rev() {
            digits[i] = x % n;
            x /= n;
        }
        let mut dst = 0;
        let mut moved = vec![0usize; m];
        for i in 0..m {
            moved[k.apply(i)] = digits[i];
        }
        for &d in &moved {
            dst = dst * n + d;
        }
        out.set_flat(src, dst, &one);
    }
    out
}

/// Product in the wreath product: `(h, k)(h', k') = ((h_i h'_{k(i)})_i, k then k')`.
pub fn wreath_compose(a: (&[Matrix], &Perm), b: (&[Matrix], &Perm)) -> Result<(Vec<Matrix>, Perm)> {
    let (h, k) = a;
    let (h2, k2) = b;
    let hs = h
        .iter()
        .enumerate()
        .map(|(i, hi)| hi.mul(&h2[k.apply(i)]))
        .collect::<Result<Vec<_>>>()?;
    Ok((hs, k.then(k2)))
}
