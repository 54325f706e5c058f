//! Ring embeddings and the induced maps on matrices.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{same_ring, Matrix};
use crate::error::{Error, Result};
use crate::ring::{GaloisRingSpec, Ring, RingSpec};

const ROOT_SEARCH_CAP: u128 = 1 << 22;

/// Target of [`Matrix::ring_change`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingTarget {
    /// Entrywise inclusion `R ⊆ R'`.
    ExtendTo(Ring),
    /// Entrywise replacement by `d x d` blocks over a smaller ring.
    RepTo(RingRepresentation),
    /// `GL(n, ⊕_{i∈I} R_i) -> GL(n, ⊕ R_j)`, identity on the other summands.
    CrtLift { target: Ring, indices: Vec<usize> },
}

/// Inclusion of `⊕ GR(p_i^m_i, r_i)` into `⊕ GR(p_i^m_i, r'_i)` with
/// `r_i | r'_i`, summand by summand.
#[derive(Clone, Debug)]
pub struct ExtensionMap {
    src: Ring,
    dst: Ring,
    /// Per summand, the powers `ξ^0 .. ξ^{r-1}` of the image of `x`.
    powers: Vec<Vec<Vec<u64>>>,
    /// Per summand, the inverse of the coordinate matrix of the basis
    /// `ξ^k x^j` over `Z_{p^m}`.
    coord_inv: Vec<Matrix>,
}

fn summand_ops(spec: &GaloisRingSpec) -> Ring {
    Arc::new(RingSpec::from_summands(vec![spec.clone()]).expect("valid summand"))
}

fn poly_eval(ring: &Ring, coeffs: &[u64], x: &[u64]) -> Vec<u64> {
    let mut acc = ring.zero_flat();
    for &c in coeffs.iter().rev() {
        acc = ring.mul_flat(&acc, x);
        acc = ring.add_flat(&acc, &ring.int_flat(c as i64));
    }
    acc
}

fn poly_derivative(coeffs: &[u64], q: u64) -> Vec<u64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| ((k as u128 * c as u128) % q as u128) as u64).collect()
}

/// The least root (in lexicographic coefficient order) of `f` in `dst`,
/// lifted from the residue field by Newton iteration.
fn find_root(f: &[u64], src: &GaloisRingSpec, dst: &GaloisRingSpec) -> Result<Vec<u64>> {
    let dring = summand_ops(dst);
    if src.r == dst.r && src.modulus == dst.modulus {
        if dst.r == 1 {
            return Ok(dring.int_flat(-(f[0] as i64)));
        }
        let mut x = vec![0; dst.r];
        x[1] = 1;
        return Ok(x);
    }
    let p = dst.p;
    let field_spec = GaloisRingSpec {
        p,
        m: 1,
        r: dst.r,
        modulus: dst.modulus.iter().map(|c| c % p).collect(),
    };
    let field = summand_ops(&field_spec);
    let f_mod: Vec<u64> = f.iter().map(|c| c % p).collect();
    if field_spec.residue_size() > ROOT_SEARCH_CAP {
        return Err(Error::NoSuchEmbedding(format!("residue field of size {} too large", field_spec.residue_size())));
    }
    let mut cand = vec![0u64; dst.r];
    let root = loop {
        if field.is_zero_flat(&poly_eval(&field, &f_mod, &cand)) {
            break cand.clone();
        }
        // lexicographic increment, first coordinate most significant
        let mut i = dst.r;
        loop {
            if i == 0 {
                return Err(Error::NoSuchEmbedding("modulus has no root in the extension".into()));
            }
            i -= 1;
            cand[i] += 1;
            if cand[i] < p {
                break;
            }
            cand[i] = 0;
        }
    };
    let q = dst.characteristic();
    let df = poly_derivative(f, q);
    let mut xi = root;
    for _ in 0..dst.m {
        let fx = poly_eval(&dring, f, &xi);
        if dring.is_zero_flat(&fx) {
            break;
        }
        let dfx = dring.inv_flat(&poly_eval(&dring, &df, &xi))?;
        xi = dring.sub_flat(&xi, &dring.mul_flat(&fx, &dfx));
    }
    debug_assert!(dring.is_zero_flat(&poly_eval(&dring, f, &xi)));
    Ok(xi)
}

impl ExtensionMap {
    pub fn new(src: &Ring, dst: &Ring) -> Result<Self> {
        let (ss, ds) = (src.summands(), dst.summands());
        if ss.len() != ds.len() {
            return Err(Error::NoSuchEmbedding(format!("{src} has no summandwise inclusion into {dst}")));
        }
        let mut powers = Vec::new();
        let mut coord_inv = Vec::new();
        for (a, b) in ss.iter().zip(ds) {
            if a.p != b.p || a.m != b.m || b.r % a.r != 0 {
                return Err(Error::NoSuchEmbedding(format!("GR({}^{},{}) into GR({}^{},{})", a.p, a.m, a.r, b.p, b.m, b.r)));
            }
            let dring = summand_ops(b);
            let xi = find_root(&a.modulus, a, b)?;
            let mut pw = vec![dring.one_flat()];
            for _ in 1..a.r {
                let next = dring.mul_flat(pw.last().unwrap(), &xi);
                pw.push(next);
            }
            // basis ξ^k x^j, index k + r*j
            let zq = RingSpec::zn(b.characteristic());
            let d = b.r / a.r;
            let mut x_pow = vec![dring.one_flat()];
            let mut xvec = dring.zero_flat();
            if b.r > 1 {
                xvec[1] = 1;
            }
            for _ in 1..d {
                let next = dring.mul_flat(x_pow.last().unwrap(), &xvec);
                x_pow.push(next);
            }
            let mut rows = Vec::with_capacity(b.r);
            for xj in &x_pow {
                for pk in &pw {
                    rows.push(dring.mul_flat(pk, xj));
                }
            }
            let basis = Matrix::from_flat_data(&zq, b.r, rows.concat());
            coord_inv.push(basis.inv().map_err(|_| Error::NoSuchEmbedding("degenerate basis".into()))?);
            powers.push(pw);
        }
        Ok(ExtensionMap { src: src.clone(), dst: dst.clone(), powers, coord_inv })
    }

    pub fn source(&self) -> &Ring {
        &self.src
    }

    pub fn target(&self) -> &Ring {
        &self.dst
    }

    /// `[R' : R]` when it is the same for every summand.
    pub fn degree(&self) -> Result<usize> {
        let ds: Vec<usize> = self.src.summands().iter().zip(self.dst.summands()).map(|(a, b)| b.r / a.r).collect();
        if ds.iter().any(|&d| d != ds[0]) {
            return Err(Error::IncompatibleDegrees(format!("relative degrees {ds:?}")));
        }
        Ok(ds[0])
    }

    pub fn map_flat(&self, a: &[u64]) -> Vec<u64> {
        let mut out = self.dst.zero_flat();
        for (i, pw) in self.powers.iter().enumerate() {
            let (so, r) = (self.src.offset(i), self.src.summands()[i].r);
            let (to, rr) = (self.dst.offset(i), self.dst.summands()[i].r);
            let q = self.dst.char_of(i) as u128;
            for k in 0..r {
                let c = a[so + k] as u128;
                if c == 0 {
                    continue;
                }
                for t in 0..rr {
                    out[to + t] = ((out[to + t] as u128 + c * pw[k][t] as u128) % q) as u64;
                }
            }
        }
        out
    }

    /// Writes `b = Σ_j a_j x^j` with `a_j` in the source ring.
    pub fn coordinates(&self, b: &[u64]) -> Result<Vec<Vec<u64>>> {
        let d = self.degree()?;
        let mut out = vec![self.src.zero_flat(); d];
        for (i, inv) in self.coord_inv.iter().enumerate() {
            let (so, r) = (self.src.offset(i), self.src.summands()[i].r);
            let (to, rr) = (self.dst.offset(i), self.dst.summands()[i].r);
            let row = super::RowVector::from_flat(inv.ring(), b[to..to + rr].to_vec());
            let c = super::vector_act(&row, inv)?;
            for (j, slot) in out.iter_mut().enumerate() {
                for k in 0..r {
                    slot[so + k] = c.data()[k + r * j];
                }
            }
        }
        Ok(out)
    }

    pub fn preimage_flat(&self, b: &[u64]) -> Option<Vec<u64>> {
        let mut coords = self.coordinates(b).ok()?;
        if coords[1..].iter().any(|c| c.iter().any(|&v| v != 0)) {
            return None;
        }
        Some(coords.swap_remove(0))
    }

    pub fn map_matrix(&self, a: &Matrix) -> Result<Matrix> {
        if !same_ring(a.ring(), &self.src) {
            return Err(Error::RingMismatch);
        }
        let n = a.degree();
        let mut out = Matrix::zero(&self.dst, n);
        for i in 0..n {
            for j in 0..n {
                out.set_flat(i, j, &self.map_flat(a.entry(i, j)));
            }
        }
        Ok(out)
    }

    pub fn preimage_matrix(&self, b: &Matrix) -> Option<Matrix> {
        let n = b.degree();
        let mut out = Matrix::zero(&self.src, n);
        for i in 0..n {
            for j in 0..n {
                out.set_flat(i, j, &self.preimage_flat(b.entry(i, j))?);
            }
        }
        Some(out)
    }
}

/// A ring embedding `R' -> M_d(R)` fixed by the image `X` of the generator
/// `x` of `R' = GR(p^m, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingRepresentation {
    source: Ring,
    x_image: Matrix,
    powers: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct RepRepr {
    source: RingSpec,
    x_image: Matrix,
}

impl Serialize for RingRepresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepRepr { source: (*self.source).clone(), x_image: self.x_image.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingRepresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RepRepr::deserialize(d)?;
        RingRepresentation::new(&Arc::new(r.source), r.x_image).map_err(serde::de::Error::custom)
    }
}

impl RingRepresentation {
    pub fn new(source: &Ring, x_image: Matrix) -> Result<Self> {
        let [spec] = source.summands() else {
            return Err(Error::NoSuchEmbedding("representations start from a single Galois ring".into()));
        };
        let target = x_image.ring().clone();
        let q = spec.characteristic();
        if target.summands().iter().any(|t| t.characteristic() != q) {
            return Err(Error::NoSuchEmbedding(format!("{target} does not have characteristic {q}")));
        }
        let mut powers = vec![Matrix::identity(&target, x_image.degree())];
        for _ in 0..spec.r {
            let next = powers.last().unwrap().mul(&x_image)?;
            powers.push(next);
        }
        // f(X) = 0
        let mut fx = Matrix::zero(&target, x_image.degree());
        for (k, &c) in spec.modulus.iter().enumerate() {
            fx = fx.add(&powers[k].scale(&target.int_flat(c as i64)))?;
        }
        if fx.data().iter().any(|&c| c != 0) {
            return Err(Error::NoSuchEmbedding("x_image does not satisfy the modulus".into()));
        }
        powers.truncate(spec.r);
        Ok(RingRepresentation { source: source.clone(), x_image, powers })
    }

    /// The regular representation of `GR(p^m, r)` over `Z_{p^m}`: `a` acts
    /// on coordinate rows by right multiplication.
    pub fn regular(source: &Ring) -> Result<Self> {
        let [spec] = source.summands() else {
            return Err(Error::NoSuchEmbedding("representations start from a single Galois ring".into()));
        };
        let zq = RingSpec::zn(spec.characteristic());
        let r = spec.r;
        let mut x = Matrix::zero(&zq, r);
        for i in 0..r - 1 {
            x.set_flat(i, i + 1, &zq.one_flat());
        }
        for j in 0..r {
            x.set_flat(r - 1, j, &zq.int_flat(-(spec.modulus[j] as i64)));
        }
        Self::new(source, x)
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        self.x_image.ring()
    }

    pub fn d(&self) -> usize {
        self.x_image.degree()
    }

    pub fn x_image(&self) -> &Matrix {
        &self.x_image
    }

    pub fn map_flat(&self, a: &[u64]) -> Matrix {
        let t = self.target();
        let mut out = Matrix::zero(t, self.d());
        for (k, &c) in a.iter().enumerate() {
            if c != 0 {
                out = out.add(&self.powers[k].scale(&t.int_flat(c as i64))).expect("same shape");
            }
        }
        out
    }

    /// Inverts [`Self::map_flat`] on its image. Requires the first standard
    /// basis row to separate elements, which holds for the regular
    /// representation.
    pub fn preimage_block(&self, b: &Matrix) -> Option<Vec<u64>> {
        let t = self.target();
        let r = self.source.width();
        if self.powers.iter().enumerate().any(|(k, p)| {
            (0..self.d()).any(|j| !(if j == k { t.is_one_flat(p.entry(0, j)) } else { t.is_zero_flat(p.entry(0, j)) }))
        }) {
            return None;
        }
        if t.summand_count() != 1 || t.width() != 1 || r > self.d() {
            return None;
        }
        let a: Vec<u64> = (0..r).map(|k| b.entry(0, k)[0]).collect();
        (self.map_flat(&a) == *b).then_some(a)
    }

    pub fn map_matrix(&self, a: &Matrix) -> Result<Matrix> {
        if !same_ring(a.ring(), &self.source) {
            return Err(Error::RingMismatch);
        }
        let (n, d) = (a.degree(), self.d());
        let mut out = Matrix::zero(self.target(), n * d);
        for i in 0..n {
            for j in 0..n {
                out.set_block(i, j, &self.map_flat(a.entry(i, j)));
            }
        }
        Ok(out)
    }

    pub fn preimage_matrix(&self, b: &Matrix) -> Option<Matrix> {
        let d = self.d();
        if b.degree() % d != 0 {
            return None;
        }
        let n = b.degree() / d;
        let mut out = Matrix::zero(&self.source, n);
        for i in 0..n {
            for j in 0..n {
                out.set_flat(i, j, &self.preimage_block(&b.block(i, j, d))?);
            }
        }
        Some(out)
    }
}

/// Checks that `indices` select summands of `target` matching `src`.
pub(crate) fn crt_check(src: &Ring, target: &Ring, indices: &[usize]) -> Result<()> {
    if indices.len() != src.summand_count() || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NoSuchEmbedding("summand indices must be increasing, one per source summand".into()));
    }
    for (s, &i) in indices.iter().enumerate() {
        if i >= target.summand_count() || target.summands()[i] != src.summands()[s] {
            return Err(Error::NoSuchEmbedding(format!("summand {i} of {target} does not match {src}")));
        }
    }
    Ok(())
}

pub(crate) fn crt_lift(a: &Matrix, target: &Ring, indices: &[usize]) -> Result<Matrix> {
    let src = a.ring();
    crt_check(src, target, indices)?;
    let n = a.degree();
    let mut out = Matrix::identity(target, n);
    for i in 0..n {
        for j in 0..n {
            let mut e = out.entry(i, j).to_vec();
            for (s, &t) in indices.iter().enumerate() {
                let r = src.summands()[s].r;
                let (so, to) = (src.offset(s), target.offset(t));
                e[to..to + r].copy_from_slice(&a.entry(i, j)[so..so + r]);
            }
            out.set_flat(i, j, &e);
        }
    }
    Ok(out)
}


impl Matrix {
    pub fn ring_change(&self, target: &RingTarget) -> Result<Matrix> {
        match target {
            RingTarget::ExtendTo(dst) => ExtensionMap::new(self.ring(), dst)?.map_matrix(self),
            RingTarget::RepTo(rep) => rep.map_matrix(self),
            RingTarget::CrtLift { target, indices } => crt_lift(self, target, indices),
        }
    }
}
