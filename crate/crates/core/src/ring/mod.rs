//! Finite commutative rings presented as direct sums of Galois rings
//! `GR(p^m, r) = Z_{p^m}[x]/(f)`.
//!
//! Elements are stored flat: the coefficient vectors of all summands are
//! concatenated, each coefficient reduced into `[0, p^m)`. Matrix code works
//! directly on these slices through the `*_into` methods; [`RingElement`] is
//! the owned, ring-tagged value used at API boundaries.

mod poly;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use poly::{inv_mod, is_prime_u64, pow_mod};

/// Shared handle to a ring description. Cloning is cheap.
pub type Ring = Arc<RingSpec>;

/// One local summand `GR(p^m, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaloisRingSpec {
    pub p: u64,
    pub m: u32,
    pub r: usize,
    /// Monic modulus, coefficients `c_0 ..= c_r` with `c_r = 1`.
    pub modulus: Vec<u64>,
}

impl GaloisRingSpec {
    /// The characteristic `p^m`.
    pub fn characteristic(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn size(&self) -> u128 {
        (self.characteristic() as u128).pow(self.r as u32)
    }

    pub fn unit_count(&self) -> u128 {
        let pr = (self.p as u128).pow(self.r as u32);
        (pr - 1) * pr.pow(self.m - 1)
    }

    /// Order of the residue field.
    pub fn residue_size(&self) -> u128 {
        (self.p as u128).pow(self.r as u32)
    }

    fn validate(&self) -> Result<()> {
        if !is_prime_u64(self.p) {
            return Err(Error::NonPrimeP(self.p));
        }
        if self.m == 0 || self.r == 0 {
            return Err(Error::InvalidRing("m and r must be positive".into()));
        }
        if (self.p as u128).pow(self.m) >= 1 << 62 {
            return Err(Error::InvalidRing("characteristic too large".into()));
        }
        if self.modulus.len() != self.r + 1 || self.modulus[self.r] != 1 {
            return Err(Error::InvalidRing("modulus must be monic of degree r".into()));
        }
        let q = self.characteristic();
        if self.modulus.iter().any(|&c| c >= q) {
            return Err(Error::InvalidRing("modulus coefficients must lie in [0, p^m)".into()));
        }
        if !poly::is_irreducible(&self.modulus, self.p) {
            return Err(Error::ReducibleModulus(self.p));
        }
        Ok(())
    }
}

/// Ways to describe a ring to [`RingSpec::make`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingKind {
    IntegerResidue(u64),
    Galois { p: u64, m: u32, r: usize, modulus: Option<Vec<u64>> },
    Field(u64),
    DirectSum(Vec<RingKind>),
}

/// A finite commutative ring as a canonically ordered direct sum of Galois
/// rings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingSpec {
    summands: Vec<GaloisRingSpec>,
    offsets: Vec<usize>,
    chars: Vec<u64>,
    width: usize,
}

#[derive(Serialize, Deserialize)]
struct RingSpecRepr {
    summands: Vec<GaloisRingSpec>,
}

impl Serialize for RingSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RingSpecRepr { summands: self.summands.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RingSpecRepr::deserialize(d)?;
        let spec = RingSpec::from_summands(repr.summands).map_err(serde::de::Error::custom)?;
        Ok(spec)
    }
}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "GR({}^{},{})", s.p, s.m, s.r)?;
        }
        Ok(())
    }
}

impl RingSpec {
    /// Validates and canonically orders the summands.
    pub fn from_summands(mut summands: Vec<GaloisRingSpec>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::InvalidRing("a ring needs at least one summand".into()));
        }
        for s in &summands {
            s.validate()?;
        }
        summands.sort();
        Ok(Self::from_valid(summands))
    }

    fn from_valid(summands: Vec<GaloisRingSpec>) -> Self {
        let mut offsets = Vec::with_capacity(summands.len());
        let mut width = 0;
        for s in &summands {
            offsets.push(width);
            width += s.r;
        }
        let chars = summands.iter().map(|s| s.characteristic()).collect();
        RingSpec { summands, offsets, chars, width }
    }

    pub fn make(kind: &RingKind) -> Result<Ring> {
        Ok(Arc::new(Self::build(kind)?))
    }

    fn build(kind: &RingKind) -> Result<Self> {
        match kind {
            RingKind::IntegerResidue(n) => {
                if *n < 2 {
                    return Err(Error::InvalidRing(format!("Z_{n} is not a ring of size >= 2")));
                }
                if *n >= 1 << 48 {
                    return Err(Error::FactorizationTooLarge(*n));
                }
                let summands = poly::factorize(*n)
                    .into_iter()
                    .map(|(p, e)| GaloisRingSpec { p, m: e, r: 1, modulus: vec![0, 1] })
                    .collect();
                Self::from_summands(summands)
            }
            RingKind::Galois { p, m, r, modulus } => {
                if !is_prime_u64(*p) {
                    return Err(Error::NonPrimeP(*p));
                }
                let modulus = match modulus {
                    Some(f) => f.clone(),
                    None => poly::least_irreducible(*p, *r),
                };
                Self::from_summands(vec![GaloisRingSpec { p: *p, m: *m, r: *r, modulus }])
            }
            RingKind::Field(q) => {
                let f = poly::factorize(*q);
                match f.as_slice() {
                    [(p, r)] => Self::build(&RingKind::Galois { p: *p, m: 1, r: *r as usize, modulus: None }),
                    _ => Err(Error::NonPrimeP(*q)),
                }
            }
            RingKind::DirectSum(parts) => {
                let mut summands = Vec::new();
                for part in parts {
                    summands.extend(Self::build(part)?.summands);
                }
                Self::from_summands(summands)
            }
        }
    }

    /// `Z_n`, panicking on invalid `n`. Test and example convenience.
    pub fn zn(n: u64) -> Ring {
        Self::make(&RingKind::IntegerResidue(n)).expect("valid modulus")
    }

    /// `GF(q)`, panicking when `q` is not a prime power.
    pub fn gf(q: u64) -> Ring {
        Self::make(&RingKind::Field(q)).expect("prime power")
    }

    pub fn summands(&self) -> &[GaloisRingSpec] {
        &self.summands
    }

    pub fn summand_count(&self) -> usize {
        self.summands.len()
    }

    /// Offset of summand `i` inside a flat element.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Number of `u64` words per element.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn size(&self) -> u128 {
        self.summands.iter().map(|s| s.size()).product()
    }

    pub fn unit_count(&self) -> u128 {
        self.summands.iter().map(|s| s.unit_count()).product()
    }

    /// True when the ring is a single field `GF(p^r)`.
    pub fn is_field(&self) -> bool {
        self.summands.len() == 1 && self.summands[0].m == 1
    }

    /// The single-summand ring `GR(p^m, r)` for summand `i`.
    pub fn summand_ring(&self, i: usize) -> Ring {
        Arc::new(Self::from_valid(vec![self.summands[i].clone()]))
    }

    /// The direct sum of the listed summands, in canonical order.
    pub fn sub_ring(&self, indices: &[usize]) -> Ring {
        let mut summands: Vec<_> = indices.iter().map(|&i| self.summands[i].clone()).collect();
        summands.sort();
        Arc::new(Self::from_valid(summands))
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    // ---- flat-slice arithmetic -------------------------------------------

    pub fn zero_flat(&self) -> Vec<u64> {
        vec![0; self.width]
    }

    pub fn one_flat(&self) -> Vec<u64> {
        let mut v = vec![0; self.width];
        for (i, &off) in self.offsets.iter().enumerate() {
            v[off] = 1 % self.chars[i];
        }
        v
    }

    /// The image of an integer under `Z -> R`.
    pub fn int_flat(&self, k: i64) -> Vec<u64> {
        let mut v = vec![0; self.width];
        for (i, &off) in self.offsets.iter().enumerate() {
            v[off] = k.rem_euclid(self.chars[i] as i64) as u64;
        }
        v
    }

    pub fn add_into(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        for (i, s) in self.summands.iter().enumerate() {
            let q = self.chars[i];
            let off = self.offsets[i];
            for k in off..off + s.r {
                let x = a[k] + b[k];
                out[k] = if x >= q { x - q } else { x };
            }
        }
    }

    pub fn sub_into(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        for (i, s) in self.summands.iter().enumerate() {
            let q = self.chars[i];
            let off = self.offsets[i];
            for k in off..off + s.r {
                out[k] = if a[k] >= b[k] { a[k] - b[k] } else { a[k] + q - b[k] };
            }
        }
    }

    pub fn neg_into(&self, a: &[u64], out: &mut [u64]) {
        for (i, s) in self.summands.iter().enumerate() {
            let q = self.chars[i];
            let off = self.offsets[i];
            for k in off..off + s.r {
                out[k] = if a[k] == 0 { 0 } else { q - a[k] };
            }
        }
    }

    /// `out = a * b`. `out` must not alias the inputs.
    pub fn mul_into(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        for i in 0..self.summands.len() {
            self.summand_mul(i, a, b, out);
        }
    }

    /// `acc += a * b`.
    pub fn mul_add_into(&self, a: &[u64], b: &[u64], acc: &mut [u64]) {
        if self.summands.iter().all(|s| s.r == 1) {
            for (i, &q) in self.chars.iter().enumerate() {
                let k = self.offsets[i];
                acc[k] = ((acc[k] as u128 + a[k] as u128 * b[k] as u128) % q as u128) as u64;
            }
            return;
        }
        let mut tmp = vec![0; self.width];
        self.mul_into(a, b, &mut tmp);
        let prev = acc.to_vec();
        self.add_into(&prev, &tmp, acc);
    }

    fn summand_mul(&self, i: usize, a: &[u64], b: &[u64], out: &mut [u64]) {
        let s = &self.summands[i];
        let q = self.chars[i] as u128;
        let off = self.offsets[i];
        let r = s.r;
        if r == 1 {
            out[off] = ((a[off] as u128 * b[off] as u128) % q) as u64;
            return;
        }
        let mut stack = [0u128; 64];
        let mut heap = Vec::new();
        let prod: &mut [u128] = if 2 * r - 1 <= stack.len() {
            &mut stack[..2 * r - 1]
        } else {
            heap.resize(2 * r - 1, 0);
            &mut heap
        };
        let small = q < (1 << 32);
        for x in 0..r {
            let ax = a[off + x] as u128;
            if ax == 0 {
                continue;
            }
            for y in 0..r {
                let t = ax * b[off + y] as u128;
                prod[x + y] = if small { prod[x + y] + t } else { (prod[x + y] + t % q) % q };
            }
        }
        prod.iter_mut().for_each(|c| *c %= q);
        for k in (r..2 * r - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..r {
                let t = c * s.modulus[j] as u128 % q;
                let idx = k - r + j;
                prod[idx] = (prod[idx] + q - t) % q;
            }
            prod[k] = 0;
        }
        for k in 0..r {
            out[off + k] = prod[k] as u64;
        }
    }

    pub fn mul_flat(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.width];
        self.mul_into(a, b, &mut out);
        out
    }

    pub fn add_flat(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.width];
        self.add_into(a, b, &mut out);
        out
    }

    pub fn sub_flat(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.width];
        self.sub_into(a, b, &mut out);
        out
    }

    pub fn neg_flat(&self, a: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.width];
        self.neg_into(a, &mut out);
        out
    }

    pub fn pow_flat(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut result = self.one_flat();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_flat(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_flat(&base, &base);
            }
        }
        result
    }

    pub fn is_zero_flat(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn is_one_flat(&self, a: &[u64]) -> bool {
        a == self.one_flat().as_slice()
    }

    /// A unit has nonzero residue modulo `p` in every summand.
    pub fn is_unit_flat(&self, a: &[u64]) -> bool {
        (0..self.summands.len()).all(|i| self.summand_is_unit(i, a))
    }

    pub(crate) fn summand_is_unit(&self, i: usize, a: &[u64]) -> bool {
        let s = &self.summands[i];
        let off = self.offsets[i];
        a[off..off + s.r].iter().any(|&c| c % s.p != 0)
    }


    pub fn inv_flat(&self, a: &[u64]) -> Result<Vec<u64>> {
        let mut out = vec![0; self.width];
        for (i, s) in self.summands.iter().enumerate() {
            if !self.summand_is_unit(i, a) {
                return Err(Error::NonUnit);
            }
            let off = self.offsets[i];
            if s.r == 1 {
                out[off] = inv_mod(a[off], self.chars[i]).ok_or(Error::NonUnit)?;
            } else {
                let sub = self.summand_ring(i);
                let inv = sub.pow_flat(&a[off..off + s.r], s.unit_count() - 1);
                out[off..off + s.r].copy_from_slice(&inv);
            }
        }
        Ok(out)
    }

    /// Projection onto summand `i`, as a flat element of [`Self::summand_ring`].
    pub fn project_flat(&self, i: usize, a: &[u64]) -> Vec<u64> {
        let off = self.offsets[i];
        a[off..off + self.summands[i].r].to_vec()
    }

    /// Reads an element of a `r = 1` ring as the unique integer in `[0, |R|)`
    /// with these residues (CRT).
    pub fn to_integer(&self, a: &[u64]) -> Option<u128> {
        if self.summands.iter().any(|s| s.r != 1) {
            return None;
        }
        let mut acc: u128 = 0;
        let mut modulus: u128 = 1;
        for (i, &q) in self.chars.iter().enumerate() {
            let q = q as u128;
            let target = a[self.offsets[i]] as u128;
            // acc + modulus * t == target (mod q)
            let inv = inv_mod((modulus % q) as u64, q as u64)? as u128;
            let diff = (target + q - acc % q) % q;
            let t = diff * inv % q;
            acc += modulus * t;
            modulus *= q;
        }
        Some(acc)
    }

    /// Every element of the ring, in lexicographic order of the flat words.
    /// Only for small rings.
    pub fn all_flat(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for (i, s) in self.summands.iter().enumerate() {
            let q = self.chars[i];
            for _ in 0..s.r {
                let mut next = Vec::with_capacity(out.len() * q as usize);
                for prefix in &out {
                    for c in 0..q {
                        let mut v = prefix.clone();
                        v.push(c);
                        next.push(v);
                    }
                }
                out = next;
            }
        }
        out
    }

    pub fn units_flat(&self) -> Vec<Vec<u64>> {
        self.all_flat().into_iter().filter(|a| self.is_unit_flat(a)).collect()
    }

    /// Splits a flat element into per-summand coefficient arrays.
    pub fn split_flat(&self, a: &[u64]) -> Vec<Vec<u64>> {
        (0..self.summands.len()).map(|i| self.project_flat(i, a)).collect()
    }

    /// Inverse of [`Self::split_flat`], validating ranges.
    pub fn join_flat(&self, parts: &[Vec<u64>]) -> Result<Vec<u64>> {
        if parts.len() != self.summands.len() {
            return Err(Error::Format("wrong number of summand coefficient arrays".into()));
        }
        let mut out = Vec::with_capacity(self.width);
        for (i, part) in parts.iter().enumerate() {
            if part.len() != self.summands[i].r || part.iter().any(|&c| c >= self.chars[i]) {
                return Err(Error::Format("coefficient array out of range".into()));
            }
            out.extend_from_slice(part);
        }
        Ok(out)
    }

    /// A uniformly random element.
    pub fn random_flat(&self, rng: &mut impl rand::Rng) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.width);
        for (i, s) in self.summands.iter().enumerate() {
            for _ in 0..s.r {
                out.push(rng.gen_range(0..self.chars[i]));
            }
        }
        out
    }

    pub fn random_unit_flat(&self, rng: &mut impl rand::Rng) -> Vec<u64> {
        loop {
            let a = self.random_flat(rng);
            if self.is_unit_flat(&a) {
                return a;
            }
        }
    }

    /// The element with index `idx` in the order of [`Self::all_flat`].
    pub fn nth_flat(&self, mut idx: u128) -> Vec<u64> {
        let mut out = vec![0; self.width];
        for (i, s) in self.summands.iter().enumerate().rev() {
            let q = self.chars[i] as u128;
            for k in (0..s.r).rev() {
                out[self.offsets[i] + k] = (idx % q) as u64;
                idx /= q;
            }
        }
        out
    }

    /// Multiplicative order of a unit, by trial over divisors of the
    /// unit-group exponent. Single-summand fields only.
    pub fn field_order_of(&self, a: &[u64]) -> Option<u128> {
        if !self.is_field() || !self.is_unit_flat(a) {
            return None;
        }
        let n = self.unit_count();
        let mut ord = n;
        for (l, _) in poly::factorize(u64::try_from(n).ok()?) {
            while ord % l as u128 == 0 && self.is_one_flat(&self.pow_flat(a, ord / l as u128)) {
                ord /= l as u128;
            }
        }
        Some(ord)
    }

    /// The least generator of the unit group of a field.
    pub fn primitive_element(&self) -> Option<Vec<u64>> {
        if !self.is_field() {
            return None;
        }
        let n = self.unit_count();
        (1..self.size()).map(|i| self.nth_flat(i)).find(|a| self.field_order_of(a) == Some(n))
    }

    pub(crate) fn char_of(&self, i: usize) -> u64 {
        self.chars[i]
    }
}

/// An owned ring element tagged with its ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: Ring,
    coeffs: Vec<u64>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.ring.split_flat(&self.coeffs))
    }
}

impl RingElement {
    pub fn from_flat(ring: &Ring, coeffs: Vec<u64>) -> Result<Self> {
        let parts: Vec<Vec<u64>> = ring.split_flat(&coeffs);
        ring.join_flat(&parts)?;
        Ok(RingElement { ring: ring.clone(), coeffs })
    }

    /// Per-summand coefficient arrays.
    pub fn from_parts(ring: &Ring, parts: &[Vec<u64>]) -> Result<Self> {
        Ok(RingElement { ring: ring.clone(), coeffs: ring.join_flat(parts)? })
    }

    pub fn from_int(ring: &Ring, k: i64) -> Self {
        RingElement { ring: ring.clone(), coeffs: ring.int_flat(k) }
    }

    pub fn zero(ring: &Ring) -> Self {
        RingElement { ring: ring.clone(), coeffs: ring.zero_flat() }
    }

    pub fn one(ring: &Ring) -> Self {
        RingElement { ring: ring.clone(), coeffs: ring.one_flat() }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn flat(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn parts(&self) -> Vec<Vec<u64>> {
        self.ring.split_flat(&self.coeffs)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(RingElement { ring: self.ring.clone(), coeffs: self.ring.add_flat(&self.coeffs, &other.coeffs) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(RingElement { ring: self.ring.clone(), coeffs: self.ring.sub_flat(&self.coeffs, &other.coeffs) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(RingElement { ring: self.ring.clone(), coeffs: self.ring.mul_flat(&self.coeffs, &other.coeffs) })
    }

    pub fn neg(&self) -> Self {
        RingElement { ring: self.ring.clone(), coeffs: self.ring.neg_flat(&self.coeffs) }
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(RingElement { ring: self.ring.clone(), coeffs: self.ring.inv_flat(&self.coeffs)? })
    }

    pub fn pow(&self, e: u128) -> Self {
        RingElement { ring: self.ring.clone(), coeffs: self.ring.pow_flat(&self.coeffs, e) }
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit_flat(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.ring.is_zero_flat(&self.coeffs)
    }

    pub fn to_integer(&self) -> Option<u128> {
        self.ring.to_integer(&self.coeffs)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.parts()).expect("serializable")
    }

    pub fn from_json(ring: &Ring, text: &str) -> Result<Self> {
        let parts: Vec<Vec<u64>> = serde_json::from_str(text)?;
        Self::from_parts(ring, &parts)
    }
}

// ---- Teichmüller digits and Frobenius ------------------------------------

/// Teichmüller digits `(t_0, .., t_{m-1})` of one summand, each digit a
/// coefficient vector of length `r`.
pub type SummandDigits = Vec<Vec<u64>>;

/// The Teichmüller representative of `a` in summand ring `sub`
/// (`a^(q^(m-1))` with `q = p^r`).
fn teichmuller_rep(sub: &RingSpec, a: &[u64]) -> Vec<u64> {
    let s = &sub.summands[0];
    let mut t = a.to_vec();
    for _ in 1..s.m {
        t = sub.pow_flat(&t, s.residue_size());
    }
    t
}

/// Digits of every summand: `a = sum_i t_i p^i` with `t_i` in `T ∪ {0}`.
pub fn teichmuller_decompose(a: &RingElement) -> Vec<SummandDigits> {
    let ring = a.ring();
    (0..ring.summand_count())
        .map(|i| {
            let sub = ring.summand_ring(i);
            let s = &sub.summands[0];
            let mut cur = ring.project_flat(i, a.flat());
            let mut digits = Vec::with_capacity(s.m as usize);
            for _ in 0..s.m {
                let t = teichmuller_rep(&sub, &cur);
                let diff = sub.sub_flat(&cur, &t);
                // diff is divisible by p; divide each coefficient exactly
                cur = diff.iter().map(|&c| c / s.p).collect();
                digits.push(t);
            }
            digits
        })
        .collect()
}

/// Inverse of [`teichmuller_decompose`].
pub fn teichmuller_recompose(ring: &Ring, digits: &[SummandDigits]) -> Result<RingElement> {
    if digits.len() != ring.summand_count() {
        return Err(Error::RingMismatch);
    }
    let mut parts = Vec::with_capacity(digits.len());
    for (i, ds) in digits.iter().enumerate() {
        let sub = ring.summand_ring(i);
        let mut acc = sub.zero_flat();
        let mut scale = sub.one_flat();
        let p = sub.int_flat(ring.summands[i].p as i64);
        for t in ds {
            acc = sub.add_flat(&acc, &sub.mul_flat(t, &scale));
            scale = sub.mul_flat(&scale, &p);
        }
        parts.push(acc);
    }
    RingElement::from_parts(ring, &parts)
}

/// An element of `Aut_0(R)`: a lifted Frobenius power on every summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingAutomorphism {
    /// Frobenius exponent `e_i` per summand, `0 <= e_i < r_i`.
    pub exponents: Vec<u32>,
}

impl RingAutomorphism {
    pub fn identity(ring: &RingSpec) -> Self {
        RingAutomorphism { exponents: vec![0; ring.summand_count()] }
    }

    pub fn new(ring: &RingSpec, exponents: Vec<u32>) -> Result<Self> {
        if exponents.len() != ring.summand_count() {
            return Err(Error::InvalidAutomorphism("one exponent per summand".into()));
        }
        for (e, s) in exponents.iter().zip(ring.summands()) {
            if *e as usize >= s.r {
                return Err(Error::InvalidAutomorphism(format!("exponent {e} >= rank {}", s.r)));
            }
        }
        Ok(RingAutomorphism { exponents })
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn compose(&self, other: &Self, ring: &RingSpec) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(ring.summands())
            .map(|((a, b), s)| (a + b) % s.r as u32)
            .collect();
        RingAutomorphism { exponents }
    }

    /// Applies the automorphism to a flat element.
    pub fn apply_flat(&self, ring: &RingSpec, a: &[u64]) -> Vec<u64> {
        let mut out = a.to_vec();
        for (i, s) in ring.summands().iter().enumerate() {
            let e = self.exponents[i];
            if e == 0 {
                continue;
            }
            let sub = ring.summand_ring(i);
            let cur = ring.project_flat(i, a);
            // digitwise t -> t^(p^e), reassembled as sum t_i^(p^e) p^i
            let mut rest = cur;
            let mut acc = sub.zero_flat();
            let mut scale = sub.one_flat();
            let p = sub.int_flat(s.p as i64);
            for _ in 0..s.m {
                let t = teichmuller_rep(&sub, &rest);
                let diff = sub.sub_flat(&rest, &t);
                rest = diff.iter().map(|&c| c / s.p).collect();
                let tp = sub.pow_flat(&t, (s.p as u128).pow(e));
                acc = sub.add_flat(&acc, &sub.mul_flat(&tp, &scale));
                scale = sub.mul_flat(&scale, &p);
            }
            let off = ring.offset(i);
            out[off..off + s.r].copy_from_slice(&acc);
        }
        out
    }
}

pub fn frobenius_apply(aut: &RingAutomorphism, a: &RingElement) -> Result<RingElement> {
    if aut.exponents.len() != a.ring().summand_count() {
        return Err(Error::RingMismatch);
    }
    RingElement::from_flat(a.ring(), aut.apply_flat(a.ring(), a.flat()))
}
