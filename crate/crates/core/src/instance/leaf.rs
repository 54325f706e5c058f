use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{Ring, RingKind, RingSpec};
use crate::rng::Rng;

/// Largest multiplicative group for which diagonal-cyclic membership is
/// decided by a discrete-log table walk.
const DIAGONAL_ORDER_CAP: u64 = 1 << 20;

/// A base group with a cheap membership test. Every kind lives over a finite
/// field `GF(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseGroupSpec {
    /// `{[[1,x],[0,1]]}` over `GF(p)`, cyclic of order `p`.
    UnipotentCyclic { p: u64 },
    SpecialLinear { n: usize, q: u64 },
    GeneralLinear { n: usize, q: u64 },
    /// `<diag(w^e, w^{2e}, .., w^{ne})>` for the least primitive element
    /// `w` and `e = power`.
    DiagonalCyclic {
        n: usize,
        q: u64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        power: u64,
    },
    /// The trivial subgroup of `GL(n, q)`.
    Trivial { n: usize, q: u64 },
}

fn one() -> u64 {
    1
}

fn is_one(x: &u64) -> bool {
    *x == 1
}

impl BaseGroupSpec {
    pub fn q(&self) -> u64 {
        match *self {
            BaseGroupSpec::UnipotentCyclic { p } => p,
            BaseGroupSpec::SpecialLinear { q, .. }
            | BaseGroupSpec::GeneralLinear { q, .. }
            | BaseGroupSpec::DiagonalCyclic { q, .. }
            | BaseGroupSpec::Trivial { q, .. } => q,
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            BaseGroupSpec::UnipotentCyclic { .. } => 2,
            BaseGroupSpec::SpecialLinear { n, .. }
            | BaseGroupSpec::GeneralLinear { n, .. }
            | BaseGroupSpec::DiagonalCyclic { n, .. }
            | BaseGroupSpec::Trivial { n, .. } => n,
        }
    }

    /// Contribution of this leaf label to the tree size.
    pub fn label_size(&self) -> usize {
        let extra = match *self {
            BaseGroupSpec::DiagonalCyclic { power, .. } => (63 - power.max(1).leading_zeros()) as usize,
            _ => 0,
        };
        self.degree() + (64 - self.q().leading_zeros()) as usize + extra
    }

    pub fn ring(&self) -> Result<Ring> {
        let q = self.q();
        if let BaseGroupSpec::UnipotentCyclic { p } = self {
            if !crate::ring::is_prime_u64(*p) {
                return Err(Error::NonPrimeP(*p));
            }
        }
        if q > u32::MAX as u64 {
            return Err(Error::TypeError(format!("field size {q} exceeds the ring cap")));
        }
        RingSpec::make(&RingKind::Field(q))
    }

    pub fn validate(&self) -> Result<Ring> {
        let ring = self.ring()?;
        let n = self.degree();
        if n == 0 || n > super::DEGREE_CAP {
            return Err(Error::TypeError(format!("leaf degree {n} outside 1..={}", super::DEGREE_CAP)));
        }
        if let BaseGroupSpec::DiagonalCyclic { q, power, .. } = self {
            if q - 1 > DIAGONAL_ORDER_CAP {
                return Err(Error::TypeError(format!("diagonal-cyclic needs q - 1 <= {DIAGONAL_ORDER_CAP}")));
            }
            if *power == 0 {
                return Err(Error::TypeError("diagonal-cyclic power must be positive".into()));
            }
        }
        Ok(ring)
    }

    pub fn generators(&self) -> Result<Vec<Matrix>> {
        let ring = self.validate()?;
        let n = self.degree();
        let one = ring.one_flat();
        Ok(match self {
            BaseGroupSpec::UnipotentCyclic { .. } => {
                vec![Matrix::from_ints(&ring, &[vec![1, 1], vec![0, 1]])?]
            }
            BaseGroupSpec::SpecialLinear { .. } => transvections(&ring, n),
            BaseGroupSpec::GeneralLinear { .. } => {
                let mut gens = transvections(&ring, n);
                let mut d = Matrix::identity(&ring, n);
                d.set_flat(0, 0, &primitive(&ring));
                if !d.is_identity() {
                    gens.push(d);
                }
                gens
            }
            BaseGroupSpec::DiagonalCyclic { power, .. } => {
                let w = ring.pow_flat(&primitive(&ring), *power as u128);
                let mut d = Matrix::identity(&ring, n);
                let mut acc = one;
                for i in 0..n {
                    acc = ring.mul_flat(&acc, &w);
                    d.set_flat(i, i, &acc);
                }
                vec![d]
            }
            BaseGroupSpec::Trivial { .. } => vec![Matrix::identity(&ring, n)],
        })
    }

    /// The membership procedure of the leaf group.
    pub fn contains(&self, g: &Matrix) -> bool {
        let Ok(ring) = self.validate() else { return false };
        let n = self.degree();
        if g.ring().as_ref() != ring.as_ref() || g.degree() != n {
            return false;
        }
        match self {
            BaseGroupSpec::UnipotentCyclic { .. } => {
                ring.is_one_flat(g.entry(0, 0)) && ring.is_zero_flat(g.entry(1, 0)) && ring.is_one_flat(g.entry(1, 1))
            }
            BaseGroupSpec::SpecialLinear { .. } => g.det_if_invertible().is_some_and(|d| ring.is_one_flat(&d)),
            BaseGroupSpec::GeneralLinear { .. } => g.is_invertible(),
            BaseGroupSpec::DiagonalCyclic { .. } => self.diagonal_exponent(g).is_some(),
            BaseGroupSpec::Trivial { .. } => g.is_identity(),
        }
    }

    pub fn random_element(&self, rng: &mut Rng) -> Result<Matrix> {
        let ring = self.validate()?;
        let n = self.degree();
        Ok(match self {
            BaseGroupSpec::UnipotentCyclic { .. } => {
                let mut g = Matrix::identity(&ring, 2);
                g.set_flat(0, 1, &ring.random_flat(rng));
                g
            }
            BaseGroupSpec::SpecialLinear { .. } => {
                let mut g = random_invertible(&ring, n, rng);
                let d = g.det_if_invertible().expect("invertible");
                g.scale_row(0, &ring.inv_flat(&d)?);
                g
            }
            BaseGroupSpec::GeneralLinear { .. } => random_invertible(&ring, n, rng),
            BaseGroupSpec::DiagonalCyclic { q, .. } => {
                let k = rng.gen_range(0..q - 1);
                self.generators()?[0].pow(k as i64)?
            }
            BaseGroupSpec::Trivial { .. } => Matrix::identity(&ring, n),
        })
    }
}

fn primitive(ring: &Ring) -> Vec<u64> {
    ring.primitive_element().expect("finite fields have primitive elements")
}

/// `x_{i,i+1}(b)` and `x_{i+1,i}(b)` for `b` in the power basis.
fn transvections(ring: &Ring, n: usize) -> Vec<Matrix> {
    if n == 1 {
        return vec![Matrix::identity(ring, 1)];
    }
    let mut out = Vec::new();
    for i in 0..n - 1 {
        for j in 0..ring.width() {
            let mut b = ring.zero_flat();
            b[j] = 1;
            for (r, c) in [(i, i + 1), (i + 1, i)] {
                let mut t = Matrix::identity(ring, n);
                t.set_flat(r, c, &b);
                out.push(t);
            }
        }
    }
    out
}

/// Uniform element of `GL(n, R)`, by rejection in each local summand.
pub(crate) fn random_invertible(ring: &Ring, n: usize, rng: &mut Rng) -> Matrix {
    if ring.summand_count() > 1 {
        let parts: Vec<Matrix> =
            (0..ring.summand_count()).map(|s| random_invertible(&ring.summand_ring(s), n, rng)).collect();
        return Matrix::assemble(ring, &parts).expect("parts match the summands");
    }
    loop {
        let mut g = Matrix::zero(ring, n);
        for i in 0..n {
            for j in 0..n {
                g.set_flat(i, j, &ring.random_flat(rng));
            }
        }
        if g.is_invertible() {
            return g;
        }
    }
}

impl BaseGroupSpec {
    /// The least `k` with `g = d^k` for the diagonal generator `d`.
    fn diagonal_exponent(&self, g: &Matrix) -> Option<u64> {
        let n = g.degree();
        let ring = g.ring();
        for i in 0..n {
            for j in 0..n {
                if i != j && !ring.is_zero_flat(g.entry(i, j)) {
                    return None;
                }
            }
        }
        let d = self.generators().ok()?.remove(0);
        let mut acc = ring.one_flat();
        let step = d.entry(0, 0).to_vec();
        let mut k = 0;
        loop {
            if acc == g.entry(0, 0) {
                let cand = d.pow(k as i64).ok()?;
                return (cand == *g).then_some(k);
            }
            acc = ring.mul_flat(&acc, &step);
            k += 1;
            if ring.is_one_flat(&acc) {
                return None;
            }
        }
    }
}
