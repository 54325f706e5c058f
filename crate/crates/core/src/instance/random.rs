use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{node_type, Annotated, BaseGroupSpec, DerivationTree, OperationLabel, DEGREE_CAP, RING_SIZE_CAP};
use crate::trapdoor::SCALAR_CAP;
use crate::error::{Error, Result};
use crate::ring::{GaloisRingSpec, Ring, RingKind, RingSpec};
use crate::rng::{self, Rng};

const PRIMES: [u64; 4] = [2, 3, 5, 7];
const FIELDS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];
/// Largest residue field produced by a random ring extension.
const EXTENSION_FIELD_CAP: u128 = 1 << 12;

/// Non-trivial leaves available to the generator.
fn leaf_pool() -> Vec<BaseGroupSpec> {
    let mut pool: Vec<BaseGroupSpec> = PRIMES.iter().map(|&p| BaseGroupSpec::UnipotentCyclic { p }).collect();
    for &q in &FIELDS {
        for n in 1..=3 {
            if n >= 2 {
                pool.push(BaseGroupSpec::SpecialLinear { n, q });
            }
            if n >= 2 || q > 2 {
                pool.push(BaseGroupSpec::GeneralLinear { n, q });
            }
            if q > 2 {
                pool.push(BaseGroupSpec::DiagonalCyclic { n, q, power: 1 });
            }
        }
    }
    pool
}

type Built = (DerivationTree, Annotated);

struct Generator {
    rng: Rng,
    pool: Vec<BaseGroupSpec>,
    min_leaf: usize,
}

/// A random well-typed tree with `L(T) <= budget`, deterministic in `seed`.
pub fn tree_random(budget: usize, seed: u64) -> Result<DerivationTree> {
    let pool = leaf_pool();
    let min_leaf = pool.iter().map(|l| l.label_size()).min().expect("nonempty pool");
    if budget < min_leaf {
        return Err(Error::BudgetTooSmall(budget));
    }
    let mut g = Generator { rng: rng::from_seed(seed), pool, min_leaf };
    Ok(g.any(budget).0)
}

impl Generator {
    fn leaf_where(&mut self, budget: usize, ok: impl Fn(&BaseGroupSpec) -> bool) -> Option<Built> {
        let fits: Vec<&BaseGroupSpec> = self.pool.iter().filter(|l| l.label_size() <= budget && ok(l)).collect();
        let spec = (*fits.choose(&mut self.rng)?).clone();
        let tree = DerivationTree::Leaf(spec);
        let a = tree.annotate_with(false).expect("pool leaves are valid");
        Some((tree, a))
    }

    fn any(&mut self, budget: usize) -> Built {
        // An internal node needs its own label, one edge and a child.
        let can_branch = budget >= self.min_leaf + 2;
        let p_leaf = (8.0 / budget as f64).min(1.0);
        if can_branch && !self.rng.gen_bool(p_leaf) {
            return self.internal(budget);
        }
        self.leaf_where(budget, |_| true).expect("budget covers the smallest leaf")
    }

    /// Splits `total` into `s` parts of at least `least` each.
    fn split(&mut self, total: usize, s: usize, least: usize) -> Option<Vec<usize>> {
        let spare = total.checked_sub(s * least)?;
        let mut cuts: Vec<usize> = (0..s - 1).map(|_| self.rng.gen_range(0..=spare)).collect();
        cuts.sort_unstable();
        let mut parts = Vec::with_capacity(s);
        let mut prev = 0;
        for c in cuts.into_iter().chain([spare]) {
            parts.push(least + c - prev);
            prev = c;
        }
        Some(parts)
    }

    fn finish(&mut self, op: OperationLabel, kids: Vec<Built>) -> std::result::Result<Built, Vec<Built>> {
        let (trees, anns): (Vec<_>, Vec<_>) = kids.into_iter().unzip();
        match node_type(&op, &anns, false) {
            Ok((ty, aux)) if ty.degree <= DEGREE_CAP && ty.ring.size() <= RING_SIZE_CAP => {
                Ok((DerivationTree::Node { op, children: trees }, Annotated { ty, aux, children: anns }))
            }
            _ => Err(trees.into_iter().zip(anns).collect()),
        }
    }

    fn internal(&mut self, budget: usize) -> Built {
        let kind = self.rng.gen_range(0..8);
        if kind == 3 || kind == 4 {
            let s = self.rng.gen_range(2..=3);
            // Direct factors also pay for their CRT wrapper.
            let least = if kind == 4 { self.min_leaf + 2 } else { self.min_leaf };
            if let Some(parts) = self.split(budget - 1 - s, s, least) {
                let built = if kind == 3 { self.tensor(&parts) } else { self.direct(&parts) };
                match built {
                    Ok(b) => return b,
                    Err(first) => return self.unary(first, None),
                }
            }
        }
        let child = self.any(budget - 2);
        self.unary(child, Some(kind))
    }

    /// Wraps `child` in a unary operation valid for its type, preferring `kind`.
    fn unary(&mut self, child: Built, kind: Option<usize>) -> Built {
        let ty = &child.1.ty;
        let mut options: Vec<(usize, OperationLabel)> = Vec::new();
        let k = self.rng.gen_range(2..=3);
        if ty.ring.summands().iter().all(|s| s.m == 1) {
            if let Some(target) = extension_of(&ty.ring, k) {
                options.push((0, OperationLabel::RingExtend { target }));
            }
        }
        if let [s] = ty.ring.summands() {
            if s.r >= 2 && ty.degree * s.r <= DEGREE_CAP {
                options.push((1, OperationLabel::RingRep { d: s.r }));
            }
        }
        let extra = *FIELDS.choose(&mut self.rng).expect("nonempty");
        if let Some((target, indices)) = crt_target(&ty.ring, extra) {
            options.push((2, OperationLabel::CrtAssemble { target, indices }));
        }
        let m = self.rng.gen_range(2..=3);
        if ty.degree * m <= DEGREE_CAP {
            options.push((5, OperationLabel::WreathImprimitive { m }));
        }
        if ty.degree >= 2 && ty.degree.pow(m as u32) <= DEGREE_CAP && ty.ring.unit_count() <= SCALAR_CAP {
            options.push((6, OperationLabel::WreathProduct { m }));
        }
        let seed = rng::child_seed(&mut self.rng);
        options.push((7, OperationLabel::Conjugate { seed }));
        let pick = match options.iter().position(|(k, _)| Some(*k) == kind) {
            Some(i) => i,
            None => self.rng.gen_range(0..options.len()),
        };
        let op = options.swap_remove(pick).1;
        match self.finish(op, vec![child]) {
            Ok(b) => b,
            Err(mut kids) => {
                let op = OperationLabel::Conjugate { seed };
                self.finish(op, vec![kids.remove(0)]).unwrap_or_else(|_| unreachable!("conjugation preserves the type"))
            }
        }
    }

    /// A second copy of `b` under a fresh conjugation, when the budget allows.
    fn conjugated_copy(&mut self, b: &Built, budget: usize) -> Option<Built> {
        if b.0.size() + 2 > budget {
            return None;
        }
        let seed = rng::child_seed(&mut self.rng);
        self.finish(OperationLabel::Conjugate { seed }, vec![b.clone()]).ok()
    }

    fn tensor(&mut self, parts: &[usize]) -> std::result::Result<Built, Built> {
        let first = self.any(parts[0]);
        let ring = first.1.ty.ring.clone();
        if ring.unit_count() > SCALAR_CAP {
            return Err(first);
        }
        let mut kids = vec![first];
        for &b in &parts[1..] {
            let cand = self.any(b);
            let next = if cand.1.ty.ring == ring {
                Some(cand)
            } else if let Some(leaf) = self.leaf_where(b, |l| l.ring().is_ok_and(|r| r == ring)) {
                Some(leaf)
            } else {
                self.conjugated_copy(&kids[0], b)
            };
            match next {
                Some(n) => kids.push(n),
                None => return Err(kids.swap_remove(0)),
            }
        }
        let s = kids.len();
        self.finish(OperationLabel::Tensor { s }, kids).map_err(|mut k| k.swap_remove(0))
    }

    /// Children on disjoint summands of the direct sum of their rings.
    fn direct(&mut self, parts: &[usize]) -> std::result::Result<Built, Built> {
        let s = parts.len();
        let first = self.any(parts[0] - 2);
        let degree = first.1.ty.degree;
        let mut kids = vec![first];
        for &b in &parts[1..] {
            let cand = self.any(b - 2);
            let next = if cand.1.ty.degree == degree {
                Some(cand)
            } else if let Some(leaf) = self.leaf_where(b - 2, |l| l.degree() == degree) {
                Some(leaf)
            } else {
                self.conjugated_copy(&kids[0], b - 2)
            };
            match next {
                Some(n) => kids.push(n),
                None => return Err(kids.swap_remove(0)),
            }
        }
        let mut summands: Vec<GaloisRingSpec> = Vec::new();
        for k in &kids {
            summands.extend(k.1.ty.ring.summands().iter().cloned());
        }
        let target = match RingSpec::from_summands(summands) {
            Ok(t) if t.size() <= RING_SIZE_CAP => t,
            _ => return Err(kids.swap_remove(0)),
        };
        let mut used = vec![false; target.summand_count()];
        let mut wrapped = Vec::with_capacity(s);
        for k in kids {
            let mut indices = Vec::new();
            for sm in k.1.ty.ring.summands() {
                let i = (0..used.len()).find(|&i| !used[i] && &target.summands()[i] == sm).expect("summand present");
                used[i] = true;
                indices.push(i);
            }
            let op = OperationLabel::CrtAssemble { target: target.clone(), indices };
            match self.finish(op, vec![k]) {
                Ok(w) => wrapped.push(w),
                Err(mut k) => return Err(if wrapped.is_empty() { k.remove(0) } else { unwrap_crt(wrapped.swap_remove(0)) }),
            }
        }
        self.finish(OperationLabel::DirectSameDegree { s }, wrapped).map_err(|mut w| unwrap_crt(w.swap_remove(0)))
    }
}

fn unwrap_crt(b: Built) -> Built {
    match b {
        (DerivationTree::Node { mut children, .. }, mut a) => (children.remove(0), a.children.remove(0)),
        leaf => leaf,
    }
}

/// `⊕ GF(p^{r k})` over the summands `GF(p^r)` of `ring`.
fn extension_of(ring: &Ring, k: usize) -> Option<RingSpec> {
    let parts: Vec<RingKind> = ring
        .summands()
        .iter()
        .map(|s| RingKind::Galois { p: s.p, m: s.m, r: s.r * k, modulus: None })
        .collect();
    let target = RingSpec::make(&RingKind::DirectSum(parts)).ok()?;
    if target.summands().iter().any(|s| s.residue_size() > EXTENSION_FIELD_CAP) || target.size() > RING_SIZE_CAP {
        return None;
    }
    Some((*target).clone())
}

/// `ring ⊕ GF(q)` with the positions of the summands of `ring`.
fn crt_target(ring: &Ring, q: u64) -> Option<(RingSpec, Vec<usize>)> {
    let extra = RingSpec::make(&RingKind::Field(q)).ok()?;
    let mut summands = ring.summands().to_vec();
    summands.extend(extra.summands().iter().cloned());
    let target = RingSpec::from_summands(summands).ok()?;
    if target.size() > RING_SIZE_CAP {
        return None;
    }
    let mut used = vec![false; target.summand_count()];
    let mut indices = Vec::new();
    for sm in ring.summands() {
        let i = (0..used.len()).find(|&i| !used[i] && &target.summands()[i] == sm)?;
        used[i] = true;
        indices.push(i);
    }
    Some((target, indices))
}
