//! Derivation trees: the secret description of a matrix group, its public
//! evaluation, and the embeddings of leaf groups into the evaluated group.

mod hom;
mod leaf;
mod random;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use hom::{hom_apply, hom_build, hom_random, HomSpec, LeafHom};
pub use leaf::BaseGroupSpec;
pub use random::tree_random;

use crate::error::{Error, Result};
use crate::matrix::{wreath_rep, ExtensionMap, Matrix, Perm, RingRepresentation, RingTarget, WreathMode};
use crate::ring::{Ring, RingSpec};
use crate::rng;

pub const DEGREE_CAP: usize = 64;
pub const RING_SIZE_CAP: u128 = 1 << 32;

/// Label of an internal node. Unary unless it carries an arity `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum OperationLabel {
    /// Entrywise inclusion into an extension ring.
    RingExtend { target: RingSpec },
    /// Regular representation of `GF(p^d)` by `d x d` blocks over `GF(p)`.
    RingRep { d: usize },
    /// Place the child ring as the listed summands of `target`, identity elsewhere.
    CrtAssemble { target: RingSpec, indices: Vec<usize> },
    Tensor { s: usize },
    /// Internal direct product of groups supported on disjoint ring summands.
    DirectSameDegree { s: usize },
    /// `H wr S_m` acting on `m` coordinate blocks.
    WreathImprimitive { m: usize },
    /// `H wr S_m` acting on the `m`-fold tensor power.
    WreathProduct { m: usize },
    /// Conjugation by a matrix derived from the seed.
    Conjugate { seed: u64 },
}

impl OperationLabel {
    pub fn arity(&self) -> usize {
        match self {
            OperationLabel::Tensor { s } | OperationLabel::DirectSameDegree { s } => *s,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivationTree {
    Leaf(BaseGroupSpec),
    Node { op: OperationLabel, children: Vec<DerivationTree> },
}

/// Ring, degree and the ring summands on which the group can differ from
/// the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeType {
    pub ring: Ring,
    pub degree: usize,
    pub support: Vec<bool>,
}

/// Data derived once per node and reused by evaluation and the solvers.
#[derive(Clone, Debug)]
pub(crate) enum Aux {
    None,
    Extension(ExtensionMap),
    Rep(RingRepresentation),
    Conjugator { c: Matrix, c_inv: Matrix },
}

/// A type-checked tree mirror.
#[derive(Clone, Debug)]
pub(crate) struct Annotated {
    pub ty: NodeType,
    pub aux: Aux,
    pub children: Vec<Annotated>,
}

fn type_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::TypeError(msg.into()))
}

impl DerivationTree {
    pub fn leaf(spec: BaseGroupSpec) -> Self {
        DerivationTree::Leaf(spec)
    }

    pub fn node(op: OperationLabel, children: Vec<DerivationTree>) -> Self {
        DerivationTree::Node { op, children }
    }

    /// `L(T)`: label sizes plus edges. Internal labels count 1.
    pub fn size(&self) -> usize {
        match self {
            DerivationTree::Leaf(spec) => spec.label_size(),
            DerivationTree::Node { children, .. } => {
                1 + children.len() + children.iter().map(|c| c.size()).sum::<usize>()
            }
        }
    }

    /// Leaves in depth-first order; leaf ids index this list.
    pub fn leaves(&self) -> Vec<&BaseGroupSpec> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a BaseGroupSpec>) {
        match self {
            DerivationTree::Leaf(s) => out.push(s),
            DerivationTree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DerivationTree::Leaf(_) => 0,
            DerivationTree::Node { children, .. } => 1 + children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    /// Type-checks the tree and returns the root type.
    pub fn check(&self) -> Result<NodeType> {
        Ok(self.annotate_with(false)?.ty)
    }

    pub(crate) fn annotate(&self) -> Result<Annotated> {
        self.annotate_with(true)
    }

    /// `full` also derives the conjugating matrices.
    pub(crate) fn annotate_with(&self, full: bool) -> Result<Annotated> {
        match self {
            DerivationTree::Leaf(spec) => {
                let ring = spec.validate()?;
                let support = vec![true; ring.summand_count()];
                Ok(Annotated { ty: NodeType { ring, degree: spec.degree(), support }, aux: Aux::None, children: vec![] })
            }
            DerivationTree::Node { op, children } => {
                if children.len() != op.arity() || children.is_empty() {
                    return type_err(format!("{op:?} has {} children", children.len()));
                }
                let kids = children.iter().map(|c| c.annotate_with(full)).collect::<Result<Vec<_>>>()?;
                let (ty, aux) = node_type(op, &kids, full)?;
                if ty.degree > DEGREE_CAP || ty.ring.size() > RING_SIZE_CAP {
                    return type_err(format!("degree {} over {} exceeds the caps", ty.degree, ty.ring));
                }
                Ok(Annotated { ty, aux, children: kids })
            }
        }
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Parses and type-checks.
    pub fn from_json(text: &str) -> Result<Self> {
        let t: DerivationTree = serde_json::from_str(text)?;
        t.check()?;
        Ok(t)
    }

    /// Embedding path of every leaf, in leaf order.
    pub fn provenance(&self) -> Result<Vec<Vec<EmbedStep>>> {
        let a = self.annotate_with(false)?;
        Ok(self.paths(&a))
    }

    fn paths(&self, a: &Annotated) -> Vec<Vec<EmbedStep>> {
        let DerivationTree::Node { op, children } = self else {
            return vec![vec![]];
        };
        let degrees: Vec<usize> = a.children.iter().map(|c| c.ty.degree).collect();
        let mut out = Vec::new();
        for (pos, (child, ca)) in children.iter().zip(&a.children).enumerate() {
            for mut p in child.paths(ca) {
                p.push(step_for(op, &degrees, pos));
                out.push(p);
            }
        }
        out
    }
}

fn step_for(op: &OperationLabel, degrees: &[usize], position: usize) -> EmbedStep {
    match op {
        OperationLabel::RingExtend { target } => EmbedStep::Extend { target: target.clone() },
        OperationLabel::RingRep { d } => EmbedStep::Rep { d: *d },
        OperationLabel::CrtAssemble { target, indices } => {
            EmbedStep::CrtLift { target: target.clone(), indices: indices.clone() }
        }
        OperationLabel::Tensor { .. } => EmbedStep::TensorPad { degrees: degrees.to_vec(), position },
        OperationLabel::DirectSameDegree { .. } => EmbedStep::Direct,
        OperationLabel::WreathImprimitive { m } => EmbedStep::Wreath { mode: WreathMode::Imprimitive, m: *m },
        OperationLabel::WreathProduct { m } => EmbedStep::Wreath { mode: WreathMode::Product, m: *m },
        OperationLabel::Conjugate { seed } => EmbedStep::Conjugate { seed: *seed },
    }
}

pub(crate) fn node_type(op: &OperationLabel, kids: &[Annotated], full: bool) -> Result<(NodeType, Aux)> {
    let first = &kids[0].ty;
    let all = |ring: &Ring| vec![true; ring.summand_count()];
    match op {
        OperationLabel::RingExtend { target } => {
            let target = Arc::new(target.clone());
            let map = ExtensionMap::new(&first.ring, &target).map_err(|e| Error::TypeError(e.to_string()))?;
            let ty = NodeType { ring: target, degree: first.degree, support: first.support.clone() };
            Ok((ty, Aux::Extension(map)))
        }
        OperationLabel::RingRep { d } => {
            let [spec] = first.ring.summands() else {
                return type_err("ring-rep needs a single Galois ring");
            };
            if spec.r != *d || *d < 2 {
                return type_err(format!("ring-rep degree {d} does not match GR({}^{},{})", spec.p, spec.m, spec.r));
            }
            let rep = RingRepresentation::regular(&first.ring)?;
            let ring = rep.target().clone();
            let ty = NodeType { support: all(&ring), ring, degree: first.degree * d };
            Ok((ty, Aux::Rep(rep)))
        }
        OperationLabel::CrtAssemble { target, indices } => {
            let target = Arc::new(target.clone());
            crate::matrix::crt_check(&first.ring, &target, indices).map_err(|e| Error::TypeError(e.to_string()))?;
            let mut support = vec![false; target.summand_count()];
            for (s, &i) in indices.iter().enumerate() {
                support[i] = first.support[s];
            }
            Ok((NodeType { ring: target, degree: first.degree, support }, Aux::None))
        }
        OperationLabel::Tensor { .. } => {
            let mut degree = 1usize;
            let mut support = vec![false; first.support.len()];
            for k in kids {
                if k.ty.ring != first.ring {
                    return type_err("tensor factors must share a ring");
                }
                degree = degree.saturating_mul(k.ty.degree);
                support.iter_mut().zip(&k.ty.support).for_each(|(s, &t)| *s |= t);
            }
            Ok((NodeType { ring: first.ring.clone(), degree, support }, Aux::None))
        }
        OperationLabel::DirectSameDegree { .. } => {
            let mut support = vec![false; first.support.len()];
            for k in kids {
                if k.ty.ring != first.ring || k.ty.degree != first.degree {
                    return type_err("direct factors must share ring and degree");
                }
                for (s, &t) in support.iter_mut().zip(&k.ty.support) {
                    if *s && t {
                        return type_err("direct factors must live on disjoint ring summands");
                    }
                    *s |= t;
                }
            }
            Ok((NodeType { ring: first.ring.clone(), degree: first.degree, support }, Aux::None))
        }
        OperationLabel::WreathImprimitive { m } | OperationLabel::WreathProduct { m } => {
            if *m < 2 {
                return type_err("wreath products need m >= 2");
            }
            let degree = if matches!(op, OperationLabel::WreathImprimitive { .. }) {
                first.degree.saturating_mul(*m)
            } else {
                if first.degree < 2 {
                    return type_err("product action needs block degree >= 2");
                }
                first.degree.checked_pow(*m as u32).unwrap_or(usize::MAX)
            };
            if degree > DEGREE_CAP {
                return type_err(format!("wreath degree exceeds {DEGREE_CAP}"));
            }
            Ok((NodeType { support: all(&first.ring), ring: first.ring.clone(), degree }, Aux::None))
        }
        OperationLabel::Conjugate { .. } if !full => Ok((first.clone(), Aux::None)),
        OperationLabel::Conjugate { seed } => {
            let (c, c_inv) = conjugator_pair(&first.ring, first.degree, *seed)?;
            Ok((first.clone(), Aux::Conjugator { c, c_inv }))
        }
    }
}

/// The invertible matrix a `Conjugate { seed }` node conjugates by.
pub fn conjugator(ring: &Ring, n: usize, seed: u64) -> Matrix {
    leaf::random_invertible(ring, n, &mut rng::from_seed(seed))
}

type ConjugatorKey = (RingSpec, usize, u64);

/// `(c, c^-1)` for a conjugation node. Trees are annotated on every query,
/// so recent pairs are kept.
fn conjugator_pair(ring: &Ring, n: usize, seed: u64) -> Result<(Matrix, Matrix)> {
    static CACHE: Mutex<Option<HashMap<ConjugatorKey, (Matrix, Matrix)>>> = Mutex::new(None);
    let key = ((**ring).clone(), n, seed);
    if let Some(hit) = CACHE.lock().expect("cache lock").as_ref().and_then(|m| m.get(&key)) {
        return Ok(hit.clone());
    }
    let c = conjugator(ring, n, seed);
    let c_inv = c.inv()?;
    let mut guard = CACHE.lock().expect("cache lock");
    let map = guard.get_or_insert_with(HashMap::new);
    if map.len() >= 512 {
        map.clear();
    }
    map.insert(key, (c.clone(), c_inv.clone()));
    Ok((c, c_inv))
}

/// One step of a leaf's embedding into the root group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum EmbedStep {
    Extend { target: RingSpec },
    Rep { d: usize },
    CrtLift { target: RingSpec, indices: Vec<usize> },
    /// Kronecker product with identities of the given degrees.
    TensorPad { degrees: Vec<usize>, position: usize },
    Direct,
    /// Block at coordinate 0, identities elsewhere.
    Wreath { mode: WreathMode, m: usize },
    Conjugate { seed: u64 },
}

impl EmbedStep {
    pub fn apply(&self, h: &Matrix) -> Result<Matrix> {
        match self {
            EmbedStep::Extend { target } => h.ring_change(&RingTarget::ExtendTo(Arc::new(target.clone()))),
            EmbedStep::Rep { .. } => h.ring_change(&RingTarget::RepTo(RingRepresentation::regular(h.ring())?)),
            EmbedStep::CrtLift { target, indices } => {
                h.ring_change(&RingTarget::CrtLift { target: Arc::new(target.clone()), indices: indices.clone() })
            }
            EmbedStep::TensorPad { degrees, position } => {
                if degrees.get(*position) != Some(&h.degree()) {
                    return Err(Error::DegreeMismatch("tensor padding position".into()));
                }
                let factors: Vec<Matrix> = degrees
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| if i == *position { h.clone() } else { Matrix::identity(h.ring(), d) })
                    .collect();
                Matrix::kron_all(&factors)
            }
            EmbedStep::Direct => Ok(h.clone()),
            EmbedStep::Wreath { mode, m } => wreath_rep(&coordinate_zero(h, *m), &Perm::identity(*m), *mode),
            EmbedStep::Conjugate { seed } => {
                let (c, c_inv) = conjugator_pair(h.ring(), h.degree(), *seed)?;
                c_inv.mul(h)?.mul(&c)
            }
        }
    }
}

fn coordinate_zero(h: &Matrix, m: usize) -> Vec<Matrix> {
    let mut hs = vec![Matrix::identity(h.ring(), h.degree()); m];
    hs[0] = h.clone();
    hs
}

/// Runs a provenance path.
pub fn replay(path: &[EmbedStep], h: &Matrix) -> Result<Matrix> {
    path.iter().try_fold(h.clone(), |acc, s| s.apply(&acc))
}

/// The public group together with the secret leaf embeddings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInstance {
    pub n: usize,
    pub ring: Ring,
    pub gens: Vec<Matrix>,
    pub provenance: Vec<Vec<EmbedStep>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    ring: RingSpec,
    gens: Vec<Vec<Vec<Vec<Vec<u64>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<Vec<EmbedStep>>>,
}

impl GroupInstance {
    fn repr(&self, with_provenance: bool) -> InstanceRepr {
        InstanceRepr {
            n: self.n,
            ring: (*self.ring).clone(),
            gens: self.gens.iter().map(|g| g.rows_parts()).collect(),
            provenance: with_provenance.then(|| self.provenance.clone()),
        }
    }

    /// Full serialization including provenance (secret).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.repr(true)).expect("serializable")
    }

    /// The public key: degree, ring and generators.
    pub fn public_json(&self) -> String {
        serde_json::to_string(&self.repr(false)).expect("serializable")
    }

    pub fn public(&self) -> GroupInstance {
        GroupInstance { provenance: vec![], ..self.clone() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: InstanceRepr = serde_json::from_str(text)?;
        let ring: Ring = Arc::new(r.ring);
        let gens = r.gens.iter().map(|g| Matrix::from_rows_parts(&ring, g)).collect::<Result<Vec<_>>>()?;
        if gens.iter().any(|g| g.degree() != r.n) {
            return Err(Error::Format("generator degree differs from n".into()));
        }
        if gens.iter().any(|g| !g.is_invertible()) {
            return Err(Error::NonInvertible);
        }
        Ok(GroupInstance { n: r.n, ring, gens, provenance: r.provenance.unwrap_or_default() })
    }

    /// SHA-256 of the public serialization, hex encoded.
    pub fn fingerprint(&self) -> String {
        fingerprint(self.public_json().as_bytes())
    }
}

pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Evaluates the tree to its public generators.
pub fn tree_eval(t: &DerivationTree) -> Result<GroupInstance> {
    let a = t.annotate()?;
    let mut gens = Vec::new();
    eval_gens(t, &a, &mut gens)?;
    let provenance = t.paths(&a);
    Ok(GroupInstance { n: a.ty.degree, ring: a.ty.ring, gens, provenance })
}

fn push_unique(out: &mut Vec<Matrix>, g: Matrix) {
    if !out.contains(&g) {
        out.push(g);
    }
}

pub(crate) fn eval_gens(t: &DerivationTree, a: &Annotated, out: &mut Vec<Matrix>) -> Result<()> {
    let (op, children) = match t {
        DerivationTree::Leaf(spec) => {
            for g in spec.generators()? {
                push_unique(out, g);
            }
            return Ok(());
        }
        DerivationTree::Node { op, children } => (op, children),
    };
    let mut kid_gens = Vec::new();
    for (c, ca) in children.iter().zip(&a.children) {
        let mut g = Vec::new();
        eval_gens(c, ca, &mut g)?;
        kid_gens.push(g);
    }
    let degrees: Vec<usize> = a.children.iter().map(|c| c.ty.degree).collect();
    match (op, &a.aux) {
        (_, Aux::Extension(map)) => {
            for g in &kid_gens[0] {
                push_unique(out, map.map_matrix(g)?);
            }
        }
        (_, Aux::Rep(rep)) => {
            for g in &kid_gens[0] {
                push_unique(out, rep.map_matrix(g)?);
            }
        }
        (_, Aux::Conjugator { c, c_inv }) => {
            for g in &kid_gens[0] {
                push_unique(out, c_inv.mul(g)?.mul(c)?);
            }
        }
        (OperationLabel::WreathImprimitive { m } | OperationLabel::WreathProduct { m }, _) => {
            let step = step_for(op, &degrees, 0);
            let mode = if matches!(op, OperationLabel::WreathProduct { .. }) {
                WreathMode::Product
            } else {
                WreathMode::Imprimitive
            };
            for g in &kid_gens[0] {
                push_unique(out, step.apply(g)?);
            }
            let ids = vec![Matrix::identity(&a.children[0].ty.ring, degrees[0]); *m];
            push_unique(out, wreath_rep(&ids, &Perm::transposition(*m, 0, 1), mode)?);
            if *m >= 3 {
                push_unique(out, wreath_rep(&ids, &Perm::cycle(*m), mode)?);
            }
        }
        _ => {
            for (pos, gens) in kid_gens.iter().enumerate() {
                let step = step_for(op, &degrees, pos);
                for g in gens {
                    push_unique(out, step.apply(g)?);
                }
            }
        }
    }
    Ok(())
}

/// The image of a leaf-group element in the root group.
pub fn leaf_embed(t: &DerivationTree, leaf: usize, h: &Matrix) -> Result<Matrix> {
    let leaves = t.leaves();
    let spec = leaves.get(leaf).ok_or(Error::IndexOutOfRange { index: leaf as i64, len: leaves.len() })?;
    if !spec.contains(h) {
        return Err(Error::NotInLeafGroup);
    }
    let paths = t.provenance()?;
    replay(&paths[leaf], h)
}

/// Generators of the two public subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSample {
    pub gens_a: Vec<Matrix>,
    pub gens_b: Vec<Matrix>,
    pub warnings: Vec<String>,
}

pub const CENTRALIZING_WARNING: &str = "G_A centralizes G_B";

/// One or two random elements of every leaf group for each side, embedded
/// into the root group.
pub fn subgroup_sample(t: &DerivationTree, seed: u64) -> Result<SubgroupSample> {
    use rand::Rng as _;
    let paths = t.provenance()?;
    let leaves = t.leaves();
    let mut rng = rng::from_seed(seed);
    let mut sides = [Vec::new(), Vec::new()];
    for (spec, path) in leaves.iter().zip(&paths) {
        for side in sides.iter_mut() {
            for _ in 0..rng.gen_range(1..=2) {
                let h = spec.random_element(&mut rng)?;
                side.push(replay(path, &h)?);
            }
        }
    }
    let [gens_a, gens_b] = sides;
    let mut warnings = Vec::new();
    let commute = gens_a.iter().all(|a| gens_b.iter().all(|b| a.mul_unchecked(b) == b.mul_unchecked(a)));
    if commute {
        warnings.push(CENTRALIZING_WARNING.to_string());
    }
    Ok(SubgroupSample { gens_a, gens_b, warnings })
}
