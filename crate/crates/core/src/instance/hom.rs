//! Secret homomorphisms built along a derivation tree.
//!
//! Every leaf gets either the trivial map or an entrywise ring automorphism.
//! An internal node applies the same operation to the children's images, so
//! the image group has a derivation tree of the same shape.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{tree_eval, Annotated, Aux, BaseGroupSpec, DerivationTree, OperationLabel};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, RingTarget};
use crate::ring::{Ring, RingAutomorphism};
use crate::rng;
use crate::trapdoor::{member, replay, scalar_units, Witness};

/// The map chosen at a leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum LeafHom {
    /// Everything goes to the identity.
    Trivial,
    /// Entrywise application of a ring automorphism.
    Frobenius { aut: RingAutomorphism },
}

impl LeafHom {
    fn validate(&self, spec: &BaseGroupSpec) -> Result<()> {
        if let LeafHom::Frobenius { aut } = self {
            RingAutomorphism::new(&*spec.ring()?, aut.exponents.clone())?;
        }
        Ok(())
    }

    fn image_spec(&self, spec: &BaseGroupSpec) -> BaseGroupSpec {
        match self {
            LeafHom::Trivial => BaseGroupSpec::Trivial { n: spec.degree(), q: spec.q() },
            // Every leaf kind is closed under field automorphisms.
            LeafHom::Frobenius { .. } => spec.clone(),
        }
    }

    pub fn apply(&self, h: &Matrix) -> Matrix {
        match self {
            LeafHom::Trivial => Matrix::identity(h.ring(), h.degree()),
            LeafHom::Frobenius { aut } => h.map_entries(|e| aut.apply_flat(h.ring(), e)),
        }
    }
}

/// A homomorphism `f: G -> H` with its image tree and generator table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpec {
    pub source: DerivationTree,
    /// One choice per leaf of `source`, in leaf order.
    pub choices: Vec<LeafHom>,
    pub image: DerivationTree,
    /// `f` of each generator of `tree_eval(source)`.
    pub gen_images: Vec<Matrix>,
}

impl HomSpec {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: HomSpec = serde_json::from_str(text)?;
        let rebuilt = hom_build(&h.source, &h.choices)?;
        if rebuilt != h {
            return Err(Error::Format("homomorphism tables do not match the tree".into()));
        }
        Ok(h)
    }
}

/// Builds the homomorphism with the given leaf choices.
pub fn hom_build(t: &DerivationTree, choices: &[LeafHom]) -> Result<HomSpec> {
    let leaves = t.leaves();
    if leaves.len() != choices.len() {
        return Err(Error::TypeError(format!("{} choices for {} leaves", choices.len(), leaves.len())));
    }
    for (c, spec) in choices.iter().zip(&leaves) {
        c.validate(spec)?;
    }
    let image = image_tree(t, choices);
    let a = t.annotate()?;
    let ia = image.annotate()?;
    check_defined(t, &a, choices)?;
    let gens = tree_eval(t)?.gens;
    let gen_images = gens
        .iter()
        .map(|g| apply_at(t, &a, choices, &image, &ia, g)?.ok_or(Error::NotInGroup))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomSpec { source: t.clone(), choices: choices.to_vec(), image, gen_images })
}

/// A homomorphism with independently drawn leaf choices: the trivial map
/// with probability 1/4, otherwise a uniform Frobenius power.
pub fn hom_random(t: &DerivationTree, seed: u64) -> Result<HomSpec> {
    use rand::Rng as _;
    let mut r = rng::from_seed(seed);
    let mut choices = Vec::new();
    for spec in t.leaves() {
        let ring = spec.ring()?;
        choices.push(if r.gen_bool(0.25) {
            LeafHom::Trivial
        } else {
            let rank = ring.summands()[0].r as u32;
            LeafHom::Frobenius { aut: RingAutomorphism::new(&ring, vec![r.gen_range(0..rank)])? }
        });
    }
    hom_build(t, &choices)
}

/// `f(g)`; `NotInGroup` when `g` is not in the source group.
pub fn hom_apply(h: &HomSpec, g: &Matrix) -> Result<Matrix> {
    let a = h.source.annotate()?;
    crate::trapdoor::check_shape(&a, g)?;
    let ia = h.image.annotate()?;
    apply_at(&h.source, &a, &h.choices, &h.image, &ia, g)?.ok_or(Error::NotInGroup)
}

fn image_tree(t: &DerivationTree, choices: &[LeafHom]) -> DerivationTree {
    match t {
        DerivationTree::Leaf(spec) => DerivationTree::Leaf(choices[0].image_spec(spec)),
        DerivationTree::Node { op, children } => {
            let mut offset = 0;
            let kids = children
                .iter()
                .map(|c| {
                    let k = c.leaves().len();
                    let out = image_tree(c, &choices[offset..offset + k]);
                    offset += k;
                    out
                })
                .collect();
            DerivationTree::Node { op: op.clone(), children: kids }
        }
    }
}

fn apply_at(
    t: &DerivationTree,
    a: &Annotated,
    choices: &[LeafHom],
    image: &DerivationTree,
    ia: &Annotated,
    g: &Matrix,
) -> Result<Option<Matrix>> {
    let Some(w) = member(t, a, g)? else { return Ok(None) };
    let mapped = map_witness(t, choices, &w)?;
    replay(image, ia, &mapped).map(Some)
}

fn map_witness(t: &DerivationTree, choices: &[LeafHom], w: &Witness) -> Result<Witness> {
    let bad = || Error::Format("witness does not match the tree".into());
    let DerivationTree::Node { children, .. } = t else {
        let Witness::Leaf { h } = w else { return Err(bad()) };
        return Ok(Witness::Leaf { h: choices[0].apply(h) });
    };
    let mut offsets = vec![0];
    for c in children {
        offsets.push(offsets.last().unwrap() + c.leaves().len());
    }
    let sub = |i: usize, w: &Witness| map_witness(&children[i], &choices[offsets[i]..offsets[i + 1]], w);
    Ok(match w {
        Witness::Leaf { .. } => return Err(bad()),
        Witness::Unary { child } => Witness::Unary { child: Box::new(sub(0, child)?) },
        Witness::Tensor { factors } => {
            Witness::Tensor { factors: factors.iter().enumerate().map(|(i, f)| sub(i, f)).collect::<Result<_>>()? }
        }
        Witness::Direct { parts } => {
            Witness::Direct { parts: parts.iter().enumerate().map(|(i, p)| sub(i, p)).collect::<Result<_>>()? }
        }
        Witness::Wreath { k, hs } => {
            Witness::Wreath { k: k.clone(), hs: hs.iter().map(|h| sub(0, h)).collect::<Result<_>>()? }
        }
    })
}

/// Kronecker factors are only determined up to scalars whose product is 1.
/// The node map is well defined when the children's images of those scalars
/// also multiply to the identity.
fn check_defined(t: &DerivationTree, a: &Annotated, choices: &[LeafHom]) -> Result<()> {
    let DerivationTree::Node { op, children } = t else { return Ok(()) };
    if matches!(op, OperationLabel::Tensor { .. } | OperationLabel::WreathProduct { .. }) {
        scalar_table(t, a, choices)?;
        return Ok(());
    }
    let offsets = leaf_offsets(children);
    for (i, c) in children.iter().enumerate() {
        check_defined(c, &a.children[i], &choices[offsets[i]..offsets[i + 1]])?;
    }
    Ok(())
}

fn leaf_offsets(children: &[DerivationTree]) -> Vec<usize> {
    let mut offsets = vec![0];
    for c in children {
        offsets.push(offsets.last().unwrap() + c.leaves().len());
    }
    offsets
}

type ScalarTable = HashMap<Vec<u64>, Vec<u64>>;

/// `λ -> μ` for every scalar `λI` in the group, where `f(λI) = μI`.
fn scalar_table(t: &DerivationTree, a: &Annotated, choices: &[LeafHom]) -> Result<ScalarTable> {
    let ring = &a.ty.ring;
    let (op, children) = match t {
        DerivationTree::Leaf(spec) => {
            let units = scalar_units(ring)?;
            let n = spec.degree();
            return Ok(units
                .into_iter()
                .filter(|u| spec.contains(&Matrix::scalar(ring, n, u)))
                .map(|u| {
                    let mu = match &choices[0] {
                        LeafHom::Trivial => ring.one_flat(),
                        LeafHom::Frobenius { aut } => aut.apply_flat(ring, &u),
                    };
                    (u, mu)
                })
                .collect());
        }
        DerivationTree::Node { op, children } => (op, children),
    };
    let offsets = leaf_offsets(children);
    let mut kids = Vec::new();
    for (i, c) in children.iter().enumerate() {
        kids.push(scalar_table(c, &a.children[i], &choices[offsets[i]..offsets[i + 1]])?);
    }
    // Pushes a child's table through a ring change applied to 1x1 matrices.
    let relabel = |f: &dyn Fn(&Matrix) -> Result<Matrix>| -> Result<ScalarTable> {
        let child_ring = &a.children[0].ty.ring;
        let image = |x: &[u64]| f(&Matrix::scalar(child_ring, 1, x)).map(|m| scalar_of(&m));
        let mut out = HashMap::new();
        for (l, m) in &kids[0] {
            if let (Some(l), Some(m)) = (image(l)?, image(m)?) {
                out.insert(l, m);
            }
        }
        Ok(out)
    };
    match (op, &a.aux) {
        (_, Aux::Conjugator { .. }) | (OperationLabel::WreathImprimitive { .. }, _) => Ok(kids.swap_remove(0)),
        (_, Aux::Extension(map)) => relabel(&|m| map.map_matrix(m)),
        (_, Aux::Rep(rep)) => relabel(&|m| rep.map_matrix(m)),
        (OperationLabel::CrtAssemble { indices, .. }, _) => {
            let target = RingTarget::CrtLift { target: ring.clone(), indices: indices.clone() };
            relabel(&|m| m.ring_change(&target))
        }
        (OperationLabel::WreathProduct { m }, _) => combine(ring, &vec![kids.swap_remove(0); *m], op),
        _ => combine(ring, &kids, op),
    }
}

/// Scalars of a product of commuting scalar groups; fails when one scalar
/// gets two images.
fn combine(ring: &Ring, tables: &[ScalarTable], op: &OperationLabel) -> Result<ScalarTable> {
    let one = ring.one_flat();
    let mut acc: ScalarTable = HashMap::from([(one.clone(), one)]);
    for table in tables {
        let mut next: ScalarTable = HashMap::new();
        for (l1, m1) in &acc {
            for (l2, m2) in table {
                let (l, m) = (ring.mul_flat(l1, l2), ring.mul_flat(m1, m2));
                if let Some(prev) = next.insert(l, m.clone()) {
                    if prev != m {
                        return Err(Error::InvalidAutomorphism(format!(
                            "{op:?} node map depends on the factor scalars"
                        )));
                    }
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn scalar_of(m: &Matrix) -> Option<Vec<u64>> {
    let c = m.entry(0, 0).to_vec();
    (*m == Matrix::scalar(m.ring(), m.degree(), &c)).then_some(c)
}
