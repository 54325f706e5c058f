//! Polynomial-time membership and transporter solvers that use the secret
//! derivation tree.

mod ltp;
mod matching;
mod split;

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

pub use ltp::{affine_bridge, affine_embed, ltp_solve};
pub use matching::{least_perfect_matching, max_matching};
pub use split::{all_perms, tensor_split, vector_tensor_split, wreath_split};

use crate::error::{Error, Result};
use crate::instance::{Annotated, Aux, BaseGroupSpec, DerivationTree, OperationLabel};
use crate::matrix::{wreath_rep, Matrix, Perm, WreathMode};
use crate::ring::Ring;

/// Largest unit group searched for the scalar ambiguity of tensor factors.
pub const SCALAR_CAP: u128 = 4096;

/// How a matrix decomposes along the tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum Witness {
    Leaf { h: Matrix },
    /// Ring changes, CRT placement and conjugation.
    Unary { child: Box<Witness> },
    Tensor { factors: Vec<Witness> },
    Direct { parts: Vec<Witness> },
    Wreath { k: Perm, hs: Vec<Witness> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub accepted: bool,
    pub witness: Option<Witness>,
}

pub(crate) fn check_shape(a: &Annotated, g: &Matrix) -> Result<()> {
    if g.ring() != &a.ty.ring || g.degree() != a.ty.degree {
        return Err(Error::ShapeMismatch(format!(
            "expected degree {} over {}, got degree {} over {}",
            a.ty.degree,
            a.ty.ring,
            g.degree(),
            g.ring()
        )));
    }
    Ok(())
}

/// Decides `g ∈ G` by descending the tree.
pub fn membership(t: &DerivationTree, g: &Matrix) -> Result<MembershipVerdict> {
    let a = t.annotate()?;
    check_shape(&a, g)?;
    let witness = member(t, &a, g)?;
    Ok(MembershipVerdict { accepted: witness.is_some(), witness })
}

pub(crate) fn wreath_mode(op: &OperationLabel) -> Option<(WreathMode, usize)> {
    match op {
        OperationLabel::WreathImprimitive { m } => Some((WreathMode::Imprimitive, *m)),
        OperationLabel::WreathProduct { m } => Some((WreathMode::Product, *m)),
        _ => None,
    }
}

/// Splits `g` into the per-child matrices of a direct node, or `None` when
/// `g` is not the identity outside the children's summands.
pub(crate) fn direct_parts(a: &Annotated, g: &Matrix) -> Option<Vec<Matrix>> {
    let ring = &a.ty.ring;
    let local: Vec<Matrix> = (0..ring.summand_count()).map(|s| g.project(s)).collect();
    for (s, part) in local.iter().enumerate() {
        if !a.ty.support[s] && !part.is_identity() {
            return None;
        }
    }
    a.children
        .iter()
        .map(|c| {
            let parts: Vec<Matrix> = local
                .iter()
                .enumerate()
                .map(|(s, p)| if c.ty.support[s] { p.clone() } else { Matrix::identity(p.ring(), p.degree()) })
                .collect();
            Matrix::assemble(ring, &parts).ok()
        })
        .collect()
}

pub(crate) fn crt_parts(target: &Ring, indices: &[usize], g: &Matrix) -> Option<Matrix> {
    let sub = target.sub_ring(indices);
    for s in 0..target.summand_count() {
        if !indices.contains(&s) && !g.project(s).is_identity() {
            return None;
        }
    }
    let parts: Vec<Matrix> = indices.iter().map(|&i| g.project(i)).collect();
    Matrix::assemble(&sub, &parts).ok()
}

pub(crate) fn member(t: &DerivationTree, a: &Annotated, g: &Matrix) -> Result<Option<Witness>> {
    member_in(&Scalars::default(), t, a, g)
}

/// Scalar subgroups `{λ : λI ∈ G}` of the nodes visited during one query,
/// keyed by node address.
#[derive(Default)]
pub(crate) struct Scalars(RefCell<HashMap<*const Annotated, Rc<HashSet<Vec<u64>>>>>);

fn member_in(cx: &Scalars, t: &DerivationTree, a: &Annotated, g: &Matrix) -> Result<Option<Witness>> {
    let (op, children) = match t {
        DerivationTree::Leaf(spec) => return Ok(spec.contains(g).then(|| Witness::Leaf { h: g.clone() })),
        DerivationTree::Node { op, children } => (op, children),
    };
    let unary = |w: Option<Witness>| w.map(|c| Witness::Unary { child: Box::new(c) });
    let (c0, a0) = (&children[0], &a.children[0]);
    match (op, &a.aux) {
        (_, Aux::Extension(map)) => match map.preimage_matrix(g) {
            Some(h) => Ok(unary(member_in(cx, c0, a0, &h)?)),
            None => Ok(None),
        },
        (_, Aux::Rep(rep)) => match rep.preimage_matrix(g) {
            Some(h) => Ok(unary(member_in(cx, c0, a0, &h)?)),
            None => Ok(None),
        },
        (_, Aux::Conjugator { c, c_inv }) => Ok(unary(member_in(cx, c0, a0, &c.mul(g)?.mul(c_inv)?)?)),
        (OperationLabel::CrtAssemble { indices, .. }, _) => match crt_parts(&a.ty.ring, indices, g) {
            Some(h) => Ok(unary(member_in(cx, c0, a0, &h)?)),
            None => Ok(None),
        },
        (OperationLabel::DirectSameDegree { .. }, _) => {
            let Some(parts) = direct_parts(a, g) else { return Ok(None) };
            let mut ws = Vec::new();
            for ((c, ca), p) in children.iter().zip(&a.children).zip(&parts) {
                match member_in(cx, c, ca, p)? {
                    Some(w) => ws.push(w),
                    None => return Ok(None),
                }
            }
            Ok(Some(Witness::Direct { parts: ws }))
        }
        (OperationLabel::Tensor { .. }, _) => {
            let degrees: Vec<usize> = a.children.iter().map(|c| c.ty.degree).collect();
            let factors = match tensor_split(g, &degrees) {
                Ok(f) => f,
                Err(Error::NotDecomposable) => return Ok(None),
                Err(e) => return Err(e),
            };
            let kids: Vec<(&DerivationTree, &Annotated)> = children.iter().zip(&a.children).collect();
            Ok(tensor_member(cx, &kids, &factors)?.map(|factors| Witness::Tensor { factors }))
        }
        (op, _) => {
            let (mode, m) = wreath_mode(op).expect("remaining labels are wreaths");
            let n = a0.ty.degree;
            let (hs, k) = match wreath_split(g, n, m, mode) {
                Ok(x) => x,
                Err(Error::NotWreathShaped) => return Ok(None),
                Err(e) => return Err(e),
            };
            let ws = match mode {
                WreathMode::Imprimitive => {
                    let mut ws = Vec::new();
                    for h in &hs {
                        match member_in(cx, c0, a0, h)? {
                            Some(w) => ws.push(w),
                            None => return Ok(None),
                        }
                    }
                    Some(ws)
                }
                WreathMode::Product => tensor_member(cx, &vec![(c0, a0); m], &hs)?,
            };
            Ok(ws.map(|hs| Witness::Wreath { k, hs }))
        }
    }
}

/// Units of `ring`, refusing groups above [`SCALAR_CAP`].
pub(crate) fn scalar_units(ring: &Ring) -> Result<Vec<Vec<u64>>> {
    if ring.unit_count() > SCALAR_CAP {
        return Err(Error::UnsupportedDecomposition(format!("{} units exceed the scalar search cap", ring.unit_count())));
    }
    Ok(ring.units_flat())
}

/// Memberships of `λ_i f_i` in the children with `∏ λ_i = 1`.
///
/// The admissible `λ_i` form a coset of the child's scalar subgroup, so one
/// representative per child and the subgroups suffice.
fn tensor_member(
    cx: &Scalars,
    kids: &[(&DerivationTree, &Annotated)],
    factors: &[Matrix],
) -> Result<Option<Vec<Witness>>> {
    let mut quick = Vec::new();
    for ((c, ca), f) in kids.iter().zip(factors) {
        match member_in(cx, c, ca, f)? {
            Some(w) => quick.push(w),
            None => break,
        }
    }
    if quick.len() == factors.len() {
        return Ok(Some(quick));
    }
    let ring = factors[0].ring();
    let mut lambdas = Vec::new();
    for ((c, ca), f) in kids.iter().zip(factors) {
        match scaled(cx, c, ca, f)? {
            Some(l) => lambdas.push(l),
            None => return Ok(None),
        }
    }
    let prod = lambdas.iter().fold(ring.one_flat(), |acc, l| ring.mul_flat(&acc, l));
    let mut options: Vec<Vec<(Vec<u64>, Vec<u64>)>> = Vec::new();
    for (c, ca) in kids {
        options.push(scalar_group(cx, c, ca)?.iter().map(|z| (z.clone(), z.clone())).collect());
    }
    options.push(vec![(prod.clone(), prod)]);
    let Some(mut zs) = scalar_solve(ring, options) else { return Ok(None) };
    zs.pop();
    let mut ws = Vec::new();
    for (((c, ca), f), (l, z)) in kids.iter().zip(factors).zip(lambdas.iter().zip(&zs)) {
        let w = member_in(cx, c, ca, &f.scale(&ring.mul_flat(l, z)))?;
        ws.push(w.expect("coset representative times a scalar of the group"));
    }
    Ok(Some(ws))
}

/// Some `λ` with `λ g ∈ G`.
fn scaled(cx: &Scalars, t: &DerivationTree, a: &Annotated, g: &Matrix) -> Result<Option<Vec<u64>>> {
    let ring = g.ring();
    let (op, children) = match t {
        DerivationTree::Leaf(spec) => return leaf_scaled(spec, g),
        DerivationTree::Node { op, children } => (op, children),
    };
    let (c0, a0) = (&children[0], &a.children[0]);
    let product = |parts: Vec<Option<Vec<u64>>>| {
        parts.into_iter().try_fold(ring.one_flat(), |acc, l| l.map(|l| ring.mul_flat(&acc, &l)))
    };
    match (op, &a.aux) {
        (_, Aux::Conjugator { c, c_inv }) => scaled(cx, c0, a0, &c.mul(g)?.mul(c_inv)?),
        (OperationLabel::Tensor { .. }, _) => {
            let degrees: Vec<usize> = a.children.iter().map(|c| c.ty.degree).collect();
            let factors = match tensor_split(g, &degrees) {
                Ok(f) => f,
                Err(Error::NotDecomposable) => return Ok(None),
                Err(e) => return Err(e),
            };
            let parts = children
                .iter()
                .zip(&a.children)
                .zip(&factors)
                .map(|((c, ca), f)| scaled(cx, c, ca, f))
                .collect::<Result<Vec<_>>>()?;
            Ok(product(parts))
        }
        (op, _) if wreath_mode(op).is_some() => {
            let (mode, m) = wreath_mode(op).expect("checked");
            let (hs, _) = match wreath_split(g, a0.ty.degree, m, mode) {
                Ok(x) => x,
                Err(Error::NotWreathShaped) => return Ok(None),
                Err(e) => return Err(e),
            };
            let parts = hs.iter().map(|h| scaled(cx, c0, a0, h)).collect::<Result<Vec<_>>>()?;
            if mode == WreathMode::Product {
                return Ok(product(parts));
            }
            // One λ must serve every block.
            let Some(parts) = parts.into_iter().collect::<Option<Vec<_>>>() else { return Ok(None) };
            let z = scalar_group(cx, c0, a0)?;
            let first = &parts[0];
            for l in &parts[1..] {
                if !z.contains(&ring.mul_flat(first, &ring.inv_flat(l)?)) {
                    return Ok(None);
                }
            }
            Ok(Some(first.clone()))
        }
        _ => {
            for u in scalar_units(ring)? {
                if member_in(cx, t, a, &g.scale(&u))?.is_some() {
                    return Ok(Some(u));
                }
            }
            Ok(None)
        }
    }
}

fn leaf_scaled(spec: &BaseGroupSpec, g: &Matrix) -> Result<Option<Vec<u64>>> {
    let ring = g.ring();
    let first = g.entry(0, 0);
    match spec {
        BaseGroupSpec::GeneralLinear { .. } => return Ok(g.is_invertible().then(|| ring.one_flat())),
        BaseGroupSpec::UnipotentCyclic { .. } | BaseGroupSpec::Trivial { .. } => {
            if !ring.is_unit_flat(first) {
                return Ok(None);
            }
            let l = ring.inv_flat(first)?;
            return Ok(spec.contains(&g.scale(&l)).then_some(l));
        }
        _ => {}
    }
    for u in scalar_units(ring)? {
        if spec.contains(&g.scale(&u)) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// `{λ : λI ∈ G}` at this node, cached per query.
fn scalar_group(cx: &Scalars, t: &DerivationTree, a: &Annotated) -> Result<Rc<HashSet<Vec<u64>>>> {
    let key = a as *const Annotated;
    if let Some(z) = cx.0.borrow().get(&key) {
        return Ok(z.clone());
    }
    let ring = &a.ty.ring;
    let n = a.ty.degree;
    let z: HashSet<Vec<u64>> = match t {
        DerivationTree::Node { op, children } => match (op, &a.aux) {
            (_, Aux::Conjugator { .. }) | (OperationLabel::WreathImprimitive { .. }, _) | (OperationLabel::WreathProduct { .. }, _) => {
                (*scalar_group(cx, &children[0], &a.children[0])?).clone()
            }
            (OperationLabel::Tensor { .. }, _) => {
                let mut acc = HashSet::from([ring.one_flat()]);
                for (c, ca) in children.iter().zip(&a.children) {
                    let zc = scalar_group(cx, c, ca)?;
                    acc = acc.iter().flat_map(|x| zc.iter().map(move |y| ring.mul_flat(x, y))).collect();
                }
                acc
            }
            _ => {
                let mut out = HashSet::new();
                for u in scalar_units(ring)? {
                    if member_in(cx, t, a, &Matrix::scalar(ring, n, &u))?.is_some() {
                        out.insert(u);
                    }
                }
                out
            }
        },
        DerivationTree::Leaf(spec) => {
            scalar_units(ring)?.into_iter().filter(|u| spec.contains(&Matrix::scalar(ring, n, u))).collect()
        }
    };
    let z = Rc::new(z);
    cx.0.borrow_mut().insert(key, z.clone());
    Ok(z)
}

/// Picks one entry per list so that the scalars multiply to 1.
pub(crate) fn scalar_solve<T: Clone>(ring: &Ring, options: Vec<Vec<(Vec<u64>, T)>>) -> Option<Vec<T>> {
    let one = ring.one_flat();
    // layers[i]: product after i choices -> (previous product, choice index)
    let mut layers: Vec<HashMap<Vec<u64>, (Vec<u64>, usize)>> = vec![HashMap::from([(one.clone(), (one.clone(), 0))])];
    for list in &options {
        let mut next = HashMap::new();
        for prod in layers.last().unwrap().keys() {
            for (idx, (lambda, _)) in list.iter().enumerate() {
                next.entry(ring.mul_flat(prod, lambda)).or_insert_with(|| (prod.clone(), idx));
            }
        }
        layers.push(next);
    }
    let mut cur = one;
    let mut picks = vec![0; options.len()];
    for i in (0..options.len()).rev() {
        let (prev, idx) = layers[i + 1].get(&cur)?.clone();
        picks[i] = idx;
        cur = prev;
    }
    Some(picks.iter().zip(&options).map(|(&i, list)| list[i].1.clone()).collect())
}

/// Rebuilds the matrix a witness describes.
pub fn witness_replay(t: &DerivationTree, w: &Witness) -> Result<Matrix> {
    let a = t.annotate()?;
    replay(t, &a, w)
}

pub(crate) fn replay(t: &DerivationTree, a: &Annotated, w: &Witness) -> Result<Matrix> {
    let bad = || Error::Format("witness does not match the tree".into());
    match (t, w) {
        (DerivationTree::Leaf(_), Witness::Leaf { h }) => Ok(h.clone()),
        (DerivationTree::Node { op, children }, w) => {
            let kids = || children.iter().zip(&a.children);
            match (op, w) {
                (_, Witness::Unary { child }) => {
                    let h = replay(&children[0], &a.children[0], child)?;
                    match (&a.aux, op) {
                        (Aux::Extension(map), _) => map.map_matrix(&h),
                        (Aux::Rep(rep), _) => rep.map_matrix(&h),
                        (Aux::Conjugator { c, c_inv }, _) => c_inv.mul(&h)?.mul(c),
                        (_, OperationLabel::CrtAssemble { indices, .. }) => h.ring_change(
                            &crate::matrix::RingTarget::CrtLift { target: a.ty.ring.clone(), indices: indices.clone() },
                        ),
                        _ => Err(bad()),
                    }
                }
                (OperationLabel::Tensor { .. }, Witness::Tensor { factors }) if factors.len() == children.len() => {
                    let fs =
                        kids().zip(factors).map(|((c, ca), f)| replay(c, ca, f)).collect::<Result<Vec<_>>>()?;
                    Matrix::kron_all(&fs)
                }
                (OperationLabel::DirectSameDegree { .. }, Witness::Direct { parts }) if parts.len() == children.len() => {
                    let mut acc = Matrix::identity(&a.ty.ring, a.ty.degree);
                    for ((c, ca), p) in kids().zip(parts) {
                        acc = acc.mul(&replay(c, ca, p)?)?;
                    }
                    Ok(acc)
                }
                (op, Witness::Wreath { k, hs }) => {
                    let (mode, m) = wreath_mode(op).ok_or_else(bad)?;
                    if hs.len() != m {
                        return Err(bad());
                    }
                    let blocks = hs
                        .iter()
                        .map(|h| replay(&children[0], &a.children[0], h))
                        .collect::<Result<Vec<_>>>()?;
                    wreath_rep(&blocks, k, mode)
                }
                _ => Err(bad()),
            }
        }
        _ => Err(bad()),
    }
}
