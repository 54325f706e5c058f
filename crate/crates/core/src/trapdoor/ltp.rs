//! The linear transporter problem: find `g ∈ G` with `u g = v`.

use std::collections::HashMap;

use super::{
    check_shape, least_perfect_matching, scalar_solve, scalar_units, vector_tensor_split, wreath_mode,
};
use crate::error::{Error, Result};
use crate::instance::{eval_gens, Annotated, Aux, BaseGroupSpec, DerivationTree, OperationLabel};
use crate::matrix::{vector_act, wreath_rep, Matrix, Perm, RingTarget, RowVector, WreathMode};
use crate::ring::Ring;

/// Orbits larger than this are not enumerated as a fallback.
const ORBIT_CAP: usize = 1 << 18;

/// Finds `g ∈ G` with `u g = v`.
///
/// `NoSolution` is exact: every node either decides its subproblem or
/// raises `UnsupportedDecomposition`.
pub fn ltp_solve(t: &DerivationTree, u: &RowVector, v: &RowVector) -> Result<Matrix> {
    let a = t.annotate()?;
    let probe = Matrix::identity(u.ring(), u.len());
    check_shape(&a, &probe)?;
    if v.ring() != u.ring() || v.len() != u.len() {
        return Err(Error::ShapeMismatch("u and v differ in ring or length".into()));
    }
    ltp(t, &a, u, v)?.ok_or(Error::NoSolution)
}

type Found = Result<Option<Matrix>>;

fn ltp(t: &DerivationTree, a: &Annotated, u: &RowVector, v: &RowVector) -> Found {
    match structural(t, a, u, v) {
        Err(Error::UnsupportedDecomposition(why)) => orbit_search(t, a, u, v).map_err(|e| match e {
            Error::CapExceeded(_) => Error::UnsupportedDecomposition(why),
            e => e,
        }),
        other => other,
    }
}

fn structural(t: &DerivationTree, a: &Annotated, u: &RowVector, v: &RowVector) -> Found {
    let (op, children) = match t {
        DerivationTree::Leaf(spec) => return leaf_ltp(spec, u, v),
        DerivationTree::Node { op, children } => (op, children),
    };
    let (c0, a0) = (&children[0], &a.children[0]);
    match (op, &a.aux) {
        (_, Aux::Conjugator { c, c_inv }) => {
            let h = ltp(c0, a0, &vector_act(u, c_inv)?, &vector_act(v, c_inv)?)?;
            h.map(|h| c_inv.mul(&h)?.mul(c)).transpose()
        }
        (_, Aux::Extension(map)) => {
            if u.is_zero() {
                return Ok(v.is_zero().then(|| Matrix::identity(&a.ty.ring, u.len())));
            }
            let ring = u.ring();
            let Some(alpha) = (0..u.len()).map(|i| u.get(i)).find(|e| ring.is_unit_flat(e)) else {
                return Err(Error::UnsupportedDecomposition("extension transporter needs a unit entry".into()));
            };
            let inv = ring.inv_flat(alpha)?;
            let pre = |w: &RowVector| -> Option<RowVector> {
                let w = w.scale(&inv);
                let data: Option<Vec<u64>> =
                    (0..w.len()).map(|i| map.preimage_flat(w.get(i))).collect::<Option<Vec<_>>>().map(|v| v.concat());
                Some(RowVector::from_flat(map.source(), data?))
            };
            let Some(u0) = pre(u) else {
                return Err(Error::UnsupportedDecomposition("u is not a multiple of a base-ring vector".into()));
            };
            // u0 h has base-ring entries, so v must too.
            let Some(v0) = pre(v) else { return Ok(None) };
            ltp(c0, a0, &u0, &v0)?.map(|h| map.map_matrix(&h)).transpose()
        }
        (_, Aux::Rep(rep)) => {
            // Coordinate blocks of length d are the field elements themselves.
            let lift = |w: &RowVector| RowVector::from_flat(rep.source(), w.data().to_vec());
            ltp(c0, a0, &lift(u), &lift(v))?.map(|h| rep.map_matrix(&h)).transpose()
        }
        (OperationLabel::CrtAssemble { indices, .. }, _) => {
            let target: &Ring = &a.ty.ring;
            for s in 0..target.summand_count() {
                if !indices.contains(&s) && u.project(s) != v.project(s) {
                    return Ok(None);
                }
            }
            let sub = target.sub_ring(indices);
            let proj = |w: &RowVector| {
                let parts: Vec<RowVector> = indices.iter().map(|&i| w.project(i)).collect();
                RowVector::assemble(&sub, &parts)
            };
            let h = ltp(c0, a0, &proj(u)?, &proj(v)?)?;
            h.map(|h| h.ring_change(&RingTarget::CrtLift { target: target.clone(), indices: indices.clone() }))
                .transpose()
        }
        (OperationLabel::DirectSameDegree { .. }, _) => {
            let ring = &a.ty.ring;
            let n = ring.summand_count();
            for s in 0..n {
                if !a.ty.support[s] && u.project(s) != v.project(s) {
                    return Ok(None);
                }
            }
            let mut g = Matrix::identity(ring, u.len());
            for (c, ca) in children.iter().zip(&a.children) {
                let parts: Vec<RowVector> =
                    (0..n).map(|s| if ca.ty.support[s] { v.project(s) } else { u.project(s) }).collect();
                match ltp(c, ca, u, &RowVector::assemble(ring, &parts)?)? {
                    Some(h) => g = g.mul(&h)?,
                    None => return Ok(None),
                }
            }
            Ok(Some(g))
        }
        (OperationLabel::Tensor { .. }, _) => {
            let degrees: Vec<usize> = a.children.iter().map(|c| c.ty.degree).collect();
            let Some((us, vs)) = split_pair(u, v, &degrees)? else {
                return Ok(zero_case(a, u, v));
            };
            let Some(vs) = vs else { return Ok(None) };
            let kids: Vec<(&DerivationTree, &Annotated)> = children.iter().zip(&a.children).collect();
            let pairs: Vec<(&RowVector, &RowVector)> = us.iter().zip(&vs).collect();
            match scaled_transport(&kids, &pairs)? {
                Some(hs) => Ok(Some(Matrix::kron_all(&hs)?)),
                None => Ok(None),
            }
        }
        (op, _) => {
            let (mode, m) = wreath_mode(op).expect("remaining labels are wreaths");
            let n = a0.ty.degree;
            match mode {
                WreathMode::Imprimitive => {
                    let us: Vec<RowVector> = (0..m).map(|i| u.slice(i * n, n)).collect();
                    let vs: Vec<RowVector> = (0..m).map(|j| v.slice(j * n, n)).collect();
                    let mut sols: HashMap<(usize, usize), Matrix> = HashMap::new();
                    let mut adj = vec![Vec::new(); m];
                    for i in 0..m {
                        for j in 0..m {
                            if let Some(h) = ltp(c0, a0, &us[i], &vs[j])? {
                                adj[i].push(j);
                                sols.insert((i, j), h);
                            }
                        }
                    }
                    let Some(images) = least_perfect_matching(&adj) else { return Ok(None) };
                    let hs: Vec<Matrix> = images.iter().enumerate().map(|(i, &j)| sols[&(i, j)].clone()).collect();
                    let k = Perm::new(images)?;
                    Ok(Some(wreath_rep(&hs, &k, mode)?))
                }
                WreathMode::Product => {
                    let degrees = vec![n; m];
                    let Some((us, vs)) = split_pair(u, v, &degrees)? else {
                        return Ok(zero_case(a, u, v));
                    };
                    let Some(vs) = vs else { return Ok(None) };
                    let kids = vec![(c0, a0); m];
                    for k in super::all_perms(m) {
                        // Factor i lands at position k(i).
                        let pairs: Vec<(&RowVector, &RowVector)> = (0..m).map(|i| (&us[i], &vs[k.apply(i)])).collect();
                        if let Some(hs) = scaled_transport(&kids, &pairs)? {
                            return Ok(Some(wreath_rep(&hs, &k, mode)?));
                        }
                    }
                    Ok(None)
                }
            }
        }
    }
}

fn zero_case(a: &Annotated, u: &RowVector, v: &RowVector) -> Option<Matrix> {
    (u == v).then(|| Matrix::identity(&a.ty.ring, u.len()))
}

/// Tensor factors of `u` and `v`. `None` when `u = 0`; inner `None` when `v`
/// cannot be an image of `u`.
#[allow(clippy::type_complexity)]
fn split_pair(
    u: &RowVector,
    v: &RowVector,
    degrees: &[usize],
) -> Result<Option<(Vec<RowVector>, Option<Vec<RowVector>>)>> {
    if u.is_zero() {
        return Ok(None);
    }
    let us = vector_tensor_split(u, degrees).map_err(|e| match e {
        Error::NotDecomposable => Error::UnsupportedDecomposition("u is not a unimodular pure tensor".into()),
        e => e,
    })?;
    // Images of unimodular pure tensors are unimodular pure tensors.
    match vector_tensor_split(v, degrees) {
        Ok(vs) => Ok(Some((us, Some(vs)))),
        Err(Error::NotDecomposable) => Ok(Some((us, None))),
        Err(e) => Err(e),
    }
}

/// Solves `u_i h_i = λ_i v_i` in the children with `∏ λ_i = 1`.
fn scaled_transport(
    kids: &[(&DerivationTree, &Annotated)],
    pairs: &[(&RowVector, &RowVector)],
) -> Result<Option<Vec<Matrix>>> {
    let mut quick = Vec::new();
    for ((c, ca), (ui, vi)) in kids.iter().zip(pairs) {
        match ltp(c, ca, ui, vi)? {
            Some(h) => quick.push(h),
            None => break,
        }
    }
    if quick.len() == pairs.len() {
        return Ok(Some(quick));
    }
    let ring = pairs[0].0.ring();
    let units = scalar_units(ring)?;
    let mut options = Vec::new();
    for ((c, ca), (ui, vi)) in kids.iter().zip(pairs) {
        let mut admissible = Vec::new();
        for lambda in &units {
            if let Some(h) = ltp(c, ca, ui, &vi.scale(lambda))? {
                admissible.push((lambda.clone(), h));
            }
        }
        if admissible.is_empty() {
            return Ok(None);
        }
        options.push(admissible);
    }
    Ok(scalar_solve(ring, options))
}

/// Breadth-first orbit of `u` under the node's generators with a Schreier
/// tree for reconstructing the transporter.
fn orbit_search(t: &DerivationTree, a: &Annotated, u: &RowVector, v: &RowVector) -> Found {
    let mut gens = Vec::new();
    eval_gens(t, a, &mut gens)?;
    let ring = u.ring();
    let mut index: HashMap<Vec<u64>, usize> = HashMap::from([(u.data().to_vec(), 0)]);
    let mut points = vec![u.clone()];
    let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
    let mut head = 0;
    let target = v.data().to_vec();
    while !index.contains_key(&target) && head < points.len() {
        let p = points[head].clone();
        for (gi, g) in gens.iter().enumerate() {
            let q = vector_act(&p, g)?;
            if !index.contains_key(q.data()) {
                if points.len() >= ORBIT_CAP {
                    return Err(Error::CapExceeded(ORBIT_CAP));
                }
                index.insert(q.data().to_vec(), points.len());
                points.push(q);
                parent.push((head, gi));
            }
        }
        head += 1;
    }
    let Some(&at) = index.get(&target) else { return Ok(None) };
    let mut word = Vec::new();
    let mut cur = at;
    while cur != 0 {
        let (prev, gi) = parent[cur];
        word.push(gi);
        cur = prev;
    }
    let mut g = Matrix::identity(ring, u.len());
    for &gi in word.iter().rev() {
        g = g.mul(&gens[gi])?;
    }
    Ok(Some(g))
}

fn leaf_ltp(spec: &BaseGroupSpec, u: &RowVector, v: &RowVector) -> Found {
    let ring = u.ring().clone();
    let n = u.len();
    let id = || Matrix::identity(&ring, n);
    match spec {
        BaseGroupSpec::UnipotentCyclic { .. } => {
            // (a, b) [[1,x],[0,1]] = (a, a x + b)
            let (a0, b0) = (u.get(0), u.get(1));
            if v.get(0) != a0 {
                return Ok(None);
            }
            let diff = ring.sub_flat(v.get(1), b0);
            let x = if ring.is_zero_flat(a0) {
                if !ring.is_zero_flat(&diff) {
                    return Ok(None);
                }
                ring.zero_flat()
            } else {
                ring.mul_flat(&diff, &ring.inv_flat(a0)?)
            };
            let mut g = id();
            g.set_flat(0, 1, &x);
            Ok(Some(g))
        }
        BaseGroupSpec::GeneralLinear { .. } | BaseGroupSpec::SpecialLinear { .. } => {
            let special = matches!(spec, BaseGroupSpec::SpecialLinear { .. });
            if u.is_zero() || v.is_zero() || (special && n == 1) {
                return Ok((u == v).then(id));
            }
            let pu = (0..n).find(|&i| !ring.is_zero_flat(u.get(i))).expect("nonzero");
            let pv = (0..n).find(|&i| !ring.is_zero_flat(v.get(i))).expect("nonzero");
            // U has u as row pu, V has v as row pv; S swaps the two rows.
            let with_row = |w: &RowVector, r: usize| {
                let mut m = id();
                for j in 0..n {
                    m.set_flat(r, j, w.get(j));
                }
                m
            };
            let uu = with_row(u, pu);
            let mut vv = with_row(v, pv);
            let mut swap = id();
            swap.swap_rows(pu, pv);
            let mut g = uu.inv()?.mul(&swap)?.mul(&vv)?;
            if special {
                let det = g.det_if_invertible().expect("invertible");
                let r = if pv == 0 { 1 } else { 0 };
                vv.scale_row(r, &ring.inv_flat(&det)?);
                g = uu.inv()?.mul(&swap)?.mul(&vv)?;
            }
            Ok(Some(g))
        }
        BaseGroupSpec::DiagonalCyclic { .. } => {
            let d = spec.generators()?.remove(0);
            let mut g = id();
            let order = ring.size() as u64 - 1;
            for _ in 0..order {
                if vector_act(u, &g)? == *v {
                    return Ok(Some(g));
                }
                g = g.mul(&d)?;
            }
            Ok(None)
        }
        BaseGroupSpec::Trivial { .. } => Ok((u == v).then(id)),
    }
}

/// Translation by `w` as an `(n+1)`-degree affine matrix acting on `(x, 1)`.
fn translation(w: &RowVector) -> Matrix {
    let n = w.len();
    let mut t = Matrix::identity(w.ring(), n + 1);
    for j in 0..n {
        t.set_flat(n, j, w.get(j));
    }
    t
}

/// `(T_u, T_v)` with `T_v = ĝ⁻¹ T_u ĝ` exactly when `u g = v`, where `ĝ` is
/// [`affine_embed`] of `g`.
pub fn affine_bridge(u: &RowVector, v: &RowVector) -> Result<(Matrix, Matrix)> {
    if u.ring() != v.ring() || u.len() != v.len() {
        return Err(Error::ShapeMismatch("u and v differ in ring or length".into()));
    }
    Ok((translation(u), translation(v)))
}

/// `diag(g, 1)`.
pub fn affine_embed(g: &Matrix) -> Matrix {
    let n = g.degree();
    let mut out = Matrix::identity(g.ring(), n + 1);
    for i in 0..n {
        for j in 0..n {
            out.set_flat(i, j, g.entry(i, j));
        }
    }
    out
}
