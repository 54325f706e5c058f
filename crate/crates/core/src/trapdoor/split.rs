//! Undoing Kronecker products and wreath representations.

use crate::error::{Error, Result};
use crate::matrix::{wreath_rep, Matrix, Perm, RowVector, WreathMode};
use crate::ring::Ring;

/// Largest `m` for which product-action splitting enumerates `S_m`.
const PERMUTATION_CAP: usize = 6;

/// All permutations of `{0, .., m-1}` in lexicographic order of image lists.
pub fn all_perms(m: usize) -> Vec<Perm> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
        if prefix.len() == used.len() {
            out.push(Perm::new(prefix.clone()).expect("permutation"));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

fn first_unit<'a>(ring: &Ring, mut entries: impl Iterator<Item = &'a [u64]>) -> Option<Vec<u64>> {
    entries.find(|e| ring.is_unit_flat(e)).map(|e| e.to_vec())
}

fn matrix_first_unit(g: &Matrix) -> Option<Vec<u64>> {
    let n = g.degree();
    first_unit(g.ring(), (0..n * n).map(|k| g.entry(k / n, k % n)))
}

/// `g = A ⊗ B` over a local ring with `B` normalized, or `None`.
fn split2_local(g: &Matrix, a: usize, b: usize) -> Option<(Matrix, Matrix)> {
    let ring = g.ring();
    let n = g.degree();
    let (r, c) = (0..n * n).map(|k| (k / n, k % n)).find(|&(r, c)| ring.is_unit_flat(g.entry(r, c)))?;
    let block = g.block(r / b, c / b, b);
    let lead = matrix_first_unit(&block)?;
    let bmat = block.scale(&ring.inv_flat(&lead).ok()?);
    let (p, q) = (0..b * b).map(|k| (k / b, k % b)).find(|&(i, j)| ring.is_one_flat(bmat.entry(i, j)))?;
    let mut amat = Matrix::zero(ring, a);
    for i in 0..a {
        for j in 0..a {
            amat.set_flat(i, j, g.block(i, j, b).entry(p, q));
        }
    }
    (amat.kron(&bmat).ok()? == *g).then_some((amat, bmat))
}

fn split_local(g: &Matrix, degrees: &[usize]) -> Option<Vec<Matrix>> {
    if degrees.len() == 1 {
        return Some(vec![g.clone()]);
    }
    let rest: usize = degrees[1..].iter().product();
    let (a, b) = split2_local(g, degrees[0], rest)?;
    let mut out = vec![a];
    out.extend(split_local(&b, &degrees[1..])?);
    Some(out)
}

/// Kronecker factors of `g` with the given degrees.
///
/// In every local summand, factors after the first have first unit entry
/// (row-major) equal to 1; the leftover scalar sits in the first factor.
pub fn tensor_split(g: &Matrix, degrees: &[usize]) -> Result<Vec<Matrix>> {
    if degrees.is_empty() || degrees.iter().product::<usize>() != g.degree() {
        return Err(Error::DegreeMismatch(format!("{degrees:?} do not multiply to {}", g.degree())));
    }
    let ring = g.ring();
    let mut per_summand = Vec::with_capacity(ring.summand_count());
    for s in 0..ring.summand_count() {
        let mut f = split_local(&g.project(s), degrees).ok_or(Error::NotDecomposable)?;
        let sub = f[0].ring().clone();
        for i in 1..f.len() {
            let lead = matrix_first_unit(&f[i]).ok_or(Error::NotDecomposable)?;
            f[i] = f[i].scale(&sub.inv_flat(&lead)?);
            f[0] = f[0].scale(&lead);
        }
        per_summand.push(f);
    }
    (0..degrees.len())
        .map(|i| {
            let parts: Vec<Matrix> = per_summand.iter().map(|f| f[i].clone()).collect();
            Matrix::assemble(ring, &parts)
        })
        .collect()
}

/// Factors `u = u_1 ⊗ .. ⊗ u_k`, normalized like [`tensor_split`]. Every
/// local component of `u` must contain a unit.
pub fn vector_tensor_split(u: &RowVector, degrees: &[usize]) -> Result<Vec<RowVector>> {
    if degrees.is_empty() || degrees.iter().product::<usize>() != u.len() {
        return Err(Error::DegreeMismatch(format!("{degrees:?} do not multiply to {}", u.len())));
    }
    let ring = u.ring();
    let mut per_summand = Vec::with_capacity(ring.summand_count());
    for s in 0..ring.summand_count() {
        let us = u.project(s);
        let sub = us.ring().clone();
        let mut factors = Vec::new();
        let mut rest = us.clone();
        for (i, &d) in degrees.iter().enumerate() {
            if i + 1 == degrees.len() {
                factors.push(rest.clone());
                break;
            }
            let b = rest.len() / d;
            let pos = (0..rest.len()).find(|&k| sub.is_unit_flat(rest.get(k))).ok_or(Error::NotDecomposable)?;
            let (row, col) = (pos / b, pos % b);
            let head = rest.slice(row * b, b).scale(&sub.inv_flat(rest.get(pos))?);
            let mut a = RowVector::zero(&sub, d);
            for j in 0..d {
                a.set(j, rest.get(j * b + col));
            }
            if a.kron(&head) != rest {
                return Err(Error::NotDecomposable);
            }
            factors.push(a);
            rest = head;
        }
        // Move the scalars into the first factor.
        for i in 1..factors.len() {
            let lead = (0..factors[i].len())
                .map(|k| factors[i].get(k).to_vec())
                .find(|e| sub.is_unit_flat(e))
                .ok_or(Error::NotDecomposable)?;
            factors[i] = factors[i].scale(&sub.inv_flat(&lead)?);
            factors[0] = factors[0].scale(&lead);
        }
        per_summand.push(factors);
    }
    (0..degrees.len())
        .map(|i| {
            let parts: Vec<RowVector> = per_summand.iter().map(|f| f[i].clone()).collect();
            RowVector::assemble(ring, &parts)
        })
        .collect()
}

/// Recovers `(h_1, .., h_m; k)` from its wreath representation.
///
/// In product mode the factors come back up to scalars, and with `n = 1`
/// the permutation is invisible; the result then only satisfies
/// `wreath_rep(split(g)) == g`.
pub fn wreath_split(g: &Matrix, n: usize, m: usize, mode: WreathMode) -> Result<(Vec<Matrix>, Perm)> {
    match mode {
        WreathMode::Imprimitive => {
            if n * m != g.degree() || m == 0 {
                return Err(Error::DegreeMismatch(format!("{} is not {n} * {m}", g.degree())));
            }
            let nonzero = |i: usize, j: usize| g.block(i, j, n).data().iter().any(|&c| c != 0);
            let mut images = Vec::with_capacity(m);
            for i in 0..m {
                let cols: Vec<usize> = (0..m).filter(|&j| nonzero(i, j)).collect();
                match cols.as_slice() {
                    [j] => images.push(*j),
                    _ => return Err(Error::NotWreathShaped),
                }
            }
            let k = Perm::new(images).map_err(|_| Error::NotWreathShaped)?;
            let hs = (0..m).map(|i| g.block(i, k.apply(i), n)).collect();
            Ok((hs, k))
        }
        WreathMode::Product => {
            if m == 0 || n.checked_pow(m as u32) != Some(g.degree()) {
                return Err(Error::DegreeMismatch(format!("{} is not {n}^{m}", g.degree())));
            }
            if m > PERMUTATION_CAP {
                return Err(Error::UnsupportedDecomposition(format!("product action with m = {m}")));
            }
            let ids = vec![Matrix::identity(g.ring(), n); m];
            for k in all_perms(m) {
                let undo = wreath_rep(&ids, &k.inverse(), WreathMode::Product)?;
                if let Ok(hs) = tensor_split(&g.mul(&undo)?, &vec![n; m]) {
                    return Ok((hs, k));
                }
            }
            Err(Error::NotWreathShaped)
        }
    }
}
