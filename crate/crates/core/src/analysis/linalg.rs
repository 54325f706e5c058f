//! Linear algebra over a finite field given as a one-summand ring.

use crate::matrix::Matrix;
use crate::ring::Ring;

/// Coordinates: one flat field element per entry.
pub(crate) type Vector = Vec<Vec<u64>>;

pub(crate) fn coords(m: &Matrix) -> Vector {
    let n = m.degree();
    (0..n * n).map(|k| m.entry(k / n, k % n).to_vec()).collect()
}

pub(crate) fn from_coords(ring: &Ring, n: usize, v: &[Vec<u64>]) -> Matrix {
    let mut m = Matrix::zero(ring, n);
    for (k, e) in v.iter().enumerate() {
        m.set_flat(k / n, k % n, e);
    }
    m
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(ring: &Ring, rows: &mut [Vector]) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !ring.is_zero_flat(&rows[i][c])) else { continue };
        rows.swap(r, p);
        let inv = ring.inv_flat(&rows[r][c]).expect("nonzero field element");
        for e in rows[r].iter_mut() {
            *e = ring.mul_flat(e, &inv);
        }
        for i in 0..rows.len() {
            if i != r && !ring.is_zero_flat(&rows[i][c]) {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    let t = ring.mul_flat(&f, &rows[r][j]);
                    rows[i][j] = ring.sub_flat(&rows[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// The matrix whose column `j` is `cols[j]`, optionally with `extra`
/// appended as a last column.
fn columns(cols: &[Vector], extra: Option<&Vector>, len: usize) -> Vec<Vector> {
    (0..len)
        .map(|i| cols.iter().chain(extra).map(|c| c[i].clone()).collect())
        .collect()
}

/// A basis of `{x : sum_j x_j cols[j] = 0}`.
pub(crate) fn kernel(ring: &Ring, cols: &[Vector], len: usize) -> Vec<Vector> {
    let mut rows = columns(cols, None, len);
    let pivots = rref(ring, &mut rows);
    let d = cols.len();
    let mut out = Vec::new();
    for free in (0..d).filter(|c| !pivots.contains(c)) {
        let mut x = vec![ring.zero_flat(); d];
        x[free] = ring.one_flat();
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = ring.neg_flat(&rows[r][free]);
        }
        out.push(x);
    }
    out
}

/// Some `x` with `sum_j x_j cols[j] = target`.
pub(crate) fn combination(ring: &Ring, cols: &[Vector], target: &Vector) -> Option<Vector> {
    let d = cols.len();
    let mut rows = columns(cols, Some(target), target.len());
    let pivots = rref(ring, &mut rows);
    if pivots.last() == Some(&d) {
        return None;
    }
    let mut x = vec![ring.zero_flat(); d];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = rows[r][d].clone();
    }
    Some(x)
}

/// A basis of the algebra spanned by products of `gens`, each element
/// paired with the same product of `images`. Products grow by one
/// generator per pass until the span stops growing.
pub(crate) fn algebra_basis(ring: &Ring, gens: &[Matrix], images: &[Matrix]) -> Vec<(Matrix, Matrix)> {
    let n = gens[0].degree();
    let image_n = images[0].degree();
    let mut basis = vec![(Matrix::identity(ring, n), Matrix::identity(images[0].ring(), image_n))];
    let mut vecs = vec![coords(&basis[0].0)];
    let mut frontier = basis.clone();
    for _ in 0..n * n {
        let mut next = Vec::new();
        for (b, bi) in &frontier {
            for (g, gi) in gens.iter().zip(images) {
                let p = b.mul(g).expect("same ring");
                let v = coords(&p);
                if vecs.len() < n * n && combination(ring, &vecs, &v).is_none() {
                    vecs.push(v);
                    let pair = (p, bi.mul(gi).expect("same ring"));
                    basis.push(pair.clone());
                    next.push(pair);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    basis
}
