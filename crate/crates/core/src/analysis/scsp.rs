//! The linear attack on conjugator search: solve `h f = g h` inside the
//! algebra spanned by the subgroup and hope for an invertible solution.

use super::linalg::{algebra_basis, coords, from_coords, kernel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;

/// Random solutions tried before giving up.
pub const SCSP_DRAWS: usize = 64;

#[derive(Clone, Debug)]
pub struct ScspOutcome {
    /// Satisfies `h^-1 g h = f`.
    pub h: Matrix,
    /// Dimension of the solution space in each summand.
    pub solution_dims: Vec<usize>,
    /// Draws used, counting the successful one.
    pub draws: usize,
    pub warnings: Vec<String>,
}

/// Looks for `h` in the algebra of `<gens>` with `h^-1 g h = f`. Needs a
/// ring whose summands are fields.
pub fn scsp_linear_attack(gens: &[Matrix], f: &Matrix, g: &Matrix, seed: u64) -> Result<ScspOutcome> {
    let ring = f.ring().clone();
    let n = f.degree();
    if g.ring() != &ring || gens.iter().any(|h| h.ring() != &ring) {
        return Err(Error::RingMismatch);
    }
    if g.degree() != n || gens.iter().any(|h| h.degree() != n) {
        return Err(Error::DegreeMismatch("all matrices must share one degree".into()));
    }
    if gens.is_empty() {
        return Err(Error::IndexOutOfRange { index: 1, len: 0 });
    }
    if ring.summands().iter().any(|s| s.m != 1) {
        return Err(Error::UnsupportedDecomposition("linear solving needs a field in every summand".into()));
    }
    let mut warnings = Vec::new();
    let q = ring.summands().iter().map(|s| s.residue_size()).min().expect("nonempty ring");
    if 2 * n as u128 >= q {
        warnings.push(format!("n = {n} is not below q/2 = {}/2; random solutions are often singular", q));
    }

    // Per summand: the algebra basis and a basis of the solution space.
    let mut spaces = Vec::new();
    for s in 0..ring.summand_count() {
        let sub = ring.summand_ring(s);
        let (fs, gs) = (f.project(s), g.project(s));
        let hs: Vec<Matrix> = gens.iter().map(|h| h.project(s)).collect();
        let basis: Vec<Matrix> = algebra_basis(&sub, &hs, &hs).into_iter().map(|(b, _)| b).collect();
        let cols: Vec<_> = basis.iter().map(|b| coords(&b.mul(&fs).unwrap().sub(&gs.mul(b).unwrap()).unwrap())).collect();
        let ker = kernel(&sub, &cols, n * n);
        if ker.is_empty() {
            return Err(Error::NoSolutionSpace);
        }
        spaces.push((sub, basis, ker));
    }

    let mut r = rng::from_seed(seed);
    for draw in 1..=SCSP_DRAWS {
        let mut parts = Vec::new();
        for (sub, basis, ker) in &spaces {
            let t: Vec<Vec<u64>> = ker.iter().map(|_| sub.random_flat(&mut r)).collect();
            let mut h = vec![sub.zero_flat(); n * n];
            for (tk, x) in t.iter().zip(ker) {
                for (xi, b) in x.iter().zip(basis) {
                    let c = sub.mul_flat(tk, xi);
                    for (k, e) in coords(b).iter().enumerate() {
                        h[k] = sub.add_flat(&h[k], &sub.mul_flat(&c, e));
                    }
                }
            }
            parts.push(from_coords(sub, n, &h));
        }
        let h = Matrix::assemble(&ring, &parts)?;
        if h.is_invertible() && g.mul(&h)? == h.mul(f)? {
            let solution_dims = spaces.iter().map(|(_, _, k)| k.len()).collect();
            return Ok(ScspOutcome { h, solution_dims, draws: draw, warnings });
        }
    }
    Err(Error::Failure(format!("no invertible solution in {SCSP_DRAWS} draws")))
}
