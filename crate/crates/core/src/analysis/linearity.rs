//! Predicting a homomorphism from its values on generators by pretending
//! it is linear on the spanned algebra.

use super::linalg::{algebra_basis, coords, combination};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearityVerdict {
    Predicted(Matrix),
    /// The query is outside the span, or the ring does not allow solving.
    Inconclusive,
}

/// Writes `query` as a combination of generator products and returns the
/// same combination of the image products.
pub fn linearity_attack(gens: &[Matrix], images: &[Matrix], query: &Matrix) -> LinearityVerdict {
    let Some(first) = gens.first() else { return LinearityVerdict::Inconclusive };
    let ring = first.ring();
    let aligned = gens.len() == images.len()
        && gens.iter().all(|g| g.ring() == ring && g.degree() == first.degree())
        && images.iter().all(|g| g.ring() == ring && g.degree() == images[0].degree())
        && query.ring() == ring
        && query.degree() == first.degree();
    if !aligned || ring.summands().iter().any(|s| s.m != 1) {
        return LinearityVerdict::Inconclusive;
    }
    let mut parts = Vec::new();
    for s in 0..ring.summand_count() {
        let sub = ring.summand_ring(s);
        let gs: Vec<Matrix> = gens.iter().map(|g| g.project(s)).collect();
        let is: Vec<Matrix> = images.iter().map(|g| g.project(s)).collect();
        let basis = algebra_basis(&sub, &gs, &is);
        let cols: Vec<_> = basis.iter().map(|(b, _)| coords(b)).collect();
        let Some(c) = combination(&sub, &cols, &coords(&query.project(s))) else {
            return LinearityVerdict::Inconclusive;
        };
        let mut acc = Matrix::zero(&sub, images[0].degree());
        for (ci, (_, img)) in c.iter().zip(&basis) {
            acc = acc.add(&img.scale(ci)).expect("same ring");
        }
        parts.push(acc);
    }
    LinearityVerdict::Predicted(Matrix::assemble(ring, &parts).expect("one part per summand"))
}

/// Whether the predictions respect `f(ab) = f(a) f(b)`; false when any of
/// them is inconclusive.
pub fn multiplicative_check(gens: &[Matrix], images: &[Matrix], a: &Matrix, b: &Matrix) -> bool {
    let Ok(ab) = a.mul(b) else { return false };
    match (
        linearity_attack(gens, images, a),
        linearity_attack(gens, images, b),
        linearity_attack(gens, images, &ab),
    ) {
        (LinearityVerdict::Predicted(fa), LinearityVerdict::Predicted(fb), LinearityVerdict::Predicted(fab)) => {
            fa.mul(&fb).is_ok_and(|p| p == fab)
        }
        _ => false,
    }
}
