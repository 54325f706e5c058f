//! Arithmetic in a Galois ring and in a CRT-split residue ring.

use matgroup_crypto::ring::{
    frobenius_apply, teichmuller_decompose, teichmuller_recompose, RingAutomorphism, RingElement, RingKind, RingSpec,
};

fn main() -> matgroup_crypto::Result<()> {
    let gr = RingSpec::make(&RingKind::Galois { p: 2, m: 2, r: 2, modulus: None })?;
    println!("ring {gr}, {} elements", gr.size());

    let x = RingElement::from_parts(&gr, &[vec![1, 1]])?;
    let y = RingElement::from_parts(&gr, &[vec![3, 2]])?;
    println!("x = {}, y = {}", x.canonical_json(), y.canonical_json());
    println!("x + y = {}", x.add(&y)?.canonical_json());
    println!("x * y = {}", x.mul(&y)?.canonical_json());

    let digits = teichmuller_decompose(&y);
    println!("teichmuller digits of y: {digits:?}");
    assert_eq!(teichmuller_recompose(&gr, &digits)?, y);

    let frob = RingAutomorphism::new(&gr, vec![1])?;
    println!("frobenius(x) = {}", frobenius_apply(&frob, &x)?.canonical_json());

    // Z_15 splits as Z_3 + Z_5.
    let z15 = RingSpec::zn(15);
    println!("Z_15 is {z15} with {} summands", z15.summand_count());
    let seven = RingElement::from_int(&z15, 7);
    println!("7 in Z_15 has components {:?}", seven.parts());
    Ok(())
}
