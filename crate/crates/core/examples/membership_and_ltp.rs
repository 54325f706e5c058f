//! Membership and linear transporter queries answered with the secret tree,
//! checked against brute force on a group small enough to enumerate.

use matgroup_crypto::analysis::{enumerate_group, oracle_solve, OracleAnswer, OracleQuery};
use matgroup_crypto::instance::{conjugator, tree_eval, BaseGroupSpec, DerivationTree, OperationLabel};
use matgroup_crypto::matrix::{vector_act, RowVector};
use matgroup_crypto::ring::RingSpec;
use matgroup_crypto::trapdoor::{ltp_solve, membership, witness_replay};

fn main() -> matgroup_crypto::Result<()> {
    // <2> inside Z_7^*, wreathed with S_2 on two coordinates.
    let leaf = DerivationTree::leaf(BaseGroupSpec::DiagonalCyclic { n: 1, q: 7, power: 2 });
    let tree = DerivationTree::node(OperationLabel::WreathImprimitive { m: 2 }, vec![leaf]);
    let inst = tree_eval(&tree)?;
    let group = enumerate_group(&inst.gens, 1000)?;
    println!("group order {}", group.len());

    let g = inst.gens[0].mul(&inst.gens[1])?;
    let verdict = membership(&tree, &g)?;
    println!("g1*g2 member: {}", verdict.accepted);
    if let Some(w) = &verdict.witness {
        assert_eq!(witness_replay(&tree, w)?, g);
    }
    let outsider = conjugator(&inst.ring, 2, 3);
    println!("random matrix member: {} (oracle: {})", membership(&tree, &outsider)?.accepted, group.contains(&outsider));

    let z7 = RingSpec::zn(7);
    let u = RowVector::from_ints(&z7, &[1, 3]);
    let v = RowVector::from_ints(&z7, &[6, 2]);
    let t = ltp_solve(&tree, &u, &v)?;
    println!("transporter {} sends {} to {}", t.canonical_json(), u.canonical_json(), vector_act(&u, &t)?.canonical_json());

    let w = RowVector::from_ints(&z7, &[3, 5]);
    match ltp_solve(&tree, &u, &w) {
        Ok(_) => println!("unexpected solution"),
        Err(e) => println!("{} -> {}: {e}", u.canonical_json(), w.canonical_json()),
    }
    let oracle = oracle_solve(&group, &OracleQuery::Ltp { u, v: w })?;
    println!("oracle agrees: {}", matches!(oracle, OracleAnswer::NoSolution));
    Ok(())
}
