//! Key agreement from an identity word pair: first the classical
//! Diffie-Hellman special case, then a metabelian matrix group.

use matgroup_crypto::matrix::{GroupWord, Matrix, RowVector};
use matgroup_crypto::protocol::{gdh_run, vector_point, Action, GdhConfig, Point};
use matgroup_crypto::ring::RingSpec;
use matgroup_crypto::words::build_solvable_pair;

fn main() -> matgroup_crypto::Result<()> {
    let p = 101;
    let (a, b) = (37, 59);
    let dh = GdhConfig {
        action: Action::Power { p, gens_a: vec![a], gens_b: vec![b] },
        pair: build_solvable_pair(1, None)?,
        x0: Point::Residue(2),
        secret_a: GroupWord(vec![1]),
        secret_b: GroupWord(vec![1]),
    };
    let out = gdh_run(&dh)?;
    println!("Z_{p}^*: 2^({a}*{b}) -> {:?} / {:?}", out.key_a, out.key_b);

    // Upper triangular matrices have derived length 2.
    let z5 = RingSpec::zn(5);
    let m = |rows: [[i64; 2]; 2]| Matrix::from_ints(&z5, &rows.map(|r| r.to_vec()));
    let gens = vec![m([[2, 0], [0, 1]])?, m([[1, 0], [0, 3]])?, m([[1, 1], [0, 1]])?];
    let pair = build_solvable_pair(2, None)?;
    println!("depth-2 words: {} / {}", pair.wa.to_json(), pair.wb.to_json());
    let cfg = GdhConfig {
        action: Action::Matrix { gens_a: gens.clone(), gens_b: gens },
        pair,
        x0: vector_point(&RowVector::from_ints(&z5, &[1, 2])),
        secret_a: GroupWord(vec![1, 3, -2, 3]),
        secret_b: GroupWord(vec![3, 3, 2]),
    };
    let out = gdh_run(&cfg)?;
    println!("metabelian: agreed {} after {} messages", out.agreed, out.transcript.len());
    println!("key {:?}", out.key_a);
    Ok(())
}
