use std::collections::HashSet;

use rand::Rng as _;

use super::*;
use crate::matrix::RowVector;
use crate::ring::{Ring, RingSpec};
use crate::rng;
use crate::words::{build_solvable_pair, FreeWord, IdentityWordPair};

fn m(ring: &Ring, rows: &[[i64; 2]]) -> Matrix {
    Matrix::from_ints(ring, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn ints(x: &Matrix) -> Vec<Vec<u128>> {
    x.to_int_rows().unwrap()
}

fn instance(ring: &Ring, gens: Vec<Matrix>) -> GroupInstance {
    GroupInstance { n: gens[0].degree(), ring: ring.clone(), gens, provenance: vec![] }
}

fn gl2(q: u64) -> GroupInstance {
    let r = RingSpec::zn(q);
    let gens = vec![m(&r, &[[1, 1], [0, 1]]), m(&r, &[[1, 0], [1, 1]]), m(&r, &[[2, 0], [0, 1]])];
    instance(&r, gens)
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.inv().unwrap().mul(&b.inv().unwrap()).unwrap().mul(a).unwrap().mul(b).unwrap()
}

fn aag_example() -> AagConfig {
    let r = RingSpec::zn(5);
    let (a, b) = (m(&r, &[[1, 1], [0, 1]]), m(&r, &[[1, 0], [1, 1]]));
    AagConfig {
        instance: instance(&r, vec![a.clone(), b.clone()]),
        gens_a: vec![a],
        gens_b: vec![b],
        secret_a: GroupWord(vec![1]),
        secret_b: GroupWord(vec![1]),
    }
}

#[test]
fn aag_commutator_key() {
    let out = aag_run(&aag_example()).unwrap();
    assert_eq!(ints(&out.key_a), vec![vec![3, 1], vec![4, 0]]);
    assert_eq!(out.key_a, out.key_b);
    assert_eq!(out.key_a.det_if_invertible().unwrap(), vec![1]);
    assert!(out.warnings.is_empty());
    assert_eq!(out.transcript.len(), 2);
    assert!(out.transcript.records.iter().all(|r| r.kind == "conjugated-generators"));
    assert_eq!(key_fingerprint(&out.key_a).len(), 64);
}

#[test]
fn aag_abelian_instance_warns() {
    let mut cfg = aag_example();
    cfg.gens_b = cfg.gens_a.clone();
    cfg.secret_b = GroupWord(vec![1, 1, 1]);
    let out = aag_run(&cfg).unwrap();
    assert!(out.key_a.is_identity() && out.key_b.is_identity());
    assert_eq!(out.warnings.len(), 1);
}

#[test]
fn aag_errors() {
    let mut cfg = aag_example();
    cfg.secret_a = GroupWord(vec![2]);
    assert_eq!(aag_run(&cfg).unwrap_err(), Error::IndexOutOfRange { index: 2, len: 1 });
    let mut cfg = aag_example();
    cfg.gens_b = vec![Matrix::zero(&cfg.instance.ring, 2)];
    assert_eq!(aag_run(&cfg).unwrap_err(), Error::NonInvertible);
}

#[test]
fn aag_random_keys_agree() {
    let inst = gl2(7);
    for seed in 0..30 {
        let ps = random_parties(&inst, 2, 2, 5, seed).unwrap();
        let cfg = AagConfig {
            instance: inst.clone(),
            gens_a: ps[0].gens.clone(),
            gens_b: ps[1].gens.clone(),
            secret_a: ps[0].secret.clone(),
            secret_b: ps[1].secret.clone(),
        };
        let out = aag_run(&cfg).unwrap();
        let a = word_eval(&cfg.gens_a, &cfg.secret_a).unwrap();
        let b = word_eval(&cfg.gens_b, &cfg.secret_b).unwrap();
        assert_eq!(out.key_a, commutator(&a, &b));
        assert_eq!(out.key_a, out.key_b);
        // The eavesdropper sees exactly the two conjugated generator lists.
        let x_b = parse_matrices(&a, &out.transcript.records[0].payload).unwrap();
        assert_eq!(x_b, cfg.gens_b.iter().map(|g| g.conjugate_by(&a).unwrap()).collect::<Vec<_>>());
    }
}

fn secrets(ps: &[PartyConfig]) -> Vec<Matrix> {
    ps.iter().map(|p| word_eval(&p.gens, &p.secret).unwrap()).collect()
}

fn nested(xs: &[Matrix]) -> Matrix {
    if xs.len() == 1 {
        return xs[0].clone();
    }
    let mid = xs.len().div_ceil(2);
    commutator(&nested(&xs[..mid]), &nested(&xs[mid..]))
}

#[test]
fn two_parties_match_aag() {
    let cfg = aag_example();
    let ps = vec![
        PartyConfig { gens: cfg.gens_a.clone(), secret: cfg.secret_a.clone() },
        PartyConfig { gens: cfg.gens_b.clone(), secret: cfg.secret_b.clone() },
    ];
    let out = multiparty_run(2, &ps).unwrap();
    let aag = aag_run(&cfg).unwrap();
    assert_eq!(out.keys, vec![aag.key_a.clone(), aag.key_a]);
}

#[test]
fn multiparty_keys_agree() {
    let inst = gl2(7);
    for s in 2..=9 {
        for seed in 0..4 {
            let ps = random_parties(&inst, s, 2, 4, seed * 31 + s as u64).unwrap();
            let out = multiparty_run(s, &ps).unwrap();
            let expected = nested(&secrets(&ps));
            assert!(out.keys.iter().all(|k| *k == expected), "s = {s}");
            assert_eq!(out.op_counts.len(), s);
        }
    }
}

#[test]
fn multiparty_cost_is_linear_in_parties() {
    let inst = gl2(5);
    let mut r = rng::from_seed(9);
    for seed in 0..50 {
        let s = r.gen_range(2..=16);
        let len = r.gen_range(1..=8);
        let ps = random_parties(&inst, s, 3, len, seed).unwrap();
        let out = multiparty_run(s, &ps).unwrap();
        for (i, ops) in out.op_counts.iter().enumerate() {
            assert!(*ops <= 8 * (s * ps[i].secret.len().max(1)) as u64, "party {i}: {ops}");
        }
    }
}

#[test]
fn multiparty_transcript() {
    let inst = gl2(7);
    let ps = random_parties(&inst, 4, 2, 3, 5).unwrap();
    let out = multiparty_run(4, &ps).unwrap();
    let again = multiparty_run(4, &ps).unwrap();
    assert_eq!(out.transcript, again.transcript);
    assert_eq!(Transcript::from_text(&out.transcript.to_text()).unwrap(), out.transcript);
    let kinds: HashSet<&str> = out.transcript.records.iter().map(|r| r.kind.as_str()).collect();
    assert_eq!(kinds, HashSet::from(["conjugation-query", "conjugation-reply"]));
    for rec in &out.transcript.records {
        assert_eq!(parse_matrices(&inst.gens[0], &rec.payload).unwrap().len(), 2);
    }
    // Queries alternate with their replies, so each party's view pairs up.
    for i in 0..4 {
        let view = out.transcript.view(&format!("P{i}"));
        assert!(!view.is_empty());
    }
    assert_eq!(multiparty_run(1, &ps[..1]).unwrap_err(), Error::BadPartyCount(1));
    assert!(matches!(multiparty_run(3, &ps), Err(Error::ArityMismatch { .. })));
}

fn power_cfg(pair: IdentityWordPair) -> GdhConfig {
    GdhConfig {
        action: Action::Power { p: 7, gens_a: vec![5], gens_b: vec![5] },
        pair,
        x0: Point::Residue(3),
        secret_a: GroupWord(vec![1]),
        secret_b: GroupWord(vec![1]),
    }
}

#[test]
fn diffie_hellman_specialization() {
    let out = gdh_run(&power_cfg(build_solvable_pair(1, None).unwrap())).unwrap();
    assert_eq!(out.key_a, Point::Residue(3));
    assert_eq!(out.key_b, Point::Residue(3));
    assert!(out.agreed);
    // A sends 3 and gets 3^5 back; B the same.
    assert_eq!(out.transcript.len(), 4);
}

#[test]
fn gdh_rejects_bad_pairs() {
    let mut pair = build_solvable_pair(1, None).unwrap();
    pair.schedule_a.push(1);
    assert!(matches!(gdh_run(&power_cfg(pair)), Err(Error::ScheduleMismatch(_))));
    let a = FreeWord::new(2, &[1, 2]).unwrap();
    let pair = IdentityWordPair::from_words(a.clone(), a).unwrap();
    assert!(matches!(gdh_run(&power_cfg(pair)), Err(Error::TerminalLetterViolation(_))));
}

fn upper(ring: &Ring) -> Vec<Matrix> {
    vec![m(ring, &[[2, 0], [0, 1]]), m(ring, &[[1, 0], [0, 3]]), m(ring, &[[1, 1], [0, 1]])]
}

fn random_word(k: i32, r: &mut rng::Rng) -> GroupWord {
    GroupWord((0..r.gen_range(1..6)).map(|_| r.gen_range(1..=k) * if r.gen_bool(0.5) { 1 } else { -1 }).collect())
}

#[test]
fn metabelian_pair_agrees() {
    let ring = RingSpec::zn(5);
    let pair = build_solvable_pair(2, None).unwrap();
    let mut r = rng::from_seed(3);
    let mut keys = HashSet::new();
    let x0 = RowVector::from_ints(&ring, &[1, 2]);
    for _ in 0..100 {
        let cfg = GdhConfig {
            action: Action::Matrix { gens_a: upper(&ring), gens_b: upper(&ring) },
            pair: pair.clone(),
            x0: vector_point(&x0),
            secret_a: random_word(3, &mut r),
            secret_b: random_word(3, &mut r),
        };
        let out = gdh_run(&cfg).unwrap();
        assert!(out.agreed);
        let ga = word_eval(&upper(&ring), &cfg.secret_a).unwrap();
        let gb = word_eval(&upper(&ring), &cfg.secret_b).unwrap();
        let direct = crate::matrix::vector_act(&x0, &pair.wa.eval(&[ga, gb]).unwrap()).unwrap();
        assert_eq!(out.key_a, vector_point(&direct));
        keys.insert(out.key_a);
    }
    assert!(keys.len() >= 2);
}

#[test]
fn abelian_pair_fails_on_noncommuting_secrets() {
    let ring = RingSpec::zn(5);
    let cfg = GdhConfig {
        action: Action::Matrix { gens_a: vec![m(&ring, &[[1, 1], [0, 1]])], gens_b: vec![m(&ring, &[[1, 0], [1, 1]])] },
        pair: build_solvable_pair(1, None).unwrap(),
        x0: vector_point(&RowVector::from_ints(&ring, &[1, 0])),
        secret_a: GroupWord(vec![1]),
        secret_b: GroupWord(vec![1]),
    };
    let out = gdh_run(&cfg).unwrap();
    assert!(!out.agreed);
    assert_eq!(out.key_a, vector_point(&RowVector::from_ints(&ring, &[1, 1])));
    assert_eq!(out.key_b, vector_point(&RowVector::from_ints(&ring, &[2, 1])));
    assert_eq!(out.warnings.len(), 1);
}
