use rand::Rng as _;

use super::*;
use crate::homcrypt::{hc_decrypt, hc_encrypt, hc_encrypt_with, hc_keygen, hc_keygen_with, HomSecretKey, Presentation};
use crate::instance::{hom_apply, hom_build, tree_eval, BaseGroupSpec, DerivationTree, LeafHom, OperationLabel};
use crate::ring::{Ring, RingAutomorphism, RingSpec};
use crate::rng;
use crate::words::FreeWord;

fn m(ring: &Ring, rows: &[[i64; 2]]) -> Matrix {
    Matrix::from_ints(ring, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn gl2_gens(ring: &Ring) -> Vec<Matrix> {
    vec![m(ring, &[[1, 1], [0, 1]]), m(ring, &[[0, 1], [-1, 0]]), m(ring, &[[-1, 0], [0, 1]])]
}

fn random_product(gens: &[Matrix], len: usize, r: &mut rng::Rng) -> Matrix {
    let mut g = Matrix::identity(gens[0].ring(), gens[0].degree());
    for _ in 0..len {
        g = g.mul(&gens[r.gen_range(0..gens.len())]).unwrap();
    }
    g
}

fn unip(p: u64) -> DerivationTree {
    DerivationTree::leaf(BaseGroupSpec::UnipotentCyclic { p })
}

#[test]
fn enumeration_examples() {
    let z5 = RingSpec::zn(5);
    assert_eq!(enumerate_group(&[m(&z5, &[[1, 1], [0, 1]])], 100).unwrap().len(), 5);

    let z15 = (*RingSpec::zn(15)).clone();
    let lift = |p, i| {
        DerivationTree::node(OperationLabel::CrtAssemble { target: z15.clone(), indices: vec![i] }, vec![unip(p)])
    };
    let t = DerivationTree::node(OperationLabel::DirectSameDegree { s: 2 }, vec![lift(3, 0), lift(5, 1)]);
    let inst = tree_eval(&t).unwrap();
    let group = enumerate_group(&inst.gens, 100).unwrap();
    assert_eq!(group.len(), 15);
    for g in &group.elements {
        let rows = g.to_int_rows().unwrap();
        assert_eq!((rows[0][0], rows[1][0], rows[1][1]), (1, 0, 1));
    }
    assert_eq!(enumerate_group(&inst.gens, 10).unwrap_err(), Error::CapExceeded(10));
    assert_eq!(enumerate_group(&[Matrix::zero(&z5, 2)], 10).unwrap_err(), Error::NonInvertible);
}

#[test]
fn oracle_answers_carry_witnesses() {
    let f3 = RingSpec::gf(3);
    let group = enumerate_group(&gl2_gens(&f3), 1000).unwrap();
    assert_eq!(group.len(), 48);
    let id = Matrix::identity(&f3, 2);
    assert_eq!(
        oracle_solve(&group, &OracleQuery::Membership(id.clone())).unwrap(),
        OracleAnswer::Solution { element: id, word: GroupWord(vec![]) }
    );
    let mut r = rng::from_seed(4);
    for _ in 0..20 {
        let g = group.elements[r.gen_range(0..48)].clone();
        let h = group.elements[r.gen_range(0..48)].clone();
        let f = g.conjugate_by(&h).unwrap();
        let OracleAnswer::Solution { element, word } = oracle_solve(&group, &OracleQuery::Conjugacy { f: f.clone(), g: g.clone() }).unwrap()
        else {
            panic!("conjugate not found")
        };
        assert_eq!(g.conjugate_by(&element).unwrap(), f);
        assert_eq!(crate::matrix::word_eval(&group.gens, &word).unwrap(), element);
    }
    // Upper unitriangular matrices never move e_1 to e_2.
    let z5 = RingSpec::zn(5);
    let unitri = enumerate_group(&[m(&z5, &[[1, 1], [0, 1]])], 10).unwrap();
    let (u, v) = (RowVector::basis(&z5, 2, 1), RowVector::basis(&z5, 2, 0));
    assert_eq!(oracle_solve(&unitri, &OracleQuery::Ltp { u: u.clone(), v: v.clone() }).unwrap(), OracleAnswer::NoSolution);
    let OracleAnswer::Solution { element, .. } = oracle_solve(&unitri, &OracleQuery::Ltp { u: v.clone(), v: v.clone() }).unwrap() else {
        panic!()
    };
    assert_eq!(vector_act(&v, &element).unwrap(), v);
}

#[test]
fn scsp_examples() {
    let z5 = RingSpec::zn(5);
    let g = m(&z5, &[[1, 1], [0, 1]]);
    let f = m(&z5, &[[1, 3], [0, 1]]);
    // [[2,0],[0,1]] is one conjugator.
    assert_eq!(g.conjugate_by(&m(&z5, &[[2, 0], [0, 1]])).unwrap(), f);
    let out = scsp_linear_attack(&gl2_gens(&z5), &f, &g, 1).unwrap();
    assert_eq!(g.conjugate_by(&out.h).unwrap(), f);
    assert!(out.warnings.is_empty());
    let out = scsp_linear_attack(&gl2_gens(&z5), &g, &g, 1).unwrap();
    assert_eq!(g.conjugate_by(&out.h).unwrap(), g);

    let f3 = RingSpec::gf(3);
    let g3 = m(&f3, &[[1, 1], [0, 1]]);
    let out = scsp_linear_attack(&gl2_gens(&f3), &g3, &g3, 0).unwrap();
    assert_eq!(out.warnings.len(), 1);

    // Non-conjugate inputs leave only singular solutions.
    let id = Matrix::identity(&z5, 2);
    assert!(matches!(scsp_linear_attack(&gl2_gens(&z5), &g, &id, 0), Err(Error::Failure(_)) | Err(Error::NoSolutionSpace)));
    let z4 = RingSpec::zn(4);
    assert!(matches!(
        scsp_linear_attack(&gl2_gens(&z4), &m(&z4, &[[1, 1], [0, 1]]), &m(&z4, &[[1, 1], [0, 1]]), 0),
        Err(Error::UnsupportedDecomposition(_))
    ));
}

#[test]
fn scsp_random_instances() {
    let mut r = rng::from_seed(8);
    for q in [17u64, 31] {
        let ring = RingSpec::gf(q);
        let gens = gl2_gens(&ring);
        let mut ok = 0;
        for seed in 0..40 {
            let g = random_product(&gens, 12, &mut r);
            let h = random_product(&gens, 12, &mut r);
            let f = g.conjugate_by(&h).unwrap();
            if let Ok(out) = scsp_linear_attack(&gens, &f, &g, seed) {
                assert_eq!(g.conjugate_by(&out.h).unwrap(), f);
                ok += 1;
            }
        }
        assert!(ok >= 36, "q = {q}: {ok}/40");
    }
}

#[test]
fn linearity_attack_on_conjugation() {
    let ring = RingSpec::gf(7);
    let gens = gl2_gens(&ring);
    let mut r = rng::from_seed(5);
    let c = random_product(&gens, 9, &mut r);
    let images: Vec<Matrix> = gens.iter().map(|g| g.conjugate_by(&c).unwrap()).collect();
    for _ in 0..100 {
        let q = random_product(&gens, 15, &mut r);
        assert_eq!(linearity_attack(&gens, &images, &q), LinearityVerdict::Predicted(q.conjugate_by(&c).unwrap()));
    }
    // Outside the span of a unipotent group.
    let u = vec![m(&ring, &[[1, 1], [0, 1]])];
    let swap = m(&ring, &[[0, 1], [1, 0]]);
    assert_eq!(linearity_attack(&u, &u, &swap), LinearityVerdict::Inconclusive);
}

#[test]
fn linearity_attack_breaks_on_frobenius() {
    let t = DerivationTree::leaf(BaseGroupSpec::GeneralLinear { n: 2, q: 4 });
    let gf4 = RingSpec::gf(4);
    let aut = RingAutomorphism::new(&gf4, vec![1]).unwrap();
    let h = hom_build(&t, &[LeafHom::Frobenius { aut }]).unwrap();
    let gens = tree_eval(&t).unwrap().gens;
    let mut r = rng::from_seed(6);
    let mut mismatch = None;
    for _ in 0..100 {
        let q = random_product(&gens, 10, &mut r);
        let truth = hom_apply(&h, &q).unwrap();
        if let LinearityVerdict::Predicted(p) = linearity_attack(&gens, &h.gen_images, &q) {
            if p != truth {
                mismatch = Some((q, p, truth));
                break;
            }
        }
    }
    assert!(mismatch.is_some());

    let trivial = hom_build(&t, &[LeafHom::Trivial]).unwrap();
    let broken = (0..50).any(|_| {
        let (a, b) = (random_product(&gens, 6, &mut r), random_product(&gens, 6, &mut r));
        !multiplicative_check(&gens, &trivial.gen_images, &a, &b)
    });
    assert!(broken);
}

#[test]
fn coset_attack_on_klein_four() {
    let p = Presentation::klein_four();
    let model = p.model.clone().unwrap();
    let e = FreeWord::identity(2);
    let sigma = HomSecretKey::new(vec![2, 1]).unwrap();
    let w = |l: &[i32]| FreeWord::new(2, l).unwrap();
    let (pk, sk) = hc_keygen_with(&p, &sigma, &[(w(&[1, 1]), e.clone()), (e.clone(), w(&[2, 2]))]).unwrap();
    let attack = coset_attack(&pk, &model, 64).unwrap();
    assert_eq!(attack.table.len(), 4);

    let c = hc_encrypt_with(&pk, &w(&[1]), &[(w(&[1, 2, -1, -2]), e.clone())]).unwrap();
    let CosetVerdict::Recovered { plaintext, .. } = attack.recover(&c).unwrap() else { panic!("not recovered") };
    assert_eq!(p.model_equal(&plaintext, &hc_decrypt(&sk, &c).unwrap()).unwrap(), Some(true));
    assert_eq!(coset_attack(&pk, &model, 0).unwrap().recover(&c).unwrap(), CosetVerdict::Inconclusive);

    let (pk, sk) = hc_keygen(&p, 3).unwrap();
    let attack = coset_attack(&pk, &model, 400).unwrap();
    let mut r = rng::from_seed(3);
    for seed in 0..20 {
        let msg = FreeWord::random(2, r.gen_range(1..4), &mut r);
        let c = hc_encrypt(&pk, &msg, seed).unwrap();
        let CosetVerdict::Recovered { plaintext, certificate } = attack.recover(&c).unwrap() else {
            panic!("not recovered: {msg}")
        };
        assert!(certificate.len() <= 400);
        assert_eq!(p.model_equal(&plaintext, &hc_decrypt(&sk, &c).unwrap()).unwrap(), Some(true));
        assert_eq!(p.model_equal(&plaintext, &msg).unwrap(), Some(true));
    }
}

#[test]
fn reports_round_trip() {
    let rep = AttackReport {
        attack: "scsp".into(),
        verdict: "success".into(),
        witness: Some("[[1,0],[0,1]]".into()),
        verified: true,
        seed: 3,
        warnings: vec![],
    };
    assert_eq!(AttackReport::from_text(&rep.to_text()).unwrap(), rep);
}
