//! The three attacks: linear algebra on conjugacy, linear prediction of a
//! homomorphism, and a coset attack on a small plaintext group.

use matgroup_crypto::analysis::{coset_attack, linearity_attack, scsp_linear_attack, CosetVerdict, LinearityVerdict};
use matgroup_crypto::homcrypt::{hc_encrypt, hc_keygen, Presentation};
use matgroup_crypto::instance::conjugator;
use matgroup_crypto::matrix::{GroupWord, Matrix};
use matgroup_crypto::ring::RingSpec;
use matgroup_crypto::words::FreeWord;

fn main() -> matgroup_crypto::Result<()> {
    let f31 = RingSpec::gf(31);
    let m = |rows: [[i64; 2]; 2]| Matrix::from_ints(&f31, &rows.map(|r| r.to_vec()));
    let gens = vec![m([[1, 1], [0, 1]])?, m([[0, 1], [-1, 0]])?, m([[-1, 0], [0, 1]])?];

    let g = matgroup_crypto::matrix::word_eval(&gens, &GroupWord(vec![1, 2, 1, 1, 3, 2]))?;
    let h = conjugator(&f31, 2, 17);
    let f = g.conjugate_by(&h)?;
    let out = scsp_linear_attack(&gens, &f, &g, 0)?;
    println!("scsp: found h after {} draws, correct {}", out.draws, g.conjugate_by(&out.h)? == f);

    let images: Vec<Matrix> = gens.iter().map(|x| x.conjugate_by(&h)).collect::<Result<_, _>>()?;
    let q = matgroup_crypto::matrix::word_eval(&gens, &GroupWord(vec![2, 3, 1, 2]))?;
    match linearity_attack(&gens, &images, &q) {
        LinearityVerdict::Predicted(p) => println!("linearity: predicted image correct {}", p == q.conjugate_by(&h)?),
        LinearityVerdict::Inconclusive => println!("linearity: inconclusive"),
    }

    let p = Presentation::klein_four();
    let (pk, _) = hc_keygen(&p, 7)?;
    let c = hc_encrypt(&pk, &FreeWord::new(2, &[1, 2, 1])?, 4)?;
    let attack = coset_attack(&pk, p.model.as_ref().expect("finite model"), 400)?;
    match attack.recover(&c)? {
        CosetVerdict::Recovered { plaintext, certificate } => {
            println!("coset: plaintext {} (certificate of {} letters)", plaintext.to_json(), certificate.len())
        }
        CosetVerdict::Inconclusive => println!("coset: inconclusive"),
    }
    Ok(())
}
