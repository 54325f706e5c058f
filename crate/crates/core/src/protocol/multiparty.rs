//! The recursive commutator protocol for any number of parties.
//!
//! A group of parties agrees on `K = [K_1, K_2]` after its two halves have
//! agreed on `K_1` and `K_2`. Party `i` holds its current key as a product
//! of terms `B^-1 a_i^e B`, where it never learns `B` itself, only the
//! conjugates `B^-1 g B` of its own generators.

use rand::Rng as _;

use super::{matrices_payload, Transcript};
use crate::error::{Error, Result};
use crate::instance::GroupInstance;
use crate::matrix::{GroupWord, Matrix};
use crate::rng;

#[derive(Clone, Debug)]
pub struct PartyConfig {
    pub gens: Vec<Matrix>,
    pub secret: GroupWord,
}

#[derive(Clone, Debug)]
pub struct MultiPartyOutcome {
    pub keys: Vec<Matrix>,
    pub transcript: Transcript,
    /// Multiplications and inversions each party spent on its own key.
    pub op_counts: Vec<u64>,
    /// Work spent answering other parties' conjugation queries.
    pub service_counts: Vec<u64>,
    pub warnings: Vec<String>,
}

#[derive(Clone)]
struct Term {
    sign: i8,
    /// `B^-1 g B` for each of the party's generators.
    conj: Vec<Matrix>,
}

struct Party {
    secret: GroupWord,
    terms: Vec<Term>,
    key: Matrix,
    ops: u64,
    service: u64,
}

fn name(i: usize) -> String {
    format!("P{i}")
}

/// `w^sign` on the given generators, inverting only what the word needs.
fn eval_term(w: &GroupWord, conj: &[Matrix], sign: i8, ops: &mut u64) -> Result<Matrix> {
    let mut invs: Vec<Option<Matrix>> = vec![None; conj.len()];
    let letters: Vec<i32> = if sign > 0 { w.0.clone() } else { w.inverse().0 };
    let mut acc: Option<Matrix> = None;
    for l in letters {
        let idx = l.unsigned_abs() as usize;
        if l == 0 || idx > conj.len() {
            return Err(Error::IndexOutOfRange { index: l as i64, len: conj.len() });
        }
        let g = if l > 0 {
            &conj[idx - 1]
        } else {
            if invs[idx - 1].is_none() {
                *ops += 1;
                invs[idx - 1] = Some(conj[idx - 1].inv()?);
            }
            invs[idx - 1].as_ref().unwrap()
        };
        acc = Some(match acc {
            None => g.clone(),
            Some(a) => {
                *ops += 1;
                a.mul(g)?
            }
        });
    }
    Ok(acc.unwrap_or_else(|| Matrix::identity(conj[0].ring(), conj[0].degree())))
}

fn product(ms: impl IntoIterator<Item = Matrix>, ops: &mut u64) -> Result<Option<Matrix>> {
    let mut acc: Option<Matrix> = None;
    for m in ms {
        acc = Some(match acc {
            None => m,
            Some(a) => {
                *ops += 1;
                a.mul(&m)?
            }
        });
    }
    Ok(acc)
}

/// Runs `s` parties; the key of every party is the nested commutator of
/// the secrets, split `ceil(s/2) / floor(s/2)` at each level.
pub fn multiparty_run(s: usize, configs: &[PartyConfig]) -> Result<MultiPartyOutcome> {
    if s < 2 {
        return Err(Error::BadPartyCount(s));
    }
    if configs.len() != s {
        return Err(Error::ArityMismatch { expected: s, got: configs.len() });
    }
    let mut parties = Vec::with_capacity(s);
    for c in configs {
        if c.gens.is_empty() {
            return Err(Error::IndexOutOfRange { index: 1, len: 0 });
        }
        let mut ops = 0;
        let key = eval_term(&c.secret, &c.gens, 1, &mut ops)?;
        parties.push(Party {
            secret: c.secret.clone(),
            terms: vec![Term { sign: 1, conj: c.gens.clone() }],
            key,
            ops,
            service: 0,
        });
    }
    let mut transcript = Transcript::default();
    let mut round = 0;
    merge(&mut parties, 0, s, &mut transcript, &mut round)?;
    let mut warnings = Vec::new();
    if parties[0].key.is_identity() {
        warnings.push("shared key is the identity; the secrets centralize each other".to_string());
    }
    Ok(MultiPartyOutcome {
        keys: parties.iter().map(|p| p.key.clone()).collect(),
        transcript,
        op_counts: parties.iter().map(|p| p.ops).collect(),
        service_counts: parties.iter().map(|p| p.service).collect(),
        warnings,
    })
}

fn merge(parties: &mut [Party], lo: usize, hi: usize, tr: &mut Transcript, round: &mut usize) -> Result<()> {
    if hi - lo < 2 {
        return Ok(());
    }
    let mid = lo + (hi - lo).div_ceil(2);
    merge(parties, lo, mid, tr, round)?;
    merge(parties, mid, hi, tr, round)?;
    *round += 1;
    let keys = [parties[lo].key.clone(), parties[mid].key.clone()];
    let inverses = [keys[0].inv()?, keys[1].inv()?];
    parties[lo].service += 1;
    parties[mid].service += 1;
    for i in lo..hi {
        let first = i < mid;
        // Queries go to the lowest-index party of the other half.
        let other = if first { mid } else { lo };
        let (k, k_inv) = if first { (&keys[1], &inverses[1]) } else { (&keys[0], &inverses[0]) };
        let mut replies = Vec::with_capacity(parties[i].terms.len());
        for t in parties[i].terms.clone() {
            tr.push(*round, &name(i), &name(other), "conjugation-query", matrices_payload(&t.conj));
            let conj = t.conj.iter().map(|x| k_inv.mul(x)?.mul(k)).collect::<Result<Vec<_>>>()?;
            parties[other].service += 2 * conj.len() as u64;
            tr.push(*round, &name(other), &name(i), "conjugation-reply", matrices_payload(&conj));
            replies.push(Term { sign: t.sign, conj });
        }
        let p = &mut parties[i];
        let mut ops = 0;
        let shifted = replies
            .iter()
            .map(|t| eval_term(&p.secret, &t.conj, t.sign, &mut ops))
            .collect::<Result<Vec<_>>>()?;
        let shifted = product(shifted, &mut ops)?.expect("at least one term");
        let negated = |ts: &[Term]| ts.iter().rev().map(|t| Term { sign: -t.sign, conj: t.conj.clone() }).collect::<Vec<_>>();
        ops += 2;
        if first {
            // K_1^-1 (K_2^-1 K_1 K_2)
            p.key = p.key.inv()?.mul(&shifted)?;
            let mut terms = negated(&p.terms);
            terms.extend(replies);
            p.terms = terms;
        } else {
            // (K_1^-1 K_2 K_1)^-1 K_2
            p.key = shifted.inv()?.mul(&p.key)?;
            let mut terms = negated(&replies);
            terms.append(&mut p.terms);
            p.terms = terms;
        }
        p.ops += ops;
    }
    Ok(())
}

/// Random secrets for `s` parties sharing the instance generators: party
/// `i` gets `gens_per_party` random words in them as its public
/// generators and a secret word of length `word_len`.
pub fn random_parties(
    instance: &GroupInstance,
    s: usize,
    gens_per_party: usize,
    word_len: usize,
    seed: u64,
) -> Result<Vec<PartyConfig>> {
    if instance.gens.is_empty() {
        return Err(Error::IndexOutOfRange { index: 1, len: 0 });
    }
    let mut r = rng::from_seed(seed);
    let k = instance.gens.len() as i32;
    let mut random_word = |alphabet: i32, len: usize| {
        let mut letters: Vec<i32> = Vec::with_capacity(len);
        while letters.len() < len {
            let l = r.gen_range(1..=alphabet) * if r.gen_bool(0.5) { 1 } else { -1 };
            if letters.last() != Some(&-l) {
                letters.push(l);
            }
        }
        GroupWord(letters)
    };
    let mut out = Vec::with_capacity(s);
    for _ in 0..s {
        let gens = (0..gens_per_party)
            .map(|_| crate::matrix::word_eval(&instance.gens, &random_word(k, 4)))
            .collect::<Result<Vec<_>>>()?;
        let secret = random_word(gens_per_party as i32, word_len);
        out.push(PartyConfig { gens, secret });
    }
    Ok(out)
}
