//! The coset attack on the free-group cryptosystem when the plaintext
//! group is small: list `H`, lift each element, and decide which coset of
//! the kernel a ciphertext lies in.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::homcrypt::{HomPublicKey, Model, ModelElement};
use crate::words::FreeWord;

/// Largest plaintext group the attack will list.
pub const COSET_GROUP_CAP: usize = 4096;
/// Search nodes per ciphertext before giving up.
const SEARCH_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetVerdict {
    Recovered {
        plaintext: FreeWord,
        /// The ciphertext as signed indices into the public key words.
        certificate: Vec<i32>,
    },
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CosetAttack {
    /// `h_i` as a word, its value, and the representative `g_i = f^-1(h_i)`.
    pub table: Vec<(FreeWord, ModelElement, FreeWord)>,
    pub length_bound: usize,
    pk: HomPublicKey,
    model: Model,
    lookup: HashMap<String, usize>,
}

fn key(e: &ModelElement) -> String {
    format!("{e:?}")
}

/// Lists the plaintext group and the coset representatives.
pub fn coset_attack(pk: &HomPublicKey, model: &Model, length_bound: usize) -> Result<CosetAttack> {
    let k = pk.presentation.k;
    if model.generator_count() != k {
        return Err(Error::ArityMismatch { expected: k, got: model.generator_count() });
    }
    let id = FreeWord::identity(k);
    let mut table = vec![(id.clone(), model.eval(&id)?, id)];
    let mut lookup = HashMap::from([(key(&table[0].1), 0)]);
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for y in 1..=k as i32 {
            let w = table[i].0.mul(&FreeWord::generator(k, y)?)?;
            let e = model.eval(&w)?;
            if lookup.contains_key(&key(&e)) {
                continue;
            }
            if table.len() == COSET_GROUP_CAP {
                return Err(Error::CapExceeded(COSET_GROUP_CAP));
            }
            lookup.insert(key(&e), table.len());
            let g = pk.lift(&w)?;
            table.push((w, e, g));
            queue.push_back(table.len() - 1);
        }
    }
    Ok(CosetAttack { table, length_bound, pk: pk.clone(), model: model.clone(), lookup })
}

impl CosetAttack {
    /// Decrypts `c` when it can be written with at most `length_bound` key
    /// words; the coset is then checked through `c g_i^-1` mapping to the
    /// identity.
    pub fn recover(&self, c: &FreeWord) -> Result<CosetVerdict> {
        let Some(cert) = self.express(c) else { return Ok(CosetVerdict::Inconclusive) };
        let k = self.pk.presentation.k;
        let mut image = FreeWord::identity(k);
        for &l in &cert {
            let y = self.pk.f_table[l.unsigned_abs() as usize - 1] as i32;
            image = image.mul(&FreeWord::generator(k, y * l.signum())?)?;
        }
        let value = self.model.eval(&image)?;
        let Some(&i) = self.lookup.get(&key(&value)) else { return Ok(CosetVerdict::Inconclusive) };
        let (h, e, _) = &self.table[i];
        // f(c g_i^-1) = f(c) h_i^-1 must vanish.
        let quotient = image.mul(&h.inv())?;
        if !self.model.eval(&quotient)?.is_identity() || self.model.eval(h)? != *e {
            return Ok(CosetVerdict::Inconclusive);
        }
        Ok(CosetVerdict::Recovered { plaintext: h.clone(), certificate: cert })
    }

    /// Depth-first search for `c` as a reduced product of key words. A
    /// branch survives while its product agrees with `c` except for a tail
    /// no longer than one key word.
    fn express(&self, c: &FreeWord) -> Option<Vec<i32>> {
        let xs = &self.pk.x_words;
        let slack = xs.iter().map(FreeWord::len).max().unwrap_or(0);
        let letters: Vec<i32> = (1..=xs.len() as i32).flat_map(|j| [j, -j]).collect();
        let mut budget = SEARCH_BUDGET;
        let mut path = Vec::new();
        let start = FreeWord::identity(c.alphabet());
        self.dfs(c, &start, &letters, slack, &mut path, &mut budget).then_some(path)
    }

    fn dfs(
        &self,
        c: &FreeWord,
        p: &FreeWord,
        letters: &[i32],
        slack: usize,
        path: &mut Vec<i32>,
        budget: &mut usize,
    ) -> bool {
        if p == c {
            return true;
        }
        if path.len() == self.length_bound || *budget == 0 {
            return false;
        }
        *budget -= 1;
        for &l in letters {
            if path.last() == Some(&-l) {
                continue;
            }
            let x = &self.pk.x_words[l.unsigned_abs() as usize - 1];
            let x = if l > 0 { x.clone() } else { x.inv() };
            let next = p.mul(&x).expect("same alphabet");
            let common = next.letters().iter().zip(c.letters()).take_while(|(a, b)| a == b).count();
            if next.len() - common > slack {
                continue;
            }
            path.push(l);
            if self.dfs(c, &next, letters, slack, path, budget) {
                return true;
            }
            path.pop();
        }
        false
    }
}
