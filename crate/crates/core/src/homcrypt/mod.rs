//! A homomorphic public-key cryptosystem over a free group.
//!
//! The plaintext group is `H = <Y; R>`. The public key hides a permutation
//! `sigma` of `Y` behind words `x_y = phi_sigma^-1(r_y y r'_y)` where the
//! paddings lie in the normal closure of `R`. Decryption applies `sigma`
//! letterwise.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{word_eval, Matrix};
use crate::ring::RingSpec;
use crate::rng;
use crate::words::FreeWord;


/// Keygen gives up after this many collapsed or colliding key words.
pub const KEYGEN_RETRIES: usize = 64;

/// A finite group in which relators can be checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Images of the generators as permutations of `0..n`, acting on the right.
    Permutations(Vec<Vec<usize>>),
    Matrices(Vec<Matrix>),
}

/// The value of a word in a [`Model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelElement {
    Permutation(Vec<usize>),
    Matrix(Matrix),
}

impl ModelElement {
    pub fn is_identity(&self) -> bool {
        match self {
            ModelElement::Permutation(p) => p.iter().enumerate().all(|(i, &x)| i == x),
            ModelElement::Matrix(m) => m.is_identity(),
        }
    }
}

impl Model {
    pub fn generator_count(&self) -> usize {
        match self {
            Model::Permutations(ps) => ps.len(),
            Model::Matrices(ms) => ms.len(),
        }
    }

    pub fn eval(&self, w: &FreeWord) -> Result<ModelElement> {
        if w.alphabet() != self.generator_count() {
            return Err(Error::ArityMismatch { expected: self.generator_count(), got: w.alphabet() });
        }
        match self {
            Model::Matrices(ms) => Ok(ModelElement::Matrix(word_eval(ms, &w.to_group_word())?)),
            Model::Permutations(ps) => {
                let n = ps[0].len();
                let inverses: Vec<Vec<usize>> = ps
                    .iter()
                    .map(|p| {
                        let mut inv = vec![0; n];
                        for (i, &x) in p.iter().enumerate() {
                            inv[x] = i;
                        }
                        inv
                    })
                    .collect();
                let mut acc: Vec<usize> = (0..n).collect();
                for &l in w.letters() {
                    let i = l.unsigned_abs() as usize - 1;
                    let g = if l > 0 { &ps[i] } else { &inverses[i] };
                    for x in acc.iter_mut() {
                        *x = g[*x];
                    }
                }
                Ok(ModelElement::Permutation(acc))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Model::Permutations(ps) => {
                let n = ps.first().map_or(0, Vec::len);
                for p in ps {
                    let mut seen = vec![false; n];
                    if p.len() != n || p.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
                        return Err(Error::Format("model image is not a permutation".into()));
                    }
                }
            }
            Model::Matrices(ms) => {
                if ms.iter().any(|m| !m.is_invertible()) {
                    return Err(Error::NonInvertible);
                }
            }
        }
        Ok(())
    }
}

/// `<y_1 .. y_k; relations>` with an optional finite model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub k: usize,
    pub relations: Vec<FreeWord>,
    pub model: Option<Model>,
}

#[derive(Serialize, Deserialize)]
struct PresentationRepr {
    k: usize,
    relations: Vec<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<Model>,
}

fn words(k: usize, raw: &[Vec<i32>]) -> Result<Vec<FreeWord>> {
    raw.iter().map(|w| FreeWord::new(k, w)).collect()
}

fn raw(ws: &[FreeWord]) -> Vec<Vec<i32>> {
    ws.iter().map(|w| w.letters().to_vec()).collect()
}

impl Presentation {
    /// Checks the alphabet and, when a model is given, that it satisfies
    /// every relation.
    pub fn new(k: usize, relations: Vec<FreeWord>, model: Option<Model>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Format(format!("alphabet of size {k}; need at least 2")));
        }
        if relations.iter().any(|r| r.alphabet() != k) {
            return Err(Error::AlphabetMismatch);
        }
        if let Some(m) = &model {
            if m.generator_count() != k {
                return Err(Error::ArityMismatch { expected: k, got: m.generator_count() });
            }
            m.validate()?;
            for r in &relations {
                if !m.eval(r)?.is_identity() {
                    return Err(Error::Format(format!("model violates relation {r}")));
                }
            }
        }
        Ok(Presentation { k, relations, model })
    }

    /// `<y_1, y_2; y_1^2, y_2^2, [y_1, y_2]>` acting on four points.
    pub fn klein_four() -> Self {
        let w = |l: &[i32]| FreeWord::new(2, l).unwrap();
        let model = Model::Permutations(vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]);
        Self::new(2, vec![w(&[1, 1]), w(&[2, 2]), w(&[-1, -2, 1, 2])], Some(model)).expect("valid fixture")
    }

    /// `<y_1, y_2; y_1^2, y_2^3, (y_1 y_2)^2>` acting on three points.
    pub fn symmetric3() -> Self {
        let w = |l: &[i32]| FreeWord::new(2, l).unwrap();
        let model = Model::Permutations(vec![vec![1, 0, 2], vec![1, 2, 0]]);
        Self::new(2, vec![w(&[1, 1]), w(&[2, 2, 2]), w(&[1, 2, 1, 2])], Some(model)).expect("valid fixture")
    }

    /// `<y_1, y_2; y_1^4, y_2^2, (y_2 y_1)^2>` as rotation and reflection
    /// matrices over `Z_5`.
    pub fn dihedral4() -> Self {
        let w = |l: &[i32]| FreeWord::new(2, l).unwrap();
        let ring = RingSpec::zn(5);
        let model = Model::Matrices(vec![
            Matrix::from_ints(&ring, &[vec![0, -1], vec![1, 0]]).unwrap(),
            Matrix::from_ints(&ring, &[vec![1, 0], vec![0, -1]]).unwrap(),
        ]);
        Self::new(2, vec![w(&[1, 1, 1, 1]), w(&[2, 2]), w(&[2, 1, 2, 1])], Some(model)).expect("valid fixture")
    }

    pub fn fixture(name: &str) -> Option<Self> {
        match name {
            "klein4" => Some(Self::klein_four()),
            "s3" => Some(Self::symmetric3()),
            "d4" => Some(Self::dihedral4()),
            _ => None,
        }
    }

    fn repr(&self) -> PresentationRepr {
        PresentationRepr { k: self.k, relations: raw(&self.relations), model: self.model.clone() }
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.repr()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: PresentationRepr = serde_json::from_str(text)?;
        Self::new(r.k, words(r.k, &r.relations)?, r.model)
    }

    /// Whether two words are equal in the model; `None` without one.
    pub fn model_equal(&self, a: &FreeWord, b: &FreeWord) -> Result<Option<bool>> {
        match &self.model {
            None => Ok(None),
            Some(m) => Ok(Some(m.eval(a)? == m.eval(b)?)),
        }
    }
}

/// A random product of conjugates `w^-1 r^(+-1) w` of relators, at most
/// `4 * target_length` letters long after reduction.
pub fn sample_relator(p: &Presentation, target_length: usize, seed: u64) -> FreeWord {
    let mut r = rng::from_seed(seed);
    sample_with(p, target_length, &mut r)
}

fn sample_with(p: &Presentation, target_length: usize, r: &mut rng::Rng) -> FreeWord {
    let mut acc = FreeWord::identity(p.k);
    if p.relations.is_empty() || target_length == 0 {
        return acc;
    }
    let cap = 4 * target_length;
    for _ in 0..8 * target_length {
        if acc.len() >= target_length {
            break;
        }
        let rel = &p.relations[r.gen_range(0..p.relations.len())];
        let rel = if r.gen_bool(0.5) { rel.clone() } else { rel.inv() };
        let w = FreeWord::random(p.k, r.gen_range(0..=target_length / 2), r);
        let next = acc.mul(&w.inv().mul(&rel).and_then(|c| c.mul(&w)).expect("same alphabet")).expect("same alphabet");
        if next.len() <= cap {
            acc = next;
        }
    }
    acc
}

fn padding_length(k: usize, r: &mut rng::Rng) -> usize {
    r.gen_range(k..=2 * k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomPublicKey {
    pub presentation: Presentation,
    pub x_words: Vec<FreeWord>,
    /// `f(x_words[i]) = y_{f_table[i]}`, 1-based.
    pub f_table: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSecretKey {
    /// `y_i -> y_{sigma[i-1]}`, 1-based.
    pub sigma: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PublicRepr {
    k: usize,
    relations: Vec<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<Model>,
    x_words: Vec<Vec<i32>>,
    f_table: Vec<usize>,
}

fn check_permutation(p: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if p.len() != k || p.iter().any(|&x| x == 0 || x > k || std::mem::replace(&mut seen[x - 1], true)) {
        return Err(Error::Format(format!("not a permutation of 1..{k}")));
    }
    Ok(())
}

impl HomPublicKey {
    pub fn canonical_json(&self) -> String {
        let p = &self.presentation;
        let repr = PublicRepr {
            k: p.k,
            relations: raw(&p.relations),
            model: p.model.clone(),
            x_words: raw(&self.x_words),
            f_table: self.f_table.clone(),
        };
        serde_json::to_string(&repr).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: PublicRepr = serde_json::from_str(text)?;
        let presentation = Presentation::new(r.k, words(r.k, &r.relations)?, r.model)?;
        let x_words = words(r.k, &r.x_words)?;
        check_permutation(&r.f_table, r.k)?;
        if x_words.len() != r.k || x_words.iter().any(FreeWord::is_empty) {
            return Err(Error::Format("need one nonempty key word per generator".into()));
        }
        Ok(HomPublicKey { presentation, x_words, f_table: r.f_table })
    }

    /// `f^-1` on words over `Y`: each letter becomes its key word.
    pub fn lift(&self, w: &FreeWord) -> Result<FreeWord> {
        let mut images = vec![FreeWord::identity(self.presentation.k); self.presentation.k];
        for (x, &y) in self.x_words.iter().zip(&self.f_table) {
            images[y - 1] = x.clone();
        }
        w.substitute(&images)
    }
}

impl HomSecretKey {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        check_permutation(&sigma, sigma.len())?;
        Ok(HomSecretKey { sigma })
    }

    pub fn inverse(&self) -> HomSecretKey {
        let mut inv = vec![0; self.sigma.len()];
        for (i, &s) in self.sigma.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        HomSecretKey { sigma: inv }
    }

    /// The automorphism `phi_sigma` of the free group.
    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        let k = self.sigma.len();
        let images = self
            .sigma
            .iter()
            .map(|&s| FreeWord::generator(k, s as i32))
            .collect::<Result<Vec<_>>>()?;
        w.substitute(&images)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sk: HomSecretKey = serde_json::from_str(text)?;
        Self::new(sk.sigma)
    }
}

/// Keys for an explicit `sigma` and paddings `(r_y, r'_y)`, one pair per
/// generator. Key words are listed in generator order.
pub fn hc_keygen_with(
    p: &Presentation,
    sigma: &HomSecretKey,
    paddings: &[(FreeWord, FreeWord)],
) -> Result<(HomPublicKey, HomSecretKey)> {
    if sigma.sigma.len() != p.k || paddings.len() != p.k {
        return Err(Error::ArityMismatch { expected: p.k, got: paddings.len().min(sigma.sigma.len()) });
    }
    let back = sigma.inverse();
    let mut x_words = Vec::with_capacity(p.k);
    for (i, (r, r2)) in paddings.iter().enumerate() {
        let y = FreeWord::generator(p.k, i as i32 + 1)?;
        x_words.push(back.apply(&r.mul(&y)?.mul(r2)?)?);
    }
    let pk = HomPublicKey { presentation: p.clone(), x_words, f_table: (1..=p.k).collect() };
    Ok((pk, sigma.clone()))
}

/// A random key. Key words are shuffled so that their order says nothing
/// about `f`.
pub fn hc_keygen(p: &Presentation, seed: u64) -> Result<(HomPublicKey, HomSecretKey)> {
    if p.k < 2 {
        return Err(Error::Format("alphabet of size < 2".into()));
    }
    let mut r = rng::from_seed(seed);
    let mut sigma: Vec<usize> = (1..=p.k).collect();
    sigma.shuffle(&mut r);
    let sk = HomSecretKey::new(sigma)?;
    for _ in 0..KEYGEN_RETRIES {
        let paddings: Vec<(FreeWord, FreeWord)> = (0..p.k)
            .map(|_| {
                let a = padding_length(p.k, &mut r);
                let b = padding_length(p.k, &mut r);
                (sample_with(p, a, &mut r), sample_with(p, b, &mut r))
            })
            .collect();
        let (pk, _) = hc_keygen_with(p, &sk, &paddings)?;
        let distinct: std::collections::HashSet<&FreeWord> = pk.x_words.iter().collect();
        if pk.x_words.iter().any(FreeWord::is_empty) || distinct.len() < p.k {
            continue;
        }
        let mut order: Vec<usize> = (0..p.k).collect();
        order.shuffle(&mut r);
        let x_words = order.iter().map(|&i| pk.x_words[i].clone()).collect();
        let f_table = order.iter().map(|&i| i + 1).collect();
        return Ok((HomPublicKey { x_words, f_table, ..pk }, sk));
    }
    Err(Error::DegenerateKey(KEYGEN_RETRIES))
}

/// `E(M)` with explicit paddings `(s_j, s'_j)`, one pair per letter.
pub fn hc_encrypt_with(pk: &HomPublicKey, m: &FreeWord, paddings: &[(FreeWord, FreeWord)]) -> Result<FreeWord> {
    let k = pk.presentation.k;
    let m = &FreeWord::new(k, m.letters())?;
    if paddings.len() != m.len() {
        return Err(Error::ArityMismatch { expected: m.len(), got: paddings.len() });
    }
    let mut out = FreeWord::identity(k);
    for (&l, (s, s2)) in m.letters().iter().zip(paddings) {
        let padded = s.mul(&FreeWord::generator(k, l)?)?.mul(s2)?;
        out = out.mul(&pk.lift(&padded)?)?;
    }
    Ok(out)
}

pub fn hc_encrypt(pk: &HomPublicKey, m: &FreeWord, seed: u64) -> Result<FreeWord> {
    let k = pk.presentation.k;
    let m = &FreeWord::new(k, m.letters())?;
    let mut r = rng::from_seed(seed);
    let paddings: Vec<(FreeWord, FreeWord)> = (0..m.len())
        .map(|_| {
            let a = padding_length(k, &mut r);
            let b = padding_length(k, &mut r);
            (sample_with(&pk.presentation, a, &mut r), sample_with(&pk.presentation, b, &mut r))
        })
        .collect();
    hc_encrypt_with(pk, m, &paddings)
}

/// `D(C)`: `sigma` letterwise.
pub fn hc_decrypt(sk: &HomSecretKey, c: &FreeWord) -> Result<FreeWord> {
    sk.apply(&FreeWord::new(sk.sigma.len(), c.letters())?)
}
