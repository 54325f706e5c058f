//! Reduced words in free groups and the identity word pairs used by the
//! identity-based key agreement.

use std::collections::HashSet;
use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{word_eval, GroupWord, Matrix};
use crate::rng;

/// The generator `u_A` of `F_2`.
pub const U_A: i32 = 1;
/// The generator `u_B` of `F_2`.
pub const U_B: i32 = 2;

/// A freely reduced word over the letters `±1 ..= ±alphabet`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    alphabet: usize,
    letters: Vec<i32>,
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.letters)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, (letter, exp)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = if self.alphabet == 2 {
                if letter == U_A { "uA".to_string() } else { "uB".to_string() }
            } else {
                format!("y{letter}")
            };
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
        }
        Ok(())
    }
}

fn reduce_into(out: &mut Vec<i32>, letters: impl IntoIterator<Item = i32>) {
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

impl FreeWord {
    /// Freely reduces `letters`. Letters must be nonzero with absolute value
    /// at most `alphabet`.
    pub fn new(alphabet: usize, letters: &[i32]) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::Format("alphabet size must be at least 1".into()));
        }
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > alphabet {
                return Err(Error::IndexOutOfRange { index: l as i64, len: alphabet });
            }
        }
        let mut out = Vec::with_capacity(letters.len());
        reduce_into(&mut out, letters.iter().copied());
        Ok(FreeWord { alphabet, letters: out })
    }

    pub fn identity(alphabet: usize) -> Self {
        FreeWord { alphabet, letters: Vec::new() }
    }

    pub fn generator(alphabet: usize, i: i32) -> Result<Self> {
        Self::new(alphabet, &[i])
    }

    /// `g^e` for a single letter `g`.
    pub fn letter_power(alphabet: usize, letter: i32, e: i64) -> Result<Self> {
        let l = if e < 0 { -letter } else { letter };
        Self::new(alphabet, &vec![l; e.unsigned_abs() as usize])
    }

    /// A uniformly random reduced word of exactly `len` letters.
    pub fn random(alphabet: usize, len: usize, rng: &mut rng::Rng) -> Self {
        let mut letters: Vec<i32> = Vec::with_capacity(len);
        while letters.len() < len {
            let i = rng.gen_range(1..=alphabet as i32);
            let l = if rng.gen_bool(0.5) { i } else { -i };
            if letters.last() != Some(&-l) {
                letters.push(l);
            }
        }
        FreeWord { alphabet, letters }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut out = self.letters.clone();
        reduce_into(&mut out, other.letters.iter().copied());
        Ok(FreeWord { alphabet: self.alphabet, letters: out })
    }

    pub fn inv(&self) -> Self {
        FreeWord { alphabet: self.alphabet, letters: self.letters.iter().rev().map(|&l| -l).collect() }
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.inv().mul(&other.inv())?.mul(self)?.mul(other)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = Self::identity(self.alphabet);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base).expect("same alphabet");
        }
        out
    }

    /// Replaces letter `i` by `images[i-1]` (and `-i` by its inverse).
    pub fn substitute(&self, images: &[FreeWord]) -> Result<Self> {
        if images.len() != self.alphabet {
            return Err(Error::ArityMismatch { expected: self.alphabet, got: images.len() });
        }
        let target = images[0].alphabet;
        if images.iter().any(|w| w.alphabet != target) {
            return Err(Error::AlphabetMismatch);
        }
        let inverses: Vec<FreeWord> = images.iter().map(|w| w.inv()).collect();
        let mut out = Vec::new();
        for &l in &self.letters {
            let idx = l.unsigned_abs() as usize - 1;
            let img = if l > 0 { &images[idx] } else { &inverses[idx] };
            reduce_into(&mut out, img.letters.iter().copied());
        }
        Ok(FreeWord { alphabet: target, letters: out })
    }

    /// Maximal runs `(letter, exponent)` with `letter > 0`.
    pub fn runs(&self) -> Vec<(i32, i64)> {
        let mut out: Vec<(i32, i64)> = Vec::new();
        for &l in &self.letters {
            let (g, e) = (l.abs(), if l > 0 { 1 } else { -1 });
            match out.last_mut() {
                Some((h, f)) if *h == g => *f += e,
                _ => out.push((g, e)),
            }
        }
        out
    }

    pub fn to_group_word(&self) -> GroupWord {
        GroupWord(self.letters.clone())
    }

    /// Evaluates the word on matrices, one per letter of the alphabet.
    pub fn eval(&self, gens: &[Matrix]) -> Result<Matrix> {
        if gens.len() != self.alphabet {
            return Err(Error::ArityMismatch { expected: self.alphabet, got: gens.len() });
        }
        word_eval(gens, &self.to_group_word())
    }

    /// Deserializes a signed-integer array over an alphabet of the given size.
    pub fn from_json(alphabet: usize, text: &str) -> Result<Self> {
        let letters: Vec<i32> = serde_json::from_str(text)?;
        Self::new(alphabet, &letters)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.letters).expect("serializable")
    }
}

impl Serialize for FreeWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters.serialize(s)
    }
}

/// Alternating exponents of a word in `u_A, u_B` beginning with the power
/// of `first`. A leading zero marks a word that starts with the other letter.
fn schedule_of(w: &FreeWord, first: i32) -> Vec<i64> {
    let runs = w.runs();
    let mut out = Vec::with_capacity(runs.len() + 1);
    if runs.first().is_some_and(|&(g, _)| g != first) {
        out.push(0);
    }
    out.extend(runs.iter().map(|&(_, e)| e));
    out
}

fn word_of_schedule(schedule: &[i64], first: i32) -> Result<FreeWord> {
    let other = if first == U_A { U_B } else { U_A };
    let mut w = FreeWord::identity(2);
    for (i, &e) in schedule.iter().enumerate() {
        let g = if i % 2 == 0 { first } else { other };
        w = w.mul(&FreeWord::letter_power(2, g, e)?)?;
    }
    Ok(w)
}

/// Words `W_A, W_B` in `F_2` with `W_A(g_A, g_B) = W_B(g_A, g_B)` on the
/// intended groups. `schedule_a` lists `a_11, b_11, .., a_1m` and
/// `schedule_b` lists `b_21, a_21, .., b_2m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityWordPair {
    pub wa: FreeWord,
    pub wb: FreeWord,
    pub schedule_a: Vec<i64>,
    pub schedule_b: Vec<i64>,
}

#[derive(Deserialize)]
struct PairRepr {
    wa: Vec<i32>,
    wb: Vec<i32>,
    schedule_a: Vec<i64>,
    schedule_b: Vec<i64>,
}

impl<'de> Deserialize<'de> for IdentityWordPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PairRepr::deserialize(d)?;
        let wa = FreeWord::new(2, &r.wa).map_err(D::Error::custom)?;
        let wb = FreeWord::new(2, &r.wb).map_err(D::Error::custom)?;
        let pair = IdentityWordPair::from_words(wa, wb).map_err(D::Error::custom)?;
        if pair.schedule_a != r.schedule_a || pair.schedule_b != r.schedule_b {
            return Err(D::Error::custom("schedules do not regenerate the words"));
        }
        Ok(pair)
    }
}

impl IdentityWordPair {
    /// Derives both schedules. A pair whose reduced words do not end in the
    /// right letters is kept, see [`Self::satisfies_w1`].
    pub fn from_words(wa: FreeWord, wb: FreeWord) -> Result<Self> {
        if wa.alphabet() != 2 || wb.alphabet() != 2 {
            return Err(Error::AlphabetMismatch);
        }
        if wa.is_empty() || wb.is_empty() {
            return Err(Error::DegeneratePair);
        }
        let schedule_a = schedule_of(&wa, U_A);
        let schedule_b = schedule_of(&wb, U_B);
        Ok(IdentityWordPair { wa, wb, schedule_a, schedule_b })
    }

    /// `W_A` ends in a nonzero power of `u_A` and `W_B` in one of `u_B`,
    /// so each party applies its own secret last.
    pub fn satisfies_w1(&self) -> bool {
        self.wa.letters().last().is_some_and(|l| l.abs() == U_A)
            && self.wb.letters().last().is_some_and(|l| l.abs() == U_B)
    }

    /// Errors unless [`Self::satisfies_w1`] holds.
    pub fn require_w1(&self) -> Result<()> {
        if !self.wa.letters().last().is_some_and(|l| l.abs() == U_A) {
            return Err(Error::TerminalLetterViolation(format!("W_A = {} does not end in a power of uA", self.wa)));
        }
        if !self.wb.letters().last().is_some_and(|l| l.abs() == U_B) {
            return Err(Error::TerminalLetterViolation(format!("W_B = {} does not end in a power of uB", self.wb)));
        }
        Ok(())
    }

    /// Rebuilds the pair from schedules alone.
    pub fn from_schedules(schedule_a: &[i64], schedule_b: &[i64]) -> Result<Self> {
        let pair = Self::from_words(word_of_schedule(schedule_a, U_A)?, word_of_schedule(schedule_b, U_B)?)?;
        if pair.schedule_a != schedule_a || pair.schedule_b != schedule_b {
            return Err(Error::ScheduleMismatch("schedule is not in reduced run-length form".into()));
        }
        Ok(pair)
    }

    /// `m_1` and `m_2`: the number of `u_A` powers in `W_A` and of `u_B`
    /// powers in `W_B`.
    pub fn rounds(&self) -> (usize, usize) {
        (self.schedule_a.len().div_ceil(2), self.schedule_b.len().div_ceil(2))
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Inner words `W_1 .. W_4` of the substitution `u_A -> [W_1, W_2]`,
/// `u_B -> [W_3, W_4]`.
pub fn default_inner() -> [FreeWord; 4] {
    let g = |l| FreeWord::generator(2, l).unwrap();
    [g(U_B), g(U_A), g(-U_A), g(-U_B)]
}

/// The pair `(W_{A,n}, W_{B,n})` for groups of derived length at most `n`.
pub fn build_solvable_pair(n: usize, inner: Option<&[FreeWord; 4]>) -> Result<IdentityWordPair> {
    if n == 0 {
        return Err(Error::Format("derived length must be at least 1".into()));
    }
    let default = default_inner();
    let inner = inner.unwrap_or(&default);
    if inner.iter().any(|w| w.alphabet() != 2) {
        return Err(Error::AlphabetMismatch);
    }
    if !inner[1].letters().last().is_some_and(|l| l.abs() == U_A) {
        return Err(Error::TerminalLetterViolation(format!("W_2 = {} must end in uA", inner[1])));
    }
    if !inner[3].letters().last().is_some_and(|l| l.abs() == U_B) {
        return Err(Error::TerminalLetterViolation(format!("W_4 = {} must end in uB", inner[3])));
    }
    let images = [inner[0].commutator(&inner[1])?, inner[2].commutator(&inner[3])?];
    let mut wa = FreeWord::new(2, &[U_B, U_A])?;
    let mut wb = FreeWord::new(2, &[U_A, U_B])?;
    for _ in 1..n {
        wa = wa.substitute(&images)?;
        wb = wb.substitute(&images)?;
        if wa.is_empty() || wb.is_empty() {
            return Err(Error::DegeneratePair);
        }
    }
    IdentityWordPair::from_words(wa, wb)
}

/// Prefix and inverted suffix of `(u_A u_B)^m`, for groups of exponent
/// dividing `m`.
pub fn build_exponent_pair(m: usize) -> Result<IdentityWordPair> {
    if m == 0 {
        return Err(Error::Format("exponent must be at least 1".into()));
    }
    let full: Vec<i32> = [U_A, U_B].repeat(m);
    let wa = FreeWord::new(2, &full[..2 * m - 1])?;
    let wb = FreeWord::new(2, &full[2 * m - 1..])?.inv();
    IdentityWordPair::from_words(wa, wb)
}

/// Outcome of [`validate_pair`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub w1: bool,
    pub w2: bool,
    pub trials: usize,
    /// The first sampled `(g_A, g_B)` with `W_A != W_B`.
    pub counterexample: Option<(Matrix, Matrix)>,
    pub distinct_values: usize,
    pub warnings: Vec<String>,
}

/// Length range for sampled elements of `G_A` and `G_B`.
const SAMPLE_WORD_LEN: std::ops::RangeInclusive<usize> = 1..=12;

fn sample_element(gens: &[Matrix], rng: &mut rng::Rng) -> Result<Matrix> {
    let len = rng.gen_range(SAMPLE_WORD_LEN);
    let w = FreeWord::random(gens.len(), len, rng);
    word_eval(gens, &w.to_group_word())
}

/// Checks (W1) structurally and (W2) on `trials` random pairs drawn from the
/// groups generated by `gens_a` and `gens_b`.
pub fn validate_pair(
    pair: &IdentityWordPair,
    gens_a: &[Matrix],
    gens_b: &[Matrix],
    trials: usize,
    seed: u64,
) -> Result<PairReport> {
    let w1 = pair.satisfies_w1();
    let mut rng = rng::from_seed(seed);
    let mut counterexample = None;
    let mut values = HashSet::new();
    for _ in 0..trials {
        let ga = sample_element(gens_a, &mut rng)?;
        let gb = sample_element(gens_b, &mut rng)?;
        let pair_gens = [ga.clone(), gb.clone()];
        let ka = pair.wa.eval(&pair_gens)?;
        let kb = pair.wb.eval(&pair_gens)?;
        if ka != kb && counterexample.is_none() {
            counterexample = Some((ga, gb));
        }
        values.insert(ka);
    }
    let mut warnings = Vec::new();
    if values.len() < 2 {
        warnings.push("fewer than two key values".to_string());
    }
    Ok(PairReport {
        w1,
        w2: counterexample.is_none(),
        trials,
        counterexample,
        distinct_values: values.len(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use proptest::prelude::*;

    fn w(letters: &[i32]) -> FreeWord {
        FreeWord::new(2, letters).unwrap()
    }

    /// Independent reduction: repeatedly delete the first cancelling pair.
    fn naive_reduce(mut v: Vec<i32>) -> Vec<i32> {
        loop {
            match (0..v.len().saturating_sub(1)).find(|&i| v[i] == -v[i + 1]) {
                Some(i) => {
                    v.drain(i..i + 2);
                }
                None => return v,
            }
        }
    }

    #[test]
    fn multiplication_examples() {
        assert!(w(&[1]).mul(&w(&[-1])).unwrap().is_empty());
        assert_eq!(w(&[1, 2]).mul(&w(&[-2, 1])).unwrap(), w(&[1, 1]));
        assert_eq!(w(&[1, 2]).mul(&w(&[2])).unwrap(), w(&[1, 2, 2]));
        assert_eq!(w(&[1]).mul(&FreeWord::identity(3)), Err(Error::AlphabetMismatch));
        assert_eq!(w(&[1, 2]).inv(), w(&[-2, -1]));
        assert!(FreeWord::identity(2).inv().is_empty());
        assert!(FreeWord::new(2, &[3]).is_err());
    }

    #[test]
    fn commutator_examples() {
        let (a, b) = (w(&[U_A]), w(&[U_B]));
        assert_eq!(b.commutator(&a).unwrap().letters(), &[-2, -1, 2, 1]);
        assert!(a.commutator(&a).unwrap().is_empty());
        assert_eq!(a.inv().commutator(&b.inv()).unwrap().letters(), &[1, 2, -1, -2]);
    }

    #[test]
    fn solvable_pair_examples() {
        let p1 = build_solvable_pair(1, None).unwrap();
        assert_eq!(p1.wa, w(&[2, 1]));
        assert_eq!(p1.wb, w(&[1, 2]));
        assert_eq!(p1.schedule_a, vec![0, 1, 1]);
        assert_eq!(p1.schedule_b, vec![0, 1, 1]);
        let p2 = build_solvable_pair(2, None).unwrap();
        assert_eq!(p2.wa, w(&[1, 2, -1, -2, -2, -1, 2, 1]));
        assert_eq!(p2.wa.len(), 8);
        assert_eq!(p2.schedule_a, vec![1, 1, -1, -2, -1, 1, 1]);
        let p3 = build_solvable_pair(3, None).unwrap();
        assert_eq!((p3.wa.len(), p3.wb.len()), (32, 32));
        for n in 1..=6 {
            let p = build_solvable_pair(n, None).unwrap();
            let want = 2 * 4usize.pow(n as u32 - 1);
            assert_eq!((p.wa.len(), p.wb.len()), (want, want));
            assert_eq!(IdentityWordPair::from_schedules(&p.schedule_a, &p.schedule_b).unwrap(), p);
        }
    }

    #[test]
    fn inner_words_are_validated() {
        let g = |l| FreeWord::generator(2, l).unwrap();
        let bad = [g(U_A), g(U_B), g(-U_A), g(-U_B)];
        assert!(matches!(build_solvable_pair(2, Some(&bad)), Err(Error::TerminalLetterViolation(_))));
        let bad = [g(U_B), g(U_A), g(-U_A), g(U_A)];
        assert!(matches!(build_solvable_pair(2, Some(&bad)), Err(Error::TerminalLetterViolation(_))));
        let trivial = [g(U_A), g(U_A), g(U_B), g(U_B)];
        assert!(matches!(build_solvable_pair(2, Some(&trivial)), Err(Error::DegeneratePair)));
        let ok = [w(&[2, 2]), g(U_A), g(U_A), w(&[1, 2])];
        let p = build_solvable_pair(2, Some(&ok)).unwrap();
        assert!(p.satisfies_w1());
    }

    #[test]
    fn default_pair_terminal_letters() {
        // the last letter of W_{B,n} cycles u_B, u_B^-1, u_A^-1 with period 3:
        // [u_A^-1, u_B^-1]^-1 ends in u_A^-1 and [u_B, u_A]^-1 ends in u_B
        for n in 1..=6 {
            let p = build_solvable_pair(n, None).unwrap();
            assert_eq!(p.wa.letters().last(), Some(&U_A));
            let want = [U_B, -U_B, -U_A][(n - 1) % 3];
            assert_eq!(p.wb.letters().last(), Some(&want));
            assert_eq!(p.satisfies_w1(), n % 3 != 0);
            assert_eq!(p.require_w1().is_err(), n % 3 == 0);
        }
    }

    #[test]
    fn exponent_pair_examples() {
        let p1 = build_exponent_pair(1).unwrap();
        assert_eq!((p1.wa.clone(), p1.wb.clone()), (w(&[1]), w(&[-2])));
        let p3 = build_exponent_pair(3).unwrap();
        assert_eq!((p3.wa.clone(), p3.wb.clone()), (w(&[1, 2, 1, 2, 1]), w(&[-2])));
        for m in 1..8 {
            let p = build_exponent_pair(m).unwrap();
            assert_eq!(p.wa.mul(&p.wb.inv()).unwrap(), w(&[1, 2]).pow(m as i64));
        }
        // C_3 realized as 1x1 matrices over Z_7 (2 has order 3)
        let z7 = RingSpec::zn(7);
        let g = Matrix::from_ints(&z7, &[vec![2]]).unwrap();
        let gens = [g.clone(), g.clone()];
        let ka = p3.wa.eval(&gens).unwrap();
        assert_eq!(ka, g.pow(5).unwrap());
        assert_eq!(ka, g.pow(-1).unwrap());
        assert_eq!(ka, p3.wb.eval(&gens).unwrap());
    }

    fn upper_triangular_gens(p: u64) -> Vec<Matrix> {
        let r = RingSpec::zn(p);
        vec![
            Matrix::from_ints(&r, &[vec![2, 1], vec![0, 3]]).unwrap(),
            Matrix::from_ints(&r, &[vec![1, 1], vec![0, 1]]).unwrap(),
            Matrix::from_ints(&r, &[vec![3, 0], vec![0, 1]]).unwrap(),
        ]
    }

    #[test]
    fn validation_reports() {
        let gens = upper_triangular_gens(5);
        let p2 = build_solvable_pair(2, None).unwrap();
        let rep = validate_pair(&p2, &gens, &gens, 40, 7).unwrap();
        assert!(rep.w1 && rep.w2, "{rep:?}");
        assert!(rep.distinct_values >= 2);

        let r = RingSpec::zn(5);
        let g = Matrix::from_ints(&r, &[vec![1, 1], vec![0, 1]]).unwrap();
        let h = Matrix::from_ints(&r, &[vec![1, 0], vec![1, 1]]).unwrap();
        assert_ne!(g.mul(&h).unwrap(), h.mul(&g).unwrap());
        let p1 = build_solvable_pair(1, None).unwrap();
        let rep = validate_pair(&p1, &[g], &[h], 20, 1).unwrap();
        assert!(rep.w1 && !rep.w2);
        let (ga, gb) = rep.counterexample.unwrap();
        assert_ne!(ga.mul(&gb).unwrap(), gb.mul(&ga).unwrap());

        let id = vec![Matrix::identity(&r, 2)];
        let rep = validate_pair(&p2, &id, &id, 5, 1).unwrap();
        assert_eq!(rep.warnings, vec!["fewer than two key values".to_string()]);
    }

    #[test]
    fn pair_json_round_trip() {
        let p = build_solvable_pair(2, None).unwrap();
        let json = p.canonical_json();
        assert!(json.starts_with(r#"{"wa":[1,2,-1,-2,-2,-1,2,1],"wb":"#));
        let back: IdentityWordPair = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let tampered = json.replace(r#""schedule_a":[1"#, r#""schedule_a":[2"#);
        assert!(serde_json::from_str::<IdentityWordPair>(&tampered).is_err());
    }

    proptest! {
        #[test]
        fn prop_reduction_matches_naive(v in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..64)) {
            let got = FreeWord::new(3, &v).unwrap().letters().to_vec();
            prop_assert_eq!(got, naive_reduce(v));
        }

        #[test]
        fn prop_group_laws(seed in any::<u64>(), alpha in 1usize..=4, la in 0usize..64, lb in 0usize..64, lc in 0usize..64) {
            let mut rng = crate::rng::from_seed(seed);
            let a = FreeWord::random(alpha, la, &mut rng);
            let b = FreeWord::random(alpha, lb, &mut rng);
            let c = FreeWord::random(alpha, lc, &mut rng);
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.inv().inv(), a.clone());
            prop_assert!(a.mul(&a.inv()).unwrap().is_empty());
        }

        #[test]
        fn prop_solvable_identity_on_triangular(seed in any::<u64>(), n in 2usize..=4) {
            // the upper triangular group has derived length 2
            let gens = upper_triangular_gens(7);
            let pair = build_solvable_pair(n, None).unwrap();
            let mut rng = crate::rng::from_seed(seed);
            let g = sample_element(&gens, &mut rng).unwrap();
            let h = sample_element(&gens, &mut rng).unwrap();
            prop_assert_eq!(pair.wa.eval(&[g.clone(), h.clone()]).unwrap(), pair.wb.eval(&[g, h]).unwrap());
        }
    }
}
