//! The word-identity protocol: both parties walk `x_0` through their word,
//! asking the other side to apply its secret in between.

use serde::{Deserialize, Serialize};

use super::Transcript;
use crate::error::{Error, Result};
use crate::matrix::{vector_act, word_eval, GroupWord, Matrix, RowVector};
use crate::ring::{inv_mod, is_prime_u64, pow_mod, Ring};
use crate::words::IdentityWordPair;

/// The group and the set it acts on.
#[derive(Clone, Debug)]
pub enum Action {
    /// Matrices acting on row vectors from the right.
    Matrix { gens_a: Vec<Matrix>, gens_b: Vec<Matrix> },
    /// `Z_{p-1}^*` acting on `Z_p^*` by `x -> x^g`.
    Power { p: u64, gens_a: Vec<u64>, gens_b: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Vector(Vec<Vec<Vec<u64>>>),
    Residue(u64),
}

#[derive(Clone, Debug)]
pub struct GdhConfig {
    pub action: Action,
    pub pair: IdentityWordPair,
    pub x0: Point,
    pub secret_a: GroupWord,
    pub secret_b: GroupWord,
}

#[derive(Clone, Debug)]
pub struct GdhOutcome {
    pub key_a: Point,
    pub key_b: Point,
    pub agreed: bool,
    pub transcript: Transcript,
    pub warnings: Vec<String>,
}

#[derive(Clone)]
enum Elem {
    Matrix(Matrix),
    Exponent(u64),
}

struct Setting {
    ring: Option<Ring>,
    p: u64,
}

impl Setting {
    fn pow(&self, g: &Elem, e: i64) -> Result<Elem> {
        Ok(match g {
            Elem::Matrix(m) => Elem::Matrix(m.pow(e)?),
            Elem::Exponent(x) => {
                let order = self.p - 1;
                let base = if e < 0 { inv_mod(*x, order).ok_or(Error::NonUnit)? } else { *x };
                Elem::Exponent(pow_mod(base, e.unsigned_abs(), order))
            }
        })
    }

    fn act(&self, x: &Point, g: &Elem) -> Result<Point> {
        match (x, g) {
            (Point::Vector(v), Elem::Matrix(m)) => {
                let ring = self.ring.as_ref().expect("matrix action has a ring");
                let v = vector_from_parts(ring, v)?;
                Ok(vector_point(&vector_act(&v, m)?))
            }
            (Point::Residue(x), Elem::Exponent(e)) => Ok(Point::Residue(pow_mod(*x, *e, self.p))),
            _ => Err(Error::TypeError("point does not match the action".into())),
        }
    }
}

fn vector_from_parts(ring: &Ring, v: &[Vec<Vec<u64>>]) -> Result<RowVector> {
    RowVector::from_json(ring, &serde_json::to_string(v).expect("serializable"))
}

/// The point for a row vector.
pub fn vector_point(v: &RowVector) -> Point {
    Point::Vector(serde_json::from_str(&v.canonical_json()).expect("parts"))
}

fn secrets(cfg: &GdhConfig) -> Result<(Setting, Elem, Elem)> {
    match &cfg.action {
        Action::Matrix { gens_a, gens_b } => {
            let first = gens_a.first().or(gens_b.first()).ok_or(Error::IndexOutOfRange { index: 1, len: 0 })?;
            let ring = first.ring().clone();
            if let Point::Vector(v) = &cfg.x0 {
                if v.len() != first.degree() {
                    return Err(Error::ShapeMismatch(format!("x0 has length {} for degree {}", v.len(), first.degree())));
                }
                vector_from_parts(&ring, v)?;
            } else {
                return Err(Error::TypeError("matrix action needs a vector x0".into()));
            }
            let ga = word_eval(gens_a, &cfg.secret_a)?;
            let gb = word_eval(gens_b, &cfg.secret_b)?;
            Ok((Setting { ring: Some(ring), p: 0 }, Elem::Matrix(ga), Elem::Matrix(gb)))
        }
        Action::Power { p, gens_a, gens_b } => {
            if *p < 3 || !is_prime_u64(*p) {
                return Err(Error::NonPrimeP(*p));
            }
            match cfg.x0 {
                Point::Residue(x) if x % p != 0 => {}
                _ => return Err(Error::TypeError(format!("x0 must be a nonzero residue mod {p}"))),
            }
            let eval = |gens: &[u64], w: &GroupWord| -> Result<u64> {
                let order = p - 1;
                let mut acc = 1 % order;
                for &l in &w.0 {
                    let idx = l.unsigned_abs() as usize;
                    if l == 0 || idx > gens.len() {
                        return Err(Error::IndexOutOfRange { index: l as i64, len: gens.len() });
                    }
                    let g = gens[idx - 1] % order;
                    let g = if l > 0 { g } else { inv_mod(g, order).ok_or(Error::NonUnit)? };
                    acc = (acc as u128 * g as u128 % order as u128) as u64;
                }
                Ok(acc)
            };
            for &g in gens_a.iter().chain(gens_b) {
                inv_mod(g, p - 1).ok_or(Error::NonUnit)?;
            }
            let ga = eval(gens_a, &cfg.secret_a)?;
            let gb = eval(gens_b, &cfg.secret_b)?;
            Ok((Setting { ring: None, p: *p }, Elem::Exponent(ga), Elem::Exponent(gb)))
        }
    }
}

fn point_payload(x: &Point) -> String {
    serde_json::to_string(x).expect("serializable")
}

/// One party's walk: its own exponents at even positions of `schedule`,
/// the peer's at odd positions.
struct Walk<'a> {
    name: &'static str,
    schedule: &'a [i64],
    key: Point,
    step: usize,
}

/// Runs both parties in alternating rounds; in round `i` each party that
/// still has requests sends one and answers the other's.
pub fn gdh_run(cfg: &GdhConfig) -> Result<GdhOutcome> {
    cfg.pair.require_w1()?;
    let rebuilt = IdentityWordPair::from_words(cfg.pair.wa.clone(), cfg.pair.wb.clone())?;
    if rebuilt.schedule_a != cfg.pair.schedule_a || rebuilt.schedule_b != cfg.pair.schedule_b {
        return Err(Error::ScheduleMismatch("exponent schedules do not match the words".into()));
    }
    let (setting, ga, gb) = secrets(cfg)?;
    let mut walks = [
        Walk { name: "A", schedule: &cfg.pair.schedule_a, key: cfg.x0.clone(), step: 0 },
        Walk { name: "B", schedule: &cfg.pair.schedule_b, key: cfg.x0.clone(), step: 0 },
    ];
    let own = [&ga, &gb];
    let mut transcript = Transcript::default();
    let mut round = 0;
    while walks.iter().any(|w| w.step + 1 < w.schedule.len()) {
        round += 1;
        for me in 0..2 {
            let peer = 1 - me;
            let w = &walks[me];
            if w.step + 1 >= w.schedule.len() {
                continue;
            }
            let sent = setting.act(&w.key, &setting.pow(own[me], w.schedule[w.step])?)?;
            transcript.push(round, w.name, walks[peer].name, "point", point_payload(&sent));
            let back = setting.act(&sent, &setting.pow(own[peer], w.schedule[w.step + 1])?)?;
            transcript.push(round, walks[peer].name, w.name, "point", point_payload(&back));
            walks[me].key = back;
            walks[me].step += 2;
        }
    }
    for (me, w) in walks.iter_mut().enumerate() {
        w.key = setting.act(&w.key, &setting.pow(own[me], w.schedule[w.step])?)?;
    }
    let [a, b] = walks;
    let agreed = a.key == b.key;
    let mut warnings = Vec::new();
    if !agreed {
        warnings.push("keys differ: the word pair is not an identity on the chosen secrets".to_string());
    }
    Ok(GdhOutcome { key_a: a.key, key_b: b.key, agreed, transcript, warnings })
}
