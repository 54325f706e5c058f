//! Simulated key agreement between honest parties over one public channel.
//!
//! Every run is a deterministic sequence of messages. The returned
//! [`Transcript`] is exactly what an eavesdropper sees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{fingerprint, GroupInstance};
use crate::matrix::{word_eval, GroupWord, Matrix};

mod gdh;
mod multiparty;
#[cfg(test)]
mod tests;

pub use gdh::{gdh_run, vector_point, Action, GdhConfig, GdhOutcome, Point};
pub use multiparty::{multiparty_run, random_parties, MultiPartyOutcome, PartyConfig};

/// One message on the public channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub round: usize,
    pub sender: String,
    pub receiver: String,
    pub kind: String,
    pub payload: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<Record>,
}

impl Transcript {
    pub(crate) fn push(&mut self, round: usize, sender: &str, receiver: &str, kind: &str, payload: String) {
        self.records.push(Record {
            round,
            sender: sender.into(),
            receiver: receiver.into(),
            kind: kind.into(),
            payload,
        });
    }

    /// One JSON object per line.
    pub fn to_text(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("serializable") + "\n").collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<_, _>>()?;
        Ok(Transcript { records })
    }

    /// The messages a party sent or received, in order.
    pub fn view(&self, party: &str) -> Vec<&Record> {
        self.records.iter().filter(|r| r.sender == party || r.receiver == party).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub(crate) fn matrices_payload(ms: &[Matrix]) -> String {
    serde_json::to_string(&ms.iter().map(Matrix::rows_parts).collect::<Vec<_>>()).expect("serializable")
}

/// Decodes a payload of matrices over the ring of `like`.
pub fn parse_matrices(like: &Matrix, payload: &str) -> Result<Vec<Matrix>> {
    let rows: Vec<Vec<Vec<Vec<Vec<u64>>>>> = serde_json::from_str(payload)?;
    rows.iter().map(|r| Matrix::from_rows_parts(like.ring(), r)).collect()
}

/// Hex SHA-256 of the canonical serialization, for display.
pub fn key_fingerprint(key: &Matrix) -> String {
    fingerprint(key.canonical_json().as_bytes())
}

/// The two-party commutator protocol.
#[derive(Clone, Debug)]
pub struct AagConfig {
    pub instance: GroupInstance,
    pub gens_a: Vec<Matrix>,
    pub gens_b: Vec<Matrix>,
    pub secret_a: GroupWord,
    pub secret_b: GroupWord,
}

#[derive(Clone, Debug)]
pub struct AagOutcome {
    pub key_a: Matrix,
    pub key_b: Matrix,
    pub transcript: Transcript,
    pub warnings: Vec<String>,
}

fn check_gens(instance: &GroupInstance, gens: &[Matrix]) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::IndexOutOfRange { index: 1, len: 0 });
    }
    for g in gens {
        if g.degree() != instance.n {
            return Err(Error::DegreeMismatch(format!("generator of degree {} in degree {}", g.degree(), instance.n)));
        }
        if g.ring() != &instance.ring {
            return Err(Error::RingMismatch);
        }
        if !g.is_invertible() {
            return Err(Error::NonInvertible);
        }
    }
    Ok(())
}

/// Runs both parties. Each evaluates its own secret on the conjugated
/// generators it receives.
pub fn aag_run(cfg: &AagConfig) -> Result<AagOutcome> {
    check_gens(&cfg.instance, &cfg.gens_a)?;
    check_gens(&cfg.instance, &cfg.gens_b)?;
    let a = word_eval(&cfg.gens_a, &cfg.secret_a)?;
    let b = word_eval(&cfg.gens_b, &cfg.secret_b)?;
    let (a_inv, b_inv) = (a.inv()?, b.inv()?);

    let mut transcript = Transcript::default();
    let x_b = cfg.gens_b.iter().map(|g| a_inv.mul(g)?.mul(&a)).collect::<Result<Vec<_>>>()?;
    transcript.push(1, "A", "B", "conjugated-generators", matrices_payload(&x_b));
    let x_a = cfg.gens_a.iter().map(|g| b_inv.mul(g)?.mul(&b)).collect::<Result<Vec<_>>>()?;
    transcript.push(1, "B", "A", "conjugated-generators", matrices_payload(&x_a));

    // a^-1 (b^-1 a b) on A's side, (a^-1 b a)^-1 b on B's.
    let key_a = a_inv.mul(&word_eval(&x_a, &cfg.secret_a)?)?;
    let key_b = word_eval(&x_b, &cfg.secret_b)?.inv()?.mul(&b)?;

    let mut warnings = Vec::new();
    if key_a.is_identity() {
        warnings.push("shared key is the identity; the chosen secrets commute".to_string());
    }
    Ok(AagOutcome { key_a, key_b, transcript, warnings })
}
