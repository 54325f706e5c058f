//! Exhaustive oracles for small groups and the attacks they validate.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{vector_act, GroupWord, Matrix, RowVector};

mod coset;
mod linalg;
mod linearity;
mod scsp;
#[cfg(test)]
mod tests;

pub use coset::{coset_attack, CosetAttack, CosetVerdict};
pub use linearity::{linearity_attack, multiplicative_check, LinearityVerdict};
pub use scsp::{scsp_linear_attack, ScspOutcome, SCSP_DRAWS};

/// A group listed by breadth-first search from the identity.
#[derive(Clone, Debug)]
pub struct EnumeratedGroup {
    pub gens: Vec<Matrix>,
    pub elements: Vec<Matrix>,
    index: HashMap<Vec<u64>, usize>,
    /// `elements[i] = elements[parent] * gens[letter - 1]`.
    parent: Vec<Option<(usize, i32)>>,
    pub cap: usize,
}

impl EnumeratedGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &Matrix) -> bool {
        self.position(g).is_some()
    }

    fn position(&self, g: &Matrix) -> Option<usize> {
        let first = &self.elements[0];
        if g.degree() != first.degree() || g.ring() != first.ring() {
            return None;
        }
        self.index.get(g.data()).copied()
    }

    /// A shortest word in the generators for element `i`.
    pub fn word(&self, mut i: usize) -> GroupWord {
        let mut letters = Vec::new();
        while let Some((p, l)) = self.parent[i] {
            letters.push(l);
            i = p;
        }
        letters.reverse();
        GroupWord(letters)
    }
}

/// Closure of `gens` under right multiplication; `CapExceeded` as soon as
/// it would list more than `cap` elements.
pub fn enumerate_group(gens: &[Matrix], cap: usize) -> Result<EnumeratedGroup> {
    let first = gens.first().ok_or(Error::IndexOutOfRange { index: 1, len: 0 })?;
    if gens.iter().any(|g| !g.is_invertible()) {
        return Err(Error::NonInvertible);
    }
    let id = Matrix::identity(first.ring(), first.degree());
    let mut out = EnumeratedGroup {
        gens: gens.to_vec(),
        index: HashMap::from([(id.data().to_vec(), 0)]),
        elements: vec![id],
        parent: vec![None],
        cap,
    };
    if cap == 0 {
        return Err(Error::CapExceeded(cap));
    }
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for (j, g) in gens.iter().enumerate() {
            let h = out.elements[i].mul(g)?;
            if out.index.contains_key(h.data()) {
                continue;
            }
            if out.elements.len() == cap {
                return Err(Error::CapExceeded(cap));
            }
            out.index.insert(h.data().to_vec(), out.elements.len());
            out.parent.push(Some((i, j as i32 + 1)));
            out.elements.push(h);
            queue.push_back(out.elements.len() - 1);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleQuery {
    /// Is `g` in the group?
    Membership(Matrix),
    /// Some `h` in the group with `h^-1 g h = f`.
    Conjugacy { f: Matrix, g: Matrix },
    /// Some `g` in the group with `u g = v`.
    Ltp { u: RowVector, v: RowVector },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    Solution { element: Matrix, word: GroupWord },
    /// Every element was checked.
    NoSolution,
}

/// Ground truth by scanning every element.
pub fn oracle_solve(group: &EnumeratedGroup, query: &OracleQuery) -> Result<OracleAnswer> {
    let found = |i: usize| OracleAnswer::Solution { element: group.elements[i].clone(), word: group.word(i) };
    match query {
        OracleQuery::Membership(g) => Ok(group.position(g).map_or(OracleAnswer::NoSolution, found)),
        OracleQuery::Conjugacy { f, g } => {
            for (i, h) in group.elements.iter().enumerate() {
                if g.mul(h)? == h.mul(f)? {
                    return Ok(found(i));
                }
            }
            Ok(OracleAnswer::NoSolution)
        }
        OracleQuery::Ltp { u, v } => {
            for (i, h) in group.elements.iter().enumerate() {
                if vector_act(u, h)? == *v {
                    return Ok(found(i));
                }
            }
            Ok(OracleAnswer::NoSolution)
        }
    }
}

/// One attack outcome as written to a report file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub verified: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl AttackReport {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("serializable") + "\n"
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text.trim())?)
    }
}
