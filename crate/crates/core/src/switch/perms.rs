use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letter used for gate label `i` (`0 -> 'A'`).
pub fn label_char(i: usize) -> char {
    (b'A' + i as u8) as char
}

pub fn parse_label(c: char) -> Option<usize> {
    c.is_ascii_uppercase().then(|| (c as u8 - b'A') as usize)
}

/// An ordered list of `P` distinct orderings of the gate labels `0..N`.
///
/// `ordering(x)[j]` is the `j`-th gate applied in ordering `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermutationSet {
    n: usize,
    orderings: Vec<Vec<usize>>,
}

impl PermutationSet {
    pub fn new(n: usize, orderings: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > 26 {
            return Err(Error::InvalidPermutations(format!("gate count {n} outside 1..=26")));
        }
        if orderings.is_empty() {
            return Err(Error::InvalidPermutations("no orderings".into()));
        }
        for (x, o) in orderings.iter().enumerate() {
            let mut seen = vec![false; n];
            if o.len() != n {
                return Err(Error::InvalidPermutations(format!("ordering {x} has length {}", o.len())));
            }
            for &g in o {
                if g >= n || seen[g] {
                    return Err(Error::InvalidPermutations(format!("ordering {x} is not a permutation")));
                }
                seen[g] = true;
            }
            if orderings[..x].contains(o) {
                return Err(Error::InvalidPermutations(format!("ordering {x} is repeated")));
            }
        }
        Ok(Self { n, orderings })
    }

    /// Parses letter strings such as `["ABCD", "BADC"]`.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let first = labels.first().ok_or_else(|| Error::InvalidPermutations("no orderings".into()))?;
        let n = first.as_ref().chars().count();
        let orderings = labels
            .iter()
            .map(|s| {
                s.as_ref()
                    .chars()
                    .map(|c| {
                        parse_label(c)
                            .filter(|&i| i < n)
                            .ok_or_else(|| Error::InvalidPermutations(format!("bad label {c:?} in {:?}", s.as_ref())))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, orderings)
    }

    /// The experimental quartet `{ABCD, BADC, CBDA, DACB}`.
    pub fn sigma_star() -> Self {
        Self::from_labels(&["ABCD", "BADC", "CBDA", "DACB"]).expect("valid quartet")
    }

    /// All `N!` orderings, lexicographic, identity first.
    pub fn all(n: usize) -> Result<Self> {
        if n > 8 {
            return Err(Error::LimitExceeded(format!("{n}! orderings")));
        }
        Self::new(n, all_permutations(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.orderings.len()
    }

    pub fn ordering(&self, x: usize) -> &[usize] {
        &self.orderings[x]
    }

    pub fn orderings(&self) -> &[Vec<usize>] {
        &self.orderings
    }

    pub fn labels(&self) -> Vec<String> {
        self.orderings.iter().map(|o| o.iter().map(|&g| label_char(g)).collect()).collect()
    }

    /// Whether ordering 0 is `A B C ...`.
    pub fn is_reference_identity(&self) -> bool {
        self.orderings[0].iter().enumerate().all(|(j, &g)| j == g)
    }

    /// Renames every gate `g` to `relabel[g]`.
    pub fn relabeled(&self, relabel: &[usize]) -> Result<Self> {
        Self::new(self.n, self.orderings.iter().map(|o| o.iter().map(|&g| relabel[g]).collect()).collect())
    }

    /// Set with one more ordering appended.
    pub fn with_ordering(&self, ordering: Vec<usize>) -> Result<Self> {
        let mut orderings = self.orderings.clone();
        orderings.push(ordering);
        Self::new(self.n, orderings)
    }
}

impl fmt::Display for PermutationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

/// Lexicographic list of all permutations of `0..n`.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else { break };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}
