//! Shortest common supersequences of gate orderings: the query count of the
//! best fixed-order circuit that contains every ordering.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::switch::{all_permutations, label_char, parse_label, PermutationSet};

pub const MAX_SCS_GATES: usize = 6;
pub const MAX_SCS_ORDERINGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupersequenceResult {
    pub sequence: String,
    pub length: usize,
    /// Greedy-leftmost positions realizing each ordering, in input order.
    pub embeddings: Vec<Vec<usize>>,
}

impl SupersequenceResult {
    /// Wraps a candidate sequence, failing if some ordering does not embed.
    pub fn from_sequence(sequence: &str, perms: &PermutationSet) -> Result<Self> {
        let embeddings = perms
            .orderings()
            .iter()
            .enumerate()
            .map(|(x, o)| embed(sequence, o).ok_or(Error::MissingEmbedding(x)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sequence: sequence.to_string(), length: sequence.chars().count(), embeddings })
    }
}

fn embed(sequence: &str, ordering: &[usize]) -> Option<Vec<usize>> {
    let mut positions = Vec::with_capacity(ordering.len());
    let mut want = ordering.iter().peekable();
    for (pos, c) in sequence.chars().enumerate() {
        match want.peek() {
            Some(&&g) if parse_label(c) == Some(g) => {
                positions.push(pos);
                want.next();
            }
            Some(_) => {}
            None => break,
        }
    }
    want.peek().is_none().then_some(positions)
}

/// Greedy-leftmost subsequence test of `perm` (a label string) in `sequence`.
pub fn is_supersequence(sequence: &str, perm: &str) -> Option<Vec<usize>> {
    let ordering: Option<Vec<usize>> = perm.chars().map(parse_label).collect();
    embed(sequence, &ordering?)
}

/// A lexicographically smallest shortest common supersequence.
///
/// Works on the lattice of progress vectors (how much of each ordering has
/// been matched). Every symbol only moves progress forward, so a single
/// backwards sweep over the mixed-radix index gives each state's distance
/// to the goal; the walk forward then takes the smallest useful symbol.
pub fn scs(perms: &PermutationSet) -> Result<SupersequenceResult> {
    let (n, p) = (perms.n(), perms.p());
    if n > MAX_SCS_GATES || p > MAX_SCS_ORDERINGS {
        return Err(Error::LimitExceeded(format!(
            "supersequence search supports N <= {MAX_SCS_GATES}, P <= {MAX_SCS_ORDERINGS}; got N = {n}, P = {p}"
        )));
    }
    let radix = n + 1;
    let states = radix.pow(p as u32);
    let strides: Vec<usize> = (0..p).map(|j| radix.pow(j as u32)).collect();
    let orderings = perms.orderings();

    let step = |state: usize, symbol: usize| -> usize {
        let mut next = state;
        for j in 0..p {
            let k = state / strides[j] % radix;
            if k < n && orderings[j][k] == symbol {
                next += strides[j];
            }
        }
        next
    };

    let goal = states - 1;
    let mut dist = vec![u8::MAX; states];
    dist[goal] = 0;
    for s in (0..goal).rev() {
        dist[s] = (0..n)
            .map(|c| step(s, c))
            .filter(|&t| t != s)
            .map(|t| dist[t])
            .min()
            .map_or(u8::MAX, |d| d.saturating_add(1));
    }

    let mut sequence = String::with_capacity(dist[0] as usize);
    let mut s = 0;
    while s != goal {
        let (c, t) = (0..n)
            .map(|c| (c, step(s, c)))
            .find(|&(_, t)| t != s && dist[t] + 1 == dist[s])
            .expect("shortest path continues");
        sequence.push(label_char(c));
        s = t;
    }
    SupersequenceResult::from_sequence(&sequence, perms)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuartetCensus {
    pub histogram: BTreeMap<usize, usize>,
    pub total: usize,
    /// The quartets attaining the largest length.
    pub longest: Vec<Vec<String>>,
}

/// Supersequence lengths of every quartet of distinct orderings of `n`
/// labels that contains the identity ordering.
pub fn quartet_census(n: usize) -> Result<QuartetCensus> {
    if !(2..=5).contains(&n) {
        return Err(Error::LimitExceeded(format!("quartet census supports 2 <= N <= 5, got {n}")));
    }
    let all = all_permutations(n);
    let others = &all[1..];
    let m = others.len();
    let triples: Vec<(usize, usize, usize)> =
        (0..m).flat_map(|i| (i + 1..m).flat_map(move |j| (j + 1..m).map(move |k| (i, j, k)))).collect();
    let lengths: Vec<(usize, PermutationSet)> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let set = PermutationSet::new(n, vec![all[0].clone(), others[i].clone(), others[j].clone(), others[k].clone()])?;
            Ok((scs(&set)?.length, set))
        })
        .collect::<Result<_>>()?;

    let mut histogram = BTreeMap::new();
    for (len, _) in &lengths {
        *histogram.entry(*len).or_insert(0) += 1;
    }
    let max = histogram.keys().next_back().copied().unwrap_or(0);
    let longest = lengths.iter().filter(|(l, _)| *l == max).map(|(_, s)| s.labels()).collect();
    Ok(QuartetCensus { histogram, total: lengths.len(), longest })
}
