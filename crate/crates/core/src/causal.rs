//! Fixed-gate-order simulation of the switch, and side-information attacks
//! on the reference tables.
//!
//! The fixed-order circuit queries the gates along a common supersequence of
//! all orderings. For control value `x`, the steps on the embedding of
//! ordering `x` act on the target and every other step acts on a per-gate
//! ancilla, routed by a pair of controlled swaps.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Chart;
use crate::scs::{scs, SupersequenceResult};
use crate::switch::{label_char, parse_label, OracleSet, PermutationSet};
use crate::tensor::{inner, ComplexMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Usage {
    Target,
    Ancilla,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedOrderCircuit {
    pub supersequence: String,
    /// Gate queried at each step.
    pub steps: Vec<usize>,
    /// `usage[step][x]`.
    pub usage: Vec<Vec<Usage>>,
    pub query_count: usize,
    pub n: usize,
    pub p: usize,
}

impl FixedOrderCircuit {
    /// Gates applied to the target for control value `x`, in order.
    pub fn target_ordering(&self, x: usize) -> Vec<usize> {
        (0..self.steps.len()).filter(|&k| self.usage[k][x] == Usage::Target).map(|k| self.steps[k]).collect()
    }

    /// Number of ancilla-flagged steps using gate `g` for control value `x`.
    pub fn ancilla_uses(&self, x: usize, g: usize) -> usize {
        (0..self.steps.len()).filter(|&k| self.steps[k] == g && self.usage[k][x] == Usage::Ancilla).count()
    }
}

pub fn build_fixed_circuit(superseq: &SupersequenceResult, perms: &PermutationSet) -> Result<FixedOrderCircuit> {
    let steps: Vec<usize> = superseq
        .sequence
        .chars()
        .map(|c| parse_label(c).filter(|&g| g < perms.n()))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Invalid(format!("sequence {:?} has labels outside the gate set", superseq.sequence)))?;
    // re-derive embeddings so a stale or hand-edited result cannot slip through
    let checked = SupersequenceResult::from_sequence(&superseq.sequence, perms)?;
    let mut usage = vec![vec![Usage::Ancilla; perms.p()]; steps.len()];
    for (x, positions) in checked.embeddings.iter().enumerate() {
        for &k in positions {
            usage[k][x] = Usage::Target;
        }
    }
    Ok(FixedOrderCircuit {
        supersequence: superseq.sequence.clone(),
        query_count: steps.len(),
        steps,
        usage,
        n: perms.n(),
        p: perms.p(),
    })
}

fn check_inputs(circuit: &FixedOrderCircuit, oracle: &OracleSet, control: &PureState, target: &PureState) -> Result<()> {
    if oracle.n() != circuit.n {
        return Err(Error::DimensionMismatch { expected: circuit.n, found: oracle.n() });
    }
    if control.dim() != circuit.p {
        return Err(Error::DimensionMismatch { expected: circuit.p, found: control.dim() });
    }
    if target.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch { expected: oracle.dim(), found: target.dim() });
    }
    Ok(())
}

/// Target and per-gate ancilla states after the circuit, for control value `x`.
fn run_branch(circuit: &FixedOrderCircuit, oracle: &OracleSet, target: &PureState, x: usize) -> (Vec<C64>, Vec<Vec<C64>>) {
    let d = oracle.dim();
    let mut t = target.amplitudes().to_vec();
    let mut ancillas: Vec<Vec<C64>> = (0..circuit.n).map(|_| PureState::basis(d, 0).into_amplitudes()).collect();
    for (k, &g) in circuit.steps.iter().enumerate() {
        let u = &oracle.gate(g).matrix;
        match circuit.usage[k][x] {
            Usage::Target => t = u.apply(&t),
            Usage::Ancilla => ancillas[g] = u.apply(&ancillas[g]),
        }
    }
    (t, ancillas)
}

fn kron_all(parts: &[Vec<C64>]) -> Vec<C64> {
    parts.iter().fold(vec![C64::new(1.0, 0.0)], |acc, p| crate::tensor::kron_vec(&acc, p))
}

/// Joint state over control ⊗ target ⊗ ancilla_A ⊗ ancilla_B ⊗ ..., with
/// every ancilla starting in `|0>`.
pub fn simulate_fixed_circuit(
    circuit: &FixedOrderCircuit,
    oracle: &OracleSet,
    control: &PureState,
    target: &PureState,
) -> Result<PureState> {
    check_inputs(circuit, oracle, control, target)?;
    let mut out = Vec::new();
    for (x, cx) in control.amplitudes().iter().enumerate() {
        let (t, ancillas) = run_branch(circuit, oracle, target, x);
        let mut parts = vec![t];
        parts.extend(ancillas);
        out.extend(kron_all(&parts).into_iter().map(|z| cx * z));
    }
    PureState::normalized(out)
}

/// The same circuit as explicit gates on the joint register: for each step,
/// a controlled swap of target and ancilla `g` (active on the control values
/// that route the query to the target), `U_g` on ancilla `g`, and the swap
/// again.
pub fn simulate_fixed_circuit_gates(
    circuit: &FixedOrderCircuit,
    oracle: &OracleSet,
    control: &PureState,
    target: &PureState,
) -> Result<PureState> {
    check_inputs(circuit, oracle, control, target)?;
    let d = oracle.dim();
    let n = circuit.n;
    // dims: control, target, ancilla 0..n
    let mut dims = vec![circuit.p, d];
    dims.extend(std::iter::repeat_n(d, n));
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len() - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let total: usize = dims.iter().product();
    let mut ancillas: Vec<Vec<C64>> = vec![control.amplitudes().to_vec(), target.amplitudes().to_vec()];
    ancillas.extend((0..n).map(|_| PureState::basis(d, 0).into_amplitudes()));
    let mut psi = kron_all(&ancillas);
    debug_assert_eq!(psi.len(), total);

    let digit = |idx: usize, slot: usize| idx / strides[slot] % dims[slot];
    let cswap = |psi: &mut Vec<C64>, g: usize, active: &[bool]| {
        let slot = 2 + g;
        let mut out = vec![C64::new(0.0, 0.0); total];
        for (idx, &amp) in psi.iter().enumerate() {
            let dest = if active[digit(idx, 0)] {
                let (a, b) = (digit(idx, 1), digit(idx, slot));
                idx - a * strides[1] - b * strides[slot] + b * strides[1] + a * strides[slot]
            } else {
                idx
            };
            out[dest] = amp;
        }
        *psi = out;
    };
    for (k, &g) in circuit.steps.iter().enumerate() {
        let active: Vec<bool> = circuit.usage[k].iter().map(|&u| u == Usage::Target).collect();
        cswap(&mut psi, g, &active);
        let u = &oracle.gate(g).matrix;
        let slot = 2 + g;
        let mut out = vec![C64::new(0.0, 0.0); total];
        for (idx, &amp) in psi.iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let b = digit(idx, slot);
            let base = idx - b * strides[slot];
            for r in 0..d {
                out[base + r * strides[slot]] += u[(r, b)] * amp;
            }
        }
        psi = out;
        cswap(&mut psi, g, &active);
    }
    PureState::normalized(psi)
}

/// `⊗_g U_g^{m_g - 1} |0>`, with `m_g` the occurrences of gate `g` in the
/// supersequence: the ancilla state expected for every control value.
pub fn expected_ancilla_factor(circuit: &FixedOrderCircuit, oracle: &OracleSet) -> PureState {
    let d = oracle.dim();
    let parts: Vec<Vec<C64>> = (0..circuit.n)
        .map(|g| {
            let uses = circuit.steps.iter().filter(|&&s| s == g).count().saturating_sub(1);
            let mut v = PureState::basis(d, 0).into_amplitudes();
            for _ in 0..uses {
                v = oracle.gate(g).matrix.apply(&v);
            }
            v
        })
        .collect();
    PureState::new(kron_all(&parts)).expect("unitaries preserve norm")
}

/// The ancilla factor of branch `x`.
pub fn branch_ancilla_factor(circuit: &FixedOrderCircuit, oracle: &OracleSet, x: usize) -> PureState {
    let (_, ancillas) = run_branch(circuit, oracle, &PureState::basis(oracle.dim(), 0), x);
    PureState::new(kron_all(&ancillas)).expect("unitaries preserve norm")
}

/// Reduced state of control ⊗ target after tracing out the ancillas.
pub fn trace_ancillas(joint: &PureState, circuit: &FixedOrderCircuit, d: usize) -> Result<ComplexMatrix> {
    let keep = circuit.p * d;
    let drop = d.pow(circuit.n as u32);
    if joint.dim() != keep * drop {
        return Err(Error::DimensionMismatch { expected: keep * drop, found: joint.dim() });
    }
    let a = joint.amplitudes();
    Ok(ComplexMatrix::from_fn(keep, keep, |i, j| (0..drop).map(|k| a[i * drop + k] * a[j * drop + k].conj()).sum()))
}

/// Schmidt coefficients across control ⊗ target | ancillas, descending.
pub fn ancilla_schmidt_coefficients(joint: &PureState, circuit: &FixedOrderCircuit, d: usize) -> Result<Vec<f64>> {
    let keep = circuit.p * d;
    let drop = d.pow(circuit.n as u32);
    if joint.dim() != keep * drop {
        return Err(Error::DimensionMismatch { expected: keep * drop, found: joint.dim() });
    }
    Ok(ComplexMatrix::new(keep, drop, joint.amplitudes().to_vec())?.singular_values())
}

/// `<φ| ρ |φ>`.
pub fn fidelity_with(rho: &ComplexMatrix, phi: &PureState) -> f64 {
    inner(phi.amplitudes(), &rho.apply(phi.amplitudes())).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAccounting {
    pub fixed_order: usize,
    pub switch: usize,
    pub gap: usize,
}

/// Gate queries of the best fixed-order circuit versus one switch use.
pub fn query_accounting(perms: &PermutationSet) -> Result<QueryAccounting> {
    let fixed_order = scs(perms)?.length;
    Ok(QueryAccounting { fixed_order, switch: perms.n(), gap: fixed_order - perms.n() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Input `|0>`, outcome 0 is `|0>`.
    Z,
    /// Input `|+>`, outcome 0 is `|+>`.
    X,
}

impl Basis {
    fn state(self, outcome: usize) -> Vec<C64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match (self, outcome) {
            (Basis::Z, 0) => vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            (Basis::Z, _) => vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            (Basis::X, 0) => vec![C64::new(r, 0.0), C64::new(r, 0.0)],
            (Basis::X, _) => vec![C64::new(r, 0.0), C64::new(-r, 0.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    /// Gates applied in order, e.g. `"AB"` for `U_B U_A`.
    pub gates: String,
    pub basis: Basis,
    /// 0 if the input state came back unchanged, 1 if it flipped.
    pub outcome: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackTranscript {
    pub queries: Vec<QueryRecord>,
    pub query_count: usize,
    pub guessed_y: usize,
    pub table_guess: Option<Chart>,
}

/// Query access to an oracle that counts every gate use.
pub struct BlackBox<'a> {
    oracle: &'a OracleSet,
    queries: Vec<QueryRecord>,
    uses: usize,
}

impl<'a> BlackBox<'a> {
    pub fn new(oracle: &'a OracleSet) -> Result<Self> {
        if oracle.dim() != 2 || oracle.n() != 4 {
            return Err(Error::UnexpectedOracle(format!(
                "attacks need four qubit gates, got {} of dimension {}",
                oracle.n(),
                oracle.dim()
            )));
        }
        Ok(Self { oracle, queries: Vec::new(), uses: 0 })
    }

    /// Prepares the basis' outcome-0 state, applies `gates` in order and
    /// measures in the same basis. Outcomes must be deterministic.
    pub fn test(&mut self, gates: &[usize], basis: Basis) -> Result<usize> {
        let mut v = basis.state(0);
        for &g in gates {
            v = self.oracle.gate(g).matrix.apply(&v);
        }
        self.uses += gates.len();
        let p0 = inner(&basis.state(0), &v).norm_sqr();
        let outcome = if (p0 - 1.0).abs() < 1e-9 {
            0
        } else if p0.abs() < 1e-9 {
            1
        } else {
            return Err(Error::UnexpectedOracle(format!(
                "{basis:?} test on {} has outcome probability {p0:.6}",
                gates.iter().map(|&g| label_char(g)).collect::<String>()
            )));
        };
        self.queries.push(QueryRecord { gates: gates.iter().map(|&g| label_char(g)).collect(), basis, outcome });
        Ok(outcome)
    }

    pub fn uses(&self) -> usize {
        self.uses
    }

    fn finish(self, guessed_y: usize, table_guess: Option<Chart>) -> AttackTranscript {
        AttackTranscript { query_count: self.uses, queries: self.queries, guessed_y, table_guess }
    }
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

fn table1_from_ac(a: usize, c: usize) -> usize {
    match (a, c) {
        (0, 0) => 0,
        (1, 1) => 1,
        (0, 1) => 2,
        _ => 3,
    }
}

/// X tests on `U_A` and `U_C` separate `1` from `Z` on both.
pub fn attack_table1(oracle: &OracleSet) -> Result<AttackTranscript> {
    let mut bb = BlackBox::new(oracle)?;
    let a = bb.test(&[A], Basis::X)?;
    let c = bb.test(&[C], Basis::X)?;
    Ok(bb.finish(table1_from_ac(a, c), Some(Chart::Table1)))
}

/// X test on `U_C`, Z test on `U_D`, then a Z test on `U_B U_A`
/// (`1` for column 0, `-iY` for column 2).
pub fn attack_table2(oracle: &OracleSet) -> Result<AttackTranscript> {
    let mut bb = BlackBox::new(oracle)?;
    let y = table2_rest(&mut bb, None)?;
    Ok(bb.finish(y, Some(Chart::Table2)))
}

fn table2_rest(bb: &mut BlackBox<'_>, d_outcome: Option<usize>) -> Result<usize> {
    if bb.test(&[C], Basis::X)? == 1 {
        return Ok(1);
    }
    let d = match d_outcome {
        Some(d) => d,
        None => bb.test(&[D], Basis::Z)?,
    };
    if d == 1 {
        return Ok(3);
    }
    Ok(if bb.test(&[A, B], Basis::Z)? == 0 { 0 } else { 2 })
}

/// A Z test on `U_D` tells the tables apart (`X` only in Table 1 and in the
/// column both tables share); its result is reused by the Table 2 branch.
pub fn attack_combined(oracle: &OracleSet) -> Result<AttackTranscript> {
    let mut bb = BlackBox::new(oracle)?;
    if bb.test(&[D], Basis::Z)? == 1 {
        let a = bb.test(&[A], Basis::X)?;
        let c = bb.test(&[C], Basis::X)?;
        return Ok(bb.finish(table1_from_ac(a, c), Some(Chart::Table1)));
    }
    let y = table2_rest(&mut bb, Some(0))?;
    Ok(bb.finish(y, Some(Chart::Table2)))
}
