//! The quantum N-switch and the promise-problem algorithms built on it.

mod perms;

use num_complex::Complex64 as C64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use perms::{all_permutations, label_char, parse_label, PermutationSet};

use crate::error::{Error, Result};
use crate::gates::{fourier_matrix, gate_by_name, y_rotation, NamedGate, SignMatrix};
use crate::tensor::{ComplexMatrix, PureState, TOL};

/// The `N` black-box gates `U_A, U_B, ...`, optionally tagged with the
/// promise column they are known to satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSet {
    gates: Vec<NamedGate>,
    pub claimed_y: Option<usize>,
}

impl OracleSet {
    pub fn new(gates: Vec<NamedGate>) -> Result<Self> {
        let first = gates.first().ok_or_else(|| Error::Invalid("oracle set has no gates".into()))?;
        let d = first.dim();
        for g in &gates {
            if g.dim() != d || !g.matrix.is_square() {
                return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
            }
            let deviation = g.matrix.unitarity_deviation();
            if deviation > TOL {
                return Err(Error::NotUnitary { name: g.name.clone(), deviation });
            }
        }
        Ok(Self { gates, claimed_y: None })
    }

    /// Builds an oracle from gate names such as `["Z", "X", "1", "X"]`.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::new(names.iter().map(|n| gate_by_name(n.as_ref())).collect::<Result<_>>()?)
    }

    pub fn with_claimed_y(mut self, y: usize) -> Self {
        self.claimed_y = Some(y);
        self
    }

    pub fn n(&self) -> usize {
        self.gates.len()
    }

    /// Target dimension `d`.
    pub fn dim(&self) -> usize {
        self.gates[0].dim()
    }

    pub fn gate(&self, i: usize) -> &NamedGate {
        &self.gates[i]
    }

    pub fn gates(&self) -> &[NamedGate] {
        &self.gates
    }

    pub fn names(&self) -> Vec<String> {
        self.gates.iter().map(|g| g.name.clone()).collect()
    }

    /// Every gate conjugated by the same `V`.
    pub fn conjugated(&self, v: &ComplexMatrix) -> Self {
        Self { gates: self.gates.iter().map(|g| g.conjugated(v)).collect(), claimed_y: self.claimed_y }
    }

    /// Gate `relabel[i]` of the result is gate `i` of `self`.
    pub fn relabeled(&self, relabel: &[usize]) -> Self {
        let mut gates = self.gates.clone();
        for (i, g) in self.gates.iter().enumerate() {
            gates[relabel[i]] = g.clone();
        }
        Self { gates, claimed_y: self.claimed_y }
    }

    fn map_gates(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self {
            gates: self.gates.iter().map(|g| NamedGate { name: g.name.clone(), matrix: f(&g.matrix) }).collect(),
            claimed_y: self.claimed_y,
        }
    }
}

/// Two illustrative imperfection knobs.
///
/// `dephasing` scales off-diagonal elements of the control's reduced state by
/// `1 - dephasing` after the switch; `overrotation` replaces every gate `U` by
/// `exp(-i ε Y / 2) U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub dephasing: f64,
    pub overrotation: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self { dephasing: 0.0, overrotation: 0.0, seed: 0 }
    }

    pub fn new(dephasing: f64, overrotation: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&dephasing) {
            return Err(Error::Invalid(format!("dephasing {dephasing} outside [0, 1]")));
        }
        if !overrotation.is_finite() {
            return Err(Error::Invalid("overrotation must be finite".into()));
        }
        Ok(Self { dephasing, overrotation, seed })
    }

    pub fn is_ideal(&self) -> bool {
        self.dephasing == 0.0 && self.overrotation == 0.0
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub outcome_distribution: Vec<f64>,
    pub decoded_y: usize,
    /// Probability of the true column, when the oracle carries one.
    pub success_probability: Option<f64>,
}

impl RunResult {
    fn from_distribution(mut dist: Vec<f64>, true_y: Option<usize>) -> Self {
        for p in dist.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let decoded_y = argmax(&dist);
        let success_probability = true_y.and_then(|y| dist.get(y).copied());
        Self { outcome_distribution: dist, decoded_y, success_probability }
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_compat(oracle: &OracleSet, perms: &PermutationSet) -> Result<()> {
    if oracle.n() != perms.n() {
        return Err(Error::DimensionMismatch { expected: perms.n(), found: oracle.n() });
    }
    Ok(())
}

/// `Π_x = U_{σ_x(N-1)} ... U_{σ_x(1)} U_{σ_x(0)}`: the first listed gate acts first.
pub fn product_pi(oracle: &OracleSet, perms: &PermutationSet, x: usize) -> Result<ComplexMatrix> {
    check_compat(oracle, perms)?;
    if x >= perms.p() {
        return Err(Error::IndexOutOfRange { index: x, limit: perms.p() });
    }
    let mut acc = ComplexMatrix::identity(oracle.dim());
    for &g in perms.ordering(x) {
        acc = &oracle.gate(g).matrix * &acc;
    }
    Ok(acc)
}

pub(crate) fn all_products(oracle: &OracleSet, perms: &PermutationSet) -> Result<Vec<ComplexMatrix>> {
    (0..perms.p()).map(|x| product_pi(oracle, perms, x)).collect()
}

/// `S_N |x>|Ψ> = |x> Π_x |Ψ>`, extended linearly; control is the slow index.
pub fn apply_n_switch(
    control: &PureState,
    target: &PureState,
    oracle: &OracleSet,
    perms: &PermutationSet,
) -> Result<PureState> {
    check_compat(oracle, perms)?;
    if control.dim() != perms.p() {
        return Err(Error::DimensionMismatch { expected: perms.p(), found: control.dim() });
    }
    if target.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch { expected: oracle.dim(), found: target.dim() });
    }
    let mut out = Vec::with_capacity(control.dim() * target.dim());
    for (x, cx) in control.amplitudes().iter().enumerate() {
        let branch = product_pi(oracle, perms, x)?.apply(target.amplitudes());
        out.extend(branch.into_iter().map(|z| cx * z));
    }
    PureState::normalized(out)
}

/// Prepare the control with `prep`, switch, undo with `unprep`, and read the
/// control in the computational basis.
fn controlled_order_run(
    prep: &ComplexMatrix,
    unprep: &ComplexMatrix,
    oracle: &OracleSet,
    perms: &PermutationSet,
    target: &PureState,
    noise: &NoiseModel,
) -> Result<RunResult> {
    check_compat(oracle, perms)?;
    if target.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch { expected: oracle.dim(), found: target.dim() });
    }
    let p = perms.p();
    let oracle = if noise.overrotation != 0.0 {
        let r = y_rotation(noise.overrotation);
        if oracle.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: oracle.dim() });
        }
        oracle.map_gates(|u| &r * u)
    } else {
        oracle.clone()
    };

    // unnormalized target branches c_x Π_x |Ψ>, with c = prep |0>
    let branches: Vec<Vec<C64>> = (0..p)
        .map(|x| {
            let pi = product_pi(&oracle, perms, x)?;
            let c = prep[(x, 0)];
            Ok(pi.apply(target.amplitudes()).into_iter().map(|z| c * z).collect())
        })
        .collect::<Result<_>>()?;

    // reduced control state after the switch, then dephasing
    let keep = 1.0 - noise.dephasing;
    let rho = ComplexMatrix::from_fn(p, p, |x, x2| {
        let overlap: C64 = crate::tensor::inner(&branches[x2], &branches[x]);
        if x == x2 {
            overlap
        } else {
            overlap * keep
        }
    });
    let out = &(unprep * &rho) * &unprep.adjoint();
    let dist: Vec<f64> = (0..p).map(|y| out[(y, y)].re).collect();
    Ok(RunResult::from_distribution(dist, oracle.claimed_y))
}

/// `H_P^{-1} S_N H_P |0>|Ψ>` followed by a computational-basis readout of the control.
pub fn run_hadamard_algorithm(
    oracle: &OracleSet,
    perms: &PermutationSet,
    m: &SignMatrix,
    target: &PureState,
    noise: &NoiseModel,
) -> Result<RunResult> {
    if m.order() != perms.p() {
        return Err(Error::DimensionMismatch { expected: perms.p(), found: m.order() });
    }
    let h = m.unitary();
    // H_P is real orthogonal: its inverse is its transpose
    let h_inv = h.transpose();
    controlled_order_run(&h, &h_inv, oracle, perms, target, noise)
}

/// `F_P^{-1} S_N F_P |0>|Ψ>` followed by a computational-basis readout.
pub fn run_fourier_algorithm(oracle: &OracleSet, perms: &PermutationSet, target: &PureState) -> Result<RunResult> {
    let f = fourier_matrix(perms.p());
    controlled_order_run(&f, &f.adjoint(), oracle, perms, target, &NoiseModel::ideal())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromiseKind {
    /// `Π_x = ω^{xy} Π_0`
    Fourier,
    /// `Π_x = m_{x,y} Π_0`
    Hadamard,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionCheck {
    Ok,
    Violation(String),
}

impl DimensionCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, Self::Ok)
    }
}

/// Whether a `d`-dimensional target can carry every promise column.
///
/// Taking determinants of the promise gives `phase^d = 1` for every phase
/// appearing in it. For the Fourier promise that means `P | d` (hence
/// `d >= P`); for the Hadamard promise it means `(-1)^d = 1`, i.e. even `d`.
pub fn check_dimension_constraint(kind: PromiseKind, d: usize, p: usize) -> DimensionCheck {
    if p <= 1 {
        return DimensionCheck::Ok;
    }
    match kind {
        PromiseKind::Fourier if !d.is_multiple_of(p) => DimensionCheck::Violation(format!(
            "Fourier promise with P = {p} needs P | d (so d >= P), got d = {d}"
        )),
        PromiseKind::Hadamard if !d.is_multiple_of(2) => {
            DimensionCheck::Violation(format!("Hadamard promise needs even d, got d = {d}"))
        }
        _ => DimensionCheck::Ok,
    }
}

/// Multinomial sample of `shots` readouts; deterministic for a given seed.
pub fn sample_shots(result: &RunResult, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::Invalid("shots must be at least 1".into()));
    }
    let dist = WeightedIndex::new(&result.outcome_distribution)
        .map_err(|e| Error::Invalid(format!("bad outcome distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0u64; result.outcome_distribution.len()];
    for _ in 0..shots {
        hist[dist.sample(&mut rng)] += 1;
    }
    Ok(hist)
}
