//! Process matrices of the four-gate switch, witness operators and the
//! decomposition constraints of processes with classical control of order.
//!
//! Eight-party objects order their factors `A_I, A_O, B_I, B_O, C_I, C_O,
//! D_I, D_O` followed by the measurement space `c`. A gate enters through its
//! Choi vector with component `(i, o) = <o|U|i>`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::SignMatrix;
use crate::switch::{all_permutations, label_char, OracleSet, PermutationSet};
use crate::tensor::{choi_vector, kron_vec, ComplexMatrix, PureState, SpaceLabel, SpaceLayout};

/// Hermiticity and positivity tolerance.
pub const PROCESS_TOL: f64 = 1e-9;
/// `Tr W` of a normalized four-party process.
pub const PROCESS_TRACE: f64 = 16.0;

const PARTIES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessMatrix {
    pub layout: SpaceLayout,
    pub matrix: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessValidation {
    pub hermiticity_deviation: f64,
    pub positive_semidefinite: bool,
    pub trace: f64,
    pub normalized: bool,
}

impl ProcessValidation {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_deviation <= PROCESS_TOL && self.positive_semidefinite && self.normalized
    }
}

impl ProcessMatrix {
    pub fn new(layout: SpaceLayout, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.ensure_square()?;
        if n != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), found: n });
        }
        Ok(Self { layout, matrix })
    }

    /// Hermiticity, positivity and the `Tr W = 16` normalization.
    pub fn validate(&self) -> ProcessValidation {
        let trace = self.matrix.trace().re;
        ProcessValidation {
            hermiticity_deviation: self.matrix.hermiticity_deviation(),
            positive_semidefinite: self.matrix.is_psd(PROCESS_TOL),
            trace,
            normalized: (trace - PROCESS_TRACE).abs() <= 1e-8,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Space layout `c_p, t_p, A_I, A_O, ..., D_O, t_f, c_f`.
pub fn w4_layout(control_dim: usize) -> SpaceLayout {
    let mut labels = vec![SpaceLabel::ControlPast, SpaceLabel::TargetPast];
    labels.extend(SpaceLabel::PARTY_SPACES);
    labels.extend([SpaceLabel::TargetFuture, SpaceLabel::ControlFuture]);
    SpaceLayout::standard(&labels, control_dim).expect("labels are distinct")
}

fn check_four_parties(perms: &PermutationSet) -> Result<()> {
    if perms.n() != PARTIES {
        return Err(Error::DimensionMismatch { expected: PARTIES, found: perms.n() });
    }
    Ok(())
}

/// Adds `amp` times the chain of identity links of ordering `order` to `out`:
/// `start -> σ_0 in`, `σ_j out -> σ_{j+1} in`, `σ_last out -> t_f`.
/// `start_amp[k]` weights the value `k` entering the first gate; `fixed`
/// carries the remaining assignments (control spaces, and `t_p` when linked).
fn add_chain(
    out: &mut [C64],
    layout: &SpaceLayout,
    order: &[usize],
    start: Option<SpaceLabel>,
    start_amp: &[C64],
    fixed: &[(SpaceLabel, usize)],
    amp: C64,
) -> Result<()> {
    let links = order.len() + 1;
    for bits in 0..1usize << links {
        let k = |j: usize| bits >> (links - 1 - j) & 1;
        let mut assignment = fixed.to_vec();
        if let Some(s) = start {
            assignment.push((s, k(0)));
        }
        assignment.push((SpaceLabel::party_in(order[0]), k(0)));
        for j in 0..order.len() {
            let next = if j + 1 < order.len() { SpaceLabel::party_in(order[j + 1]) } else { SpaceLabel::TargetFuture };
            assignment.push((SpaceLabel::party_out(order[j]), k(j + 1)));
            assignment.push((next, k(j + 1)));
        }
        out[layout.index_of(&assignment)?] += amp * start_amp[k(0)];
    }
    Ok(())
}

/// `|w_4>`: for each ordering `x`, `|x>_{c_p}` and `|x>_{c_f}` around a
/// chain of identity links from `t_p` through the gates to `t_f`.
pub fn build_w4_ket(perms: &PermutationSet) -> Result<(Vec<C64>, SpaceLayout)> {
    check_four_parties(perms)?;
    let layout = w4_layout(perms.p());
    let mut out = vec![C64::new(0.0, 0.0); layout.dim()];
    for x in 0..perms.p() {
        let fixed = [(SpaceLabel::ControlPast, x), (SpaceLabel::ControlFuture, x)];
        add_chain(&mut out, &layout, perms.ordering(x), Some(SpaceLabel::TargetPast), &[one(), one()], &fixed, one())?;
    }
    Ok((out, layout))
}

/// Layout `A_I, ..., D_O, t_f, c` of `|w_4'>`.
pub fn effective_ket_layout(control_dim: usize) -> SpaceLayout {
    let mut labels = SpaceLabel::PARTY_SPACES.to_vec();
    labels.extend([SpaceLabel::TargetFuture, SpaceLabel::Measurement]);
    SpaceLayout::standard(&labels, control_dim).expect("labels are distinct")
}

/// `|w_4'> = P^{-1/2} Σ_x |Ψ>^{σ_x(0) in} (links) ⊗ H^{-1}|x>_c`: the switch
/// with the control preparation, target input and final control rotation
/// absorbed.
pub fn build_effective_process_ket(
    perms: &PermutationSet,
    target_in: &PureState,
    m: &SignMatrix,
) -> Result<(Vec<C64>, SpaceLayout)> {
    check_four_parties(perms)?;
    if target_in.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: target_in.dim() });
    }
    let p = perms.p();
    if m.order() != p {
        return Err(Error::DimensionMismatch { expected: p, found: m.order() });
    }
    let layout = effective_ket_layout(p);
    let mut out = vec![C64::new(0.0, 0.0); layout.dim()];
    let norm = 1.0 / p as f64;
    for x in 0..p {
        for c in 0..p {
            // <c| H^{-1} |x> = m_{x,c} / sqrt(P), times the 1/sqrt(P) prefactor
            let amp = one() * (m.entry(x, c) as f64 * norm);
            add_chain(&mut out, &layout, perms.ordering(x), None, target_in.amplitudes(), &[(SpaceLabel::Measurement, c)], amp)?;
        }
    }
    Ok((out, layout))
}

/// `W_4' = Tr_{t_f} |w_4'><w_4'|` over `A_I, ..., D_O, c`.
pub fn build_effective_process_with(perms: &PermutationSet, target_in: &PureState, m: &SignMatrix) -> Result<ProcessMatrix> {
    let (ket, layout) = build_effective_process_ket(perms, target_in, m)?;
    let (matrix, reduced) = layout.partial_trace_ket(&ket, &[SpaceLabel::TargetFuture])?;
    debug_assert_eq!(reduced, SpaceLayout::parties_and_measurement(perms.p()));
    ProcessMatrix::new(reduced, matrix)
}

/// `W_4'` for the experimental quartet of orderings.
pub fn build_effective_process(target_in: &PureState, m: &SignMatrix) -> Result<ProcessMatrix> {
    build_effective_process_with(&PermutationSet::sigma_star(), target_in, m)
}

/// A process that applies the gates in the fixed order `order` to
/// `target_in` and always reports `readout`.
pub fn definite_order_process(order: &[usize], target_in: &PureState, readout: usize, control_dim: usize) -> Result<ProcessMatrix> {
    let perms = PermutationSet::new(PARTIES, vec![order.to_vec()])?;
    if target_in.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: target_in.dim() });
    }
    if readout >= control_dim {
        return Err(Error::IndexOutOfRange { index: readout, limit: control_dim });
    }
    let layout = effective_ket_layout(control_dim);
    let mut ket = vec![C64::new(0.0, 0.0); layout.dim()];
    add_chain(&mut ket, &layout, perms.ordering(0), None, target_in.amplitudes(), &[(SpaceLabel::Measurement, readout)], one())?;
    let (matrix, reduced) = layout.partial_trace_ket(&ket, &[SpaceLabel::TargetFuture])?;
    ProcessMatrix::new(reduced, matrix)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessComponent {
    pub oracle: OracleSet,
    pub y: usize,
    pub weight: f64,
}

/// `G = Σ_k q_k (|U_k>><<U_k|)^T ⊗ |y_k><y_k|_c`, kept as its components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessOperator {
    pub components: Vec<WitnessComponent>,
    pub control_dim: usize,
}

/// `conj(|U_A>> ⊗ |U_B>> ⊗ |U_C>> ⊗ |U_D>>)`: the transpose of a rank-one
/// projector is the projector onto the conjugate vector.
pub fn conjugate_choi_product(oracle: &OracleSet) -> Result<Vec<C64>> {
    if oracle.n() != PARTIES || oracle.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: PARTIES, found: oracle.n() });
    }
    let mut v = vec![one()];
    for g in oracle.gates() {
        let choi: Vec<C64> = choi_vector(&g.matrix)?.iter().map(|z| z.conj()).collect();
        v = kron_vec(&v, &choi);
    }
    Ok(v)
}

impl WitnessComponent {
    fn vector(&self, control_dim: usize) -> Result<Vec<C64>> {
        let mut e = vec![C64::new(0.0, 0.0); control_dim];
        e[self.y] = one();
        Ok(kron_vec(&conjugate_choi_product(&self.oracle)?, &e))
    }
}

pub fn witness_operator(components: Vec<WitnessComponent>, control_dim: usize) -> Result<WitnessOperator> {
    if components.is_empty() {
        return Err(Error::InvalidWeights("no components".into()));
    }
    let mut total = 0.0;
    for (k, c) in components.iter().enumerate() {
        if !c.weight.is_finite() || c.weight < 0.0 {
            return Err(Error::InvalidWeights(format!("component {k} has weight {}", c.weight)));
        }
        if c.y >= control_dim {
            return Err(Error::IndexOutOfRange { index: c.y, limit: control_dim });
        }
        conjugate_choi_product(&c.oracle)?;
        total += c.weight;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(WitnessOperator { components, control_dim })
}

/// Equal weights over `oracles`, each paired with its claimed column.
pub fn uniform_witness(oracles: &[OracleSet], control_dim: usize) -> Result<WitnessOperator> {
    let q = 1.0 / oracles.len().max(1) as f64;
    let components = oracles
        .iter()
        .map(|o| {
            let y = o.claimed_y.ok_or_else(|| Error::Invalid(format!("oracle {:?} has no column", o.names())))?;
            Ok(WitnessComponent { oracle: o.clone(), y, weight: q })
        })
        .collect::<Result<_>>()?;
    witness_operator(components, control_dim)
}

impl WitnessOperator {
    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::parties_and_measurement(self.control_dim)
    }

    /// The dense operator.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let n = self.layout().dim();
        let mut g = ComplexMatrix::zeros(n, n);
        for c in &self.components {
            let v = c.vector(self.control_dim)?;
            let nz: Vec<usize> = (0..n).filter(|&i| v[i] != C64::new(0.0, 0.0)).collect();
            for &i in &nz {
                for &j in &nz {
                    g[(i, j)] += v[i] * v[j].conj() * c.weight;
                }
            }
        }
        Ok(g)
    }

    /// `G^[y]` over the eight party spaces.
    pub fn part(&self, y: usize) -> Result<ComplexMatrix> {
        let n = SpaceLayout::parties().dim();
        let mut g = ComplexMatrix::zeros(n, n);
        for c in self.components.iter().filter(|c| c.y == y) {
            let v = conjugate_choi_product(&c.oracle)?;
            g = &g + &ComplexMatrix::outer(&v, &v).scale_real(c.weight);
        }
        Ok(g)
    }
}

fn check_witness_layout(w: &ProcessMatrix, g: &WitnessOperator) -> Result<()> {
    if w.layout != g.layout() {
        return Err(Error::Invalid(format!(
            "process spaces {:?} do not match witness spaces {:?}",
            w.layout.labels(),
            g.layout().labels()
        )));
    }
    Ok(())
}

/// `Tr[G W] = Σ_k q_k <g_k| W |g_k>`.
pub fn success_probability(w: &ProcessMatrix, g: &WitnessOperator) -> Result<f64> {
    check_witness_layout(w, g)?;
    let terms: Vec<f64> = g
        .components
        .par_iter()
        .map(|c| {
            let v = c.vector(g.control_dim)?;
            Ok(c.weight * w.matrix.sandwich(&v, &v).re)
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum())
}

/// `Tr[G W]` with `G` formed densely.
pub fn success_probability_dense(w: &ProcessMatrix, g: &WitnessOperator) -> Result<f64> {
    check_witness_layout(w, g)?;
    Ok(g.matrix()?.trace_product(&w.matrix).re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superinstrument {
    pub layout: SpaceLayout,
    /// `W^[y] = Tr_c[(1 ⊗ |y><y|_c) W]`.
    pub parts: Vec<ComplexMatrix>,
}

pub fn superinstrument(w: &ProcessMatrix) -> Result<Superinstrument> {
    if !w.layout.contains(SpaceLabel::Measurement) {
        return Err(Error::UnknownLabel(SpaceLabel::Measurement));
    }
    let p = w.layout.space(SpaceLabel::Measurement)?.dim;
    let canonical = SpaceLayout::parties_and_measurement(p);
    let m = if w.layout == canonical { w.matrix.clone() } else { w.layout.reorder_matrix(&w.matrix, &canonical)? };
    let n = canonical.dim() / p;
    let parts = (0..p).map(|y| ComplexMatrix::from_fn(n, n, |a, b| m[(a * p + y, b * p + y)])).collect();
    Ok(Superinstrument { layout: SpaceLayout::parties(), parts })
}

/// `Σ_y Tr[G^[y] W^[y]]`.
pub fn success_probability_superinstrument(si: &Superinstrument, g: &WitnessOperator) -> Result<f64> {
    if si.parts.len() != g.control_dim {
        return Err(Error::DimensionMismatch { expected: g.control_dim, found: si.parts.len() });
    }
    g.components.iter().try_fold(0.0, |acc, c| {
        let v = conjugate_choi_product(&c.oracle)?;
        Ok(acc + c.weight * si.parts[c.y].sandwich(&v, &v).re)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    /// `max |X - Tr_out(X)/2 ⊗ 1_out|`.
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcgoReport {
    pub constraints: Vec<ConstraintCheck>,
    /// Parts that are not positive semidefinite.
    pub non_psd_parts: Vec<String>,
    pub trace: f64,
    pub normalized: bool,
    pub passed: bool,
}

fn order_name(order: &[usize]) -> String {
    order.iter().map(|&g| label_char(g).to_string()).collect::<Vec<_>>().join(",")
}

fn party_spaces(g: usize) -> [SpaceLabel; 2] {
    [SpaceLabel::party_in(g), SpaceLabel::party_out(g)]
}

/// `X = Tr_out(X)/2 ⊗ 1_out` on `layout`.
fn identity_on_output(x: &ComplexMatrix, layout: &SpaceLayout, party: usize, name: String, tol: f64) -> Result<ConstraintCheck> {
    let out = SpaceLabel::party_out(party);
    let (reduced, _) = layout.partial_trace(x, &[out])?;
    let rebuilt = layout.embed_identity(&reduced.scale_real(0.5), out)?;
    let deviation = x.max_abs_diff(&rebuilt);
    Ok(ConstraintCheck { name, deviation, passed: deviation <= tol })
}

/// Checks a candidate decomposition `W = Σ_(i,j,k,l) W_(i,j,k,l),c` into
/// positive parts whose successive reductions carry an identity on the
/// output of the last party:
///
/// `W_(ijkl) = Tr_c`, `W_(ijk) = Tr_l W_(ijkl)`, `W_(ij) = Σ_k Tr_k W_(ijk)`,
/// `W_(i) = Σ_j Tr_j W_(ij)`, each of the form `W~ ⊗ 1` on the output space
/// of its last party. Orderings without a part count as zero.
pub fn verify_ccgo_decomposition(parts: &[(Vec<usize>, ComplexMatrix)], control_dim: usize, tol: f64) -> Result<CcgoReport> {
    let full = SpaceLayout::parties_and_measurement(control_dim);
    let valid: Vec<Vec<usize>> = all_permutations(PARTIES);
    if parts.len() > valid.len() {
        return Err(Error::Invalid(format!("{} parts for {} orderings", parts.len(), valid.len())));
    }
    let mut by_order: BTreeMap<Vec<usize>, &ComplexMatrix> = BTreeMap::new();
    for (order, m) in parts {
        if !valid.contains(order) {
            return Err(Error::InvalidPermutations(format!("{order:?} is not an ordering of four parties")));
        }
        if m.ensure_square()? != full.dim() {
            return Err(Error::DimensionMismatch { expected: full.dim(), found: m.rows() });
        }
        if by_order.insert(order.clone(), m).is_some() {
            return Err(Error::InvalidPermutations(format!("ordering {} given twice", order_name(order))));
        }
    }

    let mut constraints = Vec::new();
    let mut non_psd_parts = Vec::new();
    let mut trace = 0.0;
    let mut level3: BTreeMap<Vec<usize>, (ComplexMatrix, SpaceLayout)> = BTreeMap::new();
    for (order, m) in &by_order {
        trace += m.trace().re;
        if !m.is_psd(tol) {
            non_psd_parts.push(order_name(order));
        }
        let (w4, l4) = full.partial_trace(m, &[SpaceLabel::Measurement])?;
        constraints.push(identity_on_output(&w4, &l4, order[3], format!("W({}) has 1 on {}_O", order_name(order), label_char(order[3])), tol)?);
        let (w3, l3) = l4.partial_trace(&w4, &party_spaces(order[3]))?;
        constraints.push(identity_on_output(
            &w3,
            &l3,
            order[2],
            format!("W({}) has 1 on {}_O", order_name(&order[..3]), label_char(order[2])),
            tol,
        )?);
        level3.insert(order[..3].to_vec(), (w3, l3));
    }

    let mut level2: BTreeMap<Vec<usize>, (ComplexMatrix, SpaceLayout)> = BTreeMap::new();
    for (prefix, (w3, l3)) in &level3 {
        let (w2, l2) = l3.partial_trace(w3, &party_spaces(prefix[2]))?;
        let key = prefix[..2].to_vec();
        match level2.get_mut(&key) {
            Some((acc, _)) => *acc = &*acc + &w2,
            None => {
                level2.insert(key, (w2, l2));
            }
        }
    }
    let mut level1: BTreeMap<usize, (ComplexMatrix, SpaceLayout)> = BTreeMap::new();
    for (prefix, (w2, l2)) in &level2 {
        constraints.push(identity_on_output(
            w2,
            l2,
            prefix[1],
            format!("W({}) has 1 on {}_O", order_name(prefix), label_char(prefix[1])),
            tol,
        )?);
        let (w1, l1) = l2.partial_trace(w2, &party_spaces(prefix[1]))?;
        match level1.get_mut(&prefix[0]) {
            Some((acc, _)) => *acc = &*acc + &w1,
            None => {
                level1.insert(prefix[0], (w1, l1));
            }
        }
    }
    for (first, (w1, l1)) in &level1 {
        constraints.push(identity_on_output(w1, l1, *first, format!("W({}) has 1 on {}_O", label_char(*first), label_char(*first)), tol)?);
    }

    let normalized = (trace - PROCESS_TRACE).abs() <= 1e-8;
    let passed = non_psd_parts.is_empty() && constraints.iter().all(|c| c.passed);
    Ok(CcgoReport { constraints, non_psd_parts, trace, normalized, passed })
}
