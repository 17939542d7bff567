//! Labeled tensor-product spaces and the index bookkeeping built on them.
//!
//! Every multi-space object orders its factors slowest-to-fastest exactly as
//! listed in its [`SpaceLayout`]. All reshuffling (partial traces, reordering,
//! identity embedding) goes through the helpers here.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceLabel {
    /// Control system before the switch.
    ControlPast,
    /// Control system after the switch.
    ControlFuture,
    TargetPast,
    TargetFuture,
    AIn,
    AOut,
    BIn,
    BOut,
    CIn,
    COut,
    DIn,
    DOut,
    /// Final-measurement space.
    Measurement,
}

impl SpaceLabel {
    pub const PARTY_SPACES: [SpaceLabel; 8] = [
        SpaceLabel::AIn,
        SpaceLabel::AOut,
        SpaceLabel::BIn,
        SpaceLabel::BOut,
        SpaceLabel::CIn,
        SpaceLabel::COut,
        SpaceLabel::DIn,
        SpaceLabel::DOut,
    ];

    /// Input space of party `p` (0 = A, ..., 3 = D).
    pub fn party_in(p: usize) -> Self {
        Self::PARTY_SPACES[2 * p]
    }

    pub fn party_out(p: usize) -> Self {
        Self::PARTY_SPACES[2 * p + 1]
    }

    pub fn is_party(self) -> bool {
        Self::PARTY_SPACES.contains(&self)
    }

    pub fn is_control(self) -> bool {
        matches!(self, Self::ControlPast | Self::ControlFuture | Self::Measurement)
    }
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ControlPast => "c_p",
            Self::ControlFuture => "c_f",
            Self::TargetPast => "t_p",
            Self::TargetFuture => "t_f",
            Self::AIn => "A_I",
            Self::AOut => "A_O",
            Self::BIn => "B_I",
            Self::BOut => "B_O",
            Self::CIn => "C_I",
            Self::COut => "C_O",
            Self::DIn => "D_I",
            Self::DOut => "D_O",
            Self::Measurement => "c",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledSpace {
    pub label: SpaceLabel,
    pub dim: usize,
}

impl LabeledSpace {
    pub fn new(label: SpaceLabel, dim: usize) -> Self {
        Self { label, dim }
    }

    /// Party and target spaces are qubits; control spaces carry `control_dim`.
    pub fn standard(label: SpaceLabel, control_dim: usize) -> Self {
        let dim = if label.is_control() { control_dim } else { 2 };
        Self { label, dim }
    }
}

/// Ordered list of factors, slowest index first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceLayout {
    spaces: Vec<LabeledSpace>,
}

impl SpaceLayout {
    pub fn new(spaces: Vec<LabeledSpace>) -> Result<Self> {
        for (i, s) in spaces.iter().enumerate() {
            if spaces[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::DuplicateLabel(s.label));
            }
        }
        Ok(Self { spaces })
    }

    pub fn standard(labels: &[SpaceLabel], control_dim: usize) -> Result<Self> {
        Self::new(labels.iter().map(|&l| LabeledSpace::standard(l, control_dim)).collect())
    }

    /// `A_I, A_O, ..., D_O` followed by the measurement space `c`.
    pub fn parties_and_measurement(control_dim: usize) -> Self {
        let mut labels = SpaceLabel::PARTY_SPACES.to_vec();
        labels.push(SpaceLabel::Measurement);
        Self::standard(&labels, control_dim).expect("labels are distinct")
    }

    pub fn parties() -> Self {
        Self::standard(&SpaceLabel::PARTY_SPACES, 2).expect("labels are distinct")
    }

    pub fn spaces(&self) -> &[LabeledSpace] {
        &self.spaces
    }

    pub fn labels(&self) -> Vec<SpaceLabel> {
        self.spaces.iter().map(|s| s.label).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.spaces.iter().map(|s| s.dim).product()
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn contains(&self, label: SpaceLabel) -> bool {
        self.spaces.iter().any(|s| s.label == label)
    }

    pub fn position(&self, label: SpaceLabel) -> Result<usize> {
        self.spaces.iter().position(|s| s.label == label).ok_or(Error::UnknownLabel(label))
    }

    pub fn space(&self, label: SpaceLabel) -> Result<LabeledSpace> {
        Ok(self.spaces[self.position(label)?])
    }

    fn mask(&self, labels: &[SpaceLabel]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.spaces.len()];
        for &l in labels {
            mask[self.position(l)?] = true;
        }
        Ok(mask)
    }

    /// Layout with the given labels removed.
    pub fn without(&self, labels: &[SpaceLabel]) -> Result<Self> {
        let mask = self.mask(labels)?;
        Ok(Self {
            spaces: self.spaces.iter().zip(&mask).filter(|(_, &m)| !m).map(|(s, _)| *s).collect(),
        })
    }

    /// Flat index for a full assignment of basis values to labels.
    pub fn index_of(&self, assignment: &[(SpaceLabel, usize)]) -> Result<usize> {
        let mut digits = vec![None; self.spaces.len()];
        for &(label, value) in assignment {
            let p = self.position(label)?;
            if value >= self.spaces[p].dim {
                return Err(Error::IndexOutOfRange { index: value, limit: self.spaces[p].dim });
            }
            digits[p] = Some(value);
        }
        let mut idx = 0;
        for (s, d) in self.spaces.iter().zip(digits) {
            let d = d.ok_or_else(|| Error::Invalid(format!("no value assigned to {}", s.label)))?;
            idx = idx * s.dim + d;
        }
        Ok(idx)
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        let n = m.ensure_square()?;
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        Ok(())
    }

    fn check_ket(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    /// Traces out `traced`; returns the reduced operator and its layout.
    pub fn partial_trace(
        &self,
        m: &ComplexMatrix,
        traced: &[SpaceLabel],
    ) -> Result<(ComplexMatrix, SpaceLayout)> {
        self.check_matrix(m)?;
        let mask = self.mask(traced)?;
        Ok((partial_trace_dims(m, &self.dims(), &mask), self.without(traced)?))
    }

    /// Reduced operator of `|v><v|` without forming the full outer product.
    pub fn partial_trace_ket(
        &self,
        v: &[C64],
        traced: &[SpaceLabel],
    ) -> Result<(ComplexMatrix, SpaceLayout)> {
        self.check_ket(v)?;
        let mask = self.mask(traced)?;
        Ok((partial_trace_ket_dims(v, &self.dims(), &mask), self.without(traced)?))
    }

    /// Order of `target`'s factors expressed as positions in `self`.
    fn order_for(&self, target: &SpaceLayout) -> Result<Vec<usize>> {
        if target.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: target.len() });
        }
        target
            .spaces
            .iter()
            .map(|s| {
                let p = self.position(s.label)?;
                if self.spaces[p].dim != s.dim {
                    return Err(Error::DimensionMismatch { expected: self.spaces[p].dim, found: s.dim });
                }
                Ok(p)
            })
            .collect()
    }

    pub fn reorder_ket(&self, v: &[C64], target: &SpaceLayout) -> Result<Vec<C64>> {
        self.check_ket(v)?;
        let order = self.order_for(target)?;
        let map = permutation_map(&self.dims(), &order);
        Ok(map.iter().map(|&old| v[old]).collect())
    }

    pub fn reorder_matrix(&self, m: &ComplexMatrix, target: &SpaceLayout) -> Result<ComplexMatrix> {
        self.check_matrix(m)?;
        let order = self.order_for(target)?;
        let map = permutation_map(&self.dims(), &order);
        Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(map[r], map[c])]))
    }

    /// Tensors the identity on `label` into `m` at the position `label` has in `self`.
    /// `m` must live on `self.without(&[label])`.
    pub fn embed_identity(&self, m: &ComplexMatrix, label: SpaceLabel) -> Result<ComplexMatrix> {
        let reduced = self.without(&[label])?;
        reduced.check_matrix(m)?;
        let mask = self.mask(&[label])?;
        let dims = self.dims();
        let keep: Vec<bool> = mask.iter().map(|&b| !b).collect();
        let ko = offsets(&dims, &keep);
        let to = offsets(&dims, &mask);
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (i, &ri) in ko.iter().enumerate() {
            for (j, &cj) in ko.iter().enumerate() {
                let z = m[(i, j)];
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                for &t in &to {
                    out[(ri + t, cj + t)] = z;
                }
            }
        }
        Ok(out)
    }

    /// Schmidt coefficients of `v` across the cut `left | rest`, descending.
    pub fn schmidt_coefficients(&self, v: &[C64], left: &[SpaceLabel]) -> Result<Vec<f64>> {
        self.check_ket(v)?;
        let mask = self.mask(left)?;
        let rest: Vec<bool> = mask.iter().map(|&b| !b).collect();
        let dims = self.dims();
        let lo = offsets(&dims, &mask);
        let ro = offsets(&dims, &rest);
        let m = ComplexMatrix::from_fn(lo.len(), ro.len(), |i, j| v[lo[i] + ro[j]]);
        Ok(m.singular_values())
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn expand(base: &[usize], dim: usize, stride: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(base.len() * dim);
    for &o in base {
        out.extend((0..dim).map(|d| o + d * stride));
    }
    out
}

/// Flat-index offsets contributed by the selected factors, enumerated in
/// slowest-to-fastest order of those factors.
pub(crate) fn offsets(dims: &[usize], select: &[bool]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for k in 0..dims.len() {
        if !select[k] {
            continue;
        }
        out = expand(&out, dims[k], st[k]);
    }
    out
}

/// `map[new_index] = old_index` when factors are rearranged into `order`.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut map = vec![0usize];
    for &k in order {
        map = expand(&map, dims[k], st[k]);
    }
    map
}

/// Partial trace over the factors flagged in `traced`.
pub fn partial_trace_dims(m: &ComplexMatrix, dims: &[usize], traced: &[bool]) -> ComplexMatrix {
    let keep: Vec<bool> = traced.iter().map(|&b| !b).collect();
    let ko = offsets(dims, &keep);
    let to = offsets(dims, traced);
    ComplexMatrix::from_fn(ko.len(), ko.len(), |i, j| to.iter().map(|&t| m[(ko[i] + t, ko[j] + t)]).sum())
}

pub fn partial_trace_ket_dims(v: &[C64], dims: &[usize], traced: &[bool]) -> ComplexMatrix {
    let keep: Vec<bool> = traced.iter().map(|&b| !b).collect();
    let ko = offsets(dims, &keep);
    let to = offsets(dims, traced);
    let mut out = ComplexMatrix::zeros(ko.len(), ko.len());
    for &t in &to {
        let slice: Vec<C64> = ko.iter().map(|&k| v[k + t]).collect();
        if slice.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        for (i, a) in slice.iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in slice.iter().enumerate() {
                out[(i, j)] += a * b.conj();
            }
        }
    }
    out
}

/// Partial trace of `m` over the labeled subsystems in `traced`.
pub fn partial_trace(
    m: &ComplexMatrix,
    spaces: &[LabeledSpace],
    traced: &[SpaceLabel],
) -> Result<ComplexMatrix> {
    let layout = SpaceLayout::new(spaces.to_vec())?;
    Ok(layout.partial_trace(m, traced)?.0)
}
