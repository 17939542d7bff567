//! Classification of qubit gate tuples under simultaneous conjugation
//! `U_i -> V U_i V^dagger`.
//!
//! Every qubit operator is `t 1 + v·σ` with complex `t` and a complex
//! 3-vector `v`. Conjugation by `V` keeps `t` and rotates the real and
//! imaginary parts of `v` by one common `R ∈ SO(3)`. A candidate `R` is
//! built from two independent vectors, turned into `V` and then checked
//! directly on the matrices.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::switch::OracleSet;
use crate::tensor::ComplexMatrix;

const TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquivalenceMode {
    /// `V U_i V^dagger = U'_i` exactly.
    Exact,
    /// `V U_i V^dagger = e^{iφ_i} U'_i` with an independent phase per gate.
    UpToGatePhases,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassMethod {
    Explicit,
    Fingerprint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    /// Indices into the classified list; the first is the representative.
    pub members: Vec<usize>,
    /// `conjugators[j]` maps the representative onto `members[j]`.
    pub conjugators: Vec<ComplexMatrix>,
    pub method: ClassMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClassification {
    pub mode: EquivalenceMode,
    pub classes: Vec<EquivalenceClass>,
    pub method: ClassMethod,
    /// Merges that rest on matching invariants only.
    pub fallback_merges: usize,
}

impl EquivalenceClassification {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class index of every input, in input order.
    pub fn assignment(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (c, class) in self.classes.iter().enumerate() {
            for &m in &class.members {
                out[m] = c;
            }
        }
        out
    }
}

/// Coefficients `(t, v)` of `u = t 1 + v·σ`.
fn pauli_coefficients(u: &ComplexMatrix) -> (C64, [C64; 3]) {
    let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let i = C64::new(0.0, 1.0);
    ((a + d) / 2.0, [(b + c) / 2.0, i * (b - c) / 2.0, (a - d) / 2.0])
}

fn re3(v: &[C64; 3]) -> Vector3<f64> {
    Vector3::new(v[0].re, v[1].re, v[2].re)
}

fn im3(v: &[C64; 3]) -> Vector3<f64> {
    Vector3::new(v[0].im, v[1].im, v[2].im)
}

/// `SU(2)` form `a 1 - i b·σ` with `a >= 0`, from `U / sqrt(det U)`.
/// `free` marks `a = 0`, where `b` and `-b` describe the same gate up to phase.
struct PhaseFree {
    a: f64,
    b: Vector3<f64>,
    free: bool,
}

fn phase_free(u: &ComplexMatrix) -> PhaseFree {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let s = det.sqrt();
    let (t, v) = pauli_coefficients(u);
    let i = C64::new(0.0, 1.0);
    let (mut a, mut b) = ((t / s).re, Vector3::new((i * v[0] / s).re, (i * v[1] / s).re, (i * v[2] / s).re));
    if a < -TOL {
        a = -a;
        b = -b;
    }
    let free = a.abs() <= TOL;
    PhaseFree { a: if free { 0.0 } else { a }, b, free }
}

struct Invariants {
    scalars: Vec<C64>,
    vectors: Vec<Vector3<f64>>,
    gram: Vec<f64>,
    triples: Vec<f64>,
}

fn exact_invariants(o: &OracleSet) -> Invariants {
    let mut scalars = Vec::new();
    let mut vectors = Vec::new();
    for g in o.gates() {
        let (t, v) = pauli_coefficients(&g.matrix);
        scalars.push(t);
        vectors.push(re3(&v));
        vectors.push(im3(&v));
    }
    let k = vectors.len();
    let mut gram = Vec::new();
    let mut triples = Vec::new();
    for i in 0..k {
        for j in i..k {
            gram.push(vectors[i].dot(&vectors[j]));
            for l in j + 1..k {
                triples.push(vectors[i].dot(&vectors[j].cross(&vectors[l])));
            }
        }
    }
    Invariants { scalars, vectors, gram, triples }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOL)
}

fn close_c(a: &[C64], b: &[C64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= TOL)
}

fn some_perpendicular(e: &Vector3<f64>) -> Vector3<f64> {
    let axis = (0..3).min_by(|&i, &j| e[i].abs().total_cmp(&e[j].abs())).unwrap_or(0);
    e.cross(&Vector3::ith(axis, 1.0)).normalize()
}

/// Orthonormal frame (as columns) from the vectors at `p` and `q`.
fn frame(vs: &[Vector3<f64>], p: usize, q: Option<usize>) -> Matrix3<f64> {
    let e1 = vs[p].normalize();
    let e2 = match q {
        Some(q) => (vs[q] - e1 * vs[q].dot(&e1)).normalize(),
        None => some_perpendicular(&e1),
    };
    Matrix3::from_columns(&[e1, e2, e1.cross(&e2)])
}

/// A rotation with `R src_j = dst_j` for all `j`, if one exists.
fn solve_rotation(src: &[Vector3<f64>], dst: &[Vector3<f64>]) -> Option<Matrix3<f64>> {
    let r = match src.iter().position(|v| v.norm() > TOL) {
        None => Matrix3::identity(),
        Some(p) => {
            if dst[p].norm() <= TOL {
                return None;
            }
            let e1 = src[p].normalize();
            let q = (0..src.len()).find(|&j| e1.cross(&src[j]).norm() > TOL);
            if let Some(q) = q {
                if dst[p].normalize().cross(&dst[q]).norm() <= TOL {
                    return None;
                }
            }
            frame(dst, p, q) * frame(src, p, q).transpose()
        }
    };
    src.iter().zip(dst).all(|(s, d)| (r * s - d).norm() <= TOL).then_some(r)
}

/// `V ∈ SU(2)` with `V (v·σ) V^dagger = (R v)·σ`.
fn su2_from_rotation(r: &Matrix3<f64>) -> ComplexMatrix {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    // w 1 - i (x X + y Y + z Z)
    ComplexMatrix::from_rows(&[[C64::new(w, -z), C64::new(-y, -x)], [C64::new(y, -x), C64::new(w, z)]])
}

fn conjugates_exactly(v: &ComplexMatrix, a: &OracleSet, b: &OracleSet) -> bool {
    a.gates().iter().zip(b.gates()).all(|(ga, gb)| (&(v * &ga.matrix) * &v.adjoint()).approx_eq(&gb.matrix, TOL))
}

fn conjugates_up_to_phases(v: &ComplexMatrix, a: &OracleSet, b: &OracleSet) -> bool {
    a.gates().iter().zip(b.gates()).all(|(ga, gb)| {
        let w = &(v * &ga.matrix) * &v.adjoint();
        let phase = (&w.adjoint() * &gb.matrix).trace() / 2.0;
        (phase.norm() - 1.0).abs() <= TOL && w.scale(phase).approx_eq(&gb.matrix, TOL)
    })
}

fn check_shapes(a: &OracleSet, b: &OracleSet) -> Result<()> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.dim().max(b.dim()) });
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.n() });
    }
    Ok(())
}

/// A verified `V` taking the gates of `a` onto those of `b`.
pub fn find_conjugator(a: &OracleSet, b: &OracleSet, mode: EquivalenceMode) -> Result<Option<ComplexMatrix>> {
    check_shapes(a, b)?;
    Ok(match mode {
        EquivalenceMode::Exact => {
            let (ia, ib) = (exact_invariants(a), exact_invariants(b));
            if !close_c(&ia.scalars, &ib.scalars) {
                return Ok(None);
            }
            solve_rotation(&ia.vectors, &ib.vectors)
                .map(|r| su2_from_rotation(&r))
                .filter(|v| conjugates_exactly(v, a, b))
        }
        EquivalenceMode::UpToGatePhases => {
            let pa: Vec<PhaseFree> = a.gates().iter().map(|g| phase_free(&g.matrix)).collect();
            let pb: Vec<PhaseFree> = b.gates().iter().map(|g| phase_free(&g.matrix)).collect();
            if pa.iter().zip(&pb).any(|(x, y)| (x.a - y.a).abs() > TOL || x.free != y.free) {
                return Ok(None);
            }
            let src: Vec<Vector3<f64>> = pa.iter().map(|p| p.b).collect();
            let free: Vec<usize> = (0..pb.len()).filter(|&i| pb[i].free).collect();
            (0..1u32 << free.len()).find_map(|mask| {
                let mut dst: Vec<Vector3<f64>> = pb.iter().map(|p| p.b).collect();
                for (bit, &i) in free.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        dst[i] = -dst[i];
                    }
                }
                solve_rotation(&src, &dst).map(|r| su2_from_rotation(&r)).filter(|v| conjugates_up_to_phases(v, a, b))
            })
        }
    })
}

/// Partitions `sets` into conjugation classes. Each new set is compared with
/// the class representatives in order; a merge needs an explicit, verified
/// `V`. In exact mode, when construction fails although all rotation
/// invariants agree, the merge is made on invariants alone and counted in
/// `fallback_merges`.
pub fn equivalence_classes(sets: &[OracleSet], mode: EquivalenceMode) -> Result<EquivalenceClassification> {
    if let Some(first) = sets.first() {
        for s in sets {
            check_shapes(first, s)?;
        }
    }
    let invariants: Vec<Invariants> = sets.iter().map(exact_invariants).collect();
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    let mut fallback_merges = 0;
    for (i, set) in sets.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = class.members[0];
            if let Some(v) = find_conjugator(&sets[rep], set, mode)? {
                class.members.push(i);
                class.conjugators.push(v);
                placed = true;
                break;
            }
            let (ir, is) = (&invariants[rep], &invariants[i]);
            if mode == EquivalenceMode::Exact
                && close_c(&ir.scalars, &is.scalars)
                && close(&ir.gram, &is.gram)
                && close(&ir.triples, &is.triples)
            {
                class.members.push(i);
                class.conjugators.push(ComplexMatrix::identity(2));
                class.method = ClassMethod::Fingerprint;
                fallback_merges += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(EquivalenceClass {
                members: vec![i],
                conjugators: vec![ComplexMatrix::identity(2)],
                method: ClassMethod::Explicit,
            });
        }
    }
    let method = if fallback_merges == 0 { ClassMethod::Explicit } else { ClassMethod::Fingerprint };
    Ok(EquivalenceClassification { mode, classes, method, fallback_merges })
}
