//! Gate and matrix constructors: Paulis, the ten-gate set, sign (Hadamard)
//! matrices and the quantum Fourier transform.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;

/// Tolerance for unitarity of the exactly-specified gates.
pub const GATE_TOL: f64 = 1e-12;

/// A `P x P` matrix of `±1` entries with mutually orthogonal rows and an
/// all-`+1` first row and first column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidSignMatrix("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(order * order);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidSignMatrix(format!("row {x} has length {}", row.len())));
            }
            for (y, &v) in row.iter().enumerate() {
                if v != 1 && v != -1 {
                    return Err(Error::InvalidSignMatrix(format!("entry ({x}, {y}) is {v}")));
                }
                entries.push(v as i8);
            }
        }
        let m = Self { order, entries };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let p = self.order;
        for x in 0..p {
            for x2 in 0..p {
                let dot: i64 = (0..p).map(|y| self.entry(x, y) as i64 * self.entry(x2, y) as i64).sum();
                let want = if x == x2 { p as i64 } else { 0 };
                if dot != want {
                    return Err(Error::InvalidSignMatrix(format!("rows {x} and {x2} have inner product {dot}")));
                }
            }
        }
        if (0..p).any(|k| self.entry(0, k) != 1 || self.entry(k, 0) != 1) {
            return Err(Error::InvalidSignMatrix("first row and column must be all +1".into()));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `m_{x,y}`.
    pub fn entry(&self, x: usize, y: usize) -> i8 {
        self.entries[x * self.order + y]
    }

    pub fn column(&self, y: usize) -> Vec<i8> {
        (0..self.order).map(|x| self.entry(x, y)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.order).map(|x| (0..self.order).map(|y| self.entry(x, y) as i64).collect()).collect()
    }

    /// `M * M^T` in integer arithmetic.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let p = self.order;
        (0..p)
            .map(|x| {
                (0..p)
                    .map(|x2| (0..p).map(|y| self.entry(x, y) as i64 * self.entry(x2, y) as i64).sum())
                    .collect()
            })
            .collect()
    }

    /// The unitary `H_P = M_P / sqrt(P)`.
    pub fn unitary(&self) -> ComplexMatrix {
        let s = 1.0 / (self.order as f64).sqrt();
        ComplexMatrix::from_fn(self.order, self.order, |x, y| C64::new(self.entry(x, y) as f64 * s, 0.0))
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.order {
            let row: Vec<&str> = (0..self.order).map(|y| if self.entry(x, y) > 0 { "+" } else { "-" }).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The 4x4 sign matrix realized by the experimental four-core beam splitter.
pub fn hadamard_m4() -> SignMatrix {
    SignMatrix::new(vec![vec![1, 1, 1, 1], vec![1, 1, -1, -1], vec![1, -1, -1, 1], vec![1, -1, 1, -1]])
        .expect("M4 is a valid sign matrix")
}

pub const MAX_SYLVESTER_EXPONENT: u32 = 6;

/// Sylvester construction `H_{2^k} = H_2 ⊗ H_{2^{k-1}}`.
pub fn sylvester_hadamard(k: u32) -> Result<SignMatrix> {
    if k > MAX_SYLVESTER_EXPONENT {
        return Err(Error::LimitExceeded(format!("2^{k} exceeds the supported order 64")));
    }
    let mut rows = vec![vec![1i64]];
    for _ in 0..k {
        let n = rows.len();
        let mut next = vec![vec![0i64; 2 * n]; 2 * n];
        for (bx, by, s) in [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)] {
            for x in 0..n {
                for y in 0..n {
                    next[bx * n + x][by * n + y] = s * rows[x][y];
                }
            }
        }
        rows = next;
    }
    SignMatrix::new(rows)
}

/// `F[j][k] = ω^{jk} / sqrt(P)` with `ω = exp(2πi / P)`.
pub fn fourier_matrix(p: usize) -> ComplexMatrix {
    assert!(p >= 1, "Fourier transform needs P >= 1");
    let s = 1.0 / (p as f64).sqrt();
    ComplexMatrix::from_fn(p, p, |j, k| C64::from_polar(s, TAU * ((j * k) % p) as f64 / p as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedGate {
    pub name: String,
    pub matrix: ComplexMatrix,
}

impl NamedGate {
    pub fn new(name: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        let name = name.into();
        let deviation = matrix.unitarity_deviation();
        if deviation > crate::tensor::TOL {
            return Err(Error::NotUnitary { name, deviation });
        }
        Ok(Self { name, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `V U V^dagger`, keeping the name with a marker.
    pub fn conjugated(&self, v: &ComplexMatrix) -> Self {
        Self { name: format!("{}^V", self.name), matrix: &(v * &self.matrix) * &v.adjoint() }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

fn x_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

fn y_matrix() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

fn z_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
}

/// `1`, `X`, `Y` or `Z`.
pub fn pauli(name: &str) -> Result<NamedGate> {
    let m = match name {
        "1" | "I" => identity2(),
        "X" => x_matrix(),
        "Y" => y_matrix(),
        "Z" => z_matrix(),
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    let name = if name == "I" { "1" } else { name };
    Ok(NamedGate { name: name.to_string(), matrix: m })
}

/// `(a + b) / sqrt(2)`.
fn sum_over_root2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    (a + b).scale_real(FRAC_1_SQRT_2)
}

/// `(1 + i P) / sqrt(2)`.
fn identity_plus_i(p: &ComplexMatrix) -> ComplexMatrix {
    (&identity2() + &p.scale(c(0.0, 1.0))).scale_real(FRAC_1_SQRT_2)
}

/// The ten qubit gates whose Choi projectors span the full 10-dimensional
/// space, with global phases exactly as listed.
pub fn gate_set_g() -> Vec<NamedGate> {
    let (i, x, y, z) = (identity2(), x_matrix(), y_matrix(), z_matrix());
    let gates = [
        ("1", i.clone()),
        ("Z", z.clone()),
        ("X", x.clone()),
        ("Y", y.clone()),
        ("(Z+X)/sqrt2", sum_over_root2(&z, &x)),
        ("(Z+Y)/sqrt2", sum_over_root2(&z, &y)),
        ("(X+Y)/sqrt2", sum_over_root2(&x, &y)),
        ("(1+iZ)/sqrt2", identity_plus_i(&z)),
        ("(1+iX)/sqrt2", identity_plus_i(&x)),
        ("(1+iY)/sqrt2", identity_plus_i(&y)),
    ];
    gates.into_iter().map(|(n, m)| NamedGate { name: n.to_string(), matrix: m }).collect()
}

/// Looks a gate up by name in the Pauli group or the ten-gate set.
pub fn gate_by_name(name: &str) -> Result<NamedGate> {
    if let Ok(g) = pauli(name) {
        return Ok(g);
    }
    gate_set_g().into_iter().find(|g| g.name == name).ok_or_else(|| Error::UnknownGate(name.to_string()))
}

/// `exp(-i ε Y / 2)`, a small rotation about the y axis.
pub fn y_rotation(epsilon: f64) -> ComplexMatrix {
    let (s, co) = (epsilon / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[[co, -s], [s, co]])
}
