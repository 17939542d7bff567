use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute max-norm tolerance used for equality checks throughout the crate.
pub const TOL: f64 = 1e-10;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged matrix rows");
            data.extend_from_slice(r.as_ref());
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            let row = self.row(i);
            for (k, a) in row.iter().enumerate() {
                acc += a * other.data[k * other.cols + i];
            }
        }
        acc
    }

    /// Largest absolute entrywise difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `max |U^dagger U - 1|`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<a| self |b>`.
    pub fn sandwich(&self, a: &[C64], b: &[C64]) -> C64 {
        // witness vectors are mostly zeros; skip them on both sides
        let zero = C64::new(0.0, 0.0);
        let nb: Vec<usize> = (0..b.len()).filter(|&j| b[j] != zero).collect();
        let mut acc = zero;
        for (i, x) in a.iter().enumerate() {
            if *x == zero {
                continue;
            }
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let r: C64 = nb.iter().map(|&j| row[j] * b[j]).sum();
            acc += x.conj() * r;
        }
        acc
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.ensure_square()?;
        let h = (self + &self.adjoint()).scale_real(0.5);
        let mut ev: Vec<f64> = h.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        debug_assert_eq!(ev.len(), n);
        Ok(ev)
    }

    /// Positive-semidefiniteness up to `tol`: `self + tol * 1` admits a
    /// Cholesky factor with strictly positive real pivots.
    pub fn is_psd(&self, tol: f64) -> bool {
        let Ok(n) = self.ensure_square() else { return false };
        if self.hermiticity_deviation() > tol {
            return false;
        }
        // lower factor, row-major, built column by column
        let mut l = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self[(j, j)].re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = C64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                for (a, b) in ri.iter().zip(rj) {
                    s -= a * b.conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Numerical rank: singular values above `tol` times the largest one.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * top).count()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if *a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; indices of `a` vary slowest.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Kronecker product of vectors; `a` slowest.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

/// Unnormalized Choi vector `(1 ⊗ U)(|00> + |11>)` of a qubit gate.
pub fn choi_vector(u: &ComplexMatrix) -> Result<Vec<C64>> {
    if u.rows != 2 || u.cols != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: u.rows.max(u.cols) });
    }
    // component (i, o) = <o|U|i>
    Ok(vec![u[(0, 0)], u[(1, 0)], u[(0, 1)], u[(1, 1)]])
}
