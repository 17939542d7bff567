use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::{kron_vec, ComplexMatrix};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL || amplitudes.is_empty() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z / n).collect() })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Uniform superposition over the computational basis.
    pub fn uniform(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amplitudes: vec![a; dim] }
    }

    /// Haar-random state from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(v) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes) }
    }

    /// Applies a unitary; the result is renormalized to absorb rounding.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: u.cols(), found: self.dim() });
        }
        Self::normalized(u.apply(&self.amplitudes))
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Haar-random single-qubit unitary (random global phase included).
pub fn random_qubit_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    // columns of a random state and its orthogonal complement, times a phase
    let s = PureState::random(2, rng);
    let (a, b) = (s.amplitudes[0], s.amplitudes[1]);
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    ComplexMatrix::from_rows(&[[a, -b.conj() * phase], [b, a.conj() * phase]])
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(vec![C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn random_states_and_unitaries_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = PureState::random(5, &mut rng);
            assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-12);
            let u = random_qubit_unitary(&mut rng);
            assert!(u.is_unitary(1e-12));
        }
    }

    #[test]
    fn fidelity_of_orthogonal_states() {
        assert_eq!(PureState::basis(2, 0).fidelity(&PureState::basis(2, 1)), 0.0);
        assert!((PureState::uniform(2).fidelity(&PureState::basis(2, 1)) - 0.5).abs() < 1e-15);
    }
}
