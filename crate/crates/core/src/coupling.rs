//! Closed-form matrices of the qubit chain: the coupling matrix J, the mirror
//! operator P, the perturbative pair (J₀, M) and the triangular factors of J.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// The physical scenario: `n` identical qubits with phase `theta` = ΩL
/// between neighbours and single-emitter decay rate `gamma0`.
///
/// `theta` is used as given and never reduced modulo 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    n: usize,
    theta: f64,
    gamma0: f64,
}

impl ChainConfig {
    pub fn new(n: usize, theta: f64, gamma0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig(
                "qubit count must be at least 1".into(),
            ));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "theta must be finite, got {theta}"
            )));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma0 must be positive, got {gamma0}"
            )));
        }
        Ok(Self { n, theta, gamma0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// Same chain with a different phase.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.n, theta, self.gamma0)
    }

    /// p = e^{iθ}
    pub fn phase(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }
}

/// Nearest multiple of π: returns `(k, δ)` with θ = kπ + δ and |δ| ≤ π/2.
pub fn nearest_multiple_of_pi(theta: f64) -> (i64, f64) {
    let k = (theta / PI).round();
    (k as i64, theta - k * PI)
}

/// J_{jl} = e^{iθ|j−l|}: complex symmetric, unit modulus, unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    matrix: CMatrix,
}

impl CouplingMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

impl std::ops::Index<(usize, usize)> for CouplingMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.matrix[idx]
    }
}

pub fn build_coupling_matrix(config: &ChainConfig) -> CouplingMatrix {
    let theta = config.theta();
    // Each entry is evaluated directly rather than as a power of p so that
    // rounding does not accumulate along the anti-diagonals.
    let matrix = CMatrix::from_fn(config.n(), |j, l| {
        let sep = j.abs_diff(l) as f64;
        C64::from_polar(1.0, theta * sep)
    });
    CouplingMatrix { matrix }
}

/// Anti-diagonal permutation P|e_j⟩ = |e_{N−j+1}⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirrorMatrix {
    dim: usize,
}

impl MirrorMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i + j + 1 == self.dim {
            1.0
        } else {
            0.0
        }
    }

    /// P·v, i.e. `v` reversed.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        v.iter().rev().copied().collect()
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| C64::new(self.entry(i, j), 0.0))
    }

    /// (v + s·Pv)/2 with s = ±1: projection onto the symmetric (s = 1) or
    /// anti-symmetric (s = −1) subspace.
    pub fn project(&self, v: &[C64], sign: f64) -> Vec<C64> {
        v.iter()
            .zip(v.iter().rev())
            .map(|(a, b)| (a + b * sign) * 0.5)
            .collect()
    }
}

pub fn build_mirror_matrix(n: usize) -> MirrorMatrix {
    assert!(n >= 1, "mirror matrix needs n >= 1");
    MirrorMatrix { dim: n }
}

/// First-order expansion of J around θ = kπ: J ≈ J₀ + iδM for θ = kπ + δ.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPair {
    pub j0: CMatrix,
    pub m: CMatrix,
}

/// The pair for even multiples of π: J₀ is all ones, M_{jl} = |j − l|.
pub fn build_perturbation_matrices(n: usize) -> PerturbationPair {
    perturbation_matrices_at(n, 0)
}

/// The pair around θ = kπ for any integer k. With s = (−1)^k,
/// J₀_{jl} = s^{|j−l|} and M_{jl} = s^{|j−l|}|j − l|; M is (1/i)·dJ/dθ at kπ.
pub fn perturbation_matrices_at(n: usize, k: i64) -> PerturbationPair {
    let odd = k.rem_euclid(2) == 1;
    let sign = |sep: usize| if odd && sep % 2 == 1 { -1.0 } else { 1.0 };
    let j0 = CMatrix::from_fn(n, |j, l| C64::new(sign(j.abs_diff(l)), 0.0));
    let m = CMatrix::from_fn(n, |j, l| {
        let sep = j.abs_diff(l);
        C64::new(sign(sep) * sep as f64, 0.0)
    });
    PerturbationPair { j0, m }
}

/// Closed-form triangular factors J = L·U.
///
/// L_{aj} = p^{a−j} (a ≥ j); U's first row is p^{j−1}, later rows are
/// p^{j−a}(1 − p²) on and above the diagonal.
pub fn lu_closed_form(config: &ChainConfig) -> (CMatrix, CMatrix) {
    let n = config.n();
    let theta = config.theta();
    let pow = |k: usize| C64::from_polar(1.0, theta * k as f64);
    let one_minus_p2 = C64::new(1.0, 0.0) - C64::from_polar(1.0, 2.0 * theta);
    let zero = C64::new(0.0, 0.0);

    let lower = CMatrix::from_fn(n, |a, j| if a >= j { pow(a - j) } else { zero });
    let upper = CMatrix::from_fn(n, |a, j| {
        if a == 0 {
            pow(j)
        } else if a <= j {
            pow(j - a) * one_minus_p2
        } else {
            zero
        }
    });
    (lower, upper)
}

/// det J = (1 − e^{2iθ})^{N−1}.
pub fn determinant_closed_form(config: &ChainConfig) -> C64 {
    let base = C64::new(1.0, 0.0) - C64::from_polar(1.0, 2.0 * config.theta());
    base.powi(config.n() as i32 - 1)
}

/// True iff θ is within `tol` (absolute) of an integer multiple of π, where
/// J is singular.
pub fn is_singular(theta: f64, tol: f64) -> bool {
    debug_assert!(tol > 0.0 && tol < PI / 2.0);
    nearest_multiple_of_pi(theta).1.abs() < tol
}
