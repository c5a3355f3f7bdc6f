//! Collective decay modes: eigenpairs of J labelled by mirror parity.
//!
//! J commutes with the mirror operator P, so every non-degenerate eigenvector
//! is automatically symmetric or anti-symmetric. Degenerate clusters (most
//! notably the (N−1)-fold zero eigenvalue at θ = kπ) are re-combined by
//! projecting onto the ±1 eigenspaces of P.

use std::cmp::Ordering;
use std::fmt;

use crate::coupling::{
    build_coupling_matrix, build_mirror_matrix, nearest_multiple_of_pi, perturbation_matrices_at,
    ChainConfig, CouplingMatrix, MirrorMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

pub const DEFAULT_CLASSIFICATION_TOL: f64 = 1e-6;

/// Relative gap below which two eigenvalues are treated as degenerate.
pub const CLUSTER_REL_TOL: f64 = 1e-8;

/// Above this eigenvector condition number J is reported as not
/// diagonalizable.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e14;

/// |θ − kπ| must stay below this for the first-order formulas.
pub const PERTURBATIVE_LIMIT: f64 = 0.3;

/// Largest |θ − kπ| at which the parity classes are still assigned the
/// superradiant/protected roles from (N, k). The parity rule itself was
/// checked numerically to |δ| = 0.8 for N ≤ 12; only the first-order
/// eigenvalue formula needs the tighter `PERTURBATIVE_LIMIT`.
pub const PROTECTION_LIMIT: f64 = std::f64::consts::FRAC_PI_4;

const PHASE_FLOOR: f64 = 1e-8;
const RANK_TOL: f64 = 1e-6;
const MAX_EIGEN_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Symmetric,
    AntiSymmetric,
    Unclassified,
}

impl Symmetry {
    pub fn opposite(self) -> Self {
        match self {
            Symmetry::Symmetric => Symmetry::AntiSymmetric,
            Symmetry::AntiSymmetric => Symmetry::Symmetric,
            Symmetry::Unclassified => Symmetry::Unclassified,
        }
    }

    /// Mirror eigenvalue, ±1.
    pub fn parity(self) -> Option<f64> {
        match self {
            Symmetry::Symmetric => Some(1.0),
            Symmetry::AntiSymmetric => Some(-1.0),
            Symmetry::Unclassified => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::AntiSymmetric => "antisymmetric",
            Symmetry::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One collective mode. Amplitudes in this mode evolve as e^{−γ₀λt/2}.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayMode {
    /// Dimensionless eigenvalue λ of J.
    pub eigenvalue: C64,
    /// γ₀·Re λ
    pub decay_rate: f64,
    /// γ₀·Im λ
    pub frequency_shift: f64,
    /// Unit norm; first component with modulus > 1e-8 is real and positive.
    pub eigenvector: Vec<C64>,
    pub symmetry: Symmetry,
}

impl DecayMode {
    fn new(eigenvalue: C64, eigenvector: Vec<C64>, symmetry: Symmetry, gamma0: f64) -> Self {
        Self {
            eigenvalue,
            decay_rate: gamma0 * eigenvalue.re,
            frequency_shift: gamma0 * eigenvalue.im,
            eigenvector,
            symmetry,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    /// Threshold on ‖Pv ∓ v‖₂ for the symmetry labels.
    pub classification_tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            classification_tol: DEFAULT_CLASSIFICATION_TOL,
        }
    }
}

/// The full eigen-decomposition of J, modes sorted by descending Re λ
/// (so `modes()[0]` is the superradiant candidate).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    config: ChainConfig,
    modes: Vec<DecayMode>,
    eigenvector_condition: f64,
}

impl SpectralDecomposition {
    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn modes(&self) -> &[DecayMode] {
        &self.modes
    }

    pub fn eigenvector_condition(&self) -> f64 {
        self.eigenvector_condition
    }

    /// Mode with the largest decay rate.
    pub fn superradiant(&self) -> &DecayMode {
        &self.modes[0]
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }

    /// Eigenvectors as columns, in mode order.
    pub fn eigenvector_matrix(&self) -> CMatrix {
        let cols: Vec<Vec<C64>> = self.modes.iter().map(|m| m.eigenvector.clone()).collect();
        CMatrix::from_columns(&cols)
    }

    /// (symmetric, anti-symmetric, unclassified) mode counts.
    pub fn symmetry_counts(&self) -> (usize, usize, usize) {
        self.modes
            .iter()
            .fold((0, 0, 0), |(s, a, u), m| match m.symmetry {
                Symmetry::Symmetric => (s + 1, a, u),
                Symmetry::AntiSymmetric => (s, a + 1, u),
                Symmetry::Unclassified => (s, a, u + 1),
            })
    }

    /// max_{jk} |(J·V − V·Λ)_{jk}|
    pub fn reconstruction_residual(&self, j: &CouplingMatrix) -> f64 {
        self.modes
            .iter()
            .map(|m| eigen_residual(j.as_matrix(), m.eigenvalue, &m.eigenvector))
            .fold(0.0, f64::max)
    }
}

fn eigen_residual(j: &CMatrix, lambda: C64, v: &[C64]) -> f64 {
    j.mul_vec(v)
        .iter()
        .zip(v)
        .map(|(jv, x)| (jv - lambda * x).norm())
        .fold(0.0, f64::max)
}

/// Convenience wrapper: builds J for `config` and decomposes it with the
/// default options.
pub fn decompose_config(config: &ChainConfig) -> Result<SpectralDecomposition> {
    decompose(
        &build_coupling_matrix(config),
        config,
        &DecomposeOptions::default(),
    )
}

pub fn decompose(
    j: &CouplingMatrix,
    config: &ChainConfig,
    opts: &DecomposeOptions,
) -> Result<SpectralDecomposition> {
    let n = config.n();
    if j.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: j.dim(),
        });
    }
    let tol = opts.classification_tol;
    if !(tol > 0.0 && tol < 0.1) {
        return Err(Error::InvalidConfig(format!(
            "classification tolerance must lie in (0, 0.1), got {tol}"
        )));
    }

    let (values, vectors) = linalg::eigen(j.as_matrix())?;
    let vectors: Vec<Vec<C64>> = vectors.iter().map(|v| linalg::normalized(v)).collect();
    let mirror = build_mirror_matrix(n);

    // (sort key, eigenvalue, eigenvector)
    let mut raw: Vec<(C64, C64, Vec<C64>)> = Vec::with_capacity(n);
    for cluster in cluster_eigenvalues(&values) {
        if let [idx] = cluster[..] {
            raw.push((values[idx], values[idx], vectors[idx].clone()));
            continue;
        }
        let key = cluster.iter().map(|&i| values[i]).sum::<C64>() / cluster.len() as f64;
        let members: Vec<&[C64]> = cluster.iter().map(|&i| vectors[i].as_slice()).collect();
        for v in split_by_mirror(&members, &mirror).ok_or_else(|| Error::DegenerateUnresolved {
            eigenvalue: format!("{key:.6e}"),
            size: cluster.len(),
        })? {
            // Rayleigh quotient; exact for a vector inside the eigenspace.
            let lambda = linalg::inner(&v, &j.as_matrix().mul_vec(&v));
            raw.push((key, lambda, v));
        }
    }

    for (_, _, v) in raw.iter_mut() {
        linalg::fix_phase(v, PHASE_FLOOR);
        let norm = linalg::norm(v);
        v.iter_mut().for_each(|z| *z /= norm);
    }

    raw.sort_by(|a, b| {
        b.0.re
            .total_cmp(&a.0.re)
            .then(b.0.im.total_cmp(&a.0.im))
            .then_with(|| lexicographic(&a.2, &b.2))
    });

    let modes: Vec<DecayMode> = raw
        .into_iter()
        .map(|(_, lambda, v)| {
            let symmetry = classify_symmetry(&v, &mirror, tol);
            DecayMode::new(lambda, v, symmetry, config.gamma0())
        })
        .collect();

    let decomposition = SpectralDecomposition {
        config: *config,
        eigenvector_condition: 0.0,
        modes,
    };
    let condition = linalg::condition_number(&decomposition.eigenvector_matrix());
    let residual = decomposition.reconstruction_residual(j);
    let within = |x: f64, limit: f64| x.partial_cmp(&limit).is_some_and(|o| o.is_le());
    if !within(condition, MAX_EIGENVECTOR_CONDITION)
        || !within(residual, MAX_EIGEN_RESIDUAL * n as f64)
    {
        return Err(Error::NotDiagonalizable {
            condition,
            residual,
        });
    }
    Ok(SpectralDecomposition {
        eigenvector_condition: condition,
        ..decomposition
    })
}

/// Groups indices whose eigenvalues are transitively within
/// `CLUSTER_REL_TOL · max(1, |λ|)` of each other. Clusters come out ordered
/// by their smallest member index.
fn cluster_eigenvalues(values: &[C64]) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..n {
        for b in a + 1..n {
            let scale = values[a].norm().max(values[b].norm()).max(1.0);
            if (values[a] - values[b]).norm() < CLUSTER_REL_TOL * scale {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(i);
    }
    clusters
}

/// Re-expresses the span of `members` as an orthonormal set of symmetric
/// vectors followed by anti-symmetric ones. `None` if the projected ranks do
/// not add up to the cluster size.
fn split_by_mirror(members: &[&[C64]], mirror: &MirrorMatrix) -> Option<Vec<Vec<C64>>> {
    let mut symmetric = Vec::new();
    let mut antisymmetric = Vec::new();
    for v in members {
        push_orthonormal(&mut symmetric, mirror.project(v, 1.0));
        push_orthonormal(&mut antisymmetric, mirror.project(v, -1.0));
    }
    if symmetric.len() + antisymmetric.len() != members.len() {
        return None;
    }
    symmetric.extend(antisymmetric);
    Some(symmetric)
}

/// Modified Gram–Schmidt (two passes); keeps `v` only if it adds rank.
fn push_orthonormal(basis: &mut Vec<Vec<C64>>, mut v: Vec<C64>) {
    for _ in 0..2 {
        for b in basis.iter() {
            let c = linalg::inner(b, &v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let norm = linalg::norm(&v);
    if norm > RANK_TOL {
        basis.push(v.into_iter().map(|z| z / norm).collect());
    }
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Labels a unit vector by its mirror parity.
pub fn classify_symmetry(v: &[C64], p: &MirrorMatrix, tol: f64) -> Symmetry {
    let pv = p.apply(v);
    let minus: f64 = pv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let plus: f64 = pv
        .iter()
        .zip(v)
        .map(|(a, b)| (a + b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if minus < tol {
        Symmetry::Symmetric
    } else if plus < tol {
        Symmetry::AntiSymmetric
    } else {
        Symmetry::Unclassified
    }
}

/// Dimensions (symmetric, anti-symmetric) of the mirror eigenspaces:
/// (⌈n/2⌉, ⌊n/2⌋).
pub fn subspace_dimensions(n: usize) -> (usize, usize) {
    (n.div_ceil(2), n / 2)
}

/// Parity of the superradiant state near θ = kπ: the Dicke state for even k,
/// the alternating state (symmetric iff N is odd) for odd k.
pub fn superradiant_symmetry_near(n: usize, k: i64) -> Symmetry {
    if k.rem_euclid(2) == 0 || n % 2 == 1 {
        Symmetry::Symmetric
    } else {
        Symmetry::AntiSymmetric
    }
}

/// The parity class guaranteed to be subradiant near θ = kπ, or `None` when
/// that class is empty (N = 1).
pub fn protected_symmetry_near(n: usize, k: i64) -> Option<Symmetry> {
    let protected = superradiant_symmetry_near(n, k).opposite();
    let (sym, anti) = subspace_dimensions(n);
    let dim = if protected == Symmetry::Symmetric {
        sym
    } else {
        anti
    };
    (dim > 0).then_some(protected)
}

/// First-order estimate of the superradiant eigenpair near θ = kπ.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeEstimate {
    pub k: i64,
    pub delta: f64,
    pub eigenvalue: C64,
    /// Normalized, phase-fixed like a `DecayMode` eigenvector.
    pub eigenvector: Vec<C64>,
}

/// λ ≈ N + iδ·(wᵀMw)/(wᵀw) with w_j = (−1)^{kj}, where M is the first-order
/// matrix of the k branch (see [`perturbation_matrices_at`]).
pub fn perturbative_superradiant(config: &ChainConfig) -> Result<PerturbativeEstimate> {
    let (k, delta) = nearest_multiple_of_pi(config.theta());
    if delta.abs() >= PERTURBATIVE_LIMIT {
        return Err(Error::OutOfPerturbativeRange {
            delta,
            limit: PERTURBATIVE_LIMIT,
        });
    }
    let n = config.n();
    let w = alternating_pattern(n, k);
    let m = perturbation_matrices_at(n, k).m;
    // Plain (non-conjugating) bilinear forms; w is real anyway.
    let mw = m.mul_vec(&w);
    let wmw: C64 = w.iter().zip(&mw).map(|(a, b)| a * b).sum();
    let ww: C64 = w.iter().map(|a| a * a).sum();
    let eigenvalue = C64::new(n as f64, 0.0) + C64::new(0.0, delta) * wmw / ww;

    let mut eigenvector = linalg::normalized(&w);
    linalg::fix_phase(&mut eigenvector, PHASE_FLOOR);
    Ok(PerturbativeEstimate {
        k,
        delta,
        eigenvalue,
        eigenvector,
    })
}

/// w_j = (−1)^{kj}, j = 1..n: all ones for even k, (−1, 1, −1, …) for odd k.
pub fn alternating_pattern(n: usize, k: i64) -> Vec<C64> {
    let odd = k.rem_euclid(2) == 1;
    (1..=n)
        .map(|j| {
            if odd && j % 2 == 1 {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtectionReport {
    pub k: i64,
    pub delta: f64,
    /// Measured parity of the fastest mode.
    pub superradiant_symmetry: Symmetry,
    /// Parity predicted for the fastest mode from (N, k).
    pub predicted_superradiant_symmetry: Symmetry,
    pub protected_subspace: Symmetry,
    /// Largest decay rate in the protected class; `None` if the class is
    /// empty.
    pub max_protected_decay_rate: Option<f64>,
    pub superradiant_decay_rate: f64,
    pub gamma0: f64,
}

impl ProtectionReport {
    /// The superradiant parity matches the prediction and every protected
    /// mode decays slower than a single emitter.
    pub fn holds(&self) -> bool {
        self.superradiant_symmetry == self.predicted_superradiant_symmetry
            && self
                .max_protected_decay_rate
                .is_none_or(|r| r < self.gamma0)
    }
}

/// Checks symmetry-protected subradiance near θ = kπ: the fastest mode has
/// the predicted parity and the opposite class is subradiant.
pub fn check_symmetry_protection(config: &ChainConfig) -> Result<ProtectionReport> {
    let (k, delta) = nearest_multiple_of_pi(config.theta());
    if delta.abs() >= PROTECTION_LIMIT {
        return Err(Error::OutOfPerturbativeRange {
            delta,
            limit: PROTECTION_LIMIT,
        });
    }
    let decomposition = decompose_config(config)?;
    let sup = decomposition.superradiant();
    let protected = sup.symmetry.opposite();
    let max_protected_decay_rate = decomposition
        .modes()
        .iter()
        .filter(|m| m.symmetry == protected)
        .map(|m| m.decay_rate)
        .reduce(f64::max);
    Ok(ProtectionReport {
        k,
        delta,
        superradiant_symmetry: sup.symmetry,
        predicted_superradiant_symmetry: superradiant_symmetry_near(config.n(), k),
        protected_subspace: protected,
        max_protected_decay_rate,
        superradiant_decay_rate: sup.decay_rate,
        gamma0: config.gamma0(),
    })
}
