//! Storage strategies: the slowest eigenmode overall versus the slowest mode
//! of the symmetry-protected parity class.

use std::f64::consts::PI;

use crate::coupling::{build_mirror_matrix, is_singular, nearest_multiple_of_pi, ChainConfig};
use crate::dynamics::{expand_in_modes, storage_time, QubitState};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::spectral::{
    alternating_pattern, classify_symmetry, decompose_config, protected_symmetry_near, DecayMode,
    SpectralDecomposition, Symmetry, DEFAULT_CLASSIFICATION_TOL, PROTECTION_LIMIT,
};

/// θ closer than this to kπ is treated as the singular point itself.
pub const SINGULAR_POINT_TOL: f64 = 1e-8;

/// Offset used to resolve the degenerate null space of J at θ = kπ.
const LIMIT_PROBE: f64 = 1e-4;
const PHASE_FLOOR: f64 = 1e-8;

/// Mode with the smallest decay rate; ties go to the smaller |frequency
/// shift|, then to sort order.
pub fn optimal_storage_state(config: &ChainConfig) -> Result<DecayMode> {
    let decomposition = decompose_config(config)?;
    Ok(slowest(decomposition.modes().iter(), config.gamma0()).clone())
}

fn slowest<'a>(modes: impl Iterator<Item = &'a DecayMode>, gamma0: f64) -> &'a DecayMode {
    let tie = 1e-12 * gamma0;
    modes
        .reduce(|best, m| {
            let faster = m.decay_rate > best.decay_rate + tie;
            let slower = m.decay_rate < best.decay_rate - tie;
            if slower || (!faster && m.frequency_shift.abs() < best.frequency_shift.abs() - tie) {
                m
            } else {
                best
            }
        })
        .expect("a decomposition has at least one mode")
}

/// Slowest mode inside the parity class opposite to the superradiant state
/// near θ = kπ.
pub fn symmetry_protected_best(config: &ChainConfig) -> Result<DecayMode> {
    let n = config.n();
    if n == 1 {
        return Err(Error::NoProtectedSubspace(
            "a single qubit has no anti-symmetric subspace".into(),
        ));
    }
    let (k, delta) = nearest_multiple_of_pi(config.theta());
    if delta.abs() >= PROTECTION_LIMIT {
        return Err(Error::NoProtectedSubspace(format!(
            "θ is {delta:.4} from {k}π; no parity class is guaranteed subradiant"
        )));
    }
    let protected = protected_symmetry_near(n, k)
        .ok_or_else(|| Error::NoProtectedSubspace("protected class is empty".into()))?;
    let decomposition = decompose_config(config)?;
    let mut candidates = decomposition
        .modes()
        .iter()
        .filter(|m| m.symmetry == protected)
        .peekable();
    if candidates.peek().is_none() {
        return Err(Error::NoProtectedSubspace(format!(
            "no mode classified as {protected}"
        )));
    }
    Ok(slowest(candidates, config.gamma0()).clone())
}

/// |x_k| of the fastest-decaying mode in the modal expansion of `state`.
pub fn superradiant_overlap(state: &QubitState, decomp: &SpectralDecomposition) -> Result<f64> {
    let expansion = expand_in_modes(state, decomp)?;
    let idx = decomp
        .modes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.decay_rate.total_cmp(&b.1.decay_rate))
        .map(|(i, _)| i)
        .expect("a decomposition has at least one mode");
    Ok(expansion.coefficients[idx].norm())
}

/// Ideal (δ = 0) eigenmode of a chain, used as a state preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    pub state: QubitState,
    pub symmetry: Symmetry,
    pub superradiant: bool,
    /// Decay rate of the corresponding mode; at a singular point this is the
    /// rate just off it (θ = kπ + 1e-4), which orders the degenerate modes.
    pub probe_decay_rate: f64,
}

/// Eigenmodes of J at the configured θ, in mode order.
///
/// At θ = kπ the N−1 subradiant modes are degenerate and any basis of the
/// null space would do; here each one is taken as the θ → kπ limit of the
/// nearby non-degenerate modes (averaged over ±1e-4 to cancel the linear
/// term, then projected exactly onto the null space and parity class).
pub fn reference_states(config: &ChainConfig) -> Result<Vec<ReferenceState>> {
    if !is_singular(config.theta(), SINGULAR_POINT_TOL) {
        let decomposition = decompose_config(config)?;
        return decomposition
            .modes()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Ok(ReferenceState {
                    state: QubitState::new(m.eigenvector.clone())?,
                    symmetry: m.symmetry,
                    superradiant: i == 0,
                    probe_decay_rate: m.decay_rate,
                })
            })
            .collect();
    }

    let n = config.n();
    let (k, _) = nearest_multiple_of_pi(config.theta());
    let center = k as f64 * PI;
    let above = decompose_config(&config.with_theta(center + LIMIT_PROBE)?)?;
    let below = decompose_config(&config.with_theta(center - LIMIT_PROBE)?)?;
    let mirror = build_mirror_matrix(n);
    let sup_pattern = linalg::normalized(&alternating_pattern(n, k));

    let mut out = Vec::with_capacity(n);
    for (i, mode) in above.modes().iter().enumerate() {
        let vector = if i == 0 {
            sup_pattern.clone()
        } else {
            let partner = below.modes()[1..]
                .iter()
                .filter(|m| m.symmetry == mode.symmetry)
                .max_by(|a, b| {
                    let oa = linalg::inner(&a.eigenvector, &mode.eigenvector).norm();
                    let ob = linalg::inner(&b.eigenvector, &mode.eigenvector).norm();
                    oa.total_cmp(&ob)
                });
            let mut v = mode.eigenvector.clone();
            if let Some(partner) = partner {
                let c = linalg::inner(&partner.eigenvector, &mode.eigenvector);
                let align = if c.norm() > 0.0 {
                    c / c.norm()
                } else {
                    C64::new(1.0, 0.0)
                };
                v.iter_mut()
                    .zip(&partner.eigenvector)
                    .for_each(|(a, b)| *a = (*a + b * align) * 0.5);
            }
            let c = linalg::inner(&sup_pattern, &v);
            v.iter_mut()
                .zip(&sup_pattern)
                .for_each(|(a, w)| *a -= c * w);
            if let Some(parity) = mode.symmetry.parity() {
                v = mirror.project(&v, parity);
            }
            v
        };
        let mut vector = linalg::normalized(&vector);
        linalg::fix_phase(&mut vector, PHASE_FLOOR);
        let symmetry = classify_symmetry(&vector, &mirror, DEFAULT_CLASSIFICATION_TOL);
        out.push(ReferenceState {
            state: QubitState::new(vector)?,
            symmetry,
            superradiant: i == 0,
            probe_decay_rate: mode.decay_rate,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// (1, …, 1)/√N
    Dicke,
    /// (−1, 1, −1, …)/√N up to global phase
    Alternating,
    /// Slowest symmetric non-superradiant mode at the nearest θ = kπ.
    SymmetricSubradiant,
    /// Slowest anti-symmetric non-superradiant mode at the nearest θ = kπ.
    AntiSymmetricSubradiant,
    /// |e_j⟩, 1-based.
    Single(usize),
}

/// Prepares one of the standard initial states. All are normalized and
/// phase-fixed.
pub fn named_state(name: NamedState, config: &ChainConfig) -> Result<QubitState> {
    let n = config.n();
    let pattern = |k: i64| {
        let mut v = linalg::normalized(&alternating_pattern(n, k));
        linalg::fix_phase(&mut v, PHASE_FLOOR);
        QubitState::new(v)
    };
    match name {
        NamedState::Dicke => pattern(0),
        NamedState::Alternating => pattern(1),
        NamedState::Single(j) => QubitState::single(n, j),
        NamedState::SymmetricSubradiant => subradiant_reference(config, Symmetry::Symmetric),
        NamedState::AntiSymmetricSubradiant => {
            subradiant_reference(config, Symmetry::AntiSymmetric)
        }
    }
}

fn subradiant_reference(config: &ChainConfig, class: Symmetry) -> Result<QubitState> {
    let (k, _) = nearest_multiple_of_pi(config.theta());
    let snapped = config.with_theta(k as f64 * PI)?;
    reference_states(&snapped)?
        .into_iter()
        .filter(|r| r.symmetry == class && !r.superradiant)
        .min_by(|a, b| a.probe_decay_rate.total_cmp(&b.probe_decay_rate))
        .map(|r| r.state)
        .ok_or_else(|| {
            Error::NoSuchState(format!(
                "N = {} has no {class} subradiant mode near {k}π",
                config.n()
            ))
        })
}

/// Side-by-side comparison of the two storage strategies.
///
/// Both strategies prepare the ideal state of the configured chain and let
/// it evolve under the chain with θ shifted by `perturbation`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub config: ChainConfig,
    pub perturbed_config: ChainConfig,
    /// Globally slowest mode of the perturbed chain.
    pub optimal_mode: DecayMode,
    /// Slowest mode of the protected class of the perturbed chain.
    pub protected_best: DecayMode,
    pub superradiant_mode: DecayMode,
    pub optimal_preparation: QubitState,
    pub protected_preparation: QubitState,
    pub superradiant_overlap_optimal: f64,
    pub superradiant_overlap_protected: f64,
    pub storage_time_optimal: f64,
    pub storage_time_protected: f64,
}

impl StrategyReport {
    pub fn storage_time_ratio(&self) -> f64 {
        self.storage_time_optimal / self.storage_time_protected
    }
}

pub fn compare_strategies(
    config: &ChainConfig,
    threshold: f64,
    perturbation: f64,
) -> Result<StrategyReport> {
    let perturbed = config.with_theta(config.theta() + perturbation)?;
    let optimal_mode = optimal_storage_state(&perturbed)?;
    let protected_best = symmetry_protected_best(&perturbed)?;
    let decomposition = decompose_config(&perturbed)?;
    let superradiant_mode = decomposition.superradiant().clone();

    let references = reference_states(config)?;
    let optimal_preparation = closest_reference(&references, &optimal_mode);
    let protected_preparation = closest_reference(&references, &protected_best);

    Ok(StrategyReport {
        config: *config,
        perturbed_config: perturbed,
        superradiant_overlap_optimal: superradiant_overlap(&optimal_preparation, &decomposition)?,
        superradiant_overlap_protected: superradiant_overlap(
            &protected_preparation,
            &decomposition,
        )?,
        storage_time_optimal: storage_time(&optimal_preparation, &perturbed, threshold)?,
        storage_time_protected: storage_time(&protected_preparation, &perturbed, threshold)?,
        optimal_mode,
        protected_best,
        superradiant_mode,
        optimal_preparation,
        protected_preparation,
    })
}

/// Ideal state of the same parity with the largest overlap with `target`.
fn closest_reference(references: &[ReferenceState], target: &DecayMode) -> QubitState {
    let overlap =
        |r: &ReferenceState| linalg::inner(r.state.amplitudes(), &target.eigenvector).norm();
    let same_class = references.iter().filter(|r| r.symmetry == target.symmetry);
    same_class
        .clone()
        .chain(
            references
                .iter()
                .filter(|_| same_class.clone().next().is_none()),
        )
        .max_by(|a, b| overlap(a).total_cmp(&overlap(b)))
        .map(|r| r.state.clone())
        .expect("reference set is never empty")
}
