//! Time evolution of single-excitation qubit amplitudes,
//! α̇ = −(γ₀/2)·J·α.
//!
//! Two independent routes: modal expansion in the eigenvectors of J
//! ([`evolve_eigen`]) and fixed-step classical RK4 ([`evolve_ode`]). The
//! second works at any θ, including the singular points θ = kπ.

use crate::coupling::{build_coupling_matrix, ChainConfig, CouplingMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::spectral::{decompose_config, SpectralDecomposition};

/// Expansions above this eigenvector condition number are refused.
pub const MAX_EXPANSION_CONDITION: f64 = 1e12;
pub const MAX_EXPANSION_RESIDUAL: f64 = 1e-8;

/// Storage-time search gives up (returns +∞) past this many 1/γ₀.
pub const STORAGE_TIME_HORIZON: f64 = 1e6;
const STORAGE_SAMPLES: usize = 1000;
const STORAGE_REL_TOL: f64 = 1e-6;

/// Amplitudes α_1…α_N over the single-excitation basis |e_j⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    amplitudes: Vec<C64>,
}

impl QubitState {
    /// Accepts any state with Σ|α_j|² ≤ 1 (within 1e-12).
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("state has no amplitudes".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let p = linalg::norm_sqr(&amplitudes);
        if p > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!(
                "total probability {p} exceeds 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// |e_j⟩ with 1-based `j`.
    pub fn single(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::InvalidState(format!(
                "qubit index {j} outside 1..={n}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); n];
        amplitudes[j - 1] = C64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        linalg::norm_sqr(&self.amplitudes)
    }
}

/// x with V·x = α₀, V the eigenvector matrix in mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    pub coefficients: Vec<C64>,
    /// ‖V·x − α₀‖₂
    pub residual: f64,
}

/// Sampled evolution. Times are in units where γ₀ carries its own units.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// `amplitudes[t][j]` = α_j(times[t])
    pub amplitudes: Vec<Vec<C64>>,
    pub per_qubit_probability: Vec<Vec<f64>>,
    pub total_probability: Vec<f64>,
}

impl EvolutionTrace {
    fn from_amplitudes(times: Vec<f64>, amplitudes: Vec<Vec<C64>>) -> Self {
        let per_qubit_probability: Vec<Vec<f64>> = amplitudes
            .iter()
            .map(|a| a.iter().map(|z| z.norm_sqr()).collect())
            .collect();
        let total_probability = per_qubit_probability
            .iter()
            .map(|p| p.iter().sum())
            .collect();
        Self {
            times,
            amplitudes,
            per_qubit_probability,
            total_probability,
        }
    }

    /// max over samples of ‖α_self(t) − α_other(t)‖₂.
    pub fn max_amplitude_deviation(&self, other: &EvolutionTrace) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| linalg::distance(a, b))
            .fold(0.0, f64::max)
    }
}

fn check_state(state: &QubitState, n: usize) -> Result<()> {
    if state.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: state.len(),
        });
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimes("no sample times".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimes("non-finite sample time".into()));
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidTimes(format!(
            "first time {} is negative",
            times[0]
        )));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidTimes("sample times must be ascending".into()));
    }
    Ok(())
}

pub fn expand_in_modes(
    state: &QubitState,
    decomp: &SpectralDecomposition,
) -> Result<ModeCoefficients> {
    check_state(state, decomp.config().n())?;
    let condition = decomp.eigenvector_condition();
    if condition.is_nan() || condition >= MAX_EXPANSION_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let v = decomp.eigenvector_matrix();
    let coefficients = linalg::solve(&v, state.amplitudes());
    let residual = linalg::distance(&v.mul_vec(&coefficients), state.amplitudes());
    if residual.is_nan() || residual >= MAX_EXPANSION_RESIDUAL {
        return Err(Error::ExpansionInaccurate { residual });
    }
    Ok(ModeCoefficients {
        coefficients,
        residual,
    })
}

/// α(t) = Σ_k x_k ξ^{(k)} e^{−γ₀λ_k t/2}
pub fn evolve_eigen(
    state: &QubitState,
    decomp: &SpectralDecomposition,
    times: &[f64],
) -> Result<EvolutionTrace> {
    check_times(times)?;
    let expansion = expand_in_modes(state, decomp)?;
    let evaluator = ModalEvaluator::new(decomp, &expansion);
    let amplitudes = times.iter().map(|&t| evaluator.amplitudes(t)).collect();
    Ok(EvolutionTrace::from_amplitudes(times.to_vec(), amplitudes))
}

struct ModalEvaluator<'a> {
    decomp: &'a SpectralDecomposition,
    coefficients: &'a [C64],
}

impl<'a> ModalEvaluator<'a> {
    fn new(decomp: &'a SpectralDecomposition, expansion: &'a ModeCoefficients) -> Self {
        Self {
            decomp,
            coefficients: &expansion.coefficients,
        }
    }

    fn amplitudes(&self, t: f64) -> Vec<C64> {
        let n = self.decomp.config().n();
        let half_rate = -0.5 * self.decomp.config().gamma0() * t;
        let mut alpha = vec![C64::new(0.0, 0.0); n];
        for (mode, x) in self.decomp.modes().iter().zip(self.coefficients) {
            let weight = x * (mode.eigenvalue * half_rate).exp();
            alpha
                .iter_mut()
                .zip(&mode.eigenvector)
                .for_each(|(a, v)| *a += weight * v);
        }
        alpha
    }
}

/// Default RK4 step bound, 0.01/(γ₀N).
pub fn default_step_limit(config: &ChainConfig) -> f64 {
    0.01 / (config.gamma0() * config.n() as f64)
}

/// Integrates with classical RK4. The internal step is
/// h = min(0.01/(γ₀N), Δt_min/4) and each sample time is hit exactly.
pub fn evolve_ode(
    state: &QubitState,
    j: &CouplingMatrix,
    config: &ChainConfig,
    times: &[f64],
) -> Result<EvolutionTrace> {
    evolve_ode_with_step_limit(state, j, config, times, default_step_limit(config))
}

/// [`evolve_ode`] with a caller-chosen upper bound on the internal step
/// (still capped by Δt_min/4).
pub fn evolve_ode_with_step_limit(
    state: &QubitState,
    j: &CouplingMatrix,
    config: &ChainConfig,
    times: &[f64],
    step_limit: f64,
) -> Result<EvolutionTrace> {
    check_times(times)?;
    check_state(state, config.n())?;
    if j.dim() != config.n() {
        return Err(Error::DimensionMismatch {
            expected: config.n(),
            actual: j.dim(),
        });
    }
    let min_gap = std::iter::once(0.0)
        .chain(times.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let h_max = step_limit.min(min_gap / 4.0);

    let generator = j.as_matrix().scale(C64::new(-0.5 * config.gamma0(), 0.0));
    let mut alpha = state.amplitudes().to_vec();
    let mut now = 0.0;
    let mut amplitudes = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            let steps = (span / h_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                alpha = rk4_step(&generator, &alpha, h);
            }
            now = t;
        }
        amplitudes.push(alpha.clone());
    }
    Ok(EvolutionTrace::from_amplitudes(times.to_vec(), amplitudes))
}

fn rk4_step(a: &CMatrix, y: &[C64], h: f64) -> Vec<C64> {
    let axpy = |base: &[C64], k: &[C64], s: f64| -> Vec<C64> {
        base.iter().zip(k).map(|(b, k)| b + k * s).collect()
    };
    let k1 = a.mul_vec(y);
    let k2 = a.mul_vec(&axpy(y, &k1, h / 2.0));
    let k3 = a.mul_vec(&axpy(y, &k2, h / 2.0));
    let k4 = a.mul_vec(&axpy(y, &k3, h));
    y.iter()
        .enumerate()
        .map(|(i, yi)| yi + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

/// One RK4 step as a matrix, I + hA + (hA)²/2 + (hA)³/6 + (hA)⁴/24.
fn rk4_step_matrix(a: &CMatrix, h: f64) -> CMatrix {
    let n = a.dim();
    let ha = a.scale(C64::new(h, 0.0));
    let mut term = CMatrix::identity(n);
    let mut sum = CMatrix::identity(n);
    for order in 1..=4 {
        term = term.matmul(&ha).scale(C64::new(1.0 / order as f64, 0.0));
        sum = sum.add(&term);
    }
    sum
}

fn matrix_power(m: &CMatrix, mut exp: u64) -> CMatrix {
    let mut base = m.clone();
    let mut acc = CMatrix::identity(m.dim());
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.matmul(&base);
        }
        exp >>= 1;
        if exp > 0 {
            base = base.matmul(&base);
        }
    }
    acc
}

/// Total probability as a function of time, by whichever route applies.
enum ProbabilityCurve<'a> {
    Modal(ModalEvaluator<'a>),
    /// RK4 propagator raised to the step count; used when J has no usable
    /// eigenbasis. Lets the search reach t ~ 10⁶/γ₀ in O(log t) products.
    Propagated {
        generator: CMatrix,
        step_limit: f64,
        initial: Vec<C64>,
    },
}

impl ProbabilityCurve<'_> {
    fn at(&self, t: f64) -> f64 {
        match self {
            ProbabilityCurve::Modal(eval) => linalg::norm_sqr(&eval.amplitudes(t)),
            ProbabilityCurve::Propagated {
                generator,
                step_limit,
                initial,
            } => {
                if t <= 0.0 {
                    return linalg::norm_sqr(initial);
                }
                let steps = (t / step_limit).ceil().max(1.0);
                let step = rk4_step_matrix(generator, t / steps);
                linalg::norm_sqr(&matrix_power(&step, steps as u64).mul_vec(initial))
            }
        }
    }
}

/// First time at which the total excitation probability drops to
/// `threshold` times its initial value, or +∞ if that does not happen before
/// t = 10⁶/γ₀.
///
/// The search samples 1000 points over a window that doubles from 1/γ₀ and
/// refines the first bracketing interval by bisection.
pub fn storage_time(state: &QubitState, config: &ChainConfig, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    check_state(state, config.n())?;
    let initial = state.total_probability();
    if initial <= 0.0 {
        return Err(Error::InvalidState("state carries no excitation".into()));
    }

    let decomposition = decompose_config(config).ok();
    let expansion = decomposition
        .as_ref()
        .and_then(|d| expand_in_modes(state, d).ok());
    let curve = match (&decomposition, &expansion) {
        (Some(d), Some(x)) => ProbabilityCurve::Modal(ModalEvaluator::new(d, x)),
        _ => ProbabilityCurve::Propagated {
            generator: build_coupling_matrix(config)
                .as_matrix()
                .scale(C64::new(-0.5 * config.gamma0(), 0.0)),
            step_limit: default_step_limit(config),
            initial: state.amplitudes().to_vec(),
        },
    };
    let below = |t: f64| curve.at(t) <= threshold * initial;

    let horizon = STORAGE_TIME_HORIZON / config.gamma0();
    let mut start = 0.0;
    let mut end = 1.0 / config.gamma0();
    while start < horizon {
        let width = end - start;
        let mut prev = start;
        for i in 1..=STORAGE_SAMPLES {
            let t = start + width * i as f64 / STORAGE_SAMPLES as f64;
            if below(t) {
                return Ok(bisect(&below, prev, t));
            }
            prev = t;
        }
        start = end;
        end *= 2.0;
    }
    Ok(f64::INFINITY)
}

/// Narrows [lo, hi] (predicate false at lo, true at hi) to relative width
/// `STORAGE_REL_TOL` and returns the upper end.
fn bisect(below: &impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > STORAGE_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
