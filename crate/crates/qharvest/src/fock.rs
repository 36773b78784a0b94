//! Field states and ensembles on a truncated Fock space: coherent states,
//! even/odd cat states, thermal states, mixtures, and sign-pattern
//! superposition ensembles.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, StateVector};

/// Admissible tail weight beyond the truncation when constructing states.
pub const CONSTRUCTION_LEAKAGE_TOL: f64 = 1e-8;
/// Top-of-ladder population at which scenario runners abort.
pub const RUNNER_LEAKAGE_LIMIT: f64 = 1e-6;
/// Largest accepted superposition family (2^m sign patterns).
pub const MAX_SUPERPOSITION_STATES: usize = 12;

/// Truncated Fock space keeping levels 0..=n_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

/// Annihilation operator on the truncated space: a|n> = sqrt(n)|n-1>.
pub fn annihilation(space: FockSpace) -> ComplexMatrix {
    let d = space.dim();
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Creation operator, the adjoint of [`annihilation`].
pub fn creation(space: FockSpace) -> ComplexMatrix {
    annihilation(space).adjoint()
}

/// Number operator a^dag a, diagonal (0, 1, ..., n_max).
pub fn number_operator(space: FockSpace) -> ComplexMatrix {
    let d = space.dim();
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Unnormalized coherent amplitudes c_n = exp(-|alpha|^2/2) alpha^n/sqrt(n!)
/// on the truncated ladder, plus the exact tail weight above n_max.
fn coherent_amplitudes(alpha: C64, space: FockSpace) -> (Vec<C64>, f64) {
    let d = space.dim();
    let mut c = Vec::with_capacity(d);
    let mut cur = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut kept = 0.0;
    for n in 0..d {
        if n > 0 {
            cur *= alpha / C64::new((n as f64).sqrt(), 0.0);
        }
        kept += cur.norm_sqr();
        c.push(cur);
    }
    (c, (1.0 - kept).max(0.0))
}

/// Coherent state |alpha>, renormalized after truncation. Fails when the
/// Poisson tail beyond the space exceeds [`CONSTRUCTION_LEAKAGE_TOL`].
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<StateVector> {
    let (c, leakage) = coherent_amplitudes(alpha, space);
    if leakage > CONSTRUCTION_LEAKAGE_TOL {
        return Err(Error::TruncationLeakage {
            leakage,
            limit: CONSTRUCTION_LEAKAGE_TOL,
        });
    }
    StateVector::normalized(c)
}

/// Photon-number parity of a cat state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatParity {
    Even,
    Odd,
}

/// Cat state (|alpha> +- |-alpha>) / sqrt(2(1 +- exp(-2|alpha|^2))), with
/// the exact normalization evaluated on the truncated space.
pub fn cat_state(alpha: C64, parity: CatParity, space: FockSpace) -> Result<StateVector> {
    let (cp, leak_p) = coherent_amplitudes(alpha, space);
    let (cm, leak_m) = coherent_amplitudes(-alpha, space);
    let leakage = leak_p.max(leak_m);
    if leakage > CONSTRUCTION_LEAKAGE_TOL {
        return Err(Error::TruncationLeakage {
            leakage,
            limit: CONSTRUCTION_LEAKAGE_TOL,
        });
    }
    let sign = match parity {
        CatParity::Even => 1.0,
        CatParity::Odd => -1.0,
    };
    let v: Vec<C64> = cp
        .iter()
        .zip(&cm)
        .map(|(p, m)| p + m * C64::new(sign, 0.0))
        .collect();
    StateVector::normalized(v).map_err(|_| Error::DegenerateState {
        what: "odd cat state with alpha = 0 is the zero vector",
    })
}

/// Thermal (Gibbs) state with mean photon number n_bar: diagonal weights
/// p_n = n_bar^n / (1 + n_bar)^(n+1), renormalized after truncation.
pub fn thermal_state(n_bar: f64, space: FockSpace) -> Result<DensityMatrix> {
    if !(n_bar >= 0.0) {
        return Err(Error::Domain {
            what: format!("thermal mean photon number must be >= 0, got {n_bar}"),
        });
    }
    let d = space.dim();
    let ratio = n_bar / (1.0 + n_bar);
    let tail = ratio.powi(d as i32);
    if tail > CONSTRUCTION_LEAKAGE_TOL {
        return Err(Error::TruncationLeakage {
            leakage: tail,
            limit: CONSTRUCTION_LEAKAGE_TOL,
        });
    }
    let mut p: Vec<f64> = Vec::with_capacity(d);
    let mut cur = 1.0 / (1.0 + n_bar);
    for _ in 0..d {
        p.push(cur);
        cur *= ratio;
    }
    let norm: f64 = p.iter().sum();
    let m = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(p[i] / norm, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix::symmetrized(m)
}

/// Mean photon number of a mode at inverse temperature beta (hbar = 1):
/// n_bar = 1 / (exp(beta omega_c) - 1).
pub fn nbar_from_beta(beta: f64, omega_c: f64) -> f64 {
    1.0 / ((beta * omega_c).exp() - 1.0)
}

/// Weighted list of field states realizing a mixed source.
#[derive(Debug, Clone)]
pub struct SourceEnsemble {
    members: Vec<(f64, DensityMatrix)>,
    label: String,
}

/// Weight-sum tolerance for ensembles.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

impl SourceEnsemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>, label: impl Into<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidSpec {
                reason: "ensemble needs at least one member".into(),
            });
        }
        let dim = members[0].1.dim();
        let mut sum = 0.0;
        for (w, state) in &members {
            if *w < -WEIGHT_SUM_TOL {
                return Err(Error::NegativeWeight { weight: *w });
            }
            if state.dim() != dim {
                return Err(Error::Dimension {
                    context: "ensemble member",
                    expected: dim,
                    actual: state.dim(),
                });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum { sum });
        }
        Ok(Self {
            members,
            label: label.into(),
        })
    }

    /// Single-member ensemble with weight 1.
    pub fn single(state: DensityMatrix, label: impl Into<String>) -> Self {
        Self {
            members: vec![(1.0, state)],
            label: label.into(),
        }
    }

    /// Ensemble of pure states with the given weights.
    pub fn from_pure_states(
        members: Vec<(f64, StateVector)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::new(
            members
                .into_iter()
                .map(|(w, s)| (w, DensityMatrix::from_pure(&s)))
                .collect(),
            label,
        )
    }

    /// Equal-weight ensemble of pure states.
    pub fn uniform_pure(states: Vec<StateVector>, label: impl Into<String>) -> Result<Self> {
        let w = 1.0 / states.len() as f64;
        Self::from_pure_states(states.into_iter().map(|s| (w, s)).collect(), label)
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }
}

/// The realized mixture sum_i p_i rho_i.
pub fn mix(ensemble: &SourceEnsemble) -> DensityMatrix {
    let d = ensemble.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (w, state) in ensemble.members() {
        acc += state.matrix().scale(*w);
    }
    DensityMatrix::symmetrized(acc).expect("convex combination of density matrices")
}

/// Ensemble of sign-pattern superpositions |psi^(r)> ~ sum_k (-1)^{r_k} a_k
/// |phi_k> with weights N_r / 2^m. Averaging over all sign patterns cancels
/// every cross term, so the mixture reproduces sum_k |a_k|^2 |phi_k><phi_k|
/// exactly, for arbitrary (also non-orthogonal) inputs.
///
/// Patterns are canonicalized on the first non-negligible amplitude, which
/// merges each pattern with its global-sign twin; zero-norm patterns carry
/// zero weight and are dropped.
pub fn superposition_ensemble(
    states: &[StateVector],
    amplitudes: &[C64],
) -> Result<SourceEnsemble> {
    let m = states.len();
    if m == 0 || m != amplitudes.len() {
        return Err(Error::InvalidSpec {
            reason: format!(
                "superposition needs matching nonempty state/amplitude lists, got {m} states and {} amplitudes",
                amplitudes.len()
            ),
        });
    }
    if m > MAX_SUPERPOSITION_STATES {
        return Err(Error::TooManyStates {
            count: m,
            max: MAX_SUPERPOSITION_STATES,
        });
    }
    let dim = states[0].dim();
    for s in states {
        if s.dim() != dim {
            return Err(Error::Dimension {
                context: "superposition state",
                expected: dim,
                actual: s.dim(),
            });
        }
    }
    let sum_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (sum_sq - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::AmplitudeNorm { sum_sq });
    }

    // fix the sign of the first non-negligible amplitude to +, halving the
    // pattern count without changing the realized mixture
    let anchor = amplitudes
        .iter()
        .position(|a| a.norm_sqr() > 1e-14)
        .unwrap_or(0);
    let patterns: usize = 1 << m;
    let mut members = Vec::new();
    let mut dropped_weight = 0.0;
    for r in 0..patterns {
        if (r >> anchor) & 1 == 1 {
            continue;
        }
        let mut v = nalgebra::DVector::<C64>::zeros(dim);
        for (k, (state, amp)) in states.iter().zip(amplitudes).enumerate() {
            let sign = if (r >> k) & 1 == 1 { -1.0 } else { 1.0 };
            v.axpy(amp * C64::new(sign, 0.0), state.amplitudes(), C64::new(1.0, 0.0));
        }
        let norm_sq = v.norm_squared();
        // weight N_r / 2^m, doubled because the complementary pattern is merged
        let weight = norm_sq / (patterns / 2) as f64;
        if norm_sq <= 1e-14 {
            dropped_weight += weight;
            continue;
        }
        let state = StateVector::normalized(v.iter().copied().collect())?;
        members.push((weight, DensityMatrix::from_pure(&state)));
    }
    if members.is_empty() {
        return Err(Error::DegenerateState {
            what: "all superposition patterns have zero norm",
        });
    }
    // dropped patterns carry nearly-zero weight; fold the residue into the
    // first member so the ensemble invariant stays exact
    if dropped_weight > 0.0 {
        members[0].0 += dropped_weight;
    }
    SourceEnsemble::new(members, format!("superposition[{m}]"))
}

/// Population of the top two Fock levels; the error monitor for finite
/// truncation. Scenario runners abort above [`RUNNER_LEAKAGE_LIMIT`].
pub fn truncation_check(state: &DensityMatrix, space: FockSpace) -> f64 {
    let d = space.dim();
    debug_assert_eq!(state.dim(), d);
    if d < 2 {
        return state.population(d - 1);
    }
    state.population(d - 1) + state.population(d - 2)
}
