//! Protocol layer: verify deterministic harvesting for a source ensemble,
//! find optimal stopping times, and run the decomposition-invariance,
//! convex-closure, superposition-closure, robustness, and entropy-cycle
//! checks with machine-readable reports.

use serde::Serialize;

use crate::dynamics::{
    build_hamiltonian, Channel, ChannelSet, HamiltonianSpec, JointPropagator, TimeGrid, TimeSeries,
};
use crate::error::{Error, Result};
use crate::fock::{mix, superposition_ensemble, SourceEnsemble};
use crate::linalg::{
    eig_hermitian, partial_trace_a, qubit_ground, tensor_density, ComplexMatrix, DensityMatrix,
    EigenSystem, StateVector,
};
use crate::measures::{
    hs_distance, relative_entropy, smooth, von_neumann_entropy, DEFAULT_SMOOTHING,
};
use crate::wigner::{wigner, wigner_l2_distance, WignerConfig};

/// Deviation allowed when two mixtures must realize the same state.
pub const DECOMPOSITION_DISTANCE_TOL: f64 = 1e-10;
/// Deviation allowed between reduced trajectories of equal mixtures.
pub const TRAJECTORY_DEVIATION_TOL: f64 = 1e-9;
/// Deviation allowed by the fidelity-affinity identity.
pub const AFFINITY_TOL: f64 = 1e-10;
/// Slack on the data-processing inequality.
pub const DPI_SLACK: f64 = 1e-9;
/// Joint-entropy drift allowed over a unitary run.
pub const JOINT_ENTROPY_TOL: f64 = 1e-8;
/// Default threshold below 1 at which harvesting counts as achieved.
pub const DEFAULT_DEH_TOLERANCE: f64 = 1e-3;

/// Result of a deterministic-harvesting verification at one stopping time.
#[derive(Debug, Clone, Serialize)]
pub struct DehReport {
    pub tau: f64,
    pub per_member_fidelity: Vec<f64>,
    pub min_fidelity: f64,
    pub achieved: bool,
    pub tolerance: f64,
}

impl DehReport {
    fn new(tau: f64, per_member_fidelity: Vec<f64>, tolerance: f64) -> Self {
        let min_fidelity = per_member_fidelity
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Self {
            tau,
            per_member_fidelity,
            min_fidelity,
            achieved: min_fidelity >= 1.0 - tolerance,
            tolerance,
        }
    }
}

/// Result of comparing two decompositions of one mixed source.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    /// Max over sampled times of the Hilbert-Schmidt distance between the
    /// ensemble-averaged reduced trajectories; infinite when the
    /// decompositions do not realize the same state and no propagation ran.
    pub max_trajectory_deviation: f64,
    pub decomposition_distance: f64,
    pub passed: bool,
}

/// One row of a robustness sweep.
#[derive(Debug, Clone, Serialize)]
pub struct RobustnessRecord {
    pub hs_in: f64,
    pub hs_out_max: f64,
    /// ||W_B1(t_end) - W_B2(t_end)||_2 of the reduced field states.
    pub wigner_lhs: f64,
    /// (1/sqrt(2 pi)) ||W_B1(0) - W_B2(0)||_2.
    pub wigner_rhs: f64,
    pub rel_entropy_in: f64,
    pub rel_entropy_out_max: f64,
}

/// Entropy trajectory plus the return point of the harvester entropy.
#[derive(Debug, Clone)]
pub struct EntropyCycleReport {
    pub series: TimeSeries,
    /// Minimum of S_A over t > 0.
    pub min_return_entropy: f64,
    /// Time of that minimum.
    pub return_time: f64,
}

fn ground_state() -> DensityMatrix {
    DensityMatrix::from_pure(&qubit_ground())
}

/// Member propagators sharing one Hamiltonian eigendecomposition.
struct EnsembleRun {
    props: Vec<(f64, JointPropagator)>,
    dim_b: usize,
}

impl EnsembleRun {
    fn new(ensemble: &SourceEnsemble, spec: &HamiltonianSpec) -> Result<Self> {
        spec.validate()?;
        let declared = spec.field_space().ok_or_else(|| Error::InvalidSpec {
            reason: "harvesting checks need a field kind".into(),
        })?;
        if ensemble.dim() != declared.dim() {
            return Err(Error::Dimension {
                context: "ensemble vs Hamiltonian field space",
                expected: declared.dim(),
                actual: ensemble.dim(),
            });
        }
        let working = spec.working_space().expect("field kind");
        let pad = working.dim() - declared.dim();
        let h = build_hamiltonian(spec)?;
        let h = h.constant().expect("field kinds are constant");
        let eig = eig_hermitian(h)?;
        let ground = ground_state();
        let props = ensemble
            .members()
            .iter()
            .map(|(w, rho_b)| {
                let leakage = crate::fock::truncation_check(rho_b, declared);
                if leakage > crate::fock::RUNNER_LEAKAGE_LIMIT {
                    return Err(Error::TruncationLeakage {
                        leakage,
                        limit: crate::fock::RUNNER_LEAKAGE_LIMIT,
                    });
                }
                let rho_b = if pad > 0 { rho_b.pad(pad) } else { rho_b.clone() };
                let joint0 = tensor_density(&ground, &rho_b);
                Ok((*w, JointPropagator::from_eig(eig.clone(), &joint0)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            props,
            dim_b: working.dim(),
        })
    }

    fn member_fidelities(&self, t: f64) -> Vec<f64> {
        self.props
            .iter()
            .map(|(_, p)| p.excited_population_at(t))
            .collect()
    }

    fn min_fidelity(&self, t: f64) -> f64 {
        self.member_fidelities(t)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Ensemble-averaged reduced state sum_i p_i rho_A^i(t).
    fn averaged_reduced(&self, t: f64) -> DensityMatrix {
        let mut acc = ComplexMatrix::zeros(2, 2);
        for (w, p) in &self.props {
            acc += p.reduced_at(t).matrix().scale(*w);
        }
        DensityMatrix::symmetrized(acc).expect("convex combination of reduced states")
    }
}

/// Evolves the ground-state harvester with every ensemble member separately
/// and evaluates the fidelity to |e> at the stopping time `tau`.
pub fn verify_deh(
    ensemble: &SourceEnsemble,
    spec: &HamiltonianSpec,
    tau: f64,
    tolerance: f64,
) -> Result<DehReport> {
    let run = EnsembleRun::new(ensemble, spec)?;
    Ok(DehReport::new(tau, run.member_fidelities(tau), tolerance))
}

/// Maximizes t -> min_i fidelity_i(t) over the window: a coarse scan on the
/// grid picks the earliest maximizer, then golden-section refinement on the
/// surrounding bracket narrows it to |dt| <= 1e-6/g. The returned objective
/// is never worse than the coarse scan's.
pub fn find_optimal_tau(
    ensemble: &SourceEnsemble,
    spec: &HamiltonianSpec,
    window: &TimeGrid,
) -> Result<(f64, f64)> {
    window.validate()?;
    let run = EnsembleRun::new(ensemble, spec)?;
    let objective = |t: f64| run.min_fidelity(t);

    let mut best_t = window.t_start;
    let mut best_f = f64::NEG_INFINITY;
    for t in window.times() {
        let f = objective(t);
        if f > best_f {
            best_f = f;
            best_t = t;
        }
    }

    let h = window.step();
    let mut lo = (best_t - h).max(window.t_start);
    let mut hi = (best_t + h).min(window.t_end);
    let tol = 1e-6 / spec.coupling();
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    let mid = (lo + hi) / 2.0;
    let f_mid = objective(mid);
    if f_mid > best_f {
        Ok((mid, f_mid))
    } else {
        Ok((best_t, best_f))
    }
}

/// Compares the ensemble-averaged reduced trajectories of two decompositions
/// that are meant to realize the same mixed source. If the realized mixtures
/// differ by more than [`DECOMPOSITION_DISTANCE_TOL`] no propagation runs
/// and the report fails with an infinite trajectory deviation.
pub fn decomposition_invariance_check(
    decomp_a: &SourceEnsemble,
    decomp_b: &SourceEnsemble,
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
) -> Result<InvarianceReport> {
    grid.validate()?;
    let decomposition_distance = hs_distance(&mix(decomp_a), &mix(decomp_b))?;
    if decomposition_distance > DECOMPOSITION_DISTANCE_TOL {
        return Ok(InvarianceReport {
            max_trajectory_deviation: f64::INFINITY,
            decomposition_distance,
            passed: false,
        });
    }
    let run_a = EnsembleRun::new(decomp_a, spec)?;
    let run_b = EnsembleRun::new(decomp_b, spec)?;
    let mut max_dev: f64 = 0.0;
    for t in grid.times() {
        let dev = hs_distance(&run_a.averaged_reduced(t), &run_b.averaged_reduced(t))?;
        max_dev = max_dev.max(dev);
    }
    Ok(InvarianceReport {
        max_trajectory_deviation: max_dev,
        decomposition_distance,
        passed: max_dev <= TRAJECTORY_DEVIATION_TOL,
    })
}

/// For each weight vector over the ensemble's member states, verifies
/// harvesting of the re-weighted mixed source and checks the affinity
/// identity: the mixture's fidelity must equal the weight-average of the
/// member fidelities to within [`AFFINITY_TOL`].
pub fn convex_closure_check(
    members: &SourceEnsemble,
    weights_grid: &[Vec<f64>],
    spec: &HamiltonianSpec,
    tau: f64,
    tolerance: f64,
) -> Result<Vec<DehReport>> {
    let run = EnsembleRun::new(members, spec)?;
    let member_fidelities = run.member_fidelities(tau);
    let mut reports = Vec::with_capacity(weights_grid.len());
    for weights in weights_grid {
        if weights.len() != members.len() {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "weight vector length {} does not match member count {}",
                    weights.len(),
                    members.len()
                ),
            });
        }
        let reweighted = SourceEnsemble::new(
            weights
                .iter()
                .zip(members.members())
                .map(|(w, (_, state))| (*w, state.clone()))
                .collect(),
            format!("{}-reweighted", members.label()),
        )?;
        let mixture = SourceEnsemble::single(mix(&reweighted), reweighted.label());
        let mixture_run = EnsembleRun::new(&mixture, spec)?;
        let mixture_fidelity = mixture_run.min_fidelity(tau);
        let averaged: f64 = weights
            .iter()
            .zip(&member_fidelities)
            .map(|(w, f)| w * f)
            .sum();
        let affinity_dev = (mixture_fidelity - averaged).abs();
        if affinity_dev > AFFINITY_TOL {
            return Err(Error::CheckFailed {
                check: "fidelity affinity",
                deviation: affinity_dev,
                limit: AFFINITY_TOL,
            });
        }
        reports.push(DehReport::new(tau, vec![mixture_fidelity], tolerance));
    }
    Ok(reports)
}

/// Builds the sign-pattern superposition ensemble of the given states,
/// checks it reproduces the base mixture sum_k |a_k|^2 |phi_k><phi_k|, and
/// reports the per-superposition fidelities at `tau` together with the
/// affinity identity against that base mixture.
pub fn superposition_closure_check(
    states: &[StateVector],
    amplitudes: &[num_complex::Complex64],
    spec: &HamiltonianSpec,
    tau: f64,
    tolerance: f64,
) -> Result<DehReport> {
    let ensemble = superposition_ensemble(states, amplitudes)?;
    // reconstruction identity, entrywise
    let realized = mix(&ensemble);
    let dim = states[0].dim();
    let mut base = ComplexMatrix::zeros(dim, dim);
    for (s, a) in states.iter().zip(amplitudes) {
        base += DensityMatrix::from_pure(s).matrix().scale(a.norm_sqr());
    }
    let recon_dev = (realized.matrix() - &base)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if recon_dev > 1e-12 {
        return Err(Error::CheckFailed {
            check: "superposition mixture reconstruction",
            deviation: recon_dev,
            limit: 1e-12,
        });
    }

    let run = EnsembleRun::new(&ensemble, spec)?;
    let fidelities = run.member_fidelities(tau);

    // affinity against the realized mixture, evolved as a single state
    let mixture_run = EnsembleRun::new(
        &SourceEnsemble::single(realized, ensemble.label()),
        spec,
    )?;
    let mixture_fidelity = mixture_run.min_fidelity(tau);
    let averaged: f64 = ensemble
        .members()
        .iter()
        .zip(&fidelities)
        .map(|((w, _), f)| w * f)
        .sum();
    let affinity_dev = (mixture_fidelity - averaged).abs();
    if affinity_dev > AFFINITY_TOL {
        return Err(Error::CheckFailed {
            check: "fidelity affinity",
            deviation: affinity_dev,
            limit: AFFINITY_TOL,
        });
    }
    Ok(DehReport::new(tau, fidelities, tolerance))
}

/// Sweeps perturbed sources against a base source. Both states of each pair
/// are smoothed with eta = [`DEFAULT_SMOOTHING`] and used as the actual
/// sources, so the data-processing inequality
/// `S(rho_A1(t) || rho_A2(t)) <= S(rho_B1 || rho_B2)` is exact; it is
/// asserted at every sample within [`DPI_SLACK`] (qubit outputs are smoothed
/// the same way before the entropy, which only lowers the left side). The
/// phase-space inequality `||W_B1(t_end) - W_B2(t_end)||_2 <=
/// (1/sqrt(2 pi)) ||W_B1(0) - W_B2(0)||_2` is recorded, not asserted.
pub fn robustness_sweep(
    base: &DensityMatrix,
    perturbations: &[DensityMatrix],
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
    wigner_config: &WignerConfig,
) -> Result<Vec<RobustnessRecord>> {
    grid.validate()?;
    spec.validate()?;
    let declared = spec.field_space().ok_or_else(|| Error::InvalidSpec {
        reason: "robustness sweep needs a field kind".into(),
    })?;
    if base.dim() != declared.dim() {
        return Err(Error::Dimension {
            context: "robustness base state",
            expected: declared.dim(),
            actual: base.dim(),
        });
    }
    let working = spec.working_space().expect("field kind");
    let h = build_hamiltonian(spec)?;
    let h = h.constant().expect("field kinds are constant");
    let eig = eig_hermitian(h)?;
    let ground = ground_state();

    let prepare = |rho: &DensityMatrix| -> Result<(DensityMatrix, JointPropagator)> {
        let smoothed = smooth(rho, DEFAULT_SMOOTHING);
        let padded = if working.dim() > smoothed.dim() {
            smoothed.pad(working.dim() - smoothed.dim())
        } else {
            smoothed.clone()
        };
        let joint = tensor_density(&ground, &padded);
        Ok((smoothed, JointPropagator::from_eig(eig.clone(), &joint)?))
    };

    let (base_smoothed, base_prop) = prepare(base)?;
    let eta = DEFAULT_SMOOTHING;
    let base_wigner_in = wigner(&embed_for_wigner(&base_smoothed, wigner_config)?, wigner_config)?;

    let mut records = Vec::with_capacity(perturbations.len());
    for perturbed in perturbations {
        if perturbed.dim() != declared.dim() {
            return Err(Error::Dimension {
                context: "robustness perturbation",
                expected: declared.dim(),
                actual: perturbed.dim(),
            });
        }
        let (pert_smoothed, pert_prop) = prepare(perturbed)?;
        let hs_in = hs_distance(&base_smoothed, &pert_smoothed)?;
        let rel_entropy_in = relative_entropy(&base_smoothed, &pert_smoothed)?;

        let mut hs_out_max: f64 = 0.0;
        let mut rel_out_max: f64 = 0.0;
        for t in grid.times() {
            let a1 = base_prop.reduced_at(t);
            let a2 = pert_prop.reduced_at(t);
            hs_out_max = hs_out_max.max(hs_distance(&a1, &a2)?);
            let rel = relative_entropy(&smooth(&a1, eta), &smooth(&a2, eta))?;
            rel_out_max = rel_out_max.max(rel);
        }
        if rel_out_max > rel_entropy_in + DPI_SLACK {
            return Err(Error::CheckFailed {
                check: "data-processing inequality",
                deviation: rel_out_max - rel_entropy_in,
                limit: DPI_SLACK,
            });
        }

        // phase-space record at the final time
        let pert_wigner_in =
            wigner(&embed_for_wigner(&pert_smoothed, wigner_config)?, wigner_config)?;
        let eps = wigner_l2_distance(&base_wigner_in, &pert_wigner_in)?;
        let b1_out = partial_trace_a(&base_prop.joint_at(grid.t_end), 2, working.dim())?;
        let b2_out = partial_trace_a(&pert_prop.joint_at(grid.t_end), 2, working.dim())?;
        let w1_out = wigner(&embed_for_wigner(&b1_out, wigner_config)?, wigner_config)?;
        let w2_out = wigner(&embed_for_wigner(&b2_out, wigner_config)?, wigner_config)?;
        let wigner_lhs = wigner_l2_distance(&w1_out, &w2_out)?;
        let wigner_rhs = eps / (2.0 * std::f64::consts::PI).sqrt();

        records.push(RobustnessRecord {
            hs_in,
            hs_out_max,
            wigner_lhs,
            wigner_rhs,
            rel_entropy_in,
            rel_entropy_out_max: rel_out_max,
        });
    }
    Ok(records)
}

/// Pads a field state so corner displacements of the Wigner grid stay well
/// inside the ladder: the displaced support estimate
/// (sqrt(n_support) + |beta|_max)^2 plus a five-sigma margin must fit.
fn embed_for_wigner(rho: &DensityMatrix, config: &WignerConfig) -> Result<DensityMatrix> {
    let beta_max = {
        let q = config.q_min.abs().max(config.q_max.abs());
        let p = config.p_min.abs().max(config.p_max.abs());
        ((q * q + p * p) / 2.0).sqrt()
    };
    // support level holding all but 1e-9 of the population
    let mut cum = 0.0;
    let mut n_support = 0usize;
    for n in 0..rho.dim() {
        cum += rho.population(n);
        if cum >= 1.0 - 1e-9 {
            n_support = n;
            break;
        }
        n_support = n;
    }
    let reach = ((n_support as f64).sqrt() + beta_max).powi(2);
    let needed = (reach + 5.0 * reach.sqrt()).ceil() as usize + 1;
    if needed > rho.dim() {
        Ok(rho.pad(needed - rho.dim()))
    } else {
        Ok(rho.clone())
    }
}

/// Propagates the source and records all three entropy channels; the joint
/// entropy must stay constant to within [`JOINT_ENTROPY_TOL`]. Reports the
/// minimum of S_A over t > 0 and its time (the entropy "return" point).
pub fn entropy_cycle(
    rho_b: &DensityMatrix,
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
) -> Result<EntropyCycleReport> {
    let series = crate::dynamics::propagate_bipartite(
        &ground_state(),
        rho_b,
        spec,
        grid,
        ChannelSet::entropies(),
    )?;
    let s_ab = series
        .channel(Channel::EntropyJoint)
        .expect("joint entropy requested");
    let s0 = s_ab[0];
    for &s in s_ab {
        if (s - s0).abs() > JOINT_ENTROPY_TOL {
            return Err(Error::CheckFailed {
                check: "joint entropy conservation",
                deviation: (s - s0).abs(),
                limit: JOINT_ENTROPY_TOL,
            });
        }
    }
    let s_a = series
        .channel(Channel::EntropyQubit)
        .expect("qubit entropy requested");
    let mut min_return_entropy = f64::INFINITY;
    let mut return_time = grid.t_end;
    for (t, &s) in grid.times().zip(s_a).skip(1) {
        if s < min_return_entropy {
            min_return_entropy = s;
            return_time = t;
        }
    }
    Ok(EntropyCycleReport {
        series,
        min_return_entropy,
        return_time,
    })
}

/// Convenience: S(rho_AB) of the initial product state, used by entropy
/// scenarios for reference lines.
pub fn initial_joint_entropy(rho_b: &DensityMatrix) -> f64 {
    von_neumann_entropy(rho_b)
}
