//! Hamiltonian construction and time evolution: the Jaynes-Cummings model
//! under the rotating wave approximation, the full Rabi model without it,
//! and the classically driven qubit, all with hbar = 1 and parameters in
//! units of the coupling g.
//!
//! Constant Hamiltonians are diagonalized once per scenario; every later
//! time sample costs O(n^2) for reduced-qubit quantities and O(n^3) only
//! when joint-state channels (S_B, S_AB) are requested.

use std::collections::BTreeMap;

use nalgebra::{DVector, Matrix2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockSpace};
use crate::linalg::{
    eig_hermitian, partial_trace_a, sigma_x, tensor, tensor_density, ComplexMatrix, DensityMatrix,
    EigenSystem,
};
use crate::measures::von_neumann_entropy;

/// Levels added above the configured truncation for full-Rabi runs, which
/// do not conserve excitation number.
pub const RABI_GUARD_LEVELS: usize = 10;
/// Convergence requirement for the time-dependent propagator: doubling the
/// substep count must move no sample of P_e by more than this.
pub const SEMICLASSICAL_CONVERGENCE_TOL: f64 = 1e-8;

/// Declarative description of the dynamics. Frequencies and couplings are
/// in units of g; omega0 is the qubit splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// H = (omega0/2)(|e><e| - |g><g|) + omega_c a^dag a
    ///   + g (sigma_+ a + sigma_- a^dag).
    JcRwa {
        omega0: f64,
        omega_c: f64,
        g: f64,
        n_max: usize,
    },
    /// Same free part with the non-rotating coupling
    /// g sigma_x (x) (a + a^dag).
    RabiFull {
        omega0: f64,
        omega_c: f64,
        g: f64,
        n_max: usize,
    },
    /// H(t) = (omega0/2)(|e><e| - |g><g|)
    ///      + 2 A cos(omega t + phase) sigma_x, qubit only.
    Semiclassical {
        omega0: f64,
        drive_amplitude: f64,
        /// Drive frequency; defaults to omega0 (resonance).
        #[serde(default)]
        drive_frequency: Option<f64>,
        #[serde(default)]
        phase: f64,
    },
}

impl HamiltonianSpec {
    /// Resonant Jaynes-Cummings spec with the crate-wide defaults
    /// omega0 = omega_c = 10 g, g = 1.
    pub fn jc_resonant(n_max: usize) -> Self {
        HamiltonianSpec::JcRwa {
            omega0: 10.0,
            omega_c: 10.0,
            g: 1.0,
            n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            HamiltonianSpec::JcRwa { g, n_max, .. }
            | HamiltonianSpec::RabiFull { g, n_max, .. } => {
                if !(g > 0.0) {
                    return Err(Error::InvalidSpec {
                        reason: format!("coupling g must be positive, got {g}"),
                    });
                }
                if n_max < 1 {
                    return Err(Error::InvalidSpec {
                        reason: "field kinds need n_max >= 1".into(),
                    });
                }
            }
            HamiltonianSpec::Semiclassical {
                drive_amplitude, ..
            } => {
                if drive_amplitude < 0.0 {
                    return Err(Error::InvalidSpec {
                        reason: format!("drive amplitude must be >= 0, got {drive_amplitude}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn coupling(&self) -> f64 {
        match *self {
            HamiltonianSpec::JcRwa { g, .. } | HamiltonianSpec::RabiFull { g, .. } => g,
            HamiltonianSpec::Semiclassical { .. } => 1.0,
        }
    }

    /// Field space declared in the spec (before any guard band).
    pub fn field_space(&self) -> Option<FockSpace> {
        match *self {
            HamiltonianSpec::JcRwa { n_max, .. } => Some(FockSpace::new(n_max)),
            HamiltonianSpec::RabiFull { n_max, .. } => Some(FockSpace::new(n_max)),
            HamiltonianSpec::Semiclassical { .. } => None,
        }
    }

    /// Field space the propagator actually uses: full-Rabi runs pad the
    /// ladder by [`RABI_GUARD_LEVELS`] because the coupling does not
    /// conserve excitation number.
    pub fn working_space(&self) -> Option<FockSpace> {
        match *self {
            HamiltonianSpec::JcRwa { n_max, .. } => Some(FockSpace::new(n_max)),
            HamiltonianSpec::RabiFull { n_max, .. } => {
                Some(FockSpace::new(n_max + RABI_GUARD_LEVELS))
            }
            HamiltonianSpec::Semiclassical { .. } => None,
        }
    }
}

/// Qubit splitting (omega0/2)(|e><e| - |g><g|) with |g> at index 0.
fn qubit_splitting(omega0: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = C64::new(-omega0 / 2.0, 0.0);
    m[(1, 1)] = C64::new(omega0 / 2.0, 0.0);
    m
}

/// A Hamiltonian ready for propagation: either a constant matrix or a
/// static part plus a cosine-modulated drive operator.
#[derive(Debug, Clone)]
pub enum BuiltHamiltonian {
    Constant(ComplexMatrix),
    Driven {
        h_static: ComplexMatrix,
        h_drive: ComplexMatrix,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
}

impl BuiltHamiltonian {
    pub fn at(&self, t: f64) -> ComplexMatrix {
        match self {
            BuiltHamiltonian::Constant(h) => h.clone(),
            BuiltHamiltonian::Driven {
                h_static,
                h_drive,
                amplitude,
                frequency,
                phase,
            } => h_static + h_drive.scale(2.0 * amplitude * (frequency * t + phase).cos()),
        }
    }

    pub fn constant(&self) -> Option<&ComplexMatrix> {
        match self {
            BuiltHamiltonian::Constant(h) => Some(h),
            BuiltHamiltonian::Driven { .. } => None,
        }
    }
}

/// Builds the Hamiltonian matrix (or static/drive pair) for a spec, on the
/// working space (including the full-Rabi guard band).
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<BuiltHamiltonian> {
    spec.validate()?;
    match *spec {
        HamiltonianSpec::JcRwa {
            omega0,
            omega_c,
            g,
            ..
        } => {
            let space = spec.working_space().expect("field kind");
            let a = fock::annihilation(space);
            let ad = fock::creation(space);
            let id_f = ComplexMatrix::identity(space.dim(), space.dim());
            let h = tensor(&qubit_splitting(omega0), &id_f)
                + tensor(&ComplexMatrix::identity(2, 2), &fock::number_operator(space))
                    .scale(omega_c)
                + (tensor(&crate::linalg::sigma_plus(), &a)
                    + tensor(&crate::linalg::sigma_minus(), &ad))
                .scale(g);
            Ok(BuiltHamiltonian::Constant(h))
        }
        HamiltonianSpec::RabiFull {
            omega0,
            omega_c,
            g,
            ..
        } => {
            let space = spec.working_space().expect("field kind");
            let a = fock::annihilation(space);
            let x = &a + a.adjoint();
            let h = tensor(&qubit_splitting(omega0), &ComplexMatrix::identity(space.dim(), space.dim()))
                + tensor(&ComplexMatrix::identity(2, 2), &fock::number_operator(space))
                    .scale(omega_c)
                + tensor(&sigma_x(), &x).scale(g);
            Ok(BuiltHamiltonian::Constant(h))
        }
        HamiltonianSpec::Semiclassical {
            omega0,
            drive_amplitude,
            drive_frequency,
            phase,
        } => Ok(BuiltHamiltonian::Driven {
            h_static: qubit_splitting(omega0),
            h_drive: sigma_x(),
            amplitude: drive_amplitude,
            frequency: drive_frequency.unwrap_or(omega0),
            phase,
        }),
    }
}

/// Uniform sampling grid over [t_start, t_end], in units of 1/g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, samples: usize) -> Result<Self> {
        let grid = Self {
            t_start,
            t_end,
            samples,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > self.t_start) || self.samples < 2 {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "time grid needs t_end > t_start and samples >= 2, got [{}, {}] x {}",
                    self.t_start, self.t_end, self.samples
                ),
            });
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.samples - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (0..self.samples).map(move |k| self.t_start + h * k as f64)
    }
}

/// Scalar channels a propagation can record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Channel {
    /// <e| rho_A |e>.
    ExcitedPopulation,
    /// Fidelity to the excited state; identical to `ExcitedPopulation` for
    /// the pure target |e>.
    Fidelity,
    /// S(rho_A) in nats.
    EntropyQubit,
    /// S(rho_B) in nats.
    EntropyField,
    /// S(rho_AB) in nats.
    EntropyJoint,
}

impl Channel {
    pub fn csv_name(&self) -> &'static str {
        match self {
            Channel::ExcitedPopulation => "P_e",
            Channel::Fidelity => "fidelity",
            Channel::EntropyQubit => "S_A",
            Channel::EntropyField => "S_B",
            Channel::EntropyJoint => "S_AB",
        }
    }
}

/// Which scalar channels to populate. The joint-state entropies force a
/// full O(n^3) reconstruction per sample; population channels are O(n^2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelSet {
    pub excited_population: bool,
    pub fidelity: bool,
    pub entropy_qubit: bool,
    pub entropy_field: bool,
    pub entropy_joint: bool,
}

impl ChannelSet {
    pub fn all() -> Self {
        Self {
            excited_population: true,
            fidelity: true,
            entropy_qubit: true,
            entropy_field: true,
            entropy_joint: true,
        }
    }

    /// P_e and fidelity only; the fast path.
    pub fn populations() -> Self {
        Self {
            excited_population: true,
            fidelity: true,
            entropy_qubit: false,
            entropy_field: false,
            entropy_joint: false,
        }
    }

    pub fn entropies() -> Self {
        Self {
            excited_population: true,
            fidelity: true,
            entropy_qubit: true,
            entropy_field: true,
            entropy_joint: true,
        }
    }

    fn needs_joint(&self) -> bool {
        self.entropy_field || self.entropy_joint
    }
}

/// Sampled trajectory of reduced qubit states plus scalar channels.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub rho_a: Vec<DensityMatrix>,
    pub scalars: BTreeMap<Channel, Vec<f64>>,
}

impl TimeSeries {
    pub fn channel(&self, ch: Channel) -> Option<&[f64]> {
        self.scalars.get(&ch).map(|v| v.as_slice())
    }
}

/// Propagator for a constant bipartite Hamiltonian and a fixed initial
/// product state. Diagonalizes once; reduced qubit states at arbitrary
/// times then cost O(n^2).
///
/// Internals: with H = V diag(lambda) V^dag and rho_tilde0 = V^dag rho(0) V,
/// the reduced qubit entry (i, j) at time t is
/// sum_{c,d} M_ij[c,d] exp(-i (lambda_c - lambda_d) t), where
/// M_ij[c,d] = rho_tilde0[c,d] * S_ij[d,c] and
/// S_ij = (block row i of V)^T conj(block row j of V).
pub struct JointPropagator {
    dim_b: usize,
    eig: EigenSystem,
    rho_tilde0: ComplexMatrix,
    /// M matrices for (i,j) = (0,0), (1,1), (0,1); (1,0) follows from
    /// Hermiticity.
    reduced_kernels: [ComplexMatrix; 3],
}

impl JointPropagator {
    pub fn new(hamiltonian: &ComplexMatrix, rho_ab0: &DensityMatrix) -> Result<Self> {
        let eig = eig_hermitian(hamiltonian)?;
        Self::from_eig(eig, rho_ab0)
    }

    /// Reuses an existing eigendecomposition of the Hamiltonian.
    pub fn from_eig(eig: EigenSystem, rho_ab0: &DensityMatrix) -> Result<Self> {
        let n = eig.dim();
        if rho_ab0.dim() != n {
            return Err(Error::Dimension {
                context: "joint propagator",
                expected: n,
                actual: rho_ab0.dim(),
            });
        }
        if n % 2 != 0 {
            return Err(Error::Dimension {
                context: "joint propagator qubit factor",
                expected: 2,
                actual: n,
            });
        }
        let dim_b = n / 2;
        let v = &eig.eigenvectors;
        let rho_tilde0 = v.adjoint() * rho_ab0.matrix() * v;

        let block = |i: usize| v.rows(i * dim_b, dim_b);
        let s = |i: usize, j: usize| block(i).transpose() * block(j).conjugate();
        let kernel = |s_ij: &ComplexMatrix, rt: &ComplexMatrix| {
            ComplexMatrix::from_fn(n, n, |c, d| rt[(c, d)] * s_ij[(d, c)])
        };
        let s00 = s(0, 0);
        let s11 = s(1, 1);
        let s01 = s(0, 1);
        let reduced_kernels = [
            kernel(&s00, &rho_tilde0),
            kernel(&s11, &rho_tilde0),
            kernel(&s01, &rho_tilde0),
        ];
        Ok(Self {
            dim_b,
            eig,
            rho_tilde0,
            reduced_kernels,
        })
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    fn phases(&self, t: f64) -> DVector<C64> {
        DVector::from_iterator(
            self.eig.dim(),
            self.eig
                .eigenvalues
                .iter()
                .map(|&l| C64::from_polar(1.0, -l * t)),
        )
    }

    fn kernel_sum(kernel: &ComplexMatrix, phases: &DVector<C64>) -> C64 {
        // sum_{c,d} M[c,d] ph[c] conj(ph[d])
        let y = kernel * phases.map(|z| z.conj());
        phases
            .iter()
            .zip(y.iter())
            .map(|(p, yv)| p * yv)
            .sum()
    }

    /// Reduced qubit state at time t.
    pub fn reduced_at(&self, t: f64) -> DensityMatrix {
        let ph = self.phases(t);
        let r00 = Self::kernel_sum(&self.reduced_kernels[0], &ph);
        let r11 = Self::kernel_sum(&self.reduced_kernels[1], &ph);
        let r01 = Self::kernel_sum(&self.reduced_kernels[2], &ph);
        let m = ComplexMatrix::from_row_slice(2, 2, &[r00, r01, r01.conj(), r11]);
        DensityMatrix::symmetrized(m).expect("reduced state of a unitary evolution")
    }

    /// <e| rho_A(t) |e> alone; one O(n^2) pass.
    pub fn excited_population_at(&self, t: f64) -> f64 {
        Self::kernel_sum(&self.reduced_kernels[1], &self.phases(t)).re
    }

    /// Full joint state at time t; O(n^3).
    pub fn joint_at(&self, t: f64) -> DensityMatrix {
        let ph = self.phases(t);
        let n = self.eig.dim();
        let rt = ComplexMatrix::from_fn(n, n, |c, d| {
            self.rho_tilde0[(c, d)] * ph[c] * ph[d].conj()
        });
        let v = &self.eig.eigenvectors;
        DensityMatrix::symmetrized(v * rt * v.adjoint())
            .expect("unitary conjugation of a density matrix")
    }
}

fn entropy_2x2(rho: &DensityMatrix) -> f64 {
    let a = rho.matrix()[(0, 0)].re;
    let b = rho.matrix()[(1, 1)].re;
    let c = rho.matrix()[(0, 1)].norm_sqr();
    let disc = ((a - b) * (a - b) + 4.0 * c).sqrt();
    let lo = ((a + b - disc) / 2.0).clamp(0.0, 1.0);
    let hi = ((a + b + disc) / 2.0).clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(lo) + term(hi)
}

/// Evolves rho_a0 (x) rho_b0 under a constant field-kind Hamiltonian over
/// the grid, recording the reduced qubit trajectory and the requested
/// scalar channels. The field state is checked against the truncation
/// limit before the run and at the final sample.
pub fn propagate_bipartite(
    rho_a0: &DensityMatrix,
    rho_b0: &DensityMatrix,
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
    channels: ChannelSet,
) -> Result<TimeSeries> {
    spec.validate()?;
    grid.validate()?;
    let declared = spec.field_space().ok_or_else(|| Error::InvalidSpec {
        reason: "propagate_bipartite needs a field kind (jc_rwa or rabi_full)".into(),
    })?;
    if rho_a0.dim() != 2 {
        return Err(Error::Dimension {
            context: "harvester state",
            expected: 2,
            actual: rho_a0.dim(),
        });
    }
    if rho_b0.dim() != declared.dim() {
        return Err(Error::Dimension {
            context: "source state",
            expected: declared.dim(),
            actual: rho_b0.dim(),
        });
    }
    let leakage = fock::truncation_check(rho_b0, declared);
    if leakage > fock::RUNNER_LEAKAGE_LIMIT {
        return Err(Error::TruncationLeakage {
            leakage,
            limit: fock::RUNNER_LEAKAGE_LIMIT,
        });
    }

    let working = spec.working_space().expect("field kind");
    let rho_b_work = if working.dim() > rho_b0.dim() {
        rho_b0.pad(working.dim() - rho_b0.dim())
    } else {
        rho_b0.clone()
    };
    let h = build_hamiltonian(spec)?;
    let h = h.constant().expect("field kinds are constant");
    let joint0 = tensor_density(rho_a0, &rho_b_work);
    let prop = JointPropagator::new(h, &joint0)?;

    let mut rho_a = Vec::with_capacity(grid.samples);
    let mut scalars: BTreeMap<Channel, Vec<f64>> = BTreeMap::new();
    let mut push = |ch: Channel, v: f64, scalars: &mut BTreeMap<Channel, Vec<f64>>| {
        scalars.entry(ch).or_default().push(v);
    };
    for t in grid.times() {
        let reduced = prop.reduced_at(t);
        let pe = reduced.population(1);
        if channels.excited_population {
            push(Channel::ExcitedPopulation, pe, &mut scalars);
        }
        if channels.fidelity {
            push(Channel::Fidelity, pe, &mut scalars);
        }
        if channels.entropy_qubit {
            push(Channel::EntropyQubit, entropy_2x2(&reduced), &mut scalars);
        }
        if channels.needs_joint() {
            let joint = prop.joint_at(t);
            if channels.entropy_joint {
                push(Channel::EntropyJoint, von_neumann_entropy(&joint), &mut scalars);
            }
            if channels.entropy_field {
                let rho_b = partial_trace_a(&joint, 2, working.dim())?;
                push(Channel::EntropyField, von_neumann_entropy(&rho_b), &mut scalars);
            }
        }
        rho_a.push(reduced);
    }

    // excitation exchange climbs at most one rung under jc_rwa, so leakage
    // is monotone in the initial support; the final sample is the monitor
    let final_joint = prop.joint_at(grid.t_end);
    let final_b = partial_trace_a(&final_joint, 2, working.dim())?;
    let final_leakage = fock::truncation_check(&final_b, working);
    if final_leakage > fock::RUNNER_LEAKAGE_LIMIT {
        return Err(Error::TruncationLeakage {
            leakage: final_leakage,
            limit: fock::RUNNER_LEAKAGE_LIMIT,
        });
    }

    Ok(TimeSeries {
        grid: *grid,
        rho_a,
        scalars,
    })
}

/// exp(-i H h) for a 2x2 Hermitian H, in closed form.
fn step_unitary(h: &Matrix2<C64>, dt: f64) -> Matrix2<C64> {
    let trace_half = (h[(0, 0)].re + h[(1, 1)].re) / 2.0;
    // traceless part coefficients in the Pauli basis
    let vz = (h[(0, 0)].re - h[(1, 1)].re) / 2.0;
    let off = h[(0, 1)];
    let vx = off.re;
    let vy = -off.im;
    let nu = (vx * vx + vy * vy + vz * vz).sqrt();
    let phase = C64::from_polar(1.0, -trace_half * dt);
    if nu * dt == 0.0 {
        return Matrix2::identity().map(|z: C64| z * phase);
    }
    let (s, c) = (nu * dt).sin_cos();
    let f = -C64::i() * (s / nu);
    Matrix2::new(
        phase * (C64::new(c, 0.0) + f * vz),
        phase * f * C64::new(vx, -vy),
        phase * f * C64::new(vx, vy),
        phase * (C64::new(c, 0.0) - f * vz),
    )
}

fn semiclassical_run(
    rho0: &Matrix2<C64>,
    built: &BuiltHamiltonian,
    grid: &TimeGrid,
    substeps: usize,
) -> Vec<Matrix2<C64>> {
    let h_grid = grid.step();
    let dt = h_grid / substeps as f64;
    let mut rho = *rho0;
    let mut out = Vec::with_capacity(grid.samples);
    out.push(rho);
    for k in 0..grid.samples - 1 {
        let t0 = grid.t_start + h_grid * k as f64;
        let mut u = Matrix2::identity();
        for s in 0..substeps {
            let t_mid = t0 + (s as f64 + 0.5) * dt;
            let h_full = built.at(t_mid);
            let h2 = Matrix2::new(h_full[(0, 0)], h_full[(0, 1)], h_full[(1, 0)], h_full[(1, 1)]);
            u = step_unitary(&h2, dt) * u;
        }
        rho = u * rho * u.adjoint();
        out.push(rho);
    }
    out
}

/// Evolves a qubit state under the driven semiclassical Hamiltonian with
/// midpoint-exponential steps (`substeps` per grid interval). The run is
/// accepted only if doubling the substep count moves no P_e sample by more
/// than [`SEMICLASSICAL_CONVERGENCE_TOL`]; the doubled-resolution result is
/// returned.
pub fn propagate_semiclassical(
    rho_a0: &DensityMatrix,
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
    substeps: usize,
) -> Result<TimeSeries> {
    spec.validate()?;
    grid.validate()?;
    if !matches!(spec, HamiltonianSpec::Semiclassical { .. }) {
        return Err(Error::InvalidSpec {
            reason: "propagate_semiclassical needs the semiclassical kind".into(),
        });
    }
    if rho_a0.dim() != 2 {
        return Err(Error::Dimension {
            context: "harvester state",
            expected: 2,
            actual: rho_a0.dim(),
        });
    }
    if substeps == 0 {
        return Err(Error::InvalidSpec {
            reason: "substeps must be >= 1".into(),
        });
    }
    let built = build_hamiltonian(spec)?;
    let m = rho_a0.matrix();
    let rho0 = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let coarse = semiclassical_run(&rho0, &built, grid, substeps);
    let fine = semiclassical_run(&rho0, &built, grid, substeps * 2);
    let deviation = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a[(1, 1)].re - b[(1, 1)].re).abs())
        .fold(0.0, f64::max);
    if deviation > SEMICLASSICAL_CONVERGENCE_TOL {
        return Err(Error::ConvergenceFailure {
            substeps,
            deviation,
            limit: SEMICLASSICAL_CONVERGENCE_TOL,
        });
    }

    let mut rho_a = Vec::with_capacity(grid.samples);
    let mut scalars: BTreeMap<Channel, Vec<f64>> = BTreeMap::new();
    for rho in fine {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]],
        );
        let dm = DensityMatrix::symmetrized(m)?;
        let pe = dm.population(1);
        scalars
            .entry(Channel::ExcitedPopulation)
            .or_default()
            .push(pe);
        scalars.entry(Channel::Fidelity).or_default().push(pe);
        scalars
            .entry(Channel::EntropyQubit)
            .or_default()
            .push(entropy_2x2(&dm));
        rho_a.push(dm);
    }
    Ok(TimeSeries {
        grid: *grid,
        rho_a,
        scalars,
    })
}

/// Comparison of the full quantized model against the classical-drive Rabi
/// prediction P_e = sin^2(g |alpha| t).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SemiclassicalReport {
    pub max_deviation: f64,
    /// Gaussian collapse-envelope time sqrt(2)/g of the quantized model.
    pub collapse_time_estimate: f64,
}

/// Runs the full Jaynes-Cummings model with a coherent source of magnitude
/// `alpha_mag` and compares P_e(t) against sin^2(g |alpha| t) over the
/// grid. The grid must stay within `max_quarter_periods` quarter periods
/// (t <= K pi / (2 g |alpha|)), where the comparison is meaningful before
/// the collapse sets in; the truncation must satisfy
/// n_max >= |alpha|^2 + 10 |alpha|.
pub fn semiclassical_limit_compare(
    alpha_mag: f64,
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
    max_quarter_periods: f64,
) -> Result<SemiclassicalReport> {
    spec.validate()?;
    grid.validate()?;
    if !(alpha_mag > 0.0) {
        return Err(Error::Domain {
            what: format!("alpha magnitude must be positive, got {alpha_mag}"),
        });
    }
    let (g, n_max) = match *spec {
        HamiltonianSpec::JcRwa { g, n_max, .. } => (g, n_max),
        _ => {
            return Err(Error::InvalidSpec {
                reason: "semiclassical_limit_compare needs the jc_rwa kind".into(),
            })
        }
    };
    let needed = alpha_mag * alpha_mag + 10.0 * alpha_mag;
    if (n_max as f64) < needed {
        return Err(Error::InvalidSpec {
            reason: format!("n_max = {n_max} below the truncation rule |a|^2 + 10|a| = {needed}"),
        });
    }
    let t_limit = max_quarter_periods * std::f64::consts::FRAC_PI_2 / (g * alpha_mag);
    if grid.t_end > t_limit * (1.0 + 1e-12) {
        return Err(Error::InvalidSpec {
            reason: format!(
                "grid end {} exceeds the configured window K pi/(2 g |a|) = {t_limit}",
                grid.t_end
            ),
        });
    }

    let space = spec.field_space().expect("jc_rwa");
    let source = DensityMatrix::from_pure(&fock::coherent_state(
        C64::new(alpha_mag, 0.0),
        space,
    )?);
    let ground = DensityMatrix::from_pure(&crate::linalg::qubit_ground());
    let series = propagate_bipartite(&ground, &source, spec, grid, ChannelSet::populations())?;
    let pe = series
        .channel(Channel::ExcitedPopulation)
        .expect("population channel requested");
    let max_deviation = grid
        .times()
        .zip(pe)
        .map(|(t, &p)| {
            let semi = (g * alpha_mag * t).sin().powi(2);
            (p - semi).abs()
        })
        .fold(0.0, f64::max);
    Ok(SemiclassicalReport {
        max_deviation,
        collapse_time_estimate: std::f64::consts::SQRT_2 / g,
    })
}
