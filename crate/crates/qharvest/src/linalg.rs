//! Dense complex linear algebra: tensor products, partial traces, Hermitian
//! eigendecomposition, and eigendecomposition-based unitary propagation.
//!
//! Conventions used throughout the crate (and relied on by every module
//! above this one):
//!
//! * `hbar = 1`; frequencies and couplings share one unit.
//! * Joint indices are qubit-major: `joint = i_a * dim_b + i_b`.
//! * The qubit ground state is basis index 0, the excited state index 1.
//!   Hamiltonian builders therefore write the level splitting as
//!   `(omega0/2) * (|e><e| - |g><g|)`, while [`sigma_z`] returns the plain
//!   Pauli matrix `diag(1, -1)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix; the substrate type for all operators.
pub type ComplexMatrix = DMatrix<C64>;

/// Entrywise Hermiticity tolerance for density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance on |Tr rho - 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on |<psi|psi> - 1| for state vectors.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Relative Hermiticity tolerance accepted by [`eig_hermitian`].
pub const EIG_INPUT_TOL: f64 = 1e-8;

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity, max |M - M^dag|.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// (M + M^dag) / 2.
pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Hermitian, positive semidefinite, unit-trace operator: the universal
/// state representation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all invariants (Hermiticity, unit trace, positivity) and
    /// wraps the matrix. Positivity costs an eigendecomposition; prefer
    /// [`DensityMatrix::from_pure`] or the constructors in `fock` where the
    /// invariants hold by construction.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dm = Self::symmetrized(matrix)?;
        let min_eig = dm
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity {
                reason: "negative eigenvalue",
                value: min_eig,
            });
        }
        Ok(dm)
    }

    /// Symmetrizes and checks the cheap invariants (finiteness, Hermiticity
    /// before repair, unit trace). Used on results of unitary conjugation
    /// and partial traces, which preserve positivity exactly.
    pub(crate) fn symmetrized(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                context: "density matrix",
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        if !all_finite(&matrix) {
            return Err(Error::NonFinite {
                context: "density matrix",
            });
        }
        let dev = hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: dev,
                limit: HERMITICITY_TOL,
            });
        }
        let matrix = symmetrize(&matrix);
        let tr = matrix.diagonal().iter().map(|z| z.re).sum::<f64>();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity {
                reason: "trace differs from 1",
                value: tr,
            });
        }
        Ok(Self {
            dim: matrix.nrows(),
            matrix,
        })
    }

    /// |psi><psi|.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        let matrix = ComplexMatrix::from_fn(psi.dim(), psi.dim(), |i, j| v[i] * v[j].conj());
        Self {
            dim: psi.dim(),
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Tr rho^2.
    pub fn purity(&self) -> f64 {
        // Hermitian, so Tr[rho rho] = sum |rho_ij|^2.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Real diagonal entry (a population).
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Embeds a state on a `dim_b`-level space into `dim_b + extra` levels
    /// (zero amplitude on the new levels). Exact.
    pub fn pad(&self, extra: usize) -> Self {
        let n = self.dim + extra;
        let mut m = ComplexMatrix::zeros(n, n);
        m.view_mut((0, 0), (self.dim, self.dim))
            .copy_from(&self.matrix);
        Self { dim: n, matrix: m }
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within
    /// [`STATE_NORM_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            dim: v.len(),
            amplitudes: v,
        })
    }

    /// Normalizes and wraps; fails on (near-)zero vectors.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let mut v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm * norm <= 1e-14 {
            return Err(Error::DegenerateState {
                what: "attempted to normalize a zero vector",
            });
        }
        v /= C64::new(norm, 0.0);
        Ok(Self {
            dim: v.len(),
            amplitudes: v,
        })
    }

    /// Basis vector |k> on a `dim`-dimensional space.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self {
            dim,
            amplitudes: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// U(t) = V diag(exp(-i lambda_k t)) V^dag.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            let ph = C64::from_polar(1.0, -self.eigenvalues[k] * t);
            col.iter_mut().for_each(|z| *z *= ph);
        }
        let mut u = ComplexMatrix::zeros(n, n);
        scaled.mul_to(&self.eigenvectors.adjoint(), &mut u);
        u
    }
}

/// Kronecker product with the qubit-major convention
/// `joint = i_a * dim_b + i_b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Product state rho_a (x) rho_b.
pub fn tensor_density(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::symmetrized(tensor(a.matrix(), b.matrix()))
        .expect("tensor product of density matrices is a density matrix")
}

/// Traces out subsystem B: (rho_A)_ij = sum_k rho_{(i,k),(j,k)}.
pub fn partial_trace_b(rho_ab: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    if dim_a * dim_b != rho_ab.dim() {
        return Err(Error::Dimension {
            context: "partial_trace_b",
            expected: rho_ab.dim(),
            actual: dim_a * dim_b,
        });
    }
    let m = rho_ab.matrix();
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for j in 0..dim_a {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim_b {
                acc += m[(i * dim_b + k, j * dim_b + k)];
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::symmetrized(out)
}

/// Traces out subsystem A: (rho_B)_kl = sum_i rho_{(i,k),(i,l)}.
pub fn partial_trace_a(rho_ab: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    if dim_a * dim_b != rho_ab.dim() {
        return Err(Error::Dimension {
            context: "partial_trace_a",
            expected: rho_ab.dim(),
            actual: dim_a * dim_b,
        });
    }
    let m = rho_ab.matrix();
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for k in 0..dim_b {
        for l in 0..dim_b {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..dim_a {
                acc += m[(i * dim_b + k, i * dim_b + l)];
            }
            out[(k, l)] = acc;
        }
    }
    DensityMatrix::symmetrized(out)
}

/// Hermitian eigendecomposition. The input is symmetrized as
/// `(H + H^dag)/2` before decomposing; inputs further than
/// [`EIG_INPUT_TOL`] (relative) from Hermitian are rejected.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenSystem> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension {
            context: "eig_hermitian",
            expected: h.nrows(),
            actual: h.ncols(),
        });
    }
    if !all_finite(h) {
        return Err(Error::NonFinite {
            context: "eig_hermitian",
        });
    }
    let scale = max_abs(h);
    let dev = hermiticity_deviation(h);
    if dev > EIG_INPUT_TOL * scale {
        return Err(Error::NotHermitian {
            deviation: dev,
            limit: EIG_INPUT_TOL * scale,
        });
    }
    let eig = symmetrize(h).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors
            .column_mut(dst)
            .copy_from(&eig.eigenvectors.column(src));
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// U rho U^dag with U = exp(-i H t) built from the eigendecomposition of H.
pub fn evolve(rho: &DensityMatrix, eig: &EigenSystem, t: f64) -> Result<DensityMatrix> {
    if rho.dim() != eig.dim() {
        return Err(Error::Dimension {
            context: "evolve",
            expected: eig.dim(),
            actual: rho.dim(),
        });
    }
    let u = eig.propagator(t);
    DensityMatrix::symmetrized(&u * rho.matrix() * u.adjoint())
}

/// 2x2 identity.
pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

fn mat2(entries: [[f64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| C64::new(entries[i][j], 0.0))
}

/// Pauli Z, `diag(1, -1)`.
pub fn sigma_z() -> ComplexMatrix {
    mat2([[1.0, 0.0], [0.0, -1.0]])
}

/// Pauli X.
pub fn sigma_x() -> ComplexMatrix {
    mat2([[0.0, 1.0], [1.0, 0.0]])
}

/// Pauli Y.
pub fn sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(0.0, -1.0);
    m[(1, 0)] = C64::new(0.0, 1.0);
    m
}

/// Qubit raising operator |e><g| (ground state is index 0).
pub fn sigma_plus() -> ComplexMatrix {
    mat2([[0.0, 0.0], [1.0, 0.0]])
}

/// Qubit lowering operator |g><e|.
pub fn sigma_minus() -> ComplexMatrix {
    mat2([[0.0, 1.0], [0.0, 0.0]])
}

/// Qubit ground state |g>, index 0.
pub fn qubit_ground() -> StateVector {
    StateVector::basis(2, 0)
}

/// Qubit excited state |e>, index 1.
pub fn qubit_excited() -> StateVector {
    StateVector::basis(2, 1)
}
