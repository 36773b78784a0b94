//! Wigner functions of field states on rectangular phase-space grids via
//! the displaced-parity form (hbar = 1):
//!
//! ```text
//! W(q, p) = (1/pi) sum_n (-1)^n <n| D(beta)^dag rho D(beta) |n>,
//! beta = (q + i p) / sqrt(2),
//! ```
//!
//! with the displacement operator D(beta) = exp(beta a^dag - beta^* a)
//! exponentiated on the same truncated Fock space as the state. This is
//! exact on the truncated space; accuracy against the infinite-space Wigner
//! function is governed by how much the displaced state leaks past the
//! truncation, which the grid records as `max_displaced_leakage`.
//!
//! The generator i(beta a^dag - beta^* a) is gauge-equivalent to |beta|
//! times one fixed real symmetric tridiagonal matrix, so a single
//! eigendecomposition serves every grid point; each point then costs
//! O(rank(rho) n^2).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::measures::BoundReport;

/// Budget for |Riemann sum - 1| on a well-covered grid.
pub const NORMALIZATION_BUDGET: f64 = 1e-3;
/// Default limit on the displaced-state population of the top two Fock
/// levels, beyond which values near that grid point are unreliable.
pub const DISPLACED_LEAKAGE_LIMIT: f64 = 1e-2;
/// Admissible imaginary residue of the displaced-parity sum.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-10;

/// Rectangular grid request for [`wigner`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub points_per_axis: usize,
    /// Displaced-state leakage above which the evaluation errors out.
    #[serde(default = "default_leak_limit")]
    pub displaced_leakage_limit: f64,
}

fn default_leak_limit() -> f64 {
    DISPLACED_LEAKAGE_LIMIT
}

impl Default for WignerConfig {
    /// [-6, 6]^2 with 201 points per axis; covers |alpha| <= 3 states with
    /// margin when the Fock space is large enough for the corner
    /// displacements.
    fn default() -> Self {
        Self {
            q_min: -6.0,
            q_max: 6.0,
            p_min: -6.0,
            p_max: 6.0,
            points_per_axis: 201,
            displaced_leakage_limit: DISPLACED_LEAKAGE_LIMIT,
        }
    }
}

impl WignerConfig {
    pub fn symmetric(extent: f64, points_per_axis: usize) -> Self {
        Self {
            q_min: -extent,
            q_max: extent,
            p_min: -extent,
            p_max: extent,
            points_per_axis,
            displaced_leakage_limit: DISPLACED_LEAKAGE_LIMIT,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points_per_axis < 3 {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "wigner grid needs at least 3 points per axis, got {}",
                    self.points_per_axis
                ),
            });
        }
        if !(self.q_max > self.q_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidSpec {
                reason: "wigner grid needs positive extents".into(),
            });
        }
        Ok(())
    }
}

/// Sampled Wigner function with grid metadata.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    q_axis: Vec<f64>,
    p_axis: Vec<f64>,
    /// Row-major over q (outer) and p (inner).
    values: Vec<f64>,
    normalization_error: f64,
    max_displaced_leakage: f64,
}

impl WignerGrid {
    pub fn q_axis(&self) -> &[f64] {
        &self.q_axis
    }

    pub fn p_axis(&self) -> &[f64] {
        &self.p_axis
    }

    pub fn value(&self, iq: usize, ip: usize) -> f64 {
        self.values[iq * self.p_axis.len() + ip]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_area(&self) -> f64 {
        (self.q_axis[1] - self.q_axis[0]) * (self.p_axis[1] - self.p_axis[0])
    }

    /// Riemann sum of W over the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    /// sqrt of the Riemann sum of W^2.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|w| w * w).sum::<f64>() * self.cell_area()).sqrt()
    }

    /// |integral - 1|, recorded at construction.
    pub fn normalization_error(&self) -> f64 {
        self.normalization_error
    }

    /// Largest top-two-level population of the anti-displaced state seen
    /// across the grid.
    pub fn max_displaced_leakage(&self) -> f64 {
        self.max_displaced_leakage
    }

    /// Row-major (q, p, W) triples, q outer.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.q_axis.iter().enumerate().flat_map(move |(iq, &q)| {
            self.p_axis
                .iter()
                .enumerate()
                .map(move |(ip, &p)| (q, p, self.value(iq, ip)))
        })
    }

    fn same_axes(&self, other: &WignerGrid) -> bool {
        self.q_axis == other.q_axis && self.p_axis == other.p_axis
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + h * k as f64).collect()
}

/// Spectral factors shared by all grid points: the eigensystem of the unit
/// tridiagonal generator and the parity matrix in its eigenbasis.
struct DisplacementBasis {
    /// Eigenvalues mu of the unit generator.
    mu: Vec<f64>,
    /// Real orthogonal eigenvectors, column-major.
    w: nalgebra::DMatrix<f64>,
    /// W^T Pi W.
    parity: nalgebra::DMatrix<f64>,
}

impl DisplacementBasis {
    fn new(dim: usize) -> Self {
        // unit generator: real symmetric tridiagonal, off-diagonal sqrt(n)
        let mut t = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for n in 1..dim {
            let v = (n as f64).sqrt();
            t[(n, n - 1)] = v;
            t[(n - 1, n)] = v;
        }
        let eig = t.symmetric_eigen();
        let mu: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let w = eig.eigenvectors;
        let mut pw = w.clone();
        for (n, mut row) in pw.row_iter_mut().enumerate() {
            if n % 2 == 1 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let parity = w.transpose() * pw;
        Self { mu, w, parity }
    }
}

type C64 = num_complex::Complex64;

struct SpectralState {
    /// Kept eigenvalues of rho.
    weights: Vec<f64>,
    /// Matching eigenvectors, one column each.
    vectors: Vec<Vec<C64>>,
}

fn spectral_state(rho: &DensityMatrix) -> SpectralState {
    let eig = rho.matrix().clone().symmetric_eigen();
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        if w > 1e-14 {
            weights.push(w);
            vectors.push(eig.eigenvectors.column(k).iter().copied().collect());
        }
    }
    SpectralState { weights, vectors }
}

struct PointValue {
    w: f64,
    imag: f64,
    leakage: f64,
}

fn point_value(
    basis: &DisplacementBasis,
    state: &SpectralState,
    q: f64,
    p: f64,
) -> PointValue {
    let dim = basis.mu.len();
    let beta = C64::new(q, p) / C64::new(2.0f64.sqrt(), 0.0);
    let r = beta.norm();
    // gauge phase: theta_n = n (pi/2 + arg beta)
    let theta_step = std::f64::consts::FRAC_PI_2 + if r > 0.0 { beta.arg() } else { 0.0 };
    let gauge: Vec<C64> = (0..dim)
        .map(|n| C64::from_polar(1.0, -(n as f64) * theta_step))
        .collect();
    let spectral_phase: Vec<C64> = basis
        .mu
        .iter()
        .map(|&m| C64::from_polar(1.0, r * m))
        .collect();

    let mut acc = C64::new(0.0, 0.0);
    // displaced top-level amplitudes accumulate per state below
    let mut top = [0.0f64; 2];
    let mut u = vec![C64::new(0.0, 0.0); dim];
    let mut v = vec![C64::new(0.0, 0.0); dim];
    let mut y = vec![C64::new(0.0, 0.0); dim];
    for (weight, psi) in state.weights.iter().zip(&state.vectors) {
        // u = W^T (Phi^dag psi), with (Phi^dag psi)_n = e^{-i theta_n} psi_n
        for k in 0..dim {
            let mut s = C64::new(0.0, 0.0);
            for n in 0..dim {
                s += basis.w[(n, k)] * (gauge[n] * psi[n]);
            }
            u[k] = s;
        }
        // v = e^{i r mu} u, y = parity * v
        for k in 0..dim {
            v[k] = spectral_phase[k] * u[k];
        }
        for k in 0..dim {
            let mut s = C64::new(0.0, 0.0);
            for l in 0..dim {
                s += basis.parity[(k, l)] * v[l];
            }
            y[k] = s;
        }
        let mut val = C64::new(0.0, 0.0);
        for k in 0..dim {
            val += v[k].conj() * y[k];
        }
        acc += C64::new(*weight, 0.0) * val;

        // leakage of the anti-displaced state sigma = D^dag rho D:
        // sigma_nn = |<psi| D e_n>|^2 summed with the weights, where
        // <psi| D e_n> = conj(sum_k u[k] e^{-i r mu_k} W[n, k]) ...
        // evaluated via the same spectral factors
        for (slot, n) in [dim - 2, dim - 1].iter().enumerate() {
            let mut amp = C64::new(0.0, 0.0);
            for k in 0..dim {
                // (W^T gauge^dag D^dag psi)[n] assembled directly
                amp += basis.w[(*n, k)] * (spectral_phase[k] * u[k]);
            }
            top[slot] += weight * amp.norm_sqr();
        }
    }
    PointValue {
        w: acc.re / std::f64::consts::PI,
        imag: acc.im.abs() / std::f64::consts::PI,
        leakage: top[0] + top[1],
    }
}

/// Evaluates the Wigner function of `rho` on the configured grid.
pub fn wigner(rho: &DensityMatrix, config: &WignerConfig) -> Result<WignerGrid> {
    config.validate()?;
    let dim = rho.dim();
    if dim < 2 {
        return Err(Error::Dimension {
            context: "wigner",
            expected: 2,
            actual: dim,
        });
    }
    let basis = DisplacementBasis::new(dim);
    let state = spectral_state(rho);
    let q_axis = axis(config.q_min, config.q_max, config.points_per_axis);
    let p_axis = axis(config.p_min, config.p_max, config.points_per_axis);

    let rows: Vec<Vec<PointValue>> = q_axis
        .par_iter()
        .map(|&q| {
            p_axis
                .iter()
                .map(|&p| point_value(&basis, &state, q, p))
                .collect()
        })
        .collect();

    let mut values = Vec::with_capacity(q_axis.len() * p_axis.len());
    let mut max_imag: f64 = 0.0;
    let mut max_leak: f64 = 0.0;
    for row in rows {
        for pv in row {
            values.push(pv.w);
            max_imag = max_imag.max(pv.imag);
            max_leak = max_leak.max(pv.leakage);
        }
    }
    if max_imag > IMAGINARY_RESIDUE_LIMIT {
        return Err(Error::Numerics {
            what: "imaginary residue of the displaced-parity sum",
            value: max_imag,
            limit: IMAGINARY_RESIDUE_LIMIT,
        });
    }
    if max_leak > config.displaced_leakage_limit {
        return Err(Error::TruncationLeakage {
            leakage: max_leak,
            limit: config.displaced_leakage_limit,
        });
    }

    let cell = (q_axis[1] - q_axis[0]) * (p_axis[1] - p_axis[0]);
    let normalization_error = (values.iter().sum::<f64>() * cell - 1.0).abs();
    Ok(WignerGrid {
        q_axis,
        p_axis,
        values,
        normalization_error,
        max_displaced_leakage: max_leak,
    })
}

/// L2 distance sqrt(sum (W_a - W_b)^2 dq dp) between two grids sampled on
/// identical axes.
pub fn wigner_l2_distance(a: &WignerGrid, b: &WignerGrid) -> Result<f64> {
    if !a.same_axes(b) {
        return Err(Error::GridMismatch);
    }
    let sum: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((sum * a.cell_area()).sqrt())
}

/// Cross-validates the grid against matrix algebra:
/// |2 pi sum W^2 dq dp - Tr rho^2| must stay within the grid budget. Errors
/// out when the grid does not cover the state (normalization off by more
/// than [`NORMALIZATION_BUDGET`]).
pub fn purity_identity_check(rho: &DensityMatrix, grid: &WignerGrid) -> Result<BoundReport> {
    if grid.normalization_error() > NORMALIZATION_BUDGET {
        return Err(Error::Coverage {
            normalization_error: grid.normalization_error(),
            budget: NORMALIZATION_BUDGET,
        });
    }
    let grid_purity = 2.0 * std::f64::consts::PI * grid.l2_norm().powi(2);
    let lhs = (grid_purity - rho.purity()).abs();
    Ok(BoundReport::new(lhs, NORMALIZATION_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{cat_state, coherent_state, mix, thermal_state, CatParity, FockSpace, SourceEnsemble};
    use crate::linalg::{eig_hermitian, ComplexMatrix, StateVector};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn vacuum(dim: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::basis(dim, 0))
    }

    #[test]
    fn tridiagonal_route_matches_direct_exponential() {
        // dual route: gauge-transformed shared eigenbasis vs a per-point
        // eigendecomposition of i(beta a^dag - beta^* a)
        let space = FockSpace::new(18);
        let rho = DensityMatrix::from_pure(&coherent_state(c(0.8, 0.3), space).unwrap());
        let basis = DisplacementBasis::new(space.dim());
        let state = spectral_state(&rho);
        let a = crate::fock::annihilation(space);
        let ad = crate::fock::creation(space);
        for &(q, p) in &[(0.0, 0.0), (0.7, -0.4), (-1.3, 2.2), (2.5, 1.1)] {
            let fast = point_value(&basis, &state, q, p).w;
            let beta = c(q, p) / c(2.0f64.sqrt(), 0.0);
            let k = (&ad.scale(1.0) * beta + &a.scale(-1.0) * beta.conj()).map(|z| z * C64::i());
            let eig = eig_hermitian(&k).unwrap();
            let d = eig.propagator(1.0);
            let sigma = d.adjoint() * rho.matrix() * &d;
            let direct: f64 = (0..space.dim())
                .map(|n| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign * sigma[(n, n)].re
                })
                .sum::<f64>()
                / std::f64::consts::PI;
            assert_abs_diff_eq!(fast, direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn vacuum_matches_definitional_integral() {
        // oracle: W(q,p) = (1/2pi) int dx e^{ipx} <q - x/2|rho|q + x/2>
        // evaluated by quadrature for the vacuum's Gaussian wavefunction
        let oracle = |q: f64, p: f64| {
            let n = 4001;
            let lim = 10.0;
            let h = 2.0 * lim / (n - 1) as f64;
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let x = -lim + h * k as f64;
                let left = (-(q - x / 2.0) * (q - x / 2.0) / 2.0).exp();
                let right = (-(q + x / 2.0) * (q + x / 2.0) / 2.0).exp();
                let wavef = left * right / std::f64::consts::PI.sqrt();
                let weight = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += C64::from_polar(1.0, p * x) * (wavef * weight * h);
            }
            acc.re / (2.0 * std::f64::consts::PI)
        };
        let space = FockSpace::new(40);
        let rho = vacuum(space.dim());
        let cfg = WignerConfig {
            q_min: -1.0,
            q_max: 1.0,
            p_min: -1.0,
            p_max: 1.0,
            points_per_axis: 3,
            displaced_leakage_limit: DISPLACED_LEAKAGE_LIMIT,
        };
        let grid = wigner(&rho, &cfg).unwrap();
        for (iq, &q) in grid.q_axis().iter().enumerate() {
            for (ip, &p) in grid.p_axis().iter().enumerate() {
                assert_abs_diff_eq!(grid.value(iq, ip), oracle(q, p), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn origin_values() {
        let space = FockSpace::new(30);
        let cfg = WignerConfig::symmetric(2.0, 5);
        let grid = wigner(&vacuum(space.dim()), &cfg).unwrap();
        assert_abs_diff_eq!(grid.value(2, 2), 1.0 / std::f64::consts::PI, epsilon = 1e-6);

        let odd = DensityMatrix::from_pure(
            &cat_state(c(1.0, 0.0), CatParity::Odd, space).unwrap(),
        );
        let grid = wigner(&odd, &cfg).unwrap();
        assert_abs_diff_eq!(grid.value(2, 2), -1.0 / std::f64::consts::PI, epsilon = 1e-6);
    }

    #[test]
    fn coherent_peak_location() {
        let space = FockSpace::new(40);
        let alpha = 1.5;
        let rho = DensityMatrix::from_pure(&coherent_state(c(alpha, 0.0), space).unwrap());
        let cfg = WignerConfig::symmetric(4.0, 81);
        let grid = wigner(&rho, &cfg).unwrap();
        let mut best = (0, 0, f64::MIN);
        for iq in 0..81 {
            for ip in 0..81 {
                if grid.value(iq, ip) > best.2 {
                    best = (iq, ip, grid.value(iq, ip));
                }
            }
        }
        let cell = grid.q_axis()[1] - grid.q_axis()[0];
        assert!((grid.q_axis()[best.0] - 2.0f64.sqrt() * alpha).abs() <= cell);
        assert!(grid.p_axis()[best.1].abs() <= cell);
    }

    #[test]
    fn normalization_and_purity_on_covered_grids() {
        let space = FockSpace::new(70);
        let cfg = WignerConfig::symmetric(5.0, 101);

        let rho = vacuum(space.dim());
        let grid = wigner(&rho, &cfg).unwrap();
        assert!(grid.normalization_error() <= 1e-3);
        let report = purity_identity_check(&rho, &grid).unwrap();
        assert!(report.holds, "purity deviation {}", report.lhs);

        let th = thermal_state(1.0, space).unwrap();
        let grid = wigner(&th, &cfg).unwrap();
        assert!(grid.normalization_error() <= 1e-3);
        let report = purity_identity_check(&th, &grid).unwrap();
        assert!(report.holds, "purity deviation {}", report.lhs);
        // Tr rho^2 = 1/3 for n_bar = 1
        assert_abs_diff_eq!(th.purity(), 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn pure_state_l2_norm_is_inverse_sqrt_two_pi() {
        let space = FockSpace::new(70);
        let even = DensityMatrix::from_pure(
            &cat_state(c(1.0, 0.0), CatParity::Even, space).unwrap(),
        );
        let grid = wigner(&even, &WignerConfig::symmetric(5.0, 101)).unwrap();
        assert_abs_diff_eq!(
            grid.l2_norm(),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-3
        );
    }

    #[test]
    fn l2_distance_between_far_coherent_states() {
        // near-orthogonal states: ||W1 - W2||_2 = sqrt(2) / sqrt(2 pi)
        let space = FockSpace::new(70);
        let cfg = WignerConfig::symmetric(5.5, 111);
        let plus = DensityMatrix::from_pure(&coherent_state(c(2.0, 0.0), space).unwrap());
        let minus = DensityMatrix::from_pure(&coherent_state(c(-2.0, 0.0), space).unwrap());
        let ga = wigner(&plus, &cfg).unwrap();
        let gb = wigner(&minus, &cfg).unwrap();
        let expect = 2.0f64.sqrt() / (2.0 * std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(wigner_l2_distance(&ga, &gb).unwrap(), expect, epsilon = 1e-3);

        // matrix oracle: ||W1 - W2||_2^2 = (Tr r1^2 + Tr r2^2 - 2 Tr r1 r2) / (2 pi)
        let cross = (plus.matrix() * minus.matrix()).trace().re;
        let oracle = ((plus.purity() + minus.purity() - 2.0 * cross)
            / (2.0 * std::f64::consts::PI))
            .sqrt();
        assert_abs_diff_eq!(wigner_l2_distance(&ga, &gb).unwrap(), oracle, epsilon = 1e-3);
    }

    #[test]
    fn l2_distance_rejects_mismatched_grids() {
        let space = FockSpace::new(30);
        let rho = vacuum(space.dim());
        let a = wigner(&rho, &WignerConfig::symmetric(3.0, 11)).unwrap();
        let b = wigner(&rho, &WignerConfig::symmetric(3.0, 13)).unwrap();
        assert!(matches!(
            wigner_l2_distance(&a, &b),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn wigner_is_linear_and_mixture_matches_cat_ensemble() {
        let space = FockSpace::new(45);
        let alpha = c(1.0, 0.0);
        let cfg = WignerConfig::symmetric(3.5, 41);
        let pm = SourceEnsemble::uniform_pure(
            vec![
                coherent_state(alpha, space).unwrap(),
                coherent_state(-alpha, space).unwrap(),
            ],
            "pm",
        )
        .unwrap();
        let e2 = (-2.0 * alpha.norm_sqr()).exp();
        let cats = SourceEnsemble::from_pure_states(
            vec![
                (
                    (1.0 + e2) / 2.0,
                    cat_state(alpha, CatParity::Even, space).unwrap(),
                ),
                (
                    (1.0 - e2) / 2.0,
                    cat_state(alpha, CatParity::Odd, space).unwrap(),
                ),
            ],
            "cats",
        )
        .unwrap();

        // pointwise linearity: grid of the mixture vs mixture of grids
        let grid_mix = wigner(&mix(&pm), &cfg).unwrap();
        let members: Vec<(f64, WignerGrid)> = pm
            .members()
            .iter()
            .map(|(w, rho)| (*w, wigner(rho, &cfg).unwrap()))
            .collect();
        for idx in 0..grid_mix.values().len() {
            let combo: f64 = members.iter().map(|(w, g)| w * g.values()[idx]).sum();
            assert_abs_diff_eq!(grid_mix.values()[idx], combo, epsilon = 1e-10);
        }

        // same realized state through the cat decomposition
        let grid_cats = wigner(&mix(&cats), &cfg).unwrap();
        for idx in 0..grid_mix.values().len() {
            assert_abs_diff_eq!(
                grid_mix.values()[idx],
                grid_cats.values()[idx],
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn parity_invariant_states_have_symmetric_grids() {
        let space = FockSpace::new(45);
        let pm = SourceEnsemble::uniform_pure(
            vec![
                coherent_state(c(1.0, 0.0), space).unwrap(),
                coherent_state(c(-1.0, 0.0), space).unwrap(),
            ],
            "pm",
        )
        .unwrap();
        let grid = wigner(&mix(&pm), &WignerConfig::symmetric(3.0, 31)).unwrap();
        let n = 31;
        for iq in 0..n {
            for ip in 0..n {
                assert_abs_diff_eq!(
                    grid.value(iq, ip),
                    grid.value(n - 1 - iq, n - 1 - ip),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn leakage_guard_rejects_undersized_spaces() {
        // a [-6,6] grid displaces the vacuum far past a 20-level ladder
        let space = FockSpace::new(20);
        let rho = vacuum(space.dim());
        let result = wigner(&rho, &WignerConfig::default());
        assert!(matches!(result, Err(Error::TruncationLeakage { .. })));
    }

    #[test]
    fn purity_check_reports_coverage_failure() {
        // grid too small to cover the state
        let space = FockSpace::new(40);
        let rho = DensityMatrix::from_pure(&coherent_state(c(1.5, 0.0), space).unwrap());
        let grid = wigner(&rho, &WignerConfig::symmetric(1.0, 11)).unwrap();
        assert!(matches!(
            purity_identity_check(&rho, &grid),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn thermal_diagonal_commutes_with_number_operator() {
        let space = FockSpace::new(30);
        let th = thermal_state(1.0, space).unwrap();
        let n_op = crate::fock::number_operator(space);
        let comm = th.matrix() * &n_op - &n_op * th.matrix();
        let dev = comm.iter().map(|z: &C64| z.norm()).fold(0.0, f64::max);
        assert_abs_diff_eq!(dev, 0.0, epsilon = 1e-300);
    }

    #[test]
    fn points_iterate_row_major() {
        let space = FockSpace::new(20);
        let grid = wigner(&vacuum(space.dim()), &WignerConfig::symmetric(2.0, 5)).unwrap();
        let listed: Vec<_> = grid.points().collect();
        assert_eq!(listed.len(), 25);
        assert_eq!((listed[0].0, listed[0].1), (-2.0, -2.0));
        assert_eq!(listed[4].1, 2.0);
        assert_eq!(listed[5].0, -1.0);
        assert_abs_diff_eq!(listed[12].2, grid.value(2, 2), epsilon = 0.0);
    }
}
