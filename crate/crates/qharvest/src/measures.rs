//! Distinguishability and entropy functionals: fidelity to a pure target,
//! von Neumann entropy, quantum relative entropy, trace and Hilbert-Schmidt
//! distances, and the Pinsker/Audenaert bound checkers.
//!
//! Entropies are returned in nats. The bound checkers convert to bits where
//! their defining formulas do, so each checker matches its formula verbatim.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, DensityMatrix, StateVector};

/// Eigenvalues above this count as support of a state.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;
/// Eigenvalues at or below this count as kernel of a state.
pub const KERNEL_THRESHOLD: f64 = 1e-12;
/// Slack used when declaring that a bound holds.
pub const BOUND_SLACK: f64 = 1e-9;
/// Default mixing weight for [`smooth`].
pub const DEFAULT_SMOOTHING: f64 = 1e-9;

/// Outcome of a two-sided inequality check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs + BOUND_SLACK,
            slack: rhs - lhs,
        }
    }
}

/// <psi| rho |psi>.
pub fn fidelity_to_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::Dimension {
            context: "fidelity_to_pure",
            expected: rho.dim(),
            actual: psi.dim(),
        });
    }
    let v = psi.amplitudes();
    Ok((v.adjoint() * rho.matrix() * v)[(0, 0)].re)
}

fn clamped_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    rho.eigenvalues()
        .into_iter()
        .map(|x| x.clamp(0.0, 1.0))
        .collect()
}

/// Von Neumann entropy -sum lambda ln lambda in nats, with 0 ln 0 = 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    clamped_spectrum(rho)
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Quantum relative entropy S(rho || sigma) = Tr[rho (ln rho - ln sigma)]
/// in nats, evaluated in sigma's eigenbasis. Returns `f64::INFINITY` when
/// rho has support (above [`SUPPORT_THRESHOLD`]) inside sigma's kernel
/// (eigenvalues at or below [`KERNEL_THRESHOLD`]).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension {
            context: "relative_entropy",
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let eig_sigma = eig_hermitian(sigma.matrix())?;
    let mut cross = 0.0;
    let mut kernel_mass = 0.0;
    for (j, &s_j) in eig_sigma.eigenvalues.iter().enumerate() {
        let v_j = eig_sigma.eigenvectors.column(j);
        let overlap = (v_j.adjoint() * rho.matrix() * v_j)[(0, 0)].re.max(0.0);
        if s_j <= KERNEL_THRESHOLD {
            kernel_mass += overlap;
        } else {
            cross -= overlap * s_j.clamp(0.0, 1.0).ln();
        }
    }
    if kernel_mass > SUPPORT_THRESHOLD {
        return Ok(f64::INFINITY);
    }
    let neg_entropy: f64 = clamped_spectrum(rho)
        .iter()
        .filter(|&&x| x > SUPPORT_THRESHOLD)
        .map(|&x| x * x.ln())
        .sum();
    Ok(neg_entropy + cross)
}

/// S(rho || sigma) in bits.
pub fn relative_entropy_bits(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(relative_entropy(rho, sigma)? / std::f64::consts::LN_2)
}

/// Unhalved Schatten 1-norm of rho - sigma.
pub fn one_norm_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension {
            context: "one_norm_distance",
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(diff
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.abs())
        .sum())
}

/// Trace distance, the halved metric (1/2)||rho - sigma||_1. The bound
/// checkers use the unhalved [`one_norm_distance`] where their formulas do.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * one_norm_distance(rho, sigma)?)
}

/// Hilbert-Schmidt distance sqrt(Tr[(rho - sigma)^2]).
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension {
            context: "hs_distance",
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    Ok((rho.matrix() - sigma.matrix())
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Pinsker inequality check: (1/2)||rho - sigma||_1^2 <= ln(2) S_bits, i.e.
/// the right-hand side equals the relative entropy in nats. An infinite
/// relative entropy makes the bound vacuous; it is reported as holding with
/// infinite slack.
pub fn pinsker_check(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    let t = one_norm_distance(rho, sigma)?;
    let lhs = 0.5 * t * t;
    let rhs = relative_entropy(rho, sigma)?;
    Ok(BoundReport::new(lhs, rhs))
}

/// Right-hand side of the dimension-independent relative-entropy bound,
/// T log2(d) + min(-T log2 T, 1/e) - T log2(lambda_min) / 2, in bits.
/// `t_norm` is the unhalved 1-norm distance, so it lives in [0, 2].
pub fn audenaert_bound(t_norm: f64, dim: usize, lambda_min: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&t_norm) {
        return Err(Error::Domain {
            what: format!("t_norm must lie in [0, 2], got {t_norm}"),
        });
    }
    if dim < 2 {
        return Err(Error::Domain {
            what: format!("dimension must be at least 2, got {dim}"),
        });
    }
    if !(lambda_min > 0.0 && lambda_min <= 1.0) {
        return Err(Error::Domain {
            what: format!("lambda_min must lie in (0, 1], got {lambda_min}"),
        });
    }
    let entropy_term = if t_norm == 0.0 {
        0.0
    } else {
        (-t_norm * t_norm.log2()).min(1.0 / std::f64::consts::E)
    };
    Ok(t_norm * (dim as f64).log2() + entropy_term - t_norm * lambda_min.log2() / 2.0)
}

/// Full bound chain for approximate harvesting: from mu = S_bits(target ||
/// rho_a1) and eps = S_bits(rho_b1 || rho_b2), the Pinsker and triangle
/// steps give delta = sqrt(2 ln2 mu) + sqrt(2 ln2 eps), and the
/// [`audenaert_bound`] at T = delta caps S_bits(target || rho_a2). Reports
/// the measured S_bits(target || rho_a2) as lhs against that cap.
///
/// A rank-deficient `rho_a2` makes both sides infinite; the report carries
/// the infinities rather than failing.
pub fn approximate_deh_chain(
    rho_a1: &DensityMatrix,
    rho_a2: &DensityMatrix,
    target: &StateVector,
    mu: f64,
    eps: f64,
) -> Result<BoundReport> {
    if rho_a1.dim() != rho_a2.dim() || rho_a1.dim() != target.dim() {
        return Err(Error::Dimension {
            context: "approximate_deh_chain",
            expected: rho_a1.dim(),
            actual: rho_a2.dim().max(target.dim()),
        });
    }
    if mu < 0.0 || eps < 0.0 {
        return Err(Error::Domain {
            what: format!("relative entropies must be nonnegative, got mu={mu}, eps={eps}"),
        });
    }
    let ln2 = std::f64::consts::LN_2;
    let delta = (2.0 * ln2 * mu).sqrt() + (2.0 * ln2 * eps).sqrt();
    // the 1-norm never exceeds 2, so the chain is evaluated at the capped T
    let t = delta.min(2.0);
    let lambda_min = rho_a2
        .eigenvalues()
        .first()
        .copied()
        .unwrap_or(0.0)
        .clamp(0.0, 1.0);
    let rhs = if lambda_min > KERNEL_THRESHOLD {
        audenaert_bound(t, rho_a2.dim(), lambda_min)?
    } else {
        f64::INFINITY
    };
    let target_rho = DensityMatrix::from_pure(target);
    let lhs = relative_entropy_bits(&target_rho, rho_a2)?;
    Ok(BoundReport::new(lhs, rhs))
}

/// (1 - eta) rho + eta I/d; full-rank regularization for bound suites.
pub fn smooth(rho: &DensityMatrix, eta: f64) -> DensityMatrix {
    let d = rho.dim();
    let mut m = rho.matrix().scale(1.0 - eta);
    for k in 0..d {
        m[(k, k)] += num_complex::Complex64::new(eta / d as f64, 0.0);
    }
    DensityMatrix::symmetrized(m).expect("smoothing preserves density-matrix invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{evolve, identity, ComplexMatrix, StateVector};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn maximally_mixed(dim: usize) -> DensityMatrix {
        DensityMatrix::new(identity(dim).scale(1.0 / dim as f64)).unwrap()
    }

    fn rand_unit(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    fn random_full_rank_qubit(seed: &mut u64) -> DensityMatrix {
        let g = ComplexMatrix::from_fn(2, 2, |_, _| {
            c(rand_unit(seed) - 0.5, rand_unit(seed) - 0.5)
        });
        let m = &g * g.adjoint() + identity(2).scale(1e-6);
        let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
        DensityMatrix::new(m.scale(1.0 / tr)).unwrap()
    }

    #[test]
    fn fidelity_edge_cases() {
        let psi = StateVector::basis(2, 1);
        let rho = DensityMatrix::from_pure(&psi);
        assert_abs_diff_eq!(fidelity_to_pure(&rho, &psi).unwrap(), 1.0, epsilon = 1e-14);

        let phi = StateVector::basis(2, 0);
        assert_abs_diff_eq!(fidelity_to_pure(&rho, &phi).unwrap(), 0.0, epsilon = 1e-14);

        let mixed = maximally_mixed(2);
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(fidelity_to_pure(&mixed, &plus).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn entropy_reference_values() {
        let pure = DensityMatrix::from_pure(&StateVector::basis(3, 1));
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            von_neumann_entropy(&maximally_mixed(2)),
            2.0f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn entropy_invariant_under_unitary_conjugation() {
        let mut seed = 5u64;
        let rho = {
            let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                c(rand_unit(&mut seed) - 0.5, rand_unit(&mut seed) - 0.5)
            });
            let m = &g * g.adjoint();
            let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
            DensityMatrix::new(m.scale(1.0 / tr)).unwrap()
        };
        let h = {
            let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                c(rand_unit(&mut seed) - 0.5, rand_unit(&mut seed) - 0.5)
            });
            &g + g.adjoint()
        };
        let eig = crate::linalg::eig_hermitian(&h).unwrap();
        let evolved = evolve(&rho, &eig, 0.83).unwrap();
        assert_abs_diff_eq!(
            von_neumann_entropy(&rho),
            von_neumann_entropy(&evolved),
            epsilon = 1e-10
        );
    }

    #[test]
    fn relative_entropy_reference_values() {
        let zero = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        assert_abs_diff_eq!(relative_entropy(&zero, &zero).unwrap(), 0.0, epsilon = 1e-10);

        let mixed = maximally_mixed(2);
        assert_abs_diff_eq!(
            relative_entropy(&zero, &mixed).unwrap(),
            2.0f64.ln(),
            epsilon = 1e-10
        );

        let one = DensityMatrix::from_pure(&StateVector::basis(2, 1));
        assert!(relative_entropy(&zero, &one).unwrap().is_infinite());
    }

    #[test]
    fn distance_reference_values() {
        let zero = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        let one = DensityMatrix::from_pure(&StateVector::basis(2, 1));
        assert_abs_diff_eq!(trace_distance(&zero, &zero).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(one_norm_distance(&zero, &one).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            hs_distance(&zero, &one).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn norm_ordering_on_random_pairs() {
        // ||rho - sigma||_2 <= ||rho - sigma||_1, checked through the
        // eigenvalue route on random pairs
        let mut seed = 99u64;
        for _ in 0..50 {
            let a = random_full_rank_qubit(&mut seed);
            let b = random_full_rank_qubit(&mut seed);
            let l1 = one_norm_distance(&a, &b).unwrap();
            let l2 = hs_distance(&a, &b).unwrap();
            assert!(l2 <= l1 + 1e-12);
        }
    }

    #[test]
    fn pinsker_reference_and_random() {
        let zero = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        let report = pinsker_check(&zero, &zero).unwrap();
        assert!(report.holds);
        assert_abs_diff_eq!(report.lhs, 0.0, epsilon = 1e-14);

        let mixed = maximally_mixed(2);
        let report = pinsker_check(&zero, &mixed).unwrap();
        assert_abs_diff_eq!(report.lhs, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rhs, 2.0f64.ln(), epsilon = 1e-12);
        assert!(report.holds);

        let mut seed = 123u64;
        for _ in 0..200 {
            let a = random_full_rank_qubit(&mut seed);
            let b = random_full_rank_qubit(&mut seed);
            assert!(pinsker_check(&a, &b).unwrap().holds);
        }
    }

    #[test]
    fn pinsker_with_disjoint_support_holds_vacuously() {
        let zero = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        let one = DensityMatrix::from_pure(&StateVector::basis(2, 1));
        let report = pinsker_check(&zero, &one).unwrap();
        assert!(report.holds);
        assert!(report.rhs.is_infinite());
    }

    #[test]
    fn audenaert_reference_values() {
        assert_abs_diff_eq!(audenaert_bound(0.0, 2, 0.5).unwrap(), 0.0, epsilon = 1e-14);
        // T=1, d=2, lambda_min=1/2: 1 + min(0, 1/e) + 1/2 = 1.5 bits
        assert_abs_diff_eq!(audenaert_bound(1.0, 2, 0.5).unwrap(), 1.5, epsilon = 1e-14);
        assert!(audenaert_bound(2.5, 2, 0.5).is_err());
        assert!(audenaert_bound(1.0, 2, 0.0).is_err());
        assert!(audenaert_bound(1.0, 1, 0.5).is_err());
    }

    #[test]
    fn audenaert_bounds_relative_entropy_on_random_pairs() {
        let mut seed = 2024u64;
        for _ in 0..200 {
            let a = random_full_rank_qubit(&mut seed);
            let b = random_full_rank_qubit(&mut seed);
            let t = one_norm_distance(&a, &b).unwrap();
            let lmin = b.eigenvalues()[0].clamp(1e-12, 1.0);
            let bound = audenaert_bound(t, 2, lmin).unwrap();
            let s = relative_entropy_bits(&a, &b).unwrap();
            assert!(s <= bound + BOUND_SLACK, "S={s} bound={bound}");
        }
    }

    #[test]
    fn chain_reference_cases() {
        let target = StateVector::basis(2, 1);
        let pure = DensityMatrix::from_pure(&target);
        let report = approximate_deh_chain(&pure, &pure, &target, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(report.lhs, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rhs, 0.0, epsilon = 1e-12);
        assert!(report.holds);

        // lightly mixed copy of the target
        let near = smooth(&pure, 1e-3);
        let mu = relative_entropy_bits(&DensityMatrix::from_pure(&target), &near).unwrap();
        let report = approximate_deh_chain(&near, &near, &target, mu, 0.0).unwrap();
        assert!(report.holds);
        assert!(report.slack > 0.0);
    }

    #[test]
    fn relative_entropy_zero_iff_equal_on_test_corpus() {
        let mut seed = 31415u64;
        for _ in 0..50 {
            let a = random_full_rank_qubit(&mut seed);
            let b = random_full_rank_qubit(&mut seed);
            let s = relative_entropy(&a, &b).unwrap();
            assert!(s >= -1e-12);
            if hs_distance(&a, &b).unwrap() > 1e-8 {
                assert!(s > 0.0);
            }
            assert!(relative_entropy(&a, &a).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn smoothing_is_full_rank_and_close() {
        let pure = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        let sm = smooth(&pure, DEFAULT_SMOOTHING);
        assert!(sm.eigenvalues()[0] > 0.0);
        assert!(hs_distance(&pure, &sm).unwrap() < 1e-8);
    }
}
