//! Qubit-field energy harvesting dynamics.
//!
//! A dense numerical toolkit for studying when a quantized field mode (the
//! source) drives a two-level system (the harvester) from its ground state
//! to its excited state at a fixed time, deterministically across a whole
//! family of source preparations. The crate covers:
//!
//! * truncated Fock-space state construction (coherent, cat, thermal,
//!   mixtures, sign-pattern superposition ensembles) — [`fock`];
//! * Jaynes-Cummings, full-Rabi, and classically driven qubit dynamics with
//!   eigendecomposition-based propagation — [`dynamics`];
//! * entropy and distinguishability measures with Pinsker/Audenaert bound
//!   checkers — [`measures`];
//! * Wigner functions on phase-space grids via displaced parity — [`wigner`];
//! * protocol-level checks: deterministic-harvesting verification, optimal
//!   stopping times, decomposition invariance, convex and superposition
//!   closure, robustness sweeps, entropy cycles — [`deh`];
//! * a scenario runner with deterministic CSV/JSON output — [`scenario`].
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod deh;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod measures;
pub mod scenario;
pub mod wigner;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, EigenSystem, StateVector};
