//! Exact two-qubit density-matrix simulation and phase-trajectory analysis
//! for GHZ-like states `(|00> + e^{i phi}|11>)/sqrt(2)` under noise.
//!
//! The crate is layered bottom-up:
//!
//! - [`qmat`]: 2x2/4x4 complex matrices, density-matrix validation, Kraus application.
//! - [`states`]: gates, the preparation circuit, the excited state `rho'`, and the
//!   dissipative cascade `|11> -> rho' -> |00>`.
//! - [`channels`]: depolarizing, dephasing, amplitude damping and T1/T2 channels,
//!   inserted before the CNOT, after it, or after the phase gate.
//! - [`witness`]: Pauli expectations and the `M2, M2', W2, W2'` witnesses.
//! - [`oracle`]: closed-form noisy density matrices, radius law, T1 inversion.
//! - [`sampler`]: seeded shot sampling of the three measurement settings.
//! - [`trajectory`]: phase sweeps, noise schedules, geometry fits, segmentation
//!   and phase-shift detection.
//! - [`cli`]: the `ghz-phase` command line (sweep, oracle, analyze, plot).
//!
//! ```
//! use ghz_phase::states::ghz_density;
//! use ghz_phase::witness::{witness_values, QUANTUM_BOUND};
//!
//! let w = witness_values(&ghz_density(0.3).unwrap()).unwrap();
//! assert!((w.radius - QUANTUM_BOUND).abs() < 1e-12);
//! ```

pub mod channels;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod qmat;
pub mod sampler;
pub mod states;
pub mod trajectory;
pub mod witness;

pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, DensityMatrix};
