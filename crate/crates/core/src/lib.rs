//! Molecular vibronic spectra through their Fourier components.
//!
//! A vibronic spectrum groups the output distribution of a bosonic circuit by
//! an integer weight vector: bin `Ω` collects every outcome `m` with
//! `ω·m = Ω`. Its discrete Fourier components are expectation values of a
//! phase-shift operator, which this crate evaluates by several routes:
//!
//! * [`spectra::exact_fourier_gaussian`]: closed form for displaced squeezed
//!   vacuum inputs (Gaussian boson sampling / zero-temperature spectra).
//! * [`estimators::fourier_fock`]: randomized permanent estimator for Fock
//!   inputs through passive circuits.
//! * [`estimators::fourier_fock_squeezed`]: Kan-formula hafnian and loop
//!   hafnian estimators for squeezed and displaced Fock inputs.
//! * [`oracle`]: brute-force Fock enumeration used as ground truth.
//! * [`sparse`]: peak recovery from few Fourier evaluations when the grid is
//!   too large to transform densely.
//!
//! The [`cli`] module implements the `vibro run` batch front end.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod gaussian;
pub mod hafnian;
pub mod linalg;
pub mod oracle;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
