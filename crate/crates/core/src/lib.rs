//! Zero-energy eigenstates of the 1D infinite square well with Dirac delta
//! potentials.
//!
//! The bare infinite well has no zero-energy eigenstate, but a well dressed
//! with delta spikes can: away from the spikes a zero-energy wavefunction
//! has zero curvature, so it is piecewise linear, and each spike kinks it
//! by the jump rule `psi'(x0+) - psi'(x0-) = (c/gamma) psi(x0)` with
//! `gamma = hbar^2/2m`. That makes the *inverse* problem — given the
//! state, find the potential — a pencil-and-paper exercise, and this crate
//! the machinery around it:
//!
//! - [`model`]: wells, polyline states, delta potentials, admissibility
//!   validation, exact norms (dual-mode arithmetic via [`scalar::Scalar`]);
//! - [`jeopardy`]: the inversion itself, the forward shooting
//!   construction, expectation values with their exact virial cancellation
//!   `<T> + <V> = 0`, and round-trip checking;
//! - [`spectrum`]: general-energy transfer-matrix spectra, so the special
//!   zero-energy state can be seen sitting inside an ordinary spectrum;
//! - [`probgen`]: seeded, platform-independent worksheet generation and
//!   grading;
//! - [`document`] / [`plot`]: strict, byte-deterministic JSON interchange
//!   plus CSV/SVG rendering.
//!
//! Exact rationals are used everywhere they can be: a generated worksheet
//! problem, its solution, and its energy bookkeeping involve no floating
//! point at all.
//!
//! # Example
//!
//! Invert the tent state on walls ±1 (`gamma = 1`): its single kink at the
//! origin demands exactly one attractive spike of strength `-2`, and the
//! forward shot rebuilds the tent from that spike alone.
//!
//! ```
//! use zerowell::jeopardy::{forward_construct, invert};
//! use zerowell::{Knot, PiecewiseLinearState, Scalar, WellConfig};
//!
//! fn r(num: i64, den: i64) -> Scalar {
//!     Scalar::rational(num, den).unwrap()
//! }
//!
//! let tent = PiecewiseLinearState::new(
//!     vec![
//!         Knot::new(r(-1, 1), r(0, 1)),
//!         Knot::new(r(0, 1), r(1, 1)),
//!         Knot::new(r(1, 1), r(0, 1)),
//!     ],
//!     WellConfig::default(),
//! )?;
//!
//! let potential = invert(&tent)?;
//! assert_eq!(potential.spikes().len(), 1);
//! assert_eq!(potential.spikes()[0].position(), &r(0, 1));
//! assert_eq!(potential.spikes()[0].coefficient(), &r(-2, 1));
//!
//! let rebuilt = forward_construct(&potential)?.expect("tuned spike admits E = 0");
//! assert_eq!(rebuilt, tent);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod document;
pub mod jeopardy;
pub mod model;
pub mod plot;
pub mod probgen;
pub mod scalar;
pub mod spectrum;

pub use document::{Document, DocumentError};
pub use jeopardy::{EnergyReport, JeopardyError, RoundTripReport};
pub use model::{
    DeltaPotential, DeltaSpike, Knot, ModelError, PiecewiseLinearState, SegmentSlope,
    ValidationReport, Violation, WellConfig,
};
pub use plot::{PlotError, PlotFormat, PlotOptions};
pub use probgen::{
    Difficulty, GradeOptions, GradeReport, ProbGenError, Problem, SpikeGrade, Verdict,
};
pub use scalar::{Rational, Scalar, ScalarError};
pub use spectrum::{
    Eigenvalue, PropagatorState, ScanInfo, ScanParams, SpectrumError, SpectrumResult,
};
