//! Self-similar solutions of the viscous and viscous-capillary Riemann
//! problem for the p-system
//!
//! ```text
//!     v_t - σ(w)_x = 0,    w_t - v_x = 0,
//! ```
//!
//! computed through the wave-measure fixed point: each half-axis carries a
//! normalized density `φ±` whose cumulative integral reproduces the profile
//! `w(y)`, `y = x/t`, and a single middle state `w*` glues the two halves so
//! that the velocity closure `v(L) = v_r` holds.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. File formats, the
//! command line and configuration live in the `selfsim` companion crate.
//!
//! Module map:
//!
//! * [`constitutive`]: stress laws `σ(w)` and their regime metadata.
//! * [`grid`] and [`wave_measure`]: the discretized `y`-axis and the
//!   viscous / WKB wave measures with envelope diagnostics.
//! * [`riemann`]: the fixed-point map, middle state, `v` reconstruction, and
//!   the excised phase-dynamics branch.
//! * [`boundary`]: the half-line boundary Riemann problem.
//! * [`eigen`]: generalized eigenstructure for a general diffusion matrix.
//! * [`nsystem`]: family decomposition and interaction sources for
//!   `N`-component systems.
//! * [`limit`]: ε-sweeps, jump detection and classification, phase
//!   diagnostics.
//! * [`oracle`]: an explicit time-dependent integrator used as an
//!   independent check of the self-similar profiles.

#![no_std]
#![forbid(unsafe_code)]
// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod boundary;
pub mod constitutive;
pub mod eigen;
mod error;
pub mod grid;
pub mod limit;
pub mod linalg;
pub mod nsystem;
pub mod oracle;
pub mod quad;
pub mod riemann;
pub mod wave_measure;

pub use crate::constitutive::{LawKind, StressLaw};
pub use crate::error::{Error, Result};
pub use crate::grid::ProfileGrid;
pub use crate::riemann::{RiemannData, SelfSimilarSolution, SolverConfig};
pub use crate::wave_measure::{Side, WaveMeasure};
