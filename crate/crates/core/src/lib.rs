//! Bell-CHSH correlators for a free massive real scalar field.
//!
//! Three independent routes to the same family of correlation functions:
//!
//! * [`modular`]: closed forms built from spectral inner products of test
//!   functions localized in complementary wedges, plus the two-qubit baseline;
//! * [`quadrature`]: direct 4-dimensional integration of smeared Hadamard and
//!   Pauli-Jordan pairings of wedge bump functions in 1+1 dimensions;
//! * [`squeezed`]: a truncated two-mode squeezed state with dichotomic
//!   pair-swapping operators.
//!
//! [`bounded`] evaluates correlators of the bounded operators
//! `1/(1+phi(h)^2)` through their Fourier representation, and [`search`] runs
//! seeded random searches over any of the correlators.

pub mod bounded;
pub mod config;
pub mod error;
pub mod kernels;
pub mod modular;
pub mod par;
pub mod qmc;
pub mod quadrature;
pub mod search;
pub mod special;
pub mod squeezed;
pub mod table;
pub mod testfn;

pub use error::{Error, Result};
pub use kernels::{Event, KernelConvention, Mass};
pub use modular::{ProductSet, SpectralParams};
pub use quadrature::{IntegralResult, QuadConfig, QuadMethod};
pub use testfn::{WedgeBump, WedgeSide};
