//! Viscosity-framework solvers for degenerate complex Monge–Ampère equations
//!
//! ```text
//! (ω + dd^c φ)^n = e^{εφ} W
//! ```
//!
//! on a flat torus or a euclidean ball in `ℂⁿ`, `n ≤ 3`, together with grid-level
//! verifiers for plurisubharmonicity, sub/supersolutions and comparison.

pub mod bellman;
pub mod error;
pub mod grid;
pub mod harness;
pub mod hermitian;
pub mod regularization;
pub mod solver;
pub mod viscosity;

pub use bellman::{bellman_value, build_bellman_family, BellmanFamily, MemberRef};
pub use error::{Error, Result};
pub use grid::{BackgroundField, DensityField, Direction, DirectionSet, DomainKind, DomainSpec, GridFunction};
pub use hermitian::{det_plus, is_semipositive, HermitianForm, Semipositivity};
