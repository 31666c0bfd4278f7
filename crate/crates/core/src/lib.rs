//! Extension theory of isometric operators in finite-dimensional
//! Pontryagin spaces.
//!
//! The crate models indefinite inner-product spaces and linear relations as
//! explicit subspaces, builds unitary boundary pairs (directly or from
//! unitary colligations), evaluates Weyl functions and gamma-fields,
//! estimates negative squares of Schur-type kernels, parametrizes proper
//! extensions with Krein-type resolvent formulas, produces generalized
//! coresolvents through the coupling construction, and realizes rational
//! generalized Schur functions as colligation-backed pairs.
//!
//! Entry points:
//! * [`pspace::PontryaginSpace`] and [`pspace::Subspace`] for the metric
//!   geometry;
//! * [`relation::LinearRelation`] for graphs, adjoints and classification;
//! * [`colligation::UnitaryColligation`] and [`boundary::BoundaryPair`]
//!   for the transfer-function machinery;
//! * [`extensions`] and [`gencores`] for resolvent formulas;
//! * [`realize`] for state-space realization from Taylor data;
//! * [`suite::run_all`] for the acceptance checks.
//!
//! ```
//! use krein_core::boundary::BoundaryPair;
//! use krein_core::colligation::UnitaryColligation;
//! use krein_core::linalg::{cr, identity, zeros};
//! use krein_core::pspace::PontryaginSpace;
//!
//! // the flip colligation has characteristic function lambda
//! let col = UnitaryColligation::new(
//!     PontryaginSpace::hilbert(1),
//!     zeros(1, 1),
//!     identity(1),
//!     identity(1),
//!     zeros(1, 1),
//! )
//! .unwrap();
//! let pair = BoundaryPair::from_colligation(col).unwrap();
//! let theta = pair.theta(cr(0.3)).unwrap();
//! assert!((theta[(0, 0)] - cr(0.3)).norm() < 1e-12);
//! ```
//!
//! All values are immutable after construction and freely shareable
//! between threads; the cached boundary parts use single-assignment cells
//! that are safe for concurrent readers.

pub mod boundary;
pub mod colligation;
pub mod error;
pub mod extensions;
pub mod fixtures;
pub mod gencores;
pub mod json;
pub mod kernels;
pub mod linalg;
pub mod pspace;
pub mod realize;
pub mod relation;
pub mod suite;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
