//! Laplacian of the Gauss map for hypersurfaces in 2-step nilpotent Lie
//! groups with left-invariant metrics.
//!
//! The crate is layered bottom-up:
//!
//! * [`algebra`]: metric 2-step nilpotent Lie algebras, the bracket and the
//!   `J(Z)` operators;
//! * [`invariant`]: connection, curvature and Ricci tensor on
//!   left-invariant fields;
//! * [`group`]: coordinate models of the group (exponential coordinates
//!   and polarized Nil coordinates);
//! * [`surface`] and [`frame`]: parametric hypersurfaces, the Gauss map,
//!   the adapted frame and second fundamental form;
//! * [`laplacian`]: closed-form `ΔG` in general, Heisenberg-type and
//!   Heisenberg form, plus a finite-difference Laplace-Beltrami oracle;
//! * [`checks`]: harmonicity, stability and Gauss-Codazzi checkers;
//! * [`catalog`] and [`job`]: built-in charts and JSON-driven batch runs.

pub mod algebra;
pub mod autodiff;
pub mod catalog;
pub mod checks;
pub mod error;
pub mod expr;
pub mod frame;
pub mod group;
pub mod invariant;
pub mod job;
pub mod laplacian;
pub mod surface;

pub use algebra::{AlgebraVector, NilpotentAlgebra};
pub use error::{GeometryError, Result};
pub use expr::{parse_expression, Expr};
pub use frame::{adapted_frame, AdaptedFrame, FrameKind};
pub use group::{CoordinateModel, GroupPoint, ModelKind};
pub use job::{run, JobConfig, ReportDocument};
pub use laplacian::{harmonicity, HarmonicityVerdict, LaplacianReport, Method, SurfacePoint};
pub use surface::{FdConfig, ShapeData, SurfaceChart};
