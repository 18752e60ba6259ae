//! Point-wise geometry of the tangent bundle of a Finsler manifold.
//!
//! Every quantity is evaluated at a chart point of the slit tangent bundle.
//! Derivatives are exact: all kernels are generic over [`Scalar`] and are
//! differentiated by lifting the point to nested [`Dual`] numbers.

// `!(r < tol)` is deliberate: a NaN residual must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// tensor contractions read best as index loops
#![allow(clippy::needless_range_loop)]

pub mod contact;
pub mod dual;
pub mod error;
pub mod finsler;
pub mod foliation;
pub mod frame;
pub mod geometry;
pub mod hygiene;
pub mod jet;
pub mod linalg;
pub mod metrics;
pub mod sampling;
pub mod sasaki;
pub mod spray;
pub mod suite;
pub mod verdict;

pub use contact::{
    contact_structure, nijenhuis, sasakian_obstruction, tilde_nabla, ContactData, PhiField,
};
pub use dual::{Dual, Scalar};
pub use error::{GeometryError, Result};
pub use finsler::{cartan_lowered, fundamental_tensor, homogeneity_report, FinslerFunction};
pub use foliation::{foliation_suite, Foliation, FoliationSuite};
pub use frame::{AdaptedFrame, FrameField, TangentVector, VectorField};
pub use jet::{fd_oracle, partial, JetPoint, ScalarField, Slot};
pub use metrics::Metric;
pub use sampling::{project_to_indicatrix, sample_indicatrix, sample_points};
pub use sasaki::{connection_table, koszul_nabla, ConnectionTable, Discrepancy};
pub use spray::SprayData;
pub use suite::{run_suite, SuiteKind, SuiteOptions, SuiteReport};
pub use verdict::{Tolerances, Verdict};
