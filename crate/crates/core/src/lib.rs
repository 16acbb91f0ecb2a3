//! Grid digitization of conic sections by exact midpoint measurements.
//!
//! The digitizer walks a monotonic conic arc one grid step at a time. Each
//! step compares candidate points through midpoint measurements carried out
//! in exact integer arithmetic, gates every measurement by a necessary and
//! sufficient validity condition, and falls back to a closed-form
//! out-of-control rule when no measurement is valid. A separate numerical
//! oracle measures true curve distances independently and is used by the
//! test suite to verify validity, accuracy and global optimality claims.
//!
//! Modules:
//! - [`conic`]: exact integer conic algebra (residues, gradients, polars).
//! - [`segmentation`]: clipping and splitting into monotonic segments.
//! - [`engine`]: the incremental stepper with validity gating.
//! - [`oracle`]: footpoint distances, pole construction, exhaustive search.
//! - [`knuth_t`]: a faithful 4-connected register-machine digitizer used as
//!   a head-to-head comparison baseline.
//! - [`job`]: batch front end (job files, reports, benchmark).

pub mod conic;
pub mod engine;
pub mod error;
pub mod job;
pub mod knuth_t;
pub mod oracle;
pub mod render;
pub mod segmentation;

pub use conic::{Conic, Gradient4, HalfPoint, PolarDistance, PolarLine};
pub use error::{Error, Result};
pub use segmentation::{Frame, MonotonicSegment};
