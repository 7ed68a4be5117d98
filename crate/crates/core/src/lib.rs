//! Exact-arithmetic toolkit for alternating trilinear forms.
//!
//! From a trivector gamma in the third exterior power of k^9 the crate
//! computes the associated family of skew matrices, extracts the Coble
//! cubic and its rank loci, checks projective-duality certificates
//! pointwise over small prime fields, and exposes the invariant theory of
//! trivectors on k^8: the trace trilinear form, stability oracles, and the
//! characteristic-2 hyperdiscriminant. A small Hilbert-series module checks
//! the Verlinde polynomial against a weighted-hypersurface resolution.
//!
//! All arithmetic is exact, over Q or F_p with p < 2^31.

pub mod bits;
pub mod coble;
pub mod error;
pub mod exterior;
pub mod field;
pub mod linalg;
pub mod mpoly;
pub mod stability;
pub mod verlinde;

pub use error::{Error, Result};
pub use exterior::{parse_trivector, write_trivector, Covector, Multivector};
pub use field::{sample_int_scalar, sample_uniform, seeded_stream, FieldScalar, FieldSpec, Stream};
pub use linalg::{Matrix, SkewMatrix};
pub use mpoly::MPoly;
