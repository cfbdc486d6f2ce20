//! Optimal-dimensionality sampling on the sphere.
//!
//! A signal band-limited at `L` is sampled on `L` iso-latitude rings, ring `k`
//! carrying `2k + 1` equispaced longitudes, for exactly `L²` samples. The
//! forward transform recovers the `L²` harmonic coefficients order by order,
//! from `|m| = L - 1` down to `0`, peeling each order's contribution off the
//! smaller rings so that every ring stays alias-free at the frequency being
//! analysed. The co-latitudes are ordered to keep every per-order Legendre
//! system well conditioned.
//!
//! Modules:
//! - [`sampling`]: candidate co-latitudes, ring orderings, grid cache files.
//! - [`basis`]: scaled associated Legendre functions and spin-weighted harmonics.
//! - [`pm_system`]: per-order Legendre blocks, condition numbers, solves.
//! - [`transform`]: forward and inverse transforms (scalar and spin).
//! - [`oracle`]: slow reference implementations used for validation.
//! - [`io`]: coefficient and signal file formats.
//! - [`experiments`]: accuracy, conditioning, error-surface and timing studies.

pub mod basis;
pub mod error;
pub mod experiments;
pub mod io;
pub mod oracle;
pub mod pm_system;
pub mod sampling;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sampling::{ColatitudeGrid, Measure, Ordering};
pub use transform::{HarmonicCoefficients, SpatialSamples};
