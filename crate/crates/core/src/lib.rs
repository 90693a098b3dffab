//! Multi-frequency far-field imaging of acoustic sources in the plane.
//!
//! The crate synthesizes broadband far-field data radiated by compactly
//! supported sources of the Helmholtz equation and reconstructs the source
//! support with sampling-type indicator functions:
//!
//! * full-aperture data gives an indicator that behaves like a superposition
//!   of `J0` kernels centered on the support,
//! * a single observation direction yields a strip with that direction as its
//!   normal,
//! * several directions yield the intersection of strips, a convex polygon
//!   enclosing the support.
//!
//! The pipeline is `Scene` → [`forward::synthesize`] → [`forward::FarFieldSamples`]
//! → [`imaging`] indicators → strips and hulls in [`geometry`].

pub mod cli;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod imaging;
pub mod io;
pub mod specfun;
pub mod srcexpr;

pub use error::{Error, Result};
pub use geometry::Vec2;
