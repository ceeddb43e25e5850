//! Near-field wireless simulation toolkit.
//!
//! Discrete-array and continuous-aperture line-of-sight channels, power and
//! degrees-of-freedom analysis, beamsteering/beamfocusing and TTD hybrid
//! beamformers, near-field MUSIC localization, and secrecy-rate evaluation.

pub mod analysis;
pub mod beamforming;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod pls;
pub mod sensing;
pub mod table;

pub use error::{NfError, Result};
pub use geometry::{ArrayGeometry, Carrier, Point3, PolarPoint};
