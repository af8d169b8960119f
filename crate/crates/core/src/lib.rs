//! Fourier transforms of Henstock–Kurzweil integrable functions through the
//! twice-integrated kernel `v_s(t)`.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod inversion;
pub mod kernels;
pub mod omega;
pub mod quadrature;
pub mod special;
pub mod transform;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
