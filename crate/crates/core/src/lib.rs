//! Exact solutions of the focusing discrete Hirota equation on a plane-wave
//! background: spectral uniformization, Darboux dressing, rogue-wave
//! determinants, direct scattering and independent verification.

pub mod closedform;
pub mod darboux;
pub mod dynamics;
pub mod error;
pub mod figures;
pub mod grid;
pub mod io;
pub mod jet;
pub mod linalg;
#[cfg(test)]
mod mpref;
pub mod scattering;
pub mod seed;
pub mod solution;
pub mod spectral;
pub mod verify;

pub use error::{HirotaError, Result};
pub use num_complex::Complex64;
pub use spectral::{CutSide, Params, Sheet};

/// Caps the worker pool used for grid evaluation. Call once, early.
#[cfg(feature = "parallel")]
pub fn set_thread_cap(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn set_thread_cap(_n: usize) {}
