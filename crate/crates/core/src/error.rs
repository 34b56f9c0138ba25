use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HirotaError {
    #[error("spectral parameter is zero")]
    ZeroArgument,
    #[error("z = {0} lies on the branch cut; a cut-side hint is required")]
    CutAmbiguity(String),
    #[error("z = {0} is within 1e-8 of a branch point; use the jet path")]
    NearBranchPoint(String),
    #[error("eigenvector is degenerate at branch point z = {0} (xi^2 = 1)")]
    BranchPointEigenvector(String),
    #[error("branch point is not removable: odd local coefficient ratio {0:.3e}")]
    NonremovableSingularity(f64),
    #[error("eigenvector has both components zero")]
    ZeroEigenvector,
    #[error("Gram matrix is numerically singular (|det| = {det:.3e}, scale {scale:.3e})")]
    SingularGram { det: f64, scale: f64 },
    #[error("z = {0} hits a pole of the Darboux matrix")]
    PoleHit(String),
    #[error("Re(ln zeta) vanishes at z = {0}; the velocity is undefined")]
    StationaryPhase(String),
    #[error("velocities {0} and {1} coincide")]
    TieBreak(f64, f64),
    #[error("transfer matrix overflow at site {0}")]
    Overflow(i64),
    #[error("1 - xi^2 vanishes at z = {0}")]
    BranchPointDegeneracy(String),
    #[error("Newton iteration did not converge near z = {0}")]
    NonConvergence(String),
    #[error("grid too sparse: {0}")]
    GridTooSparse(String),
    #[error("blowup: |v| = {value:.3e} at n = {n}, t = {t}")]
    Blowup { n: i64, t: f64, value: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, HirotaError>;

pub(crate) fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}
