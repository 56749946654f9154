//! Mutually unbiased bases (MUBs) and the correlation-based entanglement
//! criteria built on them.
//!
//! The crate is organised bottom-up:
//!
//! - [`qmath`]: dense complex matrices, pure states, density matrices,
//!   Haar sampling and the Schmidt decomposition.
//! - [`mubs`]: finite-field arithmetic, constructions of complete MUB sets,
//!   the unbiasedness verifier and the quartic overlap sum.
//! - [`criteria`]: mutual predictability, the `I_m` sum and its separable
//!   bound, isotropic and Bell-diagonal families.
//! - [`multipartite`]: the totally antisymmetric (Aharonov) state, the
//!   anti-correlation function and the `J_m` criterion.
//! - [`cv`]: two-mode squeezed states measured with sign-binned position and
//!   momentum.
//! - [`optimize`]: maximisation of `I_m` over local unitaries.
//! - [`sampling`]: finite-shot estimation of the mutual predictabilities.
//! - [`io`]: JSON file formats for MUB sets and density matrices.
//!
//! A violation of any of the separable bounds certifies entanglement; a
//! non-violation certifies nothing.

pub mod criteria;
pub mod cv;
pub mod error;
pub mod io;
pub mod mubs;
pub mod multipartite;
pub mod optimize;
pub mod qmath;
pub mod sampling;
pub mod settings;

pub use error::{Error, Result};
pub use settings::Settings;
