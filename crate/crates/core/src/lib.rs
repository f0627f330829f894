//! Exceptional points and entanglement in non-Hermitian bosonic chains.

pub mod chain;
pub mod closed_form;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod fit;
pub mod jordan;
pub mod ode;
pub mod pipeline;
pub mod scan;
pub mod series;
pub mod spectrum;

pub use error::{Error, Result};
