//! Executable natural extensions, semicrossed-product elements, covariant
//! representations and certified operator norms.

pub mod cli;
pub mod dynsys;
pub mod element;
pub mod error;
pub mod extension;
pub mod funcalg;
pub mod norms;
pub mod repr;
pub mod sample;
pub mod verify;

pub use error::{Error, Result};
