//! Constant-term extraction for linear Diophantine systems via simplicial cone
//! decompositions.

pub mod error;
pub mod exactalg;
pub mod matform;
pub mod decompose;
pub mod conegf;
pub mod unimod;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
