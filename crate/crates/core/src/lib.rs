pub mod cli;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod models;
pub mod signvar;
pub mod spectral;
pub mod totalpos;

pub use error::{Result, TpdsError};
