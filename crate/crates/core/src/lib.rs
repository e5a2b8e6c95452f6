pub mod algebra;
pub mod calculus;
pub mod courant;
pub mod gk;
pub mod identities;
pub mod pipeline;
pub mod error;
pub mod jet;
pub mod metric;
pub mod par;
pub mod reduction;
pub mod sample;

pub use error::{Error, Result};
