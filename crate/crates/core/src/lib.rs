pub mod algebra;
pub mod blowup;
pub mod catalog;
pub mod charts;
pub mod classify;
pub mod error;
pub mod scheme;
pub mod singular;
pub mod symmetry;

pub use error::{GrsError, Result};
