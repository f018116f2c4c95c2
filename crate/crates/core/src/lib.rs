pub mod dt;
pub mod error;
pub mod gen;
pub mod geom;
pub mod metrics;
pub mod repair;
pub mod tri;
pub mod verify;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
