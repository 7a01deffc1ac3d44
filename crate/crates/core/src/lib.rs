pub mod error;
pub mod netgen;
pub mod pipeline;
pub mod sim;
pub mod staging;
pub mod stats;
pub mod traffic;
pub mod util;

pub use error::{Error, Result};
