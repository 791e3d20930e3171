pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod boolfn;
pub mod encode;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod quantum;
pub mod sim;

pub use error::{Error, Result};
