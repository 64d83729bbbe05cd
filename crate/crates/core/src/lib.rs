pub mod atlas;
pub mod error;
pub mod blaschke;
pub mod brjuno;
pub mod cubic;
pub mod lamina;
pub mod rays;

pub use error::{Error, Result};
