pub mod archive;
pub mod engine;
pub mod error;
pub mod export;
pub mod hypervolume;
pub mod market_data;
pub mod portfolio;
pub mod preferences;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
