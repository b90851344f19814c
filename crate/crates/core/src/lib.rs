pub mod complex;
pub mod config;
pub mod connect;
pub mod error;
pub mod estimate;
pub mod functional;
pub mod geometry;
pub mod model;
pub mod moments;
pub mod normapprox;
pub mod render;
pub mod runner;
pub mod seed;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
pub use estimate::{McBudget, MonteCarloEstimate};
pub use model::Model;
pub use seed::{SeedStream, SimRng};
