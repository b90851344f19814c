//! A full model specification: window, connection system and intensity.

use crate::complex::{build_complex, ComplexSample, MarkKey};
use crate::connect::ConnectionSystem;
use crate::error::{Error, Result};
use crate::seed::SeedStream;
use crate::space::{Point, Window};

#[derive(Clone, Debug)]
pub struct Model {
    pub window: Window,
    pub system: ConnectionSystem,
    pub beta: f64,
}

impl Model {
    pub fn new(window: Window, system: ConnectionSystem, beta: f64) -> Result<Model> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("intensity must be positive, got {beta}")));
        }
        Ok(Model { window, system, beta })
    }

    pub fn alpha(&self) -> usize {
        self.system.alpha()
    }

    pub fn with_window(&self, window: Window) -> Model {
        Model { window, ..self.clone() }
    }

    pub fn with_beta(&self, beta: f64) -> Result<Model> {
        Model::new(self.window.clone(), self.system.clone(), beta)
    }

    /// Poisson points of the realization seeded by `stream`.
    pub fn sample_points(&self, stream: SeedStream) -> Result<Vec<Point>> {
        self.window.sample_poisson(self.beta, &mut stream.named("points").rng())
    }

    /// Mark key of the realization seeded by `stream`.
    pub fn mark_key(stream: SeedStream) -> MarkKey {
        stream.named("marks").into()
    }

    pub fn sample(&self, stream: SeedStream) -> Result<ComplexSample> {
        let points = self.sample_points(stream)?;
        build_complex(&points, &self.system, Model::mark_key(stream))
    }
}
