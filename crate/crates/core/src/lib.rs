//! An ideal point-particle gas sharing a vertical container with a single
//! macroscopic hard ball, everything falling in a constant gravitational field.
//!
//! The crate has two halves. The analytic half ([`analytics`], [`equilibrium`])
//! computes the excluded-volume exponential integrals, solves the coupled
//! buoyancy/energy equations for the floating height `y_A` and inverse
//! temperature `lambda_A`, and evaluates the asymptotic ball-height density.
//! The stochastic half ([`sampler`], [`dynamics`], [`stats`]) draws from the
//! microcanonical ensemble, runs the event-driven Newtonian dynamics with
//! specular or Lambertian wall reflections, and compares the observed
//! occupation measures against the analytic predictions.
//!
//! [`validation`] bundles the end-to-end checks used by the acceptance suite
//! and by `gasball validate`.

pub mod analytics;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod roots;
pub mod sampler;
pub mod stats;
pub mod validation;

pub use analytics::{GasLawPoint, Partials};
pub use dynamics::{Event, EventKind, ReflectionMode, Simulation};
pub use equilibrium::{EquilibriumSolution, HeightProfile};
pub use error::{Error, Result};
pub use geometry::{BaseRegion, ModelParams};
pub use sampler::{McmcConfig, SystemState};
pub use stats::{EmpiricalSummary, PredictedMarginal};
