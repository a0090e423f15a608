//! Theme-aware prompt optimization and image-generation evaluation.
//!
//! The pipeline classifies an original text-to-image prompt by shooting
//! theme, appends the theme's optimal camera description, drives an image
//! generator through an alignment-check/regenerate loop, and evaluates the
//! results (Fréchet distance, alignment score, prompt consistency, toxicity,
//! PCA feature analysis). Every model-dependent step sits behind a backend
//! trait with a deterministic seeded fake, so the full method runs — and is
//! tested — without any external service.

pub mod backends;
pub mod classifier;
pub mod config;
pub mod corpus;
pub mod error;
pub mod featfile;
pub mod features;
pub mod linalg;
pub mod metrics;
pub mod par;
pub mod pipeline;
pub mod registry;
pub mod selection;

pub use error::{Error, Result};
