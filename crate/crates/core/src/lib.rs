//! Certificate-producing constructions of hexagonal-grid subdivisions in
//! lazily generated infinite graphs.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod flow;
pub mod graph;
pub mod model;
pub mod planar;
pub mod rays;
pub mod token;
pub mod transfer;
pub mod verify;
pub mod weaver;

pub use error::{Error, Result};
pub use graph::{FamilySpec, LazyGraph};
pub use token::VertexToken;
