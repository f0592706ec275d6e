//! Moving-base geometry of frontal surfaces.

pub mod catalog;
pub mod classify;
pub mod compat;
pub mod exprmap;
pub mod frontal;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod reconstruct;

pub use grid::GridSpec;
