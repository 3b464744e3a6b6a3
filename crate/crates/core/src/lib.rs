//! Exact computation with separated nets in nilpotent Lie groups.
//!
//! The crate works in exponential coordinates with exact rational
//! arithmetic. Group laws come from structure constants (through the BCH
//! series) or are given directly, and everything downstream (lattice nets,
//! dyadic tiles, discrepancy counts, quasicrystals, exotic nets) is built on
//! [`group::GroupLaw`].

pub mod bch;
pub mod criteria;
pub mod dyadic;
pub mod error;
pub mod exotic;
pub mod group;
pub mod io;
pub mod linalg;
pub mod net;
pub mod poly;
pub mod quasicrystal;
pub mod rational;
pub mod render;
pub mod tiling;

pub use error::{Error, Result};
pub use group::{synthesize_law, GroupLaw, GroupSpec, Metric, Point};
pub use rational::Q;
