//! Quantum colored lozenge tilings on the triangular lattice.
//!
//! A tiling is stored as an integer height per lattice vertex. Along every
//! oriented edge the height changes by `+1` (a lozenge side) or `-2` (a short
//! diagonal). The crate builds the quasi-circular regions and boxed hexagons,
//! enumerates and samples the volume-weighted ensemble `q^{2V}`, assembles the
//! frustration-free flip Hamiltonian and evaluates the cut entanglement of the
//! colored ground state.
//!
//! ```
//! use lozenge::geometry::build_hexagon_region;
//! use lozenge::ensemble::{enumerate_configs, macmahon_count, DEFAULT_CAP};
//!
//! let region = build_hexagon_region(2, 2, 2).unwrap();
//! let set = enumerate_configs(&region, DEFAULT_CAP).unwrap();
//! assert_eq!(set.len() as u64, 20);
//! assert_eq!(macmahon_count(2, 2, 2), 20u32.into());
//! ```

pub mod cli;
pub mod dynamics;
pub mod ensemble;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod mcmc;
pub mod numeric;
pub mod spectral;
pub mod tiling;

pub use error::{Error, Result};
pub use geometry::{AxialCoord, Axis, LatticeRegion};
pub use tiling::HeightConfig;
