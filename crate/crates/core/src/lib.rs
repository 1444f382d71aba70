//! Exact arithmetic in finitely generated torsion-free nilpotent groups, and
//! growth experiments for their automorphisms.
//!
//! Elements are Mal'cev coordinate vectors over a Hall basis; products are
//! computed exactly. Growth rates of `n -> l(phi^n(g))` are then estimated
//! from exact or proxy word lengths.

pub mod autom;
pub mod bfs;
pub mod builtins;
pub mod collect;
pub mod constructions;
pub mod error;
pub mod fit;
pub mod group;
pub mod growth;
pub mod hall;
pub mod json;
pub mod lattice;
pub mod linalg;
pub mod magnus;
pub mod poly;
pub mod scalar;

pub use autom::{spectral_report, Endomorphism, SpectralReport};
pub use bfs::{geodesic_length, CayleyBall};
pub use constructions::{free_nilpotent, semidirect_unipotent, surface_quotient, SemidirectSpec};
pub use error::{Error, Result};
pub use group::{GroupSpec, Malcev, MalcevVector, Polycyclic, WordExpr};
pub use growth::{growth_series, GrowthSeries, LengthMode};
pub use hall::HallBasis;
pub use lattice::SubgroupLattice;
pub use linalg::IntegerMatrix;

/// Estimators at double precision.
pub type EntropyEstimate = fit::EntropyEstimate<f64>;
pub type PolyFit = fit::PolyFit<f64>;
pub type FitConfig = fit::FitConfig<f64>;
