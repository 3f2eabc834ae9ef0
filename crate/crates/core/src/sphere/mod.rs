//! Gauss–Legendre grids, Legendre functions and spherical-harmonic transforms.

pub mod field;
pub mod grid;
pub mod legendre;
pub mod spectral;

pub use field::{fmt_f64, read_field_csv, write_field_csv, ScalarField};
pub use grid::{gauss_legendre_nodes, SphereGrid};
pub use legendre::{assoc_legendre, assoc_legendre_scalar, legendre_poly};
pub use spectral::{laplacian_spectral, sh_analysis, sh_synthesis, SpectralCoeffs, TransformPlan};
