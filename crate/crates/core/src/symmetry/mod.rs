//! Lie symmetries of the vorticity equation: generators, finite point
//! transformations, structure constants and the subalgebra catalog.

pub mod algebra;
pub mod catalog;
pub mod generator;
pub mod quasipoly;
pub mod transform;

pub use algebra::{
    adjoint, commutator, decompose_in_span, sample_points, sample_points_in, structure_constants, Decomposition,
    PairResult, StructureTable,
};
pub use catalog::{
    closure_check, describe_combination, normalize_params, normalize_time, parse_quasi, subalgebra_catalog, ClassId, ClassParams,
    ClosureReport, Subalgebra, CLOSURE_TOL,
};
pub use generator::{standard_generators, Named, Point, SymmetryGenerator, ZFunction};
pub use quasipoly::{Oscillation, QuasiPoly, Term};
pub use transform::{
    discrete_symmetry, disturbance_stream_relation, flow, integrate_flow, platzman, platzman_field, transform_solution, z_shift,
    DiscreteSymmetry, DisturbanceDirection, PlatzmanDirection, PointTransformation,
};
