pub mod error;
pub mod frame;
pub mod jet;
pub mod numerics;
pub mod solutions;
pub mod solver;
pub mod sphere;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use frame::Frame;
pub use jet::{Jet, Scalar};
