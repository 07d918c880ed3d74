//! Finite element solver for liquid crystal network membranes.

pub mod analytic;
pub mod energy;
pub mod error;
pub mod io;
pub mod material;
pub mod mesh;
pub mod solver;

pub use energy::{Deformation, EnergyModel, EnergyReport};
pub use error::{Error, Result};
pub use material::{Director, MaterialProgram};
pub use mesh::Mesh;
pub use solver::{run_flow, FlowTrace, Solver, SolverConfig};
