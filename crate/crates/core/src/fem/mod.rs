//! Finite-element side of the benchmarks: structured meshes, Q4 / H8
//! stiffness, contact frames against a flat obstacle, problem instances and
//! their file format.

mod contact;
mod element;
mod examples;
pub mod io;
mod mesh;
mod problem;

pub use contact::{contact_frames, ContactGeometry, Plane};
pub use element::{assemble_h8, assemble_q4_plane_stress, elasticity_matrix, element_stiffness, element_stresses};
pub use examples::{build_example1, build_example2, generate, ExampleKind, ExampleParams, GeneratedExample, Support};
pub use io::{parse_problem, problem_to_bytes, read_problem, write_problem, ProblemFile, TripletDump};
pub use mesh::{DofMap, Material, StructuredMesh};
pub use problem::{LoadStep, ProblemInstance};
