//! 2D triangle meshes: the SMESH format, structured generators, P1
//! assembly into a network, and extraction of the measure complex.

mod assembly;
mod generators;
mod mesh;

pub use assembly::{
    assemble_p1, assemble_p1_with, cell_average_field, coarsen_complex, grid_blocks,
    mesh_to_complex, mesh_to_complex_with, vertex_field_csv,
};
pub use generators::{make_annulus, make_cylinder, make_disk, make_dumbbell, make_rectangle};
pub use mesh::{load_mesh, load_mesh_from, save_mesh, save_mesh_to, BoundaryEdge, Topology, TriangleMesh};
