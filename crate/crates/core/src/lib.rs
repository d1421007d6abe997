pub mod centroid;
pub mod cli;
pub mod cnf;
pub mod digraph;
pub mod error;
pub mod exact;
pub mod flow_poly;
pub mod phi_graph;
pub mod polytope;
pub mod vertex_enum;

pub use error::{Error, Result};
pub use cnf::{brute_force_sat, parse_dimacs, CnfFormula, SatResult};
pub use digraph::{enumerate_cycles, Cycle, WeightedDigraph};
pub use exact::{QMatrix, QVector, Rational};
pub use flow_poly::{
    build_flow_polyhedron, decide_sat_via_gap, expected_vertices, marked_coordinate, verify_cycle_vertices, FlowPolyhedron,
    GapReport, VerifyMode, VerifyReport,
};
pub use phi_graph::{build_phi_graph, classify_negative, NegativeCycles, PhiGraph};
pub use polytope::{normalize_to_unit_cube, AffineMap, HPolyhedron, Halfspace, Hyperplane};
pub use vertex_enum::{count_vertices, enumerate_vertices, face_vertex_count, is_vertex, EnumCaps, VertexSet};
