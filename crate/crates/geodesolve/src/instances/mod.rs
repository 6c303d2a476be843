//! Instance generation and file formats.
//!
//! Three generator families cover the benchmark: planted Euclidean graphs
//! (always realizable by construction), a zoo of topological graph types
//! with unit or random weights, and disk graphs thresholded from coordinate
//! files. All generators are deterministic in the seed.

mod generators;
mod io;

pub use generators::{
    gen_disk_graph, gen_euclidean, gen_graph_type, GraphType, GraphTypeParams, NormKind,
    GRAPH_TYPE_NAMES,
};
pub use io::{
    instance_to_string, load_dgp, load_instance, load_points, load_solution, load_udgp,
    parse_points, save_dgp, save_solution, save_udgp, solution_to_string, Instance, IoError,
};
