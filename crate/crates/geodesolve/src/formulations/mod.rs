//! The formulation registry: every assigned and unassigned formulation in
//! the catalog, built either as a [`SmoothProgram`] for the nonlinear solver
//! or as a [`LinearProgram`] / [`SdpProblem`] for the LP/MILP/SDP engines.

mod cycles;
mod linear;
mod sdp;
mod smooth;

pub use cycles::{fundamental_cycle_basis, CycleBasis};
pub use linear::{
    build_matrix_lp, build_udgp_milp, lp_solution_to_sym, Cone, LinRow, LinearProgram,
    MatrixLpKind, SymIndex,
};
pub use sdp::{build_sdp, SdpKind, SdpProblem, SdpRow, DEFAULT_TRACE_WEIGHT};
pub use smooth::{
    assemble_dgp_start, assemble_udgp_point, build_dgp, build_udgp_minlp, build_udgp_smooth,
    extract_assignment, finite_difference_gradient, max_gradient_error, Block, DiffFn,
    SmoothProgram, UdgpMinlpKind, UdgpSmoothKind, VarLayout, YBlock,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("unknown formulation name `{0}`")]
    UnknownFormulation(String),
    #[error("instance has {m} distances but only {pairs} point pairs: assignment constraints are structurally infeasible")]
    TooManyDistances { m: usize, pairs: usize },
}

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// Row relation for linear and affine constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

/// The assigned-problem formulation kinds.
///
/// The `Cyc*` kinds linearize the edge differences `x_u - x_v` into `z`
/// variables; cycle constraints over a fundamental basis can be layered on
/// top of any of them. `Cycle` is the z-quartic with cycle constraints always
/// present; `CycleSimple` is the same program without them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgpKind {
    Quartic,
    System1,
    System2,
    PushPull,
    PullPush,
    Cycle,
    CycleSimple,
    CycSystem1,
    CycSystem2,
    CycPushPull,
}

/// Options shared by the smooth builders.
#[derive(Debug, Clone, Copy)]
pub struct BuildOpts {
    /// Append centroid rows (one per coordinate) fixing translations.
    pub centroid: bool,
    /// Add cycle constraints to the `CycSystem*`/`CycPushPull` kinds.
    /// Ignored by `Cycle` (always on) and the non-z kinds.
    pub cycle_constraints: bool,
    /// Use the assignment rows exactly as printed in the source catalog
    /// (at-most-one distance per index, exactly-one index per pair), which
    /// forces a complete distance list. The default orientation assigns
    /// every distance to exactly one pair and uses each pair at most once.
    pub assignment_literal: bool,
}

impl Default for BuildOpts {
    fn default() -> Self {
        BuildOpts {
            centroid: true,
            cycle_constraints: false,
            assignment_literal: false,
        }
    }
}

/// Maps a benchmark formulation name to a builder kind plus the
/// cycle-constraint flag. Accepts the thirteen assigned-problem names.
pub fn parse_dgp_formulation(name: &str) -> Result<(DgpKind, bool), BuildError> {
    let kind = match name {
        "quartic" => (DgpKind::Quartic, false),
        "system1" => (DgpKind::System1, false),
        "system2" => (DgpKind::System2, false),
        "pushpull" => (DgpKind::PushPull, false),
        "pullpush" => (DgpKind::PullPush, false),
        "cycle" => (DgpKind::Cycle, true),
        "cyclesimple" => (DgpKind::CycleSimple, false),
        "cycsimplesys1" => (DgpKind::CycSystem1, false),
        "cycsys1" => (DgpKind::CycSystem1, true),
        "cycsimplesys2" => (DgpKind::CycSystem2, false),
        "cycsys2" => (DgpKind::CycSystem2, true),
        "cycsimplepushpull" => (DgpKind::CycPushPull, false),
        "cycpushpull" => (DgpKind::CycPushPull, true),
        _ => return Err(BuildError::UnknownFormulation(name.to_string())),
    };
    Ok(kind)
}

/// All assigned-problem formulation names understood by
/// [`parse_dgp_formulation`].
pub const DGP_FORMULATION_NAMES: [&str; 13] = [
    "quartic",
    "system1",
    "system2",
    "pushpull",
    "pullpush",
    "cycle",
    "cyclesimple",
    "cycsimplesys1",
    "cycsys1",
    "cycsimplesys2",
    "cycsys2",
    "cycsimplepushpull",
    "cycpushpull",
];
