use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("generator {0} is not an involution")]
    NonInvolutiveGenerator(String),

    #[error("coset action is not transitive")]
    NotTransitive,

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("invalid tile: {0}")]
    InvalidTile(String),

    #[error("graph/tile mismatch: {0}")]
    GraphTileMismatch(String),

    #[error("invalid refinement: {0}")]
    InvalidRefinement(usize),

    #[error("mesh construction failed: {0}")]
    Mesh(String),

    #[error("not an automorphism of the gluing graph: {0}")]
    NotAnAutomorphism(String),

    #[error("boundary condition error: {0}")]
    BoundaryCondition(String),

    #[error("empty degree-of-freedom set after applying boundary conditions")]
    EmptyDofSet,

    #[error("eigensolver failed to converge: {0}")]
    NoConvergence(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("transplantation mismatch on edge {edge}: residual {residual:e}")]
    GluingInconsistency { edge: String, residual: f64 },

    #[error("incompatible meshes: {0}")]
    IncompatibleMeshes(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
