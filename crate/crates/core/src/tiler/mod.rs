//! Flat surface construction: polygonal tiles, their triangulations, and
//! the assembly of one tile copy per graph vertex with reflection gluings
//! along like-labeled edges. Includes the free-involution quotient (mirror
//! boundary) and the reflected/rotated doubling pair.

mod doubling;
mod meshing;
mod quotient;
mod surface;
mod tiles;

pub use doubling::{
    distance_multisets_match, doubled_domains, outline_is_simple_ccw, DoubledPair,
};
pub use meshing::{mesh_tile, NodeClass, TileMesh};
pub use quotient::quotient_by_involution;
pub use surface::{
    assemble_surface, assemble_surface_oriented, boundary_pattern, check_boundary_against_walks,
    combinatorial_euler, corner_classes, exact_cone_points, BCAssignment, BoundaryCondition,
    BoundaryOrigin, BoundarySegment, ConePoint, CornerClass, ExactConeReport, GlueOrientation,
    GluingRecord, SurfaceMesh, SurfaceTriangle,
};
pub use tiles::{builtin_tile, validate, Point, TileSegmentKind, TileSpec, TileSymmetry};
