//! Doubling a half-plane tile across its distinguished edge, two ways: by
//! reflection (the mirror-symmetric domain) and by rotation through π about
//! the edge midpoint (the point-symmetric domain). The two domains share
//! area, perimeter and the doubled combinatorics but are not congruent, and
//! their fundamental Dirichlet eigenvalues differ.

use super::meshing::mesh_tile;
use super::surface::{assemble_surface_oriented, GlueOrientation, SurfaceMesh};
use super::tiles::{TileSegmentKind, TileSpec};
use crate::error::{Error, Result};
use crate::schreier::{FullEdge, SchreierGraph};

#[derive(Debug, Clone)]
pub struct DoubledPair {
    /// C: tile glued to its reflection across the doubling edge.
    pub reflected: SurfaceMesh,
    /// S: tile glued to its rotation by π about the edge midpoint.
    pub rotated: SurfaceMesh,
    /// Planar outline of C (simple polygon, counterclockwise).
    pub reflected_outline: Vec<[f64; 2]>,
    /// Planar outline of S.
    pub rotated_outline: Vec<[f64; 2]>,
}

/// Validate the half-plane position of the tile: the unique glue edge lies
/// on the x-axis and every other vertex is strictly above it, so the tile
/// cannot overlap its reflected or rotated image.
fn doubling_edge(spec: &TileSpec) -> Result<usize> {
    let labels = spec.glue_labels();
    if labels.len() != 1 {
        return Err(Error::InvalidTile(format!(
            "doubling needs exactly one glue edge, found {}",
            labels.len()
        )));
    }
    let seg = spec.glue_segment(labels[0]).expect("label just listed");
    let e = spec.segment_edges(seg).start;
    let n = spec.vertices.len();
    let (a, b) = (e, (e + 1) % n);
    if spec.vertices[a][1].abs() > 1e-12 || spec.vertices[b][1].abs() > 1e-12 {
        return Err(Error::InvalidTile(
            "doubling edge must lie on the x-axis".to_string(),
        ));
    }
    for (v, p) in spec.vertices.iter().enumerate() {
        if v != a && v != b && p[1] <= 1e-12 {
            return Err(Error::InvalidTile(
                "tile must lie strictly in the upper half-plane; it would overlap its image"
                    .to_string(),
            ));
        }
    }
    Ok(e)
}

fn two_tile_graph(label: &str) -> SchreierGraph {
    SchreierGraph {
        vertex_count: 2,
        labels: vec![label.to_string()],
        full_edges: vec![FullEdge { a: 0, b: 1, label: 0 }],
        half_edges: vec![],
    }
}

/// The free boundary path of the tile from the doubling edge's head back to
/// its tail (CCW, the edge itself excluded).
fn free_path(spec: &TileSpec, e: usize) -> Vec<[f64; 2]> {
    let n = spec.vertices.len();
    (1..=n).map(|i| spec.vertices[(e + i) % n]).collect()
}

pub fn doubled_domains(spec: &TileSpec, refinement: usize) -> Result<DoubledPair> {
    let e = doubling_edge(spec)?;
    let label = spec.glue_labels()[0].to_string();
    let tmesh = mesh_tile(spec, refinement)?;
    let graph = two_tile_graph(&label);

    let reflected = assemble_surface_oriented(
        &graph,
        &tmesh,
        Some(&[GlueOrientation::Identity]),
        Some(vec!["upper".to_string(), "lower".to_string()]),
    )?;
    let rotated = assemble_surface_oriented(
        &graph,
        &tmesh,
        Some(&[GlueOrientation::Reversed]),
        Some(vec!["upper".to_string(), "lower".to_string()]),
    )?;

    // Planar outlines. The free path runs from the edge head b around to
    // the tail a; reflection glues its mirror image (traversed backwards to
    // stay CCW), rotation glues the rotated path forwards.
    let n = spec.vertices.len();
    let (xa, xb) = (spec.vertices[e][0], spec.vertices[(e + 1) % n][0]);
    let path = free_path(spec, e);
    let mut reflected_outline = path.clone();
    for p in path.iter().rev().skip(1).take(path.len() - 2) {
        reflected_outline.push([p[0], -p[1]]);
    }
    let mut rotated_outline = path.clone();
    for p in path.iter().skip(1).take(path.len() - 2) {
        rotated_outline.push([xa + xb - p[0], -p[1]]);
    }

    Ok(DoubledPair {
        reflected,
        rotated,
        reflected_outline,
        rotated_outline,
    })
}

/// Whether two planar vertex sets could be congruent, tested through the
/// multiset of pairwise squared distances. `false` certifies the sets are
/// not isometric; `true` is only a failure to distinguish.
pub fn distance_multisets_match(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let dists = |pts: &[[f64; 2]]| -> Vec<i64> {
        let mut out = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d2 = (pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2);
                out.push((d2 * 1e9).round() as i64);
            }
        }
        out.sort_unstable();
        out
    };
    dists(a) == dists(b)
}

/// Validate that a polygon is simple and CCW (reused for the outlines).
pub fn outline_is_simple_ccw(outline: &[[f64; 2]]) -> bool {
    super::tiles::validate(&TileSpec {
        name: "outline".to_string(),
        vertices: outline.to_vec(),
        rational_vertices: None,
        segment_starts: vec![0],
        segment_kinds: vec![TileSegmentKind::Free],
        symmetries: vec![],
    })
    .is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiler::tiles::builtin_tile;

    #[test]
    fn doubled_domains_share_area_and_topology_but_not_shape() {
        let spec = builtin_tile("ltile").unwrap();
        let pair = doubled_domains(&spec, 2).unwrap();
        for m in [&pair.reflected, &pair.rotated] {
            assert_eq!(m.tile_count(), 2);
            assert_eq!(m.euler_characteristic(), 1);
            assert_eq!(m.boundary_components().unwrap().len(), 1);
            assert!(m.cone_points(1e-9).is_empty());
            assert!((m.area() - 22.0).abs() < 1e-12);
        }
        assert!(outline_is_simple_ccw(&pair.reflected_outline));
        assert!(outline_is_simple_ccw(&pair.rotated_outline));
        assert_eq!(pair.reflected_outline.len(), 10);
        assert_eq!(pair.rotated_outline.len(), 10);
        // Same point sets would force matching distance multisets; these
        // differ, so C and S are provably non-congruent.
        assert!(!distance_multisets_match(
            &pair.reflected_outline,
            &pair.rotated_outline
        ));
        assert!(distance_multisets_match(
            &pair.reflected_outline,
            &pair.reflected_outline
        ));
    }

    #[test]
    fn rotation_gluing_reverses_the_node_pairing() {
        let spec = builtin_tile("ltile").unwrap();
        let pair = doubled_domains(&spec, 4).unwrap();
        let refl = &pair.reflected.gluings[0];
        let rot = &pair.rotated.gluings[0];
        assert_eq!(refl.node_pairs.len(), 5);
        for (a, b) in &refl.node_pairs {
            assert_eq!(a, b);
        }
        for (i, (a, b)) in rot.node_pairs.iter().enumerate() {
            assert_eq!(*a, refl.node_pairs[i].0);
            assert_eq!(*b, refl.node_pairs[rot.node_pairs.len() - 1 - i].0);
        }
        // The rotated surface still identifies endpoint corners crosswise,
        // so both domains are disks with 10 boundary corners.
        assert_eq!(
            pair.rotated.boundary_components().unwrap(),
            pair.reflected.boundary_components().unwrap()
        );
    }

    #[test]
    fn tiles_leaving_the_upper_half_plane_are_rejected() {
        let spec = builtin_tile("ltile").unwrap();
        // A vertex dropped onto the axis: the images would touch along more
        // than the doubling edge.
        let touching = spec
            .clone()
            .with_vertices(vec![
                [0.0, 0.0],
                [4.0, 0.0],
                [4.0, 1.0],
                [1.0, 0.0],
                [1.0, 3.0],
                [0.0, 3.0],
            ])
            .unwrap();
        assert!(matches!(
            doubled_domains(&touching, 1),
            Err(Error::InvalidTile(_))
        ));
        // Doubling edge off the axis.
        let mut lifted = spec.clone();
        for p in &mut lifted.vertices {
            p[1] += 0.25;
        }
        lifted.rational_vertices = None;
        assert!(matches!(
            doubled_domains(&lifted, 1),
            Err(Error::InvalidTile(_))
        ));
        // A tile with more than one glue edge cannot be doubled.
        let hexagon = builtin_tile("hexagon3").unwrap();
        assert!(doubled_domains(&hexagon, 1).is_err());
    }
}
