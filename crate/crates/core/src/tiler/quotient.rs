//! Quotients of an assembled surface by a free involution of its tile
//! copies. Gluings fixed by the involution (as unordered edges) become
//! mirror lines of the quotient and carry Neumann conditions; everything
//! that was already surface boundary keeps Dirichlet. This is the standard
//! symmetry reduction: eigenfunctions of the quotient's mixed problem are
//! exactly the even eigenfunctions upstairs.

use super::surface::{
    assemble_surface_oriented, BCAssignment, BoundaryCondition, BoundaryOrigin, SurfaceMesh,
};
use crate::error::{Error, Result};
use crate::schreier::{FullEdge, HalfEdge, SchreierGraph};
use std::collections::BTreeSet;

fn validate_involution(g: &SchreierGraph, perm: &[usize]) -> Result<()> {
    let n = g.vertex_count;
    if perm.len() != n {
        return Err(Error::NotAnAutomorphism(format!(
            "permutation has length {} for {} tiles",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return Err(Error::NotAnAutomorphism(
                "tile map is not a permutation".to_string(),
            ));
        }
        seen[v] = true;
    }
    for v in 0..n {
        if perm[perm[v]] != v {
            return Err(Error::NotAnAutomorphism(
                "tile map is not an involution".to_string(),
            ));
        }
        if perm[v] == v {
            return Err(Error::NotAnAutomorphism(format!(
                "tile map fixes tile {v}; the quotient needs a free involution"
            )));
        }
    }
    // Label-preserving automorphism: the image of every edge is an edge of
    // the same label, half-edges included.
    let full: BTreeSet<(usize, usize, usize)> = g
        .full_edges
        .iter()
        .map(|e| (e.a.min(e.b), e.a.max(e.b), e.label))
        .collect();
    for e in &g.full_edges {
        let (x, y) = (perm[e.a], perm[e.b]);
        if !full.contains(&(x.min(y), x.max(y), e.label)) {
            return Err(Error::NotAnAutomorphism(format!(
                "image of {}-edge ({}, {}) is not an edge",
                g.labels[e.label], e.a, e.b
            )));
        }
    }
    let half: BTreeSet<(usize, usize)> =
        g.half_edges.iter().map(|h| (h.vertex, h.label)).collect();
    for h in &g.half_edges {
        if !half.contains(&(perm[h.vertex], h.label)) {
            return Err(Error::NotAnAutomorphism(format!(
                "image of the {} half-edge at {} is not a half-edge",
                g.labels[h.label], h.vertex
            )));
        }
    }
    Ok(())
}

/// Quotient a surface by a free involution of its tiles.
///
/// Returns the quotient surface (tiles named by orbit representatives,
/// mirror segments marked) together with the induced mixed boundary
/// assignment: Neumann on the mirrors, Dirichlet on the inherited boundary.
pub fn quotient_by_involution(
    m: &SurfaceMesh,
    tile_perm: &[usize],
) -> Result<(SurfaceMesh, BCAssignment)> {
    let g = &m.graph;
    validate_involution(g, tile_perm)?;
    for glue in &m.gluings {
        if glue.orientation != super::surface::GlueOrientation::Identity {
            return Err(Error::NotAnAutomorphism(
                "quotients of reversed gluings are not supported".to_string(),
            ));
        }
    }

    // Orbits {v, perm v}, represented by the larger member so the quotient
    // tiles inherit the conventional names.
    let mut reps: Vec<usize> = (0..g.vertex_count)
        .filter(|&v| v == v.max(tile_perm[v]))
        .collect();
    reps.sort_unstable();
    let orbit_of = |v: usize| -> usize {
        let r = v.max(tile_perm[v]);
        reps.binary_search(&r).expect("orbit representative")
    };

    let mut q_full: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut q_half: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut mirrors: BTreeSet<(usize, usize)> = BTreeSet::new(); // (quotient tile, label)
    for e in &g.full_edges {
        if tile_perm[e.a] == e.b {
            // The involution swaps the two sides of this gluing: its image
            // in the quotient is a mirror line.
            mirrors.insert((orbit_of(e.a), e.label));
            q_half.insert((orbit_of(e.a), e.label));
        } else {
            let (x, y) = (orbit_of(e.a), orbit_of(e.b));
            q_full.insert((x.min(y), x.max(y), e.label));
        }
    }
    for h in &g.half_edges {
        q_half.insert((orbit_of(h.vertex), h.label));
    }

    let q_graph = SchreierGraph {
        vertex_count: reps.len(),
        labels: g.labels.clone(),
        full_edges: q_full
            .into_iter()
            .map(|(a, b, label)| FullEdge { a, b, label })
            .collect(),
        half_edges: q_half
            .into_iter()
            .map(|(vertex, label)| HalfEdge { vertex, label })
            .collect(),
    };
    if !q_graph.is_label_regular() {
        return Err(Error::NotAnAutomorphism(
            "quotient graph lost label-regularity".to_string(),
        ));
    }

    let names: Vec<String> = reps.iter().map(|r| m.tile_names[*r].clone()).collect();
    let mut quotient = assemble_surface_oriented(&q_graph, &m.tile_mesh, None, Some(names))?;
    for seg in &mut quotient.boundary_segments {
        if seg.origin == BoundaryOrigin::UngluedGlue {
            if let Some(label) = &seg.label {
                if let Some(li) = q_graph.label_index(label) {
                    if mirrors.contains(&(seg.tile, li)) {
                        seg.origin = BoundaryOrigin::Mirror;
                    }
                }
            }
        }
    }
    let conditions = quotient
        .boundary_segments
        .iter()
        .map(|s| match s.origin {
            BoundaryOrigin::Mirror => BoundaryCondition::Neumann,
            _ => BoundaryCondition::Dirichlet,
        })
        .collect();
    Ok((quotient, BCAssignment { conditions }))
}
