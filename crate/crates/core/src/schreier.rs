//! Schreier multigraphs with the half-edge convention: vertices are cosets,
//! each involutive generator contributes either a full edge (2-cycle) or a
//! half-edge (fixed point) at every vertex. Orientability of the glued
//! surface and its boundary-walk structure are decided here, purely
//! combinatorially.

use crate::error::{Error, Result};
use crate::group::CosetAction;
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FullEdge {
    pub a: usize,
    pub b: usize,
    pub label: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct HalfEdge {
    pub vertex: usize,
    pub label: usize,
}

/// Undirected labeled multigraph in which every vertex meets every label
/// exactly once, either across a full edge or on a half-edge stub.
#[derive(Debug, Clone, Serialize)]
pub struct SchreierGraph {
    pub vertex_count: usize,
    /// Display names of the generator labels, parallel to label indices.
    pub labels: Vec<String>,
    pub full_edges: Vec<FullEdge>,
    pub half_edges: Vec<HalfEdge>,
}

/// Build the graph of an involutive coset action. Generators must square to
/// the identity as permutations; fixed cosets become half-edges.
pub fn build_schreier(action: &CosetAction, labels: Vec<String>) -> Result<SchreierGraph> {
    if labels.len() != action.perms.len() {
        return Err(Error::Config(format!(
            "{} labels supplied for {} generators",
            labels.len(),
            action.perms.len()
        )));
    }
    let n = action.coset_count;
    let mut full_edges = Vec::new();
    let mut half_edges = Vec::new();
    for (l, perm) in action.perms.iter().enumerate() {
        for v in 0..n {
            if perm[perm[v]] != v {
                return Err(Error::NonInvolutiveGenerator(labels[l].clone()));
            }
            match perm[v] {
                w if w == v => half_edges.push(HalfEdge { vertex: v, label: l }),
                w if w > v => full_edges.push(FullEdge { a: v, b: w, label: l }),
                _ => {}
            }
        }
    }
    Ok(SchreierGraph {
        vertex_count: n,
        labels,
        full_edges,
        half_edges,
    })
}

impl SchreierGraph {
    /// The permutation a label induces on vertices (half-edges are fixed
    /// points).
    pub fn label_permutation(&self, label: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.vertex_count).collect();
        for e in &self.full_edges {
            if e.label == label {
                p[e.a] = e.b;
                p[e.b] = e.a;
            }
        }
        p
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// Every vertex must meet every label exactly once.
    pub fn is_label_regular(&self) -> bool {
        let mut count = vec![0usize; self.vertex_count * self.labels.len()];
        for e in &self.full_edges {
            count[e.a * self.labels.len() + e.label] += 1;
            count[e.b * self.labels.len() + e.label] += 1;
        }
        for h in &self.half_edges {
            count[h.vertex * self.labels.len() + h.label] += 1;
        }
        count.iter().all(|&c| c == 1)
    }

    /// DOT rendering: full edges as labeled undirected edges, half-edges as
    /// dashed stubs to invisible point nodes.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph {name} {{\n"));
        out.push_str("  layout=neato;\n  node [shape=circle];\n");
        for v in 0..self.vertex_count {
            out.push_str(&format!("  {v};\n"));
        }
        for e in &self.full_edges {
            out.push_str(&format!(
                "  {} -- {} [label=\"{}\"];\n",
                e.a, e.b, self.labels[e.label]
            ));
        }
        for (k, h) in self.half_edges.iter().enumerate() {
            out.push_str(&format!(
                "  stub{k} [shape=point, width=0.05, label=\"\"];\n  {} -- stub{k} [label=\"{}\", style=dashed];\n",
                h.vertex, self.labels[h.label]
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Outcome of the combinatorial orientability test: a proper 2-coloring of
/// the gluing graph, or an odd cycle (as both a vertex cycle and the labels
/// of its gluings).
#[derive(Debug, Clone, Serialize)]
pub enum OrientabilityVerdict {
    Orientable {
        /// Side color (0/1) per vertex, constant on half-edges.
        two_coloring: Vec<u8>,
    },
    Nonorientable {
        /// Cycle vertices v0, v1, …, v{k-1} with an edge vk-1 → v0 closing it.
        witness_vertices: Vec<usize>,
        /// Label of the gluing joining consecutive cycle vertices.
        witness_labels: Vec<String>,
    },
}

impl OrientabilityVerdict {
    pub fn is_orientable(&self) -> bool {
        matches!(self, OrientabilityVerdict::Orientable { .. })
    }
}

/// Each reflection gluing flips the side a tile shows, so the surface is
/// orientable exactly when the full-edge multigraph is bipartite. Half-edges
/// impose no constraint. The witness cycle is canonicalized to start at its
/// smallest vertex and run toward the smaller neighbor.
pub fn is_orientable(g: &SchreierGraph) -> OrientabilityVerdict {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.vertex_count];
    for e in &g.full_edges {
        adj[e.a].push((e.b, e.label));
        adj[e.b].push((e.a, e.label));
    }
    let mut color: Vec<i8> = vec![-1; g.vertex_count];
    // parent[v] = (vertex we discovered v from, label of that edge)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.vertex_count];
    for root in 0..g.vertex_count {
        if color[root] != -1 {
            continue;
        }
        color[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, l) in &adj[v] {
                if color[w] == -1 {
                    color[w] = 1 - color[v];
                    parent[w] = Some((v, l));
                    queue.push_back(w);
                } else if color[w] == color[v] && !(w == v) {
                    return odd_cycle_witness(g, &parent, v, w, l);
                } else if w == v {
                    // A loop would be an immediate odd cycle; the half-edge
                    // convention prevents loops, but guard anyway.
                    return OrientabilityVerdict::Nonorientable {
                        witness_vertices: vec![v],
                        witness_labels: vec![g.labels[l].clone()],
                    };
                }
            }
        }
    }
    OrientabilityVerdict::Orientable {
        two_coloring: color.iter().map(|&c| c as u8).collect(),
    }
}

fn odd_cycle_witness(
    g: &SchreierGraph,
    parent: &[Option<(usize, usize)>],
    x: usize,
    y: usize,
    edge_label: usize,
) -> OrientabilityVerdict {
    // Ancestor chains up to the BFS root; the cycle closes at the lowest
    // common ancestor.
    let chain = |mut v: usize| -> Vec<(usize, Option<usize>)> {
        let mut out = vec![(v, None)];
        while let Some((p, l)) = parent[v] {
            out.push((p, Some(l)));
            v = p;
        }
        out
    };
    let cx = chain(x);
    let cy = chain(y);
    let in_cx: std::collections::BTreeMap<usize, usize> =
        cx.iter().enumerate().map(|(i, &(v, _))| (v, i)).collect();
    let (lca_pos_y, lca) = cy
        .iter()
        .enumerate()
        .find(|(_, &(v, _))| in_cx.contains_key(&v))
        .map(|(i, &(v, _))| (i, v))
        .expect("chains meet at the BFS root");
    let lca_pos_x = in_cx[&lca];
    // Walk lca → x, cross the conflict edge to y, then y → lca.
    let mut vertices = Vec::new();
    let mut labels = Vec::new();
    for i in (0..=lca_pos_x).rev() {
        vertices.push(cx[i].0);
        if i > 0 {
            labels.push(cx[i].1.expect("non-initial chain entries carry labels"));
        }
    }
    labels.push(edge_label);
    for i in 0..lca_pos_y {
        vertices.push(cy[i].0);
        labels.push(cy[i + 1].1.expect("non-initial chain entries carry labels"));
    }
    // labels[i] joins vertices[i] to vertices[i+1 mod k].
    let (vertices, labels) = canonicalize_cycle(vertices, labels);
    OrientabilityVerdict::Nonorientable {
        witness_vertices: vertices,
        witness_labels: labels.into_iter().map(|l| g.labels[l].clone()).collect(),
    }
}

/// Rotate a cycle to start at its smallest vertex and orient it toward the
/// smaller of that vertex's two neighbors.
fn canonicalize_cycle(vertices: Vec<usize>, labels: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    let k = vertices.len();
    let start = (0..k).min_by_key(|&i| vertices[i]).unwrap();
    let fwd_next = vertices[(start + 1) % k];
    let bwd_next = vertices[(start + k - 1) % k];
    if fwd_next <= bwd_next {
        let v = (0..k).map(|i| vertices[(start + i) % k]).collect();
        let l = (0..k).map(|i| labels[(start + i) % k]).collect();
        (v, l)
    } else {
        // Reversed: vertices run backward; label i of the reversed cycle is
        // the label that joined vertices[start - i] and vertices[start-i-1].
        let v = (0..k).map(|i| vertices[(start + k - i) % k]).collect();
        let l = (0..k)
            .map(|i| labels[(start + k - 1 - i) % k])
            .collect();
        (v, l)
    }
}

/// One segment of a tile's boundary, in cyclic order: either a free arc
/// (always surface boundary) or a glue edge carrying a generator label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SegmentKind {
    Free,
    Glue(usize),
}

/// The cyclic segment pattern of a tile boundary.
#[derive(Debug, Clone)]
pub struct TileBoundaryPattern {
    pub segments: Vec<SegmentKind>,
}

/// One traversed segment of a boundary walk: segment `segment` of tile copy
/// `tile`, walked forward or backward, and the gluing label when the segment
/// is an unglued (half-edge) mirror side rather than a free arc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryStep {
    pub tile: usize,
    pub segment: usize,
    pub reversed: bool,
    pub half_edge_label: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryWalk {
    pub steps: Vec<BoundaryStep>,
}

/// Trace the boundary components of the surface assembled from one tile copy
/// per graph vertex, glued by reflection along like-labeled edges.
///
/// Segments on the surface boundary are the free arcs of every copy plus the
/// glue edges whose vertex carries a half-edge of that label. Consecutive
/// boundary segments are found by pivoting around the shared corner through
/// interior gluings; each pivot alternates between the corner's two incident
/// segments while hopping mirror copies, so the walk direction flips on each
/// crossing.
pub fn boundary_walks(
    g: &SchreierGraph,
    pattern: &TileBoundaryPattern,
) -> Result<Vec<BoundaryWalk>> {
    let m = pattern.segments.len();
    if m < 2 {
        return Err(Error::Config(
            "tile boundary needs at least two segments".to_string(),
        ));
    }
    for seg in &pattern.segments {
        if let SegmentKind::Glue(l) = seg {
            if *l >= g.labels.len() {
                return Err(Error::Config(format!(
                    "tile references label {l} but the graph has {}",
                    g.labels.len()
                )));
            }
        }
    }
    let perms: Vec<Vec<usize>> = (0..g.labels.len())
        .map(|l| g.label_permutation(l))
        .collect();
    let is_boundary = |tile: usize, seg: usize| -> Option<Option<usize>> {
        match pattern.segments[seg] {
            SegmentKind::Free => Some(None),
            SegmentKind::Glue(l) => {
                if perms[l][tile] == tile {
                    Some(Some(l))
                } else {
                    None
                }
            }
        }
    };

    // Pivot around the corner reached by `dart` until the next boundary
    // segment appears.
    let next_dart = |tile: usize, seg: usize, reversed: bool| -> Result<(usize, usize, bool)> {
        // Corner index k stays fixed during the pivot; the outgoing segment
        // alternates between s_k (forward) and s_{k-1} (backward).
        let (k, mut out) = if !reversed {
            let k = (seg + 1) % m;
            (k, k)
        } else {
            (seg, (seg + m - 1) % m)
        };
        let mut w = tile;
        for _ in 0..(2 * g.vertex_count + 2) {
            if is_boundary(w, out).is_some() {
                return Ok((w, out, out != k));
            }
            let SegmentKind::Glue(l) = pattern.segments[out] else {
                unreachable!("free segments are always boundary");
            };
            w = perms[l][w];
            out = if out == k { (k + m - 1) % m } else { k };
        }
        Err(Error::GluingInconsistency {
            edge: format!("pivot at corner {k} of tile {tile} does not close"),
            residual: 0.0,
        })
    };

    let mut used = vec![false; g.vertex_count * m * 2];
    let idx = |tile: usize, seg: usize, rev: bool| (tile * m + seg) * 2 + rev as usize;
    let mut walks = Vec::new();
    for tile in 0..g.vertex_count {
        for seg in 0..m {
            let Some(half) = is_boundary(tile, seg) else {
                continue;
            };
            if used[idx(tile, seg, false)] {
                continue;
            }
            let _ = half;
            let mut steps = Vec::new();
            let (mut ct, mut cs, mut cr) = (tile, seg, false);
            loop {
                used[idx(ct, cs, false)] = true;
                used[idx(ct, cs, true)] = true;
                steps.push(BoundaryStep {
                    tile: ct,
                    segment: cs,
                    reversed: cr,
                    half_edge_label: is_boundary(ct, cs).expect("walk stays on boundary"),
                });
                let (nt, ns, nr) = next_dart(ct, cs, cr)?;
                if (nt, ns, nr) == (tile, seg, false) {
                    break;
                }
                (ct, cs, cr) = (nt, ns, nr);
            }
            walks.push(BoundaryWalk { steps });
        }
    }
    Ok(walks)
}
