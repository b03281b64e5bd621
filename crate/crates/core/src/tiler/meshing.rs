//! Triangulation of a tile: ear clipping into a fixed fan of coarse
//! triangles, then uniform k-fold subdivision of every ear. Refining k keeps
//! the coarse triangulation, so the meshes for k, 2k, 4k form a nested
//! shape-regular family and every glue edge carries k+1 nodes at equal
//! arclength spacing (symmetric about the edge midpoint, which is what makes
//! orientation-reversing gluings conforming).

use super::tiles::{TileSegmentKind, TileSpec};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Where a mesh node sits on the tile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NodeClass {
    /// Polygon vertex v.
    Corner(usize),
    /// Interior of a glue edge; `param` in (0,1) measured from the segment's
    /// start vertex.
    GlueEdge { segment: usize, param: f64 },
    /// Interior of a free boundary arc.
    FreeBoundary { segment: usize },
    Interior,
}

#[derive(Debug, Clone, Serialize)]
pub struct TileMesh {
    pub spec: TileSpec,
    pub refinement: usize,
    pub nodes: Vec<[f64; 2]>,
    pub node_class: Vec<NodeClass>,
    /// CCW triangles into `nodes`.
    pub triangles: Vec<[usize; 3]>,
    /// Coarse (ear) triangles, before subdivision.
    pub ears: Vec<[usize; 3]>,
    /// For each boundary segment, its nodes in boundary order, endpoints
    /// included.
    pub segment_nodes: Vec<Vec<usize>>,
}

impl TileMesh {
    /// Nodes along a glue edge in order from the segment's start corner,
    /// endpoints included; `None` if the label does not exist.
    pub fn glue_nodes(&self, label: &str) -> Option<&[usize]> {
        let seg = self.spec.glue_segment(label)?;
        Some(&self.segment_nodes[seg])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.nodes[a];
        let pb = self.nodes[b];
        let pc = self.nodes[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]))
    }

    /// Interior angle of triangle t at its local corner `corner` (0..3).
    pub fn triangle_angle(&self, t: usize, corner: usize) -> f64 {
        let tri = self.triangles[t];
        let p = self.nodes[tri[corner]];
        let q = self.nodes[tri[(corner + 1) % 3]];
        let r = self.nodes[tri[(corner + 2) % 3]];
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let dot = u[0] * v[0] + u[1] * v[1];
        let crs = u[0] * v[1] - u[1] * v[0];
        crs.atan2(dot)
    }

    pub fn boundary_node_count(&self) -> usize {
        self.node_class
            .iter()
            .filter(|c| !matches!(c, NodeClass::Interior))
            .count()
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn point_in_triangle_closed(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    let eps = 1e-12;
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    d1 >= -eps && d2 >= -eps && d3 >= -eps
}

fn min_angle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let la = ((b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2)).sqrt();
    let lb = ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt();
    let lc = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let area2 = cross(a, b, c).abs();
    // sin of the angle opposite each side; the smallest angle is opposite the
    // shortest side, and all angles of interest are < pi/2 when tiny.
    let s = la.min(lb).min(lc);
    (area2 / (la * lb * lc / s)).asin()
}

/// Ear-clipping triangulation of a simple CCW polygon; returns triangles of
/// original vertex indices. The subdivided mesh inherits the ear angles at
/// every refinement, so each step clips the valid ear with the largest
/// minimum angle (lowest index on ties, for determinism) to keep the family
/// shape-regular.
fn ear_clip(vertices: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let n = vertices.len();
    let mut ring: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 2);
    while ring.len() > 3 {
        let m = ring.len();
        let mut best: Option<(f64, usize)> = None;
        for pos in 0..m {
            let ia = ring[(pos + m - 1) % m];
            let ib = ring[pos];
            let ic = ring[(pos + 1) % m];
            let (a, b, c) = (vertices[ia], vertices[ib], vertices[ic]);
            if cross(a, b, c) <= 1e-12 {
                continue; // reflex or degenerate corner
            }
            let blocked = ring.iter().any(|&iv| {
                iv != ia && iv != ib && iv != ic && point_in_triangle_closed(vertices[iv], a, b, c)
            });
            if !blocked {
                let q = min_angle(a, b, c);
                if best.map_or(true, |(bq, _)| q > bq + 1e-12) {
                    best = Some((q, pos));
                }
            }
        }
        match best {
            Some((_, pos)) => {
                let ia = ring[(pos + m - 1) % m];
                let ib = ring[pos];
                let ic = ring[(pos + 1) % m];
                out.push([ia, ib, ic]);
                ring.remove(pos);
            }
            None => {
                return Err(Error::Mesh(
                    "ear clipping failed; polygon may be degenerate".to_string(),
                ));
            }
        }
    }
    out.push([ring[0], ring[1], ring[2]]);
    Ok(out)
}

/// Keys that identify shared nodes across ears without comparing floats.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum NodeKey {
    Corner(usize),
    /// On the (diagonal or boundary) edge between polygon vertices
    /// (vmin, vmax), at fraction i/k from vmin.
    Edge(usize, usize, usize),
    /// Strictly inside ear `e` at barycentric (i, j) of k.
    Inside(usize, usize, usize),
}

pub fn mesh_tile(spec: &TileSpec, k: usize) -> Result<TileMesh> {
    super::tiles::validate(spec)?;
    if k == 0 {
        return Err(Error::InvalidRefinement(k));
    }
    let ears = ear_clip(&spec.vertices)?;
    let nv = spec.vertices.len();

    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut keys: BTreeMap<NodeKey, usize> = BTreeMap::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    // Node id for barycentric point (i, j) on ear e with corners (va,vb,vc):
    // position va + (i/k)(vb-va) + (j/k)(vc-va).
    let mut node_at = |e: usize, ear: [usize; 3], i: usize, j: usize| -> usize {
        let [va, vb, vc] = ear;
        let key = if i == 0 && j == 0 {
            NodeKey::Corner(va)
        } else if i == k && j == 0 {
            NodeKey::Corner(vb)
        } else if i == 0 && j == k {
            NodeKey::Corner(vc)
        } else if j == 0 {
            edge_key(va, vb, i, k)
        } else if i == 0 {
            edge_key(va, vc, j, k)
        } else if i + j == k {
            edge_key(vb, vc, j, k)
        } else {
            NodeKey::Inside(e, i, j)
        };
        if let Some(&id) = keys.get(&key) {
            return id;
        }
        let pa = spec.vertices[va];
        let pb = spec.vertices[vb];
        let pc = spec.vertices[vc];
        let (fi, fj) = (i as f64 / k as f64, j as f64 / k as f64);
        let p = [
            pa[0] + fi * (pb[0] - pa[0]) + fj * (pc[0] - pa[0]),
            pa[1] + fi * (pb[1] - pa[1]) + fj * (pc[1] - pa[1]),
        ];
        let id = nodes.len();
        nodes.push(p);
        keys.insert(key, id);
        id
    };

    for (e, &ear) in ears.iter().enumerate() {
        for j in 0..k {
            for i in 0..(k - j) {
                let n00 = node_at(e, ear, i, j);
                let n10 = node_at(e, ear, i + 1, j);
                let n01 = node_at(e, ear, i, j + 1);
                triangles.push([n00, n10, n01]);
                if i + j < k - 1 {
                    let n11 = node_at(e, ear, i + 1, j + 1);
                    triangles.push([n10, n11, n01]);
                }
            }
        }
    }

    // Classify nodes from their keys.
    let mut node_class = vec![NodeClass::Interior; nodes.len()];
    for (key, &id) in &keys {
        match *key {
            NodeKey::Corner(v) => node_class[id] = NodeClass::Corner(v),
            NodeKey::Edge(vmin, vmax, i) => {
                // Boundary only if (vmin, vmax) are consecutive on the
                // polygon; otherwise it is an ear diagonal.
                let (edge, from_min) = if (vmin + 1) % nv == vmax {
                    (vmin, true)
                } else if (vmax + 1) % nv == vmin {
                    (vmax, false)
                } else {
                    continue;
                };
                let seg = spec.segment_of_edge(edge);
                let along = if from_min { i } else { k - i } as f64 / k as f64;
                node_class[id] = match &spec.segment_kinds[seg] {
                    TileSegmentKind::Glue(_) => NodeClass::GlueEdge {
                        segment: seg,
                        param: along,
                    },
                    TileSegmentKind::Free => NodeClass::FreeBoundary { segment: seg },
                };
            }
            NodeKey::Inside(..) => {}
        }
    }

    // Ordered node lists per segment: walk each polygon edge of the segment
    // in boundary order, emitting k+1 nodes and dropping duplicates at the
    // shared corners.
    let mut segment_nodes = Vec::with_capacity(spec.segment_count());
    for s in 0..spec.segment_count() {
        let mut list: Vec<usize> = Vec::new();
        for edge in spec.segment_edges(s) {
            let va = edge;
            let vb = (edge + 1) % nv;
            for i in 0..=k {
                let key = if i == 0 {
                    NodeKey::Corner(va)
                } else if i == k {
                    NodeKey::Corner(vb)
                } else {
                    edge_key(va, vb, i, k)
                };
                let id = keys[&key];
                if list.last() != Some(&id) {
                    list.push(id);
                }
            }
        }
        segment_nodes.push(list);
    }

    let mesh = TileMesh {
        spec: spec.clone(),
        refinement: k,
        nodes,
        node_class,
        triangles,
        ears,
        segment_nodes,
    };
    for t in 0..mesh.triangles.len() {
        if mesh.triangle_area(t) <= 0.0 {
            return Err(Error::Mesh(format!("triangle {t} is not positively oriented")));
        }
    }
    Ok(mesh)
}

fn edge_key(va: usize, vb: usize, i: usize, k: usize) -> NodeKey {
    if va < vb {
        NodeKey::Edge(va, vb, i)
    } else {
        NodeKey::Edge(vb, va, k - i)
    }
}
