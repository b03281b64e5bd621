//! Assembly of flat surfaces: one tile copy per graph vertex, like-labeled
//! glue edges identified pointwise. The identification is combinatorial
//! (node indices, never coordinate matching), so gluing is exact and the
//! assembled complex is deterministic for a given graph, tile and
//! refinement.

use super::meshing::{NodeClass, TileMesh};
use super::tiles::{TileSegmentKind, TileSpec};
use crate::error::{Error, Result};
use crate::rep_theory::{q, QI, Q};
use crate::schreier::{boundary_walks, is_orientable, SchreierGraph, SegmentKind, TileBoundaryPattern};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// How a full edge identifies the two glue-edge node rows: `Identity` pairs
/// equal arclength parameters (a reflection gluing in the shared chart),
/// `Reversed` pairs parameter t with 1-t (used by the rotation gluing of the
/// doubled domains).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GlueOrientation {
    Identity,
    Reversed,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceTriangle {
    pub tile: usize,
    /// Triangle index in the tile mesh (geometry lives in the tile chart).
    pub local: usize,
    /// Global node ids.
    pub nodes: [usize; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingRecord {
    pub tile_a: usize,
    pub tile_b: usize,
    pub label: String,
    pub orientation: GlueOrientation,
    /// Identified local node pairs (side a, side b) along the glue edge.
    pub node_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryOrigin {
    /// A free arc of the tile boundary.
    FreeArc,
    /// A glue edge left unglued (half-edge of the graph, or a label the
    /// graph does not bind).
    UngluedGlue,
    /// A glue edge that became a mirror line in a quotient construction.
    Mirror,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundarySegment {
    /// Display name, e.g. "3T" for the t edge of tile 3, "0F1" for free arc
    /// 1 of tile 0.
    pub name: String,
    pub tile: usize,
    pub segment: usize,
    pub label: Option<String>,
    pub origin: BoundaryOrigin,
    pub local_nodes: Vec<usize>,
    pub global_nodes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceMesh {
    pub graph: SchreierGraph,
    pub tile_mesh: TileMesh,
    /// Display names of the tile copies (vertex indices by default; orbit
    /// representatives in quotients).
    pub tile_names: Vec<String>,
    pub node_count: usize,
    /// global_of[tile][local] -> global node id.
    pub global_of: Vec<Vec<usize>>,
    /// Number of (tile, local) instances of each global node.
    pub multiplicity: Vec<usize>,
    pub triangles: Vec<SurfaceTriangle>,
    pub gluings: Vec<GluingRecord>,
    pub boundary_segments: Vec<BoundarySegment>,
    /// Two-coloring of the tiles by chart orientation when the surface is
    /// orientable; `None` otherwise.
    pub orientation_signs: Option<Vec<u8>>,
}

fn label_letter(label: &str) -> String {
    label
        .chars()
        .next()
        .map(|c| c.to_ascii_uppercase().to_string())
        .unwrap_or_default()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != c {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping numbering lexicographic in
            // (tile, local).
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Glue one tile copy per graph vertex along its labeled edges, identity
/// orientation on every gluing.
pub fn assemble_surface(graph: &SchreierGraph, tmesh: &TileMesh) -> Result<SurfaceMesh> {
    assemble_surface_oriented(graph, tmesh, None, None)
}

/// Assembly with per-full-edge gluing orientations (parallel to
/// `graph.full_edges`) and optional tile display names.
pub fn assemble_surface_oriented(
    graph: &SchreierGraph,
    tmesh: &TileMesh,
    orientations: Option<&[GlueOrientation]>,
    tile_names: Option<Vec<String>>,
) -> Result<SurfaceMesh> {
    let spec = &tmesh.spec;
    if !graph.is_label_regular() {
        return Err(Error::GraphTileMismatch(
            "graph is not label-regular".to_string(),
        ));
    }
    for name in &graph.labels {
        if spec.glue_segment(name).is_none() {
            return Err(Error::GraphTileMismatch(format!(
                "graph label {name} has no glue edge on tile {}",
                spec.name
            )));
        }
    }
    if let Some(o) = orientations {
        if o.len() != graph.full_edges.len() {
            return Err(Error::GraphTileMismatch(format!(
                "{} orientations for {} full edges",
                o.len(),
                graph.full_edges.len()
            )));
        }
    }
    let nt = graph.vertex_count;
    let nl = tmesh.nodes.len();
    let names = match tile_names {
        Some(v) => {
            if v.len() != nt {
                return Err(Error::GraphTileMismatch(
                    "tile name count mismatch".to_string(),
                ));
            }
            v
        }
        None => (0..nt).map(|v| v.to_string()).collect(),
    };

    let mut uf = UnionFind::new(nt * nl);
    let mut gluings = Vec::with_capacity(graph.full_edges.len());
    for (ei, e) in graph.full_edges.iter().enumerate() {
        let label = &graph.labels[e.label];
        let seg = spec
            .glue_segment(label)
            .expect("labels checked against tile above");
        let row = &tmesh.segment_nodes[seg];
        let orientation = orientations
            .map(|o| o[ei])
            .unwrap_or(GlueOrientation::Identity);
        let mut node_pairs = Vec::with_capacity(row.len());
        for (i, &na) in row.iter().enumerate() {
            let nb = match orientation {
                GlueOrientation::Identity => row[i],
                GlueOrientation::Reversed => row[row.len() - 1 - i],
            };
            uf.union(e.a * nl + na, e.b * nl + nb);
            node_pairs.push((na, nb));
        }
        gluings.push(GluingRecord {
            tile_a: e.a,
            tile_b: e.b,
            label: label.clone(),
            orientation,
            node_pairs,
        });
    }

    // Deterministic global numbering: first appearance in (tile, local)
    // order.
    let mut global_of = vec![vec![usize::MAX; nl]; nt];
    let mut root_to_global: BTreeMap<usize, usize> = BTreeMap::new();
    let mut multiplicity = Vec::new();
    for t in 0..nt {
        for n in 0..nl {
            let root = uf.find(t * nl + n);
            let id = *root_to_global.entry(root).or_insert_with(|| {
                multiplicity.push(0);
                multiplicity.len() - 1
            });
            multiplicity[id] += 1;
            global_of[t][n] = id;
        }
    }
    let node_count = multiplicity.len();

    let mut triangles = Vec::with_capacity(nt * tmesh.triangles.len());
    for t in 0..nt {
        for (local, tri) in tmesh.triangles.iter().enumerate() {
            triangles.push(SurfaceTriangle {
                tile: t,
                local,
                nodes: [
                    global_of[t][tri[0]],
                    global_of[t][tri[1]],
                    global_of[t][tri[2]],
                ],
            });
        }
    }

    // Boundary segments: free arcs everywhere; glue edges wherever the graph
    // does not glue them (half-edge, or unbound label).
    let half_at: BTreeSet<(usize, usize)> = graph
        .half_edges
        .iter()
        .map(|h| (h.vertex, h.label))
        .collect();
    let mut boundary_segments = Vec::new();
    for t in 0..nt {
        for (s, kind) in spec.segment_kinds.iter().enumerate() {
            let (origin, label) = match kind {
                TileSegmentKind::Free => (BoundaryOrigin::FreeArc, None),
                TileSegmentKind::Glue(l) => match graph.label_index(l) {
                    Some(li) => {
                        if half_at.contains(&(t, li)) {
                            (BoundaryOrigin::UngluedGlue, Some(l.clone()))
                        } else {
                            continue; // glued, interior edge
                        }
                    }
                    None => (BoundaryOrigin::UngluedGlue, Some(l.clone())),
                },
            };
            let local_nodes = tmesh.segment_nodes[s].clone();
            let global_nodes: Vec<usize> = local_nodes.iter().map(|&n| global_of[t][n]).collect();
            let name = match &label {
                Some(l) => format!("{}{}", names[t], label_letter(l)),
                None => format!("{}F{}", names[t], s),
            };
            boundary_segments.push(BoundarySegment {
                name,
                tile: t,
                segment: s,
                label,
                origin,
                local_nodes,
                global_nodes,
            });
        }
    }

    let orientation_signs = match is_orientable(graph) {
        crate::schreier::OrientabilityVerdict::Orientable { two_coloring } => Some(two_coloring),
        crate::schreier::OrientabilityVerdict::Nonorientable { .. } => None,
    };

    Ok(SurfaceMesh {
        graph: graph.clone(),
        tile_mesh: tmesh.clone(),
        tile_names: names,
        node_count,
        global_of,
        multiplicity,
        triangles,
        gluings,
        boundary_segments,
        orientation_signs,
    })
}

/// The cyclic boundary pattern of a tile relative to a graph's label set:
/// glue segments keep their label index; labels the graph does not bind act
/// as free (always-boundary) segments.
pub fn boundary_pattern(spec: &TileSpec, graph: &SchreierGraph) -> TileBoundaryPattern {
    let segments = spec
        .segment_kinds
        .iter()
        .map(|k| match k {
            TileSegmentKind::Free => SegmentKind::Free,
            TileSegmentKind::Glue(l) => match graph.label_index(l) {
                Some(li) => SegmentKind::Glue(li),
                None => SegmentKind::Free,
            },
        })
        .collect();
    TileBoundaryPattern { segments }
}

impl SurfaceMesh {
    pub fn tile_count(&self) -> usize {
        self.graph.vertex_count
    }

    pub fn area(&self) -> f64 {
        self.tile_count() as f64 * self.tile_mesh.spec.area()
    }

    /// Exact surface area (tile count x rational shoelace area), available
    /// when the tile has rational coordinates. Also certifies that the ear
    /// triangulation partitions the polygon: the ears' exact areas must sum
    /// to the polygon's.
    pub fn exact_area(&self) -> Result<Option<Q>> {
        let Some(rv) = &self.tile_mesh.spec.rational_vertices else {
            return Ok(None);
        };
        let shoelace = |pts: &[[Q; 2]]| -> Q {
            let n = pts.len();
            let mut acc = q(0);
            for i in 0..n {
                let [x0, y0] = pts[i];
                let [x1, y1] = pts[(i + 1) % n];
                acc += x0 * y1 - x1 * y0;
            }
            acc / q(2)
        };
        let poly = shoelace(rv);
        let mut ears_sum = q(0);
        for ear in &self.tile_mesh.ears {
            ears_sum += shoelace(&[rv[ear[0]], rv[ear[1]], rv[ear[2]]]);
        }
        if ears_sum != poly {
            return Err(Error::Mesh(
                "ear triangulation does not partition the tile".to_string(),
            ));
        }
        Ok(Some(q(self.tile_count() as i64) * poly))
    }

    /// (tile, local) instances of a global node, in lexicographic order.
    pub fn instances(&self, global: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, row) in self.global_of.iter().enumerate() {
            for (n, &g) in row.iter().enumerate() {
                if g == global {
                    out.push((t, n));
                }
            }
        }
        out
    }

    /// Undirected local mesh edges of one tile (deduplicated).
    pub fn local_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for tri in &self.tile_mesh.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    /// Euler characteristic of the assembled complex, counting cells as
    /// identification classes (a digon's two boundary edges stay distinct).
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.node_count as i64;
        let local_e = self.local_edges().len() as i64;
        let mut identified = 0i64;
        for e in &self.graph.full_edges {
            let label = &self.graph.labels[e.label];
            if let Some(seg) = self.tile_mesh.spec.glue_segment(label) {
                identified += self.tile_mesh.segment_nodes[seg].len() as i64 - 1;
            }
        }
        let e = self.tile_count() as i64 * local_e - identified;
        let f = (self.tile_count() * self.tile_mesh.triangles.len()) as i64;
        v - e + f
    }

    /// Boundary sub-edge instances, one per consecutive global node pair of
    /// each boundary segment.
    fn boundary_edge_instances(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for seg in &self.boundary_segments {
            for w in seg.global_nodes.windows(2) {
                out.push((w[0], w[1]));
            }
        }
        out
    }

    /// Boundary components as cycles of boundary sub-edge instances; returns
    /// the instance count of each component, sorted ascending.
    pub fn boundary_components(&self) -> Result<Vec<usize>> {
        let instances = self.boundary_edge_instances();
        let mut at_node: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &(a, b)) in instances.iter().enumerate() {
            at_node.entry(a).or_default().push(i);
            at_node.entry(b).or_default().push(i);
        }
        for (node, inc) in &at_node {
            if inc.len() != 2 {
                return Err(Error::Mesh(format!(
                    "boundary node {node} meets {} boundary edges; expected 2",
                    inc.len()
                )));
            }
        }
        let mut used = vec![false; instances.len()];
        let mut sizes = Vec::new();
        for start in 0..instances.len() {
            if used[start] {
                continue;
            }
            let mut size = 0usize;
            let mut cur = start;
            let mut enter = instances[start].0;
            loop {
                used[cur] = true;
                size += 1;
                let (a, b) = instances[cur];
                let exit = if enter == a { b } else { a };
                let inc = &at_node[&exit];
                let next = if inc[0] == cur { inc[1] } else { inc[0] };
                if next == start {
                    break;
                }
                cur = next;
                enter = exit;
            }
            sizes.push(size);
        }
        sizes.sort_unstable();
        Ok(sizes)
    }

    /// Global nodes incident to the surface boundary.
    pub fn boundary_nodes(&self) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        for seg in &self.boundary_segments {
            set.extend(seg.global_nodes.iter().copied());
        }
        set
    }

    pub fn boundary_segment_by_name(&self, name: &str) -> Option<usize> {
        self.boundary_segments.iter().position(|s| s.name == name)
    }

    /// Interior vertices whose total angle differs from 2π by more than
    /// `tol`.
    pub fn cone_points(&self, tol: f64) -> Vec<ConePoint> {
        let boundary = self.boundary_nodes();
        let mut angle = vec![0.0f64; self.node_count];
        for st in &self.triangles {
            for corner in 0..3 {
                angle[st.nodes[corner]] += self.tile_mesh.triangle_angle(st.local, corner);
            }
        }
        let mut cones = Vec::new();
        for g in 0..self.node_count {
            if boundary.contains(&g) {
                continue;
            }
            if (angle[g] - std::f64::consts::TAU).abs() > tol {
                let corners = self
                    .instances(g)
                    .into_iter()
                    .filter_map(|(t, n)| match self.tile_mesh.node_class[n] {
                        NodeClass::Corner(v) => Some((t, v)),
                        _ => None,
                    })
                    .collect();
                cones.push(ConePoint {
                    node: g,
                    angle: angle[g],
                    corners,
                });
            }
        }
        cones
    }

    /// OFF export with the copies laid out on a grid ("exploded" view: the
    /// gluing is combinatorial, so copies are drawn side by side).
    pub fn to_off(&self) -> String {
        let spec = &self.tile_mesh.spec;
        let (mut minx, mut miny, mut maxx, mut maxy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in &spec.vertices {
            minx = minx.min(p[0]);
            miny = miny.min(p[1]);
            maxx = maxx.max(p[0]);
            maxy = maxy.max(p[1]);
        }
        let (dx, dy) = ((maxx - minx) * 1.25, (maxy - miny) * 1.25);
        let cols = 4usize.min(self.tile_count().max(1));
        let nl = self.tile_mesh.nodes.len();
        let mut out = String::from("OFF\n");
        out.push_str(&format!(
            "{} {} 0\n",
            self.tile_count() * nl,
            self.triangles.len()
        ));
        for t in 0..self.tile_count() {
            let ox = (t % cols) as f64 * dx;
            let oy = -((t / cols) as f64) * dy;
            for p in &self.tile_mesh.nodes {
                out.push_str(&format!("{:.12} {:.12} 0\n", p[0] + ox, p[1] + oy));
            }
        }
        for st in &self.triangles {
            let tri = self.tile_mesh.triangles[st.local];
            out.push_str(&format!(
                "3 {} {} {}\n",
                st.tile * nl + tri[0],
                st.tile * nl + tri[1],
                st.tile * nl + tri[2]
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConePoint {
    pub node: usize,
    /// Total interior angle at the point.
    pub angle: f64,
    /// (tile, polygon vertex) instances forming the point.
    pub corners: Vec<(usize, usize)>,
}

/// A class of identified tile corners: the polygon vertex, the copies whose
/// corner participates, and whether the class sits in the surface interior.
#[derive(Debug, Clone, Serialize)]
pub struct CornerClass {
    pub polygon_vertex: usize,
    pub tiles: Vec<usize>,
    pub interior: bool,
}

fn edge_tags(spec: &TileSpec, graph: &SchreierGraph) -> Vec<Option<usize>> {
    (0..spec.edge_count())
        .map(|e| match &spec.segment_kinds[spec.segment_of_edge(e)] {
            TileSegmentKind::Glue(l) => graph.label_index(l),
            TileSegmentKind::Free => None,
        })
        .collect()
}

/// Identification classes of tile corners under the gluing, computed at the
/// tile level (every mesh refinement induces the same classes).
pub fn corner_classes(spec: &TileSpec, graph: &SchreierGraph) -> Result<Vec<CornerClass>> {
    if !graph.is_label_regular() {
        return Err(Error::GraphTileMismatch(
            "graph is not label-regular".to_string(),
        ));
    }
    let nv = spec.edge_count();
    let nt = graph.vertex_count;
    let tags = edge_tags(spec, graph);
    let perms: Vec<Vec<usize>> = (0..graph.labels.len())
        .map(|l| graph.label_permutation(l))
        .collect();
    // Crossing edge e from copy c reaches the like corner of the partner
    // copy; half-edges and free arcs do not cross.
    let cross = |c: usize, e: usize| -> Option<usize> {
        let l = tags[e]?;
        let w = perms[l][c];
        (w != c).then_some(w)
    };
    let mut seen = vec![false; nt * nv];
    let mut classes = Vec::new();
    for v in 0..nv {
        let e_in = (v + nv - 1) % nv;
        let e_out = v;
        for c0 in 0..nt {
            if seen[c0 * nv + v] {
                continue;
            }
            let mut stack = vec![c0];
            let mut members = Vec::new();
            seen[c0 * nv + v] = true;
            while let Some(c) = stack.pop() {
                members.push(c);
                for e in [e_in, e_out] {
                    if let Some(w) = cross(c, e) {
                        if !seen[w * nv + v] {
                            seen[w * nv + v] = true;
                            stack.push(w);
                        }
                    }
                }
            }
            members.sort_unstable();
            let interior = members
                .iter()
                .all(|&c| cross(c, e_in).is_some() && cross(c, e_out).is_some());
            classes.push(CornerClass {
                polygon_vertex: v,
                tiles: members,
                interior,
            });
        }
    }
    Ok(classes)
}

/// Euler characteristic predicted from the tile-level cell structure alone:
/// corner classes, polygon edges minus identifications, one face per copy.
pub fn combinatorial_euler(spec: &TileSpec, graph: &SchreierGraph) -> Result<i64> {
    let v = corner_classes(spec, graph)?.len() as i64;
    let tags = edge_tags(spec, graph);
    let glued: i64 = graph
        .full_edges
        .iter()
        .filter(|e| {
            tags.iter()
                .any(|t| *t == Some(e.label))
        })
        .count() as i64;
    let e = (graph.vertex_count * spec.edge_count()) as i64 - glued;
    let f = graph.vertex_count as i64;
    Ok(v - e + f)
}

/// Exact flatness certificate for each interior corner class when the tile
/// has rational coordinates: the corner wedge, as the Gaussian-rational
/// number dot + i·cross, is raised to the class size; the class is flat iff
/// the power is a positive real and the float winding is exactly one turn.
#[derive(Debug, Clone)]
pub struct ExactConeReport {
    pub class: CornerClass,
    pub flat: bool,
}

pub fn exact_cone_points(
    spec: &TileSpec,
    graph: &SchreierGraph,
) -> Result<Option<Vec<ExactConeReport>>> {
    let Some(rv) = &spec.rational_vertices else {
        return Ok(None);
    };
    let classes = corner_classes(spec, graph)?;
    let nv = spec.edge_count();
    let mut out = Vec::new();
    for class in classes {
        if !class.interior {
            continue;
        }
        let vtx = class.polygon_vertex;
        let at = rv[vtx];
        let prev = rv[(vtx + nv - 1) % nv];
        let next = rv[(vtx + 1) % nv];
        let u = [prev[0] - at[0], prev[1] - at[1]];
        let w = [next[0] - at[0], next[1] - at[1]];
        let dot = w[0] * u[0] + w[1] * u[1];
        let cross = w[0] * u[1] - w[1] * u[0];
        let z = QI::new(dot, cross);
        let m = class.tiles.len() as u32;
        let zm = z.powu(m);
        let theta = spec.corner_angle(vtx);
        let turns = (m as f64 * theta / std::f64::consts::TAU).round() as i64;
        let flat = zm.im == q(0) && zm.re > q(0) && turns == 1;
        out.push(ExactConeReport { class, flat });
    }
    Ok(Some(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// A total assignment of boundary conditions, parallel to
/// `SurfaceMesh::boundary_segments`.
#[derive(Debug, Clone, Serialize)]
pub struct BCAssignment {
    pub conditions: Vec<BoundaryCondition>,
}

impl BCAssignment {
    pub fn all(m: &SurfaceMesh, bc: BoundaryCondition) -> BCAssignment {
        BCAssignment {
            conditions: vec![bc; m.boundary_segments.len()],
        }
    }

    pub fn all_neumann(m: &SurfaceMesh) -> BCAssignment {
        Self::all(m, BoundaryCondition::Neumann)
    }

    pub fn all_dirichlet(m: &SurfaceMesh) -> BCAssignment {
        Self::all(m, BoundaryCondition::Dirichlet)
    }

    /// Assignment from named overrides over a default; unknown names are
    /// rejected so typos cannot silently fall back to the default.
    pub fn from_names(
        m: &SurfaceMesh,
        default: BoundaryCondition,
        overrides: &BTreeMap<String, BoundaryCondition>,
    ) -> Result<BCAssignment> {
        for name in overrides.keys() {
            if m.boundary_segment_by_name(name).is_none() {
                return Err(Error::BoundaryCondition(format!(
                    "no boundary segment named {name}"
                )));
            }
        }
        let conditions = m
            .boundary_segments
            .iter()
            .map(|s| overrides.get(&s.name).copied().unwrap_or(default))
            .collect();
        Ok(BCAssignment { conditions })
    }

    pub fn of_segment(&self, i: usize) -> BoundaryCondition {
        self.conditions[i]
    }
}

/// Consistency check between the mesh boundary and the combinatorial walk
/// count (exercised by tests and the pipeline).
pub fn check_boundary_against_walks(m: &SurfaceMesh) -> Result<(Vec<usize>, usize)> {
    let comps = m.boundary_components()?;
    let pattern = boundary_pattern(&m.tile_mesh.spec, &m.graph);
    let walks = boundary_walks(&m.graph, &pattern)?;
    if comps.len() != walks.len() {
        return Err(Error::Mesh(format!(
            "mesh has {} boundary components but the walk trace has {}",
            comps.len(),
            walks.len()
        )));
    }
    Ok((comps, walks.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{coset_action, gerst};
    use crate::schreier::build_schreier;
    use crate::tiler::meshing::mesh_tile;
    use crate::tiler::tiles::builtin_tile;

    fn surface(
        tile: &str,
        subgroup: &str,
        gens: &[usize],
        labels: &[&str],
        k: usize,
    ) -> SurfaceMesh {
        let g = gerst::group();
        let h = gerst::subgroup_by_name(&g, subgroup).unwrap();
        let action = coset_action(&g, &h, gens, Some(&gerst::s_transversal())).unwrap();
        let graph = build_schreier(&action, labels.iter().map(|s| s.to_string()).collect()).unwrap();
        let spec = builtin_tile(tile).unwrap();
        let tmesh = mesh_tile(&spec, k).unwrap();
        assemble_surface(&graph, &tmesh).unwrap()
    }

    fn gens_sigma_t_u() -> Vec<usize> {
        vec![gerst::ST, gerst::T, gerst::U]
    }

    fn gens_st_t_tu() -> Vec<usize> {
        vec![gerst::ST, gerst::T, gerst::TU]
    }

    #[test]
    fn hexagon_surfaces_have_expected_topology() {
        for (subgroup, comps, orientable) in [
            ("gamma1", vec![2usize, 4, 22], false),
            ("gamma2", vec![2, 2, 12, 12], true),
        ] {
            let m = surface("hexagon3", subgroup, &gens_sigma_t_u(), &["sigma", "t", "u"], 1);
            assert_eq!(m.tile_count(), 8);
            assert_eq!(m.euler_characteristic(), -2, "{subgroup}");
            assert_eq!(
                combinatorial_euler(&m.tile_mesh.spec, &m.graph).unwrap(),
                -2
            );
            assert_eq!(m.boundary_components().unwrap(), comps, "{subgroup}");
            assert_eq!(m.orientation_signs.is_some(), orientable, "{subgroup}");
            let (c, w) = check_boundary_against_walks(&m).unwrap();
            assert_eq!(c.len(), w);
            assert!(m.cone_points(1e-9).is_empty(), "{subgroup}");
        }
    }

    #[test]
    fn euler_characteristic_is_refinement_independent() {
        for k in [1usize, 2, 3] {
            let m = surface("hexagon3", "gamma1", &gens_sigma_t_u(), &["sigma", "t", "u"], k);
            assert_eq!(m.euler_characteristic(), -2, "k={k}");
            assert_eq!(m.boundary_components().unwrap().len(), 3);
        }
    }

    #[test]
    fn ytile_matches_the_hexagon_combinatorics() {
        let m1 = surface("ytile", "gamma1", &gens_sigma_t_u(), &["sigma", "t", "u"], 1);
        let m2 = surface("ytile", "gamma2", &gens_sigma_t_u(), &["sigma", "t", "u"], 1);
        assert_eq!(m1.euler_characteristic(), -2);
        assert_eq!(m2.euler_characteristic(), -2);
        assert_eq!(m1.boundary_components().unwrap().len(), 3);
        assert_eq!(m2.boundary_components().unwrap().len(), 4);
        assert!(m1.orientation_signs.is_none());
        assert!(m2.orientation_signs.is_some());
    }

    #[test]
    fn glued_triangles_are_annuli_with_the_predicted_cones() {
        // Generators st, t, tu bound to the sigma/t/u edges.
        let a1 = surface("triangle", "gamma1", &gens_st_t_tu(), &["sigma", "t", "u"], 2);
        let a2 = surface("triangle", "gamma2", &gens_st_t_tu(), &["sigma", "t", "u"], 2);
        for (m, cones) in [(&a1, 0usize), (&a2, 1)] {
            assert_eq!(m.euler_characteristic(), 0);
            assert_eq!(m.boundary_components().unwrap().len(), 2);
            let found = m.cone_points(1e-9);
            assert_eq!(found.len(), cones);
        }
        // The gamma2 cone has total angle π (two right-angle corners).
        let cone = &a2.cone_points(1e-9)[0];
        assert!((cone.angle - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(cone.corners.len(), 2);
        assert!(cone.corners.iter().all(|&(_, v)| v == 0));

        // Generators st, t, u: one cone on the gamma1 side, two on gamma2.
        // Both unglued labels of gamma1 sit on the same two tiles, so its
        // boundary is a single walk (a Möbius band with a cone), while
        // gamma2 stays an annulus.
        let b1 = surface("triangle", "gamma1", &gens_sigma_t_u(), &["sigma", "t", "u"], 2);
        let b2 = surface("triangle", "gamma2", &gens_sigma_t_u(), &["sigma", "t", "u"], 2);
        assert_eq!(b1.cone_points(1e-9).len(), 1);
        assert_eq!(b2.cone_points(1e-9).len(), 2);
        assert_eq!(b1.euler_characteristic(), 0);
        assert_eq!(b2.euler_characteristic(), 0);
        // Component sizes count sub-edge instances: 4 resp. 2 glue segments
        // per walk, each carrying k=2 sub-edges.
        assert_eq!(b1.boundary_components().unwrap(), vec![8]);
        assert_eq!(b2.boundary_components().unwrap(), vec![4, 4]);
        assert!(b1.orientation_signs.is_none());
        assert!(b2.orientation_signs.is_some());
    }

    #[test]
    fn exact_certificate_agrees_with_the_float_cone_search() {
        let g = gerst::group();
        let spec = builtin_tile("triangle").unwrap();
        for (subgroup, gens, expect_cones) in [
            ("gamma1", gens_st_t_tu(), 0usize),
            ("gamma2", gens_st_t_tu(), 1),
            ("gamma1", gens_sigma_t_u(), 1),
            ("gamma2", gens_sigma_t_u(), 2),
        ] {
            let h = gerst::subgroup_by_name(&g, subgroup).unwrap();
            let action = coset_action(&g, &h, &gens, Some(&gerst::s_transversal())).unwrap();
            let graph = build_schreier(
                &action,
                vec!["sigma".to_string(), "t".to_string(), "u".to_string()],
            )
            .unwrap();
            let reports = exact_cone_points(&spec, &graph).unwrap().unwrap();
            let cones = reports.iter().filter(|r| !r.flat).count();
            assert_eq!(cones, expect_cones, "{subgroup} {gens:?}");
        }
    }

    #[test]
    fn single_tile_surfaces() {
        // A lone hexagon: single vertex, all three labels as half-edges.
        let graph = SchreierGraph {
            vertex_count: 1,
            labels: vec!["sigma".to_string(), "t".to_string(), "u".to_string()],
            full_edges: vec![],
            half_edges: (0..3)
                .map(|l| crate::schreier::HalfEdge { vertex: 0, label: l })
                .collect(),
        };
        let spec = builtin_tile("hexagon3").unwrap();
        let tmesh = mesh_tile(&spec, 2).unwrap();
        let m = assemble_surface(&graph, &tmesh).unwrap();
        assert_eq!(m.tile_count(), 1);
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_components().unwrap().len(), 1);
        assert_eq!(m.boundary_segments.len(), 6);
        assert!(m.multiplicity.iter().all(|&c| c == 1));

        // A plain square domain: no labels at all.
        let empty = SchreierGraph {
            vertex_count: 1,
            labels: vec![],
            full_edges: vec![],
            half_edges: vec![],
        };
        let sq = builtin_tile("square").unwrap();
        let sq_mesh = mesh_tile(&sq, 3).unwrap();
        let m = assemble_surface(&empty, &sq_mesh).unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_components().unwrap().len(), 1);
        assert!(m.cone_points(1e-9).is_empty());
    }

    #[test]
    fn mismatched_tile_and_graph_labels_error() {
        let g = gerst::group();
        let h = gerst::gamma1(&g);
        let action = coset_action(&g, &h, &gens_sigma_t_u(), Some(&gerst::s_transversal())).unwrap();
        let graph = build_schreier(
            &action,
            vec!["sigma".to_string(), "t".to_string(), "u".to_string()],
        )
        .unwrap();
        let sq = builtin_tile("square").unwrap();
        let tmesh = mesh_tile(&sq, 1).unwrap();
        assert!(matches!(
            assemble_surface(&graph, &tmesh),
            Err(Error::GraphTileMismatch(_))
        ));
    }

    #[test]
    fn exact_area_is_the_tile_count_multiple() {
        let m = surface("hexagon3", "gamma1", &gens_sigma_t_u(), &["sigma", "t", "u"], 2);
        let exact = m.exact_area().unwrap().unwrap();
        // Shoelace of the hexagon: 28 each, times 8 copies.
        assert_eq!(exact, Q::new(224, 1));
        let float: f64 = (0..m.tile_mesh.triangles.len())
            .map(|t| m.tile_mesh.triangle_area(t))
            .sum::<f64>()
            * m.tile_count() as f64;
        assert!((float - 224.0).abs() < 1e-9);
    }

    #[test]
    fn multiplicities_divide_the_tile_count() {
        for (tile, gens) in [("hexagon3", gens_sigma_t_u()), ("triangle", gens_st_t_tu())] {
            let m = surface(tile, "gamma1", &gens, &["sigma", "t", "u"], 2);
            assert_eq!(m.multiplicity.iter().sum::<usize>(), 8 * m.tile_mesh.nodes.len());
            for &c in &m.multiplicity {
                assert!(8 % c == 0, "{tile}: multiplicity {c}");
            }
        }
    }

    #[test]
    fn named_boundary_conditions_resolve_and_reject_typos() {
        let m = surface("hexagon3", "gamma1", &gens_sigma_t_u(), &["sigma", "t", "u"], 1);
        // Tile 0 keeps unglued t and u edges (half-edges of gamma1).
        assert!(m.boundary_segment_by_name("0T").is_some());
        assert!(m.boundary_segment_by_name("0U").is_some());
        let mut over = BTreeMap::new();
        over.insert("0T".to_string(), BoundaryCondition::Neumann);
        let bc = BCAssignment::from_names(&m, BoundaryCondition::Dirichlet, &over).unwrap();
        let idx = m.boundary_segment_by_name("0T").unwrap();
        assert_eq!(bc.of_segment(idx), BoundaryCondition::Neumann);
        let other = m.boundary_segment_by_name("0U").unwrap();
        assert_eq!(bc.of_segment(other), BoundaryCondition::Dirichlet);
        over.insert("9Z".to_string(), BoundaryCondition::Neumann);
        assert!(BCAssignment::from_names(&m, BoundaryCondition::Dirichlet, &over).is_err());
    }

    #[test]
    fn off_export_is_well_formed() {
        let m = surface("hexagon3", "gamma2", &gens_sigma_t_u(), &["sigma", "t", "u"], 1);
        let off = m.to_off();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        let counts: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(counts, vec![8 * m.tile_mesh.nodes.len(), m.triangles.len(), 0]);
        assert_eq!(
            off.lines().count(),
            2 + 8 * m.tile_mesh.nodes.len() + m.triangles.len()
        );
    }
}
