//! Fundamental tiles: simple planar polygons whose boundary is partitioned
//! into straight glue edges (labeled sigma/t/u, or e for the doubling
//! construction) and free arcs. Concrete coordinates are fixed by this crate;
//! every claim downstream is robust to the particular shapes, which are
//! chosen scalene so no accidental symmetries appear.

use crate::error::{Error, Result};
use crate::rep_theory::Q;
use serde::Serialize;

pub type Point = [f64; 2];

/// What one maximal run of the tile boundary is for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TileSegmentKind {
    /// Straight mirror edge carrying a gluing label; must span exactly one
    /// polygon edge.
    Glue(String),
    /// Arc of ordinary boundary (one or more polygon edges).
    Free,
}

/// A self-isometry of the tile: an orthogonal map fixing the polygon as a
/// set, with the permutation it induces on vertices and any glue labels it
/// swaps.
#[derive(Debug, Clone, Serialize)]
pub struct TileSymmetry {
    /// Row-major 2×2 orthogonal matrix.
    pub linear: [[f64; 2]; 2],
    /// Image vertex index of each vertex.
    pub vertex_perm: Vec<usize>,
    /// Pairs of glue labels exchanged by the isometry.
    pub label_swaps: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TileSpec {
    pub name: String,
    /// Simple polygon, counterclockwise.
    pub vertices: Vec<Point>,
    /// Exact coordinates when the tile is rational (used by the exact
    /// cone-point certificate).
    #[serde(skip)]
    pub rational_vertices: Option<Vec<[Q; 2]>>,
    /// Segment i covers the polygon edges [segment_starts[i],
    /// segment_starts[i+1]) cyclically; starts are strictly increasing and
    /// start at 0.
    pub segment_starts: Vec<usize>,
    pub segment_kinds: Vec<TileSegmentKind>,
    pub symmetries: Vec<TileSymmetry>,
}

impl TileSpec {
    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segment_kinds.len()
    }

    /// Polygon edges of segment i, as indices e where edge e runs from
    /// vertex e to vertex e+1 (mod n).
    pub fn segment_edges(&self, i: usize) -> std::ops::Range<usize> {
        let end = if i + 1 == self.segment_starts.len() {
            self.edge_count()
        } else {
            self.segment_starts[i + 1]
        };
        self.segment_starts[i]..end
    }

    /// Which segment a polygon edge belongs to.
    pub fn segment_of_edge(&self, e: usize) -> usize {
        match self.segment_starts.binary_search(&e) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn glue_labels(&self) -> Vec<&str> {
        self.segment_kinds
            .iter()
            .filter_map(|k| match k {
                TileSegmentKind::Glue(l) => Some(l.as_str()),
                TileSegmentKind::Free => None,
            })
            .collect()
    }

    pub fn glue_segment(&self, label: &str) -> Option<usize> {
        self.segment_kinds.iter().position(|k| match k {
            TileSegmentKind::Glue(l) => l == label,
            TileSegmentKind::Free => false,
        })
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let [x0, y0] = self.vertices[i];
            let [x1, y1] = self.vertices[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        acc / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area()
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                best = best.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        best
    }

    /// Interior corner angle at vertex v, in (0, 2π).
    pub fn corner_angle(&self, v: usize) -> f64 {
        let n = self.vertices.len();
        let p = self.vertices[(v + n - 1) % n];
        let c = self.vertices[v];
        let nx = self.vertices[(v + 1) % n];
        let u = [p[0] - c[0], p[1] - c[1]];
        let w = [nx[0] - c[0], nx[1] - c[1]];
        // Interior is to the left of the CCW boundary: the angle from the
        // outgoing edge w around the interior to the incoming direction u.
        let ang = (u[1].atan2(u[0]) - w[1].atan2(w[0])).rem_euclid(std::f64::consts::TAU);
        if ang == 0.0 {
            std::f64::consts::TAU
        } else {
            ang
        }
    }

    /// Replace the coordinates (e.g. from a config override), revalidating.
    pub fn with_vertices(mut self, vertices: Vec<Point>) -> Result<TileSpec> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::InvalidTile(format!(
                "{} expects {} vertices, got {}",
                self.name,
                self.vertices.len(),
                vertices.len()
            )));
        }
        self.vertices = vertices;
        self.rational_vertices = None;
        self.symmetries.clear();
        validate(&self)?;
        Ok(self)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_properly_intersect(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

pub fn validate(spec: &TileSpec) -> Result<()> {
    let n = spec.vertices.len();
    if n < 3 {
        return Err(Error::InvalidTile("fewer than three vertices".to_string()));
    }
    if spec.segment_starts.len() != spec.segment_kinds.len()
        || spec.segment_starts.first() != Some(&0)
        || spec.segment_starts.windows(2).any(|w| w[0] >= w[1])
        || spec.segment_starts.iter().any(|&s| s >= n)
    {
        return Err(Error::InvalidTile(
            "segment starts must be increasing edge indices from 0".to_string(),
        ));
    }
    if spec.signed_area() <= 0.0 {
        return Err(Error::InvalidTile(
            "polygon must be counterclockwise with positive area".to_string(),
        ));
    }
    // Simplicity: no two non-adjacent edges properly intersect, and no
    // degenerate edges.
    for i in 0..n {
        let a = spec.vertices[i];
        let b = spec.vertices[(i + 1) % n];
        if (a[0] - b[0]).abs() + (a[1] - b[1]).abs() < 1e-12 {
            return Err(Error::InvalidTile(format!("edge {i} is degenerate")));
        }
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = spec.vertices[j];
            let d = spec.vertices[(j + 1) % n];
            if segments_properly_intersect(a, b, c, d) {
                return Err(Error::InvalidTile(format!("edges {i} and {j} cross")));
            }
        }
    }
    // Glue segments: single edge, unique labels.
    let mut seen = std::collections::BTreeSet::new();
    for (i, kind) in spec.segment_kinds.iter().enumerate() {
        if let TileSegmentKind::Glue(l) = kind {
            if spec.segment_edges(i).len() != 1 {
                return Err(Error::InvalidTile(format!(
                    "glue segment {l} must be a single straight edge"
                )));
            }
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidTile(format!("label {l} repeats")));
            }
        }
    }
    // Rational coordinates, when present, must match the floats.
    if let Some(rv) = &spec.rational_vertices {
        if rv.len() != n {
            return Err(Error::InvalidTile(
                "rational coordinate count mismatch".to_string(),
            ));
        }
        for (r, f) in rv.iter().zip(&spec.vertices) {
            let rx = *r[0].numer() as f64 / *r[0].denom() as f64;
            let ry = *r[1].numer() as f64 / *r[1].denom() as f64;
            if (rx - f[0]).abs() > 1e-12 || (ry - f[1]).abs() > 1e-12 {
                return Err(Error::InvalidTile(
                    "rational and float coordinates disagree".to_string(),
                ));
            }
        }
    }
    // Declared symmetries must really map the polygon onto itself.
    for sym in &spec.symmetries {
        if sym.vertex_perm.len() != n {
            return Err(Error::InvalidTile("symmetry permutation length".to_string()));
        }
        for v in 0..n {
            let p = spec.vertices[v];
            let image = [
                sym.linear[0][0] * p[0] + sym.linear[0][1] * p[1],
                sym.linear[1][0] * p[0] + sym.linear[1][1] * p[1],
            ];
            let target = spec.vertices[sym.vertex_perm[v]];
            if (image[0] - target[0]).abs() > 1e-9 || (image[1] - target[1]).abs() > 1e-9 {
                return Err(Error::InvalidTile(format!(
                    "symmetry does not map vertex {v} onto vertex {}",
                    sym.vertex_perm[v]
                )));
            }
        }
    }
    Ok(())
}

fn qpoint(x: (i64, i64), y: (i64, i64)) -> [Q; 2] {
    [Q::new(x.0, x.1), Q::new(y.0, y.1)]
}

/// The built-in tile geometries. Coordinates are this crate's choice (the
/// construction works for any simple polygon with the right glue pattern);
/// they are deliberately scalene so the assembled surfaces have no extra
/// isometries.
pub fn builtin_tile(name: &str) -> Result<TileSpec> {
    let spec = match name {
        // Irregular convex hexagon, alternating glue and free edges:
        // sigma, free, t, free, u, free.
        "hexagon3" => TileSpec {
            name: "hexagon3".to_string(),
            vertices: vec![
                [0.0, 0.0],
                [4.0, 0.0],
                [6.0, 3.0],
                [4.0, 6.0],
                [1.0, 5.0],
                [-1.0, 1.0],
            ],
            rational_vertices: Some(vec![
                qpoint((0, 1), (0, 1)),
                qpoint((4, 1), (0, 1)),
                qpoint((6, 1), (3, 1)),
                qpoint((4, 1), (6, 1)),
                qpoint((1, 1), (5, 1)),
                qpoint((-1, 1), (1, 1)),
            ]),
            segment_starts: vec![0, 1, 2, 3, 4, 5],
            segment_kinds: vec![
                TileSegmentKind::Glue("sigma".to_string()),
                TileSegmentKind::Free,
                TileSegmentKind::Glue("t".to_string()),
                TileSegmentKind::Free,
                TileSegmentKind::Glue("u".to_string()),
                TileSegmentKind::Free,
            ],
            symmetries: vec![],
        },
        // Y-shaped 12-gon: three rectangular arms leaving a central hub at
        // 90°, 210° and 330°, glue edges on the arm caps. The top (sigma)
        // arm is shorter than the t/u arms, so the only self-isometry is the
        // mirror swapping t and u.
        "ytile" => ytile(),
        // Scalene right triangle, all three edges glued: u along the legs'
        // base, sigma on the hypotenuse, t on the vertical leg. The right
        // angle sits between t and u so four copies close up flat.
        "triangle" => TileSpec {
            name: "triangle".to_string(),
            vertices: vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]],
            rational_vertices: Some(vec![
                qpoint((0, 1), (0, 1)),
                qpoint((4, 1), (0, 1)),
                qpoint((0, 1), (3, 1)),
            ]),
            segment_starts: vec![0, 1, 2],
            segment_kinds: vec![
                TileSegmentKind::Glue("u".to_string()),
                TileSegmentKind::Glue("sigma".to_string()),
                TileSegmentKind::Glue("t".to_string()),
            ],
            symmetries: vec![],
        },
        // Asymmetric L-shaped hexagon in the closed upper half-plane with
        // the distinguished doubling edge e along the x-axis.
        "ltile" => TileSpec {
            name: "ltile".to_string(),
            // A wide-armed L: the doubled column (reflection) and the
            // staircase (rotation) then differ in their lowest Dirichlet
            // eigenvalue by roughly ten percent, far above discretization
            // error. Thin arms would push the ground state into the shared
            // slab and shrink the gap below numerical resolution.
            vertices: vec![
                [0.0, 0.0],
                [5.0, 0.0],
                [5.0, 1.0],
                [3.0, 1.0],
                [3.0, 3.0],
                [0.0, 3.0],
            ],
            rational_vertices: Some(vec![
                qpoint((0, 1), (0, 1)),
                qpoint((5, 1), (0, 1)),
                qpoint((5, 1), (1, 1)),
                qpoint((3, 1), (1, 1)),
                qpoint((3, 1), (3, 1)),
                qpoint((0, 1), (3, 1)),
            ]),
            segment_starts: vec![0, 1],
            segment_kinds: vec![TileSegmentKind::Glue("e".to_string()), TileSegmentKind::Free],
            symmetries: vec![],
        },
        // Unit square, no gluings: reference domain for solver validation.
        "square" => TileSpec {
            name: "square".to_string(),
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            rational_vertices: Some(vec![
                qpoint((0, 1), (0, 1)),
                qpoint((1, 1), (0, 1)),
                qpoint((1, 1), (1, 1)),
                qpoint((0, 1), (1, 1)),
            ]),
            segment_starts: vec![0, 1, 2, 3],
            segment_kinds: vec![TileSegmentKind::Free; 4],
            symmetries: vec![],
        },
        other => return Err(Error::UnknownName(format!("tile {other}"))),
    };
    validate(&spec)?;
    Ok(spec)
}

fn ytile() -> TileSpec {
    // Chunky proportions on purpose: wide glue caps keep the assembled
    // surfaces strongly coupled across tiles, so the lowest Dirichlet modes
    // are global rather than localized in single tiles (per-tile localization
    // would shrink the M1/M2 Dirichlet gap below numerical resolution).
    let w = 1.4; // arm half-width
    let hub = 1.5; // axial distance where the hub chamfers start
    let l_top = 2.1; // sigma arm length
    let l_arm = 2.4; // t and u arm lengths
    let arm = |deg: f64, axial: f64, lateral: f64| -> Point {
        let th = deg.to_radians();
        let (s, c) = th.sin_cos();
        [axial * c - lateral * s, axial * s + lateral * c]
    };
    // Vertices clockwise around each arm, CCW around the polygon, starting
    // at the right corner of the top cap.
    let b = arm(90.0, l_top, -w);
    let c = arm(90.0, l_top, w);
    let d = arm(90.0, hub, w);
    let e = arm(210.0, hub, -w);
    let f = arm(210.0, l_arm, -w);
    let g = arm(210.0, l_arm, w);
    let h = arm(210.0, hub, w);
    let i = arm(330.0, hub, -w);
    let j = arm(330.0, l_arm, -w);
    let k = arm(330.0, l_arm, w);
    let l = arm(330.0, hub, w);
    let a = arm(90.0, hub, -w);
    TileSpec {
        name: "ytile".to_string(),
        vertices: vec![b, c, d, e, f, g, h, i, j, k, l, a],
        rational_vertices: None,
        segment_starts: vec![0, 1, 4, 5, 8, 9],
        segment_kinds: vec![
            TileSegmentKind::Glue("sigma".to_string()),
            TileSegmentKind::Free,
            TileSegmentKind::Glue("t".to_string()),
            TileSegmentKind::Free,
            TileSegmentKind::Glue("u".to_string()),
            TileSegmentKind::Free,
        ],
        symmetries: vec![TileSymmetry {
            linear: [[-1.0, 0.0], [0.0, 1.0]],
            vertex_perm: (0..12).map(|v| (13 - v) % 12).collect(),
            label_swaps: vec![("t".to_string(), "u".to_string())],
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tiles_validate_and_have_the_declared_labels() {
        for (name, labels, free_arcs) in [
            ("hexagon3", vec!["sigma", "t", "u"], 3usize),
            ("ytile", vec!["sigma", "t", "u"], 3),
            ("triangle", vec!["u", "sigma", "t"], 0),
            ("ltile", vec!["e"], 1),
            ("square", vec![], 4),
        ] {
            let spec = builtin_tile(name).unwrap();
            assert_eq!(spec.glue_labels(), labels, "{name}");
            let frees = spec
                .segment_kinds
                .iter()
                .filter(|k| **k == TileSegmentKind::Free)
                .count();
            assert_eq!(frees, free_arcs, "{name}");
            assert!(spec.signed_area() > 0.0);
        }
        assert!(builtin_tile("heptagon").is_err());
    }

    #[test]
    fn hexagon_has_six_single_edge_segments() {
        let spec = builtin_tile("hexagon3").unwrap();
        assert_eq!(spec.segment_count(), 6);
        for i in 0..6 {
            assert_eq!(spec.segment_edges(i).len(), 1);
        }
    }

    #[test]
    fn ytile_mirror_is_a_genuine_symmetry_swapping_t_and_u() {
        let spec = builtin_tile("ytile").unwrap();
        assert_eq!(spec.symmetries.len(), 1);
        let sym = &spec.symmetries[0];
        assert_eq!(sym.label_swaps, vec![("t".to_string(), "u".to_string())]);
        // validate() already checked the permutation maps vertices onto
        // vertices; check it is an involution and orientation-reversing.
        for v in 0..12 {
            assert_eq!(sym.vertex_perm[sym.vertex_perm[v]], v);
        }
        let det = sym.linear[0][0] * sym.linear[1][1] - sym.linear[0][1] * sym.linear[1][0];
        assert!(det < 0.0);
    }

    #[test]
    fn triangle_is_right_angled_between_t_and_u() {
        let spec = builtin_tile("triangle").unwrap();
        // Corner 0 joins the t edge (incoming) and the u edge (outgoing).
        let angle = spec.corner_angle(0);
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // The other two angles are unequal (scalene tile).
        assert!((spec.corner_angle(1) - spec.corner_angle(2)).abs() > 0.1);
    }

    #[test]
    fn ltile_lives_in_the_upper_half_plane_with_e_on_the_axis() {
        let spec = builtin_tile("ltile").unwrap();
        let e_seg = spec.glue_segment("e").unwrap();
        let edges = spec.segment_edges(e_seg);
        assert_eq!(edges.len(), 1);
        let e0 = edges.start;
        assert_eq!(spec.vertices[e0][1], 0.0);
        assert_eq!(spec.vertices[(e0 + 1) % 6][1], 0.0);
        for (v, p) in spec.vertices.iter().enumerate() {
            if v != e0 && v != (e0 + 1) % 6 {
                assert!(p[1] > 0.0);
            }
        }
        // Reflex corner at the inner elbow.
        assert!((spec.corner_angle(3) - 1.5 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn invalid_polygons_are_rejected() {
        let mut spec = builtin_tile("hexagon3").unwrap();
        // Clockwise orientation.
        spec.vertices.reverse();
        spec.rational_vertices = None;
        assert!(validate(&spec).is_err());
        // Self-intersecting bowtie.
        let bowtie = TileSpec {
            name: "bowtie".to_string(),
            vertices: vec![[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]],
            rational_vertices: None,
            segment_starts: vec![0],
            segment_kinds: vec![TileSegmentKind::Free],
            symmetries: vec![],
        };
        assert!(validate(&bowtie).is_err());
        // Repeated glue label.
        let doubled = TileSpec {
            name: "doubled".to_string(),
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            rational_vertices: None,
            segment_starts: vec![0, 1, 2, 3],
            segment_kinds: vec![
                TileSegmentKind::Glue("t".to_string()),
                TileSegmentKind::Free,
                TileSegmentKind::Glue("t".to_string()),
                TileSegmentKind::Free,
            ],
            symmetries: vec![],
        };
        assert!(validate(&doubled).is_err());
    }

    #[test]
    fn coordinate_overrides_revalidate() {
        let spec = builtin_tile("triangle").unwrap();
        let stretched = spec
            .clone()
            .with_vertices(vec![[0.0, 0.0], [5.0, 0.0], [0.0, 2.0]])
            .unwrap();
        assert!(stretched.signed_area() > 0.0);
        assert!(spec
            .clone()
            .with_vertices(vec![[0.0, 0.0], [1.0, 0.0]])
            .is_err());
        assert!(spec
            .with_vertices(vec![[0.0, 0.0], [0.0, 3.0], [4.0, 0.0]])
            .is_err());
    }
}
