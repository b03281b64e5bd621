//! Python bindings for the isodrum library: Gassmann triple checks, gluing
//! graphs, transplantation, surface assembly, and eigenvalue computations.
//!
//! The module mirrors the CLI's conventions: subgroups are named
//! ("gamma1", "gamma2", "cyclic8"), generators are element names bound
//! positionally to the tile labels sigma, t, u, and all heavy numerics run
//! on the Rust side.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use isodrum::group::{almost_conjugate, coset_action, gerst};
use isodrum::rep_theory::{
    character_table, format_table, induced_character, intertwiner_space, qr, transplantation_matrix,
    PermRep,
};
use isodrum::schreier::{build_schreier, is_orientable, OrientabilityVerdict, SchreierGraph};
use isodrum::spectral::{assemble, compute_spectrum, convergence_study, DiscretizationMode};
use isodrum::tiler::{
    assemble_surface, builtin_tile, mesh_tile, BCAssignment, BoundaryCondition as Bc, SurfaceMesh,
};
use isodrum::transplant::verify_transplantation;

fn err(e: isodrum::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn graph_from_names(subgroup: &str, gens: &[String]) -> PyResult<SchreierGraph> {
    let g = gerst::group();
    let h = gerst::subgroup_by_name(&g, subgroup).map_err(err)?;
    let elems: Vec<usize> = gens
        .iter()
        .map(|n| gerst::element_by_name(n))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    if elems.len() != 3 {
        return Err(PyValueError::new_err(format!(
            "need exactly 3 generators to bind to labels sigma,t,u; got {gens:?}"
        )));
    }
    let action = coset_action(&g, &h, &elems, Some(&gerst::s_transversal())).map_err(err)?;
    build_schreier(
        &action,
        vec!["sigma".to_string(), "t".to_string(), "u".to_string()],
    )
    .map_err(err)
}

fn surface_from_names(
    tile: &str,
    subgroup: &str,
    gens: &[String],
    refinement: usize,
) -> PyResult<SurfaceMesh> {
    // subgroup "single" means one free-standing copy of the tile, useful
    // for reference domains like the unit square.
    let graph = if subgroup == "single" {
        SchreierGraph {
            vertex_count: 1,
            labels: vec![],
            full_edges: vec![],
            half_edges: vec![],
        }
    } else {
        graph_from_names(subgroup, gens)?
    };
    let spec = builtin_tile(tile).map_err(err)?;
    let tmesh = mesh_tile(&spec, refinement).map_err(err)?;
    assemble_surface(&graph, &tmesh).map_err(err)
}

fn parse_bc(bc: &str) -> PyResult<Bc> {
    match bc {
        "neumann" => Ok(Bc::Neumann),
        "dirichlet" => Ok(Bc::Dirichlet),
        other => Err(PyValueError::new_err(format!(
            "boundary condition must be 'neumann' or 'dirichlet', got {other:?}"
        ))),
    }
}

fn parse_mode(mode: &str) -> PyResult<DiscretizationMode> {
    match mode {
        "fem" => Ok(DiscretizationMode::Fem),
        "graph" => Ok(DiscretizationMode::Graph),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'fem' or 'graph', got {other:?}"
        ))),
    }
}

const DEFAULT_GENS: [&str; 3] = ["sigma", "t", "u"];

fn gens_or_default(gens: Option<Vec<String>>) -> Vec<String> {
    gens.unwrap_or_else(|| DEFAULT_GENS.iter().map(|s| s.to_string()).collect())
}

/// Result of the almost-conjugacy check on a pair of subgroups.
#[pyclass(frozen)]
struct TripleReport {
    #[pyo3(get)]
    almost_conjugate: bool,
    #[pyo3(get)]
    conjugate_as_subgroups: bool,
    /// (class name, count in h1, count in h2) per conjugacy class.
    #[pyo3(get)]
    class_counts: Vec<(String, usize, usize)>,
    /// (element of h1, matched element of h2, conjugating element).
    #[pyo3(get)]
    matching: Vec<(String, String, String)>,
    #[pyo3(get)]
    failing_class: Option<String>,
}

#[pymethods]
impl TripleReport {
    fn __repr__(&self) -> String {
        format!(
            "TripleReport(almost_conjugate={}, conjugate_as_subgroups={})",
            self.almost_conjugate, self.conjugate_as_subgroups
        )
    }
}

/// Check whether two subgroups of the order-32 group form a Gassmann pair:
/// almost conjugate (equal class counts, witnessed element-by-element) yet
/// not conjugate as subgroups.
#[pyfunction]
#[pyo3(signature = (h1 = "gamma1", h2 = "gamma2"))]
fn verify_triple(h1: &str, h2: &str) -> PyResult<TripleReport> {
    let g = gerst::group();
    let s1 = gerst::subgroup_by_name(&g, h1).map_err(err)?;
    let s2 = gerst::subgroup_by_name(&g, h2).map_err(err)?;
    let r = almost_conjugate(&g, &s1, &s2);
    Ok(TripleReport {
        almost_conjugate: r.almost_conjugate,
        conjugate_as_subgroups: r.conjugate_as_subgroups,
        class_counts: r.class_counts,
        matching: r.matching,
        failing_class: r.failing_class,
    })
}

/// The character table of the order-32 group, formatted as printed text,
/// with the induced characters of both coset modules appended.
#[pyfunction]
fn character_table_text() -> PyResult<String> {
    let g = gerst::group();
    let table = character_table(&g).map_err(err)?;
    let mut extra = Vec::new();
    for name in ["gamma1", "gamma2"] {
        let h = gerst::subgroup_by_name(&g, name).map_err(err)?;
        let chi = induced_character(&g, &h, &table).map_err(err)?;
        extra.push((format!("ind {name}"), chi));
    }
    Ok(format_table(&table, &extra))
}

/// Decompose the coset module of a subgroup into irreducibles; returns the
/// nonzero multiplicities as (irrep label, multiplicity) pairs.
#[pyfunction]
fn decompose_coset_module(subgroup: &str) -> PyResult<Vec<(String, usize)>> {
    let g = gerst::group();
    let table = character_table(&g).map_err(err)?;
    let h = gerst::subgroup_by_name(&g, subgroup).map_err(err)?;
    let chi = induced_character(&g, &h, &table).map_err(err)?;
    Ok(table
        .decompose(&chi)
        .map_err(err)?
        .into_iter()
        .filter(|&(_, m)| m > 0)
        .map(|(irrep, m)| (irrep.label(), m))
        .collect())
}

/// Dimension of the space of matrices intertwining the two coset
/// permutation representations.
#[pyfunction]
fn intertwiner_dimension() -> PyResult<usize> {
    let g = gerst::group();
    let gens = [gerst::ST, gerst::T, gerst::U];
    let trans = gerst::s_transversal();
    let a1 = coset_action(&g, &gerst::gamma1(&g), &gens, Some(&trans)).map_err(err)?;
    let a2 = coset_action(&g, &gerst::gamma2(&g), &gens, Some(&trans)).map_err(err)?;
    Ok(intertwiner_space(&PermRep::from_action(&a1), &PermRep::from_action(&a2))
        .map_err(err)?
        .dimension)
}

/// The 8x8 transplantation matrix for rational parameters (a, b, c, d),
/// given as (numerator, denominator) pairs. Returns exact entries as
/// strings alongside float values and whether the matrix is invertible.
#[pyfunction]
#[pyo3(signature = (a = (6, 1), b = (-2, 1), c = (2, 1), d = (2, 1)))]
fn transplantation(
    a: (i64, i64),
    b: (i64, i64),
    c: (i64, i64),
    d: (i64, i64),
) -> PyResult<(Vec<Vec<String>>, Vec<Vec<f64>>, bool)> {
    for (_, den) in [a, b, c, d] {
        if den == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
    }
    let m = transplantation_matrix(qr(a.0, a.1), qr(b.0, b.1), qr(c.0, c.1), qr(d.0, d.1));
    let mut exact = Vec::new();
    let mut float = Vec::new();
    for i in 0..8 {
        let mut re = Vec::new();
        let mut rf = Vec::new();
        for j in 0..8 {
            let v = m.entries.at(i, j);
            re.push(v.to_string());
            rf.push(*v.numer() as f64 / *v.denom() as f64);
        }
        exact.push(re);
        float.push(rf);
    }
    let invertible = m.inverse().is_some();
    Ok((exact, float, invertible))
}

/// A gluing graph: one vertex per tile, one labeled edge per glued edge
/// pair, plus half-edges where a tile edge stays on the boundary.
#[pyclass(frozen)]
struct GluingGraph {
    #[pyo3(get)]
    vertex_count: usize,
    #[pyo3(get)]
    edges: Vec<(usize, String, usize)>,
    #[pyo3(get)]
    half_edges: Vec<(usize, String)>,
    #[pyo3(get)]
    orientable: bool,
    /// Odd cycle (vertices, labels) when nonorientable.
    #[pyo3(get)]
    witness: Option<(Vec<usize>, Vec<String>)>,
    /// Consistent side assignment per vertex when orientable.
    #[pyo3(get)]
    two_coloring: Option<Vec<u8>>,
}

#[pymethods]
impl GluingGraph {
    fn __repr__(&self) -> String {
        format!(
            "GluingGraph(vertices={}, edges={}, orientable={})",
            self.vertex_count,
            self.edges.len(),
            self.orientable
        )
    }
}

/// Build the gluing graph of the coset action of a subgroup. `gens` are
/// element names bound positionally to the labels sigma, t, u.
#[pyfunction]
#[pyo3(signature = (subgroup = "gamma1", gens = None))]
fn build_graph(subgroup: &str, gens: Option<Vec<String>>) -> PyResult<GluingGraph> {
    let graph = graph_from_names(subgroup, &gens_or_default(gens))?;
    let (orientable, witness, two_coloring) = match is_orientable(&graph) {
        OrientabilityVerdict::Orientable { two_coloring } => (true, None, Some(two_coloring)),
        OrientabilityVerdict::Nonorientable {
            witness_vertices,
            witness_labels,
        } => (false, Some((witness_vertices, witness_labels)), None),
    };
    Ok(GluingGraph {
        vertex_count: graph.vertex_count,
        edges: graph
            .full_edges
            .iter()
            .map(|e| (e.a, graph.labels[e.label].clone(), e.b))
            .collect(),
        half_edges: graph
            .half_edges
            .iter()
            .map(|h| (h.vertex, graph.labels[h.label].clone()))
            .collect(),
        orientable,
        witness,
        two_coloring,
    })
}

/// Geometry and topology summary of an assembled flat surface.
#[pyclass(frozen)]
struct Surface {
    #[pyo3(get)]
    node_count: usize,
    #[pyo3(get)]
    triangle_count: usize,
    #[pyo3(get)]
    area: f64,
    #[pyo3(get)]
    euler_characteristic: i64,
    #[pyo3(get)]
    boundary_components: usize,
    /// (node, total interior angle) for each cone point.
    #[pyo3(get)]
    cone_points: Vec<(usize, f64)>,
}

#[pymethods]
impl Surface {
    fn __repr__(&self) -> String {
        format!(
            "Surface(nodes={}, triangles={}, area={:.4}, chi={}, boundary_components={}, cone_points={})",
            self.node_count,
            self.triangle_count,
            self.area,
            self.euler_characteristic,
            self.boundary_components,
            self.cone_points.len()
        )
    }
}

/// Assemble the surface for a tile, subgroup and refinement and summarize
/// its geometry.
#[pyfunction]
#[pyo3(signature = (tile = "ytile", subgroup = "gamma1", refinement = 4, gens = None))]
fn build_surface(
    tile: &str,
    subgroup: &str,
    refinement: usize,
    gens: Option<Vec<String>>,
) -> PyResult<Surface> {
    let m = surface_from_names(tile, subgroup, &gens_or_default(gens), refinement)?;
    Ok(Surface {
        node_count: m.node_count,
        triangle_count: m.triangles.len(),
        area: m.area(),
        euler_characteristic: m.euler_characteristic(),
        boundary_components: m.boundary_components().map_err(err)?.len(),
        cone_points: m
            .cone_points(1e-12)
            .into_iter()
            .map(|c| (c.node, c.angle))
            .collect(),
    })
}

/// Surface geometry in OFF format, e.g. for external mesh viewers.
#[pyfunction]
#[pyo3(signature = (tile = "ytile", subgroup = "gamma1", refinement = 4, gens = None))]
fn surface_off(
    tile: &str,
    subgroup: &str,
    refinement: usize,
    gens: Option<Vec<String>>,
) -> PyResult<String> {
    let m = surface_from_names(tile, subgroup, &gens_or_default(gens), refinement)?;
    Ok(m.to_off())
}

/// Lowest Laplace eigenvalues of an assembled surface. Returns (values,
/// residuals) sorted ascending.
#[pyfunction]
#[pyo3(signature = (
    tile = "ytile", subgroup = "gamma1", refinement = 4, bc = "neumann",
    mode = "fem", count = 12, tol = 1e-8, seed = 7, gens = None
))]
#[allow(clippy::too_many_arguments)]
fn spectrum(
    tile: &str,
    subgroup: &str,
    refinement: usize,
    bc: &str,
    mode: &str,
    count: usize,
    tol: f64,
    seed: u64,
    gens: Option<Vec<String>>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let m = surface_from_names(tile, subgroup, &gens_or_default(gens), refinement)?;
    let assignment = BCAssignment::all(&m, parse_bc(bc)?);
    let op = assemble(&m, &assignment, parse_mode(mode)?).map_err(err)?;
    let (report, _) = compute_spectrum(&op, count, tol, seed).map_err(err)?;
    Ok((
        report.values(),
        report.eigenvalues.iter().map(|e| e.residual).collect(),
    ))
}

/// Richardson-extrapolate eigenvalue ladders computed at doubling
/// refinements. Returns per-index dicts with the observed order,
/// extrapolated value and error estimate.
#[pyfunction]
#[pyo3(signature = (refinements, values_per_level))]
fn extrapolate(
    py: Python<'_>,
    refinements: Vec<usize>,
    values_per_level: Vec<Vec<f64>>,
) -> PyResult<Vec<PyObject>> {
    let study = convergence_study(&refinements, &values_per_level).map_err(err)?;
    let mut out = Vec::new();
    for e in &study.entries {
        let dict = pyo3::types::PyDict::new_bound(py);
        dict.set_item("index", e.index)?;
        dict.set_item("values", e.values.clone())?;
        dict.set_item("observed_order", e.observed_order)?;
        dict.set_item("extrapolated", e.extrapolated)?;
        dict.set_item("error_estimate", e.error_estimate)?;
        dict.set_item("monotone", e.monotone)?;
        out.push(dict.into());
    }
    Ok(out)
}

/// Result of pushing eigenvectors across the transplantation map.
#[pyclass(frozen)]
struct TransplantReport {
    #[pyo3(get)]
    count: usize,
    #[pyo3(get)]
    mode: String,
    #[pyo3(get)]
    eigenvalue_max_rel_diff: f64,
    #[pyo3(get)]
    forward_max_residual: f64,
    #[pyo3(get)]
    inverse_max_residual: f64,
    #[pyo3(get)]
    gluing_max_residual: f64,
    #[pyo3(get)]
    values_source: Vec<f64>,
    #[pyo3(get)]
    values_target: Vec<f64>,
}

#[pymethods]
impl TransplantReport {
    fn __repr__(&self) -> String {
        format!(
            "TransplantReport(mode={}, eig_rel={:.3e}, fwd={:.3e}, inv={:.3e}, glue={:.3e})",
            self.mode,
            self.eigenvalue_max_rel_diff,
            self.forward_max_residual,
            self.inverse_max_residual,
            self.gluing_max_residual
        )
    }
}

/// Verify transplantation between the two assembled surfaces: compares
/// spectra and checks that transplanted eigenvectors are eigenvectors of
/// the other surface with matching boundary traces.
#[pyfunction]
#[pyo3(signature = (
    tile = "ytile", refinement = 4, bc = "neumann", mode = "fem",
    count = 12, tol = 1e-8, seed = 7, gens = None
))]
#[allow(clippy::too_many_arguments)]
fn verify_transplant(
    tile: &str,
    refinement: usize,
    bc: &str,
    mode: &str,
    count: usize,
    tol: f64,
    seed: u64,
    gens: Option<Vec<String>>,
) -> PyResult<TransplantReport> {
    let gens = gens_or_default(gens);
    let m1 = surface_from_names(tile, "gamma1", &gens, refinement)?;
    let m2 = surface_from_names(tile, "gamma2", &gens, refinement)?;
    let bc = parse_bc(bc)?;
    let matrix = transplantation_matrix(qr(6, 1), qr(-2, 1), qr(2, 1), qr(2, 1));
    let v = verify_transplantation(
        &m1,
        &BCAssignment::all(&m1, bc),
        &m2,
        &BCAssignment::all(&m2, bc),
        &matrix,
        count,
        parse_mode(mode)?,
        tol,
        seed,
    )
    .map_err(err)?;
    Ok(TransplantReport {
        count: v.count,
        mode: v.mode,
        eigenvalue_max_rel_diff: v.eigenvalue_max_rel_diff,
        forward_max_residual: v.forward_max_residual,
        inverse_max_residual: v.inverse_max_residual,
        gluing_max_residual: v.gluing_max_residual,
        values_source: v.values_source,
        values_target: v.values_target,
    })
}

#[pymodule]
fn isodrum_rs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(verify_triple, m)?)?;
    m.add_function(wrap_pyfunction!(character_table_text, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_coset_module, m)?)?;
    m.add_function(wrap_pyfunction!(intertwiner_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(transplantation, m)?)?;
    m.add_function(wrap_pyfunction!(build_graph, m)?)?;
    m.add_function(wrap_pyfunction!(build_surface, m)?)?;
    m.add_function(wrap_pyfunction!(surface_off, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_transplant, m)?)?;
    m.add_class::<TripleReport>()?;
    m.add_class::<GluingGraph>()?;
    m.add_class::<Surface>()?;
    m.add_class::<TransplantReport>()?;
    Ok(())
}
