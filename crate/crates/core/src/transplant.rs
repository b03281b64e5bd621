//! Transplantation of discrete functions between two glued surfaces built
//! from the same tile: per-tile linear combinations prescribed by an
//! intertwiner, rational-arithmetic certificates that the combination
//! respects both surfaces' identifications and commutes with their graph
//! Laplacians, and floating-point verification on computed eigenvectors.

use crate::error::{Error, Result};
use crate::rep_theory::{Q, QMat, TransplantMatrix};
use crate::spectral::{assemble, compute_spectrum, Csr, DiscretizationMode};
use crate::tiler::{BCAssignment, SurfaceMesh};
use num::{ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// A function stored tile by tile: `per_tile[i][x]` is the value at local
/// mesh node `x` of tile copy `i`. This is the natural domain of the
/// transplantation map, which mixes tiles but never moves within one.
#[derive(Debug, Clone)]
pub struct TileFunction {
    pub per_tile: Vec<Vec<f64>>,
}

impl TileFunction {
    /// Split a global node vector into its per-tile views.
    pub fn from_node_values(mesh: &SurfaceMesh, values: &[f64]) -> Result<TileFunction> {
        if values.len() != mesh.node_count {
            return Err(Error::Config(format!(
                "{} values for {} mesh nodes",
                values.len(),
                mesh.node_count
            )));
        }
        let per_tile = mesh
            .global_of
            .iter()
            .map(|tile| tile.iter().map(|&g| values[g]).collect())
            .collect();
        Ok(TileFunction { per_tile })
    }

    /// One constant value per tile copy (generally not glue-consistent;
    /// useful for exercising the per-tile combination rules).
    pub fn constants(local_len: usize, per_tile: &[f64]) -> TileFunction {
        TileFunction {
            per_tile: per_tile.iter().map(|&c| vec![c; local_len]).collect(),
        }
    }
}

fn check_compatible(source: &SurfaceMesh, target: &SurfaceMesh, entries: &QMat) -> Result<()> {
    if source.tile_mesh.spec.name != target.tile_mesh.spec.name
        || source.tile_mesh.refinement != target.tile_mesh.refinement
    {
        return Err(Error::IncompatibleMeshes(format!(
            "{} at refinement {} vs {} at refinement {}",
            source.tile_mesh.spec.name,
            source.tile_mesh.refinement,
            target.tile_mesh.spec.name,
            target.tile_mesh.refinement
        )));
    }
    if entries.rows != source.tile_count() || entries.cols != target.tile_count() {
        return Err(Error::IncompatibleMeshes(format!(
            "{}x{} matrix for {} source and {} target tiles",
            entries.rows,
            entries.cols,
            source.tile_count(),
            target.tile_count()
        )));
    }
    Ok(())
}

/// Per-tile combination step: target tile j receives sum_i entries[i][j] *
/// (source tile i), pointwise in the common local chart.
pub fn transplant_tiles(src: &TileFunction, entries: &QMat) -> Result<TileFunction> {
    if entries.rows != src.per_tile.len() {
        return Err(Error::Config(format!(
            "matrix has {} rows but the function has {} tiles",
            entries.rows,
            src.per_tile.len()
        )));
    }
    let local_len = src.per_tile.first().map(|t| t.len()).unwrap_or(0);
    if src.per_tile.iter().any(|t| t.len() != local_len) {
        return Err(Error::Config(
            "tile value arrays have inconsistent lengths".to_string(),
        ));
    }
    let mut out = vec![vec![0.0; local_len]; entries.cols];
    for j in 0..entries.cols {
        for i in 0..entries.rows {
            let w = entries
                .at(i, j)
                .to_f64()
                .expect("transplant coefficients fit in f64");
            if w == 0.0 {
                continue;
            }
            for (o, s) in out[j].iter_mut().zip(&src.per_tile[i]) {
                *o += w * s;
            }
        }
    }
    Ok(TileFunction { per_tile: out })
}

/// Mismatch of a per-tile function across one glue edge.
#[derive(Debug, Clone, Serialize)]
pub struct GlueTraceReport {
    pub label: String,
    pub tile_a: usize,
    pub tile_b: usize,
    pub max_mismatch: f64,
}

/// Trace agreement across every glued edge of the mesh.
pub fn edge_compatibility(mesh: &SurfaceMesh, f: &TileFunction) -> Result<Vec<GlueTraceReport>> {
    if f.per_tile.len() != mesh.tile_count() {
        return Err(Error::Config(format!(
            "{} tile value arrays for {} tiles",
            f.per_tile.len(),
            mesh.tile_count()
        )));
    }
    let mut out = Vec::with_capacity(mesh.gluings.len());
    for g in &mesh.gluings {
        let mut worst = 0.0f64;
        for &(la, lb) in &g.node_pairs {
            let d = (f.per_tile[g.tile_a][la] - f.per_tile[g.tile_b][lb]).abs();
            worst = worst.max(d);
        }
        out.push(GlueTraceReport {
            label: g.label.clone(),
            tile_a: g.tile_a,
            tile_b: g.tile_b,
            max_mismatch: worst,
        });
    }
    Ok(out)
}

/// Collapse a per-tile function to global node values. Instances of the same
/// global node must agree within `tol`; the returned residual is the worst
/// deviation observed (zero for an exactly glue-consistent function).
pub fn to_node_values(
    mesh: &SurfaceMesh,
    f: &TileFunction,
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    if f.per_tile.len() != mesh.tile_count() {
        return Err(Error::Config(format!(
            "{} tile value arrays for {} tiles",
            f.per_tile.len(),
            mesh.tile_count()
        )));
    }
    let mut sums = vec![0.0; mesh.node_count];
    for (tile, locals) in mesh.global_of.iter().enumerate() {
        for (local, &g) in locals.iter().enumerate() {
            sums[g] += f.per_tile[tile][local];
        }
    }
    let values: Vec<f64> = sums
        .iter()
        .zip(&mesh.multiplicity)
        .map(|(s, &m)| s / m as f64)
        .collect();
    let mut worst = 0.0f64;
    let mut worst_node = 0;
    for (tile, locals) in mesh.global_of.iter().enumerate() {
        for (local, &g) in locals.iter().enumerate() {
            let d = (f.per_tile[tile][local] - values[g]).abs();
            if d > worst {
                worst = d;
                worst_node = g;
            }
        }
    }
    if worst > tol {
        // Name a glue edge through the offending node if one exists.
        let edge = mesh
            .gluings
            .iter()
            .find(|g| {
                g.node_pairs
                    .iter()
                    .any(|&(la, _)| mesh.global_of[g.tile_a][la] == worst_node)
            })
            .map(|g| format!("{} between tiles {} and {}", g.label, g.tile_a, g.tile_b))
            .unwrap_or_else(|| format!("node {worst_node}"));
        return Err(Error::GluingInconsistency {
            edge,
            residual: worst,
        });
    }
    Ok((values, worst))
}

/// Transplant a global node vector from `source` to `target`. Returns the
/// target node values and the worst gluing residual incurred.
pub fn transplant(
    source: &SurfaceMesh,
    target: &SurfaceMesh,
    entries: &QMat,
    values: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    check_compatible(source, target, entries)?;
    let tf = TileFunction::from_node_values(source, values)?;
    let moved = transplant_tiles(&tf, entries)?;
    to_node_values(target, &moved, tol)
}

type SparseRow = BTreeMap<usize, Q>;

fn row_add(row: &mut SparseRow, col: usize, v: Q) {
    if v.is_zero() {
        return;
    }
    let e = row.entry(col).or_insert_with(Q::zero);
    *e += v;
    if e.is_zero() {
        row.remove(&col);
    }
}

/// Exact lift of the per-tile matrix to global node spaces, one sparse row
/// per target node. Errs when some target identification receives
/// conflicting rows, i.e. when the matrix does not respect the gluings.
fn lifted_rows(
    source: &SurfaceMesh,
    target: &SurfaceMesh,
    entries: &QMat,
) -> Result<Vec<SparseRow>> {
    check_compatible(source, target, entries)?;
    let mut rows: Vec<Option<SparseRow>> = vec![None; target.node_count];
    for j in 0..target.tile_count() {
        for (local, &g) in target.global_of[j].iter().enumerate() {
            let mut row = SparseRow::new();
            for i in 0..source.tile_count() {
                row_add(&mut row, source.global_of[i][local], entries.at(i, j));
            }
            match &rows[g] {
                Some(existing) if *existing != row => {
                    let defect: f64 = existing
                        .iter()
                        .chain(&row)
                        .map(|(_, v)| v.to_f64().unwrap_or(f64::NAN).abs())
                        .fold(0.0, f64::max);
                    return Err(Error::GluingInconsistency {
                        edge: format!("target node {g}"),
                        residual: defect,
                    });
                }
                Some(_) => {}
                None => rows[g] = Some(row),
            }
        }
    }
    Ok(rows.into_iter().map(|r| r.expect("every node has a tile instance")).collect())
}

/// Exact lift as a dense rational matrix (small meshes; the certificate path
/// below stays sparse).
pub fn lifted_matrix(
    source: &SurfaceMesh,
    target: &SurfaceMesh,
    entries: &QMat,
) -> Result<QMat> {
    let rows = lifted_rows(source, target, entries)?;
    let mut t = QMat::zeros(target.node_count, source.node_count);
    for (i, row) in rows.iter().enumerate() {
        for (&c, &v) in row {
            *t.at_mut(i, c) = v;
        }
    }
    Ok(t)
}

/// Exact mesh-graph Laplacian of a surface in node space, mass-normalized:
/// L = M^{-1} K where K sums each tile copy's local-edge Laplacian and M is
/// the tile-copy multiplicity. Sparse rational rows.
fn graph_operator_rows(mesh: &SurfaceMesh) -> Vec<SparseRow> {
    let mut rows: Vec<SparseRow> = vec![SparseRow::new(); mesh.node_count];
    let edges = mesh.local_edges();
    let one = Q::from_integer(1);
    for tile in 0..mesh.tile_count() {
        for &(a, b) in &edges {
            let (ga, gb) = (mesh.global_of[tile][a], mesh.global_of[tile][b]);
            row_add(&mut rows[ga], ga, one);
            row_add(&mut rows[gb], gb, one);
            row_add(&mut rows[ga], gb, -one);
            row_add(&mut rows[gb], ga, -one);
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let m = Q::from_integer(mesh.multiplicity[i] as i64);
        for v in row.values_mut() {
            *v /= m;
        }
    }
    rows
}

/// Exact mesh-graph Laplacian as a dense rational matrix (small meshes).
pub fn exact_graph_operator(mesh: &SurfaceMesh) -> QMat {
    let rows = graph_operator_rows(mesh);
    let mut k = QMat::zeros(mesh.node_count, mesh.node_count);
    for (i, row) in rows.iter().enumerate() {
        for (&c, &v) in row {
            *k.at_mut(i, c) = v;
        }
    }
    k
}

/// rows(A)·rows(B): sparse rational matrix product, row-major.
fn sparse_product(a: &[SparseRow], b: &[SparseRow]) -> Vec<SparseRow> {
    a.iter()
        .map(|arow| {
            let mut out = SparseRow::new();
            for (&k, &av) in arow {
                for (&c, &bv) in &b[k] {
                    row_add(&mut out, c, av * bv);
                }
            }
            out
        })
        .collect()
}

/// Exact commutation certificate: whether the lifted transplantation matrix
/// satisfies L_target T = T L_source in rational arithmetic.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub exact_zero: bool,
    /// Largest entry of the commutator as a float (0.0 when exact_zero).
    pub float_defect: f64,
    pub source_nodes: usize,
    pub target_nodes: usize,
}

pub fn commutator_certificate(
    source: &SurfaceMesh,
    target: &SurfaceMesh,
    entries: &QMat,
) -> Result<CommutatorReport> {
    let t = lifted_rows(source, target, entries)?;
    let l1 = graph_operator_rows(source);
    let l2 = graph_operator_rows(target);
    let left = sparse_product(&l2, &t);
    let right = sparse_product(&t, &l1);
    let mut exact_zero = true;
    let mut float_defect = 0.0f64;
    for (lrow, rrow) in left.iter().zip(&right) {
        let mut diff = lrow.clone();
        for (&c, &v) in rrow {
            row_add(&mut diff, c, -v);
        }
        if !diff.is_empty() {
            exact_zero = false;
            for v in diff.values() {
                float_defect = float_defect.max(v.to_f64().unwrap_or(f64::NAN).abs());
            }
        }
    }
    Ok(CommutatorReport {
        exact_zero,
        float_defect,
        source_nodes: source.node_count,
        target_nodes: target.node_count,
    })
}

/// Outcome of transplanting computed eigenvectors between two surfaces.
#[derive(Debug, Clone, Serialize)]
pub struct TransplantVerification {
    pub count: usize,
    pub mode: String,
    /// Worst relative difference between the two eigenvalue lists.
    pub eigenvalue_max_rel_diff: f64,
    /// Worst eigen-residual of a transplanted source eigenvector in the
    /// target pencil, at the source eigenvalue.
    pub forward_max_residual: f64,
    /// Same for the inverse matrix applied to target eigenvectors.
    pub inverse_max_residual: f64,
    /// Worst trace mismatch incurred while re-gluing transplanted functions.
    pub gluing_max_residual: f64,
    pub values_source: Vec<f64>,
    pub values_target: Vec<f64>,
}

fn pencil_residual(k: &Csr, m: &Csr, lambda: f64, x: &[f64]) -> f64 {
    let kx = k.apply(x);
    let mx = m.apply(x);
    let num: f64 = kx
        .iter()
        .zip(&mx)
        .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
        .sum();
    let den: f64 = mx.iter().zip(x).map(|(a, b)| a * b).sum();
    if den <= 1e-300 {
        return f64::INFINITY;
    }
    num.sqrt() / den.sqrt()
}

/// Compute `count` eigenpairs on both surfaces, move them through the
/// transplantation in both directions, and report residuals. Small residuals
/// certify that the map carries eigenfunctions to eigenfunctions; under
/// boundary conditions the map does not respect, the residuals (and the
/// eigenvalue differences) stay large.
#[allow(clippy::too_many_arguments)]
pub fn verify_transplantation(
    source: &SurfaceMesh,
    source_bc: &BCAssignment,
    target: &SurfaceMesh,
    target_bc: &BCAssignment,
    matrix: &TransplantMatrix,
    count: usize,
    mode: DiscretizationMode,
    tol: f64,
    seed: u64,
) -> Result<TransplantVerification> {
    check_compatible(source, target, &matrix.entries)?;
    let inverse = matrix.inverse().ok_or_else(|| {
        Error::Singular("transplantation matrix is singular (a*b*c*d = 0)".to_string())
    })?;
    let op1 = assemble(source, source_bc, mode)?;
    let op2 = assemble(target, target_bc, mode)?;
    let (r1, v1) = compute_spectrum(&op1, count, tol, seed)?;
    let (r2, v2) = compute_spectrum(&op2, count, tol, seed)?;
    let (vals1, vals2) = (r1.values(), r2.values());
    let scale = vals1
        .iter()
        .chain(&vals2)
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let eigenvalue_max_rel_diff = vals1
        .iter()
        .zip(&vals2)
        .map(|(a, b)| crate::spectral::relative_difference(*a, *b, scale))
        .fold(0.0, f64::max);

    let mut forward = 0.0f64;
    let mut inv_resid = 0.0f64;
    let mut gluing = 0.0f64;
    for (i, x) in v1.iter().enumerate() {
        let nodes = op1.expand(x);
        let tf = TileFunction::from_node_values(source, &nodes)?;
        let moved = transplant_tiles(&tf, &matrix.entries)?;
        let (w, g) = to_node_values(target, &moved, f64::INFINITY)?;
        gluing = gluing.max(g);
        let w_dofs = op2.restrict(&w);
        forward = forward.max(pencil_residual(
            &op2.stiffness,
            &op2.mass,
            vals1[i],
            &w_dofs,
        ));
    }
    for (i, x) in v2.iter().enumerate() {
        let nodes = op2.expand(x);
        let tf = TileFunction::from_node_values(target, &nodes)?;
        let moved = transplant_tiles(&tf, &inverse)?;
        let (w, g) = to_node_values(source, &moved, f64::INFINITY)?;
        gluing = gluing.max(g);
        let w_dofs = op1.restrict(&w);
        inv_resid = inv_resid.max(pencil_residual(
            &op1.stiffness,
            &op1.mass,
            vals2[i],
            &w_dofs,
        ));
    }
    Ok(TransplantVerification {
        count,
        mode: mode.to_string(),
        eigenvalue_max_rel_diff,
        forward_max_residual: forward,
        inverse_max_residual: inv_resid,
        gluing_max_residual: gluing,
        values_source: vals1,
        values_target: vals2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{coset_action, gerst};
    use crate::rep_theory::{q, transplantation_matrix};
    use crate::schreier::build_schreier;
    use crate::tiler::{assemble_surface, builtin_tile, mesh_tile, BoundaryCondition};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn glued_pair(refinement: usize) -> (SurfaceMesh, SurfaceMesh) {
        let g = gerst::group();
        let gens = vec![gerst::ST, gerst::T, gerst::U];
        let tv = gerst::s_transversal();
        let labels = vec!["sigma".to_string(), "t".to_string(), "u".to_string()];
        let spec = builtin_tile("hexagon3").unwrap();
        let tmesh = mesh_tile(&spec, refinement).unwrap();
        let build = |gamma| {
            let action = coset_action(&g, &gamma, &gens, Some(&tv)).unwrap();
            let graph = build_schreier(&action, labels.clone()).unwrap();
            assemble_surface(&graph, &tmesh).unwrap()
        };
        (build(gerst::gamma1(&g)), build(gerst::gamma2(&g)))
    }

    #[test]
    fn published_combination_rules_hold_per_tile() {
        // With the default parameters, target tile 0 collects
        // F0 + 2 F1 + F4 + 2 F7 and target tile 4 collects F0 + 2 F3 + F4 + 2 F5.
        let m = transplantation_matrix(q(6), q(-2), q(2), q(2));
        let consts: Vec<f64> = (0..8).map(|i| (10 + i) as f64).collect();
        let f = TileFunction::constants(1, &consts);
        let h = transplant_tiles(&f, &m.entries).unwrap();
        let expect0 = consts[0] + 2.0 * consts[1] + consts[4] + 2.0 * consts[7];
        let expect4 = consts[0] + 2.0 * consts[3] + consts[4] + 2.0 * consts[5];
        assert_eq!(h.per_tile[0][0], expect0);
        assert_eq!(h.per_tile[4][0], expect4);
    }

    #[test]
    fn constants_map_to_constants() {
        // Column sums all equal the parameter a, so the constant 1 maps to
        // the constant a exactly; in particular gluing residuals vanish.
        let (m1, m2) = glued_pair(2);
        let matrix = transplantation_matrix(q(6), q(-2), q(2), q(2));
        let ones = vec![1.0; m1.node_count];
        let (moved, residual) = transplant(&m1, &m2, &matrix.entries, &ones, 0.0).unwrap();
        assert_eq!(residual, 0.0);
        assert!(moved.iter().all(|&v| v == 6.0));
    }

    #[test]
    fn roundtrip_restores_the_original_function() {
        let (m1, m2) = glued_pair(2);
        let matrix = transplantation_matrix(q(6), q(-2), q(2), q(2));
        let inv = matrix.inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..m1.node_count).map(|_| rng.gen::<f64>() - 0.5).collect();
        let (h, r_fwd) = transplant(&m1, &m2, &matrix.entries, &f, 1e-9).unwrap();
        let (back, r_inv) = transplant(&m2, &m1, &inv, &h, 1e-9).unwrap();
        assert!(r_fwd < 1e-12);
        assert!(r_inv < 1e-12);
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lifted_matrix_commutes_with_the_graph_laplacians_exactly() {
        let (m1, m2) = glued_pair(2);
        let matrix = transplantation_matrix(q(6), q(-2), q(2), q(2));
        let report = commutator_certificate(&m1, &m2, &matrix.entries).unwrap();
        assert!(report.exact_zero, "float defect {}", report.float_defect);
        assert_eq!(report.float_defect, 0.0);
        // The certificate is parameter-independent: any intertwiner lifts.
        let other = transplantation_matrix(q(1), q(1), q(1), q(1));
        let report = commutator_certificate(&m1, &m2, &other.entries).unwrap();
        assert!(report.exact_zero);
    }

    #[test]
    fn neumann_eigenvectors_transplant_to_eigenvectors() {
        let (m1, m2) = glued_pair(2);
        let matrix = transplantation_matrix(q(6), q(-2), q(2), q(2));
        for mode in [DiscretizationMode::Fem, DiscretizationMode::Graph] {
            let v = verify_transplantation(
                &m1,
                &BCAssignment::all_neumann(&m1),
                &m2,
                &BCAssignment::all_neumann(&m2),
                &matrix,
                6,
                mode,
                1e-9,
                17,
            )
            .unwrap();
            assert!(
                v.eigenvalue_max_rel_diff < 1e-9,
                "{mode}: eigenvalues differ by {}",
                v.eigenvalue_max_rel_diff
            );
            assert!(v.forward_max_residual < 1e-7, "{mode}: {}", v.forward_max_residual);
            assert!(v.inverse_max_residual < 1e-7, "{mode}: {}", v.inverse_max_residual);
            assert!(v.gluing_max_residual < 1e-10, "{mode}: {}", v.gluing_max_residual);
        }
    }

    #[test]
    fn dirichlet_conditions_break_the_transplantation() {
        let (m1, m2) = glued_pair(2);
        let matrix = transplantation_matrix(q(6), q(-2), q(2), q(2));
        let v = verify_transplantation(
            &m1,
            &BCAssignment::all(&m1, BoundaryCondition::Dirichlet),
            &m2,
            &BCAssignment::all(&m2, BoundaryCondition::Dirichlet),
            &matrix,
            4,
            DiscretizationMode::Fem,
            1e-9,
            17,
        )
        .unwrap();
        // The discrete Dirichlet spectra genuinely differ and the moved
        // eigenvectors are far from the target eigenspaces.
        assert!(
            v.eigenvalue_max_rel_diff > 1e-4,
            "unexpectedly close: {}",
            v.eigenvalue_max_rel_diff
        );
        assert!(v.forward_max_residual > 1e-3);
    }

    #[test]
    fn incompatible_meshes_and_singular_matrices_are_rejected() {
        let (m1, m2) = glued_pair(2);
        let matrix = transplantation_matrix(q(6), q(-2), q(2), q(2));
        let (c1, _) = glued_pair(1);
        assert!(matches!(
            transplant(&c1, &m2, &matrix.entries, &vec![0.0; c1.node_count], 1e-9),
            Err(Error::IncompatibleMeshes(_))
        ));
        let singular = transplantation_matrix(q(0), q(1), q(1), q(1));
        assert!(matches!(
            verify_transplantation(
                &m1,
                &BCAssignment::all_neumann(&m1),
                &m2,
                &BCAssignment::all_neumann(&m2),
                &singular,
                3,
                DiscretizationMode::Graph,
                1e-9,
                1,
            ),
            Err(Error::Singular(_))
        ));
    }
}
