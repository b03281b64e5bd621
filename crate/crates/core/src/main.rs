//! Command-line front end: group checks, gluing graphs, character tables,
//! transplantation matrices, surface assembly, spectra, and the end-to-end
//! verification pipeline.
//!
//! Every run is deterministic: outputs carry no timestamps, eigensolves are
//! seeded, and identical configurations produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use isodrum::group::{
    almost_conjugate, coset_action, gerst, AlmostConjugacyReport, CosetAction, FiniteGroup,
    Subgroup,
};
use isodrum::rep_theory::{
    character_table, format_table, induced_character, intertwiner_space, q, transplantation_matrix,
    PermRep, TransplantMatrix, QMat,
};
use isodrum::schreier::{build_schreier, is_orientable, OrientabilityVerdict, SchreierGraph};
use isodrum::spectral::{
    assemble, compare_values, compute_spectrum, convergence_study, ComparisonReport,
    ConvergenceReport, DiscretizationMode, SpectrumReport,
};
use isodrum::tiler::{
    assemble_surface, builtin_tile, mesh_tile, BCAssignment, BoundaryCondition, Point,
    SurfaceMesh, TileSpec,
};
use isodrum::transplant::{commutator_certificate, verify_transplantation};
use isodrum::{Error, Result};

#[derive(Parser)]
#[command(
    name = "isodrum",
    version,
    about = "Build isospectral flat surfaces from coset gluings and compare their spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Almost-conjugacy and conjugacy checks on a pair of subgroups.
    Triple {
        #[command(subcommand)]
        cmd: TripleCmd,
    },
    /// Coset gluing graphs: construction and orientability.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Character table and induced-character decompositions.
    Chars {
        #[command(subcommand)]
        cmd: CharsCmd,
    },
    /// The space of matrices intertwining the two coset representations.
    Intertwine {
        #[command(subcommand)]
        cmd: IntertwineCmd,
    },
    /// Assemble the glued surface for one subgroup.
    Surface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
    /// Eigenvalue computation on an assembled surface.
    Spectrum {
        #[command(subcommand)]
        cmd: SpectrumCmd,
    },
    /// Compare two previously computed spectrum reports (JSON).
    Compare(CompareArgs),
    /// Move eigenfunctions between the two surfaces and check residuals.
    Transplant {
        #[command(subcommand)]
        cmd: TransplantCmd,
    },
    /// End-to-end run: triple, graphs, surfaces, spectra, transplantation.
    Pipeline(CommonArgs),
}

#[derive(Subcommand)]
enum TripleCmd {
    /// Check that (group, h1, h2) is an almost-conjugate, nonconjugate pair.
    Verify(CommonArgs),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Build the gluing graph for --subgroup and print/export DOT.
    Build(CommonArgs),
    /// Report orientability of the glued surface (bipartiteness).
    Orient(CommonArgs),
}

#[derive(Subcommand)]
enum CharsCmd {
    /// Print the character table with the two induced characters appended.
    Table(CommonArgs),
    /// Decompose the induced character of --subgroup into irreducibles.
    Decompose(CommonArgs),
}

#[derive(Subcommand)]
enum IntertwineCmd {
    /// Compute the intertwiner space and the parameterized matrix.
    Solve(CommonArgs),
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Assemble and summarize the surface (JSON with --out).
    Build(CommonArgs),
    /// Export the surface mesh as OFF.
    Export(CommonArgs),
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Compute the lowest eigenvalues (CSV by default, JSON via --out *.json).
    Compute(CommonArgs),
}

#[derive(Subcommand)]
enum TransplantCmd {
    /// Verify that transplantation maps eigenfunctions to eigenfunctions.
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CompareArgs {
    /// Spectrum report (JSON) for the left surface.
    left: PathBuf,
    /// Spectrum report (JSON) for the right surface.
    right: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// key=value config file; entries override the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group name (only `gerst` is built in).
    #[arg(long)]
    group: Option<String>,
    /// Subgroup for single-surface commands (gamma1, gamma2, cyclic8).
    #[arg(long)]
    subgroup: Option<String>,
    /// First subgroup of the pair.
    #[arg(long)]
    h1: Option<String>,
    /// Second subgroup of the pair.
    #[arg(long)]
    h2: Option<String>,
    /// Tile name (ytile, hexagon3, triangle, ltile, square).
    #[arg(long)]
    tile: Option<String>,
    /// Generators bound in order to the tile labels sigma, t, u.
    #[arg(long, value_delimiter = ',')]
    gens: Option<Vec<String>>,
    /// Refinement levels, ascending (single commands use the last).
    #[arg(long, value_delimiter = ',')]
    refine: Option<Vec<usize>>,
    /// Boundary conditions: neumann, dirichlet, or mixed:<file>.
    #[arg(long)]
    bc: Option<String>,
    /// Discretization mode: fem or graph.
    #[arg(long)]
    mode: Option<String>,
    /// Number of eigenpairs.
    #[arg(long)]
    count: Option<usize>,
    /// Eigensolver residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Relative tolerance for eigenvalue comparisons.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Transplantation parameters a,b,c,d.
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<i64>>,
    /// Random seed for the eigensolver start block.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (most commands) or directory (pipeline).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Fully resolved run configuration: defaults, then flags, then config file.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    group: String,
    h1: String,
    h2: String,
    subgroup: String,
    tile: String,
    tile_vertices: Option<Vec<Point>>,
    gens: Vec<String>,
    refine: Vec<usize>,
    bc: String,
    mode: DiscretizationMode,
    count: usize,
    tol: f64,
    rel_tol: Option<f64>,
    resid_tol: Option<f64>,
    params: [i64; 4],
    seed: u64,
    out: Option<PathBuf>,
    /// Expected stage verdicts; stages without an entry only report.
    expect: BTreeMap<String, String>,
}

impl RunConfig {
    fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            group: "gerst".to_string(),
            h1: "gamma1".to_string(),
            h2: "gamma2".to_string(),
            subgroup: String::new(),
            tile: "ytile".to_string(),
            tile_vertices: None,
            gens: vec!["sigma".to_string(), "t".to_string(), "u".to_string()],
            refine: vec![],
            bc: "neumann".to_string(),
            mode: DiscretizationMode::Fem,
            count: 12,
            tol: 1e-8,
            rel_tol: None,
            resid_tol: None,
            params: [6, -2, 2, 2],
            seed: 7,
            out: None,
            expect: BTreeMap::new(),
        };
        if let Some(v) = &args.group {
            cfg.group = v.clone();
        }
        if let Some(v) = &args.h1 {
            cfg.h1 = v.clone();
        }
        if let Some(v) = &args.h2 {
            cfg.h2 = v.clone();
        }
        if let Some(v) = &args.subgroup {
            cfg.subgroup = v.clone();
        }
        if let Some(v) = &args.tile {
            cfg.tile = v.clone();
        }
        if let Some(v) = &args.gens {
            cfg.gens = v.clone();
        }
        if let Some(v) = &args.refine {
            cfg.refine = v.clone();
        }
        if let Some(v) = &args.bc {
            cfg.bc = v.clone();
        }
        if let Some(v) = &args.mode {
            cfg.mode = DiscretizationMode::from_str(v)?;
        }
        if let Some(v) = args.count {
            cfg.count = v;
        }
        if let Some(v) = args.tol {
            cfg.tol = v;
        }
        if let Some(v) = args.rel_tol {
            cfg.rel_tol = Some(v);
        }
        if let Some(v) = &args.params {
            cfg.params = params_array(v)?;
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if let Some(v) = &args.out {
            cfg.out = Some(v.clone());
        }
        if let Some(path) = &args.config {
            cfg.apply_config_file(path)?;
        }
        if cfg.subgroup.is_empty() {
            cfg.subgroup = cfg.h1.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_config_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "group" => self.group = value.to_string(),
                "h1" => self.h1 = value.to_string(),
                "h2" => self.h2 = value.to_string(),
                "subgroup" => self.subgroup = value.to_string(),
                "tile" => self.tile = value.to_string(),
                "tile_vertices" => self.tile_vertices = Some(parse_points(value)?),
                "gens" => self.gens = split_list(value),
                "refine" => {
                    self.refine = split_list(value)
                        .iter()
                        .map(|s| {
                            s.parse::<usize>()
                                .map_err(|_| Error::Config(format!("bad refinement `{s}`")))
                        })
                        .collect::<Result<_>>()?
                }
                "bc" => self.bc = value.to_string(),
                "mode" => self.mode = DiscretizationMode::from_str(value)?,
                "count" => {
                    self.count = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad count `{value}`")))?
                }
                "tol" => {
                    self.tol = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad tol `{value}`")))?
                }
                "rel_tol" => {
                    self.rel_tol = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Config(format!("bad rel_tol `{value}`")))?,
                    )
                }
                "resid_tol" => {
                    self.resid_tol = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Config(format!("bad resid_tol `{value}`")))?,
                    )
                }
                "params" => {
                    let list = split_list(value)
                        .iter()
                        .map(|s| {
                            s.parse::<i64>()
                                .map_err(|_| Error::Config(format!("bad param `{s}`")))
                        })
                        .collect::<Result<Vec<i64>>>()?;
                    self.params = params_array(&list)?;
                }
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad seed `{value}`")))?
                }
                "out" => self.out = Some(PathBuf::from(value)),
                _ => {
                    if let Some(stage) = key.strip_prefix("expect_") {
                        self.expect.insert(stage.to_string(), value.to_string());
                    } else {
                        return Err(Error::Config(format!(
                            "{}:{}: unknown key `{key}`",
                            path.display(),
                            lineno + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 {
            return Err(Error::Config(format!(
                "solver tolerance must be positive, got {}",
                self.tol
            )));
        }
        if let Some(rt) = self.rel_tol {
            if rt < 0.0 {
                return Err(Error::Config(format!(
                    "comparison tolerance must be nonnegative, got {rt}"
                )));
            }
        }
        if self.refine.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "refinement levels must be strictly ascending, got {:?}",
                self.refine
            )));
        }
        if self.refine.iter().any(|&k| k == 0) {
            return Err(Error::Config("refinement 0 is not meshable".to_string()));
        }
        if self.count == 0 {
            return Err(Error::Config("count must be at least 1".to_string()));
        }
        Ok(())
    }

    /// Comparison tolerance: explicit, or the mode's default.
    fn rel_tol(&self) -> f64 {
        self.rel_tol.unwrap_or(match self.mode {
            DiscretizationMode::Graph => 1e-9,
            DiscretizationMode::Fem => 1e-6,
        })
    }

    /// Eigen-residual threshold accepted by `transplant verify`. Transplanted
    /// vectors inherit the solver's residual (times the conditioning of the
    /// matrix), so in graph mode the default tracks the solver tolerance; in
    /// fem mode discretization error dominates long before the solver does.
    fn resid_tol(&self) -> f64 {
        self.resid_tol.unwrap_or(match self.mode {
            DiscretizationMode::Graph => (100.0 * self.tol).max(1e-9),
            DiscretizationMode::Fem => 1e-3,
        })
    }

    fn refine_or(&self, default: &[usize]) -> Vec<usize> {
        if self.refine.is_empty() {
            default.to_vec()
        } else {
            self.refine.clone()
        }
    }

    fn top_refinement(&self, default: usize) -> usize {
        self.refine.last().copied().unwrap_or(default)
    }

    fn the_group(&self) -> Result<FiniteGroup> {
        if self.group != "gerst" {
            return Err(Error::UnknownName(format!("group {}", self.group)));
        }
        Ok(gerst::group())
    }

    fn subgroup_named(&self, g: &FiniteGroup, name: &str) -> Result<Subgroup> {
        gerst::subgroup_by_name(g, name)
    }

    fn generator_elements(&self) -> Result<Vec<usize>> {
        self.gens.iter().map(|n| gerst::element_by_name(n)).collect()
    }

    fn action_for(&self, g: &FiniteGroup, subgroup: &str) -> Result<CosetAction> {
        let h = self.subgroup_named(g, subgroup)?;
        coset_action(g, &h, &self.generator_elements()?, Some(&gerst::s_transversal()))
    }

    /// Gluing graph over the canonical tile labels sigma, t, u.
    fn graph_for(&self, g: &FiniteGroup, subgroup: &str) -> Result<SchreierGraph> {
        if self.gens.len() != 3 {
            return Err(Error::Config(format!(
                "need exactly 3 generators to bind to labels sigma,t,u; got {:?}",
                self.gens
            )));
        }
        let action = self.action_for(g, subgroup)?;
        build_schreier(
            &action,
            vec!["sigma".to_string(), "t".to_string(), "u".to_string()],
        )
    }

    fn tile_spec(&self) -> Result<TileSpec> {
        let spec = builtin_tile(&self.tile)?;
        match &self.tile_vertices {
            Some(vs) => spec.with_vertices(vs.clone()),
            None => Ok(spec),
        }
    }

    fn surface_for(&self, g: &FiniteGroup, subgroup: &str, k: usize) -> Result<SurfaceMesh> {
        let graph = self.graph_for(g, subgroup)?;
        let tmesh = mesh_tile(&self.tile_spec()?, k)?;
        assemble_surface(&graph, &tmesh)
    }

    fn bc_for(&self, mesh: &SurfaceMesh) -> Result<BCAssignment> {
        bc_assignment(&self.bc, mesh)
    }

    fn transplant_matrix(&self) -> TransplantMatrix {
        let [a, b, c, d] = self.params;
        transplantation_matrix(q(a), q(b), q(c), q(d))
    }

    /// Expected verdict for a stage; `default` applies when the config is
    /// silent. `None` means the stage only reports.
    fn expected(&self, stage: &str, default: Option<&str>) -> Option<String> {
        self.expect
            .get(stage)
            .map(|s| s.to_string())
            .or_else(|| default.map(|s| s.to_string()))
    }
}

fn params_array(list: &[i64]) -> Result<[i64; 4]> {
    <[i64; 4]>::try_from(list.to_vec())
        .map_err(|_| Error::Config(format!("params must be a,b,c,d; got {list:?}")))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

/// `x,y; x,y; ...` — tile coordinate overrides in config files.
fn parse_points(s: &str) -> Result<Vec<Point>> {
    s.split(';')
        .map(|pair| {
            let nums: Vec<&str> = pair.split(',').map(|t| t.trim()).collect();
            if nums.len() != 2 {
                return Err(Error::Config(format!("bad vertex `{pair}`")));
            }
            let x = nums[0]
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad coordinate `{}`", nums[0])))?;
            let y = nums[1]
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad coordinate `{}`", nums[1])))?;
            Ok([x, y])
        })
        .collect()
}

fn parse_bc_kind(s: &str) -> Result<BoundaryCondition> {
    match s {
        "neumann" => Ok(BoundaryCondition::Neumann),
        "dirichlet" => Ok(BoundaryCondition::Dirichlet),
        other => Err(Error::BoundaryCondition(format!(
            "unknown boundary condition `{other}`"
        ))),
    }
}

/// `neumann`, `dirichlet`, or `mixed:<file>` with `name=neumann|dirichlet`
/// lines (and an optional `default=` line) naming boundary segments.
fn bc_assignment(bc: &str, mesh: &SurfaceMesh) -> Result<BCAssignment> {
    if bc == "neumann" {
        return Ok(BCAssignment::all_neumann(mesh));
    }
    if bc == "dirichlet" {
        return Ok(BCAssignment::all_dirichlet(mesh));
    }
    if let Some(path) = bc.strip_prefix("mixed:") {
        let text = fs::read_to_string(path)?;
        let mut default = BoundaryCondition::Neumann;
        let mut overrides = BTreeMap::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, cond) = line.split_once('=').ok_or_else(|| {
                Error::BoundaryCondition(format!("expected name=condition, got `{raw}`"))
            })?;
            let cond = parse_bc_kind(cond.trim())?;
            if name.trim() == "default" {
                default = cond;
            } else {
                overrides.insert(name.trim().to_string(), cond);
            }
        }
        return BCAssignment::from_names(mesh, default, &overrides);
    }
    Err(Error::BoundaryCondition(format!(
        "--bc must be neumann, dirichlet or mixed:<file>; got `{bc}`"
    )))
}

/// Write to the path when given, otherwise print to stdout.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every produced verdict matched its expectation.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Cmd::Triple { cmd: TripleCmd::Verify(a) } => cmd_triple_verify(&RunConfig::resolve(&a)?),
        Cmd::Graph { cmd: GraphCmd::Build(a) } => cmd_graph_build(&RunConfig::resolve(&a)?),
        Cmd::Graph { cmd: GraphCmd::Orient(a) } => cmd_graph_orient(&RunConfig::resolve(&a)?),
        Cmd::Chars { cmd: CharsCmd::Table(a) } => cmd_chars_table(&RunConfig::resolve(&a)?),
        Cmd::Chars { cmd: CharsCmd::Decompose(a) } => {
            cmd_chars_decompose(&RunConfig::resolve(&a)?)
        }
        Cmd::Intertwine { cmd: IntertwineCmd::Solve(a) } => {
            cmd_intertwine_solve(&RunConfig::resolve(&a)?)
        }
        Cmd::Surface { cmd: SurfaceCmd::Build(a) } => cmd_surface_build(&RunConfig::resolve(&a)?),
        Cmd::Surface { cmd: SurfaceCmd::Export(a) } => {
            cmd_surface_export(&RunConfig::resolve(&a)?)
        }
        Cmd::Spectrum { cmd: SpectrumCmd::Compute(a) } => {
            cmd_spectrum_compute(&RunConfig::resolve(&a)?)
        }
        Cmd::Compare(a) => {
            let cfg = RunConfig::resolve(&a.common)?;
            cmd_compare(&cfg, &a.left, &a.right)
        }
        Cmd::Transplant { cmd: TransplantCmd::Verify(a) } => {
            cmd_transplant_verify(&RunConfig::resolve(&a)?)
        }
        Cmd::Pipeline(a) => cmd_pipeline(&RunConfig::resolve(&a)?),
    }
}

fn render_class_counts(report: &AlmostConjugacyReport) -> String {
    let mut out = String::from("class     |class∩H1|  |class∩H2|\n");
    for (name, c1, c2) in &report.class_counts {
        let marker = if c1 != c2 { "  <- differs" } else { "" };
        let _ = writeln!(out, "{name:<10}{c1:<12}{c2}{marker}");
    }
    out
}

fn cmd_triple_verify(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let h1 = cfg.subgroup_named(&g, &cfg.h1)?;
    let h2 = cfg.subgroup_named(&g, &cfg.h2)?;
    let report = almost_conjugate(&g, &h1, &h2);

    println!("triple verify: {} vs {} in {}", cfg.h1, cfg.h2, cfg.group);
    println!(
        "almost conjugate: {}    conjugate as subgroups: {}",
        if report.almost_conjugate { "yes" } else { "no" },
        if report.conjugate_as_subgroups { "yes" } else { "no" }
    );
    if report.almost_conjugate {
        for (x, by, y) in &report.matching {
            println!("  {x}  ->  {y}   (conjugated by {by})");
        }
    } else {
        print!("{}", render_class_counts(&report));
        if let Some(cl) = &report.failing_class {
            println!("first failing class: {cl}");
        }
    }
    let verdict = if report.almost_conjugate { "PASS" } else { "FAIL" };
    println!("verdict: {verdict}");
    if let Some(out) = &cfg.out {
        fs::write(out, serde_json::to_string_pretty(&report)?)?;
    }
    let expected = cfg.expected("triple", Some("PASS")).unwrap();
    Ok(verdict == expected)
}

fn cmd_graph_build(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let graph = cfg.graph_for(&g, &cfg.subgroup)?;
    let dot = graph.to_dot(&cfg.subgroup);
    println!(
        "graph for {} over gens {}: {} vertices, {} gluings, {} half-edges",
        cfg.subgroup,
        cfg.gens.join(","),
        graph.vertex_count,
        graph.full_edges.len(),
        graph.half_edges.len()
    );
    match &cfg.out {
        Some(path) => fs::write(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(true)
}

fn cmd_graph_orient(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let graph = cfg.graph_for(&g, &cfg.subgroup)?;
    let verdict = is_orientable(&graph);
    describe_orientability(&cfg.subgroup, &verdict);
    if let Some(out) = &cfg.out {
        fs::write(out, serde_json::to_string_pretty(&verdict)?)?;
    }
    match cfg.expected("orientability", None) {
        Some(exp) => Ok(exp == verdict.is_orientable().to_string()),
        None => Ok(true),
    }
}

fn describe_orientability(name: &str, verdict: &OrientabilityVerdict) {
    match verdict {
        OrientabilityVerdict::Orientable { two_coloring } => {
            let sides: Vec<String> = two_coloring.iter().map(|c| c.to_string()).collect();
            println!("{name}: orientable (tile sides {})", sides.join(""));
        }
        OrientabilityVerdict::Nonorientable {
            witness_vertices,
            witness_labels,
        } => {
            let mut cycle = String::new();
            for (i, v) in witness_vertices.iter().enumerate() {
                let _ = write!(cycle, "{v} -{}- ", witness_labels[i]);
            }
            let _ = write!(cycle, "{}", witness_vertices[0]);
            println!(
                "{name}: nonorientable (odd cycle of {} gluings: {cycle})",
                witness_labels.len()
            );
        }
    }
}

fn cmd_chars_table(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let table = character_table(&g)?;
    let mut extra = Vec::new();
    for name in [&cfg.h1, &cfg.h2] {
        let h = cfg.subgroup_named(&g, name)?;
        extra.push((format!("C[G/{name}]"), induced_character(&g, &h, &table)?));
    }
    let text = format_table(&table, &extra);
    emit(&cfg.out, &text)?;
    Ok(true)
}

fn cmd_chars_decompose(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let table = character_table(&g)?;
    let h = cfg.subgroup_named(&g, &cfg.subgroup)?;
    let chi = induced_character(&g, &h, &table)?;
    let parts = table.decompose(&chi)?;
    let shown: Vec<String> = parts
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(name, m)| {
            if *m == 1 {
                name.label()
            } else {
                format!("{}·{}", m, name.label())
            }
        })
        .collect();
    println!("C[G/{}] = {}", cfg.subgroup, shown.join(" + "));
    if let Some(out) = &cfg.out {
        let map: BTreeMap<String, usize> =
            parts.iter().map(|(n, m)| (n.label(), *m)).collect();
        fs::write(out, serde_json::to_string_pretty(&map)?)?;
    }
    Ok(true)
}

fn cmd_intertwine_solve(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let a1 = cfg.action_for(&g, &cfg.h1)?;
    let a2 = cfg.action_for(&g, &cfg.h2)?;
    let space = intertwiner_space(&PermRep::from_action(&a1), &PermRep::from_action(&a2))?;
    let m = cfg.transplant_matrix();
    let flat_basis: Vec<Vec<isodrum::rep_theory::Q>> =
        space.basis.iter().map(|b| b.data.clone()).collect();
    let in_space = QMat::in_span(&flat_basis, &m.entries.data);

    println!("intertwiner dimension: {}", space.dimension);
    let [a, b, c, d] = cfg.params;
    println!("params: a={a} b={b} c={c} d={d}");
    println!(
        "symbol: alpha={} beta={} gamma={} delta={}",
        m.alpha, m.beta, m.gamma, m.delta
    );
    println!("singular: {}", if m.singular { "yes" } else { "no" });
    println!("lies in intertwiner space: {}", if in_space { "yes" } else { "no" });
    for i in 0..8 {
        let row: Vec<String> = (0..8).map(|j| m.entries.at(i, j).to_string()).collect();
        println!("  [{}]", row.join(" "));
    }
    if let Some(out) = &cfg.out {
        let entries: Vec<Vec<String>> = (0..8)
            .map(|i| (0..8).map(|j| m.entries.at(i, j).to_string()).collect())
            .collect();
        let doc = json!({
            "dimension": space.dimension,
            "params": {"a": a, "b": b, "c": c, "d": d},
            "symbol": {
                "alpha": m.alpha.to_string(),
                "beta": m.beta.to_string(),
                "gamma": m.gamma.to_string(),
                "delta": m.delta.to_string(),
            },
            "singular": m.singular,
            "in_intertwiner_space": in_space,
            "entries": entries,
        });
        fs::write(out, serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct SurfaceSummary {
    subgroup: String,
    tile: String,
    refinement: usize,
    tiles: usize,
    nodes: usize,
    area: f64,
    euler_characteristic: i64,
    boundary_components: usize,
    cone_points: usize,
    orientable: bool,
}

fn summarize_surface(cfg: &RunConfig, name: &str, k: usize, m: &SurfaceMesh) -> Result<SurfaceSummary> {
    Ok(SurfaceSummary {
        subgroup: name.to_string(),
        tile: cfg.tile.clone(),
        refinement: k,
        tiles: m.tile_count(),
        nodes: m.node_count,
        area: m.area(),
        euler_characteristic: m.euler_characteristic(),
        boundary_components: m.boundary_components()?.len(),
        cone_points: m.cone_points(1e-9).len(),
        orientable: m.orientation_signs.is_some(),
    })
}

fn cmd_surface_build(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let k = cfg.top_refinement(4);
    let mesh = cfg.surface_for(&g, &cfg.subgroup, k)?;
    let s = summarize_surface(cfg, &cfg.subgroup, k, &mesh)?;
    println!(
        "surface {}/{} at refinement {}: {} tiles, {} nodes, area {:.6}, chi {}, {} boundary component(s), {} cone point(s), {}",
        cfg.tile,
        cfg.subgroup,
        k,
        s.tiles,
        s.nodes,
        s.area,
        s.euler_characteristic,
        s.boundary_components,
        s.cone_points,
        if s.orientable { "orientable" } else { "nonorientable" },
    );
    if let Some(out) = &cfg.out {
        fs::write(out, mesh.to_json()?)?;
    }
    Ok(true)
}

fn cmd_surface_export(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let k = cfg.top_refinement(4);
    let mesh = cfg.surface_for(&g, &cfg.subgroup, k)?;
    emit(&cfg.out, &mesh.to_off())?;
    Ok(true)
}

fn cmd_spectrum_compute(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let k = cfg.top_refinement(8);
    let mesh = cfg.surface_for(&g, &cfg.subgroup, k)?;
    let bc = cfg.bc_for(&mesh)?;
    let op = assemble(&mesh, &bc, cfg.mode)?;
    let (report, _) = compute_spectrum(&op, cfg.count, cfg.tol, cfg.seed)?;
    match &cfg.out {
        Some(path) if path.extension().is_some_and(|e| e == "json") => {
            fs::write(path, report.to_json()?)?;
            println!(
                "wrote {} eigenvalues ({} mode, {} dofs) to {}",
                report.eigenvalues.len(),
                report.meta.mode,
                report.meta.dof_count,
                path.display()
            );
        }
        Some(path) => {
            fs::write(path, report.to_csv())?;
            println!(
                "wrote {} eigenvalues ({} mode, {} dofs) to {}",
                report.eigenvalues.len(),
                report.meta.mode,
                report.meta.dof_count,
                path.display()
            );
        }
        None => print!("{}", report.to_csv()),
    }
    Ok(true)
}

fn cmd_compare(cfg: &RunConfig, left: &Path, right: &Path) -> Result<bool> {
    let l: SpectrumReport = serde_json::from_str(&fs::read_to_string(left)?)?;
    let r: SpectrumReport = serde_json::from_str(&fs::read_to_string(right)?)?;
    // Solver residuals bound the algebraic eigenvalue error of each discrete
    // operator, so they can back a DISTINGUISHED verdict about the pair of
    // discrete spectra (statements about the continuum need the pipeline's
    // extrapolation path instead).
    let estimates: Vec<f64> = l
        .eigenvalues
        .iter()
        .zip(&r.eigenvalues)
        .map(|(a, b)| a.residual.max(b.residual))
        .collect();
    let report = isodrum::spectral::compare_spectra(&l, &r, cfg.rel_tol(), Some(&estimates))?;
    println!(
        "compare {} vs {} (rel tol {:e}): {}",
        left.display(),
        right.display(),
        cfg.rel_tol(),
        report.verdict
    );
    if let Some(i) = report.first_exceeding {
        let e = &report.entries[i];
        println!(
            "first exceeding index {}: {:.12e} vs {:.12e} (rel {:.3e})",
            e.index, e.left, e.right, e.rel_diff
        );
    }
    if let Some(out) = &cfg.out {
        fs::write(out, report.to_json()?)?;
    }
    let expected = cfg.expected("compare", Some("PASS")).unwrap();
    Ok(report.verdict.to_string() == expected)
}

fn cmd_transplant_verify(cfg: &RunConfig) -> Result<bool> {
    let g = cfg.the_group()?;
    let k = cfg.top_refinement(4);
    let m1 = cfg.surface_for(&g, &cfg.h1, k)?;
    let m2 = cfg.surface_for(&g, &cfg.h2, k)?;
    let bc1 = cfg.bc_for(&m1)?;
    let bc2 = cfg.bc_for(&m2)?;
    let matrix = cfg.transplant_matrix();

    if cfg.mode == DiscretizationMode::Graph {
        let cert = commutator_certificate(&m1, &m2, &matrix.entries)?;
        println!(
            "commutator L2·T - T·L1: exact zero: {}   float defect {:.3e}",
            if cert.exact_zero { "yes" } else { "no" },
            cert.float_defect
        );
    }
    let v = verify_transplantation(
        &m1, &bc1, &m2, &bc2, &matrix, cfg.count, cfg.mode, cfg.tol, cfg.seed,
    )?;
    println!(
        "transplant verify ({} mode, refinement {}, {} eigenpairs):",
        v.mode, k, v.count
    );
    println!("  eigenvalue max rel diff : {:.3e}", v.eigenvalue_max_rel_diff);
    println!("  forward residual        : {:.3e}", v.forward_max_residual);
    println!("  inverse residual        : {:.3e}", v.inverse_max_residual);
    println!("  gluing trace mismatch   : {:.3e}", v.gluing_max_residual);
    let pass = v.eigenvalue_max_rel_diff <= cfg.rel_tol()
        && v.forward_max_residual <= cfg.resid_tol()
        && v.inverse_max_residual <= cfg.resid_tol()
        && v.gluing_max_residual <= 1e-12;
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("verdict: {verdict}");
    if let Some(out) = &cfg.out {
        fs::write(out, serde_json::to_string_pretty(&v)?)?;
    }
    let expected = cfg.expected("transplant", Some("PASS")).unwrap();
    Ok(verdict == expected)
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StageRecord {
    stage: String,
    verdict: String,
    expected: Option<String>,
    matched: bool,
    details: serde_json::Value,
}

impl StageRecord {
    fn new(
        stage: &str,
        verdict: String,
        expected: Option<String>,
        details: serde_json::Value,
    ) -> StageRecord {
        let matched = expected.as_deref().is_none_or(|e| e == verdict);
        StageRecord {
            stage: stage.to_string(),
            verdict,
            expected,
            matched,
        details,
        }
    }
}

#[derive(Serialize)]
struct PipelineReport {
    config: RunConfig,
    stages: Vec<StageRecord>,
    all_matched: bool,
}

/// Levels, spectra per level, and (when three or more levels are present)
/// the Richardson study, for one surface and one boundary condition.
struct SpectrumLadder {
    reports: Vec<SpectrumReport>,
    study: Option<ConvergenceReport>,
}

fn spectrum_ladder(
    cfg: &RunConfig,
    g: &FiniteGroup,
    subgroup: &str,
    levels: &[usize],
    bc_name: &str,
) -> Result<SpectrumLadder> {
    let mut reports = Vec::new();
    for &k in levels {
        let mesh = cfg.surface_for(g, subgroup, k)?;
        let bc = bc_assignment(bc_name, &mesh)?;
        let op = assemble(&mesh, &bc, cfg.mode)?;
        let (report, _) = compute_spectrum(&op, cfg.count, cfg.tol, cfg.seed)?;
        reports.push(report);
    }
    let study = if levels.len() >= 3 && levels.windows(2).all(|w| w[1] == 2 * w[0]) {
        let values: Vec<Vec<f64>> = reports.iter().map(|r| r.values()).collect();
        Some(convergence_study(levels, &values)?)
    } else {
        None
    };
    Ok(SpectrumLadder { reports, study })
}

/// Compare the two ladders: extrapolated values with extrapolation-error
/// support when both studies extrapolate cleanly, otherwise the finest-level
/// spectra with solver-residual support.
fn compare_ladders(
    cfg: &RunConfig,
    left: &SpectrumLadder,
    right: &SpectrumLadder,
) -> Result<(ComparisonReport, String)> {
    let l = left.reports.last().expect("at least one level");
    let r = right.reports.last().expect("at least one level");
    let finest_l = l.values();
    let finest_r = r.values();
    let residual: Vec<f64> = l
        .eigenvalues
        .iter()
        .zip(&r.eigenvalues)
        .map(|(a, b)| a.residual.max(b.residual))
        .collect();
    // Per index: prefer extrapolated values with their study estimates, fall
    // back to the finest level with solver residuals where an index has no
    // extrapolation (non-monotone wobble at roundoff, typically the zero
    // modes). One bad index must not drag the whole comparison down.
    let (mut vl, mut vr, mut est) = (finest_l.clone(), finest_r.clone(), residual.clone());
    let mut extrapolated = 0usize;
    if let (Some(sl), Some(sr)) = (&left.study, &right.study) {
        for (i, (el, er)) in sl.entries.iter().zip(&sr.entries).enumerate() {
            if i >= vl.len() {
                break;
            }
            if let (Some(xl), Some(xr), Some(eel), Some(eer)) =
                (el.extrapolated, er.extrapolated, el.error_estimate, er.error_estimate)
            {
                vl[i] = xl;
                vr[i] = xr;
                est[i] = eel.max(eer);
                extrapolated += 1;
            }
        }
    }
    let basis = if extrapolated == vl.len() {
        "extrapolated".to_string()
    } else if extrapolated == 0 {
        "finest level".to_string()
    } else {
        format!("extrapolated ({extrapolated} of {} indices)", vl.len())
    };
    let report = compare_values(&vl, &vr, cfg.rel_tol(), Some(&est))?;
    Ok((report, basis))
}

/// Two-column eigenvalue table with differences, ready for gnuplot.
fn difference_table(
    title: &str,
    basis: &str,
    left: &[f64],
    right: &[f64],
    estimates: Option<&[f64]>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "# basis: {basis}");
    let _ = writeln!(
        out,
        "# index  lambda_m1  lambda_m2  abs_diff  error_estimate"
    );
    for (i, (a, b)) in left.iter().zip(right).enumerate() {
        let est = estimates.map(|e| e[i]).unwrap_or(0.0);
        let _ = writeln!(
            out,
            "{i}  {a:.12e}  {b:.12e}  {:.12e}  {est:.12e}",
            (a - b).abs()
        );
    }
    out
}

fn ladder_csvs(
    dir: &Path,
    prefix: &str,
    levels: &[usize],
    ladder: &SpectrumLadder,
) -> Result<()> {
    for (k, report) in levels.iter().zip(&ladder.reports) {
        fs::write(dir.join(format!("{prefix}_k{k}.csv")), report.to_csv())?;
    }
    Ok(())
}

fn comparison_stage_details(
    basis: &str,
    report: &ComparisonReport,
    left: &SpectrumLadder,
    right: &SpectrumLadder,
) -> serde_json::Value {
    json!({
        "basis": basis,
        "comparison": report,
        "solver_meta_m1": left.reports.iter().map(|r| &r.meta).collect::<Vec<_>>(),
        "solver_meta_m2": right.reports.iter().map(|r| &r.meta).collect::<Vec<_>>(),
        "study_m1": left.study,
        "study_m2": right.study,
    })
}

fn cmd_pipeline(cfg: &RunConfig) -> Result<bool> {
    let dir = cfg
        .out
        .clone()
        .ok_or_else(|| Error::Config("pipeline requires --out <directory>".to_string()))?;
    fs::create_dir_all(&dir)?;
    let g = cfg.the_group()?;
    let default_levels: &[usize] = match cfg.mode {
        DiscretizationMode::Graph => &[8],
        DiscretizationMode::Fem => &[8, 16, 32],
    };
    let levels = cfg.refine_or(default_levels);
    let mut stages: Vec<StageRecord> = Vec::new();

    // The paper's difference-table basis value for each comparison stage.
    let stage_failed = |stage: &str, e: &Error| -> Error {
        Error::Config(format!("pipeline stage `{stage}` failed: {e}"))
    };

    // Stage 1: the group-theoretic input.
    let h1 = cfg.subgroup_named(&g, &cfg.h1)?;
    let h2 = cfg.subgroup_named(&g, &cfg.h2)?;
    let triple = almost_conjugate(&g, &h1, &h2);
    let triple_verdict = if triple.almost_conjugate { "PASS" } else { "FAIL" };
    println!(
        "[1/7] triple            : {} ({} vs {}, conjugate: {})",
        triple_verdict,
        cfg.h1,
        cfg.h2,
        if triple.conjugate_as_subgroups { "yes" } else { "no" }
    );
    stages.push(StageRecord::new(
        "triple",
        triple_verdict.to_string(),
        cfg.expected("triple", Some("PASS")),
        serde_json::to_value(&triple)?,
    ));

    // Stage 2: gluing graphs (DOT artifacts).
    let g1 = cfg.graph_for(&g, &cfg.h1).map_err(|e| stage_failed("graphs", &e))?;
    let g2 = cfg.graph_for(&g, &cfg.h2).map_err(|e| stage_failed("graphs", &e))?;
    fs::write(dir.join("m1.dot"), g1.to_dot("m1"))?;
    fs::write(dir.join("m2.dot"), g2.to_dot("m2"))?;
    println!(
        "[2/7] graphs            : {} vertices each, {}+{} gluings",
        g1.vertex_count,
        g1.full_edges.len(),
        g2.full_edges.len()
    );
    stages.push(StageRecord::new(
        "graphs",
        "BUILT".to_string(),
        None,
        json!({
            "vertices": g1.vertex_count,
            "m1_full_edges": g1.full_edges.len(),
            "m2_full_edges": g2.full_edges.len(),
            "m1_half_edges": g1.half_edges.len(),
            "m2_half_edges": g2.half_edges.len(),
        }),
    ));

    // Stage 3: orientability of both surfaces.
    let o1 = is_orientable(&g1);
    let o2 = is_orientable(&g2);
    let orient_verdict = format!("{},{}", o1.is_orientable(), o2.is_orientable());
    describe_orientability("m1", &o1);
    describe_orientability("m2", &o2);
    println!("[3/7] orientability     : {orient_verdict}");
    stages.push(StageRecord::new(
        "orientability",
        orient_verdict,
        cfg.expected("orientability", Some("false,true")),
        json!({"m1": o1, "m2": o2}),
    ));

    // Stage 4: assembled surfaces (OFF artifacts at the coarsest level).
    let k0 = levels[0];
    let m1 = cfg
        .surface_for(&g, &cfg.h1, k0)
        .map_err(|e| stage_failed("surfaces", &e))?;
    let m2 = cfg
        .surface_for(&g, &cfg.h2, k0)
        .map_err(|e| stage_failed("surfaces", &e))?;
    fs::write(dir.join("m1.off"), m1.to_off())?;
    fs::write(dir.join("m2.off"), m2.to_off())?;
    let s1 = summarize_surface(cfg, &cfg.h1, k0, &m1)?;
    let s2 = summarize_surface(cfg, &cfg.h2, k0, &m2)?;
    println!(
        "[4/7] surfaces          : {} tiles, areas {:.4}/{:.4}, chi {}/{}, cone points {}/{}",
        s1.tiles, s1.area, s2.area, s1.euler_characteristic, s2.euler_characteristic,
        s1.cone_points, s2.cone_points
    );
    stages.push(StageRecord::new(
        "surfaces",
        "BUILT".to_string(),
        None,
        json!({"m1": s1, "m2": s2}),
    ));

    // Stage 5: Neumann spectra.
    let n1 = spectrum_ladder(cfg, &g, &cfg.h1, &levels, "neumann")
        .map_err(|e| stage_failed("neumann", &e))?;
    let n2 = spectrum_ladder(cfg, &g, &cfg.h2, &levels, "neumann")
        .map_err(|e| stage_failed("neumann", &e))?;
    ladder_csvs(&dir, "m1_neumann", &levels, &n1)?;
    ladder_csvs(&dir, "m2_neumann", &levels, &n2)?;
    let (ncmp, nbasis) = compare_ladders(cfg, &n1, &n2).map_err(|e| stage_failed("neumann", &e))?;
    let nl: Vec<f64> = ncmp.entries.iter().map(|e| e.left).collect();
    let nr: Vec<f64> = ncmp.entries.iter().map(|e| e.right).collect();
    let nest: Option<Vec<f64>> = ncmp.entries.iter().map(|e| e.error_estimate).collect();
    fs::write(
        dir.join("neumann_diff.dat"),
        difference_table(
            &format!("neumann eigenvalue differences, {} mode, tile {}", cfg.mode, cfg.tile),
            &nbasis,
            &nl,
            &nr,
            nest.as_deref(),
        ),
    )?;
    println!("[5/7] neumann compare   : {} ({nbasis})", ncmp.verdict);
    stages.push(StageRecord::new(
        "neumann",
        ncmp.verdict.to_string(),
        cfg.expected("neumann", Some("PASS")),
        comparison_stage_details(&nbasis, &ncmp, &n1, &n2),
    ));

    // Stage 6: transplantation on the finest level.
    let kf = *levels.last().expect("validated nonempty");
    let t1 = cfg.surface_for(&g, &cfg.h1, kf)?;
    let t2 = cfg.surface_for(&g, &cfg.h2, kf)?;
    let matrix = cfg.transplant_matrix();
    let mut cert_json = serde_json::Value::Null;
    if cfg.mode == DiscretizationMode::Graph {
        let cert = commutator_certificate(&t1, &t2, &matrix.entries)
            .map_err(|e| stage_failed("transplant", &e))?;
        println!(
            "      commutator        : exact zero {} (float defect {:.3e})",
            if cert.exact_zero { "yes" } else { "no" },
            cert.float_defect
        );
        cert_json = serde_json::to_value(&cert)?;
    }
    let tv = verify_transplantation(
        &t1,
        &BCAssignment::all_neumann(&t1),
        &t2,
        &BCAssignment::all_neumann(&t2),
        &matrix,
        cfg.count,
        cfg.mode,
        cfg.tol,
        cfg.seed,
    )
    .map_err(|e| stage_failed("transplant", &e))?;
    let tpass = tv.eigenvalue_max_rel_diff <= cfg.rel_tol()
        && tv.forward_max_residual <= cfg.resid_tol()
        && tv.inverse_max_residual <= cfg.resid_tol()
        && tv.gluing_max_residual <= 1e-12;
    let tverdict = if tpass { "PASS" } else { "FAIL" };
    println!(
        "[6/7] transplant        : {} (eigen rel {:.2e}, forward {:.2e}, inverse {:.2e}, gluing {:.2e})",
        tverdict,
        tv.eigenvalue_max_rel_diff,
        tv.forward_max_residual,
        tv.inverse_max_residual,
        tv.gluing_max_residual
    );
    stages.push(StageRecord::new(
        "transplant",
        tverdict.to_string(),
        cfg.expected("transplant", Some("PASS")),
        json!({"verification": tv, "commutator": cert_json}),
    ));

    // Stage 7: Dirichlet spectra, expected to differ.
    let d1 = spectrum_ladder(cfg, &g, &cfg.h1, &levels, "dirichlet")
        .map_err(|e| stage_failed("dirichlet", &e))?;
    let d2 = spectrum_ladder(cfg, &g, &cfg.h2, &levels, "dirichlet")
        .map_err(|e| stage_failed("dirichlet", &e))?;
    ladder_csvs(&dir, "m1_dirichlet", &levels, &d1)?;
    ladder_csvs(&dir, "m2_dirichlet", &levels, &d2)?;
    let (dcmp, dbasis) =
        compare_ladders(cfg, &d1, &d2).map_err(|e| stage_failed("dirichlet", &e))?;
    let dl: Vec<f64> = dcmp.entries.iter().map(|e| e.left).collect();
    let dr: Vec<f64> = dcmp.entries.iter().map(|e| e.right).collect();
    let dest: Option<Vec<f64>> = dcmp.entries.iter().map(|e| e.error_estimate).collect();
    fs::write(
        dir.join("dirichlet_diff.dat"),
        difference_table(
            &format!(
                "dirichlet eigenvalue differences, {} mode, tile {}",
                cfg.mode, cfg.tile
            ),
            &dbasis,
            &dl,
            &dr,
            dest.as_deref(),
        ),
    )?;
    println!("[7/7] dirichlet compare : {} ({dbasis})", dcmp.verdict);
    stages.push(StageRecord::new(
        "dirichlet",
        dcmp.verdict.to_string(),
        cfg.expected("dirichlet", Some("DISTINGUISHED")),
        comparison_stage_details(&dbasis, &dcmp, &d1, &d2),
    ));

    let all_matched = stages.iter().all(|s| s.matched);
    let report = PipelineReport {
        config: cfg.clone(),
        stages,
        all_matched,
    };
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    println!(
        "pipeline: {} (artifacts in {})",
        if all_matched { "all stage verdicts matched" } else { "verdict mismatch" },
        dir.display()
    );
    Ok(all_matched)
}
