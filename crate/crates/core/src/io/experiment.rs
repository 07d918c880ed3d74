//! The mesh → material → solve → diagnose → export pipeline.

use super::config::{parse_config, DomainKind, ExperimentConfig, PatternKind};
use super::diagnostics::{metric_defect, stress_field};
use super::expr::Num;
use super::vtk::{export_obj, export_vtk, VtkFields};
use crate::energy::{interpolate, Deformation, EnergyModel, EnergyReport};
use crate::error::{Error, Result};
use crate::material::MaterialProgram;
use crate::mesh::{
    build_edge_topology, fit_creases, generate_constrained_mesh, generate_disc_mesh, generate_rhombus_lattice_mesh,
    generate_rhombus_mesh, generate_square_mesh, grade_near, near_segments, read_mesh_ascii, slit, CreaseSet,
    DiagonalPattern, Mesh, Rect,
};
use crate::solver::{FlowStatus, FlowTrace, Solver, StepRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Everything needed to run the flow for one config.
#[derive(Clone, Debug)]
pub struct Problem {
    pub config: ExperimentConfig,
    pub program: MaterialProgram,
    pub creases: CreaseSet,
    pub model: EnergyModel,
    pub initial: Deformation,
    pub pinned: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub quantity: String,
    pub band: [f64; 2],
    pub value: f64,
    pub pass: bool,
}

/// Final state diagnostics of one run.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub status: FlowStatus,
    pub energy: EnergyReport,
    /// `‖I[y] − g‖_{L¹}`.
    pub metric_defect: f64,
    pub metric_defect_field: Vec<f64>,
    pub stress_field: Vec<f64>,
    pub trace: FlowTrace,
    pub final_tau: f64,
    pub seconds: f64,
    pub expectations: Vec<Expectation>,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub problem: Problem,
    pub deformation: Deformation,
    pub report: ExperimentReport,
}

impl ExperimentReport {
    pub fn converged(&self) -> bool {
        self.status == FlowStatus::Converged
    }

    /// Whether every committed expectation band holds.
    pub fn expectations_met(&self) -> bool {
        self.expectations.iter().all(|e| e.pass)
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

/// Builds the mesh described by the `[domain]`, `[creases]` and `[cuts]`
/// tables: base mesh, optional grading near creases and cuts, then slits.
pub fn build_mesh(cfg: &ExperimentConfig) -> Result<Mesh> {
    let d = &cfg.domain;
    let creases = cfg.crease_segments();
    let cuts = cfg.cut_segments();
    let [x0, y0, x1, y1] = cfg.bounds();
    let rect = Rect::new(x0, y0, x1, y1);
    let base = match d.kind {
        DomainKind::Square | DomainKind::Rectangle => {
            let [nx, ny] = cfg.cells().ok_or_else(|| Error::config(None, "[domain] h is required"))?;
            let pattern = match d.pattern.unwrap_or(PatternKind::Single) {
                PatternKind::Single => DiagonalPattern::Single,
                PatternKind::CrissCross => DiagonalPattern::CrissCross,
                PatternKind::UnionJack => {
                    let [tiles_x, tiles_y] = d.tiles.unwrap_or([1, 1]);
                    DiagonalPattern::UnionJack { tiles_x, tiles_y }
                }
            };
            generate_square_mesh(nx, ny, rect, pattern)?
        }
        DomainKind::Disc => generate_disc_mesh(d.level.unwrap_or(0))?,
        DomainKind::Rhombus => generate_rhombus_mesh(d.n.unwrap_or(1))?,
        DomainKind::RhombusLattice => generate_rhombus_lattice_mesh(d.n.unwrap_or(1))?,
        DomainKind::Constrained => {
            let all: Vec<_> = creases.iter().chain(&cuts).copied().collect();
            generate_constrained_mesh(rect, &all, d.h.map_or(0.0, Num::get))?
        }
        DomainKind::File => {
            let path = d.path.as_deref().unwrap_or("");
            read_mesh_ascii(BufReader::new(File::open(path)?))?
        }
    };
    let graded = match d.grade_h {
        Some(g) => {
            let g = g.get();
            let width = d.grade_width.map_or(g, Num::get);
            let all: Vec<_> = creases.iter().chain(&cuts).copied().collect();
            let mut m = grade_near(&base, &near_segments(&all, width), g)?;
            m.h = base.h;
            m
        }
        None => base,
    };
    if cuts.is_empty() {
        Ok(graded)
    } else {
        slit(&graded, &cuts)
    }
}

fn nearest_vertex(mesh: &Mesh, p: [f64; 2]) -> Result<usize> {
    let tol = 1e-9 * mesh.max_diameter().max(1e-300);
    mesh.vertices
        .iter()
        .position(|v| (v[0] - p[0]).hypot(v[1] - p[1]) <= tol)
        .ok_or_else(|| Error::config(None, format!("[dirichlet] point {p:?} is not a mesh vertex")))
}

/// Runs the mesh, material and initialization stages.
pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem> {
    stage("config", cfg.validate())?;
    let mesh = stage("mesh", build_mesh(cfg))?;
    let (topology, creases) = stage(
        "mesh",
        (|| {
            let topology = build_edge_topology(&mesh)?;
            let segs = cfg.crease_segments();
            let creases = if segs.is_empty() {
                CreaseSet::empty(&mesh, &topology)
            } else {
                fit_creases(&mesh, &topology, &segs)?
            };
            Ok((topology, creases))
        })(),
    )?;
    let program = stage("material", cfg.material_program())?;
    let init = stage("init", cfg.initialization())?;
    let mut initial = interpolate(&mesh, |p| init.eval(p));
    if let Some(noise) = cfg.init.noise {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.init.seed.unwrap_or(0));
        for y in &mut initial {
            y[2] += noise.get() * rng.random_range(-1.0..=1.0);
        }
    }
    let pinned = stage(
        "init",
        cfg.dirichlet_points()
            .into_iter()
            .map(|p| nearest_vertex(&mesh, p))
            .collect::<Result<Vec<_>>>(),
    )?;
    let model = stage(
        "material",
        EnergyModel::from_program(mesh, topology, &creases, &program, cfg.regularization.c_r.get()),
    )?;
    Ok(Problem {
        config: cfg.clone(),
        program,
        creases,
        model,
        initial,
        pinned,
    })
}

fn band_check(quantity: &str, band: Option<[Num; 2]>, value: f64) -> Option<Expectation> {
    band.map(|[lo, hi]| Expectation {
        quantity: quantity.into(),
        band: [lo.get(), hi.get()],
        value,
        pass: value >= lo.get() && value <= hi.get(),
    })
}

/// Runs the flow and the diagnostics; `observe` sees every accepted step.
pub fn run_problem_with(problem: Problem, observe: impl FnMut(&StepRecord, &[f64])) -> Result<ExperimentOutcome> {
    let start = Instant::now();
    let cfg = &problem.config;
    let (result, final_tau) = stage(
        "solve",
        (|| {
            let mut solver = Solver::new(&problem.model, cfg.solver_config())?;
            solver.pin_vertices(&problem.pinned)?;
            let r = solver.run_with(&problem.initial, observe)?;
            Ok((r, solver.tau()))
        })(),
    )?;
    let y = result.deformation;
    let mesh = problem.model.mesh();
    let (defect, defect_field) = stage(
        "diagnose",
        metric_defect(mesh, &y, &problem.model.material().target_metric()),
    )?;
    let stress = stage("diagnose", stress_field(mesh, &y, &problem.program))?;
    let energy = result.trace.final_energy();
    let status = result.trace.status.unwrap_or(FlowStatus::StepCap);
    let expect = &cfg.expect;
    let mut expectations: Vec<Expectation> = [
        band_check("energy", expect.energy, energy.total),
        band_check("metric_defect", expect.metric_defect, defect),
    ]
    .into_iter()
    .flatten()
    .collect();
    if let Some(want) = expect.converged {
        let got = status == FlowStatus::Converged;
        expectations.push(Expectation {
            quantity: "converged".into(),
            band: [f64::from(u8::from(want)); 2],
            value: f64::from(u8::from(got)),
            pass: want == got,
        });
    }
    let report = ExperimentReport {
        name: cfg.name.clone(),
        status,
        energy,
        metric_defect: defect,
        metric_defect_field: defect_field,
        stress_field: stress,
        trace: result.trace,
        final_tau,
        seconds: start.elapsed().as_secs_f64(),
        expectations,
        artifacts: Vec::new(),
    };
    Ok(ExperimentOutcome {
        problem,
        deformation: y,
        report,
    })
}

pub fn run_config(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    run_config_with(cfg, |_, _| {})
}

pub fn run_config_with(cfg: &ExperimentConfig, observe: impl FnMut(&StepRecord, &[f64])) -> Result<ExperimentOutcome> {
    run_problem_with(build_problem(cfg)?, observe)
}

/// Reads the config at `path`, runs it and writes the artifacts to
/// `[output] dir` when one is set.
pub fn run_experiment(path: &Path) -> Result<ExperimentOutcome> {
    let text = stage("config", fs::read_to_string(path).map_err(Error::from))?;
    let cfg = stage("config", parse_config(&text))?;
    let mut outcome = run_config(&cfg)?;
    if let Some(dir) = &cfg.output.dir {
        let files = stage("export", write_artifacts(&outcome, Path::new(dir)))?;
        outcome.report.artifacts = files;
    }
    Ok(outcome)
}

fn file_stem(outcome: &ExperimentOutcome) -> String {
    if outcome.report.name.is_empty() {
        "experiment".into()
    } else {
        outcome.report.name.clone()
    }
}

/// Writes `<name>.report.json`, `<name>.trace.csv`, `<name>.vtk` and
/// `<name>.obj` into `dir`, as enabled by the `[output]` table.
pub fn write_artifacts(outcome: &ExperimentOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let out = &outcome.problem.config.output;
    let stem = file_stem(outcome);
    let mut files = Vec::new();
    let mesh = outcome.problem.model.mesh();
    let y = &outcome.deformation;
    if out.trace {
        let p = dir.join(format!("{stem}.trace.csv"));
        let mut w = BufWriter::new(File::create(&p)?);
        outcome.report.trace.write_csv(&mut w)?;
        w.flush()?;
        files.push(p);
    }
    if out.vtk {
        let p = dir.join(format!("{stem}.vtk"));
        let displacement = y
            .iter()
            .zip(&mesh.vertices)
            .map(|(q, x)| [q[0] - x[0], q[1] - x[1], q[2]])
            .collect();
        let fields = VtkFields {
            cell_scalars: vec![
                ("metric_defect".into(), outcome.report.metric_defect_field.clone()),
                ("stress_l1".into(), outcome.report.stress_field.clone()),
            ],
            cell_labels: vec![(
                "region".into(),
                outcome.problem.model.material().region.iter().map(|&r| r as i64).collect(),
            )],
            point_vectors: vec![("displacement".into(), displacement)],
        };
        let mut w = BufWriter::new(File::create(&p)?);
        export_vtk(&mut w, &stem, mesh, y, &fields)?;
        w.flush()?;
        files.push(p);
    }
    if out.obj {
        let p = dir.join(format!("{stem}.obj"));
        let mut w = BufWriter::new(File::create(&p)?);
        export_obj(&mut w, mesh, y, out.normals)?;
        w.flush()?;
        files.push(p);
    }
    let p = dir.join(format!("{stem}.report.json"));
    let mut listed = files.clone();
    listed.push(p.clone());
    fs::write(&p, report_json(outcome, &listed)?)?;
    files.push(p);
    Ok(files)
}

#[derive(Serialize)]
struct MeshSummary {
    vertices: usize,
    elements: usize,
    h: f64,
    max_diameter: f64,
    min_diameter: f64,
    crease_edges: usize,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    name: &'a str,
    status: &'static str,
    steps: usize,
    newton_iterations: usize,
    seconds: f64,
    tau: f64,
    final_tau: f64,
    initial_energy: f64,
    energy: f64,
    stretching_energy: f64,
    regularization_energy: f64,
    metric_defect: f64,
    stress_l1_max: f64,
    stress_l1_median: f64,
    mesh: MeshSummary,
    expectations: &'a [Expectation],
    artifacts: Vec<String>,
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[s.len() / 2]
}

pub fn status_name(s: FlowStatus) -> &'static str {
    match s {
        FlowStatus::Converged => "converged",
        FlowStatus::StepCap => "step_cap",
    }
}

/// The report as pretty-printed JSON.
pub fn report_json(outcome: &ExperimentOutcome, artifacts: &[PathBuf]) -> Result<String> {
    let r = &outcome.report;
    let mesh = outcome.problem.model.mesh();
    let doc = ReportJson {
        name: &r.name,
        status: status_name(r.status),
        steps: r.trace.steps.len(),
        newton_iterations: r.trace.steps.iter().map(|s| s.newton_iters).sum(),
        seconds: r.seconds,
        tau: outcome.problem.config.solver.tau.get(),
        final_tau: r.final_tau,
        initial_energy: r.trace.initial.total,
        energy: r.energy.total,
        stretching_energy: r.energy.stretching,
        regularization_energy: r.energy.regularization,
        metric_defect: r.metric_defect,
        stress_l1_max: r.stress_field.iter().copied().fold(0.0, f64::max),
        stress_l1_median: median(&r.stress_field),
        mesh: MeshSummary {
            vertices: mesh.num_vertices(),
            elements: mesh.num_elements(),
            h: mesh.h,
            max_diameter: mesh.max_diameter(),
            min_diameter: mesh.min_diameter(),
            crease_edges: outcome.problem.creases.edges.len(),
        },
        expectations: &r.expectations,
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::invalid(format!("cannot encode report: {e}")))
}

/// One run of a parameter sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub vertices: usize,
    pub elements: usize,
    pub max_diameter: f64,
    pub energy: EnergyReport,
    pub metric_defect: f64,
    pub steps: usize,
    pub status: FlowStatus,
    pub seconds: f64,
}

/// Copy of `cfg` with one parameter replaced. Supported names: `h`,
/// `level`, `n`, `grade_h`, `c_r`, `tau`, `tol1`, `amplitude`.
pub fn with_param(cfg: &ExperimentConfig, name: &str, value: f64) -> Result<ExperimentConfig> {
    let mut c = cfg.clone();
    let count = |v: f64| -> Result<usize> {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::config(None, format!("{name} = {v} must be a nonnegative integer")))
        }
    };
    match name {
        "h" => c.domain.h = Some(Num(value)),
        "level" => c.domain.level = Some(count(value)?),
        "n" => c.domain.n = Some(count(value)?),
        "grade_h" => c.domain.grade_h = Some(Num(value)),
        "c_r" => c.regularization.c_r = Num(value),
        "tau" => c.solver.tau = Num(value),
        "tol1" => c.solver.tol1 = Num(value),
        "amplitude" => c.init.amplitude = Some(Num(value)),
        other => return Err(Error::config(None, format!("cannot sweep unknown parameter '{other}'"))),
    }
    c.validate()?;
    Ok(c)
}

/// Runs `cfg` once per value of `param`, in order.
pub fn sweep(cfg: &ExperimentConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&v| {
            let c = stage("config", with_param(cfg, param, v))?;
            let out = run_config(&c)?;
            let mesh = out.problem.model.mesh();
            Ok(SweepRow {
                value: v,
                vertices: mesh.num_vertices(),
                elements: mesh.num_elements(),
                max_diameter: mesh.max_diameter(),
                energy: out.report.energy,
                metric_defect: out.report.metric_defect,
                steps: out.report.trace.steps.len(),
                status: out.report.status,
                seconds: out.report.seconds,
            })
        })
        .collect()
}

/// Convergence table with one line per sweep value.
pub fn write_sweep_csv<W: Write>(mut w: W, param: &str, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "{param},vertices,elements,max_diameter,E_h,E_str,R_h,metric_defect,steps,status,seconds")?;
    for r in rows {
        writeln!(
            w,
            "{:.17e},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{:.3}",
            r.value,
            r.vertices,
            r.elements,
            r.max_diameter,
            r.energy.total,
            r.energy.stretching,
            r.energy.regularization,
            r.metric_defect,
            r.steps,
            status_name(r.status),
            r.seconds
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
name = "small"

[domain]
kind = "square"
h = "1/4"

[material]
program = "uniform"
angle = 0
s = 0.1
s0 = 1

[init]
shape = "table_b"
amplitude = 0.2

[solver]
max_steps = 3
"#;

    #[test]
    fn pipeline_runs_and_is_deterministic() {
        let cfg = parse_config(SMALL).unwrap();
        let a = run_config(&cfg).unwrap();
        let b = run_config(&cfg).unwrap();
        assert_eq!(a.deformation, b.deformation);
        assert_eq!(a.report.trace.steps.len(), 3);
        assert!(a.report.energy.total < a.report.trace.initial.total);
        assert_eq!(a.report.metric_defect_field.len(), a.problem.model.mesh().num_elements());
    }

    #[test]
    fn stages_are_tagged() {
        let cfg = parse_config(&SMALL.replace("[solver]", "[dirichlet]\npoints = [[0.3, 0.3]]\n[solver]")).unwrap();
        let err = build_problem(&cfg).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "init", .. }), "{err}");
        assert!(matches!(err.root(), Error::Config { .. }));
    }

    #[test]
    fn artifacts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(SMALL).unwrap();
        let out = run_config(&cfg).unwrap();
        let files = write_artifacts(&out, dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("small.report.json")).unwrap()).unwrap();
        assert_eq!(json["mesh"]["elements"], 32);
        assert_eq!(json["steps"], 3);
    }

    #[test]
    fn sweep_replaces_the_parameter() {
        let cfg = parse_config(SMALL).unwrap();
        let rows = sweep(&cfg, "h", &[0.5, 0.25]).unwrap();
        assert_eq!(rows[0].elements, 8);
        assert_eq!(rows[1].elements, 32);
        assert!(with_param(&cfg, "h", 0.3).is_err());
        assert!(with_param(&cfg, "bogus", 1.0).is_err());
    }
}
