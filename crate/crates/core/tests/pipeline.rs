use lcn_core::io::{
    canned_config, canned_names, parse_config, read_vtk, run_config, serialize_config, write_artifacts,
};
use std::fs::File;
use std::io::BufReader;

const SMALL: &str = r#"
name = "pipeline"

[domain]
kind = "square"
h = "1/8"
pattern = "union_jack"
tiles = [2, 2]

[material]
program = "piecewise"

[[region]]
label = "inner"
polygon = [[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]]
angle = 0
s = 1
s0 = 1

[[region]]
label = "outer"
angle = 90
s = 0.1
s0 = 1

[creases]
loops = [[[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]]]

[regularization]
c_r = 10

[init]
shape = "table_b"

[solver]
tau = 0.2
tol1 = 1e-5
"#;

#[test]
fn every_builtin_config_survives_a_serialization_round_trip() {
    for name in canned_names() {
        let cfg = canned_config(name).unwrap();
        let text = serialize_config(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg, "{name}");
    }
}

#[test]
fn runs_are_bitwise_reproducible() {
    let cfg = parse_config(SMALL).unwrap();
    let a = run_config(&cfg).unwrap();
    let b = run_config(&cfg).unwrap();
    assert_eq!(a.deformation, b.deformation);
    let ea: Vec<u64> = a.report.trace.steps.iter().map(|s| s.energy.total.to_bits()).collect();
    let eb: Vec<u64> = b.report.trace.steps.iter().map(|s| s.energy.total.to_bits()).collect();
    assert_eq!(ea, eb);
    assert!(a.report.converged());
}

#[test]
fn artifacts_have_consistent_array_lengths() {
    let cfg = parse_config(SMALL).unwrap();
    let out = run_config(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_artifacts(&out, dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    let vtk = read_vtk(BufReader::new(File::open(dir.path().join("pipeline.vtk")).unwrap())).unwrap();
    let mesh = out.problem.model.mesh();
    assert_eq!(vtk.points.len(), mesh.num_vertices());
    assert_eq!(vtk.cells.len(), mesh.num_elements());
    assert!(!vtk.cell_data.is_empty());
    for (name, data) in &vtk.cell_data {
        assert_eq!(data.len(), mesh.num_elements(), "{name}");
    }
    for (name, data) in &vtk.point_data {
        assert_eq!(data.len(), mesh.num_vertices(), "{name}");
    }
    assert_eq!(vtk.points, out.deformation);
    let trace = std::fs::read_to_string(dir.path().join("pipeline.trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + out.report.trace.steps.len());
}

#[test]
fn creases_let_the_sheet_fold() {
    let cfg = parse_config(SMALL).unwrap();
    let out = run_config(&cfg).unwrap();
    assert_eq!(out.problem.creases.num_regions, 2);
    assert!(!out.problem.creases.edges.is_empty());
    let w = out.problem.model.weights();
    for &e in &out.problem.creases.edges {
        assert_eq!(w.weights[e], 0.0);
    }
    assert!(out.report.energy.total < out.report.trace.initial.total);
}
