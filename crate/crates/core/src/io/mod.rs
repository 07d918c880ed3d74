//! Experiment configs, diagnostics, exports and the run pipeline.

mod canned;
mod config;
mod diagnostics;
mod experiment;
mod expr;
mod vtk;

pub use canned::{canned_config, canned_names, CANNED};
pub use config::{
    parse_config, serialize_config, DirichletSpec, DomainKind, DomainSpec, ExpectSpec, ExperimentConfig, InitSpec,
    MaterialSpec, OutputSpec, PatternKind, ProgramKind, RegionSpec, RegularizationSpec, SegmentSpec, SolverSpec,
};
pub use diagnostics::{metric_defect, stress_field};
pub use experiment::{
    build_mesh, build_problem, report_json, run_config, run_config_with, run_experiment, run_problem_with,
    status_name, sweep, with_param, write_artifacts, write_sweep_csv, Expectation, ExperimentOutcome,
    ExperimentReport, Problem, SweepRow,
};
pub use expr::{eval, Num};
pub use vtk::{export_obj, export_vtk, read_vtk, vertex_normals, VtkFields, VtkFile};
