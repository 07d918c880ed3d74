//! Experiment configuration files.
//!
//! Configs are TOML documents. Every table rejects unknown keys, and numeric
//! values may be written as expressions in strings (see [`Num`]). The grammar
//! is documented in `experiments/README.md`.

use super::expr::Num;
use crate::analytic::Initialization;
use crate::error::{Error, Result};
use crate::material::{check_order, unit_at_degrees, Degree, Director, MaterialProgram, Region};
use crate::mesh::geom::Point;
use crate::mesh::Segment;
use crate::solver::SolverConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub domain: DomainSpec,
    pub material: MaterialSpec,
    #[serde(default, rename = "region", skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RegionSpec>,
    #[serde(default, skip_serializing_if = "SegmentSpec::is_empty")]
    pub creases: SegmentSpec,
    #[serde(default, skip_serializing_if = "SegmentSpec::is_empty")]
    pub cuts: SegmentSpec,
    #[serde(default)]
    pub regularization: RegularizationSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default, skip_serializing_if = "DirichletSpec::is_empty")]
    pub dirichlet: DirichletSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "ExpectSpec::is_empty")]
    pub expect: ExpectSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    /// The unit square, or `bounds` if given.
    Square,
    Rectangle,
    /// Unit disc at refinement `level`.
    Disc,
    /// Cube rhombus as the affine image of an `n x n` square mesh.
    Rhombus,
    /// Cube rhombus from the triangular lattice refined `n` times.
    RhombusLattice,
    /// Constrained Delaunay mesh of `bounds` resolving creases and cuts.
    Constrained,
    /// Mesh read from `path` in the ASCII mesh format.
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Single,
    CrissCross,
    UnionJack,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[Num; 4]>,
    /// Axis spacing of structured meshes, target size of constrained ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiles: Option<[usize; 2]>,
    /// Element diameter near creases and cuts after grading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade_h: Option<Num>,
    /// Width of the graded band; defaults to `grade_h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade_width: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgramKind {
    Uniform,
    Defect,
    Half,
    ThreeHalf,
    Piecewise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub program: ProgramKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<[Num; 2]>,
    /// Director angle in degrees, as an alternative to `m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Num>,
}

/// One polygonal region of a piecewise program. A region without a polygon
/// covers everything not claimed by earlier regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[Num; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<Num>,
    pub s: Num,
    pub s0: Num,
}

/// Line segments given individually, as open polylines or as closed loops.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<[Num; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polylines: Vec<Vec<[Num; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<Vec<[Num; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationSpec {
    /// Jump penalty weight off the creases.
    #[serde(default = "one")]
    pub c_r: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub tau: Num,
    pub tol1: Num,
    pub tol2: Num,
    pub max_steps: usize,
    pub max_newton: usize,
    pub max_halvings: usize,
    pub c1: Num,
    pub c2: Num,
    pub tau_reduction: Num,
    pub min_tau: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    #[serde(default = "flat")]
    pub shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<Num>,
    /// Half-width of a seeded uniform perturbation added to every height,
    /// used to break symmetries shared by the mesh and the program.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Reference points whose nearest vertices are held fixed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletSpec {
    #[serde(default)]
    pub points: Vec<[Num; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Artifact directory; nothing is written when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    pub vtk: bool,
    pub obj: bool,
    pub normals: bool,
    pub trace: bool,
}

/// Tolerance bands checked against the final state and listed in the report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_defect: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

fn one() -> Num {
    Num(1.0)
}

fn flat() -> String {
    "flat".into()
}

impl Default for RegularizationSpec {
    fn default() -> Self {
        RegularizationSpec { c_r: one() }
    }
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec::from(&SolverConfig::default())
    }
}

impl From<&SolverConfig> for SolverSpec {
    fn from(c: &SolverConfig) -> Self {
        SolverSpec {
            tau: Num(c.tau),
            tol1: Num(c.tol1),
            tol2: Num(c.tol2),
            max_steps: c.max_steps,
            max_newton: c.max_newton,
            max_halvings: c.max_halvings,
            c1: Num(c.c1),
            c2: Num(c.c2),
            tau_reduction: Num(c.tau_reduction),
            min_tau: Num(c.min_tau),
        }
    }
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            shape: flat(),
            amplitude: None,
            noise: None,
            seed: None,
        }
    }
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            vtk: true,
            obj: true,
            normals: false,
            trace: true,
        }
    }
}

impl SegmentSpec {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty() && self.polylines.is_empty() && self.loops.is_empty()
    }

    pub fn to_segments(&self) -> Vec<Segment> {
        let pt = |p: &[Num; 2]| [p[0].get(), p[1].get()];
        let mut out: Vec<Segment> = self
            .segments
            .iter()
            .map(|s| [[s[0].get(), s[1].get()], [s[2].get(), s[3].get()]])
            .collect();
        for line in &self.polylines {
            out.extend(line.windows(2).map(|w| [pt(&w[0]), pt(&w[1])]));
        }
        for l in &self.loops {
            let n = l.len();
            out.extend((0..n).map(|k| [pt(&l[k]), pt(&l[(k + 1) % n])]));
        }
        out
    }
}

impl DirichletSpec {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl ExpectSpec {
    pub fn is_empty(&self) -> bool {
        self.energy.is_none() && self.metric_defect.is_none() && self.converged.is_none()
    }
}

/// Parses and validates a config, filling defaults for omitted tables.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start));
        Error::config(line, e.message().trim().to_string())
    })?;
    cfg.validate_in(Some(text))?;
    Ok(cfg)
}

/// Writes `cfg` back in the config format; parsing the output reproduces it.
pub fn serialize_config(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::config(None, format!("cannot serialize config: {e}")))
}

fn line_of(text: &str, offset: usize) -> usize {
    1 + text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count()
}

/// Line of `key` inside the `nth` occurrence of table `section`.
fn locate(text: &str, section: &str, nth: usize, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut seen = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section {
                seen += 1;
            }
            continue;
        }
        if current == section && seen == nth + 1 {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Checker<'a> {
    text: Option<&'a str>,
}

impl Checker<'_> {
    fn fail(&self, section: &str, nth: usize, key: &str, message: String) -> Error {
        let line = self.text.and_then(|t| locate(t, section, nth, key));
        Error::config(line, message)
    }

    fn require<T: Copy>(&self, v: Option<T>, section: &str, key: &str, what: &str) -> Result<T> {
        v.ok_or_else(|| self.fail(section, 0, key, format!("[{section}] {key} is required for {what}")))
    }

    fn forbid<T>(&self, v: &Option<T>, section: &str, key: &str, what: &str) -> Result<()> {
        match v {
            Some(_) => Err(self.fail(section, 0, key, format!("[{section}] {key} does not apply to {what}"))),
            None => Ok(()),
        }
    }

    fn positive(&self, v: f64, section: &str, key: &str) -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, 0, key, format!("[{section}] {key} = {v} must be positive")))
        }
    }

    fn order(&self, v: f64, section: &str, nth: usize, key: &str) -> Result<()> {
        check_order(v, key).map_err(|e| self.fail(section, nth, key, format!("[{section}] {key}: {e}")))
    }
}

fn director_of(m: Option<[Num; 2]>, angle: Option<Num>) -> std::result::Result<[f64; 2], String> {
    match (m, angle) {
        (Some(_), Some(_)) => Err("give either m or angle, not both".into()),
        (Some([a, b]), None) => {
            let n = a.get().hypot(b.get());
            if !(n > 0.0) || !n.is_finite() {
                return Err("m must be a nonzero vector".into());
            }
            Ok([a.get() / n, b.get() / n])
        }
        (None, Some(t)) if t.get().is_finite() => Ok(unit_at_degrees(t.get())),
        (None, Some(_)) => Err("angle must be finite".into()),
        (None, None) => Err("a director (m or angle) is required".into()),
    }
}

impl ExperimentConfig {
    /// Range and consistency checks; `parse_config` runs these already.
    pub fn validate(&self) -> Result<()> {
        self.validate_in(None)
    }

    fn validate_in(&self, text: Option<&str>) -> Result<()> {
        let c = Checker { text };
        self.validate_domain(&c)?;
        self.validate_material(&c)?;
        let cr = self.regularization.c_r.get();
        if !(cr >= 0.0) || !cr.is_finite() {
            return Err(c.fail("regularization", 0, "c_r", format!("[regularization] c_r = {cr} must be nonnegative")));
        }
        let s = &self.solver;
        for (key, v) in [("tau", s.tau), ("tol1", s.tol1), ("tol2", s.tol2), ("c1", s.c1), ("c2", s.c2), ("min_tau", s.min_tau)] {
            c.positive(v.get(), "solver", key)?;
        }
        if s.c1.get() >= s.c2.get() {
            return Err(c.fail("solver", 0, "c1", "[solver] c1 must be smaller than c2".into()));
        }
        let r = s.tau_reduction.get();
        if !(r > 0.0 && r < 1.0) {
            return Err(c.fail("solver", 0, "tau_reduction", format!("[solver] tau_reduction = {r} must lie in (0, 1)")));
        }
        for (key, v) in [("max_steps", s.max_steps), ("max_newton", s.max_newton)] {
            if v == 0 {
                return Err(c.fail("solver", 0, key, format!("[solver] {key} must be at least 1")));
            }
        }
        self.initialization()
            .map_err(|e| c.fail("init", 0, "shape", format!("[init] {e}")))?;
        if let Some(a) = self.init.amplitude {
            if !a.get().is_finite() {
                return Err(c.fail("init", 0, "amplitude", "[init] amplitude must be finite".into()));
            }
        }
        if let Some(n) = self.init.noise {
            if !(n.get() >= 0.0 && n.get().is_finite()) {
                return Err(c.fail("init", 0, "noise", "[init] noise must be finite and nonnegative".into()));
            }
        } else if self.init.seed.is_some() {
            return Err(c.fail("init", 0, "seed", "[init] seed does not apply without noise".into()));
        }
        for (section, spec) in [("creases", &self.creases), ("cuts", &self.cuts)] {
            for line in spec.polylines.iter().chain(&spec.loops) {
                if line.len() < 2 {
                    return Err(Error::config(None, format!("[{section}] polylines need at least two points")));
                }
            }
            if spec.to_segments().iter().flatten().flatten().any(|v| !v.is_finite()) {
                return Err(Error::config(None, format!("[{section}] coordinates must be finite")));
            }
        }
        for (key, band) in [("energy", self.expect.energy), ("metric_defect", self.expect.metric_defect)] {
            if let Some([lo, hi]) = band {
                if !(lo.get() <= hi.get()) {
                    return Err(c.fail("expect", 0, key, format!("[expect] {key} band is empty")));
                }
            }
        }
        Ok(())
    }

    fn validate_domain(&self, c: &Checker) -> Result<()> {
        let d = &self.domain;
        let what = format!("{:?} domains", d.kind).to_lowercase();
        let structured = matches!(d.kind, DomainKind::Square | DomainKind::Rectangle);
        if !structured {
            c.forbid(&d.pattern, "domain", "pattern", &what)?;
            c.forbid(&d.tiles, "domain", "tiles", &what)?;
        }
        if d.kind != DomainKind::Disc {
            c.forbid(&d.level, "domain", "level", &what)?;
        }
        if !matches!(d.kind, DomainKind::Rhombus | DomainKind::RhombusLattice) {
            c.forbid(&d.n, "domain", "n", &what)?;
        }
        if d.kind != DomainKind::File {
            c.forbid(&d.path, "domain", "path", &what)?;
        }
        if !matches!(d.kind, DomainKind::Square | DomainKind::Rectangle | DomainKind::Constrained) {
            c.forbid(&d.h, "domain", "h", &what)?;
            c.forbid(&d.bounds, "domain", "bounds", &what)?;
        }
        match d.kind {
            DomainKind::Square | DomainKind::Rectangle | DomainKind::Constrained => {
                if d.kind == DomainKind::Rectangle {
                    c.require(d.bounds, "domain", "bounds", &what)?;
                }
                let h = c.require(d.h, "domain", "h", &what)?.get();
                c.positive(h, "domain", "h")?;
                let [x0, y0, x1, y1] = self.bounds();
                if !(x1 > x0 && y1 > y0) {
                    return Err(c.fail("domain", 0, "bounds", "[domain] bounds must satisfy x0 < x1 and y0 < y1".into()));
                }
                if structured {
                    for side in [x1 - x0, y1 - y0] {
                        let n = side / h;
                        if (n - n.round()).abs() > 1e-9 * n.max(1.0) || n.round() < 1.0 {
                            return Err(c.fail("domain", 0, "h", format!("[domain] h = {h} does not divide the side {side}")));
                        }
                    }
                }
                if d.pattern == Some(PatternKind::UnionJack) {
                    let [tx, ty] = c.require(d.tiles, "domain", "tiles", "union_jack patterns")?;
                    let [nx, ny] = self.cells().unwrap_or([0, 0]);
                    if tx == 0 || ty == 0 || nx % (2 * tx) != 0 || ny % (2 * ty) != 0 {
                        return Err(c.fail("domain", 0, "tiles", "[domain] each tile needs an even number of cells per side".into()));
                    }
                } else {
                    c.forbid(&d.tiles, "domain", "tiles", "patterns other than union_jack")?;
                }
            }
            DomainKind::Disc => {
                let level = c.require(d.level, "domain", "level", &what)?;
                if level > 9 {
                    return Err(c.fail("domain", 0, "level", format!("[domain] level = {level} exceeds 9")));
                }
            }
            DomainKind::Rhombus | DomainKind::RhombusLattice => {
                if c.require(d.n, "domain", "n", &what)? == 0 {
                    return Err(c.fail("domain", 0, "n", "[domain] n must be at least 1".into()));
                }
            }
            DomainKind::File => {
                c.require(d.path.as_ref(), "domain", "path", &what)?;
            }
        }
        if let Some(g) = d.grade_h {
            c.positive(g.get(), "domain", "grade_h")?;
        } else {
            c.forbid(&d.grade_width, "domain", "grade_width", "ungraded meshes")?;
        }
        if let Some(w) = d.grade_width {
            c.positive(w.get(), "domain", "grade_width")?;
        }
        Ok(())
    }

    fn validate_material(&self, c: &Checker) -> Result<()> {
        let m = &self.material;
        let what = format!("{:?} programs", m.program).to_lowercase();
        if m.program == ProgramKind::Piecewise {
            c.forbid(&m.s, "material", "s", &what)?;
            c.forbid(&m.s0, "material", "s0", &what)?;
            c.forbid(&m.m, "material", "m", &what)?;
            c.forbid(&m.angle, "material", "angle", &what)?;
            if self.regions.is_empty() {
                return Err(Error::config(None, "piecewise programs need at least one [[region]]"));
            }
            for (k, r) in self.regions.iter().enumerate() {
                c.order(r.s.get(), "region", k, "s")?;
                c.order(r.s0.get(), "region", k, "s0")?;
                director_of(r.m, r.angle).map_err(|e| c.fail("region", k, "m", format!("[[region]] {}: {e}", k + 1)))?;
                match &r.polygon {
                    Some(p) if p.len() < 3 => {
                        return Err(c.fail("region", k, "polygon", format!("[[region]] {}: polygon needs 3 vertices", k + 1)));
                    }
                    None if k + 1 != self.regions.len() => {
                        return Err(c.fail("region", k, "s", format!("[[region]] {}: only the last region may omit its polygon", k + 1)));
                    }
                    _ => {}
                }
            }
        } else {
            if !self.regions.is_empty() {
                return Err(Error::config(None, format!("[[region]] tables do not apply to {what}")));
            }
            c.order(c.require(m.s, "material", "s", &what)?.get(), "material", 0, "s")?;
            c.order(c.require(m.s0, "material", "s0", &what)?.get(), "material", 0, "s0")?;
        }
        match m.program {
            ProgramKind::Uniform => {
                director_of(m.m, m.angle).map_err(|e| c.fail("material", 0, "m", format!("[material] {e}")))?;
            }
            ProgramKind::Defect => {
                let text = c.require(m.degree.as_ref(), "material", "degree", &what)?;
                text.parse::<Degree>()
                    .map_err(|e| c.fail("material", 0, "degree", format!("[material] {e}")))?;
            }
            _ => {}
        }
        if m.program != ProgramKind::Uniform {
            c.forbid(&m.m, "material", "m", &what)?;
            c.forbid(&m.angle, "material", "angle", &what)?;
        }
        if m.program != ProgramKind::Defect {
            c.forbid(&m.degree, "material", "degree", &what)?;
            c.forbid(&m.alpha, "material", "alpha", &what)?;
        }
        Ok(())
    }

    /// Domain bounds for rectangular and constrained domains.
    pub fn bounds(&self) -> [f64; 4] {
        self.domain
            .bounds
            .map(|b| b.map(Num::get))
            .unwrap_or([0.0, 0.0, 1.0, 1.0])
    }

    /// Structured cell counts `[nx, ny]`.
    pub fn cells(&self) -> Option<[usize; 2]> {
        let h = self.domain.h?.get();
        let [x0, y0, x1, y1] = self.bounds();
        Some([((x1 - x0) / h).round() as usize, ((y1 - y0) / h).round() as usize])
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            tau: s.tau.get(),
            tol1: s.tol1.get(),
            tol2: s.tol2.get(),
            max_steps: s.max_steps,
            max_newton: s.max_newton,
            max_halvings: s.max_halvings,
            c1: s.c1.get(),
            c2: s.c2.get(),
            tau_reduction: s.tau_reduction.get(),
            min_tau: s.min_tau.get(),
            track_metric_defect: true,
        }
    }

    pub fn material_program(&self) -> Result<MaterialProgram> {
        let m = &self.material;
        let bad = |e: String| Error::config(None, format!("[material] {e}"));
        let s = || m.s.map_or(0.0, Num::get);
        let s0 = || m.s0.map_or(0.0, Num::get);
        match m.program {
            ProgramKind::Uniform => MaterialProgram::uniform(Director::Constant(director_of(m.m, m.angle).map_err(bad)?), s(), s0()),
            ProgramKind::Defect => {
                let degree: Degree = m.degree.as_deref().unwrap_or("").parse()?;
                let alpha = m.alpha.map_or(0.0, Num::get);
                MaterialProgram::uniform(Director::Defect { degree, alpha }, s(), s0())
            }
            ProgramKind::Half => MaterialProgram::uniform(Director::Half, s(), s0()),
            ProgramKind::ThreeHalf => MaterialProgram::uniform(Director::ThreeHalf, s(), s0()),
            ProgramKind::Piecewise => {
                let regions = self
                    .regions
                    .iter()
                    .map(|r| {
                        Ok(Region {
                            polygon: r
                                .polygon
                                .as_ref()
                                .map(|p| p.iter().map(|q| [q[0].get(), q[1].get()]).collect::<Vec<Point>>()),
                            director: Director::Constant(director_of(r.m, r.angle).map_err(bad)?),
                            s: r.s.get(),
                            s0: r.s0.get(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                MaterialProgram::new(regions)
            }
        }
    }

    pub fn initialization(&self) -> Result<Initialization> {
        Initialization::from_name(&self.init.shape, self.init.amplitude.map(Num::get))
    }

    pub fn crease_segments(&self) -> Vec<Segment> {
        self.creases.to_segments()
    }

    pub fn cut_segments(&self) -> Vec<Segment> {
        self.cuts.to_segments()
    }

    pub fn dirichlet_points(&self) -> Vec<Point> {
        self.dirichlet.points.iter().map(|p| [p[0].get(), p[1].get()]).collect()
    }
}
