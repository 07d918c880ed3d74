//! Implicit H¹ gradient flow with an inner Newton iteration.
//!
//! Each flow step minimizes `L(y) = E_h[y] + (1/2τ)‖y − yⁿ‖²_{H¹}` by Newton's
//! method started at `yⁿ`. Trial iterates must keep the first fundamental
//! form of every element inside `[c1, c2]` and must not increase `L`;
//! otherwise the increment is halved. If no admissible iterate is found,
//! `τ` is reduced for the rest of the run and the step is retried.

mod linear;

use crate::energy::{first_form, Deformation, EnergyModel, EnergyReport, Mat32};
use crate::error::{Error, Result};
use linear::SparseLdlt;
use std::io::Write;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub tau: f64,
    /// Flow stops once `|E_h[yⁿ⁺¹] − E_h[yⁿ]| / τ < tol1`.
    pub tol1: f64,
    /// Newton stops once the decrement `|δL(δy)|^{1/2}` drops below `tol2`.
    pub tol2: f64,
    pub max_steps: usize,
    pub max_newton: usize,
    pub max_halvings: usize,
    pub c1: f64,
    pub c2: f64,
    /// Factor applied to `τ` when a step cannot be completed.
    pub tau_reduction: f64,
    pub min_tau: f64,
    /// Record `‖I[y] − g‖_{L¹}` after every step.
    pub track_metric_defect: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tau: 0.1,
            tol1: 1e-6,
            tol2: 1e-10,
            max_steps: 10_000,
            max_newton: 20,
            max_halvings: 30,
            c1: 1e-6,
            c2: 1e6,
            tau_reduction: 0.5,
            min_tau: 1e-10,
            track_metric_defect: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau", self.tau),
            ("tol1", self.tol1),
            ("tol2", self.tol2),
            ("c1", self.c1),
            ("min_tau", self.min_tau),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.c1 < self.c2) {
            return Err(Error::invalid("safeguard bounds need c1 < c2"));
        }
        if !(self.tau_reduction > 0.0 && self.tau_reduction < 1.0) {
            return Err(Error::invalid("tau_reduction must lie in (0, 1)"));
        }
        if self.max_newton == 0 {
            return Err(Error::invalid("max_newton must be at least 1"));
        }
        Ok(())
    }
}

/// Eigenvalues `λ1 ≤ λ2` of `FᵀF`.
pub fn first_form_eigenvalues(f: &Mat32) -> [f64; 2] {
    let i = first_form(f);
    let mean = 0.5 * (i[0][0] + i[1][1]);
    let half = 0.5 * (i[0][0] - i[1][1]);
    let r = half.hypot(i[0][1]);
    [mean - r, mean + r]
}

#[derive(Clone, Debug, PartialEq)]
pub struct SafeguardReport {
    pub offending: Vec<usize>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl SafeguardReport {
    pub fn passed(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Checks `c1 ≤ λ1 ≤ λ2 ≤ c2` for the first fundamental form on every element.
pub fn eigen_safeguard(model: &EnergyModel, y: &[[f64; 3]], c1: f64, c2: f64) -> SafeguardReport {
    safeguard_flat(model, y.as_flattened(), c1, c2, false)
}

fn safeguard_flat(model: &EnergyModel, y: &[f64], c1: f64, c2: f64, stop_early: bool) -> SafeguardReport {
    let mut report = SafeguardReport {
        offending: Vec::new(),
        min_eigenvalue: f64::INFINITY,
        max_eigenvalue: f64::NEG_INFINITY,
    };
    for t in 0..model.mesh().num_elements() {
        let [l1, l2] = first_form_eigenvalues(&model.deformation_gradient(y, t));
        report.min_eigenvalue = report.min_eigenvalue.min(l1);
        report.max_eigenvalue = report.max_eigenvalue.max(l2);
        if !(l1 >= c1 && l2 <= c2) {
            report.offending.push(t);
            if stop_early {
                break;
            }
        }
    }
    report
}

/// One Newton increment for the proximal functional.
#[derive(Clone, Debug)]
pub struct NewtonStep {
    /// Interleaved nodal increment.
    pub increment: Vec<f64>,
    /// `|δL(δy)|^{1/2}`.
    pub decrement: f64,
    /// `δL(δy)`, negative for a descent direction.
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub energy: EnergyReport,
    pub newton_iters: usize,
    /// Decrement at every Newton iterate, in order.
    pub decrements: Vec<f64>,
    pub dampings: usize,
    pub tau: f64,
    pub tau_reductions: usize,
    pub metric_defect: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowStatus {
    Converged,
    StepCap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowTrace {
    pub initial: EnergyReport,
    pub steps: Vec<StepRecord>,
    pub status: Option<FlowStatus>,
}

impl FlowTrace {
    pub fn final_energy(&self) -> EnergyReport {
        self.steps.last().map_or(self.initial, |s| s.energy)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,E_h,E_str,R_h,newton_iters,dampings,metric_defect,seconds")?;
        for s in &self.steps {
            let defect = s.metric_defect.map(|d| format!("{d:.17e}")).unwrap_or_default();
            writeln!(
                w,
                "{},{:.17e},{:.17e},{:.17e},{},{},{},{:.6}",
                s.step,
                s.energy.total,
                s.energy.stretching,
                s.energy.regularization,
                s.newton_iters,
                s.dampings,
                defect,
                s.seconds
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub deformation: Deformation,
    pub trace: FlowTrace,
}

enum Inner {
    Accepted(Vec<f64>),
    Retry,
}

/// Flow driver for one energy model, reusing the symbolic factorization.
pub struct Solver<'a> {
    model: &'a EnergyModel,
    config: SolverConfig,
    pinned: Vec<bool>,
    ldlt: SparseLdlt,
    values: Vec<f64>,
    tau: f64,
}

impl<'a> Solver<'a> {
    pub fn new(model: &'a EnergyModel, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let p = model.pattern();
        let ldlt = SparseLdlt::new(p.num_dofs(), &p.col_ptr, &p.row_idx)?;
        Ok(Solver {
            model,
            tau: config.tau,
            config,
            pinned: vec![false; model.num_dofs()],
            ldlt,
            values: vec![0.0; p.nnz()],
        })
    }

    /// Holds the listed vertices at their initial positions.
    pub fn pin_vertices(&mut self, vertices: &[usize]) -> Result<()> {
        let nv = self.model.mesh().num_vertices();
        for &v in vertices {
            if v >= nv {
                return Err(Error::invalid(format!("pinned vertex {v} out of range")));
            }
            self.pinned[3 * v..3 * v + 3].fill(true);
        }
        Ok(())
    }

    /// The current pseudo-time step, which may have been reduced.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn proximal(&self, y: &[f64], anchor: &[f64]) -> Result<(f64, EnergyReport)> {
        let e = self.model.energy(y)?;
        let d: Vec<f64> = y.iter().zip(anchor).map(|(a, b)| a - b).collect();
        Ok((e.total + 0.5 / self.tau * self.model.h1_norm_sq(&d), e))
    }

    /// Solves `(Hess E_h + H¹/τ) δ = −(∇E_h + H¹(y − anchor)/τ)` with pinned
    /// dofs held fixed.
    pub fn newton_step(&mut self, y: &[f64], anchor: &[f64]) -> Result<NewtonStep> {
        let inv_tau = 1.0 / self.tau;
        let mut g = self.model.gradient(y)?;
        let d: Vec<f64> = y.iter().zip(anchor).map(|(a, b)| a - b).collect();
        for (gi, hi) in g.iter_mut().zip(self.model.h1_apply(&d)) {
            *gi += inv_tau * hi;
        }
        self.model.hessian_into(y, inv_tau, &mut self.values)?;
        if self.pinned.iter().any(|&p| p) {
            let p = self.model.pattern();
            for c in 0..p.num_dofs() {
                for k in p.col_ptr[c]..p.col_ptr[c + 1] {
                    let r = p.row_idx[k];
                    if self.pinned[r] || self.pinned[c] {
                        self.values[k] = if r == c { 1.0 } else { 0.0 };
                    }
                }
            }
            for (gi, &p) in g.iter_mut().zip(&self.pinned) {
                if p {
                    *gi = 0.0;
                }
            }
        }
        self.ldlt.factor(&self.values)?;
        let mut delta: Vec<f64> = g.iter().map(|v| -v).collect();
        self.ldlt.solve(&mut delta)?;
        let slope: f64 = g.iter().zip(&delta).map(|(a, b)| a * b).sum();
        Ok(NewtonStep {
            increment: delta,
            decrement: slope.abs().sqrt(),
            slope,
        })
    }

    fn admissible(&self, y: &[f64]) -> bool {
        safeguard_flat(self.model, y, self.config.c1, self.config.c2, true).passed()
    }

    /// Newton loop for one step at the current `τ`.
    fn inner(&mut self, yn: &[f64], record: &mut StepRecord) -> Result<Inner> {
        let mut y = yn.to_vec();
        let (mut l_cur, _) = self.proximal(&y, yn)?;
        for k in 0..self.config.max_newton {
            let step = match self.newton_step(&y, yn) {
                Ok(s) => s,
                Err(Error::LinearSolve(_)) if k > 0 => return Ok(Inner::Accepted(y)),
                Err(Error::LinearSolve(_)) => return Ok(Inner::Retry),
                Err(e) => return Err(e),
            };
            record.decrements.push(step.decrement);
            if step.decrement < self.config.tol2 {
                return Ok(Inner::Accepted(y));
            }
            if !(step.slope < 0.0 && step.slope.is_finite()) {
                return Ok(if k > 0 { Inner::Accepted(y) } else { Inner::Retry });
            }
            record.newton_iters += 1;
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..=self.config.max_halvings {
                let trial: Vec<f64> = y.iter().zip(&step.increment).map(|(a, d)| a + alpha * d).collect();
                if self.admissible(&trial) {
                    match self.proximal(&trial, yn) {
                        Ok((l, _)) if l <= l_cur + 1e-14 * (1.0 + l_cur.abs()) => {
                            accepted = Some((trial, l));
                            break;
                        }
                        Ok(_) | Err(Error::Degenerate { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                alpha *= 0.5;
                record.dampings += 1;
            }
            match accepted {
                Some((trial, l)) => {
                    y = trial;
                    l_cur = l;
                }
                None if k > 0 => return Ok(Inner::Accepted(y)),
                None => return Ok(Inner::Retry),
            }
        }
        Ok(Inner::Accepted(y))
    }

    /// One accepted flow step from `yn`, reducing `τ` as needed.
    pub fn flow_step(&mut self, yn: &[f64], step: usize) -> Result<(Vec<f64>, StepRecord)> {
        let start = Instant::now();
        let mut record = StepRecord {
            step,
            energy: self.model.energy(yn)?,
            newton_iters: 0,
            decrements: Vec::new(),
            dampings: 0,
            tau: self.tau,
            tau_reductions: 0,
            metric_defect: None,
            seconds: 0.0,
        };
        loop {
            record.tau = self.tau;
            match self.inner(yn, &mut record)? {
                Inner::Accepted(y) => {
                    record.energy = self.model.energy(&y)?;
                    if self.config.track_metric_defect {
                        record.metric_defect = Some(self.model.metric_defect(&y));
                    }
                    record.seconds = start.elapsed().as_secs_f64();
                    return Ok((y, record));
                }
                Inner::Retry => {
                    self.tau *= self.config.tau_reduction;
                    record.tau_reductions += 1;
                    if self.tau < self.config.min_tau {
                        return Err(Error::NoAdmissibleIterate { step, tau: self.tau });
                    }
                }
            }
        }
    }

    /// Runs the flow from `y0`, calling `observe` after every accepted step.
    pub fn run_with(
        &mut self,
        y0: &[[f64; 3]],
        mut observe: impl FnMut(&StepRecord, &[f64]),
    ) -> Result<FlowResult> {
        let mut y = y0.as_flattened().to_vec();
        if y.len() != self.model.num_dofs() {
            return Err(Error::invalid("initial deformation does not match the mesh"));
        }
        let initial = self.model.energy(&y)?;
        if !self.admissible(&y) {
            return Err(Error::invalid("initial deformation violates the eigenvalue safeguard"));
        }
        let mut trace = FlowTrace {
            initial,
            steps: Vec::new(),
            status: None,
        };
        let mut e_prev = initial.total;
        for n in 1..=self.config.max_steps {
            let (next, record) = self.flow_step(&y, n)?;
            y = next;
            observe(&record, &y);
            let change = (record.energy.total - e_prev).abs() / record.tau;
            e_prev = record.energy.total;
            trace.steps.push(record);
            if change < self.config.tol1 {
                trace.status = Some(FlowStatus::Converged);
                break;
            }
        }
        if trace.status.is_none() {
            trace.status = Some(FlowStatus::StepCap);
        }
        Ok(FlowResult {
            deformation: y.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
            trace,
        })
    }

    pub fn run(&mut self, y0: &[[f64; 3]]) -> Result<FlowResult> {
        self.run_with(y0, |_, _| {})
    }
}

/// Runs the gradient flow to convergence or the step cap.
pub fn run_flow(model: &EnergyModel, y0: &[[f64; 3]], config: &SolverConfig) -> Result<FlowResult> {
    Solver::new(model, config.clone())?.run(y0)
}
