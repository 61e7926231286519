//! Standard ADMM on the split `Y = V̂RV̂ᵀ`: a PSD projection for `R`, a
//! gangster-constrained (and optionally box-clipped) least-squares step for
//! `Y`, and a dual ascent step for `Z`.

use std::time::Instant;

use crate::bounds;
use crate::centering::{self, CenteringConfig};
use crate::error::{Error, Result};
use crate::lifting::Lifting;
use crate::qaplib::QapInstance;
use crate::symmat::{psd_project, SymMatrix};
use crate::trace::{Phase, TraceRecord};

/// Entries beyond this magnitude are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial penalty; `None` means `n`.
    pub rho0: Option<f64>,
    pub max_iters: usize,
    pub trace_every: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub clip_y: bool,
    pub adapt_rho: bool,
    pub tau_incr: f64,
    pub tau_decr: f64,
    pub theta: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho0: None,
            max_iters: 10_000,
            trace_every: 100,
            tol_primal: 1e-5,
            tol_dual: 1e-5,
            clip_y: true,
            adapt_rho: true,
            tau_incr: 2.0,
            tau_decr: 2.0,
            theta: 10.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if let Some(r) = self.rho0 {
            if !(r > 0.0 && r.is_finite()) {
                return bad("rho0 must be positive");
            }
        }
        if self.trace_every == 0 {
            return bad("trace_every must be positive");
        }
        if !(self.tol_primal > 0.0 && self.tol_dual > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.tau_incr > 1.0 && self.tau_decr > 1.0) {
            return bad("tau_incr and tau_decr must exceed 1");
        }
        if !(self.theta > 1.0) {
            return bad("theta must exceed 1");
        }
        Ok(())
    }

    pub fn initial_rho(&self, n: usize) -> f64 {
        self.rho0.unwrap_or(n as f64)
    }

    fn converged(&self, res: &Residuals) -> bool {
        res.r_p < self.tol_primal && res.r_d < self.tol_dual
    }
}

/// The ADMM triple with its penalty and barrier parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub r: SymMatrix,
    pub y: SymMatrix,
    pub z: SymMatrix,
    pub rho: f64,
    /// Barrier weight; zero once in the standard phase.
    pub mu: f64,
    pub iter: usize,
    pub phase: Phase,
    /// Residuals of the most recent iteration, if any.
    pub residuals: Option<Residuals>,
}

impl IterateState {
    /// `Y⁰ = I`, `Z⁰ = −I`, `R⁰ = 0`.
    pub fn initial(lift: &Lifting, rho: f64) -> Self {
        let big = lift.big_dim();
        Self {
            r: SymMatrix::zeros(lift.small_dim()),
            y: SymMatrix::identity(big),
            z: SymMatrix::identity(big).scaled(-1.0),
            rho,
            mu: 0.0,
            iter: 0,
            phase: Phase::Standard,
            residuals: None,
        }
    }

    fn is_healthy(&self) -> bool {
        [&self.r, &self.y, &self.z]
            .iter()
            .all(|m| m.is_finite() && m.max_abs() <= DIVERGENCE_LIMIT)
            && self.rho.is_finite()
            && self.rho > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub r_p: f64,
    pub r_d: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.r_p.max(self.r_d)
    }
}

/// `R = P_{S+}(V̂ᵀ(Y + Z/ρ)V̂)`.
pub fn update_r_standard(lift: &Lifting, y: &SymMatrix, z: &SymMatrix, rho: f64) -> Result<SymMatrix> {
    let arg = lift.compress(&y.axpy(1.0 / rho, z)?)?;
    psd_project(&arg)
}

/// `Y = E00 + G_{J^C}(V̂RV̂ᵀ − (L_Q + Z)/ρ)`, with the `J^C` block clamped to
/// `[0, 1]` when `clip` is set.
pub fn update_y(lift: &Lifting, r: &SymMatrix, z: &SymMatrix, rho: f64, clip: bool) -> Result<SymMatrix> {
    let lifted = lift.expand(r)?;
    if z.dim() != lift.big_dim() {
        return Err(Error::dims(lift.big_dim(), z.dim()));
    }
    Ok(update_y_lifted(lift, &lifted, z, rho, clip))
}

pub(crate) fn update_y_lifted(lift: &Lifting, lifted_r: &SymMatrix, z: &SymMatrix, rho: f64, clip: bool) -> SymMatrix {
    let j = lift.gangster();
    let lq = lift.lq();
    let inv = 1.0 / rho;
    lifted_r.map_indexed(|a, b, v| {
        if a == 0 && b == 0 {
            1.0
        } else if j.contains(a, b) {
            0.0
        } else {
            let w = v - inv * (lq.get(a, b) + z.get(a, b));
            if clip {
                w.clamp(0.0, 1.0)
            } else {
                w
            }
        }
    })
}

/// `Z + ρ(Y_new − V̂R_newV̂ᵀ)`.
pub fn update_z(lift: &Lifting, z: &SymMatrix, y_new: &SymMatrix, r_new: &SymMatrix, rho: f64) -> Result<SymMatrix> {
    let lifted = lift.expand(r_new)?;
    if z.dim() != lift.big_dim() || y_new.dim() != lift.big_dim() {
        return Err(Error::dims(lift.big_dim(), z.dim().max(y_new.dim())));
    }
    Ok(update_z_lifted(z, y_new, &lifted, rho))
}

pub(crate) fn update_z_lifted(z: &SymMatrix, y_new: &SymMatrix, lifted_r: &SymMatrix, rho: f64) -> SymMatrix {
    let step = y_new - lifted_r;
    z.axpy(rho, &step).expect("same dimension")
}

/// `r_p = ‖Y_new − V̂R_newV̂ᵀ‖_F`, `r_d = ‖ρV̂ᵀ(Y_prev − Y_new)V̂‖_F`.
pub fn residuals(
    lift: &Lifting,
    y_prev: &SymMatrix,
    y_new: &SymMatrix,
    r_new: &SymMatrix,
    rho: f64,
) -> Result<Residuals> {
    let lifted = lift.expand(r_new)?;
    residuals_lifted(lift, y_prev, y_new, &lifted, rho)
}

pub(crate) fn residuals_lifted(
    lift: &Lifting,
    y_prev: &SymMatrix,
    y_new: &SymMatrix,
    lifted_r: &SymMatrix,
    rho: f64,
) -> Result<Residuals> {
    let r_p = (y_new - lifted_r).frob_norm();
    let r_d = rho * lift.compress(&(y_prev - y_new))?.frob_norm();
    Ok(Residuals { r_p, r_d })
}

/// Residual balancing: grow `ρ` when the primal residual dominates by more
/// than `θ`, shrink it when the dual one does.
pub fn adapt_rho(rho: f64, res: &Residuals, cfg: &SolverConfig) -> f64 {
    if res.r_p > cfg.theta * res.r_d {
        cfg.tau_incr * rho
    } else if res.r_d > cfg.theta * res.r_p {
        rho / cfg.tau_decr
    } else {
        rho
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub state: IterateState,
    pub trace: Vec<TraceRecord>,
    pub converged: bool,
    /// Number of barrier reductions performed (centering runs only).
    pub mu_shrinks: usize,
    /// Iteration after which the centering phase handed over, if it did.
    pub switch_iter: Option<usize>,
}

/// Runs the standard engine from `start` (default `Y = I, Z = −I, ρ = ρ⁰`)
/// until both residuals meet their tolerances or the iteration counter
/// reaches `max_iters`.
pub fn run_standard(
    inst: &QapInstance,
    lift: &Lifting,
    cfg: &SolverConfig,
    start: Option<IterateState>,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    if inst.n() != lift.n() {
        return Err(Error::dims(lift.n(), inst.n()));
    }
    let mut state = start.unwrap_or_else(|| IterateState::initial(lift, cfg.initial_rho(lift.n())));
    state.phase = Phase::Standard;
    state.mu = 0.0;
    let mut driver = Driver::new(lift, cfg, None);
    driver.run(&mut state)?;
    driver.finish(state)
}

/// Shared iteration loop for both engines.
pub(crate) struct Driver<'a> {
    lift: &'a Lifting,
    cfg: &'a SolverConfig,
    centering: Option<&'a CenteringConfig>,
    clock: Instant,
    pub(crate) trace: Vec<TraceRecord>,
    pub(crate) mu_shrinks: usize,
    pub(crate) switch_iter: Option<usize>,
    converged: bool,
}

impl<'a> Driver<'a> {
    pub(crate) fn new(lift: &'a Lifting, cfg: &'a SolverConfig, centering: Option<&'a CenteringConfig>) -> Self {
        Self {
            lift,
            cfg,
            centering,
            clock: Instant::now(),
            trace: Vec::new(),
            mu_shrinks: 0,
            switch_iter: None,
            converged: false,
        }
    }

    fn clip_for(&self, phase: Phase) -> bool {
        match (phase, self.centering) {
            (Phase::Centering, Some(c)) => c.clip_y_centering,
            _ => self.cfg.clip_y,
        }
    }

    /// Iterates until tolerance (standard phase only) or the iteration cap.
    pub(crate) fn run(&mut self, state: &mut IterateState) -> Result<()> {
        while state.iter < self.cfg.max_iters {
            let res = self.step(state)?;
            if state.iter % self.cfg.trace_every == 0 {
                self.record(state)?;
            }
            if state.phase == Phase::Standard && self.cfg.converged(&res) {
                self.converged = true;
                break;
            }
        }
        Ok(())
    }

    fn step(&mut self, state: &mut IterateState) -> Result<Residuals> {
        let lift = self.lift;
        let rho = state.rho;
        let r = match state.phase {
            Phase::Standard => update_r_standard(lift, &state.y, &state.z, rho)?,
            Phase::Centering => centering::update_r_centering(lift, &state.y, &state.z, rho, state.mu)?,
        };
        let lifted = lift.expand(&r)?;
        let y = update_y_lifted(lift, &lifted, &state.z, rho, self.clip_for(state.phase));
        let z = update_z_lifted(&state.z, &y, &lifted, rho);
        let res = residuals_lifted(lift, &state.y, &y, &lifted, rho)?;

        let next = IterateState {
            r,
            y,
            z,
            rho,
            mu: state.mu,
            iter: state.iter + 1,
            phase: state.phase,
            residuals: Some(res),
        };
        if !next.is_healthy() || !res.r_p.is_finite() || !res.r_d.is_finite() {
            return Err(Error::Divergence {
                iteration: next.iter,
                last_healthy: Box::new(state.clone()),
            });
        }
        *state = next;

        if self.cfg.adapt_rho {
            state.rho = adapt_rho(rho, &res, self.cfg);
        }
        if let (Phase::Centering, Some(c)) = (state.phase, self.centering) {
            let mu = centering::update_mu(state.mu, &res, c);
            if mu < state.mu {
                self.mu_shrinks += 1;
            }
            state.mu = mu;
            if state.mu < c.mu_floor {
                state.phase = Phase::Standard;
                state.mu = 0.0;
                self.switch_iter = Some(state.iter);
                if c.reset_rho_on_switch {
                    state.rho = self.cfg.initial_rho(lift.n());
                }
            }
        }
        Ok(res)
    }

    fn record(&mut self, state: &IterateState) -> Result<()> {
        let lb = bounds::best_lower_bound(self.lift, &state.z)?;
        let primal_obj = bounds::primal_objective(self.lift, &state.y)?;
        let res = state.residuals.unwrap_or(Residuals { r_p: f64::NAN, r_d: f64::NAN });
        self.trace.push(TraceRecord {
            iter: state.iter,
            phase: state.phase,
            lb,
            primal_obj,
            r_p: res.r_p,
            r_d: res.r_d,
            rho: state.rho,
            mu: if state.phase == Phase::Centering { state.mu } else { 0.0 },
            elapsed_ms: self.clock.elapsed().as_millis() as u64,
        });
        Ok(())
    }

    /// Appends the terminal row and packages the outcome.
    pub(crate) fn finish(mut self, state: IterateState) -> Result<SolveOutcome> {
        self.record(&state)?;
        Ok(SolveOutcome {
            state,
            trace: self.trace,
            converged: self.converged,
            mu_shrinks: self.mu_shrinks,
            switch_iter: self.switch_iter,
        })
    }
}
