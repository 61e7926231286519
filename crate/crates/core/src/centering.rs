//! Centering ADMM: the standard splitting with a `−μ log det R` barrier on
//! the `R` block, shrinking `μ` as the residuals fall, then handing the
//! iterate to the standard engine once `μ` drops below a floor.

use crate::admm::{Driver, IterateState, Residuals, SolveOutcome, SolverConfig};
use crate::error::{Error, Result};
use crate::lifting::Lifting;
use crate::qaplib::QapInstance;
use crate::symmat::{sym_eig, SymMatrix};
use crate::trace::Phase;

#[derive(Debug, Clone, PartialEq)]
pub struct CenteringConfig {
    pub mu0: f64,
    pub mu_shrink: f64,
    pub mu_floor: f64,
    pub epsilon_r: f64,
    /// Restart from `ρ⁰` at the phase switch instead of carrying `ρ` over.
    pub reset_rho_on_switch: bool,
    /// Box clipping of `Y` while the barrier is active.
    pub clip_y_centering: bool,
    pub inner: SolverConfig,
}

impl Default for CenteringConfig {
    fn default() -> Self {
        Self {
            mu0: 1.0,
            mu_shrink: 0.75,
            mu_floor: 1e-3,
            epsilon_r: 0.1,
            reset_rho_on_switch: false,
            clip_y_centering: true,
            inner: SolverConfig::default(),
        }
    }
}

impl CenteringConfig {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return Err(Error::InvalidConfig("mu0 must be positive".into()));
        }
        if !(self.mu_shrink > 0.0 && self.mu_shrink < 1.0) {
            return Err(Error::InvalidConfig("mu_shrink must lie in (0, 1)".into()));
        }
        if !(self.mu_floor > 0.0 && self.mu_floor < self.mu0) {
            return Err(Error::InvalidConfig("mu_floor must lie in (0, mu0)".into()));
        }
        if !(self.epsilon_r >= 0.0) {
            return Err(Error::InvalidConfig("epsilon_r must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Positive root of `ρr² − dr − μ = 0`, written to avoid cancellation when
/// `d` is large and negative.
#[inline]
pub fn barrier_root(d: f64, rho: f64, mu: f64) -> f64 {
    let s = (d * d + 4.0 * rho * mu).sqrt();
    if d >= 0.0 {
        (d + s) / (2.0 * rho)
    } else {
        2.0 * mu / (s - d)
    }
}

/// Minimizer of `−μ log det R + (ρ/2)‖R − V̂ᵀ(Y + Z/ρ)V̂‖²`: with
/// `V̂ᵀ(Z + ρY)V̂ = P diag(d) Pᵀ` it is `P diag(r(dᵢ)) Pᵀ`.
pub fn update_r_centering(lift: &Lifting, y: &SymMatrix, z: &SymMatrix, rho: f64, mu: f64) -> Result<SymMatrix> {
    if !(mu > 0.0) {
        return Err(Error::InvalidConfig(format!("barrier weight must be positive, got {mu}")));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidConfig(format!("penalty must be positive, got {rho}")));
    }
    let m = lift.compress(&z.axpy(rho, y)?)?;
    let eig = sym_eig(&m)?;
    Ok(eig.map_spectrum(|d| barrier_root(d, rho, mu)))
}

/// Shrinks `μ` when both residuals are below `ε_r`.
pub fn update_mu(mu: f64, res: &Residuals, cfg: &CenteringConfig) -> f64 {
    if res.max() < cfg.epsilon_r {
        cfg.mu_shrink * mu
    } else {
        mu
    }
}

/// Phase 1 with the barrier until `μ < μ_floor`, then the standard engine
/// from the same `(Y, Z, ρ)`. One iteration counter spans both phases and
/// `max_iters` caps the total.
pub fn run_centering(inst: &QapInstance, lift: &Lifting, cfg: &CenteringConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    if inst.n() != lift.n() {
        return Err(Error::dims(lift.n(), inst.n()));
    }
    let mut state = IterateState::initial(lift, cfg.inner.initial_rho(lift.n()));
    state.phase = Phase::Centering;
    state.mu = cfg.mu0;
    let mut driver = Driver::new(lift, &cfg.inner, Some(cfg));
    driver.run(&mut state)?;
    driver.finish(state)
}
