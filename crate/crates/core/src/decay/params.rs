use crate::error::{Error, Result};

/// Largest per-step decay probability the discretization accepts; beyond this
/// the neglected double-decay weight stops being negligible.
pub const MAX_DELTA_P: f64 = 0.1;

/// Default cap on the number of branches the exact enumeration may create.
pub const DEFAULT_MAX_BRANCHES: usize = 10_000_000;

/// Default ceiling on the incomplete-decay weight when asymptotic quantities
/// are extracted.
pub const DEFAULT_INCOMPLETE_THRESHOLD: f64 = 1e-4;

/// Per-step decay probability `gamma * dt`.
///
/// Errors when the product exceeds [`MAX_DELTA_P`]: the discretization is too
/// coarse to drop simultaneous double decays.
pub fn delta_p(gamma: f64, dt: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "decay rate must be finite and >= 0, got {gamma}"
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time step must be finite and > 0, got {dt}"
        )));
    }
    let dp = gamma * dt;
    if dp > MAX_DELTA_P {
        return Err(Error::StepTooCoarse { delta_p: dp });
    }
    Ok(dp)
}

/// Amplitude for surviving `n` steps without decay: `(1 - dp)^(n/2)`.
pub fn survival_amplitude(dp: f64, n: u32) -> f64 {
    debug_assert!((0.0..=MAX_DELTA_P).contains(&dp));
    (1.0 - dp).powf(n as f64 / 2.0)
}

/// Amplitude for decaying in step `k` (1-based): `sqrt(dp) (1 - dp)^((k-1)/2)`.
pub fn jump_amplitude(dp: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroStepIndex);
    }
    debug_assert!((0.0..=MAX_DELTA_P).contains(&dp));
    Ok(dp.sqrt() * (1.0 - dp).powf((k - 1) as f64 / 2.0))
}

/// Discretization parameters for the two-emitter evolution.
///
/// The step grid is `t_k = t0 + k * dt` for `k = 1..=n_steps`; a decay inside
/// `[t_(k-1), t_k]` is recorded as step index `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayParams {
    gamma_a: f64,
    gamma_b: f64,
    t0: f64,
    dt: f64,
    n_steps: u32,
    max_branches: usize,
}

impl DecayParams {
    pub fn new(gamma_a: f64, gamma_b: f64, t0: f64, dt: f64, n_steps: u32) -> Result<Self> {
        if !gamma_a.is_finite() || gamma_a <= 0.0 || !gamma_b.is_finite() || gamma_b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "decay rates must be > 0, got gamma_a = {gamma_a}, gamma_b = {gamma_b}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("t0 must be finite, got {t0}")));
        }
        // Rejects dp > 0.1 for either rate.
        delta_p(gamma_a, dt)?;
        delta_p(gamma_b, dt)?;
        Ok(Self {
            gamma_a,
            gamma_b,
            t0,
            dt,
            n_steps,
            max_branches: DEFAULT_MAX_BRANCHES,
        })
    }

    pub fn with_max_branches(mut self, cap: usize) -> Self {
        self.max_branches = cap;
        self
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> u32 {
        self.n_steps
    }

    pub fn max_branches(&self) -> usize {
        self.max_branches
    }

    pub fn delta_p_a(&self) -> f64 {
        self.gamma_a * self.dt
    }

    pub fn delta_p_b(&self) -> f64 {
        self.gamma_b * self.dt
    }

    /// Time of the k-th grid point.
    pub fn time_at(&self, k: u32) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Total simulated span `n_steps * dt`.
    pub fn span(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    /// Asymptotic extraction needs the run to cover at least the slowest
    /// lifetime `max(1/gamma_a, 1/gamma_b)`.
    pub fn check_asymptotic_span(&self) -> Result<()> {
        let required = (1.0 / self.gamma_a).max(1.0 / self.gamma_b);
        let span = self.span();
        if span < required {
            return Err(Error::InsufficientSpan { span, required });
        }
        Ok(())
    }
}
