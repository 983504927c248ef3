use ndarray::Array2;
use num_complex::Complex64;

use crate::decay::branch::{OrderProbabilities, ReducedScState};
use crate::decay::gates::{GateSet, OrderKets};
use crate::decay::params::DecayParams;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Ket};

/// Whether the machine distinguishes which emitter fired first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordMode {
    /// Timer records keep the arrival order; order branches are classical.
    Ordered,
    /// Timer records are unordered pairs; paired branches merge coherently.
    Symmetrized,
}

/// O(1)-per-step aggregation of the branch evolution.
///
/// Because free evolution is the identity, every branch in the same decay
/// class carries the same control-system ket; only five scalar weights, one
/// coherence sum, and the dropped weight need to be evolved. Agreement with
/// the exact enumeration is part of the test suite.
#[derive(Clone, Debug)]
pub struct AggregateState {
    params: DecayParams,
    kets: OrderKets,
    system_dim: usize,
    step: u32,
    w_undecayed: f64,
    w_a_only: f64,
    w_b_only: f64,
    w_a_first: f64,
    w_b_first: f64,
    /// `sum_{k<l} g(k) g(l)` with `g(k) = chi_a(k) chi_b(k)`: the coherent
    /// cross term between the two order classes once records are unordered.
    coherence: f64,
    g_sum: f64,
    g_cur: f64,
    dropped: f64,
    surv_a: f64,
    surv_b: f64,
    max_drift: f64,
}

impl AggregateState {
    pub fn initial(params: DecayParams, gates: &GateSet, phi: &Ket) -> Result<Self> {
        let kets = gates.order_kets(phi)?;
        let system_dim = phi.total_dim();
        Ok(Self {
            params,
            kets,
            system_dim,
            step: 0,
            w_undecayed: 1.0,
            w_a_only: 0.0,
            w_b_only: 0.0,
            w_a_first: 0.0,
            w_b_first: 0.0,
            coherence: 0.0,
            g_sum: 0.0,
            g_cur: 0.0,
            dropped: 0.0,
            surv_a: 1.0,
            surv_b: 1.0,
            max_drift: 0.0,
        })
    }

    /// Evolve through all `params.n_steps()` steps.
    pub fn evolve(params: DecayParams, gates: &GateSet, phi: &Ket) -> Result<Self> {
        let mut state = Self::initial(params, gates, phi)?;
        for _ in 0..params.n_steps() {
            state.step();
        }
        Ok(state)
    }

    /// Advance one step.
    pub fn step(&mut self) {
        let dp_a = self.params.delta_p_a();
        let dp_b = self.params.delta_p_b();
        let qa = 1.0 - dp_a;
        let qb = 1.0 - dp_b;

        self.step += 1;
        // g(k) = sqrt(dp_a dp_b) * (qa qb)^((k-1)/2), tracked incrementally.
        self.g_cur = if self.step == 1 {
            (dp_a * dp_b).sqrt()
        } else {
            self.g_cur * (qa * qb).sqrt()
        };
        self.coherence += self.g_cur * self.g_sum;
        self.g_sum += self.g_cur;

        let w_u = self.w_undecayed;
        self.w_a_first += self.w_a_only * dp_b;
        self.w_b_first += self.w_b_only * dp_a;
        self.w_a_only = self.w_a_only * qb + w_u * dp_a * qb;
        self.w_b_only = self.w_b_only * qa + w_u * qa * dp_b;
        self.dropped += w_u * dp_a * dp_b;
        self.w_undecayed = w_u * qa * qb;
        self.surv_a *= qa;
        self.surv_b *= qb;

        self.max_drift = self.max_drift.max(self.accounting_drift());
    }

    pub fn params(&self) -> &DecayParams {
        &self.params
    }

    pub fn current_step(&self) -> u32 {
        self.step
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w_undecayed + self.w_a_only + self.w_b_only + self.w_a_first + self.w_b_first
    }

    pub fn dropped_weight(&self) -> f64 {
        self.dropped
    }

    pub fn accounting_drift(&self) -> f64 {
        (self.norm_sqr() + self.dropped - 1.0).abs()
    }

    /// Largest conservation residual seen at any step so far.
    pub fn max_accounting_drift(&self) -> f64 {
        self.max_drift
    }

    /// Squared survival amplitude of emitter A after the current step.
    pub fn survival_weight_a(&self) -> f64 {
        self.surv_a
    }

    pub fn survival_weight_b(&self) -> f64 {
        self.surv_b
    }

    /// Probability that emitter A has decayed by now: `1 - (1 - dp_a)^k`.
    pub fn cumulative_decay_a(&self) -> f64 {
        1.0 - self.surv_a
    }

    pub fn cumulative_decay_b(&self) -> f64 {
        1.0 - self.surv_b
    }

    /// Raw (unnormalized) weights of the five branch classes:
    /// `(undecayed, a_only, b_only, a_first, b_first)`.
    pub fn class_weights(&self) -> (f64, f64, f64, f64, f64) {
        (
            self.w_undecayed,
            self.w_a_only,
            self.w_b_only,
            self.w_a_first,
            self.w_b_first,
        )
    }

    /// The coherent order cross term accumulated for symmetrized records.
    pub fn order_coherence(&self) -> f64 {
        self.coherence
    }

    pub fn order_probabilities(&self) -> OrderProbabilities {
        let w_inc = self.w_undecayed + self.w_a_only + self.w_b_only;
        let live = self.norm_sqr();
        if live == 0.0 {
            return OrderProbabilities {
                p_a_first: 0.0,
                p_b_first: 0.0,
                p_incomplete: 1.0,
            };
        }
        OrderProbabilities {
            p_a_first: self.w_a_first / live,
            p_b_first: self.w_b_first / live,
            p_incomplete: w_inc / live,
        }
    }

    /// Reduced control-system state over the complete branches, either with
    /// ordered records (classical mixture of the two order kets) or with
    /// symmetrized records (the coherence term survives the trace).
    pub fn reduced_sc_state(&self, mode: RecordMode, threshold: f64) -> Result<ReducedScState> {
        self.params.check_asymptotic_span()?;
        let stats = self.order_probabilities();
        if stats.p_incomplete > threshold {
            return Err(Error::TruncationThreshold {
                p_incomplete: stats.p_incomplete,
                threshold,
            });
        }
        let total = self.w_a_first + self.w_b_first;
        if total <= 0.0 {
            return Err(Error::InvalidParameter(
                "no complete branches to reduce".into(),
            ));
        }

        // Every complete branch ket is alpha |a_first> + beta |b_first| with
        // real alpha, beta; summing their projectors needs only the class
        // weights and, for unordered records, the coherence cross term.
        let n = 2 * self.system_dim;
        let mut entries = Array2::from_elem((n, n), Complex64::ZERO);
        let mut add_outer = |x: &Ket, y: &Ket, w: f64| {
            let w = Complex64::new(w / total, 0.0);
            for i in 0..n {
                for j in 0..n {
                    entries[(i, j)] += w * x.amplitude(i) * y.amplitude(j).conj();
                }
            }
        };
        add_outer(&self.kets.a_first, &self.kets.a_first, self.w_a_first);
        add_outer(&self.kets.b_first, &self.kets.b_first, self.w_b_first);
        if mode == RecordMode::Symmetrized {
            add_outer(&self.kets.a_first, &self.kets.b_first, self.coherence);
            add_outer(&self.kets.b_first, &self.kets.a_first, self.coherence);
        }
        let density = DensityMatrix::new(vec![2, self.system_dim], entries)?;
        Ok(ReducedScState {
            density,
            discarded_weight: stats.p_incomplete,
            dropped_weight: self.dropped,
        })
    }

    /// The order kets this run was built from.
    pub fn order_kets(&self) -> &OrderKets {
        &self.kets
    }
}
