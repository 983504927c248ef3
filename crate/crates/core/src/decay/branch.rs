use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::decay::gates::GateSet;
use crate::decay::params::DecayParams;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Ket, ProjectorAccumulator};

/// One timer record of the machine: which step each emitter was seen to decay
/// at, if any. `None/None` is the ready state.
///
/// Ordered records distinguish `(k, l)` from `(l, k)`. After symmetrization
/// (`ordered = false`) a complete record stores the canonical sorted pair —
/// the machine then knows both instants but not which emitter fired first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimerRecord {
    step_a: Option<u32>,
    step_b: Option<u32>,
    ordered: bool,
}

impl TimerRecord {
    pub fn ready() -> Self {
        Self {
            step_a: None,
            step_b: None,
            ordered: true,
        }
    }

    pub fn step_a(&self) -> Option<u32> {
        self.step_a
    }

    pub fn step_b(&self) -> Option<u32> {
        self.step_b
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn is_complete(&self) -> bool {
        self.step_a.is_some() && self.step_b.is_some()
    }

    fn with_a(self, k: u32) -> Self {
        debug_assert!(self.step_a.is_none());
        Self {
            step_a: Some(k),
            ..self
        }
    }

    fn with_b(self, k: u32) -> Self {
        debug_assert!(self.step_b.is_none());
        Self {
            step_b: Some(k),
            ..self
        }
    }

    /// True when both decays are recorded and A's came strictly first.
    pub fn a_first(&self) -> Option<bool> {
        match (self.ordered, self.step_a, self.step_b) {
            (true, Some(ka), Some(kb)) => Some(ka < kb),
            _ => None,
        }
    }

    /// Canonical unordered form of a complete record: sorted step pair.
    pub fn symmetrized(&self) -> Self {
        match (self.step_a, self.step_b) {
            (Some(ka), Some(kb)) => {
                let (lo, hi) = if ka <= kb { (ka, kb) } else { (kb, ka) };
                Self {
                    step_a: Some(lo),
                    step_b: Some(hi),
                    ordered: false,
                }
            }
            _ => *self,
        }
    }
}

/// Normalized order statistics of an evolved state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderProbabilities {
    pub p_a_first: f64,
    pub p_b_first: f64,
    pub p_incomplete: f64,
}

/// Reduced control-system state after discarding the machine, plus the
/// weights that were cut away to produce it.
#[derive(Clone, Debug)]
pub struct ReducedScState {
    /// Density matrix over `[control, system]`.
    pub density: DensityMatrix,
    /// Relative weight of branches where at least one decay was still
    /// pending; these are excluded and the rest renormalized.
    pub discarded_weight: f64,
    /// Cumulative weight of the per-step simultaneous double decays that the
    /// discretization drops.
    pub dropped_weight: f64,
}

/// The full superposition over decay histories: a map from timer records to
/// (sub-normalized) control-system kets.
///
/// The squared norms of all branch kets plus the tracked dropped weight sum
/// to one after every step; nothing is renormalized silently.
#[derive(Clone, Debug)]
pub struct BranchState {
    params: DecayParams,
    system_dim: usize,
    branches: BTreeMap<TimerRecord, Vec<Complex64>>,
    current_step: u32,
    dropped: f64,
}

const STEP_DRIFT_LIMIT: f64 = 1e-8;

impl BranchState {
    /// The ready state: both emitters excited, machine at `None/None`,
    /// control at `|+>`, system at `phi`.
    pub fn initial(params: DecayParams, phi: &Ket) -> Result<Self> {
        phi.assert_normalized()?;
        let system_dim = phi.total_dim();
        let ready = Ket::plus().tensor(phi);
        let mut branches = BTreeMap::new();
        branches.insert(TimerRecord::ready(), ready.amplitudes().to_vec());
        Ok(Self {
            params,
            system_dim,
            branches,
            current_step: 0,
            dropped: 0.0,
        })
    }

    pub fn params(&self) -> &DecayParams {
        &self.params
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn current_step(&self) -> u32 {
        self.current_step
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Total squared norm of the live branches.
    pub fn norm_sqr(&self) -> f64 {
        self.branches
            .values()
            .map(|amps| amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Cumulative weight lost to dropped simultaneous double decays.
    pub fn dropped_weight(&self) -> f64 {
        self.dropped
    }

    /// `|norm^2 + dropped - 1|`: the bookkeeping conservation residual.
    pub fn accounting_drift(&self) -> f64 {
        (self.norm_sqr() + self.dropped - 1.0).abs()
    }

    pub fn records(&self) -> impl Iterator<Item = &TimerRecord> {
        self.branches.keys()
    }

    pub fn branch_ket(&self, record: &TimerRecord) -> Option<Ket> {
        self.branches.get(record).map(|amps| {
            Ket::new(vec![2, self.system_dim], amps.clone()).expect("stored amplitudes are valid")
        })
    }

    pub fn iter_branches(&self) -> impl Iterator<Item = (&TimerRecord, &[Complex64])> {
        self.branches.iter().map(|(r, a)| (r, a.as_slice()))
    }

    fn from_parts(
        params: DecayParams,
        system_dim: usize,
        branches: BTreeMap<TimerRecord, Vec<Complex64>>,
        current_step: u32,
        dropped: f64,
    ) -> Self {
        Self {
            params,
            system_dim,
            branches,
            current_step,
            dropped,
        }
    }

    pub(crate) fn replace_branches(
        &self,
        branches: BTreeMap<TimerRecord, Vec<Complex64>>,
    ) -> Self {
        Self::from_parts(
            self.params,
            self.system_dim,
            branches,
            self.current_step,
            self.dropped,
        )
    }

    /// One discretized step at the params' per-step probabilities.
    pub fn step(&self, gates: &GateSet) -> Result<Self> {
        self.step_with_probs(gates, self.params.delta_p_a(), self.params.delta_p_b())
    }

    /// One step with explicit per-step probabilities. This is the
    /// time-dependent-rate variant; no closed forms are checked against it.
    pub fn step_with_probs(&self, gates: &GateSet, dp_a: f64, dp_b: f64) -> Result<Self> {
        if gates.system_dim() != self.system_dim {
            return Err(Error::DimensionMismatch {
                context: "gate system dimension".into(),
                expected: self.system_dim,
                actual: gates.system_dim(),
            });
        }
        if !(0.0..=crate::decay::params::MAX_DELTA_P).contains(&dp_a)
            || !(0.0..=crate::decay::params::MAX_DELTA_P).contains(&dp_b)
        {
            return Err(Error::StepTooCoarse {
                delta_p: dp_a.max(dp_b),
            });
        }
        let drift_in = self.accounting_drift();
        if drift_in > STEP_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift: drift_in,
                limit: STEP_DRIFT_LIMIT,
            });
        }

        let k = self.current_step + 1;
        let sa = (1.0 - dp_a).sqrt();
        let sb = (1.0 - dp_b).sqrt();
        let ra = dp_a.sqrt();
        let rb = dp_b.sqrt();

        let mut next = BTreeMap::new();
        let mut dropped = self.dropped;
        for (record, amps) in &self.branches {
            match (record.step_a, record.step_b) {
                (None, None) => {
                    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                    dropped += weight * dp_a * dp_b;
                    insert_scaled(&mut next, *record, amps, sa * sb);
                    if dp_a > 0.0 {
                        let fired_a = gates.apply_a_raw(amps);
                        insert_scaled(&mut next, record.with_a(k), &fired_a, ra * sb);
                    }
                    if dp_b > 0.0 {
                        let fired_b = gates.apply_b_raw(amps);
                        insert_scaled(&mut next, record.with_b(k), &fired_b, sa * rb);
                    }
                }
                (Some(_), None) => {
                    insert_scaled(&mut next, *record, amps, sb);
                    if dp_b > 0.0 {
                        let fired_b = gates.apply_b_raw(amps);
                        insert_scaled(&mut next, record.with_b(k), &fired_b, rb);
                    }
                }
                (None, Some(_)) => {
                    insert_scaled(&mut next, *record, amps, sa);
                    if dp_a > 0.0 {
                        let fired_a = gates.apply_a_raw(amps);
                        insert_scaled(&mut next, record.with_a(k), &fired_a, ra);
                    }
                }
                (Some(_), Some(_)) => {
                    next.insert(*record, amps.clone());
                }
            }
        }

        let out = Self::from_parts(self.params, self.system_dim, next, k, dropped);
        let drift = out.accounting_drift();
        if drift > STEP_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift,
                limit: STEP_DRIFT_LIMIT,
            });
        }
        Ok(out)
    }

    /// Run the full N-step evolution by exact branch enumeration.
    ///
    /// Completed (both-decayed) branches are frozen as soon as they appear;
    /// only the active frontier is stepped, which keeps the cost at
    /// O(N^2) branch creations. The result is identical to applying
    /// [`BranchState::step`] N times.
    pub fn evolve(params: DecayParams, gates: &GateSet, phi: &Ket) -> Result<Self> {
        let n = params.n_steps() as usize;
        let needed = n * n + n + 1;
        if needed > params.max_branches() {
            return Err(Error::BranchCapExceeded {
                needed,
                cap: params.max_branches(),
            });
        }

        let initial = Self::initial(params, phi)?;
        let dp_a = params.delta_p_a();
        let dp_b = params.delta_p_b();
        let sa = (1.0 - dp_a).sqrt();
        let sb = (1.0 - dp_b).sqrt();
        let ra = dp_a.sqrt();
        let rb = dp_b.sqrt();

        let ready_amps = initial.branches[&TimerRecord::ready()].clone();
        let mut undecayed = ready_amps;
        let mut a_only: Vec<(u32, Vec<Complex64>)> = Vec::new();
        let mut b_only: Vec<(u32, Vec<Complex64>)> = Vec::new();
        let mut frozen: BTreeMap<TimerRecord, Vec<Complex64>> = BTreeMap::new();
        let mut dropped = 0.0;

        for k in 1..=params.n_steps() {
            // Singles first: they complete at this step before new singles appear.
            for (ka, amps) in &a_only {
                let fired = gates.apply_b_raw(amps);
                frozen.insert(
                    TimerRecord::ready().with_a(*ka).with_b(k),
                    scale(&fired, rb),
                );
            }
            for (kb, amps) in &b_only {
                let fired = gates.apply_a_raw(amps);
                frozen.insert(
                    TimerRecord::ready().with_b(*kb).with_a(k),
                    scale(&fired, ra),
                );
            }
            for (_, amps) in a_only.iter_mut() {
                scale_in_place(amps, sb);
            }
            for (_, amps) in b_only.iter_mut() {
                scale_in_place(amps, sa);
            }

            let weight: f64 = undecayed.iter().map(|a| a.norm_sqr()).sum();
            dropped += weight * dp_a * dp_b;
            a_only.push((k, scale(&gates.apply_a_raw(&undecayed), ra * sb)));
            b_only.push((k, scale(&gates.apply_b_raw(&undecayed), sa * rb)));
            scale_in_place(&mut undecayed, sa * sb);
        }

        let mut branches = frozen;
        branches.insert(TimerRecord::ready(), undecayed);
        for (ka, amps) in a_only {
            branches.insert(TimerRecord::ready().with_a(ka), amps);
        }
        for (kb, amps) in b_only {
            branches.insert(TimerRecord::ready().with_b(kb), amps);
        }

        let out = Self::from_parts(
            params,
            initial.system_dim,
            branches,
            params.n_steps(),
            dropped,
        );
        let drift = out.accounting_drift();
        if drift > STEP_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift,
                limit: STEP_DRIFT_LIMIT,
            });
        }
        Ok(out)
    }

    /// Classify branch weights into A-first / B-first / incomplete, normalized
    /// over the live weight so the three always sum to one.
    ///
    /// Ordered complete records classify by their step indices. Unordered
    /// (symmetrized) records carry no order information, so their weight is
    /// split by projecting the control qubit, which coincides with the
    /// record-based split under the default triggers.
    pub fn order_probabilities(&self) -> OrderProbabilities {
        let mut w_a = 0.0;
        let mut w_b = 0.0;
        let mut w_inc = 0.0;
        let d = self.system_dim;
        for (record, amps) in &self.branches {
            let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if !record.is_complete() {
                w_inc += weight;
            } else if let Some(a_first) = record.a_first() {
                if a_first {
                    w_a += weight;
                } else {
                    w_b += weight;
                }
            } else {
                let control0: f64 = amps[..d].iter().map(|a| a.norm_sqr()).sum();
                let control1: f64 = amps[d..].iter().map(|a| a.norm_sqr()).sum();
                w_a += control0;
                w_b += control1;
            }
        }
        let live = w_a + w_b + w_inc;
        if live == 0.0 {
            return OrderProbabilities {
                p_a_first: 0.0,
                p_b_first: 0.0,
                p_incomplete: 1.0,
            };
        }
        OrderProbabilities {
            p_a_first: w_a / live,
            p_b_first: w_b / live,
            p_incomplete: w_inc / live,
        }
    }

    /// Trace out the machine: sum the projectors of all complete branches
    /// (distinct records are orthogonal), discard incomplete branches, and
    /// renormalize. Errors if the discarded weight exceeds `threshold` or the
    /// simulated span is not asymptotic.
    pub fn reduced_sc_state(&self, threshold: f64) -> Result<ReducedScState> {
        self.params.check_asymptotic_span()?;
        let stats = self.order_probabilities();
        if stats.p_incomplete > threshold {
            return Err(Error::TruncationThreshold {
                p_incomplete: stats.p_incomplete,
                threshold,
            });
        }
        let mut acc = ProjectorAccumulator::new(vec![2, self.system_dim]);
        for (record, amps) in &self.branches {
            if record.is_complete() {
                let ket = Ket::new(vec![2, self.system_dim], amps.clone())?;
                acc.add_ket(&ket);
            }
        }
        Ok(ReducedScState {
            density: acc.into_density()?,
            discarded_weight: stats.p_incomplete,
            dropped_weight: self.dropped,
        })
    }
}

fn insert_scaled(
    map: &mut BTreeMap<TimerRecord, Vec<Complex64>>,
    record: TimerRecord,
    amps: &[Complex64],
    factor: f64,
) {
    map.insert(record, scale(amps, factor));
}

fn scale(amps: &[Complex64], factor: f64) -> Vec<Complex64> {
    amps.iter().map(|a| a * factor).collect()
}

fn scale_in_place(amps: &mut [Complex64], factor: f64) {
    for a in amps.iter_mut() {
        *a *= factor;
    }
}
