use std::time::Instant;

use serde::Serialize;

use tswitch_core::decay::{
    convergence_order, discrete_continuum_check, AggregateState, DecayParams, RecordMode,
    MAX_DELTA_P,
};
use tswitch_core::error::Error as CoreError;
use tswitch_core::realizations::{switch_from_decays, time_bin_state, TimeBinConfig};
use tswitch_core::switch::{commutation_task, ideal_switch};
use tswitch_core::linalg::fidelity_kets;

use crate::config::{ReportFormat, RunConfig};
use crate::report::{
    converge_quantities, flat_csv, simulate_quantities, timebin_quantities, CommutationReport,
    ConvergeReport, ConvergeRow, KetReport, MatrixReport, SimulateReport, TimebinReport,
    VerifyReport,
};

/// A command failure carrying the process exit code: 2 for configuration
/// errors, 3 for convergence/truncation failures.
#[derive(Debug)]
pub struct Failure {
    pub exit_code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            exit_code: 2,
            message: message.into(),
        }
    }

    pub fn convergence(message: impl Into<String>) -> Self {
        Self {
            exit_code: 3,
            message: message.into(),
        }
    }

    pub fn from_core(err: CoreError) -> Self {
        match err {
            CoreError::TruncationThreshold { .. }
            | CoreError::InsufficientSpan { .. }
            | CoreError::DegenerateDominantEigenvalue { .. }
            | CoreError::EigenNoConvergence { .. } => Self::convergence(err.to_string()),
            other => Self::config(other.to_string()),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        Self::from_core(err)
    }
}

/// A finished command: the machine-readable report plus a one-paragraph
/// human summary (which carries the wall-clock time and is never written to
/// the report file, keeping report bytes reproducible).
pub struct Output {
    pub report: String,
    pub summary: String,
}

fn render<T: Serialize>(report: &T, format: ReportFormat) -> Result<String, Failure> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Failure::config(format!("report serialization failed: {e}"))),
        ReportFormat::Csv => {
            let value = serde_json::to_value(report)
                .map_err(|e| Failure::config(format!("report serialization failed: {e}")))?;
            Ok(flat_csv(&value))
        }
    }
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Output, Failure> {
    let started = Instant::now();
    let params = cfg.decay_params().map_err(Failure::config)?;
    let gates = cfg.gate_set().map_err(Failure::config)?;
    let phi = cfg.phi_ket().map_err(Failure::config)?;

    let evolved = AggregateState::evolve(params, &gates, &phi)?;
    let stats = evolved.order_probabilities();
    let mode = if cfg.symmetrize {
        RecordMode::Symmetrized
    } else {
        RecordMode::Ordered
    };
    let reduced = evolved.reduced_sc_state(mode, cfg.target_incomplete)?;
    let purity = reduced.density.purity();
    let ideal = ideal_switch(gates.u_a(), gates.u_b(), &phi)?;
    let fidelity_to_ideal = reduced.density.expectation(&ideal)?;

    let report = SimulateReport {
        report: "simulate",
        quantities: simulate_quantities(),
        config: cfg.clone(),
        n_steps: params.n_steps(),
        order_probabilities: stats.into(),
        dropped_weight: reduced.dropped_weight,
        reduced_sc_state: MatrixReport::from_density(&reduced.density),
        purity,
        fidelity_to_ideal,
    };
    let elapsed = started.elapsed().as_secs_f64();
    let summary = format!(
        "simulate: N={} steps, p_a_first={:.6}, p_b_first={:.6}, p_incomplete={:.3e}, \
         purity={:.9}, fidelity_to_ideal={:.9}, wall_clock={elapsed:.3}s",
        params.n_steps(),
        stats.p_a_first,
        stats.p_b_first,
        stats.p_incomplete,
        purity,
        fidelity_to_ideal,
    );
    Ok(Output {
        report: render(&report, cfg.format)?,
        summary,
    })
}

pub fn cmd_converge(cfg: &RunConfig, dt_list: &[f64]) -> Result<Output, Failure> {
    let started = Instant::now();
    if dt_list.is_empty() {
        return Err(Failure::config("converge needs at least one dt"));
    }
    if dt_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Failure::config(
            "dt list must be sorted strictly descending",
        ));
    }
    let gates = cfg.gate_set().map_err(Failure::config)?;
    let phi = cfg.phi_ket().map_err(Failure::config)?;
    let analytic_p_a = cfg.gamma_a / (cfg.gamma_a + cfg.gamma_b);

    let mut rows = Vec::new();
    let mut fit_points = Vec::new();
    for &dt in dt_list {
        let dp = cfg.gamma_a.max(cfg.gamma_b) * dt;
        if dp > MAX_DELTA_P {
            rows.push(ConvergeRow {
                dt,
                n_steps: None,
                max_chi_deviation: None,
                p_a_first_abs_error: None,
                fidelity_deficit: None,
                note: format!("skipped: delta_p {dp} exceeds {MAX_DELTA_P}"),
            });
            continue;
        }
        let sub = RunConfig {
            dt,
            steps: None,
            ..cfg.clone()
        };
        let n = sub.resolve_steps().map_err(Failure::config)?;
        let params = DecayParams::new(cfg.gamma_a, cfg.gamma_b, 0.0, dt, n)?;
        let deviation = discrete_continuum_check(&params)?;
        let evolved = AggregateState::evolve(params, &gates, &phi)?;
        let stats = evolved.order_probabilities();
        let p_a_completed = stats.p_a_first / (stats.p_a_first + stats.p_b_first);
        let reduced = evolved.reduced_sc_state(RecordMode::Symmetrized, cfg.target_incomplete)?;
        let ideal = ideal_switch(gates.u_a(), gates.u_b(), &phi)?;
        let deficit = 1.0 - reduced.density.expectation(&ideal)?;
        fit_points.push((dt, deviation));
        rows.push(ConvergeRow {
            dt,
            n_steps: Some(n),
            max_chi_deviation: Some(deviation),
            p_a_first_abs_error: Some((p_a_completed - analytic_p_a).abs()),
            fidelity_deficit: Some(deficit),
            note: "ok".into(),
        });
    }

    let order = convergence_order(&fit_points);
    let warning = if fit_points.len() < 2 {
        Some("fewer than two usable dt entries: no convergence fit".to_string())
    } else {
        None
    };

    let format = cfg.format;
    let report = ConvergeReport {
        report: "converge",
        quantities: converge_quantities(),
        config: cfg.clone(),
        rows,
        convergence_order: order,
        warning: warning.clone(),
    };
    let rendered = match format {
        ReportFormat::Json => render(&report, ReportFormat::Json)?,
        ReportFormat::Csv => converge_csv(&report),
    };
    let elapsed = started.elapsed().as_secs_f64();
    let summary = format!(
        "converge: {} dt values, convergence_order={}, wall_clock={elapsed:.3}s{}",
        dt_list.len(),
        order.map_or("n/a".to_string(), |o| format!("{o:.3}")),
        warning.map_or(String::new(), |w| format!(" ({w})")),
    );
    Ok(Output {
        report: rendered,
        summary,
    })
}

fn converge_csv(report: &ConvergeReport<RunConfig>) -> String {
    let mut out = String::from(
        "dt,n_steps,max_chi_deviation,p_a_first_abs_error,fidelity_deficit,note\n",
    );
    let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
    let fmt_n = |v: Option<u32>| v.map_or(String::new(), |x| format!("{x}"));
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.dt,
            fmt_n(row.n_steps),
            fmt_opt(row.max_chi_deviation),
            fmt_opt(row.p_a_first_abs_error),
            fmt_opt(row.fidelity_deficit),
            row.note.replace(',', ";"),
        ));
    }
    out.push_str(&format!(
        "convergence_order,,{},,,fit of max_chi_deviation vs dt\n",
        fmt_opt(report.convergence_order)
    ));
    out
}

pub fn cmd_timebin(cfg: &RunConfig) -> Result<Output, Failure> {
    let started = Instant::now();
    let gates = cfg.gate_set().map_err(Failure::config)?;
    let phi = cfg.phi_ket().map_err(Failure::config)?;
    let bin_cfg = TimeBinConfig::new(cfg.t_early, cfg.t_late, gates.clone(), phi.clone())?;
    let state = time_bin_state(&bin_cfg)?;
    let ideal = ideal_switch(gates.u_a(), gates.u_b(), &phi)?;
    let fidelity_to_ideal = fidelity_kets(&state, &ideal)?;
    let stats = commutation_task(gates.u_a(), gates.u_b(), &phi)?;

    let report = TimebinReport {
        report: "timebin",
        quantities: timebin_quantities(),
        config: cfg.clone(),
        state: KetReport::from_ket(&state),
        fidelity_to_ideal,
        commutation: CommutationReport {
            p_plus: stats.p_plus,
            p_minus: stats.p_minus,
        },
    };
    let elapsed = started.elapsed().as_secs_f64();
    let summary = format!(
        "timebin: fidelity_to_ideal={fidelity_to_ideal:.12}, p_plus={:.6}, p_minus={:.6}, \
         wall_clock={elapsed:.3}s",
        stats.p_plus, stats.p_minus,
    );
    Ok(Output {
        report: render(&report, cfg.format)?,
        summary,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, Failure> {
    let started = Instant::now();
    if cfg.gamma_a != cfg.gamma_b {
        return Err(Failure::config(
            "verify certifies the equal-rate construction; set gamma_a = gamma_b \
             (unequal rates are served by `simulate --symmetrize` as a diagnostic)",
        ));
    }
    let params = cfg.decay_params().map_err(Failure::config)?;
    let gates = cfg.gate_set().map_err(Failure::config)?;
    let phi = cfg.phi_ket().map_err(Failure::config)?;

    let ideal = ideal_switch(gates.u_a(), gates.u_b(), &phi)?;
    let stats = commutation_task(gates.u_a(), gates.u_b(), &phi)?;
    let bin_cfg = TimeBinConfig::new(cfg.t_early, cfg.t_late, gates.clone(), phi.clone())?;
    let bin_state = time_bin_state(&bin_cfg)?;
    let timebin_fidelity = fidelity_kets(&bin_state, &ideal)?;
    let outcome = switch_from_decays(params, &gates, &phi)?;
    let cross = fidelity_kets(&bin_state, &outcome.sc_state)?;

    let report = VerifyReport {
        report: "verify",
        config: cfg.clone(),
        ideal_state: KetReport::from_ket(&ideal),
        commutation: CommutationReport {
            p_plus: stats.p_plus,
            p_minus: stats.p_minus,
        },
        timebin_fidelity,
        decay_fidelity: outcome.fidelity_to_ideal,
        cross_realization_fidelity: cross,
        truncation_weight: outcome.truncation_weight,
    };
    let elapsed = started.elapsed().as_secs_f64();
    let summary = format!(
        "verify: timebin_fidelity={timebin_fidelity:.9}, decay_fidelity={:.9}, \
         cross={cross:.9}, wall_clock={elapsed:.3}s",
        outcome.fidelity_to_ideal,
    );
    Ok(Output {
        report: render(&report, cfg.format)?,
        summary,
    })
}
