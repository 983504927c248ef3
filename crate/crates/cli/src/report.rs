use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use tswitch_core::decay::OrderProbabilities;
use tswitch_core::linalg::{DensityMatrix, Ket};

/// Units and meaning of one numeric report field.
#[derive(Clone, Debug, Serialize)]
pub struct Quantity {
    pub units: &'static str,
    pub meaning: &'static str,
}

pub type QuantityHeader = BTreeMap<&'static str, Quantity>;

fn q(units: &'static str, meaning: &'static str) -> Quantity {
    Quantity { units, meaning }
}

pub fn simulate_quantities() -> QuantityHeader {
    BTreeMap::from([
        ("gamma_a", q("1/time", "decay rate of emitter A")),
        ("gamma_b", q("1/time", "decay rate of emitter B")),
        ("dt", q("time", "discretization step")),
        ("n_steps", q("count", "number of evolution steps")),
        (
            "p_a_first",
            q("probability", "weight of histories where A decayed first"),
        ),
        (
            "p_b_first",
            q("probability", "weight of histories where B decayed first"),
        ),
        (
            "p_incomplete",
            q("probability", "weight of histories with a decay still pending"),
        ),
        (
            "dropped_weight",
            q(
                "probability",
                "tracked weight of the per-step simultaneous double decays the discretization drops",
            ),
        ),
        (
            "reduced_sc_state",
            q("amplitude", "density matrix over [control, system] after discarding the timer"),
        ),
        ("purity", q("dimensionless", "trace of the squared reduced state")),
        (
            "fidelity_to_ideal",
            q(
                "dimensionless",
                "overlap of the reduced state with the coherent order-superposition target",
            ),
        ),
    ])
}

pub fn converge_quantities() -> QuantityHeader {
    BTreeMap::from([
        ("dt", q("time", "discretization step for the row")),
        ("n_steps", q("count", "steps used at this dt")),
        (
            "max_chi_deviation",
            q(
                "1/sqrt(time)",
                "max |discrete jump amplitude/sqrt(dt) - continuum amplitude| over the grid",
            ),
        ),
        (
            "p_a_first_abs_error",
            q("probability", "deviation of the A-first weight from its asymptotic value"),
        ),
        (
            "fidelity_deficit",
            q("dimensionless", "1 - fidelity of the symmetrized reduced state to the target"),
        ),
        (
            "convergence_order",
            q("dimensionless", "least-squares slope of ln(deviation) vs ln(dt)"),
        ),
    ])
}

pub fn timebin_quantities() -> QuantityHeader {
    BTreeMap::from([
        ("t_early", q("time", "early emission time")),
        ("t_late", q("time", "late emission time")),
        (
            "fidelity_to_ideal",
            q("dimensionless", "overlap of the constructed state with the target"),
        ),
        (
            "p_plus",
            q("probability", "control measured along |+> on the constructed state"),
        ),
        (
            "p_minus",
            q("probability", "control measured along |->; 1 flags anticommuting gates"),
        ),
    ])
}

/// Complex matrix as explicit dims plus a row-major list of (re, im) pairs.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixReport {
    pub dims: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixReport {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.dims().to_vec(),
            entries: row_major(rho.entries()),
        }
    }
}

/// Complex vector as explicit dims plus a list of (re, im) pairs.
#[derive(Clone, Debug, Serialize)]
pub struct KetReport {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl KetReport {
    pub fn from_ket(ket: &Ket) -> Self {
        Self {
            dims: ket.dims().to_vec(),
            amplitudes: ket.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn row_major(m: &Array2<Complex64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub p_a_first: f64,
    pub p_b_first: f64,
    pub p_incomplete: f64,
}

impl From<OrderProbabilities> for OrderReport {
    fn from(o: OrderProbabilities) -> Self {
        Self {
            p_a_first: o.p_a_first,
            p_b_first: o.p_b_first,
            p_incomplete: o.p_incomplete,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport<C: Serialize> {
    pub report: &'static str,
    pub quantities: QuantityHeader,
    pub config: C,
    pub n_steps: u32,
    pub order_probabilities: OrderReport,
    pub dropped_weight: f64,
    pub reduced_sc_state: MatrixReport,
    pub purity: f64,
    pub fidelity_to_ideal: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeRow {
    pub dt: f64,
    pub n_steps: Option<u32>,
    pub max_chi_deviation: Option<f64>,
    pub p_a_first_abs_error: Option<f64>,
    pub fidelity_deficit: Option<f64>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeReport<C: Serialize> {
    pub report: &'static str,
    pub quantities: QuantityHeader,
    pub config: C,
    pub rows: Vec<ConvergeRow>,
    pub convergence_order: Option<f64>,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutationReport {
    pub p_plus: f64,
    pub p_minus: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimebinReport<C: Serialize> {
    pub report: &'static str,
    pub quantities: QuantityHeader,
    pub config: C,
    pub state: KetReport,
    pub fidelity_to_ideal: f64,
    pub commutation: CommutationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport<C: Serialize> {
    pub report: &'static str,
    pub config: C,
    pub ideal_state: KetReport,
    pub commutation: CommutationReport,
    pub timebin_fidelity: f64,
    pub decay_fidelity: f64,
    pub cross_realization_fidelity: f64,
    pub truncation_weight: f64,
}

/// Render a report as a flat `key,value` CSV table; nested structures are
/// flattened with dotted keys and matrices with indexed keys, all in
/// deterministic order.
pub fn flat_csv(value: &serde_json::Value) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    flatten("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    }
    out
}

fn flatten(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => {
            let text = match other {
                serde_json::Value::String(s) => s.replace(',', ";"),
                v => v.to_string(),
            };
            rows.push((prefix.to_string(), text));
        }
    }
}
