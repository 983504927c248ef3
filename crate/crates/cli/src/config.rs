use std::fs;
use std::path::PathBuf;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use tswitch_core::decay::{DecayParams, GateSet};
use tswitch_core::linalg::{haar_random_unitary, hadamard, identity, pauli_x, pauli_z, Ket, Operator};

/// Environment variable overriding the exact-enumeration branch cap.
pub const MAX_BRANCHES_ENV: &str = "TSWITCH_MAX_BRANCHES";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Optional config file; command-line flags override any field set here.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    pub dt: Option<f64>,
    pub dt_list: Option<Vec<f64>>,
    pub steps: Option<u32>,
    pub target_incomplete: Option<f64>,
    pub system_dim: Option<usize>,
    pub ua: Option<String>,
    pub ub: Option<String>,
    pub phi: Option<String>,
    pub symmetrize: Option<bool>,
    pub seed: Option<u64>,
    pub t_early: Option<f64>,
    pub t_late: Option<f64>,
    pub format: Option<ReportFormat>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config file: {e}"))
    }
}

/// Fully resolved run configuration (defaults <- file <- flags).
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub dt: f64,
    /// Resolved step count; `None` until derived from `target_incomplete`.
    pub steps: Option<u32>,
    pub target_incomplete: f64,
    pub system_dim: usize,
    pub ua: String,
    pub ub: String,
    pub phi: String,
    pub symmetrize: bool,
    pub seed: u64,
    pub t_early: f64,
    pub t_late: f64,
    #[serde(skip)]
    pub format: ReportFormat,
    #[serde(skip)]
    pub max_branches: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma_a: 1.0,
            gamma_b: 1.0,
            dt: 1e-3,
            steps: None,
            target_incomplete: 1e-4,
            system_dim: 2,
            ua: "x".into(),
            ub: "z".into(),
            phi: "0".into(),
            symmetrize: false,
            seed: 0,
            t_early: 1.0,
            t_late: 2.0,
            format: ReportFormat::Json,
            max_branches: None,
        }
    }
}

impl RunConfig {
    pub fn apply_file(&mut self, file: &FileConfig) {
        if let Some(v) = file.gamma_a {
            self.gamma_a = v;
        }
        if let Some(v) = file.gamma_b {
            self.gamma_b = v;
        }
        if let Some(v) = file.dt {
            self.dt = v;
        }
        if let Some(v) = file.steps {
            self.steps = Some(v);
        }
        if let Some(v) = file.target_incomplete {
            self.target_incomplete = v;
        }
        if let Some(v) = file.system_dim {
            self.system_dim = v;
        }
        if let Some(ref v) = file.ua {
            self.ua = v.clone();
        }
        if let Some(ref v) = file.ub {
            self.ub = v.clone();
        }
        if let Some(ref v) = file.phi {
            self.phi = v.clone();
        }
        if let Some(v) = file.symmetrize {
            self.symmetrize = v;
        }
        if let Some(v) = file.seed {
            self.seed = v;
        }
        if let Some(v) = file.t_early {
            self.t_early = v;
        }
        if let Some(v) = file.t_late {
            self.t_late = v;
        }
        if let Some(v) = file.format {
            self.format = v;
        }
    }

    /// Step count satisfying the stopping rule: the explicit `steps` when
    /// given, otherwise the smallest N at which the incomplete-decay weight
    /// (normalized over the live branches) drops to `target_incomplete`.
    pub fn resolve_steps(&self) -> Result<u32, String> {
        if let Some(n) = self.steps {
            return Ok(n);
        }
        let dp_a = self.gamma_a * self.dt;
        let dp_b = self.gamma_b * self.dt;
        if dp_a <= 0.0 || dp_b <= 0.0 {
            return Err("rates and dt must be positive".into());
        }
        let (qa, qb) = (1.0 - dp_a, 1.0 - dp_b);
        let mut surv_a = 1.0_f64;
        let mut surv_b = 1.0_f64;
        let mut dropped = 0.0_f64;
        let mut undecayed = 1.0_f64;
        const CAP: u32 = 100_000_000;
        for n in 1..=CAP {
            dropped += undecayed * dp_a * dp_b;
            undecayed *= qa * qb;
            surv_a *= qa;
            surv_b *= qb;
            let incomplete = surv_a + surv_b - surv_a * surv_b;
            if incomplete / (1.0 - dropped) <= self.target_incomplete {
                return Ok(n);
            }
        }
        Err(format!(
            "target_incomplete {} not reachable within {CAP} steps",
            self.target_incomplete
        ))
    }

    pub fn decay_params(&self) -> Result<DecayParams, String> {
        let n = self.resolve_steps()?;
        let params = DecayParams::new(self.gamma_a, self.gamma_b, 0.0, self.dt, n)
            .map_err(|e| e.to_string())?;
        Ok(match self.max_branches {
            Some(cap) => params.with_max_branches(cap),
            None => params,
        })
    }

    pub fn gate_set(&self) -> Result<GateSet, String> {
        let ua = parse_unitary(&self.ua, self.system_dim, self.seed.wrapping_mul(2))?;
        let ub = parse_unitary(&self.ub, self.system_dim, self.seed.wrapping_mul(2).wrapping_add(1))?;
        GateSet::new(ua, ub).map_err(|e| e.to_string())
    }

    pub fn phi_ket(&self) -> Result<Ket, String> {
        parse_phi(&self.phi, self.system_dim)
    }
}

/// Parse a unitary spec: a named gate (`i`, `x`, `z`, `h`, `haar`) or an
/// inline row-major JSON matrix of `[re, im]` pairs.
pub fn parse_unitary(spec: &str, dim: usize, haar_seed: u64) -> Result<Operator, String> {
    let trimmed = spec.trim();
    let named = match trimmed.to_ascii_lowercase().as_str() {
        "i" | "id" | "identity" => Some(identity(dim).map_err(|e| e.to_string())?),
        "x" => Some(pauli_x()),
        "z" => Some(pauli_z()),
        "h" => Some(hadamard()),
        "haar" => Some(haar_random_unitary(dim, haar_seed).map_err(|e| e.to_string())?),
        _ => None,
    };
    if let Some(op) = named {
        if op.dim_in() != dim {
            return Err(format!(
                "gate '{trimmed}' is {}x{} but system dimension is {dim}",
                op.dim_out(),
                op.dim_in()
            ));
        }
        return Ok(op);
    }
    if !trimmed.starts_with('[') {
        return Err(format!(
            "unknown gate spec '{trimmed}': expected i|x|z|h|haar or a JSON matrix"
        ));
    }
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(trimmed).map_err(|e| format!("invalid matrix JSON: {e}"))?;
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("matrix must be {dim}x{dim}"));
    }
    let flat: Vec<Complex64> = rows
        .into_iter()
        .flatten()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    let entries = Array2::from_shape_vec((dim, dim), flat).expect("shape checked");
    let op = Operator::new(entries);
    op.assert_unitary().map_err(|e| e.to_string())?;
    Ok(op)
}

/// Parse the initial system state: a basis index or an inline JSON vector of
/// `[re, im]` pairs (must be normalized).
pub fn parse_phi(spec: &str, dim: usize) -> Result<Ket, String> {
    let trimmed = spec.trim();
    if let Ok(index) = trimmed.parse::<usize>() {
        return Ket::basis(dim, index).map_err(|e| e.to_string());
    }
    if !trimmed.starts_with('[') {
        return Err(format!(
            "unknown state spec '{trimmed}': expected a basis index or a JSON vector"
        ));
    }
    let pairs: Vec<[f64; 2]> =
        serde_json::from_str(trimmed).map_err(|e| format!("invalid state JSON: {e}"))?;
    if pairs.len() != dim {
        return Err(format!("state vector must have {dim} entries"));
    }
    let amps: Vec<Complex64> = pairs
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    let ket = Ket::new(vec![dim], amps).map_err(|e| e.to_string())?;
    ket.assert_normalized().map_err(|e| e.to_string())?;
    Ok(ket)
}

pub fn max_branches_from_env() -> Result<Option<usize>, String> {
    match std::env::var(MAX_BRANCHES_ENV) {
        Ok(text) => text
            .parse::<usize>()
            .map(Some)
            .map_err(|e| format!("{MAX_BRANCHES_ENV} must be an integer: {e}")),
        Err(_) => Ok(None),
    }
}
