use crate::decay::params::{delta_p, jump_amplitude, DecayParams};
use crate::error::Result;

/// Continuum decay amplitude density `sqrt(gamma) exp(-gamma (t - t0)/2)` for
/// `t >= t0`, zero before. Its modulus squared is the exponential
/// waiting-time density, so it integrates to one.
pub fn chi_continuous(gamma: f64, t: f64, t0: f64) -> f64 {
    if t < t0 || gamma <= 0.0 {
        return 0.0;
    }
    gamma.sqrt() * (-gamma * (t - t0) / 2.0).exp()
}

/// Max over the grid of `|chi_discrete(k)/sqrt(dt) - chi_continuous(t_k)|`
/// for one decay rate. First-order accurate in `dt`.
pub fn chi_deviation(gamma: f64, dt: f64, n_steps: u32, t0: f64) -> Result<f64> {
    let dp = delta_p(gamma, dt)?;
    let sqrt_dt = dt.sqrt();
    let mut max = 0.0_f64;
    for k in 1..=n_steps {
        let discrete = jump_amplitude(dp, k)? / sqrt_dt;
        let continuous = chi_continuous(gamma, t0 + k as f64 * dt, t0);
        max = max.max((discrete - continuous).abs());
    }
    Ok(max)
}

/// Consistency of the discrete and continuum amplitudes over both emitters:
/// the larger of the two per-rate deviations.
pub fn discrete_continuum_check(params: &DecayParams) -> Result<f64> {
    let dev_a = chi_deviation(params.gamma_a(), params.dt(), params.n_steps(), params.t0())?;
    let dev_b = chi_deviation(params.gamma_b(), params.dt(), params.n_steps(), params.t0())?;
    Ok(dev_a.max(dev_b))
}

/// Least-squares slope of `ln(value)` against `ln(dt)`; `None` for fewer than
/// two usable points.
pub fn convergence_order(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(dt, v)| *dt > 0.0 && *v > 0.0)
        .map(|(dt, v)| (dt.ln(), v.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}
