use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::chain::SpectralDensity;
use crate::error::Result;
use crate::scenarios::{lorentzian_closed_form_j, LorentzianChainParams};
use crate::series::{linspace, CorrelationSeries};

use super::coefficients::{gksl_coefficients, Diagnostics, GkslResult, OscillatorParams};

/// Default threshold standing in for "≪ 1".
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Bath-decay rate `1/t*`, with `t*` the first sample where
/// `|Γ(t) − Γ₀| < Re Γ(0)/e`. `None` if the series never gets there.
pub fn measured_bath_rate(gamma: &CorrelationSeries, gamma0: f64) -> Option<f64> {
    let level = gamma.values.first()?.re / E;
    gamma
        .times
        .iter()
        .zip(&gamma.values)
        .find(|(_, v)| (**v - gamma0).norm() < level)
        .map(|(t, _)| 1.0 / t)
}

#[derive(Debug, Clone)]
pub enum MarkovScenario {
    /// Empirical rule of the Lorentzian family.
    Lorentzian(LorentzianChainParams),
    /// Any chain: `ω_B` measured from `Γ(t)`, `ζ_M = max_ω κ(ω)/ω`.
    Generic {
        j: SpectralDensity,
        gamma: CorrelationSeries,
        gamma0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub bm: bool,
    pub secular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub kappa: f64,
    pub lamb_shift: Option<f64>,
    pub omega_b: f64,
    pub zeta_m: f64,
    pub kappa_max: f64,
    pub omega_at_kappa_max: f64,
    pub kappa_over_omega_b: f64,
    pub bm_margin: f64,
    pub secular_margin: f64,
    pub threshold: f64,
    pub criteria: Criteria,
    pub units: String,
    pub flags: Vec<String>,
}

impl MarkovReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `ζ_M = π𝒜ε_I²E_J0² / (8aσ²E_C0E_Q)`.
pub fn lorentzian_zeta_m(p: &LorentzianChainParams, osc: &OscillatorParams) -> f64 {
    PI * p.amp * osc.eps_i.powi(2) * p.e_j0.powi(2) / (8.0 * p.a * p.sigma.powi(2) * p.e_c0 * osc.e_q)
}

/// `ω_B = aE_C0 min(σ, 1/2)`.
pub fn lorentzian_omega_b(p: &LorentzianChainParams) -> f64 {
    p.a * p.e_c0 * p.sigma.min(0.5)
}

/// Coefficients at `osc.omega0` plus the Born–Markov and secular checks.
pub fn markovianity_report(scenario: &MarkovScenario, osc: &OscillatorParams, threshold: f64) -> Result<(GkslResult, MarkovReport)> {
    let (j, omega_b, zeta_m, kappa_max, w_max, bm_lhs, bm_rhs, mut flags) = match scenario {
        MarkovScenario::Lorentzian(p) => {
            let j = lorentzian_closed_form_j(p);
            let zeta = lorentzian_zeta_m(p, osc);
            let s = (1.0 + (p.a * p.sigma).powi(2)).sqrt();
            let kmax = zeta * p.e_c0 * (1.0 + s) / 2.0;
            let lhs = zeta * (1.0 + s) / (p.a * p.sigma);
            let rhs = 1f64.min(2.0 * p.sigma);
            (j, lorentzian_omega_b(p), zeta, kmax, p.e_c0 * s, lhs, rhs, Vec::new())
        }
        MarkovScenario::Generic { j, gamma, gamma0 } => {
            let mut flags = Vec::new();
            let omega_b = match measured_bath_rate(gamma, *gamma0) {
                Some(w) => w,
                None => {
                    flags.push("Gamma(t) does not decay by 1/e within the supplied window".into());
                    let t_end = *gamma.times.last().unwrap_or(&1.0);
                    1.0 / t_end
                }
            };
            let grid = linspace(j.support.0.max(0.0), j.support.1, 2001);
            let mut best = (0.0, grid[0]);
            let mut zeta: f64 = 0.0;
            for &w in &grid {
                if w <= 0.0 {
                    continue;
                }
                let k = super::coefficients::decay_rate(j, &osc.with_omega0(w)?);
                if k > best.0 {
                    best = (k, w);
                }
                zeta = zeta.max(k / w);
            }
            let lhs = best.0 / omega_b;
            (j.clone(), omega_b, zeta, best.0, best.1, lhs, 1.0, flags)
        }
    };
    let mut res = gksl_coefficients(&j, osc)?;
    flags.extend(res.flags.iter().cloned());
    let bm_margin = bm_lhs / (threshold * bm_rhs);
    let secular_margin = zeta_m / threshold;
    res.diagnostics = Some(Diagnostics {
        omega_b,
        zeta_m,
        bm_margin,
        secular_margin,
    });
    let report = MarkovReport {
        kappa: res.kappa,
        lamb_shift: res.lamb_shift,
        omega_b,
        zeta_m,
        kappa_max,
        omega_at_kappa_max: w_max,
        kappa_over_omega_b: kappa_max / omega_b,
        bm_margin,
        secular_margin,
        threshold,
        criteria: Criteria {
            bm: bm_margin <= 1.0,
            secular: secular_margin <= 1.0,
        },
        units: "E_C0".into(),
        flags,
    };
    Ok((res, report))
}
