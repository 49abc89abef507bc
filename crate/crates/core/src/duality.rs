//! Large-E_C ↔ large-E_J correspondence: `Ẽ_C = 2E_J²/E_C`,
//! `Ẽ_J = E_C³/4E_J²`, `ω̃ = E_C`, `ν̃ = ν`.

use serde::{Deserialize, Serialize};

use crate::chain::{harmonic_gamma, ContinuumChain, Profiles, Regime, MONOTONE_SAMPLES};
use crate::error::{Error, Result};
use crate::gksl::{decay_rate, lamb_shift, OscillatorParams};
use crate::junction::JunctionParams;
use crate::profile::{poly_pow, Profile};
use crate::scenarios::{lorentzian_chain, LorentzianChainParams};

/// Largest `E_J/E_C` accepted on the source chain.
pub const SOURCE_LAMBDA_MAX: f64 = 0.1;

/// Harmonic partner of a single junction.
pub fn dual_junction(p: &JunctionParams) -> Result<JunctionParams> {
    if p.e_j() == 0.0 {
        return Err(Error::param("e_j", "E_J = 0 has no harmonic partner (E_J tilde diverges)"));
    }
    let (ec, ej) = (p.e_c(), p.e_j());
    JunctionParams::new(2.0 * ej * ej / ec, ec * ec * ec / (4.0 * ej * ej))
}

#[derive(Debug, Clone)]
pub struct DualityMap {
    pub source: ContinuumChain,
    /// Harmonic-regime chain carrying `Ẽ_C`, `Ẽ_J` and `ν̃ = ν`.
    pub mapped: ContinuumChain,
    /// `min_x ln(E_C/E_J)` on the source.
    pub log_ratio_min: f64,
    /// `max_x Ẽ_C/Ẽ_J`.
    pub max_mapped_ratio: f64,
}

impl DualityMap {
    pub fn mapped_ec(&self, x: f64) -> f64 {
        self.mapped.e_c(x)
    }

    pub fn mapped_ej(&self, x: f64) -> f64 {
        self.mapped.e_j(x)
    }

    pub fn mapped_omega(&self, x: f64) -> f64 {
        (2.0 * self.mapped_ec(x) * self.mapped_ej(x)).sqrt()
    }

    /// `β̃` from `β̃⁻¹ = ln[E_C/E_J]_min β⁻¹`; reported, not enforced.
    pub fn beta_bound(&self, beta: f64) -> f64 {
        beta / self.log_ratio_min
    }

    /// `{source, mapped, log_ratio_min, max_mapped_ratio}` as JSON.
    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "source": self.source.to_spec(),
            "mapped": self.mapped.to_spec(),
            "log_ratio_min": self.log_ratio_min,
            "max_mapped_ratio": self.max_mapped_ratio,
        });
        serde_json::to_string_pretty(&v).expect("duality map serializes")
    }
}

fn sample_points(chain: &ContinuumChain) -> Vec<f64> {
    let mut xs = Vec::new();
    for &(lo, hi) in chain.intervals() {
        for k in 0..=MONOTONE_SAMPLES {
            xs.push(lo + (hi - lo) * k as f64 / MONOTONE_SAMPLES as f64);
        }
    }
    xs
}

fn build_map(source: &ContinuumChain, ec_t: Profile, ej_t: Profile) -> Result<DualityMap> {
    if source.regime() != Regime::LargeEc {
        return Err(Error::Regime("source chain must be in the large-E_C regime".into()));
    }
    let mut log_min = f64::INFINITY;
    for x in sample_points(source) {
        let (ec, ej) = (source.e_c(x), source.e_j(x));
        if !(ej > 0.0) {
            return Err(Error::param("e_j", format!("E_J vanishes at x = {x}; E_J tilde diverges")));
        }
        if ej / ec > SOURCE_LAMBDA_MAX {
            return Err(Error::Regime(format!("E_J/E_C = {} at x = {x} is not << 1", ej / ec)));
        }
        log_min = log_min.min((ec / ej).ln());
    }
    let profiles = Profiles {
        nu: source.profiles().nu.clone(),
        ec: ec_t,
        ej: ej_t,
    };
    let mapped = ContinuumChain::new(
        source.domain(),
        profiles,
        source.intervals().to_vec(),
        source.coupling_eps(),
        Regime::Harmonic,
    )?;
    let max_ratio = sample_points(&mapped)
        .into_iter()
        .map(|x| mapped.e_c(x) / mapped.e_j(x))
        .fold(0.0, f64::max);
    Ok(DualityMap {
        source: source.clone(),
        mapped,
        log_ratio_min: log_min,
        max_mapped_ratio: max_ratio,
    })
}

/// Maps any large-E_C chain with composite profile descriptors.
pub fn map_to_large_ej(chain: &ContinuumChain) -> Result<DualityMap> {
    let ec = chain.profiles().ec.clone();
    let ej = chain.profiles().ej.clone();
    let ec_t = Profile::scaled(
        2.0,
        Profile::product(vec![Profile::power(ej.clone(), 2.0), Profile::power(ec.clone(), -1.0)]),
    );
    let ej_t = Profile::scaled(0.25, Profile::product(vec![Profile::power(ec, 3.0), Profile::power(ej, -2.0)]));
    build_map(chain, ec_t, ej_t)
}

/// Lorentzian chain mapped with closed-form rational profiles:
/// `Ẽ_C = 2E_J0²/(E_C0 s³)`, `Ẽ_J = E_C0³ s⁵/(4E_J0²)`, `s = 1 + ax²/2L²`.
pub fn map_lorentzian(p: &LorentzianChainParams, eps_i: f64) -> Result<DualityMap> {
    let chain = lorentzian_chain(p, eps_i)?;
    if p.e_j0 == 0.0 {
        return Err(Error::param("e_j0", "E_J = 0 has no harmonic partner"));
    }
    let l = p.half_length;
    let s = [1.0, 0.0, 0.5 * p.a / (l * l)];
    let ec_t = Profile::rational(vec![2.0 * p.e_j0 * p.e_j0 / p.e_c0], poly_pow(&s, 3), 0);
    let scale = p.e_c0.powi(3) / (4.0 * p.e_j0 * p.e_j0);
    let ej_t = Profile::polynomial(poly_pow(&s, 5).into_iter().map(|c| c * scale).collect());
    build_map(&chain, ec_t, ej_t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub probe_points: usize,
    pub max_rel_j_deviation: f64,
    pub max_omega_defect: f64,
    pub kappa_large_ec: f64,
    pub kappa_harmonic: f64,
    pub kappa_rel_diff: f64,
    /// The Lamb-shift fields are `None` when ω₀ sits on a band edge.
    pub lamb_shift_large_ec: Option<f64>,
    pub lamb_shift_harmonic: Option<f64>,
    pub lamb_shift_rel_diff: Option<f64>,
    pub max_mapped_ratio: f64,
    pub log_ratio_min: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Compares `J(E_C)` with `J̃(ω)` at `ω = E_C` on `probe_grid`, and the
/// GKSL coefficients each produces at `osc.omega0`.
pub fn verify_duality(map: &DualityMap, probe_grid: &[f64], osc: &OscillatorParams) -> Result<DualityReport> {
    let j_large = map.source.spectral_density();
    let (_, j_harm) = harmonic_gamma(&map.mapped, f64::INFINITY, &[0.0])?;
    let mut max_dev: f64 = 0.0;
    for &e in probe_grid {
        let a = j_large.evaluate(e);
        let b = j_harm.evaluate(e);
        if a > 0.0 {
            max_dev = max_dev.max((a - b).abs() / a);
        } else if b != 0.0 {
            max_dev = f64::INFINITY;
        }
    }
    let max_omega_defect = sample_points(&map.source)
        .into_iter()
        .map(|x| rel_diff(map.mapped_omega(x), map.source.e_c(x)))
        .fold(0.0, f64::max);
    let k1 = decay_rate(&j_large, osc);
    let k2 = decay_rate(&j_harm, osc);
    let edge = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::PoleOnBoundary { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let l1 = edge(lamb_shift(&j_large, osc))?;
    let l2 = edge(lamb_shift(&j_harm, osc))?;
    Ok(DualityReport {
        probe_points: probe_grid.len(),
        max_rel_j_deviation: max_dev,
        max_omega_defect,
        kappa_large_ec: k1,
        kappa_harmonic: k2,
        kappa_rel_diff: rel_diff(k1, k2),
        lamb_shift_large_ec: l1,
        lamb_shift_harmonic: l2,
        lamb_shift_rel_diff: l1.zip(l2).map(|(a, b)| rel_diff(a, b)),
        max_mapped_ratio: map.max_mapped_ratio,
        log_ratio_min: map.log_ratio_min,
    })
}
