use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::SpectralDensity;
use crate::error::{Error, Result};
use crate::numerics::{quad_panels, quad_pv, QuadOptions};

/// The probed LC oscillator: plasma frequency, renormalised charging energy
/// `E_Q = e²/2C` and coupling `ε_I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub omega0: f64,
    pub e_q: f64,
    pub eps_i: f64,
}

impl OscillatorParams {
    pub fn new(omega0: f64, e_q: f64, eps_i: f64) -> Result<Self> {
        let p = OscillatorParams { omega0, e_q, eps_i };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega0", self.omega0), ("e_q", self.e_q), ("eps_i", self.eps_i)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn with_omega0(&self, omega0: f64) -> Result<Self> {
        OscillatorParams::new(omega0, self.e_q, self.eps_i)
    }
}

/// `PV ∫₀^∞ J(E)/(E − ω) dE`.
pub fn pv_integral(j: &SpectralDensity, omega: f64) -> Result<f64> {
    let lo = j.support.0.max(0.0);
    let hi = j.support.1;
    if !(hi > lo) {
        return Ok(0.0);
    }
    let mut panels: Vec<f64> = j.panels().into_iter().filter(|&e| e >= lo).collect();
    if panels[0] > lo {
        panels.insert(0, lo);
    }
    let area = quad_panels(|e| j.evaluate(e), &panels, QuadOptions::rel(1e-12))?.value;
    if area == 0.0 {
        return Ok(0.0);
    }
    let opts = QuadOptions::rel(1e-12).with_abs(1e-14 * area);
    if omega < lo || omega > hi {
        return Ok(quad_panels(|e| j.evaluate(e) / (e - omega), &panels, opts)?.value);
    }
    if omega == lo || omega == hi {
        return Err(Error::PoleOnBoundary { pole: omega, a: lo, b: hi });
    }
    // A breakpoint at the pole would put it on a panel edge; drop it.
    panels.retain(|&e| e == lo || e == hi || e != omega);
    let k = panels.partition_point(|&e| e < omega) - 1;
    let mut total = quad_pv(|e| j.evaluate(e), panels[k], panels[k + 1], omega, opts)?.value;
    if k > 0 {
        total += quad_panels(|e| j.evaluate(e) / (e - omega), &panels[..=k], opts)?.value;
    }
    if k + 2 < panels.len() {
        total += quad_panels(|e| j.evaluate(e) / (e - omega), &panels[k + 1..], opts)?.value;
    }
    Ok(total)
}

/// Half-Fourier transform `Γ(ω) = (ε_I/2)²[πJ(ω)Θ(ω) − i PV∫₀^∞ J(E)/(E−ω) dE]`.
pub fn half_fourier(j: &SpectralDensity, omega: f64, eps_i: f64) -> Result<Complex64> {
    let pref = 0.25 * eps_i * eps_i;
    let re = if omega > 0.0 { PI * j.evaluate(omega) } else { 0.0 };
    let im = -pv_integral(j, omega)?;
    Ok(Complex64::new(re, im) * pref)
}

/// `κ(ω₀) = π ε_I² ω₀ J(ω₀) / 8E_Q`.
pub fn decay_rate(j: &SpectralDensity, osc: &OscillatorParams) -> f64 {
    PI * osc.eps_i * osc.eps_i * osc.omega0 * j.evaluate(osc.omega0) / (8.0 * osc.e_q)
}

/// `δ_LS(ω₀) = (ω₀ε_I²/16E_Q) PV∫ J(E)[1/(E−ω₀) + 1/(E+ω₀)] dE`.
pub fn lamb_shift(j: &SpectralDensity, osc: &OscillatorParams) -> Result<f64> {
    let g_plus = half_fourier(j, osc.omega0, osc.eps_i)?;
    let g_minus = half_fourier(j, -osc.omega0, osc.eps_i)?;
    Ok(-osc.omega0 / (4.0 * osc.e_q) * (g_plus.im + g_minus.im))
}

/// Markovianity diagnostics attached to a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub omega_b: f64,
    pub zeta_m: f64,
    /// Left-hand side of the Born–Markov test divided by its threshold.
    pub bm_margin: f64,
    /// Left-hand side of the secular test divided by its threshold.
    pub secular_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GkslResult {
    pub kappa: f64,
    /// `None` when the principal value diverges (ω₀ on a jump of `J`).
    pub lamb_shift: Option<f64>,
    pub gamma_omega: Complex64,
    pub kappa_negative: f64,
    /// Constant term of `H_LS`; drops out of the dynamics.
    pub ls_constant: Option<f64>,
    pub diagnostics: Option<Diagnostics>,
    pub flags: Vec<String>,
}

/// Decay rate, Lamb shift and `Γ(±ω₀)` at the oscillator frequency.
pub fn gksl_coefficients(j: &SpectralDensity, osc: &OscillatorParams) -> Result<GkslResult> {
    osc.validate()?;
    let kappa = decay_rate(j, osc);
    let c = osc.omega0 / (2.0 * osc.e_q);
    let mut flags = Vec::new();
    let g_minus = half_fourier(j, -osc.omega0, osc.eps_i)?;
    let kappa_negative = c * g_minus.re;
    let (gamma_omega, lamb_shift) = match half_fourier(j, osc.omega0, osc.eps_i) {
        Ok(g) => (g, Some(-0.5 * c * (g.im + g_minus.im))),
        Err(Error::PoleOnBoundary { .. }) => {
            flags.push("omega0 sits on an edge of the support of J: the Lamb shift diverges".into());
            let re = 0.25 * osc.eps_i * osc.eps_i * PI * j.evaluate(osc.omega0);
            (Complex64::new(re, f64::NAN), None)
        }
        Err(e) => return Err(e),
    };
    Ok(GkslResult {
        kappa,
        lamb_shift,
        gamma_omega,
        kappa_negative,
        ls_constant: Some(-0.5 * c * g_minus.im),
        diagnostics: None,
        flags,
    })
}
