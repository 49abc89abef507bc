//! The engineered Lorentzian chain and the Gaussian thickness-disorder chain.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ContinuumChain, DiscreteChain, Profiles, Regime, SpectralDensity, SpectralKind};
use crate::error::{Error, Result};
use crate::junction::JunctionParams;
use crate::numerics::{normal_cdf, quad_panels, rng_truncated_normal, QuadOptions};
use crate::profile::{poly_pow, Profile};
use crate::series::{CorrelationSeries, SeriesMeta, SourceTag};

/// `E_C(x) = E_C0(1 + ax²/2L²)`, `E_J(x) = E_J0/(1 + ax²/2L²)` and the
/// junction density that makes `J(E_C)` a Lorentzian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianChainParams {
    pub amp: f64,
    pub sigma: f64,
    pub a: f64,
    pub e_c0: f64,
    pub e_j0: f64,
    #[serde(default = "unit_length")]
    pub half_length: f64,
}

fn unit_length() -> f64 {
    1.0
}

impl LorentzianChainParams {
    /// Narrow-band chain of the engineered-spectrum example.
    pub fn narrow() -> Self {
        LorentzianChainParams {
            amp: 500.0,
            sigma: 0.25,
            a: 0.4,
            e_c0: 1.0,
            e_j0: 0.05,
            half_length: 1.0,
        }
    }

    /// Broad-band chain (`a = 40`, `𝒜 = 50`).
    pub fn broad() -> Self {
        LorentzianChainParams {
            amp: 50.0,
            a: 40.0,
            ..Self::narrow()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("amp", self.amp),
            ("sigma", self.sigma),
            ("a", self.a),
            ("e_c0", self.e_c0),
            ("half_length", self.half_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        if !(self.e_j0 >= 0.0 && self.e_j0.is_finite()) {
            return Err(Error::param("e_j0", "must be non-negative"));
        }
        Ok(())
    }

    /// Lorentzian width `δE_C = aσE_C0`.
    pub fn width(&self) -> f64 {
        self.a * self.sigma * self.e_c0
    }

    pub fn support(&self) -> (f64, f64) {
        (self.e_c0, (1.0 + 0.5 * self.a) * self.e_c0)
    }

    /// True when `E_J0 ≪ E_C0` (ratio ≤ 0.1).
    pub fn small_ej(&self) -> bool {
        self.e_j0 <= 0.1 * self.e_c0
    }
}

/// Continuum chain with monotone intervals `[−L, 0]` and `[0, L]`.
pub fn lorentzian_chain(p: &LorentzianChainParams, eps_i: f64) -> Result<ContinuumChain> {
    p.validate()?;
    let l = p.half_length;
    let c = 0.5 * p.a / (l * l);
    let s = [1.0, 0.0, c];
    let mut num = poly_pow(&s, 2);
    for v in &mut num {
        *v *= p.amp * l * l;
    }
    let den = vec![4.0 * p.sigma * p.sigma * l.powi(4), 0.0, 0.0, 0.0, 1.0];
    let profiles = Profiles {
        nu: Profile::rational(num, den, 1),
        ec: Profile::polynomial(vec![p.e_c0, 0.0, p.e_c0 * c]),
        ej: Profile::rational(vec![p.e_j0], s.to_vec(), 0),
    };
    ContinuumChain::new((-l, l), profiles, vec![(-l, 0.0), (0.0, l)], eps_i, Regime::LargeEc)
}

/// `J(E) = a𝒜E_C0E_J0² / [(E − E_C0)² + (aσE_C0)²]` on `[E_C0, (1 + a/2)E_C0]`.
pub fn lorentzian_closed_form_j(p: &LorentzianChainParams) -> SpectralDensity {
    let q = *p;
    let w = p.width();
    SpectralDensity::from_fn(SpectralKind::ClosedForm, p.support(), vec![], move |e| {
        let d = e - q.e_c0;
        q.a * q.amp * q.e_c0 * q.e_j0 * q.e_j0 / (d * d + w * w)
    })
}

/// Fabrication model in energy units: `E_J = f / sinh(E_C/E_ζ)`, thickness
/// law truncated below `e_min`, centred at `e_0` with width `delta_ec`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FabricationConstants {
    pub f_j_a_over_zeta: f64,
    pub e_zeta: f64,
    pub e_min: f64,
    pub e_0: f64,
    pub delta_ec: f64,
}

impl FabricationConstants {
    /// Constants of the disorder sweep with `E_0 = 1`.
    pub fn sweep(delta_ec: f64) -> Self {
        FabricationConstants {
            f_j_a_over_zeta: 0.01,
            e_zeta: 0.2,
            e_min: 0.2,
            e_0: 1.0,
            delta_ec,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f_j_a_over_zeta", self.f_j_a_over_zeta),
            ("e_zeta", self.e_zeta),
            ("e_min", self.e_min),
            ("e_0", self.e_0),
            ("delta_ec", self.delta_ec),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// `f / (E_min sinh(E_min/E_ζ))`; must be ≪ 1 for the large-E_C regime.
    pub fn large_ec_margin(&self) -> f64 {
        self.f_j_a_over_zeta / (self.e_min * (self.e_min / self.e_zeta).sinh())
    }

    pub fn e_j(&self, e_c: f64) -> f64 {
        self.f_j_a_over_zeta / (e_c / self.e_zeta).sinh()
    }

    /// Upper end of the energy range kept by the quadratures.
    pub fn upper_cutoff(&self) -> f64 {
        self.e_0 + 10.0 * self.delta_ec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FabricatedJunction {
    pub params: JunctionParams,
    /// Set when `E_J/E_C > 0.1`.
    pub regime_flag: bool,
}

/// Junction with charging energy `e_c` (the image of its thickness).
pub fn fabrication_params(e_c: f64, fab: &FabricationConstants) -> Result<FabricatedJunction> {
    if !(e_c > 0.0) {
        return Err(Error::param("e_c", "thickness image must be positive"));
    }
    let e_j = fab.e_j(e_c);
    let params = JunctionParams::new(e_c, e_j)?;
    Ok(FabricatedJunction {
        regime_flag: params.lambda() > 0.1,
        params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderChainParams {
    pub fab: FabricationConstants,
    pub n_j: usize,
    pub seed: u64,
}

impl DisorderChainParams {
    pub fn validate(&self) -> Result<()> {
        self.fab.validate()?;
        if self.n_j == 0 {
            return Err(Error::param("n_j", "must be at least 1"));
        }
        let m = self.fab.large_ec_margin();
        if m > 0.1 {
            return Err(Error::Regime(format!(
                "E_min sinh(E_min/E_zeta) is not >> F_J A/zeta (ratio {m})"
            )));
        }
        Ok(())
    }

    /// Gaussian mass above `E_min`.
    pub fn retained_mass(&self) -> f64 {
        let f = &self.fab;
        1.0 - normal_cdf((f.e_min - f.e_0) / f.delta_ec)
    }
}

/// `n_j` junctions drawn from the truncated thickness law.
pub fn gaussian_disorder_chain(p: &DisorderChainParams, eps_i: f64) -> Result<DiscreteChain> {
    p.validate()?;
    let f = &p.fab;
    let ecs = rng_truncated_normal(f.e_0, f.delta_ec, f.e_min, p.seed, p.n_j)?;
    let js = ecs
        .into_iter()
        .map(|e| fabrication_params(e, f).map(|j| j.params))
        .collect::<Result<Vec<_>>>()?;
    DiscreteChain::new(js, eps_i)
}

fn disorder_breaks(f: &FabricationConstants) -> Vec<f64> {
    [-10.0, -5.0, -2.0, 0.0, 2.0, 5.0]
        .iter()
        .map(|k| f.e_0 + k * f.delta_ec)
        .collect()
}

/// `J(E) = 2N_J f² / sinh²(E/E_ζ) · 𝒫(E)` for `E > E_min`, with `𝒫` the
/// Gaussian density (not renormalised by the truncation); kept up to
/// `E_0 + 10δE_C`.
pub fn disorder_spectral_density(p: &DisorderChainParams) -> Result<SpectralDensity> {
    p.validate()?;
    let f = p.fab;
    let nj = p.n_j as f64;
    let hi = f.upper_cutoff();
    if !(hi > f.e_min) {
        return Err(Error::param("e_min", "lies above the retained Gaussian range"));
    }
    Ok(SpectralDensity::from_fn(
        SpectralKind::ClosedForm,
        (f.e_min, hi),
        disorder_breaks(&f),
        move |e| {
            let s = (e / f.e_zeta).sinh();
            let z = (e - f.e_0) / f.delta_ec;
            2.0 * nj * f.f_j_a_over_zeta.powi(2) / (s * s) * (-0.5 * z * z).exp()
                / ((2.0 * PI).sqrt() * f.delta_ec)
        },
    ))
}

/// Continuum form with position `x ≡ E_C` and `ν = N_J𝒫`.
pub fn disorder_continuum_chain(p: &DisorderChainParams, eps_i: f64) -> Result<ContinuumChain> {
    p.validate()?;
    let f = p.fab;
    let hi = f.upper_cutoff();
    if !(hi > f.e_min) {
        return Err(Error::param("e_min", "lies above the retained Gaussian range"));
    }
    let profiles = Profiles {
        nu: Profile::Gaussian {
            amplitude: p.n_j as f64 / ((2.0 * PI).sqrt() * f.delta_ec),
            center: f.e_0,
            width: f.delta_ec,
        },
        ec: Profile::polynomial(vec![0.0, 1.0]),
        ej: Profile::InverseSinh {
            amplitude: f.f_j_a_over_zeta,
            scale: f.e_zeta,
        },
    };
    ContinuumChain::new((f.e_min, hi), profiles, vec![(f.e_min, hi)], eps_i, Regime::LargeEc)
}

/// Thickness-space quadrature of the disorder correlator, done over the
/// standardised variable `z = (w − w₀)/δw` on `[z_min, 10]`.
pub fn disorder_gamma_analytic(p: &DisorderChainParams, eps_i: f64, times: &[f64]) -> Result<CorrelationSeries> {
    p.validate()?;
    if !(eps_i > 0.0) {
        return Err(Error::param("eps_i", "must be positive"));
    }
    let f = p.fab;
    let z_min = (f.e_min - f.e_0) / f.delta_ec;
    if !(z_min < 10.0) {
        return Err(Error::param("e_min", "lies above the retained Gaussian range"));
    }
    let pref = 0.5 * eps_i * eps_i * p.n_j as f64 * f.f_j_a_over_zeta.powi(2);
    let weight = move |z: f64| {
        let e = f.e_0 + f.delta_ec * z;
        let s = (e / f.e_zeta).sinh();
        (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * s * s)
    };
    let mut breaks = vec![z_min];
    breaks.extend([-5.0, -2.0, 0.0, 2.0, 5.0].iter().filter(|&&z| z > z_min));
    breaks.push(10.0);
    let scale = quad_panels(weight, &breaks, QuadOptions::rel(1e-12))?.value;
    let opts = QuadOptions::rel(1e-11).with_abs(1e-13 * scale);
    let values = times
        .par_iter()
        .map(|&t| {
            let r = quad_panels(
                |z| Complex64::from_polar(weight(z), -(f.e_0 + f.delta_ec * z) * t),
                &breaks,
                opts,
            )?;
            Ok(r.value * pref)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = SeriesMeta::new(SourceTag::ChainContinuum)
        .param("eps_i", eps_i)
        .param("n_j", p.n_j as f64)
        .param("e_0", f.e_0)
        .param("delta_ec", f.delta_ec)
        .param("e_min", f.e_min)
        .param("e_zeta", f.e_zeta)
        .param("f_j_a_over_zeta", f.f_j_a_over_zeta);
    CorrelationSeries::new(times.to_vec(), values, meta)
}
