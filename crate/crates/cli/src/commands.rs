use jjbath::chain::{
    gamma_continuum, gamma_discrete, gamma_from_spectral, harmonic_gamma, offset_gamma0, ChainSpec, ContinuumChain,
    DiscreteChain, Regime, SpectralDensity,
};
use jjbath::duality::{map_lorentzian, map_to_large_ej, verify_duality, DualityMap};
use jjbath::gksl::{evolve_oscillator, gksl_coefficients, markovianity_report, MarkovScenario, OscillatorState};
use jjbath::junction::exact_correlation;
use jjbath::numerics::normal_cdf;
use jjbath::perturbation::{g_low_t, g_moderate};
use jjbath::scenarios::{
    disorder_continuum_chain, disorder_gamma_analytic, disorder_spectral_density, gaussian_disorder_chain,
    lorentzian_chain,
};
use jjbath::series::{linspace, CorrelationSeries};
use serde_json::json;

use crate::config::{Scenario, Settings};
use crate::output::Output;
use crate::CliError;

pub enum Bath {
    Continuum(ContinuumChain),
    Discrete(DiscreteChain),
}

pub fn bath(s: &Settings) -> Result<Bath, CliError> {
    let eps = s.oscillator.eps_i;
    Ok(match &s.scenario {
        Scenario::Junction(_) => {
            return Err(CliError::Validation(format!(
                "scenario: `{}` needs a chain, not a single junction",
                s.command
            )))
        }
        Scenario::Lorentzian(p) => Bath::Continuum(lorentzian_chain(p, eps)?),
        Scenario::Disorder(p) => Bath::Continuum(disorder_continuum_chain(p, eps)?),
        Scenario::Chain { spec } => match spec {
            ChainSpec::Continuum { .. } => Bath::Continuum(ContinuumChain::from_spec(spec)?),
            ChainSpec::Discrete { eps_i, junctions } => Bath::Discrete(DiscreteChain::new(junctions.clone(), *eps_i)?),
        },
    })
}

pub fn spectral_density(s: &Settings) -> Result<SpectralDensity, CliError> {
    if let Scenario::Disorder(p) = &s.scenario {
        return Ok(disorder_spectral_density(p)?);
    }
    match bath(s)? {
        Bath::Continuum(c) => Ok(c.spectral_density()),
        Bath::Discrete(_) => Err(CliError::Validation(
            "scenario: a discrete chain has no continuous spectral density".into(),
        )),
    }
}

/// Time window used when the config leaves `t_max` open.
fn default_window(s: &Settings) -> f64 {
    match &s.scenario {
        Scenario::Junction(p) => 100.0 / p.e_c(),
        Scenario::Lorentzian(p) => 10.0 / p.width(),
        Scenario::Disorder(p) => 5.0 / p.fab.delta_ec,
        Scenario::Chain { .. } => 100.0,
    }
}

/// Zero-temperature bath correlator plus the thermal offset `Γ₀`.
fn chain_gamma(s: &Settings, times: &[f64]) -> Result<(CorrelationSeries, f64), CliError> {
    match bath(s)? {
        Bath::Continuum(c) if c.regime() == Regime::Harmonic => Ok((harmonic_gamma(&c, s.beta(), times)?.0, 0.0)),
        Bath::Continuum(c) => {
            let g0 = offset_gamma0(&c, s.beta())?;
            Ok((gamma_continuum(&c, times)?, g0))
        }
        Bath::Discrete(d) => Ok((gamma_discrete(&d, times)?, 0.0)),
    }
}

pub fn correlation(s: &Settings, out: &mut Output) -> Result<(), CliError> {
    let times = s.times(default_window(s))?;
    match &s.scenario {
        Scenario::Junction(p) => {
            let ex = exact_correlation(p, s.n_max, s.beta(), &times)?;
            let pt = if s.beta.is_none() {
                g_low_t(p, &times)?
            } else {
                g_moderate(p, s.beta(), &times)?
            };
            let col = |g: &CorrelationSeries, f: fn(&jjbath::Complex64) -> f64| g.values.iter().map(f).collect::<Vec<_>>();
            out.table(
                "correlation.csv",
                &[
                    ("t", &times),
                    ("exact_re", &col(&ex, |v| v.re)),
                    ("exact_im", &col(&ex, |v| v.im)),
                    ("perturbative_re", &col(&pt, |v| v.re)),
                    ("perturbative_im", &col(&pt, |v| v.im)),
                ],
            )
        }
        Scenario::Disorder(p) => {
            let eps = s.oscillator.eps_i;
            let an = disorder_gamma_analytic(p, eps, &times)?;
            let sampled = gamma_discrete(&gaussian_disorder_chain(p, eps)?, &times)?;
            out.series("gamma_analytic.csv", &an)?;
            out.series("gamma_sampled.csv", &sampled)
        }
        _ => {
            let (g, g0) = chain_gamma(s, &times)?;
            out.echo_extra("gamma0", g0);
            out.series("gamma.csv", &g)
        }
    }
}

pub fn spectral(s: &Settings, out: &mut Output) -> Result<(), CliError> {
    let j = spectral_density(s)?;
    out.echo_extra("support", j.support);
    out.echo_extra("kind", j.kind);
    out.csv("spectral.csv", &j.to_csv(&j.default_grid(s.n_e()), ""))?;
    if let Bath::Continuum(c) = bath(s)? {
        let (a, b) = c.domain();
        let xs = linspace(a, b, s.n_t());
        let f = |g: &dyn Fn(f64) -> f64| xs.iter().map(|&x| g(x)).collect::<Vec<_>>();
        out.table(
            "profiles.csv",
            &[
                ("x", &xs),
                ("nu", &f(&|x| c.nu(x))),
                ("e_c", &f(&|x| c.e_c(x))),
                ("e_j", &f(&|x| c.e_j(x))),
            ],
        )?;
    }
    Ok(())
}

pub fn gksl(s: &Settings, out: &mut Output) -> Result<String, CliError> {
    let j = spectral_density(s)?;
    let res = gksl_coefficients(&j, &s.oscillator)?;
    out.json("gksl.json", &res)
}

pub fn evolve(s: &Settings, out: &mut Output) -> Result<(), CliError> {
    let j = spectral_density(s)?;
    let res = gksl_coefficients(&j, &s.oscillator)?;
    if !(res.kappa > 0.0) {
        return Err(CliError::Validation(format!(
            "omega0: J vanishes at omega0 = {}, nothing to evolve",
            s.oscillator.omega0
        )));
    }
    let times = s.times(5.0 / res.kappa)?;
    let state = OscillatorState::fock(s.n_fock, s.n0)?;
    let traj = evolve_oscillator(&res, &state, &times)?;
    out.echo_extra("kappa", res.kappa);
    out.echo_extra("lamb_shift", res.lamb_shift);
    out.csv("trajectory.csv", &traj.to_csv(""))
}

fn duality_map(s: &Settings) -> Result<DualityMap, CliError> {
    match &s.scenario {
        Scenario::Lorentzian(p) => Ok(map_lorentzian(p, s.oscillator.eps_i)?),
        _ => match bath(s)? {
            Bath::Continuum(c) => Ok(map_to_large_ej(&c)?),
            Bath::Discrete(_) => Err(CliError::Validation("scenario: duality needs a continuum chain".into())),
        },
    }
}

pub fn duality(s: &Settings, out: &mut Output) -> Result<String, CliError> {
    let map = duality_map(s)?;
    let (a, b) = map.source.domain();
    let probe = linspace(a, b, 201);
    let rep = verify_duality(&map, &probe, &s.oscillator)?;
    let xs = linspace(a, b, s.n_t());
    let f = |g: &dyn Fn(f64) -> f64| xs.iter().map(|&x| g(x)).collect::<Vec<_>>();
    out.table(
        "duality_profiles.csv",
        &[
            ("x", &xs),
            ("e_c", &f(&|x| map.source.e_c(x))),
            ("e_j", &f(&|x| map.source.e_j(x))),
            ("mapped_e_c", &f(&|x| map.mapped_ec(x))),
            ("mapped_e_j", &f(&|x| map.mapped_ej(x))),
            ("mapped_omega", &f(&|x| map.mapped_omega(x))),
        ],
    )?;
    let map_json: serde_json::Value = serde_json::from_str(&map.to_json())?;
    let beta_bound = s.beta.map(|b| map.beta_bound(b));
    out.json("duality.json", json!({ "map": map_json, "report": rep, "mapped_beta": beta_bound }))
}

pub fn disorder(s: &Settings, out: &mut Output) -> Result<String, CliError> {
    let Scenario::Disorder(p) = &s.scenario else {
        return Err(CliError::Validation("scenario: `disorder` needs a disorder scenario".into()));
    };
    let eps = s.oscillator.eps_i;
    let chain = gaussian_disorder_chain(p, eps)?;
    let ec: Vec<f64> = chain.junctions.iter().map(|j| j.e_c()).collect();
    let ej: Vec<f64> = chain.junctions.iter().map(|j| j.e_j()).collect();
    out.table("samples.csv", &[("e_c", &ec), ("e_j", &ej)])?;

    let times = s.times(default_window(s))?;
    out.series("gamma_sampled.csv", &gamma_discrete(&chain, &times)?)?;
    out.series("gamma_analytic.csv", &disorder_gamma_analytic(p, eps, &times)?)?;

    let n = ec.len() as f64;
    let mean = ec.iter().sum::<f64>() / n;
    let var = ec.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // Mean of the normal law truncated below at E_min.
    let f = p.fab;
    let alpha = (f.e_min - f.e_0) / f.delta_ec;
    let phi = (-0.5 * alpha * alpha).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let analytic_mean = f.e_0 + f.delta_ec * phi / (1.0 - normal_cdf(alpha));
    out.json(
        "disorder.json",
        json!({
            "n_j": p.n_j,
            "seed": p.seed,
            "retained_mass": p.retained_mass(),
            "sample_mean_e_c": mean,
            "sample_std_e_c": var.sqrt(),
            "analytic_mean_e_c": analytic_mean,
            "standard_error": (var / n).sqrt(),
        }),
    )
}

pub fn markovianity(s: &Settings, out: &mut Output) -> Result<String, CliError> {
    let scenario = match &s.scenario {
        Scenario::Lorentzian(p) => MarkovScenario::Lorentzian(*p),
        _ => {
            let j = spectral_density(s)?;
            let times = s.times(default_window(s))?;
            let gamma = gamma_from_spectral(&j, s.oscillator.eps_i, &times)?;
            let gamma0 = match bath(s)? {
                Bath::Continuum(c) if c.regime() == Regime::LargeEc => offset_gamma0(&c, s.beta())?,
                _ => 0.0,
            };
            MarkovScenario::Generic { j, gamma, gamma0 }
        }
    };
    let (_, rep) = markovianity_report(&scenario, &s.oscillator, s.threshold)?;
    out.json("markovianity.json", &rep)
}
