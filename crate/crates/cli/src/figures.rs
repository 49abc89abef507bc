use jjbath::chain::{delta_profile, gamma_continuum, offset_gamma0};
use jjbath::gksl::{decay_rate, lamb_shift, OscillatorParams};
use jjbath::junction::{exact_correlation, JunctionParams};
use jjbath::perturbation::g_moderate;
use jjbath::scenarios::{
    disorder_gamma_analytic, disorder_spectral_density, lorentzian_chain, lorentzian_closed_form_j, DisorderChainParams,
    FabricationConstants, LorentzianChainParams,
};
use jjbath::series::linspace;
use rayon::prelude::*;
use serde_json::json;

use crate::config::Settings;
use crate::output::Output;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

pub fn run(fig: Figure, s: &Settings, out: &mut Output) -> Result<(), CliError> {
    match fig {
        Figure::Fig2 => fig2(s, out),
        Figure::Fig3 => fig3(s, out),
        Figure::Fig4 => thermal_offset(LorentzianChainParams::narrow(), "fig4", s, out),
        Figure::Fig5 => thermal_offset(LorentzianChainParams::broad(), "fig5", s, out),
        Figure::Fig6 => fig6(s, out),
    }
}

/// Perturbative and exact `G(t)` at `E_J = 0.01E_C` and two temperatures.
fn fig2(s: &Settings, out: &mut Output) -> Result<(), CliError> {
    let p = JunctionParams::new(1.0, 0.01)?;
    let temps = [0.02, 0.1];
    out.echo_extra("junction", p);
    out.echo_extra("temperatures", temps);
    let times = s.times(100.0)?;
    let mut cols: Vec<(String, Vec<f64>)> = vec![("t".into(), times.clone())];
    for inv_t in temps {
        let beta = 1.0 / inv_t;
        let an = g_moderate(&p, beta, &times)?;
        let ex = exact_correlation(&p, s.n_max, beta, &times)?;
        for (name, g) in [("analytic", &an), ("exact", &ex)] {
            cols.push((format!("{name}_re_T{inv_t}"), g.values.iter().map(|v| v.re).collect()));
            cols.push((format!("{name}_im_T{inv_t}"), g.values.iter().map(|v| v.im).collect()));
        }
    }
    let refs: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
    out.table("fig2.csv", &refs)
}

/// Junction density and spectral density of the narrow Lorentzian chain, plus
/// the decay rate and Lamb shift (in units of `ω₀`) across the band.
fn fig3(s: &Settings, out: &mut Output) -> Result<(), CliError> {
    let p = LorentzianChainParams::narrow();
    out.echo_extra("lorentzian", p);
    let chain = lorentzian_chain(&p, s.oscillator.eps_i)?;
    out.echo_extra("n_junctions", chain.n_junctions()?);
    let xs = linspace(-p.half_length, p.half_length, s.n_t());
    let nu: Vec<f64> = xs.iter().map(|&x| chain.nu(x)).collect();
    out.table("fig3_nu.csv", &[("x", &xs), ("nu", &nu)])?;

    let j = chain.spectral_density();
    let closed = lorentzian_closed_form_j(&p);
    let es = linspace(j.support.0, j.support.1, s.n_e());
    let jv: Vec<f64> = es.iter().map(|&e| j.evaluate(e)).collect();
    let jc: Vec<f64> = es.iter().map(|&e| closed.evaluate(e)).collect();
    out.table("fig3_spectral.csv", &[("E", &es), ("J", &jv), ("J_closed_form", &jc)])?;

    let ws = linspace(0.5 * p.e_c0, 1.7 * p.e_c0, s.n_e());
    let rows: Vec<(f64, f64)> = ws
        .par_iter()
        .map(|&w| {
            let osc = s.oscillator.with_omega0(w).expect("positive omega0");
            let ls = lamb_shift(&j, &osc).unwrap_or(f64::NAN);
            (decay_rate(&j, &osc) / w, ls / w)
        })
        .collect();
    let (k, ls): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    out.table("fig3_gksl.csv", &[("omega0", &ws), ("kappa_over_omega0", &k), ("lamb_shift_over_omega0", &ls)])
}

/// `Re Γ(t)/Re Γ(0)|_{T=0}` at several temperatures and the `Δ(x)` profile.
fn thermal_offset(p: LorentzianChainParams, name: &str, s: &Settings, out: &mut Output) -> Result<(), CliError> {
    out.echo_extra("lorentzian", p);
    let chain = lorentzian_chain(&p, s.oscillator.eps_i)?;
    let d = delta_profile(&chain)?;
    let fractions = [0.1, 0.2, 0.3, 0.42];
    out.echo_extra("temperature_fractions_of_delta_star", fractions);

    let times = s.times(10.0 / p.width())?;
    let g = gamma_continuum(&chain, &times)?;
    let norm = g.values[0].re;
    let base: Vec<f64> = g.values.iter().map(|v| v.re / norm).collect();
    let mut cols: Vec<(String, Vec<f64>)> = vec![("t".into(), times.clone()), ("zero_temperature".into(), base.clone())];
    let mut offsets = Vec::new();
    for f in fractions {
        let g0 = offset_gamma0(&chain, 1.0 / (f * d.delta_star))?;
        offsets.push(json!({ "fraction": f, "inverse_beta": f * d.delta_star, "gamma0_ratio": g0 / norm }));
        cols.push((format!("T_{f}_delta_star"), base.iter().map(|b| b + g0 / norm).collect()));
    }
    let refs: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
    out.table(&format!("{name}_correlation.csv"), &refs)?;

    let xs = linspace(-p.half_length, p.half_length, s.n_t());
    let delta: Vec<f64> = xs.iter().map(|&x| d.eval(x)).collect();
    let ec: Vec<f64> = xs.iter().map(|&x| chain.e_c(x)).collect();
    out.table(&format!("{name}_profile.csv"), &[("x", &xs), ("delta", &delta), ("e_c", &ec)])?;
    out.json(
        &format!("{name}_summary.json"),
        json!({ "delta_star": d.delta_star, "x_star": d.x_star, "re_gamma0_zero_temperature": norm, "offsets": offsets }),
    )?;
    Ok(())
}

/// Disorder sweep: `|Re Γ(t)|/Γ(0)` over (δE_C, t), and `κ/E_0`, `δ_LS/E_0`
/// over (δE_C, ω₀). Long-format tables.
fn fig6(s: &Settings, out: &mut Output) -> Result<(), CliError> {
    let widths = linspace(0.01, 0.5, 50);
    let times = s.times(50.0)?;
    let omegas = linspace(0.5, 2.0, 151);
    let osc = OscillatorParams::new(1.0, 2.0, s.oscillator.eps_i)?;
    let n_j = 10_000;
    out.echo_extra("fabrication", FabricationConstants::sweep(widths[0]));
    out.echo_extra("delta_ec_grid", [widths[0], widths[widths.len() - 1], widths.len() as f64]);
    out.echo_extra("omega0_grid", [omegas[0], omegas[omegas.len() - 1], omegas.len() as f64]);
    out.echo_extra("n_j", n_j);
    out.echo_extra("e_q", osc.e_q);
    let params = |d: f64| DisorderChainParams {
        fab: FabricationConstants::sweep(d),
        n_j,
        seed: s.seed,
    };

    let gamma_rows: Vec<Vec<[f64; 3]>> = widths
        .par_iter()
        .map(|&d| -> Result<Vec<[f64; 3]>, CliError> {
            let g = disorder_gamma_analytic(&params(d), osc.eps_i, &times)?;
            let g0 = g.values[0].re;
            Ok(times.iter().zip(&g.values).map(|(&t, v)| [d, t, v.re.abs() / g0]).collect())
        })
        .collect::<Result<_, _>>()?;
    let flat: Vec<[f64; 3]> = gamma_rows.into_iter().flatten().collect();
    let col = |rows: &[[f64; 3]], k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    out.table(
        "fig6_gamma.csv",
        &[("delta_ec", &col(&flat, 0)), ("t", &col(&flat, 1)), ("abs_re_gamma_normalized", &col(&flat, 2))],
    )?;

    let rate_rows: Vec<Vec<[f64; 4]>> = widths
        .par_iter()
        .map(|&d| -> Result<Vec<[f64; 4]>, CliError> {
            let j = disorder_spectral_density(&params(d))?;
            Ok(omegas
                .iter()
                .map(|&w| {
                    let o = osc.with_omega0(w).expect("positive omega0");
                    [d, w, decay_rate(&j, &o), lamb_shift(&j, &o).unwrap_or(f64::NAN)]
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;
    let flat: Vec<[f64; 4]> = rate_rows.into_iter().flatten().collect();
    let col = |k: usize| flat.iter().map(|r| r[k]).collect::<Vec<_>>();
    out.table(
        "fig6_rates.csv",
        &[("delta_ec", &col(0)), ("omega0", &col(1)), ("kappa", &col(2)), ("lamb_shift", &col(3))],
    )
}
