//! Second-order perturbative energies, first-order states and the closed-form
//! correlators of a single junction, plus the imaginary-time (Matsubara)
//! building blocks used as an independent check.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junction::JunctionParams;
use crate::series::{CorrelationSeries, SeriesMeta, SourceTag};

/// Zeroth-order basis: `|0⟩` and `χ_{n,±} = (|n⟩ ± |−n⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    Ground,
    Chi { n: usize, parity: i8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeSpectrum {
    pub level: usize,
    pub parity: Option<i8>,
    pub energy_o2: f64,
    pub state_coeffs: BTreeMap<BasisLabel, f64>,
    pub flags: Vec<String>,
}

fn check_level(n: usize, parity: Option<i8>) -> Result<Option<i8>> {
    match (n, parity) {
        (0, _) => Ok(None),
        (_, None) => Err(Error::ParityMissing(n)),
        (_, Some(p)) if p == 1 || p == -1 => Ok(Some(p)),
        (_, Some(p)) => Err(Error::param("parity", format!("must be +1 or -1, got {p}"))),
    }
}

fn validity_flags(p: &JunctionParams) -> Vec<String> {
    if p.lambda() > 0.2 {
        vec![format!("lambda={} outside perturbative window (<= 0.2)", p.lambda())]
    } else {
        Vec::new()
    }
}

/// Energy to `O(λ²)`.
pub fn perturbative_energy(n: usize, parity: Option<i8>, p: &JunctionParams) -> Result<f64> {
    let parity = check_level(n, parity)?;
    let l2 = p.lambda() * p.lambda();
    let ec = p.e_c();
    Ok(match (n, parity) {
        (0, _) => -0.5 * l2 * ec,
        (1, Some(1)) => ec * (1.0 + 5.0 * l2 / 12.0),
        (1, _) => ec * (1.0 - l2 / 12.0),
        _ => {
            let nf = n as f64;
            ec * (nf * nf + l2 / (2.0 * (4.0 * nf * nf - 1.0)))
        }
    })
}

/// First-order eigenstate in the `{|0⟩, χ_{n,±}}` basis.
///
/// The admixture of `|0⟩` into `ψ_{1,+}` is `−λ/√2`, the sign that keeps it
/// orthogonal to `ψ_0 = |0⟩ + (λ/√2)χ_{1,+}`.
pub fn perturbative_state(n: usize, parity: Option<i8>, p: &JunctionParams) -> Result<PerturbativeSpectrum> {
    let parity = check_level(n, parity)?;
    let l = p.lambda();
    let r2 = std::f64::consts::SQRT_2;
    let mut c = BTreeMap::new();
    match (n, parity) {
        (0, _) => {
            c.insert(BasisLabel::Ground, 1.0);
            c.insert(BasisLabel::Chi { n: 1, parity: 1 }, l / r2);
        }
        (1, Some(s)) => {
            c.insert(BasisLabel::Chi { n: 1, parity: s }, 1.0);
            c.insert(BasisLabel::Chi { n: 2, parity: s }, l / 6.0);
            if s == 1 {
                c.insert(BasisLabel::Ground, -l / r2);
            }
        }
        (_, Some(s)) => {
            let nf = n as f64;
            c.insert(BasisLabel::Chi { n, parity: s }, 1.0);
            c.insert(BasisLabel::Chi { n: n + 1, parity: s }, l / (4.0 * nf + 2.0));
            c.insert(BasisLabel::Chi { n: n - 1, parity: s }, -l / (4.0 * nf - 2.0));
        }
        _ => unreachable!(),
    }
    Ok(PerturbativeSpectrum {
        level: n,
        parity,
        energy_o2: perturbative_energy(n, parity, p)?,
        state_coeffs: c,
        flags: validity_flags(p),
    })
}

fn base_meta(tag: SourceTag, p: &JunctionParams) -> SeriesMeta {
    SeriesMeta::new(tag).param("e_c", p.e_c()).param("e_j", p.e_j())
}

/// `G(t) = (λ²/2) e^{−iE_C t}`, valid for `t ≪ 1/(λ²E_C)`.
pub fn g_low_t(p: &JunctionParams, times: &[f64]) -> Result<CorrelationSeries> {
    let amp = 0.5 * p.lambda() * p.lambda();
    let values = times
        .iter()
        .map(|&t| Complex64::from_polar(amp, -p.e_c() * t))
        .collect();
    let mut meta = base_meta(SourceTag::PerturbativeLowT, p);
    meta.flags.extend(time_window_flag(p, times));
    CorrelationSeries::new(times.to_vec(), values, meta)
}

fn time_window_flag(p: &JunctionParams, times: &[f64]) -> Option<String> {
    let l2 = p.lambda() * p.lambda();
    let tmax = times.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    (l2 > 0.0 && tmax * l2 * p.e_c() > 0.1).then(|| format!("t up to {tmax} is not << 1/(lambda^2 E_C)"))
}

/// `G(t) = (λ²/2) e^{−iE_C t} + 2e^{−βE_C}`, for `λ³E_C ≪ β⁻¹ ≪ E_C`.
pub fn g_moderate(p: &JunctionParams, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let amp = 0.5 * p.lambda() * p.lambda();
    let offset = 2.0 * (-beta * p.e_c()).exp();
    let values = times
        .iter()
        .map(|&t| Complex64::from_polar(amp, -p.e_c() * t) + offset)
        .collect();
    let mut meta = base_meta(SourceTag::PerturbativeEps, p).param("beta", beta);
    let temp = 1.0 / beta;
    if temp <= p.lambda().powi(3) * p.e_c() || temp >= p.e_c() {
        meta.flags.push(format!("temperature {temp} outside lambda^3 E_C << 1/beta << E_C"));
    }
    meta.flags.extend(time_window_flag(p, times));
    CorrelationSeries::new(times.to_vec(), values, meta)
}

/// Free-rotor thermal `⟨N²⟩ = 2Σn²e^{−n²βE_C} / (1 + 2Σe^{−n²βE_C})`, summed
/// until the next term drops below `1e-15` of the running sum or
/// `series_cutoff` terms have been taken.
pub fn g_high_t(p: &JunctionParams, beta: f64, series_cutoff: usize) -> Result<Complex64> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let x = beta * p.e_c();
    let mut num = 0.0;
    let mut den = 1.0;
    for n in 1..=series_cutoff.max(1) {
        let nf = n as f64;
        let w = (-nf * nf * x).exp();
        let tn = 2.0 * nf * nf * w;
        num += tn;
        den += 2.0 * w;
        if tn < 1e-15 * num || w == 0.0 {
            break;
        }
    }
    Ok(Complex64::new(num / den, 0.0))
}

/// `K_n(τ) = ∫₀^τ dτ' ∫₀^{τ'} dτ'' F_n(τ' − τ'')` with `F_n(s) = e^{−sE_C(1+2n)}`.
pub fn matsubara_k(n: i64, tau: f64, e_c: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::param("tau", "must be non-negative"));
    }
    Ok(k_complex(n, Complex64::new(tau, 0.0), e_c).re)
}

fn k_complex(n: i64, tau: Complex64, e_c: f64) -> Complex64 {
    let k = e_c * (1 + 2 * n) as f64;
    (-tau * k).exp() / (k * k) + tau / k - 1.0 / (k * k)
}

/// `L_n(τ) = ∫₀^τ dτ' ∫_τ^β dτ'' F_n(τ'' − τ')`.
pub fn matsubara_l(n: i64, tau: f64, beta: f64, e_c: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau <= beta) {
        return Err(Error::param("tau", format!("must lie in [0, beta], got {tau}")));
    }
    let k = e_c * (1 + 2 * n) as f64;
    // e^{−βk}(1 − e^{τk}) = e^{−βk} − e^{−(β−τ)k}; both vanish as β → ∞ for k > 0.
    let tail = if beta.is_infinite() && k > 0.0 {
        0.0
    } else {
        (-beta * k).exp() - (-(beta - tau) * k).exp()
    };
    Ok((tail - (-tau * k).exp() + 1.0) / (k * k))
}

/// The pieces of the imaginary-time result at one real time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraTerms {
    /// Thermal free-rotor offset `Σ_{n=±1} n² e^{−βE_C n²}`.
    pub offset: f64,
    /// Ground-state term from the growing exponential of `K_{−1}(β − it)`.
    pub dynamic: Complex64,
    /// Partition-function correction `1 − βE_Cλ²/2`.
    pub denominator: f64,
}

impl MatsubaraTerms {
    pub fn numerator(&self) -> Complex64 {
        self.dynamic + self.offset
    }

    pub fn value(&self) -> Complex64 {
        self.numerator() / self.denominator
    }
}

/// Assemble the leading low-temperature contributions at time `t`.
pub fn matsubara_terms(p: &JunctionParams, beta: f64, t: f64) -> MatsubaraTerms {
    let ec = p.e_c();
    let l2 = p.lambda() * p.lambda();
    let offset: f64 = [-1.0f64, 1.0].iter().map(|n| n * n * (-beta * ec * n * n).exp()).sum();
    // K_{−1}(τ) ⊃ e^{τE_C}/E_C²; with τ = β − it and the Boltzmann factor e^{−βE_C}
    // the exponents combine before exponentiation.
    let tau = Complex64::new(beta, -t);
    let growing = (tau * ec - beta * ec).exp() / (ec * ec);
    let dynamic = growing * (0.5 * l2) * (0.5 * ec * ec) * 2.0;
    MatsubaraTerms {
        offset,
        dynamic,
        denominator: 1.0 - 0.5 * beta * ec * l2,
    }
}

/// `G(t) = [2e^{−βE_C} + (λ²/2)e^{−iE_C t}] / [1 − βE_Cλ²/2]`.
pub fn matsubara_correlation(p: &JunctionParams, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param("beta", "must be positive and finite"));
    }
    let values = times.iter().map(|&t| matsubara_terms(p, beta, t).value()).collect();
    let mut meta = base_meta(SourceTag::Matsubara, p).param("beta", beta);
    let x = beta * p.e_c() * p.lambda() * p.lambda();
    if x > 0.1 {
        meta.flags.push(format!("beta E_C lambda^2 = {x} is not << 1"));
    }
    CorrelationSeries::new(times.to_vec(), values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{quad_adaptive, QuadOptions};

    fn jp(e_j: f64) -> JunctionParams {
        JunctionParams::new(1.0, e_j).unwrap()
    }

    #[test]
    fn energies() {
        assert_eq!(perturbative_energy(0, None, &jp(0.0)).unwrap(), 0.0);
        assert!((perturbative_energy(1, Some(-1), &jp(0.1)).unwrap() - 0.9991667).abs() < 1e-7);
        let e2p = perturbative_energy(2, Some(1), &jp(0.1)).unwrap();
        let e2m = perturbative_energy(2, Some(-1), &jp(0.1)).unwrap();
        assert_eq!(e2p, e2m);
        assert!((e2p - 4.000333).abs() < 1e-6);
        assert!(matches!(perturbative_energy(2, None, &jp(0.1)), Err(Error::ParityMissing(2))));
    }

    #[test]
    fn states() {
        let s0 = perturbative_state(0, None, &jp(0.01)).unwrap();
        assert!((s0.state_coeffs[&BasisLabel::Chi { n: 1, parity: 1 }] - 0.0070711).abs() < 1e-7);
        let s1 = perturbative_state(1, Some(-1), &jp(0.01)).unwrap();
        assert!((s1.state_coeffs[&BasisLabel::Chi { n: 2, parity: -1 }] - 1.0 / 600.0).abs() < 1e-15);
        assert!(!s1.state_coeffs.contains_key(&BasisLabel::Ground));
        let s3 = perturbative_state(3, Some(1), &jp(0.06)).unwrap();
        assert!((s3.state_coeffs[&BasisLabel::Chi { n: 4, parity: 1 }] - 0.06 / 14.0).abs() < 1e-15);
        assert!((s3.state_coeffs[&BasisLabel::Chi { n: 2, parity: 1 }] + 0.06 / 10.0).abs() < 1e-15);
        assert!(perturbative_state(1, Some(1), &jp(0.3)).unwrap().flags.len() == 1);
    }

    #[test]
    fn first_order_states_are_orthogonal() {
        let p = jp(0.05);
        let a = perturbative_state(0, None, &p).unwrap().state_coeffs;
        let b = perturbative_state(1, Some(1), &p).unwrap().state_coeffs;
        let dot: f64 = a.iter().map(|(k, v)| v * b.get(k).copied().unwrap_or(0.0)).sum();
        assert!(dot.abs() < 1e-15);
    }

    #[test]
    fn low_t() {
        let g = g_low_t(&jp(0.01), &[0.0, std::f64::consts::PI]).unwrap();
        assert!((g.values[0].re - 5e-5).abs() < 1e-18);
        assert!((g.values[1].re + 5e-5).abs() < 1e-18);
        let g = g_low_t(&jp(0.0), &[0.0, 1.0]).unwrap();
        assert!(g.values.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn moderate() {
        let g = g_moderate(&jp(0.01), 10.0, &[0.0, 3.0]).unwrap();
        assert!((g.values[0].re - 1.408e-4).abs() < 1e-7);
        let off = 2.0 * (-10.0f64).exp();
        assert!((off - 9.080e-5).abs() < 1e-8);
        let lo = g_low_t(&jp(0.01), &[3.0]).unwrap();
        assert!((g.values[1] - lo.values[0] - off).norm() < 1e-18);
    }

    #[test]
    fn high_t() {
        assert!(g_high_t(&jp(0.0), 1e6, 100).unwrap().norm() == 0.0);
        let v = g_high_t(&jp(0.0), 10.0, 100).unwrap().re;
        let e = (-10.0f64).exp();
        assert!((v - 2.0 * e / (1.0 + 2.0 * e)).abs() < 1e-15);
        assert!((v - 9.078e-5).abs() < 2e-8);
    }

    #[test]
    fn k_values() {
        assert_eq!(matsubara_k(0, 0.0, 1.0).unwrap(), 0.0);
        assert!((matsubara_k(0, 1.0, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let big = 1e3;
        assert!((matsubara_k(1, big, 1.0).unwrap() - (big / 3.0 - 1.0 / 9.0)).abs() < 1e-9);
        assert!(matsubara_k(0, -1.0, 1.0).is_err());
    }

    #[test]
    fn l_values() {
        assert_eq!(matsubara_l(0, 0.0, f64::INFINITY, 1.0).unwrap(), 0.0);
        let l = matsubara_l(0, 5.0, 10.0, 1.0).unwrap();
        // 1 − 2e^{−5} + e^{−10}
        assert!((l - 0.9865695059315915).abs() < 1e-15);
        assert!(matsubara_l(0, 11.0, 10.0, 1.0).is_err());
    }

    #[test]
    fn k_and_l_match_nested_quadrature() {
        let opts = QuadOptions::rel(1e-13);
        for &(n, ec) in &[(0i64, 1.0), (1, 0.7), (-1, 1.0), (2, 1.3)] {
            let k = ec * (1 + 2 * n) as f64;
            let f = |s: f64| (-s * k).exp();
            for &tau in &[0.3, 1.0, 2.5] {
                let kk = quad_adaptive(
                    |tp: f64| quad_adaptive(|tpp: f64| f(tp - tpp), 0.0, tp, opts).unwrap().value,
                    0.0,
                    tau,
                    opts,
                )
                .unwrap()
                .value;
                assert!((kk - matsubara_k(n, tau, ec).unwrap()).abs() < 1e-10, "K n={n} tau={tau}");
                let beta = 3.0;
                let ll = quad_adaptive(
                    |tp: f64| quad_adaptive(|tpp: f64| f(tpp - tp), tau, beta, opts).unwrap().value,
                    0.0,
                    tau,
                    opts,
                )
                .unwrap()
                .value;
                assert!((ll - matsubara_l(n, tau, beta, ec).unwrap()).abs() < 1e-10, "L n={n} tau={tau}");
            }
        }
    }

    #[test]
    fn matsubara_numerator_equals_moderate() {
        let p = jp(0.01);
        let times = [0.0, 0.7, 13.0, 99.0];
        let g = g_moderate(&p, 10.0, &times).unwrap();
        for (t, gm) in times.iter().zip(&g.values) {
            let m = matsubara_terms(&p, 10.0, *t);
            assert!((m.numerator() - gm).norm() <= 1e-14 * gm.norm());
            assert!((m.denominator - (1.0 - 5e-4)).abs() < 1e-16);
        }
    }

    #[test]
    fn matsubara_limits() {
        let p = jp(0.01);
        let g = matsubara_correlation(&p, 50.0, &[0.0, 2.0]).unwrap();
        let lo = g_low_t(&p, &[0.0, 2.0]).unwrap();
        for (a, b) in g.values.iter().zip(&lo.values) {
            assert!((a - b).norm() < 0.01 * b.norm());
        }
        let g = matsubara_correlation(&jp(0.0), 3.0, &[0.0, 5.0]).unwrap();
        for v in &g.values {
            assert!((v.re - 2.0 * (-3.0f64).exp()).abs() < 1e-16 && v.im == 0.0);
        }
        let g = matsubara_correlation(&jp(0.5), 10.0, &[0.0]).unwrap();
        assert_eq!(g.meta.flags.len(), 1);
    }
}
