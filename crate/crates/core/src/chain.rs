//! Whole-bath quantities: discrete and continuum correlators `Γ(t)`, the
//! effective spectral density `J(E)`, the harmonic (large-E_J) counterparts,
//! the thermal offset `Γ₀` and the zero-temperature scale `Δ(x)`.

use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junction::JunctionParams;
use crate::numerics::{quad_adaptive, quad_panels, uniform_stream, QuadOptions};
use crate::profile::Profile;
use crate::series::{linspace, CorrelationSeries, SeriesMeta, SourceTag};

/// Samples per monotone interval used to check monotonicity.
pub const MONOTONE_SAMPLES: usize = 1024;

/// Relative accuracy requested from every time-point quadrature.
const GAMMA_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteChain {
    pub junctions: Vec<JunctionParams>,
    pub coupling_eps: f64,
}

impl DiscreteChain {
    pub fn new(junctions: Vec<JunctionParams>, coupling_eps: f64) -> Result<Self> {
        if !(coupling_eps > 0.0) {
            return Err(Error::param("eps_i", "must be positive"));
        }
        Ok(DiscreteChain { junctions, coupling_eps })
    }
}

/// `Γ(t) = (ε_I²/2) Σ_α E_Jα² e^{−iE_Cα t}`.
pub fn gamma_discrete(chain: &DiscreteChain, times: &[f64]) -> Result<CorrelationSeries> {
    if chain.junctions.is_empty() {
        return Err(Error::EmptyChain);
    }
    let pref = 0.5 * chain.coupling_eps * chain.coupling_eps;
    let terms: Vec<(f64, f64)> = chain.junctions.iter().map(|j| (j.e_j() * j.e_j(), j.e_c())).collect();
    let values: Vec<Complex64> = times
        .par_iter()
        .map(|&t| {
            let s: Complex64 = terms.iter().map(|&(w, ec)| Complex64::from_polar(w, -ec * t)).sum();
            s * pref
        })
        .collect();
    let meta = SeriesMeta::new(SourceTag::ChainDiscrete)
        .param("eps_i", chain.coupling_eps)
        .param("n_junctions", chain.junctions.len() as f64);
    CorrelationSeries::new(times.to_vec(), values, meta)
}

/// Which mode frequency the monotone intervals refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Mode frequency `E_C(x)`.
    #[default]
    LargeEc,
    /// Mode frequency `ω(x) = √(2E_J(x)E_C(x))`.
    Harmonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profiles {
    pub nu: Profile,
    pub ec: Profile,
    pub ej: Profile,
}

/// JSON form of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainSpec {
    Continuum {
        domain: [f64; 2],
        eps_i: f64,
        profiles: Profiles,
        monotone_intervals: Vec<[f64; 2]>,
        #[serde(default)]
        regime: Regime,
    },
    Discrete {
        eps_i: f64,
        junctions: Vec<JunctionParams>,
    },
}

impl ChainSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain spec serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumChain {
    domain: (f64, f64),
    profiles: Profiles,
    intervals: Vec<(f64, f64)>,
    coupling_eps: f64,
    regime: Regime,
}

impl ContinuumChain {
    /// Builds and validates a chain; every monotone interval is sampled to
    /// confirm that the mode frequency is strictly monotonic on it.
    pub fn new(
        domain: (f64, f64),
        profiles: Profiles,
        intervals: Vec<(f64, f64)>,
        coupling_eps: f64,
        regime: Regime,
    ) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::param("domain", "must be a finite interval with lo < hi"));
        }
        if !(coupling_eps > 0.0) {
            return Err(Error::param("eps_i", "must be positive"));
        }
        profiles.nu.validate()?;
        profiles.ec.validate()?;
        profiles.ej.validate()?;
        if intervals.is_empty() {
            return Err(Error::param("monotone_intervals", "at least one interval required"));
        }
        let chain = ContinuumChain {
            domain,
            profiles,
            intervals,
            coupling_eps,
            regime,
        };
        chain.check_intervals()?;
        Ok(chain)
    }

    pub fn from_spec(spec: &ChainSpec) -> Result<Self> {
        match spec {
            ChainSpec::Continuum {
                domain,
                eps_i,
                profiles,
                monotone_intervals,
                regime,
            } => ContinuumChain::new(
                (domain[0], domain[1]),
                profiles.clone(),
                monotone_intervals.iter().map(|iv| (iv[0], iv[1])).collect(),
                *eps_i,
                *regime,
            ),
            ChainSpec::Discrete { .. } => Err(Error::param("kind", "expected a continuum chain")),
        }
    }

    pub fn to_spec(&self) -> ChainSpec {
        ChainSpec::Continuum {
            domain: [self.domain.0, self.domain.1],
            eps_i: self.coupling_eps,
            profiles: self.profiles.clone(),
            monotone_intervals: self.intervals.iter().map(|&(a, b)| [a, b]).collect(),
            regime: self.regime,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn profiles(&self) -> &Profiles {
        &self.profiles
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn coupling_eps(&self) -> f64 {
        self.coupling_eps
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Same chain with a different coupling constant.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::param("eps_i", "must be positive"));
        }
        let mut c = self.clone();
        c.coupling_eps = eps;
        Ok(c)
    }

    pub fn nu(&self, x: f64) -> f64 {
        self.profiles.nu.eval(x)
    }

    pub fn e_c(&self, x: f64) -> f64 {
        self.profiles.ec.eval(x)
    }

    pub fn e_j(&self, x: f64) -> f64 {
        self.profiles.ej.eval(x)
    }

    pub fn junction_at(&self, x: f64) -> Result<JunctionParams> {
        JunctionParams::new(self.e_c(x), self.e_j(x))
    }

    /// Mode frequency and its derivative at `x`.
    pub fn mode(&self, x: f64) -> (f64, f64) {
        match self.regime {
            Regime::LargeEc => self.profiles.ec.eval_d(x),
            Regime::Harmonic => {
                let (ec, dec) = self.profiles.ec.eval_d(x);
                let (ej, dej) = self.profiles.ej.eval_d(x);
                let w = (2.0 * ec * ej).sqrt();
                (w, (dej * ec + ej * dec) / w)
            }
        }
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.intervals.iter().map(|iv| iv.0).collect();
        b.push(self.intervals.last().unwrap().1);
        b
    }

    fn check_intervals(&self) -> Result<()> {
        let (dlo, dhi) = self.domain;
        let first = self.intervals[0].0;
        let last = self.intervals.last().unwrap().1;
        if first != dlo || last != dhi {
            return Err(Error::param("monotone_intervals", "must start and end at the domain bounds"));
        }
        for (k, &(lo, hi)) in self.intervals.iter().enumerate() {
            let bad = |reason: &str| Error::Decomposition {
                index: k,
                lo,
                hi,
                reason: reason.to_string(),
            };
            if !(lo < hi) {
                return Err(bad("empty interval"));
            }
            if k + 1 < self.intervals.len() && self.intervals[k + 1].0 != hi {
                return Err(bad("intervals must be contiguous"));
            }
            let mut sign = 0.0;
            let mut prev = self.mode(lo).0;
            for j in 0..=MONOTONE_SAMPLES {
                let x = if j == MONOTONE_SAMPLES {
                    hi
                } else {
                    lo + (hi - lo) * (j as f64 + 0.5) / MONOTONE_SAMPLES as f64
                };
                let (f, df) = self.mode(x);
                if j < MONOTONE_SAMPLES {
                    if !(df != 0.0) || !df.is_finite() {
                        return Err(bad("mode frequency has zero or undefined slope"));
                    }
                    if sign == 0.0 {
                        sign = df.signum();
                    } else if df.signum() != sign {
                        return Err(bad("mode frequency is not monotonic (slope changes sign)"));
                    }
                }
                if (f - prev) * sign <= 0.0 {
                    return Err(bad("mode frequency is not strictly monotonic"));
                }
                prev = f;
                if !(self.nu(x) >= 0.0) {
                    return Err(bad("junction density is negative"));
                }
                if !(self.e_c(x) > 0.0) || !(self.e_j(x) >= 0.0) {
                    return Err(bad("E_C must be positive and E_J non-negative"));
                }
            }
        }
        Ok(())
    }

    /// `N_J = ∫ν(x) dx`.
    pub fn n_junctions(&self) -> Result<f64> {
        let r = quad_panels(|x| self.nu(x), &self.breaks(), QuadOptions::rel(1e-12))?;
        Ok(r.value)
    }

    /// Largest `λ(x) = E_J/E_C` seen on a fine sample of the domain.
    pub fn max_lambda(&self) -> f64 {
        self.sample_grid(MONOTONE_SAMPLES)
            .into_iter()
            .map(|x| self.e_j(x) / self.e_c(x))
            .fold(0.0, f64::max)
    }

    /// Ascending sample points: every interval split into `per` pieces.
    fn sample_grid(&self, per: usize) -> Vec<f64> {
        let mut xs = Vec::with_capacity(self.intervals.len() * per + 1);
        for &(lo, hi) in &self.intervals {
            for j in 0..per {
                xs.push(lo + (hi - lo) * j as f64 / per as f64);
            }
        }
        xs.push(self.domain.1);
        xs
    }

    /// `J(E)` assembled from the monotone branches; the large-E_C form
    /// `2ν E_J² |dx/dE_C|` or the harmonic form `ω ν E_C |dx/dω|`.
    pub fn spectral_density(&self) -> SpectralDensity {
        let kind = match self.regime {
            Regime::LargeEc => SpectralKind::LargeEc,
            Regime::Harmonic => SpectralKind::Harmonic,
        };
        let mut edges: Vec<f64> = self.breaks().iter().map(|&x| self.mode(x).0).collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let support = (edges[0], *edges.last().unwrap());
        let chain = self.clone();
        SpectralDensity::from_fn(kind, support, edges, move |e| chain.branch_sum(e))
    }

    fn branch_sum(&self, e: f64) -> f64 {
        let mut total = 0.0;
        for &(lo, hi) in &self.intervals {
            let (flo, fhi) = (self.mode(lo).0, self.mode(hi).0);
            let (fmin, fmax) = if flo < fhi { (flo, fhi) } else { (fhi, flo) };
            if e < fmin || e > fmax {
                continue;
            }
            let x = invert_monotone(|x| self.mode(x).0, lo, hi, e);
            total += self.branch_weight(x, lo, hi);
        }
        total
    }

    fn branch_weight(&self, x: f64, lo: f64, hi: f64) -> f64 {
        let mut x = x;
        let (_, mut df) = self.mode(x);
        if df == 0.0 {
            // Stationary endpoint: take the one-sided limit from inside.
            let eta = 1e-7 * (hi - lo);
            x = if x - lo < hi - x { x + eta } else { x - eta };
            df = self.mode(x).1;
        }
        let nu = self.nu(x);
        match self.regime {
            Regime::LargeEc => {
                let ej = self.e_j(x);
                2.0 * nu * ej * ej / df.abs()
            }
            Regime::Harmonic => {
                let w = self.mode(x).0;
                w * nu * self.e_c(x) / df.abs()
            }
        }
    }
}

/// Bisection for `f(x) = target` on `[lo, hi]` with `f` monotone; stops at a
/// bracket of `1e-13` of the interval width or when the midpoint stalls.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, target: f64) -> f64 {
    let increasing = f(hi) >= f(lo);
    let (mut a, mut b) = (lo, hi);
    let tol = 1e-13 * (hi - lo);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm < target) == increasing {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralKind {
    LargeEc,
    Harmonic,
    ClosedForm,
    Tabulated,
}

/// Evaluable `J(E) ≥ 0` with explicit support; zero outside it.
#[derive(Clone)]
pub struct SpectralDensity {
    pub kind: SpectralKind,
    pub support: (f64, f64),
    /// Points inside the support where `J` may be non-smooth (kinks or jumps).
    pub breakpoints: Vec<f64>,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralDensity")
            .field("kind", &self.kind)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl SpectralDensity {
    pub fn from_fn<F>(kind: SpectralKind, support: (f64, f64), breakpoints: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut bp: Vec<f64> = breakpoints
            .into_iter()
            .filter(|&e| e > support.0 && e < support.1)
            .collect();
        bp.sort_by(f64::total_cmp);
        bp.dedup();
        SpectralDensity {
            kind,
            support,
            breakpoints: bp,
            func: Arc::new(f),
        }
    }

    /// `J = level` on `[a, b]`.
    pub fn boxed(a: f64, b: f64, level: f64) -> Self {
        SpectralDensity::from_fn(SpectralKind::ClosedForm, (a, b), vec![], move |_| level)
    }

    /// Monotone cubic interpolation through `(es, js)`.
    pub fn tabulated(es: Vec<f64>, js: Vec<f64>) -> Result<Self> {
        let prof = Profile::tabulated(es.clone(), js)?;
        let (a, b) = (es[0], *es.last().unwrap());
        Ok(SpectralDensity::from_fn(SpectralKind::Tabulated, (a, b), es, move |e| {
            prof.eval(e).max(0.0)
        }))
    }

    pub fn evaluate(&self, e: f64) -> f64 {
        if e < self.support.0 || e > self.support.1 {
            0.0
        } else {
            (self.func)(e)
        }
    }

    /// Support split at the breakpoints.
    pub fn panels(&self) -> Vec<f64> {
        let mut p = vec![self.support.0];
        p.extend(&self.breakpoints);
        p.push(self.support.1);
        p
    }

    /// `∫ J(E) dE`.
    pub fn area(&self) -> Result<f64> {
        if self.support.0 >= self.support.1 {
            return Ok(0.0);
        }
        Ok(quad_panels(|e| self.evaluate(e), &self.panels(), QuadOptions::rel(1e-12))?.value)
    }

    /// Evaluation grid of `n` points spanning the support padded by 10% of
    /// its width on each side.
    pub fn default_grid(&self, n: usize) -> Vec<f64> {
        let w = self.support.1 - self.support.0;
        let pad = if w > 0.0 { 0.1 * w } else { 0.1 * self.support.0.abs().max(1.0) };
        linspace(self.support.0 - pad, self.support.1 + pad, n)
    }

    /// `E,J` table with a comment header.
    pub fn to_csv(&self, grid: &[f64], header: &str) -> String {
        let mut s = String::new();
        for line in header.lines() {
            writeln!(s, "# {line}").unwrap();
        }
        s.push_str("E,J\n");
        for &e in grid {
            writeln!(s, "{e:.12e},{:.12e}", self.evaluate(e)).unwrap();
        }
        s
    }
}

fn quad_tol(scale: f64) -> QuadOptions {
    QuadOptions::rel(GAMMA_REL_TOL).with_abs(GAMMA_REL_TOL * 1e-2 * scale)
}

/// `Γ(t) = (ε_I/2)² ∫ J(E) e^{−iEt} dE`.
pub fn gamma_from_spectral(j: &SpectralDensity, eps_i: f64, times: &[f64]) -> Result<CorrelationSeries> {
    let pref = 0.25 * eps_i * eps_i;
    let meta = SeriesMeta::new(SourceTag::ChainSpectral).param("eps_i", eps_i);
    if j.support.0 >= j.support.1 {
        return CorrelationSeries::new(times.to_vec(), vec![Complex64::default(); times.len()], meta);
    }
    let area = j.area()?;
    if area == 0.0 {
        return CorrelationSeries::new(times.to_vec(), vec![Complex64::default(); times.len()], meta);
    }
    let panels = j.panels();
    let opts = quad_tol(area);
    let values = times
        .par_iter()
        .map(|&t| {
            let r = quad_panels(|e| Complex64::from_polar(j.evaluate(e), -e * t), &panels, opts)?;
            Ok(r.value * pref)
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationSeries::new(times.to_vec(), values, meta)
}

fn validity_flags(chain: &ContinuumChain) -> Vec<String> {
    let lmax = chain.max_lambda();
    if lmax > 0.1 {
        vec![format!("max E_J/E_C = {lmax} is not << 1")]
    } else {
        Vec::new()
    }
}

/// Direct position-space quadrature `Γ(t) = (ε_I²/2) ∫ ν E_J² e^{−iE_C t} dx`.
pub fn gamma_continuum(chain: &ContinuumChain, times: &[f64]) -> Result<CorrelationSeries> {
    if chain.regime != Regime::LargeEc {
        return Err(Error::param("regime", "gamma_continuum needs a large-E_C chain"));
    }
    let eps = chain.coupling_eps;
    let pref = 0.5 * eps * eps;
    let breaks = chain.breaks();
    let weight = |x: f64| {
        let ej = chain.e_j(x);
        chain.nu(x) * ej * ej
    };
    let scale = quad_panels(weight, &breaks, QuadOptions::rel(1e-12))?.value;
    let mut meta = SeriesMeta::new(SourceTag::ChainContinuum).param("eps_i", eps);
    meta.flags = validity_flags(chain);
    if scale == 0.0 {
        return CorrelationSeries::new(times.to_vec(), vec![Complex64::default(); times.len()], meta);
    }
    let opts = quad_tol(scale);
    let values = times
        .par_iter()
        .map(|&t| {
            let r = quad_panels(
                |x| Complex64::from_polar(weight(x), -chain.e_c(x) * t),
                &breaks,
                opts,
            )?;
            Ok(r.value * pref)
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationSeries::new(times.to_vec(), values, meta)
}

/// Thermal offset `Γ₀ = 2ε_I² ∫ ν E_C² e^{−βE_C} dx`.
pub fn offset_gamma0(chain: &ContinuumChain, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    if beta.is_infinite() {
        return Ok(0.0);
    }
    let eps = chain.coupling_eps;
    let r = quad_panels(
        |x| {
            let ec = chain.e_c(x);
            chain.nu(x) * ec * ec * (-beta * ec).exp()
        },
        &chain.breaks(),
        QuadOptions::rel(1e-12),
    )?;
    Ok(2.0 * eps * eps * r.value)
}

/// Zero-temperature scale `Δ(x) = E_C(x)/(−ln λ(x))` and its minimum.
#[derive(Debug, Clone)]
pub struct DeltaProfile {
    chain: ContinuumChain,
    pub delta_star: f64,
    pub x_star: f64,
}

impl DeltaProfile {
    pub fn eval(&self, x: f64) -> f64 {
        delta_at(&self.chain, x)
    }
}

fn delta_at(chain: &ContinuumChain, x: f64) -> f64 {
    let ec = chain.e_c(x);
    ec / -(chain.e_j(x) / ec).ln()
}

/// Minimum of `Δ(x)` over a grid (4096 points per interval), refined by a
/// golden-section search around the best grid point. Ties go to the
/// smallest `x`.
pub fn delta_profile(chain: &ContinuumChain) -> Result<DeltaProfile> {
    let grid = chain.sample_grid(4096);
    let mut best = (f64::INFINITY, grid[0]);
    let mut best_idx = 0;
    for (i, &x) in grid.iter().enumerate() {
        let lam = chain.e_j(x) / chain.e_c(x);
        if !(lam < 1.0) {
            return Err(Error::Regime(format!("lambda(x) = {lam} >= 1 at x = {x}")));
        }
        let d = delta_at(chain, x);
        if d < best.0 {
            best = (d, x);
            best_idx = i;
        }
    }
    let a = grid[best_idx.saturating_sub(1)];
    let b = grid[(best_idx + 1).min(grid.len() - 1)];
    if b > a {
        let (xr, dr) = golden_min(|x| delta_at(chain, x), a, b);
        if dr < best.0 * (1.0 - 1e-14) {
            best = (dr, xr);
        }
    }
    Ok(DeltaProfile {
        chain: chain.clone(),
        delta_star: best.0,
        x_star: best.1,
    })
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn coth(x: f64) -> f64 {
    if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// Harmonic-oscillator correlator `(ω/4E_C)[coth(βω/2) cos ωt − i sin ωt]`,
/// `ω = √(2E_J E_C)`. `β = ∞` is allowed.
pub fn harmonic_correlation(p: &JunctionParams, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let w = (2.0 * p.e_j() * p.e_c()).sqrt();
    let amp = w / (4.0 * p.e_c());
    let c = if beta.is_infinite() { 1.0 } else { coth(0.5 * beta * w) };
    let values = times
        .iter()
        .map(|&t| Complex64::new(amp * c * (w * t).cos(), -amp * (w * t).sin()))
        .collect();
    let mut meta = SeriesMeta::new(SourceTag::Harmonic)
        .param("e_c", p.e_c())
        .param("e_j", p.e_j())
        .param("beta", beta);
    if p.e_c() > 0.1 * p.e_j() {
        meta.flags.push("E_C is not << E_J".into());
    }
    if !beta.is_infinite() && 1.0 / beta > 0.1 * p.e_j() {
        meta.flags.push("temperature is not << E_J".into());
    }
    CorrelationSeries::new(times.to_vec(), values, meta)
}

/// `Γ(t) = (ε_I/2)² ∫ J(ω)[coth(βω/2) cos ωt − i sin ωt] dω` for a harmonic
/// chain, together with its `J(ω)`.
pub fn harmonic_gamma(chain: &ContinuumChain, beta: f64, times: &[f64]) -> Result<(CorrelationSeries, SpectralDensity)> {
    if chain.regime != Regime::Harmonic {
        return Err(Error::param("regime", "harmonic_gamma needs a harmonic chain"));
    }
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let j = chain.spectral_density();
    let eps = chain.coupling_eps;
    let pref = 0.25 * eps * eps;
    let area = j.area()?;
    let mut meta = SeriesMeta::new(SourceTag::Harmonic).param("eps_i", eps).param("beta", beta);
    let ratio = chain
        .sample_grid(MONOTONE_SAMPLES)
        .into_iter()
        .map(|x| chain.e_c(x) / chain.e_j(x))
        .fold(0.0, f64::max);
    if ratio > 0.1 {
        meta.flags.push(format!("max E_C/E_J = {ratio} is not << 1"));
    }
    if area == 0.0 {
        let s = CorrelationSeries::new(times.to_vec(), vec![Complex64::default(); times.len()], meta)?;
        return Ok((s, j));
    }
    let panels = j.panels();
    let opts = quad_tol(area);
    let values = times
        .par_iter()
        .map(|&t| {
            let r = quad_panels(
                |w| {
                    let jw = j.evaluate(w);
                    let c = if beta.is_infinite() { 1.0 } else { coth(0.5 * beta * w) };
                    Complex64::new(jw * c * (w * t).cos(), -jw * (w * t).sin())
                },
                &panels,
                opts,
            )?;
            Ok(r.value * pref)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((CorrelationSeries::new(times.to_vec(), values, meta)?, j))
}

/// Cumulative `∫ν` table for inverse-CDF placement of junctions.
struct DensityCdf<'a> {
    chain: &'a ContinuumChain,
    nodes: Vec<f64>,
    cum: Vec<f64>,
}

impl<'a> DensityCdf<'a> {
    fn new(chain: &'a ContinuumChain) -> Result<Self> {
        let nodes = chain.sample_grid(512);
        let mut cum = vec![0.0];
        for w in nodes.windows(2) {
            let r = quad_adaptive(|x| chain.nu(x), w[0], w[1], QuadOptions::rel(1e-13))?;
            cum.push(cum.last().unwrap() + r.value);
        }
        if !(*cum.last().unwrap() > 0.0) {
            return Err(Error::param("nu", "junction density integrates to zero"));
        }
        Ok(DensityCdf { chain, nodes, cum })
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Position where the cumulative density reaches fraction `q` of the total.
    fn quantile(&self, q: f64) -> f64 {
        let target = q * self.total();
        let k = self.cum.partition_point(|&c| c <= target).clamp(1, self.nodes.len() - 1) - 1;
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        let rest = target - self.cum[k];
        let part = |x: f64| {
            quad_adaptive(|y| self.chain.nu(y), a, x, QuadOptions::rel(1e-13))
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        };
        invert_monotone(part, a, b, rest)
    }
}

fn junctions_at(chain: &ContinuumChain, xs: &[f64]) -> Result<DiscreteChain> {
    let js = xs.iter().map(|&x| chain.junction_at(x)).collect::<Result<Vec<_>>>()?;
    DiscreteChain::new(js, chain.coupling_eps)
}

/// `n` junctions at the midpoint quantiles `(i + ½)/n` of `ν`.
pub fn discretize_quantile(chain: &ContinuumChain, n: usize) -> Result<DiscreteChain> {
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    let cdf = DensityCdf::new(chain)?;
    let xs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| cdf.quantile((i as f64 + 0.5) / n as f64))
        .collect();
    junctions_at(chain, &xs)
}

/// `n` junctions drawn independently from `ν/N_J` with a seeded generator.
pub fn discretize_random(chain: &ContinuumChain, n: usize, seed: u64) -> Result<DiscreteChain> {
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    let cdf = DensityCdf::new(chain)?;
    let us = uniform_stream(seed, n);
    let xs: Vec<f64> = us.par_iter().map(|&u| cdf.quantile(1.0 - u)).collect();
    junctions_at(chain, &xs)
}
