//! Single Josephson junction in a truncated charge basis: Hamiltonian, charge
//! conjugation, spectral decomposition and the exact thermal correlator
//! `G(t) = ⟨N(t)N(0)⟩`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{CorrelationSeries, SeriesMeta, SourceTag};

/// Default charge cutoff: states `n = -20..=20`.
pub const DEFAULT_N_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJunction", into = "RawJunction")]
pub struct JunctionParams {
    e_c: f64,
    e_j: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct RawJunction {
    e_c: f64,
    e_j: f64,
}

impl TryFrom<RawJunction> for JunctionParams {
    type Error = Error;
    fn try_from(r: RawJunction) -> Result<Self> {
        JunctionParams::new(r.e_c, r.e_j)
    }
}

impl From<JunctionParams> for RawJunction {
    fn from(p: JunctionParams) -> Self {
        RawJunction { e_c: p.e_c, e_j: p.e_j }
    }
}

impl JunctionParams {
    pub fn new(e_c: f64, e_j: f64) -> Result<Self> {
        if !(e_c > 0.0) || !e_c.is_finite() {
            return Err(Error::param("e_c", format!("must be positive and finite, got {e_c}")));
        }
        if !(e_j >= 0.0) || !e_j.is_finite() {
            return Err(Error::param("e_j", format!("must be non-negative and finite, got {e_j}")));
        }
        Ok(JunctionParams {
            e_c,
            e_j,
            lambda: e_j / e_c,
        })
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn e_j(&self) -> f64 {
        self.e_j
    }

    /// λ = E_J / E_C.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Dense operator on the charge states `|-n_max⟩ … |n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeBasisOperator {
    pub n_max: usize,
    pub entries: DMatrix<Complex64>,
}

impl ChargeBasisOperator {
    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    /// Matrix index of charge state `n`.
    pub fn index(&self, n: i64) -> usize {
        (n + self.n_max as i64) as usize
    }

    /// Largest entry of `A - A†`.
    pub fn hermitian_defect(&self) -> f64 {
        let a = &self.entries;
        let mut d: f64 = 0.0;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// Largest entry of `[self, other]`.
    pub fn commutator_max(&self, other: &ChargeBasisOperator) -> f64 {
        let c = &self.entries * &other.entries - &other.entries * &self.entries;
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_cutoff(n_max: usize) -> Result<()> {
    if n_max < 1 {
        return Err(Error::CutoffTooSmall(n_max));
    }
    Ok(())
}

fn zeros(n_max: usize) -> DMatrix<Complex64> {
    let d = 2 * n_max + 1;
    DMatrix::from_element(d, d, Complex64::new(0.0, 0.0))
}

/// `H = E_C N² − E_J cos φ`: diagonal `n²E_C`, nearest-neighbour `−E_J/2`.
pub fn build_hamiltonian(p: &JunctionParams, n_max: usize) -> Result<ChargeBasisOperator> {
    check_cutoff(n_max)?;
    let mut m = zeros(n_max);
    let d = 2 * n_max + 1;
    for i in 0..d {
        let n = i as f64 - n_max as f64;
        m[(i, i)] = Complex64::new(n * n * p.e_c, 0.0);
        if i + 1 < d {
            m[(i, i + 1)] = Complex64::new(-0.5 * p.e_j, 0.0);
            m[(i + 1, i)] = Complex64::new(-0.5 * p.e_j, 0.0);
        }
    }
    Ok(ChargeBasisOperator { n_max, entries: m })
}

/// Charge conjugation `𝒞|n⟩ = |−n⟩`.
pub fn parity_operator(n_max: usize) -> Result<ChargeBasisOperator> {
    check_cutoff(n_max)?;
    let mut m = zeros(n_max);
    let d = 2 * n_max + 1;
    for i in 0..d {
        m[(i, d - 1 - i)] = Complex64::new(1.0, 0.0);
    }
    Ok(ChargeBasisOperator { n_max, entries: m })
}

/// Cooper-pair number operator `N|n⟩ = n|n⟩`.
pub fn number_operator(n_max: usize) -> Result<ChargeBasisOperator> {
    check_cutoff(n_max)?;
    let mut m = zeros(n_max);
    for i in 0..2 * n_max + 1 {
        m[(i, i)] = Complex64::new(i as f64 - n_max as f64, 0.0);
    }
    Ok(ChargeBasisOperator { n_max, entries: m })
}

/// `cos φ` with `⟨n±1|cos φ|n⟩ = 1/2`.
pub fn cos_phi_operator(n_max: usize) -> Result<ChargeBasisOperator> {
    check_cutoff(n_max)?;
    let mut m = zeros(n_max);
    for i in 0..2 * n_max {
        m[(i, i + 1)] = Complex64::new(0.5, 0.0);
        m[(i + 1, i)] = Complex64::new(0.5, 0.0);
    }
    Ok(ChargeBasisOperator { n_max, entries: m })
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub n_max: usize,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Columns are eigenvectors.
    pub states: DMatrix<Complex64>,
    /// ±1 eigenvalue of 𝒞 for each state.
    pub parities: Vec<i8>,
}

impl SpectralDecomposition {
    pub fn state(&self, k: usize) -> DVector<Complex64> {
        self.states.column(k).into_owned()
    }

    /// `max_k ‖𝒞ψ_k − p_k ψ_k‖`.
    pub fn parity_defect(&self) -> f64 {
        let d = self.states.nrows();
        let mut worst: f64 = 0.0;
        for k in 0..self.energies.len() {
            let p = self.parities[k] as f64;
            let mut s = 0.0;
            for i in 0..d {
                s += (self.states[(d - 1 - i, k)] - self.states[(i, k)] * p).norm_sqr();
            }
            worst = worst.max(s.sqrt());
        }
        worst
    }
}

/// Diagonalize a Hermitian charge-basis operator and label each eigenvector by
/// its charge-conjugation parity.
///
/// When the operator commutes with `𝒞` it is first projected onto the even
/// sector `{|0⟩, (|n⟩+|−n⟩)/√2}` and the odd sector `{(|n⟩−|−n⟩)/√2}`, and each
/// block is diagonalized separately. Parity labels are then exact and
/// degenerate ± pairs never mix. Otherwise labels are the sign of `⟨𝒞⟩`.
pub fn diagonalize(h: &ChargeBasisOperator) -> Result<SpectralDecomposition> {
    let scale = h.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let defect = h.hermitian_defect();
    if defect > 1e-12 * scale.max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    let n_max = h.n_max;
    let d = h.dim();
    let c = parity_operator(n_max)?;
    let symmetric = h.commutator_max(&c) <= 1e-13 * scale.max(1.0);

    let mut levels: Vec<(f64, i8, DVector<Complex64>)> = Vec::with_capacity(d);
    if symmetric {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let i0 = n_max;
        for sign in [1i8, -1] {
            let cols = if sign == 1 { n_max + 1 } else { n_max };
            let mut b = DMatrix::from_element(d, cols, Complex64::new(0.0, 0.0));
            let mut col = 0;
            if sign == 1 {
                b[(i0, 0)] = Complex64::new(1.0, 0.0);
                col = 1;
            }
            for n in 1..=n_max {
                b[(i0 + n, col)] = Complex64::new(r, 0.0);
                b[(i0 - n, col)] = Complex64::new(sign as f64 * r, 0.0);
                col += 1;
            }
            let block = b.adjoint() * &h.entries * &b;
            let (vals, vecs) = hermitian_eigen(block);
            let full = &b * vecs;
            for (k, e) in vals.into_iter().enumerate() {
                levels.push((e, sign, full.column(k).into_owned()));
            }
        }
    } else {
        let (vals, vecs) = hermitian_eigen(h.entries.clone());
        for (k, e) in vals.into_iter().enumerate() {
            let v = vecs.column(k).into_owned();
            let cv = &c.entries * &v;
            let p = if v.dotc(&cv).re >= 0.0 { 1 } else { -1 };
            levels.push((e, p, v));
        }
    }
    // Stable: within an exactly degenerate pair the odd state comes first.
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut energies = Vec::with_capacity(d);
    let mut parities = Vec::with_capacity(d);
    let mut states = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for (k, (e, p, v)) in levels.into_iter().enumerate() {
        energies.push(e);
        parities.push(p);
        states.set_column(k, &fix_phase(v));
    }
    Ok(SpectralDecomposition {
        n_max,
        energies,
        states,
        parities,
    })
}

/// Eigen-decomposition of a Hermitian matrix, using the real symmetric solver
/// when every entry is real.
fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let eig = SymmetricEigen::new(re);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::new(m);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }
}

/// Rotate the global phase so the largest component is real and positive.
fn fix_phase(v: DVector<Complex64>) -> DVector<Complex64> {
    let mut imax = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best + 1e-14 {
            best = z.norm();
            imax = i;
        }
    }
    if best == 0.0 {
        return v;
    }
    let ph = v[imax] / best;
    v * ph.conj()
}

/// Boltzmann weights `e^{-β(E_m − E_0)}/Z`; `β = ∞` selects the ground level.
fn thermal_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let e0 = energies[0];
    let raw: Vec<f64> = if beta.is_infinite() {
        energies.iter().map(|&e| if e - e0 <= 1e-12 * e0.abs().max(1.0) { 1.0 } else { 0.0 }).collect()
    } else {
        energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
    };
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", format!("must be positive, got {beta}")));
    }
    Ok(())
}

/// Spectral data for `G(t)`, evaluable at any real time.
#[derive(Debug, Clone)]
pub struct ExactCorrelator {
    /// `(w_m |N_mn|², E_m − E_n)` for every pair with nonzero weight.
    terms: Vec<(f64, f64)>,
    pub cutoff_warning: bool,
}

impl ExactCorrelator {
    pub fn new(p: &JunctionParams, n_max: usize, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let h = build_hamiltonian(p, n_max)?;
        let sd = diagonalize(&h)?;
        let nop = number_operator(n_max)?.entries;
        let nmat = sd.states.adjoint() * nop * &sd.states;
        let w = thermal_weights(&sd.energies, beta);
        let d = sd.energies.len();
        let mut terms = Vec::new();
        for m in 0..d {
            if w[m] == 0.0 {
                continue;
            }
            for n in 0..d {
                let c = w[m] * nmat[(m, n)].norm_sqr();
                if c > 0.0 {
                    terms.push((c, sd.energies[m] - sd.energies[n]));
                }
            }
        }
        let top = (n_max * n_max) as f64 * p.e_c();
        let cutoff_warning = (-beta * top).exp() >= 1e-14;
        Ok(ExactCorrelator { terms, cutoff_warning })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(c, de)| Complex64::from_polar(c, de * t))
            .sum()
    }
}

/// `G(t) = Z⁻¹ Σ_{m,n} |⟨ψ_m|N|ψ_n⟩|² e^{−βE_m} e^{i(E_m−E_n)t}`.
pub fn exact_correlation(p: &JunctionParams, n_max: usize, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
    let g = ExactCorrelator::new(p, n_max, beta)?;
    let values = times.iter().map(|&t| g.eval(t)).collect();
    let mut meta = SeriesMeta::new(SourceTag::Exact)
        .param("e_c", p.e_c())
        .param("e_j", p.e_j())
        .param("beta", beta)
        .param("n_max", n_max as f64);
    if g.cutoff_warning {
        meta.flags.push(format!("charge cutoff n_max={n_max}: exp(-beta n_max^2 E_C) >= 1e-14"));
    }
    CorrelationSeries::new(times.to_vec(), values, meta)
}

/// Thermal `⟨N⟩`; vanishes by charge-conjugation symmetry.
pub fn thermal_charge_expectation(p: &JunctionParams, n_max: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let sd = diagonalize(&build_hamiltonian(p, n_max)?)?;
    let nop = number_operator(n_max)?.entries;
    let w = thermal_weights(&sd.energies, beta);
    let mut s = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let v = sd.states.column(k);
        s += wk * (v.adjoint() * &nop * v)[(0, 0)].re;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(e_c: f64, e_j: f64) -> JunctionParams {
        JunctionParams::new(e_c, e_j).unwrap()
    }

    #[test]
    fn params_validate() {
        assert!(JunctionParams::new(0.0, 0.1).is_err());
        assert!(JunctionParams::new(1.0, -0.1).is_err());
        let p = jp(2.0, 0.1);
        assert_eq!(p.lambda(), 0.1 / 2.0);
        let back: JunctionParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<JunctionParams>(r#"{"e_c":-1,"e_j":0}"#).is_err());
    }

    #[test]
    fn free_rotor_hamiltonian() {
        let h = build_hamiltonian(&jp(1.0, 0.0), 1).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| h.entries[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 1.0]);
        assert_eq!(h.entries[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn neighbour_coupling() {
        let h = build_hamiltonian(&jp(1.0, 0.01), 1).unwrap();
        assert_eq!(h.entries[(0, 1)].re, -0.005);
        assert_eq!(h.entries[(2, 1)].re, -0.005);
        assert_eq!(h.entries[(0, 2)].re, 0.0);
    }

    #[test]
    fn cutoff_rejected() {
        assert!(matches!(build_hamiltonian(&jp(1.0, 0.0), 0), Err(Error::CutoffTooSmall(0))));
        assert!(parity_operator(0).is_err());
    }

    #[test]
    fn parity_properties() {
        let c = parity_operator(1).unwrap();
        assert_eq!(c.entries[(0, 2)].re, 1.0);
        assert_eq!(c.entries[(1, 1)].re, 1.0);
        let c = parity_operator(20).unwrap();
        let n = number_operator(20).unwrap();
        let cnc = &c.entries * &n.entries * &c.entries;
        assert_eq!(cnc, -n.entries.clone());
        let c2 = &c.entries * &c.entries;
        assert_eq!(c2, DMatrix::identity(41, 41));
        let h = build_hamiltonian(&jp(1.3, 0.27), 20).unwrap();
        assert_eq!(h.commutator_max(&c), 0.0);
    }

    #[test]
    fn ground_energy_small_lambda() {
        let sd = diagonalize(&build_hamiltonian(&jp(1.0, 0.01), 20).unwrap()).unwrap();
        assert!((sd.energies[0] + 5e-5).abs() < 1e-8);
    }

    #[test]
    fn free_rotor_spectrum_and_parities() {
        let sd = diagonalize(&build_hamiltonian(&jp(1.0, 0.0), 2).unwrap()).unwrap();
        let expect = [0.0, 1.0, 1.0, 4.0, 4.0];
        for (e, x) in sd.energies.iter().zip(expect) {
            assert!((e - x).abs() < 1e-14);
        }
        assert_eq!(sd.parities[0], 1);
        let mut p1 = vec![sd.parities[1], sd.parities[2]];
        p1.sort();
        assert_eq!(p1, vec![-1, 1]);
        assert!(sd.parity_defect() < 1e-12);
    }

    #[test]
    fn first_excited_splitting() {
        let sd = diagonalize(&build_hamiltonian(&jp(1.0, 0.1), 20).unwrap()).unwrap();
        // lower member of the n = 1 pair is odd
        assert_eq!(sd.parities[1], -1);
        assert_eq!(sd.parities[2], 1);
        assert!((sd.energies[1] - 0.9991667).abs() < 5e-4);
        let split = sd.energies[2] - sd.energies[1];
        assert!((split - 5e-3).abs() < 1e-4);
        assert!(sd.parity_defect() < 1e-10);
    }

    #[test]
    fn orthonormal_states() {
        let sd = diagonalize(&build_hamiltonian(&jp(1.0, 0.03), 20).unwrap()).unwrap();
        let g = sd.states.adjoint() * &sd.states;
        let d = g - DMatrix::<Complex64>::identity(41, 41);
        assert!(d.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        assert!(sd.parity_defect() < 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = build_hamiltonian(&jp(1.0, 0.1), 2).unwrap();
        h.entries[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(diagonalize(&h), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn zero_temperature_free_rotor_correlator_vanishes() {
        let g = exact_correlation(&jp(1.0, 0.0), 20, 50.0, &[0.0, 1.0, 7.5]).unwrap();
        assert!(g.values.iter().all(|z| z.norm() < 1e-20));
    }

    #[test]
    fn correlator_at_origin() {
        let g = exact_correlation(&jp(1.0, 0.01), 20, 10.0, &[0.0]).unwrap();
        let expect = 5e-5 + 2.0 * (-10.0f64).exp();
        assert!((g.values[0].re - expect).abs() < 1e-7);
        assert!(g.values[0].im.abs() < 1e-18);
    }

    #[test]
    fn conjugate_symmetry_in_time() {
        let g = ExactCorrelator::new(&jp(1.0, 0.2), 12, 2.0).unwrap();
        for &t in &[0.3, 4.0, 91.0] {
            assert!((g.eval(-t) - g.eval(t).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn charge_expectation_vanishes() {
        assert!(thermal_charge_expectation(&jp(1.0, 0.5), 20, 1.0).unwrap().abs() < 1e-12);
        assert_eq!(thermal_charge_expectation(&jp(1.0, 0.0), 5, 3.0).unwrap(), 0.0);
        assert!(thermal_charge_expectation(&jp(1.0, 0.1), 20, 0.0).is_err());
    }

    #[test]
    fn cutoff_warning_flag() {
        let g = exact_correlation(&jp(1.0, 0.0), 2, 0.1, &[0.0]).unwrap();
        assert_eq!(g.meta.flags.len(), 1);
        let g = exact_correlation(&jp(1.0, 0.0), 20, 1.0, &[0.0]).unwrap();
        assert!(g.meta.flags.is_empty());
    }
}
