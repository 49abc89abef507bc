use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{ode_evolve_projected, OdeOptions};

use super::coefficients::GkslResult;

/// Oscillator density matrix in the Fock basis `|0⟩ … |n_fock⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorState {
    pub n_fock: usize,
    pub rho: DMatrix<Complex64>,
}

impl OscillatorState {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let d = rho.nrows();
        if d < 3 || rho.ncols() != d {
            return Err(Error::param("rho", "must be square with n_fock >= 2"));
        }
        let s = OscillatorState { n_fock: d - 1, rho };
        let tr = s.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::param("rho", format!("trace is {tr}, expected 1")));
        }
        let herm = s.hermitian_defect();
        if herm > 1e-12 {
            return Err(Error::NonHermitian(herm));
        }
        let min = s.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::param("rho", format!("negative eigenvalue {min}")));
        }
        Ok(s)
    }

    /// `|n0⟩⟨n0|`.
    pub fn fock(n_fock: usize, n0: usize) -> Result<Self> {
        if n0 > n_fock {
            return Err(Error::param("n0", "exceeds the Fock cutoff"));
        }
        let mut amps = vec![Complex64::default(); n_fock + 1];
        amps[n0] = Complex64::new(1.0, 0.0);
        Self::pure(&amps)
    }

    /// `|ψ⟩⟨ψ|` for the normalised amplitudes `amps`.
    pub fn pure(amps: &[Complex64]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::param("amps", "zero vector"));
        }
        let d = amps.len();
        let rho = DMatrix::from_fn(d, d, |m, n| amps[m] * amps[n].conj() / (norm * norm));
        Self::new(rho)
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn n_expect(&self) -> f64 {
        self.rho.diagonal().iter().enumerate().map(|(n, z)| n as f64 * z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Population of the two highest Fock levels.
    pub fn top_population(&self) -> f64 {
        let d = self.n_fock + 1;
        self.rho[(d - 1, d - 1)].re + self.rho[(d - 2, d - 2)].re
    }

    fn pack(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 * self.rho.len());
        for z in self.rho.iter() {
            y.push(z.re);
            y.push(z.im);
        }
        y
    }

    fn unpack(n_fock: usize, y: &[f64]) -> Self {
        let d = n_fock + 1;
        let rho = DMatrix::from_iterator(d, d, y.chunks(2).map(|c| Complex64::new(c[0], c[1])));
        OscillatorState { n_fock, rho }
    }
}

#[derive(Debug, Clone)]
pub struct OscillatorTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<OscillatorState>,
    /// Set when the top two Fock levels ever hold more than `1e-8`.
    pub cutoff_warning: bool,
    pub accepted_steps: usize,
}

impl OscillatorTrajectory {
    /// `t,n_expect,trace,purity` table with a comment header.
    pub fn to_csv(&self, header: &str) -> String {
        let mut s = String::new();
        for line in header.lines() {
            writeln!(s, "# {line}").unwrap();
        }
        if self.cutoff_warning {
            s.push_str("# flag: Fock cutoff too small (top-level population > 1e-8)\n");
        }
        s.push_str("t,n_expect,trace,purity\n");
        for (t, st) in self.times.iter().zip(&self.states) {
            writeln!(
                s,
                "{t:.12e},{:.12e},{:.12e},{:.12e}",
                st.n_expect(),
                st.trace(),
                st.purity()
            )
            .unwrap();
        }
        s
    }
}

/// Integrates `dρ/dt = −i[δ_LS b†b, ρ] + κ(bρb† − ½{b†b, ρ})` (interaction
/// picture) with an adaptive Dormand–Prince pair at relative tolerance 1e-9,
/// symmetrising ρ after every step.
pub fn evolve_oscillator(res: &GkslResult, state0: &OscillatorState, times: &[f64]) -> Result<OscillatorTrajectory> {
    if times.is_empty() {
        return Err(Error::param("times", "empty grid"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("times", "must be strictly increasing"));
    }
    let kappa = res.kappa;
    let delta = res.lamb_shift.unwrap_or(0.0);
    if !(kappa >= 0.0 && kappa.is_finite() && delta.is_finite()) {
        return Err(Error::param("kappa", "decay rate must be finite and non-negative"));
    }
    let nf = state0.n_fock;
    let d = nf + 1;
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        // Column-major: element (m, n) sits at 2(m + n d).
        for n in 0..d {
            for m in 0..d {
                let k = 2 * (m + n * d);
                let r = Complex64::new(y[k], y[k + 1]);
                let mut v = r * Complex64::new(-0.5 * kappa * (m + n) as f64, -delta * (m as f64 - n as f64));
                if m + 1 < d && n + 1 < d {
                    let k1 = 2 * (m + 1 + (n + 1) * d);
                    v += Complex64::new(y[k1], y[k1 + 1]) * (kappa * (((m + 1) * (n + 1)) as f64).sqrt());
                }
                dy[k] = v.re;
                dy[k + 1] = v.im;
            }
        }
    };
    let symmetrize = |y: &mut [f64]| {
        for n in 0..d {
            for m in 0..n {
                let a = 2 * (m + n * d);
                let b = 2 * (n + m * d);
                let re = 0.5 * (y[a] + y[b]);
                let im = 0.5 * (y[a + 1] - y[b + 1]);
                y[a] = re;
                y[a + 1] = im;
                y[b] = re;
                y[b + 1] = -im;
            }
            y[2 * (n + n * d) + 1] = 0.0;
        }
    };
    let opts = OdeOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-14,
        ..OdeOptions::default()
    };
    let traj = ode_evolve_projected(rhs, &state0.pack(), times, opts, symmetrize)?;
    let states: Vec<OscillatorState> = traj.states.iter().map(|y| OscillatorState::unpack(nf, y)).collect();
    let cutoff_warning = states.iter().any(|s| s.top_population() > 1e-8);
    Ok(OscillatorTrajectory {
        times: traj.times,
        states,
        cutoff_warning,
        accepted_steps: traj.accepted_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::linspace;

    fn coeffs(kappa: f64, ls: f64) -> GkslResult {
        GkslResult {
            kappa,
            lamb_shift: Some(ls),
            gamma_omega: Complex64::default(),
            kappa_negative: 0.0,
            ls_constant: None,
            diagnostics: None,
            flags: vec![],
        }
    }

    #[test]
    fn frozen_without_coupling() {
        let s = OscillatorState::pure(&[
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::default(),
        ])
        .unwrap();
        let tr = evolve_oscillator(&coeffs(0.0, 0.0), &s, &[0.0, 1.0, 10.0]).unwrap();
        for st in &tr.states {
            assert!((&st.rho - &s.rho).iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn number_decay() {
        let kappa = 0.3;
        let s = OscillatorState::fock(12, 4).unwrap();
        let times = linspace(0.0, 5.0 / kappa, 51);
        let tr = evolve_oscillator(&coeffs(kappa, 0.07), &s, &times).unwrap();
        for (t, st) in times.iter().zip(&tr.states) {
            let exact = 4.0 * (-kappa * t).exp();
            assert!((st.n_expect() - exact).abs() <= 1e-6 * exact);
            assert!((st.trace() - 1.0).abs() < 1e-9);
            assert!(st.min_eigenvalue() > -1e-8);
            assert!(st.hermitian_defect() == 0.0);
        }
        assert!(!tr.cutoff_warning);
    }

    #[test]
    fn coherence_rotates_and_decays() {
        let (kappa, ls) = (0.2, 1.3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = OscillatorState::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::default()]).unwrap();
        let times = linspace(0.0, 10.0, 21);
        let tr = evolve_oscillator(&coeffs(kappa, ls), &s, &times).unwrap();
        for (t, st) in times.iter().zip(&tr.states) {
            let exact = Complex64::from_polar(0.5 * (-0.5 * kappa * t).exp(), ls * t);
            assert!((st.rho[(0, 1)] - exact).norm() < 1e-8);
        }
    }

    #[test]
    fn cutoff_warning_raised() {
        let s = OscillatorState::fock(3, 3).unwrap();
        let tr = evolve_oscillator(&coeffs(0.1, 0.0), &s, &[0.0, 1.0]).unwrap();
        assert!(tr.cutoff_warning);
        let csv = tr.to_csv("units: hbar = k_B = e = 1");
        assert!(csv.contains("t,n_expect,trace,purity"));
    }

    #[test]
    fn invalid_states_rejected() {
        let bad = DMatrix::from_element(3, 3, Complex64::new(0.5, 0.0));
        assert!(OscillatorState::new(bad).is_err());
    }
}
