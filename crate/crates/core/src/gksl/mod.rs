//! Master-equation coefficients for a capacitively coupled LC oscillator,
//! its dissipative evolution and the Markovianity checks.

mod coefficients;
mod evolution;
mod markov;

pub use coefficients::{
    decay_rate, gksl_coefficients, half_fourier, lamb_shift, pv_integral, Diagnostics, GkslResult, OscillatorParams,
};
pub use evolution::{evolve_oscillator, OscillatorState, OscillatorTrajectory};
pub use markov::{
    lorentzian_omega_b, lorentzian_zeta_m, markovianity_report, measured_bath_rate, Criteria, MarkovReport,
    MarkovScenario, DEFAULT_THRESHOLD,
};
