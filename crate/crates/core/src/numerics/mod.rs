//! Numerical kernels shared by the physics modules: adaptive Gauss–Kronrod
//! quadrature, principal-value quadrature, an embedded Runge–Kutta integrator
//! and seeded truncated-normal sampling.

mod ode;
mod pv;
mod quad;
mod rng;

pub use ode::{ode_evolve, ode_evolve_projected, OdeOptions, Trajectory};
pub use pv::quad_pv;
pub use quad::{quad_adaptive, quad_panels, QuadOptions, QuadValue, QuadratureResult};
pub use rng::{normal_cdf, normal_quantile, rng_truncated_normal, uniform_stream};
