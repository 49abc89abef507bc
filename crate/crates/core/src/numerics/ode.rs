use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: None,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `dy/dt = rhs(t, y)` and report the state at each requested time.
/// `times` must be non-decreasing; the first entry is the initial time.
pub fn ode_evolve<F>(rhs: F, y0: &[f64], times: &[f64], opts: OdeOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    ode_evolve_projected(rhs, y0, times, opts, |_y: &mut [f64]| {})
}

/// As [`ode_evolve`], applying `project` to the state after every accepted
/// step (used to re-impose symmetries such as Hermiticity).
pub fn ode_evolve_projected<F, P>(
    mut rhs: F,
    y0: &[f64],
    times: &[f64],
    opts: OdeOptions,
    mut project: P,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    P: FnMut(&mut [f64]),
{
    if times.is_empty() {
        return Err(Error::param("times", "at least one output time required"));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::param("times", "output times must be non-decreasing"));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = times[0];
    let mut out = Trajectory {
        times: vec![t],
        states: vec![y.clone()],
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let t_end = *times.last().unwrap();
    if t_end == t {
        for &ti in &times[1..] {
            out.times.push(ti);
            out.states.push(y.clone());
        }
        return Ok(out);
    }

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    rhs(t, &y, &mut k1);
    let mut h = match opts.h_init {
        Some(h) => h,
        None => initial_step(&y, &k1, &opts, t_end - t),
    };

    let scale = |a: f64, b: f64| opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());

    for &target in &times[1..] {
        while t < target {
            if out.accepted_steps + out.rejected_steps >= opts.max_steps {
                return Err(Error::StepUnderflow { t, h });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t, h: step });
            }

            for i in 0..n {
                tmp[i] = y[i] + step * A21 * k1[i];
            }
            rhs(t + C2 * step, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * step, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * step, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * step, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(t + step, &tmp, &mut k6);
            for i in 0..n {
                ynew[i] = y[i]
                    + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            rhs(t + step, &ynew, &mut k7);

            let mut err2 = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let s = scale(y[i], ynew[i]);
                err2 += (e / s).powi(2);
            }
            let err = if n > 0 { (err2 / n as f64).sqrt() } else { 0.0 };

            if err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut ynew);
                project(&mut y);
                rhs(t, &y, &mut k1);
                out.accepted_steps += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A step shortened to land on an output time says little about
                // the natural step size.
                if !last || step >= h {
                    h = step * fac;
                }
            } else {
                out.rejected_steps += 1;
                h = step * (0.9 * err.powf(-0.2)).max(0.1);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        out.times.push(target);
        out.states.push(y.clone());
    }
    Ok(out)
}

fn initial_step(y: &[f64], f0: &[f64], opts: &OdeOptions, span: f64) -> f64 {
    let n = y.len().max(1) as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let s = opts.abs_tol + opts.rel_tol * yi.abs();
        d0 += (yi / s).powi(2);
        d1 += (fi / s).powi(2);
    }
    let d0 = (d0 / n).sqrt();
    let d1 = (d1 / n).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span.abs()).max(1e-12 * span.abs())
}
