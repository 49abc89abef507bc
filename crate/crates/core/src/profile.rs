//! Evaluable one-dimensional profiles `f(x)` with analytic derivatives.
//!
//! Profiles serialize as `{"form": <tag>, "params": {...}}`. Composite forms
//! (`product`, `power`, `scaled`) let derived quantities such as the dual-chain
//! energies stay in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "params", rename_all = "snake_case")]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `|x|^abs_power · P(x) / Q(x)`, coefficients in ascending powers of `x`.
    Rational {
        num: Vec<f64>,
        #[serde(default = "one")]
        den: Vec<f64>,
        #[serde(default)]
        abs_power: u32,
    },
    /// `amplitude · exp(−(x − center)² / 2width²)`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `amplitude / sinh(x / scale)`.
    InverseSinh {
        amplitude: f64,
        scale: f64,
    },
    Product {
        factors: Vec<Profile>,
    },
    Power {
        base: Box<Profile>,
        exponent: f64,
    },
    Scaled {
        factor: f64,
        base: Box<Profile>,
    },
    /// Monotone piecewise-cubic Hermite interpolation through `(xs, ys)`;
    /// constant beyond the table.
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

fn one() -> Vec<f64> {
    vec![1.0]
}

/// `(p(x), p'(x))` by Horner's rule.
fn poly(c: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &a in c.iter().rev() {
        d = d * x + v;
        v = v * x + a;
    }
    (v, d)
}

/// Coefficients of `a·b`.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `a^k`.
pub fn poly_pow(a: &[f64], k: u32) -> Vec<f64> {
    (0..k).fold(vec![1.0], |acc, _| poly_mul(&acc, a))
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Profile::Rational {
            num: coeffs,
            den: vec![1.0],
            abs_power: 0,
        }
    }

    pub fn rational(num: Vec<f64>, den: Vec<f64>, abs_power: u32) -> Self {
        Profile::Rational { num, den, abs_power }
    }

    pub fn product(factors: Vec<Profile>) -> Self {
        Profile::Product { factors }
    }

    pub fn power(base: Profile, exponent: f64) -> Self {
        Profile::Power {
            base: Box::new(base),
            exponent,
        }
    }

    pub fn scaled(factor: f64, base: Profile) -> Self {
        Profile::Scaled {
            factor,
            base: Box::new(base),
        }
    }

    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::param("tabulated", "need at least two points and equal lengths"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("tabulated.xs", "must be strictly increasing"));
        }
        Ok(Profile::Tabulated { xs, ys })
    }

    /// Checks parameters that would make evaluation meaningless.
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Rational { num, den, .. } => {
                if num.is_empty() || den.is_empty() || den.iter().all(|&c| c == 0.0) {
                    return Err(Error::param("rational", "empty numerator or zero denominator"));
                }
            }
            Profile::Gaussian { width, .. } if !(*width > 0.0) => {
                return Err(Error::param("gaussian.width", "must be positive"));
            }
            Profile::InverseSinh { scale, .. } if !(*scale > 0.0) => {
                return Err(Error::param("inverse_sinh.scale", "must be positive"));
            }
            Profile::Product { factors } => {
                for f in factors {
                    f.validate()?;
                }
            }
            Profile::Power { base, .. } | Profile::Scaled { base, .. } => base.validate()?,
            Profile::Tabulated { xs, ys } => {
                Profile::tabulated(xs.clone(), ys.clone())?;
            }
            _ => {}
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_d(x).0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.eval_d(x).1
    }

    /// `(f(x), f'(x))`.
    pub fn eval_d(&self, x: f64) -> (f64, f64) {
        match self {
            Profile::Constant { value } => (*value, 0.0),
            Profile::Rational { num, den, abs_power } => {
                let (p, dp) = poly(num, x);
                let (q, dq) = poly(den, x);
                let r = p / q;
                let dr = (dp * q - p * dq) / (q * q);
                if *abs_power == 0 {
                    (r, dr)
                } else {
                    let k = *abs_power as i32;
                    let a = x.abs().powi(k);
                    let da = k as f64 * x.abs().powi(k - 1) * x.signum() * if x == 0.0 { 0.0 } else { 1.0 };
                    (a * r, da * r + a * dr)
                }
            }
            Profile::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let z = (x - center) / width;
                let v = amplitude * (-0.5 * z * z).exp();
                (v, -v * z / width)
            }
            Profile::InverseSinh { amplitude, scale } => {
                let u = x / scale;
                let s = u.sinh();
                let v = amplitude / s;
                (v, -amplitude * u.cosh() / (s * s * scale))
            }
            Profile::Product { factors } => {
                let mut v = 1.0;
                let mut d = 0.0;
                for f in factors {
                    let (fv, fd) = f.eval_d(x);
                    d = d * fv + v * fd;
                    v *= fv;
                }
                (v, d)
            }
            Profile::Power { base, exponent } => {
                let (b, db) = base.eval_d(x);
                let e = *exponent;
                if e.fract() == 0.0 && e.abs() < 64.0 {
                    let k = e as i32;
                    (b.powi(k), e * b.powi(k - 1) * db)
                } else {
                    (b.powf(e), e * b.powf(e - 1.0) * db)
                }
            }
            Profile::Scaled { factor, base } => {
                let (b, db) = base.eval_d(x);
                (factor * b, factor * db)
            }
            Profile::Tabulated { xs, ys } => pchip(xs, ys, x),
        }
    }
}

fn secant(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
}

/// Fritsch–Carlson style slope at node `i`.
fn node_slope(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let n = xs.len();
    if i == 0 {
        return secant(xs, ys, 0);
    }
    if i == n - 1 {
        return secant(xs, ys, n - 2);
    }
    let d0 = secant(xs, ys, i - 1);
    let d1 = secant(xs, ys, i);
    if d0 * d1 <= 0.0 {
        return 0.0;
    }
    let h0 = xs[i] - xs[i - 1];
    let h1 = xs[i + 1] - xs[i];
    let w1 = 2.0 * h1 + h0;
    let w2 = h1 + 2.0 * h0;
    (w1 + w2) / (w1 / d0 + w2 / d1)
}

fn pchip(xs: &[f64], ys: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    if x <= xs[0] {
        return (ys[0], if x == xs[0] { node_slope(xs, ys, 0) } else { 0.0 });
    }
    if x >= xs[n - 1] {
        return (ys[n - 1], if x == xs[n - 1] { node_slope(xs, ys, n - 1) } else { 0.0 });
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (m0, m1) = (node_slope(xs, ys, i) * h, node_slope(xs, ys, i + 1) * h);
    let (y0, y1) = (ys[i], ys[i + 1]);
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
    let dv = (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * m1;
    (v, dv / h)
}
