//! Time series of complex correlators with provenance metadata.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceTag {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "perturbative-lowT")]
    PerturbativeLowT,
    #[serde(rename = "perturbative-eps")]
    PerturbativeEps,
    #[serde(rename = "highT")]
    HighT,
    #[serde(rename = "matsubara")]
    Matsubara,
    #[serde(rename = "chain-discrete")]
    ChainDiscrete,
    #[serde(rename = "chain-continuum")]
    ChainContinuum,
    #[serde(rename = "chain-spectral")]
    ChainSpectral,
    #[serde(rename = "harmonic")]
    Harmonic,
}

impl SourceTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceTag::Exact => "exact",
            SourceTag::PerturbativeLowT => "perturbative-lowT",
            SourceTag::PerturbativeEps => "perturbative-eps",
            SourceTag::HighT => "highT",
            SourceTag::Matsubara => "matsubara",
            SourceTag::ChainDiscrete => "chain-discrete",
            SourceTag::ChainContinuum => "chain-continuum",
            SourceTag::ChainSpectral => "chain-spectral",
            SourceTag::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub source: SourceTag,
    /// Parameter echo, in insertion order.
    pub params: Vec<(String, f64)>,
    /// Validity-window and cutoff warnings. Never fatal.
    pub flags: Vec<String>,
}

impl SeriesMeta {
    pub fn new(source: SourceTag) -> Self {
        SeriesMeta {
            source,
            params: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub meta: SeriesMeta,
}

impl CorrelationSeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, meta: SeriesMeta) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param("values", "length differs from times"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        Ok(CorrelationSeries { times, values, meta })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes `# source=... k=v ...`, any flags, then `t,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        write!(s, "# source={}", self.meta.source.as_str()).unwrap();
        for (k, v) in &self.meta.params {
            write!(s, " {k}={v}").unwrap();
        }
        s.push('\n');
        for f in &self.meta.flags {
            writeln!(s, "# flag: {f}").unwrap();
        }
        s.push_str("t,re,im\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(s, "{t:.12e},{:.12e},{:.12e}", v.re, v.im).unwrap();
        }
        s
    }

    /// Relative L2 distance `‖self − other‖₂ / ‖other‖₂` on a shared grid.
    pub fn rel_l2_distance(&self, other: &CorrelationSeries) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
