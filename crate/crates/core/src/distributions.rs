//! The four distribution families used by the generator: categorical,
//! uniform, Bernoulli and triangular.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangular distribution on `[a, b]` with mode `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangularParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = Self { a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c } = *self;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "triangular parameters must be finite (a={a}, b={b}, c={c})"
            )));
        }
        if a > c || c > b {
            return Err(Error::ParameterDomain(format!(
                "triangular parameters require a <= c <= b (a={a}, b={b}, c={c})"
            )));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        (self.a + self.b + self.c) / 3.0
    }

    /// Piecewise density. A degenerate `a == b` support is a point mass and
    /// reports an infinite density at `c`.
    pub fn pdf(&self, x: f64) -> f64 {
        let Self { a, b, c } = *self;
        if x < a || x > b {
            0.0
        } else if x == c {
            2.0 / (b - a)
        } else if x < c {
            2.0 * (x - a) / ((b - a) * (c - a))
        } else {
            2.0 * (b - x) / ((b - a) * (b - c))
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let Self { a, b, c } = *self;
        if x < a {
            0.0
        } else if x >= b {
            1.0
        } else if x <= c {
            (x - a).powi(2) / ((b - a) * (c - a))
        } else {
            1.0 - (b - x).powi(2) / ((b - a) * (b - c))
        }
    }

    /// Inverse CDF for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let Self { a, b, c } = *self;
        if b == a {
            return a;
        }
        let split = (c - a) / (b - a);
        let x = if u < split {
            a + (u * (b - a) * (c - a)).sqrt()
        } else {
            b - ((1.0 - u) * (b - a) * (b - c)).sqrt()
        };
        x.clamp(a, b)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

pub fn triangular_pdf(x: f64, params: TriangularParams) -> Result<f64> {
    params.validate()?;
    Ok(params.pdf(x))
}

pub fn triangular_sample<R: Rng + ?Sized>(rng: &mut R, params: TriangularParams) -> Result<f64> {
    params.validate()?;
    Ok(params.sample(rng))
}

/// Triangular parameters that may wrap around a modulus (clock hours).
///
/// `a > b` marks a support that crosses the modulus boundary, e.g. the night
/// phase `(20h, 7h)` with mode `0h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrappedTriangular {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl WrappedTriangular {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn wraps(&self) -> bool {
        self.a > self.b
    }

    /// The equivalent non-wrapping parameters on `[a, b + modulus]`.
    pub fn unwrapped(&self, modulus: f64) -> Result<TriangularParams> {
        if !(modulus > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "modulus must be positive, got {modulus}"
            )));
        }
        if !self.wraps() {
            return TriangularParams::new(self.a, self.b, self.c);
        }
        let b = self.b + modulus;
        let c = if self.c < self.a { self.c + modulus } else { self.c };
        TriangularParams::new(self.a, b, c)
    }

    /// Whether `x` (already reduced modulo `modulus`) lies in the support.
    pub fn contains(&self, x: f64) -> bool {
        if self.wraps() {
            x >= self.a || x <= self.b
        } else {
            x >= self.a && x <= self.b
        }
    }
}

pub fn triangular_sample_wrapped<R: Rng + ?Sized>(rng: &mut R, params: WrappedTriangular, modulus: f64) -> Result<f64> {
    let shifted = params.unwrapped(modulus)?;
    let x = shifted.sample(rng);
    if !params.wraps() {
        return Ok(x);
    }
    let r = x.rem_euclid(modulus);
    // rem_euclid can round up to exactly `modulus` for tiny negative inputs
    Ok(if r >= modulus { 0.0 } else { r })
}

/// Categorical distribution over labels with non-negative weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalParams<T> {
    labels: Vec<T>,
    weights: Vec<f64>,
    total: f64,
}

impl<T> CategoricalParams<T> {
    pub fn new(labels: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::ParameterDomain(format!(
                "{} labels but {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::ParameterDomain(format!(
                "categorical weight {w} is not a non-negative real"
            )));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ParameterDomain(
                "categorical weights must contain at least one positive entry".into(),
            ));
        }
        Ok(Self { labels, weights, total })
    }

    pub fn uniform(labels: Vec<T>) -> Result<Self> {
        let weights = vec![1.0; labels.len()];
        Self::new(labels, weights)
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probability_at(&self, index: usize) -> f64 {
        self.weights[index] / self.total
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total;
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                last_positive = i;
                if u < acc {
                    return i;
                }
            }
        }
        last_positive
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &T {
        &self.labels[self.sample_index(rng)]
    }
}

impl<T: PartialEq> CategoricalParams<T> {
    pub fn probability(&self, label: &T) -> f64 {
        self.labels
            .iter()
            .position(|l| l == label)
            .map_or(0.0, |i| self.probability_at(i))
    }
}

pub fn categorical_sample<'a, T, R: Rng + ?Sized>(rng: &mut R, params: &'a CategoricalParams<T>) -> &'a T {
    params.sample(rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliParam {
    pub p: f64,
}

impl BernoulliParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterDomain(format!(
                "Bernoulli probability {p} outside [0, 1]"
            )));
        }
        Ok(Self { p })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.random::<f64>() < self.p
    }
}

/// Uniform distribution on a finite interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformRange {
    pub lo: f64,
    pub hi: f64,
}

impl UniformRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::Config(format!(
                "range '{name}' must satisfy lo <= hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Draw from `[lo, hi)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }

    /// Draw from `(lo, hi]`.
    pub fn sample_upper_closed<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.hi - (self.hi - self.lo) * rng.random::<f64>()
    }
}

// Serialize ranges as two-element arrays in config files.
impl Serialize for UniformRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniformRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(d)?;
        Ok(Self { lo, hi })
    }
}
