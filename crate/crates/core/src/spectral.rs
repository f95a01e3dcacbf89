//! Fourier multipliers: fractional Laplacian, heat and Poisson semigroups,
//! Riesz transforms and the Leray projection.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, SpectralField, VectorField};

/// Relative size of the zero mode below which a field counts as mean-free.
pub const ZERO_MODE_TOL: f64 = 1e-12;

pub type Symbol = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Multiplier {
    /// `(2 pi |xi|)^beta`
    FractionalLaplacian(f64),
    /// `exp(-4 pi^2 t |xi|^2)`
    Heat(f64),
    /// `exp(-2 pi t |xi|)`
    Poisson(f64),
    /// `-2 pi |xi| exp(-2 pi t |xi|)`
    PoissonTimeDerivative(f64),
    /// `i xi_j / |xi|` with `j` counted from 1.
    Riesz(usize),
    /// Arbitrary symbol, evaluated at every mode including `xi = 0`.
    Custom(Symbol),
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::FractionalLaplacian(b) => write!(f, "FractionalLaplacian({b})"),
            Multiplier::Heat(t) => write!(f, "Heat({t})"),
            Multiplier::Poisson(t) => write!(f, "Poisson({t})"),
            Multiplier::PoissonTimeDerivative(t) => write!(f, "PoissonTimeDerivative({t})"),
            Multiplier::Riesz(j) => write!(f, "Riesz({j})"),
            Multiplier::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

enum ZeroMode {
    Keep,
    Zero,
    Singular,
}

impl Multiplier {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match *self {
            Multiplier::Heat(t) | Multiplier::Poisson(t) | Multiplier::PoissonTimeDerivative(t) => {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::param("t", format!("{t} must be finite and >= 0")));
                }
            }
            Multiplier::FractionalLaplacian(b) if !b.is_finite() => {
                return Err(Error::param("beta", "must be finite"));
            }
            Multiplier::Riesz(j) if j == 0 || j > grid.dim() => {
                return Err(Error::param("j", format!("{j} not in 1..={}", grid.dim())));
            }
            _ => {}
        }
        Ok(())
    }

    fn zero_mode(&self) -> ZeroMode {
        match *self {
            Multiplier::FractionalLaplacian(b) if b > 0.0 => ZeroMode::Zero,
            Multiplier::FractionalLaplacian(b) if b < 0.0 => ZeroMode::Singular,
            Multiplier::Riesz(_) => ZeroMode::Singular,
            Multiplier::PoissonTimeDerivative(_) => ZeroMode::Zero,
            _ => ZeroMode::Keep,
        }
    }

    /// Symbol value at a nonzero frequency (and at zero for `Keep` kinds).
    pub fn symbol(&self, xi: &[f64]) -> Complex64 {
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        match self {
            Multiplier::FractionalLaplacian(b) => {
                if *b == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else if norm == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new((2.0 * PI * norm).powf(*b), 0.0)
                }
            }
            Multiplier::Heat(t) => Complex64::new((-4.0 * PI * PI * t * norm * norm).exp(), 0.0),
            Multiplier::Poisson(t) => Complex64::new((-2.0 * PI * t * norm).exp(), 0.0),
            Multiplier::PoissonTimeDerivative(t) => {
                Complex64::new(-2.0 * PI * norm * (-2.0 * PI * t * norm).exp(), 0.0)
            }
            Multiplier::Riesz(j) => {
                if norm == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, xi[j - 1] / norm)
                }
            }
            Multiplier::Custom(m) => m(xi),
        }
    }
}

/// Fails with `ZeroModeSingular` when the mean is not negligible.
pub fn require_zero_mean(spec: &SpectralField) -> Result<()> {
    let total = spec.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mean = spec.zero_mode();
    if mean > ZERO_MODE_TOL * total {
        return Err(Error::ZeroModeSingular { mean });
    }
    Ok(())
}

pub fn apply_spectral(spec: &SpectralField, m: &Multiplier) -> Result<SpectralField> {
    m.validate(spec.grid())?;
    let zero = m.zero_mode();
    if let ZeroMode::Singular = zero {
        require_zero_mean(spec)?;
    }
    let mut out = spec.map(|xi, c| c * m.symbol(xi));
    if !matches!(zero, ZeroMode::Keep) {
        out.coeffs_mut()[0] = Complex64::default();
    }
    Ok(out)
}

pub fn apply_multiplier(f: &ScalarField, m: &Multiplier) -> Result<ScalarField> {
    Ok(apply_spectral(&f.forward(), m)?.inverse())
}

pub fn heat_semigroup(f: &ScalarField, t: f64) -> Result<ScalarField> {
    apply_multiplier(f, &Multiplier::Heat(t))
}

pub fn poisson_semigroup(f: &ScalarField, t: f64) -> Result<ScalarField> {
    apply_multiplier(f, &Multiplier::Poisson(t))
}

pub fn fractional_laplacian(f: &ScalarField, beta: f64) -> Result<ScalarField> {
    apply_multiplier(f, &Multiplier::FractionalLaplacian(beta))
}

/// Riesz transform along axis `j` (from 1).
pub fn riesz(f: &ScalarField, j: usize) -> Result<ScalarField> {
    apply_multiplier(f, &Multiplier::Riesz(j))
}

/// Applies `delta_jk - xi_j xi_k / |xi|^2` mode by mode; the zero mode passes.
///
/// With `R_j = i xi_j / |xi|` this is `delta_jk + R_j R_k`.
pub fn leray_spectral(components: &mut [SpectralField]) {
    let grid = *components[0].grid();
    let dim = grid.dim();
    for flat in 1..grid.len() {
        let xi = grid.frequency(flat);
        let norm2: f64 = xi[..dim].iter().map(|x| x * x).sum();
        let mut dot = Complex64::default();
        for j in 0..dim {
            dot += components[j].coeffs()[flat] * xi[j];
        }
        let dot = dot / norm2;
        for j in 0..dim {
            components[j].coeffs_mut()[flat] -= dot * xi[j];
        }
    }
}

pub fn leray_project(v: &VectorField) -> VectorField {
    let mut spec: Vec<SpectralField> = v.components().iter().map(|c| c.forward()).collect();
    leray_spectral(&mut spec);
    VectorField::new(spec.iter().map(|s| s.inverse()).collect())
        .expect("components share the input grid")
}

/// A scalar field sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    times: Vec<f64>,
    slices: Vec<ScalarField>,
}

impl SpaceTimeField {
    pub fn new(times: Vec<f64>, slices: Vec<ScalarField>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if times.len() != slices.len() {
            return Err(Error::param(
                "slices",
                format!("{} times but {} slices", times.len(), slices.len()),
            ));
        }
        if times.windows(2).any(|p| p[0] >= p[1]) || times[0] < 0.0 {
            return Err(Error::param("times", "must be nonnegative and strictly increasing"));
        }
        let grid = *slices[0].grid();
        if slices.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, slices })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[ScalarField] {
        &self.slices
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn map_slices(&self, f: impl Fn(f64, &ScalarField) -> ScalarField) -> Self {
        Self {
            times: self.times.clone(),
            slices: self
                .times
                .iter()
                .zip(&self.slices)
                .map(|(&t, s)| f(t, s))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_slices(|_, s| s.scale(c))
    }

    /// Linear interpolation in time; clamps outside the stored range.
    pub fn at(&self, t: f64) -> ScalarField {
        let times = &self.times;
        if t <= times[0] {
            return self.slices[0].clone();
        }
        if t >= times[times.len() - 1] {
            return self.slices[times.len() - 1].clone();
        }
        let i = times.partition_point(|&s| s <= t) - 1;
        let w = (t - times[i]) / (times[i + 1] - times[i]);
        self.slices[i]
            .zip_with(&self.slices[i + 1], |a, b| a * (1.0 - w) + b * w)
            .expect("slices share a grid")
    }
}

/// `e^{t Delta} f` at each requested time.
pub fn heat_extension(f: &ScalarField, times: &[f64]) -> Result<SpaceTimeField> {
    let spec = f.forward();
    let slices = times
        .iter()
        .map(|&t| Ok(apply_spectral(&spec, &Multiplier::Heat(t))?.inverse()))
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(times.to_vec(), slices)
}

/// Weights for `int_0^dt e^{-c (dt - s)} w(s) ds` with `w` linear between
/// `w(0) = a` and `w(dt) = b`: the integral is `dt (g1 a + g2 b)`.
///
/// Returns `(e^{-x}, g1, g2)` for `x = c dt >= 0`, with
/// `g1 = (1 - e^{-x} - x e^{-x}) / x^2` and `g2 = (x - 1 + e^{-x}) / x^2`.
pub fn duhamel_weights(x: f64) -> (f64, f64, f64) {
    let e = (-x).exp();
    if x < 1e-3 {
        let g1 = 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
        let g2 = 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
        return (e, g1, g2);
    }
    let one_minus_e = -(-x).exp_m1();
    let g1 = (one_minus_e - x * e) / (x * x);
    let g2 = (x - one_minus_e) / (x * x);
    (e, g1, g2)
}
