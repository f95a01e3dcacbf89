//! Sharp embedding constants and the identities around them.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::norms::{self, NormReport, WindowFamily};
use crate::quad::{adaptive, Rule};
use crate::spectral::{self, require_zero_mean, Multiplier};

pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::NonPositiveArgument(x));
    }
    Ok(libm::tgamma(x))
}

fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn check_alpha(n: usize, alpha: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", format!("{n} must be at least 2")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// `int_w^inf x^{-1-2a} cos x dx` for `w >= 2 pi`, period by period up to
/// `2 pi periods` plus the integration-by-parts tail `beta X^{-beta-1}`.
fn cosine_tail(w: f64, alpha: f64, periods: usize) -> f64 {
    let beta = 1.0 + 2.0 * alpha;
    let f = |x: f64| x.powf(-beta) * x.cos();
    let first = (w / (2.0 * PI)).ceil() * 2.0 * PI;
    let end = 2.0 * PI * (periods as f64).max(first / (2.0 * PI) + 1.0);
    let mut acc = adaptive(f, w, first, 1e-16, 1e-14, 200).value;
    let mut a = first;
    while a < end {
        acc += adaptive(f, a, a + 2.0 * PI, 1e-17, 1e-14, 50).value;
        a += 2.0 * PI;
    }
    acc + beta * end.powf(-beta - 1.0)
}

/// `int_1^inf 4 sin^2(pi u rho) rho^{-1-2a} d rho`.
fn outer_radial(u: f64, alpha: f64, periods: usize) -> f64 {
    let w = 2.0 * PI * u;
    if w == 0.0 {
        return 0.0;
    }
    let two_pi = 2.0 * PI;
    if w >= two_pi {
        return 1.0 / alpha - 2.0 * w.powf(2.0 * alpha) * cosine_tail(w, alpha, periods);
    }
    // below one period: cos x = 1 - (1 - cos x) avoids cancelling two large terms
    let g = adaptive(
        |x: f64| x.powf(-1.0 - 2.0 * alpha) * (1.0 - x.cos()),
        w,
        two_pi,
        1e-16,
        1e-14,
        400,
    )
    .value;
    let tail = cosine_tail(two_pi, alpha, periods);
    (w / two_pi).powf(2.0 * alpha) / alpha + 2.0 * w.powf(2.0 * alpha) * (g - tail)
}

/// `int_0^1 4 sin^2(pi u rho) rho^{-1-2a} d rho`, with `rho^{1-2a}` folded
/// into a Gauss–Jacobi rule.
fn inner_radial(u: f64, rule: &Rule) -> f64 {
    rule.integrate(|rho| {
        let s = (PI * u * rho).sin();
        4.0 * s * s / (rho * rho)
    })
}

fn c_alpha_at(n: usize, alpha: f64, level: usize) -> (f64, f64) {
    let rule = Rule::power_weight(24 * level, 1.0 - 2.0 * alpha, 1.0).expect("valid rule");
    let periods = 1000 * level;
    // y_1 = rho cos(theta); dy = rho^{n-1} |S^{n-2}| sin^{n-2}(theta) d rho d theta
    let radial = |theta: f64| {
        let u = theta.cos().abs();
        let s = theta.sin().powi(n as i32 - 2);
        s * (inner_radial(u, &rule) + outer_radial(u, alpha, periods))
    };
    let half = adaptive(radial, 0.0, PI / 2.0, 1e-13, 1e-12 / level as f64, 400 * level);
    let sphere = if n == 2 { 2.0 } else { sphere_area(n - 1) };
    (2.0 * sphere * half.value, 2.0 * sphere * half.error)
}

/// `C(n, alpha) = int_{R^n} |e^{-2 pi i y_1} - 1|^2 |y|^{-n-2 alpha} dy`.
///
/// Radial integral split at `|y| = 1`; the error estimate is the change
/// under doubled resolution plus the angular quadrature estimate.
pub fn c_alpha_integral(n: usize, alpha: f64) -> Result<Estimate> {
    check_alpha(n, alpha)?;
    type Cache = Mutex<HashMap<(usize, u64), Estimate>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let key = (n, alpha.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(*e);
    }
    let (coarse, _) = c_alpha_at(n, alpha, 1);
    let (fine, angular) = c_alpha_at(n, alpha, 2);
    let est = Estimate {
        value: fine,
        error: (fine - coarse).abs() + angular,
    };
    cache.lock().expect("cache poisoned").insert(key, est);
    Ok(est)
}

/// C(n, alpha) at a given quadrature level (1 = default coarse pass).
pub fn c_alpha_integral_at(n: usize, alpha: f64, level: usize) -> Result<f64> {
    check_alpha(n, alpha)?;
    if level == 0 {
        return Err(Error::param("level", "must be positive"));
    }
    Ok(c_alpha_at(n, alpha, level).0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub n: usize,
    pub alpha: f64,
    /// `Gamma((n - 2 alpha)/2) / Gamma((n + 2 alpha)/2)`
    pub gamma_ratio: f64,
    /// `(Gamma(n) / Gamma(n/2))^{alpha/n}`
    pub gamma_power: f64,
    pub c_alpha: f64,
    pub c_alpha_error: f64,
    pub tau: f64,
    /// `8 pi^2 Gamma(2 - 2 alpha) / (4 pi)^{2 - 2 alpha}`
    pub energy_factor: f64,
    /// `tau * energy_factor`, the constant of the Hardy–Littlewood–Sobolev step.
    pub hls_factor: f64,
    /// `(hls_factor / C)^{1/2}`: best constant of `||f||_q <= c ||f||_{L^2_alpha dot}`.
    pub constant: f64,
    /// The closed form `gamma_ratio^{1/2} gamma_power C^{-1/2}`.
    pub displayed: f64,
    /// `constant / displayed`, equal to `pi^{alpha/2}`.
    pub discrepancy: f64,
}

pub fn tau(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    2f64.powf(1.0 - 4.0 * alpha) * gamma((nf - 2.0 * alpha) / 2.0)
        / (PI.powf(alpha) * gamma(2.0 * (1.0 - alpha)) * gamma((nf + 2.0 * alpha) / 2.0))
        * (gamma(nf) / gamma(nf / 2.0)).powf(2.0 * alpha / nf)
}

pub fn energy_factor(alpha: f64) -> f64 {
    8.0 * PI * PI * gamma(2.0 * (1.0 - alpha)) / (4.0 * PI).powf(2.0 * (1.0 - alpha))
}

pub fn sharp_sobolev_constant(n: usize, alpha: f64) -> Result<ConstantReport> {
    check_alpha(n, alpha)?;
    let nf = n as f64;
    if nf <= 2.0 * alpha {
        return Err(Error::param("alpha", "need n > 2 alpha"));
    }
    let c = c_alpha_integral(n, alpha)?;
    let gamma_ratio = gamma_fn((nf - 2.0 * alpha) / 2.0)? / gamma_fn((nf + 2.0 * alpha) / 2.0)?;
    let gamma_power = (gamma_fn(nf)? / gamma_fn(nf / 2.0)?).powf(alpha / nf);
    let tau = tau(n, alpha);
    let energy = energy_factor(alpha);
    let hls = tau * energy;
    let constant = (hls / c.value).sqrt();
    let displayed = gamma_ratio.sqrt() * gamma_power / c.value.sqrt();
    Ok(ConstantReport {
        n,
        alpha,
        gamma_ratio,
        gamma_power,
        c_alpha: c.value,
        c_alpha_error: c.error,
        tau,
        energy_factor: energy,
        hls_factor: hls,
        constant,
        displayed,
        discrepancy: constant / displayed,
    })
}

/// CSV table of [`sharp_sobolev_constant`] over a parameter grid.
pub fn constants_table_csv(ns: &[usize], alphas: &[f64]) -> Result<String> {
    let mut out = String::from("n,alpha,c_alpha,c_alpha_error,tau,constant,displayed,discrepancy\n");
    for &n in ns {
        for &a in alphas {
            let r = sharp_sobolev_constant(n, a)?;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.n, r.alpha, r.c_alpha, r.c_alpha_error, r.tau, r.constant, r.displayed, r.discrepancy
            );
        }
    }
    Ok(out)
}

/// `K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt`
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    let t_max = (1.0 + 745.0 / x).acosh() + 1.0;
    adaptive(
        |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh(),
        0.0,
        t_max,
        0.0,
        1e-14,
        500,
    )
    .value
}

/// `int_{-inf}^{inf} g(u) du` for integrands decaying at both ends, truncated
/// to `[lo, hi]` and split into `panels` starting panels.
fn line_integral(g: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> Estimate {
    let width = (hi - lo) / panels as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for i in 0..panels {
        let a = lo + i as f64 * width;
        let r = adaptive(&g, a, a + width, 1e-300, 1e-13, 200);
        value += r.value;
        error += r.error;
    }
    Estimate { value, error }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// Relative quadrature error estimate of the ratio.
    pub error: f64,
}

fn lebesgue_exponent(n: usize, alpha: f64) -> f64 {
    2.0 * n as f64 / (n as f64 - 2.0 * alpha)
}

/// `||f||_q / ||f||_{L^2_alpha dot}` for `f = (1 + |x|^2)^{(2 alpha - n)/2}` on `R^n`.
///
/// `resolution` is the number of starting panels of each radial integral.
pub fn extremal_ratio(n: usize, alpha: f64, resolution: usize) -> Result<RatioReport> {
    check_alpha(n, alpha)?;
    let nf = n as f64;
    if nf <= 2.0 * alpha {
        return Err(Error::param("alpha", "need n > 2 alpha"));
    }
    let panels = resolution.max(1);
    let q = lebesgue_exponent(n, alpha);
    let area = sphere_area(n);
    // |f|^q = (1 + r^2)^{-n}; r = e^u
    let num = line_integral(
        |u: f64| {
            let r = u.exp();
            r.powf(nf) * (1.0 + r * r).powf(-nf)
        },
        -60.0,
        60.0,
        panels,
    );
    let numerator = (area * num.value).powf(1.0 / q);
    // f_hat(xi) = 2 pi^s / Gamma(s) |xi|^{-alpha} K_alpha(2 pi |xi|), s = (n - 2 alpha)/2
    let s = (nf - 2.0 * alpha) / 2.0;
    let prefactor = 4.0 * PI.powf(2.0 * s) / gamma(s).powi(2);
    let profile = line_integral(
        |u: f64| {
            let rho = u.exp();
            let k = bessel_k(alpha, 2.0 * PI * rho);
            rho.powf(nf) * k * k
        },
        -60.0 / (nf - 2.0 * alpha),
        4.0,
        panels,
    );
    let c = c_alpha_integral(n, alpha)?;
    let denominator = (c.value * area * prefactor * profile.value).sqrt();
    let error = num.error / num.value / q
        + 0.5 * (profile.error / profile.value + c.error / c.value);
    Ok(RatioReport {
        ratio: numerator / denominator,
        numerator,
        denominator,
        error,
    })
}

/// Same ratio for the Gaussian `e^{-pi |x|^2}`, whose transform is itself.
pub fn gaussian_ratio(n: usize, alpha: f64) -> Result<RatioReport> {
    check_alpha(n, alpha)?;
    let nf = n as f64;
    let q = lebesgue_exponent(n, alpha);
    let area = sphere_area(n);
    let num = line_integral(
        |u: f64| {
            let r = u.exp();
            r.powf(nf) * (-PI * q * r * r).exp()
        },
        -60.0,
        4.0,
        16,
    );
    let numerator = (area * num.value).powf(1.0 / q);
    let energy = line_integral(
        |u: f64| {
            let rho = u.exp();
            rho.powf(2.0 * alpha + nf) * (-2.0 * PI * rho * rho).exp()
        },
        -60.0 / (nf + 2.0 * alpha),
        4.0,
        16,
    );
    let c = c_alpha_integral(n, alpha)?;
    let denominator = (c.value * area * energy.value).sqrt();
    Ok(RatioReport {
        ratio: numerator / denominator,
        numerator,
        denominator,
        error: num.error / num.value + energy.error / energy.value + c.error / c.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentity {
    /// `int_0^inf ||grad_{t,x} e^{-t sqrt(-Delta)} f||_2^2 t^{1 - 2 alpha} dt`
    pub lhs: f64,
    /// `8 pi^2 Gamma(2 - 2 alpha) / (4 pi)^{2 - 2 alpha} int |xi|^{2 alpha} |f_hat|^2`
    pub rhs: f64,
    /// The spatial gradient alone; half of `lhs`.
    pub spatial_lhs: f64,
}

impl EnergyIdentity {
    pub fn relative_gap(&self) -> Result<f64> {
        if self.rhs == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((self.lhs - self.rhs).abs() / self.rhs)
    }
}

/// Time rule on `(0, inf)` for the weight `t^{1 - 2 alpha}`: a Gauss–Jacobi
/// panel on `(0, t0)` and Gauss–Legendre panels on `[t0 2^j, t0 2^{j+1}]`
/// up to `t_max`.
fn energy_time_rule(alpha: f64, t0: f64, t_max: f64, nodes: usize) -> Result<Rule> {
    let mut rule = Rule::power_weight(nodes, 1.0 - 2.0 * alpha, t0)?;
    let mut a = t0;
    while a < t_max {
        let panel = Rule::legendre_on(nodes, a, 2.0 * a)?;
        for (t, w) in panel.nodes.iter().zip(&panel.weights) {
            rule.nodes.push(*t);
            rule.weights.push(w * t.powf(1.0 - 2.0 * alpha));
        }
        a *= 2.0;
    }
    Ok(rule)
}

/// Both sides of the Poisson energy identity for a band-limited field.
///
/// The left side is evaluated on the field: gradients of the Poisson
/// extension are formed spectrally, their `L^2` norms summed on the grid and
/// integrated in time with `nodes`-point panels.
pub fn poisson_energy_identity(f: &ScalarField, alpha: f64, nodes: usize) -> Result<EnergyIdentity> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let grid = *f.grid();
    let spec = f.forward();
    let mut kmin = f64::INFINITY;
    let mut kmax: f64 = 0.0;
    let mut rhs_sum = 0.0;
    for (flat, c) in spec.coeffs().iter().enumerate() {
        let xi = grid.frequency(flat);
        let k = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if k > 0.0 && c.norm() > 0.0 {
            kmin = kmin.min(k);
            kmax = kmax.max(k);
            rhs_sum += k.powf(2.0 * alpha) * c.norm_sqr();
        }
    }
    if kmax == 0.0 {
        return Ok(EnergyIdentity {
            lhs: 0.0,
            rhs: 0.0,
            spatial_lhs: 0.0,
        });
    }
    let rhs = energy_factor(alpha) * rhs_sum / grid.volume();
    // e^{-4 pi kmin t} < 1e-18 beyond t_max
    let t0 = 0.25 / (4.0 * PI * kmax);
    let t_max = 42.0 / (4.0 * PI * kmin);
    let rule = energy_time_rule(alpha, t0, t_max, nodes)?;
    let dim = grid.dim();
    let mut lhs = 0.0;
    let mut spatial = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let poisson = spec.map(|xi, c| c * Multiplier::Poisson(t).symbol(xi));
        let dt = spectral::apply_spectral(&spec, &Multiplier::PoissonTimeDerivative(t))?
            .inverse()
            .l2_norm()
            .powi(2);
        let mut dx = 0.0;
        for j in 0..dim {
            dx += poisson
                .map(|xi, c| c * Complex64::new(0.0, 2.0 * PI * xi[j]))
                .inverse()
                .l2_norm()
                .powi(2);
        }
        lhs += w * (dt + dx);
        spatial += w * dx;
    }
    Ok(EnergyIdentity {
        lhs,
        rhs,
        spatial_lhs: spatial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub ratio: f64,
    pub bound: f64,
    pub numerator: f64,
    pub denominator: f64,
}

/// `sqrt(n^{(n + 2 alpha)/2} / 2)`
pub fn bmo_bound(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (nf.powf((nf + 2.0 * alpha) / 2.0) / 2.0).sqrt()
}

/// `||f||_BMO / ||f||_{Q_alpha}` on one cube family, with the bound.
pub fn bmo_bound_check(f: &ScalarField, alpha: f64, cubes: &WindowFamily) -> Result<BoundCheck> {
    let q = norms::qalpha_norm(f, alpha, cubes)?.value;
    if q == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let b = norms::bmo_norm(f, cubes)?.value;
    Ok(BoundCheck {
        ratio: b / q,
        bound: bmo_bound(f.grid().dim(), alpha),
        numerator: b,
        denominator: q,
    })
}

/// `||(-Delta)^{alpha/2} f||_{L_{2, n - 2 alpha}} / ||f||_{Q_alpha}`.
pub fn isomorphism_check(f: &ScalarField, alpha: f64, cubes: &WindowFamily) -> Result<BoundCheck> {
    require_zero_mean(&f.forward())?;
    let q = norms::qalpha_norm(f, alpha, cubes)?.value;
    if q == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let g = spectral::fractional_laplacian(f, alpha)?;
    let m = norms::morrey_norm(&g, alpha, cubes)?.value;
    Ok(BoundCheck {
        ratio: m / q,
        bound: f64::NAN,
        numerator: m,
        denominator: q,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceRepresentation {
    pub components: Vec<ScalarField>,
    /// `||sum_k d_k f_k - f|| / ||f||`
    pub residual: f64,
}

/// `f_k = -d_k (-Delta)^{-1} f`, symbol `-2 pi i xi_k / (4 pi^2 |xi|^2)`,
/// so that `sum_k d_k f_k = f`.
pub fn divergence_representation(f: &ScalarField) -> Result<DivergenceRepresentation> {
    let spec = f.forward();
    require_zero_mean(&spec)?;
    let dim = f.grid().dim();
    let components: Vec<ScalarField> = (0..dim)
        .map(|k| {
            spec.map(|xi, c| {
                let n2: f64 = xi.iter().map(|x| x * x).sum();
                if n2 == 0.0 {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, -2.0 * PI * xi[k] / (4.0 * PI * PI * n2))
                }
            })
            .inverse()
        })
        .collect();
    let v = crate::field::VectorField::new(components.clone())?;
    let back = v.divergence();
    let norm = f.l2_norm();
    let residual = if norm == 0.0 {
        0.0
    } else {
        back.sub(f)?.l2_norm() / norm
    };
    Ok(DivergenceRepresentation {
        components,
        residual,
    })
}

/// Measured `c` in `||f||_{Q^{-1}_alpha} <= c sum_k ||f_k||_{Q_alpha}`.
pub fn divergence_bound_ratio(
    f: &ScalarField,
    alpha: f64,
    balls: &WindowFamily,
    cubes: &WindowFamily,
    nodes: usize,
) -> Result<BoundCheck> {
    let rep = divergence_representation(f)?;
    let lhs: NormReport = norms::qinv_norm(f, alpha, f64::INFINITY, balls, nodes)?;
    let mut rhs = 0.0;
    for c in &rep.components {
        rhs += norms::qalpha_norm(c, alpha, cubes)?.value;
    }
    if rhs == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(BoundCheck {
        ratio: lhs.value / rhs,
        bound: f64::NAN,
        numerator: lhs.value,
        denominator: rhs,
    })
}
