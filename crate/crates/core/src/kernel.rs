//! Schur kernel bounds and the two space-time inequalities behind the
//! bilinear estimate.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, SpectralField};
use crate::gen::{band_limited_with, rng};
use crate::norms::{carleson_l1, check_open_alpha, WindowFamily};
use crate::quad::{adaptive, Rule};
use crate::spectral::{duhamel_weights, SpaceTimeField};

/// `K(s, t) = 1_{s <= t} (s / t)^{alpha / 2} |zeta|^2 e^{-(t - s) |zeta|^2}`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurKernelSpec {
    alpha: f64,
    zeta: f64,
}

impl SchurKernelSpec {
    pub fn new(alpha: f64, zeta: f64) -> Result<Self> {
        check_open_alpha(alpha)?;
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::param("zeta", format!("{zeta} must be finite and positive")));
        }
        Ok(Self { alpha, zeta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn kernel(&self, s: f64, t: f64) -> f64 {
        if s < 0.0 || s > t {
            return 0.0;
        }
        let z2 = self.zeta * self.zeta;
        (s / t).powf(self.alpha / 2.0) * z2 * (-(t - s) * z2).exp()
    }
}

const SCHUR_TOL: f64 = 1e-10;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be finite and positive")))
    }
}

/// `int_0^t K(s, t) ds`
pub fn schur_row_sum(spec: &SchurKernelSpec, t: f64) -> Result<f64> {
    positive("t", t)?;
    let z2 = spec.zeta * spec.zeta;
    let half = spec.alpha / 2.0;
    // u = t - s puts the exponential peak at the left end
    let v = adaptive(
        |u| (1.0 - u / t).max(0.0).powf(half) * z2 * (-u * z2).exp(),
        0.0,
        t,
        SCHUR_TOL,
        1e-13,
        4000,
    );
    Ok(v.value)
}

/// `int_s^inf K(s, t) dt`: quadrature up to `s + 40 / |zeta|^2` plus the
/// bound `e^{-40} (s / (s + 40 / |zeta|^2))^{alpha / 2}` on the rest.
pub fn schur_col_sum(spec: &SchurKernelSpec, s: f64) -> Result<f64> {
    positive("s", s)?;
    let z2 = spec.zeta * spec.zeta;
    let half = spec.alpha / 2.0;
    // v = (t - s) |zeta|^2
    let ratio = |v: f64| (s / (s + v / z2)).powf(half);
    let body = adaptive(|v| ratio(v) * (-v).exp(), 0.0, 40.0, SCHUR_TOL, 1e-13, 4000);
    Ok(body.value + (-40f64).exp() * ratio(40.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurSample {
    pub alpha: f64,
    pub zeta: f64,
    /// `t` for row sums, `s` for column sums.
    pub point: f64,
    pub value: f64,
    pub bound: f64,
}

impl SchurSample {
    pub fn holds(&self, slack: f64) -> bool {
        self.value <= self.bound + slack
    }
}

/// `n` points from `10^lo` to `10^hi`, evenly spaced in the exponent.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![10f64.powf(lo)];
    }
    (0..n)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect()
}

/// The 10 x 10 x 10 sampling grid: `alpha` in `0.05..0.95`, `|zeta|` in
/// `1e-2..1e2` and times in `1e-3..1e3`.
pub fn default_schur_grid() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let alphas = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    (alphas, log_grid(-2.0, 2.0, 10), log_grid(-3.0, 3.0, 10))
}

fn sweep(
    alphas: &[f64],
    zetas: &[f64],
    points: &[f64],
    eval: impl Fn(&SchurKernelSpec, f64) -> Result<(f64, f64)> + Sync,
) -> Result<Vec<SchurSample>> {
    let mut jobs = Vec::with_capacity(alphas.len() * zetas.len() * points.len());
    for &a in alphas {
        for &z in zetas {
            for &p in points {
                jobs.push((a, z, p));
            }
        }
    }
    jobs.par_iter()
        .map(|&(alpha, zeta, point)| {
            let spec = SchurKernelSpec::new(alpha, zeta)?;
            let (value, bound) = eval(&spec, point)?;
            Ok(SchurSample {
                alpha,
                zeta,
                point,
                value,
                bound,
            })
        })
        .collect()
}

/// Row sums against `1 - e^{-t |zeta|^2}`.
pub fn schur_rows(alphas: &[f64], zetas: &[f64], ts: &[f64]) -> Result<Vec<SchurSample>> {
    sweep(alphas, zetas, ts, |spec, t| {
        let bound = -(-t * spec.zeta * spec.zeta).exp_m1();
        Ok((schur_row_sum(spec, t)?, bound))
    })
}

/// Column sums against 1.
pub fn schur_cols(alphas: &[f64], zetas: &[f64], ss: &[f64]) -> Result<Vec<SchurSample>> {
    sweep(alphas, zetas, ss, |spec, s| Ok((schur_col_sum(spec, s)?, 1.0)))
}

/// CSV with header `alpha,zeta,<point>,value,bound`.
pub fn schur_csv(samples: &[SchurSample], point: &str) -> String {
    let mut out = format!("alpha,zeta,{point},value,bound\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{},{}", s.alpha, s.zeta, s.point, s.value, s.bound);
    }
    out
}

/// Gauss–Jacobi nodes on `(0, T)` for the weight `t^{-alpha}`; trajectories
/// handed to the inequality checks live on these.
pub fn weighted_nodes(m: usize, alpha: f64, horizon: f64) -> Result<Rule> {
    check_open_alpha(alpha)?;
    Rule::power_weight(m, -alpha, horizon)
}

fn matching_rule(f: &SpaceTimeField, alpha: f64, horizon: f64) -> Result<Rule> {
    let rule = weighted_nodes(f.len(), alpha, horizon)?;
    let ok = rule
        .nodes
        .iter()
        .zip(f.times())
        .all(|(a, b)| (a - b).abs() <= 1e-12 * horizon);
    if !ok {
        return Err(Error::param(
            "times",
            format!("expected the {} weighted Gauss–Jacobi nodes on (0, {horizon})", f.len()),
        ));
    }
    Ok(rule)
}

fn spectra(f: &SpaceTimeField) -> Vec<SpectralField> {
    f.slices().par_iter().map(ScalarField::forward).collect()
}

fn mode_rates(grid: &Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|flat| {
            let xi = grid.frequency(flat);
            4.0 * PI * PI * xi.iter().map(|x| x * x).sum::<f64>()
        })
        .collect()
}

/// `A f(t_i) = int_0^{t_i} e^{(t_i - s) Delta} Delta f(s) ds` at every stored
/// node, in Fourier space.
///
/// `f` is linear in `s` between nodes and held at its first value on
/// `(0, t_0)`; each piece is integrated exactly against the exponential.
pub fn duhamel_laplacian(f: &SpaceTimeField) -> Vec<SpectralField> {
    let grid = *f.grid();
    let rates = mode_rates(&grid);
    let specs = spectra(f);
    let times = f.times();
    // acc = c int_0^t e^{-c (t - s)} f_hat(s) ds, mode by mode
    let mut acc: Vec<Complex64> = specs[0]
        .coeffs()
        .iter()
        .zip(&rates)
        .map(|(v, &c)| v * -(-c * times[0]).exp_m1())
        .collect();
    let mut out = Vec::with_capacity(times.len());
    out.push(negated(grid, &acc));
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        let (prev, next) = (specs[i - 1].coeffs(), specs[i].coeffs());
        acc.par_iter_mut().enumerate().for_each(|(k, a)| {
            let x = rates[k] * dt;
            let (e, g1, g2) = duhamel_weights(x);
            *a = *a * e + (prev[k] * g1 + next[k] * g2) * x;
        });
        out.push(negated(grid, &acc));
    }
    out
}

fn negated(grid: Grid, acc: &[Complex64]) -> SpectralField {
    SpectralField::new(grid, acc.iter().map(|v| -v).collect()).expect("sizes match")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, reported as 0 when both sides vanish.
    pub ratio: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// `int_0^T ||A f||^2 t^{-alpha} dt` against `int_0^T ||f||^2 t^{-alpha} dt`.
pub fn regularity_inequality(f: &SpaceTimeField, alpha: f64, horizon: f64) -> Result<InequalityReport> {
    let rule = matching_rule(f, alpha, horizon)?;
    let a = duhamel_laplacian(f);
    let lhs: f64 = rule.weights.iter().zip(&a).map(|(w, s)| w * s.energy()).sum();
    let rhs: f64 = rule
        .weights
        .iter()
        .zip(f.slices())
        .map(|(w, s)| w * s.l2_norm().powi(2))
        .sum();
    Ok(InequalityReport {
        lhs,
        rhs,
        ratio: ratio(lhs, rhs),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhamelCarlesonReport {
    /// `int_0^1 ||sqrt(-Delta) e^{t Delta} int_0^t f||^2 t^{-alpha} dt`
    pub lhs: f64,
    /// The window functional `C(f; alpha)`.
    pub c_functional: f64,
    /// `int_0^1 ||f||_{L^1} t^{-alpha} dt`
    pub rhs_l1: f64,
    /// `int_0^1 ||f||_{L^2}^2 t^{-alpha} dt`
    pub rhs_l2: f64,
    /// `lhs / (C rhs_l1)`, invariant under `f -> c f`.
    pub ratio: f64,
    /// `lhs / (C rhs_l2)`
    pub ratio_l2: f64,
    pub windows: usize,
}

/// Both sides of the `C(f; alpha)` estimate for `f` stored on the weighted
/// nodes of `(0, 1)`.
pub fn duhamel_carleson_inequality(
    f: &SpaceTimeField,
    alpha: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<DuhamelCarlesonReport> {
    let rule = matching_rule(f, alpha, 1.0)?;
    let grid = *f.grid();
    let rates = mode_rates(&grid);
    let specs = spectra(f);
    let times = f.times();
    // trapezoid running integral, f held at its first value on (0, t_0)
    let mut running: Vec<Complex64> = specs[0].coeffs().iter().map(|v| v * times[0]).collect();
    let mut lhs = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            let half = 0.5 * (times[i] - times[i - 1]);
            let (prev, next) = (specs[i - 1].coeffs(), specs[i].coeffs());
            for (k, r) in running.iter_mut().enumerate() {
                *r += (prev[k] + next[k]) * half;
            }
        }
        let t = times[i];
        let energy: f64 = running
            .iter()
            .zip(&rates)
            .map(|(v, &c)| c * (-2.0 * t * c).exp() * v.norm_sqr())
            .sum::<f64>()
            / grid.volume();
        lhs += rule.weights[i] * energy;
    }
    let (c_functional, windows) = carleson_l1(f, alpha, family, nodes)?;
    let weighted = |g: &dyn Fn(&ScalarField) -> f64| -> f64 {
        rule.weights.iter().zip(f.slices()).map(|(w, s)| w * g(s)).sum()
    };
    let rhs_l1 = weighted(&|s| s.l1_norm());
    let rhs_l2 = weighted(&|s| s.l2_norm().powi(2));
    Ok(DuhamelCarlesonReport {
        lhs,
        c_functional,
        rhs_l1,
        rhs_l2,
        ratio: ratio(lhs, c_functional * rhs_l1),
        ratio_l2: ratio(lhs, c_functional * rhs_l2),
        windows,
    })
}

/// Seeded trajectories `sum_q cos(2 pi w_q t / T + p_q) g_q(x)` with
/// band-limited `g_q`, on the weighted nodes of `(0, T)`.
pub fn oscillating_corpus(
    grid: Grid,
    kmax: usize,
    alpha: f64,
    horizon: f64,
    m: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<SpaceTimeField>> {
    let rule = weighted_nodes(m, alpha, horizon)?;
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let parts = (0..3)
                .map(|_| {
                    let g = band_limited_with(grid, kmax, &mut rng)?;
                    let w = rng.random_range(0.0..4.0);
                    let p = rng.random_range(0.0..2.0 * PI);
                    Ok((g, w, p))
                })
                .collect::<Result<Vec<_>>>()?;
            let slices = rule
                .nodes
                .iter()
                .map(|&t| {
                    let mut acc = ScalarField::zeros(grid);
                    for (g, w, p) in &parts {
                        acc = acc.add(&g.scale((2.0 * PI * w * t / horizon + p).cos()))?;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?;
            SpaceTimeField::new(rule.nodes.clone(), slices)
        })
        .collect()
}

/// Seeded nonnegative bumps `e^{-(t - t_0)^2 / tau^2} e^{-|x - x_0|^2 / w^2}`
/// on the weighted nodes of `(0, 1)`, distances taken periodically.
pub fn bump_corpus(grid: Grid, alpha: f64, m: usize, count: usize, seed: u64) -> Result<Vec<SpaceTimeField>> {
    let rule = weighted_nodes(m, alpha, 1.0)?;
    let l = grid.length();
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let x0: Vec<f64> = (0..grid.dim()).map(|_| rng.random_range(0.0..l)).collect();
            let w = l * rng.random_range(0.04..0.2);
            let t0 = rng.random_range(0.0..1.0);
            let tau = rng.random_range(0.05..1.0);
            let bump = ScalarField::from_real_fn(grid, |x| {
                let d2: f64 = x
                    .iter()
                    .zip(&x0)
                    .map(|(a, b)| {
                        let d = (a - b).rem_euclid(l);
                        d.min(l - d).powi(2)
                    })
                    .sum();
                (-d2 / (w * w)).exp()
            });
            let slices = rule
                .nodes
                .iter()
                .map(|&t| bump.scale((-((t - t0) / tau).powi(2)).exp()))
                .collect();
            SpaceTimeField::new(rule.nodes.clone(), slices)
        })
        .collect()
}
