//! Picard iteration for the mild Navier–Stokes equation
//! `u = e^{t Delta} a - int_0^t e^{(t - s) Delta} P div(u (x) u) ds`
//! with unit viscosity on the periodic box.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, SpectralField, VectorField};
use crate::norms::{vector_qinv_norm, vector_x_norm, Geometry, WindowFamily, DEFAULT_NODES};
use crate::spectral::{duhamel_weights, heat_semigroup, leray_spectral, SpaceTimeField};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: Grid,
    pub alpha: f64,
    pub horizon: f64,
    /// Uniform time steps `M`; slices live at `m T / M`.
    pub steps: usize,
    /// Picard stops once the successive difference has X-norm below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// 2/3-rule truncation of the quadratic term.
    pub dealias: bool,
    /// Gauss–Jacobi nodes of the weighted diagnostics.
    pub nodes: usize,
    /// Windows of the X and admission norms; `None` picks
    /// [`SolverConfig::default_family`].
    pub family: Option<WindowFamily>,
}

impl SolverConfig {
    pub fn new(grid: Grid, alpha: f64, horizon: f64) -> Result<Self> {
        let c = Self {
            grid,
            alpha,
            horizon,
            steps: 128,
            tolerance: 1e-10,
            max_iterations: 30,
            dealias: true,
            nodes: DEFAULT_NODES / 2,
            family: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(self.alpha));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::param("T", format!("{} must be finite and positive", self.horizon)));
        }
        if self.steps < 8 {
            return Err(Error::param("M", format!("{} steps, need at least 8", self.steps)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations", "must be positive"));
        }
        if let Some(f) = &self.family {
            if f.grid() != &self.grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|m| self.horizon * m as f64 / self.steps as f64)
            .collect()
    }

    /// Balls of radii `sqrt(T) 2^-j` and `T 2^-j`, `j = 1, 2, 3`, capped at
    /// `L / 2`: the first set serves the X-norm (`r^2 < T`), the second the
    /// admission norm (`r < T`).
    pub fn default_family(&self) -> Result<WindowFamily> {
        let half = self.grid.length() / 2.0;
        let mut radii: Vec<f64> = (1..=3)
            .flat_map(|j| {
                let s = 2f64.powi(-j);
                [self.horizon.sqrt() * s, self.horizon * s]
            })
            .filter(|&r| r <= half)
            .collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        if radii.is_empty() {
            radii.push(half);
        }
        WindowFamily::new(self.grid, Geometry::Ball)?.with_radii(radii)
    }

    pub fn family(&self) -> Result<WindowFamily> {
        match &self.family {
            Some(f) => Ok(f.clone()),
            None => self.default_family(),
        }
    }

    /// Same settings on another grid and horizon; a custom family is dropped.
    pub fn rescaled(&self, grid: Grid, horizon: f64) -> Result<Self> {
        let c = Self {
            grid,
            horizon,
            family: None,
            ..self.clone()
        };
        c.validate()?;
        Ok(c)
    }
}

/// Velocity slices at `t_m = m T / M`, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    slices: Vec<VectorField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, slices: Vec<VectorField>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if times.len() != slices.len() {
            return Err(Error::TimeGridMismatch);
        }
        if times.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        let grid = *slices[0].grid();
        if slices.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, slices })
    }

    pub fn zeros(grid: Grid, times: Vec<f64>) -> Self {
        let slices = vec![VectorField::zeros(grid); times.len()];
        Self { times, slices }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[VectorField] {
        &self.slices
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    pub fn initial(&self) -> &VectorField {
        &self.slices[0]
    }

    pub fn last(&self) -> &VectorField {
        &self.slices[self.slices.len() - 1]
    }

    /// Component `j` as a scalar space-time field.
    pub fn component(&self, j: usize) -> SpaceTimeField {
        let slices = self.slices.iter().map(|s| s.component(j).clone()).collect();
        SpaceTimeField::new(self.times.clone(), slices).expect("validated on construction")
    }

    pub fn components(&self) -> Vec<SpaceTimeField> {
        (0..self.grid().dim()).map(|j| self.component(j)).collect()
    }

    fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        if self.times != other.times {
            return Err(Error::TimeGridMismatch);
        }
        Ok(())
    }

    fn zip(&self, other: &Trajectory, f: impl Fn(&VectorField, &VectorField) -> Result<VectorField>) -> Result<Self> {
        self.check_compatible(other)?;
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: self.times.clone(),
            slices,
        })
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Self> {
        self.zip(other, VectorField::sub)
    }

    pub fn add(&self, other: &Trajectory) -> Result<Self> {
        self.zip(other, VectorField::add)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            times: self.times.clone(),
            slices: self.slices.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().map(VectorField::max_abs).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.slices
            .iter()
            .all(|s| s.components().iter().all(|c| c.values().iter().all(|v| v.is_finite())))
    }

    /// Largest `||div u|| / ||u||` over slices.
    pub fn divergence_residual(&self) -> f64 {
        self.slices
            .iter()
            .map(VectorField::divergence_residual)
            .fold(0.0, f64::max)
    }
}

/// `sum_j ||g_j||_{X_{alpha;T}}` of a trajectory.
pub fn trajectory_x_norm(u: &Trajectory, config: &SolverConfig) -> Result<f64> {
    let family = config.family()?;
    Ok(vector_x_norm(&u.components(), config.alpha, config.horizon, &family, config.nodes)?.total())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionReport {
    pub norm: f64,
    pub divergence_residual: f64,
    pub epsilon: f64,
    pub pass: bool,
}

/// `sum_j ||a_j||_{Q^{-1}_{alpha;T}}` against `epsilon`; fails when the data
/// is not divergence-free to `1e-10` relative.
pub fn admission_check(a: &VectorField, config: &SolverConfig, epsilon: f64) -> Result<AdmissionReport> {
    let family = config.family()?;
    let norm = vector_qinv_norm(a, config.alpha, config.horizon, &family, config.nodes)?;
    let divergence_residual = relative_divergence(a);
    Ok(AdmissionReport {
        norm,
        divergence_residual,
        epsilon,
        pass: norm <= epsilon && divergence_residual <= 1e-10,
    })
}

/// `||div a|| / (|k|_max ||a||)`, scale free.
fn relative_divergence(a: &VectorField) -> f64 {
    let grid = a.grid();
    let kmax = 2.0 * PI * (grid.size() / 2) as f64 / grid.length();
    a.divergence_residual() / kmax
}

/// `e^{t_m Delta} a` at every slice time.
pub fn heat_flow(a: &VectorField, config: &SolverConfig) -> Result<Trajectory> {
    if a.grid() != &config.grid {
        return Err(Error::GridMismatch);
    }
    let times = config.times();
    let slices = times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                Ok(a.clone())
            } else {
                a.try_map_components(|c| heat_semigroup(c, t))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times, slices)
}

fn dealias_mask(grid: &Grid) -> Vec<bool> {
    let keep = (grid.size() / 3) as i64;
    (0..grid.len())
        .map(|flat| grid.wavevector(flat)[..grid.dim()].iter().all(|k| k.abs() <= keep))
        .collect()
}

fn truncated(spec: SpectralField, mask: Option<&[bool]>) -> SpectralField {
    match mask {
        None => spec,
        Some(mask) => {
            let mut s = spec;
            for (c, &keep) in s.coeffs_mut().iter_mut().zip(mask) {
                if !keep {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
            s
        }
    }
}

/// `P div(u (x) v)` in Fourier space, with `(div(u (x) v))_j = sum_k d_k (u_j v_k)`.
fn projected_flux(u: &VectorField, v: &VectorField, mask: Option<&[bool]>) -> Vec<SpectralField> {
    let grid = *u.grid();
    let n = grid.dim();
    let filter = |w: &VectorField| -> Vec<ScalarField> {
        w.components()
            .iter()
            .map(|c| match mask {
                None => c.clone(),
                Some(_) => truncated(c.forward(), mask).inverse(),
            })
            .collect()
    };
    let (uf, vf) = (filter(u), filter(v));
    let mut out: Vec<SpectralField> = (0..n)
        .map(|j| {
            let mut acc = SpectralField::zeros(grid);
            for (k, vk) in vf.iter().enumerate() {
                let prod = uf[j].zip_with(vk, |a, b| a * b).expect("same grid").forward();
                let d = prod.map(|xi, c| c * Complex64::new(0.0, 2.0 * PI * xi[k]));
                for (a, b) in acc.coeffs_mut().iter_mut().zip(d.coeffs()) {
                    *a += b;
                }
            }
            truncated(acc, mask)
        })
        .collect();
    leray_spectral(&mut out);
    out
}

/// `B(u, v)(t_m) = int_0^{t_m} e^{(t_m - s) Delta} P div(u (x) v)(s) ds`.
///
/// The flux is linear in `s` between slices; each piece is integrated exactly
/// against the heat kernel, mode by mode.
pub fn bilinear_b(u: &Trajectory, v: &Trajectory, config: &SolverConfig) -> Result<Trajectory> {
    u.check_compatible(v)?;
    if u.grid() != &config.grid {
        return Err(Error::GridMismatch);
    }
    let grid = config.grid;
    let n = grid.dim();
    let mask = config.dealias.then(|| dealias_mask(&grid));
    let flux: Vec<Vec<SpectralField>> = u
        .slices
        .par_iter()
        .zip(&v.slices)
        .map(|(a, b)| projected_flux(a, b, mask.as_deref()))
        .collect();
    let times = u.times();
    let weights: Vec<Vec<(f64, f64, f64)>> = times
        .windows(2)
        .map(|p| {
            let dt = p[1] - p[0];
            (0..grid.len())
                .map(|flat| {
                    let xi = grid.frequency(flat);
                    let c = 4.0 * PI * PI * xi.iter().map(|x| x * x).sum::<f64>();
                    let (e, g1, g2) = duhamel_weights(c * dt);
                    (e, dt * g1, dt * g2)
                })
                .collect()
        })
        .collect();
    let columns: Vec<Vec<ScalarField>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
            let mut out = Vec::with_capacity(times.len());
            out.push(ScalarField::zeros(grid));
            for m in 1..times.len() {
                let (prev, next) = (flux[m - 1][j].coeffs(), flux[m][j].coeffs());
                for (k, a) in acc.iter_mut().enumerate() {
                    let (e, w1, w2) = weights[m - 1][k];
                    *a = *a * e + prev[k] * w1 + next[k] * w2;
                }
                out.push(SpectralField::new(grid, acc.clone()).expect("sizes match").inverse());
            }
            out
        })
        .collect();
    let slices = (0..times.len())
        .map(|m| VectorField::new(columns.iter().map(|c| c[m].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), slices)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub alpha: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "M")]
    pub steps: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub admission_norm: f64,
    pub divergence_residual: f64,
    /// X-norms of `u^1, u^2, ...`.
    pub iterate_norms: Vec<f64>,
    /// X-norms of `u^{k+1} - u^k`.
    pub difference_norms: Vec<f64>,
    /// Successive quotients of `difference_norms`.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// X-norm of `u - e^{t Delta} a + B(u, u)` for the returned iterate.
    pub residual: f64,
    /// Whether `||u(t)||_2 <= ||a||_2 (1 + 1e-8)` at every slice.
    pub energy_monotone: bool,
}

impl SolverDiagnostics {
    pub fn final_ratio(&self) -> f64 {
        self.ratios.last().copied().unwrap_or(0.0)
    }

    pub fn final_xnorm(&self) -> f64 {
        self.iterate_norms.last().copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `u^{k+1} = e^{t Delta} a - B(u^k, u^k)` from `u^0 = e^{t Delta} a`.
pub fn picard_solve(a: &VectorField, config: &SolverConfig) -> Result<(Trajectory, SolverDiagnostics)> {
    config.validate()?;
    let admission = admission_check(a, config, f64::INFINITY)?;
    let heat = heat_flow(a, config)?;
    let mut u = heat.clone();
    let mut iterate_norms = Vec::new();
    let mut difference_norms: Vec<f64> = Vec::new();
    let mut converged = false;
    for iteration in 1..=config.max_iterations {
        let next = heat.sub(&bilinear_b(&u, &u, config)?)?;
        if !next.is_finite() {
            return Err(Error::NumericalBlowup { iteration });
        }
        let diff = trajectory_x_norm(&next.sub(&u)?, config)?;
        iterate_norms.push(trajectory_x_norm(&next, config)?);
        difference_norms.push(diff);
        u = next;
        if !diff.is_finite() || diff > 1e150 {
            return Err(Error::NumericalBlowup { iteration });
        }
        if diff < config.tolerance {
            converged = true;
            break;
        }
    }
    let ratios = difference_norms
        .windows(2)
        .map(|p| if p[0] == 0.0 { 0.0 } else { p[1] / p[0] })
        .collect();
    let residual = trajectory_x_norm(&u.sub(&heat)?.add(&bilinear_b(&u, &u, config)?)?, config)?;
    let a2 = a.l2_norm();
    let energy_monotone = u.slices().iter().all(|s| s.l2_norm() <= a2 * (1.0 + 1e-8));
    let diagnostics = SolverDiagnostics {
        alpha: config.alpha,
        horizon: config.horizon,
        steps: config.steps,
        size: config.grid.size(),
        length: config.grid.length(),
        admission_norm: admission.norm,
        divergence_residual: admission.divergence_residual,
        iterations: difference_norms.len(),
        iterate_norms,
        difference_norms,
        ratios,
        converged,
        residual,
        energy_monotone,
    };
    Ok((u, diagnostics))
}

/// `sup_t sqrt(t) ||B(u, u)(t)||_inf / ||u||_X^2`
pub fn linf_bound_ratio(u: &Trajectory, config: &SolverConfig) -> Result<f64> {
    let b = bilinear_b(u, u, config)?;
    let sup = b
        .times()
        .iter()
        .zip(b.slices())
        .map(|(t, s)| t.sqrt() * s.max_abs())
        .fold(0.0, f64::max);
    let x = trajectory_x_norm(u, config)?;
    Ok(if x == 0.0 { 0.0 } else { sup / (x * x) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub amplitude: f64,
    pub admission_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_ratio: f64,
    pub final_xnorm: f64,
    /// Largest successive-difference quotient.
    pub max_ratio: f64,
}

pub const SWEEP_HEADER: &str = "amplitude,admission_norm,converged,iterations,final_ratio,final_xnorm";

/// Solves from `amplitude * a_unit / ||a_unit||` for each amplitude, the norm
/// being the admission norm. Runs that blow up are recorded as unconverged.
pub fn contraction_sweep(a_unit: &VectorField, amplitudes: &[f64], config: &SolverConfig) -> Result<Vec<SweepRow>> {
    let unit = admission_check(a_unit, config, f64::INFINITY)?.norm;
    if unit == 0.0 {
        return Err(Error::ZeroField);
    }
    amplitudes
        .iter()
        .map(|&amplitude| {
            let a = a_unit.scale(amplitude / unit);
            match picard_solve(&a, config) {
                Ok((_, d)) => Ok(SweepRow {
                    amplitude,
                    admission_norm: d.admission_norm,
                    converged: d.converged,
                    iterations: d.iterations,
                    final_ratio: d.final_ratio(),
                    final_xnorm: d.final_xnorm(),
                    max_ratio: d.ratios.iter().copied().fold(0.0, f64::max),
                }),
                Err(Error::NumericalBlowup { iteration }) => Ok(SweepRow {
                    amplitude,
                    admission_norm: amplitude,
                    converged: false,
                    iterations: iteration,
                    final_ratio: f64::INFINITY,
                    final_xnorm: f64::INFINITY,
                    max_ratio: f64::INFINITY,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.amplitude, r.admission_norm, r.converged, r.iterations, r.final_ratio, r.final_xnorm
        );
    }
    out
}

/// Largest amplitude below the first unconverged one, if any run converged.
pub fn contraction_threshold(rows: &[SweepRow]) -> Option<f64> {
    let mut best = None;
    for r in rows {
        if !r.converged {
            break;
        }
        best = Some(r.amplitude);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: usize,
    /// Largest slice-wise `||lambda u(lambda^2 t, lambda x) - u_lambda(t, x)||_inf`
    /// relative to `max ||u_lambda||_inf`.
    pub max_relative_error: f64,
    /// `||a||_{Q^{-1}_{alpha;inf}}` summed over components.
    pub admission_norm: f64,
    /// The same for `a_lambda` on the image windows.
    pub scaled_admission_norm: f64,
    pub converged: bool,
    pub scaled_converged: bool,
}

/// Solves from `a` and from `a_lambda = lambda a(lambda x)` on horizon
/// `T / lambda^2`, and compares `lambda u(lambda^2 t, lambda x)` with
/// `u_lambda(t, x)` at every slice.
///
/// `a_lambda` lives on the grid refined by `lambda`, so it samples `a`
/// exactly and the 2/3 cutoffs of the two runs select the same modes.
pub fn scaling_experiment(a: &VectorField, lambda: usize, config: &SolverConfig) -> Result<ScalingReport> {
    if lambda == 0 {
        return Err(Error::param("lambda", "must be a positive integer"));
    }
    let l = lambda as f64;
    let (u, d) = picard_solve(a, config)?;
    let fine = config.grid.refined(lambda)?;
    let mut scaled_config = config.rescaled(fine, config.horizon / (l * l))?;
    scaled_config.family = Some(config.family()?.tiled(lambda)?);
    let a_l = VectorField::new(
        a.components()
            .iter()
            .map(|c| Ok(c.tile(lambda)?.scale(l)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let (v, dv) = picard_solve(&a_l, &scaled_config)?;
    let family = config.family()?;
    let admission_norm = vector_qinv_norm(a, config.alpha, f64::INFINITY, &family, config.nodes)?;
    let scaled_admission_norm =
        vector_qinv_norm(&a_l, config.alpha, f64::INFINITY, &family.tiled(lambda)?, config.nodes)?;
    let mut err: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (s, w) in u.slices().iter().zip(v.slices()) {
        let image = VectorField::new(
            s.components()
                .iter()
                .map(|c| Ok(c.tile(lambda)?.scale(l)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        err = err.max(image.sub(w)?.max_abs());
        size = size.max(w.max_abs());
    }
    Ok(ScalingReport {
        lambda,
        max_relative_error: if size == 0.0 { err } else { err / size },
        admission_norm,
        scaled_admission_norm,
        converged: d.converged,
        scaled_converged: dv.converged,
    })
}

/// Largest slice-wise relative sup error against `e^{-2 |k|^2 t} a`, the
/// exact Taylor–Green flow with `|k| = 2 pi / L` per axis.
pub fn taylor_green_error(u: &Trajectory) -> f64 {
    let grid = u.grid();
    let w = 2.0 * PI / grid.length();
    let rate = grid.dim().min(2) as f64 * w * w;
    let a = u.initial();
    u.times()
        .iter()
        .zip(u.slices())
        .map(|(&t, s)| {
            let exact = a.scale((-rate * t).exp());
            exact.sub(s).expect("same grid").max_abs() / exact.max_abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{divergence_free, pure_mode, taylor_green};

    fn config(grid: Grid, steps: usize) -> SolverConfig {
        let mut c = SolverConfig::new(grid, 0.5, 0.1).unwrap();
        c.steps = steps;
        c
    }

    fn shear(grid: Grid, k: &[i64], amplitude: f64) -> VectorField {
        // (k_2, -k_1) cos(2 pi k.x / L) is divergence-free
        let m = pure_mode(grid, k, amplitude).unwrap();
        VectorField::new(vec![m.scale(k[1] as f64), m.scale(-(k[0] as f64))]).unwrap()
    }

    #[test]
    fn config_validation() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let mut c = SolverConfig::new(grid, 0.5, 1.0).unwrap();
        c.steps = 4;
        assert!(c.validate().is_err());
        assert!(SolverConfig::new(grid, 0.0, 1.0).is_err());
        assert!(SolverConfig::new(grid, 0.5, -1.0).is_err());
        assert_eq!(c.times().len(), 5);
    }

    #[test]
    fn heat_flow_slices() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let a = shear(grid, &[1, 2], 1.0);
        let u = heat_flow(&a, &c).unwrap();
        assert_eq!(u.initial(), &a);
        let rate = 4.0 * PI * PI * 5.0;
        for (&t, s) in u.times().iter().zip(u.slices()) {
            let want = a.scale((-rate * t).exp());
            assert!(want.sub(s).unwrap().max_abs() < 1e-13);
            assert!(s.divergence().max_abs() < 1e-12);
        }
    }

    #[test]
    fn b_vanishes_on_zero_and_is_bilinear() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let u = heat_flow(&divergence_free(grid, 3, 1).unwrap(), &c).unwrap();
        let v = heat_flow(&divergence_free(grid, 3, 2).unwrap(), &c).unwrap();
        let zero = Trajectory::zeros(grid, c.times());
        assert_eq!(bilinear_b(&u, &zero, &c).unwrap().max_abs(), 0.0);
        let b = bilinear_b(&u, &v, &c).unwrap();
        let b3 = bilinear_b(&u.scale(3.0), &v, &c).unwrap();
        assert!(b.scale(3.0).sub(&b3).unwrap().max_abs() <= 1e-12 * b3.max_abs());
        assert!(b.max_abs() > 0.0);
        assert!(b.divergence_residual() < 1e-10);
    }

    #[test]
    fn b_checks_grids() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let u = Trajectory::zeros(grid, c.times());
        let mut t = c.times();
        t[3] += 1e-3;
        let v = Trajectory::zeros(grid, t);
        assert!(matches!(bilinear_b(&u, &v, &c), Err(Error::TimeGridMismatch)));
        let other = Trajectory::zeros(Grid::new(2, 32, 1.0).unwrap(), c.times());
        assert!(matches!(bilinear_b(&u, &other, &c), Err(Error::GridMismatch)));
    }

    #[test]
    fn single_mode_self_interaction_vanishes() {
        // a flow depending on k.x alone has (u.grad) u = 0
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let u = heat_flow(&shear(grid, &[1, 1], 1.0), &c).unwrap();
        assert!(bilinear_b(&u, &u, &c).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn two_mode_interaction_support() {
        let grid = Grid::new(2, 32, 1.0).unwrap();
        let mut c = config(grid, 8);
        c.dealias = false;
        let (k, l) = ([1i64, 0], [1i64, 2]);
        let u = heat_flow(&shear(grid, &k, 1.0), &c).unwrap();
        let v = heat_flow(&shear(grid, &l, 1.0), &c).unwrap();
        let b = bilinear_b(&u, &v, &c).unwrap();
        assert!(b.max_abs() > 1e-6);
        let allowed: Vec<[i64; 2]> = [1i64, -1]
            .iter()
            .flat_map(|&s| [-1i64, 1].map(|t| [s * k[0] + t * l[0], s * k[1] + t * l[1]]))
            .collect();
        for s in b.slices() {
            for comp in s.components() {
                for (flat, v) in comp.forward().coeffs().iter().enumerate() {
                    let w = grid.wavevector(flat);
                    if !allowed.contains(&[w[0], w[1]]) {
                        assert!(v.norm() < 1e-12, "{w:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_data_converges_at_once() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let (u, d) = picard_solve(&VectorField::zeros(grid), &c).unwrap();
        assert!(d.converged);
        assert_eq!(d.iterations, 1);
        assert!(d.ratios.is_empty());
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn taylor_green_stays_exact() {
        let grid = Grid::new(2, 16, 2.0 * PI).unwrap();
        let c = config(grid, 16);
        let (u, d) = picard_solve(&taylor_green(grid, 1.0), &c).unwrap();
        assert!(d.converged);
        assert!(taylor_green_error(&u) < 1e-10);
        assert!(u.divergence_residual() < 1e-10);
    }

    #[test]
    fn small_data_contracts() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 16);
        let a = divergence_free(grid, 3, 5).unwrap().scale(0.05);
        let (u, d) = picard_solve(&a, &c).unwrap();
        assert!(d.converged, "{d:?}");
        assert_eq!(d.ratios.len(), d.iterations - 1);
        assert!(d.ratios.iter().all(|r| *r < 0.5), "{:?}", d.ratios);
        assert!(d.residual <= 10.0 * c.tolerance);
        assert!(d.energy_monotone);
        assert!(u.divergence_residual() < 1e-10);
        let json = d.to_json().unwrap();
        assert_eq!(SolverDiagnostics::from_json(&json).unwrap(), d);
    }

    #[test]
    fn admission_is_homogeneous_and_flags_divergence() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let a = divergence_free(grid, 3, 8).unwrap();
        let r1 = admission_check(&a, &c, 1e9).unwrap();
        let r2 = admission_check(&a.scale(2.5), &c, 1e9).unwrap();
        assert!((r2.norm - 2.5 * r1.norm).abs() <= 1e-12 * r2.norm);
        assert!(r1.pass);
        let zero = admission_check(&VectorField::zeros(grid), &c, 0.0).unwrap();
        assert!(zero.pass && zero.norm == 0.0);
        let g = pure_mode(grid, &[1, 0], 1.0).unwrap();
        let bad = VectorField::new(vec![g.clone(), ScalarField::zeros(grid)]).unwrap();
        assert!(!admission_check(&bad, &c, 1e9).unwrap().pass);
    }

    #[test]
    fn scaling_identity_runs() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let a = divergence_free(grid, 2, 3).unwrap().scale(0.2);
        let one = scaling_experiment(&a, 1, &c).unwrap();
        assert_eq!(one.max_relative_error, 0.0);
        let two = scaling_experiment(&a, 2, &c).unwrap();
        assert!(two.max_relative_error < 1e-10, "{two:?}");
        assert!((two.admission_norm - two.scaled_admission_norm).abs() < 1e-10 * two.admission_norm);
    }

    #[test]
    fn sweep_csv_shape() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = config(grid, 8);
        let a = divergence_free(grid, 2, 4).unwrap();
        let rows = contraction_sweep(&a, &[0.0, 0.01, 0.1], &c).unwrap();
        assert!(rows.iter().all(|r| r.converged));
        assert!(rows[1].final_ratio <= rows[2].final_ratio);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SWEEP_HEADER));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(contraction_threshold(&rows), Some(0.1));
    }
}
