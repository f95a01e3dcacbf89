//! Carleson-box functionals: the characterisations by Poisson and heat
//! extensions, the `Q^{-1}_{alpha;T}` norm and the `X_{alpha;T}` norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::windows::WindowFamily;
use super::{check_open_alpha, first_max, NormReport};
use crate::error::{Error, Result};
use crate::field::{ScalarField, SpectralField, VectorField};
use crate::quad::Rule;
use crate::spectral::{apply_spectral, Multiplier, SpaceTimeField, Symbol};

#[derive(Clone)]
pub enum CarlesonKind {
    /// `|f * psi_t|^2 t^{-(1 + 2 alpha)}` on `(0, r]`; the symbol is `psi_hat`.
    GenericPsi(Symbol),
    /// `|d_t e^{-t sqrt(-Delta)} f|^2 t^{1 - 2 alpha}` on `(0, r]`.
    PoissonDerivative,
    /// `|grad e^{t^2 Delta} f|^2 t^{1 - 2 alpha}` on `(0, r]`.
    HeatGradient,
    /// `|d_t e^{-t sqrt(-Delta)} f|^2 t` on `(0, r]`.
    MorreyPoisson,
}

impl std::fmt::Debug for CarlesonKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl CarlesonKind {
    pub fn name(&self) -> &'static str {
        match self {
            CarlesonKind::GenericPsi(_) => "generic-psi",
            CarlesonKind::PoissonDerivative => "poisson-derivative",
            CarlesonKind::HeatGradient => "heat-gradient",
            CarlesonKind::MorreyPoisson => "morrey-poisson",
        }
    }

    /// Parses a kind name; `psi0` selects the generic kind with the Poisson
    /// wavelet `psi_0`, whose transform is `-2 pi |xi| e^{-2 pi |xi|}`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "poisson-derivative" => Ok(CarlesonKind::PoissonDerivative),
            "heat-gradient" => Ok(CarlesonKind::HeatGradient),
            "morrey-poisson" => Ok(CarlesonKind::MorreyPoisson),
            "generic-psi" | "psi0" => Ok(CarlesonKind::GenericPsi(psi0_symbol())),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

pub fn psi0_symbol() -> Symbol {
    std::sync::Arc::new(|xi: &[f64]| {
        let k = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        Complex64::new(-2.0 * PI * k * (-2.0 * PI * k).exp(), 0.0)
    })
}

fn same_grid(family: &WindowFamily, grid: &crate::field::Grid) -> Result<()> {
    if family.grid() != grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < 4 {
        return Err(Error::InvalidQuadrature(format!("{nodes} nodes, need at least 4")));
    }
    Ok(())
}

/// Time-integrated density of one window radius, at every grid point.
struct Layer {
    radius: f64,
    density: Vec<f64>,
}

/// Per-window values `r^{scale} sum_{y in B} A_r(y) (s h)^n`, where `A_r` is
/// the time-integrated density of radius `r`.
fn window_sums(family: &WindowFamily, layers: &[Layer], scale: f64) -> Vec<f64> {
    let grid = family.grid();
    let n = grid.dim() as i32;
    let h = grid.spacing();
    family
        .windows()
        .par_iter()
        .map(|w| {
            let layer = layers
                .iter()
                .find(|l| l.radius == w.radius)
                .expect("layer per active radius");
            let st = family.stencil(w);
            let sum: f64 = st
                .offsets
                .iter()
                .map(|off| layer.density[grid.wrapped_index(&w.center, off)])
                .sum();
            w.radius.powf(scale) * sum * (w.step as f64 * h).powi(n)
        })
        .collect()
}

/// Builds `A_r(x) = sum_i w_i c(t_i) D(t_i, x)` for every active radius.
///
/// `span(r)` is the length of the time interval, `power` the exponent of the
/// folded weight, `factor(t)` an extra per-node multiplier.
fn layers(
    family: &WindowFamily,
    nodes: usize,
    power: f64,
    span: impl Fn(f64) -> f64,
    factor: impl Fn(f64) -> f64 + Sync,
    density: impl Fn(f64) -> Result<Vec<f64>> + Sync,
) -> Result<Vec<Layer>> {
    family
        .active_radii()
        .into_iter()
        .map(|radius| {
            let rule = Rule::power_weight(nodes, power, span(radius))?;
            let slices = rule
                .nodes
                .par_iter()
                .map(|&t| density(t))
                .collect::<Result<Vec<_>>>()?;
            let mut acc = vec![0.0; family.grid().len()];
            for ((d, &w), &t) in slices.iter().zip(&rule.weights).zip(&rule.nodes) {
                let c = w * factor(t);
                for (a, v) in acc.iter_mut().zip(d) {
                    *a += c * v;
                }
            }
            Ok(Layer {
                radius,
                density: acc,
            })
        })
        .collect()
}

fn abs_sq(spec: &SpectralField) -> Vec<f64> {
    spec.inverse().values().iter().map(|v| v.norm_sqr()).collect()
}

/// Sup over windows of `r^{2 alpha - n}` times the windowed space-time
/// integral of the kind's integrand. No square root is taken.
pub fn carleson_functional(
    f: &ScalarField,
    alpha: f64,
    kind: &CarlesonKind,
    family: &WindowFamily,
    nodes: usize,
) -> Result<NormReport> {
    check_open_alpha(alpha)?;
    check_nodes(nodes)?;
    same_grid(family, f.grid())?;
    if family.is_empty() {
        return Err(Error::EmptyWindowFamily);
    }
    let spec = f.forward();
    let dim = f.grid().dim();
    let layers = match kind {
        CarlesonKind::PoissonDerivative | CarlesonKind::MorreyPoisson => {
            let power = if matches!(kind, CarlesonKind::MorreyPoisson) {
                1.0
            } else {
                1.0 - 2.0 * alpha
            };
            layers(family, nodes, power, |r| r, |_| 1.0, |t| {
                Ok(abs_sq(&apply_spectral(&spec, &Multiplier::PoissonTimeDerivative(t))?))
            })?
        }
        CarlesonKind::HeatGradient => layers(family, nodes, 1.0 - 2.0 * alpha, |r| r, |_| 1.0, |t| {
            let heat = apply_spectral(&spec, &Multiplier::Heat(t * t))?;
            let mut acc = vec![0.0; f.grid().len()];
            for j in 0..dim {
                let d = heat.map(|xi, c| c * Complex64::new(0.0, 2.0 * PI * xi[j]));
                for (a, v) in acc.iter_mut().zip(abs_sq(&d)) {
                    *a += v;
                }
            }
            Ok(acc)
        })?,
        CarlesonKind::GenericPsi(psi) => {
            // t^{-(1 + 2 alpha)} = t^{1 - 2 alpha} / t^2 keeps the rule's weight integrable
            layers(family, nodes, 1.0 - 2.0 * alpha, |r| r, |t| 1.0 / (t * t), |t| {
                Ok(abs_sq(&spec.map(|xi, c| {
                    let txi: Vec<f64> = xi.iter().map(|x| t * x).collect();
                    c * psi(&txi)
                })))
            })?
        }
    };
    let values = window_sums(family, &layers, 2.0 * alpha - dim as f64);
    NormReport::assemble(kind.name(), alpha, f64::INFINITY, family, values, Some(nodes), 0)
}

/// `sup_{r < T} (r^{2 alpha - n} int_0^{r^2} int_B |e^{t Delta} f|^2 t^{-alpha})^{1/2}`
pub fn qinv_norm(
    f: &ScalarField,
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<NormReport> {
    let (family, values) = qinv_windows(f, alpha, horizon, family, nodes, false)?;
    NormReport::assemble("qinv", alpha, horizon, &family, values, Some(nodes), 0)
}

/// Per-window `(r^{-n} int_0^{r^2} int_B |e^{t Delta} f|^2)^{1/2}` on the same
/// windows and nodes as [`qinv_norm`]; each entry is dominated by the
/// corresponding `Q^{-1}_alpha` window value.
pub fn bmo_inverse_windows(
    f: &ScalarField,
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<NormReport> {
    let (family, values) = qinv_windows(f, alpha, horizon, family, nodes, true)?;
    NormReport::assemble("bmo-inverse", alpha, horizon, &family, values, Some(nodes), 0)
}

fn qinv_windows(
    f: &ScalarField,
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
    unweighted: bool,
) -> Result<(WindowFamily, Vec<f64>)> {
    check_open_alpha(alpha)?;
    check_nodes(nodes)?;
    same_grid(family, f.grid())?;
    if family.is_empty() {
        return Err(Error::EmptyWindowFamily);
    }
    let family = family.filtered(|r| r < horizon);
    if family.is_empty() {
        return Err(Error::NoWindowBelowT(horizon));
    }
    let spec = f.forward();
    let n = f.grid().dim() as f64;
    let (factor, scale): (Box<dyn Fn(f64) -> f64 + Sync>, f64) = if unweighted {
        (Box::new(move |t: f64| t.powf(alpha)), -n)
    } else {
        (Box::new(|_| 1.0), 2.0 * alpha - n)
    };
    let layers = layers(&family, nodes, -alpha, |r| r * r, factor, |t| {
        Ok(abs_sq(&apply_spectral(&spec, &Multiplier::Heat(t))?))
    })?;
    let values = window_sums(&family, &layers, scale)
        .into_iter()
        .map(f64::sqrt)
        .collect();
    Ok((family, values))
}

/// `qinv_norm` at each horizon of a strictly decreasing sequence.
pub fn vanishing_check(
    f: &ScalarField,
    alpha: f64,
    horizons: &[f64],
    family: &WindowFamily,
    nodes: usize,
) -> Result<Vec<f64>> {
    if horizons.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::param("T", "sequence must be strictly decreasing"));
    }
    horizons
        .iter()
        .map(|&t| Ok(qinv_norm(f, alpha, t, family, nodes)?.value))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XNorm {
    /// `sup_t sqrt(t) ||g(t)||_inf` over stored slices.
    pub sup_part: f64,
    /// Carleson part; zero when no window fits below the horizon.
    pub carleson_part: f64,
    pub windows: usize,
}

impl XNorm {
    pub fn total(&self) -> f64 {
        self.sup_part + self.carleson_part
    }
}

/// `X_{alpha;T}` norm of a stored trajectory.
///
/// Windows need `r^2 < T` and `r^2` no later than the last stored time;
/// the Carleson integrand is interpolated linearly between slices.
pub fn x_norm(
    g: &SpaceTimeField,
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<XNorm> {
    check_open_alpha(alpha)?;
    check_nodes(nodes)?;
    same_grid(family, g.grid())?;
    let times = g.times();
    let last = times[times.len() - 1];
    let sup_part = times
        .iter()
        .zip(g.slices())
        .filter(|(&t, _)| t <= horizon)
        .map(|(&t, s)| t.sqrt() * s.max_abs())
        .fold(0.0, f64::max);
    let family = family.filtered(|r| r * r < horizon && r * r <= last);
    let (best, windows) = trajectory_sup(g, alpha, &family, nodes, Complex64::norm_sqr)?;
    Ok(XNorm {
        sup_part,
        carleson_part: best.sqrt(),
        windows,
    })
}

/// `sup r^{2 alpha - n} int_0^{r^2} int_B |g| t^{-alpha}` over windows with
/// `r < 1` and `r^2` no later than the last stored time; zero without windows.
pub fn carleson_l1(
    g: &SpaceTimeField,
    alpha: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<(f64, usize)> {
    check_open_alpha(alpha)?;
    check_nodes(nodes)?;
    same_grid(family, g.grid())?;
    let last = g.times()[g.len() - 1];
    let family = family.filtered(|r| r < 1.0 && r * r <= last);
    trajectory_sup(g, alpha, &family, nodes, |v| v.norm())
}

/// Largest window value of `|g|`-densities with weight `t^{-alpha}` on
/// `(0, r^2)`, and the number of windows.
fn trajectory_sup(
    g: &SpaceTimeField,
    alpha: f64,
    family: &WindowFamily,
    nodes: usize,
    density: fn(&Complex64) -> f64,
) -> Result<(f64, usize)> {
    if family.is_empty() {
        return Ok((0.0, 0));
    }
    let n = g.grid().dim() as f64;
    let layers = layers(family, nodes, -alpha, |r| r * r, |_| 1.0, |t| {
        Ok(g.at(t).values().iter().map(density).collect())
    })?;
    let values = window_sums(family, &layers, 2.0 * alpha - n);
    Ok((first_max(&values).1, values.len()))
}

/// Sum of the component norms.
pub fn vector_x_norm(
    components: &[SpaceTimeField],
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<XNorm> {
    let mut total = XNorm {
        sup_part: 0.0,
        carleson_part: 0.0,
        windows: 0,
    };
    for c in components {
        let x = x_norm(c, alpha, horizon, family, nodes)?;
        total.sup_part += x.sup_part;
        total.carleson_part += x.carleson_part;
        total.windows = x.windows;
    }
    Ok(total)
}

/// `sum_j ||a_j||_{Q^{-1}_{alpha;T}}`
pub fn vector_qinv_norm(
    a: &VectorField,
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<f64> {
    a.components()
        .iter()
        .map(|c| Ok(qinv_norm(c, alpha, horizon, family, nodes)?.value))
        .sum()
}
