//! Cube-based norms: BMO, the quadratic Morrey norm and Q_alpha.

use num_complex::Complex64;
use rayon::prelude::*;

use super::windows::{Geometry, Stencil, Window, WindowFamily};
use super::{check_open_alpha, NormReport};
use crate::error::{Error, Result};
use crate::field::ScalarField;

fn cube_family(f: &ScalarField, family: &WindowFamily) -> Result<()> {
    if family.geometry() != Geometry::Cube {
        return Err(Error::param("geometry", "oscillation norms need cube windows"));
    }
    if family.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    if family.is_empty() {
        return Err(Error::EmptyWindowFamily);
    }
    Ok(())
}

fn gather(f: &ScalarField, window: &Window, stencil: &Stencil) -> Vec<Complex64> {
    let grid = f.grid();
    let values = f.values();
    stencil
        .offsets
        .iter()
        .map(|off| values[grid.wrapped_index(&window.center, off)])
        .collect()
}

/// `ell^{2 alpha - n} sum |f - f_I|^2 (s h)^n` over one cube.
fn oscillation_sq(f: &ScalarField, family: &WindowFamily, window: &Window, alpha: f64) -> f64 {
    let grid = f.grid();
    let n = grid.dim() as i32;
    let stencil = family.stencil(window);
    let samples = gather(f, window, &stencil);
    let mean = samples.iter().sum::<Complex64>() / samples.len() as f64;
    let spread: f64 = samples.iter().map(|v| (v - mean).norm_sqr()).sum();
    let h = grid.spacing();
    let side = window.span as f64 * h;
    let cell = (window.step as f64 * h).powi(n);
    side.powf(2.0 * alpha - n as f64) * spread * cell
}

fn morrey_like(f: &ScalarField, family: &WindowFamily, alpha: f64, kind: &str) -> Result<NormReport> {
    cube_family(f, family)?;
    let values: Vec<f64> = family
        .windows()
        .par_iter()
        .map(|w| oscillation_sq(f, family, w, alpha).sqrt())
        .collect();
    NormReport::assemble(kind, alpha, f64::INFINITY, family, values, None, 0)
}

/// `sup_I (ell(I)^{-n} int_I |f - f_I|^2)^{1/2}`
pub fn bmo_norm(f: &ScalarField, family: &WindowFamily) -> Result<NormReport> {
    morrey_like(f, family, 0.0, "bmo")
}

/// `sup_I (ell(I)^{2 alpha - n} int_I |f - f_I|^2)^{1/2}`, `alpha` in `[0, 1)`.
pub fn morrey_norm(f: &ScalarField, alpha: f64, family: &WindowFamily) -> Result<NormReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    morrey_like(f, family, alpha, "morrey")
}

/// Kernel `|d|^{-n-2 alpha}` on the offset lattice of a `p`-per-side cube,
/// indexed by `sum_k (d_k + p - 1) (2p - 1)^k`.
fn kernel_table(dim: usize, p: usize, unit: f64, alpha: f64) -> Vec<f64> {
    let width = 2 * p - 1;
    let expo = -(dim as f64 + 2.0 * alpha) / 2.0;
    (0..width.pow(dim as u32))
        .map(|mut flat| {
            let mut d2 = 0.0;
            for _ in 0..dim {
                let d = (flat % width) as f64 - (p as f64 - 1.0);
                d2 += d * d;
                flat /= width;
            }
            if d2 == 0.0 {
                0.0
            } else {
                (d2 * unit * unit).powf(expo)
            }
        })
        .collect()
}

/// `ell^{2 alpha - n} sum_{i != j} |f_i - f_j|^2 |x_i - x_j|^{-n-2 alpha} (s h)^{2n}`
fn qalpha_sq(f: &ScalarField, family: &WindowFamily, window: &Window, alpha: f64) -> f64 {
    let grid = f.grid();
    let dim = grid.dim();
    let stencil = family.stencil(window);
    let p = stencil.per_side;
    let samples = gather(f, window, &stencil);
    let h = grid.spacing();
    let unit = window.step as f64 * h;
    let table = kernel_table(dim, p, unit, alpha);
    let width = (2 * p - 1) as i64;
    let half = (window.span / 2) as i64;
    let s = window.step as i64;
    // linear position in the offset lattice; differences index the table
    let keys: Vec<i64> = stencil
        .offsets
        .iter()
        .map(|o| {
            (0..dim)
                .rev()
                .fold(0i64, |acc, axis| acc * width + (o[axis] + half) / s)
        })
        .collect();
    let origin: i64 = (0..dim).fold(0i64, |acc, _| acc * width + (p as i64 - 1));
    let mut total = 0.0;
    for i in 0..samples.len() {
        let vi = samples[i];
        let ki = keys[i] + origin;
        let mut row = 0.0;
        for j in i + 1..samples.len() {
            row += (vi - samples[j]).norm_sqr() * table[(ki - keys[j]) as usize];
        }
        total += row;
    }
    let n = dim as f64;
    let side = window.span as f64 * h;
    2.0 * total * unit.powf(2.0 * n) * side.powf(2.0 * alpha - n)
}

/// `sup_I (ell(I)^{2 alpha - n} int_I int_I |f(x) - f(y)|^2 / |x - y|^{n + 2 alpha})^{1/2}`
///
/// Diagonal pairs are excluded; distances are Euclidean within the cube.
pub fn qalpha_norm(f: &ScalarField, alpha: f64, family: &WindowFamily) -> Result<NormReport> {
    check_open_alpha(alpha)?;
    cube_family(f, family)?;
    let values: Vec<f64> = family
        .windows()
        .par_iter()
        .map(|w| qalpha_sq(f, family, w, alpha).sqrt())
        .collect();
    let pairs: u64 = family
        .windows()
        .iter()
        .map(|w| {
            let m = ((w.span / w.step) as u64).pow(f.grid().dim() as u32);
            m * (m - 1)
        })
        .sum();
    NormReport::assemble("qalpha", alpha, f64::INFINITY, family, values, None, pairs)
}
