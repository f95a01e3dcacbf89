//! The homogeneous Sobolev seminorm `||f||_{L^2_alpha dot}`, both ways.

use num_complex::Complex64;

use super::check_open_alpha;
use crate::embed::{c_alpha_integral, sphere_area};
use crate::error::Result;
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Double sum over lags `0 < |d| <= L/4` plus a tail estimate.
    RealSpace,
    /// `(C(n, alpha) sum |xi|^{2 alpha} |f_hat|^2 / L^n)^{1/2}`
    Fourier,
}

pub fn sobolev_seminorm(f: &ScalarField, alpha: f64, side: Side) -> Result<f64> {
    check_open_alpha(alpha)?;
    match side {
        Side::RealSpace => Ok(real_space(f, alpha)),
        Side::Fourier => fourier(f, alpha),
    }
}

fn fourier(f: &ScalarField, alpha: f64) -> Result<f64> {
    let grid = f.grid();
    let c = c_alpha_integral(grid.dim(), alpha)?.value;
    let spec = f.forward();
    let sum: f64 = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let xi = grid.frequency(flat);
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            if k2 == 0.0 {
                0.0
            } else {
                k2.powf(alpha) * v.norm_sqr()
            }
        })
        .sum();
    Ok((c * sum / grid.volume()).sqrt())
}

/// `sum_x |f(x) - f(x + d)|^2 = 2 sum |f|^2 - 2 Re sum conj(f(x)) f(x + d)`,
/// the correlation coming from `|f_hat|^2`.
fn real_space(f: &ScalarField, alpha: f64) -> f64 {
    let grid = f.grid();
    let n = grid.dim();
    let h = grid.spacing();
    let hn = grid.cell_volume();
    let energy: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
    let power = f.forward().map(|_, c| Complex64::new(c.norm_sqr(), 0.0));
    let corr = power.inverse();
    let reach = grid.length() / 4.0;
    let mut total = 0.0;
    for (flat, c) in corr.values().iter().enumerate() {
        if flat == 0 {
            continue;
        }
        let k = grid.wavevector(flat);
        let d = k[..n].iter().map(|&i| (i as f64 * h).powi(2)).sum::<f64>().sqrt();
        if d <= reach {
            let diff = (2.0 * energy - 2.0 * c.re / hn).max(0.0);
            total += diff * d.powf(-(n as f64) - 2.0 * alpha);
        }
    }
    total *= hn * hn;
    // |f(x) - f(y)|^2 ~ |f(x) - m|^2 + |f(y) - m|^2 once |x - y| > L/4
    let centred = (energy - grid.len() as f64 * f.mean().norm_sqr()).max(0.0);
    let tail = 2.0 * centred * hn * sphere_area(n) * reach.powf(-2.0 * alpha) / (2.0 * alpha);
    (total + tail).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use std::f64::consts::PI;

    fn gaussian(grid: Grid, width: f64) -> ScalarField {
        let c = grid.length() / 2.0;
        ScalarField::from_real_fn(grid, |x| {
            let r2: f64 = x.iter().map(|xi| (xi - c).powi(2)).sum();
            (-PI * r2 / (width * width)).exp()
        })
    }

    #[test]
    fn constants_vanish() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let c = ScalarField::constant(grid, Complex64::new(3.0, 0.0));
        assert!(sobolev_seminorm(&c, 0.5, Side::Fourier).unwrap() < 1e-12);
        assert!(sobolev_seminorm(&c, 0.5, Side::RealSpace).unwrap() < 1e-5);
    }

    #[test]
    fn sides_agree_for_gaussian() {
        let alpha = 0.5;
        let mut gaps = Vec::new();
        for (len, n) in [(2.0, 64usize), (4.0, 128), (8.0, 256)] {
            let grid = Grid::new(2, n, len).unwrap();
            let f = gaussian(grid, 0.5);
            let a = sobolev_seminorm(&f, alpha, Side::RealSpace).unwrap();
            let b = sobolev_seminorm(&f, alpha, Side::Fourier).unwrap();
            gaps.push((a - b).abs() / b);
        }
        assert!(gaps[2] < 0.02, "{gaps:?}");
    }

    #[test]
    fn fourier_side_scaling() {
        let grid = Grid::new(2, 64, 1.0).unwrap();
        let f = ScalarField::from_real_fn(grid, |x| (2.0 * PI * (x[0] + 3.0 * x[1])).cos());
        for &a in &[0.3, 0.7] {
            let s = sobolev_seminorm(&f, a, Side::Fourier).unwrap();
            let d = sobolev_seminorm(&f.dilate(2).unwrap(), a, Side::Fourier).unwrap();
            // periodic dilation keeps the L^2 mass per period, so only lambda^alpha shows
            let on_r_n = d * 2f64.powf(-(grid.dim() as f64) / 2.0);
            assert!((on_r_n / s - 2f64.powf(a - 1.0)).abs() < 1e-12);
        }
    }
}
