//! Seeded synthetic fields: band-limited random data, pure modes and
//! Taylor–Green vortices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, SpectralField, VectorField};
use crate::spectral::leray_project;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real, mean-zero field with Gaussian coefficients on `0 < |k|_inf <= kmax`.
///
/// Coefficients decay like `(1 + |k|^2)^{-1/2}`; the result is normalised to
/// unit sup norm.
pub fn band_limited(grid: Grid, kmax: usize, seed: u64) -> Result<ScalarField> {
    let mut rng = rng(seed);
    band_limited_with(grid, kmax, &mut rng)
}

pub fn band_limited_with(grid: Grid, kmax: usize, rng: &mut impl Rng) -> Result<ScalarField> {
    let n = grid.dim();
    if kmax == 0 || 2 * kmax >= grid.size() {
        return Err(Error::param(
            "kmax",
            format!("{kmax} must be in 1..{}", grid.size() / 2),
        ));
    }
    let mut spec = SpectralField::zeros(grid);
    let side = 2 * kmax as i64 + 1;
    let vol = grid.volume();
    for idx in 0..side.pow(n as u32) {
        let mut k = [0i64; 3];
        let mut rest = idx;
        for axis in (0..n).rev() {
            k[axis] = rest % side - kmax as i64;
            rest /= side;
        }
        let k = &k[..n];
        // one representative of each +-k pair
        match k.iter().find(|&&c| c != 0) {
            Some(&c) if c > 0 => {}
            _ => continue,
        }
        let k2: f64 = k.iter().map(|&c| (c * c) as f64).sum();
        let amp = (1.0 + k2).sqrt().recip();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let c = Complex64::new(re, im) * amp * vol;
        let minus: Vec<i64> = k.iter().map(|c| -c).collect();
        spec.set_coefficient(k, c);
        spec.set_coefficient(&minus, c.conj());
    }
    let mut f = spec.inverse();
    for v in f.values_mut() {
        v.im = 0.0;
    }
    let m = f.max_abs();
    Ok(if m > 0.0 { f.scale(1.0 / m) } else { f })
}

/// `amplitude * cos(2 pi k.x / L)`
pub fn pure_mode(grid: Grid, k: &[i64], amplitude: f64) -> Result<ScalarField> {
    if k.len() != grid.dim() {
        return Err(Error::param("k", format!("needs {} components", grid.dim())));
    }
    let l = grid.length();
    Ok(ScalarField::from_real_fn(grid, |x| {
        let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
        amplitude * (2.0 * PI * phase / l).cos()
    }))
}

/// The Taylor–Green vortex `(sin x cos y, -cos x sin y)` with `x` rescaled
/// to period `L`; in 3-D the profile is multiplied by `cos z` and the third
/// component vanishes.
pub fn taylor_green(grid: Grid, amplitude: f64) -> VectorField {
    let w = 2.0 * PI / grid.length();
    let z = |x: &[f64]| if x.len() == 3 { (w * x[2]).cos() } else { 1.0 };
    let mut comps = vec![
        ScalarField::from_real_fn(grid, |x| amplitude * (w * x[0]).sin() * (w * x[1]).cos() * z(x)),
        ScalarField::from_real_fn(grid, |x| -amplitude * (w * x[0]).cos() * (w * x[1]).sin() * z(x)),
    ];
    if grid.dim() == 3 {
        comps.push(ScalarField::zeros(grid));
    }
    VectorField::new(comps).expect("components match the grid")
}

/// Leray projection of independent band-limited components, normalised to
/// unit sup norm.
pub fn divergence_free(grid: Grid, kmax: usize, seed: u64) -> Result<VectorField> {
    let mut rng = rng(seed);
    let comps = (0..grid.dim())
        .map(|_| band_limited_with(grid, kmax, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let v = leray_project(&VectorField::new(comps)?);
    let m = v.max_abs();
    Ok(if m > 0.0 { v.scale(1.0 / m) } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_limited_is_real_mean_zero_and_seeded() {
        let grid = Grid::new(2, 32, 1.0).unwrap();
        let f = band_limited(grid, 4, 7).unwrap();
        let g = band_limited(grid, 4, 7).unwrap();
        assert_eq!(f.values(), g.values());
        assert!(f.mean().norm() < 1e-14);
        assert!((f.max_abs() - 1.0).abs() < 1e-15);
        let spec = f.forward();
        for (flat, c) in spec.coeffs().iter().enumerate() {
            let k = grid.wavevector(flat);
            if k.iter().any(|c| c.abs() > 4) {
                assert!(c.norm() < 1e-12);
            }
        }
        assert_ne!(band_limited(grid, 4, 8).unwrap().values(), f.values());
    }

    #[test]
    fn band_limit_bounds() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        assert!(band_limited(grid, 0, 1).is_err());
        assert!(band_limited(grid, 8, 1).is_err());
        assert!(band_limited(grid, 7, 1).is_ok());
    }

    #[test]
    fn taylor_green_is_divergence_free() {
        for dim in [2, 3] {
            let grid = Grid::new(dim, 16, 2.0 * PI).unwrap();
            let v = taylor_green(grid, 1.0);
            assert!(v.divergence().max_abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_free_random() {
        let grid = Grid::new(3, 16, 1.0).unwrap();
        let v = divergence_free(grid, 3, 11).unwrap();
        assert!(v.divergence_residual() < 1e-12);
    }

    #[test]
    fn pure_mode_values() {
        let grid = Grid::new(2, 8, 2.0).unwrap();
        let f = pure_mode(grid, &[1, 0], 2.0).unwrap();
        assert!((f.values()[0].re - 2.0).abs() < 1e-15);
        assert!(f.values()[grid.flat_index(&[2, 0])].re.abs() < 1e-15);
        assert!(pure_mode(grid, &[1], 1.0).is_err());
    }
}
