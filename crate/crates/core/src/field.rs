//! Periodic grids, sampled fields and their discrete Fourier transforms.
//!
//! A [`Grid`] samples the torus `[0, L)^n` with `N` points per axis. Fields
//! are stored row-major (last axis fastest). The forward transform follows
//! the convention `f_hat(xi) = \int f(y) e^{-2 pi i xi.y} dy` discretised with
//! cell weight `h^n`, with continuous frequency `xi = k / L`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    size: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, size: usize, length: f64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{2, 3}}")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N = {size} must be a power of two and at least 8"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("period L = {length} must be positive")));
        }
        Ok(Self { dim, size, length })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.length / self.size as f64
    }

    /// Total number of samples `N^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    #[inline]
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Signed wavenumber of FFT bin `i`, in `{-N/2, ..., N/2 - 1}`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.size / 2 {
            i as i64
        } else {
            i as i64 - self.size as i64
        }
    }

    /// FFT bin of signed wavenumber `k` (taken modulo `N`).
    #[inline]
    pub fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.size as i64) as usize
    }

    /// Row-major multi-index of a flat index. Unused trailing axes are zero.
    #[inline]
    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.size;
            flat /= self.size;
        }
        idx
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0usize, |acc, &i| acc * self.size + i)
    }

    /// Flat index of `idx + offset`, wrapped periodically.
    #[inline]
    pub fn wrapped_index(&self, idx: &[usize], offset: &[i64]) -> usize {
        let n = self.size as i64;
        let mut flat = 0usize;
        for axis in 0..self.dim {
            let i = (idx[axis] as i64 + offset[axis]).rem_euclid(n) as usize;
            flat = flat * self.size + i;
        }
        flat
    }

    /// Physical position of a flat index.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    /// Signed wavevector of a flat spectral index.
    pub fn wavevector(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut k = [0i64; MAX_DIM];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(idx[axis]);
        }
        k
    }

    /// Continuous frequency `xi = k / L` of a flat spectral index.
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let k = self.wavevector(flat);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            xi[axis] = k[axis] as f64 / self.length;
        }
        xi
    }

    /// Grid with the same period and `N / factor` samples per axis.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.size % factor != 0 {
            return Err(Error::param("factor", format!("{factor} does not divide N = {}", self.size)));
        }
        Grid::new(self.dim, self.size / factor, self.length)
    }

    /// Grid with the same period and `N * factor` samples per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.dim, self.size * factor, self.length)
    }
}

fn planned(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    type Cache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, direction == FftDirection::Forward);
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
        .clone()
}

/// Unnormalised n-dimensional FFT in place.
fn fft_nd(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.size;
    let fft = planned(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // last axis is contiguous
    fft.process_with_scratch(data, &mut scratch);
    let mut line = vec![Complex64::default(); n];
    for axis in (0..grid.dim - 1).rev() {
        let stride = n.pow((grid.dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(
                "values",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.position(i)[..grid.dim]))
            .collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(h^n sum |f|^2)^{1/2}`
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v.norm()).sum::<f64>()
    }

    /// Average value over the torus.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// True when `max |Im f| <= tol * max |f|`.
    pub fn is_real(&self, tol: f64) -> bool {
        let im = self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        im <= tol * self.max_abs()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn zip_with(
        &self,
        other: &ScalarField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest pointwise difference relative to the largest modulus of `self`.
    pub fn relative_distance(&self, other: &ScalarField) -> Result<f64> {
        let diff = self.sub(other)?.max_abs();
        let scale = self.max_abs();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }

    pub fn forward(&self) -> SpectralField {
        let mut coeffs = self.values.clone();
        fft_nd(&self.grid, &mut coeffs, FftDirection::Forward);
        let w = self.grid.cell_volume();
        coeffs.iter_mut().for_each(|c| *c *= w);
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    /// Spectral gradient, multiplier `2 pi i xi_j` per axis.
    pub fn gradient(&self) -> VectorField {
        let spec = self.forward();
        let components = (0..self.grid.dim)
            .map(|j| {
                spec.map(|xi, c| c * Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi[j]))
                    .inverse()
            })
            .collect();
        VectorField {
            grid: self.grid,
            components,
        }
    }

    /// Spectral Laplacian, multiplier `-4 pi^2 |xi|^2`.
    pub fn laplacian(&self) -> Self {
        let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        self.forward()
            .map(|xi, c| c * (-four_pi2 * xi.iter().map(|x| x * x).sum::<f64>()))
            .inverse()
    }

    /// `g(x) = f(lambda x mod L)` on the same grid.
    pub fn dilate(&self, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::param("lambda", "must be a positive integer"));
        }
        let g = &self.grid;
        let values = (0..g.len())
            .map(|flat| {
                let mut idx = g.multi_index(flat);
                for i in idx.iter_mut().take(g.dim) {
                    *i = (*i * lambda) % g.size;
                }
                self.values[g.flat_index(&idx)]
            })
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// Every `factor`-th sample, on the grid with `N / factor` points per axis.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        let coarse = self.grid.coarsened(factor)?;
        let values = (0..coarse.len())
            .map(|flat| {
                let mut idx = coarse.multi_index(flat);
                for i in idx.iter_mut().take(coarse.dim) {
                    *i *= factor;
                }
                self.values[self.grid.flat_index(&idx)]
            })
            .collect();
        Ok(Self {
            grid: coarse,
            values,
        })
    }

    /// `g(x) = f(factor x)` sampled on the grid with `N * factor` points per
    /// axis: the field repeated `factor^n` times.
    pub fn tile(&self, factor: usize) -> Result<Self> {
        let fine = self.grid.refined(factor)?;
        let values = (0..fine.len())
            .map(|flat| {
                let mut idx = fine.multi_index(flat);
                for i in idx.iter_mut().take(fine.dim) {
                    *i %= self.grid.size;
                }
                self.values[self.grid.flat_index(&idx)]
            })
            .collect();
        Ok(Self { grid: fine, values })
    }
}

/// Fourier coefficients stored in FFT bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::param(
                "coefficients",
                format!("expected {} modes, got {}", grid.len(), coeffs.len()),
            ));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at signed wavevector `k`.
    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        let mut idx = [0usize; MAX_DIM];
        for axis in 0..self.grid.dim {
            idx[axis] = self.grid.bin(k[axis]);
        }
        self.coeffs[self.grid.flat_index(&idx)]
    }

    pub fn set_coefficient(&mut self, k: &[i64], value: Complex64) {
        let mut idx = [0usize; MAX_DIM];
        for axis in 0..self.grid.dim {
            idx[axis] = self.grid.bin(k[axis]);
        }
        let flat = self.grid.flat_index(&idx);
        self.coeffs[flat] = value;
    }

    /// Modulus of the zero-frequency coefficient.
    pub fn zero_mode(&self) -> f64 {
        self.coeffs[0].norm()
    }

    /// Applies `f(xi, c)` to every mode.
    pub fn map(&self, f: impl Fn(&[f64], Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, &c)| f(&self.grid.frequency(flat)[..self.grid.dim], c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// `sum |c|^2 / L^n`, equal to the squared L^2 norm of the inverse.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.volume()
    }

    pub fn inverse(&self) -> ScalarField {
        let mut values = self.coeffs.clone();
        fft_nd(&self.grid, &mut values, FftDirection::Inverse);
        let w = 1.0 / self.grid.volume();
        values.iter_mut().for_each(|v| *v *= w);
        ScalarField {
            grid: self.grid,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    /// Requires exactly `n` components sharing one grid.
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::param("components", "empty"))?
            .grid();
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        if components.len() != grid.dim {
            return Err(Error::param(
                "components",
                format!("expected {} components, got {}", grid.dim, components.len()),
            ));
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            components: (0..grid.dim).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    /// Spectral divergence `sum_j 2 pi i xi_j v_j_hat`.
    pub fn divergence(&self) -> ScalarField {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut acc = SpectralField::zeros(self.grid);
        for (j, comp) in self.components.iter().enumerate() {
            let spec = comp.forward();
            for (flat, c) in spec.coeffs.iter().enumerate() {
                let xi = self.grid.frequency(flat);
                acc.coeffs[flat] += c * Complex64::new(0.0, two_pi * xi[j]);
            }
        }
        acc.inverse()
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            grid: self.grid,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn try_map_components(
        &self,
        f: impl Fn(&ScalarField) -> Result<ScalarField>,
    ) -> Result<Self> {
        let components = self.components.iter().map(f).collect::<Result<Vec<_>>>()?;
        VectorField::new(components)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_components(|f| f.scale(c))
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            components,
        })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            components,
        })
    }

    /// `(sum_j ||v_j||_2^2)^{1/2}`
    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// `||div v||_2 / ||v||_2`, zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        let norm = self.l2_norm();
        if norm == 0.0 {
            0.0
        } else {
            self.divergence().l2_norm() / norm
        }
    }

    pub fn dilate(&self, lambda: usize) -> Result<Self> {
        self.try_map_components(|c| c.dilate(lambda))
    }

    pub fn subsample(&self, factor: usize) -> Result<Self> {
        self.try_map_components(|c| c.subsample(factor))
    }

    pub fn tile(&self, factor: usize) -> Result<Self> {
        self.try_map_components(|c| c.tile(factor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: Grid, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ScalarField::new(grid, values).unwrap()
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(2, 12, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(1, 16, 1.0).is_err());
        assert!(Grid::new(2, 16, 0.0).is_err());
        assert!(Grid::new(3, 8, 2.0).is_ok());
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let grid = Grid::new(2, 16, 3.0).unwrap();
        let c = Complex64::new(1.5, -0.5);
        let spec = ScalarField::constant(grid, c).forward();
        let expected = c * grid.volume();
        assert!((spec.coeffs()[0] - expected).norm() < 1e-12 * expected.norm());
        let rest: f64 = spec.coeffs()[1..].iter().map(|c| c.norm()).sum();
        assert!(rest < 1e-11);
    }

    #[test]
    fn single_mode_orthogonality() {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        let k0 = [1i64, -3, 2];
        let l = grid.length();
        let f = ScalarField::from_fn(grid, |x| {
            let phase = 2.0 * PI * (k0[0] as f64 * x[0] + k0[1] as f64 * x[1] + k0[2] as f64 * x[2]) / l;
            Complex64::from_polar(1.0, phase)
        });
        let spec = f.forward();
        for flat in 0..grid.len() {
            let k = grid.wavevector(flat);
            let c = spec.coeffs()[flat];
            if k == k0 {
                assert!((c - grid.volume()).norm() < 1e-12 * grid.volume());
            } else {
                assert!(c.norm() < 1e-12 * grid.volume(), "leak at {k:?}: {c}");
            }
        }
        // and back
        let mut single = SpectralField::zeros(grid);
        single.set_coefficient(&k0, Complex64::new(grid.volume(), 0.0));
        assert!(single.inverse().relative_distance(&f).unwrap() < 1e-12);
    }

    #[test]
    fn parseval_against_direct_sum() {
        for &n in &[8usize, 16, 32, 64] {
            let grid = Grid::new(2, n, 1.7).unwrap();
            let f = random_field(grid, n as u64);
            let spec = f.forward();
            let lhs = spec.energy();
            // direct sum, independent of the FFT path
            let rhs = grid.cell_volume() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs, "N={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn forward_matches_direct_dft_on_small_grid() {
        let grid = Grid::new(2, 8, 1.3).unwrap();
        let f = random_field(grid, 7);
        let spec = f.forward();
        let h2 = grid.cell_volume();
        for kf in 0..grid.len() {
            let k = grid.wavevector(kf);
            let mut acc = Complex64::default();
            for xf in 0..grid.len() {
                let x = grid.position(xf);
                let phase = -2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) / grid.length();
                acc += f.values()[xf] * Complex64::from_polar(1.0, phase);
            }
            acc *= h2;
            assert!((acc - spec.coeffs()[kf]).norm() < 1e-12 * (1.0 + acc.norm()));
        }
    }

    #[test]
    fn round_trip_random_fields() {
        let grid = Grid::new(2, 32, 2.5).unwrap();
        for seed in 0..100 {
            let f = random_field(grid, seed);
            let back = f.forward().inverse();
            let err = f.sub(&back).unwrap().l2_norm() / f.l2_norm();
            assert!(err <= 1e-12, "seed {seed}: {err}");
        }
        let grid3 = Grid::new(3, 16, 1.0).unwrap();
        let f = random_field(grid3, 3);
        assert!(f.sub(&f.forward().inverse()).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        assert_eq!(SpectralField::zeros(grid).inverse().max_abs(), 0.0);
    }

    #[test]
    fn gradient_of_sine() {
        let grid = Grid::new(2, 32, 3.0).unwrap();
        let l = grid.length();
        let f = ScalarField::from_real_fn(grid, |x| (2.0 * PI * x[0] / l).sin());
        let g = f.gradient();
        let expected = ScalarField::from_real_fn(grid, |x| (2.0 * PI / l) * (2.0 * PI * x[0] / l).cos());
        assert!(g.component(0).sub(&expected).unwrap().max_abs() < 1e-12);
        assert!(g.component(1).max_abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let grid = Grid::new(3, 8, 1.0).unwrap();
        let g = ScalarField::constant(grid, Complex64::new(4.0, 1.0)).gradient();
        assert!(g.max_abs() < 1e-12);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let grid = Grid::new(2, 32, 1.0).unwrap();
        let f = random_field(grid, 11);
        let lhs = f.gradient().divergence();
        // multiplier-composition oracle: (2 pi i xi_j)^2 summed = -4 pi^2 |xi|^2
        let rhs = f.laplacian();
        assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * rhs.l2_norm());
    }

    #[test]
    fn dilation_of_sine() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let f = ScalarField::from_real_fn(grid, |x| (2.0 * PI * x[0]).sin());
        assert_eq!(f.dilate(1).unwrap(), f);
        let expected = ScalarField::from_real_fn(grid, |x| (4.0 * PI * x[0]).sin());
        assert!(f.dilate(2).unwrap().sub(&expected).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn dilation_keeps_band_limited_spectrum() {
        let grid = Grid::new(2, 32, 1.0).unwrap();
        let mut spec = SpectralField::zeros(grid);
        spec.set_coefficient(&[3, -2], Complex64::new(1.0, 0.5));
        spec.set_coefficient(&[-7, 5], Complex64::new(-0.3, 0.2));
        let f = spec.inverse();
        let g = f.dilate(2).unwrap().forward();
        assert!((g.coefficient(&[6, -4]) - spec.coefficient(&[3, -2])).norm() < 1e-12);
        assert!((g.coefficient(&[-14, 10]) - spec.coefficient(&[-7, 5])).norm() < 1e-12);
        assert!(g.coefficient(&[3, -2]).norm() < 1e-12);
    }

    #[test]
    fn tile_inverts_subsample_of_dilation() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let f = random_field(grid, 5);
        let d = f.dilate(2).unwrap();
        let coarse = f.subsample(2).unwrap();
        assert_eq!(coarse.tile(2).unwrap(), d);
    }

    #[test]
    fn real_flag() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let f = ScalarField::from_real_fn(grid, |x| x[0] + 2.0);
        assert!(f.is_real(1e-12));
        assert!(f.forward().inverse().is_real(1e-12));
        assert!(!random_field(grid, 1).is_real(1e-12));
    }
}
