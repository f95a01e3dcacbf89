//! Window families over which the sup-type norms are taken.

use crate::error::{Error, Result};
use crate::field::{Grid, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Cube,
    Ball,
}

/// How many samples of a window enter its sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Every grid point inside the window.
    Full,
    /// `p` samples per side, spaced `2r / (h p)` grid cells apart.
    ///
    /// A window of the dilated family then samples exactly the points of the
    /// original window, which makes dyadic dilation invariance exact.
    PerSide(usize),
}

/// A window centred on grid index `center` with radius `radius`.
///
/// Cubes have side `2 * radius`; `span` is that side in grid cells (balls
/// use it only to derive `step`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: [usize; MAX_DIM],
    pub radius: f64,
    pub span: usize,
    pub step: usize,
}

impl Window {
    pub fn position(&self, grid: &Grid) -> [f64; MAX_DIM] {
        let h = grid.spacing();
        let mut x = [0.0; MAX_DIM];
        for axis in 0..grid.dim() {
            x[axis] = self.center[axis] as f64 * h;
        }
        x
    }
}

/// Lifted index offsets of a window's samples, relative to its centre.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub offsets: Vec<[i64; MAX_DIM]>,
    /// Samples per side for cubes; zero for balls.
    pub per_side: usize,
    pub step: usize,
}

#[derive(Debug, Clone)]
pub struct WindowFamily {
    grid: Grid,
    geometry: Geometry,
    stride: usize,
    radii: Vec<f64>,
    resolution: Resolution,
    cap: usize,
    windows: Vec<Window>,
}

pub const DEFAULT_CAP: usize = 4096;

impl WindowFamily {
    /// Default family: centre stride `N / 8`, radii `L 2^-j` for
    /// `j = 1..=log2(N) - 2`, every sample, at most 4096 samples per window.
    pub fn new(grid: Grid, geometry: Geometry) -> Result<Self> {
        let levels = grid.size().trailing_zeros() as i32;
        let radii = (1..=levels - 2)
            .map(|j| grid.length() * 2f64.powi(-j))
            .collect();
        Self::build(grid, geometry, grid.size() / 8, radii, Resolution::Full, DEFAULT_CAP)
    }

    pub fn with_stride(self, stride: usize) -> Result<Self> {
        Self::build(self.grid, self.geometry, stride, self.radii, self.resolution, self.cap)
    }

    pub fn with_radii(self, radii: Vec<f64>) -> Result<Self> {
        Self::build(self.grid, self.geometry, self.stride, radii, self.resolution, self.cap)
    }

    pub fn with_resolution(self, resolution: Resolution) -> Result<Self> {
        Self::build(self.grid, self.geometry, self.stride, self.radii, resolution, self.cap)
    }

    pub fn with_cap(self, cap: usize) -> Result<Self> {
        Self::build(self.grid, self.geometry, self.stride, self.radii, self.resolution, cap)
    }

    /// Family whose windows are the images of this one's under `x -> x / lambda`.
    pub fn dilated(&self, lambda: usize) -> Result<Self> {
        if lambda == 0 || self.stride % lambda != 0 {
            return Err(Error::param(
                "lambda",
                format!("{lambda} must divide the centre stride {}", self.stride),
            ));
        }
        let radii = self.radii.iter().map(|r| r / lambda as f64).collect();
        Self::build(
            self.grid,
            self.geometry,
            self.stride / lambda,
            radii,
            self.resolution,
            self.cap,
        )
    }

    /// Images of this family's windows under `x -> x / lambda` on the grid
    /// refined by `lambda`, the grid of [`ScalarField::tile`]. Every window
    /// samples the same points as its preimage.
    ///
    /// [`ScalarField::tile`]: crate::field::ScalarField::tile
    pub fn tiled(&self, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::param("lambda", "must be a positive integer"));
        }
        let radii = self.radii.iter().map(|r| r / lambda as f64).collect();
        Self::build(
            self.grid.refined(lambda)?,
            self.geometry,
            self.stride,
            radii,
            self.resolution,
            self.cap,
        )
    }

    fn build(
        grid: Grid,
        geometry: Geometry,
        stride: usize,
        mut radii: Vec<f64>,
        resolution: Resolution,
        cap: usize,
    ) -> Result<Self> {
        if stride == 0 {
            return Err(Error::param("stride", "must be positive"));
        }
        if let Resolution::PerSide(0) = resolution {
            return Err(Error::param("resolution", "samples per side must be positive"));
        }
        let h = grid.spacing();
        for &r in &radii {
            if !(r > 0.0 && r <= grid.length() / 2.0 * (1.0 + 1e-12)) {
                return Err(Error::param("radius", format!("{r} not in (0, L/2]")));
            }
        }
        radii.sort_by(|a, b| b.total_cmp(a));
        radii.dedup();
        let mut windows = Vec::new();
        let per_axis = grid.size().div_ceil(stride);
        let centers = per_axis.pow(grid.dim() as u32);
        for &r in &radii {
            let (span, step) = Self::span_and_step(geometry, resolution, r, h)?;
            let count = Self::sample_count(grid.dim(), geometry, r, h, step, span);
            if count > cap {
                continue;
            }
            for c in 0..centers {
                let mut center = [0usize; MAX_DIM];
                let mut rest = c;
                for axis in (0..grid.dim()).rev() {
                    center[axis] = (rest % per_axis) * stride;
                    rest /= per_axis;
                }
                windows.push(Window {
                    center,
                    radius: r,
                    span,
                    step,
                });
            }
        }
        Ok(Self {
            grid,
            geometry,
            stride,
            radii,
            resolution,
            cap,
            windows,
        })
    }

    fn span_and_step(
        geometry: Geometry,
        resolution: Resolution,
        r: f64,
        h: f64,
    ) -> Result<(usize, usize)> {
        let exact = 2.0 * r / h;
        let span = exact.round() as usize;
        let integral = span > 0 && (exact - span as f64).abs() <= 1e-9 * exact;
        match (geometry, resolution) {
            (Geometry::Ball, Resolution::Full) => Ok((span.max(1), 1)),
            (Geometry::Cube, Resolution::Full) if integral => Ok((span, 1)),
            (_, Resolution::PerSide(p)) if integral && span % p == 0 => Ok((span, span / p)),
            _ => Err(Error::param(
                "radius",
                format!("2r/h = {exact} is not a positive integer multiple of the per-side count"),
            )),
        }
    }

    fn sample_count(dim: usize, geometry: Geometry, r: f64, h: f64, step: usize, span: usize) -> usize {
        match geometry {
            Geometry::Cube => (span / step).pow(dim as u32),
            Geometry::Ball => ball_offsets(dim, r, h, step).len(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Windows satisfying `keep(radius)`.
    pub fn filtered(&self, keep: impl Fn(f64) -> bool) -> Self {
        let mut out = self.clone();
        out.windows.retain(|w| keep(w.radius));
        out.radii.retain(|&r| keep(r));
        out
    }

    /// Distinct radii that still have windows, descending.
    pub fn active_radii(&self) -> Vec<f64> {
        let mut radii: Vec<f64> = self.windows.iter().map(|w| w.radius).collect();
        radii.dedup();
        radii
    }

    pub fn stencil(&self, window: &Window) -> Stencil {
        let dim = self.grid.dim();
        match self.geometry {
            Geometry::Cube => {
                let p = window.span / window.step;
                let half = (window.span / 2) as i64;
                let s = window.step as i64;
                let offsets = (0..p.pow(dim as u32))
                    .map(|mut flat| {
                        let mut off = [0i64; MAX_DIM];
                        for axis in (0..dim).rev() {
                            off[axis] = -half + s * (flat % p) as i64;
                            flat /= p;
                        }
                        off
                    })
                    .collect();
                Stencil {
                    offsets,
                    per_side: p,
                    step: window.step,
                }
            }
            Geometry::Ball => Stencil {
                offsets: ball_offsets(dim, window.radius, self.grid.spacing(), window.step),
                per_side: 0,
                step: window.step,
            },
        }
    }
}

/// Lifted offsets `step * d` with `|step * d * h| < r`.
pub fn ball_offsets(dim: usize, r: f64, h: f64, step: usize) -> Vec<[i64; MAX_DIM]> {
    let unit = step as f64 * h;
    let reach = (r / unit).ceil() as i64;
    let width = (2 * reach + 1) as usize;
    let mut out = Vec::new();
    for flat in 0..width.pow(dim as u32) {
        let mut d = [0i64; MAX_DIM];
        let mut rest = flat;
        for axis in (0..dim).rev() {
            d[axis] = (rest % width) as i64 - reach;
            rest /= width;
        }
        let dist2: f64 = d[..dim].iter().map(|&x| (x as f64 * unit).powi(2)).sum();
        if dist2.sqrt() < r {
            let mut off = [0i64; MAX_DIM];
            for axis in 0..dim {
                off[axis] = d[axis] * step as i64;
            }
            out.push(off);
        }
    }
    out
}
