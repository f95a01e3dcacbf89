//! Quadrature rules: Gauss–Jacobi (Golub–Welsch) and adaptive Gauss–Kronrod.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Gauss–Jacobi rule on `[-1, 1]` for the weight `(1 - x)^a (1 + x)^b`.
    pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQuadrature("zero nodes".into()));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::InvalidQuadrature(format!(
                "Jacobi exponents ({a}, {b}) must exceed -1"
            )));
        }
        let ab = a + b;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        diag[0] = (b - a) / (ab + 2.0);
        for (k, d) in diag.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            *d = (b * b - a * a) / (s * (s + 2.0));
        }
        for (i, o) in off.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let s = 2.0 * k + ab;
            let beta = if i == 0 {
                // (k + a + b) / (2k + a + b - 1) cancels at k = 1
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            *o = beta.sqrt();
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jac[(i, i)] = diag[i];
            if i + 1 < n {
                jac[(i, i + 1)] = off[i];
                jac[(i + 1, i)] = off[i];
            }
        }
        let eig = SymmetricEigen::new(jac);
        let mu0 = 2f64.powf(ab + 1.0) * libm::tgamma(a + 1.0) * libm::tgamma(b + 1.0)
            / libm::tgamma(ab + 2.0);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn gauss_legendre(n: usize) -> Result<Self> {
        Self::gauss_jacobi(n, 0.0, 0.0)
    }

    /// Rule on `(0, r)` for the weight `t^power`, `power > -1`.
    ///
    /// `sum w_i g(t_i)` approximates `int_0^r t^power g(t) dt`.
    pub fn power_weight(n: usize, power: f64, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidQuadrature(format!("interval length {r}")));
        }
        let base = Self::gauss_jacobi(n, 0.0, power)?;
        let scale = (r / 2.0).powf(1.0 + power);
        Ok(Self {
            nodes: base.nodes.iter().map(|x| r * (1.0 + x) / 2.0).collect(),
            weights: base.weights.iter().map(|w| w * scale).collect(),
        })
    }

    /// Plain Gauss–Legendre rule mapped to `[a, b]`.
    pub fn legendre_on(n: usize, a: f64, b: f64) -> Result<Self> {
        let base = Self::gauss_legendre(n)?;
        let half = (b - a) / 2.0;
        Ok(Self {
            nodes: base.nodes.iter().map(|x| a + half * (1.0 + x)).collect(),
            weights: base.weights.iter().map(|w| w * half).collect(),
        })
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel: (estimate, |Kronrod - Gauss|).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod integration on a finite interval.
///
/// Bisects the panel with the largest error until the summed error estimate
/// is below `max(abs_tol, rel_tol * |value|)` or `max_panels` is reached.
pub fn adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Integral {
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || panels.len() >= max_panels {
            return Integral { value, error };
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine precision
            panels.push((lo, hi, 0.0, 0.0));
            let (v, _) = gk15(&f, lo, hi);
            panels.last_mut().unwrap().2 = v;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}
