//! Discretised BMO, Morrey, Q_alpha and Carleson-type functionals.

pub mod carleson;
pub mod oscillation;
pub mod sobolev;
pub mod windows;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use carleson::{
    bmo_inverse_windows, carleson_functional, carleson_l1, qinv_norm, vanishing_check, vector_qinv_norm,
    vector_x_norm, x_norm,
    CarlesonKind, XNorm,
};
pub use oscillation::{bmo_norm, morrey_norm, qalpha_norm};
pub use sobolev::{sobolev_seminorm, Side};
pub use windows::{Geometry, Resolution, Window, WindowFamily};

/// Default number of Gauss–Jacobi nodes per window.
pub const DEFAULT_NODES: usize = 32;

/// Window shape a functional uses when none is requested: cubes for the
/// oscillation norms, balls for the Carleson family.
pub fn default_geometry(kind: &str) -> Geometry {
    match kind {
        "qalpha" | "bmo" | "morrey" => Geometry::Cube,
        _ => Geometry::Ball,
    }
}

/// Evaluates a windowed functional by name. `horizon` is used by `qinv` and
/// `bmo-inverse` only.
pub fn evaluate(
    f: &crate::field::ScalarField,
    kind: &str,
    alpha: f64,
    horizon: f64,
    family: &WindowFamily,
    nodes: usize,
) -> Result<NormReport> {
    match kind {
        "qalpha" => qalpha_norm(f, alpha, family),
        "bmo" => bmo_norm(f, family),
        "morrey" => morrey_norm(f, alpha, family),
        "qinv" => qinv_norm(f, alpha, horizon, family, nodes),
        "bmo-inverse" => bmo_inverse_windows(f, alpha, horizon, family, nodes),
        other => carleson_functional(f, alpha, &CarlesonKind::parse(other)?, family, nodes),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowValue {
    pub cx: f64,
    pub cy: f64,
    pub cz: Option<f64>,
    pub r: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub kind: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub geometry: String,
    pub stride: usize,
    pub samples_per_side: Option<usize>,
    pub quadrature_nodes: Option<usize>,
    pub argmax: usize,
    pub pair_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub alpha: f64,
    /// `None` stands for an infinite horizon.
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub windows: Vec<WindowValue>,
    pub meta: ReportMeta,
}

pub const CSV_HEADER: &str = "cx,cy,cz,r,value";

impl NormReport {
    pub(crate) fn assemble(
        kind: &str,
        alpha: f64,
        horizon: f64,
        family: &WindowFamily,
        values: Vec<f64>,
        nodes: Option<usize>,
        pair_count: u64,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyWindowFamily);
        }
        let grid = family.grid();
        let (argmax, _) = first_max(&values);
        let windows = family
            .windows()
            .iter()
            .zip(&values)
            .map(|(w, &value)| {
                let x = w.position(grid);
                WindowValue {
                    cx: x[0],
                    cy: x[1],
                    cz: (grid.dim() == 3).then_some(x[2]),
                    r: w.radius,
                    value,
                }
            })
            .collect();
        Ok(Self {
            value: values[argmax],
            alpha,
            horizon: horizon.is_finite().then_some(horizon),
            windows,
            meta: ReportMeta {
                kind: kind.to_string(),
                n: grid.dim(),
                size: grid.size(),
                length: grid.length(),
                geometry: match family.geometry() {
                    Geometry::Cube => "cube".into(),
                    Geometry::Ball => "ball".into(),
                },
                stride: family.stride(),
                samples_per_side: match family.resolution() {
                    Resolution::Full => None,
                    Resolution::PerSide(p) => Some(p),
                },
                quadrature_nodes: nodes,
                argmax,
                pair_count,
            },
        })
    }

    pub fn argmax_window(&self) -> &WindowValue {
        &self.windows[self.meta.argmax]
    }

    pub fn window_values(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.value).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per window.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for w in &self.windows {
            let cz = w.cz.map(|z| z.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{}", w.cx, w.cy, cz, w.r, w.value);
        }
        out
    }

    pub fn windows_from_csv(text: &str) -> Result<Vec<WindowValue>> {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(Error::Format("missing window CSV header".into()));
        }
        lines
            .map(|line| {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() != 5 {
                    return Err(Error::Format(format!("bad CSV row `{line}`")));
                }
                let num = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Format(format!("bad number `{s}`")))
                };
                Ok(WindowValue {
                    cx: num(cols[0])?,
                    cy: num(cols[1])?,
                    cz: if cols[2].is_empty() { None } else { Some(num(cols[2])?) },
                    r: num(cols[3])?,
                    value: num(cols[4])?,
                })
            })
            .collect()
    }
}

pub(crate) fn check_open_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Order-stable maximum with its first index.
pub(crate) fn first_max(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    (best, values[best])
}
