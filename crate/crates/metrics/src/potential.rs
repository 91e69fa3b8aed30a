//! Kähler potentials sampled on a fibre grid.

use std::path::Path;

use crate::geometry::{FiberGeometry, FiberKind, Node};
use crate::MetricsError;
use num_complex::Complex64;

/// Positivity margin for ω_φ/ω at nodes.
pub const KAHLER_MARGIN: f64 = 1e-10;

/// φ at the grid nodes with ω_φ = ω + dd^c φ = f·ω.
#[derive(Debug, Clone)]
pub struct PotentialField {
    geometry: FiberGeometry,
    samples: Vec<f64>,
    density: Vec<f64>,
}

impl PotentialField {
    pub fn new(geometry: FiberGeometry, samples: Vec<f64>) -> Result<Self, MetricsError> {
        if samples.len() != geometry.len() {
            return Err(MetricsError::GeometryMismatch(format!("{} samples for a grid of {} nodes", samples.len(), geometry.len())));
        }
        let density = geometry.density_operator(&samples).into_iter().map(|d| 1.0 + d).collect();
        Ok(PotentialField { geometry, samples, density })
    }

    pub fn from_fn(geometry: FiberGeometry, f: impl Fn(Node) -> f64) -> Self {
        let samples = geometry.nodes().into_iter().map(f).collect();
        Self::new(geometry, samples).expect("sample count matches grid")
    }

    pub fn zero(geometry: FiberGeometry) -> Self {
        let n = geometry.len();
        Self::new(geometry, vec![0.0; n]).expect("sample count matches grid")
    }

    pub fn geometry(&self) -> &FiberGeometry {
        &self.geometry
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// f = ω_φ/ω at the nodes.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn check_kahler(&self) -> Result<(), MetricsError> {
        for (i, &f) in self.density.iter().enumerate() {
            if !(f > KAHLER_MARGIN) {
                return Err(MetricsError::NonKahler { node: i, density: f });
            }
        }
        Ok(())
    }

    pub fn is_kahler(&self) -> bool {
        self.check_kahler().is_ok()
    }

    pub fn plus(&self, other: &PotentialField) -> Result<PotentialField, MetricsError> {
        if !self.geometry.same_grid(&other.geometry) {
            return Err(MetricsError::GeometryMismatch("potentials live on different grids".into()));
        }
        let s = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        PotentialField::new(self.geometry.clone(), s)
    }

    pub fn scaled(&self, c: f64) -> PotentialField {
        let s = self.samples.iter().map(|a| a * c).collect();
        PotentialField::new(self.geometry.clone(), s).expect("same grid")
    }

    pub fn add_constant(&self, c: f64) -> PotentialField {
        let s = self.samples.iter().map(|a| a + c).collect();
        PotentialField::new(self.geometry.clone(), s).expect("same grid")
    }
}

/// Load a grid potential from CSV. The first record names the geometry,
/// `sphere,<n_theta>,<n_psi>,<degree>` or `torus,<re τ>,<im τ>,<n>,<degree>`;
/// the remaining records are the grid rows (latitudes or s-rows), row-major.
pub fn potential_from_csv(text: &str) -> Result<PotentialField, MetricsError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let mut records = rdr.records();
    let head = records.next().ok_or_else(|| MetricsError::Parse("empty potential file".into()))?.map_err(|e| MetricsError::Parse(e.to_string()))?;
    let num = |i: usize| -> Result<f64, MetricsError> {
        head.get(i).ok_or_else(|| MetricsError::Parse(format!("header field {i} missing")))?.parse::<f64>().map_err(|e| MetricsError::Parse(format!("header field {i}: {e}")))
    };
    let geometry = match head.get(0) {
        Some("sphere") => FiberGeometry::sphere(num(1)? as usize, num(2)? as usize, num(3)? as u32)?,
        Some("torus") => FiberGeometry::torus(Complex64::new(num(1)?, num(2)?), num(3)? as usize, num(4)? as u32)?,
        other => return Err(MetricsError::Parse(format!("unknown geometry {other:?}"))),
    };
    let (rows, cols) = geometry.shape();
    let mut samples = Vec::with_capacity(rows * cols);
    for rec in records {
        let rec = rec.map_err(|e| MetricsError::Parse(e.to_string()))?;
        if rec.len() != cols {
            return Err(MetricsError::Parse(format!("row of {} values, expected {cols}", rec.len())));
        }
        for v in rec.iter() {
            samples.push(v.parse::<f64>().map_err(|e| MetricsError::Parse(format!("{v:?}: {e}")))?);
        }
    }
    if samples.len() != rows * cols {
        return Err(MetricsError::Parse(format!("{} values, expected {}", samples.len(), rows * cols)));
    }
    PotentialField::new(geometry, samples)
}

pub fn load_potential(path: &Path) -> Result<PotentialField, MetricsError> {
    let text = std::fs::read_to_string(path).map_err(|e| MetricsError::Io(format!("{}: {e}", path.display())))?;
    potential_from_csv(&text)
}

pub fn potential_to_csv(phi: &PotentialField) -> String {
    let g = phi.geometry();
    let (rows, cols) = g.shape();
    let mut out = match g.kind() {
        FiberKind::Sphere => format!("sphere,{rows},{cols},{}\n", g.degree()),
        FiberKind::Torus { tau } => format!("torus,{:?},{:?},{rows},{}\n", tau.re, tau.im, g.degree()),
    };
    for r in 0..rows {
        let line: Vec<String> = phi.samples()[r * cols..(r + 1) * cols].iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
