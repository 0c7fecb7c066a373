//! Problem configuration files.

use std::path::Path;

use halfline_core::matkernel::{c, ComplexMatrix};
use halfline_core::{BoundaryPair, PotentialModel};
use serde::Deserialize;

use crate::CliError;

/// `[re, im]`.
pub type Complex = [f64; 2];
/// Row-major `n x n` matrix of `[re, im]` entries.
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    pub boundary: BoundaryConfig,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Matrices {
        #[serde(rename = "A")]
        a: Matrix,
        #[serde(rename = "B")]
        b: Matrix,
    },
    Theta {
        theta: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    // braces so that stray keys next to the tag are rejected
    Zero {},
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<Matrix> },
    SampledGrid { xs: Vec<f64>, values: Vec<Matrix> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub integrator_tol: Option<f64>,
    pub kernel_tol: Option<f64>,
    pub class_tol: Option<f64>,
    pub refine_tol: Option<f64>,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if cfg.n == 0 {
            return Err(CliError::Parse("field `n`: must be at least 1".into()));
        }
        Ok(cfg)
    }

    /// The raw `(A, B)` pair, shape-checked but not validated.
    pub fn boundary_matrices(&self) -> Result<(ComplexMatrix, ComplexMatrix), CliError> {
        match &self.boundary {
            BoundaryConfig::Matrices { a, b } => {
                Ok((to_matrix(a, self.n, "boundary.A")?, to_matrix(b, self.n, "boundary.B")?))
            }
            BoundaryConfig::Theta { theta } => {
                if theta.len() != self.n {
                    return Err(CliError::Parse(format!(
                        "field `boundary.theta`: expected {} angles, got {}",
                        self.n,
                        theta.len()
                    )));
                }
                Ok(halfline_core::boundary::theta_pair(theta))
            }
        }
    }

    pub fn boundary_pair(&self) -> Result<BoundaryPair, CliError> {
        let (a, b) = self.boundary_matrices()?;
        Ok(BoundaryPair::new(a, b)?)
    }

    pub fn potential_model(&self) -> Result<PotentialModel, CliError> {
        match &self.potential {
            PotentialConfig::Zero {} => Ok(PotentialModel::zero(self.n)),
            PotentialConfig::PiecewiseConstant { breakpoints, values } => {
                let values = to_matrices(values, self.n)?;
                Ok(PotentialModel::piecewise_constant(breakpoints.clone(), values)?)
            }
            PotentialConfig::SampledGrid { xs, values } => {
                let values = to_matrices(values, self.n)?;
                Ok(PotentialModel::sampled_grid(xs.clone(), values)?)
            }
        }
    }

    pub fn k_grid(&self) -> Result<Vec<f64>, CliError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Parse("field `grid`: required for this command".into()))?;
        if g.k_count == 0 || !(g.k_max >= g.k_min) || !(g.k_min >= 0.0) {
            return Err(CliError::Parse(format!(
                "field `grid`: need 0 <= k_min <= k_max and k_count >= 1 (got {}, {}, {})",
                g.k_min, g.k_max, g.k_count
            )));
        }
        if g.spacing == Spacing::Log && g.k_min <= 0.0 {
            return Err(CliError::Parse("field `grid.k_min`: log spacing needs k_min > 0".into()));
        }
        if g.k_count == 1 {
            return Ok(vec![g.k_min]);
        }
        let last = (g.k_count - 1) as f64;
        Ok((0..g.k_count)
            .map(|j| {
                let t = j as f64 / last;
                match g.spacing {
                    Spacing::Linear => g.k_min + t * (g.k_max - g.k_min),
                    Spacing::Log => (g.k_min.ln() + t * (g.k_max / g.k_min).ln()).exp(),
                }
            })
            .collect())
    }
}

fn to_matrices(values: &[Matrix], n: usize) -> Result<Vec<ComplexMatrix>, CliError> {
    values
        .iter()
        .enumerate()
        .map(|(j, m)| to_matrix(m, n, &format!("potential.values[{j}]")))
        .collect()
}

pub fn to_matrix(rows: &Matrix, n: usize, field: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Parse(format!("field `{field}`: expected a {n}x{n} matrix")));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}
