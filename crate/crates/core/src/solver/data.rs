//! Run configuration documents and initial data.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{symmetrize, DiagnosticsOptions, ProfileState, Solver, SolverConfig};
use crate::dispersion::{SpeciesParams, SystemConfig};
use crate::dyadic::FourierField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum InitialData {
    /// `g = ε Σ_c exp(−|x−c|²/(2w²))` for every species, `h = 0`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default = "origin")]
        centers: Vec<[f64; 2]>,
    },
    /// `u = ε cos(ξ₀·x − Λ(ξ₀)t)` with `ξ₀ = (π/L)·mode` for every species.
    PlaneWave { amplitude: f64, mode: [i64; 2] },
}

fn origin() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}

impl InitialData {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Self::Gaussian {
            amplitude,
            width,
            centers: origin(),
        }
    }

    /// Radius outside which the data is below `1e−16` of its peak.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Gaussian { width, centers, .. } => {
                let c = centers.iter().map(|c| (c[0] * c[0] + c[1] * c[1]).sqrt()).fold(0.0, f64::max);
                c + width * (2.0 * 16.0 * std::f64::consts::LN_10).sqrt()
            }
            Self::PlaneWave { .. } => f64::INFINITY,
        }
    }

    pub fn initial_state(&self, solver: &Solver) -> Result<ProfileState> {
        let cfg = solver.config();
        let (n, l) = (cfg.n, cfg.half_length);
        let d = solver.system().d();
        let grid = FourierField::zeros(n, l)?;
        let sample = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
            (0..n * n)
                .map(|k| {
                    let x = grid.x(k / n, k % n);
                    f(x.x, x.y)
                })
                .collect()
        };
        match self {
            Self::Gaussian {
                amplitude,
                width,
                centers,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::Config("gaussian width must be positive".into()));
                }
                let g = sample(&|x, y| {
                    amplitude
                        * centers
                            .iter()
                            .map(|c| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (2.0 * width * width)).exp())
                            .sum::<f64>()
                });
                let zero = vec![0.0; n * n];
                solver.init_from_physical(&vec![g; d], &vec![zero; d])
            }
            Self::PlaneWave { amplitude, mode } => {
                let xi0 = crate::dispersion::Vec2::new(mode[0] as f64, mode[1] as f64) * (std::f64::consts::PI / l);
                let mut gs = Vec::with_capacity(d);
                let mut hs = Vec::with_capacity(d);
                for s in 0..d {
                    let lam = solver.branch(s).lambda(&xi0);
                    let g = sample(&|x, y| amplitude * (xi0.x * x + xi0.y * y).cos());
                    let h = sample(&|x, y| amplitude * lam * (xi0.x * x + xi0.y * y).sin());
                    gs.push(g);
                    hs.push(h);
                }
                solver.init_from_physical(&gs, &hs)
            }
        }
    }
}

/// Requested diagnostic times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Times(Vec<f64>),
    Every { every: f64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Self::Times(Vec::new())
    }
}

impl Schedule {
    pub fn times(&self, t_final: f64) -> Vec<f64> {
        match self {
            Self::Times(t) => t.clone(),
            Self::Every { every } if *every > 0.0 => {
                let n = (t_final / every + 1e-9).floor() as usize;
                (0..=n).map(|i| i as f64 * every).collect()
            }
            Self::Every { .. } => Vec::new(),
        }
    }
}

/// The `simulate` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: usize,
    #[serde(rename = "box")]
    pub half_length: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub data: InitialData,
    pub species: Vec<SpeciesParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default = "two_thirds")]
    pub dealias: f64,
    #[serde(default)]
    pub diagnostics: DiagnosticsOptions,
}

fn two_thirds() -> f64 {
    2.0 / 3.0
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn system(&self) -> Result<SystemConfig> {
        let mut doc = serde_json::json!({ "species": self.species });
        if let Some(c) = &self.coupling {
            doc["coupling"] = serde_json::to_value(c)?;
        }
        SystemConfig::from_json_value(doc)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dealias: self.dealias,
            ..SolverConfig::new(self.grid, self.half_length, self.dt, self.t_final)
        }
    }

    pub fn build(&self) -> Result<(Solver, ProfileState)> {
        let solver = Solver::new(self.system()?, self.solver_config())?;
        let state = self.data.initial_state(&solver)?;
        Ok((solver, state))
    }
}

/// `ĝ` of an arbitrary real physical field, symmetrized.
pub fn real_field(n: usize, half_length: f64, samples: &[f64]) -> Result<FourierField> {
    FourierField::from_physical(n, half_length, samples.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .map(|f| symmetrize(&f))
}
