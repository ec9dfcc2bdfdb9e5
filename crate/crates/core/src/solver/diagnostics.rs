//! Per-species diagnostics records and the decay fit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ProfileState, Solver};
use crate::dispersion::SignedSpecies;
use crate::dyadic::{rotation_powers, sobolev_norm, z1_norm, DyadicParams, FourierField};
use crate::error::{Error, Result};
use crate::numerics::NumericsSettings;
use crate::resonance::PsiStarTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticsOptions {
    /// Sobolev order of the `H^N` column and of the energy.
    pub sobolev_order: f64,
    pub energy: bool,
    pub znorm: bool,
    pub params: DyadicParams,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        let params = DyadicParams::default();
        Self {
            sobolev_order: params.n0 as f64,
            energy: false,
            znorm: false,
            params,
        }
    }
}

impl DiagnosticsOptions {
    /// Cheapest record: no rotations and no `Z` norm.
    pub fn basic() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            energy: true,
            znorm: true,
            ..Self::default()
        }
    }
}

/// One row of the series; norms are the contribution of one species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub species: usize,
    pub linf_u: f64,
    pub l2_v: f64,
    pub sobolev: f64,
    pub energy: Option<f64>,
    pub znorm: Option<f64>,
    /// `‖V_σ(t) − V_σ(0)‖_{L²}`.
    pub scatter_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub records: Vec<DiagnosticRecord>,
}

impl DiagnosticsSeries {
    pub fn for_species(&self, species: usize) -> impl Iterator<Item = &DiagnosticRecord> {
        self.records.iter().filter(move |r| r.species == species)
    }

    /// `(t, ‖u_σ(t)‖_{L^∞})` pairs.
    pub fn linf_series(&self, species: usize) -> Vec<(f64, f64)> {
        self.for_species(species).map(|r| (r.t, r.linf_u)).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.records.iter().map(|r| r.t).collect();
        t.dedup();
        t
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(r).map_err(|e| Error::Numeric(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numeric(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()?).map_err(|e| Error::io(path, e))
    }
}

pub(super) struct Context {
    options: DiagnosticsOptions,
    table: Option<PsiStarTable>,
}

impl Context {
    pub(super) fn new(solver: &Solver, options: &DiagnosticsOptions) -> Result<Self> {
        let table = if options.znorm {
            let grid = FourierField::zeros(solver.config.n, solver.config.half_length)?;
            Some(crate::dyadic::psi_star_table_for(
                &solver.system,
                &grid,
                &options.params,
                &NumericsSettings::default(),
            )?)
        } else {
            None
        };
        Ok(Self {
            options: options.clone(),
            table,
        })
    }

    pub(super) fn records(&self, solver: &Solver, state: &ProfileState, reference: &ProfileState) -> Vec<DiagnosticRecord> {
        (0..state.d())
            .map(|s| {
                let v = solver.v_hat(state, s);
                let u = solver.u_hat_from_v(&v, s).to_physical();
                let linf_u = u.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
                let sobolev = sobolev_norm(&v, self.options.sobolev_order);
                let p = &self.options.params;
                let energy = self.options.energy.then(|| {
                    let rot: f64 = rotation_powers(&v, p.omega_rotations())
                        .iter()
                        .skip(1)
                        .map(|f| f.l2_norm().powi(2))
                        .sum();
                    0.5 * (sobolev * sobolev + rot)
                });
                let znorm = self.table.as_ref().map(|table| {
                    rotation_powers(&state.profiles[s], p.z_rotations())
                        .iter()
                        .map(|f| z1_norm(f, SignedSpecies::raw(s as i32 + 1), table, p))
                        .fold(0.0, f64::max)
                });
                DiagnosticRecord {
                    t: state.t,
                    species: s + 1,
                    linf_u,
                    l2_v: v.l2_norm(),
                    sobolev,
                    energy,
                    znorm,
                    scatter_residual: state.profiles[s].sub(&reference.profiles[s]).l2_norm(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub samples: usize,
}

/// Least-squares slope of `log y` against `log t` over `t ∈ [t0, t1]`.
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if pts.len() < 8 {
        return Err(Error::Precondition(format!(
            "decay fit needs at least 8 samples in the window, found {}",
            pts.len()
        )));
    }
    if pts.iter().any(|&(t, y)| !(t > 0.0 && y > 0.0 && y.is_finite())) {
        return Err(Error::Precondition("decay fit needs positive times and norms".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("decay fit window spans a single time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        exponent: slope,
        intercept,
        residual,
        samples: pts.len(),
    })
}
