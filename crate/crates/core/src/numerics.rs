//! Tolerances and resolution defaults shared across modules.

use serde::{Deserialize, Serialize};

/// One place for every tolerance and "large enough" constant.
///
/// Constants the analysis only requires to be large or small enough have no
/// canonical value; the defaults below are desk-scale choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsSettings {
    /// Residual bound on the collinear gradient at a computed critical point.
    pub root_tol: f64,
    /// Hessian determinants at roots must exceed this in magnitude.
    pub det_tol: f64,
    /// Sign-change scan intervals used to bracket the critical point.
    pub p_scan_intervals: usize,
    /// Grid points for the Ψ root scan.
    pub psi_scan_points: usize,
    /// Smallest radius of the Ψ root scan.
    pub psi_scan_min: f64,
    /// |Ψ| below this without a sign change flags a suspected tangency.
    pub tangency_tol: f64,
    /// Weight exponent in Ψ*.
    pub psi_star_d0: f64,
}

impl Default for NumericsSettings {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            det_tol: 1e-6,
            p_scan_intervals: 128,
            psi_scan_points: 10_000,
            psi_scan_min: 1e-6,
            tangency_tol: 1e-9,
            psi_star_d0: 10.0,
        }
    }
}
