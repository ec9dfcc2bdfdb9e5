//! Resonance geometry of the phases: critical points, reduced phases and
//! their roots, nondegeneracy checks, lower-bound certification and
//! level-set volumes.

pub mod certify;
pub mod critical;
pub mod volume;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use certify::{certify_lower_bounds, CertificationReport, CertifyRegion, LemmaId, LemmaResult};
pub use critical::{
    admissible_pairs, find_psi_roots, hessian_det_at_roots, psi, psi_star, solve_p_plus, PsiRoots, PsiStarTable,
    RootHessian,
};
pub use volume::{level_set_volume, wilson_interval, VolumeQuantity, VolumeSpec, VolumeTable};

use crate::dispersion::SystemConfig;
use crate::error::Result;
use crate::numerics::NumericsSettings;
use crate::phase::{Phase, PhaseTriple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleFlags {
    pub triple: PhaseTriple,
    pub mass_defect: f64,
    pub mass_ok: bool,
    pub speed_mass_product: f64,
    pub speed_mass_ok: bool,
}

impl TripleFlags {
    pub fn pass(&self) -> bool {
        self.mass_ok && self.speed_mass_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    /// Conditions with positive indices and the configured masses.
    pub unsigned: Vec<TripleFlags>,
    /// Conditions for every signed triple, with `b_{−α} = −b_α`.
    pub signed: Vec<TripleFlags>,
    pub unsigned_pass: bool,
    pub signed_pass: bool,
    /// Verdict used for the hypotheses: the unsigned conjunction.
    pub pass: bool,
}

/// Mass defect and speed–mass sign condition for one triple.
pub fn triple_flags(config: &SystemConfig, t: PhaseTriple) -> Result<TripleFlags> {
    let (bs, bm, bn) = (config.mass(t.sigma)?, config.mass(t.mu)?, config.mass(t.nu)?);
    let (cm, cn) = (config.speed(t.mu)?, config.speed(t.nu)?);
    let defect = bs - bm - bn;
    let prod = (cm - cn) * (cm * cm * bn - cn * cn * bm);
    Ok(TripleFlags {
        triple: t,
        mass_defect: defect,
        mass_ok: defect != 0.0,
        speed_mass_product: prod,
        speed_mass_ok: prod >= 0.0,
    })
}

pub fn check_nondegeneracy(config: &SystemConfig) -> NondegeneracyReport {
    let d = config.d() as i32;
    let mut unsigned = Vec::new();
    for s in 1..=d {
        for m in 1..=d {
            for n in 1..=d {
                unsigned.push(triple_flags(config, PhaseTriple::new(s, m, n)).expect("in range"));
            }
        }
    }
    let signed: Vec<TripleFlags> = PhaseTriple::all_signed(config.d())
        .into_iter()
        .map(|t| triple_flags(config, t).expect("in range"))
        .collect();
    let unsigned_pass = unsigned.iter().all(TripleFlags::pass);
    let signed_pass = signed.iter().all(TripleFlags::pass);
    NondegeneracyReport {
        unsigned,
        signed,
        unsigned_pass,
        signed_pass,
        pass: unsigned_pass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialResonance {
    pub triple: PhaseTriple,
    pub s_grid: Vec<f64>,
    pub p_plus: Vec<Option<f64>>,
    pub psi: Vec<Option<f64>>,
    pub roots: Vec<f64>,
    pub suspected_non_simple: Vec<f64>,
    pub hessian_dets: Vec<RootHessian>,
}

impl RadialResonance {
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "s,p_plus,psi")?;
        for i in 0..self.s_grid.len() {
            let f = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
            writeln!(w, "{:?},{},{}", self.s_grid[i], f(self.p_plus[i]), f(self.psi[i]))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonantPoint {
    pub triple: PhaseTriple,
    /// `ξ = α e`.
    pub alpha: f64,
    /// `η = β e`.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub nondegeneracy: NondegeneracyReport,
    pub triples: Vec<RadialResonance>,
    pub resonant_set: Vec<ResonantPoint>,
    pub certification: Option<CertificationReport>,
}

/// Radial resonance data for every signed triple with `μ + ν ≠ 0`, on a
/// uniform grid of `points` radii over `[psi_scan_min, s_max]`.
///
/// `p_+` depends only on `(μ, ν)`, so it is solved once per pair and shared
/// across `σ`.
pub fn analyze(
    config: &SystemConfig,
    s_max: f64,
    settings: &NumericsSettings,
) -> Result<ResonanceReport> {
    let n = settings.psi_scan_points.max(3);
    let grid: Vec<f64> = (0..n)
        .map(|i| settings.psi_scan_min + (s_max - settings.psi_scan_min) * i as f64 / (n - 1) as f64)
        .collect();
    let ss = config.signed_species();
    let mut triples = Vec::new();
    let mut resonant_set = Vec::new();
    for &mu in &ss {
        for &nu in &ss {
            if mu.index() + nu.index() == 0 {
                continue;
            }
            let probe = Phase::new(config, PhaseTriple { sigma: mu, mu, nu })?;
            let ps = grid
                .iter()
                .map(|&s| solve_p_plus(&probe, s, settings))
                .collect::<Result<Vec<_>>>()?;
            for &sigma in &ss {
                let triple = PhaseTriple { sigma, mu, nu };
                let phase = Phase::new(config, triple)?;
                let psis: Vec<Option<f64>> = grid
                    .iter()
                    .zip(&ps)
                    .map(|(&s, p)| p.map(|p| critical::collinear_phi(&phase, s, p)))
                    .collect();
                let roots = critical::roots_from_samples(&phase, &grid, &psis, settings)?;
                let dets = hessian_det_at_roots(&phase, &roots.roots, settings)?;
                for h in &dets {
                    resonant_set.push(ResonantPoint {
                        triple,
                        alpha: h.gamma,
                        beta: h.p_plus,
                    });
                }
                triples.push(RadialResonance {
                    triple,
                    s_grid: grid.clone(),
                    p_plus: ps.clone(),
                    psi: psis,
                    roots: roots.roots,
                    suspected_non_simple: roots.suspected_non_simple,
                    hessian_dets: dets,
                });
            }
        }
    }
    triples.sort_by_key(|r| r.triple.as_array());
    Ok(ResonanceReport {
        nondegeneracy: check_nondegeneracy(config),
        triples,
        resonant_set,
        certification: None,
    })
}
