//! Monte-Carlo volumes of phase sublevel sets.
//!
//! `E = {(ξ,η): max(|ξ|,|η|) ≤ 2^k, |Φ| ≤ 2^{−k}ε, …}`; the report gives
//! `sup_ξ |E_ξ|` and `sup_η |E^η|`. By rotation invariance the outer variable
//! is sampled on the positive first axis only. The inner variable uses one
//! seeded set of uniform disk samples shared by every threshold and every
//! outer sample, so ratios across `ε` are estimated with common random numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{SystemConfig, Vec2};
use crate::error::{Error, Result};
use crate::phase::{Phase, PhaseTriple};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VolumeQuantity {
    /// `|Φ| ≤ 2^{−k}ε`.
    PhiSublevel,
    /// Adds `|Υ| ≤ 2^{−3k}ε'` and a lower bound `2^{−D0}` on the gradient in
    /// the integrated variable.
    PhiUpsilon { eps_prime: f64, d0: f64 },
    /// Adds the angular restriction `|Ω_ηΦ| ≤ κ`.
    PhiOmega { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSpec {
    pub triple: PhaseTriple,
    pub quantity: VolumeQuantity,
    pub k: i32,
    pub eps: Vec<f64>,
    /// Inner samples per outer point.
    pub samples: usize,
    pub outer_samples: usize,
    pub seed: u64,
    /// Requested relative half-width of the confidence interval.
    pub target_rel_ci: f64,
}

impl VolumeSpec {
    pub fn new(triple: PhaseTriple, quantity: VolumeQuantity, k: i32, eps: Vec<f64>) -> Self {
        Self {
            triple,
            quantity,
            k,
            eps,
            samples: 1_000_000,
            outer_samples: 32,
            seed: 0,
            target_rel_ci: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeRow {
    pub eps: f64,
    /// `sup_ξ ∫ 1_E dη`.
    pub volume: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub sup_at: f64,
    /// `sup_η ∫ 1_E dξ`.
    pub volume_transposed: f64,
    pub transposed_ci_low: f64,
    pub transposed_ci_high: f64,
    /// `volume / (ε log(1/ε))`.
    pub shape_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeTable {
    pub spec: VolumeSpec,
    pub disk_area: f64,
    pub rows: Vec<VolumeRow>,
    /// `volume(ε_i) / volume(ε_{i+1})` for consecutive rows.
    pub halving_ratios: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Wilson score interval at 95% for `hits` out of `n`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let p = hits as f64 / n;
    let den = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / den;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

fn disk_samples(n: usize, radius: f64, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let r = radius * u.sqrt();
            Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

/// Largest threshold-relevant value; a sample enters the set for every `ε`
/// with `2^{−k}ε` at least this value, or never if the side conditions fail.
fn membership(phase: &Phase, q: &VolumeQuantity, k: i32, xi: &Vec2, eta: &Vec2, transposed: bool) -> f64 {
    let phi = phase.phi(xi, eta).abs();
    let ok = match *q {
        VolumeQuantity::PhiSublevel => true,
        VolumeQuantity::PhiUpsilon { eps_prime, d0 } => {
            let g = if transposed { phase.grad_xi(xi, eta) } else { phase.grad_eta(xi, eta) };
            phase.upsilon(xi, eta).abs() <= 2f64.powi(-3 * k) * eps_prime && g.norm() >= 2f64.powf(-d0)
        }
        VolumeQuantity::PhiOmega { kappa } => phase.omega_eta(xi, eta).abs() <= kappa,
    };
    if ok {
        phi
    } else {
        f64::INFINITY
    }
}

struct Sup {
    hits: Vec<u64>,
    at: Vec<f64>,
}

fn sup_scan(
    phase: &Phase,
    spec: &VolumeSpec,
    inner: &[Vec2],
    radius: f64,
    thresholds: &[f64],
    transposed: bool,
) -> Sup {
    let outer: Vec<f64> = (0..spec.outer_samples)
        .map(|i| radius * (i as f64 + 0.5) / spec.outer_samples as f64)
        .collect();
    let counts: Vec<Vec<u64>> = outer
        .par_iter()
        .map(|&rho| {
            let p = Vec2::new(rho, 0.0);
            let mut vals: Vec<f64> = inner
                .iter()
                .map(|q| {
                    if transposed {
                        membership(phase, &spec.quantity, spec.k, q, &p, true)
                    } else {
                        membership(phase, &spec.quantity, spec.k, &p, q, false)
                    }
                })
                .collect();
            vals.sort_by(f64::total_cmp);
            thresholds
                .iter()
                .map(|&t| vals.partition_point(|&v| v <= t) as u64)
                .collect()
        })
        .collect();
    let mut hits = vec![0u64; thresholds.len()];
    let mut at = vec![0.0; thresholds.len()];
    for (o, c) in outer.iter().zip(&counts) {
        for e in 0..thresholds.len() {
            if c[e] > hits[e] {
                hits[e] = c[e];
                at[e] = *o;
            }
        }
    }
    Sup { hits, at }
}

pub fn level_set_volume(config: &SystemConfig, spec: &VolumeSpec) -> Result<VolumeTable> {
    if spec.eps.is_empty() || spec.eps.iter().any(|&e| !(e > 0.0 && e <= 0.5)) {
        return Err(Error::Precondition("every ε must lie in (0, 1/2]".into()));
    }
    if spec.samples == 0 || spec.outer_samples == 0 {
        return Err(Error::Config("sample counts must be positive".into()));
    }
    let phase = Phase::new(config, spec.triple)?;
    let radius = 2f64.powi(spec.k);
    let area = std::f64::consts::PI * radius * radius;
    let thresholds: Vec<f64> = spec.eps.iter().map(|e| 2f64.powi(-spec.k) * e).collect();
    let inner = disk_samples(spec.samples, radius, spec.seed);
    let fwd = sup_scan(&phase, spec, &inner, radius, &thresholds, false);
    let bwd = sup_scan(&phase, spec, &inner, radius, &thresholds, true);
    let n = spec.samples as u64;
    let mut warnings = Vec::new();
    let rows: Vec<VolumeRow> = spec
        .eps
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let (lo, hi) = wilson_interval(fwd.hits[i], n);
            let (tlo, thi) = wilson_interval(bwd.hits[i], n);
            let volume = area * fwd.hits[i] as f64 / n as f64;
            let rel = if fwd.hits[i] > 0 { area * (hi - lo) / (2.0 * volume) } else { f64::INFINITY };
            if rel > spec.target_rel_ci {
                warnings.push(format!(
                    "ε = {eps:e}: relative CI half-width {rel:.3} exceeds {} with {} samples",
                    spec.target_rel_ci, spec.samples
                ));
            }
            VolumeRow {
                eps,
                volume,
                ci_low: area * lo,
                ci_high: area * hi,
                sup_at: fwd.at[i],
                volume_transposed: area * bwd.hits[i] as f64 / n as f64,
                transposed_ci_low: area * tlo,
                transposed_ci_high: area * thi,
                shape_ratio: volume / (eps * (1.0 / eps).ln()),
            }
        })
        .collect();
    let halving_ratios = rows.windows(2).map(|w| w[0].volume / w[1].volume).collect();
    Ok(VolumeTable {
        spec: spec.clone(),
        disk_area: area,
        rows,
        halving_ratios,
        warnings,
    })
}
