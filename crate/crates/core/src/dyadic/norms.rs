//! Sobolev, angular, `B^σ_j` and `Z` norms on lattice data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::FourierField;
use super::ops::{apply_spatial, bucket_norms, psi_star_lattice, project_pk};
use super::rotation::rotation_powers;
use crate::dispersion::SignedSpecies;
use crate::error::{Error, Result};
use crate::resonance::PsiStarTable;

/// Regularity and weight exponents at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DyadicParams {
    pub delta: f64,
    pub n0: u32,
    pub n1: u32,
    /// Cap on rotation powers actually applied.
    pub a_max: usize,
    /// Weight exponent inside `Ψ*`.
    pub d0: f64,
}

impl Default for DyadicParams {
    fn default() -> Self {
        Self {
            delta: 0.01,
            n0: 8,
            n1: 8,
            a_max: 8,
            d0: 10.0,
        }
    }
}

impl DyadicParams {
    /// Values from the asymptotic analysis; storable for documentation but
    /// far beyond what a lattice can resolve.
    pub fn asymptotic() -> Self {
        let delta = 4e-7;
        Self {
            delta,
            n0: (400.0 / (delta * delta)) as u32,
            n1: (8.0 / (delta * delta)) as u32,
            a_max: 8,
            d0: 10.0,
        }
    }

    pub fn j_exponent(&self) -> f64 {
        1.0 - 20.0 * self.delta
    }

    pub fn n_exponent(&self) -> f64 {
        -(0.5 - 19.0 * self.delta)
    }

    /// Rotation powers entering the `Z` norm.
    pub fn z_rotations(&self) -> usize {
        ((self.n1 / 2) as usize).min(self.a_max)
    }

    /// Rotation powers entering the angular norm and the energy.
    pub fn omega_rotations(&self) -> usize {
        (self.n1 as usize).min(self.a_max)
    }
}

/// `‖⟨ξ⟩^N f̂‖` with the `L²` normalization of the field.
pub fn sobolev_norm(f: &FourierField, n: f64) -> f64 {
    f.weighted_l2(|xi| (1.0 + xi.norm_squared()).powf(0.5 * n))
}

/// `sup_{m ≤ min(N₁, a_max)} ‖Ω^m f‖`.
pub fn h_omega_norm(f: &FourierField, params: &DyadicParams) -> f64 {
    rotation_powers(f, params.omega_rotations())
        .iter()
        .map(FourierField::l2_norm)
        .fold(0.0, f64::max)
}

/// `2^{a j} sup_{0≤n≤j+1} 2^{b n} ‖A_{n,(j)} g‖` with explicit exponents.
pub fn b_norm_with_exponents(bucket_norms: &[f64], j: i32, j_exp: f64, n_exp: f64) -> f64 {
    let sup = bucket_norms
        .iter()
        .enumerate()
        .map(|(n, &v)| 2f64.powf(n_exp * n as f64) * v)
        .fold(0.0, f64::max);
    2f64.powf(j_exp * j as f64) * sup
}

/// `‖g‖_{B^σ_j}`.
pub fn b_norm(g: &FourierField, j: i32, sigma: SignedSpecies, table: &PsiStarTable, params: &DyadicParams) -> f64 {
    let ps = psi_star_lattice(g, table, sigma);
    b_norm_with_exponents(&bucket_norms(g, &ps, j), j, params.j_exponent(), params.n_exponent())
}

/// Range of `(k, j)` the lattice can represent: annuli meeting the nonzero
/// lattice frequencies and spatial shells meeting the box.
pub fn lattice_index_range(f: &FourierField) -> (i32, i32, i32) {
    let k_lo = (f.dxi() / 1.2).log2().ceil() as i32;
    let k_hi = ((f.nyquist() * std::f64::consts::SQRT_2) / 0.55).log2().floor() as i32;
    let j_hi = ((f.half_length() * std::f64::consts::SQRT_2) / 0.55).log2().floor() as i32;
    (k_lo, k_hi, j_hi.max(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Z1Detail {
    pub value: f64,
    pub argmax: Option<(i32, i32)>,
    pub truncated: bool,
}

/// `‖f‖_{Z^σ₁} = sup_{(k,j)} 2^{6k₊} ‖Q_{jk} f‖_{B^σ_j}` over the lattice range.
pub fn z1_norm_detail(f: &FourierField, sigma: SignedSpecies, table: &PsiStarTable, params: &DyadicParams) -> Z1Detail {
    let (k_lo, k_hi, j_hi) = lattice_index_range(f);
    let ps = psi_star_lattice(f, table, sigma);
    let pairs: Vec<(i32, i32)> = (k_lo..=k_hi)
        .flat_map(|k| ((-k).max(0)..=j_hi.max((-k).max(0))).map(move |j| (k, j)))
        .collect();
    let pks: Vec<(i32, FourierField, bool)> = (k_lo..=k_hi)
        .map(|k| {
            let p = project_pk(f, k);
            (k, p.field, p.truncated)
        })
        .collect();
    let values: Vec<(f64, bool)> = pairs
        .par_iter()
        .map(|&(k, j)| {
            let (_, pk, trunc) = &pks[(k - k_lo) as usize];
            if pk.max_abs() == 0.0 {
                return (0.0, false);
            }
            let q = apply_spatial(pk, j, k);
            let b = b_norm_with_exponents(&bucket_norms(&q, &ps, j), j, params.j_exponent(), params.n_exponent());
            let leak = 2f64.powi(j) > f.half_length();
            (2f64.powi(6 * k.max(0)) * b, *trunc || leak)
        })
        .collect();
    let mut best = Z1Detail {
        value: 0.0,
        argmax: None,
        truncated: false,
    };
    for (&(k, j), &(v, t)) in pairs.iter().zip(&values) {
        if v > best.value {
            best.value = v;
            best.argmax = Some((k, j));
            best.truncated = t;
        }
    }
    best
}

pub fn z1_norm(f: &FourierField, sigma: SignedSpecies, table: &PsiStarTable, params: &DyadicParams) -> f64 {
    z1_norm_detail(f, sigma, table, params).value
}

/// `sup_{m ≤ min(N₁/2, a_max)} Σ_i ‖Ω^m f_i‖_{Z^i₁}`, species `i = 1..=d` in
/// order. The table must cover every species.
pub fn z_norm(fields: &[FourierField], table: &PsiStarTable, params: &DyadicParams) -> Result<f64> {
    if fields.is_empty() {
        return Err(Error::Config("at least one field is required".into()));
    }
    let m = params.z_rotations();
    let powers: Vec<Vec<FourierField>> = fields.iter().map(|f| rotation_powers(f, m)).collect();
    let mut best: f64 = 0.0;
    for a in 0..=m {
        let total: f64 = powers
            .iter()
            .enumerate()
            .map(|(i, p)| z1_norm(&p[a], SignedSpecies::raw(i as i32 + 1), table, params))
            .sum();
        best = best.max(total);
    }
    Ok(best)
}

/// `Ψ*` table covering every frequency of a lattice.
pub fn psi_star_table_for(
    config: &crate::dispersion::SystemConfig,
    f: &FourierField,
    params: &DyadicParams,
    settings: &crate::numerics::NumericsSettings,
) -> Result<PsiStarTable> {
    PsiStarTable::build(config, f.nyquist() * std::f64::consts::SQRT_2 * 1.01, params.d0, settings)
}

