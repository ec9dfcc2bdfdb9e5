//! Klein-Gordon dispersion relations for signed species.
//!
//! Species are indexed `1..=d`; a negative index `-α` denotes the conjugate
//! branch with mass `-b_α`, the same speed, and `Λ_{-α} = -Λ_α`.

use std::fmt;
use std::path::Path;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesParams {
    #[serde(rename = "c")]
    pub speed: f64,
    #[serde(rename = "b")]
    pub mass: f64,
}

impl SpeciesParams {
    pub fn new(speed: f64, mass: f64) -> Result<Self> {
        if !(speed.is_finite() && speed > 0.0) {
            return Err(Error::Config(format!("speed must be positive, got {speed}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { speed, mass })
    }
}

/// A nonzero species index in `{-d..-1, 1..d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedSpecies(i32);

impl SignedSpecies {
    pub fn new(index: i32, d: usize) -> Result<Self> {
        if index == 0 || index.unsigned_abs() as usize > d {
            return Err(Error::Config(format!(
                "species index {index} outside {{-{d}..-1, 1..{d}}}"
            )));
        }
        Ok(Self(index))
    }

    /// Unchecked constructor; validity is checked when the species is resolved
    /// against a configuration.
    pub const fn raw(index: i32) -> Self {
        Self(index)
    }

    pub fn index(self) -> i32 {
        self.0
    }

    pub fn sign(self) -> f64 {
        if self.0 > 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Zero-based position of the underlying unsigned species.
    pub fn base(self) -> usize {
        self.0.unsigned_abs() as usize - 1
    }

    pub fn conj(self) -> Self {
        Self(-self.0)
    }
}

impl fmt::Display for SignedSpecies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

#[derive(Debug, Deserialize)]
struct SystemConfigDoc {
    species: Vec<SpeciesParams>,
    #[serde(default)]
    coupling: Option<Vec<Vec<Vec<f64>>>>,
}

/// Speeds, masses and the quadratic coupling tensor `A_{αβγ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    species: Vec<SpeciesParams>,
    coupling: Vec<f64>,
}

impl SystemConfig {
    /// `coupling` is the flattened `d×d×d` tensor in `[α][β][γ]` order;
    /// `None` means all ones.
    pub fn new(species: Vec<SpeciesParams>, coupling: Option<Vec<f64>>) -> Result<Self> {
        let d = species.len();
        if d == 0 {
            return Err(Error::Config("at least one species is required".into()));
        }
        for s in &species {
            SpeciesParams::new(s.speed, s.mass)?;
        }
        let coupling = coupling.unwrap_or_else(|| vec![1.0; d * d * d]);
        if coupling.len() != d * d * d {
            return Err(Error::Config(format!(
                "coupling has {} entries, expected {}",
                coupling.len(),
                d * d * d
            )));
        }
        if coupling.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("coupling entries must be finite".into()));
        }
        Ok(Self { species, coupling })
    }

    /// Convenience constructor from parallel speed and mass lists.
    pub fn from_speeds_masses(speeds: &[f64], masses: &[f64]) -> Result<Self> {
        if speeds.len() != masses.len() {
            return Err(Error::Config("speed and mass lists differ in length".into()));
        }
        let species = speeds
            .iter()
            .zip(masses)
            .map(|(&c, &b)| SpeciesParams::new(c, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(species, None)
    }

    pub fn with_coupling(mut self, coupling: Vec<f64>) -> Result<Self> {
        self = Self::new(self.species, Some(coupling))?;
        Ok(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: SystemConfigDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: SystemConfigDoc = serde_json::from_value(value)?;
        Self::from_doc(doc)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    fn from_doc(doc: SystemConfigDoc) -> Result<Self> {
        let d = doc.species.len();
        let coupling = match doc.coupling {
            None => None,
            Some(t) => {
                let ok = t.len() == d && t.iter().all(|m| m.len() == d && m.iter().all(|r| r.len() == d));
                if !ok {
                    return Err(Error::Config(format!("coupling must be a {d}×{d}×{d} array")));
                }
                Some(t.into_iter().flatten().flatten().collect())
            }
        };
        Self::new(doc.species, coupling)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let d = self.d();
        let coupling: Vec<Vec<Vec<f64>>> = (0..d)
            .map(|a| (0..d).map(|b| (0..d).map(|g| self.coupling(a, b, g)).collect()).collect())
            .collect();
        serde_json::json!({ "species": self.species, "coupling": coupling })
    }

    pub fn d(&self) -> usize {
        self.species.len()
    }

    pub fn species(&self) -> &[SpeciesParams] {
        &self.species
    }

    /// `A_{αβγ}` with zero-based indices.
    pub fn coupling(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        let d = self.d();
        self.coupling[(alpha * d + beta) * d + gamma]
    }

    pub fn is_linear(&self) -> bool {
        self.coupling.iter().all(|&a| a == 0.0)
    }

    pub fn validate(&self, s: SignedSpecies) -> Result<SignedSpecies> {
        SignedSpecies::new(s.index(), self.d())
    }

    pub fn speed(&self, s: SignedSpecies) -> Result<f64> {
        Ok(self.branch(s)?.speed())
    }

    /// Signed mass `b_σ`.
    pub fn mass(&self, s: SignedSpecies) -> Result<f64> {
        Ok(self.branch(s)?.signed_mass())
    }

    pub fn branch(&self, s: SignedSpecies) -> Result<Branch> {
        let s = self.validate(s)?;
        let p = self.species[s.base()];
        Ok(Branch::new(s.sign(), p.speed, p.mass))
    }

    /// All `2d` signed species, negative first.
    pub fn signed_species(&self) -> Vec<SignedSpecies> {
        let d = self.d() as i32;
        (-d..=d).filter(|&i| i != 0).map(SignedSpecies).collect()
    }

    pub fn max_speed(&self) -> f64 {
        self.species.iter().map(|s| s.speed).fold(0.0, f64::max)
    }
}

/// One signed dispersion branch `sign·√(c²|ξ|²+b²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    sign: f64,
    c2: f64,
    b: f64,
    b2: f64,
}

impl Branch {
    pub fn new(sign: f64, speed: f64, mass: f64) -> Self {
        Self {
            sign,
            c2: speed * speed,
            b: mass,
            b2: mass * mass,
        }
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn speed(&self) -> f64 {
        self.c2.sqrt()
    }

    pub fn signed_mass(&self) -> f64 {
        self.sign * self.b
    }

    #[inline]
    fn root(&self, r2: f64) -> f64 {
        (self.c2 * r2 + self.b2).sqrt()
    }

    /// `Λ` as a function of `|ξ|²`.
    #[inline]
    pub fn at_r2(&self, r2: f64) -> f64 {
        self.sign * self.root(r2)
    }

    /// `Λ(ξ) − Λ(0)` without cancellation for small `|ξ|`.
    #[inline]
    pub fn excess_r2(&self, r2: f64) -> f64 {
        self.sign * self.c2 * r2 / (self.root(r2) + self.b)
    }

    #[inline]
    pub fn lambda(&self, xi: &Vec2) -> f64 {
        self.at_r2(xi.norm_squared())
    }

    #[inline]
    pub fn excess(&self, xi: &Vec2) -> f64 {
        self.excess_r2(xi.norm_squared())
    }

    #[inline]
    pub fn grad(&self, xi: &Vec2) -> Vec2 {
        xi * (self.sign * self.c2 / self.root(xi.norm_squared()))
    }

    /// Radial derivative of `Λ` along a line through the origin, `r ↦ Λ'(r)`
    /// extended oddly to negative `r`.
    #[inline]
    pub fn grad_1d(&self, r: f64) -> f64 {
        self.sign * self.c2 * r / self.root(r * r)
    }

    /// Second radial derivative `c²b²/(c²r²+b²)^{3/2}` with sign.
    #[inline]
    pub fn hess_1d(&self, r: f64) -> f64 {
        let q = self.root(r * r);
        self.sign * self.c2 * self.b2 / (q * q * q)
    }

    #[inline]
    pub fn hessian(&self, xi: &Vec2) -> Mat2 {
        let r2 = xi.norm_squared();
        let q2 = self.c2 * r2 + self.b2;
        let q = q2.sqrt();
        let outer = xi * xi.transpose();
        (Mat2::identity() - outer * (self.c2 / q2)) * (self.sign * self.c2 / q)
    }
}

/// `Λ_σ(ξ)`.
pub fn lambda(config: &SystemConfig, s: SignedSpecies, xi: &Vec2) -> Result<f64> {
    Ok(config.branch(s)?.lambda(xi))
}

/// `∇Λ_σ(ξ)`.
pub fn grad_lambda(config: &SystemConfig, s: SignedSpecies, xi: &Vec2) -> Result<Vec2> {
    Ok(config.branch(s)?.grad(xi))
}

/// `∇²Λ_σ(ξ)`.
pub fn hessian_lambda(config: &SystemConfig, s: SignedSpecies, xi: &Vec2) -> Result<Mat2> {
    Ok(config.branch(s)?.hessian(xi))
}
