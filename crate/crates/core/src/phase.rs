//! The trilinear phase `Φ_{σμν}(ξ,η) = Λ_σ(ξ) − Λ_μ(ξ−η) − Λ_ν(η)` and its
//! derivatives.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dispersion::{Branch, Mat2, SignedSpecies, SystemConfig, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseTriple {
    pub sigma: SignedSpecies,
    pub mu: SignedSpecies,
    pub nu: SignedSpecies,
}

impl PhaseTriple {
    pub fn new(sigma: i32, mu: i32, nu: i32) -> Self {
        Self {
            sigma: SignedSpecies::raw(sigma),
            mu: SignedSpecies::raw(mu),
            nu: SignedSpecies::raw(nu),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            sigma: self.sigma.conj(),
            mu: self.mu.conj(),
            nu: self.nu.conj(),
        }
    }

    pub fn as_array(self) -> [i32; 3] {
        [self.sigma.index(), self.mu.index(), self.nu.index()]
    }

    /// `μ + ν = 0` as signed indices.
    pub fn is_mu_nu_opposite(self) -> bool {
        self.mu.index() + self.nu.index() == 0
    }

    /// Every signed triple of a `d`-species system.
    pub fn all_signed(d: usize) -> Vec<PhaseTriple> {
        let d = d as i32;
        let idx: Vec<i32> = (-d..=d).filter(|&i| i != 0).collect();
        let mut out = Vec::with_capacity(idx.len().pow(3));
        for &s in &idx {
            for &m in &idx {
                for &n in &idx {
                    out.push(PhaseTriple::new(s, m, n));
                }
            }
        }
        out
    }
}

impl fmt::Display for PhaseTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.sigma, self.mu, self.nu)
    }
}

impl std::str::FromStr for PhaseTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("triple `{s}` must have three comma-separated indices")));
        }
        let mut v = [0i32; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad species index `{p}` in triple `{s}`")))?;
        }
        Ok(PhaseTriple::new(v[0], v[1], v[2]))
    }
}

/// A triple resolved against a configuration; evaluation is infallible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub triple: PhaseTriple,
    pub sigma: Branch,
    pub mu: Branch,
    pub nu: Branch,
}

impl Phase {
    pub fn new(config: &SystemConfig, triple: PhaseTriple) -> Result<Self> {
        Ok(Self {
            triple,
            sigma: config.branch(triple.sigma)?,
            mu: config.branch(triple.mu)?,
            nu: config.branch(triple.nu)?,
        })
    }

    /// `Φ(0,0) = b_σ − b_μ − b_ν` with signed masses.
    pub fn phi_at_origin(&self) -> f64 {
        self.sigma.signed_mass() - self.mu.signed_mass() - self.nu.signed_mass()
    }

    /// Evaluated as the mass defect plus the three excess terms, so values far
    /// below unit scale keep their relative accuracy.
    #[inline]
    pub fn phi(&self, xi: &Vec2, eta: &Vec2) -> f64 {
        let d = xi - eta;
        self.phi_at_origin()
            + (self.sigma.excess(xi) - self.mu.excess(&d) - self.nu.excess(eta))
    }

    /// `Φ` from squared lengths `|ξ|²`, `|ξ−η|²`, `|η|²`.
    #[inline]
    pub fn phi_r2(&self, xi2: f64, d2: f64, eta2: f64) -> f64 {
        self.phi_at_origin()
            + (self.sigma.excess_r2(xi2) - self.mu.excess_r2(d2) - self.nu.excess_r2(eta2))
    }

    #[inline]
    pub fn grad_xi(&self, xi: &Vec2, eta: &Vec2) -> Vec2 {
        self.sigma.grad(xi) - self.mu.grad(&(xi - eta))
    }

    #[inline]
    pub fn grad_eta(&self, xi: &Vec2, eta: &Vec2) -> Vec2 {
        self.mu.grad(&(xi - eta)) - self.nu.grad(eta)
    }

    /// `Ω_ηΦ`, the derivative of `Φ(ξ, R_θη)` at `θ = 0`.
    #[inline]
    pub fn omega_eta(&self, xi: &Vec2, eta: &Vec2) -> f64 {
        let d2 = (xi - eta).norm_squared();
        let w = self.mu.sign() * self.mu.speed().powi(2)
            / (self.mu.speed().powi(2) * d2 + self.mu.signed_mass().powi(2)).sqrt();
        w * (xi.y * eta.x - xi.x * eta.y)
    }

    #[inline]
    pub fn hessian_eta(&self, xi: &Vec2, eta: &Vec2) -> Mat2 {
        -self.mu.hessian(&(xi - eta)) - self.nu.hessian(eta)
    }

    #[inline]
    pub fn hessian_xi(&self, xi: &Vec2, eta: &Vec2) -> Mat2 {
        self.sigma.hessian(xi) - self.mu.hessian(&(xi - eta))
    }

    /// `∂_ξ∂_ηΦ`, entry `(i,j) = ∂_{ξ_i}∂_{η_j}Φ`.
    #[inline]
    pub fn hessian_mixed(&self, xi: &Vec2, eta: &Vec2) -> Mat2 {
        self.mu.hessian(&(xi - eta))
    }

    /// `Υ = ∇²_{ξη}Φ[∇⊥_ξΦ, ∇⊥_ηΦ]`.
    #[inline]
    pub fn upsilon(&self, xi: &Vec2, eta: &Vec2) -> f64 {
        let gx = perp(&self.grad_xi(xi, eta));
        let ge = perp(&self.grad_eta(xi, eta));
        gx.dot(&(self.hessian_mixed(xi, eta) * ge))
    }
}

/// Counter-clockwise quarter turn `(a, b) ↦ (−b, a)`.
#[inline]
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

pub fn phi(config: &SystemConfig, t: PhaseTriple, xi: &Vec2, eta: &Vec2) -> Result<f64> {
    Ok(Phase::new(config, t)?.phi(xi, eta))
}

pub fn grad_xi_phi(config: &SystemConfig, t: PhaseTriple, xi: &Vec2, eta: &Vec2) -> Result<Vec2> {
    Ok(Phase::new(config, t)?.grad_xi(xi, eta))
}

pub fn grad_eta_phi(config: &SystemConfig, t: PhaseTriple, xi: &Vec2, eta: &Vec2) -> Result<Vec2> {
    Ok(Phase::new(config, t)?.grad_eta(xi, eta))
}

pub fn omega_eta_phi(config: &SystemConfig, t: PhaseTriple, xi: &Vec2, eta: &Vec2) -> Result<f64> {
    Ok(Phase::new(config, t)?.omega_eta(xi, eta))
}

pub fn hessian_eta_phi(config: &SystemConfig, t: PhaseTriple, xi: &Vec2, eta: &Vec2) -> Result<Mat2> {
    Ok(Phase::new(config, t)?.hessian_eta(xi, eta))
}

pub fn upsilon(config: &SystemConfig, t: PhaseTriple, xi: &Vec2, eta: &Vec2) -> Result<f64> {
    Ok(Phase::new(config, t)?.upsilon(xi, eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg_config() -> SystemConfig {
        SystemConfig::from_speeds_masses(&[1.0, 2f64.sqrt()], &[1.0, 2.0]).unwrap()
    }

    #[test]
    fn origin_value_is_mass_defect() {
        let c = SystemConfig::from_speeds_masses(&[1.0, 2.0], &[1.0, 3.0]).unwrap();
        for t in PhaseTriple::all_signed(2) {
            let p = Phase::new(&c, t).unwrap();
            let direct = p.sigma.lambda(&Vec2::zeros())
                - p.mu.lambda(&Vec2::zeros())
                - p.nu.lambda(&Vec2::zeros());
            assert_eq!(p.phi(&Vec2::zeros(), &Vec2::zeros()), direct);
        }
    }

    #[test]
    fn degenerate_triple_is_bilinear_near_origin() {
        let p = Phase::new(&deg_config(), PhaseTriple::new(1, 2, -1)).unwrap();
        assert_eq!(p.phi_at_origin(), 0.0);
        let pts = [(1e-2, 0.0, 1e-2, 0.0), (3e-3, -7e-3, -5e-3, 2e-3), (0.0, 1e-2, 1e-2, 1e-2)];
        for &(a, b, c, d) in &pts {
            let xi = Vec2::new(a, b);
            let eta = Vec2::new(c, d);
            assert!((p.phi(&xi, &eta) - xi.dot(&eta)).abs() <= 1e-6);
        }
    }

    #[test]
    fn same_species_cancellations() {
        let c = deg_config();
        let p = Phase::new(&c, PhaseTriple::new(2, 2, 1)).unwrap();
        let xi = Vec2::new(0.4, -1.1);
        assert_eq!(p.phi(&xi, &Vec2::zeros()), -1.0);
        assert_eq!(p.grad_xi(&xi, &Vec2::zeros()), Vec2::zeros());

        let q = Phase::new(&c, PhaseTriple::new(1, 2, -2)).unwrap();
        let g = q.grad_eta(&Vec2::zeros(), &Vec2::new(0.7, 0.2));
        assert!(g.norm() < 1e-16);

        let s = Phase::new(&c, PhaseTriple::new(1, 2, 2)).unwrap();
        assert!(s.grad_eta(&xi, &(xi / 2.0)).norm() < 1e-16);
        let h = s.hessian_eta(&xi, &(xi / 2.0));
        let expect = -2.0 * s.mu.hessian(&(xi / 2.0));
        assert!((h - expect).norm() < 1e-15);
        assert!(h.trace() < 0.0);
    }

    #[test]
    fn omega_on_unit_triangle() {
        let c = SystemConfig::from_speeds_masses(&[1.0], &[1.0]).unwrap();
        let p = Phase::new(&c, PhaseTriple::new(1, 1, 1)).unwrap();
        let xi = Vec2::new(1.0, 0.0);
        let eta = Vec2::new(0.5, 3f64.sqrt() / 2.0);
        let expect = (0.5f64).sqrt() * (60f64.to_radians()).sin();
        assert!((p.omega_eta(&xi, &eta).abs() - expect).abs() < 1e-15);
        assert_eq!(p.omega_eta(&xi, &(xi * 3.0)), 0.0);
    }

    #[test]
    fn upsilon_vanishes_on_symmetric_collinear_point() {
        let c = SystemConfig::from_speeds_masses(&[1.0], &[1.0]).unwrap();
        let p = Phase::new(&c, PhaseTriple::new(1, 1, 1)).unwrap();
        let xi = Vec2::new(0.8, 0.3);
        assert!(p.upsilon(&xi, &(xi / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn triple_parsing() {
        let t: PhaseTriple = "(1,2,-1)".parse().unwrap();
        assert_eq!(t, PhaseTriple::new(1, 2, -1));
        assert_eq!(t.to_string(), "(+1,+2,-1)");
        assert!("1,2".parse::<PhaseTriple>().is_err());
    }
}
