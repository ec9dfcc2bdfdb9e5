//! The space-resonance map `p_+`, the reduced phase `Ψ` and its roots.
//!
//! On the collinear slice `ξ = (s,0)`, `η = (r,0)` the gradient `∇_ηΦ` has a
//! single nonzero component `G(r) = Λ_μ'(s−r) − Λ_ν'(r)`, so critical points
//! are found by a bracketed 1D bisection and checked against the full
//! gradient afterwards.

use serde::{Deserialize, Serialize};

use crate::dispersion::{SignedSpecies, SystemConfig, Vec2};
use crate::error::{Error, Result};
use crate::numerics::NumericsSettings;
use crate::phase::{Phase, PhaseTriple};

#[inline]
fn collinear_gradient(phase: &Phase, s: f64, r: f64) -> f64 {
    phase.mu.grad_1d(s - r) - phase.nu.grad_1d(r)
}

/// `Φ((s,0), (r,0))` with `|ξ−η|² = (s−r)²`.
#[inline]
pub fn collinear_phi(phase: &Phase, s: f64, r: f64) -> f64 {
    phase.phi_r2(s * s, (s - r) * (s - r), r * r)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let fb = f(b);
    if fb.abs() < fa.abs() {
        b
    } else {
        a
    }
}

/// Collinear critical point `p_+(s)`, or `None` when no sign change of the
/// collinear gradient is bracketed on `[−R, R]`, `R = 8·max(1, |s|)`.
/// Among several bracketed critical points the one of least `|r|` is taken.
pub fn solve_p_plus(phase: &Phase, s: f64, settings: &NumericsSettings) -> Result<Option<f64>> {
    if phase.triple.is_mu_nu_opposite() {
        return Err(Error::Precondition(format!(
            "p_+ is undefined for μ + ν = 0 (triple {})",
            phase.triple
        )));
    }
    if s < 0.0 {
        return Ok(solve_p_plus(phase, -s, settings)?.map(|r| -r));
    }
    let g = |r: f64| collinear_gradient(phase, s, r);
    let big_r = 8.0 * s.max(1.0);
    let n = settings.p_scan_intervals.max(2) & !1;
    let mut best: Option<f64> = None;
    let mut consider = |r: f64| {
        if best.is_none_or(|b: f64| r.abs() < b.abs()) {
            best = Some(r);
        }
    };
    let node = |i: usize| -big_r + 2.0 * big_r * i as f64 / n as f64;
    let mut r0 = node(0);
    let mut g0 = g(r0);
    if g0 == 0.0 {
        consider(r0);
    }
    for i in 1..=n {
        let r1 = node(i);
        let g1 = g(r1);
        if g1 == 0.0 {
            consider(r1);
        } else if g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0) {
            consider(bisect(g, r0, r1, g0));
        }
        r0 = r1;
        g0 = g1;
    }
    if let Some(r) = best {
        let full = phase.grad_eta(&Vec2::new(s, 0.0), &Vec2::new(r, 0.0)).norm();
        if full > settings.root_tol {
            return Err(Error::Numeric(format!(
                "critical point residual {full:e} exceeds tolerance at s = {s}"
            )));
        }
    }
    Ok(best)
}

/// `Ψ(s) = Φ((s,0), (p_+(s),0))`, absent where `p_+` is.
pub fn psi(phase: &Phase, s: f64, settings: &NumericsSettings) -> Result<Option<f64>> {
    Ok(solve_p_plus(phase, s, settings)?.map(|p| collinear_phi(phase, s, p)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiRoots {
    pub roots: Vec<f64>,
    /// Local minima of `|Ψ|` below the tangency tolerance without a sign change.
    pub suspected_non_simple: Vec<f64>,
}

/// Roots of `Ψ` on `[s_min, s_max]` by a uniform scan and bisection of every
/// sign change.
pub fn find_psi_roots(phase: &Phase, s_max: f64, settings: &NumericsSettings) -> Result<PsiRoots> {
    if !(s_max > settings.psi_scan_min) {
        return Err(Error::Precondition(format!("s_max = {s_max} must exceed the scan start")));
    }
    let n = settings.psi_scan_points.max(3);
    let grid: Vec<f64> = (0..n)
        .map(|i| settings.psi_scan_min + (s_max - settings.psi_scan_min) * i as f64 / (n - 1) as f64)
        .collect();
    let vals = grid
        .iter()
        .map(|&s| psi(phase, s, settings))
        .collect::<Result<Vec<_>>>()?;
    roots_from_samples(phase, &grid, &vals, settings)
}

pub(crate) fn roots_from_samples(
    phase: &Phase,
    grid: &[f64],
    vals: &[Option<f64>],
    settings: &NumericsSettings,
) -> Result<PsiRoots> {
    let mut roots = Vec::new();
    let mut suspected = Vec::new();
    for i in 0..grid.len() {
        let Some(v) = vals[i] else { continue };
        if v == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() {
            if let Some(w) = vals[i + 1] {
                if w != 0.0 && (v < 0.0) != (w < 0.0) {
                    let f = |s: f64| psi(phase, s, settings).ok().flatten().unwrap_or(f64::NAN);
                    roots.push(bisect(f, grid[i], grid[i + 1], v));
                    continue;
                }
            }
        }
        if i > 0 && i + 1 < grid.len() {
            if let (Some(a), Some(c)) = (vals[i - 1], vals[i + 1]) {
                let same_sign = (a < 0.0) == (v < 0.0) && (c < 0.0) == (v < 0.0);
                if same_sign && v.abs() < settings.tangency_tol && v.abs() <= a.abs() && v.abs() <= c.abs() {
                    suspected.push(grid[i]);
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    Ok(PsiRoots {
        roots,
        suspected_non_simple: suspected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootHessian {
    pub gamma: f64,
    pub p_plus: f64,
    pub det: f64,
    pub pass: bool,
}

/// `det ∇²_{ηη}Φ` at `((γ,0), (p_+(γ),0))` for each root.
pub fn hessian_det_at_roots(
    phase: &Phase,
    roots: &[f64],
    settings: &NumericsSettings,
) -> Result<Vec<RootHessian>> {
    roots
        .iter()
        .map(|&gamma| {
            let p = solve_p_plus(phase, gamma, settings)?
                .ok_or_else(|| Error::Numeric(format!("no critical point at root γ = {gamma}")))?;
            let det = phase
                .hessian_eta(&Vec2::new(gamma, 0.0), &Vec2::new(p, 0.0))
                .determinant();
            Ok(RootHessian {
                gamma,
                p_plus: p,
                det,
                pass: det.abs() > settings.det_tol,
            })
        })
        .collect()
}

/// Pairs `(μ, ν)` entering the infimum in `Ψ*`: signed masses with
/// `b_μ + b_ν ≠ 0`.
pub fn admissible_pairs(config: &SystemConfig) -> Vec<(SignedSpecies, SignedSpecies)> {
    let ss = config.signed_species();
    let mut out = Vec::new();
    for &m in &ss {
        for &n in &ss {
            let bm = config.mass(m).expect("valid species");
            let bn = config.mass(n).expect("valid species");
            if bm + bn != 0.0 {
                out.push((m, n));
            }
        }
    }
    out
}

/// `Ψ*_σ(ξ) = 2^{D0}(1+|ξ|)·inf_{μ,ν} |Ψ_{σμν}(|ξ|)|` evaluated directly.
pub fn psi_star(
    config: &SystemConfig,
    sigma: SignedSpecies,
    xi: &Vec2,
    d0: f64,
    settings: &NumericsSettings,
) -> Result<f64> {
    let s = xi.norm();
    let mut inf = f64::INFINITY;
    for (mu, nu) in admissible_pairs(config) {
        let phase = Phase::new(config, PhaseTriple { sigma, mu, nu })?;
        if let Some(v) = psi(&phase, s, settings)? {
            inf = inf.min(v.abs());
        }
    }
    Ok(2f64.powf(d0) * (1.0 + s) * inf)
}

/// `Ψ*` for many radii: `p_+` per admissible pair is tabulated on a uniform
/// radial grid and interpolated linearly; `Ψ` is then evaluated exactly at the
/// interpolated critical point, which is accurate to second order because
/// `∇_ηΦ` vanishes there.
#[derive(Debug, Clone)]
pub struct PsiStarTable {
    config: SystemConfig,
    d0: f64,
    h: f64,
    s_max: f64,
    pairs: Vec<(SignedSpecies, SignedSpecies, Vec<Option<f64>>)>,
    settings: NumericsSettings,
}

impl PsiStarTable {
    pub fn build(config: &SystemConfig, s_max: f64, d0: f64, settings: &NumericsSettings) -> Result<Self> {
        let points = ((s_max / 1e-3).ceil() as usize).clamp(64, 50_000);
        let h = s_max / (points - 1) as f64;
        let mut pairs = Vec::new();
        for (mu, nu) in admissible_pairs(config) {
            let phase = Phase::new(config, PhaseTriple { sigma: SignedSpecies::raw(1), mu, nu })?;
            let samples = (0..points)
                .map(|i| solve_p_plus(&phase, i as f64 * h, settings))
                .collect::<Result<Vec<_>>>()?;
            pairs.push((mu, nu, samples));
        }
        Ok(Self {
            config: config.clone(),
            d0,
            h,
            s_max,
            pairs,
            settings: *settings,
        })
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn value(&self, sigma: SignedSpecies, s: f64) -> f64 {
        let s = s.abs();
        if s > self.s_max {
            return psi_star(&self.config, sigma, &Vec2::new(s, 0.0), self.d0, &self.settings)
                .unwrap_or(f64::INFINITY);
        }
        let x = s / self.h;
        let i = (x.floor() as usize).min(self.pairs[0].2.len().saturating_sub(2));
        let t = x - i as f64;
        let mut inf = f64::INFINITY;
        for (mu, nu, samples) in &self.pairs {
            let (Some(a), Some(b)) = (samples[i], samples[i + 1]) else {
                continue;
            };
            let p = a + t * (b - a);
            let phase = Phase::new(&self.config, PhaseTriple { sigma, mu: *mu, nu: *nu })
                .expect("pairs are valid for the table's config");
            inf = inf.min(collinear_phi(&phase, s, p).abs());
        }
        2f64.powf(self.d0) * (1.0 + s) * inf
    }
}
