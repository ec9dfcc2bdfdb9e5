//! Empirical lower bounds for the phase-geometry inequalities.
//!
//! Each check scans `ξ = (s,0)`, `η = r(cos θ, sin θ)` over dyadic annuli
//! `k, k₁, k₂ ∈ [k_lo, k_hi]` (rotation invariance removes the angle of `ξ`)
//! and records the minimum of a combined quantity, weighted by
//! `k̄ = max(k, k₁, k₂, 0)`. Radii are log-spaced with a fixed number of nodes
//! per octave and angles uniform on `[0, π]` including both collinear
//! directions, so doubling the resolution nests the grids. Zeros of `Φ`
//! bracketed between neighbouring radii are located by bisection and added
//! to the samples, since the `|Φ|` terms carry large weights and their
//! minima sit on the zero set.
//!
//! Conjugating a triple flips the sign of `Φ` and of both gradients, so only
//! triples with `σ > 0` are scanned.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::triple_flags;
use crate::dispersion::SystemConfig;
use crate::dyadic::CutoffFamily;
use crate::error::{Error, Result};
use crate::phase::PhaseTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    /// One frequency below `2^{−D0}`: `max(|Φ|, 2^{3k̄}|∇_ηΦ|)`.
    LowFrequency,
    /// One frequency above `2^{D0}`: `max(2^{k̄}|Φ|, 2^{3k̄}|∇_ηΦ|)`.
    HighFrequency,
    /// `μ + ν = 0`: `2^{4k̄}|∇_ηΦ|`.
    OppositePair,
    /// All frequencies below `2^{D0}`: `2^{3k̄}|Φ| + |∇_ξΦ| + |∇_ηΦ|`.
    Combined,
    /// At `η = 0`: `min(|Φ| + |∇_ηΦ|, |Φ| + |∇_ξΦ|)`.
    ZeroInput,
    /// Zero count of `Φ(ξ,0)` and `Φ(0,η)` along a ray.
    ZeroCount,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::LowFrequency,
        LemmaId::HighFrequency,
        LemmaId::OppositePair,
        LemmaId::Combined,
        LemmaId::ZeroInput,
        LemmaId::ZeroCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::LowFrequency => "low-frequency",
            LemmaId::HighFrequency => "high-frequency",
            LemmaId::OppositePair => "opposite-pair",
            LemmaId::Combined => "combined",
            LemmaId::ZeroInput => "zero-input",
            LemmaId::ZeroCount => "zero-count",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = LemmaId::ALL.iter().map(|l| l.name()).collect();
                Error::Config(format!("unknown check `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyRegion {
    pub k_lo: i32,
    pub k_hi: i32,
    pub per_octave: usize,
    pub n_theta: usize,
    /// Threshold index separating the low/high-frequency regions.
    pub d0: i32,
}

impl Default for CertifyRegion {
    fn default() -> Self {
        Self {
            k_lo: -20,
            k_hi: 10,
            per_octave: 8,
            n_theta: 64,
            d0: 4,
        }
    }
}

impl CertifyRegion {
    pub fn refined(self) -> Self {
        Self {
            per_octave: self.per_octave * 2,
            n_theta: self.n_theta * 2,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_lo > self.k_hi || self.per_octave == 0 || self.n_theta == 0 {
            return Err(Error::Config(format!("degenerate certification region {self:?}")));
        }
        Ok(())
    }

    fn in_range(&self, k: i32) -> bool {
        (self.k_lo..=self.k_hi).contains(&k)
    }

    /// Log-spaced radii whose dyadic index lies in range.
    fn radii(&self, per_octave: usize) -> Vec<f64> {
        let count = (self.k_hi - self.k_lo + 2) as usize * per_octave;
        (0..=count)
            .map(|i| 2f64.powf((self.k_lo - 1) as f64 + i as f64 / per_octave as f64))
            .filter(|&r| self.in_range(CutoffFamily::dyadic_index(r)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub s: f64,
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleMinimum {
    pub triple: PhaseTriple,
    pub hypotheses_ok: bool,
    pub minimum: f64,
    pub at: Option<Sample>,
    /// Zero count for the ray check.
    pub zeros: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaResult {
    pub id: LemmaId,
    /// Minimum over triples meeting the hypotheses; the certified constant.
    pub minimum: f64,
    /// Minimum over every scanned triple.
    pub minimum_all_triples: f64,
    pub refined_minimum: Option<f64>,
    pub relative_change: Option<f64>,
    pub hypotheses_violated: Vec<PhaseTriple>,
    pub max_zero_count: Option<usize>,
    pub per_triple: Vec<TripleMinimum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub region: CertifyRegion,
    pub refined: bool,
    pub lemmas: Vec<LemmaResult>,
}

impl CertificationReport {
    pub fn get(&self, id: LemmaId) -> Option<&LemmaResult> {
        self.lemmas.iter().find(|l| l.id == id)
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    at: Option<Sample>,
}

impl Best {
    const NONE: Best = Best { value: f64::INFINITY, at: None };

    #[inline]
    fn offer(&mut self, value: f64, s: f64, r: f64, theta: f64) {
        if value < self.value {
            self.value = value;
            self.at = Some(Sample { s, r, theta });
        }
    }

    fn merge(self, other: Best) -> Best {
        if other.value < self.value {
            other
        } else {
            self
        }
    }
}

/// Bisection steps for zeros of `Φ` bracketed along the `r` grid.
const ROOT_STEPS: usize = 60;

const PLANAR: [LemmaId; 4] = [
    LemmaId::LowFrequency,
    LemmaId::HighFrequency,
    LemmaId::OppositePair,
    LemmaId::Combined,
];

struct Scan {
    triples: Vec<PhaseTriple>,
    signs: Vec<[f64; 3]>,
    bases: Vec<[usize; 3]>,
    defects: Vec<f64>,
    opposite: Vec<bool>,
    c2: Vec<f64>,
    b: Vec<f64>,
}

impl Scan {
    fn new(config: &SystemConfig) -> Self {
        let triples: Vec<PhaseTriple> = PhaseTriple::all_signed(config.d())
            .into_iter()
            .filter(|t| t.sigma.index() > 0)
            .collect();
        let signs = triples.iter().map(|t| [t.sigma.sign(), t.mu.sign(), t.nu.sign()]).collect();
        let bases = triples.iter().map(|t| [t.sigma.base(), t.mu.base(), t.nu.base()]).collect();
        let defects = triples
            .iter()
            .map(|t| config.mass(t.sigma).unwrap() - config.mass(t.mu).unwrap() - config.mass(t.nu).unwrap())
            .collect();
        let opposite = triples.iter().map(|t| t.is_mu_nu_opposite()).collect();
        Self {
            triples,
            signs,
            bases,
            defects,
            opposite,
            c2: config.species().iter().map(|p| p.speed * p.speed).collect(),
            b: config.species().iter().map(|p| p.mass).collect(),
        }
    }

    /// Minima per triple and planar check over the nested grids.
    fn planar(&self, region: &CertifyRegion, per_octave: usize, n_theta: usize) -> Vec<[Best; 4]> {
        let radii = region.radii(per_octave);
        let thetas: Vec<(f64, f64)> = (0..=n_theta)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / n_theta as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let nt = self.triples.len();
        let d = self.c2.len();
        let row = |is: usize| -> Vec<[Best; 4]> {
            let mut acc = vec![[Best::NONE; 4]; nt];
            let mut prev = vec![f64::NAN; nt * thetas.len()];
            let mut prev_r = 0.0;
            let s = radii[is];
            let k = CutoffFamily::dyadic_index(s);
            let mut e = vec![[0.0f64; 3]; d];
            let mut w = vec![[0.0f64; 3]; d];
            for &r in &radii {
                let k2 = CutoffFamily::dyadic_index(r);
                for (it, &(ct, st)) in thetas.iter().enumerate() {
                    let (ex, ey) = (r * ct, r * st);
                    let (dx, dy) = (s - ex, -ey);
                    let d2 = dx * dx + dy * dy;
                    if d2 == 0.0 {
                        continue;
                    }
                    let k1 = CutoffFamily::dyadic_index(d2.sqrt());
                    if !region.in_range(k1) {
                        continue;
                    }
                    let kmax = k.max(k1).max(k2);
                    let kmin = k.min(k1).min(k2);
                    let kbar = kmax.max(0);
                    let w1 = 2f64.powi(kbar);
                    let w3 = w1 * w1 * w1;
                    let w4 = w3 * w1;
                    let low = kmin <= -region.d0;
                    let high = kmax >= region.d0;
                    let mid = kmax <= region.d0;
                    let r2s = [s * s, d2, r * r];
                    for a in 0..d {
                        for v in 0..3 {
                            let q = (self.c2[a] * r2s[v] + self.b[a] * self.b[a]).sqrt();
                            e[a][v] = self.c2[a] * r2s[v] / (q + self.b[a]);
                            w[a][v] = self.c2[a] / q;
                        }
                    }
                    for t in 0..nt {
                        let [ss, sm, sn] = self.signs[t];
                        let [bs, bm, bn] = self.bases[t];
                        let phi = self.defects[t] + (ss * e[bs][0] - sm * e[bm][1] - sn * e[bn][2]);
                        let ws = ss * w[bs][0];
                        let wm = sm * w[bm][1];
                        let wn = sn * w[bn][2];
                        let gx = (ws * s - wm * dx, -wm * dy);
                        let ge = (wm * dx - wn * ex, wm * dy - wn * ey);
                        let gxn = gx.0.hypot(gx.1);
                        let gen = ge.0.hypot(ge.1);
                        let aphi = phi.abs();
                        let theta = std::f64::consts::PI * it as f64 / n_theta as f64;
                        let slot = &mut acc[t];
                        if low {
                            slot[0].offer(aphi.max(w3 * gen), s, r, theta);
                        }
                        if high {
                            slot[1].offer((w1 * aphi).max(w3 * gen), s, r, theta);
                        }
                        if self.opposite[t] {
                            slot[2].offer(w4 * gen, s, r, theta);
                        }
                        if mid {
                            slot[3].offer(w3 * aphi + gxn + gen, s, r, theta);
                        }
                        let p = &mut prev[t * thetas.len() + it];
                        if (*p < 0.0 && phi > 0.0) || (*p > 0.0 && phi < 0.0) {
                            let root = self.phi_root(t, s, theta, prev_r, r);
                            for l in [0, 1, 3] {
                                let v = self.planar_value(region, t, l, s, root, theta);
                                slot[l].offer(v, s, root, theta);
                            }
                        }
                        *p = phi;
                    }
                }
                prev_r = r;
            }
            acc
        };
        (0..radii.len())
            .into_par_iter()
            .map(row)
            .reduce(
                || vec![[Best::NONE; 4]; nt],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        for l in 0..4 {
                            x[l] = x[l].merge(y[l]);
                        }
                    }
                    a
                },
            )
    }

    /// Signed `Φ`, `|∇_ξΦ|`, `|∇_ηΦ|` and the three dyadic indices.
    fn eval(&self, t: usize, s: f64, r: f64, theta: f64) -> (f64, f64, f64, [i32; 3]) {
        let (ex, ey) = (r * theta.cos(), r * theta.sin());
        let (dx, dy) = (s - ex, -ey);
        let d2 = dx * dx + dy * dy;
        let ks = [s, d2.sqrt(), r].map(CutoffFamily::dyadic_index);
        let [ss, sm, sn] = self.signs[t];
        let [bs, bm, bn] = self.bases[t];
        let r2s = [s * s, d2, r * r];
        let term = |a: usize, v: usize| {
            let q = (self.c2[a] * r2s[v] + self.b[a] * self.b[a]).sqrt();
            (self.c2[a] * r2s[v] / (q + self.b[a]), self.c2[a] / q)
        };
        let (es, ws) = term(bs, 0);
        let (em, wm) = term(bm, 1);
        let (en, wn) = term(bn, 2);
        let phi = self.defects[t] + ss * es - sm * em - sn * en;
        let (ws, wm, wn) = (ss * ws, sm * wm, sn * wn);
        let gx = (ws * s - wm * dx).hypot(-wm * dy);
        let ge = (wm * dx - wn * ex).hypot(wm * dy - wn * ey);
        (phi, gx, ge, ks)
    }

    /// Zero of `r ↦ Φ(s, r, θ)` in a sign-changing bracket.
    fn phi_root(&self, t: usize, s: f64, theta: f64, mut lo: f64, mut hi: f64) -> f64 {
        let f_lo = self.eval(t, s, lo, theta).0;
        for _ in 0..ROOT_STEPS {
            let mid = 0.5 * (lo + hi);
            if (self.eval(t, s, mid, theta).0 < 0.0) == (f_lo < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// One planar quantity at `ξ = (s,0)`, `η = r(cos θ, sin θ)`; infinite
    /// outside the check's region.
    fn planar_value(&self, region: &CertifyRegion, t: usize, slot: usize, s: f64, r: f64, theta: f64) -> f64 {
        let (phi, gx, ge, ks) = self.eval(t, s, r, theta);
        if !ks.iter().all(|&k| region.in_range(k)) || !ge.is_finite() {
            return f64::INFINITY;
        }
        let kmax = ks[0].max(ks[1]).max(ks[2]);
        let kmin = ks[0].min(ks[1]).min(ks[2]);
        let w1 = 2f64.powi(kmax.max(0));
        let w3 = w1 * w1 * w1;
        let phi = phi.abs();
        match slot {
            0 if kmin <= -region.d0 => phi.max(w3 * ge),
            1 if kmax >= region.d0 => (w1 * phi).max(w3 * ge),
            2 if self.opposite[t] => w3 * w1 * ge,
            3 if kmax <= region.d0 => w3 * phi + gx + ge,
            _ => f64::INFINITY,
        }
    }

}

fn count_sign_changes(vals: &[f64]) -> usize {
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for &v in vals {
        if v == 0.0 {
            count += 1;
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            if (p < 0.0) != (v < 0.0) {
                count += 1;
            }
        }
        prev = Some(v);
    }
    count
}

/// Ray checks at `η = 0` for one triple: minimum of the two combined
/// quantities and the zero count.
fn ray(config: &SystemConfig, t: PhaseTriple, region: &CertifyRegion, per_octave: usize) -> Result<(Best, usize)> {
    let phase = crate::phase::Phase::new(config, t)?;
    let radii = region.radii(per_octave);
    let mut best = Best::NONE;
    let zero = crate::dispersion::Vec2::zeros();
    for &s in &radii {
        let xi = crate::dispersion::Vec2::new(s, 0.0);
        let phi = phase.phi(&xi, &zero).abs();
        let a = phi + phase.grad_eta(&xi, &zero).norm();
        let b = phi + phase.grad_xi(&xi, &zero).norm();
        best.offer(a.min(b), s, 0.0, 0.0);
    }
    let mut fx = vec![phase.phi_r2(0.0, 0.0, 0.0)];
    let mut fe = fx.clone();
    for &s in &radii {
        fx.push(phase.phi_r2(s * s, s * s, 0.0));
        fe.push(phase.phi_r2(0.0, s * s, s * s));
    }
    Ok((best, count_sign_changes(&fx).max(count_sign_changes(&fe))))
}

/// Scans the region, optionally again at doubled resolution, and returns a
/// result for each requested check.
pub fn certify_lower_bounds(
    config: &SystemConfig,
    region: &CertifyRegion,
    lemmas: &[LemmaId],
    refine: bool,
) -> Result<CertificationReport> {
    region.validate()?;
    let scan = Scan::new(config);
    let ok: Vec<bool> = scan
        .triples
        .iter()
        .map(|&t| triple_flags(config, t).map(|f| f.pass()))
        .collect::<Result<_>>()?;
    let want_planar = lemmas.iter().any(|l| PLANAR.contains(l));
    let levels: Vec<CertifyRegion> = if refine { vec![*region, region.refined()] } else { vec![*region] };
    let planar: Vec<Vec<[Best; 4]>> = if want_planar {
        levels.iter().map(|r| scan.planar(region, r.per_octave, r.n_theta)).collect()
    } else {
        Vec::new()
    };
    let rays: Vec<Vec<(Best, usize)>> = if lemmas.iter().any(|l| matches!(l, LemmaId::ZeroInput | LemmaId::ZeroCount)) {
        levels
            .iter()
            .map(|r| {
                scan.triples
                    .iter()
                    .map(|&t| ray(config, t, region, r.per_octave * 16))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut results = Vec::new();
    for &id in lemmas {
        let mut per_triple = Vec::new();
        let mut min_ok = f64::INFINITY;
        let mut min_all = f64::INFINITY;
        let mut refined_ok: Option<f64> = None;
        let mut violated = Vec::new();
        let mut max_zeros: Option<usize> = None;
        for (ti, &t) in scan.triples.iter().enumerate() {
            let (best, zeros, refined_best) = match id {
                LemmaId::ZeroInput | LemmaId::ZeroCount => {
                    let (b, z) = rays[0][ti];
                    (b, Some(z), rays.get(1).map(|r| r[ti].0))
                }
                planar_id => {
                    let slot = PLANAR.iter().position(|&p| p == planar_id).unwrap();
                    (planar[0][ti][slot], None, planar.get(1).map(|p| p[ti][slot]))
                }
            };
            if best.at.is_none() && zeros.is_none() {
                continue;
            }
            if !ok[ti] {
                violated.push(t);
            }
            let value = if id == LemmaId::ZeroCount { f64::NAN } else { best.value };
            if id != LemmaId::ZeroCount {
                min_all = min_all.min(value);
                if ok[ti] {
                    min_ok = min_ok.min(value);
                    if let Some(rb) = refined_best {
                        refined_ok = Some(refined_ok.map_or(rb.value, |m: f64| m.min(rb.value)));
                    }
                }
            }
            if let Some(z) = zeros.filter(|_| id == LemmaId::ZeroCount) {
                if ok[ti] {
                    max_zeros = Some(max_zeros.map_or(z, |m| m.max(z)));
                }
            }
            let at = if id == LemmaId::ZeroCount { None } else { best.at };
            per_triple.push(TripleMinimum {
                triple: t,
                hypotheses_ok: ok[ti],
                minimum: value,
                at,
                zeros: zeros.filter(|_| id == LemmaId::ZeroCount),
            });
        }
        let relative_change = refined_ok.map(|r| (r - min_ok).abs() / min_ok.abs());
        results.push(LemmaResult {
            id,
            minimum: if id == LemmaId::ZeroCount { f64::NAN } else { min_ok },
            minimum_all_triples: if id == LemmaId::ZeroCount { f64::NAN } else { min_all },
            refined_minimum: if id == LemmaId::ZeroCount { None } else { refined_ok },
            relative_change: if id == LemmaId::ZeroCount { None } else { relative_change },
            hypotheses_violated: violated,
            max_zero_count: max_zeros,
            per_triple,
        });
    }
    Ok(CertificationReport {
        region: *region,
        refined: refine,
        lemmas: results,
    })
}
