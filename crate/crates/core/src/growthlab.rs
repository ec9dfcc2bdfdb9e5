//! Iterated first-Duhamel experiment for degenerate mass configurations.
//!
//! One round evaluates
//!
//! ```text
//! f̂_σ(ξ) = ∫_{2^m}^{2^{m+1}} ∫ e^{isΦ(ξ,η)} f̂_μ(ξ−η) f̂_ν(η) dη ds
//! ```
//!
//! for radial, time-independent inputs. The time integral is done in closed
//! form and the η integral by a tensor midpoint rule. Radial inputs give a
//! radial output, so the output is sampled along the positive first axis.
//! The next round feeds the windowed output back in at the rescaled
//! localization index `3j`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{SystemConfig, Vec2};
use crate::dyadic::CutoffFamily;
use crate::error::{Error, Result};
use crate::phase::{Phase, PhaseTriple};

/// A radial input profile `f̂(|η|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `2^{cj} φ_{−j}(|η|)`, supported where `|η| ∼ 2^{−j}`.
    Bump { j: i32, c: f64 },
    /// `a·exp(−r²/w²)`, truncated at `8w`.
    Gaussian { amplitude: f64, width: f64 },
    /// Linear interpolation of samples at increasing radii, zero outside.
    Table { radii: Vec<f64>, values: Vec<Complex64> },
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> Complex64 {
        match self {
            Self::Bump { j, c } => Complex64::new(2f64.powf(c * *j as f64) * CutoffFamily.phi_k(-j, r), 0.0),
            Self::Gaussian { amplitude, width } => {
                if r > 8.0 * width {
                    Complex64::default()
                } else {
                    Complex64::new(amplitude * (-(r * r) / (width * width)).exp(), 0.0)
                }
            }
            Self::Table { radii, values } => {
                let n = radii.len();
                if n == 0 || r < radii[0] || r > radii[n - 1] {
                    return Complex64::default();
                }
                let i = radii.partition_point(|&x| x <= r).clamp(1, n - 1);
                let (r0, r1) = (radii[i - 1], radii[i]);
                let t = if r1 > r0 { (r - r0) / (r1 - r0) } else { 0.0 };
                values[i - 1] * (1.0 - t) + values[i] * t
            }
        }
    }

    /// Radius beyond which the profile vanishes.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Bump { j, .. } => CutoffFamily::annulus_support(-j).1,
            Self::Gaussian { width, .. } => 8.0 * width,
            Self::Table { radii, .. } => radii.last().copied().unwrap_or(0.0),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Bump { j, c } if s > 0.0 => Self::Bump {
                j: *j,
                c: c + s.log2() / *j as f64,
            },
            Self::Bump { j, .. } => {
                let (lo, hi) = CutoffFamily::annulus_support(-j);
                let radii: Vec<f64> = (0..=4096).map(|i| lo + (hi - lo) * i as f64 / 4096.0).collect();
                let values = radii.iter().map(|&r| self.value(r) * s).collect();
                Self::Table { radii, values }
            }
            Self::Gaussian { amplitude, width } => Self::Gaussian {
                amplitude: amplitude * s,
                width: *width,
            },
            Self::Table { radii, values } => Self::Table {
                radii: radii.clone(),
                values: values.iter().map(|v| v * s).collect(),
            },
        }
    }
}

/// `∫_a^{2a} e^{isΦ} ds = a e^{3ix/2}·2 sin(x/2)/x` with `x = aΦ`.
pub fn time_integral(a: f64, phi: f64) -> Complex64 {
    let x = a * phi;
    let sinc = if x.abs() < 1e-6 {
        1.0 - x * x / 24.0
    } else {
        2.0 * (0.5 * x).sin() / x
    };
    Complex64::from_polar(a * sinc, 1.5 * x)
}

/// `(e^{2iaΦ} − e^{iaΦ})/(iΦ)`, with `e^{ix} − 1` formed without cancellation.
pub fn time_integral_exact(a: f64, phi: f64) -> Complex64 {
    let x = a * phi;
    let h = (0.5 * x).sin();
    let em1 = Complex64::new(-2.0 * h * h, x.sin());
    Complex64::from_polar(1.0, x) * em1 / Complex64::new(0.0, phi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationSpec {
    pub triple: PhaseTriple,
    /// Localization index of the first-round inputs.
    pub j: i32,
    /// Time exponent of the first round; `None` means `4j`.
    pub m: Option<i32>,
    /// Amplitude exponent of the first-round inputs.
    pub c: f64,
    /// Midpoint points along the first η axis; half as many along the second.
    pub quad_n: usize,
    /// Output radii per round.
    pub out_points: usize,
    /// Replace `Φ` by zero (oracle runs).
    pub zero_phase: bool,
}

impl Default for IterationSpec {
    fn default() -> Self {
        Self {
            triple: PhaseTriple::new(1, 2, -1),
            j: 2,
            m: None,
            c: 0.0,
            quad_n: 512,
            out_points: 256,
            zero_phase: false,
        }
    }
}

impl IterationSpec {
    pub fn new(triple: PhaseTriple, j: i32) -> Self {
        Self {
            triple,
            j,
            ..Self::default()
        }
    }

    pub fn time_exponent(&self) -> i32 {
        self.m.unwrap_or(4 * self.j)
    }

    fn validate(&self) -> Result<()> {
        if self.j < 1 {
            return Err(Error::Config(format!("localization index {} must be ≥ 1", self.j)));
        }
        if self.time_exponent() < 4 {
            return Err(Error::Config(format!("time exponent {} must be ≥ 4", self.time_exponent())));
        }
        if self.quad_n < 512 || !self.quad_n.is_multiple_of(2) {
            return Err(Error::Quadrature(format!(
                "{} points per axis cannot resolve the output scale; at least 512 (even) are required",
                self.quad_n
            )));
        }
        if self.out_points < 8 {
            return Err(Error::Config("at least 8 output radii are required".into()));
        }
        Ok(())
    }
}

/// Output of one round, sampled at midpoint radii along `(ρ, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialOutput {
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Radial grid spacing.
    pub dr: f64,
}

impl RadialOutput {
    /// `(∫|f̂|² dξ)^{1/2} = (2π∫|f̂|²ρ dρ)^{1/2}` restricted to `[lo, hi]`.
    pub fn l2_between(&self, lo: f64, hi: f64) -> f64 {
        let s: f64 = self
            .radii
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(r, v)| v.norm_sqr() * r)
            .sum();
        (2.0 * std::f64::consts::PI * s * self.dr).sqrt()
    }

    pub fn l2(&self) -> f64 {
        self.l2_between(0.0, f64::INFINITY)
    }

    /// Smallest grid radius enclosing `fraction` of the squared norm.
    pub fn mass_radius(&self, fraction: f64) -> f64 {
        let total: f64 = self.radii.iter().zip(&self.values).map(|(r, v)| v.norm_sqr() * r).sum();
        let mut acc = 0.0;
        for (r, v) in self.radii.iter().zip(&self.values) {
            acc += v.norm_sqr() * r;
            if acc >= fraction * total {
                return r + 0.5 * self.dr;
            }
        }
        self.radii.last().copied().unwrap_or(0.0) + 0.5 * self.dr
    }

    /// Hard spectral window, returned as an interpolation table.
    pub fn windowed(&self, lo: f64, hi: f64) -> RadialProfile {
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (r, v) in self.radii.iter().zip(&self.values) {
            if *r >= lo && *r <= hi {
                radii.push(*r);
                values.push(*v);
            }
        }
        RadialProfile::Table { radii, values }
    }

    pub fn peak_between(&self, lo: f64, hi: f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }
}

/// One Duhamel round with output radii on `[0, 2^{−3j+4}]`, `j` the
/// localization index of the inputs.
pub fn duhamel_once(
    config: &SystemConfig,
    spec: &IterationSpec,
    j: i32,
    m: i32,
    f_mu: &RadialProfile,
    f_nu: &RadialProfile,
) -> Result<RadialOutput> {
    spec.validate()?;
    let phase = Phase::new(config, spec.triple)?;
    let r_out = 2f64.powi(-3 * j + 4);
    let n_out = spec.out_points;
    let dr = r_out / n_out as f64;
    let radii: Vec<f64> = (0..n_out).map(|i| (i as f64 + 0.5) * dr).collect();

    let rho = f_nu.support_radius();
    let n1 = spec.quad_n;
    let n2 = spec.quad_n / 2;
    let h = 2.0 * rho / n1 as f64;
    let a = 2f64.powi(m);
    let eta: Vec<(Vec2, Complex64)> = (0..n1)
        .flat_map(|p| (0..n2).map(move |q| (p, q)))
        .filter_map(|(p, q)| {
            let e = Vec2::new(-rho + (p as f64 + 0.5) * h, (q as f64 + 0.5) * h);
            let v = f_nu.value(e.norm());
            (v != Complex64::default()).then_some((e, v))
        })
        .collect();

    if !spec.zero_phase {
        let gmax = radii
            .iter()
            .flat_map(|&r| {
                let xi = Vec2::new(r, 0.0);
                let phase = &phase;
                eta.iter().step_by(7).map(move |(e, _)| phase.grad_eta(&xi, e).norm())
            })
            .fold(0.0, f64::max);
        let inc = 2.0 * a * gmax * h;
        if inc > 1.0 {
            return Err(Error::Quadrature(format!(
                "phase advances {inc:.2} rad per η cell; refine beyond {n1} points"
            )));
        }
    }

    let w = 2.0 * h * h;
    let values: Vec<Complex64> = radii
        .par_iter()
        .map(|&r| {
            let xi = Vec2::new(r, 0.0);
            let mut acc = Complex64::default();
            for (e, fv) in &eta {
                let fm = f_mu.value((xi - e).norm());
                if fm == Complex64::default() {
                    continue;
                }
                let t = if spec.zero_phase {
                    Complex64::new(a, 0.0)
                } else {
                    time_integral(a, phase.phi(&xi, e))
                };
                acc += t * fm * fv;
            }
            acc * w
        })
        .collect();
    Ok(RadialOutput { radii, values, dr })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    /// Localization index of this round's inputs.
    pub j_in: i32,
    pub m: i32,
    /// Amplitude exponent of this round's inputs.
    pub c_in: f64,
    /// `L²` norm after the window `[2^{−3j−1}, 2^{−3j+1}]`.
    pub l2: f64,
    pub l2_total: f64,
    /// Radius holding 95% of the squared norm.
    pub support_radius: f64,
    /// Fraction of the squared norm outside `|ξ| ≤ 2^{−3j+3}`.
    pub outside_mass: f64,
    /// `log₂(peak)/(3j)` inside the window.
    pub amp_exponent: f64,
    /// Exponent inferred from the windowed norm assuming the output is
    /// `2^{3jc'}φ_{−3j}`.
    pub amp_exponent_normalized: f64,
    /// `(2c+2)/3`.
    pub amp_exponent_predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub triple: PhaseTriple,
    pub j: i32,
    pub m: i32,
    pub rounds: Vec<RoundReport>,
}

impl GrowthReport {
    /// `l2(round 2) / l2(round 1)`.
    pub fn ratio(&self) -> Option<f64> {
        (self.rounds.len() >= 2).then(|| self.rounds[1].l2 / self.rounds[0].l2)
    }
}

/// `‖φ_0‖_{L²(ℝ²)}`, the reference norm of a unit annulus bump.
fn unit_bump_l2() -> f64 {
    let (lo, hi) = CutoffFamily::annulus_support(0);
    let n = 4096;
    let dr = (hi - lo) / n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let r = lo + (i as f64 + 0.5) * dr;
            CutoffFamily.phi_k(0, r).powi(2) * r
        })
        .sum();
    (2.0 * std::f64::consts::PI * s * dr).sqrt()
}

/// Runs `rounds ∈ {1, 2}` of the construction.
pub fn iterate(config: &SystemConfig, spec: &IterationSpec, rounds: usize) -> Result<GrowthReport> {
    if !(1..=2).contains(&rounds) {
        return Err(Error::Config(format!("rounds must be 1 or 2, got {rounds}")));
    }
    spec.validate()?;
    let mut input = RadialProfile::Bump { j: spec.j, c: spec.c };
    let mut j = spec.j;
    let mut m = spec.time_exponent();
    let mut c = spec.c;
    let bump = unit_bump_l2();
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let res = duhamel_once(config, spec, j, m, &input, &input)?;
        let jo = 3 * j;
        let (lo, hi) = (2f64.powi(-jo - 1), 2f64.powi(-jo + 1));
        let l2 = res.l2_between(lo, hi);
        let l2_total = res.l2();
        let inside = res.l2_between(0.0, 2f64.powi(-jo + 3));
        let outside_mass = if l2_total > 0.0 {
            1.0 - (inside / l2_total).powi(2)
        } else {
            0.0
        };
        let amp = res.peak_between(lo, hi).log2() / jo as f64;
        let amp_n = 1.0 + (l2 / bump).log2() / jo as f64;
        out.push(RoundReport {
            round,
            j_in: j,
            m,
            c_in: c,
            l2,
            l2_total,
            support_radius: res.mass_radius(0.95),
            outside_mass,
            amp_exponent: amp,
            amp_exponent_normalized: amp_n,
            amp_exponent_predicted: (2.0 * c + 2.0) / 3.0,
        });
        input = res.windowed(lo, hi);
        c = amp;
        j = jo;
        m = 4 * jo;
    }
    Ok(GrowthReport {
        triple: spec.triple,
        j: spec.j,
        m: spec.time_exponent(),
        rounds: out,
    })
}

/// `(j, round, l2)` rows for a set of reports.
pub fn growth_csv(reports: &[GrowthReport]) -> String {
    let mut s = String::from("j,round,l2\n");
    for r in reports {
        for rd in &r.rounds {
            s.push_str(&format!("{},{},{}\n", r.j, rd.round, rd.l2));
        }
    }
    s
}

/// Least-squares slope of `log₂ y` against `x`.
pub fn log2_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// The degenerate two-species example: `c = (1, √2)`, `b = (1, 2)`.
pub fn degenerate_config() -> SystemConfig {
    SystemConfig::from_speeds_masses(&[1.0, std::f64::consts::SQRT_2], &[1.0, 2.0]).expect("valid parameters")
}

/// Three identical species, for the nondegenerate control.
pub fn control_config() -> SystemConfig {
    SystemConfig::from_speeds_masses(&[1.0; 3], &[1.0; 3]).expect("valid parameters")
}

pub fn control_triple() -> PhaseTriple {
    PhaseTriple::new(1, 2, -3)
}
