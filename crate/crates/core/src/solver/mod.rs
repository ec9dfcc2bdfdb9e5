//! Pseudospectral evolution of the first-order system in profile variables.
//!
//! With `v_σ = (∂_t − iΛ_σ)u_σ` the system reads `(∂_t + iΛ_σ)v_σ = N_σ`,
//! `N_α = Σ A_{αβγ} u_β u_γ`, and the profile `V_σ = e^{itΛ_σ}v_σ` obeys
//! `∂_t V̂_σ = e^{itΛ_σ} N̂_σ`. The linear flow is therefore exact and only the
//! quadratic term is integrated, by classical RK4.

mod data;
mod diagnostics;

pub use data::{real_field, InitialData, RunConfig, Schedule};
pub use diagnostics::{decay_fit, DecayFit, DiagnosticRecord, DiagnosticsOptions, DiagnosticsSeries};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{Branch, SignedSpecies, SystemConfig};
use crate::dyadic::FourierField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    IntegratingFactorRk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    /// The box is `[−L, L)²`.
    pub half_length: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Fraction of each axis' wavenumbers kept in the nonlinearity.
    #[serde(default = "default_dealias")]
    pub dealias: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

fn default_integrator() -> Integrator {
    Integrator::IntegratingFactorRk4
}

impl SolverConfig {
    pub fn new(n: usize, half_length: f64, dt: f64, t_final: f64) -> Self {
        Self {
            n,
            half_length,
            dt,
            t_final,
            dealias: default_dealias(),
            integrator: default_integrator(),
        }
    }

    /// Number of steps and the step actually taken so that the last step
    /// lands on `t_final`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }

    fn check(&self, system: &SystemConfig) -> Result<()> {
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(Error::Config(format!("grid size {} must be a power of two ≥ 4", self.n)));
        }
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::Config("box half-length must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config("dt must be positive and T_final non-negative".into()));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            return Err(Error::Config("dealias fraction must lie in (0, 1]".into()));
        }
        let xi_max = std::f64::consts::PI / self.half_length * (self.n / 2) as f64 * std::f64::consts::SQRT_2;
        let rot = system
            .species()
            .iter()
            .map(|s| self.dt * (s.speed * s.speed * xi_max * xi_max + s.mass * s.mass).sqrt())
            .fold(0.0, f64::max);
        if rot >= std::f64::consts::PI {
            return Err(Error::Config(format!(
                "dt·max Λ = {rot:.3} ≥ π; reduce dt or the grid resolution"
            )));
        }
        Ok(())
    }

    /// Whether data supported in `|x| ≤ support_radius` stays clear of the
    /// periodic boundary up to `t_final`.
    pub fn window_ok(&self, system: &SystemConfig, support_radius: f64) -> bool {
        self.half_length > support_radius + system.max_speed() * self.t_final
    }
}

/// The profiles `V̂_σ(t)`, `σ = 1..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileState {
    pub t: f64,
    pub step: usize,
    pub profiles: Vec<FourierField>,
}

impl ProfileState {
    pub fn d(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_finite(&self) -> bool {
        self.profiles.iter().all(FourierField::is_finite)
    }

    /// `(Σ_σ ‖V_σ − W_σ‖²)^{1/2}`.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        self.profiles
            .iter()
            .zip(&other.profiles)
            .map(|(a, b)| a.sub(b).l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Output of [`Solver::run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: DiagnosticsSeries,
    pub final_state: ProfileState,
    /// States at every recorded step, when requested.
    pub snapshots: Vec<ProfileState>,
}

#[derive(Debug)]
pub struct Solver {
    system: SystemConfig,
    config: SolverConfig,
    /// `Λ_σ` on the lattice, storage order.
    lambda: Vec<Vec<f64>>,
    mask: Vec<bool>,
    n_steps: usize,
    dt: f64,
}

impl Solver {
    pub fn new(system: SystemConfig, config: SolverConfig) -> Result<Self> {
        config.check(&system)?;
        let grid = FourierField::zeros(config.n, config.half_length)?;
        let n = config.n;
        let lambda = (1..=system.d() as i32)
            .map(|s| {
                let br = system.branch(SignedSpecies::raw(s))?;
                Ok((0..n * n).map(|k| br.lambda(&grid.xi(k / n, k % n))).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let keep = config.dealias * (n / 2) as f64 + 1e-9;
        let mask = (0..n * n)
            .map(|k| {
                let (a, b) = (grid.wavenumber(k / n), grid.wavenumber(k % n));
                (a.unsigned_abs() as f64) <= keep && (b.unsigned_abs() as f64) <= keep && a != -(n as i64) / 2 && b != -(n as i64) / 2
            })
            .collect();
        let (n_steps, dt) = config.steps();
        Ok(Self {
            system,
            config,
            lambda,
            mask,
            n_steps,
            dt,
        })
    }

    pub fn system(&self) -> &SystemConfig {
        &self.system
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Step count and effective step.
    pub fn schedule_steps(&self) -> (usize, f64) {
        (self.n_steps, self.dt)
    }

    pub fn lambda_table(&self, species: usize) -> &[f64] {
        &self.lambda[species]
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn branch(&self, species: usize) -> Branch {
        self.system.branch(SignedSpecies::raw(species as i32 + 1)).expect("species validated")
    }

    fn empty(&self) -> FourierField {
        FourierField::zeros(self.config.n, self.config.half_length).expect("validated lattice")
    }

    /// `v̂_σ(0) = ĥ_σ − iΛ_σ ĝ_σ` from the transforms of real data.
    pub fn init_from_data(&self, g: &[FourierField], h: &[FourierField]) -> Result<ProfileState> {
        let d = self.system.d();
        if g.len() != d || h.len() != d {
            return Err(Error::Config(format!("expected {d} position and {d} velocity fields")));
        }
        let mut profiles = Vec::with_capacity(d);
        for s in 0..d {
            for f in [&g[s], &h[s]] {
                if f.n() != self.config.n || f.half_length() != self.config.half_length {
                    return Err(Error::Config("data lattice differs from the solver lattice".into()));
                }
                let scale = f.max_abs().max(f64::MIN_POSITIVE);
                if f.hermitian_defect() > 1e-10 * scale {
                    return Err(Error::Precondition(format!(
                        "data for species {} is not the transform of a real field",
                        s + 1
                    )));
                }
            }
            let lam = &self.lambda[s];
            let vals = g[s]
                .values()
                .iter()
                .zip(h[s].values())
                .zip(lam)
                .map(|((gv, hv), l)| hv - Complex64::i() * l * gv)
                .collect();
            profiles.push(
                self.empty()
                    .like(vals)
                    .with_species(Some(SignedSpecies::raw(s as i32 + 1))),
            );
        }
        Ok(ProfileState {
            t: 0.0,
            step: 0,
            profiles,
        })
    }

    /// Initial state from physical samples of `g`, `h` in FFT order.
    pub fn init_from_physical(&self, g: &[Vec<f64>], h: &[Vec<f64>]) -> Result<ProfileState> {
        let to = |v: &Vec<f64>| {
            FourierField::from_physical(
                self.config.n,
                self.config.half_length,
                v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            )
            .map(|f| symmetrize(&f))
        };
        let g = g.iter().map(to).collect::<Result<Vec<_>>>()?;
        let h = h.iter().map(to).collect::<Result<Vec<_>>>()?;
        self.init_from_data(&g, &h)
    }

    /// `v̂_σ(t) = e^{−itΛ_σ} V̂_σ(t)`.
    pub fn v_hat(&self, state: &ProfileState, species: usize) -> FourierField {
        rotate(&state.profiles[species], &self.lambda[species], -state.t)
    }

    /// `û_σ = i(v̂ − conj v̂(−ξ)) / (2Λ_σ)`.
    pub fn u_hat_from_v(&self, v: &FourierField, species: usize) -> FourierField {
        let lam = &self.lambda[species];
        let vals = v.values();
        let out = (0..vals.len())
            .map(|k| Complex64::i() * (vals[k] - vals[v.mirror_index(k)].conj()) / (2.0 * lam[k]))
            .collect();
        v.like(out).with_real(true)
    }

    pub fn u_hat(&self, state: &ProfileState, species: usize) -> FourierField {
        self.u_hat_from_v(&self.v_hat(state, species), species)
    }

    /// Real physical samples of `u_σ(t)` in FFT order.
    pub fn u_physical(&self, state: &ProfileState, species: usize) -> Vec<f64> {
        self.u_hat(state, species).to_physical().into_iter().map(|z| z.re).collect()
    }

    /// `N̂_α = P_mask F[Σ A_{αβγ} u_β u_γ]` at the state's time.
    pub fn nonlinearity(&self, state: &ProfileState) -> Vec<FourierField> {
        let d = self.system.d();
        let us: Vec<Vec<f64>> = (0..d).into_par_iter().map(|s| self.u_physical(state, s)).collect();
        self.quadratic(&us, true)
    }

    /// `F[Σ A_{αβγ} u_β u_γ]` from physical `u`, optionally dealiased.
    pub fn quadratic(&self, us: &[Vec<f64>], dealias: bool) -> Vec<FourierField> {
        let d = self.system.d();
        let n = self.config.n;
        (0..d)
            .into_par_iter()
            .map(|a| {
                let mut acc = vec![0.0; n * n];
                let mut any = false;
                for b in 0..d {
                    for c in 0..d {
                        let w = self.system.coupling(a, b, c);
                        if w == 0.0 {
                            continue;
                        }
                        any = true;
                        for ((o, x), y) in acc.iter_mut().zip(&us[b]).zip(&us[c]) {
                            *o += w * x * y;
                        }
                    }
                }
                let field = if any {
                    FourierField::from_physical(n, self.config.half_length, acc.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
                        .expect("validated lattice")
                } else {
                    self.empty()
                };
                let field = if dealias {
                    let vals = field.values().iter().zip(&self.mask).map(|(v, &m)| if m { *v } else { Complex64::default() }).collect();
                    field.like(vals)
                } else {
                    field
                };
                field.with_species(Some(SignedSpecies::raw(a as i32 + 1))).with_real(true)
            })
            .collect()
    }

    /// `e^{itΛ} N̂(e^{−itΛ}V)`.
    fn rhs(&self, t: f64, profiles: &[FourierField]) -> Vec<FourierField> {
        let st = ProfileState {
            t,
            step: 0,
            profiles: profiles.to_vec(),
        };
        self.nonlinearity(&st)
            .into_iter()
            .enumerate()
            .map(|(s, f)| rotate(&f, &self.lambda[s], t))
            .collect()
    }

    /// One integrating-factor RK4 step of size `dt`.
    pub fn step_by(&self, state: &ProfileState, dt: f64) -> ProfileState {
        let t = state.t;
        let next_t = t + dt;
        if self.system.is_linear() {
            return ProfileState {
                t: next_t,
                step: state.step + 1,
                profiles: state.profiles.clone(),
            };
        }
        let v0 = &state.profiles;
        let axpy = |base: &[FourierField], k: &[FourierField], s: f64| -> Vec<FourierField> {
            base.iter().zip(k).map(|(b, k)| b.add(&k.scale(s))).collect()
        };
        let k1 = self.rhs(t, v0);
        let k2 = self.rhs(t + 0.5 * dt, &axpy(v0, &k1, 0.5 * dt));
        let k3 = self.rhs(t + 0.5 * dt, &axpy(v0, &k2, 0.5 * dt));
        let k4 = self.rhs(next_t, &axpy(v0, &k3, dt));
        let profiles = (0..v0.len())
            .map(|s| {
                let vals = (0..v0[s].values().len())
                    .map(|i| {
                        v0[s].values()[i]
                            + (k1[s].values()[i] + 2.0 * k2[s].values()[i] + 2.0 * k3[s].values()[i] + k4[s].values()[i])
                                * (dt / 6.0)
                    })
                    .collect();
                v0[s].like(vals)
            })
            .collect();
        ProfileState {
            t: next_t,
            step: state.step + 1,
            profiles,
        }
    }

    /// One step with the configured step size; times are kept on the
    /// integer grid `step·dt`.
    pub fn step(&self, state: &ProfileState) -> Result<ProfileState> {
        let mut next = self.step_by(state, self.dt);
        next.t = next.step as f64 * self.dt;
        if !next.is_finite() {
            return Err(Error::NonFinite {
                step: next.step,
                t: next.t,
                last_good: Box::new(state.clone()),
            });
        }
        Ok(next)
    }

    /// Steps recorded for a schedule: the initial and final step plus the
    /// step nearest each requested time.
    pub fn record_steps(&self, schedule: &Schedule) -> Vec<usize> {
        let mut steps = vec![0, self.n_steps];
        for t in schedule.times(self.config.t_final) {
            if t >= 0.0 && t <= self.config.t_final + 0.5 * self.dt {
                steps.push(((t / self.dt).round() as usize).min(self.n_steps));
            }
        }
        steps.sort_unstable();
        steps.dedup();
        steps
    }

    /// Evolves to `t_final`, recording diagnostics at the schedule.
    pub fn run(
        &self,
        initial: ProfileState,
        schedule: &Schedule,
        options: &DiagnosticsOptions,
        keep_states: bool,
    ) -> Result<RunOutput> {
        let steps = self.record_steps(schedule);
        let ctx = diagnostics::Context::new(self, options)?;
        let mut series = DiagnosticsSeries::default();
        let mut snapshots = Vec::new();
        let reference = initial.clone();
        let mut state = initial;
        let mut next_record = 0;
        loop {
            if next_record < steps.len() && steps[next_record] == state.step {
                series.records.extend(ctx.records(self, &state, &reference));
                if keep_states {
                    snapshots.push(state.clone());
                }
                next_record += 1;
            }
            if state.step >= self.n_steps {
                break;
            }
            state = self.step(&state)?;
        }
        Ok(RunOutput {
            series,
            final_state: state,
            snapshots,
        })
    }
}

/// `f̂·e^{itΛ}`.
fn rotate(f: &FourierField, lam: &[f64], t: f64) -> FourierField {
    if t == 0.0 {
        return f.clone();
    }
    let vals = f
        .values()
        .iter()
        .zip(lam)
        .map(|(v, l)| v * Complex64::from_polar(1.0, t * l))
        .collect();
    f.like(vals)
}

/// Projects onto Hermitian-symmetric data, removing round-off asymmetry.
pub fn symmetrize(f: &FourierField) -> FourierField {
    let vals = f.values();
    let out = (0..vals.len())
        .map(|k| 0.5 * (vals[k] + vals[f.mirror_index(k)].conj()))
        .collect();
    f.like(out).with_real(true)
}
