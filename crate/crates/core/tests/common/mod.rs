//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use kgscope::dispersion::{Mat2, Vec2};
use kgscope::phase::PhaseTriple;
use kgscope::resonance::{check_nondegeneracy, PsiStarTable};
use kgscope::dyadic::{make_cutoff, DyadicParams, FourierField};
use kgscope::{SignedSpecies, SystemConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn naive_lambda(c: f64, b: f64, sign: f64, x: &Vec2) -> f64 {
    sign * (c * c * x.norm_squared() + b * b).sqrt()
}

pub struct Naive {
    pub cs: [f64; 3],
    pub bs: [f64; 3],
    pub sg: [f64; 3],
}

impl Naive {
    pub fn new(config: &SystemConfig, t: PhaseTriple) -> Self {
        let mut cs = [0.0; 3];
        let mut bs = [0.0; 3];
        let mut sg = [0.0; 3];
        for (i, s) in t.as_array().into_iter().enumerate() {
            let sp = &config.species()[s.unsigned_abs() as usize - 1];
            cs[i] = sp.speed;
            bs[i] = sp.mass;
            sg[i] = s.signum() as f64;
        }
        Self { cs, bs, sg }
    }

    pub fn lam(&self, i: usize, x: &Vec2) -> f64 {
        naive_lambda(self.cs[i], self.bs[i], self.sg[i], x)
    }

    pub fn phi(&self, xi: &Vec2, eta: &Vec2) -> f64 {
        self.lam(0, xi) - self.lam(1, &(xi - eta)) - self.lam(2, eta)
    }
}

pub fn grad_fd(f: impl Fn(&Vec2) -> f64, x: &Vec2) -> Vec2 {
    let h = 1e-6 * (1.0 + x.norm());
    let e1 = Vec2::new(h, 0.0);
    let e2 = Vec2::new(0.0, h);
    Vec2::new((f(&(x + e1)) - f(&(x - e1))) / (2.0 * h), (f(&(x + e2)) - f(&(x - e2))) / (2.0 * h))
}

pub fn hess_fd(f: impl Fn(&Vec2) -> f64, x: &Vec2) -> Mat2 {
    let h = 1e-4 * (1.0 + x.norm());
    let e = [Vec2::new(h, 0.0), Vec2::new(0.0, h)];
    let mut m = Mat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b)] = (f(&(x + e[a] + e[b])) - f(&(x + e[a] - e[b])) - f(&(x - e[a] + e[b])) + f(&(x - e[a] - e[b])))
                / (4.0 * h * h);
        }
    }
    m
}

pub fn mixed_fd(f: impl Fn(&Vec2, &Vec2) -> f64, xi: &Vec2, eta: &Vec2) -> Mat2 {
    let h = 1e-4 * (1.0 + xi.norm() + eta.norm());
    let e = [Vec2::new(h, 0.0), Vec2::new(0.0, h)];
    let mut m = Mat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b)] = (f(&(xi + e[a]), &(eta + e[b])) - f(&(xi + e[a]), &(eta - e[b])) - f(&(xi - e[a]), &(eta + e[b]))
                + f(&(xi - e[a]), &(eta - e[b])))
                / (4.0 * h * h);
        }
    }
    m
}

pub fn rel_v(a: &Vec2, b: &Vec2) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn rel_m(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn random_case(rng: &mut ChaCha8Rng) -> (SystemConfig, PhaseTriple, Vec2, Vec2) {
    let d = 3;
    let cs: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let bs: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let config = SystemConfig::from_speeds_masses(&cs, &bs).unwrap();
    let pick = |rng: &mut ChaCha8Rng| {
        let i = rng.random_range(1..=d);
        if rng.random::<bool>() {
            i
        } else {
            -i
        }
    };
    let t = PhaseTriple::new(pick(rng), pick(rng), pick(rng));
    let mut v = || Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let xi = v();
    let eta = v();
    (config, t, xi, eta)
}

pub fn gaussian(n: usize, l: f64, c: [f64; 2], w: f64) -> FourierField {
    let grid = FourierField::zeros(n, l).unwrap();
    let samples = (0..n * n)
        .map(|k| {
            let x = grid.x(k / n, k % n);
            let r2 = (x.x - c[0]).powi(2) + (x.y - c[1]).powi(2);
            Complex64::new((-r2 / (2.0 * w * w)).exp(), 0.0)
        })
        .collect();
    FourierField::from_physical(n, l, samples).unwrap()
}

/// Separable DFT by direct summation, `sign = −1` forward.
pub fn naive_dft(data: &[Complex64], n: usize, sign: f64) -> Vec<Complex64> {
    let tw: Vec<Complex64> = (0..n).map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64)).collect();
    let mut rows = vec![Complex64::default(); n * n];
    for a in 0..n {
        for j in 0..n {
            let mut acc = Complex64::default();
            for b in 0..n {
                acc += data[a * n + b] * tw[(b * j) % n];
            }
            rows[a * n + j] = acc;
        }
    }
    let mut out = vec![Complex64::default(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::default();
            for a in 0..n {
                acc += rows[a * n + j] * tw[(a * i) % n];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

pub fn naive_to_physical(f: &FourierField) -> Vec<Complex64> {
    let n = f.n();
    let w = 1.0 / (n as f64 * f.dx()).powi(2);
    naive_dft(f.values(), n, 1.0).into_iter().map(|v| v * w).collect()
}

pub fn naive_from_physical(like: &FourierField, phys: &[Complex64]) -> Vec<Complex64> {
    let w = like.dx() * like.dx();
    naive_dft(phys, like.n(), -1.0).into_iter().map(|v| v * w).collect()
}

pub fn naive_rotation(f: &FourierField) -> Vec<Complex64> {
    let n = f.n();
    let phys = naive_to_physical(f);
    let mut m1 = phys.clone();
    let mut m2 = phys;
    for k in 0..n * n {
        let x = f.x(k / n, k % n);
        m1[k] *= Complex64::new(0.0, -x.x);
        m2[k] *= Complex64::new(0.0, -x.y);
    }
    let f1 = naive_from_physical(f, &m1);
    let f2 = naive_from_physical(f, &m2);
    (0..n * n)
        .map(|k| {
            let xi = f.xi(k / n, k % n);
            f2[k] * xi.x - f1[k] * xi.y
        })
        .collect()
}

pub fn signed_pair(config: &SystemConfig, i: i32) -> (f64, f64, f64) {
    let sp = &config.species()[i.unsigned_abs() as usize - 1];
    (sp.speed, sp.mass, i.signum() as f64)
}

pub fn naive_grad_1d(c: f64, b: f64, sign: f64, x: f64) -> f64 {
    sign * c * c * x / (c * c * x * x + b * b).sqrt()
}

/// Smallest-|r| zero of the collinear gradient from two dense scans.
pub fn dense_scan_p_plus(config: &SystemConfig, mu: i32, nu: i32, s: f64) -> Option<f64> {
    let (cm, bm, sm) = signed_pair(config, mu);
    let (cn, bn, sn) = signed_pair(config, nu);
    let g = |r: f64| naive_grad_1d(cm, bm, sm, s - r) - naive_grad_1d(cn, bn, sn, r);
    let big = 8.0 * s.max(1.0);
    let n = 1_000_000;
    let h = 2.0 * big / n as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut prev = g(-big);
    for i in 1..=n {
        let r = -big + i as f64 * h;
        let cur = g(r);
        if (prev < 0.0) != (cur < 0.0) || cur == 0.0 {
            let lo = r - h;
            if best.is_none_or(|(a, _)| lo.abs() < a.abs()) {
                best = Some((lo, r));
            }
        }
        prev = cur;
    }
    let (lo, hi) = best?;
    let (a, b) = (lo - h, hi + h);
    let h2 = (b - a) / n as f64;
    let mut arg = a;
    let mut min = f64::INFINITY;
    for i in 0..=n {
        let r = a + i as f64 * h2;
        let v = g(r).abs();
        if v < min {
            min = v;
            arg = r;
        }
    }
    Some(arg)
}

/// Random passing two-species configurations.
pub fn passing_configs(n: usize, seed: u64) -> Vec<SystemConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let c: Vec<f64> = (0..2).map(|_| rng.random_range(0.3..3.0)).collect();
        let b: Vec<f64> = (0..2).map(|_| rng.random_range(0.3..3.0)).collect();
        let config = SystemConfig::from_speeds_masses(&c, &b).unwrap();
        if check_nondegeneracy(&config).pass {
            out.push(config);
        }
    }
    out
}

/// `Z` norm by explicit loops: naive rotations and transforms, bucket sums.
pub fn naive_z_norm(fields: &[FourierField], table: &PsiStarTable, p: &DyadicParams) -> f64 {
    let c = make_cutoff();
    let f0 = &fields[0];
    let k_lo = (f0.dxi() / 1.2).log2().ceil() as i32;
    let k_hi = (f0.nyquist() * 2f64.sqrt() / 0.55).log2().floor() as i32;
    let j_hi = (f0.half_length() * 2f64.sqrt() / 0.55).log2().floor() as i32;
    let m_max = (p.n1 as usize / 2).min(p.a_max);
    let mut powers: Vec<Vec<FourierField>> = fields.iter().map(|f| vec![f.clone()]).collect();
    for pw in powers.iter_mut() {
        for _ in 0..m_max {
            let next = pw.last().unwrap().like(naive_rotation(pw.last().unwrap()));
            pw.push(next);
        }
    }
    let mut want: f64 = 0.0;
    for m in 0..=m_max {
        let mut total = 0.0;
        for (i, pw) in powers.iter().enumerate() {
            let f = &pw[m];
            let sigma = SignedSpecies::raw(i as i32 + 1);
            let mut z1: f64 = 0.0;
            for k in k_lo..=k_hi {
                let pk = f.multiply_by(|xi| c.phi_k(k, xi.norm()));
                for j in (-k).max(0)..=j_hi.max((-k).max(0)) {
                    let mut phys = naive_to_physical(&pk);
                    for (idx, v) in phys.iter_mut().enumerate() {
                        *v *= c.phi_tilde(j, k, f.x(idx / f.n(), idx % f.n()).norm());
                    }
                    let q = naive_from_physical(f, &phys);
                    let mut best: f64 = 0.0;
                    for n in 0..=j + 1 {
                        let mut acc = 0.0;
                        for (idx, v) in q.iter().enumerate() {
                            let ps = table.value(sigma, f.xi(idx / f.n(), idx % f.n()).norm());
                            acc += c.phi_interval(-j - 1, 0, -n, ps).powi(2) * v.norm_sqr();
                        }
                        let bucket = f.dxi() / (2.0 * PI) * acc.sqrt();
                        best = best.max(2f64.powf(-(0.5 - 19.0 * p.delta) * n as f64) * bucket);
                    }
                    let b = 2f64.powf((1.0 - 20.0 * p.delta) * j as f64) * best;
                    z1 = z1.max(2f64.powi(6 * k.max(0)) * b);
                }
            }
            total += z1;
        }
        want = want.max(total);
    }
    want
}
