//! Fourier-side samples on a uniform square lattice.
//!
//! A field on the physical box `[−L, L)²` with `n` points per axis has
//! physical nodes `x_m = (2L/n)·m` and frequency nodes `ξ_k = (π/L)·k`,
//! `m, k ∈ {−n/2, …, n/2−1}²`. Values are stored in FFT (wrap-around) order,
//! row-major with the first frequency component as the slow index.
//!
//! The transform convention is `f̂(ξ) = ∫ f(x) e^{−ix·ξ} dx`, discretized as
//! `f̂ = Δx²·DFT[f]`, so `‖f‖_{L²} = (2π)^{−1}(Δξ² Σ|f̂|²)^{1/2}`.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::{Complex32, Complex64};
use serde::{Deserialize, Serialize};

use super::fft;
use crate::dispersion::{SignedSpecies, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    n: usize,
    half_length: f64,
    values: Vec<Complex64>,
    pub species: Option<SignedSpecies>,
    pub real_valued: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub n: usize,
    pub box_half_length: f64,
    pub species: Option<i32>,
    pub real_valued: bool,
    pub layout: String,
}

const LAYOUT: &str = "u32le n, f64le L, n*n x (f32le re, f32le im); rows = first frequency index from -n/2, centered";

impl FourierField {
    pub fn zeros(n: usize, half_length: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Config(format!("grid size {n} must be a power of two ≥ 2")));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::Config(format!("box half-length {half_length} must be positive")));
        }
        Ok(Self {
            n,
            half_length,
            values: vec![Complex64::default(); n * n],
            species: None,
            real_valued: false,
        })
    }

    /// Samples `f̂(ξ)` at every lattice frequency.
    pub fn from_fn(n: usize, half_length: f64, f: impl Fn(Vec2) -> Complex64) -> Result<Self> {
        let mut out = Self::zeros(n, half_length)?;
        for i in 0..n {
            for j in 0..n {
                out.values[i * n + j] = f(out.xi(i, j));
            }
        }
        Ok(out)
    }

    pub fn from_values(n: usize, half_length: f64, values: Vec<Complex64>) -> Result<Self> {
        let mut out = Self::zeros(n, half_length)?;
        if values.len() != n * n {
            return Err(Error::Config(format!("expected {} values, got {}", n * n, values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numeric("field contains non-finite values".into()));
        }
        out.values = values;
        Ok(out)
    }

    /// Transform of physical samples `f(x_m)` given in FFT order.
    pub fn from_physical(n: usize, half_length: f64, mut samples: Vec<Complex64>) -> Result<Self> {
        let mut out = Self::zeros(n, half_length)?;
        if samples.len() != n * n {
            return Err(Error::Config(format!("expected {} samples, got {}", n * n, samples.len())));
        }
        fft::plan(n).forward(&mut samples);
        let w = out.dx() * out.dx();
        for v in samples.iter_mut() {
            *v *= w;
        }
        out.values = samples;
        Ok(out)
    }

    pub fn with_species(mut self, s: Option<SignedSpecies>) -> Self {
        self.species = s;
        self
    }

    pub fn with_real(mut self, real: bool) -> Self {
        self.real_valued = real;
        self
    }

    /// Same lattice and tags, new values.
    pub fn like(&self, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self {
            values,
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> Self {
        Self {
            n: self.n,
            half_length: self.half_length,
            values: Vec::new(),
            species: self.species,
            real_valued: self.real_valued,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Largest lattice frequency along an axis.
    pub fn nyquist(&self) -> f64 {
        self.dxi() * (self.n / 2) as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }

    /// Signed integer wavenumber of an FFT-order index.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    #[inline]
    pub fn xi(&self, i: usize, j: usize) -> Vec2 {
        let d = self.dxi();
        Vec2::new(d * self.wavenumber(i) as f64, d * self.wavenumber(j) as f64)
    }

    #[inline]
    pub fn x(&self, i: usize, j: usize) -> Vec2 {
        let d = self.dx();
        Vec2::new(d * self.wavenumber(i) as f64, d * self.wavenumber(j) as f64)
    }

    /// Flat index of the lattice point `−ξ`.
    #[inline]
    pub fn mirror_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j) = (idx / n, idx % n);
        ((n - i) % n) * n + (n - j) % n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let n = self.n;
        self.values[i * n + j] = v;
    }

    /// Pointwise multiplier `f̂(ξ) ↦ m(ξ)·f̂(ξ)`.
    pub fn multiply_by(&self, m: impl Fn(Vec2) -> f64) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.values[i * n + j] *= m(self.xi(i, j));
            }
        }
        out
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.like(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_values(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.same_lattice(other));
        self.like(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.same_lattice(other));
        self.like(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        assert!(self.same_lattice(other));
        self.like(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    /// Physical samples `f(x_m)` in FFT order.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        fft::plan(self.n).inverse(&mut buf);
        let w = 1.0 / (self.n as f64 * self.dx()).powi(2);
        for v in buf.iter_mut() {
            *v *= w;
        }
        buf
    }

    /// `‖f‖_{L²}` computed on the Fourier side.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_l2(|_| 1.0)
    }

    /// `(2π)^{−1}(Δξ² Σ w(ξ)²|f̂(ξ)|²)^{1/2}`.
    pub fn weighted_l2(&self, w: impl Fn(Vec2) -> f64) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = self.values[i * n + j];
                if v != Complex64::default() {
                    acc += w(self.xi(i, j)).powi(2) * v.norm_sqr();
                }
            }
        }
        self.dxi() * acc.sqrt() / (2.0 * std::f64::consts::PI)
    }

    /// `max |f̂(ξ) − conj f̂(−ξ)|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|k| (self.values[k] - self.values[self.mirror_index(k)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Writes the binary layout plus a `<path>.json` sidecar.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let n = self.n;
        let mut bytes = Vec::with_capacity(12 + 8 * n * n);
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        bytes.extend_from_slice(&self.half_length.to_le_bytes());
        for ci in 0..n {
            for cj in 0..n {
                let v = self.values[((ci + n / 2) % n) * n + (cj + n / 2) % n];
                let c = Complex32::new(v.re as f32, v.im as f32);
                bytes.extend_from_slice(&c.re.to_le_bytes());
                bytes.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path, e))?;
        let side = FieldSidecar {
            n,
            box_half_length: self.half_length,
            species: self.species.map(|s| s.index()),
            real_valued: self.real_valued,
            layout: LAYOUT.into(),
        };
        let sp = sidecar_path(path);
        let text = serde_json::to_string_pretty(&side)?;
        std::fs::write(&sp, text).map_err(|e| Error::io(&sp, e))?;
        Ok(())
    }

    /// Reads the binary layout; the sidecar is used when present.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        if bytes.len() < 12 {
            return Err(Error::Config(format!("{}: truncated header", path.display())));
        }
        let n = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let half_length = f64::from_le_bytes(bytes[4..12].try_into().unwrap());
        if bytes.len() != 12 + 8 * n * n {
            return Err(Error::Config(format!(
                "{}: expected {} bytes for n = {n}, found {}",
                path.display(),
                12 + 8 * n * n,
                bytes.len()
            )));
        }
        let mut out = Self::zeros(n, half_length)?;
        let mut off = 12;
        for ci in 0..n {
            for cj in 0..n {
                let re = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
                let im = f32::from_le_bytes(bytes[off + 4..off + 8].try_into().unwrap());
                off += 8;
                out.values[((ci + n / 2) % n) * n + (cj + n / 2) % n] = Complex64::new(re as f64, im as f64);
            }
        }
        if !out.is_finite() {
            return Err(Error::Numeric(format!("{}: non-finite samples", path.display())));
        }
        let sp = sidecar_path(path);
        if sp.exists() {
            let text = std::fs::read_to_string(&sp).map_err(|e| Error::io(&sp, e))?;
            let side: FieldSidecar = serde_json::from_str(&text)?;
            if side.n != n || side.box_half_length != half_length {
                return Err(Error::Config(format!("{}: sidecar disagrees with header", sp.display())));
            }
            out.species = side.species.map(SignedSpecies::raw);
            out.real_valued = side.real_valued;
        }
        Ok(out)
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}
