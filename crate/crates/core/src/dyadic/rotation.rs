//! The rotation field `Ω = x₁∂₂ − x₂∂₁`.
//!
//! `Ω` commutes with the Fourier transform, so on the Fourier side it is
//! `ξ₁∂_{ξ₂} − ξ₂∂_{ξ₁}`. The `ξ`-derivatives are taken spectrally through
//! `∂_{ξ_j} f̂ = F[−i x_j f]`, which costs one inverse and two forward
//! transforms and is exact for band-limited data decaying inside the box.

use num_complex::Complex64;

use super::field::FourierField;
use crate::error::{Error, Result};

/// One application of `Ω` to `f̂`.
pub fn rotation_once(f: &FourierField) -> FourierField {
    let n = f.n();
    let phys = f.to_physical();
    let mut d1 = phys.clone();
    let mut d2 = phys;
    for i in 0..n {
        for j in 0..n {
            let x = f.x(i, j);
            let k = i * n + j;
            d1[k] *= Complex64::new(0.0, -x.x);
            d2[k] *= Complex64::new(0.0, -x.y);
        }
    }
    let d1 = FourierField::from_physical(n, f.half_length(), d1).expect("valid lattice");
    let d2 = FourierField::from_physical(n, f.half_length(), d2).expect("valid lattice");
    let mut out = f.clone();
    for i in 0..n {
        for j in 0..n {
            let xi = f.xi(i, j);
            let k = i * n + j;
            out.values_mut()[k] = d2.values()[k] * xi.x - d1.values()[k] * xi.y;
        }
    }
    out
}

/// `Ω^a f` for `a ≤ a_max`.
pub fn rotation_apply(f: &FourierField, a: usize, a_max: usize) -> Result<FourierField> {
    if a > a_max {
        return Err(Error::Config(format!("rotation power {a} exceeds the cap {a_max}")));
    }
    let mut g = f.clone();
    for _ in 0..a {
        g = rotation_once(&g);
    }
    Ok(g)
}

/// `[f, Ωf, …, Ω^a f]`.
pub fn rotation_powers(f: &FourierField, a: usize) -> Vec<FourierField> {
    let mut out = Vec::with_capacity(a + 1);
    out.push(f.clone());
    for _ in 0..a {
        let next = rotation_once(out.last().unwrap());
        out.push(next);
    }
    out
}
