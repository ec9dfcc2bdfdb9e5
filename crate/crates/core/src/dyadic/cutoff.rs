//! The Littlewood-Paley bump and the cutoff families built from it.
//!
//! `φ(r) = 1` for `|r| ≤ 1.1`, `0` for `|r| ≥ 1.2`, and on the gap
//! `φ = ψ(1−t)/(ψ(1−t)+ψ(t))` with `t = (|r|−1.1)/0.1` and `ψ(x) = e^{−1/x}`.

const PLATEAU: f64 = 1.1;
const SUPPORT: f64 = 1.2;

#[inline]
fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

#[inline]
fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// The bump `φ` and its derived families. Stateless; all methods are pure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CutoffFamily;

pub fn make_cutoff() -> CutoffFamily {
    CutoffFamily
}

impl CutoffFamily {
    /// Base bump `φ(r)`.
    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        let a = r.abs();
        if a <= PLATEAU {
            1.0
        } else if a >= SUPPORT {
            0.0
        } else {
            let t = (a - PLATEAU) / (SUPPORT - PLATEAU);
            let p = psi(1.0 - t);
            p / (p + psi(t))
        }
    }

    /// `φ_k(r) = φ(r/2^k) − φ(r/2^{k−1})`.
    #[inline]
    pub fn phi_k(&self, k: i32, r: f64) -> f64 {
        self.phi(r / pow2(k)) - self.phi(r / pow2(k - 1))
    }

    /// `φ_{≤c} = Σ_{m≤c} φ_m = φ(r/2^c)`.
    #[inline]
    pub fn phi_le(&self, c: i32, r: f64) -> f64 {
        self.phi(r / pow2(c))
    }

    /// `φ_{≥c} = 1 − φ_{≤c−1}`.
    #[inline]
    pub fn phi_ge(&self, c: i32, r: f64) -> f64 {
        1.0 - self.phi_le(c - 1, r)
    }

    /// `φ^{[a,b]}_j`: `φ_{≤a}` at `j = a`, `φ_{≥b}` at `j = b`, else `φ_j`.
    #[inline]
    pub fn phi_interval(&self, a: i32, b: i32, j: i32, r: f64) -> f64 {
        debug_assert!(a < b && (a..=b).contains(&j));
        if j == a {
            self.phi_le(a, r)
        } else if j == b {
            self.phi_ge(b, r)
        } else {
            self.phi_k(j, r)
        }
    }

    /// Spatial cutoff `φ̃_j^{(k)}` for `(k, j)` with `k + j ≥ 0`, `j ≥ 0`.
    #[inline]
    pub fn phi_tilde(&self, j: i32, k: i32, r: f64) -> f64 {
        debug_assert!(j >= 0 && k + j >= 0);
        if k + j == 0 && k <= 0 {
            self.phi_le(-k, r)
        } else if j == 0 && k >= 0 {
            self.phi_le(0, r)
        } else {
            self.phi_k(j, r)
        }
    }

    /// Dyadic index of a radius: `r ∈ (0.55·2^k, 1.1·2^k]` ⇔ `k`.
    pub fn dyadic_index(r: f64) -> i32 {
        (r / PLATEAU).log2().ceil() as i32
    }

    /// Radii where `φ_k` can be nonzero.
    pub fn annulus_support(k: i32) -> (f64, f64) {
        (PLATEAU * pow2(k - 1), SUPPORT * pow2(k))
    }
}
