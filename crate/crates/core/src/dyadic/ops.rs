//! Frequency, space and resonance-distance localizations.

use num_complex::Complex64;

use super::cutoff::CutoffFamily;
use super::field::FourierField;
use crate::dispersion::SignedSpecies;
use crate::resonance::PsiStarTable;

/// A localized field and whether the lattice could not represent the
/// localization faithfully.
#[derive(Debug, Clone, PartialEq)]
pub struct Projected {
    pub field: FourierField,
    pub truncated: bool,
}

/// `P_k`: multiply by `φ_k(|ξ|)`. Flagged when the annulus does not fit
/// between the lattice spacing and the Nyquist frequency.
pub fn project_pk(f: &FourierField, k: i32) -> Projected {
    let c = CutoffFamily;
    let p = 2f64.powi(k);
    let truncated = p / 2.0 < f.dxi() || 2.0 * p > f.nyquist();
    Projected {
        field: f.multiply_by(|xi| c.phi_k(k, xi.norm())),
        truncated,
    }
}

/// Physical-space multiplication by a radial weight.
pub fn multiply_physical(f: &FourierField, w: impl Fn(f64) -> f64) -> FourierField {
    let n = f.n();
    let mut phys = f.to_physical();
    for i in 0..n {
        for j in 0..n {
            phys[i * n + j] *= w(f.x(i, j).norm());
        }
    }
    FourierField::from_physical(n, f.half_length(), phys)
        .expect("lattice already validated")
        .with_species(f.species)
        .with_real(f.real_valued)
}

/// `Q_{jk} f = φ̃_j^{(k)}(x)·P_k f`. Flagged when `2^j` exceeds the box or
/// `P_k` is truncated.
pub fn project_qjk(f: &FourierField, j: i32, k: i32) -> Projected {
    assert!(j >= 0 && k + j >= 0, "(k, j) = ({k}, {j}) outside the index set");
    let pk = project_pk(f, k);
    let field = apply_spatial(&pk.field, j, k);
    Projected {
        field,
        truncated: pk.truncated || 2f64.powi(j) > f.half_length(),
    }
}

/// `φ̃_j^{(k)}(x)·g` for an already frequency-localized `g`.
pub fn apply_spatial(g: &FourierField, j: i32, k: i32) -> FourierField {
    let c = CutoffFamily;
    multiply_physical(g, |r| c.phi_tilde(j, k, r))
}

/// Weight of bucket `n` of `A_{n,(j)}` at resonance distance `psi_star`.
#[inline]
pub fn an_weight(n: i32, j: i32, psi_star: f64) -> f64 {
    CutoffFamily.phi_interval(-j - 1, 0, -n, psi_star)
}

/// `A^σ_{n,(j)}`: multiply by `φ^{[−j−1,0]}_{−n}(Ψ*_σ(ξ))`, `n ∈ 0..=j+1`.
/// Bucket `0` collects `Ψ* ≳ 1` and bucket `j+1` everything within
/// `2^{−j−1}` of a resonance.
pub fn project_an(f: &FourierField, table: &PsiStarTable, sigma: SignedSpecies, n: i32, j: i32) -> FourierField {
    assert!(j >= 0 && (0..=j + 1).contains(&n), "bucket {n} outside 0..={}", j + 1);
    f.multiply_by(|xi| an_weight(n, j, table.value(sigma, xi.norm())))
}

/// `Ψ*_σ` on every lattice point, in field storage order.
pub fn psi_star_lattice(f: &FourierField, table: &PsiStarTable, sigma: SignedSpecies) -> Vec<f64> {
    let n = f.n();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(table.value(sigma, f.xi(i, j).norm()));
        }
    }
    out
}

/// `‖A_{n,(j)} g‖_{L²}` for every bucket, given precomputed `Ψ*` values.
pub fn bucket_norms(g: &FourierField, psi_star: &[f64], j: i32) -> Vec<f64> {
    let mut acc = vec![0.0; (j + 2) as usize];
    for (v, &ps) in g.values().iter().zip(psi_star) {
        let m = v.norm_sqr();
        if m == 0.0 {
            continue;
        }
        for (n, a) in acc.iter_mut().enumerate() {
            let w = an_weight(n as i32, j, ps);
            if w != 0.0 {
                *a += w * w * m;
            }
        }
    }
    let scale = g.dxi() / (2.0 * std::f64::consts::PI);
    acc.into_iter().map(|a| scale * a.sqrt()).collect()
}

/// Sum of fields on one lattice.
pub fn sum_fields<'a>(fields: impl IntoIterator<Item = &'a FourierField>) -> Option<FourierField> {
    let mut it = fields.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, f| acc.add(f)))
}

/// Largest pointwise difference.
pub fn max_diff(a: &FourierField, b: &FourierField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y): (&Complex64, &Complex64)| (x - y).norm())
        .fold(0.0, f64::max)
}
