//! Littlewood-Paley machinery on a periodic lattice.

pub mod cutoff;
pub mod fft;
pub mod field;
pub mod norms;
pub mod ops;
pub mod rotation;

pub use cutoff::{make_cutoff, CutoffFamily};
pub use field::{sidecar_path, FieldSidecar, FourierField};
pub use norms::{
    b_norm, b_norm_with_exponents, h_omega_norm, lattice_index_range, psi_star_table_for, sobolev_norm, z1_norm,
    z1_norm_detail, z_norm, DyadicParams, Z1Detail,
};
pub use ops::{
    an_weight, apply_spatial, bucket_norms, max_diff, multiply_physical, project_an, project_pk, project_qjk,
    psi_star_lattice, sum_fields, Projected,
};
pub use rotation::{rotation_apply, rotation_once, rotation_powers};
