//! Norms, distance generating functions, Bregman distances and proximal projections.

mod dgf;
mod norm;
mod prox;
mod rescaled;
mod set;

pub use dgf::{DgfKind, GeometrySpec};
pub use norm::{conjugate_exponent, lp_norm, NormKind};
pub use prox::{bregman_prox, softmax, SimpleFunction};
pub use rescaled::RescaledDgf;
pub use set::{sample_point, SetKind};

use crate::error::Result;
use crate::scalar::Scalar;

/// `D(u, u_ref)` under the geometry's DGF.
pub fn bregman_distance<T: Scalar>(g: &GeometrySpec<T>, u: &[T], u_ref: &[T]) -> Result<T> {
    g.bregman_distance(u, u_ref)
}

/// `R² D_base((x − c)/R, (x_ref − c)/R)`.
pub fn rescaled_distance<T: Scalar>(r: &RescaledDgf<T>, x: &[T], x_ref: &[T]) -> Result<T> {
    r.distance(x, x_ref)
}

/// `Ω′`; see [`GeometrySpec::normalized_diameter`].
pub fn normalized_diameter<T: Scalar>(g: &GeometrySpec<T>) -> Result<T> {
    g.normalized_diameter()
}
