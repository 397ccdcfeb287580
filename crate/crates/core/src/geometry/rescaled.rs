use crate::error::{domain, Result};
use crate::linalg;
use crate::scalar::Scalar;

use super::dgf::GeometrySpec;
use super::prox::prox_on_set;
use super::set::SetKind;

/// `h_R(x) = R² h((x − c)/R)`, the DGF centred at `c` with radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledDgf<T> {
    pub base: GeometrySpec<T>,
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Scalar> RescaledDgf<T> {
    pub fn new(base: GeometrySpec<T>, center: Vec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(domain(format!("rescaling radius {radius} must be positive and finite")));
        }
        Ok(Self { base, center, radius })
    }

    fn to_unit(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.center).map(|(&a, &c)| (a - c) / self.radius).collect()
    }

    /// `R² D((x − c)/R, (x_ref − c)/R)`
    pub fn distance(&self, x: &[T], x_ref: &[T]) -> Result<T> {
        let r2 = self.radius * self.radius;
        Ok(r2 * self.base.bregman_distance(&self.to_unit(x), &self.to_unit(x_ref))?)
    }

    /// `argmin_{x ∈ set} ⟨lin, x⟩ + λ⁻¹ D_R(x, x_ref)`.
    ///
    /// With `x = c + R z` this is the base prox of `lin/R` with step `λ` on `(set − c)/R`.
    pub fn prox(&self, x_ref: &[T], lin: &[T], lambda: T, set: &SetKind<T>) -> Result<Vec<T>> {
        if lambda.is_nan() || lambda <= T::zero() {
            return Err(domain(format!("prox step λ = {lambda} must be positive")));
        }
        if self.base.is_euclidean() {
            // D_R is the plain squared distance
            let xi: Vec<T> = x_ref.iter().zip(lin).map(|(&u, &l)| u - lambda * l).collect();
            return set.project(&xi);
        }
        let unit_set = set.affine_image(&self.center, self.radius)?;
        let z_ref = self.to_unit(x_ref);
        if !self.base.in_dgf_interior(&z_ref) {
            return Err(domain("rescaled reference point outside the DGF domain"));
        }
        let lin_z = linalg::scale(lin, T::one() / self.radius);
        let z = prox_on_set(&self.base, &unit_set, &z_ref, &lin_z, lambda)?;
        Ok(z.iter().zip(&self.center).map(|(&zi, &c)| c + self.radius * zi).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_is_invariant() {
        let r = RescaledDgf::new(GeometrySpec::euclidean(SetKind::FullSpace), vec![3.0, -1.0], 7.0).unwrap();
        assert_relative_eq!(r.distance(&[1.0, 1.0], &[0.0, 1.0]).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn entropy_rescaled_prox_on_scaled_orthant() {
        let base = GeometrySpec::<f64>::simplex_entropy(2);
        let base = GeometrySpec { feasible_set: SetKind::NonnegativeOrthant(2), ..base };
        let r = RescaledDgf::new(base, vec![0.0, 0.0], 2.0).unwrap();
        // D_R(x, x′) = 2 Σ [x ln(x/x′) − x + x′]; minimizer x = x′ exp(−λ l / 2)
        let x = r.prox(&[1.0, 3.0], &[0.4, -0.2], 1.0, &SetKind::NonnegativeOrthant(2)).unwrap();
        assert_relative_eq!(x[0], (-0.2f64).exp(), epsilon = 1e-14);
        assert_relative_eq!(x[1], 3.0 * 0.1f64.exp(), epsilon = 1e-14);
    }
}
