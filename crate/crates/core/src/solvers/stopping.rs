use crate::error::Result;
use crate::geometry::{bregman_prox, GeometrySpec, SimpleFunction};
use crate::scalar::Scalar;

/// Outcome of one gradient-mapping test.
#[derive(Debug, Clone, PartialEq)]
pub struct StopCheck<T> {
    pub u_plus: Vec<T>,
    pub satisfied: bool,
    /// `‖Ḡ_λ‖_*² + ‖G_λ‖²`
    pub residual: T,
}

/// One prox-gradient step from `u_ref` and the gradient-mapping certificate
/// `‖Ḡ_λ‖_*² + ‖G_λ‖² ≤ με`, which implies `P(u⁺) − P* ≤ ε` when `λ ≤ 1/L`
/// and `P` is `μ`-strongly convex.
pub fn gradient_mapping_stop<T: Scalar>(
    g: &GeometrySpec<T>,
    grad: &[T],
    u_ref: &[T],
    phi: &SimpleFunction<T>,
    lambda: T,
    mu: T,
    epsilon: T,
) -> Result<StopCheck<T>> {
    let u_plus = bregman_prox(g, u_ref, grad, lambda, phi)?;
    let gm: Vec<T> = u_ref.iter().zip(&u_plus).map(|(&a, &b)| (a - b) / lambda).collect();
    let (h_ref, h_plus) = (g.grad_h(u_ref)?, g.grad_h(&u_plus)?);
    let gbar: Vec<T> = h_ref.iter().zip(&h_plus).map(|(&a, &b)| (a - b) / lambda).collect();
    let a = g.norm.dual_norm(&gbar);
    let b = g.norm.norm(&gm);
    let residual = a * a + b * b;
    // a few ulps of slack on the threshold
    let thr = mu * epsilon * (T::one() + T::of(8.0) * T::epsilon());
    Ok(StopCheck { u_plus, satisfied: residual <= thr, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SetKind;

    #[test]
    fn threshold_example() {
        let g = GeometrySpec::<f64>::euclidean(SetKind::FullSpace);
        let u = [0.1, 0.0];
        let r = gradient_mapping_stop(&g, &u, &u, &SimpleFunction::Zero, 1.0, 1.0, 0.02).unwrap();
        assert!(r.satisfied);
        assert!((r.residual - 0.02).abs() < 1e-15);
        assert_eq!(r.u_plus, vec![0.0, 0.0]);
        let r = gradient_mapping_stop(&g, &u, &u, &SimpleFunction::Zero, 1.0, 1.0, 0.01).unwrap();
        assert!(!r.satisfied);
    }
}
