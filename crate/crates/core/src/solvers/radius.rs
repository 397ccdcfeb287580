use serde::{Deserialize, Serialize};

use crate::error::{config, unsupported, Error, Result};
use crate::geometry::{DgfKind, GeometrySpec, SetKind, SimpleFunction};
use crate::linalg;
use crate::problems::{best_response_x, SaddleProblem};
use crate::scalar::Scalar;

use super::stopping::gradient_mapping_stop;

const MAX_ITERS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate<T> {
    /// `√(2(υ − ℓ)/μ) ≥ ‖x¹ − x*‖`
    pub radius: T,
    /// `ℓ ≤ S*`
    pub lower: T,
    /// `υ ≥ S̄(x¹)`
    pub upper: T,
}

/// `Υ ≥ sup_Y |h|`, scaling the dual regularizer.
fn dgf_range<T: Scalar>(g: &GeometrySpec<T>) -> Result<T> {
    let half = T::of(0.5);
    match (&g.dgf, &g.feasible_set) {
        (DgfKind::SquaredEuclidean, SetKind::EuclideanBall { center, radius })
        | (DgfKind::SquaredEuclidean, SetKind::Intersection { center, radius, .. }) => {
            let s = linalg::norm2(center) + *radius;
            Ok((half * s * s).max(T::epsilon()))
        }
        (DgfKind::SquaredEuclidean, SetKind::Simplex(_)) => Ok(half),
        (DgfKind::SimplexEntropy, SetKind::Simplex(n)) => Ok(T::of_usize(*n).ln().max(T::epsilon())),
        (d, s) => Err(unsupported(format!("no DGF range bound for {d:?} on {s:?}"))),
    }
}

/// Deterministic bound on `‖x¹ − x*‖` from a certified best response at
/// `y_probe` (lower bound on `S*`) and a DGF-regularized dual solve at `x¹`
/// (upper bound on `S̄(x¹)`).
pub fn estimate_initial_radius<T: Scalar>(p: &SaddleProblem<T>, x1: &[T], y_probe: &[T], eta: T) -> Result<RadiusEstimate<T>> {
    let c = p.constants;
    if !(c.mu > T::zero()) {
        return Err(config("radius estimation needs μ > 0"));
    }
    if !(eta > T::zero()) {
        return Err(config("radius tolerance η must be positive"));
    }
    if !matches!(p.j, SimpleFunction::Zero) {
        return Err(unsupported("radius estimation supports J = 0 only"));
    }
    let xb = best_response_x(p, y_probe, eta)?;
    let lower = p.evaluate(&xb, y_probe)? - eta;

    let ups = dgf_range(&p.geom_y)?;
    let coef = eta / ups;
    let reg = SimpleFunction::ScaledDgf(coef);
    let lambda = if c.l_yy > T::zero() { T::one() / c.l_yy } else { ups / eta };
    let mu_y = coef * p.geom_y.strong_convexity_modulus;
    let mut y = p.start_point().1;
    let mut found = None;
    for _ in 0..MAX_ITERS {
        let grad: Vec<T> = p.terms.grad_y_phi(x1, &y).into_iter().map(|v| -v).collect();
        let chk = gradient_mapping_stop(&p.geom_y, &grad, &y, &reg, lambda, mu_y, eta)?;
        if chk.satisfied {
            found = Some(chk.u_plus);
            break;
        }
        y = chk.u_plus;
    }
    let y_eta = found.ok_or_else(|| Error::Convergence("regularized dual solve not certified".into()))?;
    let upper = p.evaluate(x1, &y_eta)? - coef * p.geom_y.h(&y_eta)? + T::of(2.0) * eta;
    let radius = (T::of(2.0) * (upper - lower).max(T::zero()) / c.mu).sqrt();
    Ok(RadiusEstimate { radius, lower, upper })
}
