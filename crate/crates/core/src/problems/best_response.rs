use crate::error::{config, Error, Result};
use crate::scalar::Scalar;
use crate::solvers::gradient_mapping_stop;

use super::SaddleProblem;

const MAX_ITERS: usize = 200_000;

/// `x*(y) = argmin_x f(x) + g(x) + Φ(x, y)` up to suboptimality `tol`, by
/// prox-gradient steps with `λ = 1/(L + L_xx)` and the gradient-mapping certificate.
pub fn best_response_x<T: Scalar>(p: &SaddleProblem<T>, y: &[T], tol: T) -> Result<Vec<T>> {
    best_response_from(p, y, tol, None)
}

pub(crate) fn best_response_from<T: Scalar>(p: &SaddleProblem<T>, y: &[T], tol: T, start: Option<&[T]>) -> Result<Vec<T>> {
    let c = p.constants;
    if !(c.mu > T::zero()) {
        return Err(config("best response needs μ > 0"));
    }
    if !(tol > T::zero()) {
        return Err(config("best response tolerance must be positive"));
    }
    let lsum = c.l + c.l_xx;
    let lambda = if lsum > T::zero() { T::one() / lsum } else { T::one() / c.mu };
    let mut u = match start {
        Some(s) => s.to_vec(),
        None => p.start_point().0,
    };
    for _ in 0..MAX_ITERS {
        let mut grad = p.terms.grad_f(&u);
        for (gi, vi) in grad.iter_mut().zip(p.terms.grad_x_phi(&u, y)) {
            *gi += vi;
        }
        let chk = gradient_mapping_stop(&p.geom_x, &grad, &u, &p.g, lambda, c.mu, tol)?;
        if chk.satisfied {
            return Ok(chk.u_plus);
        }
        u = chk.u_plus;
    }
    Err(Error::Convergence(format!("best response not certified after {MAX_ITERS} prox-gradient steps")))
}
