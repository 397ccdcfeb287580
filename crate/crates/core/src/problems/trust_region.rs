use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

/// `argmin ½ zᵀ H z + bᵀ z` over `‖z − c‖ ≤ r`, for symmetric `H ⪰ 0`.
///
/// Inner solves use conjugate gradients on `H + λI`; the ball multiplier `λ`
/// is found by bisection on `‖z(λ) − c‖ − r`.
pub fn solve_ball_qp<T: Scalar>(h: &DenseMatrix<T>, b: &[T], center: &[T], r: T) -> Result<Vec<T>> {
    let n = b.len();
    // shift to w = z − c
    let hc = h.matvec(center);
    let g: Vec<T> = b.iter().zip(&hc).map(|(&bi, &hi)| bi + hi).collect();
    let gnorm = linalg::norm2(&g);
    if gnorm == T::zero() {
        return Ok(center.to_vec());
    }
    let tol = gnorm * T::of(1e-13).max(T::epsilon() * T::of(8.0));
    let max_iter = 50 * n.max(4);
    let solve = |lam: T| -> Result<Vec<T>> {
        let rhs: Vec<T> = g.iter().map(|&v| -v).collect();
        linalg::cg(|v| linalg::add(&h.matvec(v), &linalg::scale(v, lam)), &rhs, &vec![T::zero(); n], tol, max_iter)
    };
    let back = |w: Vec<T>| -> Vec<T> { w.iter().zip(center).map(|(&wi, &c)| wi + c).collect() };

    if let Ok(w) = solve(T::zero()) {
        if linalg::norm2(&w) <= r {
            return Ok(back(w));
        }
    }
    // ‖w(λ)‖ ≤ ‖g‖/λ, so λ = ‖g‖/r is feasible
    let mut lo = T::zero();
    let mut hi = gnorm / r;
    let mut w_hi = solve(hi)?;
    for _ in 0..300 {
        let mid = T::of(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let w = solve(mid)?;
        let nw = linalg::norm2(&w);
        if nw > r {
            lo = mid;
        } else {
            hi = mid;
            w_hi = w;
            if r - nw <= T::of(1e-13).max(T::epsilon() * T::of(4.0)) * r {
                break;
            }
        }
    }
    if !w_hi.iter().all(|v| v.is_finite()) {
        return Err(Error::Convergence("trust-region solve produced non-finite values".into()));
    }
    Ok(back(w_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interior_and_boundary() {
        let h = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]);
        let z = solve_ball_qp(&h, &[-1.0, -0.5], &[0.0, 0.0], 10.0).unwrap();
        assert_relative_eq!(z[0], 0.5, epsilon = 1e-10);
        assert_relative_eq!(z[1], 0.5, epsilon = 1e-10);
        // linear objective: minimizer is −r b/‖b‖
        let z = solve_ball_qp(&DenseMatrix::zeros(2, 2), &[3.0, 4.0], &[1.0, 1.0], 2.0).unwrap();
        assert_relative_eq!(z[0], 1.0 - 1.2, epsilon = 1e-9);
        assert_relative_eq!(z[1], 1.0 - 1.6, epsilon = 1e-9);
    }
}
