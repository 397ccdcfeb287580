use serde::{Deserialize, Serialize};

use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

/// Primal norm of a geometry. Matrix points are stored row-major, flattened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind<T> {
    L1,
    L2,
    /// `‖·‖_p` with `p ∈ (1, 2]`.
    Lp(T),
    /// Nuclear norm on symmetric matrices (sum of absolute eigenvalues).
    SymmetricNuclear,
}

impl<T: Scalar> NormKind<T> {
    pub fn validate(&self) -> bool {
        match *self {
            NormKind::Lp(p) => p > T::one() && p <= T::of(2.0),
            _ => true,
        }
    }

    pub fn norm(&self, u: &[T]) -> T {
        match *self {
            NormKind::L1 => linalg::norm1(u),
            NormKind::L2 => linalg::norm2(u),
            NormKind::Lp(p) => lp_norm(u, p),
            NormKind::SymmetricNuclear => eigen_abs(u).iter().copied().sum(),
        }
    }

    /// Dual norm: L∞, L2, Lq with `1/p + 1/q = 1`, spectral.
    pub fn dual_norm(&self, v: &[T]) -> T {
        match *self {
            NormKind::L1 => linalg::norm_inf(v),
            NormKind::L2 => linalg::norm2(v),
            NormKind::Lp(p) => lp_norm(v, conjugate_exponent(p)),
            NormKind::SymmetricNuclear => eigen_abs(v).iter().fold(T::zero(), |m, &x| m.max(x)),
        }
    }
}

/// `q = 1/(1 − 1/p)`
pub fn conjugate_exponent<T: Scalar>(p: T) -> T {
    T::one() / (T::one() - T::one() / p)
}

pub fn lp_norm<T: Scalar>(u: &[T], p: T) -> T {
    let m = linalg::norm_inf(u);
    if m == T::zero() {
        return T::zero();
    }
    // scale by the max entry to keep powers finite
    let s: T = u.iter().map(|&x| (x.abs() / m).powf(p)).sum();
    m * s.powf(T::one() / p)
}

pub(crate) fn side_len(len: usize) -> usize {
    let n = (len as f64).sqrt().round() as usize;
    assert_eq!(n * n, len, "matrix point of length {len} is not square");
    n
}

fn eigen_abs<T: Scalar>(u: &[T]) -> Vec<T> {
    let n = side_len(u.len());
    let (vals, _) = linalg::sym_eig(&DenseMatrix::from_vec(n, n, u.to_vec()));
    vals.into_iter().map(|v| v.abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conjugates() {
        assert_relative_eq!(conjugate_exponent(2.0), 2.0);
        assert_relative_eq!(conjugate_exponent(1.5), 3.0, epsilon = 1e-12);
        assert!(NormKind::Lp(1.5).validate());
        assert!(!NormKind::Lp(1.0).validate());
        assert!(!NormKind::Lp(2.5).validate());
    }

    #[test]
    fn matrix_norms() {
        let u = [2.0, 0.0, 0.0, -3.0];
        assert_relative_eq!(NormKind::SymmetricNuclear.norm(&u), 5.0, epsilon = 1e-12);
        assert_relative_eq!(NormKind::SymmetricNuclear.dual_norm(&u), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn holder_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let norms = [NormKind::L1, NormKind::L2, NormKind::Lp(1.3), NormKind::Lp(2.0)];
        for _ in 0..500 {
            let u: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            for nk in &norms {
                assert!(linalg::dot(&u, &v).abs() <= nk.norm(&u) * nk.dual_norm(&v) + 1e-12);
            }
        }
    }
}
