use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

use super::norm::{lp_norm, side_len, NormKind};
use super::set::SetKind;

/// Distance generating function `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DgfKind<T> {
    /// `½‖u‖₂²`
    SquaredEuclidean,
    /// `Σ uᵢ ln uᵢ`
    SimplexEntropy,
    /// `Σ σᵢ(U) ln σᵢ(U)` on symmetric matrices
    MatrixEntropy,
    /// `½‖u‖_p²`, `p ∈ (1, 2]`
    HalfPNormSquared(T),
}

/// Norm, DGF, feasible set and diameters for one variable block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec<T> {
    pub norm: NormKind<T>,
    pub dgf: DgfKind<T>,
    pub feasible_set: SetKind<T>,
    pub strong_convexity_modulus: T,
    /// `Ω = sup D(u, u′)` over the set (`u′` interior); `+∞` when unbounded.
    pub bregman_diameter: T,
    /// Caller-supplied `Ω′` for DGFs where it is not computed.
    pub normalized_diameter_surrogate: Option<T>,
}

impl<T: Scalar> GeometrySpec<T> {
    /// `½‖·‖²` with the L2 norm on `set`.
    pub fn euclidean(set: SetKind<T>) -> Self {
        let omega = euclidean_diameter(&set);
        Self {
            norm: NormKind::L2,
            dgf: DgfKind::SquaredEuclidean,
            feasible_set: set,
            strong_convexity_modulus: T::one(),
            bregman_diameter: omega,
            normalized_diameter_surrogate: None,
        }
    }

    /// Entropy on the simplex with the L1 norm.
    pub fn simplex_entropy(n: usize) -> Self {
        Self {
            norm: NormKind::L1,
            dgf: DgfKind::SimplexEntropy,
            feasible_set: SetKind::Simplex(n),
            strong_convexity_modulus: T::one(),
            bregman_diameter: T::infinity(),
            normalized_diameter_surrogate: None,
        }
    }

    /// Matrix entropy on the spectrahedron with the nuclear norm.
    pub fn matrix_entropy(n: usize) -> Self {
        Self {
            norm: NormKind::SymmetricNuclear,
            dgf: DgfKind::MatrixEntropy,
            feasible_set: SetKind::Spectrahedron(n),
            strong_convexity_modulus: T::one(),
            bregman_diameter: T::infinity(),
            normalized_diameter_surrogate: None,
        }
    }

    /// `½‖·‖_p²` on the nonnegative orthant.
    pub fn pnorm_orthant(n: usize, p: T) -> Self {
        Self {
            norm: NormKind::Lp(p),
            dgf: DgfKind::HalfPNormSquared(p),
            feasible_set: SetKind::NonnegativeOrthant(n),
            strong_convexity_modulus: p - T::one(),
            bregman_diameter: T::infinity(),
            normalized_diameter_surrogate: None,
        }
    }

    pub fn with_normalized_diameter(mut self, omega_prime: T) -> Self {
        self.normalized_diameter_surrogate = Some(omega_prime);
        self
    }

    pub fn with_bregman_diameter(mut self, omega: T) -> Self {
        self.bregman_diameter = omega;
        self
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.dgf, DgfKind::SquaredEuclidean)
    }

    /// `h(u)`
    pub fn h(&self, u: &[T]) -> Result<T> {
        match self.dgf {
            DgfKind::SquaredEuclidean => Ok(T::of(0.5) * linalg::dot(u, u)),
            DgfKind::SimplexEntropy => {
                let mut s = T::zero();
                for &v in u {
                    s += xlogx(v)?;
                }
                Ok(s)
            }
            DgfKind::MatrixEntropy => {
                let (vals, _) = eig_of(u);
                let mut s = T::zero();
                for v in vals {
                    s += xlogx(v)?;
                }
                Ok(s)
            }
            DgfKind::HalfPNormSquared(p) => {
                let n = lp_norm(u, p);
                Ok(T::of(0.5) * n * n)
            }
        }
    }

    /// `∇h(u)`; `u` must lie in the interior of `dom h`.
    pub fn grad_h(&self, u: &[T]) -> Result<Vec<T>> {
        match self.dgf {
            DgfKind::SquaredEuclidean => Ok(u.to_vec()),
            DgfKind::SimplexEntropy => {
                check_positive(u)?;
                Ok(u.iter().map(|&v| T::one() + safe_ln(v)).collect())
            }
            DgfKind::MatrixEntropy => {
                let (vals, vecs) = eig_of(u);
                check_positive(&vals)?;
                let logs: Vec<T> = vals.iter().map(|&v| T::one() + safe_ln(v)).collect();
                Ok(linalg::eig_compose(&logs, &vecs).data)
            }
            DgfKind::HalfPNormSquared(p) => Ok(grad_half_pnorm(u, p)),
        }
    }

    /// Bregman distance `D(u, u_ref) = h(u) − h(u_ref) − ⟨∇h(u_ref), u − u_ref⟩`.
    pub fn bregman_distance(&self, u: &[T], u_ref: &[T]) -> Result<T> {
        if u.len() != u_ref.len() {
            return Err(domain("dimension mismatch"));
        }
        match self.dgf {
            DgfKind::SquaredEuclidean => {
                let d = linalg::dist2(u, u_ref);
                Ok(T::of(0.5) * d * d)
            }
            DgfKind::SimplexEntropy => {
                check_positive(u_ref)?;
                let mut s = T::zero();
                for (&a, &b) in u.iter().zip(u_ref) {
                    let a = clamp_feasible(a)?;
                    let t = if a == T::zero() { T::zero() } else { a * (safe_ln(a) - safe_ln(b)) };
                    s += t - a + b;
                }
                Ok(s.max(T::zero()))
            }
            DgfKind::MatrixEntropy => {
                let (vr, er) = eig_of(u_ref);
                check_positive(&vr)?;
                let (vu, _) = eig_of(u);
                let mut tr_ulogu = T::zero();
                for v in &vu {
                    tr_ulogu += xlogx(*v)?;
                }
                let log_ref = linalg::eig_compose(&vr.iter().map(|&v| safe_ln(v)).collect::<Vec<_>>(), &er);
                let cross = linalg::dot(u, &log_ref.data);
                let tr_u: T = vu.iter().copied().sum();
                let tr_r: T = vr.iter().copied().sum();
                Ok((tr_ulogu - cross - tr_u + tr_r).max(T::zero()))
            }
            DgfKind::HalfPNormSquared(_) => {
                let g = self.grad_h(u_ref)?;
                let d = self.h(u)? - self.h(u_ref)? - linalg::dot(&g, &linalg::sub(u, u_ref));
                Ok(d.max(T::zero()))
            }
        }
    }

    /// `Ω′ = sup_{‖z‖ ≤ 1} D(z, 0)`.
    pub fn normalized_diameter(&self) -> Result<T> {
        match self.dgf {
            DgfKind::SquaredEuclidean => Ok(T::of(0.5)),
            _ => self
                .normalized_diameter_surrogate
                .ok_or_else(|| unsupported("normalized diameter needs a surrogate for non-Euclidean DGFs")),
        }
    }

    /// Whether `u` lies in the interior of `dom h` (needed for reference points).
    pub fn in_dgf_interior(&self, u: &[T]) -> bool {
        match self.dgf {
            DgfKind::SquaredEuclidean | DgfKind::HalfPNormSquared(_) => u.iter().all(|v| v.is_finite()),
            DgfKind::SimplexEntropy => u.iter().all(|&v| v > T::zero()),
            DgfKind::MatrixEntropy => eig_of(u).0.iter().all(|&v| v > T::zero()),
        }
    }
}

fn euclidean_diameter<T: Scalar>(set: &SetKind<T>) -> T {
    match set {
        SetKind::EuclideanBall { radius, .. } => T::of(2.0) * *radius * *radius,
        SetKind::Simplex(_) | SetKind::Spectrahedron(_) => T::one(),
        SetKind::Intersection { base, radius, .. } => (T::of(2.0) * *radius * *radius).min(euclidean_diameter(base)),
        SetKind::FullSpace | SetKind::NonnegativeOrthant(_) => T::infinity(),
    }
}

pub(crate) fn eig_of<T: Scalar>(u: &[T]) -> (Vec<T>, DenseMatrix<T>) {
    let n = side_len(u.len());
    linalg::sym_eig(&DenseMatrix::from_vec(n, n, u.to_vec()))
}

pub(crate) fn safe_ln<T: Scalar>(v: T) -> T {
    v.max(T::log_floor()).ln()
}

fn check_positive<T: Scalar>(u: &[T]) -> Result<()> {
    if u.iter().all(|&v| v > T::zero()) {
        Ok(())
    } else {
        Err(domain("reference point lies on the boundary of the entropy domain"))
    }
}

/// Feasible entropy arguments may carry round-off below zero.
fn clamp_feasible<T: Scalar>(v: T) -> Result<T> {
    if v >= T::zero() {
        Ok(v)
    } else if v >= -T::of(1e-12).max(T::epsilon() * T::of(16.0)) {
        Ok(T::zero())
    } else {
        Err(domain(format!("negative coordinate {v} under the entropy DGF")))
    }
}

fn xlogx<T: Scalar>(v: T) -> Result<T> {
    let v = clamp_feasible(v)?;
    Ok(if v == T::zero() { T::zero() } else { v * safe_ln(v) })
}

pub(crate) fn grad_half_pnorm<T: Scalar>(u: &[T], p: T) -> Vec<T> {
    let n = lp_norm(u, p);
    if n == T::zero() {
        return vec![T::zero(); u.len()];
    }
    // ‖u‖_p^{2−p} sign(uᵢ)|uᵢ|^{p−1} = ‖u‖_p · sign(uᵢ)(|uᵢ|/‖u‖_p)^{p−1}
    u.iter().map(|&v| n * v.signum() * (v.abs() / n).powf(p - T::one())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pnorm_grad_matches_finite_differences() {
        let g = GeometrySpec::pnorm_orthant(3, 1.4);
        let u = [0.3, 1.2, 0.7];
        let gr = g.grad_h(&u).unwrap();
        for i in 0..3 {
            let mut a = u;
            let mut b = u;
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (g.h(&a).unwrap() - g.h(&b).unwrap()) / 2e-6;
            assert_relative_eq!(gr[i], fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn matrix_entropy_diagonal_reduces_to_kl() {
        let g = GeometrySpec::<f64>::matrix_entropy(2);
        let v = GeometrySpec::<f64>::simplex_entropy(2);
        let d = g.bregman_distance(&[0.5, 0.0, 0.0, 0.5], &[0.25, 0.0, 0.0, 0.75]).unwrap();
        let e = v.bregman_distance(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert_relative_eq!(d, e, epsilon = 1e-12);
    }

    #[test]
    fn boundary_reference_rejected() {
        let g = GeometrySpec::<f64>::simplex_entropy(2);
        assert!(g.bregman_distance(&[0.5, 0.5], &[1.0, 0.0]).is_err());
        assert!(g.bregman_distance(&[1.0, 0.0], &[0.5, 0.5]).is_ok());
    }

    #[test]
    fn diameters() {
        assert_eq!(GeometrySpec::euclidean(SetKind::ball(vec![0.0; 2], 3.0)).bregman_diameter, 18.0);
        assert_eq!(GeometrySpec::<f64>::euclidean(SetKind::Simplex(4)).bregman_diameter, 1.0);
        assert!(GeometrySpec::<f64>::simplex_entropy(3).bregman_diameter.is_infinite());
    }
}
