use serde::{Deserialize, Serialize};

use crate::error::{unsupported, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

/// Feasible sets with a known Euclidean projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetKind<T> {
    FullSpace,
    Simplex(usize),
    /// Unit-trace PSD matrices of side `n`, stored flattened.
    Spectrahedron(usize),
    NonnegativeOrthant(usize),
    EuclideanBall { center: Vec<T>, radius: T },
    /// `base ∩ B(center, radius)`
    Intersection { base: Box<SetKind<T>>, center: Vec<T>, radius: T },
}

impl<T: Scalar> SetKind<T> {
    pub fn ball(center: Vec<T>, radius: T) -> Self {
        SetKind::EuclideanBall { center, radius }
    }

    /// Intersects `self` with a Euclidean ball.
    pub fn intersect_ball(self, center: Vec<T>, radius: T) -> Self {
        match self {
            SetKind::FullSpace => SetKind::EuclideanBall { center, radius },
            other => SetKind::Intersection { base: Box::new(other), center, radius },
        }
    }

    /// Dimension when the set fixes it.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SetKind::FullSpace => None,
            SetKind::Simplex(n) | SetKind::NonnegativeOrthant(n) => Some(*n),
            SetKind::Spectrahedron(n) => Some(n * n),
            SetKind::EuclideanBall { center, .. } => Some(center.len()),
            SetKind::Intersection { center, .. } => Some(center.len()),
        }
    }

    pub fn contains(&self, u: &[T], tol: T) -> bool {
        if let Some(d) = self.dim() {
            if d != u.len() {
                return false;
            }
        }
        if u.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            SetKind::FullSpace => true,
            SetKind::Simplex(_) => {
                u.iter().all(|&v| v >= -tol) && (u.iter().copied().sum::<T>() - T::one()).abs() <= tol * T::of_usize(u.len().max(1))
            }
            SetKind::NonnegativeOrthant(_) => u.iter().all(|&v| v >= -tol),
            SetKind::Spectrahedron(n) => {
                let m = DenseMatrix::from_vec(*n, *n, u.to_vec());
                let asym = m.add_scaled(&m.transpose(), -T::one()).max_abs();
                let (vals, _) = linalg::sym_eig(&m);
                asym <= tol && vals.iter().all(|&v| v >= -tol) && (vals.iter().copied().sum::<T>() - T::one()).abs() <= tol * T::of_usize(*n)
            }
            SetKind::EuclideanBall { center, radius } => linalg::dist2(u, center) <= *radius + tol,
            SetKind::Intersection { base, center, radius } => base.contains(u, tol) && linalg::dist2(u, center) <= *radius + tol,
        }
    }

    /// Euclidean projection.
    pub fn project(&self, u: &[T]) -> Result<Vec<T>> {
        Ok(match self {
            SetKind::FullSpace => u.to_vec(),
            SetKind::Simplex(_) => linalg::project_simplex(u),
            SetKind::NonnegativeOrthant(_) => u.iter().map(|&v| v.max(T::zero())).collect(),
            SetKind::Spectrahedron(n) => {
                let m = DenseMatrix::from_vec(*n, *n, u.to_vec());
                let (vals, vecs) = linalg::sym_eig(&m);
                linalg::eig_compose(&linalg::project_simplex(&vals), &vecs).data
            }
            SetKind::EuclideanBall { center, radius } => project_ball(u, center, *radius),
            SetKind::Intersection { .. } => return super::prox::project_intersection(self, u),
        })
    }

    /// Image of the set under `x ↦ (x − c)/r`, when it stays in this family.
    pub fn affine_image(&self, c: &[T], r: T) -> Result<SetKind<T>> {
        let is_zero = c.iter().all(|&v| v == T::zero());
        Ok(match self {
            SetKind::FullSpace => SetKind::FullSpace,
            SetKind::NonnegativeOrthant(n) if is_zero => SetKind::NonnegativeOrthant(*n),
            SetKind::Simplex(n) if is_zero && r == T::one() => SetKind::Simplex(*n),
            SetKind::Spectrahedron(n) if is_zero && r == T::one() => SetKind::Spectrahedron(*n),
            SetKind::EuclideanBall { center, radius } => {
                SetKind::EuclideanBall { center: linalg::scale(&linalg::sub(center, c), T::one() / r), radius: *radius / r }
            }
            SetKind::Intersection { base, center, radius } => SetKind::Intersection {
                base: Box::new(base.affine_image(c, r)?),
                center: linalg::scale(&linalg::sub(center, c), T::one() / r),
                radius: *radius / r,
            },
            other => return Err(unsupported(format!("set {other:?} is not closed under the rescaling map"))),
        })
    }

    /// A point in the relative interior, used as the default start.
    pub fn center_point(&self, dim: usize) -> Vec<T> {
        match self {
            SetKind::FullSpace => vec![T::zero(); dim],
            SetKind::Simplex(n) => vec![T::one() / T::of_usize(*n); *n],
            SetKind::NonnegativeOrthant(n) => vec![T::one(); *n],
            SetKind::Spectrahedron(n) => {
                let mut m = DenseMatrix::<T>::identity(*n);
                for v in &mut m.data {
                    *v /= T::of_usize(*n);
                }
                m.data
            }
            SetKind::EuclideanBall { center, .. } => center.clone(),
            SetKind::Intersection { center, .. } => self.project(center).unwrap_or_else(|_| center.clone()),
        }
    }
}

/// Random point of `set` (dimension `dim` when the set leaves it free).
pub fn sample_point<T: Scalar, R: rand::Rng + ?Sized>(set: &SetKind<T>, dim: usize, rng: &mut R) -> Vec<T> {
    use rand_distr::{Distribution, Exp1, StandardNormal};
    let gauss = |rng: &mut R, k: usize| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(rng)).collect() };
    let simplex = |rng: &mut R, k: usize| -> Vec<f64> {
        let e: Vec<f64> = (0..k).map(|_| <Exp1 as Distribution<f64>>::sample(&Exp1, rng) + 1e-12).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    };
    let cast = |v: Vec<f64>| -> Vec<T> { v.into_iter().map(T::of).collect() };
    match set {
        SetKind::FullSpace => cast(gauss(rng, dim)),
        SetKind::Simplex(n) => cast(simplex(rng, *n)),
        SetKind::NonnegativeOrthant(n) => cast((0..*n).map(|_| <Exp1 as Distribution<f64>>::sample(&Exp1, rng)).collect()),
        SetKind::Spectrahedron(n) => {
            let g = gauss(rng, n * n);
            let m = DenseMatrix::from_vec(*n, *n, g).symmetrized();
            let (_, vecs) = linalg::sym_eig(&m);
            let lam = simplex(rng, *n);
            cast(linalg::eig_compose(&lam, &vecs).data)
        }
        SetKind::EuclideanBall { center, radius } => {
            let d = center.len();
            let g = gauss(rng, d);
            let nrm = linalg::norm2(&g).max(1e-300);
            let u: f64 = rng.random::<f64>().powf(1.0 / d.max(1) as f64);
            let r = radius.to_f64_lossy() * u;
            center.iter().zip(&g).map(|(&c, &gi)| c + T::of(r * gi / nrm)).collect()
        }
        SetKind::Intersection { base, center, radius } => {
            let b = sample_point(base, center.len(), rng);
            let b = if matches!(**base, SetKind::NonnegativeOrthant(_)) {
                // keep the sample spread out before projecting
                b.iter().map(|&v| v * T::of(0.5) * *radius).collect()
            } else {
                b
            };
            set.project(&b).unwrap_or(b)
        }
    }
}

pub(crate) fn project_ball<T: Scalar>(u: &[T], center: &[T], radius: T) -> Vec<T> {
    let d = linalg::dist2(u, center);
    if d <= radius {
        return u.to_vec();
    }
    let s = radius / d;
    u.iter().zip(center).map(|(&x, &c)| c + (x - c) * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_projection() {
        let b = SetKind::ball(vec![1.0f64, 0.0], 1.0);
        let p = b.project(&[3.0, 0.0]).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-15 && p[1] == 0.0);
        assert!(b.contains(&p, 1e-12));
    }

    #[test]
    fn affine_images() {
        let b = SetKind::ball(vec![2.0, 2.0], 2.0);
        let img = b.affine_image(&[2.0, 0.0], 2.0).unwrap();
        assert_eq!(img, SetKind::ball(vec![0.0, 1.0], 1.0));
        assert!(SetKind::<f64>::Simplex(2).affine_image(&[0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn spectrahedron_projection() {
        let s = SetKind::Spectrahedron(2);
        let p = s.project(&[2.0, 0.5, 0.5, -1.0]).unwrap();
        assert!(s.contains(&p, 1e-10));
    }
}
