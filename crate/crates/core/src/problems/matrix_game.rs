use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{GeometrySpec, SetKind, SimpleFunction};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

use super::{ClosedFormInstance, Constants, Diameters, SaddleProblem, SmoothTerms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixGameGeometry {
    /// entropy DGF, ℓ1 norm; `L_yx = max |aᵢⱼ|`
    Entropic,
    /// `½‖·‖²`, ℓ2 norm; `L_yx = ‖A‖₂`
    Euclidean,
}

#[derive(Debug)]
struct Bilinear<T> {
    a: DenseMatrix<T>,
}

impl<T: Scalar> SmoothTerms<T> for Bilinear<T> {
    fn f(&self, _x: &[T]) -> T {
        T::zero()
    }
    fn grad_f(&self, x: &[T]) -> Vec<T> {
        vec![T::zero(); x.len()]
    }
    fn phi(&self, x: &[T], y: &[T]) -> T {
        crate::linalg::dot(y, &self.a.matvec(x))
    }
    fn grad_x_phi(&self, _x: &[T], y: &[T]) -> Vec<T> {
        self.a.matvec_t(y)
    }
    fn grad_y_phi(&self, x: &[T], _y: &[T]) -> Vec<T> {
        self.a.matvec(x)
    }
}

/// `min_{x ∈ Δ_n} max_{y ∈ Δ_m} yᵀ A x` for an `m × n` payoff matrix.
#[derive(Debug, Clone)]
pub struct MatrixGame<T: Scalar> {
    pub a: DenseMatrix<T>,
    problem: SaddleProblem<T>,
}

impl<T: Scalar> MatrixGame<T> {
    pub fn new(a: DenseMatrix<T>, geometry: MatrixGameGeometry) -> Self {
        let (m, n) = (a.rows, a.cols);
        let (geom_x, geom_y, l_yx, d_x, d_y) = match geometry {
            MatrixGameGeometry::Entropic => {
                (GeometrySpec::simplex_entropy(n), GeometrySpec::simplex_entropy(m), a.max_abs(), T::of(2.0), T::of(2.0))
            }
            MatrixGameGeometry::Euclidean => (
                GeometrySpec::euclidean(SetKind::Simplex(n)),
                GeometrySpec::euclidean(SetKind::Simplex(m)),
                a.spectral_norm(),
                T::of(2.0).sqrt(),
                T::of(2.0).sqrt(),
            ),
        };
        let problem = SaddleProblem {
            terms: Arc::new(Bilinear { a: a.clone() }),
            g: SimpleFunction::Zero,
            j: SimpleFunction::Zero,
            geom_x,
            geom_y,
            constants: Constants { l: T::zero(), l_xx: T::zero(), l_yx, l_yy: T::zero(), mu: T::zero() },
            diameters: Diameters { d_x, d_y },
        };
        Self { a, problem }
    }

    /// `[[1, −1], [−1, 1]]`
    pub fn matching_pennies(geometry: MatrixGameGeometry) -> Self {
        let one = T::one();
        Self::new(DenseMatrix::from_rows(&[vec![one, -one], vec![-one, one]]), geometry)
    }

    /// Entries i.i.d. uniform on `[−1, 1]`.
    pub fn random<R: rand::Rng + ?Sized>(m: usize, n: usize, geometry: MatrixGameGeometry, rng: &mut R) -> Self {
        let data = (0..m * n).map(|_| T::of(rng.random_range(-1.0..=1.0))).collect();
        Self::new(DenseMatrix::from_vec(m, n, data), geometry)
    }
}

impl<T: Scalar> ClosedFormInstance<T> for MatrixGame<T> {
    fn name(&self) -> &'static str {
        "matrix-game"
    }

    fn problem(&self) -> &SaddleProblem<T> {
        &self.problem
    }

    /// `max_i (A x)_i − min_j (Aᵀ y)_j`, attained at simplex vertices.
    fn duality_gap(&self, x: &[T], y: &[T]) -> Result<T> {
        let tol = T::feas_tol(1e-9);
        if !SetKind::<T>::Simplex(self.a.cols).contains(x, tol) || !SetKind::<T>::Simplex(self.a.rows).contains(y, tol) {
            return Err(domain("matrix-game gap needs points on the simplices"));
        }
        let ax = self.a.matvec(x);
        let aty = self.a.matvec_t(y);
        let hi = ax.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        let lo = aty.iter().fold(T::infinity(), |m, &v| m.min(v));
        Ok((hi - lo).max(T::zero()))
    }

    fn saddle_point(&self) -> Option<(Vec<T>, Vec<T>)> {
        None
    }

    fn gap_upper_bound(&self) -> T {
        let hi = self.a.data.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        let lo = self.a.data.iter().fold(T::infinity(), |m, &v| m.min(v));
        (hi - lo).max(T::zero())
    }
}
