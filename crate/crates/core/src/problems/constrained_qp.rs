use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{GeometrySpec, SetKind, SimpleFunction};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

use super::quadratic::{cast_mat, cast_vec, random_in_ball, random_psd, random_with_norm};
use super::trust_region::solve_ball_qp;
use super::{ClosedFormInstance, Constants, Diameters, SaddleProblem, SmoothTerms};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstrainedQpParams {
    pub n: usize,
    /// number of inequality constraints
    pub m: usize,
    pub mu: f64,
    pub l: f64,
    /// `‖C‖₂`
    pub l_yx: f64,
    pub r_x: f64,
    pub r_y: f64,
}

impl Default for ConstrainedQpParams {
    fn default() -> Self {
        Self { n: 5, m: 3, mu: 1.0, l: 4.0, l_yx: 1.0, r_x: 2.0, r_y: 2.0 }
    }
}

#[derive(Debug)]
struct LagrangianTerms<T> {
    p_mat: DenseMatrix<T>,
    p_vec: Vec<T>,
    c: DenseMatrix<T>,
    d: Vec<T>,
}

impl<T: Scalar> SmoothTerms<T> for LagrangianTerms<T> {
    fn f(&self, x: &[T]) -> T {
        T::of(0.5) * self.p_mat.quad(x) + linalg::dot(&self.p_vec, x)
    }
    fn grad_f(&self, x: &[T]) -> Vec<T> {
        linalg::add(&self.p_mat.matvec(x), &self.p_vec)
    }
    fn phi(&self, x: &[T], y: &[T]) -> T {
        linalg::dot(y, &linalg::sub(&self.c.matvec(x), &self.d))
    }
    fn grad_x_phi(&self, _x: &[T], y: &[T]) -> Vec<T> {
        self.c.matvec_t(y)
    }
    fn grad_y_phi(&self, x: &[T], _y: &[T]) -> Vec<T> {
        linalg::sub(&self.c.matvec(x), &self.d)
    }
}

/// Lagrangian `½xᵀPx + pᵀx + yᵀ(Cx − d)` of a QP with `Cx ≤ d`, over
/// `X = B(0, r_x)` and `Y = ℝ₊ᵐ ∩ B(0, r_y)`.
#[derive(Debug, Clone)]
pub struct ConstrainedQp<T: Scalar> {
    terms: Arc<LagrangianTerms<T>>,
    r_x: T,
    r_y: T,
    x_star: Vec<T>,
    y_star: Vec<T>,
    problem: SaddleProblem<T>,
}

impl<T: Scalar> ConstrainedQp<T> {
    pub fn random<R: Rng + ?Sized>(params: &ConstrainedQpParams, rng: &mut R) -> Result<Self> {
        let ConstrainedQpParams { n, m, mu, l, l_yx, r_x, r_y } = *params;
        if n == 0 || m == 0 || !(mu > 0.0) || l < mu || !(l_yx > 0.0) || !(r_x > 0.0) || !(r_y > 0.0) {
            return Err(crate::error::config(format!("invalid constrained-qp parameters {params:?}")));
        }
        let p_mat = random_psd(n, mu, l, rng);
        let c = random_with_norm(m, n, l_yx, rng);
        let x_star = random_in_ball(n, 0.5 * r_x, rng);
        // roughly half of the constraints active, multipliers inside the ball
        let mut y_star = vec![0.0; m];
        for (i, v) in y_star.iter_mut().enumerate() {
            if i == 0 || rng.random::<bool>() {
                *v = rng.random_range(0.1..1.0);
            }
        }
        let ny = linalg::norm2(&y_star);
        let target = 0.5 * r_y * rng.random_range(0.3..1.0);
        for v in &mut y_star {
            *v *= target / ny;
        }
        let cx = c.matvec(&x_star);
        let d: Vec<f64> = cx.iter().zip(&y_star).map(|(&v, &y)| if y > 0.0 { v } else { v + rng.random_range(0.1..1.0) }).collect();
        let mut p_vec = p_mat.matvec(&x_star);
        linalg::axpy(1.0, &c.matvec_t(&y_star), &mut p_vec);
        let p_vec: Vec<f64> = p_vec.iter().map(|v| -v).collect();

        let (eig_p, _) = linalg::sym_eig(&p_mat);
        let constants = Constants {
            l: T::of(eig_p.iter().cloned().fold(f64::MIN, f64::max)),
            l_xx: T::zero(),
            l_yx: T::of(c.spectral_norm()),
            l_yy: T::zero(),
            mu: T::of(eig_p.iter().cloned().fold(f64::MAX, f64::min)),
        };
        let terms = Arc::new(LagrangianTerms { p_mat: cast_mat(&p_mat), p_vec: cast_vec(&p_vec), c: cast_mat(&c), d: cast_vec(&d) });
        let (rx, ry) = (T::of(r_x), T::of(r_y));
        let problem = SaddleProblem {
            terms: terms.clone(),
            g: SimpleFunction::Zero,
            j: SimpleFunction::Zero,
            geom_x: GeometrySpec::euclidean(SetKind::ball(vec![T::zero(); n], rx)),
            geom_y: GeometrySpec::euclidean(SetKind::NonnegativeOrthant(m).intersect_ball(vec![T::zero(); m], ry)),
            constants,
            diameters: Diameters { d_x: T::of(2.0) * rx, d_y: T::of(2.0).sqrt() * ry },
        };
        Ok(Self { terms, r_x: rx, r_y: ry, x_star: cast_vec(&x_star), y_star: cast_vec(&y_star), problem })
    }

    /// `S̄(x) = f(x) + r_y ‖(Cx − d)₊‖`.
    pub fn primal_value(&self, x: &[T]) -> T {
        let t = &self.terms;
        let viol: Vec<T> = linalg::sub(&t.c.matvec(x), &t.d).into_iter().map(|v| v.max(T::zero())).collect();
        t.f(x) + self.r_y * linalg::norm2(&viol)
    }

    pub fn dual_value(&self, y: &[T]) -> Result<T> {
        let t = &self.terms;
        let b = linalg::add(&t.p_vec, &t.c.matvec_t(y));
        let x = solve_ball_qp(&t.p_mat, &b, &vec![T::zero(); b.len()], self.r_x)?;
        Ok(T::of(0.5) * t.p_mat.quad(&x) + linalg::dot(&b, &x) - linalg::dot(y, &t.d))
    }
}

impl<T: Scalar> ClosedFormInstance<T> for ConstrainedQp<T> {
    fn name(&self) -> &'static str {
        "constrained-qp"
    }

    fn problem(&self) -> &SaddleProblem<T> {
        &self.problem
    }

    fn duality_gap(&self, x: &[T], y: &[T]) -> Result<T> {
        let tol = T::feas_tol(1e-9);
        if linalg::norm2(x) > self.r_x + tol || !self.problem.geom_y.feasible_set.contains(y, tol) {
            return Err(domain("constrained-qp gap needs feasible points"));
        }
        Ok((self.primal_value(x) - self.dual_value(y)?).max(T::zero()))
    }

    fn saddle_point(&self) -> Option<(Vec<T>, Vec<T>)> {
        Some((self.x_star.clone(), self.y_star.clone()))
    }

    fn gap_upper_bound(&self) -> T {
        let t = &self.terms;
        let (rx, ry) = (self.r_x, self.r_y);
        let sup_abs = T::of(0.5) * t.p_mat.spectral_norm() * rx * rx
            + linalg::norm2(&t.p_vec) * rx
            + ry * (t.c.spectral_norm() * rx + linalg::norm2(&t.d));
        T::of(2.0) * sup_abs
    }
}
