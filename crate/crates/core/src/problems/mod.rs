//! Saddle-point problems `min_x max_y f(x) + g(x) + Φ(x, y) − J(y)` and closed-form test instances.

mod best_response;
mod constrained_qp;
mod matrix_game;
mod quadratic;
mod trust_region;

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{sample_point, GeometrySpec, SimpleFunction};
use crate::linalg;
use crate::oracles::GradKind;
use crate::scalar::Scalar;

pub use best_response::best_response_x;
pub use constrained_qp::{ConstrainedQp, ConstrainedQpParams};
pub use matrix_game::{MatrixGame, MatrixGameGeometry};
pub use quadratic::{QuadraticParams, QuadraticSaddle};
pub use trust_region::solve_ball_qp;

/// The smooth parts `f` and `Φ`, with optional finite-sum structure.
pub trait SmoothTerms<T: Scalar>: Send + Sync + Debug {
    fn f(&self, x: &[T]) -> T;
    fn grad_f(&self, x: &[T]) -> Vec<T>;
    fn phi(&self, x: &[T], y: &[T]) -> T;
    fn grad_x_phi(&self, x: &[T], y: &[T]) -> Vec<T>;
    fn grad_y_phi(&self, x: &[T], y: &[T]) -> Vec<T>;

    fn gradient(&self, kind: GradKind, x: &[T], y: &[T]) -> Vec<T> {
        match kind {
            GradKind::GradF => self.grad_f(x),
            GradKind::GradXPhi => self.grad_x_phi(x, y),
            GradKind::GradYPhi => self.grad_y_phi(x, y),
        }
    }

    /// Number of summands `n` in `f = (1/n) Σ fᵢ`, `Φ = (1/n) Σ Φᵢ`.
    fn n_components(&self) -> usize {
        1
    }

    /// Gradient of summand `i`; the summands average to [`SmoothTerms::gradient`].
    fn component_gradient(&self, kind: GradKind, _i: usize, x: &[T], y: &[T]) -> Vec<T> {
        self.gradient(kind, x, y)
    }
}

/// Regularity constants of the problem class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Constants<T> {
    /// smoothness of `f`
    pub l: T,
    pub l_xx: T,
    pub l_yx: T,
    pub l_yy: T,
    /// strong convexity of `f`
    pub mu: T,
}

/// Norm diameters of the feasible sets (`+∞` when unbounded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diameters<T> {
    pub d_x: T,
    pub d_y: T,
}

#[derive(Debug, Clone)]
pub struct SaddleProblem<T: Scalar> {
    pub terms: Arc<dyn SmoothTerms<T>>,
    pub g: SimpleFunction<T>,
    pub j: SimpleFunction<T>,
    pub geom_x: GeometrySpec<T>,
    pub geom_y: GeometrySpec<T>,
    pub constants: Constants<T>,
    pub diameters: Diameters<T>,
}

impl<T: Scalar> SaddleProblem<T> {
    pub fn dim_x(&self) -> usize {
        self.geom_x.feasible_set.dim().unwrap_or(0)
    }

    pub fn dim_y(&self) -> usize {
        self.geom_y.feasible_set.dim().unwrap_or(0)
    }

    /// `S(x, y) = f(x) + g(x) + Φ(x, y) − J(y)`.
    pub fn evaluate(&self, x: &[T], y: &[T]) -> Result<T> {
        let tol = T::feas_tol(1e-9);
        if !self.geom_x.feasible_set.contains(x, tol) || !self.geom_y.feasible_set.contains(y, tol) {
            return Err(domain("saddle function evaluated outside the feasible sets"));
        }
        let gx = self.g.value(&self.geom_x, x)?;
        let jy = self.j.value(&self.geom_y, y)?;
        if gx.is_infinite() || jy.is_infinite() {
            return Err(domain("g or J is infinite at the input"));
        }
        Ok(self.terms.f(x) + gx + self.terms.phi(x, y) - jy)
    }

    /// `ψ_P(x, y) = f(x) + g(x) + Φ(x, y)`.
    pub fn psi_primal(&self, x: &[T], y: &[T]) -> Result<T> {
        Ok(self.terms.f(x) + self.g.value(&self.geom_x, x)? + self.terms.phi(x, y))
    }

    /// Default starting points: the centres of the feasible sets.
    pub fn start_point(&self) -> (Vec<T>, Vec<T>) {
        (self.geom_x.feasible_set.center_point(self.dim_x()), self.geom_y.feasible_set.center_point(self.dim_y()))
    }

    /// Spot-checks the stated constants on random feasible pairs.
    /// Returns the first violated certificate.
    pub fn check_constants<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> std::result::Result<(), String> {
        let c = self.constants;
        let (nx, ny) = (self.geom_x.norm, self.geom_y.norm);
        let tol = T::of(1e-9);
        let sx = &self.geom_x.feasible_set;
        let sy = &self.geom_y.feasible_set;
        let (dx, dy) = (self.dim_x(), self.dim_y());
        let t = &self.terms;
        for it in 0..samples {
            let x = sample_point(sx, dx, rng);
            let x2 = sample_point(sx, dx, rng);
            let y = sample_point(sy, dy, rng);
            let y2 = sample_point(sy, dy, rng);
            let ddx = nx.norm(&linalg::sub(&x, &x2));
            let ddy = ny.norm(&linalg::sub(&y, &y2));
            let checks = [
                ("f smoothness", nx.dual_norm(&linalg::sub(&t.grad_f(&x), &t.grad_f(&x2))), c.l * ddx),
                ("Lxx", nx.dual_norm(&linalg::sub(&t.grad_x_phi(&x, &y), &t.grad_x_phi(&x2, &y))), c.l_xx * ddx),
                ("Lyx (x-gradient)", nx.dual_norm(&linalg::sub(&t.grad_x_phi(&x, &y), &t.grad_x_phi(&x, &y2))), c.l_yx * ddy),
                ("Lyx (y-gradient)", ny.dual_norm(&linalg::sub(&t.grad_y_phi(&x, &y), &t.grad_y_phi(&x2, &y))), c.l_yx * ddx),
                ("Lyy", ny.dual_norm(&linalg::sub(&t.grad_y_phi(&x, &y), &t.grad_y_phi(&x, &y2))), c.l_yy * ddy),
            ];
            for (name, lhs, rhs) in checks {
                if lhs > rhs + tol * (T::one() + rhs) {
                    return Err(format!("sample {it}: {name} certificate fails ({lhs} > {rhs})"));
                }
            }
            let half = T::of(0.5);
            let lin = t.f(&x2) + linalg::dot(&t.grad_f(&x2), &linalg::sub(&x, &x2)) + half * c.mu * ddx * ddx;
            if t.f(&x) < lin - tol * (T::one() + t.f(&x).abs()) {
                return Err(format!("sample {it}: μ-strong convexity of f fails"));
            }
            let cvx = t.phi(&x2, &y) + linalg::dot(&t.grad_x_phi(&x2, &y), &linalg::sub(&x, &x2));
            if t.phi(&x, &y) < cvx - tol * (T::one() + cvx.abs()) {
                return Err(format!("sample {it}: Φ(·, y) not convex"));
            }
            let ccv = t.phi(&x, &y2) + linalg::dot(&t.grad_y_phi(&x, &y2), &linalg::sub(&y, &y2));
            if t.phi(&x, &y) > ccv + tol * (T::one() + ccv.abs()) {
                return Err(format!("sample {it}: Φ(x, ·) not concave"));
            }
        }
        Ok(())
    }
}

/// Instances with a computable duality gap.
pub trait ClosedFormInstance<T: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;
    fn problem(&self) -> &SaddleProblem<T>;
    /// `G(x, y) = sup_{x′, y′} S(x, y′) − S(x′, y)`.
    fn duality_gap(&self, x: &[T], y: &[T]) -> Result<T>;
    fn saddle_point(&self) -> Option<(Vec<T>, Vec<T>)>;
    /// `Γ ≥ sup G` over the feasible sets.
    fn gap_upper_bound(&self) -> T;
}

/// `S(x, y)`; see [`SaddleProblem::evaluate`].
pub fn evaluate_saddle<T: Scalar>(p: &SaddleProblem<T>, x: &[T], y: &[T]) -> Result<T> {
    p.evaluate(x, y)
}

/// Exact duality gap of a closed-form instance.
pub fn duality_gap<T: Scalar>(p: &dyn ClosedFormInstance<T>, x: &[T], y: &[T]) -> Result<T> {
    p.duality_gap(x, y)
}
