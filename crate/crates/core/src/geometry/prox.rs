use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

use super::dgf::{eig_of, grad_half_pnorm, safe_ln, DgfKind, GeometrySpec};
use super::norm::conjugate_exponent;
use super::set::{project_ball, SetKind};

/// Prox-compatible simple functions (`g`, `J`, and the regularizers of the inner solves).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SimpleFunction<T> {
    Zero,
    Indicator(SetKind<T>),
    /// `c · h(u)` for the DGF of the geometry it is paired with.
    ScaledDgf(T),
}

impl<T: Scalar> SimpleFunction<T> {
    pub fn value(&self, g: &GeometrySpec<T>, u: &[T]) -> Result<T> {
        match self {
            SimpleFunction::Zero => Ok(T::zero()),
            SimpleFunction::Indicator(s) => Ok(if s.contains(u, T::feas_tol(1e-9)) { T::zero() } else { T::infinity() }),
            SimpleFunction::ScaledDgf(c) => {
                if *c == T::zero() {
                    Ok(T::zero())
                } else {
                    Ok(*c * g.h(u)?)
                }
            }
        }
    }
}

/// Bregman proximal projection:
/// `argmin_{u ∈ set} φ(u) + ⟨lin, u⟩ + λ⁻¹ D(u, u_ref)`.
pub fn bregman_prox<T: Scalar>(
    g: &GeometrySpec<T>,
    u_ref: &[T],
    linear_term: &[T],
    lambda: T,
    phi: &SimpleFunction<T>,
) -> Result<Vec<T>> {
    if u_ref.len() != linear_term.len() {
        return Err(domain("dimension mismatch between reference point and linear term"));
    }
    if lambda.is_nan() || lambda <= T::zero() {
        return Err(domain(format!("prox step λ = {lambda} must be positive")));
    }
    if !g.in_dgf_interior(u_ref) {
        return Err(domain("prox reference point outside the interior of the DGF domain"));
    }
    if lambda.is_infinite() {
        return if linear_term.iter().all(|&v| v == T::zero()) && matches!(phi, SimpleFunction::Zero) {
            Ok(u_ref.to_vec())
        } else {
            Err(domain("λ = ∞ with a nonzero linear term has no minimizer"))
        };
    }

    let (lam, lin) = match phi {
        SimpleFunction::ScaledDgf(c) if *c > T::zero() => {
            let gh = g.grad_h(u_ref)?;
            let lin: Vec<T> = linear_term.iter().zip(&gh).map(|(&l, &d)| l + *c * d).collect();
            (lambda / (T::one() + *c * lambda), lin)
        }
        SimpleFunction::ScaledDgf(c) if *c < T::zero() => return Err(domain("negative DGF coefficient")),
        _ => (lambda, linear_term.to_vec()),
    };

    let set = match phi {
        SimpleFunction::Indicator(s) => combine_sets(g, s)?,
        _ => g.feasible_set.clone(),
    };

    prox_on_set(g, &set, u_ref, &lin, lam)
}

fn combine_sets<T: Scalar>(g: &GeometrySpec<T>, s: &SetKind<T>) -> Result<SetKind<T>> {
    if *s == SetKind::FullSpace || *s == g.feasible_set {
        return Ok(g.feasible_set.clone());
    }
    if g.feasible_set == SetKind::FullSpace && g.is_euclidean() {
        return Ok(s.clone());
    }
    match (s, g.is_euclidean()) {
        (SetKind::EuclideanBall { center, radius }, true) => Ok(g.feasible_set.clone().intersect_ball(center.clone(), *radius)),
        _ => Err(unsupported(format!("indicator of {s:?} under {:?} has no prox rule", g.dgf))),
    }
}

pub(crate) fn prox_on_set<T: Scalar>(g: &GeometrySpec<T>, set: &SetKind<T>, u_ref: &[T], lin: &[T], lam: T) -> Result<Vec<T>> {
    match (g.dgf, set) {
        (DgfKind::SquaredEuclidean, _) => {
            let xi: Vec<T> = u_ref.iter().zip(lin).map(|(&u, &l)| u - lam * l).collect();
            set.project(&xi)
        }
        (DgfKind::SimplexEntropy, SetKind::Simplex(_)) => {
            let xi: Vec<T> = u_ref.iter().zip(lin).map(|(&u, &l)| safe_ln(u) - lam * l).collect();
            Ok(softmax(&xi))
        }
        (DgfKind::SimplexEntropy, SetKind::NonnegativeOrthant(_)) => {
            Ok(u_ref.iter().zip(lin).map(|(&u, &l)| (safe_ln(u) - lam * l).exp()).collect())
        }
        (DgfKind::MatrixEntropy, SetKind::Spectrahedron(n)) => {
            let (vals, vecs) = eig_of(u_ref);
            let logs: Vec<T> = vals.iter().map(|&v| safe_ln(v)).collect();
            let log_ref = linalg::eig_compose(&logs, &vecs);
            let l = DenseMatrix::from_vec(*n, *n, lin.to_vec()).symmetrized();
            let xi = log_ref.add_scaled(&l, -lam);
            let (sv, sp) = linalg::sym_eig(&xi);
            Ok(linalg::eig_compose(&softmax(&sv), &sp).data)
        }
        (DgfKind::HalfPNormSquared(p), SetKind::NonnegativeOrthant(_)) => {
            let gh = grad_half_pnorm(u_ref, p);
            let xi: Vec<T> = gh.iter().zip(lin).map(|(&a, &l)| a - lam * l).collect();
            pnorm_orthant_prox(&xi, p)
        }
        (DgfKind::HalfPNormSquared(p), SetKind::FullSpace) => {
            let gh = grad_half_pnorm(u_ref, p);
            let xi: Vec<T> = gh.iter().zip(lin).map(|(&a, &l)| a - lam * l).collect();
            Ok(grad_half_pnorm(&xi, conjugate_exponent(p)))
        }
        (dgf, s) => Err(unsupported(format!("no prox rule for {dgf:?} on {s:?}"))),
    }
}

/// Log-space softmax with max subtraction. Entries that would underflow are
/// held at the log floor so the result stays strictly positive.
pub fn softmax<T: Scalar>(xi: &[T]) -> Vec<T> {
    let m = xi.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let e: Vec<T> = xi.iter().map(|&v| (v - m).exp().max(T::log_floor())).collect();
    let s: T = e.iter().copied().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Solves `∇h(u) = ξ` on the orthant for `h = ½‖·‖_p²`: coordinates with
/// `ξᵢ ≤ 0` vanish; the rest are `s·wⱼ` with `wⱼ = (ξⱼ/ξ_max)^{q−1}`, and the
/// scalar `s` is found by bisection on the derivative of the 1-D objective.
fn pnorm_orthant_prox<T: Scalar>(xi: &[T], p: T) -> Result<Vec<T>> {
    let q = conjugate_exponent(p);
    let imax = xi
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, T)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        });
    let Some((_, xmax)) = imax else { return Ok(vec![]) };
    if xmax <= T::zero() {
        return Ok(vec![T::zero(); xi.len()]);
    }
    let w: Vec<T> = xi.iter().map(|&v| if v > T::zero() { (v / xmax).powf(q - T::one()) } else { T::zero() }).collect();
    let deriv = |s: T| -> T {
        let u: Vec<T> = w.iter().map(|&wi| s * wi).collect();
        let gu = grad_half_pnorm(&u, p);
        gu.iter().zip(&w).zip(xi).filter(|((_, &wi), _)| wi > T::zero()).map(|((&gi, &wi), &x)| wi * (gi - x)).sum()
    };
    let mut lo = T::zero();
    let mut hi = xmax.max(T::one());
    let mut expand = 0;
    while deriv(hi) < T::zero() {
        lo = hi;
        hi *= T::of(2.0);
        expand += 1;
        if expand > 200 || !hi.is_finite() {
            return Err(Error::Convergence("p-norm prox: failed to bracket the scalar root".into()));
        }
    }
    let tol = T::of(1e-12).max(T::epsilon() * T::of(4.0));
    let mut iters = 0;
    while hi - lo > tol * hi {
        let mid = T::of(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if deriv(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
        if iters >= 200 {
            return Err(Error::Convergence("p-norm prox: bisection hit the iteration cap".into()));
        }
    }
    let s = T::of(0.5) * (lo + hi);
    Ok(w.iter().map(|&wi| s * wi).collect())
}

/// Euclidean projection onto `base ∩ B(c, r)` through the scalar Lagrangian
/// `x(λ) = Proj_base((ξ + 2λc)/(1 + 2λ))`, bisecting on `‖x(λ) − c‖ − r`.
pub(crate) fn project_intersection<T: Scalar>(set: &SetKind<T>, xi: &[T]) -> Result<Vec<T>> {
    let SetKind::Intersection { base, center, radius } = set else { return set.project(xi) };
    let r = *radius;
    if base.as_ref() == &SetKind::FullSpace {
        return Ok(project_ball(xi, center, r));
    }
    let x_of = |lam: T| -> Result<Vec<T>> {
        let d = T::one() + T::of(2.0) * lam;
        let z: Vec<T> = xi.iter().zip(center).map(|(&a, &c)| (a + T::of(2.0) * lam * c) / d).collect();
        base.project(&z)
    };
    let resid = |x: &[T]| linalg::dist2(x, center) - r;
    let x0 = x_of(T::zero())?;
    if resid(&x0) <= T::zero() {
        return Ok(x0);
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut xhi = x_of(hi)?;
    let mut expand = 0;
    while resid(&xhi) > T::zero() {
        lo = hi;
        hi *= T::of(2.0);
        xhi = x_of(hi)?;
        expand += 1;
        if expand > 200 || !hi.is_finite() {
            return Err(Error::Convergence("ball-intersection prox: base set does not meet the ball".into()));
        }
    }
    let tol = T::of(1e-10).max(T::epsilon() * T::of(4.0));
    for _ in 0..400 {
        let mid = T::of(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let xm = x_of(mid)?;
        let rm = resid(&xm);
        if rm > T::zero() {
            lo = mid;
        } else {
            hi = mid;
            xhi = xm;
            if -rm <= tol * r.max(T::one()) {
                break;
            }
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    Ok(xhi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn e3_matches_conjugate_gradient_formula() {
        let p = 1.5;
        let xi = [0.4f64, -0.3, 1.1, 0.0, 2.0];
        let u = pnorm_orthant_prox(&xi, p).unwrap();
        let xp: Vec<f64> = xi.iter().map(|v| v.max(0.0)).collect();
        let want = grad_half_pnorm(&xp, conjugate_exponent(p));
        for (a, b) in u.iter().zip(&want) {
            assert_relative_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn intersection_with_orthant() {
        let set = SetKind::NonnegativeOrthant(2).intersect_ball(vec![0.0, 0.0], 1.0);
        let x = project_intersection(&set, &[3.0, -1.0]).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(x[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn infinite_step() {
        let g = GeometrySpec::<f64>::euclidean(SetKind::FullSpace);
        let u = [1.0, 2.0];
        assert_eq!(bregman_prox(&g, &u, &[0.0, 0.0], f64::INFINITY, &SimpleFunction::Zero).unwrap(), u.to_vec());
        assert!(bregman_prox(&g, &u, &[1.0, 0.0], f64::INFINITY, &SimpleFunction::Zero).is_err());
    }

    #[test]
    fn scaled_dgf_reduction() {
        // min c/2‖u‖² + ⟨l,u⟩ + 1/(2λ)‖u − u′‖²  ⇒  u = (u′/λ − l)/(c + 1/λ)
        let g = GeometrySpec::<f64>::euclidean(SetKind::FullSpace);
        let (c, lam) = (0.7, 0.4);
        let u = bregman_prox(&g, &[1.0, -2.0], &[0.3, 0.1], lam, &SimpleFunction::ScaledDgf(c)).unwrap();
        assert_relative_eq!(u[0], (1.0 / lam - 0.3) / (c + 1.0 / lam), epsilon = 1e-14);
        assert_relative_eq!(u[1], (-2.0 / lam - 0.1) / (c + 1.0 / lam), epsilon = 1e-14);
    }
}
