use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{GeometrySpec, SetKind, SimpleFunction};
use crate::linalg::{self, DenseMatrix};
use crate::oracles::GradKind;
use crate::scalar::Scalar;

use super::trust_region::solve_ball_qp;
use super::{ClosedFormInstance, Constants, Diameters, SaddleProblem, SmoothTerms};

/// Generator parameters for [`QuadraticSaddle::random`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadraticParams {
    pub n: usize,
    pub m: usize,
    pub mu: f64,
    pub l: f64,
    pub l_xx: f64,
    pub l_yx: f64,
    pub l_yy: f64,
    pub r_x: f64,
    pub r_y: f64,
    /// number of finite-sum components (1 = no finite-sum structure)
    pub n_components: usize,
    /// scale of the zero-mean component perturbations
    pub component_spread: f64,
}

impl Default for QuadraticParams {
    fn default() -> Self {
        Self {
            n: 5,
            m: 4,
            mu: 1.0,
            l: 4.0,
            l_xx: 0.5,
            l_yx: 1.0,
            l_yy: 0.5,
            r_x: 2.0,
            r_y: 1.0,
            n_components: 1,
            component_spread: 0.0,
        }
    }
}

#[derive(Debug)]
struct QuadTerms<T> {
    p_mat: DenseMatrix<T>,
    p_vec: Vec<T>,
    m_mat: DenseMatrix<T>,
    a: DenseMatrix<T>,
    q_mat: DenseMatrix<T>,
    q_vec: Vec<T>,
    comp_p: Vec<Vec<T>>,
    comp_a: Vec<DenseMatrix<T>>,
    comp_q: Vec<Vec<T>>,
}

impl<T: Scalar> SmoothTerms<T> for QuadTerms<T> {
    fn f(&self, x: &[T]) -> T {
        T::of(0.5) * self.p_mat.quad(x) + linalg::dot(&self.p_vec, x)
    }
    fn grad_f(&self, x: &[T]) -> Vec<T> {
        linalg::add(&self.p_mat.matvec(x), &self.p_vec)
    }
    fn phi(&self, x: &[T], y: &[T]) -> T {
        T::of(0.5) * self.m_mat.quad(x) + linalg::dot(y, &self.a.matvec(x)) - T::of(0.5) * self.q_mat.quad(y) - linalg::dot(&self.q_vec, y)
    }
    fn grad_x_phi(&self, x: &[T], y: &[T]) -> Vec<T> {
        linalg::add(&self.m_mat.matvec(x), &self.a.matvec_t(y))
    }
    fn grad_y_phi(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut g = linalg::sub(&self.a.matvec(x), &self.q_mat.matvec(y));
        linalg::axpy(-T::one(), &self.q_vec, &mut g);
        g
    }
    fn n_components(&self) -> usize {
        self.comp_p.len().max(1)
    }
    fn component_gradient(&self, kind: GradKind, i: usize, x: &[T], y: &[T]) -> Vec<T> {
        if self.comp_p.is_empty() {
            return self.gradient(kind, x, y);
        }
        match kind {
            GradKind::GradF => linalg::add(&self.p_mat.matvec(x), &self.comp_p[i]),
            GradKind::GradXPhi => linalg::add(&self.m_mat.matvec(x), &self.comp_a[i].matvec_t(y)),
            GradKind::GradYPhi => {
                let mut g = linalg::sub(&self.comp_a[i].matvec(x), &self.q_mat.matvec(y));
                linalg::axpy(-T::one(), &self.comp_q[i], &mut g);
                g
            }
        }
    }
}

/// `S(x, y) = ½xᵀPx + pᵀx + ½xᵀMx + yᵀAx − ½yᵀQy − qᵀy` on
/// `X = B(0, r_x)`, `Y = B(0, r_y)` with a planted interior saddle point.
#[derive(Debug, Clone)]
pub struct QuadraticSaddle<T: Scalar> {
    terms: Arc<QuadTerms<T>>,
    h: DenseMatrix<T>,
    r_x: T,
    r_y: T,
    x_star: Vec<T>,
    y_star: Vec<T>,
    problem: SaddleProblem<T>,
}

pub(crate) fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix<f64> {
    let g: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
    let (_, v) = linalg::sym_eig(&DenseMatrix::from_vec(n, n, g).symmetrized());
    v
}

/// Symmetric PSD matrix with spectrum in `[lo, hi]` hitting both ends.
pub(crate) fn random_psd<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> DenseMatrix<f64> {
    let v = random_orthogonal(n, rng);
    let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    if n >= 1 {
        s[0] = hi;
    }
    if n >= 2 {
        s[1] = lo;
    }
    linalg::eig_compose(&s, &v)
}

pub(crate) fn random_with_norm<R: Rng + ?Sized>(m: usize, n: usize, norm: f64, rng: &mut R) -> DenseMatrix<f64> {
    let g = DenseMatrix::from_vec(m, n, (0..m * n).map(|_| StandardNormal.sample(rng)).collect());
    let s = g.spectral_norm();
    DenseMatrix::from_vec(m, n, g.data.iter().map(|v| v * norm / s).collect())
}

pub(crate) fn random_in_ball<R: Rng + ?Sized>(d: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let n = linalg::norm2(&g).max(1e-300);
    let r = radius * rng.random::<f64>().powf(1.0 / d.max(1) as f64);
    g.iter().map(|v| v * r / n).collect()
}

pub(crate) fn cast_mat<T: Scalar>(m: &DenseMatrix<f64>) -> DenseMatrix<T> {
    DenseMatrix::from_vec(m.rows, m.cols, m.data.iter().map(|&v| T::of(v)).collect())
}

pub(crate) fn cast_vec<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::of(x)).collect()
}

impl<T: Scalar> QuadraticSaddle<T> {
    pub fn random<R: Rng + ?Sized>(params: &QuadraticParams, rng: &mut R) -> Result<Self> {
        let QuadraticParams { n, m, mu, l, l_xx, l_yx, l_yy, r_x, r_y, .. } = *params;
        if n == 0 || m == 0 || !(mu > 0.0) || l < mu || l_xx < 0.0 || l_yx < 0.0 || l_yy < 0.0 || !(r_x > 0.0) || !(r_y > 0.0) {
            return Err(crate::error::config(format!("invalid quadratic-saddle parameters {params:?}")));
        }
        let p_mat = random_psd(n, mu, l, rng);
        let m_mat = if l_xx > 0.0 { random_psd(n, 0.0, l_xx, rng) } else { DenseMatrix::zeros(n, n) };
        let a = if l_yx > 0.0 { random_with_norm(m, n, l_yx, rng) } else { DenseMatrix::zeros(m, n) };
        let q_mat = if l_yy > 0.0 { random_psd(m, 0.0, l_yy, rng) } else { DenseMatrix::zeros(m, m) };
        let x_star = random_in_ball(n, 0.5 * r_x, rng);
        let y_star = random_in_ball(m, 0.5 * r_y, rng);
        let h = p_mat.add_scaled(&m_mat, 1.0);
        let mut p_vec = h.matvec(&x_star);
        linalg::axpy(1.0, &a.matvec_t(&y_star), &mut p_vec);
        let p_vec: Vec<f64> = p_vec.iter().map(|v| -v).collect();
        let q_vec = linalg::sub(&a.matvec(&x_star), &q_mat.matvec(&y_star));

        let k = params.n_components.max(1);
        let (mut comp_p, mut comp_a, mut comp_q) = (vec![], vec![], vec![]);
        if k > 1 {
            let s = params.component_spread;
            let gauss = |rng: &mut R, len: usize| -> Vec<f64> { (0..len).map(|_| s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)).collect() };
            let dp: Vec<Vec<f64>> = (0..k).map(|_| gauss(rng, n)).collect();
            let da: Vec<Vec<f64>> = (0..k).map(|_| gauss(rng, m * n)).collect();
            let dq: Vec<Vec<f64>> = (0..k).map(|_| gauss(rng, m)).collect();
            let center = |d: &[Vec<f64>]| -> Vec<Vec<f64>> {
                let len = d[0].len();
                let mean: Vec<f64> = (0..len).map(|j| d.iter().map(|v| v[j]).sum::<f64>() / k as f64).collect();
                d.iter().map(|v| linalg::sub(v, &mean)).collect()
            };
            comp_p = center(&dp).iter().map(|d| cast_vec(&linalg::add(&p_vec, d))).collect();
            comp_a = center(&da).iter().map(|d| cast_mat(&DenseMatrix::from_vec(m, n, linalg::add(&a.data, d)))).collect();
            comp_q = center(&dq).iter().map(|d| cast_vec(&linalg::add(&q_vec, d))).collect();
        }

        let (eig_p, _) = linalg::sym_eig(&p_mat);
        let constants = Constants {
            l: T::of(eig_p.iter().cloned().fold(f64::MIN, f64::max)),
            l_xx: T::of(m_mat.spectral_norm()),
            l_yx: T::of(a.spectral_norm()),
            l_yy: T::of(q_mat.spectral_norm()),
            mu: T::of(eig_p.iter().cloned().fold(f64::MAX, f64::min)),
        };
        let terms = Arc::new(QuadTerms {
            p_mat: cast_mat(&p_mat),
            p_vec: cast_vec(&p_vec),
            m_mat: cast_mat(&m_mat),
            a: cast_mat(&a),
            q_mat: cast_mat(&q_mat),
            q_vec: cast_vec(&q_vec),
            comp_p,
            comp_a,
            comp_q,
        });
        let (rx, ry) = (T::of(r_x), T::of(r_y));
        let problem = SaddleProblem {
            terms: terms.clone(),
            g: SimpleFunction::Zero,
            j: SimpleFunction::Zero,
            geom_x: GeometrySpec::euclidean(SetKind::ball(vec![T::zero(); n], rx)),
            geom_y: GeometrySpec::euclidean(SetKind::ball(vec![T::zero(); m], ry)),
            constants,
            diameters: Diameters { d_x: T::of(2.0) * rx, d_y: T::of(2.0) * ry },
        };
        Ok(Self { terms, h: cast_mat(&h), r_x: rx, r_y: ry, x_star: cast_vec(&x_star), y_star: cast_vec(&y_star), problem })
    }

    /// Solves the stationarity system `[[P+M, Aᵀ], [A, −Q]] (x, y) = (−p, q)` directly.
    pub fn kkt_saddle(&self) -> Result<(Vec<T>, Vec<T>)> {
        let t = &self.terms;
        let (n, m) = (self.h.rows, t.a.rows);
        let mut k = DenseMatrix::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                k.set(i, j, self.h.get(i, j));
            }
            for j in 0..m {
                k.set(i, n + j, t.a.get(j, i));
                k.set(n + j, i, t.a.get(j, i));
            }
        }
        for i in 0..m {
            for j in 0..m {
                k.set(n + i, n + j, -t.q_mat.get(i, j));
            }
        }
        let mut rhs: Vec<T> = t.p_vec.iter().map(|&v| -v).collect();
        rhs.extend_from_slice(&t.q_vec);
        let z = linalg::lu_solve(&k, &rhs)?;
        Ok((z[..n].to_vec(), z[n..].to_vec()))
    }

    pub fn saddle_value(&self) -> T {
        self.terms.f(&self.x_star) + self.terms.phi(&self.x_star, &self.y_star)
    }

    pub fn radii(&self) -> (T, T) {
        (self.r_x, self.r_y)
    }

    /// `S̄(x) = sup_y S(x, y)`.
    pub fn primal_value(&self, x: &[T]) -> Result<T> {
        let t = &self.terms;
        let c: Vec<T> = linalg::sub(&t.a.matvec(x), &t.q_vec);
        let neg: Vec<T> = c.iter().map(|&v| -v).collect();
        let y = solve_ball_qp(&t.q_mat, &neg, &vec![T::zero(); c.len()], self.r_y)?;
        Ok(t.f(x) + T::of(0.5) * t.m_mat.quad(x) + linalg::dot(&y, &c) - T::of(0.5) * t.q_mat.quad(&y))
    }

    /// `S̲(y) = inf_x S(x, y)`.
    pub fn dual_value(&self, y: &[T]) -> Result<T> {
        let t = &self.terms;
        let b = linalg::add(&t.p_vec, &t.a.matvec_t(y));
        let x = solve_ball_qp(&self.h, &b, &vec![T::zero(); b.len()], self.r_x)?;
        Ok(T::of(0.5) * self.h.quad(&x) + linalg::dot(&b, &x) - T::of(0.5) * t.q_mat.quad(y) - linalg::dot(&t.q_vec, y))
    }
}

impl<T: Scalar> ClosedFormInstance<T> for QuadraticSaddle<T> {
    fn name(&self) -> &'static str {
        "quadratic-saddle"
    }

    fn problem(&self) -> &SaddleProblem<T> {
        &self.problem
    }

    fn duality_gap(&self, x: &[T], y: &[T]) -> Result<T> {
        let tol = T::feas_tol(1e-9);
        if linalg::norm2(x) > self.r_x + tol || linalg::norm2(y) > self.r_y + tol {
            return Err(domain("quadratic gap needs feasible points"));
        }
        Ok((self.primal_value(x)? - self.dual_value(y)?).max(T::zero()))
    }

    fn saddle_point(&self) -> Option<(Vec<T>, Vec<T>)> {
        Some((self.x_star.clone(), self.y_star.clone()))
    }

    fn gap_upper_bound(&self) -> T {
        let t = &self.terms;
        let (rx, ry) = (self.r_x, self.r_y);
        let half = T::of(0.5);
        let sup_abs = half * self.h.spectral_norm() * rx * rx
            + linalg::norm2(&t.p_vec) * rx
            + t.a.spectral_norm() * rx * ry
            + half * t.q_mat.spectral_norm() * ry * ry
            + linalg::norm2(&t.q_vec) * ry;
        T::of(2.0) * sup_abs
    }
}
