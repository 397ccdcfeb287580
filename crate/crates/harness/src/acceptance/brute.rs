//! Slow reference minimizers of the prox objective, used to cross-check the
//! closed-form proxes.

use saddlekit::geometry::lp_norm;
use saddlekit::linalg::{self, DenseMatrix};

/// Entropy prox on the simplex by damped Newton in the first `n − 1`
/// coordinates; the Hessian `diag(1/uᵢ) + 11ᵀ/uₙ` is inverted by Sherman–Morrison.
pub fn entropy_simplex_newton(u_ref: &[f64], lin: &[f64], lambda: f64) -> Vec<f64> {
    let n = u_ref.len();
    let obj = |u: &[f64]| -> f64 {
        u.iter().zip(u_ref).zip(lin).map(|((&a, &r), &l)| l * a + a * (a / r).ln() / lambda).sum()
    };
    let mut u = u_ref.to_vec();
    for _ in 0..200 {
        let un = u[n - 1];
        let gn = lin[n - 1] + ((un / u_ref[n - 1]).ln() + 1.0) / lambda;
        let g: Vec<f64> = (0..n - 1).map(|i| lin[i] + ((u[i] / u_ref[i]).ln() + 1.0) / lambda - gn).collect();
        // H = (D + c 11ᵀ)/λ with D = diag(1/uᵢ), c = 1/uₙ
        let dinv_g: Vec<f64> = (0..n - 1).map(|i| u[i] * g[i]).collect();
        let s1: f64 = u[..n - 1].iter().sum();
        let s2: f64 = dinv_g.iter().sum();
        let c = 1.0 / un;
        let coef = c * s2 / (1.0 + c * s1);
        let dir: Vec<f64> = (0..n - 1).map(|i| -lambda * (dinv_g[i] - u[i] * coef)).collect();
        let decrement: f64 = -g.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
        if decrement < 1e-24 {
            break;
        }
        let f0 = obj(&u);
        let mut step = 1.0;
        loop {
            let mut cand = u.clone();
            for i in 0..n - 1 {
                cand[i] += step * dir[i];
            }
            cand[n - 1] = un - step * dir.iter().sum::<f64>();
            if cand.iter().all(|&v| v > 0.0) && obj(&cand) <= f0 - 0.25 * step * decrement {
                u = cand;
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                return u;
            }
        }
    }
    u
}

fn mat_fn(m: &DenseMatrix<f64>, f: impl Fn(f64) -> f64) -> DenseMatrix<f64> {
    let (vals, vecs) = linalg::sym_eig(m);
    linalg::eig_compose(&vals.iter().map(|&v| f(v)).collect::<Vec<_>>(), &vecs)
}

/// Accelerated projected gradient with backtracking and adaptive restart for
/// `min_{u ∈ C} F(u)`; `F` returns `None` outside its domain.
fn fista(
    x0: Vec<f64>,
    f: impl Fn(&[f64]) -> Option<f64>,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    proj: impl Fn(&[f64]) -> Vec<f64>,
    max_iter: usize,
) -> Vec<f64> {
    let mut x = x0.clone();
    let mut z = x0;
    let mut t = 1.0f64;
    let mut step = 1.0f64;
    let mut fx = f(&x).unwrap_or(f64::INFINITY);
    for _ in 0..max_iter {
        let Some(fz) = f(&z) else {
            z = x.clone();
            t = 1.0;
            continue;
        };
        let gz = grad(&z);
        let mut xn;
        loop {
            let cand: Vec<f64> = z.iter().zip(&gz).map(|(a, g)| a - step * g).collect();
            xn = proj(&cand);
            let d = linalg::sub(&xn, &z);
            let model = fz + linalg::dot(&gz, &d) + linalg::dot(&d, &d) / (2.0 * step);
            match f(&xn) {
                Some(v) if v <= model + 1e-15 * fz.abs().max(1.0) => break,
                _ => step *= 0.5,
            }
            if step < 1e-30 {
                return x;
            }
        }
        let fxn = f(&xn).unwrap();
        let moved = linalg::dist2(&xn, &x);
        if fxn > fx {
            // restart momentum
            z = x.clone();
            t = 1.0;
            continue;
        }
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = xn.iter().zip(&x).map(|(a, b)| a + (t - 1.0) / tn * (a - b)).collect();
        x = xn;
        fx = fxn;
        t = tn;
        step *= 1.5;
        if moved < 1e-15 {
            break;
        }
    }
    x
}

/// Orthonormal basis of symmetric `n × n` matrices under the Frobenius product.
fn sym_basis(n: usize) -> Vec<DenseMatrix<f64>> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            let mut e = DenseMatrix::zeros(n, n);
            if a == b {
                e.set(a, a, 1.0);
            } else {
                let v = std::f64::consts::FRAC_1_SQRT_2;
                e.set(a, b, v);
                e.set(b, a, v);
            }
            out.push(e);
        }
    }
    out
}

/// Matrix-entropy prox on the spectrahedron by damped Newton on the
/// stationarity system `L + (log U − log R)/λ = νI`, `tr U = 1`. The Hessian
/// uses the divided differences of `log` in the eigenbasis of `U`.
pub fn entropy_spectrahedron_newton(u_ref: &[f64], lin: &[f64], lambda: f64, n: usize) -> Vec<f64> {
    let u0 = DenseMatrix::from_vec(n, n, u_ref.to_vec()).symmetrized();
    let l = DenseMatrix::from_vec(n, n, lin.to_vec()).symmetrized();
    // continuation in the linear term: at scale 0 the answer is u_ref itself
    let mut u = u0.clone();
    let (mut s, mut ds) = (0.0_f64, 0.125_f64);
    while s < 1.0 && ds > 1e-9 {
        let next = (s + ds).min(1.0);
        match spectrahedron_newton_at(&u0, &DenseMatrix::zeros(n, n).add_scaled(&l, next), lambda, &u, 40) {
            Some((cand, res)) if res < 1e-10 => {
                u = cand;
                s = next;
                ds *= 2.0;
            }
            _ => ds *= 0.5,
        }
    }
    match spectrahedron_newton_at(&u0, &l, lambda, &u, 100) {
        Some((polished, _)) => polished.data,
        None => u.data,
    }
}

fn spectrahedron_newton_at(
    u_ref: &DenseMatrix<f64>,
    l: &DenseMatrix<f64>,
    lambda: f64,
    start: &DenseMatrix<f64>,
    max_iter: usize,
) -> Option<(DenseMatrix<f64>, f64)> {
    let n = l.rows;
    let log_r = mat_fn(u_ref, f64::ln);
    let basis = sym_basis(n);
    let dim = basis.len();
    let frob = |a: &DenseMatrix<f64>, b: &DenseMatrix<f64>| linalg::dot(&a.data, &b.data);
    // residual of stationarity with the best multiplier ν = tr G / n
    let residual = |u: &DenseMatrix<f64>| -> Option<(DenseMatrix<f64>, f64)> {
        let (vals, vecs) = linalg::sym_eig(u);
        if vals.iter().any(|&v| v <= 0.0) {
            return None;
        }
        let log_u = linalg::eig_compose(&vals.iter().map(|v| v.ln()).collect::<Vec<_>>(), &vecs);
        let mut g = l.add_scaled(&log_u.add_scaled(&log_r, -1.0), 1.0 / lambda);
        let nu = (0..n).map(|i| g.get(i, i)).sum::<f64>() / n as f64;
        for i in 0..n {
            g.set(i, i, g.get(i, i) - nu);
        }
        let r = linalg::norm2(&g.data);
        Some((g, r))
    };
    let mut u = start.clone();
    let (mut g, mut res) = residual(&u)?;
    for _ in 0..max_iter {
        if res < 1e-14 {
            break;
        }
        let (vals, vecs) = linalg::sym_eig(&u);
        let gamma = |i: usize, j: usize| {
            let (a, b) = (vals[i], vals[j]);
            if (a - b).abs() <= 1e-12 * a.max(b) {
                2.0 / (a + b)
            } else {
                (a.ln() - b.ln()) / (a - b)
            }
        };
        // D log(U)[E] = V (Γ ∘ VᵀEV) Vᵀ
        let dlog = |e: &DenseMatrix<f64>| {
            let mut m = vecs.transpose().matmul(e).matmul(&vecs);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, m.get(i, j) * gamma(i, j));
                }
            }
            vecs.matmul(&m).matmul(&vecs.transpose())
        };
        let images: Vec<DenseMatrix<f64>> = basis.iter().map(dlog).collect();
        let mut kkt = DenseMatrix::zeros(dim + 1, dim + 1);
        let mut rhs = vec![0.0; dim + 1];
        for k in 0..dim {
            for (m, img) in images.iter().enumerate() {
                kkt.set(k, m, frob(&basis[k], img) / lambda);
            }
            let tr: f64 = (0..n).map(|i| basis[k].get(i, i)).sum();
            kkt.set(k, dim, tr);
            kkt.set(dim, k, tr);
            rhs[k] = -frob(&basis[k], &g);
        }
        let Ok(sol) = linalg::lu_solve(&kkt, &rhs) else { break };
        let mut dir = DenseMatrix::zeros(n, n);
        for (k, e) in basis.iter().enumerate() {
            dir = dir.add_scaled(e, sol[k]);
        }
        let mut step = 1.0;
        loop {
            let cand = u.add_scaled(&dir, step);
            match residual(&cand) {
                Some((gc, rc)) if rc < res => {
                    u = cand;
                    g = gc;
                    res = rc;
                    break;
                }
                _ => step *= 0.5,
            }
            if step < 1e-12 {
                return Some((u, res));
            }
        }
    }
    Some((u, res))
}

fn half_pnorm_sq(u: &[f64], p: f64) -> f64 {
    0.5 * lp_norm(u, p).powi(2)
}

fn grad_half_pnorm_sq(u: &[f64], p: f64) -> Vec<f64> {
    let nrm = lp_norm(u, p);
    if nrm == 0.0 {
        return vec![0.0; u.len()];
    }
    u.iter().map(|&v| nrm.powf(2.0 - p) * v.abs().powf(p - 1.0) * v.signum()).collect()
}

/// `½‖·‖_p²` prox on the nonnegative orthant: accelerated projected gradient
/// to locate the support, then Newton on `∇h(u)_S = ξ_S` with
/// `ξ = ∇h(u_ref) − λ·lin`, adding or dropping coordinates until the KKT
/// conditions hold (`ξᵢ ≤ 0` off the support).
pub fn pnorm_orthant_newton(u_ref: &[f64], lin: &[f64], lambda: f64, p: f64) -> Vec<f64> {
    let n = u_ref.len();
    let gr = grad_half_pnorm_sq(u_ref, p);
    let xi: Vec<f64> = (0..n).map(|i| gr[i] - lambda * lin[i]).collect();
    let obj = |u: &[f64]| -> Option<f64> { Some(linalg::dot(lin, u) + (half_pnorm_sq(u, p) - linalg::dot(&gr, u)) / lambda) };
    let grad = |u: &[f64]| -> Vec<f64> {
        let g = grad_half_pnorm_sq(u, p);
        (0..n).map(|i| lin[i] + (g[i] - gr[i]) / lambda).collect()
    };
    let proj = |u: &[f64]| u.iter().map(|v| v.max(0.0)).collect::<Vec<_>>();
    let mut u = fista(u_ref.to_vec(), obj, grad, proj, 5_000);
    let mut support: Vec<bool> = u.iter().map(|&v| v > 0.0).collect();
    for _ in 0..2 * n + 2 {
        for i in 0..n {
            if support[i] && u[i] <= 0.0 {
                u[i] = 1e-3;
            }
            if !support[i] {
                u[i] = 0.0;
            }
        }
        newton_on_support(&mut u, &support, &xi, p);
        let mut changed = false;
        for i in 0..n {
            if !support[i] && xi[i] > 0.0 {
                support[i] = true;
                changed = true;
            }
            if support[i] && u[i] <= 1e-300 {
                support[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    u
}

fn newton_on_support(u: &mut [f64], support: &[bool], xi: &[f64], p: f64) {
    let idx: Vec<usize> = (0..u.len()).filter(|&i| support[i]).collect();
    if idx.is_empty() {
        return;
    }
    let res = |u: &[f64]| -> Vec<f64> {
        let g = grad_half_pnorm_sq(u, p);
        idx.iter().map(|&i| g[i] - xi[i]).collect()
    };
    let mut r = res(u);
    for _ in 0..200 {
        let rn = linalg::norm2(&r);
        if rn < 1e-15 {
            break;
        }
        // ∂ᵢ∂ⱼ ½N² = (2−p)N^{2−2p} uᵢ^{p−1} uⱼ^{p−1} + (p−1)N^{2−p} uᵢ^{p−2} δᵢⱼ
        let nrm = lp_norm(u, p);
        let k = idx.len();
        let mut hess = DenseMatrix::zeros(k, k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                let mut v = (2.0 - p) * nrm.powf(2.0 - 2.0 * p) * u[i].powf(p - 1.0) * u[j].powf(p - 1.0);
                if a == b {
                    v += (p - 1.0) * nrm.powf(2.0 - p) * u[i].powf(p - 2.0);
                }
                hess.set(a, b, v);
            }
        }
        let Ok(dir) = linalg::lu_solve(&hess, &r.iter().map(|v| -v).collect::<Vec<_>>()) else { return };
        let mut step = 1.0;
        loop {
            let mut cand = u.to_vec();
            for (a, &i) in idx.iter().enumerate() {
                cand[i] += step * dir[a];
            }
            if idx.iter().all(|&i| cand[i] > 0.0) {
                let rc = res(&cand);
                if linalg::norm2(&rc) < rn {
                    u.copy_from_slice(&cand);
                    r = rc;
                    break;
                }
            } else if step < 1e-6 {
                // a coordinate is heading to zero: park it there and let the KKT loop drop it
                for (a, &i) in idx.iter().enumerate() {
                    if u[i] + step * dir[a] <= 0.0 {
                        u[i] = 0.0;
                    }
                }
                return;
            }
            step *= 0.5;
            if step < 1e-14 {
                return;
            }
        }
    }
}

/// Euclidean simplex projection by bisection on the threshold `τ` in
/// `Σ max(ξᵢ − τ, 0) = 1`.
pub fn simplex_projection_bisection(xi: &[f64]) -> Vec<f64> {
    let mass = |tau: f64| xi.iter().map(|v| (v - tau).max(0.0)).sum::<f64>();
    let mut lo = xi.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    xi.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// Projection onto `A ∩ B(c, r)` by Dykstra's alternating projections.
pub fn dykstra(xi: &[f64], proj_a: impl Fn(&[f64]) -> Vec<f64>, center: &[f64], radius: f64) -> Vec<f64> {
    let proj_b = |u: &[f64]| {
        let d = linalg::dist2(u, center);
        if d <= radius {
            u.to_vec()
        } else {
            center.iter().zip(u).map(|(c, v)| c + radius / d * (v - c)).collect()
        }
    };
    let n = xi.len();
    let mut x = xi.to_vec();
    let (mut p, mut q) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..1_000_000 {
        let yv = proj_a(&linalg::add(&x, &p));
        p = linalg::sub(&linalg::add(&x, &p), &yv);
        let xn = proj_b(&linalg::add(&yv, &q));
        q = linalg::sub(&linalg::add(&yv, &q), &xn);
        // x can stall for a sweep while the increments still move
        let change = linalg::dist2(&xn, &x);
        let split = linalg::dist2(&xn, &yv);
        x = xn;
        if change < 1e-15 && split < 1e-13 {
            break;
        }
    }
    x
}
