//! Small dense linear algebra helpers on `Vec<T>` / `&[T]`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm1<T: Scalar>(a: &[T]) -> T {
    a.iter().map(|v| v.abs()).sum()
}

#[inline]
pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Scalar>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += a * x`
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ y`
    pub fn matvec_t(&self, y: &[T]) -> Vec<T> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != T::zero() {
                axpy(yi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, other: &Self, s: T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: add(&self.data, &scale(&other.data, s)) }
    }

    pub fn max_abs(&self) -> T {
        norm_inf(&self.data)
    }

    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        let t = self.transpose();
        let mut s = self.add_scaled(&t, T::one());
        for v in &mut s.data {
            *v *= T::of(0.5);
        }
        s
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        let ata = if self.cols <= self.rows { self.transpose().matmul(self) } else { self.matmul(&self.transpose()) };
        let (vals, _) = sym_eig(&ata);
        vals.iter().fold(T::zero(), |m, &v| m.max(v)).max(T::zero()).sqrt()
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quad(&self, x: &[T]) -> T {
        dot(x, &self.matvec(x))
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and a matrix whose columns are the eigenvectors.
pub fn sym_eig<T: Scalar>(a: &DenseMatrix<T>) -> (Vec<T>, DenseMatrix<T>) {
    let n = a.rows;
    assert_eq!(n, a.cols, "sym_eig needs a square matrix");
    let mut m = a.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let frob: T = m.data.iter().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::of(1e-12) * frob.max(T::min_positive_value());
    let eps_floor = T::epsilon() * frob;
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j) * m.get(i, j))
            .sum::<T>()
            .sqrt();
        if off <= tol || off <= eps_floor {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| m.get(i, i)).collect(), v)
}

/// `V diag(f(λ)) Vᵀ`
pub fn eig_compose<T: Scalar>(vals: &[T], vecs: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = vals.len();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: T = (0..n).map(|k| vecs.get(i, k) * vals[k] * vecs.get(j, k)).sum();
            out.set(i, j, s);
            out.set(j, i, s);
        }
    }
    out
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    let scale_ref = a.max_abs().max(T::min_positive_value());
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().partial_cmp(&m[j * n + col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if m[piv * n + col].abs() <= T::epsilon() * scale_ref {
            return Err(Error::Domain("singular linear system".into()));
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for col in (0..n).rev() {
        let s: T = ((col + 1)..n).map(|k| m[col * n + k] * x[k]).sum();
        x[col] = (x[col] - s) / m[col * n + col];
    }
    Ok(x)
}

/// Conjugate gradients for a symmetric positive definite operator.
pub fn cg<T: Scalar>(op: impl Fn(&[T]) -> Vec<T>, b: &[T], x0: &[T], tol: T, max_iter: usize) -> Result<Vec<T>> {
    let mut x = x0.to_vec();
    let ax = op(&x);
    let mut r = sub(b, &ax);
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let target = tol * tol;
    for _ in 0..max_iter {
        if rs <= target {
            return Ok(x);
        }
        let ap = op(&p);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return Err(Error::Convergence("cg: operator not positive definite".into()));
        }
        let a = rs / pap;
        axpy(a, &p, &mut x);
        axpy(-a, &ap, &mut r);
        let rs_new = dot(&r, &r);
        let b = rs_new / rs;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + b * *pi;
        }
        rs = rs_new;
    }
    if rs <= target * T::of(1e4) {
        Ok(x)
    } else {
        Err(Error::Convergence(format!("cg: residual {} after {max_iter} iterations", rs.sqrt())))
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut css = T::zero();
    let mut theta = T::zero();
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - T::one()) / T::of_usize(k + 1);
        if uk - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}
