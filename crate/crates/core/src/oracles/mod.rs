//! Stochastic first-order oracles: exact, additive sub-Gaussian noise, and finite-sum minibatch.

use std::sync::Arc;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::geometry::{GeometrySpec, NormKind, SetKind};
use crate::linalg;
use crate::problems::{SaddleProblem, SmoothTerms};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GradKind {
    GradF,
    GradXPhi,
    GradYPhi,
}

impl GradKind {
    pub const ALL: [GradKind; 3] = [GradKind::GradF, GradKind::GradXPhi, GradKind::GradYPhi];

    fn stream(self) -> usize {
        match self {
            GradKind::GradF => 0,
            GradKind::GradXPhi => 1,
            GradKind::GradYPhi => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseKind<T> {
    Deterministic,
    AdditiveSubGaussian { sigma_x_f: T, sigma_x_phi: T, sigma_y_phi: T },
    /// Uniform index batch without replacement; `σ`s are the user's variance proxies.
    FiniteSumMinibatch { batch_size: usize, sigma_x_f: T, sigma_x_phi: T, sigma_y_phi: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub kind: NoiseKind<T>,
    pub rng_seed: u64,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn deterministic() -> Self {
        Self { kind: NoiseKind::Deterministic, rng_seed: 0 }
    }

    pub fn sub_gaussian(sigma_x_f: T, sigma_x_phi: T, sigma_y_phi: T, seed: u64) -> Self {
        Self { kind: NoiseKind::AdditiveSubGaussian { sigma_x_f, sigma_x_phi, sigma_y_phi }, rng_seed: seed }
    }

    pub fn levels(&self) -> NoiseLevels<T> {
        match self.kind {
            NoiseKind::Deterministic => NoiseLevels::zero(),
            NoiseKind::AdditiveSubGaussian { sigma_x_f, sigma_x_phi, sigma_y_phi }
            | NoiseKind::FiniteSumMinibatch { sigma_x_f, sigma_x_phi, sigma_y_phi, .. } => NoiseLevels { sigma_x_f, sigma_x_phi, sigma_y_phi },
        }
    }

    pub fn sigma(&self, which: GradKind) -> T {
        let l = self.levels();
        match which {
            GradKind::GradF => l.sigma_x_f,
            GradKind::GradXPhi => l.sigma_x_phi,
            GradKind::GradYPhi => l.sigma_y_phi,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.kind, NoiseKind::Deterministic)
    }
}

/// Variance proxies of the three noise streams.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseLevels<T> {
    pub sigma_x_f: T,
    pub sigma_x_phi: T,
    pub sigma_y_phi: T,
}

impl<T: Scalar> NoiseLevels<T> {
    pub fn zero() -> Self {
        Self { sigma_x_f: T::zero(), sigma_x_phi: T::zero(), sigma_y_phi: T::zero() }
    }

    /// `σ_{x,f} + σ_{x,Φ}`
    pub fn sigma_x(&self) -> T {
        self.sigma_x_f + self.sigma_x_phi
    }
}

/// One oracle answer `ĝ` with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample<T> {
    pub value: Vec<T>,
    /// `δ = ĝ − ∇`, kept in diagnostic mode only
    pub noise: Option<Vec<T>>,
    pub which: GradKind,
    pub call_index: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleStats {
    pub calls_f: u64,
    pub calls_x_phi: u64,
    pub calls_y_phi: u64,
    /// running sums of `‖δ‖_*²` per stream (f, xΦ, yΦ), where the noise is known
    pub noise_sq_sum: [f64; 3],
    pub noise_count: [u64; 3],
}

impl OracleStats {
    pub fn calls(&self, which: GradKind) -> u64 {
        match which {
            GradKind::GradF => self.calls_f,
            GradKind::GradXPhi => self.calls_x_phi,
            GradKind::GradYPhi => self.calls_y_phi,
        }
    }

    pub fn total(&self) -> u64 {
        self.calls_f + self.calls_x_phi + self.calls_y_phi
    }

    /// Empirical `E‖δ‖_*²` of a stream.
    pub fn second_moment(&self, which: GradKind) -> Option<f64> {
        let i = which.stream();
        (self.noise_count[i] > 0).then(|| self.noise_sq_sum[i] / self.noise_count[i] as f64)
    }

    pub fn merge(&mut self, other: &OracleStats) {
        self.calls_f += other.calls_f;
        self.calls_x_phi += other.calls_x_phi;
        self.calls_y_phi += other.calls_y_phi;
        for i in 0..3 {
            self.noise_sq_sum[i] += other.noise_sq_sum[i];
            self.noise_count[i] += other.noise_count[i];
        }
    }
}

/// Single-owner oracle state: counters and one RNG substream per gradient kind.
#[derive(Debug, Clone)]
pub struct OracleHandle<T: Scalar> {
    terms: Arc<dyn SmoothTerms<T>>,
    geom_x: GeometrySpec<T>,
    geom_y: GeometrySpec<T>,
    model: NoiseModel<T>,
    rngs: [ChaCha8Rng; 3],
    stats: OracleStats,
    diagnostic: bool,
    check_feasibility: bool,
}

impl<T: Scalar> OracleHandle<T> {
    pub fn new(problem: &SaddleProblem<T>, model: NoiseModel<T>) -> Result<Self> {
        let l = model.levels();
        if [l.sigma_x_f, l.sigma_x_phi, l.sigma_y_phi].iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
            return Err(config("noise levels must be finite and nonnegative"));
        }
        if let NoiseKind::FiniteSumMinibatch { batch_size, .. } = model.kind {
            let n = problem.terms.n_components();
            if batch_size == 0 || batch_size > n {
                return Err(config(format!("batch size {batch_size} must lie in 1..={n}")));
            }
        }
        let mk = |stream: u64| {
            let mut r = ChaCha8Rng::seed_from_u64(model.rng_seed);
            r.set_stream(stream);
            r
        };
        Ok(Self {
            terms: problem.terms.clone(),
            geom_x: problem.geom_x.clone(),
            geom_y: problem.geom_y.clone(),
            model,
            rngs: [mk(0), mk(1), mk(2)],
            stats: OracleStats::default(),
            diagnostic: false,
            check_feasibility: true,
        })
    }

    /// Keeps the noise vectors in each sample.
    pub fn with_diagnostics(mut self, on: bool) -> Self {
        self.diagnostic = on;
        self
    }

    pub fn diagnostic(&self) -> bool {
        self.diagnostic
    }

    pub fn model(&self) -> &NoiseModel<T> {
        &self.model
    }

    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }

    pub fn sample(&mut self, which: GradKind, x: &[T], y: &[T]) -> Result<GradientSample<T>> {
        if self.check_feasibility {
            self.check_input(x, y)?;
        }
        let stream = which.stream();
        let call_index = match which {
            GradKind::GradF => {
                self.stats.calls_f += 1;
                self.stats.calls_f
            }
            GradKind::GradXPhi => {
                self.stats.calls_x_phi += 1;
                self.stats.calls_x_phi
            }
            GradKind::GradYPhi => {
                self.stats.calls_y_phi += 1;
                self.stats.calls_y_phi
            }
        };
        let norm = if which == GradKind::GradYPhi { self.geom_y.norm } else { self.geom_x.norm };
        let (value, noise) = match self.model.kind {
            NoiseKind::Deterministic => {
                let v = self.terms.gradient(which, x, y);
                let noise = self.diagnostic.then(|| vec![T::zero(); v.len()]);
                (v, noise)
            }
            NoiseKind::AdditiveSubGaussian { .. } => {
                let mut v = self.terms.gradient(which, x, y);
                let sigma = self.model.sigma(which);
                let d = draw_sub_gaussian(&mut self.rngs[stream], &norm, v.len(), sigma);
                let dn = norm.dual_norm(&d).to_f64_lossy();
                self.stats.noise_sq_sum[stream] += dn * dn;
                self.stats.noise_count[stream] += 1;
                for (vi, di) in v.iter_mut().zip(&d) {
                    *vi += *di;
                }
                (v, self.diagnostic.then_some(d))
            }
            NoiseKind::FiniteSumMinibatch { batch_size, .. } => {
                let n = self.terms.n_components();
                let idx = index::sample(&mut self.rngs[stream], n, batch_size);
                let mut acc: Option<Vec<T>> = None;
                for i in idx.iter() {
                    let gi = self.terms.component_gradient(which, i, x, y);
                    match acc.as_mut() {
                        Some(a) => linalg::axpy(T::one(), &gi, a),
                        None => acc = Some(gi),
                    }
                }
                let v = linalg::scale(&acc.unwrap_or_default(), T::one() / T::of_usize(batch_size));
                let noise = if self.diagnostic {
                    let d = linalg::sub(&v, &self.terms.gradient(which, x, y));
                    let dn = norm.dual_norm(&d).to_f64_lossy();
                    self.stats.noise_sq_sum[stream] += dn * dn;
                    self.stats.noise_count[stream] += 1;
                    Some(d)
                } else {
                    None
                };
                (v, noise)
            }
        };
        Ok(GradientSample { value, noise, which, call_index })
    }

    fn check_input(&self, x: &[T], y: &[T]) -> Result<()> {
        let ok = |s: &SetKind<T>, u: &[T]| -> bool {
            match s {
                // the eigen test is too costly per call; symmetry and finiteness suffice here
                SetKind::Spectrahedron(n) => u.len() == n * n && u.iter().all(|v| v.is_finite()),
                other => other.contains(u, T::feas_tol(1e-8)),
            }
        };
        if !ok(&self.geom_x.feasible_set, x) || !ok(&self.geom_y.feasible_set, y) {
            return Err(domain("oracle queried at an infeasible point"));
        }
        Ok(())
    }
}

/// Effective number of independent Gaussian coordinates behind a noise vector.
fn gaussian_dof<T: Scalar>(norm: &NormKind<T>, len: usize) -> usize {
    match norm {
        NormKind::SymmetricNuclear => {
            let n = (len as f64).sqrt().round() as usize;
            n * (n + 1) / 2
        }
        _ => len,
    }
}

/// Centred Gaussian with per-coordinate scale `σ/√(2·max(k, 2))`, redrawn until
/// `‖δ‖_* ≤ 3σ`. Symmetric truncation keeps the mean exactly zero and
/// `E exp(‖δ‖_*²/σ²) ≤ e`.
pub fn draw_sub_gaussian<T: Scalar>(rng: &mut ChaCha8Rng, norm: &NormKind<T>, len: usize, sigma: T) -> Vec<T> {
    if sigma == T::zero() {
        return vec![T::zero(); len];
    }
    let k = gaussian_dof(norm, len).max(2);
    let s = sigma.to_f64_lossy() / (2.0 * k as f64).sqrt();
    let cap = T::of(3.0) * sigma;
    loop {
        let d: Vec<T> = match norm {
            NormKind::SymmetricNuclear => {
                let n = (len as f64).sqrt().round() as usize;
                let g: Vec<f64> = (0..len).map(|_| s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)).collect();
                let mut out = vec![T::zero(); len];
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = T::of(0.5 * (g[i * n + j] + g[j * n + i]));
                    }
                }
                out
            }
            _ => (0..len).map(|_| T::of(s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))).collect(),
        };
        if norm.dual_norm(&d) <= cap {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{MatrixGame, MatrixGameGeometry, ClosedFormInstance};

    #[test]
    fn deterministic_noise_is_zero() {
        let g = MatrixGame::<f64>::matching_pennies(MatrixGameGeometry::Euclidean);
        let mut o = OracleHandle::new(g.problem(), NoiseModel::deterministic()).unwrap().with_diagnostics(true);
        let s = o.sample(GradKind::GradYPhi, &[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(s.value, vec![1.0, -1.0]);
        assert_eq!(s.noise, Some(vec![0.0, 0.0]));
        assert_eq!(o.stats().calls_y_phi, 1);
        assert!(o.sample(GradKind::GradF, &[2.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn seeded_streams_repeat() {
        let g = MatrixGame::<f64>::matching_pennies(MatrixGameGeometry::Euclidean);
        let m = NoiseModel::sub_gaussian(0.3, 0.3, 0.3, 99);
        let mut a = OracleHandle::new(g.problem(), m).unwrap();
        let mut b = OracleHandle::new(g.problem(), m).unwrap();
        for _ in 0..50 {
            for k in GradKind::ALL {
                let sa = a.sample(k, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
                let sb = b.sample(k, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
                assert_eq!(sa.value, sb.value);
            }
        }
    }
}
