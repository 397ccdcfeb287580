use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::oracles::NoiseLevels;
use crate::problems::Constants;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// expectation bound of the default schedule
    Expectation,
    /// expectation bound plus the `log(1/ς)` deviation terms
    HighProbability,
    /// rescaled subroutine, deterministic part
    RescaledDeterministic,
    /// rescaled subroutine, noise part
    RescaledVariance,
}

/// Per-constant contributions; each is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundTerms<T> {
    pub l: T,
    pub l_xx: T,
    pub l_yx: T,
    pub l_yy: T,
    pub noise_y: T,
    pub noise_x: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport<T> {
    pub kind: BoundKind,
    pub value: T,
    pub terms: BoundTerms<T>,
}

impl<T: Scalar> BoundTerms<T> {
    fn report(self, kind: BoundKind) -> BoundReport<T> {
        let value = self.l + self.l_xx + self.l_yx + self.l_yy + self.noise_y + self.noise_x;
        BoundReport { kind, value, terms: self }
    }
}

fn check_t(t: usize) -> Result<()> {
    if t < 3 {
        return Err(config(format!("horizon T = {t} must be at least 3")));
    }
    Ok(())
}

/// `0·∞ = 0` so that zero constants kill infinite diameters.
fn mul<T: Scalar>(a: T, b: T) -> T {
    if a == T::zero() || b == T::zero() {
        T::zero()
    } else {
        a * b
    }
}

/// `B_E(T) = 16LΩ_X/(T(T−1)) + 8(L_xx+L_yx)Ω_X/T + 128(L_yx+L_yy)Ω_Y/T
///   + 8σ_y/√T (1/ρ + 16ρΩ_Y) + 8σ_x/√T (1/ρ′ + ρ′Ω_X)`.
pub fn bound_expectation<T: Scalar>(
    c: &Constants<T>,
    noise: &NoiseLevels<T>,
    omega_x: T,
    omega_y: T,
    rho: T,
    rho_prime: T,
    t: usize,
) -> Result<BoundReport<T>> {
    check_t(t)?;
    let tt = T::of_usize(t);
    let st = tt.sqrt();
    let n = T::of;
    let terms = BoundTerms {
        l: mul(n(16.0) * c.l, omega_x) / (tt * (tt - T::one())),
        l_xx: mul(n(8.0) * c.l_xx, omega_x) / tt,
        l_yx: (mul(n(8.0) * c.l_yx, omega_x) + mul(n(128.0) * c.l_yx, omega_y)) / tt,
        l_yy: mul(n(128.0) * c.l_yy, omega_y) / tt,
        noise_y: mul(n(8.0) * noise.sigma_y_phi / st, rho.recip() + mul(n(16.0) * rho, omega_y)),
        noise_x: mul(n(8.0) * noise.sigma_x() / st, rho_prime.recip() + mul(rho_prime, omega_x)),
    };
    Ok(terms.report(BoundKind::Expectation))
}

/// `B_E(T)` plus `8σ/√T (log(1/ς)/ρ + √log(1/ς) D)` for each side; holds with probability `1 − 6ς`.
#[allow(clippy::too_many_arguments)]
pub fn bound_high_probability<T: Scalar>(
    c: &Constants<T>,
    noise: &NoiseLevels<T>,
    omega_x: T,
    omega_y: T,
    d_x: T,
    d_y: T,
    rho: T,
    rho_prime: T,
    varsigma: T,
    t: usize,
) -> Result<BoundReport<T>> {
    if !(varsigma > T::zero() && varsigma <= T::one() / T::of(6.0)) {
        return Err(config(format!("ς = {varsigma} must lie in (0, 1/6]")));
    }
    let mut b = bound_expectation(c, noise, omega_x, omega_y, rho, rho_prime, t)?;
    let lg = varsigma.recip().ln();
    let st = T::of_usize(t).sqrt();
    b.terms.noise_y += mul(T::of(8.0) * noise.sigma_y_phi / st, lg / rho + mul(lg.sqrt(), d_y));
    b.terms.noise_x += mul(T::of(8.0) * noise.sigma_x() / st, lg / rho_prime + mul(lg.sqrt(), d_x));
    Ok(b.terms.report(BoundKind::HighProbability))
}

/// `B^det_R(T) = 16LR²Ω′/(T(T−1)) + 8L_xxR²Ω′/(T−1) + 64L_yxR√(Ω′Ω_Y)/(T−1) + 128L_yyΩ_Y/T`.
pub fn bound_rescaled_det<T: Scalar>(c: &Constants<T>, omega_prime: T, omega_y: T, r: T, t: usize) -> Result<BoundReport<T>> {
    check_t(t)?;
    let tt = T::of_usize(t);
    let t1 = tt - T::one();
    let r2 = r * r;
    let n = T::of;
    let terms = BoundTerms {
        l: n(16.0) * c.l * r2 * omega_prime / (tt * t1),
        l_xx: n(8.0) * c.l_xx * r2 * omega_prime / t1,
        l_yx: mul(n(64.0) * c.l_yx * r, (omega_prime * omega_y).sqrt()) / t1,
        l_yy: mul(n(128.0) * c.l_yy, omega_y) / tt,
        ..Default::default()
    };
    Ok(terms.report(BoundKind::RescaledDeterministic))
}

/// `B^var_R(T) = 4σ_xR/√T {4√((1+log)Ω′) + 2√log} + 4σ_y/√T {8√(2(1+log)Ω_Y) + 2√(log Ω_Y)}`, `log = log(1/ς)`.
pub fn bound_rescaled_var<T: Scalar>(
    noise: &NoiseLevels<T>,
    omega_prime: T,
    omega_y: T,
    r: T,
    varsigma: T,
    t: usize,
) -> Result<BoundReport<T>> {
    check_t(t)?;
    let st = T::of_usize(t).sqrt();
    let lg = varsigma.recip().ln();
    let n = T::of;
    let one = T::one();
    let terms = BoundTerms {
        noise_x: mul(n(4.0) * noise.sigma_x() * r / st, n(4.0) * ((one + lg) * omega_prime).sqrt() + n(2.0) * lg.sqrt()),
        noise_y: mul(
            n(4.0) * noise.sigma_y_phi / st,
            n(8.0) * (n(2.0) * (one + lg) * omega_y).sqrt() + n(2.0) * (lg * omega_y).sqrt(),
        ),
        ..Default::default()
    };
    Ok(terms.report(BoundKind::RescaledVariance))
}

fn ceil_usize<T: Scalar>(v: T) -> Result<usize> {
    let f = v.to_f64_lossy().ceil();
    if !f.is_finite() || f > 1e15 {
        return Err(config(format!("iteration count {v} is not representable")));
    }
    Ok(f.max(0.0) as usize)
}

/// Horizon of the deterministic rescaled subroutine:
/// `⌈max{3, 64√(LΩ′/μ), 1024L_xxΩ′/μ, 4096L_yx√(Ω′Ω_Y)/(μR), 8192L_yyΩ_Y/(μR²)}⌉`.
pub fn horizon_rescaled_det<T: Scalar>(c: &Constants<T>, omega_prime: T, omega_y: T, r: T) -> Result<usize> {
    if !(c.mu > T::zero()) {
        return Err(config("rescaled horizon needs μ > 0"));
    }
    let n = T::of;
    let mu = c.mu;
    let cands = [
        n(3.0),
        n(64.0) * (c.l / mu * omega_prime).sqrt(),
        n(1024.0) * c.l_xx / mu * omega_prime,
        mul(n(4096.0) * c.l_yx / (mu * r), (omega_prime * omega_y).sqrt()),
        mul(n(8192.0) * c.l_yy / (mu * r * r), omega_y),
    ];
    ceil_usize(cands.iter().fold(T::zero(), |a, &b| a.max(b)))
}

/// Horizon of the stochastic rescaled subroutine with failure budget `ς`.
pub fn horizon_rescaled_stoc<T: Scalar>(
    c: &Constants<T>,
    noise: &NoiseLevels<T>,
    omega_prime: T,
    omega_y: T,
    r: T,
    varsigma: T,
) -> Result<usize> {
    if !(c.mu > T::zero()) {
        return Err(config("rescaled horizon needs μ > 0"));
    }
    let n = T::of;
    let mu = c.mu;
    let one = T::one();
    let lg = varsigma.recip().ln();
    let k512 = n(512.0 * 512.0);
    let sx = noise.sigma_x();
    let sy = noise.sigma_y_phi;
    let xfac = n(4.0) * ((one + lg) * omega_prime).sqrt() + n(2.0) * lg.sqrt();
    let yfac = n(8.0) * (n(2.0) * (one + lg) * omega_y).sqrt() + n(2.0) * (lg * omega_y).sqrt();
    let cands = [
        n(3.0),
        n(64.0) * (c.l / mu * omega_prime).sqrt(),
        n(2048.0) * c.l_xx / mu * omega_prime,
        mul(n(4096.0) * c.l_yx / (mu * r), (omega_prime * omega_y).sqrt()),
        mul(n(128.0 * 128.0) * c.l_yy / (mu * r * r), omega_y),
        mul(k512 * sx * sx / (mu * r).powi(2), xfac * xfac),
        mul(k512 * sy * sy / (mu * r * r).powi(2), yfac * yfac),
    ];
    ceil_usize(cands.iter().fold(T::zero(), |a, &b| a.max(b)))
}

/// `K = ⌈max{0, log₂(μU²/(4ε))}⌉ + 1`; rejects `ε > μU²/4`.
pub fn restart_stage_count<T: Scalar>(mu: T, u: T, epsilon: T) -> Result<usize> {
    if !(mu > T::zero() && u > T::zero() && epsilon > T::zero()) {
        return Err(config("restart needs μ, U, ε > 0"));
    }
    let ratio = mu * u * u / (T::of(4.0) * epsilon);
    if ratio < T::one() {
        return Err(config(format!("ε = {epsilon} exceeds μU²/4 = {}", mu * u * u / T::of(4.0))));
    }
    Ok(ceil_usize(ratio.log2().max(T::zero()))? + 1)
}

/// `R_k = 2^{(3−k)/2} U`, `k ≥ 1`.
pub fn restart_radius<T: Scalar>(u: T, k: usize) -> T {
    T::of(2.0).powf((T::of(3.0) - T::of_usize(k)) / T::of(2.0)) * u
}

/// Total-iteration bound of the deterministic restart scheme.
pub fn complexity_det<T: Scalar>(c: &Constants<T>, omega_prime: T, omega_y: T, u: T, epsilon: T) -> Result<T> {
    let k = restart_stage_count(c.mu, u, epsilon)?;
    let n = T::of;
    let mu = c.mu;
    let stages = T::of_usize(k);
    Ok((n(3.0) + n(64.0) * (c.l / mu * omega_prime).sqrt() + n(1024.0) * c.l_xx / mu * omega_prime) * stages
        + mul(n(8192.0) * c.l_yx / (mu * epsilon).sqrt(), (omega_prime * omega_y).sqrt())
        + mul(n(2048.0) * c.l_yy / epsilon, omega_y))
}

/// Total-iteration bound of the stochastic restart scheme.
pub fn complexity_stoc<T: Scalar>(
    c: &Constants<T>,
    noise: &NoiseLevels<T>,
    omega_prime: T,
    omega_y: T,
    u: T,
    epsilon: T,
    nu: T,
) -> Result<T> {
    if !(nu > T::zero() && nu <= T::one()) {
        return Err(config(format!("ν = {nu} must lie in (0, 1]")));
    }
    let k = restart_stage_count(c.mu, u, epsilon)?;
    let n = T::of;
    let mu = c.mu;
    let one = T::one();
    let stages = T::of_usize(k);
    let ratio = mu * u * u / (n(4.0) * epsilon);
    let lg = (n(6.0) * (ratio.log2() + n(2.0)) / nu).ln();
    let m = n(1024.0 * 1024.0);
    let sx = noise.sigma_x();
    let sy = noise.sigma_y_phi;
    Ok((n(3.0) + n(64.0) * (c.l / mu * omega_prime).sqrt() + n(2048.0) * c.l_xx / mu * omega_prime) * stages
        + mul(n(65536.0) * c.l_yx / (mu * epsilon).sqrt(), (omega_prime * omega_y).sqrt())
        + mul(n(4096.0) * c.l_yy / epsilon, omega_y)
        + mul(m * sx * sx / (epsilon * mu), (n(4.0) * omega_prime + one) * lg + n(4.0) * omega_prime)
        + mul(m * sy * sy / (epsilon * epsilon), (one + lg) * omega_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn restart_plan_values() {
        assert_eq!(restart_stage_count(1.0, 2.0, 0.25).unwrap(), 3);
        let r: Vec<f64> = (1..=3).map(|k| restart_radius(2.0, k)).collect();
        assert_relative_eq!(r[0], 4.0, epsilon = 1e-14);
        assert_relative_eq!(r[1], 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r[2], 2.0, epsilon = 1e-14);
        assert!(restart_stage_count(1.0, 2.0, 1.5).is_err());
    }
}
