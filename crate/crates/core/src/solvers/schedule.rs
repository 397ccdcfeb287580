use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::oracles::NoiseLevels;
use crate::problems::Constants;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleKind {
    Convex,
    RescaledDeterministic,
    RescaledStochastic,
    Custom,
}

pub type Sequence<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;

#[derive(Clone)]
enum Family<T> {
    /// `α_t`, `τ_t` growing with the noise levels
    Growing { l: T, l_xx: T, l_yx: T, l_yy: T, sigma_x: T, sigma_y: T },
    /// constant `α`, `τ_t = tτ`
    Rescaled { alpha: T, tau: T },
    Custom { theta: Sequence<T>, beta: Sequence<T>, alpha: Sequence<T>, tau: Sequence<T>, gamma: Sequence<T> },
}

/// The sequences `θ_t, β_t, α_t, τ_t, γ_t` plus the constants they were built from.
///
/// Index 0 returns the analysis-only values `θ_0 = 0, β_0 = 2, α_0 = τ_0 = 1, γ_0 = 0`.
#[derive(Clone)]
pub struct ScheduleParams<T> {
    family: Family<T>,
    pub rho: T,
    pub rho_prime: T,
    pub eta: T,
    pub kind: ScheduleKind,
    /// iteration budget the constants were tuned for (rescaled schedules)
    pub horizon: Option<usize>,
}

impl<T: Scalar> fmt::Debug for ScheduleParams<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScheduleParams")
            .field("kind", &self.kind)
            .field("rho", &self.rho)
            .field("rho_prime", &self.rho_prime)
            .field("eta", &self.eta)
            .field("horizon", &self.horizon)
            .field("alpha_1", &self.alpha(1))
            .field("tau_1", &self.tau(1))
            .finish()
    }
}

/// Default `ρ = 1/(4√Ω_Y)` and `ρ′ = 1/√Ω_X`, or 1 for an infinite diameter.
pub fn default_rhos<T: Scalar>(omega_x: T, omega_y: T) -> (T, T) {
    let pick = |om: T, c: T| if om.is_finite() && om > T::zero() { T::one() / (c * om.sqrt()) } else { T::one() };
    (pick(omega_y, T::of(4.0)), pick(omega_x, T::one()))
}

/// `η = (4/R)√(Ω_Y/Ω′)`
pub fn rescaled_eta<T: Scalar>(omega_prime: T, omega_y: T, r: T) -> T {
    T::of(4.0) / r * (omega_y / omega_prime).sqrt()
}

impl<T: Scalar> ScheduleParams<T> {
    /// `θ_t = (t−1)/t`, `β_t = 2/(t+1)`, `α_t = 1/(16(L_yx + L_yy + ρσ_y√t))`,
    /// `τ_t = t/(2(2L + (L_xx+L_yx)t + ρ′σ_x t^{3/2}))`.
    pub fn convex_default(c: &Constants<T>, noise: &NoiseLevels<T>, rho: T, rho_prime: T) -> Result<Self> {
        if !(rho > T::zero() && rho_prime > T::zero()) {
            return Err(config("ρ and ρ′ must be positive"));
        }
        let fam = Family::Growing {
            l: c.l,
            l_xx: c.l_xx,
            l_yx: c.l_yx,
            l_yy: c.l_yy,
            sigma_x: noise.sigma_x(),
            sigma_y: noise.sigma_y_phi,
        };
        let s = Self { family: fam, rho, rho_prime, eta: T::one(), kind: ScheduleKind::Convex, horizon: None };
        s.check_finite(1)?;
        Ok(s)
    }

    /// Deterministic rescaled schedule for a horizon `T` and radius `R`.
    pub fn rescaled_det(c: &Constants<T>, omega_prime: T, omega_y: T, r: T, horizon: usize) -> Result<Self> {
        let eta = rescaled_eta(omega_prime, omega_y, r);
        let sixteen = T::of(16.0);
        let alpha = T::one() / (sixteen * (c.l_yx / eta + c.l_yy));
        let tau = T::one() / (T::of(4.0) * c.l + T::of(2.0) * (c.l_xx + eta * c.l_yx) * T::of_usize(horizon));
        let s = Self {
            family: Family::Rescaled { alpha, tau },
            rho: T::one(),
            rho_prime: T::one(),
            eta,
            kind: ScheduleKind::RescaledDeterministic,
            horizon: Some(horizon),
        };
        s.check_finite(horizon)?;
        Ok(s)
    }

    /// Stochastic rescaled schedule with failure budget `ς`.
    pub fn rescaled_stoc(
        c: &Constants<T>,
        noise: &NoiseLevels<T>,
        omega_prime: T,
        omega_y: T,
        r: T,
        varsigma: T,
        horizon: usize,
    ) -> Result<Self> {
        if !(varsigma > T::zero() && varsigma < T::one()) {
            return Err(config(format!("ς = {varsigma} must lie in (0, 1)")));
        }
        let eta = rescaled_eta(omega_prime, omega_y, r);
        let lg = (T::one() / varsigma).ln();
        let rho = (T::of(4.0) * r).recip() * ((T::one() + lg) / (T::of(2.0) * omega_prime * omega_y)).sqrt();
        let rho_prime = (T::of(8.0) * r).recip() * ((T::one() + lg) / (omega_prime * omega_y)).sqrt();
        let tt = T::of_usize(horizon);
        let alpha = T::one() / (T::of(16.0) * (c.l_yx / eta + c.l_yy + rho * noise.sigma_y_phi * tt.sqrt()));
        let tau = T::one()
            / (T::of(4.0) * c.l + T::of(2.0) * (c.l_xx + eta * c.l_yx) * tt + rho_prime * noise.sigma_x() * tt * tt.sqrt());
        let s = Self {
            family: Family::Rescaled { alpha, tau },
            rho,
            rho_prime,
            eta,
            kind: ScheduleKind::RescaledStochastic,
            horizon: Some(horizon),
        };
        s.check_finite(horizon)?;
        Ok(s)
    }

    pub fn custom(theta: Sequence<T>, beta: Sequence<T>, alpha: Sequence<T>, tau: Sequence<T>, gamma: Sequence<T>) -> Self {
        Self {
            family: Family::Custom { theta, beta, alpha, tau, gamma },
            rho: T::one(),
            rho_prime: T::one(),
            eta: T::one(),
            kind: ScheduleKind::Custom,
            horizon: None,
        }
    }

    fn check_finite(&self, t: usize) -> Result<()> {
        let (a, tau) = (self.alpha(t), self.tau(t));
        if !(a > T::zero() && a.is_finite() && tau > T::zero() && tau.is_finite()) {
            return Err(config(format!("degenerate step sizes α = {a}, τ = {tau}; all coupling constants zero?")));
        }
        Ok(())
    }

    pub fn theta(&self, t: usize) -> T {
        match &self.family {
            Family::Custom { theta, .. } => theta(t),
            _ if t == 0 => T::zero(),
            _ => T::of_usize(t - 1) / T::of_usize(t),
        }
    }

    pub fn beta(&self, t: usize) -> T {
        match &self.family {
            Family::Custom { beta, .. } => beta(t),
            _ => T::of(2.0) / T::of_usize(t + 1),
        }
    }

    pub fn alpha(&self, t: usize) -> T {
        if t == 0 && !matches!(self.family, Family::Custom { .. }) {
            return T::one();
        }
        match &self.family {
            Family::Growing { l_yx, l_yy, sigma_y, .. } => {
                T::one() / (T::of(16.0) * (*l_yx + *l_yy + self.rho * *sigma_y * T::of_usize(t).sqrt()))
            }
            Family::Rescaled { alpha, .. } => *alpha,
            Family::Custom { alpha, .. } => alpha(t),
        }
    }

    pub fn tau(&self, t: usize) -> T {
        if t == 0 && !matches!(self.family, Family::Custom { .. }) {
            return T::one();
        }
        match &self.family {
            Family::Growing { l, l_xx, l_yx, sigma_x, .. } => {
                let tt = T::of_usize(t);
                tt / (T::of(2.0) * (T::of(2.0) * *l + (*l_xx + *l_yx) * tt + self.rho_prime * *sigma_x * tt * tt.sqrt()))
            }
            Family::Rescaled { tau, .. } => T::of_usize(t) * *tau,
            Family::Custom { tau, .. } => tau(t),
        }
    }

    pub fn gamma(&self, t: usize) -> T {
        match &self.family {
            Family::Custom { gamma, .. } => gamma(t),
            _ => T::of_usize(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleCondition {
    /// `0 ≤ θ_t ≤ 1`, `θ_{t−1} ≤ θ_t`
    ThetaMonotone,
    /// `α_t θ_t ≤ α_{t−1}`
    AlphaTheta,
    /// `γ_t θ_t = γ_{t−1}`
    GammaTheta,
    /// `γ_{t−1}/β_{t−1} = γ_t (1/β_t − 1)`
    GammaBeta,
    /// `γ_{t−1}/τ_{t−1} ≤ γ_t/τ_t`
    GammaTau,
    /// `α_t ≤ 1/(2L_yy)`
    AlphaLyy,
    /// `Lβ_t + L_xx − 1/(2τ_t) + 4α_t L_yx² ≤ 0`
    PrimalCoupling,
    /// `(1+θ_t)L_yy − 1/(8α_t) ≤ 0`
    DualCoupling,
}

impl ScheduleCondition {
    pub fn id(self) -> usize {
        self as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: usize,
    pub condition: ScheduleCondition,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConditionReport {
    pub checked_up_to: usize,
    /// first violation of each failing condition, ordered by `(t, id)`
    pub violations: Vec<Violation>,
    pub violation_count: usize,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Checks the eight step-size conditions for `t = 1..=t_max`, using the
/// analysis values at `t = 0`.
pub fn verify_schedule<T: Scalar>(sched: &ScheduleParams<T>, c: &Constants<T>, t_max: usize) -> ConditionReport {
    let rel = 1e-12;
    let mut rep = ConditionReport { checked_up_to: t_max, ..Default::default() };
    let mut seen = [false; 8];
    let f = |v: T| v.to_f64_lossy();
    let (l, lxx, lyx, lyy) = (f(c.l), f(c.l_xx), f(c.l_yx), f(c.l_yy));
    let mut prev = (f(sched.theta(0)), f(sched.beta(0)), f(sched.alpha(0)), f(sched.tau(0)), f(sched.gamma(0)));
    for t in 1..=t_max {
        let (th, be, al, ta, ga) = (f(sched.theta(t)), f(sched.beta(t)), f(sched.alpha(t)), f(sched.tau(t)), f(sched.gamma(t)));
        let (th0, be0, al0, ta0, ga0) = prev;
        let le = |a: f64, b: f64| a <= b + rel * a.abs().max(b.abs());
        let eq = |a: f64, b: f64| (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0);
        let checks: [(ScheduleCondition, bool, f64, f64); 8] = [
            (ScheduleCondition::ThetaMonotone, (0.0..=1.0).contains(&th) && le(th0, th), th0, th),
            (ScheduleCondition::AlphaTheta, le(al * th, al0), al * th, al0),
            (ScheduleCondition::GammaTheta, eq(ga * th, ga0), ga * th, ga0),
            (ScheduleCondition::GammaBeta, eq(ga0 / be0, ga * (1.0 / be - 1.0)), ga0 / be0, ga * (1.0 / be - 1.0)),
            (ScheduleCondition::GammaTau, le(ga0 / ta0, ga / ta), ga0 / ta0, ga / ta),
            (ScheduleCondition::AlphaLyy, lyy == 0.0 || le(al, 0.5 / lyy), al, if lyy == 0.0 { f64::INFINITY } else { 0.5 / lyy }),
            {
                let pos = l * be + lxx + 4.0 * al * lyx * lyx;
                let neg = 0.5 / ta;
                (ScheduleCondition::PrimalCoupling, le(pos, neg), pos - neg, 0.0)
            },
            {
                let pos = (1.0 + th) * lyy;
                let neg = 0.125 / al;
                (ScheduleCondition::DualCoupling, le(pos, neg), pos - neg, 0.0)
            },
        ];
        for (cond, ok, lhs, rhs) in checks {
            if !ok {
                rep.violation_count += 1;
                let i = cond.id() - 1;
                if !seen[i] {
                    seen[i] = true;
                    rep.violations.push(Violation { t, condition: cond, lhs, rhs });
                }
            }
        }
        prev = (th, be, al, ta, ga);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Constants<f64> {
        Constants { l: 1.0, l_xx: 1.0, l_yx: 1.0, l_yy: 1.0, mu: 0.0 }
    }

    #[test]
    fn default_schedule_first_values() {
        let s = ScheduleParams::convex_default(&unit(), &NoiseLevels::zero(), 1.0, 1.0).unwrap();
        assert_eq!(s.theta(1), 0.0);
        assert_eq!(s.beta(1), 1.0);
        assert!(verify_schedule(&s, &unit(), 1000).passed());
    }

    #[test]
    fn custom_violation() {
        let d = ScheduleParams::convex_default(&unit(), &NoiseLevels::zero(), 1.0, 1.0).unwrap();
        let (d1, d2, d3) = (d.clone(), d.clone(), d.clone());
        let s = ScheduleParams::custom(
            Arc::new(move |t| d1.theta(t)),
            Arc::new(move |t| d2.beta(t)),
            Arc::new(|_| 1.0),
            Arc::new(move |t| d3.tau(t)),
            Arc::new(|t| t as f64),
        );
        let c = Constants { l_yy: 1.0, ..Default::default() };
        let r = verify_schedule(&s, &c, 10);
        let v = r.first_violation().unwrap();
        assert_eq!((v.t, v.condition), (1, ScheduleCondition::AlphaLyy));
    }
}
