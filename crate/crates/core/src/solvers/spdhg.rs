use serde::{Deserialize, Serialize};

use crate::error::{config, domain, unsupported, Result};
use crate::geometry::{bregman_prox, GeometrySpec, RescaledDgf, SetKind, SimpleFunction};
use crate::oracles::{GradKind, OracleHandle, OracleStats};
use crate::problems::{ClosedFormInstance, SaddleProblem};
use crate::scalar::Scalar;

use super::schedule::ScheduleParams;

/// `x̂`, `ŷ` noise-driven sequences, advanced only in diagnostic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HatState<T> {
    pub x_hat: Vec<T>,
    pub y_hat: Vec<T>,
    /// noise of the dual gradient sample taken at `(x^t, y^t)`
    pub noise_y: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateState<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub x_bar: Vec<T>,
    pub y_bar: Vec<T>,
    pub x_tilde: Vec<T>,
    /// relaxed dual gradient `s^t`
    pub s: Vec<T>,
    /// dual gradient sample at `(x^t, y^t)`, reused by the relaxation
    pub g_y: Vec<T>,
    pub t: usize,
    pub diagnostics: Option<HatState<T>>,
}

impl<T: Scalar> IterateState<T> {
    /// `x̄¹ = x¹`, `ȳ¹ = y¹`, `s¹ = ĝ_y(x¹, y¹)`; one dual oracle call.
    pub fn init(p: &SaddleProblem<T>, o: &mut OracleHandle<T>, x1: Vec<T>, y1: Vec<T>) -> Result<Self> {
        if !p.geom_x.in_dgf_interior(&x1) || !p.geom_y.in_dgf_interior(&y1) {
            return Err(domain("starting point outside the DGF domain interior"));
        }
        let sample = o.sample(GradKind::GradYPhi, &x1, &y1)?;
        let diagnostics = if o.diagnostic() {
            let noise_y = sample.noise.clone().unwrap_or_else(|| vec![T::zero(); y1.len()]);
            Some(HatState { x_hat: x1.clone(), y_hat: y1.clone(), noise_y })
        } else {
            None
        };
        Ok(Self {
            x_bar: x1.clone(),
            y_bar: y1.clone(),
            x_tilde: x1.clone(),
            x: x1,
            y: y1,
            s: sample.value.clone(),
            g_y: sample.value,
            t: 1,
            diagnostics,
        })
    }
}

/// How the primal prox measures distance.
#[derive(Debug, Clone)]
pub(crate) enum PrimalMode<T> {
    Plain(GeometrySpec<T>),
    /// Euclidean base: the rescaled distance is the plain one on `X′`.
    EuclideanOn(GeometrySpec<T>),
    Rescaled { dgf: RescaledDgf<T>, set: SetKind<T> },
}

impl<T: Scalar> PrimalMode<T> {
    pub(crate) fn plain(p: &SaddleProblem<T>) -> Self {
        PrimalMode::Plain(p.geom_x.clone())
    }

    pub(crate) fn rescaled(p: &SaddleProblem<T>, center: &[T], r: T, set: SetKind<T>) -> Result<Self> {
        if p.geom_x.is_euclidean() {
            if !(r > T::zero() && r.is_finite()) {
                return Err(domain(format!("rescaling radius {r} must be positive and finite")));
            }
            return Ok(PrimalMode::EuclideanOn(GeometrySpec { feasible_set: set, ..p.geom_x.clone() }));
        }
        if !matches!(p.g, SimpleFunction::Zero) {
            return Err(unsupported("rescaled primal step with a nonzero g needs the Euclidean DGF"));
        }
        Ok(PrimalMode::Rescaled { dgf: RescaledDgf::new(p.geom_x.clone(), center.to_vec(), r)?, set })
    }

    fn prox(&self, g: &SimpleFunction<T>, x_ref: &[T], lin: &[T], step: T) -> Result<Vec<T>> {
        match self {
            PrimalMode::Plain(geom) | PrimalMode::EuclideanOn(geom) => bregman_prox(geom, x_ref, lin, step, g),
            PrimalMode::Rescaled { dgf, set } => dgf.prox(x_ref, lin, step, set),
        }
    }
}

fn convex_mix<T: Scalar>(a: &[T], b: &[T], w: T) -> Vec<T> {
    a.iter().zip(b).map(|(&u, &v)| (T::one() - w) * u + w * v).collect()
}

pub(crate) fn advance<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    st: &mut IterateState<T>,
    sched: &ScheduleParams<T>,
    mode: &PrimalMode<T>,
) -> Result<()> {
    let t = st.t;
    let (alpha, beta, tau, theta_next) = (sched.alpha(t), sched.beta(t), sched.tau(t), sched.theta(t + 1));

    let neg_s: Vec<T> = st.s.iter().map(|&v| -v).collect();
    let y_next = bregman_prox(&p.geom_y, &st.y, &neg_s, alpha, &p.j)?;

    st.x_tilde = convex_mix(&st.x_bar, &st.x, beta);

    let gx = o.sample(GradKind::GradXPhi, &st.x, &y_next)?;
    let gf = o.sample(GradKind::GradF, &st.x_tilde, &y_next)?;
    let pi: Vec<T> = gx.value.iter().zip(&gf.value).map(|(&a, &b)| a + b).collect();
    let x_next = mode.prox(&p.g, &st.x, &pi, tau)?;

    let gy = o.sample(GradKind::GradYPhi, &x_next, &y_next)?;
    let one = T::one();
    st.s = gy.value.iter().zip(&st.g_y).map(|(&a, &b)| (one + theta_next) * a - theta_next * b).collect();

    if let Some(h) = st.diagnostics.as_mut() {
        let zero_x = || vec![T::zero(); st.x.len()];
        let dx: Vec<T> = match (&gx.noise, &gf.noise) {
            (Some(a), Some(b)) => a.iter().zip(b).map(|(&u, &v)| u + v).collect(),
            _ => zero_x(),
        };
        let (xh, yh) = hat_update(p, mode, &h.x_hat, &dx, tau, &h.y_hat, &h.noise_y, alpha)?;
        h.x_hat = xh;
        h.y_hat = yh;
        h.noise_y = gy.noise.clone().unwrap_or_else(|| vec![T::zero(); y_next.len()]);
    }

    st.g_y = gy.value;
    st.x_bar = convex_mix(&st.x_bar, &x_next, beta);
    st.y_bar = convex_mix(&st.y_bar, &y_next, beta);
    st.x = x_next;
    st.y = y_next;
    st.t += 1;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn hat_update<T: Scalar>(
    p: &SaddleProblem<T>,
    mode: &PrimalMode<T>,
    x_hat: &[T],
    noise_x: &[T],
    tau: T,
    y_hat: &[T],
    noise_y: &[T],
    alpha: T,
) -> Result<(Vec<T>, Vec<T>)> {
    let lin_x: Vec<T> = noise_x.iter().map(|&v| -v).collect();
    let lin_y: Vec<T> = noise_y.iter().map(|&v| -v).collect();
    let xh = mode.prox(&SimpleFunction::Zero, x_hat, &lin_x, tau)?;
    let yh = bregman_prox(&p.geom_y, y_hat, &lin_y, alpha, &SimpleFunction::Zero)?;
    Ok((xh, yh))
}

/// One iteration of the stochastic PDHG method; three oracle calls.
pub fn spdhg_step<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    s: &IterateState<T>,
    sched: &ScheduleParams<T>,
) -> Result<IterateState<T>> {
    let mut next = s.clone();
    advance(p, o, &mut next, sched, &PrimalMode::plain(p))?;
    Ok(next)
}

/// `x̂ ← argmin −⟨δ_x, x⟩ + τ⁻¹D(x, x̂)`, `ŷ ← argmin −⟨δ_y, y⟩ + α⁻¹D(y, ŷ)`.
pub fn hat_sequence_step<T: Scalar>(
    p: &SaddleProblem<T>,
    diag: &IterateState<T>,
    noise_x: &[T],
    tau_t: T,
    noise_y: &[T],
    alpha_t: T,
) -> Result<IterateState<T>> {
    let h = diag.diagnostics.as_ref().ok_or_else(|| config("hat sequences need diagnostic mode"))?;
    let (xh, yh) = hat_update(p, &PrimalMode::plain(p), &h.x_hat, noise_x, tau_t, &h.y_hat, noise_y, alpha_t)?;
    let mut out = diag.clone();
    if let Some(hh) = out.diagnostics.as_mut() {
        hh.x_hat = xh;
        hh.y_hat = yh;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint<T> {
    pub t: usize,
    /// `G(x̄^t, ȳ^t)` when an exact gap is available
    pub gap: Option<T>,
    pub calls: OracleStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord<T> {
    /// horizon `T`; the output is `x̄^T` after `T − 1` steps
    pub horizon: usize,
    pub checkpoints: Vec<Checkpoint<T>>,
    pub stats: OracleStats,
    pub final_gap: Option<T>,
    /// `max_t ‖x^t − c‖ − r` over the primal iterates when `X′` is ball-constrained
    pub max_ball_excess: Option<T>,
}

/// Callback invoked after every iteration.
pub type Observer<'a, T> = &'a mut dyn FnMut(&IterateState<T>);

/// Optional inputs of a run.
pub struct RunOptions<'a, T: Scalar> {
    pub x1: Option<Vec<T>>,
    pub y1: Option<Vec<T>>,
    /// iteration indices `t` at which `G(x̄^t, ȳ^t)` is recorded
    pub checkpoints: Vec<usize>,
    pub instance: Option<&'a dyn ClosedFormInstance<T>>,
    pub observer: Option<Observer<'a, T>>,
}

impl<T: Scalar> Default for RunOptions<'_, T> {
    fn default() -> Self {
        Self { x1: None, y1: None, checkpoints: Vec::new(), instance: None, observer: None }
    }
}

fn ball_of<T: Scalar>(set: &SetKind<T>) -> Option<(&[T], T)> {
    match set {
        SetKind::EuclideanBall { center, radius } | SetKind::Intersection { center, radius, .. } => Some((center, *radius)),
        _ => None,
    }
}

pub(crate) fn run_with_mode<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    sched: &ScheduleParams<T>,
    horizon: usize,
    mode: &PrimalMode<T>,
    ball: Option<(&[T], T)>,
    mut opts: RunOptions<'_, T>,
) -> Result<(Vec<T>, Vec<T>, RunRecord<T>)> {
    if horizon < 3 {
        return Err(config(format!("horizon T = {horizon} must be at least 3")));
    }
    let (cx, cy) = p.start_point();
    let x1 = opts.x1.take().unwrap_or(cx);
    let y1 = opts.y1.take().unwrap_or(cy);
    let mut st = IterateState::init(p, o, x1, y1)?;
    let mut cps = opts.checkpoints.clone();
    cps.sort_unstable();
    cps.dedup();
    let mut next_cp = cps.iter().copied().filter(|&c| c >= 1 && c <= horizon).peekable();
    let mut rec = RunRecord { horizon, checkpoints: Vec::new(), stats: OracleStats::default(), final_gap: None, max_ball_excess: None };
    let excess = |x: &[T]| ball.map(|(c, r)| crate::linalg::dist2(x, c).sqrt() - r);
    rec.max_ball_excess = excess(&st.x);
    loop {
        if let Some(obs) = opts.observer.as_mut() {
            obs(&st);
        }
        if next_cp.peek() == Some(&st.t) {
            next_cp.next();
            let gap = match opts.instance {
                Some(inst) => Some(inst.duality_gap(&st.x_bar, &st.y_bar)?),
                None => None,
            };
            rec.checkpoints.push(Checkpoint { t: st.t, gap, calls: *o.stats() });
        }
        if st.t >= horizon {
            break;
        }
        advance(p, o, &mut st, sched, mode)?;
        if let Some(e) = excess(&st.x) {
            rec.max_ball_excess = Some(rec.max_ball_excess.map_or(e, |m| m.max(e)));
        }
    }
    rec.stats = *o.stats();
    rec.final_gap = match rec.checkpoints.last() {
        Some(c) if c.t == horizon => c.gap,
        _ => match opts.instance {
            Some(inst) => Some(inst.duality_gap(&st.x_bar, &st.y_bar)?),
            None => None,
        },
    };
    Ok((st.x_bar, st.y_bar, rec))
}

/// Runs `T − 1` steps and returns `(x̄^T, ȳ^T)`.
pub fn run_spdhg<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    sched: &ScheduleParams<T>,
    horizon: usize,
    opts: RunOptions<'_, T>,
) -> Result<(Vec<T>, Vec<T>, RunRecord<T>)> {
    run_with_mode(p, o, sched, horizon, &PrimalMode::plain(p), None, opts)
}

/// The rescaled variant: primal distance `D_R` centred at `x0` with radius `R`,
/// primal constraint set `X′`. `opts.x1` is ignored (`x¹ = x0`).
#[allow(clippy::too_many_arguments)]
pub fn run_spdhg_rescaled<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    x0: &[T],
    r: T,
    x_prime: SetKind<T>,
    horizon: usize,
    sched: &ScheduleParams<T>,
    mut opts: RunOptions<'_, T>,
) -> Result<(Vec<T>, Vec<T>, RunRecord<T>)> {
    if !x_prime.contains(x0, T::feas_tol(1e-9)) {
        return Err(domain("starting point outside X′"));
    }
    let ball = ball_of(&x_prime).map(|(c, rr)| (c.to_vec(), rr));
    let mode = PrimalMode::rescaled(p, x0, r, x_prime)?;
    opts.x1 = Some(x0.to_vec());
    run_with_mode(p, o, sched, horizon, &mode, ball.as_ref().map(|(c, rr)| (c.as_slice(), *rr)), opts)
}

/// `3, 4, 6, 8, 11, …` with `t_{k+1} = round(1.4 t_k)`, always ending at `T`.
pub fn geometric_checkpoints(horizon: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut t = 3usize;
    while t < horizon {
        out.push(t);
        t = ((t as f64 * 1.4).round() as usize).max(t + 1);
    }
    if horizon >= 1 {
        out.push(horizon);
    }
    out
}
