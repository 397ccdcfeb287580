//! Experiment configuration: flat TOML with dotted keys.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use saddlekit::oracles::{NoiseKind, NoiseModel};
use saddlekit::problems::{
    ClosedFormInstance, ConstrainedQp, ConstrainedQpParams, MatrixGame, MatrixGameGeometry, QuadraticParams, QuadraticSaddle,
};
use saddlekit::solvers::restart_stage_count;

use crate::error::{HarnessError, Result};

/// Environment variable that replaces the `seeds` list (comma-separated).
pub const SEED_OVERRIDE_VAR: &str = "SADDLEKIT_SEED_OVERRIDE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    MatchingPennies {
        #[serde(default)]
        geometry: Option<MatrixGameGeometry>,
    },
    /// payoff entries uniform on `[−1, 1]`
    MatrixGame {
        rows: usize,
        cols: usize,
        #[serde(default)]
        geometry: Option<MatrixGameGeometry>,
        #[serde(default)]
        seed: u64,
    },
    #[serde(rename = "quadratic-saddle", alias = "quadratic")]
    Quadratic {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        l: Option<f64>,
        #[serde(default)]
        l_xx: Option<f64>,
        #[serde(default)]
        l_yx: Option<f64>,
        #[serde(default)]
        l_yy: Option<f64>,
        #[serde(default)]
        r_x: Option<f64>,
        #[serde(default)]
        r_y: Option<f64>,
        #[serde(default)]
        components: Option<usize>,
        #[serde(default)]
        spread: Option<f64>,
        #[serde(default)]
        seed: u64,
    },
    ConstrainedQp {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        l: Option<f64>,
        #[serde(default)]
        l_yx: Option<f64>,
        #[serde(default)]
        r_x: Option<f64>,
        #[serde(default)]
        r_y: Option<f64>,
        #[serde(default)]
        seed: u64,
    },
}

/// A built instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Game(MatrixGame<f64>),
    Quadratic(QuadraticSaddle<f64>),
    ConstrainedQp(ConstrainedQp<f64>),
}

impl Instance {
    pub fn closed_form(&self) -> &dyn ClosedFormInstance<f64> {
        match self {
            Instance::Game(g) => g,
            Instance::Quadratic(q) => q,
            Instance::ConstrainedQp(c) => c,
        }
    }
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance> {
        let geom = |g: &Option<MatrixGameGeometry>| g.unwrap_or(MatrixGameGeometry::Euclidean);
        Ok(match self {
            InstanceSpec::MatchingPennies { geometry } => Instance::Game(MatrixGame::matching_pennies(geom(geometry))),
            InstanceSpec::MatrixGame { rows, cols, geometry, seed } => {
                if *rows == 0 || *cols == 0 {
                    return Err(HarnessError::Config("matrix game needs rows, cols ≥ 1".into()));
                }
                Instance::Game(MatrixGame::random(*rows, *cols, geom(geometry), &mut ChaCha8Rng::seed_from_u64(*seed)))
            }
            InstanceSpec::Quadratic { n, m, mu, l, l_xx, l_yx, l_yy, r_x, r_y, components, spread, seed } => {
                let d = QuadraticParams::default();
                let params = QuadraticParams {
                    n: n.unwrap_or(d.n),
                    m: m.unwrap_or(d.m),
                    mu: mu.unwrap_or(d.mu),
                    l: l.unwrap_or(d.l),
                    l_xx: l_xx.unwrap_or(d.l_xx),
                    l_yx: l_yx.unwrap_or(d.l_yx),
                    l_yy: l_yy.unwrap_or(d.l_yy),
                    r_x: r_x.unwrap_or(d.r_x),
                    r_y: r_y.unwrap_or(d.r_y),
                    n_components: components.unwrap_or(d.n_components),
                    component_spread: spread.unwrap_or(d.component_spread),
                };
                Instance::Quadratic(QuadraticSaddle::random(&params, &mut ChaCha8Rng::seed_from_u64(*seed)).map_err(cfg_err)?)
            }
            InstanceSpec::ConstrainedQp { n, m, mu, l, l_yx, r_x, r_y, seed } => {
                let d = ConstrainedQpParams::default();
                let params = ConstrainedQpParams {
                    n: n.unwrap_or(d.n),
                    m: m.unwrap_or(d.m),
                    mu: mu.unwrap_or(d.mu),
                    l: l.unwrap_or(d.l),
                    l_yx: l_yx.unwrap_or(d.l_yx),
                    r_x: r_x.unwrap_or(d.r_x),
                    r_y: r_y.unwrap_or(d.r_y),
                };
                Instance::ConstrainedQp(ConstrainedQp::random(&params, &mut ChaCha8Rng::seed_from_u64(*seed)).map_err(cfg_err)?)
            }
        })
    }
}

fn cfg_err(e: saddlekit::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Spdhg,
    SpdhgRescaled,
    RestartDet,
    RestartStoc,
}

impl AlgorithmKind {
    pub fn is_restart(self) -> bool {
        matches!(self, AlgorithmKind::RestartDet | AlgorithmKind::RestartStoc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// `T` for the single-run algorithms
    #[serde(default)]
    pub horizon: Option<usize>,
    /// `R` of the rescaled run; defaults to `2‖x¹ − x*‖`
    #[serde(default)]
    pub radius: Option<f64>,
    /// `U ≥ D_X`; defaults to the primal diameter
    #[serde(default)]
    pub u: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// failure probability of the stochastic schemes
    #[serde(default)]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub rho_prime: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKindSpec {
    #[default]
    Deterministic,
    SubGaussian,
    Minibatch,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub kind: NoiseKindSpec,
    #[serde(default)]
    pub sigma_x_f: f64,
    #[serde(default)]
    pub sigma_x_phi: f64,
    #[serde(default)]
    pub sigma_y_phi: f64,
    #[serde(default)]
    pub batch_size: Option<usize>,
}

impl NoiseSpec {
    pub fn model(&self, seed: u64) -> NoiseModel<f64> {
        let (f, xp, yp) = (self.sigma_x_f, self.sigma_x_phi, self.sigma_y_phi);
        match self.kind {
            NoiseKindSpec::Deterministic => NoiseModel::deterministic(),
            NoiseKindSpec::SubGaussian => NoiseModel::sub_gaussian(f, xp, yp, seed),
            NoiseKindSpec::Minibatch => NoiseModel {
                kind: NoiseKind::FiniteSumMinibatch { batch_size: self.batch_size.unwrap_or(1), sigma_x_f: f, sigma_x_phi: xp, sigma_y_phi: yp },
                rng_seed: seed,
            },
        }
    }
}

/// When to evaluate the exact gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stride {
    /// every `k` iterations, plus `T`
    Every(usize),
    /// `"geometric"`: `3, 4, 6, 8, 11, …`
    Named(String),
}

impl Default for Stride {
    fn default() -> Self {
        Stride::Named("geometric".into())
    }
}

impl Stride {
    pub fn checkpoints(&self, horizon: usize) -> Vec<usize> {
        match self {
            Stride::Every(k) => {
                let mut v: Vec<usize> = (1..=horizon / k).map(|i| i * k).filter(|&t| t >= 3).collect();
                if v.last() != Some(&horizon) {
                    v.push(horizon);
                }
                v
            }
            Stride::Named(_) => saddlekit::solvers::geometric_checkpoints(horizon),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// directory for per-seed records and `summary.json`; nothing is written when absent
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub stride: Stride,
}

impl ExperimentConfig {
    /// Parses and validates a config; ignores the environment.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and applies the seed override from the environment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if let Ok(v) = std::env::var(SEED_OVERRIDE_VAR) {
            cfg.apply_seed_override(&v)?;
        }
        Ok(cfg)
    }

    pub fn apply_seed_override(&mut self, list: &str) -> Result<()> {
        let seeds = list
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| HarnessError::Config(format!("{SEED_OVERRIDE_VAR}: bad seed {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if seeds.is_empty() {
            return Err(HarnessError::Config(format!("{SEED_OVERRIDE_VAR} is empty")));
        }
        self.seeds = seeds;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Rejects everything the solvers would reject, before any run starts.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if let Stride::Named(s) = &self.output.stride {
            if s != "geometric" {
                return bad(format!("output.stride must be a positive integer or \"geometric\", got {s:?}"));
            }
        }
        if self.output.stride == Stride::Every(0) {
            return bad("output.stride must be positive".into());
        }
        let inst = self.instance.build()?;
        let p = inst.closed_form().problem();
        let a = &self.algorithm;
        let n = &self.noise;
        for (k, v) in [("noise.sigma_x_f", n.sigma_x_f), ("noise.sigma_x_phi", n.sigma_x_phi), ("noise.sigma_y_phi", n.sigma_y_phi)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{k} must be a finite nonnegative number"));
            }
        }
        match n.kind {
            NoiseKindSpec::Deterministic => {}
            NoiseKindSpec::SubGaussian => {}
            NoiseKindSpec::Minibatch => {
                let comps = p.terms.n_components();
                match n.batch_size {
                    Some(b) if b >= 1 && b <= comps => {}
                    _ => return bad(format!("noise.batch_size must lie in [1, {comps}] for this instance")),
                }
            }
        }
        for (k, v) in [("schedule.rho", self.schedule.rho), ("schedule.rho_prime", self.schedule.rho_prime)] {
            if matches!(v, Some(r) if !(r > 0.0 && r.is_finite())) {
                return bad(format!("{k} must be positive"));
            }
        }
        if let Some(nu) = a.nu {
            if !(nu > 0.0 && nu <= 1.0) {
                return bad(format!("algorithm.nu = {nu} must lie in (0, 1]"));
            }
        }
        match a.kind {
            AlgorithmKind::Spdhg | AlgorithmKind::SpdhgRescaled => {
                if a.kind == AlgorithmKind::Spdhg && a.horizon.is_none() {
                    return bad("algorithm.horizon is required for spdhg".into());
                }
                if matches!(a.horizon, Some(t) if t < 3) {
                    return bad(format!("algorithm.horizon = {} must be at least 3", a.horizon.unwrap_or(0)));
                }
                if a.kind == AlgorithmKind::SpdhgRescaled {
                    if matches!(a.radius, Some(r) if !(r > 0.0)) {
                        return bad("algorithm.radius must be positive".into());
                    }
                    if a.radius.is_none() && inst.closed_form().saddle_point().is_none() {
                        return bad("algorithm.radius is required when the saddle point is unknown".into());
                    }
                    if a.horizon.is_none() && !(p.constants.mu > 0.0) {
                        return bad("the default rescaled horizon needs μ > 0; set algorithm.horizon".into());
                    }
                    if n.kind != NoiseKindSpec::Deterministic && a.nu.is_none() {
                        return bad("a noisy rescaled run needs algorithm.nu for its failure budget".into());
                    }
                }
            }
            AlgorithmKind::RestartDet | AlgorithmKind::RestartStoc => {
                if !(p.constants.mu > 0.0) {
                    return bad("restart schemes need a strongly convex instance (μ > 0)".into());
                }
                if a.kind == AlgorithmKind::RestartStoc && !p.geom_x.is_euclidean() {
                    return bad("restart-stoc needs the Euclidean primal geometry".into());
                }
                if a.kind == AlgorithmKind::RestartStoc && a.nu.is_none() {
                    return bad("restart-stoc needs algorithm.nu".into());
                }
                if a.kind == AlgorithmKind::RestartDet && n.kind != NoiseKindSpec::Deterministic {
                    return bad("restart-det uses exact gradients; set noise.kind = \"deterministic\" or use restart-stoc".into());
                }
                let eps = a.epsilon.ok_or_else(|| HarnessError::Config("restart schemes need algorithm.epsilon".into()))?;
                let u = a.u.unwrap_or(p.diameters.d_x);
                if !(u >= p.diameters.d_x) {
                    return bad(format!("algorithm.u = {u} is below the primal diameter {}", p.diameters.d_x));
                }
                restart_stage_count(p.constants.mu, u, eps).map_err(cfg_err)?;
            }
        }
        Ok(())
    }
}
