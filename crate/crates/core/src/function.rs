//! Candidate functions `f` on `I = (gamma, inf)` and sampled checks of the
//! admissibility conditions on `f'`: positivity, strict increase and
//! log-concavity.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack allowed in the sampled midpoint log-concavity test.
pub const LOG_CONCAVITY_SLACK: f64 = 1e-12;
pub const DEFAULT_QUAD_POINTS: usize = 256;
pub const DEFAULT_GRID_POINTS: usize = 64;

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function `f` together with its derivative on `(gamma, inf)`.
///
/// Cloning is cheap; the evaluation maps are shared and must be pure.
#[derive(Clone)]
pub struct FunctionSeed {
    name: String,
    params: Vec<(String, f64)>,
    gamma: f64,
    f: RealMap,
    fprime: RealMap,
}

impl fmt::Debug for FunctionSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSeed")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}

impl fmt::Display for FunctionSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl FunctionSeed {
    /// A user-supplied seed. No admissibility check is made here; run
    /// [`verify_conditions`] on a grid covering the points of interest.
    pub fn custom<F, G>(name: impl Into<String>, gamma: f64, f: F, fprime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params: Vec::new(),
            gamma,
            f: Arc::new(f),
            fprime: Arc::new(fprime),
        }
    }

    pub fn exp() -> Self {
        Self::custom("exp", f64::NEG_INFINITY, f64::exp, f64::exp)
    }

    /// `x^p` on `(0, inf)`; requires `p > 1`.
    pub fn pow(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::AdmissibilityViolation(format!(
                "pow requires p > 1 for a strictly increasing derivative, got p = {p}"
            )));
        }
        let mut seed = Self::custom("pow", 0.0, move |x: f64| x.powf(p), move |x: f64| {
            p * x.powf(p - 1.0)
        });
        seed.params.push(("p".into(), p));
        Ok(seed)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    /// Lower endpoint of the open domain; `-inf` for the whole line.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn in_domain(&self, x: f64) -> bool {
        x > self.gamma && x.is_finite()
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                point: x,
                gamma: self.gamma,
            })
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn eval_prime(&self, x: f64) -> f64 {
        (self.fprime)(x)
    }
}

/// Looks up one of the built-in seeds: `exp`, or `pow` with parameter `p`.
pub fn builtin_seed(name: &str, params: &[(&str, f64)]) -> Result<FunctionSeed> {
    match name {
        "exp" => {
            if let Some((k, _)) = params.first() {
                return Err(Error::InvalidArgument(format!("exp takes no parameters, got `{k}`")));
            }
            Ok(FunctionSeed::exp())
        }
        "pow" => {
            let mut p = None;
            for &(k, v) in params {
                match k {
                    "p" => p = Some(v),
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "unknown pow parameter `{other}`"
                        )))
                    }
                }
            }
            let p = p.ok_or_else(|| Error::InvalidArgument("pow requires parameter p".into()))?;
            FunctionSeed::pow(p)
        }
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}

impl FromStr for FunctionSeed {
    type Err = Error;

    /// Parses `exp` or `pow:p=<real>`.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidFunctionSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (name, rest) = match spec.split_once(':') {
            Some((name, rest)) => (name.trim(), Some(rest)),
            None => (spec.trim(), None),
        };
        let mut params = Vec::new();
        if let Some(rest) = rest {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| bad("parameters must look like key=value"))?;
                let v: f64 = v.trim().parse().map_err(|_| bad("parameter value is not a number"))?;
                params.push((k.trim(), v));
            }
        }
        builtin_seed(name, &params).map_err(|e| match e {
            Error::UnknownFunction(_) | Error::InvalidArgument(_) => bad(&e.to_string()),
            other => other,
        })
    }
}

/// Which admissibility condition a sample point violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Positivity,
    StrictIncrease,
    LogConcavity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailingPoint {
    pub condition: Condition,
    /// One grid point for positivity, a pair for the other two.
    pub points: Vec<f64>,
}

/// Smallest observed slack per condition; negative means violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstMargins {
    /// `min f'(x)`.
    pub positivity: f64,
    /// `min f'(x_{i+1}) - f'(x_i)` over consecutive grid points.
    pub strict_increase: f64,
    /// `min log f'((x+y)/2) - (log f'(x) + log f'(y))/2` over grid pairs.
    pub log_concavity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub positivity_ok: bool,
    pub strict_increase_ok: bool,
    pub log_concavity_ok: bool,
    pub worst_margin: WorstMargins,
    pub failing_points: Vec<FailingPoint>,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.positivity_ok && self.strict_increase_ok && self.log_concavity_ok
    }
}

/// Checks the three conditions on `f'` at the grid points.
///
/// Log-concavity is tested in midpoint form on every pair `x < y` of grid
/// points, evaluating `f'` at `(x + y) / 2` directly. Pairs with a
/// non-positive endpoint are reported under positivity only.
pub fn verify_conditions(seed: &FunctionSeed, grid: &[f64]) -> Result<ConditionReport> {
    if grid.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 points, got {}",
            grid.len()
        )));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid(format!(
            "grid must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    for &x in grid {
        seed.check_domain(x)?;
    }

    let d: Vec<f64> = grid.iter().map(|&x| seed.eval_prime(x)).collect();
    let mut failing = Vec::new();
    let mut margins = WorstMargins {
        positivity: f64::INFINITY,
        strict_increase: f64::INFINITY,
        log_concavity: f64::INFINITY,
    };

    for (&x, &dx) in grid.iter().zip(&d) {
        margins.positivity = margins.positivity.min(dx);
        if !(dx > 0.0) {
            failing.push(FailingPoint {
                condition: Condition::Positivity,
                points: vec![x],
            });
        }
    }

    for i in 0..grid.len() - 1 {
        let gap = d[i + 1] - d[i];
        margins.strict_increase = margins.strict_increase.min(gap);
        if !(gap > 0.0) {
            failing.push(FailingPoint {
                condition: Condition::StrictIncrease,
                points: vec![grid[i], grid[i + 1]],
            });
        }
    }

    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            if !(d[i] > 0.0 && d[j] > 0.0) {
                continue;
            }
            let mid = seed.eval_prime(0.5 * (grid[i] + grid[j]));
            let slack = if mid > 0.0 {
                mid.ln() - 0.5 * (d[i].ln() + d[j].ln())
            } else {
                f64::NEG_INFINITY
            };
            margins.log_concavity = margins.log_concavity.min(slack);
            if !(slack >= -LOG_CONCAVITY_SLACK) {
                failing.push(FailingPoint {
                    condition: Condition::LogConcavity,
                    points: vec![grid[i], grid[j]],
                });
            }
        }
    }

    let has = |c| failing.iter().any(|fp: &FailingPoint| fp.condition == c);
    Ok(ConditionReport {
        positivity_ok: !has(Condition::Positivity),
        strict_increase_ok: !has(Condition::StrictIncrease),
        log_concavity_ok: !has(Condition::LogConcavity),
        worst_margin: margins,
        failing_points: failing,
    })
}

/// `count` uniformly spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// 64 points on `[max(gamma + 0.01, -10), 10]`.
pub fn default_grid(seed: &FunctionSeed) -> Vec<f64> {
    uniform_grid((seed.gamma() + 0.01).max(-10.0), 10.0, DEFAULT_GRID_POINTS)
}

/// 64 points spanning `[lo, hi]`, clipped to the domain.
pub fn spectral_grid(seed: &FunctionSeed, lo: f64, hi: f64) -> Vec<f64> {
    let lo = if seed.in_domain(lo) {
        lo
    } else {
        seed.gamma() + 0.01
    };
    let hi = hi.max(lo + 1.0);
    uniform_grid(lo, hi, DEFAULT_GRID_POINTS)
}

/// The three quantities in the chain
/// `(log f'(x) + log f'(y)) / 2 <= integral of log f' < log of integral of f'`
/// along the segment from `y` to `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainCheck {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Required gap in `mid < rhs`.
pub const CHAIN_STRICT_MARGIN: f64 = 1e-12;

pub fn chain_inequality_check(
    seed: &FunctionSeed,
    x: f64,
    y: f64,
    quad_points: usize,
) -> Result<ChainCheck> {
    seed.check_domain(x)?;
    seed.check_domain(y)?;
    if x == y {
        return Err(Error::DegeneratePair(x));
    }
    if quad_points < 16 {
        return Err(Error::InvalidArgument(format!(
            "quad_points must be at least 16, got {quad_points}"
        )));
    }
    let segment = |t: f64| t * x + (1.0 - t) * y;
    let lhs = 0.5 * (seed.eval_prime(x).ln() + seed.eval_prime(y).ln());
    let mid = simpson(|t| seed.eval_prime(segment(t)).ln(), quad_points);
    let rhs = simpson(|t| seed.eval_prime(segment(t)), quad_points).ln();
    let tol = LOG_CONCAVITY_SLACK * lhs.abs().max(1.0);
    let ok = lhs <= mid + tol && rhs - mid > CHAIN_STRICT_MARGIN;
    Ok(ChainCheck { lhs, mid, rhs, ok })
}

/// Composite Simpson rule on `[0, 1]`; an odd interval count is rounded up.
pub fn simpson(g: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) / 2 * 2;
    let h = 1.0 / m as f64;
    let mut acc = g(0.0) + g(1.0);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    acc * h / 3.0
}
