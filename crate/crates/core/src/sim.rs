//! Path simulation: the self-stabilizing process and its constant-index,
//! weighted, non-autonomous and tempered relatives.
//!
//! `Z` is approximated by the solution driven by the Poisson points in the
//! strip `(t0,t1) x ((-N,-K] ∪ [K,N))`. Points with `|y| > N` carry small jumps
//! and are controlled by a [`TruncationPlan`]; points with `|y| < K` are rare
//! large jumps, absent with probability `exp(-2K(t1-t0))`.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha_model::{spow, AlphaModel, AlphaSpec};
use crate::error::{Error, Result};
use crate::point_process::{generate_poisson_strip, PointSet, StripSpec};
use crate::rng::{self, streams};
use crate::solver::{
    compensated_sum, integrate, solve_nonautonomous, solve_sequential, solve_weighted, JumpFunction,
    NonAutonomousAlpha, Weight,
};
use crate::special::stable_norm_constant_closed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Selfstab,
    Stable,
    Subordinator,
    Weighted,
    Tempered,
    Nonautonomous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub variant: Variant,
    pub seed: u64,
    pub a0: f64,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    /// Number of series terms (tempered variant only).
    pub n_terms: Option<usize>,
    pub alpha: String,
    pub alpha_spec: Option<AlphaSpec>,
    pub point_count: usize,
    /// Envelope of the last included term (tempered variant only).
    pub residual: Option<f64>,
}

/// A path recorded on a time grid; values are piecewise constant between grid times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: PathMeta,
}

impl SampledPath {
    /// Value at the last grid time `<= t`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let (t0, t1) = (self.grid[0], *self.grid.last().expect("grid is never empty"));
        if !(t >= t0 && t <= t1) {
            return Err(Error::OutOfInterval { t, t0, t1 });
        }
        let k = self.grid.partition_point(|&g| g <= t);
        Ok(self.values[k - 1])
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("values is never empty")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{t:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// Uniform grid of `grid_len` points on `[t0, t1]`, merged with the jump times
/// when the uniform step is not below the smallest gap between them.
pub fn sampling_grid(t0: f64, t1: f64, grid_len: usize, jumps: &[f64]) -> Vec<f64> {
    let step = (t1 - t0) / (grid_len - 1) as f64;
    let uniform = (0..grid_len).map(|i| if i + 1 == grid_len { t1 } else { t0 + step * i as f64 });
    let min_gap = jumps.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if jumps.len() < 2 || step < min_gap {
        return uniform.collect();
    }
    let mut grid: Vec<f64> = uniform.chain(jumps.iter().copied()).collect();
    grid.sort_unstable_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Samples `f` on [`sampling_grid`]; the value at `t1` is the left limit.
pub fn sample(f: &JumpFunction, grid_len: usize, meta: PathMeta) -> Result<SampledPath> {
    if grid_len < 2 {
        return Err(Error::InvalidArgument(format!("grid_len must be at least 2, got {grid_len}")));
    }
    let (t0, t1) = f.interval();
    let grid = sampling_grid(t0, t1, grid_len, f.breakpoints());
    let values = grid.iter().map(|&t| f.eval_closed(t)).collect::<Result<Vec<_>>>()?;
    Ok(SampledPath { grid, values, meta })
}

/// Which closed form turns `(epsilon, T, alpha, K)` into the cutoff `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanFormula {
    /// `(2bT/(1-b)) exp(2TM(q ln K + q^2 K^{-1/q})) N^{-1/q}` with `q = b/(1-b)`; needs `K >= 1`.
    #[default]
    LogK,
    /// `(2bT/(1-b)) exp(2TM ∫_K^∞ |y|^{-1/(a,b)} dy) N^{-1/q}`, the expectation of
    /// the product-form error bound; valid for any `K > 0`.
    WeightIntegral,
}

/// Cutoffs for one simulation, and the certified bound when one is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub epsilon: Option<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "N")]
    pub n: f64,
    /// Upper bound on `E ||Z_N - Z||∞` over the strip `|y| >= K`.
    pub bound: Option<f64>,
    pub formula: Option<PlanFormula>,
}

impl TruncationPlan {
    pub fn explicit(k: f64, n: f64) -> Result<Self> {
        if !(k >= 0.0 && k <= n && n.is_finite()) {
            return Err(Error::InvalidArgument(format!("need 0 <= K <= N < inf, got K={k}, N={n}")));
        }
        Ok(TruncationPlan { epsilon: None, k, n, bound: None, formula: None })
    }

    pub fn strip(&self, t0: f64, t1: f64, seed: u64) -> StripSpec {
        StripSpec { t0, t1, k: self.k, n: self.n, seed }
    }
}

/// `∫_K^∞ max(y^{-1/a}, y^{-1/b}) (1 + |ln y|) dy` for `K > 0`.
pub fn weight_integral(a: f64, b: f64, k: f64) -> f64 {
    // Above 1: y^{-p}(1 + ln y) with p = 1/b.
    let upper = |from: f64| {
        let d = 1.0 - 1.0 / b;
        let f = from.powf(d);
        -f / d * (1.0 + from.ln()) + f / (d * d)
    };
    if k >= 1.0 {
        return upper(k);
    }
    // On [K, 1]: y^{-r}(1 - ln y) with r = 1/a.
    let d = 1.0 - 1.0 / a;
    let kd = k.powf(d);
    let plain = (1.0 - kd) / d;
    let log_part = (-1.0 / (d * d)) - (kd * k.ln() / d - kd / (d * d));
    plain - log_part + upper(1.0)
}

/// The plan bound `C(K) N^{-(1-b)/b}` for a given `N`.
pub fn plan_bound(formula: PlanFormula, t: f64, alpha: &AlphaModel, k: f64, n: f64) -> Result<f64> {
    Ok(plan_constant(formula, t, alpha, k)? * n.powf(-(1.0 - alpha.b()) / alpha.b()))
}

fn plan_constant(formula: PlanFormula, t: f64, alpha: &AlphaModel, k: f64) -> Result<f64> {
    let (b, m) = (alpha.b(), alpha.derivative_ratio_bound());
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {t}")));
    }
    let q = b / (1.0 - b);
    let exponent = match formula {
        PlanFormula::LogK => {
            if !(k >= 1.0) {
                return Err(Error::InvalidArgument(format!("this plan formula needs K >= 1, got {k}")));
            }
            2.0 * t * m * (q * k.ln() + q * q * k.powf(-1.0 / q))
        }
        PlanFormula::WeightIntegral => {
            if !(k > 0.0) {
                return Err(Error::InvalidArgument(format!("K must be positive, got {k}")));
            }
            2.0 * t * m * weight_integral(alpha.a(), b, k)
        }
    };
    Ok(2.0 * b * t / (1.0 - b) * exponent.exp())
}

/// Smallest integer `N` whose plan bound is below `epsilon^2`, so that by
/// Markov's inequality `P(||Z_N - Z||∞ >= epsilon) < epsilon`.
pub fn truncation_level(epsilon: f64, t: f64, alpha: &AlphaModel, k: f64) -> Result<TruncationPlan> {
    truncation_level_with(PlanFormula::LogK, epsilon, t, alpha, k)
}

pub fn truncation_level_with(
    formula: PlanFormula,
    epsilon: f64,
    t: f64,
    alpha: &AlphaModel,
    k: f64,
) -> Result<TruncationPlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    let c = plan_constant(formula, t, alpha, k)?;
    let target = epsilon * epsilon;
    let power = (1.0 - alpha.b()) / alpha.b();
    if !c.is_finite() || target == 0.0 {
        return Err(Error::Infeasible(format!("plan constant {c:e} against target {target:e}")));
    }
    let guess = (c / target).powf(1.0 / power).ceil().max(k.ceil()).max(1.0);
    if !(guess < 2f64.powi(53)) {
        return Err(Error::Infeasible(format!("required N = {guess:e} exceeds 2^53")));
    }
    // The closed-form guess can be off by one after rounding; settle it on the exact check.
    let ok = |n: f64| c * n.powf(-power) < target;
    let mut n = guess;
    while n > 1.0 && n - 1.0 >= k && ok(n - 1.0) {
        n -= 1.0;
    }
    while !ok(n) {
        n += 1.0;
    }
    Ok(TruncationPlan { epsilon: Some(epsilon), k, n, bound: Some(c * n.powf(-power)), formula: Some(formula) })
}

/// `K` such that the strip `|y| < K` over a horizon `T` is empty with probability `1 - epsilon`.
pub fn small_jump_cutoff(epsilon: f64, t: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    Ok(-(-epsilon).ln_1p() / (2.0 * t))
}

fn meta(variant: Variant, seed: u64, a0: f64, plan: &TruncationPlan, alpha: &AlphaModel, count: usize) -> PathMeta {
    PathMeta {
        variant,
        seed,
        a0,
        k: Some(plan.k),
        n: Some(plan.n),
        n_terms: None,
        alpha: alpha.label(),
        alpha_spec: alpha.spec(),
        point_count: count,
        residual: None,
    }
}

/// Points and solution behind [`simulate_path`].
pub fn simulate_jump_function(
    alpha: &AlphaModel,
    a0: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
) -> Result<(PointSet, JumpFunction)> {
    let ps = generate_poisson_strip(&plan.strip(interval.0, interval.1, seed))?;
    let f = solve_sequential(&ps, alpha, a0)?;
    Ok((ps, f))
}

pub fn simulate_path(
    alpha: &AlphaModel,
    a0: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
    grid_len: usize,
) -> Result<SampledPath> {
    let (ps, f) = simulate_jump_function(alpha, a0, interval, plan, seed)?;
    sample(&f, grid_len, meta(Variant::Selfstab, seed, a0, plan, alpha, ps.len()))
}

/// Non-normalized stable motion: [`simulate_path`] with a constant index, started at 0.
pub fn simulate_stable_motion(
    alpha: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
    grid_len: usize,
) -> Result<SampledPath> {
    let model = AlphaModel::constant(alpha)?;
    let mut path = simulate_path(&model, 0.0, interval, plan, seed, grid_len)?;
    path.meta.variant = Variant::Stable;
    Ok(path)
}

/// Stable subordinator: jumps `|y|^{-1/alpha}`, started at 0.
pub fn subordinator_jump_function(
    alpha: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
) -> Result<(PointSet, JumpFunction)> {
    AlphaModel::constant(alpha)?;
    let ps = generate_poisson_strip(&plan.strip(interval.0, interval.1, seed))?;
    let s = -1.0 / alpha;
    let f = integrate(&ps, 0.0, |_, _, group| Ok(compensated_sum(group.iter().map(|p| p.y.abs().powf(s)))))?;
    Ok((ps, f))
}

pub fn simulate_subordinator(
    alpha: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
    grid_len: usize,
) -> Result<SampledPath> {
    let model = AlphaModel::constant(alpha)?;
    let (ps, f) = subordinator_jump_function(alpha, interval, plan, seed)?;
    sample(&f, grid_len, meta(Variant::Subordinator, seed, 0.0, plan, &model, ps.len()))
}

pub fn simulate_weighted(
    alpha: &AlphaModel,
    weight: &Weight,
    a0: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
    grid_len: usize,
) -> Result<SampledPath> {
    let ps = generate_poisson_strip(&plan.strip(interval.0, interval.1, seed))?;
    let f = solve_weighted(&ps, alpha, weight, a0)?;
    let variant = if let Weight::Unit = weight { Variant::Selfstab } else { Variant::Weighted };
    sample(&f, grid_len, meta(variant, seed, a0, plan, alpha, ps.len()))
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_nonautonomous(
    alpha3: &NonAutonomousAlpha,
    label: &str,
    g: &dyn Fn(f64) -> f64,
    a0: f64,
    interval: (f64, f64),
    plan: &TruncationPlan,
    seed: u64,
    grid_len: usize,
) -> Result<SampledPath> {
    let ps = generate_poisson_strip(&plan.strip(interval.0, interval.1, seed))?;
    let f = solve_nonautonomous(&ps, alpha3, g, a0)?;
    let meta = PathMeta {
        variant: Variant::Nonautonomous,
        seed,
        a0,
        k: Some(plan.k),
        n: Some(plan.n),
        n_terms: None,
        alpha: label.to_string(),
        alpha_spec: None,
        point_count: ps.len(),
        residual: None,
    };
    sample(&f, grid_len, meta)
}

/// One term of the tempered series, in time order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperedJump {
    pub x: f64,
    pub gamma: f64,
    pub sign: f64,
    pub e: f64,
    pub u: f64,
    /// Index in force at the jump, `alpha(z-)`.
    pub alpha: f64,
    /// Signed jump actually applied.
    pub jump: f64,
}

#[derive(Debug, Clone)]
pub struct TemperedRun {
    pub function: JumpFunction,
    pub jumps: Vec<TemperedJump>,
    /// `max((aΓ_n/T)^{-1/a}, (aΓ_n/T)^{-1/b})` for the last included term.
    pub residual: f64,
}

/// Series for the self-stabilizing tempered process on `[0, T)`, truncated at `n_terms`.
pub fn tempered_run(alpha: &AlphaModel, a0: f64, horizon: f64, n_terms: usize, seed: u64) -> Result<TemperedRun> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("n_terms must be at least 1".into()));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let mut rng = rng::substream(seed, streams::TEMPERED);
    let mut gamma = 0.0;
    let mut terms: Vec<TemperedJump> = (0..n_terms)
        .map(|_| {
            gamma += rng::exponential(&mut rng, 1.0);
            let x = (horizon * rng::open_unit(&mut rng)).clamp(f64::MIN_POSITIVE, horizon.next_down());
            let sign = rng::sign(&mut rng);
            let e = rng::exponential(&mut rng, 1.0);
            let u = rng::open_unit(&mut rng);
            TemperedJump { x, gamma, sign, e, u, alpha: f64::NAN, jump: 0.0 }
        })
        .collect();
    terms.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.gamma.total_cmp(&q.gamma)));

    let mut breakpoints = Vec::with_capacity(n_terms);
    let mut values = Vec::with_capacity(n_terms + 1);
    values.push(a0);
    let mut current = a0;
    let mut start = 0;
    while start < terms.len() {
        let x = terms[start].x;
        let end = start + terms[start..].iter().take_while(|j| j.x == x).count();
        let al = alpha.eval(current)?;
        for term in &mut terms[start..end] {
            let stable = (al * term.gamma / horizon).powf(-1.0 / al);
            let capped = term.e * term.u.powf(1.0 / al);
            term.alpha = al;
            term.jump = term.sign * stable.min(capped);
        }
        current += compensated_sum(terms[start..end].iter().map(|j| j.jump));
        breakpoints.push(x);
        values.push(current);
        start = end;
    }
    let residual = tempered_envelope(alpha.a(), alpha.b(), gamma, horizon);
    Ok(TemperedRun { function: JumpFunction::from_parts(0.0, horizon, breakpoints, values), jumps: terms, residual })
}

/// `max((aΓ/T)^{-1/a}, (aΓ/T)^{-1/b})`, which dominates `(αΓ/T)^{-1/α}` for every `α ∈ [a, b]`.
pub fn tempered_envelope(a: f64, b: f64, gamma: f64, horizon: f64) -> f64 {
    let base = a * gamma / horizon;
    base.powf(-1.0 / a).max(base.powf(-1.0 / b))
}

pub fn simulate_tempered(
    alpha: &AlphaModel,
    a0: f64,
    horizon: f64,
    n_terms: usize,
    seed: u64,
    grid_len: usize,
) -> Result<SampledPath> {
    let run = tempered_run(alpha, a0, horizon, n_terms, seed)?;
    let meta = PathMeta {
        variant: Variant::Tempered,
        seed,
        a0,
        k: None,
        n: None,
        n_terms: Some(n_terms),
        alpha: alpha.label(),
        alpha_spec: alpha.spec(),
        point_count: n_terms,
        residual: Some(run.residual),
    };
    sample(&run.function, grid_len, meta)
}

/// Symmetric stable variates `S_alpha(scale, 0, 0)` by the Chambers–Mallows–Stuck transform.
pub fn cms_stable_sample(alpha: f64, scale: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let mut rng = rng::substream(seed, streams::STABLE);
    let half_pi = std::f64::consts::FRAC_PI_2;
    Ok((0..count)
        .map(|_| {
            let v = half_pi * (2.0 * rng::open_unit(&mut rng) - 1.0);
            let w = rng::exponential(&mut rng, 1.0);
            let head = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
            let tail = ((1.0 - alpha) * v).cos() / w;
            scale * head * tail.powf((1.0 - alpha) / alpha)
        })
        .collect())
}

/// Scale `c` of the marginal `S_alpha(c, 0, 0)` of the stable motion built
/// from the unit-intensity strip, after time `u`: `(2u)^{1/alpha} / C_alpha`.
///
/// Points of both signs contribute, so `|y|` has intensity 2 and the
/// characteristic function is `exp(-2u I_alpha |θ|^alpha)` with
/// `I_alpha = C_alpha^{-alpha}`.
pub fn stable_motion_scale(alpha: f64, u: f64) -> f64 {
    (2.0 * u).powf(1.0 / alpha) / stable_norm_constant_closed(alpha)
}

/// Runs `f(path_seed(seed, i))` for `i < count` in parallel, results in index order.
pub fn batch<T, F>(count: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..count as u64).into_par_iter().map(|i| f(rng::path_seed(seed, i))).collect()
}

/// Jump term of the constant-index stable motion, exposed for oracles.
pub fn stable_jump(y: f64, alpha: f64) -> f64 {
    spow(y, -1.0 / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_examples() {
        let m1 = AlphaModel::custom("m1", |z: f64| 0.4 + 0.1 * z.sin(), 0.3, 0.5, Some(1.0)).unwrap();
        let plan = truncation_level(0.1, 1.0, &m1, 1.0).unwrap();
        assert_eq!(plan.n, 1478.0);
        assert!(plan.bound.unwrap() < 0.01);
        let flat = AlphaModel::constant(0.5).unwrap();
        assert_eq!(truncation_level(0.1, 1.0, &flat, 1.0).unwrap().n, 200.0);
        assert!(truncation_level(1.0, 1.0, &flat, 1.0).is_err());
        assert!(truncation_level(0.1, 1.0, &flat, 0.5).is_err());
    }

    #[test]
    fn halving_epsilon_scales_n() {
        let model = AlphaModel::cosine(0.4, 0.2).unwrap();
        let n1 = truncation_level(0.1, 1.0, &model, 1.0).unwrap().n;
        let n2 = truncation_level(0.05, 1.0, &model, 1.0).unwrap().n;
        let b = model.b();
        let factor = 2f64.powf(2.0 * b / (1.0 - b));
        assert!((n2 / n1 - factor).abs() / factor < 1e-3);
    }

    #[test]
    fn infeasible_plans_reported() {
        let model = AlphaModel::cosine(0.57, 0.4).unwrap();
        assert!(matches!(truncation_level(1e-3, 1.0, &model, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn weight_integral_matches_quadrature() {
        for &(a, b, k) in &[(0.3f64, 0.6f64, 0.05f64), (0.5, 0.5, 1.0), (0.17, 0.97, 2.5), (0.4, 0.8, 0.9)] {
            // Substitute y = e^s and write the integrand in log form, split at y = 1.
            let g = |s: f64| {
                let r = if s < 0.0 { 1.0 / a } else { 1.0 / b };
                (s * (1.0 - r)).exp() * (1.0 + s.abs())
            };
            let mut quad = 0.0;
            if k < 1.0 {
                quad += crate::special::integrate(&g, k.ln(), 0.0, 1e-10).0;
            }
            quad += crate::special::integrate(&g, k.max(1.0).ln(), 2000.0, 1e-10).0;
            let closed = weight_integral(a, b, k);
            assert!(((closed - quad) / quad).abs() < 1e-9, "{a} {b} {k}: {closed} vs {quad}");
        }
    }

    #[test]
    fn small_jump_cutoff_examples() {
        let k = small_jump_cutoff(0.5, 1.0).unwrap();
        assert!((k - 2f64.ln() / 2.0).abs() < 1e-15);
        let p0 = (-2.0 * k).exp();
        assert!((p0 - 0.5).abs() < 1e-15);
        let tiny = small_jump_cutoff(1e-9, 1.0).unwrap();
        assert!((tiny / 5e-10 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn grid_refines_only_when_needed() {
        assert_eq!(sampling_grid(0.0, 1.0, 3, &[0.1, 0.9]), vec![0.0, 0.5, 1.0]);
        assert_eq!(sampling_grid(0.0, 1.0, 3, &[0.1, 0.2]), vec![0.0, 0.1, 0.2, 0.5, 1.0]);
    }

    #[test]
    fn cms_domain() {
        assert!(cms_stable_sample(1.0, 1.0, 3, 0).is_err());
        assert!(cms_stable_sample(0.5, 0.0, 3, 0).is_err());
        assert_eq!(cms_stable_sample(0.5, 1.0, 10, 4).unwrap(), cms_stable_sample(0.5, 1.0, 10, 4).unwrap());
    }

    #[test]
    fn tempered_caps() {
        let model = AlphaModel::cosine(0.57, 0.4).unwrap();
        let run = tempered_run(&model, 0.0, 2.0, 500, 3).unwrap();
        assert_eq!(run.jumps.len(), 500);
        for j in &run.jumps {
            assert!(j.jump.abs() <= j.e);
            assert!(j.jump.abs() <= tempered_envelope(model.a(), model.b(), j.gamma, 2.0));
        }
        assert!(tempered_run(&model, 0.0, 1.0, 0, 3).is_err());
    }
}
