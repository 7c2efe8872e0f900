//! Deterministic jump functions driven by a finite point set.
//!
//! Given a point set `Π ⊂ (t0,t1) x R` and an index map `alpha`, the unique
//! càdlàg `f` with
//!
//! ```text
//! f(t) = a0 + Σ_{(x,y) ∈ Π, x ≤ t} y^<-1/alpha(f(x-))>
//! ```
//!
//! is built by a single left-to-right pass over the distinct `x` values. All
//! points sharing an `x` jump together, using the common pre-jump value.
//! Picard iteration of the map `K(f)` above is kept as an independent route.
//!
//! The running value is carried as a plain `f64` from jump to jump, so the
//! state at any time is exactly the reported value and restarting from it
//! reproduces the remainder of the path bit for bit. Sums over co-located
//! points use compensated (Neumaier) summation.

use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alpha_model::{jump_envelope, spow, weight_ab, AlphaModel, AlphaSpec, RANGE_SLACK};
use crate::error::{Error, Result};
use crate::point_process::{Point, PointSet};
use crate::special::stable_norm_constant_closed;

/// Piecewise-constant càdlàg function on `[t0, t1)`.
///
/// `values[0] = a0` holds on `[t0, breakpoints[0])`, `values[k]` on
/// `[breakpoints[k-1], breakpoints[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpFunction {
    t0: f64,
    t1: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl JumpFunction {
    pub fn constant(t0: f64, t1: f64, a0: f64) -> Self {
        JumpFunction { t0, t1, breakpoints: Vec::new(), values: vec![a0] }
    }

    pub(crate) fn from_parts(t0: f64, t1: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(breakpoints.len() + 1, values.len());
        JumpFunction { t0, t1, breakpoints, values }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn a0(&self) -> f64 {
        self.values[0]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right-continuous evaluation on `[t0, t1)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= self.t0 && t < self.t1) {
            return Err(Error::OutOfInterval { t, t0: self.t0, t1: self.t1 });
        }
        Ok(self.values[self.breakpoints.partition_point(|&x| x <= t)])
    }

    /// `f(t-)` on `(t0, t1]`.
    pub fn left_limit(&self, t: f64) -> Result<f64> {
        if !(t > self.t0 && t <= self.t1) {
            return Err(Error::OutOfInterval { t, t0: self.t0, t1: self.t1 });
        }
        Ok(self.values[self.breakpoints.partition_point(|&x| x < t)])
    }

    /// `f(t1-)`.
    pub fn terminal_value(&self) -> f64 {
        *self.values.last().expect("values is never empty")
    }

    /// Evaluation at `t ∈ [t0, t1]`, using the left limit at `t1`.
    pub fn eval_closed(&self, t: f64) -> Result<f64> {
        if t == self.t1 {
            Ok(self.terminal_value())
        } else {
            self.eval(t)
        }
    }

    /// Supremum norm of `self - other` over `[t0, t1)`; both must share the interval.
    pub fn sup_distance(&self, other: &JumpFunction) -> Result<f64> {
        if self.t0 != other.t0 || self.t1 != other.t1 {
            return Err(Error::InvalidArgument("sup distance needs a common interval".into()));
        }
        let (mut i, mut j) = (0usize, 0usize);
        let mut worst = (self.values[0] - other.values[0]).abs();
        while i < self.breakpoints.len() || j < other.breakpoints.len() {
            let next_a = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
            let next_b = other.breakpoints.get(j).copied().unwrap_or(f64::INFINITY);
            let t = next_a.min(next_b);
            if next_a == t {
                i += 1;
            }
            if next_b == t {
                j += 1;
            }
            worst = worst.max((self.values[i] - other.values[j]).abs());
        }
        Ok(worst)
    }

    /// CSV `t,value`: the interval start, one row per breakpoint, and `(t1, f(t1-))`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,value")?;
        writeln!(out, "{:.16e},{:.16e}", self.t0, self.values[0])?;
        for (x, v) in self.breakpoints.iter().zip(&self.values[1..]) {
            writeln!(out, "{x:.16e},{v:.16e}")?;
        }
        writeln!(out, "{:.16e},{:.16e}", self.t1, self.terminal_value())
    }

    pub fn metadata(&self, alpha: &AlphaModel, points: &PointSet) -> JumpFunctionMeta {
        JumpFunctionMeta {
            t0: self.t0,
            t1: self.t1,
            a0: self.a0(),
            alpha: alpha.spec(),
            alpha_label: alpha.label(),
            point_set_hash: points.content_hash(),
            point_count: points.len(),
            breakpoints: self.breakpoints.len(),
        }
    }
}

/// JSON sidecar describing how a [`JumpFunction`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpFunctionMeta {
    pub t0: f64,
    pub t1: f64,
    pub a0: f64,
    pub alpha: Option<AlphaSpec>,
    pub alpha_label: String,
    pub point_set_hash: String,
    pub point_count: usize,
    pub breakpoints: usize,
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in terms {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Left-to-right pass shared by every sequential solver. `jump` receives the
/// common `x`, the pre-jump value and all points at that `x`.
pub(crate) fn integrate<F>(ps: &PointSet, a0: f64, mut jump: F) -> Result<JumpFunction>
where
    F: FnMut(f64, f64, &[Point]) -> Result<f64>,
{
    let (t0, t1) = ps.interval();
    let mut breakpoints = Vec::with_capacity(ps.len());
    let mut values = Vec::with_capacity(ps.len() + 1);
    values.push(a0);
    let mut current = a0;
    for group in ps.groups() {
        let x = group[0].x;
        current += jump(x, current, group)?;
        breakpoints.push(x);
        values.push(current);
    }
    Ok(JumpFunction::from_parts(t0, t1, breakpoints, values))
}

#[inline]
fn stable_jump(group: &[Point], alpha: f64) -> f64 {
    let s = -1.0 / alpha;
    match group {
        [single] => spow(single.y, s),
        _ => compensated_sum(group.iter().map(|p| spow(p.y, s))),
    }
}

/// Exact sequential construction.
pub fn solve_sequential(ps: &PointSet, alpha: &AlphaModel, a0: f64) -> Result<JumpFunction> {
    integrate(ps, a0, |_, pre, group| Ok(stable_jump(group, alpha.eval(pre)?)))
}

/// `solve_sequential` on `{(x, y) ∈ Π : |y| <= n}`.
pub fn solve_truncated(ps: &PointSet, alpha: &AlphaModel, a0: f64, n: f64) -> Result<JumpFunction> {
    solve_sequential(&ps.truncated(n), alpha, a0)
}

/// `M Σ |y|^{-1/(a,b)}` over the whole set.
pub fn contraction_sum(ps: &PointSet, alpha: &AlphaModel) -> f64 {
    let m = alpha.derivative_ratio_bound();
    if m == 0.0 {
        return 0.0;
    }
    let (a, b) = (alpha.a(), alpha.b());
    m * compensated_sum(ps.points().iter().map(|p| weight_ab(p.y, a, b)))
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub function: JumpFunction,
    /// Applications of the map needed to reach the returned iterate's predecessor.
    pub iterations: usize,
    /// Sup-norm change of the final application.
    pub final_change: f64,
}

/// Fixed point of `K(f)(t) = a0 + Σ_{x ≤ t} y^<-1/alpha(f(x-))>`, iterated from
/// `f ≡ a0` until successive iterates differ by less than `tol` in sup norm.
///
/// Requires `contraction_sum < 1`; otherwise use [`solve_sequential`], which
/// needs no condition on finite sets.
pub fn solve_picard(ps: &PointSet, alpha: &AlphaModel, a0: f64, tol: f64, max_iter: usize) -> Result<PicardSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let sum = contraction_sum(ps, alpha);
    if !(sum < 1.0) {
        return Err(Error::NotContractive { sum });
    }
    let groups: Vec<&[Point]> = ps.groups().collect();
    let breakpoints: Vec<f64> = groups.iter().map(|g| g[0].x).collect();
    // Iterate represented by its values: current[k] is f on the k-th piece.
    let mut current = vec![a0; groups.len() + 1];
    let mut next = vec![a0; groups.len() + 1];
    let mut applications = 0usize;
    loop {
        next[0] = a0;
        for (k, group) in groups.iter().enumerate() {
            next[k + 1] = next[k] + stable_jump(group, alpha.eval(current[k])?);
        }
        applications += 1;
        let change = current.iter().zip(&next).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        if applications > 1 && change < tol {
            let (t0, t1) = ps.interval();
            return Ok(PicardSolution {
                function: JumpFunction::from_parts(t0, t1, breakpoints, next),
                iterations: applications - 1,
                final_change: change,
            });
        }
        if applications > max_iter {
            return Err(Error::NoConvergence { iterations: max_iter, change });
        }
        std::mem::swap(&mut current, &mut next);
    }
}

/// The two forms of the truncation error estimate `||f_n - f||∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBound {
    /// `Π_{|y|<=n} (1 + M |y|^{-1/(a,b)}) Σ_{|y|>n} |y|^{-1/b}`
    pub product: f64,
    /// `exp(M Σ_{|y|<=n} |y|^{-1/(a,b)}) Σ_{|y|>n} |y|^{-1/b}`
    pub exponential: f64,
}

/// Error bound for [`solve_truncated`] at level `n` against the full set.
///
/// Tail terms use `max(|y|^{-1/a}, |y|^{-1/b})`, which is `|y|^{-1/b}` for the
/// usual `|y| > n >= 1` and keeps the bound valid when `n < 1`.
pub fn truncation_error_bound(ps: &PointSet, alpha: &AlphaModel, n: f64) -> TruncationBound {
    cauchy_bound(ps, alpha, n, f64::INFINITY)
}

/// Bound on `||f_m - f_n||∞` for `n < m`: the tail runs over `n < |y| <= m`.
pub fn cauchy_bound(ps: &PointSet, alpha: &AlphaModel, n: f64, m: f64) -> TruncationBound {
    let (a, b, big_m) = (alpha.a(), alpha.b(), alpha.derivative_ratio_bound());
    let mut log_product = 0.0;
    let mut weight_sum = 0.0;
    let mut tail = Vec::new();
    for p in ps.points() {
        let ay = p.y.abs();
        if ay <= n {
            if big_m > 0.0 {
                let w = big_m * weight_ab(p.y, a, b);
                log_product += w.ln_1p();
                weight_sum += w;
            }
        } else if ay <= m {
            tail.push(jump_envelope(p.y, a, b));
        }
    }
    let tail = compensated_sum(tail);
    if tail == 0.0 {
        return TruncationBound { product: 0.0, exponential: 0.0 };
    }
    TruncationBound { product: log_product.exp() * tail, exponential: weight_sum.exp() * tail }
}

/// Weight `w(alpha)` multiplying each jump.
#[derive(Clone)]
pub enum Weight {
    Unit,
    Constant(f64),
    /// `w(alpha) = C_alpha`, the stable normalising constant.
    StableNorm,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::Unit => write!(f, "Unit"),
            Weight::Constant(c) => write!(f, "Constant({c})"),
            Weight::StableNorm => write!(f, "StableNorm"),
            Weight::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Config-level weight description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    Unit,
    Constant(f64),
    StableNorm,
}

impl From<WeightSpec> for Weight {
    fn from(spec: WeightSpec) -> Self {
        match spec {
            WeightSpec::Unit => Weight::Unit,
            WeightSpec::Constant(c) => Weight::Constant(c),
            WeightSpec::StableNorm => Weight::StableNorm,
        }
    }
}

impl Weight {
    #[inline]
    pub fn eval(&self, alpha: f64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Constant(c) => *c,
            Weight::StableNorm => stable_norm_constant_closed(alpha),
            Weight::Custom(f) => f(alpha),
        }
    }
}

/// Sequential pass with jumps `w(alpha(f(x-))) y^<-1/alpha(f(x-))>`.
pub fn solve_weighted(ps: &PointSet, alpha: &AlphaModel, weight: &Weight, a0: f64) -> Result<JumpFunction> {
    if let Weight::Unit = weight {
        return solve_sequential(ps, alpha, a0);
    }
    integrate(ps, a0, |_, pre, group| {
        let al = alpha.eval(pre)?;
        Ok(weight.eval(al) * stable_jump(group, al))
    })
}

type Field = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Index map depending on time, state and an auxiliary signal:
/// `(t, z, gamma) -> alpha ∈ [a, b]`.
#[derive(Clone)]
pub struct NonAutonomousAlpha {
    f: Field,
    a: f64,
    b: f64,
}

impl NonAutonomousAlpha {
    pub fn new<F>(f: F, a: f64, b: f64) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(a > 0.0 && a <= b && b < 1.0) {
            return Err(Error::InvalidModel(format!("range [{a}, {b}] must satisfy 0 < a <= b < 1")));
        }
        Ok(NonAutonomousAlpha { f: Arc::new(f), a, b })
    }

    /// The autonomous model seen as a field that ignores time and the signal.
    pub fn from_model(model: &AlphaModel) -> Self {
        let m = model.clone();
        let f: Field = Arc::new(move |_, z, _| m.eval(z).unwrap_or(f64::NAN));
        NonAutonomousAlpha { f, a: model.a(), b: model.b() }
    }

    pub fn eval(&self, t: f64, z: f64, gamma: f64) -> Result<f64> {
        let value = (self.f)(t, z, gamma);
        if value >= self.a - RANGE_SLACK && value <= self.b + RANGE_SLACK {
            Ok(value)
        } else {
            Err(Error::RangeViolation { z, value, a: self.a, b: self.b })
        }
    }
}

/// Sequential pass with the exponent frozen at the jump time:
/// jump at `x` uses `alpha3(x, f(x-), g(x))`.
pub fn solve_nonautonomous(
    ps: &PointSet,
    alpha3: &NonAutonomousAlpha,
    g: &dyn Fn(f64) -> f64,
    a0: f64,
) -> Result<JumpFunction> {
    integrate(ps, a0, |x, pre, group| Ok(stable_jump(group, alpha3.eval(x, pre, g(x))?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: &[(f64, f64)]) -> PointSet {
        PointSet::new(0.0, 1.0, points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn empty_set_gives_constant() {
        let f = solve_sequential(&set(&[]), &AlphaModel::constant(0.5).unwrap(), 1.5).unwrap();
        assert_eq!(f, JumpFunction::constant(0.0, 1.0, 1.5));
        assert_eq!(f.eval(0.99).unwrap(), 1.5);
    }

    #[test]
    fn single_jump_closed_form() {
        let f = solve_sequential(&set(&[(0.4, 4.0)]), &AlphaModel::constant(0.5).unwrap(), 0.0).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        assert_eq!(f.eval(0.3999).unwrap(), 0.0);
        assert_eq!(f.eval(0.4).unwrap(), 0.0625);
        assert_eq!(f.left_limit(0.4).unwrap(), 0.0);
        assert_eq!(f.left_limit(1.0).unwrap(), 0.0625);
        assert!(matches!(f.eval(1.0), Err(Error::OutOfInterval { .. })));
        assert!(matches!(f.left_limit(0.0), Err(Error::OutOfInterval { .. })));
        assert!(f.eval(-0.1).is_err());
    }

    #[test]
    fn co_located_points_share_pre_jump_value() {
        let alpha = AlphaModel::cosine(0.57, 0.4).unwrap();
        let f = solve_sequential(&set(&[(0.5, 2.0), (0.5, -3.0)]), &alpha, 0.0).unwrap();
        let s = -1.0 / 0.97f64;
        let expected = 2f64.powf(s) - 3f64.powf(s);
        assert!((f.eval(0.5).unwrap() - expected).abs() < 1e-15);
        assert_eq!(f.breakpoints().len(), 1);
    }

    #[test]
    fn sup_distance_merges_breakpoints() {
        let f = JumpFunction::from_parts(0.0, 1.0, vec![0.2, 0.6], vec![0.0, 1.0, 3.0]);
        let g = JumpFunction::from_parts(0.0, 1.0, vec![0.4], vec![0.0, 2.5]);
        // On [0.2, 0.4) f=1, g=0; on [0.4,0.6) f=1, g=2.5; on [0.6,1) f=3, g=2.5.
        assert_eq!(f.sup_distance(&g).unwrap(), 1.5);
        assert_eq!(g.sup_distance(&f).unwrap(), 1.5);
        assert_eq!(f.sup_distance(&f).unwrap(), 0.0);
        let other = JumpFunction::constant(0.0, 2.0, 0.0);
        assert!(f.sup_distance(&other).is_err());
    }

    #[test]
    fn csv_export_has_endpoints() {
        let f = JumpFunction::from_parts(0.0, 1.0, vec![0.5], vec![1.0, 2.0]);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,value");
        assert!(lines[3].starts_with("1.0000000000000000e0,2.0"));
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = compensated_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(v, 2.0);
    }

    #[test]
    fn contraction_sum_examples() {
        assert_eq!(contraction_sum(&set(&[(0.5, 2.0)]), &AlphaModel::constant(0.6).unwrap()), 0.0);
        assert_eq!(contraction_sum(&set(&[]), &AlphaModel::cosine(0.57, 0.4).unwrap()), 0.0);
        // a = 0.5, b = 0.8, M = 1 via a declared custom model.
        let custom = AlphaModel::custom("band", |z: f64| 0.65 + 0.15 * z.sin(), 0.5, 0.8, Some(1.0)).unwrap();
        let got = contraction_sum(&set(&[(0.5, std::f64::consts::E)]), &custom);
        assert!((got - 2.0 * (-1.25f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn truncation_bound_examples() {
        let alpha = AlphaModel::constant(0.5).unwrap();
        let ps = set(&[(0.3, 1.5), (0.6, 4.0)]);
        let bound = truncation_error_bound(&ps, &alpha, 2.0);
        assert_eq!(bound.product, 0.0625);
        assert_eq!(bound.exponential, 0.0625);
        assert_eq!(truncation_error_bound(&ps, &alpha, 10.0).product, 0.0);
        let cosine = AlphaModel::cosine(0.57, 0.4).unwrap();
        let b = truncation_error_bound(&ps, &cosine, 2.0);
        assert!(b.exponential >= b.product && b.product > 0.0);
    }

    #[test]
    fn picard_constant_alpha_one_iteration() {
        let alpha = AlphaModel::constant(0.6).unwrap();
        let ps = set(&[(0.1, 1.0), (0.5, -2.0), (0.7, 0.3)]);
        let sol = solve_picard(&ps, &alpha, 0.2, 1e-12, 50).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.function, solve_sequential(&ps, &alpha, 0.2).unwrap());
        let empty = solve_picard(&set(&[]), &AlphaModel::cosine(0.57, 0.4).unwrap(), 0.7, 1e-12, 50).unwrap();
        assert_eq!(empty.iterations, 1);
        assert_eq!(empty.function, JumpFunction::constant(0.0, 1.0, 0.7));
    }

    #[test]
    fn picard_rejects_non_contractive_sets() {
        let alpha = AlphaModel::cosine(0.57, 0.4).unwrap();
        let err = solve_picard(&set(&[(0.5, 1.0)]), &alpha, 0.0, 1e-10, 100).unwrap_err();
        assert!(matches!(err, Error::NotContractive { .. }));
        assert!(solve_picard(&set(&[]), &alpha, 0.0, 0.0, 100).is_err());
    }

    #[test]
    fn picard_reports_non_convergence() {
        let alpha = AlphaModel::cosine(0.57, 0.4).unwrap();
        let ps = set(&[(0.2, 200.0), (0.4, -300.0), (0.6, 500.0)]);
        assert!(contraction_sum(&ps, &alpha) < 1.0);
        let err = solve_picard(&ps, &alpha, 0.0, 1e-300, 2).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }));
    }

    #[test]
    fn weighted_examples() {
        let ps = set(&[(0.2, 1.3), (0.6, -0.7)]);
        let cosine = AlphaModel::cosine(0.57, 0.4).unwrap();
        assert_eq!(
            solve_weighted(&ps, &cosine, &Weight::Unit, 0.1).unwrap(),
            solve_sequential(&ps, &cosine, 0.1).unwrap()
        );
        let constant = AlphaModel::constant(0.5).unwrap();
        let plain = solve_sequential(&ps, &constant, 0.0).unwrap();
        let doubled = solve_weighted(&ps, &constant, &Weight::Constant(2.0), 0.0).unwrap();
        for (p, d) in plain.values().iter().zip(doubled.values()) {
            assert_eq!(2.0 * p, *d);
        }
        let normed = solve_weighted(&ps, &constant, &Weight::StableNorm, 0.0).unwrap();
        for (p, n) in plain.values().iter().zip(normed.values()) {
            assert!((p * 2.0 / std::f64::consts::PI - n).abs() < 1e-14);
        }
    }

    #[test]
    fn nonautonomous_reductions() {
        let ps = set(&[(0.2, 1.3), (0.6, -0.7), (0.6, 2.0), (0.9, 0.5)]);
        let cosine = AlphaModel::cosine(0.57, 0.4).unwrap();
        let field = NonAutonomousAlpha::from_model(&cosine);
        let g = |t: f64| t * t;
        assert_eq!(solve_nonautonomous(&ps, &field, &g, 0.3).unwrap(), solve_sequential(&ps, &cosine, 0.3).unwrap());

        let flat = NonAutonomousAlpha::new(|_, _, _| 0.4, 0.4, 0.4).unwrap();
        let f = solve_nonautonomous(&ps, &flat, &g, 5.0).unwrap();
        let jumps: Vec<f64> = f.values().windows(2).map(|w| w[1] - w[0]).collect();
        assert!((jumps[0] - 1.3f64.powf(-2.5)).abs() < 1e-14);
        assert!((jumps[2] - 0.5f64.powf(-2.5)).abs() < 1e-12);

        let escaping = NonAutonomousAlpha::new(|t, _, _| 0.3 + t, 0.3, 0.8).unwrap();
        assert!(matches!(solve_nonautonomous(&ps, &escaping, &g, 0.0), Err(Error::RangeViolation { .. })));
    }
}
