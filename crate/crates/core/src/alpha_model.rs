//! The stability-index map `alpha: R -> [a, b] ⊂ (0, 1)` and the scalar
//! estimates built on it.
//!
//! Built-in families carry closed-form derivatives, so their range bounds and
//! the derivative-ratio bound `M = sup |alpha'(z)| / alpha(z)^2` are computed at
//! construction (dense grid, then golden-section refinement around the best
//! grid cell). User-supplied evaluators must declare `(a, b, M)`; the range is
//! spot-checked on a grid, `M` is trusted.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Slack allowed when checking `a <= alpha(z) <= b`.
pub const RANGE_SLACK: f64 = 1e-12;

/// Grid resolution used to locate the derivative-ratio supremum.
const BOUND_GRID: usize = 1 << 16;

/// Half-width of the window `[-W, W]` on which user evaluators are range-checked.
const USER_CHECK_HALF_WIDTH: f64 = 100.0;
const USER_CHECK_POINTS: usize = 20_001;

/// Serializable description of an alpha model, as found in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSpec {
    Constant {
        value: f64,
    },
    /// `c0 + c1 cos z`
    Cosine {
        c0: f64,
        c1: f64,
    },
    /// `c0 + c1 / (1 + c2 z^2)`
    Rational {
        c0: f64,
        c1: f64,
        c2: f64,
    },
    /// Arbitrary expression in `z` with declared bounds.
    Expr {
        expr: String,
        a: f64,
        b: f64,
        m: Option<f64>,
    },
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Constant(f64),
    Cosine { c0: f64, c1: f64 },
    Rational { c0: f64, c1: f64, c2: f64 },
    Expr(Expr),
    Custom { name: String, f: Evaluator },
}

/// A validated stability-index function. Immutable once built.
#[derive(Clone)]
pub struct AlphaModel {
    kind: Kind,
    a: f64,
    b: f64,
    m: f64,
}

impl fmt::Debug for AlphaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphaModel")
            .field("kind", &self.label())
            .field("a", &self.a)
            .field("b", &self.b)
            .field("m", &self.m)
            .finish()
    }
}

fn check_unit_range(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a <= b && b < 1.0) {
        return Err(Error::InvalidModel(format!("range [{a}, {b}] must satisfy 0 < a <= b < 1")));
    }
    Ok(())
}

impl AlphaModel {
    pub fn constant(value: f64) -> Result<Self> {
        check_unit_range(value, value)?;
        Ok(AlphaModel { kind: Kind::Constant(value), a: value, b: value, m: 0.0 })
    }

    /// `alpha(z) = c0 + c1 cos z`. A zero `c1` yields the constant model.
    pub fn cosine(c0: f64, c1: f64) -> Result<Self> {
        if c1 == 0.0 {
            return Self::constant(c0);
        }
        let (a, b) = (c0 - c1.abs(), c0 + c1.abs());
        check_unit_range(a, b)?;
        let ratio = move |z: f64| (c1 * z.sin()).abs() / (c0 + c1 * z.cos()).powi(2);
        let m = grid_maximum(&ratio, 0.0, TAU, BOUND_GRID);
        Ok(AlphaModel { kind: Kind::Cosine { c0, c1 }, a, b, m })
    }

    /// `alpha(z) = c0 + c1 / (1 + c2 z^2)` with `c2 > 0`.
    pub fn rational(c0: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(c2 > 0.0) {
            return Err(Error::InvalidModel(format!("rational family needs c2 > 0, got {c2}")));
        }
        if c1 == 0.0 {
            return Self::constant(c0);
        }
        let (a, b) = (c0.min(c0 + c1), c0.max(c0 + c1));
        check_unit_range(a, b)?;
        let ratio = move |z: f64| {
            let q = 1.0 + c2 * z * z;
            let alpha = c0 + c1 / q;
            (2.0 * c1 * c2 * z).abs() / (q * q) / (alpha * alpha)
        };
        // Even in z; |alpha'| decays like z^-3 beyond a few multiples of 1/sqrt(c2).
        let reach = 40.0 / c2.sqrt();
        let m = grid_maximum(&ratio, 0.0, reach, BOUND_GRID);
        Ok(AlphaModel { kind: Kind::Rational { c0, c1, c2 }, a, b, m })
    }

    /// Expression model with declared bounds. `m` must be declared and positive.
    pub fn expression(source: &str, a: f64, b: f64, m: Option<f64>) -> Result<Self> {
        let expr = Expr::parse(source)?;
        let evaluator = expr.clone();
        Self::declared(Kind::Expr(expr), &move |z| evaluator.eval(z), a, b, m)
    }

    /// Arbitrary evaluator with declared bounds.
    pub fn custom<F>(name: &str, f: F, a: f64, b: f64, m: Option<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: Evaluator = Arc::new(f);
        let probe = f.clone();
        Self::declared(Kind::Custom { name: name.to_string(), f }, &move |z| probe(z), a, b, m)
    }

    fn declared(kind: Kind, f: &dyn Fn(f64) -> f64, a: f64, b: f64, m: Option<f64>) -> Result<Self> {
        check_unit_range(a, b)?;
        let m = m.ok_or(Error::MissingBound)?;
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "declared M must be positive and finite for non-constant models, got {m}"
            )));
        }
        for i in 0..USER_CHECK_POINTS {
            let z = -USER_CHECK_HALF_WIDTH + 2.0 * USER_CHECK_HALF_WIDTH * i as f64 / (USER_CHECK_POINTS - 1) as f64;
            let value = f(z);
            if !(value >= a - RANGE_SLACK && value <= b + RANGE_SLACK) {
                return Err(Error::RangeViolation { z, value, a, b });
            }
        }
        Ok(AlphaModel { kind, a, b, m })
    }

    pub fn from_spec(spec: &AlphaSpec) -> Result<Self> {
        match spec {
            AlphaSpec::Constant { value } => Self::constant(*value),
            AlphaSpec::Cosine { c0, c1 } => Self::cosine(*c0, *c1),
            AlphaSpec::Rational { c0, c1, c2 } => Self::rational(*c0, *c1, *c2),
            AlphaSpec::Expr { expr, a, b, m } => Self::expression(expr, *a, *b, *m),
        }
    }

    /// The config-level description, when the model has one.
    pub fn spec(&self) -> Option<AlphaSpec> {
        Some(match &self.kind {
            Kind::Constant(value) => AlphaSpec::Constant { value: *value },
            Kind::Cosine { c0, c1 } => AlphaSpec::Cosine { c0: *c0, c1: *c1 },
            Kind::Rational { c0, c1, c2 } => AlphaSpec::Rational { c0: *c0, c1: *c1, c2: *c2 },
            Kind::Expr(e) => AlphaSpec::Expr { expr: e.source().to_string(), a: self.a, b: self.b, m: Some(self.m) },
            Kind::Custom { .. } => return None,
        })
    }

    /// Short human-readable identifier.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Constant(v) => format!("constant({v})"),
            Kind::Cosine { c0, c1 } => format!("{c0}+{c1}*cos(z)"),
            Kind::Rational { c0, c1, c2 } => format!("{c0}+{c1}/(1+{c2}*z^2)"),
            Kind::Expr(e) => e.source().to_string(),
            Kind::Custom { name, .. } => format!("custom({name})"),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Derivative-ratio bound `M`; zero exactly for the constant model.
    pub fn derivative_ratio_bound(&self) -> f64 {
        self.m
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant(_))
    }

    fn raw(&self, z: f64) -> f64 {
        match &self.kind {
            Kind::Constant(v) => *v,
            Kind::Cosine { c0, c1 } => c0 + c1 * z.cos(),
            Kind::Rational { c0, c1, c2 } => c0 + c1 / (1.0 + c2 * z * z),
            Kind::Expr(e) => e.eval(z),
            Kind::Custom { f, .. } => f(z),
        }
    }

    /// `alpha(z)`, checked against the declared range.
    #[inline]
    pub fn eval(&self, z: f64) -> Result<f64> {
        let value = self.raw(z);
        if value >= self.a - RANGE_SLACK && value <= self.b + RANGE_SLACK {
            Ok(value)
        } else {
            Err(Error::RangeViolation { z, value, a: self.a, b: self.b })
        }
    }

    /// `sup |alpha'| / alpha^2` over `[lo, hi]` only.
    ///
    /// For built-in families this is computed from the closed-form derivative.
    /// A restricted value does not certify the global truncation bounds. For
    /// user evaluators the declared global `M` is returned.
    pub fn derivative_ratio_bound_on(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
        }
        let n = BOUND_GRID;
        Ok(match self.kind {
            Kind::Constant(_) => 0.0,
            Kind::Cosine { c0, c1 } => {
                let ratio = |z: f64| (c1 * z.sin()).abs() / (c0 + c1 * z.cos()).powi(2);
                if hi - lo >= TAU {
                    self.m
                } else {
                    grid_maximum(&ratio, lo, hi, n)
                }
            }
            Kind::Rational { c0, c1, c2 } => {
                let ratio = |z: f64| {
                    let q = 1.0 + c2 * z * z;
                    let alpha = c0 + c1 / q;
                    (2.0 * c1 * c2 * z).abs() / (q * q) / (alpha * alpha)
                };
                grid_maximum(&ratio, lo, hi, n)
            }
            Kind::Expr(_) | Kind::Custom { .. } => self.m,
        })
    }
}

/// Maximum of `g` over `[lo, hi]`: grid scan then golden-section refinement
/// in the neighbourhood of the best grid point.
pub(crate) fn grid_maximum(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let step = (hi - lo) / n as f64;
    let (mut best_i, mut best) = (0usize, g(lo));
    for i in 1..=n {
        let v = g(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let left = (lo + step * (best_i as f64 - 1.0)).max(lo);
    let right = (lo + step * (best_i as f64 + 1.0)).min(hi);
    best.max(golden_section_max(g, left, right))
}

fn golden_section_max(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = g(x1);
        }
    }
    f1.max(f2)
}

/// `r^<s> = sign(r) |r|^s`, with `0^<s> = 0` for `s > 0`.
pub fn signed_power(r: f64, s: f64) -> Result<f64> {
    if r == 0.0 {
        if s > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!("0^<{s}> is undefined for non-positive exponents")));
    }
    Ok(spow(r, s))
}

/// Unchecked signed power for callers that guarantee `r != 0`.
#[inline]
pub(crate) fn spow(r: f64, s: f64) -> f64 {
    r.abs().powf(s).copysign(r)
}

/// `|y|^{-1/(a,b)} = max{|y|^{-1/a}, |y|^{-1/b}} (1 + |log |y||)`.
pub fn y_weight_ab(y: f64, a: f64, b: f64) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Domain("y_weight_ab is undefined at y = 0".into()));
    }
    if !(a > 0.0 && a <= b && b < 1.0) {
        return Err(Error::Domain(format!("need 0 < a <= b < 1, got a={a}, b={b}")));
    }
    Ok(weight_ab(y, a, b))
}

#[inline]
pub(crate) fn weight_ab(y: f64, a: f64, b: f64) -> f64 {
    let ay = y.abs();
    let log_term = 1.0 + ay.ln().abs();
    ay.powf(-1.0 / a).max(ay.powf(-1.0 / b)) * log_term
}

/// `sup_{alpha ∈ [a,b]} |y|^{-1/alpha}`: `|y|^{-1/b}` for `|y| >= 1`, `|y|^{-1/a}` below.
#[inline]
pub(crate) fn jump_envelope(y: f64, a: f64, b: f64) -> f64 {
    let ay = y.abs();
    ay.powf(-1.0 / a).max(ay.powf(-1.0 / b))
}
