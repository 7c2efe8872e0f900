//! Empirical checks of local structure: localization of the scaled increments
//! and Hölder-type growth of increments.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::alpha_model::AlphaModel;
use crate::error::{Error, Result};
use crate::point_process::{generate_poisson_strip, Point, PointSet, StripSpec};
use crate::rng::path_seed;
use crate::sim::{batch, cms_stable_sample, stable_motion_scale, SampledPath, TruncationPlan};
use crate::solver::solve_sequential;
use crate::special::stable_norm_constant_closed;

/// Size of the reference sample drawn from the limiting stable law.
pub const REFERENCE_COUNT: usize = 100_000;

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_distance(samples_a: &[f64], samples_b: &[f64]) -> Result<f64> {
    let a = sorted(samples_a)?;
    let b = sorted(samples_b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // Step past every copy of the smaller value in both samples before comparing.
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample statistic `sup_x |F_n(x) - F(x)|` against a continuous `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted(samples)?;
    let n = v.len() as f64;
    Ok(v.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}

/// Asymptotic p-value of a KS statistic `d` at effective size `n_eff`
/// (Kolmogorov series with Stephens' small-sample correction).
pub fn kolmogorov_pvalue(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// `n m / (n + m)`.
pub fn effective_size(n: usize, m: usize) -> f64 {
    (n as f64 * m as f64) / (n + m) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub z0: f64,
    pub alpha_at_z0: f64,
    pub r_values: Vec<f64>,
    pub u: f64,
    pub ks_stats: Vec<f64>,
    pub sample_count: Vec<usize>,
    pub reference_count: usize,
    /// Scale of the stable reference law, `(2u)^{1/alpha}/C_alpha`.
    pub reference_scale: f64,
    /// KS distance at each `r` against the law with scale `u^{1/alpha}/C_alpha`, kept as a diagnostic.
    pub ks_unit_intensity_scale: Vec<f64>,
    /// Cutoffs used in the rescaled coordinates `y' = r y`.
    pub plan: TruncationPlan,
}

impl LocalizationReport {
    /// Standard error attached to each KS statistic: `1/(2 sqrt(n_eff))`, the
    /// largest standard deviation of an empirical CDF value.
    pub fn standard_errors(&self) -> Vec<f64> {
        self.sample_count.iter().map(|&n| 0.5 / effective_size(n, self.reference_count).sqrt()).collect()
    }

    /// KS statistics are non-increasing along `r_values`, up to
    /// `allowed_inversions` increases each no larger than `se_multiple` standard errors.
    pub fn trend_holds(&self, allowed_inversions: usize, se_multiple: f64) -> bool {
        let se = self.standard_errors();
        let mut inversions = 0;
        for i in 1..self.ks_stats.len() {
            let rise = self.ks_stats[i] - self.ks_stats[i - 1];
            if rise > 0.0 {
                let allowed = se_multiple * se[i].max(se[i - 1]);
                if rise > allowed {
                    return false;
                }
                inversions += 1;
            }
        }
        inversions <= allowed_inversions
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "r,ks,n")?;
        for ((r, ks), n) in self.r_values.iter().zip(&self.ks_stats).zip(&self.sample_count) {
            writeln!(out, "{r:.16e},{ks:.16e},{n}")?;
        }
        Ok(())
    }
}

/// Samples of `(Z(ru) - z0) / r^{1/alpha(z0)}` for a process restarted at `z0`.
///
/// Each path draws the strip `(0,u) x ((-N,-K] ∪ [K,N))` in rescaled
/// coordinates and maps it to `x = r x'`, `y = y'/r`, which preserves the
/// Poisson law; the same seeds are reused for every `r`.
pub fn localization_samples(
    alpha: &AlphaModel,
    z0: f64,
    r: f64,
    u: f64,
    n_paths: usize,
    plan: &TruncationPlan,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale r must be positive, got {r}")));
    }
    let al = alpha.eval(z0)?;
    let norm = r.powf(1.0 / al);
    let end = r * u;
    batch(n_paths, seed, |s| {
        let unit = generate_poisson_strip(&StripSpec { t0: 0.0, t1: u, k: plan.k, n: plan.n, seed: s })?;
        let points = unit
            .points()
            .iter()
            .map(|p| Point::new((r * p.x).clamp(f64::MIN_POSITIVE, end.next_down()), p.y / r))
            .collect();
        let ps = PointSet::new(0.0, end, points)?;
        let f = solve_sequential(&ps, alpha, z0)?;
        Ok((f.terminal_value() - z0) / norm)
    })
}

pub fn localization_experiment(
    alpha: &AlphaModel,
    z0: f64,
    r_values: &[f64],
    u: f64,
    n_paths: usize,
    plan: &TruncationPlan,
    seed: u64,
) -> Result<LocalizationReport> {
    localization_experiment_with(alpha, z0, r_values, u, n_paths, plan, seed, REFERENCE_COUNT)
}

#[allow(clippy::too_many_arguments)]
pub fn localization_experiment_with(
    alpha: &AlphaModel,
    z0: f64,
    r_values: &[f64],
    u: f64,
    n_paths: usize,
    plan: &TruncationPlan,
    seed: u64,
    reference_count: usize,
) -> Result<LocalizationReport> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidArgument(format!("u must lie in (0, 1], got {u}")));
    }
    if r_values.is_empty() {
        return Err(Error::InvalidArgument("at least one scale r is required".into()));
    }
    if n_paths < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 paths per scale, got {n_paths}")));
    }
    let al = alpha.eval(z0)?;
    let reference_scale = stable_motion_scale(al, u);
    let reference = cms_stable_sample(al, reference_scale, reference_count, path_seed(seed, u64::MAX))?;
    let unit_scale = reference_scale / 2f64.powf(1.0 / al);
    debug_assert!((unit_scale - u.powf(1.0 / al) / stable_norm_constant_closed(al)).abs() <= 1e-12 * unit_scale);
    let unit_reference: Vec<f64> = reference.iter().map(|v| v / 2f64.powf(1.0 / al)).collect();

    let mut ks_stats = Vec::with_capacity(r_values.len());
    let mut ks_unit = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let samples = localization_samples(alpha, z0, r, u, n_paths, plan, seed)?;
        ks_stats.push(ks_distance(&samples, &reference)?);
        ks_unit.push(ks_distance(&samples, &unit_reference)?);
    }
    Ok(LocalizationReport {
        z0,
        alpha_at_z0: al,
        r_values: r_values.to_vec(),
        u,
        ks_stats,
        sample_count: vec![n_paths; r_values.len()],
        reference_count,
        reference_scale,
        ks_unit_intensity_scale: ks_unit,
        plan: *plan,
    })
}

/// Least-squares line through `(ln h, ln |Z(t+h) - Z(t)|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub slope: f64,
    pub intercept: f64,
    /// Scales actually used (nonzero increments).
    pub h_used: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn increments(path: &SampledPath, t: f64, h_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    let base = path.value_at(t)?;
    h_values
        .iter()
        .map(|&h| {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!("scales must be positive, got {h}")));
            }
            Ok((h, (path.value_at(t + h)? - base).abs()))
        })
        .collect()
}

pub fn holder_estimate(path: &SampledPath, t: f64, h_values: &[f64]) -> Result<HolderFit> {
    if h_values.len() < 3 {
        return Err(Error::InsufficientScales { got: h_values.len() });
    }
    let pairs: Vec<(f64, f64)> =
        increments(path, t, h_values)?.into_iter().filter(|&(_, d)| d > 0.0).map(|(h, d)| (h.ln(), d.ln())).collect();
    if pairs.is_empty() {
        return Err(Error::AllIncrementsZero);
    }
    if pairs.len() < 3 {
        return Err(Error::InsufficientScales { got: pairs.len() });
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("scales must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(HolderFit {
        slope,
        intercept,
        h_used: pairs.iter().map(|p| p.0.exp()).collect(),
        residuals: pairs.iter().map(|p| p.1 - (intercept + slope * p.0)).collect(),
    })
}

/// Smallest `C` with `|Z(t+h) - Z(t)| <= C h^exponent` on the given scales.
pub fn holder_constant(path: &SampledPath, t: f64, exponent: f64, h_values: &[f64]) -> Result<f64> {
    Ok(increments(path, t, h_values)?.into_iter().map(|(h, d)| d / h.powf(exponent)).fold(0.0, f64::max))
}

/// `count` scales spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_scales(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { hi } else { lo * (ratio * i as f64).exp() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{PathMeta, Variant};

    #[test]
    fn ks_examples() {
        let a = [0.3, 0.1, 0.2];
        assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_distance(&[1.0, 2.0], &[3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert!(matches!(ks_distance(&[], &a), Err(Error::EmptySample)));
        // Ties across samples are stepped together.
        assert_eq!(ks_distance(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]).unwrap(), 1.0 / 3.0);
        let d = ks_one_sample(&[0.5], |x| x).unwrap();
        assert_eq!(d, 0.5);
    }

    #[test]
    fn pvalue_tracks_critical_value() {
        // The 1% point of the Kolmogorov law is about 1.628.
        let n: f64 = 10_000.0;
        let d = 1.628 / n.sqrt();
        assert!((kolmogorov_pvalue(d, n) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_pvalue(0.0, n), 1.0);
    }

    fn step_path(grid: Vec<f64>, values: Vec<f64>) -> SampledPath {
        let meta = PathMeta {
            variant: Variant::Selfstab,
            seed: 0,
            a0: 0.0,
            k: None,
            n: None,
            n_terms: None,
            alpha: "test".into(),
            alpha_spec: None,
            point_count: 0,
            residual: None,
        };
        SampledPath { grid, values, meta }
    }

    #[test]
    fn holder_fit_examples() {
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let square = step_path(grid.clone(), grid.iter().map(|t| t * t).collect());
        let fit = holder_estimate(&square, 0.0, &[0.01, 0.1, 0.5]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        let mut single = vec![0.0; 1001];
        single[1..].iter_mut().for_each(|v| *v = 3.0);
        let fit = holder_estimate(&step_path(grid.clone(), single), 0.0, &[0.01, 0.1, 0.5]).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        let flat = step_path(grid, vec![1.0; 1001]);
        assert!(matches!(holder_estimate(&flat, 0.0, &[0.01, 0.1, 0.5]), Err(Error::AllIncrementsZero)));
        assert!(matches!(holder_estimate(&flat, 0.0, &[0.01, 0.1]), Err(Error::InsufficientScales { got: 2 })));
    }

    #[test]
    fn geometric_scales_hit_endpoints() {
        let h = geometric_scales(1e-4, 1e-1, 4);
        assert_eq!(h[0], 1e-4);
        assert_eq!(h[3], 1e-1);
        assert!((h[1] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn trend_rules() {
        let mut report = LocalizationReport {
            z0: 0.0,
            alpha_at_z0: 0.5,
            r_values: vec![1e-2, 1e-3, 1e-4],
            u: 1.0,
            ks_stats: vec![0.2, 0.1, 0.105],
            sample_count: vec![4000; 3],
            reference_count: 100_000,
            reference_scale: 1.0,
            ks_unit_intensity_scale: vec![0.0; 3],
            plan: TruncationPlan::explicit(0.01, 100.0).unwrap(),
        };
        assert!(report.trend_holds(1, 2.0));
        report.ks_stats = vec![0.1, 0.2, 0.05];
        assert!(!report.trend_holds(1, 2.0));
    }
}
