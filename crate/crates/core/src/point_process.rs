//! Plane point configurations: deterministic point sets for the solver and
//! Poisson samples on truncated strips `(t0,t1) x ((-N,-K] ∪ [K,N))`.

use std::cmp::Ordering;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{self, streams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

fn point_order(p: &Point, q: &Point) -> Ordering {
    p.x.total_cmp(&q.x).then(p.y.abs().total_cmp(&q.y.abs())).then(p.y.total_cmp(&q.y))
}

/// A finite point configuration in `(t0, t1) x (R \ {0})`, sorted by `x` then `|y|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    t0: f64,
    t1: f64,
    points: Vec<Point>,
}

impl PointSet {
    /// Validates and sorts `points`.
    pub fn new(t0: f64, t1: f64, mut points: Vec<Point>) -> Result<Self> {
        check_interval(t0, t1)?;
        for p in &points {
            validate_point(p, t0, t1, None)?;
        }
        points.sort_by(point_order);
        Ok(PointSet { t0, t1, points })
    }

    pub fn empty(t0: f64, t1: f64) -> Result<Self> {
        Self::new(t0, t1, Vec::new())
    }

    /// Points already known to satisfy the invariants (internal construction).
    fn from_sorted(t0: f64, t1: f64, points: Vec<Point>) -> Self {
        debug_assert!(points.windows(2).all(|w| point_order(&w[0], &w[1]) != Ordering::Greater));
        PointSet { t0, t1, points }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-configuration `{|y| <= n}`.
    pub fn truncated(&self, n: f64) -> PointSet {
        let points = self.points.iter().copied().filter(|p| p.y.abs() <= n).collect();
        PointSet::from_sorted(self.t0, self.t1, points)
    }

    /// Points with `x` strictly inside `(s, e)`, as a point set on that interval.
    pub fn restricted(&self, s: f64, e: f64) -> Result<PointSet> {
        check_interval(s, e)?;
        let points = self.points.iter().copied().filter(|p| p.x > s && p.x < e).collect();
        Ok(PointSet::from_sorted(s, e, points))
    }

    /// Consecutive runs of points sharing the same `x`.
    pub fn groups(&self) -> impl Iterator<Item = &[Point]> {
        self.points.chunk_by(|p, q| p.x == q.x)
    }

    /// Content hash over the interval and the exact bit patterns of all points.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.t0.to_bits().to_le_bytes());
        h.update(self.t1.to_bits().to_le_bytes());
        for p in &self.points {
            h.update(p.x.to_bits().to_le_bytes());
            h.update(p.y.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y")?;
        for p in &self.points {
            writeln!(out, "{:.16e},{:.16e}", p.x, p.y)?;
        }
        Ok(())
    }

    /// Parses `x,y` CSV text. Unsorted input is accepted and sorted, with a warning.
    pub fn parse_csv(text: &str, t0: f64, t1: f64) -> Result<PointSet> {
        check_interval(t0, t1)?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim().eq_ignore_ascii_case("x,y") => {}
            Some((_, header)) => {
                return Err(Error::Parse { line: 1, message: format!("expected header 'x,y', found '{header}'") })
            }
            None => return Err(Error::Parse { line: 1, message: "missing header 'x,y'".into() }),
        }
        let mut points = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let mut fields = raw.split(',');
            let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse { line, message: format!("expected two fields, found '{raw}'") });
            };
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse { line, message: format!("'{}': {e}", s.trim()) })
            };
            let p = Point::new(parse(xs)?, parse(ys)?);
            validate_point(&p, t0, t1, Some(line))?;
            points.push(p);
        }
        let sorted = points.windows(2).all(|w| point_order(&w[0], &w[1]) != Ordering::Greater);
        if !sorted {
            log::warn!("point file was not sorted by (x, |y|); sorting {} points", points.len());
            points.sort_by(point_order);
        }
        Ok(PointSet::from_sorted(t0, t1, points))
    }
}

fn check_interval(t0: f64, t1: f64) -> Result<()> {
    if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("interval ({t0}, {t1}) is empty or not finite")));
    }
    Ok(())
}

fn validate_point(p: &Point, t0: f64, t1: f64, line: Option<usize>) -> Result<()> {
    if !(p.y != 0.0 && p.y.is_finite()) {
        return Err(Error::InvariantViolation { line, message: format!("y must be finite and nonzero, got {}", p.y) });
    }
    if !(p.x > t0 && p.x < t1) {
        return Err(Error::InvariantViolation {
            line,
            message: format!("x = {} is not strictly inside ({t0}, {t1})", p.x),
        });
    }
    Ok(())
}

/// Writes a point set as CSV (`x,y` header, 17 significant digits).
pub fn save_points(ps: &PointSet, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    ps.write_csv(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Reads a point set written by [`save_points`] (or any `x,y` CSV) on `(t0, t1)`.
pub fn load_points(path: &Path, t0: f64, t1: f64) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    PointSet::parse_csv(&text, t0, t1)
}

/// A truncated strip `(t0,t1) x ((-N,-K] ∪ [K,N))` and the seed used to sample it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub t0: f64,
    pub t1: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub seed: u64,
}

impl StripSpec {
    pub fn validate(&self) -> Result<()> {
        check_interval(self.t0, self.t1)?;
        if !(self.k >= 0.0 && self.k <= self.n && self.n.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "strip cutoffs need 0 <= K <= N < inf, got K={}, N={}",
                self.k, self.n
            )));
        }
        Ok(())
    }

    /// Expected number of points, `2 (t1 - t0)(N - K)`.
    pub fn mean_count(&self) -> f64 {
        2.0 * (self.t1 - self.t0) * (self.n - self.k)
    }
}

/// One half-strip: `|y|` starts at `K` and grows by Exponential(T) gaps; the
/// first value reaching `N` is discarded.
fn sample_half_strip(spec: &StripSpec, stream: u64, sign: f64, out: &mut Vec<Point>) {
    let mut rng = rng::substream(spec.seed, stream);
    let width = spec.t1 - spec.t0;
    let mut level = spec.k;
    loop {
        level += rng::exponential(&mut rng, width);
        if level >= spec.n {
            break;
        }
        let x = spec.t0 + width * rng::open_unit(&mut rng);
        // Guard against rounding onto the closed endpoints of a wide interval.
        let x = x.clamp(spec.t0.next_up(), spec.t1.next_down());
        out.push(Point { x, y: sign * level });
    }
}

/// Samples a Poisson point process with Lebesgue mean measure on the strip.
/// Deterministic in `spec.seed`; the positive and negative half-strips use
/// independent substreams.
pub fn generate_poisson_strip(spec: &StripSpec) -> Result<PointSet> {
    spec.validate()?;
    let mut points = Vec::with_capacity((spec.mean_count() * 1.05 + 16.0).min(1e9) as usize);
    sample_half_strip(spec, streams::STRIP_POSITIVE, 1.0, &mut points);
    sample_half_strip(spec, streams::STRIP_NEGATIVE, -1.0, &mut points);
    points.sort_unstable_by(point_order);
    Ok(PointSet::from_sorted(spec.t0, spec.t1, points))
}

/// Smallest positive gap between consecutive distinct `x` values.
pub fn min_x_gap(ps: &PointSet) -> Result<f64> {
    let mut gap = f64::INFINITY;
    let mut distinct = 0usize;
    let mut prev: Option<f64> = None;
    for p in ps.points() {
        match prev {
            Some(q) if q == p.x => continue,
            Some(q) => gap = gap.min(p.x - q),
            None => {}
        }
        distinct += 1;
        prev = Some(p.x);
    }
    if distinct < 2 {
        return Err(Error::TooFewPoints);
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[(f64, f64)]) -> PointSet {
        PointSet::new(0.0, 1.0, points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn construction_sorts_and_validates() {
        let set = ps(&[(0.5, -3.0), (0.2, 1.0), (0.5, 2.0)]);
        let xs: Vec<(f64, f64)> = set.points().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(xs, vec![(0.2, 1.0), (0.5, 2.0), (0.5, -3.0)]);
        assert!(PointSet::new(0.0, 1.0, vec![Point::new(0.5, 0.0)]).is_err());
        assert!(PointSet::new(0.0, 1.0, vec![Point::new(1.0, 1.0)]).is_err());
        assert!(PointSet::new(0.0, 1.0, vec![Point::new(0.0, 1.0)]).is_err());
        assert!(PointSet::new(1.0, 1.0, vec![]).is_err());
    }

    #[test]
    fn min_gap_examples() {
        assert!((min_x_gap(&ps(&[(0.2, 1.0), (0.5, 1.0), (0.6, 1.0)])).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(min_x_gap(&ps(&[(0.3, 1.0), (0.3, 2.0)])), Err(Error::TooFewPoints)));
        assert!(matches!(min_x_gap(&ps(&[])), Err(Error::TooFewPoints)));
        let tied = ps(&[(0.3, 1.0), (0.3, -2.0), (0.7, 1.0)]);
        assert!((min_x_gap(&tied).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn groups_collect_ties() {
        let set = ps(&[(0.3, 1.0), (0.3, -2.0), (0.7, 1.0)]);
        let sizes: Vec<usize> = set.groups().map(|g| g.len()).collect();
        assert_eq!(sizes, vec![2, 1]);
    }

    #[test]
    fn empty_strip_when_cutoffs_coincide() {
        let spec = StripSpec { t0: 0.0, t1: 1.0, k: 5.0, n: 5.0, seed: 1 };
        assert!(generate_poisson_strip(&spec).unwrap().is_empty());
        let bad = StripSpec { k: 6.0, ..spec };
        assert!(generate_poisson_strip(&bad).is_err());
    }

    #[test]
    fn strip_is_deterministic_and_within_bounds() {
        let spec = StripSpec { t0: 2.0, t1: 5.0, k: 1.0, n: 40.0, seed: 12345 };
        let a = generate_poisson_strip(&spec).unwrap();
        let b = generate_poisson_strip(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.content_hash(), b.content_hash());
        for p in a.points() {
            assert!(p.x > 2.0 && p.x < 5.0);
            assert!(p.y.abs() > 1.0 && p.y.abs() < 40.0);
        }
        let other = generate_poisson_strip(&StripSpec { seed: 12346, ..spec }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = PointSet::parse_csv("x,y\n0.1,1\n0.5,0.0\n", 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { line: Some(3), .. }), "{err}");
        let err = PointSet::parse_csv("x,y\n0.1,abc\n", 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = PointSet::parse_csv("a,b\n", 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let unsorted = PointSet::parse_csv("x,y\n0.9,1\n0.1,2\n", 0.0, 1.0).unwrap();
        assert_eq!(unsorted.points()[0].x, 0.1);
    }
}
