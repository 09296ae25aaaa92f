//! Closed space curves held as dense samplings of `γ(i/N)`, `i = 0..N`.
//!
//! Indices wrap modulo `N`. A curve may carry a [`ConstantInterval`] on which it
//! is deliberately stationary; every other stretch must have non-vanishing
//! finite-difference tangents.

use std::f64::consts::TAU;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Minimum sample count accepted by the analytic generators.
pub const MIN_SAMPLES: usize = 16;

/// Default adjacency guard band for embeddedness checks.
pub const DEFAULT_GUARD: usize = 2;

/// Where a curve came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Analytic { name: String, params: String },
    File { path: String },
    Derived { operation: String },
}

impl Provenance {
    pub fn derived(operation: impl Into<String>) -> Self {
        Provenance::Derived {
            operation: operation.into(),
        }
    }
}

/// Parameter interval `[s1, s2] ∋ s0` on which a curve is constant.
///
/// `first..=last` are the sample indices covering the interval, so
/// `s1 = first / N` and `s2 = last / N` exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantInterval {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub first: usize,
    pub last: usize,
}

impl ConstantInterval {
    /// Snap `[s0 - width/2, s0 + width/2]` to the sample grid of an `n`-sample curve.
    pub fn on_grid(s0: f64, width: f64, n: usize) -> Result<Self> {
        if !(width > 0.0 && width <= 0.25) {
            return Err(Error::Domain(format!(
                "constant interval width {width} must lie in (0, 1/4]"
            )));
        }
        if !(s0 > 0.0 && s0 < 1.0) {
            return Err(Error::Domain(format!(
                "s0 = {s0} is the wrap point or outside (0, 1)"
            )));
        }
        let (s1, s2) = (s0 - width / 2.0, s0 + width / 2.0);
        if s1 <= 0.0 || s2 >= 1.0 {
            return Err(Error::Domain(format!(
                "interval [{s1}, {s2}] around s0 = {s0} crosses the wrap point"
            )));
        }
        let nf = n as f64;
        let first = (s1 * nf - 1e-9).ceil() as usize;
        let last = (s2 * nf + 1e-9).floor() as usize;
        if last < first + 8 || last >= n {
            return Err(Error::Domain(format!(
                "interval [{s1}, {s2}] holds too few samples at N = {n}"
            )));
        }
        Ok(ConstantInterval {
            s0,
            s1: first as f64 / nf,
            s2: last as f64 / nf,
            first,
            last,
        })
    }

    pub fn contains_index(&self, i: usize) -> bool {
        (self.first..=self.last).contains(&i)
    }

    pub fn width(&self) -> f64 {
        self.s2 - self.s1
    }
}

/// A closed curve sampled at `N` parameter values `i/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedCurve {
    samples: Vec<Vec3>,
    tangents: Vec<Vec3>,
    meta: Provenance,
    constant: Option<ConstantInterval>,
}

impl ClosedCurve {
    /// Build a curve from samples, deriving tangents by central differences.
    pub fn from_samples(samples: Vec<Vec3>, meta: Provenance) -> Result<Self> {
        Self::check_samples(&samples)?;
        let tangents = central_tangents(&samples);
        Ok(ClosedCurve {
            samples,
            tangents,
            meta,
            constant: None,
        })
    }

    /// Build a curve with caller-supplied tangents, normalized here.
    pub fn with_tangents(samples: Vec<Vec3>, tangents: Vec<Vec3>, meta: Provenance) -> Result<Self> {
        Self::check_samples(&samples)?;
        if tangents.len() != samples.len() {
            return Err(Error::Construction(format!(
                "{} tangents for {} samples",
                tangents.len(),
                samples.len()
            )));
        }
        let tangents = tangents
            .into_iter()
            .map(|t| {
                let norm = t.norm();
                if norm > 0.0 {
                    t / norm
                } else {
                    Vec3::zeros()
                }
            })
            .collect();
        Ok(ClosedCurve {
            samples,
            tangents,
            meta,
            constant: None,
        })
    }

    fn check_samples(samples: &[Vec3]) -> Result<()> {
        if samples.len() < 4 {
            return Err(Error::Construction(format!(
                "a closed curve needs at least 4 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Construction(format!("sample {i} is not finite")));
        }
        Ok(())
    }

    /// Attach a constant interval. Fails unless every covered sample equals `γ(s0)`.
    pub fn with_constant_interval(mut self, interval: ConstantInterval) -> Result<Self> {
        if interval.last >= self.len() {
            return Err(Error::Domain("constant interval exceeds sample range".into()));
        }
        let anchor = self.samples[interval.first];
        if (interval.first..=interval.last).any(|i| self.samples[i] != anchor) {
            return Err(Error::Invariant(
                "curve is not constant on the declared interval".into(),
            ));
        }
        self.constant = Some(interval);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec3] {
        &self.samples
    }

    pub fn tangents(&self) -> &[Vec3] {
        &self.tangents
    }

    pub fn meta(&self) -> &Provenance {
        &self.meta
    }

    pub fn constant_interval(&self) -> Option<&ConstantInterval> {
        self.constant.as_ref()
    }

    pub fn sample(&self, i: usize) -> Vec3 {
        self.samples[i % self.samples.len()]
    }

    pub fn into_samples(self) -> Vec<Vec3> {
        self.samples
    }

    /// The same curve with a new provenance tag.
    pub fn with_meta(mut self, meta: Provenance) -> Self {
        self.meta = meta;
        self
    }

    /// Evaluate the curve at parameter `s` (taken mod 1) by periodic Catmull–Rom interpolation.
    pub fn eval(&self, s: f64) -> Vec3 {
        let n = self.len();
        let t = s.rem_euclid(1.0) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let f = t - i as f64;
        let p0 = self.samples[(i + n - 1) % n];
        let p1 = self.samples[i];
        let p2 = self.samples[(i + 1) % n];
        let p3 = self.samples[(i + 2) % n];
        let f2 = f * f;
        let f3 = f2 * f;
        (p1 * 2.0
            + (p2 - p0) * f
            + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * f2
            + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * f3)
            * 0.5
    }

    /// Unit tangent at parameter `s` from a symmetric difference of the interpolant.
    pub fn tangent_at(&self, s: f64) -> Vec3 {
        let h = 0.25 / self.len() as f64;
        let d = self.eval(s + h) - self.eval(s - h);
        let norm = d.norm();
        if norm > 0.0 {
            d / norm
        } else {
            Vec3::zeros()
        }
    }

    /// Resample to `n` points uniformly in the current parameter.
    pub fn resample(&self, n: usize) -> Result<ClosedCurve> {
        let samples = (0..n).map(|i| self.eval(i as f64 / n as f64)).collect();
        ClosedCurve::from_samples(samples, Provenance::derived("resample"))
    }

    pub fn map_points(&self, f: impl Fn(&Vec3) -> Vec3, operation: &str) -> ClosedCurve {
        let samples: Vec<Vec3> = self.samples.iter().map(f).collect();
        let tangents = central_tangents(&samples);
        ClosedCurve {
            samples,
            tangents,
            meta: Provenance::derived(operation),
            constant: self.constant,
        }
    }

    pub fn rotated(&self, rotation: &Rotation3<f64>) -> ClosedCurve {
        self.map_points(|p| rotation * p, "rotate")
    }

    pub fn translated(&self, offset: &Vec3) -> ClosedCurve {
        self.map_points(|p| p + offset, "translate")
    }

    pub fn scaled(&self, factor: f64) -> ClosedCurve {
        self.map_points(|p| p * factor, "scale")
    }

    /// Reflect through the plane with the given normal passing through the origin.
    pub fn reflected(&self, normal: &Vec3) -> ClosedCurve {
        let n = normal.normalize();
        self.map_points(|p| p - n * (2.0 * n.dot(p)), "reflect")
    }

    /// Largest distance between consecutive samples.
    pub fn max_spacing(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| (self.samples[(i + 1) % n] - self.samples[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_embedded(&self, guard: usize) -> bool {
        min_self_distance(self, guard) > 0.0
    }
}

fn central_tangents(samples: &[Vec3]) -> Vec<Vec3> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let d = samples[(i + 1) % n] - samples[(i + n - 1) % n];
            let norm = d.norm();
            if norm > 0.0 {
                d / norm
            } else {
                Vec3::zeros()
            }
        })
        .collect()
}

/// Merge runs of consecutive identical samples, keeping one representative.
pub fn compress(samples: &[Vec3]) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(samples.len());
    for p in samples {
        if out.last() != Some(p) {
            out.push(*p);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Planar circle of the given radius in the x₁x₂-plane.
pub fn make_circle(radius: f64, n: usize) -> Result<ClosedCurve> {
    if n < MIN_SAMPLES {
        return Err(Error::Construction(format!(
            "circle needs N >= {MIN_SAMPLES}, got {n}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Construction(format!("radius must be positive, got {radius}")));
    }
    let (samples, tangents) = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            let (s, c) = t.sin_cos();
            (Vec3::new(radius * c, radius * s, 0.0), Vec3::new(-s, c, 0.0))
        })
        .unzip();
    ClosedCurve::with_tangents(
        samples,
        tangents,
        Provenance::Analytic {
            name: "circle".into(),
            params: format!("radius={radius},N={n}"),
        },
    )
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The `(p, q)` torus knot winding `p` times around the symmetry axis and `q` times
/// through the tube: `((R + r cos qφ) cos pφ, (R + r cos qφ) sin pφ, r sin qφ)`.
pub fn make_torus_knot(p: i64, q: i64, major: f64, minor: f64, n: usize) -> Result<ClosedCurve> {
    if p == 0 || q == 0 {
        return Err(Error::Construction(format!(
            "degenerate torus knot ({p}, {q}): both windings must be non-zero"
        )));
    }
    if gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
        return Err(Error::Construction(format!(
            "gcd({p}, {q}) != 1: not a knot"
        )));
    }
    if !(minor > 0.0 && major > minor && major.is_finite()) {
        return Err(Error::Construction(format!(
            "torus radii must satisfy R > r > 0, got R = {major}, r = {minor}"
        )));
    }
    let needed = 64 * p.unsigned_abs().max(q.unsigned_abs()) as usize;
    if n < needed.max(MIN_SAMPLES) {
        return Err(Error::Construction(format!(
            "torus knot ({p}, {q}) needs N >= {needed}, got {n}"
        )));
    }
    let (pf, qf) = (p as f64, q as f64);
    let (samples, tangents) = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            let (sp, cp) = (pf * t).sin_cos();
            let (sq, cq) = (qf * t).sin_cos();
            let rho = major + minor * cq;
            let point = Vec3::new(rho * cp, rho * sp, minor * sq);
            let drho = -minor * qf * sq;
            let tangent = Vec3::new(
                drho * cp - rho * pf * sp,
                drho * sp + rho * pf * cp,
                minor * qf * cq,
            );
            (point, tangent)
        })
        .unzip();
    ClosedCurve::with_tangents(
        samples,
        tangents,
        Provenance::Analytic {
            name: "torus_knot".into(),
            params: format!("p={p},q={q},R={major},r={minor},N={n}"),
        },
    )
}

/// Unit circle with a radial ripple of `amplitude·cos(k φ)` and a vertical
/// displacement `height·sin(m φ + phase)`.
pub fn make_perturbed_circle(
    amplitude: f64,
    k: u32,
    height: f64,
    m: u32,
    phase: f64,
    n: usize,
) -> Result<ClosedCurve> {
    if n < MIN_SAMPLES {
        return Err(Error::Construction(format!(
            "perturbed circle needs N >= {MIN_SAMPLES}, got {n}"
        )));
    }
    if !(amplitude.abs() < 1.0) {
        return Err(Error::Construction(format!(
            "radial ripple amplitude {amplitude} must be below 1"
        )));
    }
    let (kf, mf) = (k as f64, m as f64);
    let (samples, tangents) = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            let (s, c) = t.sin_cos();
            let rho = 1.0 + amplitude * (kf * t).cos();
            let drho = -amplitude * kf * (kf * t).sin();
            let point = Vec3::new(rho * c, rho * s, height * (mf * t + phase).sin());
            let tangent = Vec3::new(
                drho * c - rho * s,
                drho * s + rho * c,
                height * mf * (mf * t + phase).cos(),
            );
            (point, tangent)
        })
        .unzip();
    ClosedCurve::with_tangents(
        samples,
        tangents,
        Provenance::Analytic {
            name: "perturbed_circle".into(),
            params: format!("a={amplitude},k={k},h={height},m={m},phase={phase},N={n}"),
        },
    )
}

/// Minimum distance between samples whose circular index gap exceeds `guard`.
///
/// Runs of identical consecutive samples (a constant interval) are merged first,
/// so a declared stationary stretch does not count as a self-contact.
pub fn min_self_distance(curve: &ClosedCurve, guard: usize) -> f64 {
    let pts = compress(curve.samples());
    let n = pts.len();
    if n <= 2 * guard + 1 {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + guard + 1)..n {
            if n - (j - i) <= guard {
                continue;
            }
            let d = (pts[j] - pts[i]).norm_squared();
            if d < best {
                best = d;
            }
        }
    }
    best.sqrt()
}

/// Reparameterize so the curve dwells at `γ(s0)` for `s ∈ [s0 - width/2, s0 + width/2]`
/// and sweeps the whole original curve, linearly rescaled, over the rest of `S¹`.
pub fn reparameterize_constant(
    curve: &ClosedCurve,
    s0: f64,
    width: f64,
) -> Result<(ClosedCurve, ConstantInterval)> {
    let interval = ConstantInterval::on_grid(s0, width, curve.len())?;
    Ok((reparameterize_on(curve, interval)?, interval))
}

/// [`reparameterize_constant`] on an interval already snapped to the grid.
pub fn reparameterize_on(curve: &ClosedCurve, interval: ConstantInterval) -> Result<ClosedCurve> {
    let n = curve.len();
    if interval.last >= n || interval.first >= interval.last {
        return Err(Error::Domain(format!(
            "interval samples {}..={} do not fit N = {n}",
            interval.first, interval.last
        )));
    }
    let s0 = interval.s0;
    if !curve.is_embedded(DEFAULT_GUARD) {
        return Err(Error::NotEmbedded(
            "cannot reparameterize a self-intersecting curve".into(),
        ));
    }
    let anchor = curve.eval(s0);
    let free = (n - (interval.last - interval.first)) as f64;
    let samples = (0..n)
        .map(|i| {
            if interval.contains_index(i) {
                anchor
            } else {
                let u = ((i + n - interval.last) % n) as f64 / free;
                curve.eval(s0 + u)
            }
        })
        .collect();
    ClosedCurve::from_samples(samples, Provenance::derived("reparameterize_constant"))?
        .with_constant_interval(interval)
}

/// Symmetric Hausdorff distance between two sample sets (brute force).
pub fn hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let directed = |x: &[Vec3], y: &[Vec3]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm_squared())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
            .sqrt()
    };
    directed(a, b).max(directed(b, a))
}
