//! Local surgery that sets the writhe of an embedded curve to a prescribed value.
//!
//! The pipeline, for a curve `γ` and target `ω`:
//!
//! 1. reparameterize so `γ` dwells at `γ(s0)` on `[s1, s2]`;
//! 2. push the contents of the ball `B_ε(γ(s0))` radially outwards, opening a
//!    hole of radius `Sε/2` around the centre ([`radial_push`]);
//! 3. bridge the hole with a straight segment along `T(s0)`, giving `γ̃`
//!    ([`insert_segment`]);
//! 4. measure `w = ω − Wr(γ̃)` and replace the segment by an `n`-turn helix with
//!    pitch angle `sin ψ = 1 − |w|/n` plus two planar connectors
//!    ([`helix_params`], [`build_connectors`]), giving `γ̄`.
//!
//! The helix indicatrix winds `n` times around a cap of area `2π(1 − sin ψ)`,
//! the connectors retrace one arc in opposite directions, so the enclosed area
//! changes by `2πw` and the writhe by `w`.
//!
//! Inside the splice everything is built in a local frame: the ball centre is
//! the origin and the curve runs along `+z`. The rotation stored in
//! [`SpliceContext`] carries `+z` to `T(s0)`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Rotation3, Unit};
use serde::{Deserialize, Serialize};

use crate::curve::{
    min_self_distance, reparameterize_constant, reparameterize_on, ClosedCurve, ConstantInterval, Provenance, Vec3,
    DEFAULT_GUARD,
};
use crate::error::{Error, Result};
use crate::indicatrix::{choose_apex, fan_term, tangent_indicatrix};
use crate::writhe::{writhe, WritheMethod};

pub const DEFAULT_S0: f64 = 0.5;
pub const DEFAULT_WIDTH: f64 = 0.25;

/// Writhe tolerance for corrected curves at N = 4096.
pub const TOL_WRITHE: f64 = 1e-2;

/// Relative slack allowed when certifying that the insertion stays in its ball.
const CONTAINMENT_SLACK: f64 = 1e-12;

/// Geometry of the splice site, shared by every stage of the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpliceContext {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    /// Sample indices of `s1` and `s2`.
    pub first: usize,
    pub last: usize,
    pub epsilon: f64,
    /// `γ(s0)`; the chart is translation by `−center`.
    pub center: Vec3,
    /// Unit tangent `T(s0)` of the input curve.
    pub tangent: Vec3,
    /// Proper rotation taking `(0, 0, 1)` to `tangent`.
    pub rotation: Rotation3<f64>,
}

impl SpliceContext {
    /// Build the context for `curve` reparameterized on `interval`.
    pub fn new(original: &ClosedCurve, interval: &ConstantInterval, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        let tangent = original.tangent_at(interval.s0);
        if tangent.norm() == 0.0 {
            return Err(Error::ZeroTangent {
                index: (interval.s0 * original.len() as f64).round() as usize,
            });
        }
        let quarter = (interval.s2 - interval.s1) / 4.0;
        Ok(SpliceContext {
            s0: interval.s0,
            s1: interval.s1,
            s2: interval.s2,
            s3: interval.s1 + quarter,
            s4: interval.s2 - quarter,
            first: interval.first,
            last: interval.last,
            epsilon,
            center: original.eval(interval.s0),
            tangent,
            rotation: minimal_rotation(&tangent),
        })
    }

    /// The constant interval this context was built on.
    pub fn interval(&self) -> ConstantInterval {
        ConstantInterval {
            s0: self.s0,
            s1: self.s1,
            s2: self.s2,
            first: self.first,
            last: self.last,
        }
    }

    pub fn to_world(&self, local: &Vec3) -> Vec3 {
        self.center + self.rotation * local
    }

    pub fn to_local(&self, world: &Vec3) -> Vec3 {
        self.rotation.inverse_transform_vector(&(world - self.center))
    }

    /// Which piece of the insertion a sample index falls in.
    fn piece(&self, i: usize, n: usize) -> Piece {
        let s = i as f64 / n as f64;
        if s < self.s3 {
            Piece::Entry
        } else if s <= self.s4 {
            Piece::Helix
        } else {
            Piece::Exit
        }
    }

    /// Index reflected through the midpoint of `[s1, s2]`.
    fn mirror(&self, i: usize) -> usize {
        self.first + self.last - i
    }

    fn with_epsilon(&self, epsilon: f64) -> Self {
        SpliceContext {
            epsilon,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Piece {
    Entry,
    Helix,
    Exit,
}

/// Rotation about `z × t` taking `z` to `t`; a half-turn about `x` when `t = −z`.
pub fn minimal_rotation(tangent: &Vec3) -> Rotation3<f64> {
    let z = Vec3::z();
    let t = tangent.normalize();
    Rotation3::rotation_between(&z, &t)
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::x()), PI))
}

/// Ball radius for the splice: a quarter of the distance from `γ(s0)` to the
/// nearest sample off the local strand.
///
/// The local strand is the arc through `s0` along which the distance to `γ(s0)`
/// keeps increasing, so the ball meets the curve in one arc through its centre.
pub fn select_epsilon(curve: &ClosedCurve, s0: f64) -> Result<f64> {
    let n = curve.len();
    let center = curve.eval(s0);
    let dist: Vec<f64> = curve.samples().iter().map(|p| (p - center).norm()).collect();
    let j0 = ((s0 * n as f64).round() as usize) % n;
    // A constant interval keeps the curve at the centre for a while.
    let mut fwd = 0;
    while fwd + 1 < n && dist[(j0 + fwd + 1) % n] == 0.0 {
        fwd += 1;
    }
    while fwd + 1 < n && dist[(j0 + fwd + 1) % n] > dist[(j0 + fwd) % n] {
        fwd += 1;
    }
    let mut back = 0;
    while back + 1 < n - fwd && dist[(j0 + n - back - 1) % n] == 0.0 {
        back += 1;
    }
    while back + 1 < n - fwd && dist[(j0 + n - back - 1) % n] > dist[(j0 + n - back) % n] {
        back += 1;
    }
    let mut nearest = dist[(j0 + fwd) % n].min(dist[(j0 + n - back) % n]);
    for k in (fwd + 1)..(n - back) {
        nearest = nearest.min(dist[(j0 + k) % n]);
    }
    if !(nearest > 0.0) {
        return Err(Error::NotEmbedded(
            "the curve returns to γ(s0) away from the local strand".into(),
        ));
    }
    Ok(0.25 * nearest)
}

/// Radial push `z ↦ [(1 − S/2)|z| + Sε/2] z/|z|` on the ball `B_ε`.
///
/// `S = 0` is the identity, the boundary sphere is fixed, and the image of the
/// punctured ball avoids the open ball of radius `Sε/2`. Samples on the
/// constant interval are left at the centre; samples outside the ball are
/// copied unchanged.
pub fn radial_push(curve: &ClosedCurve, ctx: &SpliceContext, scale: f64) -> Result<ClosedCurve> {
    check_scale(scale)?;
    let eps = ctx.epsilon;
    let mut samples = curve.samples().to_vec();
    for (i, p) in samples.iter_mut().enumerate() {
        if (ctx.first..=ctx.last).contains(&i) {
            continue;
        }
        let z = *p - ctx.center;
        let r = z.norm();
        if r >= eps {
            continue;
        }
        if r == 0.0 {
            return Err(Error::Domain(format!(
                "sample {i} sits at the splice centre outside the constant interval"
            )));
        }
        let pushed = (1.0 - scale / 2.0) * r + scale * eps / 2.0;
        *p = ctx.center + z * (pushed / r);
    }
    let out = ClosedCurve::from_samples(samples, Provenance::derived("radial_push"))?;
    match curve.constant_interval() {
        Some(iv) => out.with_constant_interval(*iv),
        None => Ok(out),
    }
}

/// Height profile of the inserted straight segment.
///
/// The segment spans `[−Sε/2, Sε/2]` along `T(s0)`. With `helix_fraction = 1`
/// it is traversed at uniform speed. With `helix_fraction = H/(Sε/2) < 1` the
/// middle half of the parameter interval covers the central stretch of length
/// `H`, which is exactly how the zero-radius helix and its connectors traverse
/// the same segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentProfile {
    pub helix_fraction: f64,
}

impl SegmentProfile {
    pub const UNIFORM: SegmentProfile = SegmentProfile { helix_fraction: 1.0 };

    pub fn for_helix(helix: &HelixSpec) -> Self {
        SegmentProfile {
            helix_fraction: 1.0 - helix.w.abs() / helix.n as f64,
        }
    }
}

/// `γ̃`: the pushed curve with the constant interval replaced by a straight
/// segment of length `Sε` along `T(s0)` through `γ(s0)`.
pub fn insert_segment(
    pushed: &ClosedCurve,
    ctx: &SpliceContext,
    scale: f64,
    profile: SegmentProfile,
) -> Result<ClosedCurve> {
    check_scale(scale)?;
    let n = pushed.len();
    let half = scale * ctx.epsilon / 2.0;
    let height = profile.helix_fraction * half;
    let entry_len = half - height / 2.0;
    let mut samples = pushed.samples().to_vec();
    for i in ctx.first..=ctx.last {
        let local_z = |j: usize| -> f64 {
            let s = j as f64 / n as f64;
            if s < ctx.s3 {
                -half + entry_len * (s - ctx.s1) / (ctx.s3 - ctx.s1)
            } else {
                -height / 2.0 + height * (s - ctx.s3) / (ctx.s4 - ctx.s3)
            }
        };
        let z = match ctx.piece(i, n) {
            Piece::Exit => -local_z(ctx.mirror(i)),
            _ => local_z(i),
        };
        samples[i] = ctx.to_world(&Vec3::new(0.0, 0.0, z));
    }
    ClosedCurve::from_samples(samples, Provenance::derived("insert_segment"))
}

fn check_scale(scale: f64) -> Result<()> {
    if (0.0..=1.0).contains(&scale) {
        Ok(())
    } else {
        Err(Error::Domain(format!("scale S = {scale} outside [0, 1]")))
    }
}

/// Parameters of the inserted helix
/// `τ(s) = (r cos Cs, r sin Cs, p·n/(s4 − s3)·(s − (s3 + s4)/2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelixSpec {
    /// Number of turns.
    pub n: u32,
    /// Writhe deficit the helix supplies.
    pub w: f64,
    /// Scale `S ∈ [0, 1]`.
    pub scale: f64,
    pub epsilon: f64,
    /// Angular rate `−sgn(w)·2πn/(s4 − s3)`.
    pub c: f64,
    pub radius: f64,
    /// Rise per turn.
    pub pitch: f64,
    pub s3: f64,
    pub s4: f64,
}

/// Helix parameters for deficit `w` with `n` turns in a ball of radius `Sε/2`.
pub fn helix_params(
    w: f64,
    n: u32,
    epsilon: f64,
    scale: f64,
    s3: f64,
    s4: f64,
) -> Result<HelixSpec> {
    if n == 0 {
        return Err(Error::Domain("helix needs at least one turn".into()));
    }
    let nf = n as f64;
    if !(w.abs() < nf) {
        return Err(Error::Domain(format!("|w| = {} must be below n = {n}", w.abs())));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    check_scale(scale)?;
    if !(s3 < s4) {
        return Err(Error::Domain(format!("helix interval [{s3}, {s4}] is empty")));
    }
    let u = w.abs() / nf;
    let sign = if w > 0.0 {
        1.0
    } else if w < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(HelixSpec {
        n,
        w,
        scale,
        epsilon,
        c: -sign * TAU * nf / (s4 - s3),
        radius: scale * epsilon / (4.0 * PI * nf) * (2.0 * u - u * u).sqrt(),
        pitch: scale * epsilon / (2.0 * nf) * (1.0 - u),
        s3,
        s4,
    })
}

impl HelixSpec {
    /// Total rise `p·n`.
    pub fn height(&self) -> f64 {
        self.pitch * self.n as f64
    }

    /// Angle between the helix tangent and the plane normal to its axis.
    pub fn pitch_angle(&self) -> f64 {
        self.pitch.atan2(TAU * self.radius)
    }

    /// Radius of a ball that holds any single turn.
    pub fn turn_ball_radius(&self) -> f64 {
        self.scale * self.epsilon / (2.0 * self.n as f64)
    }

    /// Largest distance from a helix sample to the centre of its own turn, over
    /// `samples` points spread evenly on `[s3, s4]`.
    pub fn max_turn_extent(&self, samples: usize) -> f64 {
        let nf = self.n as f64;
        let len = self.s4 - self.s3;
        (0..samples)
            .map(|k| {
                let s = self.s3 + len * k as f64 / (samples - 1).max(1) as f64;
                let turn = (((s - self.s3) / len * nf).floor()).min(nf - 1.0);
                let mid = self.s3 + len * (turn + 0.5) / nf;
                let axis = Vec3::new(0.0, 0.0, self.position(mid, 1.0).z);
                (self.position(s, 1.0) - axis).norm()
            })
            .fold(0.0, f64::max)
    }

    fn rise_rate(&self) -> f64 {
        self.height() / (self.s4 - self.s3)
    }

    /// `τ(s)` with the radius multiplied by `radius_factor`.
    pub fn position(&self, s: f64, radius_factor: f64) -> Vec3 {
        let r = self.radius * radius_factor;
        let (sin, cos) = (self.c * s).sin_cos();
        Vec3::new(
            r * cos,
            r * sin,
            self.rise_rate() * (s - (self.s3 + self.s4) / 2.0),
        )
    }

    /// `τ′(s)` with the radius multiplied by `radius_factor`.
    pub fn derivative(&self, s: f64, radius_factor: f64) -> Vec3 {
        let r = self.radius * radius_factor;
        let (sin, cos) = (self.c * s).sin_cos();
        Vec3::new(-r * self.c * sin, r * self.c * cos, self.rise_rate())
    }

    /// The helix translated sideways so that `τ(s3)` lies on the local `z` axis.
    ///
    /// The shifted helix is invariant under the half-turn about the horizontal
    /// axis through the origin in the direction of `τ(s3)`, which exchanges its
    /// two ends.
    pub fn axial_position(&self, s: f64, radius_factor: f64) -> Vec3 {
        let start = self.position(self.s3, radius_factor);
        self.position(s, radius_factor) - Vec3::new(start.x, start.y, 0.0)
    }
}

/// The two planar connectors and the helix between them, in local coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Connectors {
    /// `ι` on samples `first .. s3`.
    pub entry: Vec<Vec3>,
    /// The helix on samples `s3 ..= s4`.
    pub helix: Vec<Vec3>,
    /// `ξ` on samples `s4 .. last`.
    pub exit: Vec<Vec3>,
    /// Unit vector `v₂ = τ′(s3)/|τ′(s3)|`.
    pub v2: Vec3,
}

impl Connectors {
    /// `η` on every sample of `[s1, s2]`, in order.
    pub fn assembled(&self) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(self.entry.len() + self.helix.len() + self.exit.len());
        out.extend_from_slice(&self.entry);
        out.extend_from_slice(&self.helix);
        out.extend_from_slice(&self.exit);
        out
    }
}

/// Entry connector `ι`: the cubic Hermite arc from the south pole `(0, 0, −Sε/2)`
/// leaving along `+z` to `τ(s3)` arriving along `v₂`.
///
/// Both end points lie on the `z` axis and both end tangents lie in the plane
/// spanned by `z` and `v₂`, so the arc is planar. Its height increases strictly,
/// keeping it below the helix. The exit connector is the image of `ι` under the
/// half-turn that swaps the helix ends, which on that plane is `x ↦ −x`, and it
/// runs through the parameters in reverse: `ξ(s) = −ι(s3 + s4 − s)`.
pub fn build_connectors(
    spec: &HelixSpec,
    ctx: &SpliceContext,
    n_samples: usize,
    radius_factor: f64,
) -> Result<Connectors> {
    let half = spec.scale * spec.epsilon / 2.0;
    let nf = n_samples as f64;
    let indices = ctx.first..=ctx.last;
    if half == 0.0 {
        let zero = |pred: Piece| {
            indices
                .clone()
                .filter(|&i| ctx.piece(i, n_samples) == pred)
                .map(|_| Vec3::zeros())
                .collect::<Vec<_>>()
        };
        return Ok(Connectors {
            entry: zero(Piece::Entry),
            helix: zero(Piece::Helix),
            exit: zero(Piece::Exit),
            v2: Vec3::z(),
        });
    }
    let d3 = spec.derivative(spec.s3, radius_factor);
    let v2 = d3 / d3.norm();
    let p0 = Vec3::new(0.0, 0.0, -half);
    let p1 = spec.axial_position(spec.s3, radius_factor);
    let chord = (p1 - p0).norm();
    let m0 = Vec3::z() * chord;
    let m1 = v2 * chord;
    let entry_at = |i: usize| -> Vec3 {
        let t = (i as f64 / nf - ctx.s1) / (ctx.s3 - ctx.s1);
        let t2 = t * t;
        let t3 = t2 * t;
        p0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + p1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    };
    let mut entry = Vec::new();
    let mut helix = Vec::new();
    let mut exit = Vec::new();
    for i in indices {
        match ctx.piece(i, n_samples) {
            Piece::Entry => entry.push(entry_at(i)),
            Piece::Helix => helix.push(spec.axial_position(i as f64 / nf, radius_factor)),
            Piece::Exit => exit.push(-entry_at(ctx.mirror(i))),
        }
    }
    let limit = half * (1.0 + CONTAINMENT_SLACK);
    if let Some(p) = entry.iter().chain(&helix).chain(&exit).find(|p| p.norm() > limit) {
        return Err(Error::Invariant(format!(
            "insertion leaves its ball: |η| = {} > Sε/2 = {half}",
            p.norm()
        )));
    }
    Ok(Connectors {
        entry,
        helix,
        exit,
        v2,
    })
}

/// `γ̄`: the pushed curve with `η` placed on `[s1, s2]`.
pub fn assemble(
    pushed: &ClosedCurve,
    ctx: &SpliceContext,
    connectors: &Connectors,
) -> Result<ClosedCurve> {
    let mut samples = pushed.samples().to_vec();
    for (k, local) in connectors.assembled().iter().enumerate() {
        samples[ctx.first + k] = ctx.to_world(local);
    }
    ClosedCurve::from_samples(samples, Provenance::derived("correct_writhe"))
}

/// A reparameterized curve together with its splice context, from which every
/// intermediate curve of the pipeline can be rebuilt.
#[derive(Clone, Debug)]
pub struct Splice {
    /// The input curve, constant on `[s1, s2]`.
    pub base: ClosedCurve,
    pub ctx: SpliceContext,
}

impl Splice {
    /// Reparameterize `curve` around `s0` and fix the ball radius
    /// (`select_epsilon` unless given).
    pub fn prepare(curve: &ClosedCurve, s0: f64, width: f64, epsilon: Option<f64>) -> Result<Self> {
        let (base, interval) = reparameterize_constant(curve, s0, width)?;
        let epsilon = match epsilon {
            Some(e) => e,
            None => select_epsilon(curve, s0)?,
        };
        let ctx = SpliceContext::new(curve, &interval, epsilon)?;
        Ok(Splice { base, ctx })
    }

    /// Recreate the splice of `curve` described by a stored context.
    pub fn rebuild(curve: &ClosedCurve, ctx: &SpliceContext) -> Result<Self> {
        Ok(Splice {
            base: reparameterize_on(curve, ctx.interval())?,
            ctx: ctx.clone(),
        })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Splice {
            base: self.base.clone(),
            ctx: self.ctx.with_epsilon(epsilon),
        }
    }

    pub fn pushed(&self, scale: f64) -> Result<ClosedCurve> {
        radial_push(&self.base, &self.ctx, scale)
    }

    /// `γ̃` at the given scale and segment profile.
    pub fn tilde(&self, scale: f64, profile: SegmentProfile) -> Result<ClosedCurve> {
        let out = insert_segment(&self.pushed(scale)?, &self.ctx, scale, profile)?;
        self.keep_constant(out, scale)
    }

    /// A zero-size insertion leaves the curve constant on `[s1, s2]`; say so.
    fn keep_constant(&self, curve: ClosedCurve, scale: f64) -> Result<ClosedCurve> {
        match self.base.constant_interval() {
            Some(iv) if scale * self.ctx.epsilon == 0.0 => curve.with_constant_interval(*iv),
            _ => Ok(curve),
        }
    }

    pub fn helix(&self, w: f64, n: u32, scale: f64) -> Result<HelixSpec> {
        helix_params(w, n, self.ctx.epsilon, scale, self.ctx.s3, self.ctx.s4)
    }

    /// `γ̄` with the helix radius multiplied by `radius_factor`.
    pub fn bar(&self, helix: &HelixSpec, radius_factor: f64) -> Result<ClosedCurve> {
        let pushed = self.pushed(helix.scale)?;
        let connectors = build_connectors(helix, &self.ctx, self.base.len(), radius_factor)?;
        let out = assemble(&pushed, &self.ctx, &connectors)?;
        self.keep_constant(out, helix.scale)
    }

    /// True when every sample outside `B_ε` is bit-identical in `base` and `other`.
    pub fn is_local(&self, other: &ClosedCurve) -> bool {
        self.base
            .samples()
            .iter()
            .zip(other.samples())
            .all(|(a, b)| (a - self.ctx.center).norm() < self.ctx.epsilon || a == b)
    }
}

/// Signed indicatrix area contributed by the two connector arcs of `γ̄`.
///
/// Uses the same apex as the area of the whole indicatrix, so the value is the
/// connectors' share of [`crate::indicatrix::enclosed_area`].
pub fn connector_area(bar: &ClosedCurve, ctx: &SpliceContext) -> Result<f64> {
    let n = bar.len();
    let pts = bar.samples();
    let apex = choose_apex(&tangent_indicatrix(bar)?);
    let dir = |k: usize| (pts[(k + 1) % n] - pts[k]).normalize();
    let arc = |edges: std::ops::RangeInclusive<usize>| -> f64 {
        let terms: Vec<f64> = edges
            .clone()
            .zip(edges.skip(1))
            .map(|(k, l)| fan_term(&apex, &dir(k), &dir(l)))
            .collect();
        crate::pairwise::neumaier_sum(&terms)
    };
    let helix_start = (ctx.first..=ctx.last)
        .find(|&i| ctx.piece(i, n) != Piece::Entry)
        .unwrap_or(ctx.last);
    // Edges of ι end at the first helix sample; ξ's edges are their mirror images.
    let entry = ctx.first..=helix_start - 1;
    let exit = ctx.mirror(helix_start)..=ctx.last - 1;
    Ok(arc(entry) + arc(exit))
}

/// Options for [`correct_writhe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformOptions {
    pub s0: f64,
    pub width: f64,
    /// Ball radius; chosen by [`select_epsilon`] when absent.
    pub epsilon: Option<f64>,
    pub method: WritheMethod,
}

impl Default for DeformOptions {
    fn default() -> Self {
        DeformOptions {
            s0: DEFAULT_S0,
            width: DEFAULT_WIDTH,
            epsilon: None,
            method: WritheMethod::PolygonalExact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformTrace {
    pub wr_input: f64,
    pub wr_tilde: f64,
    pub w_applied: f64,
    pub wr_output: f64,
    pub target: f64,
    pub embedded_before: bool,
    pub embedded_after: bool,
    pub min_distance_after: f64,
    pub locality_ok: bool,
    pub connector_area: f64,
    pub helix: HelixSpec,
    pub context: SpliceContext,
    pub method: WritheMethod,
}

/// Output of [`correct_writhe`].
#[derive(Clone, Debug)]
pub struct Correction {
    /// `γ̄`.
    pub curve: ClosedCurve,
    /// `γ̃`, parameterized like the zero-radius helix.
    pub tilde: ClosedCurve,
    pub splice: Splice,
    pub trace: DeformTrace,
}

/// Smallest `n` with `|w| < n`, and at least one.
pub fn turns_for(w: f64) -> u32 {
    (w.abs().floor() as u32 + 1).max(1)
}

/// Run the full pipeline at scale `S = 1`, aiming for writhe `target`.
pub fn correct_writhe(curve: &ClosedCurve, target: f64, options: &DeformOptions) -> Result<Correction> {
    let embedded_before = min_self_distance(curve, DEFAULT_GUARD) > 0.0;
    if !embedded_before {
        return Err(Error::NotEmbedded("input curve is not embedded".into()));
    }
    let wr_input = writhe(curve, options.method)?;
    let splice = Splice::prepare(curve, options.s0, options.width, options.epsilon)?;
    let scale = 1.0;
    let wr_tilde = writhe(&splice.tilde(scale, SegmentProfile::UNIFORM)?, options.method)?;
    let w = target - wr_tilde;
    let n = turns_for(w);
    correct_with(&splice, scale, w, n, wr_input, wr_tilde, target, options.method)
}

/// Insert the helix for deficit `w` with `n` turns and certify the result.
#[allow(clippy::too_many_arguments)]
pub(crate) fn correct_with(
    splice: &Splice,
    scale: f64,
    w: f64,
    n: u32,
    wr_input: f64,
    wr_tilde: f64,
    target: f64,
    method: WritheMethod,
) -> Result<Correction> {
    let helix = splice.helix(w, n, scale)?;
    let bar = splice.bar(&helix, 1.0)?;
    let min_distance_after = min_self_distance(&bar, DEFAULT_GUARD);
    if !(min_distance_after > 0.0) {
        return Err(Error::NotEmbedded(format!(
            "corrected curve touches itself (w = {w}, n = {n}, S = {scale})"
        )));
    }
    let locality_ok = splice.is_local(&bar);
    if !locality_ok {
        return Err(Error::Invariant("samples outside B_ε changed".into()));
    }
    let wr_output = writhe(&bar, method)?;
    let connector_area = if scale > 0.0 {
        connector_area(&bar, &splice.ctx)?
    } else {
        0.0
    };
    let tilde = splice.tilde(scale, SegmentProfile::for_helix(&helix))?;
    let trace = DeformTrace {
        wr_input,
        wr_tilde,
        w_applied: w,
        wr_output,
        target,
        embedded_before: true,
        embedded_after: true,
        min_distance_after,
        locality_ok,
        connector_area,
        helix,
        context: splice.ctx.clone(),
        method,
    };
    Ok(Correction {
        curve: bar.with_meta(Provenance::derived("correct_writhe")),
        tilde,
        splice: splice.clone(),
        trace,
    })
}
