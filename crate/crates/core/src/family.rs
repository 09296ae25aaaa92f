//! Writhe correction over sampled parameter spaces, and the homotopies that
//! connect a family to its corrected version.
//!
//! A family is one curve per node of a grid on `Sⁿ` or `Sⁿ × I`. Correction is
//! two-phase: first every node's `γ̃_x` is measured, which fixes the target
//! `ω = Wr(γ̃_{x₀})` and a shared turn count `n > M − m`; then every node gets
//! its helix, scaled by `S(x) = min(3|x|, 1)`.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{make_torus_knot, ClosedCurve, Provenance};
use crate::deform::{
    correct_with, select_epsilon, DeformOptions, DeformTrace, SegmentProfile, Splice,
};
use crate::error::{Error, Result};
use crate::writhe::writhe;

pub const DEFAULT_CIRCLE_NODES: usize = 64;
pub const DEFAULT_ICOSPHERE_LEVEL: u32 = 2;
pub const DEFAULT_INTERVAL_STEPS: usize = 32;

/// Which parameter space a grid samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Sphere { dim: u32 },
    SphereCrossInterval { dim: u32 },
}

/// A grid node: a point of `Sⁿ ⊂ ℝⁿ⁺¹`, and for product spaces an interval
/// coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamNode {
    pub point: Vec<f64>,
    pub tau: Option<f64>,
    /// `|x|`: distance from the basepoint, normalized to `[0, 1]`.
    pub dist: f64,
}

impl ParamNode {
    /// Scale of the insertion at this node.
    pub fn scale(&self) -> f64 {
        (3.0 * self.dist).min(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub kind: SpaceKind,
    pub nodes: Vec<ParamNode>,
    /// Grid adjacency, for sampled continuity checks.
    pub edges: Vec<(usize, usize)>,
    pub basepoint: usize,
}

fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot.clamp(-1.0, 1.0).acos() / PI
}

impl ParamSpace {
    /// `Sⁿ` at the default resolution: 2 points, 64 circle nodes, or the
    /// 162-node icosphere.
    pub fn sphere(dim: u32) -> Result<Self> {
        match dim {
            0 => Ok(Self::zero_sphere()),
            1 => Self::circle(DEFAULT_CIRCLE_NODES),
            2 => Ok(Self::icosphere(DEFAULT_ICOSPHERE_LEVEL)),
            _ => Err(Error::Domain(format!("sphere grids exist for dim 0, 1, 2; got {dim}"))),
        }
    }

    pub fn zero_sphere() -> Self {
        Self::from_points(0, vec![vec![1.0], vec![-1.0]], vec![(0, 1)])
    }

    /// `m` equally spaced nodes on `S¹`, the basepoint at angle 0.
    pub fn circle(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::Domain(format!("a circle grid needs at least 3 nodes, got {m}")));
        }
        let points = (0..m)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / m as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let edges = (0..m).map(|k| (k, (k + 1) % m)).collect();
        Ok(Self::from_points(1, points, edges))
    }

    /// Icosahedron with every face split `level` times (12, 42, 162, 642 … nodes).
    pub fn icosphere(level: u32) -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<[f64; 3]> = vec![
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ];
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        let normalize = |v: [f64; 3]| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        for v in verts.iter_mut() {
            *v = normalize(*v);
        }
        for _ in 0..level {
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            for f in &faces {
                let mut mid = |a: usize, b: usize| {
                    let key = (a.min(b), a.max(b));
                    *midpoints.entry(key).or_insert_with(|| {
                        let (p, q) = (verts[a], verts[b]);
                        verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                        verts.len() - 1
                    })
                };
                let ab = mid(f[0], f[1]);
                let bc = mid(f[1], f[2]);
                let ca = mid(f[2], f[0]);
                next.push([f[0], ab, ca]);
                next.push([f[1], bc, ab]);
                next.push([f[2], ca, bc]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }
        let mut edges: Vec<(usize, usize)> = faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let points = verts.iter().map(|v| v.to_vec()).collect();
        Self::from_points(2, points, edges)
    }

    fn from_points(dim: u32, points: Vec<Vec<f64>>, edges: Vec<(usize, usize)>) -> Self {
        let base = points[0].clone();
        let nodes = points
            .into_iter()
            .map(|p| ParamNode {
                dist: sphere_dist(&p, &base),
                point: p,
                tau: None,
            })
            .collect();
        ParamSpace {
            kind: SpaceKind::Sphere { dim },
            nodes,
            edges,
            basepoint: 0,
        }
    }

    /// `self × I` with `steps` interval nodes `τ = j/(steps − 1)` and basepoint
    /// `(x₀, 0)`; `|(x, τ)| = max(|x|, τ)`.
    pub fn cross_interval(&self, steps: usize) -> Result<Self> {
        let dim = match self.kind {
            SpaceKind::Sphere { dim } => dim,
            SpaceKind::SphereCrossInterval { .. } => {
                return Err(Error::Domain("space already has an interval factor".into()))
            }
        };
        if steps < 2 {
            return Err(Error::Domain(format!("interval grid needs 2 or more steps, got {steps}")));
        }
        let m = self.nodes.len();
        let mut nodes = Vec::with_capacity(m * steps);
        for j in 0..steps {
            let tau = j as f64 / (steps - 1) as f64;
            for node in &self.nodes {
                nodes.push(ParamNode {
                    point: node.point.clone(),
                    tau: Some(tau),
                    dist: node.dist.max(tau),
                });
            }
        }
        let mut edges = Vec::new();
        for j in 0..steps {
            edges.extend(self.edges.iter().map(|&(a, b)| (j * m + a, j * m + b)));
            if j + 1 < steps {
                edges.extend((0..m).map(|a| (j * m + a, (j + 1) * m + a)));
            }
        }
        Ok(ParamSpace {
            kind: SpaceKind::SphereCrossInterval { dim },
            nodes,
            edges,
            basepoint: self.basepoint,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// One curve per node, plus correction records once corrected.
#[derive(Clone, Debug)]
pub struct CurveFamily {
    pub space: ParamSpace,
    pub curves: Vec<ClosedCurve>,
    /// Target writhe; set by [`correct_family`].
    pub omega: Option<f64>,
    /// Shared helix turn count; set by [`correct_family`].
    pub turns: Option<u32>,
    /// Per-node traces, empty for an uncorrected family.
    pub traces: Vec<DeformTrace>,
}

impl CurveFamily {
    pub fn new(space: ParamSpace, curves: Vec<ClosedCurve>) -> Result<Self> {
        if space.len() != curves.len() {
            return Err(Error::Domain(format!(
                "{} nodes but {} curves",
                space.len(),
                curves.len()
            )));
        }
        if let Some(c) = curves.iter().find(|c| c.len() != curves[0].len()) {
            return Err(Error::Domain(format!(
                "family curves must share N; found {} and {}",
                curves[0].len(),
                c.len()
            )));
        }
        Ok(CurveFamily {
            space,
            curves,
            omega: None,
            turns: None,
            traces: Vec::new(),
        })
    }

    pub fn is_corrected(&self) -> bool {
        !self.traces.is_empty()
    }

    /// Largest sample-wise distance between curves at adjacent nodes.
    pub fn max_adjacent_gap(&self) -> f64 {
        self.space
            .edges
            .par_iter()
            .map(|&(a, b)| {
                self.curves[a]
                    .samples()
                    .iter()
                    .zip(self.curves[b].samples())
                    .map(|(p, q)| (p - q).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Writhe at every node.
    pub fn writhes(&self, options: &DeformOptions) -> Result<Vec<f64>> {
        self.curves
            .par_iter()
            .map(|c| writhe(c, options.method))
            .collect()
    }
}

/// The S-family of `(2,3)` torus knots on a torus of tube radius
/// `1 + 0.8·g(x)`, where `g` is the last coordinate of the sphere point, damped
/// by `sin(πτ)` on product spaces so both interval ends are the `g = 0` knot.
///
/// Across `S¹` the writhe varies by about 1.2.
pub fn flexed_trefoil(space: &ParamSpace, n_samples: usize) -> Result<CurveFamily> {
    let curves = space
        .nodes
        .par_iter()
        .map(|node| {
            let g = *node.point.last().expect("sphere points are nonempty");
            let damp = node.tau.map_or(1.0, |t| (PI * t).sin());
            let minor = 1.0 + 0.8 * g * damp;
            make_torus_knot(2, 3, 2.0, minor, n_samples)
        })
        .collect::<Result<Vec<_>>>()?;
    CurveFamily::new(space.clone(), curves)
}

/// Correct every node to the common writhe `ω = Wr(γ̃_{x₀})`.
///
/// `options.epsilon` overrides the ball radius; by default it is the smallest
/// [`select_epsilon`] over the nodes, so that one radius serves every node.
pub fn correct_family(family: &CurveFamily, options: &DeformOptions) -> Result<CurveFamily> {
    if family.curves.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let epsilon = match options.epsilon {
        Some(e) => e,
        None => family
            .curves
            .par_iter()
            .map(|c| select_epsilon(c, options.s0))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min),
    };
    let measured = family
        .curves
        .par_iter()
        .zip(family.space.nodes.par_iter())
        .map(|(curve, node)| {
            let splice = Splice::prepare(curve, options.s0, options.width, Some(epsilon))?;
            let wr_input = writhe(curve, options.method)?;
            let wr_tilde = writhe(
                &splice.tilde(node.scale(), SegmentProfile::UNIFORM)?,
                options.method,
            )?;
            Ok((splice, wr_input, wr_tilde))
        })
        .collect::<Result<Vec<_>>>()?;
    let base = family.space.basepoint;
    let omega = measured[base].2;
    let hi = measured.iter().map(|m| m.2).fold(f64::NEG_INFINITY, f64::max);
    let lo = measured.iter().map(|m| m.2).fold(f64::INFINITY, f64::min);
    let turns = (hi - lo).floor() as u32 + 1;
    if let Some((i, _)) = measured
        .iter()
        .enumerate()
        .find(|(_, m)| (omega - m.2).abs() >= turns as f64)
    {
        return Err(Error::Invariant(format!(
            "node {i}: |w| = {} is not below the shared n = {turns}",
            (omega - measured[i].2).abs()
        )));
    }
    let corrections = measured
        .par_iter()
        .zip(family.space.nodes.par_iter())
        .map(|((splice, wr_input, wr_tilde), node)| {
            correct_with(
                splice,
                node.scale(),
                omega - wr_tilde,
                turns,
                *wr_input,
                *wr_tilde,
                omega,
                options.method,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let (curves, traces) = corrections.into_iter().map(|c| (c.curve, c.trace)).unzip();
    Ok(CurveFamily {
        space: family.space.clone(),
        curves,
        omega: Some(omega),
        turns: Some(turns),
        traces,
    })
}

/// Largest `|Wr(γ̄_x) − ω|` recorded in a corrected family's traces.
pub fn max_deviation(corrected: &CurveFamily) -> Option<f64> {
    let omega = corrected.omega?;
    corrected
        .traces
        .iter()
        .map(|t| (t.wr_output - omega).abs())
        .reduce(f64::max)
}

fn check_pair(raw: &CurveFamily, corrected: &CurveFamily, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("homotopy time t = {t} outside [0, 1]")));
    }
    if !corrected.is_corrected() {
        return Err(Error::Domain("second family carries no correction records".into()));
    }
    if raw.curves.len() != corrected.traces.len() {
        return Err(Error::Domain(format!(
            "raw family has {} nodes, corrected family {}",
            raw.curves.len(),
            corrected.traces.len()
        )));
    }
    Ok(())
}

/// One node of the homotopy at time `t`.
///
/// On `[1/2, 1]` the helix radius is `(2t − 1)·r`; on `[0, 1/2)` the helix is
/// gone and `γ̃` is rebuilt with ball radius `2tε`.
fn homotopy_node(raw: &ClosedCurve, trace: &DeformTrace, t: f64) -> Result<ClosedCurve> {
    let splice = Splice::rebuild(raw, &trace.context)?;
    let helix = &trace.helix;
    let curve = if t >= 0.5 {
        splice.bar(helix, 2.0 * t - 1.0)?
    } else {
        splice
            .with_epsilon(2.0 * t * trace.context.epsilon)
            .tilde(helix.scale, SegmentProfile::for_helix(helix))?
    };
    Ok(curve)
}

fn homotopy(raw: &CurveFamily, corrected: &CurveFamily, t: f64, name: &str) -> Result<CurveFamily> {
    check_pair(raw, corrected, t)?;
    let curves = raw
        .curves
        .par_iter()
        .zip(corrected.traces.par_iter())
        .map(|(c, trace)| homotopy_node(c, trace, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|c| c.with_meta(Provenance::derived(format!("{name}(t={t})"))))
        .collect();
    CurveFamily::new(raw.space.clone(), curves)
}

/// `Ω_t` for a family over `Sⁿ`: `Ω₀` is the reparameterized family,
/// `Ω_{1/2}` the `γ̃` family, `Ω₁` the corrected family.
pub fn omega_homotopy(raw: &CurveFamily, corrected: &CurveFamily, t: f64) -> Result<CurveFamily> {
    if !matches!(raw.space.kind, SpaceKind::Sphere { .. }) {
        return Err(Error::Domain("omega_homotopy expects a family over Sⁿ".into()));
    }
    homotopy(raw, corrected, t, "omega_homotopy")
}

/// `Φ_t`: the same homotopy for a family over `Sⁿ × I`.
pub fn phi_homotopy(raw: &CurveFamily, corrected: &CurveFamily, t: f64) -> Result<CurveFamily> {
    if !matches!(raw.space.kind, SpaceKind::SphereCrossInterval { .. }) {
        return Err(Error::Domain("phi_homotopy expects a family over Sⁿ × I".into()));
    }
    homotopy(raw, corrected, t, "phi_homotopy")
}

/// The `γ̃` family of a correction, built directly by segment insertion.
pub fn tilde_family(raw: &CurveFamily, corrected: &CurveFamily) -> Result<CurveFamily> {
    check_pair(raw, corrected, 1.0)?;
    let curves = raw
        .curves
        .par_iter()
        .zip(corrected.traces.par_iter())
        .map(|(c, trace)| {
            Splice::rebuild(c, &trace.context)?
                .tilde(trace.helix.scale, SegmentProfile::for_helix(&trace.helix))
        })
        .collect::<Result<Vec<_>>>()?;
    CurveFamily::new(raw.space.clone(), curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(ParamSpace::sphere(0).unwrap().len(), 2);
        assert_eq!(ParamSpace::sphere(1).unwrap().len(), 64);
        let ico = ParamSpace::sphere(2).unwrap();
        assert_eq!(ico.len(), 162);
        assert_eq!(ico.edges.len(), 480);
        assert!(ParamSpace::sphere(3).is_err());
        let prod = ParamSpace::circle(8).unwrap().cross_interval(4).unwrap();
        assert_eq!(prod.len(), 32);
        assert_eq!(prod.edges.len(), 4 * 8 + 3 * 8);
    }

    #[test]
    fn distances_normalized() {
        for space in [
            ParamSpace::sphere(0).unwrap(),
            ParamSpace::circle(10).unwrap(),
            ParamSpace::icosphere(1),
        ] {
            assert_eq!(space.nodes[space.basepoint].dist, 0.0);
            let max = space.nodes.iter().map(|n| n.dist).fold(0.0, f64::max);
            assert!((max - 1.0).abs() < 1e-12, "{max}");
        }
        let c = ParamSpace::circle(8).unwrap();
        assert!((c.nodes[2].dist - 0.5).abs() < 1e-15);
        assert!((c.nodes[1].scale() - 0.75).abs() < 1e-15);
        assert_eq!(c.nodes[4].scale(), 1.0);
        let prod = c.cross_interval(3).unwrap();
        assert_eq!(prod.nodes[0].dist, 0.0);
        assert_eq!(prod.nodes[16].dist, 1.0);
    }

    #[test]
    fn constant_family_is_left_alone() {
        let space = ParamSpace::circle(4).unwrap();
        let k = make_torus_knot(2, 3, 2.0, 1.0, 512).unwrap();
        let fam = CurveFamily::new(space, vec![k; 4]).unwrap();
        let out = correct_family(&fam, &DeformOptions::default()).unwrap();
        assert_eq!(out.turns, Some(1));
        for (tr, node) in out.traces.iter().zip(&out.space.nodes) {
            assert!(tr.w_applied.abs() < 0.05, "{}", tr.w_applied);
            assert!((tr.helix.scale - node.scale()).abs() < 1e-15);
        }
        assert!(max_deviation(&out).unwrap() < 1e-2);
    }

    #[test]
    fn homotopy_rejects_bad_time() {
        let space = ParamSpace::zero_sphere();
        let k = make_torus_knot(2, 3, 2.0, 1.0, 256).unwrap();
        let fam = CurveFamily::new(space, vec![k.clone(), k]).unwrap();
        let out = correct_family(&fam, &DeformOptions::default()).unwrap();
        assert!(matches!(omega_homotopy(&fam, &out, 1.5), Err(Error::Domain(_))));
        assert!(matches!(phi_homotopy(&fam, &out, 0.5), Err(Error::Domain(_))));
        assert!(matches!(omega_homotopy(&fam, &fam, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn homotopy_endpoints_on_small_circle() {
        let space = ParamSpace::circle(6).unwrap();
        let raw = flexed_trefoil(&space, 512).unwrap();
        let opts = DeformOptions::default();
        let fixed = correct_family(&raw, &opts).unwrap();
        let one = omega_homotopy(&raw, &fixed, 1.0).unwrap();
        for (a, b) in one.curves.iter().zip(&fixed.curves) {
            assert_eq!(a.samples(), b.samples());
        }
        let half = omega_homotopy(&raw, &fixed, 0.5).unwrap();
        let tilde = tilde_family(&raw, &fixed).unwrap();
        for (a, b) in half.curves.iter().zip(&tilde.curves) {
            let d = a
                .samples()
                .iter()
                .zip(b.samples())
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-9, "{d}");
        }
        let zero = omega_homotopy(&raw, &fixed, 0.0).unwrap();
        for ((z, tr), c) in zero.curves.iter().zip(&fixed.traces).zip(&raw.curves) {
            let expect = crate::curve::reparameterize_on(c, tr.context.interval()).unwrap();
            assert_eq!(z.samples(), expect.samples());
        }
    }
}
