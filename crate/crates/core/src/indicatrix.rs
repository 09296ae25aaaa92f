//! Tangent indicatrix and the Fuller relation `1 + Wr ≡ A/2π (mod 2)`.
//!
//! The indicatrix of a sampled curve is the spherical polygon of its edge
//! directions joined by minor geodesic arcs, so corners of the polygon are
//! handled exactly and no smoothing is needed.
//!
//! Enclosed area is counted with multiplicity: it is the signed area swept by
//! the geodesic from a fixed apex `c` to a point running once around the
//! indicatrix, which equals `∫ wind(p) dA` with weight zero at `−c`. Moving the
//! apex across the curve changes the value by a multiple of 4π, so the value is
//! well defined mod 4π, which is all the Fuller relation needs. An indicatrix
//! that winds `n` times around a cap reports `n` times the cap area.
//!
//! Orientation is clockwise-positive as seen from outside the sphere, which is
//! the orientation for which the relation holds with the writhe sign used in
//! [`crate::writhe`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::curve::{ClosedCurve, Vec3};
use crate::error::{Error, Result};
use crate::report::fmt_sig;
use crate::writhe::{writhe, WritheMethod};

/// Directions closer than this are merged into one indicatrix vertex.
const MERGE_TOL: f64 = 1e-13;

/// Dot products below this are treated as antipodal.
const ANTIPODAL_TOL: f64 = -1.0 + 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatrixReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub writhe: f64,
    pub writhe_method: WritheMethod,
    /// Enclosed area reduced to `[0, 4π)`.
    pub area: f64,
    pub fuller_lhs: f64,
    pub fuller_rhs: f64,
    pub residual_mod2: f64,
}

impl IndicatrixReport {
    pub const CSV_HEADER: &'static str = "N,writhe,area,fuller_lhs,fuller_rhs,residual_mod2";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            fmt_sig(self.writhe),
            fmt_sig(self.area),
            fmt_sig(self.fuller_lhs),
            fmt_sig(self.fuller_rhs),
            fmt_sig(self.residual_mod2)
        )
    }
}

/// Unit edge directions of the sampled curve, one per non-degenerate edge.
///
/// Zero-length edges are allowed only inside the curve's declared constant
/// interval. Consecutive equal directions (a straight stretch) collapse to one
/// vertex.
pub fn tangent_indicatrix(curve: &ClosedCurve) -> Result<Vec<Vec3>> {
    let n = curve.len();
    let pts = curve.samples();
    let constant = curve.constant_interval();
    let mut dirs: Vec<Vec3> = Vec::with_capacity(n);
    for k in 0..n {
        let e = pts[(k + 1) % n] - pts[k];
        let len = e.norm();
        if len == 0.0 {
            let inside = constant
                .map(|iv| iv.contains_index(k) && iv.contains_index((k + 1) % n))
                .unwrap_or(false);
            if !inside {
                return Err(Error::ZeroTangent { index: k });
            }
            continue;
        }
        let d = e / len;
        if dirs.last().is_none_or(|last| (last - d).norm() > MERGE_TOL) {
            dirs.push(d);
        }
    }
    while dirs.len() > 1 && (dirs[0] - dirs[dirs.len() - 1]).norm() <= MERGE_TOL {
        dirs.pop();
    }
    Ok(dirs)
}

/// Signed area of the spherical triangle `(apex, a, b)`, clockwise-positive.
#[inline]
pub fn fan_term(apex: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    -crate::writhe::triangle_excess(apex, a, b)
}

/// Apex whose antipode stays farthest from every vertex.
pub fn choose_apex(points: &[Vec3]) -> Vec3 {
    let mut candidates: Vec<Vec3> = Vec::with_capacity(15);
    let mean: Vec3 = points.iter().sum();
    if mean.norm() > 1e-9 {
        candidates.push(mean.normalize());
    }
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut v = Vec3::zeros();
            v[axis] = sign;
            candidates.push(v);
        }
    }
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                candidates.push(Vec3::new(sx, sy, sz).normalize());
            }
        }
    }
    let clearance = |c: &Vec3| {
        points
            .iter()
            .map(|p| (p + c).norm())
            .fold(f64::INFINITY, f64::min)
    };
    candidates
        .into_iter()
        .map(|c| (clearance(&c), c))
        .fold((f64::NEG_INFINITY, Vec3::z()), |best, cand| {
            if cand.0 > best.0 {
                cand
            } else {
                best
            }
        })
        .1
}

/// Signed enclosed area with multiplicity, about an automatically chosen apex.
///
/// The value is not reduced mod 4π.
pub fn enclosed_area(indicatrix: &[Vec3]) -> Result<f64> {
    let apex = choose_apex(indicatrix);
    enclosed_area_about(indicatrix, &apex)
}

/// Signed enclosed area with multiplicity, counted zero around `−apex`.
pub fn enclosed_area_about(indicatrix: &[Vec3], apex: &Vec3) -> Result<f64> {
    let m = indicatrix.len();
    if m < 2 {
        return Ok(0.0);
    }
    let mut terms = Vec::with_capacity(m);
    for k in 0..m {
        let a = &indicatrix[k];
        let b = &indicatrix[(k + 1) % m];
        if a.dot(b) < ANTIPODAL_TOL {
            return Err(Error::AntipodalVertices { index: k });
        }
        terms.push(fan_term(apex, a, b));
    }
    Ok(crate::pairwise::neumaier_sum(&terms))
}

/// Distance from `x` to the nearest even integer.
pub fn distance_to_even(x: f64) -> f64 {
    (x - 2.0 * (x / 2.0).round()).abs()
}

/// Check the Fuller relation using the exact polygonal writhe.
pub fn fuller_check(curve: &ClosedCurve) -> Result<IndicatrixReport> {
    fuller_check_with(curve, WritheMethod::PolygonalExact)
}

pub fn fuller_check_with(curve: &ClosedCurve, method: WritheMethod) -> Result<IndicatrixReport> {
    let wr = writhe(curve, method)?;
    let ind = tangent_indicatrix(curve)?;
    let raw = enclosed_area(&ind)?;
    Ok(fuller_report(curve.len(), wr, method, raw))
}

pub(crate) fn fuller_report(n: usize, wr: f64, method: WritheMethod, raw_area: f64) -> IndicatrixReport {
    let area = raw_area.rem_euclid(2.0 * TAU);
    let lhs = 1.0 + wr;
    let rhs = area / TAU;
    IndicatrixReport {
        n,
        writhe: wr,
        writhe_method: method,
        area,
        fuller_lhs: lhs,
        fuller_rhs: rhs,
        residual_mod2: distance_to_even(lhs - rhs),
    }
}

/// Area of a spherical cap whose boundary makes angle `pitch` with the equator
/// plane of its own axis: `2π(1 − sin ψ)`.
pub fn cap_area(pitch: f64) -> f64 {
    TAU * (1.0 - pitch.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_circle, Provenance};

    fn small_circle(polar: f64, m: usize, loops: usize, clockwise: bool) -> Vec<Vec3> {
        let sign = if clockwise { -1.0 } else { 1.0 };
        (0..m * loops)
            .map(|i| {
                let t = sign * TAU * i as f64 / m as f64;
                Vec3::new(polar.sin() * t.cos(), polar.sin() * t.sin(), polar.cos())
            })
            .collect()
    }

    #[test]
    fn circle_indicatrix_is_great_circle() {
        let c = make_circle(1.0, 256).unwrap();
        let ind = tangent_indicatrix(&c).unwrap();
        assert_eq!(ind.len(), 256);
        for d in &ind {
            assert!(d.z.abs() < 1e-15);
            assert!((d.norm() - 1.0).abs() < 1e-12);
        }
        let a = enclosed_area(&ind).unwrap();
        assert!((a.abs() - TAU).abs() < 1e-9, "{a}");
    }

    #[test]
    fn circle_fuller_exact() {
        let c = make_circle(1.0, 512).unwrap();
        let r = fuller_check(&c).unwrap();
        assert!((r.fuller_lhs - 1.0).abs() < 1e-12);
        assert!(r.residual_mod2 < 1e-9);
    }

    #[test]
    fn clockwise_loop_counts_positive() {
        let polar = 0.3;
        let ind = small_circle(polar, 4000, 1, true);
        let a = enclosed_area(&ind).unwrap();
        let cap = TAU * (1.0 - polar.cos());
        assert!((a - cap).abs() < 1e-5 * cap, "{a} vs {cap}");
        let ccw = small_circle(polar, 4000, 1, false);
        assert!((enclosed_area(&ccw).unwrap() + cap).abs() < 1e-5 * cap);
    }

    #[test]
    fn loops_count_with_multiplicity() {
        let polar = 0.7;
        let ind = small_circle(polar, 4000, 3, true);
        let a = enclosed_area(&ind).unwrap();
        let cap = TAU * (1.0 - polar.cos());
        assert!((a - 3.0 * cap).abs() < 1e-5 * cap, "{a}");
    }

    #[test]
    fn antipodal_neighbours_rejected() {
        let ind = vec![Vec3::x(), -Vec3::x(), Vec3::y()];
        assert!(matches!(
            enclosed_area(&ind),
            Err(Error::AntipodalVertices { index: 0 })
        ));
    }

    #[test]
    fn zero_tangent_outside_interval_rejected() {
        let c = make_circle(1.0, 64).unwrap();
        let mut pts = c.samples().to_vec();
        pts[11] = pts[10];
        let bad = ClosedCurve::from_samples(pts, Provenance::derived("test")).unwrap();
        assert!(matches!(
            tangent_indicatrix(&bad),
            Err(Error::ZeroTangent { index: 10 })
        ));
    }

    #[test]
    fn even_distance() {
        assert!((distance_to_even(2.999) - 0.999).abs() < 1e-12);
        assert!((distance_to_even(-0.25) - 0.25).abs() < 1e-12);
        assert!((distance_to_even(3.0) - 1.0).abs() < 1e-12);
    }
}
