//! Writhe of a closed curve by two independent routes.
//!
//! [`writhe_quadrature`] discretizes the Gauss double integral directly and drops
//! a band of near-diagonal pairs. [`writhe_polygonal`] treats the samples as the
//! vertices of a polygon and integrates the Gauss map exactly over every pair of
//! non-adjacent edges as a signed spherical quadrilateral. The second is exact
//! for the polygon and serves as the oracle for the first.
//!
//! Sign convention: the integrand is `(γ′ᵢ × γ′ⱼ) · (γⱼ − γᵢ) / |γⱼ − γᵢ|³`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{compress, ClosedCurve, Vec3};
use crate::error::{Error, Result};
use crate::pairwise::{circular_gap, sum_upper};
use crate::report::fmt_sig;

pub const DEFAULT_BAND: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WritheMethod {
    Quadrature,
    PolygonalExact,
}

impl WritheMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            WritheMethod::Quadrature => "quadrature",
            WritheMethod::PolygonalExact => "polygonal_exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WritheReport {
    pub value: f64,
    pub method: WritheMethod,
    #[serde(rename = "N")]
    pub n: usize,
    pub diagonal_band: Option<usize>,
    pub oracle_delta: Option<f64>,
}

impl WritheReport {
    pub const CSV_HEADER: &'static str = "method,N,band,value,oracle_delta";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.method.as_str(),
            self.n,
            self.diagonal_band.map(|b| b.to_string()).unwrap_or_default(),
            fmt_sig(self.value),
            self.oracle_delta.map(fmt_sig).unwrap_or_default(),
        )
    }
}

/// Discrete Gauss integral with the pairs `|i − j|_circ <= band` excluded.
///
/// Consecutive duplicate samples are merged first; the tangent differential at a
/// vertex is the central difference `(γᵢ₊₁ − γᵢ₋₁)/2`, i.e. `γ′ᵢ Δs`.
pub fn writhe_quadrature(curve: &ClosedCurve, band: usize) -> Result<WritheReport> {
    if band == 0 {
        return Err(Error::Domain("diagonal band must be at least 1".into()));
    }
    let pts = compress(curve.samples());
    let m = pts.len();
    if m <= 2 * band + 1 {
        return Err(Error::Domain(format!(
            "{m} distinct samples cannot support a diagonal band of {band}"
        )));
    }
    let diffs: Vec<Vec3> = (0..m)
        .map(|i| (pts[(i + 1) % m] - pts[(i + m - 1) % m]) * 0.5)
        .collect();
    let sum = sum_upper(m, |i, j| {
        if circular_gap(i, j, m) <= band {
            return 0.0;
        }
        let r = pts[j] - pts[i];
        let r2 = r.norm_squared();
        diffs[i].cross(&diffs[j]).dot(&r) / (r2 * r2.sqrt())
    });
    if !sum.is_finite() {
        return Err(Error::SingularIntegrand(
            "two non-neighbouring samples coincide".into(),
        ));
    }
    Ok(WritheReport {
        value: 2.0 * sum / (4.0 * PI),
        method: WritheMethod::Quadrature,
        n: curve.len(),
        diagonal_band: Some(band),
        oracle_delta: None,
    })
}

/// Signed area of the spherical triangle on unit vectors `a, b, c`.
#[inline]
pub(crate) fn triangle_excess(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Solid angle swept by the directions from edge `[p1, p2]` to edge `[p3, p4]`.
#[inline]
fn edge_pair_solid_angle(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> f64 {
    let a = p3 - p1;
    let b = p3 - p2;
    let c = p4 - p2;
    let d = p4 - p1;
    let a = a / a.norm();
    let b = b / b.norm();
    let c = c / c.norm();
    let d = d / d.norm();
    triangle_excess(&a, &b, &c) + triangle_excess(&a, &c, &d)
}

/// Exact writhe of the polygon through the samples.
pub fn writhe_polygonal(curve: &ClosedCurve) -> Result<WritheReport> {
    let pts = compress(curve.samples());
    let m = pts.len();
    if m < 4 {
        return Err(Error::Domain(format!(
            "polygon with {m} distinct vertices has no non-adjacent edge pairs"
        )));
    }
    let sum = sum_upper(m, |k, l| {
        if l == k + 1 || (k == 0 && l == m - 1) {
            return 0.0;
        }
        edge_pair_solid_angle(&pts[k], &pts[(k + 1) % m], &pts[l], &pts[(l + 1) % m])
    });
    if !sum.is_finite() {
        return Err(Error::SingularIntegrand(
            "non-adjacent polygon edges touch".into(),
        ));
    }
    Ok(WritheReport {
        value: -2.0 * sum / (4.0 * PI),
        method: WritheMethod::PolygonalExact,
        n: curve.len(),
        diagonal_band: None,
        oracle_delta: None,
    })
}

/// Writhe by whichever method is requested, with the default band for quadrature.
pub fn writhe(curve: &ClosedCurve, method: WritheMethod) -> Result<f64> {
    match method {
        WritheMethod::Quadrature => writhe_quadrature(curve, DEFAULT_BAND).map(|r| r.value),
        WritheMethod::PolygonalExact => writhe_polygonal(curve).map(|r| r.value),
    }
}

/// Quadrature report with `oracle_delta = |quadrature − polygonal|`.
pub fn cross_validate(curve: &ClosedCurve, band: usize) -> Result<(WritheReport, WritheReport)> {
    let mut quad = writhe_quadrature(curve, band)?;
    let poly = writhe_polygonal(curve)?;
    quad.oracle_delta = Some((quad.value - poly.value).abs());
    Ok((quad, poly))
}
