//! Writhe of closed space curves, the tangent indicatrix and Fuller's relation,
//! and a local helix-insertion surgery that deforms an embedded curve, or a whole
//! parameterized family of curves, to an exactly prescribed writhe.
//!
//! Curves are dense uniform samplings ([`ClosedCurve`]). Writhe is computed by a
//! banded Gauss quadrature and checked against an exact polygonal solid-angle
//! sum ([`writhe`]). The deformation pipeline lives in [`deform`], families and
//! their homotopies in [`family`].

pub mod corpus;
pub mod curve;
pub mod deform;
pub mod error;
pub mod family;
pub mod indicatrix;
pub mod io;
pub mod pairwise;
pub mod report;
pub mod writhe;

pub use curve::{
    make_circle, make_perturbed_circle, make_torus_knot, min_self_distance,
    reparameterize_constant, ClosedCurve, ConstantInterval, Provenance, Vec3,
};
pub use deform::{correct_writhe, DeformTrace, HelixSpec, SpliceContext};
pub use error::{Error, Result};
pub use family::{correct_family, omega_homotopy, phi_homotopy, CurveFamily, ParamSpace};
pub use indicatrix::{enclosed_area, fuller_check, tangent_indicatrix, IndicatrixReport};
pub use writhe::{cross_validate, writhe_polygonal, writhe_quadrature, WritheMethod, WritheReport};
