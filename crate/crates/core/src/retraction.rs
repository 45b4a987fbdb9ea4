//! Retraction maps se(2) -> SE(2), their inverses, and the inverse
//! right-trivialized tangent `dR^{-1}_v` together with its dual.
//!
//! The right-trivialized tangent is defined through
//! `T R(v) . eta = T R_{R(v)} dR_v(eta)`, i.e. `dR_v(eta)` is the derivative of
//! `R` at `v` in direction `eta`, right-translated back to the identity.
//! All linear maps are 3x3 matrices acting on `(a, b1, b2)` coordinates;
//! duals are plain transposes under the coordinate pairing.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::algebra::{coadjoint_group, AlgebraVec, CoAlgebraVec, Pose};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RetractionKind {
    #[default]
    Cayley,
    #[serde(alias = "exp")]
    Exponential,
}

impl FromStr for RetractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cayley" | "cay" => Ok(RetractionKind::Cayley),
            "exp" | "exponential" => Ok(RetractionKind::Exponential),
            other => Err(Error::InvalidArgument(format!(
                "unknown retraction '{other}' (expected cayley or exp)"
            ))),
        }
    }
}

impl std::fmt::Display for RetractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RetractionKind::Cayley => write!(f, "cayley"),
            RetractionKind::Exponential => write!(f, "exp"),
        }
    }
}

/// Headings closer than this to +-pi are treated as the retraction pole.
const POLE_GUARD: f64 = 1e-12;

/// Bernoulli-series coefficients `B_n / n!` for `n = 0, 1, 2, 4, 6, 8`.
/// Dropping the `n = 10` term leaves an error bounded by
/// `|B_10| / 10! * |ad_v|^10 ~= 2.1e-8 * |ad_v|^10`.
const DEXP_INV_SERIES: [(i32, f64); 6] = [
    (0, 1.0),
    (1, -0.5),
    (2, 1.0 / 12.0),
    (4, -1.0 / 720.0),
    (6, 1.0 / 30240.0),
    (8, -1.0 / 1209600.0),
];

pub fn retract(kind: RetractionKind, v: &AlgebraVec) -> Pose {
    match kind {
        RetractionKind::Cayley => cay(v),
        RetractionKind::Exponential => exp(v),
    }
}

pub fn retract_inv(kind: RetractionKind, g: &Pose) -> Result<AlgebraVec> {
    if (g.theta.abs() - PI).abs() < POLE_GUARD {
        return Err(Error::OutOfDomain(format!(
            "{kind} inverse undefined for heading {}",
            g.theta
        )));
    }
    Ok(match kind {
        RetractionKind::Cayley => cay_inv(g),
        RetractionKind::Exponential => log(g),
    })
}

/// Matrix of `dR^{-1}_v` in `(a, b1, b2)` coordinates.
pub fn dretract_inv_matrix(kind: RetractionKind, v: &AlgebraVec) -> Matrix3<f64> {
    match kind {
        RetractionKind::Cayley => {
            let (v1, v2, v3) = (v.a, v.b1, v.b2);
            Matrix3::new(
                1.0 + v1 * v1 / 4.0,
                0.0,
                0.0,
                v1 * v2 / 4.0 - v3 / 2.0,
                1.0,
                v1 / 2.0,
                v1 * v3 / 4.0 + v2 / 2.0,
                -v1 / 2.0,
                1.0,
            )
        }
        RetractionKind::Exponential => {
            let ad = ad_matrix(v);
            let mut out = Matrix3::zeros();
            let mut power = Matrix3::identity();
            let mut n = 0;
            for (order, coeff) in DEXP_INV_SERIES {
                while n < order {
                    power *= ad;
                    n += 1;
                }
                out += coeff * power;
            }
            out
        }
    }
}

/// `dR^{-1}_v (xi)`.
pub fn dretract_inv(kind: RetractionKind, v: &AlgebraVec, xi: &AlgebraVec) -> AlgebraVec {
    let r = dretract_inv_matrix(kind, v) * Vector3::from(xi.to_array());
    AlgebraVec::new(r[0], r[1], r[2])
}

/// `dR_v (eta)`, the inverse of [`dretract_inv`].
pub fn dretract(kind: RetractionKind, v: &AlgebraVec, eta: &AlgebraVec) -> AlgebraVec {
    let m = dretract_inv_matrix(kind, v);
    let r = m
        .lu()
        .solve(&Vector3::from(eta.to_array()))
        .expect("dR^{-1} is invertible on se(2)");
    AlgebraVec::new(r[0], r[1], r[2])
}

/// `(dR^{-1}_v)^* mu`.
pub fn dretract_inv_dual(kind: RetractionKind, v: &AlgebraVec, mu: &CoAlgebraVec) -> CoAlgebraVec {
    if kind == RetractionKind::Cayley {
        // transpose of the Cayley matrix written out
        let (v1, v2, v3) = (v.a, v.b1, v.b2);
        let (m1, m2, m3) = (mu.m1, mu.m2, mu.m3);
        return CoAlgebraVec::new(
            (1.0 + v1 * v1 / 4.0) * m1 + (v1 * v2 / 4.0 - v3 / 2.0) * m2 + (v1 * v3 / 4.0 + v2 / 2.0) * m3,
            m2 - v1 * m3 / 2.0,
            v1 * m2 / 2.0 + m3,
        );
    }
    let r = dretract_inv_matrix(kind, v).transpose() * Vector3::from(mu.to_array());
    CoAlgebraVec::new(r[0], r[1], r[2])
}

/// Residual of `(dR^{-1}_{-v})^* mu = Ad*_{R(v)} (dR^{-1}_v)^* mu`.
pub fn transport_identity_residual(kind: RetractionKind, v: &AlgebraVec, mu: &CoAlgebraVec) -> f64 {
    let lhs = dretract_inv_dual(kind, &(-*v), mu);
    let rhs = coadjoint_group(&retract(kind, v), &dretract_inv_dual(kind, v, mu));
    (lhs - rhs).norm()
}

/// Matrix of `ad_v` acting on coordinates.
pub fn ad_matrix(v: &AlgebraVec) -> Matrix3<f64> {
    Matrix3::new(
        0.0, 0.0, 0.0, //
        v.b2, 0.0, -v.a, //
        -v.b1, v.a, 0.0,
    )
}

/// `cay(v) = (I - v/2)^{-1} (I + v/2)` in closed form.
fn cay(v: &AlgebraVec) -> Pose {
    let q = 1.0 + v.a * v.a / 4.0;
    let half = v.a / 2.0;
    let c = (1.0 - v.a * v.a / 4.0) / q;
    let s = v.a / q;
    Pose {
        theta: s.atan2(c),
        x: (v.b1 - half * v.b2) / q,
        y: (v.b2 + half * v.b1) / q,
    }
}

fn cay_inv(g: &Pose) -> AlgebraVec {
    let a = 2.0 * (g.theta / 2.0).tan();
    let half = a / 2.0;
    AlgebraVec::new(a, g.x + half * g.y, g.y - half * g.x)
}

/// `sin(a)/a` and `(1 - cos a)/a`, with series near zero.
fn sinc_terms(a: f64) -> (f64, f64) {
    if a.abs() < 1e-4 {
        let a2 = a * a;
        (1.0 - a2 / 6.0 + a2 * a2 / 120.0, a / 2.0 - a * a2 / 24.0)
    } else {
        (a.sin() / a, (1.0 - a.cos()) / a)
    }
}

fn exp(v: &AlgebraVec) -> Pose {
    let (sa, ca) = sinc_terms(v.a);
    Pose::new(v.a, sa * v.b1 - ca * v.b2, ca * v.b1 + sa * v.b2)
}

fn log(g: &Pose) -> AlgebraVec {
    let th = g.theta;
    let (sa, ca) = sinc_terms(th);
    let det = sa * sa + ca * ca;
    AlgebraVec::new(
        th,
        (sa * g.x + ca * g.y) / det,
        (-ca * g.x + sa * g.y) / det,
    )
}
