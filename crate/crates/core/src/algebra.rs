//! Coordinate-level SE(2) Lie theory.
//!
//! Group elements are stored as `(theta, x, y)`. Algebra elements are
//! triples `(a, b1, b2)` on the basis
//!
//! ```text
//! e1 = [[0,-1,0],[1,0,0],[0,0,0]]   (rotation)
//! e2 = [[0,0,1],[0,0,0],[0,0,0]]    (body x translation)
//! e3 = [[0,0,0],[0,0,1],[0,0,0]]    (body y translation)
//! ```
//!
//! with `[e1,e2] = e3`, `[e2,e3] = 0`, `[e3,e1] = e2`. Dual elements are
//! triples on the dual basis and the pairing is the coordinate dot product,
//! `<e^i, e_j> = delta_ij`. The 3x3 matrix embeddings exist for
//! cross-checking only; every kernel works on coordinates.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3, Vector2};
use serde::{Deserialize, Serialize};

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// The constant `J = [[0, 1], [-1, 0]]` applied to a planar vector.
#[inline]
fn jmul(x: f64, y: f64) -> (f64, f64) {
    (y, -x)
}

/// An element of SE(2): heading plus planar position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn new(theta: f64, x: f64, y: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            x,
            y,
        }
    }

    pub const fn identity() -> Self {
        Self {
            theta: 0.0,
            x: 0.0,
            y: 0.0,
        }
    }

    pub fn translation(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn rotation(&self) -> Matrix2<f64> {
        let (s, c) = self.theta.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.x.is_finite() && self.y.is_finite()
    }

    /// Homogeneous 3x3 matrix.
    pub fn to_matrix(&self) -> Matrix3<f64> {
        let (s, c) = self.theta.sin_cos();
        Matrix3::new(c, -s, self.x, s, c, self.y, 0.0, 0.0, 1.0)
    }

    /// Reads a homogeneous matrix back into coordinates. The rotation block is
    /// assumed orthonormal.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(m[(1, 0)].atan2(m[(0, 0)]), m[(0, 2)], m[(1, 2)])
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        compose(self, other)
    }

    pub fn inverse(&self) -> Pose {
        inverse(self)
    }

    /// Squared planar distance between two poses.
    pub fn distance_sq(&self, other: &Pose) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Largest absolute coordinate difference, with the heading difference wrapped.
    pub fn max_abs_diff(&self, other: &Pose) -> f64 {
        wrap_angle(self.theta - other.theta)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
    }
}

/// Coordinates of an element of se(2) on the basis e1, e2, e3.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraVec {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Coordinates of an element of se(2)* on the dual basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoAlgebraVec {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

macro_rules! triple_ops {
    ($ty:ident, $f0:ident, $f1:ident, $f2:ident) => {
        impl $ty {
            pub const ZERO: $ty = $ty {
                $f0: 0.0,
                $f1: 0.0,
                $f2: 0.0,
            };

            pub const fn new($f0: f64, $f1: f64, $f2: f64) -> Self {
                Self { $f0, $f1, $f2 }
            }

            pub fn from_array(v: [f64; 3]) -> Self {
                Self::new(v[0], v[1], v[2])
            }

            pub fn to_array(self) -> [f64; 3] {
                [self.$f0, self.$f1, self.$f2]
            }

            pub fn norm_inf(self) -> f64 {
                self.$f0.abs().max(self.$f1.abs()).max(self.$f2.abs())
            }

            /// Euclidean norm of the coordinate triple.
            pub fn norm(self) -> f64 {
                (self.$f0 * self.$f0 + self.$f1 * self.$f1 + self.$f2 * self.$f2).sqrt()
            }

            pub fn is_finite(self) -> bool {
                self.$f0.is_finite() && self.$f1.is_finite() && self.$f2.is_finite()
            }
        }

        impl Add for $ty {
            type Output = $ty;
            fn add(self, o: $ty) -> $ty {
                $ty::new(self.$f0 + o.$f0, self.$f1 + o.$f1, self.$f2 + o.$f2)
            }
        }

        impl AddAssign for $ty {
            fn add_assign(&mut self, o: $ty) {
                *self = *self + o;
            }
        }

        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, o: $ty) -> $ty {
                $ty::new(self.$f0 - o.$f0, self.$f1 - o.$f1, self.$f2 - o.$f2)
            }
        }

        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty::new(-self.$f0, -self.$f1, -self.$f2)
            }
        }

        impl Mul<$ty> for f64 {
            type Output = $ty;
            fn mul(self, v: $ty) -> $ty {
                $ty::new(self * v.$f0, self * v.$f1, self * v.$f2)
            }
        }
    };
}

triple_ops!(AlgebraVec, a, b1, b2);
triple_ops!(CoAlgebraVec, m1, m2, m3);

impl AlgebraVec {
    pub const E1: AlgebraVec = AlgebraVec::new(1.0, 0.0, 0.0);
    pub const E2: AlgebraVec = AlgebraVec::new(0.0, 1.0, 0.0);
    pub const E3: AlgebraVec = AlgebraVec::new(0.0, 0.0, 1.0);

    /// The 3x3 matrix `a e1 + b1 e2 + b2 e3`.
    pub fn hat(&self) -> Matrix3<f64> {
        Matrix3::new(
            0.0, -self.a, self.b1, //
            self.a, 0.0, self.b2, //
            0.0, 0.0, 0.0,
        )
    }

    /// Inverse of [`AlgebraVec::hat`]; reads the skew and translation entries.
    pub fn vee(m: &Matrix3<f64>) -> Self {
        Self::new(0.5 * (m[(1, 0)] - m[(0, 1)]), m[(0, 2)], m[(1, 2)])
    }

    /// Reinterprets the coordinates as a covector (the coordinate metric).
    pub fn flat(self) -> CoAlgebraVec {
        CoAlgebraVec::new(self.a, self.b1, self.b2)
    }
}

impl CoAlgebraVec {
    pub fn sharp(self) -> AlgebraVec {
        AlgebraVec::new(self.m1, self.m2, self.m3)
    }
}

/// Group law `(R_g R_h, R_g r_h + r_g)`.
pub fn compose(g: &Pose, h: &Pose) -> Pose {
    let (s, c) = g.theta.sin_cos();
    Pose::new(
        g.theta + h.theta,
        c * h.x - s * h.y + g.x,
        s * h.x + c * h.y + g.y,
    )
}

/// `(R, r)^{-1} = (R^T, -R^T r)`.
pub fn inverse(g: &Pose) -> Pose {
    let (s, c) = g.theta.sin_cos();
    Pose::new(-g.theta, -(c * g.x + s * g.y), -(-s * g.x + c * g.y))
}

/// `Ad_g (a, b) = (a, a J r + R b)`.
pub fn adjoint(g: &Pose, xi: &AlgebraVec) -> AlgebraVec {
    let (s, c) = g.theta.sin_cos();
    let (jx, jy) = jmul(g.x, g.y);
    AlgebraVec::new(
        xi.a,
        xi.a * jx + c * xi.b1 - s * xi.b2,
        xi.a * jy + s * xi.b1 + c * xi.b2,
    )
}

/// Lie bracket in coordinates.
pub fn bracket(xi: &AlgebraVec, eta: &AlgebraVec) -> AlgebraVec {
    AlgebraVec::new(
        0.0,
        xi.b2 * eta.a - xi.a * eta.b2,
        xi.a * eta.b1 - xi.b1 * eta.a,
    )
}

/// `ad_xi eta`, same as [`bracket`].
pub fn ad(xi: &AlgebraVec, eta: &AlgebraVec) -> AlgebraVec {
    bracket(xi, eta)
}

/// `ad*_xi mu`, defined by `<ad*_xi mu, eta> = <mu, [xi, eta]>`.
pub fn coadjoint_star(xi: &AlgebraVec, mu: &CoAlgebraVec) -> CoAlgebraVec {
    CoAlgebraVec::new(
        mu.m2 * xi.b2 - mu.m3 * xi.b1,
        mu.m3 * xi.a,
        -mu.m2 * xi.a,
    )
}

/// `Ad*_g mu`, defined by `<Ad*_g mu, xi> = <mu, Ad_g xi>`.
pub fn coadjoint_group(g: &Pose, mu: &CoAlgebraVec) -> CoAlgebraVec {
    let (s, c) = g.theta.sin_cos();
    let (jx, jy) = jmul(g.x, g.y);
    CoAlgebraVec::new(
        mu.m1 + mu.m2 * jx + mu.m3 * jy,
        c * mu.m2 + s * mu.m3,
        -s * mu.m2 + c * mu.m3,
    )
}

/// Canonical pairing: coordinate dot product.
pub fn pair(mu: &CoAlgebraVec, xi: &AlgebraVec) -> f64 {
    mu.m1 * xi.a + mu.m2 * xi.b1 + mu.m3 * xi.b2
}

/// Momentum map of the coadjoint representation, `J(x, alpha) = ad*_alpha x`.
///
/// `x` is a point of `V = se(2)*` and `alpha` a covector of `V`, which we
/// identify with an algebra element.
pub fn momentum_map(x: &CoAlgebraVec, alpha: &AlgebraVec) -> CoAlgebraVec {
    coadjoint_star(alpha, x)
}

/// Squared trace norm `tr(xi^T xi) = 2a^2 + |b|^2`.
pub fn trace_norm_sq(xi: &AlgebraVec) -> f64 {
    2.0 * xi.a * xi.a + xi.b1 * xi.b1 + xi.b2 * xi.b2
}
