//! Matrix-level oracles shared by the integration tests. Everything here works
//! on 3x3 homogeneous matrices and does not call into the library's
//! coordinate formulas.

#![allow(dead_code)]

use nalgebra::Matrix3;
use rand::rngs::StdRng;
use rand::Rng;
use se2_ocp::{AlgebraVec, CoAlgebraVec, Pose};

pub fn hat(v: &AlgebraVec) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.a, v.b1, v.a, 0.0, v.b2, 0.0, 0.0, 0.0)
}

pub fn vee(m: &Matrix3<f64>) -> AlgebraVec {
    AlgebraVec::new(m[(1, 0)], m[(0, 2)], m[(1, 2)])
}

pub fn mat(g: &Pose) -> Matrix3<f64> {
    let (s, c) = g.theta.sin_cos();
    Matrix3::new(c, -s, g.x, s, c, g.y, 0.0, 0.0, 1.0)
}

pub fn pose_of(m: &Matrix3<f64>) -> Pose {
    Pose::new(m[(1, 0)].atan2(m[(0, 0)]), m[(0, 2)], m[(1, 2)])
}

pub fn bracket(x: &AlgebraVec, y: &AlgebraVec) -> AlgebraVec {
    let (a, b) = (hat(x), hat(y));
    vee(&(a * b - b * a))
}

pub fn adjoint(g: &Pose, x: &AlgebraVec) -> AlgebraVec {
    let m = mat(g);
    vee(&(m * hat(x) * m.try_inverse().unwrap()))
}

/// Columns are `Ad_g e_k`.
pub fn adjoint_matrix(g: &Pose) -> Matrix3<f64> {
    let mut out = Matrix3::zeros();
    for (k, e) in [AlgebraVec::E1, AlgebraVec::E2, AlgebraVec::E3].iter().enumerate() {
        let col = adjoint(g, e);
        out.set_column(k, &nalgebra::Vector3::new(col.a, col.b1, col.b2));
    }
    out
}

/// `Ad*_g mu` defined by `<Ad*_g mu, xi> = <mu, Ad_g xi>`.
pub fn coadjoint_group(g: &Pose, mu: &CoAlgebraVec) -> CoAlgebraVec {
    let r = adjoint_matrix(g).transpose() * nalgebra::Vector3::new(mu.m1, mu.m2, mu.m3);
    CoAlgebraVec::new(r[0], r[1], r[2])
}

/// `(I - V/2)^{-1} (I + V/2)`.
pub fn cayley(v: &AlgebraVec) -> Matrix3<f64> {
    let h = hat(v) / 2.0;
    let i = Matrix3::identity();
    (i - h).try_inverse().unwrap() * (i + h)
}

/// `dcay^{-1}_v (xi) = (I - V/2) Xi (I + V/2)`.
pub fn dcay_inv(v: &AlgebraVec, xi: &AlgebraVec) -> AlgebraVec {
    let h = hat(v) / 2.0;
    let i = Matrix3::identity();
    vee(&((i - h) * hat(xi) * (i + h)))
}

/// The dual of [`dcay_inv`], assembled column by column.
pub fn dcay_inv_dual(v: &AlgebraVec, mu: &CoAlgebraVec) -> CoAlgebraVec {
    let cols: Vec<AlgebraVec> = [AlgebraVec::E1, AlgebraVec::E2, AlgebraVec::E3]
        .iter()
        .map(|e| dcay_inv(v, e))
        .collect();
    let m = [mu.m1, mu.m2, mu.m3];
    let dot = |c: &AlgebraVec| m[0] * c.a + m[1] * c.b1 + m[2] * c.b2;
    CoAlgebraVec::new(dot(&cols[0]), dot(&cols[1]), dot(&cols[2]))
}

pub fn frob_sq(v: &AlgebraVec) -> f64 {
    let m = hat(v);
    (m.transpose() * m).trace()
}

pub fn rand_pose(rng: &mut StdRng, scale: f64) -> Pose {
    Pose::new(
        rng.gen_range(-3.1..3.1),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn rand_alg(rng: &mut StdRng, scale: f64) -> AlgebraVec {
    AlgebraVec::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn rand_coalg(rng: &mut StdRng, scale: f64) -> CoAlgebraVec {
    CoAlgebraVec::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

pub const BUNDLED: [&str; 3] = ["single_obstacle", "two_agent_swap", "three_agent_line"];
