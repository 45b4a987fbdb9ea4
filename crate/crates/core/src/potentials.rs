//! Collision and obstacle avoidance potentials and their left-trivialized
//! gradients.
//!
//! The obstacle potential is written through the evolving parameter
//! `alpha = Ad_{g^{-1}} alpha0` with `alpha0 = (1, J c)` for an obstacle
//! centred at `c`, which makes it invariant under the extended left action.
//! Its value is `sigma / (2 (|alpha|^2 - 2 - (rbar + rho)^2))` where `rho` is
//! the obstacle radius; for `rbar = rho = 1` the offset is the constant 6.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    adjoint, bracket, inverse, momentum_map, trace_norm_sq, AlgebraVec, CoAlgebraVec, Pose,
};
use crate::error::{Error, Result};
use crate::retraction::{retract, RetractionKind};

/// The parameter carried alongside each agent to restore the broken symmetry.
/// Its `a` coordinate never changes.
pub type AlphaState = AlgebraVec;

/// Pairwise collision potential `sigma / (2 (|r_i - r_j|^2 - 4 rbar^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPotential {
    pub sigma: f64,
    pub rbar: f64,
}

impl PairPotential {
    fn denominator(&self, gi: &Pose, gj: &Pose) -> Result<(f64, f64, f64)> {
        let (dx, dy) = (gi.x - gj.x, gi.y - gj.y);
        let d = dx * dx + dy * dy - 4.0 * self.rbar * self.rbar;
        if d <= 0.0 {
            return Err(Error::infeasible(format!(
                "agents {:.6} apart, need more than {:.6}",
                (dx * dx + dy * dy).sqrt(),
                2.0 * self.rbar
            )));
        }
        Ok((dx, dy, d))
    }

    pub fn value(&self, gi: &Pose, gj: &Pose) -> Result<f64> {
        let (_, _, d) = self.denominator(gi, gj)?;
        Ok(self.sigma / (2.0 * d))
    }

    /// World-frame gradient with respect to the position of agent `i`.
    pub fn world_gradient(&self, gi: &Pose, gj: &Pose) -> Result<(f64, f64)> {
        let (dx, dy, d) = self.denominator(gi, gj)?;
        let k = -self.sigma / (d * d);
        Ok((k * dx, k * dy))
    }

    /// `T*_e L_{g_i} (dV/dg_i)`: the gradient pulled back to the body frame of
    /// agent `i`. The potential is heading independent, so the `e^1` slot is 0.
    pub fn force(&self, gi: &Pose, gj: &Pose) -> Result<CoAlgebraVec> {
        let (fx, fy) = self.world_gradient(gi, gj)?;
        let (s, c) = gi.theta.sin_cos();
        Ok(CoAlgebraVec::new(0.0, c * fx + s * fy, -s * fx + c * fy))
    }
}

/// Single disk obstacle, expressed through the extended potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstaclePotential {
    pub sigma: f64,
    pub rbar: f64,
    pub radius: f64,
    pub center: [f64; 2],
}

impl ObstaclePotential {
    /// `alpha0 = (1, J c)`.
    pub fn alpha0(&self) -> AlgebraVec {
        AlgebraVec::new(1.0, self.center[1], -self.center[0])
    }

    /// Offset subtracted from `|alpha|^2`: `2 + (rbar + rho)^2`.
    pub fn offset(&self) -> f64 {
        let clearance = self.rbar + self.radius;
        2.0 + clearance * clearance
    }

    /// Minimum allowed distance between agent centre and obstacle centre.
    pub fn clearance(&self) -> f64 {
        self.rbar + self.radius
    }

    fn denominator(&self, alpha: &AlphaState) -> Result<f64> {
        let d = trace_norm_sq(alpha) - self.offset();
        if d <= 0.0 {
            return Err(Error::infeasible(format!(
                "obstacle clearance violated (|alpha|^2 - offset = {d:.6e})"
            )));
        }
        Ok(d)
    }

    /// `V_ext(alpha) = sigma / (2 (|alpha|^2 - offset))`.
    pub fn extended_value(&self, alpha: &AlphaState) -> Result<f64> {
        Ok(self.sigma / (2.0 * self.denominator(alpha)?))
    }

    /// `dV_ext / d alpha`, a covector.
    pub fn gradient(&self, alpha: &AlphaState) -> Result<CoAlgebraVec> {
        let d = self.denominator(alpha)?;
        let k = -self.sigma / (d * d);
        Ok(CoAlgebraVec::new(k * 2.0 * alpha.a, k * alpha.b1, k * alpha.b2))
    }

    /// `J(dV/d alpha, alpha) = ad*_alpha (dV/d alpha)`
    /// `= (0, -sigma a1 a3 / D^2, sigma a1 a2 / D^2)`.
    pub fn force(&self, alpha: &AlphaState) -> Result<CoAlgebraVec> {
        let d = self.denominator(alpha)?;
        let k = self.sigma * alpha.a / (d * d);
        Ok(CoAlgebraVec::new(0.0, -k * alpha.b2, k * alpha.b1))
    }

    /// The non-invariant form `sigma / (2 (|r - c|^2 - (rbar + rho)^2))`.
    pub fn world_value(&self, g: &Pose) -> Result<f64> {
        let (dx, dy) = (g.x - self.center[0], g.y - self.center[1]);
        let cl = self.clearance();
        let d = dx * dx + dy * dy - cl * cl;
        if d <= 0.0 {
            return Err(Error::infeasible("agent inside obstacle clearance zone"));
        }
        Ok(self.sigma / (2.0 * d))
    }

    /// Distance from the agent centre to the obstacle centre.
    pub fn center_distance(&self, g: &Pose) -> f64 {
        (g.x - self.center[0]).hypot(g.y - self.center[1])
    }

    /// `alpha` seen from pose `g`: `Ad_{g^{-1}} alpha0`.
    pub fn alpha_at(&self, g: &Pose) -> AlphaState {
        adjoint(&inverse(g), &self.alpha0())
    }
}

/// Gains and geometry for every potential in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// Symmetric, non-negative, zero diagonal.
    pub sigma_pair: Vec<Vec<f64>>,
    pub sigma_obstacle: Vec<f64>,
    pub rbar: f64,
    pub obstacle_center: [f64; 2],
    pub obstacle_radius: f64,
}

impl PotentialParams {
    pub fn num_agents(&self) -> usize {
        self.sigma_obstacle.len()
    }

    pub fn pair(&self, i: usize, j: usize) -> PairPotential {
        PairPotential {
            sigma: self.sigma_pair[i][j],
            rbar: self.rbar,
        }
    }

    pub fn obstacle(&self, i: usize) -> ObstaclePotential {
        ObstaclePotential {
            sigma: self.sigma_obstacle[i],
            rbar: self.rbar,
            radius: self.obstacle_radius,
            center: self.obstacle_center,
        }
    }
}

/// `d alpha / dt = -ad_u alpha`.
pub fn evolve_alpha_continuous(alpha: &AlphaState, u: &AlgebraVec) -> AlgebraVec {
    -bracket(u, alpha)
}

/// `alpha^{k+1} = Ad_{R(h u)^{-1}} alpha^k`.
pub fn evolve_alpha_discrete(
    alpha: &AlphaState,
    u: &AlgebraVec,
    h: f64,
    kind: RetractionKind,
) -> AlphaState {
    let step = retract(kind, &(h * *u));
    adjoint(&inverse(&step), alpha)
}

/// Obstacle force computed the long way, through the generic momentum map.
pub fn obstacle_force_via_momentum_map(
    obstacle: &ObstaclePotential,
    alpha: &AlphaState,
) -> Result<CoAlgebraVec> {
    Ok(momentum_map(&obstacle.gradient(alpha)?, alpha))
}
