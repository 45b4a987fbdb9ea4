//! Continuous-time reduced optimality equations on SE(2)^s, integrated as an
//! initial value problem with classical RK4.
//!
//! The default actuation is the underactuated split `r = span{e1, e2}`,
//! `s = span{e3}`: the control has no `e3` component and a multiplier
//! `lambda3` on `e^3` enforces it. For each agent
//!
//! ```text
//! du1/dt = -u2 lambda3 / 2
//! du2/dt =  u1 lambda3 + F_2
//! dl3/dt = -u1 u2      + F_3
//! dalpha/dt = -ad_u alpha
//! dtheta/dt = u1, dx/dt = u2 cos(theta), dy/dt = u2 sin(theta)
//! ```
//!
//! where `F` is the obstacle force `ad*_alpha (dV/d alpha)` plus, for every
//! agent except the first, the sum of pair forces over its neighbours.
//!
//! [`Actuation::Full`] drops the multiplier and lets the control range over
//! all of se(2): `du/dt = ad*_u u + F`. It is the continuous limit of the
//! discrete scheme in [`crate::discrete`].

use serde::{Deserialize, Serialize};

use crate::algebra::{bracket, coadjoint_star, wrap_angle, AlgebraVec, CoAlgebraVec, Pose};
use crate::error::{Error, Result};
use crate::potentials::{evolve_alpha_continuous, AlphaState, PotentialParams};

/// Interaction graph and potential data shared by every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDef {
    pub neighbors: Vec<Vec<usize>>,
    pub params: PotentialParams,
}

impl SystemDef {
    /// Builds the neighbour sets from an undirected edge list.
    pub fn new(params: PotentialParams, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); params.num_agents()];
        for &(i, j) in edges {
            if !neighbors[i].contains(&j) {
                neighbors[i].push(j);
            }
            if !neighbors[j].contains(&i) {
                neighbors[j].push(i);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        Self { neighbors, params }
    }

    pub fn num_agents(&self) -> usize {
        self.neighbors.len()
    }

    /// Zero for the first agent, one otherwise. The first agent plays the
    /// role of the reference frame in the reduction and sees no pair forces.
    pub fn pair_weight(i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            1.0
        }
    }

    /// Sum of left-trivialized pair gradients acting on agent `i`, weighted
    /// by [`SystemDef::pair_weight`].
    pub fn pair_force(&self, i: usize, poses: &[Pose]) -> Result<CoAlgebraVec> {
        let mut total = CoAlgebraVec::ZERO;
        for &j in &self.neighbors[i] {
            total += self.params.pair(i, j).force(&poses[i], &poses[j])?;
        }
        Ok(Self::pair_weight(i) * total)
    }

    /// Obstacle force on agent `i` at parameter `alpha`.
    pub fn obstacle_force(&self, i: usize, alpha: &AlphaState) -> Result<CoAlgebraVec> {
        self.params.obstacle(i).force(alpha)
    }

    /// Obstacle force plus weighted pair forces.
    pub fn total_force(&self, i: usize, poses: &[Pose], alpha: &AlphaState) -> Result<CoAlgebraVec> {
        Ok(self.obstacle_force(i, alpha)? + self.pair_force(i, poses)?)
    }

    /// Smallest pairwise distance over graph edges and smallest obstacle
    /// centre distance among `poses`.
    pub fn min_distances(&self, poses: &[Pose]) -> (f64, f64) {
        let mut pair = f64::INFINITY;
        for (i, n) in self.neighbors.iter().enumerate() {
            for &j in n.iter().filter(|&&j| j > i) {
                pair = pair.min(poses[i].distance_sq(&poses[j]).sqrt());
            }
        }
        let obstacle = poses
            .iter()
            .enumerate()
            .map(|(i, g)| self.params.obstacle(i).center_distance(g))
            .fold(f64::INFINITY, f64::min);
        (pair, obstacle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actuation {
    /// Controls on `span{e1, e2}` with a multiplier on `e^3`.
    #[default]
    Underactuated,
    /// Controls on all of se(2), no multiplier.
    Full,
}

/// Per-agent state of the continuous system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub pose: Pose,
    /// `b2` stays zero under [`Actuation::Underactuated`].
    pub u: AlgebraVec,
    pub lambda3: f64,
    pub alpha: AlphaState,
}

impl AgentState {
    /// State with `alpha(0) = Ad_{g(0)^{-1}} alpha0` for the given obstacle.
    pub fn new(pose: Pose, u: AlgebraVec, lambda3: f64, alpha0: &AlgebraVec) -> Self {
        Self {
            pose,
            u,
            lambda3,
            alpha: crate::algebra::adjoint(&pose.inverse(), alpha0),
        }
    }

    fn to_array(self) -> [f64; 10] {
        [
            self.pose.theta,
            self.pose.x,
            self.pose.y,
            self.u.a,
            self.u.b1,
            self.u.b2,
            self.lambda3,
            self.alpha.a,
            self.alpha.b1,
            self.alpha.b2,
        ]
    }

    fn from_array(v: &[f64; 10]) -> Self {
        Self {
            // heading is left unwrapped inside a step; wrapped once per step
            pose: Pose {
                theta: v[0],
                x: v[1],
                y: v[2],
            },
            u: AlgebraVec::new(v[3], v[4], v[5]),
            lambda3: v[6],
            alpha: AlgebraVec::new(v[7], v[8], v[9]),
        }
    }

    /// Momentum `dC/du + lambda` in dual coordinates.
    pub fn momentum(&self) -> CoAlgebraVec {
        CoAlgebraVec::new(self.u.a, self.u.b1, self.u.b2 + self.lambda3)
    }
}

/// Time derivative of one [`AgentState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentRate {
    pub pose: [f64; 3],
    pub u: AlgebraVec,
    pub lambda3: f64,
    pub alpha: AlgebraVec,
}

impl AgentRate {
    fn to_array(self) -> [f64; 10] {
        [
            self.pose[0],
            self.pose[1],
            self.pose[2],
            self.u.a,
            self.u.b1,
            self.u.b2,
            self.lambda3,
            self.alpha.a,
            self.alpha.b1,
            self.alpha.b2,
        ]
    }
}

/// Checks the bracket relations `[s,s] in s`, `[s,r] in r`, `[r,r] in s`
/// for `r = span{e1, e2}`, `s = span{e3}`.
pub fn split_is_admissible() -> bool {
    let r = [AlgebraVec::E1, AlgebraVec::E2];
    let s = [AlgebraVec::E3];
    let in_r = |v: AlgebraVec| v.b2 == 0.0;
    let in_s = |v: AlgebraVec| v.a == 0.0 && v.b1 == 0.0;
    s.iter().all(|x| s.iter().all(|y| in_s(bracket(x, y))))
        && s.iter().all(|x| r.iter().all(|y| in_r(bracket(x, y))))
        && r.iter().all(|x| r.iter().all(|y| in_s(bracket(x, y))))
}

/// Right-hand side of the reduced equations for all agents.
pub fn ep_rhs(states: &[AgentState], sys: &SystemDef, actuation: Actuation) -> Result<Vec<AgentRate>> {
    let poses: Vec<Pose> = states.iter().map(|s| s.pose).collect();
    states
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let force = sys.total_force(i, &poses, &st.alpha)?;
            let u = st.u;
            let (du, dl) = match actuation {
                Actuation::Underactuated => (
                    AlgebraVec::new(
                        -u.b1 * st.lambda3 / 2.0 + force.m1,
                        u.a * st.lambda3 + force.m2,
                        0.0,
                    ),
                    -u.a * u.b1 + force.m3,
                ),
                Actuation::Full => ((coadjoint_star(&u, &u.flat()) + force).sharp(), 0.0),
            };
            let (s, c) = st.pose.theta.sin_cos();
            Ok(AgentRate {
                pose: [u.a, c * u.b1 - s * u.b2, s * u.b1 + c * u.b2],
                u: du,
                lambda3: dl,
                alpha: evolve_alpha_continuous(&st.alpha, &u),
            })
        })
        .collect()
}

fn offset(states: &[[f64; 10]], rates: &[[f64; 10]], h: f64) -> Vec<AgentState> {
    states
        .iter()
        .zip(rates)
        .map(|(s, k)| {
            let mut v = *s;
            for (vi, ki) in v.iter_mut().zip(k) {
                *vi += h * ki;
            }
            AgentState::from_array(&v)
        })
        .collect()
}

fn rates(states: &[AgentState], sys: &SystemDef, actuation: Actuation) -> Result<Vec<[f64; 10]>> {
    Ok(ep_rhs(states, sys, actuation)?
        .into_iter()
        .map(AgentRate::to_array)
        .collect())
}

/// One classical RK4 step for every agent simultaneously.
pub fn rk4_step(
    states: &[AgentState],
    sys: &SystemDef,
    actuation: Actuation,
    h: f64,
) -> Result<Vec<AgentState>> {
    let y0: Vec<[f64; 10]> = states.iter().map(|s| s.to_array()).collect();
    let k1 = rates(states, sys, actuation)?;
    let k2 = rates(&offset(&y0, &k1, h / 2.0), sys, actuation)?;
    let k3 = rates(&offset(&y0, &k2, h / 2.0), sys, actuation)?;
    let k4 = rates(&offset(&y0, &k3, h), sys, actuation)?;
    Ok(y0
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let mut v = *y;
            for c in 0..10 {
                v[c] += h / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
            }
            let mut st = AgentState::from_array(&v);
            st.pose.theta = wrap_angle(st.pose.theta);
            st
        })
        .collect())
}

/// Sampled solution of the initial value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTrajectory {
    pub times: Vec<f64>,
    /// `states[k][i]` is agent `i` at `times[k]`.
    pub states: Vec<Vec<AgentState>>,
    pub min_pair_distance: f64,
    pub min_obstacle_distance: f64,
}

impl ContinuousTrajectory {
    pub fn agent(&self, i: usize) -> impl Iterator<Item = &AgentState> {
        self.states.iter().map(move |s| &s[i])
    }
}

/// Integrates `N` RK4 steps over `[0, T]`.
pub fn simulate_ivp(
    initial: &[AgentState],
    sys: &SystemDef,
    actuation: Actuation,
    horizon: f64,
    steps: usize,
) -> Result<ContinuousTrajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if initial.len() != sys.num_agents() {
        return Err(Error::InvalidArgument(format!(
            "{} initial states for {} agents",
            initial.len(),
            sys.num_agents()
        )));
    }
    // validates feasibility of the initial point
    ep_rhs(initial, sys, actuation).map_err(|e| Error::StepRejected {
        step: 0,
        source: Box::new(e),
    })?;
    let poses = |s: &[AgentState]| s.iter().map(|a| a.pose).collect::<Vec<_>>();
    let (mut min_pair, mut min_obs) = sys.min_distances(&poses(initial));
    let mut times = vec![0.0];
    let mut states = vec![initial.to_vec()];
    if horizon == 0.0 {
        return Ok(ContinuousTrajectory {
            times,
            states,
            min_pair_distance: min_pair,
            min_obstacle_distance: min_obs,
        });
    }
    let h = horizon / steps as f64;
    for k in 0..steps {
        let next = rk4_step(&states[k], sys, actuation, h).map_err(|e| Error::StepRejected {
            step: k,
            source: Box::new(e),
        })?;
        let (p, o) = sys.min_distances(&poses(&next));
        min_pair = min_pair.min(p);
        min_obs = min_obs.min(o);
        times.push((k + 1) as f64 * h);
        states.push(next);
    }
    Ok(ContinuousTrajectory {
        times,
        states,
        min_pair_distance: min_pair,
        min_obstacle_distance: min_obs,
    })
}
