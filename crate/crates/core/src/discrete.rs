//! Discrete-time necessary conditions: the Lie-Poisson variational
//! integrator for every agent.
//!
//! For `k = 1, ..., N-1` and each agent `i`
//!
//! ```text
//! g^{k+1}   = g^k R(h u^k)
//! (dR^{-1}_{h u^k})^* mu^k = (dR^{-1}_{-h u^{k-1}})^* mu^{k-1}
//!                            + h ad*_{alpha^k}(dV_ext/d alpha^k)
//!                            + h w_i sum_j T*L_{g^k}(dV_ij/dg^k)
//! mu^k      = u^k
//! alpha^{k+1} = Ad_{R(h u^k)^{-1}} alpha^k,  alpha^0 = Ad_{(g^0)^{-1}} alpha0
//! ```
//!
//! with `w_i` the pair weight of [`SystemDef::pair_weight`]. Controls are
//! fully actuated (all three coordinates) and the running cost is
//! `C(u) = |u|^2 / 2` per unit time, so the discrete Legendre map is `mu = u`.

use crate::algebra::{compose, inverse, AlgebraVec, CoAlgebraVec, Pose};
use crate::continuous::SystemDef;
use crate::error::{Error, Result};
use crate::potentials::{evolve_alpha_discrete, AlphaState};
use crate::retraction::{dretract_inv_dual, retract, retract_inv, RetractionKind};

/// Fixed data of the discrete problem: dynamics, start poses and grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSetup {
    pub sys: SystemDef,
    pub start: Vec<Pose>,
    pub horizon: f64,
    pub steps: usize,
    pub kind: RetractionKind,
}

impl DiscreteSetup {
    pub fn h(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn num_agents(&self) -> usize {
        self.start.len()
    }

    /// `alpha^0_i = Ad_{(g^0_i)^{-1}} alpha0_i`.
    pub fn initial_alpha(&self, i: usize) -> AlphaState {
        self.sys.params.obstacle(i).alpha_at(&self.start[i])
    }
}

/// Discrete trajectory of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentTrack {
    /// `g^0 ..= g^N`.
    pub poses: Vec<Pose>,
    /// `u^0 .. u^{N-1}`.
    pub controls: Vec<AlgebraVec>,
    /// `mu^0 .. mu^{N-1}`.
    pub momenta: Vec<CoAlgebraVec>,
    /// `alpha^0 ..= alpha^N`; the last entry is carried for output only.
    pub alphas: Vec<AlphaState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub h: f64,
    pub steps: usize,
    pub kind: RetractionKind,
    pub agents: Vec<AgentTrack>,
}

impl DiscreteSolution {
    /// Rebuilds poses, momenta and parameters from a control sequence
    /// `controls[i][k]` by the reconstruction and transport recursions.
    pub fn from_controls(setup: &DiscreteSetup, controls: Vec<Vec<AlgebraVec>>) -> Self {
        let h = setup.h();
        let agents = controls
            .into_iter()
            .enumerate()
            .map(|(i, us)| {
                let mut poses = Vec::with_capacity(us.len() + 1);
                let mut alphas = Vec::with_capacity(us.len() + 1);
                poses.push(setup.start[i]);
                alphas.push(setup.initial_alpha(i));
                for u in &us {
                    let g = *poses.last().unwrap();
                    let a = *alphas.last().unwrap();
                    poses.push(compose(&g, &retract(setup.kind, &(h * *u))));
                    alphas.push(evolve_alpha_discrete(&a, u, h, setup.kind));
                }
                AgentTrack {
                    momenta: us.iter().map(|u| u.flat()).collect(),
                    controls: us,
                    poses,
                    alphas,
                }
            })
            .collect();
        Self {
            h,
            steps: setup.steps,
            kind: setup.kind,
            agents,
        }
    }

    pub fn poses_at(&self, k: usize) -> Vec<Pose> {
        self.agents.iter().map(|a| a.poses[k]).collect()
    }

    /// Total discrete cost `sum_i sum_k h |u_i^k|^2 / 2`.
    pub fn cost(&self) -> f64 {
        self.agents
            .iter()
            .flat_map(|a| a.controls.iter())
            .map(|u| 0.5 * self.h * u.norm().powi(2))
            .sum()
    }

    /// Minimum distance over all agent pairs and all steps.
    pub fn min_pair_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..=self.steps {
            for i in 0..self.agents.len() {
                for j in i + 1..self.agents.len() {
                    let d = self.agents[i].poses[k].distance_sq(&self.agents[j].poses[k]);
                    best = best.min(d.sqrt());
                }
            }
        }
        best
    }

    /// Minimum distance from any agent to the obstacle centre over all steps.
    pub fn min_obstacle_distance(&self, sys: &SystemDef) -> f64 {
        self.agents
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                let obs = sys.params.obstacle(i);
                a.poses.iter().map(move |g| obs.center_distance(g))
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Left side minus right side of the momentum equation at step `k` for
/// every agent.
pub fn momentum_residual(
    k: usize,
    sol: &DiscreteSolution,
    sys: &SystemDef,
) -> Result<Vec<CoAlgebraVec>> {
    assert!(
        k >= 1 && k < sol.steps,
        "interior step index {k} outside 1..{}",
        sol.steps
    );
    let h = sol.h;
    let poses = sol.poses_at(k);
    sol.agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let lhs = dretract_inv_dual(sol.kind, &(h * a.controls[k]), &a.momenta[k]);
            let prev = dretract_inv_dual(sol.kind, &(-h * a.controls[k - 1]), &a.momenta[k - 1]);
            let force = sys.total_force(i, &poses, &a.alphas[k])?;
            Ok(lhs - prev - h * force)
        })
        .collect()
}

/// Options for the per-step implicit solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub fd_step: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iters: 50,
            fd_step: 1e-7,
        }
    }
}

/// Solves `(dR^{-1}_{h u})^* u = target` for `u`, starting from `guess`.
/// Damped Newton with a forward-difference Jacobian.
pub fn solve_momentum_equation(
    kind: RetractionKind,
    h: f64,
    target: &CoAlgebraVec,
    guess: &AlgebraVec,
    opts: &StepOptions,
) -> Result<AlgebraVec> {
    use nalgebra::{Matrix3, Vector3};

    let f = |u: &AlgebraVec| -> Vector3<f64> {
        let r = dretract_inv_dual(kind, &(h * *u), &u.flat()) - *target;
        Vector3::from(r.to_array())
    };
    let mut u = *guess;
    let mut r = f(&u);
    for _ in 0..opts.max_iters {
        if r.amax() <= opts.tol {
            return Ok(u);
        }
        let mut jac = Matrix3::zeros();
        for c in 0..3 {
            let mut arr = u.to_array();
            let step = opts.fd_step * (1.0 + arr[c].abs());
            arr[c] += step;
            jac.set_column(c, &((f(&AlgebraVec::from_array(arr)) - r) / step));
        }
        let delta = jac.lu().solve(&(-r)).ok_or(Error::NewtonDivergence {
            iterations: 0,
            residual: r.amax(),
        })?;
        let mut t = 1.0;
        loop {
            let trial = u + t * AlgebraVec::new(delta[0], delta[1], delta[2]);
            let rt = f(&trial);
            if rt.norm() < r.norm() || t < 1e-6 {
                u = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    if r.amax() <= opts.tol {
        Ok(u)
    } else {
        Err(Error::NewtonDivergence {
            iterations: opts.max_iters,
            residual: r.amax(),
        })
    }
}

/// Computes `(u^k, mu^k)` for every agent from step `k-1` data and the
/// known configuration at step `k`. Agents decouple given `g^k`.
#[allow(clippy::too_many_arguments)]
pub fn solve_step(
    prev_u: &[AlgebraVec],
    prev_mu: &[CoAlgebraVec],
    poses_k: &[Pose],
    alphas_k: &[AlphaState],
    sys: &SystemDef,
    kind: RetractionKind,
    h: f64,
    opts: &StepOptions,
) -> Result<Vec<(AlgebraVec, CoAlgebraVec)>> {
    (0..poses_k.len())
        .map(|i| {
            let force = sys.total_force(i, poses_k, &alphas_k[i])?;
            let target = dretract_inv_dual(kind, &(-h * prev_u[i]), &prev_mu[i]) + h * force;
            let u = solve_momentum_equation(kind, h, &target, &prev_u[i], opts)?;
            Ok((u, u.flat()))
        })
        .collect()
}

/// Runs the recursion forward from initial controls `u0[i]`.
pub fn forward_sweep(
    u0: &[AlgebraVec],
    setup: &DiscreteSetup,
    opts: &StepOptions,
) -> Result<DiscreteSolution> {
    let s = setup.num_agents();
    if u0.len() != s {
        return Err(Error::InvalidArgument(format!(
            "{} initial controls for {s} agents",
            u0.len()
        )));
    }
    let h = setup.h();
    let kind = setup.kind;
    let mut poses = vec![setup.start.clone()];
    let mut alphas: Vec<Vec<AlphaState>> = vec![(0..s).map(|i| setup.initial_alpha(i)).collect()];
    let mut controls = vec![u0.to_vec()];
    let mut momenta = vec![u0.iter().map(|u| u.flat()).collect::<Vec<_>>()];

    for k in 0..setup.steps {
        let uk = &controls[k];
        let next_pose: Vec<Pose> = (0..s)
            .map(|i| compose(&poses[k][i], &retract(kind, &(h * uk[i]))))
            .collect();
        let next_alpha: Vec<AlphaState> = (0..s)
            .map(|i| evolve_alpha_discrete(&alphas[k][i], &uk[i], h, kind))
            .collect();
        poses.push(next_pose);
        alphas.push(next_alpha);
        if k + 1 < setup.steps {
            let step = solve_step(
                &controls[k],
                &momenta[k],
                &poses[k + 1],
                &alphas[k + 1],
                &setup.sys,
                kind,
                h,
                opts,
            )
            .map_err(|e| Error::SweepFailed {
                step: k + 1,
                source: Box::new(e),
            })?;
            controls.push(step.iter().map(|p| p.0).collect());
            momenta.push(step.iter().map(|p| p.1).collect());
        }
    }

    let agents = (0..s)
        .map(|i| AgentTrack {
            poses: poses.iter().map(|p| p[i]).collect(),
            controls: controls.iter().map(|c| c[i]).collect(),
            momenta: momenta.iter().map(|m| m[i]).collect(),
            alphas: alphas.iter().map(|a| a[i]).collect(),
        })
        .collect();
    Ok(DiscreteSolution {
        h,
        steps: setup.steps,
        kind,
        agents,
    })
}

/// `R^{-1}((g^N)^{-1} g_T)` per agent; zero iff `g^N = g_T`.
pub fn endpoint_residual(sol: &DiscreteSolution, goals: &[Pose]) -> Result<Vec<AlgebraVec>> {
    sol.agents
        .iter()
        .zip(goals)
        .map(|(a, goal)| {
            let last = a.poses[sol.steps];
            retract_inv(sol.kind, &compose(&inverse(&last), goal))
        })
        .collect()
}

/// Momentum relations at the two ends of the horizon. Per agent returns
/// `((dR^{-1}_{h u^0})^* mu^0 - u_start - h F(g^0, alpha^0),
///   u_end - (dR^{-1}_{-h u^{N-1}})^* mu^{N-1})`.
pub fn boundary_momentum_residuals(
    sol: &DiscreteSolution,
    u_start: &[AlgebraVec],
    u_end: &[AlgebraVec],
    sys: &SystemDef,
) -> Result<Vec<(CoAlgebraVec, CoAlgebraVec)>> {
    let h = sol.h;
    let n = sol.steps;
    let poses0 = sol.poses_at(0);
    sol.agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let force = sys.total_force(i, &poses0, &a.alphas[0])?;
            let first = dretract_inv_dual(sol.kind, &(h * a.controls[0]), &a.momenta[0])
                - u_start[i].flat()
                - h * force;
            let second = u_end[i].flat()
                - dretract_inv_dual(sol.kind, &(-h * a.controls[n - 1]), &a.momenta[n - 1]);
            Ok((first, second))
        })
        .collect()
}
