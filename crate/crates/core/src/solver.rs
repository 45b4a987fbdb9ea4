//! Shooting solver for the discrete two-point boundary value problem.
//!
//! The unknowns are every control `u_i^k`, laid out agent-major:
//! `U[(i * N + k) * 3 + c]`. Poses never enter as unknowns; they are rebuilt
//! from `U` by the reconstruction recursion. Per agent the residual stacks
//! the interior momentum equations (`k = 1..N-1`), the endpoint constraint,
//! and in [`BoundaryMode::FixedPoseAndVelocity`] the two momentum boundary
//! relations as well.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{compose, inverse, AlgebraVec, Pose};
use crate::discrete::{
    boundary_momentum_residuals, endpoint_residual, momentum_residual, DiscreteSetup,
    DiscreteSolution,
};
use crate::error::{Error, Result};
use crate::retraction::retract_inv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Start and goal poses fixed; square Newton system.
    #[default]
    FixedPose,
    /// Additionally imposes start and end velocities; Gauss-Newton on an
    /// overdetermined system.
    FixedPoseAndVelocity,
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_pose" => Ok(BoundaryMode::FixedPose),
            "fixed_pose_and_velocity" => Ok(BoundaryMode::FixedPoseAndVelocity),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    /// Constant control `R^{-1}(g0^{-1} gT) / T` on every step.
    #[default]
    Geodesic,
    Zeros,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_outer_iters: usize,
    pub fd_step: f64,
    pub backtrack: f64,
    pub min_step: f64,
    pub initial_guess: InitialGuess,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_outer_iters: 200,
            fd_step: 1e-7,
            backtrack: 0.5,
            min_step: 1e-6,
            initial_guess: InitialGuess::Geodesic,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.max_outer_iters > 0
            && self.fd_step > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.min_step > 0.0
            && self.min_step <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid solver options {self:?}")))
        }
    }
}

/// Everything needed to pose the boundary value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingProblem {
    pub setup: DiscreteSetup,
    pub goal: Vec<Pose>,
    pub mode: BoundaryMode,
    /// Prescribed velocities, required in [`BoundaryMode::FixedPoseAndVelocity`].
    pub start_velocity: Vec<AlgebraVec>,
    pub end_velocity: Vec<AlgebraVec>,
}

impl ShootingProblem {
    pub fn fixed_pose(setup: DiscreteSetup, goal: Vec<Pose>) -> Self {
        Self {
            setup,
            goal,
            mode: BoundaryMode::FixedPose,
            start_velocity: Vec::new(),
            end_velocity: Vec::new(),
        }
    }

    pub fn num_unknowns(&self) -> usize {
        self.setup.num_agents() * 3 * self.setup.steps
    }

    /// Rows per agent: interior + endpoint (+ two boundary relations).
    fn rows_per_agent(&self) -> usize {
        let base = 3 * self.setup.steps;
        match self.mode {
            BoundaryMode::FixedPose => base,
            BoundaryMode::FixedPoseAndVelocity => base + 6,
        }
    }

    pub fn num_residuals(&self) -> usize {
        self.setup.num_agents() * self.rows_per_agent()
    }

    /// Splits `U` into `controls[i][k]`.
    pub fn unpack(&self, unknowns: &[f64]) -> Vec<Vec<AlgebraVec>> {
        let n = self.setup.steps;
        (0..self.setup.num_agents())
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let o = (i * n + k) * 3;
                        AlgebraVec::new(unknowns[o], unknowns[o + 1], unknowns[o + 2])
                    })
                    .collect()
            })
            .collect()
    }

    pub fn pack(controls: &[Vec<AlgebraVec>]) -> DVector<f64> {
        DVector::from_iterator(
            controls.iter().map(Vec::len).sum::<usize>() * 3,
            controls.iter().flatten().flat_map(|u| u.to_array()),
        )
    }

    fn validate(&self) -> Result<()> {
        let s = self.setup.num_agents();
        if self.setup.steps == 0 || self.goal.len() != s {
            return Err(Error::InvalidArgument("goal count or step count mismatch".into()));
        }
        if self.mode == BoundaryMode::FixedPoseAndVelocity
            && (self.start_velocity.len() != s || self.end_velocity.len() != s)
        {
            return Err(Error::InvalidArgument(
                "velocity mode needs start and end velocities for every agent".into(),
            ));
        }
        Ok(())
    }
}

/// Residual blocks reported separately in diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResidualSplit {
    pub interior: f64,
    pub endpoint: f64,
    pub boundary_start: f64,
    pub boundary_end: f64,
}

fn sweep_error(step: usize, e: Error) -> Error {
    Error::SweepFailed {
        step,
        source: Box::new(e),
    }
}

/// Evaluates the stacked residual together with the solution it induces.
pub fn evaluate(unknowns: &[f64], prob: &ShootingProblem) -> Result<(DVector<f64>, DiscreteSolution)> {
    let n = prob.setup.steps;
    let sol = DiscreteSolution::from_controls(&prob.setup, prob.unpack(unknowns));
    let rows = prob.rows_per_agent();
    let mut out = DVector::zeros(prob.num_residuals());
    for k in 1..n {
        let r = momentum_residual(k, &sol, &prob.setup.sys).map_err(|e| sweep_error(k, e))?;
        for (i, ri) in r.iter().enumerate() {
            let o = i * rows + (k - 1) * 3;
            out.rows_mut(o, 3).copy_from_slice(&ri.to_array());
        }
    }
    let end = endpoint_residual(&sol, &prob.goal).map_err(|e| sweep_error(n, e))?;
    for (i, ri) in end.iter().enumerate() {
        let o = i * rows + (n - 1) * 3;
        out.rows_mut(o, 3).copy_from_slice(&ri.to_array());
    }
    if prob.mode == BoundaryMode::FixedPoseAndVelocity {
        let b = boundary_momentum_residuals(&sol, &prob.start_velocity, &prob.end_velocity, &prob.setup.sys)
            .map_err(|e| sweep_error(0, e))?;
        for (i, (first, second)) in b.iter().enumerate() {
            let o = i * rows + n * 3;
            out.rows_mut(o, 3).copy_from_slice(&first.to_array());
            out.rows_mut(o + 3, 3).copy_from_slice(&second.to_array());
        }
    }
    // every feasibility check must also hold at the final configuration
    let last = sol.poses_at(n);
    for (i, a) in sol.agents.iter().enumerate() {
        prob.setup
            .sys
            .total_force(i, &last, &a.alphas[n])
            .map_err(|e| sweep_error(n, e))?;
    }
    Ok((out, sol))
}

pub fn global_residual(unknowns: &[f64], prob: &ShootingProblem) -> Result<DVector<f64>> {
    evaluate(unknowns, prob).map(|(r, _)| r)
}

/// Per-block infinity norms of a stacked residual.
pub fn split_residual(r: &DVector<f64>, prob: &ShootingProblem) -> ResidualSplit {
    let n = prob.setup.steps;
    let rows = prob.rows_per_agent();
    let mut split = ResidualSplit::default();
    for i in 0..prob.setup.num_agents() {
        let block = r.rows(i * rows, rows);
        let amax = |from: usize, len: usize| block.rows(from, len).amax();
        split.interior = split.interior.max(if n > 1 { amax(0, 3 * (n - 1)) } else { 0.0 });
        split.endpoint = split.endpoint.max(amax(3 * (n - 1), 3));
        if prob.mode == BoundaryMode::FixedPoseAndVelocity {
            split.boundary_start = split.boundary_start.max(amax(3 * n, 3));
            split.boundary_end = split.boundary_end.max(amax(3 * n + 3, 3));
        }
    }
    split
}

/// Default starting point for the shooting iteration.
pub fn initial_guess(prob: &ShootingProblem, policy: InitialGuess) -> Result<DVector<f64>> {
    let setup = &prob.setup;
    let controls = match policy {
        InitialGuess::Zeros => vec![vec![AlgebraVec::ZERO; setup.steps]; setup.num_agents()],
        InitialGuess::Geodesic => setup
            .start
            .iter()
            .zip(&prob.goal)
            .map(|(g0, gt)| {
                let v = retract_inv(setup.kind, &compose(&inverse(g0), gt))?;
                Ok(vec![(1.0 / setup.horizon) * v; setup.steps])
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(ShootingProblem::pack(&controls))
}

/// JSON has no infinity; a missing distance (no pairs to measure) is
/// written as `null` and read back as `+inf`.
pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Diagnostics attached to every solve, converged or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub residual_inf: f64,
    pub residual_split: ResidualSplit,
    #[serde(with = "inf_as_null")]
    pub min_pair_distance: f64,
    #[serde(with = "inf_as_null")]
    pub min_obstacle_distance: f64,
    pub cost: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution {
    pub solution: DiscreteSolution,
    pub unknowns: DVector<f64>,
    pub diagnostics: Diagnostics,
}

/// Forward-difference Jacobian; columns are independent sweeps.
fn jacobian(
    unknowns: &DVector<f64>,
    base: &DVector<f64>,
    prob: &ShootingProblem,
    fd_step: f64,
) -> Result<DMatrix<f64>> {
    let n = unknowns.len();
    let cols: Vec<Result<DVector<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let step = fd_step * (1.0 + unknowns[j].abs());
            let mut probe = unknowns.clone();
            probe[j] += step;
            match global_residual(probe.as_slice(), prob) {
                Ok(r) => Ok((r - base) / step),
                Err(_) => {
                    // pole on one side: fall back to a backward difference
                    probe[j] = unknowns[j] - step;
                    global_residual(probe.as_slice(), prob).map(|r| (base - r) / step)
                }
            }
        })
        .collect();
    let mut jac = DMatrix::zeros(base.len(), n);
    for (j, c) in cols.into_iter().enumerate() {
        jac.set_column(j, &c?);
    }
    Ok(jac)
}

fn newton_direction(jac: DMatrix<f64>, r: &DVector<f64>, mode: BoundaryMode) -> Option<DVector<f64>> {
    match mode {
        BoundaryMode::FixedPose => {
            assert_eq!(jac.nrows(), jac.ncols(), "square system expected in fixed-pose mode");
            jac.lu().solve(&(-r))
        }
        BoundaryMode::FixedPoseAndVelocity => {
            let qr = jac.qr();
            let rhs = -(qr.q().transpose() * r);
            qr.r().solve_upper_triangular(&rhs)
        }
    }
}

fn finish(
    prob: &ShootingProblem,
    unknowns: DVector<f64>,
    r: &DVector<f64>,
    sol: DiscreteSolution,
    iterations: usize,
    converged: bool,
    started: Instant,
) -> BvpSolution {
    let diagnostics = Diagnostics {
        converged,
        iterations,
        residual_inf: r.amax(),
        residual_split: split_residual(r, prob),
        min_pair_distance: sol.min_pair_distance(),
        min_obstacle_distance: sol.min_obstacle_distance(&prob.setup.sys),
        cost: sol.cost(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    BvpSolution {
        solution: sol,
        unknowns,
        diagnostics,
    }
}

/// Damped Newton (square) or Gauss-Newton (overdetermined) on the stacked
/// residual, with backtracking on its Euclidean norm. Trial points that hit
/// a potential pole are rejected like any other non-decreasing step.
pub fn solve_bvp(prob: &ShootingProblem, opts: &SolverOptions) -> Result<BvpSolution> {
    let guess = initial_guess(prob, opts.initial_guess)?;
    solve_bvp_from(prob, opts, guess)
}

pub fn solve_bvp_from(
    prob: &ShootingProblem,
    opts: &SolverOptions,
    guess: DVector<f64>,
) -> Result<BvpSolution> {
    prob.validate()?;
    opts.validate()?;
    if guess.len() != prob.num_unknowns() {
        return Err(Error::InvalidArgument("initial guess has the wrong length".into()));
    }
    let started = Instant::now();
    let mut u = guess;
    let (mut r, mut sol) = evaluate(u.as_slice(), prob)?;
    let least_squares = prob.mode == BoundaryMode::FixedPoseAndVelocity;

    for iter in 0..opts.max_outer_iters {
        if r.amax() <= opts.tol {
            return Ok(finish(prob, u, &r, sol, iter, true, started));
        }
        let jac = jacobian(&u, &r, prob, opts.fd_step)?;
        let Some(delta) = newton_direction(jac, &r, prob.mode) else {
            break;
        };
        let merit = r.norm();
        let mut t = 1.0;
        let mut accepted = None;
        while t >= opts.min_step {
            let trial = &u + t * &delta;
            if let Ok((rt, st)) = evaluate(trial.as_slice(), prob) {
                if rt.norm() < merit {
                    accepted = Some((trial, rt, st));
                    break;
                }
            }
            t *= opts.backtrack;
        }
        let Some((nu, nr, ns)) = accepted else {
            // no decrease possible along the direction: stationary for
            // least squares, stalled otherwise
            let stationary = least_squares && (t * delta.amax()) <= opts.tol * (1.0 + u.amax());
            return if stationary {
                Ok(finish(prob, u, &r, sol, iter + 1, true, started))
            } else {
                let best = finish(prob, u, &r, sol, iter + 1, false, started);
                Err(Error::NoConvergence {
                    iterations: iter + 1,
                    residual: best.diagnostics.residual_inf,
                    best: Box::new(best),
                })
            };
        };
        let step_size = (&nu - &u).amax();
        u = nu;
        r = nr;
        sol = ns;
        if least_squares && step_size <= opts.tol * (1.0 + u.amax()) {
            return Ok(finish(prob, u, &r, sol, iter + 1, true, started));
        }
    }
    if r.amax() <= opts.tol {
        return Ok(finish(prob, u, &r, sol, opts.max_outer_iters, true, started));
    }
    let best = finish(prob, u, &r, sol, opts.max_outer_iters, false, started);
    Err(Error::NoConvergence {
        iterations: opts.max_outer_iters,
        residual: best.diagnostics.residual_inf,
        best: Box::new(best),
    })
}
