//! Scenario files, solution records, and re-verification of stored
//! solutions.
//!
//! Scenarios are JSON (see `scenarios/` for bundled examples). Solutions are
//! written as one CSV per agent with header
//! `t,theta,x,y,u1,u2,u3,mu1,mu2,mu3,alpha1,alpha2,alpha3`, a `summary.json`
//! with diagnostics, a `plot.dat` with whitespace-separated blocks (one per
//! agent, separated by two blank lines), and an echo of the scenario.

use std::collections::VecDeque;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{compose, AlgebraVec, CoAlgebraVec, Pose};
use crate::continuous::{AgentState, ContinuousTrajectory, SystemDef};
use crate::discrete::{
    endpoint_residual, momentum_residual, AgentTrack, DiscreteSetup, DiscreteSolution,
};
use crate::error::{Error, Result, ValidationIssue};
use crate::potentials::PotentialParams;
use crate::retraction::{retract, RetractionKind};
use crate::solver::{
    global_residual, BoundaryMode, BvpSolution, Diagnostics, ShootingProblem, SolverOptions,
};

pub const CSV_HEADER: &str = "t,theta,x,y,u1,u2,u3,mu1,mu2,mu3,alpha1,alpha2,alpha3";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    pub start: Pose,
    pub goal: Pose,
    #[serde(default)]
    pub sigma_obstacle: f64,
    /// Velocity `(a, b1, b2)` prescribed at `t = 0` (velocity mode only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_velocity: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_velocity: Option<[f64; 3]>,
    /// `(u1, u2)` for the continuous initial value problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_control: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_lambda3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    /// Agent indices.
    pub agents: [usize; 2],
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    pub rbar: f64,
    pub obstacle: ObstacleSpec,
    pub horizon: f64,
    pub steps: usize,
    #[serde(default)]
    pub retraction: RetractionKind,
    #[serde(default)]
    pub mode: BoundaryMode,
    #[serde(default)]
    pub solver: SolverOptions,
}

fn issue(code: &'static str, message: impl Into<String>) -> ValidationIssue {
    ValidationIssue {
        code,
        message: message.into(),
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut sc: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        sc.normalize();
        let issues = sc.validate();
        if issues.is_empty() {
            Ok(sc)
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn normalize(&mut self) {
        for a in &mut self.agents {
            a.start = Pose::new(a.start.theta, a.start.x, a.start.y);
            a.goal = Pose::new(a.goal.theta, a.goal.x, a.goal.y);
        }
    }

    /// Every violated invariant, each with a stable code.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut out = Vec::new();
        let s = self.agents.len();
        if s == 0 {
            out.push(issue("no_agents", "scenario has no agents"));
        }
        if self.steps == 0 {
            out.push(issue("steps_zero", "steps must be at least 1"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            out.push(issue("horizon_nonpositive", format!("horizon {} must be positive", self.horizon)));
        }
        if !(self.rbar > 0.0 && self.rbar.is_finite()) {
            out.push(issue("rbar_nonpositive", format!("rbar {} must be positive", self.rbar)));
        }
        if !(self.obstacle.radius >= 0.0 && self.obstacle.radius.is_finite()) {
            out.push(issue("obstacle_radius_negative", "obstacle radius must be non-negative"));
        }
        if !self.obstacle.center.iter().all(|c| c.is_finite()) {
            out.push(issue("nonfinite_value", "obstacle centre is not finite"));
        }
        if self.solver.validate().is_err() {
            out.push(issue("solver_options_invalid", format!("{:?}", self.solver)));
        }
        let mut ids = std::collections::HashSet::new();
        for (i, a) in self.agents.iter().enumerate() {
            if !ids.insert(a.id.as_str()) {
                out.push(issue("duplicate_id", format!("agent id '{}' repeated", a.id)));
            }
            if !a.start.is_finite() || !a.goal.is_finite() {
                out.push(issue("nonfinite_value", format!("agent {i} has a non-finite pose")));
            }
            if !(a.sigma_obstacle >= 0.0 && a.sigma_obstacle.is_finite()) {
                out.push(issue("gain_negative", format!("agent {i} obstacle gain {}", a.sigma_obstacle)));
            }
            if self.mode == BoundaryMode::FixedPoseAndVelocity
                && (a.start_velocity.is_none() || a.end_velocity.is_none())
            {
                out.push(issue(
                    "velocity_missing",
                    format!("agent {i} needs start_velocity and end_velocity in velocity mode"),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (e_idx, e) in self.edges.iter().enumerate() {
            let [i, j] = e.agents;
            if i >= s || j >= s {
                out.push(issue("edge_out_of_range", format!("edge {e_idx} refers to agent {}", i.max(j))));
                continue;
            }
            if i == j {
                out.push(issue("edge_self_loop", format!("edge {e_idx} joins agent {i} to itself")));
                continue;
            }
            if !seen.insert((i.min(j), i.max(j))) {
                out.push(issue("edge_duplicate", format!("edge ({i},{j}) listed twice")));
            }
            if !(e.sigma >= 0.0 && e.sigma.is_finite()) {
                out.push(issue("gain_negative", format!("edge ({i},{j}) gain {}", e.sigma)));
            }
        }
        if s > 1 && !self.is_connected() {
            out.push(issue("graph_disconnected", "interaction graph is not connected"));
        }
        if !out.is_empty() {
            return out;
        }

        let clearance = self.rbar + self.obstacle.radius;
        for (label, pick) in [("start", true), ("goal", false)] {
            let pose = |a: &AgentSpec| if pick { a.start } else { a.goal };
            for e in &self.edges {
                let [i, j] = e.agents;
                let d = pose(&self.agents[i]).distance_sq(&pose(&self.agents[j])).sqrt();
                if d <= 2.0 * self.rbar {
                    out.push(issue(
                        if pick { "start_pair_collision" } else { "goal_pair_collision" },
                        format!("{label} poses of agents {i} and {j} are {d:.6} apart, need > {:.6}", 2.0 * self.rbar),
                    ));
                }
            }
            for (i, a) in self.agents.iter().enumerate() {
                let p = pose(a);
                let d = (p.x - self.obstacle.center[0]).hypot(p.y - self.obstacle.center[1]);
                if d <= clearance {
                    out.push(issue(
                        if pick { "start_in_obstacle" } else { "goal_in_obstacle" },
                        format!("{label} of agent {i} is {d:.6} from the obstacle, need > {clearance:.6}"),
                    ));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let s = self.agents.len();
        let mut adj = vec![Vec::new(); s];
        for e in &self.edges {
            adj[e.agents[0]].push(e.agents[1]);
            adj[e.agents[1]].push(e.agents[0]);
        }
        let mut seen = vec![false; s];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn potential_params(&self) -> PotentialParams {
        let s = self.agents.len();
        let mut sigma_pair = vec![vec![0.0; s]; s];
        for e in &self.edges {
            let [i, j] = e.agents;
            sigma_pair[i][j] = e.sigma;
            sigma_pair[j][i] = e.sigma;
        }
        PotentialParams {
            sigma_pair,
            sigma_obstacle: self.agents.iter().map(|a| a.sigma_obstacle).collect(),
            rbar: self.rbar,
            obstacle_center: self.obstacle.center,
            obstacle_radius: self.obstacle.radius,
        }
    }

    pub fn system(&self) -> SystemDef {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.agents[0], e.agents[1])).collect();
        SystemDef::new(self.potential_params(), &edges)
    }

    pub fn discrete_setup(&self) -> DiscreteSetup {
        DiscreteSetup {
            sys: self.system(),
            start: self.agents.iter().map(|a| a.start).collect(),
            horizon: self.horizon,
            steps: self.steps,
            kind: self.retraction,
        }
    }

    pub fn shooting_problem(&self) -> ShootingProblem {
        let vel = |v: Option<[f64; 3]>| v.map(AlgebraVec::from_array).unwrap_or_default();
        ShootingProblem {
            setup: self.discrete_setup(),
            goal: self.agents.iter().map(|a| a.goal).collect(),
            mode: self.mode,
            start_velocity: self.agents.iter().map(|a| vel(a.start_velocity)).collect(),
            end_velocity: self.agents.iter().map(|a| vel(a.end_velocity)).collect(),
        }
    }

    /// Initial states for the continuous problem; needs `initial_control`.
    pub fn continuous_initial(&self) -> Result<Vec<AgentState>> {
        let params = self.potential_params();
        self.agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let [u1, u2] = a.initial_control.ok_or_else(|| {
                    Error::Validation(vec![issue(
                        "initial_control_missing",
                        format!("agent {i} needs initial_control for simulate"),
                    )])
                })?;
                Ok(AgentState::new(
                    a.start,
                    AlgebraVec::new(u1, u2, 0.0),
                    a.initial_lambda3.unwrap_or(0.0),
                    &params.obstacle(i).alpha0(),
                ))
            })
            .collect()
    }

    /// Left-translates every pose and the obstacle by `g`. Velocities are body
    /// quantities and stay as they are.
    pub fn transformed(&self, g: &Pose) -> Scenario {
        let mut out = self.clone();
        for a in &mut out.agents {
            a.start = compose(g, &a.start);
            a.goal = compose(g, &a.goal);
        }
        let c = compose(g, &Pose::new(0.0, self.obstacle.center[0], self.obstacle.center[1]));
        out.obstacle.center = [c.x, c.y];
        out
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)?;
    Scenario::from_json_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Discrete,
    Continuous,
}

/// One output row. `u` and `mu` are absent on the final discrete row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub pose: Pose,
    pub u: Option<AlgebraVec>,
    pub mu: Option<CoAlgebraVec>,
    pub alpha: AlgebraVec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: RecordKind,
    pub scenario: String,
    pub agents: usize,
    pub steps: usize,
    pub horizon: f64,
    pub h: f64,
    pub retraction: RetractionKind,
    pub mode: BoundaryMode,
    pub tol: f64,
    pub rbar: f64,
    pub obstacle_clearance: f64,
    #[serde(with = "crate::solver::inf_as_null")]
    pub min_pair_distance: f64,
    #[serde(with = "crate::solver::inf_as_null")]
    pub min_obstacle_distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<Diagnostics>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub scenario: Scenario,
    pub series: Vec<Vec<SeriesRow>>,
    pub summary: Summary,
}

impl SolutionRecord {
    pub fn from_bvp(scenario: &Scenario, bvp: &BvpSolution) -> Self {
        let sol = &bvp.solution;
        let series = sol
            .agents
            .iter()
            .map(|a| {
                (0..=sol.steps)
                    .map(|k| SeriesRow {
                        t: k as f64 * sol.h,
                        pose: a.poses[k],
                        u: a.controls.get(k).copied(),
                        mu: a.momenta.get(k).copied(),
                        alpha: a.alphas[k],
                    })
                    .collect()
            })
            .collect();
        let d = &bvp.diagnostics;
        Self {
            scenario: scenario.clone(),
            series,
            summary: Summary {
                kind: RecordKind::Discrete,
                scenario: scenario.name.clone(),
                agents: scenario.agents.len(),
                steps: sol.steps,
                horizon: scenario.horizon,
                h: sol.h,
                retraction: sol.kind,
                mode: scenario.mode,
                tol: scenario.solver.tol,
                rbar: scenario.rbar,
                obstacle_clearance: scenario.rbar + scenario.obstacle.radius,
                min_pair_distance: d.min_pair_distance,
                min_obstacle_distance: d.min_obstacle_distance,
                solver: Some(d.clone()),
                wall_time_s: d.wall_time_s,
            },
        }
    }

    pub fn from_trajectory(scenario: &Scenario, traj: &ContinuousTrajectory, wall_time_s: f64) -> Self {
        let s = scenario.agents.len();
        let series = (0..s)
            .map(|i| {
                traj.times
                    .iter()
                    .zip(traj.agent(i))
                    .map(|(&t, st)| SeriesRow {
                        t,
                        pose: st.pose,
                        u: Some(st.u),
                        mu: Some(st.momentum()),
                        alpha: st.alpha,
                    })
                    .collect()
            })
            .collect();
        let steps = traj.times.len() - 1;
        Self {
            scenario: scenario.clone(),
            series,
            summary: Summary {
                kind: RecordKind::Continuous,
                scenario: scenario.name.clone(),
                agents: s,
                steps,
                horizon: scenario.horizon,
                h: if steps > 0 { scenario.horizon / steps as f64 } else { 0.0 },
                retraction: scenario.retraction,
                mode: scenario.mode,
                tol: scenario.solver.tol,
                rbar: scenario.rbar,
                obstacle_clearance: scenario.rbar + scenario.obstacle.radius,
                min_pair_distance: traj.min_pair_distance,
                min_obstacle_distance: traj.min_obstacle_distance,
                solver: None,
                wall_time_s,
            },
        }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row_values(r: &SeriesRow) -> [f64; 13] {
    let u = r.u.map(AlgebraVec::to_array).unwrap_or([f64::NAN; 3]);
    let mu = r.mu.map(CoAlgebraVec::to_array).unwrap_or([f64::NAN; 3]);
    [
        r.t,
        r.pose.theta,
        r.pose.x,
        r.pose.y,
        u[0],
        u[1],
        u[2],
        mu[0],
        mu[1],
        mu[2],
        r.alpha.a,
        r.alpha.b1,
        r.alpha.b2,
    ]
}

pub fn agent_csv_name(i: usize) -> String {
    format!("agent_{i}.csv")
}

pub fn format_csv(rows: &[SeriesRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields: Vec<String> = row_values(r).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<SeriesRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                location: "line 1".into(),
                message: format!("expected header '{CSV_HEADER}'"),
            })
        }
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                location: format!("line {}", n + 1),
                message: e.to_string(),
            })?;
        if vals.len() != 13 {
            return Err(Error::Parse {
                location: format!("line {}", n + 1),
                message: format!("expected 13 fields, found {}", vals.len()),
            });
        }
        let opt3 = |a: f64, b: f64, c: f64| (!(a.is_nan() && b.is_nan() && c.is_nan())).then_some([a, b, c]);
        rows.push(SeriesRow {
            t: vals[0],
            pose: Pose {
                theta: vals[1],
                x: vals[2],
                y: vals[3],
            },
            u: opt3(vals[4], vals[5], vals[6]).map(AlgebraVec::from_array),
            mu: opt3(vals[7], vals[8], vals[9]).map(CoAlgebraVec::from_array),
            alpha: AlgebraVec::new(vals[10], vals[11], vals[12]),
        });
    }
    Ok(rows)
}

fn format_plot(record: &SolutionRecord) -> String {
    let mut out = String::from("# columns: ");
    out.push_str(&CSV_HEADER.replace(',', " "));
    out.push('\n');
    for (i, rows) in record.series.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# agent {i} ({})\n", record.scenario.agents[i].id));
        for r in rows {
            let fields: Vec<String> = row_values(r).iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Writes `contents` to a sibling temp file and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes CSVs, `summary.json`, `plot.dat` and `scenario.json` into `dir`.
pub fn write_solution(record: &SolutionRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, rows) in record.series.iter().enumerate() {
        let p = dir.join(agent_csv_name(i));
        write_atomic(&p, &format_csv(rows))?;
        written.push(p);
    }
    let p = dir.join("summary.json");
    write_atomic(&p, &serde_json::to_string_pretty(&record.summary).expect("summary serializes"))?;
    written.push(p);
    let p = dir.join("plot.dat");
    write_atomic(&p, &format_plot(record))?;
    written.push(p);
    let p = dir.join("scenario.json");
    write_atomic(&p, &record.scenario.to_json_string())?;
    written.push(p);
    Ok(written)
}

/// Reads back everything [`write_solution`] produced.
pub fn read_solution(dir: &Path) -> Result<SolutionRecord> {
    let scenario = load_scenario(&dir.join("scenario.json"))?;
    let summary: Summary =
        serde_json::from_str(&fs::read_to_string(dir.join("summary.json"))?).map_err(|e| Error::Parse {
            location: format!("summary.json line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
    let series = (0..scenario.agents.len())
        .map(|i| parse_csv(&fs::read_to_string(dir.join(agent_csv_name(i)))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionRecord {
        scenario,
        series,
        summary,
    })
}

/// A failed check on a stored solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub agent: usize,
    pub step: usize,
    pub what: String,
    pub value: f64,
    pub threshold: f64,
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "agent {} step {}: {} = {:.3e} exceeds {:.3e}",
            self.agent, self.step, self.what, self.value, self.threshold
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub checks: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, agent: usize, step: usize, what: &str, value: f64, threshold: f64) {
        self.checks += 1;
        if value.is_nan() || value > threshold {
            self.failures.push(CheckFailure {
                agent,
                step,
                what: what.to_string(),
                value,
                threshold,
            });
        }
    }

    /// Earliest failure by step index.
    pub fn first_failure(&self) -> Option<&CheckFailure> {
        self.failures.iter().min_by_key(|f| (f.step, f.agent))
    }
}

/// Tolerance on recomputed poses and parameters.
pub const CHECK_REPLAY_TOL: f64 = 1e-9;
/// Multiple of the solver tolerance allowed on recomputed residuals.
pub const CHECK_RESIDUAL_FACTOR: f64 = 10.0;

/// Re-verifies a stored solution against the scenario it was solved for.
pub fn check_record(record: &SolutionRecord) -> CheckReport {
    let mut rep = CheckReport::default();
    let sc = &record.scenario;
    let sum = &record.summary;
    let n = sum.steps;
    let sys = sc.system();
    let params = sc.potential_params();
    let h = sum.h;
    let kind = sum.retraction;

    for (i, rows) in record.series.iter().enumerate() {
        rep.expect(i, 0, "row count mismatch", (rows.len() as f64 - (n + 1) as f64).abs(), 0.0);
    }
    if !rep.passed() {
        return rep;
    }

    // feasibility and alpha transport hold for both record kinds; RK4 only
    // transports alpha to its own truncation order
    let alpha_tol = |recon: &AlgebraVec| match sum.kind {
        RecordKind::Discrete => CHECK_REPLAY_TOL,
        RecordKind::Continuous => 10.0 * h.powi(4) * (1.0 + recon.norm_inf()),
    };
    for k in 0..=n {
        let poses: Vec<Pose> = record.series.iter().map(|r| r[k].pose).collect();
        for (i, nb) in sys.neighbors.iter().enumerate() {
            for &j in nb.iter().filter(|&&j| j > i) {
                let d = poses[i].distance_sq(&poses[j]).sqrt();
                rep.expect(i, k, "pair clearance deficit", 2.0 * sc.rbar - d, -f64::EPSILON);
            }
        }
        for (i, g) in poses.iter().enumerate() {
            let obs = params.obstacle(i);
            rep.expect(i, k, "obstacle clearance deficit", obs.clearance() - obs.center_distance(g), -f64::EPSILON);
            let recon = obs.alpha_at(g);
            let stored = record.series[i][k].alpha;
            rep.expect(i, k, "alpha transport error", (recon - stored).norm_inf(), alpha_tol(&recon));
            rep.expect(i, k, "alpha rotation drift", (stored.a - obs.alpha0().a).abs(), 1e-12);
        }
    }
    if sum.kind == RecordKind::Continuous {
        return rep;
    }

    let mut agents = Vec::new();
    for (i, rows) in record.series.iter().enumerate() {
        rep.expect(i, 0, "start pose error", rows[0].pose.max_abs_diff(&sc.agents[i].start), CHECK_REPLAY_TOL);
        let mut controls = Vec::with_capacity(n);
        let mut momenta = Vec::with_capacity(n);
        for (k, r) in rows.iter().take(n).enumerate() {
            let (Some(u), Some(mu)) = (r.u, r.mu) else {
                rep.expect(i, k, "missing control", f64::INFINITY, 0.0);
                return rep;
            };
            let next = compose(&r.pose, &retract(kind, &(h * u)));
            rep.expect(i, k + 1, "reconstruction error", next.max_abs_diff(&rows[k + 1].pose), CHECK_REPLAY_TOL);
            rep.expect(i, k, "momentum/control mismatch", (mu - u.flat()).norm_inf(), CHECK_REPLAY_TOL);
            controls.push(u);
            momenta.push(mu);
        }
        agents.push(AgentTrack {
            poses: rows.iter().map(|r| r.pose).collect(),
            controls,
            momenta,
            alphas: rows.iter().map(|r| r.alpha).collect(),
        });
    }
    let stored = DiscreteSolution {
        h,
        steps: n,
        kind,
        agents,
    };
    let res_tol = CHECK_RESIDUAL_FACTOR * sum.tol;

    match sc.mode {
        BoundaryMode::FixedPose => {
            for k in 1..n {
                match momentum_residual(k, &stored, &sys) {
                    Ok(r) => {
                        for (i, ri) in r.iter().enumerate() {
                            rep.expect(i, k, "momentum residual", ri.norm_inf(), res_tol);
                        }
                    }
                    Err(_) => rep.expect(0, k, "infeasible configuration", f64::INFINITY, 0.0),
                }
            }
            let goals: Vec<Pose> = sc.agents.iter().map(|a| a.goal).collect();
            match endpoint_residual(&stored, &goals) {
                Ok(r) => {
                    for (i, ri) in r.iter().enumerate() {
                        rep.expect(i, n, "endpoint residual", ri.norm_inf(), res_tol);
                    }
                }
                Err(_) => rep.expect(0, n, "endpoint out of retraction domain", f64::INFINITY, 0.0),
            }
        }
        BoundaryMode::FixedPoseAndVelocity => {
            // least-squares solutions: the recomputed residual must match
            // what the solver reported
            let prob = sc.shooting_problem();
            let controls: Vec<Vec<AlgebraVec>> = stored.agents.iter().map(|a| a.controls.clone()).collect();
            let reported = sum.solver.as_ref().map(|d| d.residual_inf).unwrap_or(f64::NAN);
            match global_residual(ShootingProblem::pack(&controls).as_slice(), &prob) {
                Ok(r) => rep.expect(0, 0, "residual drift from reported", (r.amax() - reported).abs(), res_tol),
                Err(_) => rep.expect(0, 0, "infeasible configuration", f64::INFINITY, 0.0),
            }
        }
    }
    rep
}

/// Loads a stored solution from `dir` and checks it.
pub fn check_solution_dir(dir: &Path) -> Result<CheckReport> {
    Ok(check_record(&read_solution(dir)?))
}
