//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances are pinned constants.

mod common;

use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;
use se2_ocp::algebra::{adjoint, bracket, coadjoint_star, compose, inverse, pair, trace_norm_sq};
use se2_ocp::continuous::{simulate_ivp, Actuation, AgentState, SystemDef};
use se2_ocp::discrete::{
    endpoint_residual, forward_sweep, momentum_residual, DiscreteSetup, DiscreteSolution, StepOptions,
};
use se2_ocp::potentials::{ObstaclePotential, PairPotential, PotentialParams};
use se2_ocp::retraction::{dretract_inv, dretract_inv_dual, retract, RetractionKind};
use se2_ocp::scenario::{check_record, load_scenario, parse_csv, read_solution, write_solution, SolutionRecord};
use se2_ocp::solver::{solve_bvp, ShootingProblem, SolverOptions};
use se2_ocp::{AlgebraVec, CoAlgebraVec, Pose};

use common::*;

const SEED: u64 = 20240611;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn lone_system(sigma_obs: f64, rbar: f64, radius: f64, center: [f64; 2]) -> SystemDef {
    SystemDef::new(
        PotentialParams {
            sigma_pair: vec![vec![0.0]],
            sigma_obstacle: vec![sigma_obs],
            rbar,
            obstacle_center: center,
            obstacle_radius: radius,
        },
        &[],
    )
}

// 1. algebra identities against matrix commutators
fn algebra_identities() -> Outcome {
    const TOL: f64 = 1e-12;
    const RUNTIME_S: f64 = 1.0;
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut duality, mut homo, mut jacobi, mut oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (xi, eta, zeta) = (rand_alg(&mut rng, 2.0), rand_alg(&mut rng, 2.0), rand_alg(&mut rng, 2.0));
        let mu = rand_coalg(&mut rng, 2.0);
        let (g, h) = (rand_pose(&mut rng, 3.0), rand_pose(&mut rng, 3.0));
        duality = duality.max((pair(&coadjoint_star(&xi, &mu), &eta) - pair(&mu, &common::bracket(&xi, &eta))).abs());
        homo = homo.max((adjoint(&compose(&g, &h), &xi) - adjoint(&g, &adjoint(&h, &xi))).norm_inf());
        oracle = oracle
            .max((bracket(&xi, &eta) - common::bracket(&xi, &eta)).norm_inf())
            .max((adjoint(&g, &xi) - common::adjoint(&g, &xi)).norm_inf());
        let j = bracket(&xi, &bracket(&eta, &zeta))
            + bracket(&eta, &bracket(&zeta, &xi))
            + bracket(&zeta, &bracket(&xi, &eta));
        jacobi = jacobi.max(j.norm_inf());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let worst = duality.max(homo).max(jacobi).max(oracle);
    outcome(
        worst <= TOL && elapsed < RUNTIME_S,
        format!(
            "duality {duality:.1e}, Ad homomorphism {homo:.1e}, Jacobi {jacobi:.1e}, matrix oracle {oracle:.1e} (tol {TOL:.0e}); {elapsed:.3}s < {RUNTIME_S}s"
        ),
    )
}

// 2. |Ad_{g_i^{-1} g_j} e1|^2 - 2 = |r_i - r_j|^2
fn distance_identity() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (gi, gj) = (rand_pose(&mut rng, 5.0), rand_pose(&mut rng, 5.0));
        let rel = compose(&inverse(&gi), &gj);
        let lhs = trace_norm_sq(&adjoint(&rel, &AlgebraVec::E1)) - 2.0;
        let lhs_oracle = frob_sq(&common::adjoint(&pose_of(&(mat(&gi).try_inverse().unwrap() * mat(&gj))), &AlgebraVec::E1)) - 2.0;
        let rhs = (gi.x - gj.x).powi(2) + (gi.y - gj.y).powi(2);
        worst = worst.max((lhs - rhs).abs()).max((lhs_oracle - rhs).abs());
    }
    outcome(worst <= TOL, format!("max error {worst:.1e} over 1000 pairs (tol {TOL:.0e})"))
}

// 3. retraction suite
fn retraction_suite() -> Outcome {
    const INV_TOL: f64 = 1e-12;
    const FD_REL_TOL: f64 = 1e-6;
    const TRANSPORT_TOL: f64 = 1e-10;
    let kind = RetractionKind::Cayley;
    let mut rng = StdRng::seed_from_u64(SEED + 2);
    let at_zero = retract(kind, &AlgebraVec::ZERO).max_abs_diff(&Pose::identity());
    let mut inv = 0.0f64;
    let mut fd_rel = 0.0f64;
    let mut count = 0;
    while count < 200 {
        let v = rand_alg(&mut rng, 1.0);
        if v.norm() > 1.0 {
            continue;
        }
        count += 1;
        let prod = compose(&retract(kind, &v), &retract(kind, &(-v)));
        inv = inv.max(prod.max_abs_diff(&Pose::identity()));
        inv = inv.max((mat(&retract(kind, &v)) - cayley(&v)).amax());
        // central differences of the matrix Cayley map, right-trivialized
        let cinv = cayley(&v).try_inverse().unwrap();
        let s = 1e-5;
        for e in [AlgebraVec::E1, AlgebraVec::E2, AlgebraVec::E3] {
            let d = (cayley(&(v + s * e)) - cayley(&(v - s * e))) / (2.0 * s);
            let tangent = vee(&(d * cinv));
            let back = dretract_inv(kind, &v, &tangent);
            fd_rel = fd_rel.max((back - e).norm() / e.norm());
        }
    }
    let mut transport = 0.0f64;
    for _ in 0..1000 {
        let v = rand_alg(&mut rng, 1.5);
        let mu = rand_coalg(&mut rng, 2.0);
        let lhs = dcay_inv_dual(&(-v), &mu);
        let rhs = common::coadjoint_group(&pose_of(&cayley(&v)), &dcay_inv_dual(&v, &mu));
        let lib = dretract_inv_dual(kind, &(-v), &mu) - common::coadjoint_group(&retract(kind, &v), &dretract_inv_dual(kind, &v, &mu));
        transport = transport.max((lhs - rhs).norm()).max(lib.norm());
        transport = transport.max((dretract_inv_dual(kind, &v, &mu) - dcay_inv_dual(&v, &mu)).norm());
    }
    outcome(
        at_zero == 0.0 && inv <= INV_TOL && fd_rel <= FD_REL_TOL && transport <= TRANSPORT_TOL,
        format!(
            "cay(0) error {at_zero:.1e}, cay(v)cay(-v) {inv:.1e} (tol {INV_TOL:.0e}), dcay^-1 FD rel {fd_rel:.1e} (tol {FD_REL_TOL:.0e}), momentum identity {transport:.1e} (tol {TRANSPORT_TOL:.0e})"
        ),
    )
}

// 4. forces against central differences of the potentials
fn gradient_suite() -> Outcome {
    const REL_TOL: f64 = 1e-6;
    const GAMMA_TOL: f64 = 1e-12;
    let mut rng = StdRng::seed_from_u64(SEED + 3);
    let (rbar, radius) = (0.5, 1.0);
    let s = 1e-6;
    let (mut pair_rel, mut obs_rel, mut gamma) = (0.0f64, 0.0f64, 0.0f64);
    let mut count = 0;
    while count < 100 {
        let (gi, gj) = (rand_pose(&mut rng, 5.0), rand_pose(&mut rng, 5.0));
        let center = [rand::Rng::gen_range(&mut rng, -2.0..2.0), rand::Rng::gen_range(&mut rng, -2.0..2.0)];
        let dij = ((gi.x - gj.x).powi(2) + (gi.y - gj.y).powi(2)).sqrt();
        let dc = ((gi.x - center[0]).powi(2) + (gi.y - center[1]).powi(2)).sqrt();
        if dij < 2.0 * rbar + 0.3 || dc < rbar + radius + 0.3 {
            continue;
        }
        count += 1;
        let sigma = rand::Rng::gen_range(&mut rng, 0.1..2.0);
        // potentials written out here, differentiated along body directions
        let pair_v = |x: f64, y: f64| sigma / (2.0 * ((x - gj.x).powi(2) + (y - gj.y).powi(2) - 4.0 * rbar * rbar));
        let obs_v = |x: f64, y: f64| {
            sigma / (2.0 * ((x - center[0]).powi(2) + (y - center[1]).powi(2) - (rbar + radius).powi(2)))
        };
        let (sn, cs) = gi.theta.sin_cos();
        let body = [(cs, sn), (-sn, cs)];
        let pf = PairPotential { sigma, rbar }.force(&gi, &gj).unwrap();
        let obs = ObstaclePotential {
            sigma,
            rbar,
            radius,
            center,
        };
        let alpha = obs.alpha_at(&gi);
        let of = obs.force(&alpha).unwrap();
        for (k, (dx, dy)) in body.iter().enumerate() {
            let fd_p = (pair_v(gi.x + s * dx, gi.y + s * dy) - pair_v(gi.x - s * dx, gi.y - s * dy)) / (2.0 * s);
            let fd_o = (obs_v(gi.x + s * dx, gi.y + s * dy) - obs_v(gi.x - s * dx, gi.y - s * dy)) / (2.0 * s);
            let (cp, co) = if k == 0 { (pf.m2, of.m2) } else { (pf.m3, of.m3) };
            pair_rel = pair_rel.max((cp - fd_p).abs() / fd_p.abs().max(1e-3));
            obs_rel = obs_rel.max((co - fd_o).abs() / fd_o.abs().max(1e-3));
        }
        pair_rel = pair_rel.max(pf.m1.abs()).max(of.m1.abs());
        // closed form in terms of alpha
        let d = 2.0 * alpha.a * alpha.a + alpha.b1 * alpha.b1 + alpha.b2 * alpha.b2 - 2.0 - (rbar + radius).powi(2);
        let expect = CoAlgebraVec::new(0.0, -sigma * alpha.a * alpha.b2 / (d * d), sigma * alpha.a * alpha.b1 / (d * d));
        gamma = gamma.max((of - expect).norm_inf());
    }
    outcome(
        pair_rel <= REL_TOL && obs_rel <= REL_TOL && gamma <= GAMMA_TOL,
        format!(
            "pair force rel {pair_rel:.1e}, obstacle force rel {obs_rel:.1e} (tol {REL_TOL:.0e}); closed-form obstacle force {gamma:.1e} (tol {GAMMA_TOL:.0e})"
        ),
    )
}

fn final_state_vec(st: &AgentState) -> [f64; 7] {
    [st.pose.theta, st.pose.x, st.pose.y, st.u.a, st.u.b1, st.u.b2, st.lambda3]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// 5. continuous integrator
fn continuous_integrator() -> Outcome {
    const MIN_ORDER: f64 = 3.8;
    // C in |alpha - Ad_{g^-1} alpha0| <= C h^4 on the single-obstacle
    // scenario; measured 0.174, pinned with headroom
    const ALPHA_C: f64 = 0.5;
    const DRIFT_TOL: f64 = 1e-12;
    const RUNTIME_S: f64 = 5.0;
    let started = Instant::now();
    let horizon = 4.0;

    let free = lone_system(0.0, 1.0, 1.0, [0.0, 0.0]);
    let st = AgentState::new(Pose::new(0.3, 20.0, 20.0), AlgebraVec::new(0.7, 1.2, 0.0), 0.4, &AlgebraVec::E1);
    let finals: Vec<[f64; 7]> = [100, 200, 400]
        .iter()
        .map(|&n| final_state_vec(&simulate_ivp(&[st], &free, Actuation::Underactuated, horizon, n).unwrap().states[n][0]))
        .collect();
    let order = (max_diff(&finals[0], &finals[1]) / max_diff(&finals[1], &finals[2])).log2();

    let sc = load_scenario(&scenario_path("single_obstacle")).unwrap();
    let sys = sc.system();
    let obs = sc.potential_params().obstacle(0);
    let init = AgentState::new(sc.agents[0].start, AlgebraVec::new(0.0, 2.0, 0.0), 0.0, &obs.alpha0());
    let mut worst_ratio = 0.0f64;
    let mut drift = 0.0f64;
    for n in [100usize, 200, 400] {
        let h = sc.horizon / n as f64;
        let traj = simulate_ivp(&[init], &sys, Actuation::Underactuated, sc.horizon, n).unwrap();
        let err = traj
            .agent(0)
            .map(|s| (s.alpha - obs.alpha_at(&s.pose)).norm_inf())
            .fold(0.0, f64::max);
        worst_ratio = worst_ratio.max(err / h.powi(4));
        drift = drift.max(traj.agent(0).map(|s| (s.alpha.a - 1.0).abs()).fold(0.0, f64::max));
    }
    let long = simulate_ivp(&[init], &sys, Actuation::Underactuated, 1.0, 1000).unwrap();
    drift = drift.max(long.agent(0).map(|s| (s.alpha.a - 1.0).abs()).fold(0.0, f64::max));
    let elapsed = started.elapsed().as_secs_f64();
    outcome(
        order >= MIN_ORDER && worst_ratio <= ALPHA_C && drift <= DRIFT_TOL && elapsed < RUNTIME_S,
        format!(
            "RK4 order {order:.3} (min {MIN_ORDER}), alpha error / h^4 <= {worst_ratio:.2e} (C {ALPHA_C}), alpha1 drift {drift:.1e} (tol {DRIFT_TOL:.0e}); {elapsed:.2}s < {RUNTIME_S}s"
        ),
    )
}

// 6. exact discrete solutions
fn discrete_exact() -> Outcome {
    const TOL: f64 = 1e-12;
    let sys = lone_system(0.0, 1.0, 1.0, [0.0, 0.0]);
    let mut worst = 0.0f64;
    for (u, start) in [
        (AlgebraVec::new(0.0, 1.7, -0.4), Pose::new(0.5, 4.0, -6.0)),
        (AlgebraVec::new(0.9, 0.0, 0.0), Pose::new(-1.0, 5.0, 5.0)),
    ] {
        let setup = DiscreteSetup {
            sys: sys.clone(),
            start: vec![start],
            horizon: 2.0,
            steps: 20,
            kind: RetractionKind::Cayley,
        };
        let sol = DiscreteSolution::from_controls(&setup, vec![vec![u; 20]]);
        for k in 1..20 {
            worst = worst.max(momentum_residual(k, &sol, &sys).unwrap()[0].norm_inf());
        }
    }
    outcome(worst <= TOL, format!("max interior residual {worst:.1e} (tol {TOL:.0e})"))
}

// 7. boundary value solver
fn bvp_solver() -> Outcome {
    const MAX_ITERS: usize = 5;
    const RES_TOL: f64 = 1e-8;
    const RUNTIME_S: f64 = 60.0;
    let start = Pose::new(0.4, 5.0, 5.0);
    let d = 3.0;
    let goal = compose(&start, &Pose::new(0.0, d, 0.0));
    let horizon = 2.0;
    let prob = ShootingProblem::fixed_pose(
        DiscreteSetup {
            sys: lone_system(0.0, 1.0, 1.0, [0.0, 0.0]),
            start: vec![start],
            horizon,
            steps: 10,
            kind: RetractionKind::Cayley,
        },
        vec![goal],
    );
    let opts = SolverOptions {
        initial_guess: se2_ocp::solver::InitialGuess::Zeros,
        ..SolverOptions::default()
    };
    let geo = solve_bvp(&prob, &opts).unwrap();
    let exact = AlgebraVec::new(0.0, d / horizon, 0.0);
    let u_err = geo.solution.agents[0].controls.iter().map(|u| (*u - exact).norm_inf()).fold(0.0, f64::max);
    let end = endpoint_residual(&geo.solution, &[goal]).unwrap()[0].norm_inf();
    let geo_ok = geo.diagnostics.iterations <= MAX_ITERS && end <= RES_TOL && u_err <= 1e-8;

    let started = Instant::now();
    let sc = load_scenario(&scenario_path("two_agent_swap")).unwrap();
    let swap = solve_bvp(&sc.shooting_problem(), &sc.solver);
    let elapsed = started.elapsed().as_secs_f64();
    let (swap_ok, swap_detail) = match swap {
        Ok(b) => {
            let sol = &b.solution;
            let mut min_pair = f64::INFINITY;
            let mut min_obs = f64::INFINITY;
            for k in 0..=sol.steps {
                let (p, q) = (sol.agents[0].poses[k], sol.agents[1].poses[k]);
                min_pair = min_pair.min(((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt());
                for g in [p, q] {
                    min_obs = min_obs.min((g.x - sc.obstacle.center[0]).hypot(g.y - sc.obstacle.center[1]));
                }
            }
            let res = b.diagnostics.residual_inf;
            (
                sc.agents.len() == 2
                    && sc.steps == 40
                    && sc.horizon == 4.0
                    && res <= RES_TOL
                    && min_pair > 2.0 * sc.rbar
                    && min_obs > sc.rbar + sc.obstacle.radius,
                format!(
                    "swap residual {res:.1e} in {} iterations, min pair {min_pair:.3} > {:.3}, min obstacle {min_obs:.3} > {:.3}",
                    b.diagnostics.iterations,
                    2.0 * sc.rbar,
                    sc.rbar + sc.obstacle.radius
                ),
            )
        }
        Err(e) => (false, format!("swap failed: {e}")),
    };
    outcome(
        geo_ok && swap_ok && elapsed < RUNTIME_S,
        format!(
            "geodesic: {} iterations (max {MAX_ITERS}), endpoint {end:.1e}, |u - u_exact| {u_err:.1e}; {swap_detail}; {elapsed:.2}s < {RUNTIME_S}s",
            geo.diagnostics.iterations
        ),
    )
}

// 8. discrete recursion against a fine continuous reference
fn discrete_vs_continuous() -> Outcome {
    const ORDER_RANGE: (f64, f64) = (0.8, 1.5);
    let sc = load_scenario(&scenario_path("single_obstacle")).unwrap();
    let sys = sc.system();
    let obs = sc.potential_params().obstacle(0);
    let u0 = AlgebraVec::new(0.05, 2.0, 0.1);
    let levels = [30usize, 60, 120, 240];
    let fine = 240 * 32;
    let reference = simulate_ivp(
        &[AgentState::new(sc.agents[0].start, u0, 0.0, &obs.alpha0())],
        &sys,
        Actuation::Full,
        sc.horizon,
        fine,
    )
    .unwrap();
    let mut errs = Vec::new();
    for &n in &levels {
        let setup = DiscreteSetup {
            sys: sys.clone(),
            start: vec![sc.agents[0].start],
            horizon: sc.horizon,
            steps: n,
            kind: RetractionKind::Cayley,
        };
        let opts = StepOptions {
            tol: 1e-13,
            ..StepOptions::default()
        };
        let sol = forward_sweep(&[u0], &setup, &opts).unwrap();
        let stride = fine / n;
        let err = (0..n)
            .map(|k| (sol.agents[0].controls[k] - reference.states[k * stride][0].u).norm_inf())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = orders.iter().all(|&p| p >= ORDER_RANGE.0 && p <= ORDER_RANGE.1);
    outcome(
        pass,
        format!(
            "control errors {:?} at N = {levels:?}, orders {:?} (range {ORDER_RANGE:?})",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            orders.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>()
        ),
    )
}

// 9. left-translating a scenario leaves the controls unchanged
fn symmetry() -> Outcome {
    const TOL: f64 = 1e-7;
    let sc = load_scenario(&scenario_path("two_agent_swap")).unwrap();
    let g = Pose::new(0.7, 3.0, -2.0);
    let moved = sc.transformed(&g);
    // alpha0 of the moved scenario is Ad_g alpha0
    let a0 = sc.potential_params().obstacle(0).alpha0();
    let a1 = moved.potential_params().obstacle(0).alpha0();
    let alpha_err = (common::adjoint(&g, &a0) - a1).norm_inf();
    let base = solve_bvp(&sc.shooting_problem(), &sc.solver).unwrap();
    let other = solve_bvp(&moved.shooting_problem(), &moved.solver).unwrap();
    let diff = (&base.unknowns - &other.unknowns).amax();
    outcome(
        diff <= TOL && alpha_err <= 1e-12,
        format!("max control difference {diff:.1e} (tol {TOL:.0e}), alpha0 transform error {alpha_err:.1e}"),
    )
}

// 10. solve, check, tamper
fn closed_loop() -> Outcome {
    const PERTURBATION: f64 = 1e-3;
    let bin = env!("CARGO_BIN_EXE_se2ocp");
    let tmp = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    let mut tampered = 0;
    let mut detected = 0;
    for name in BUNDLED {
        let out = tmp.path().join(name);
        let solve = Command::new(bin)
            .args(["solve", scenario_path(name).to_str().unwrap(), "-o", out.to_str().unwrap(), "--quiet"])
            .status()
            .unwrap();
        let check = Command::new(bin).args(["check", out.to_str().unwrap(), "--quiet"]).status().unwrap();
        pass &= solve.code() == Some(0) && check.code() == Some(0);
        notes.push(format!("{name}: solve {:?} check {:?}", solve.code(), check.code()));

        // every single control value, perturbed in the parsed CSV
        let record = read_solution(&out).unwrap();
        for i in 0..record.series.len() {
            for k in 0..record.summary.steps {
                for c in 0..3 {
                    let mut rec: SolutionRecord = record.clone();
                    let u = rec.series[i][k].u.as_mut().unwrap();
                    match c {
                        0 => u.a += PERTURBATION,
                        1 => u.b1 += PERTURBATION,
                        _ => u.b2 += PERTURBATION,
                    }
                    tampered += 1;
                    if !check_record(&rec).passed() {
                        detected += 1;
                    }
                }
            }
        }
    }

    // one tampered file end to end through the binary
    let out = tmp.path().join("two_agent_swap");
    let csv = out.join("agent_1.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut rows = parse_csv(&text).unwrap();
    rows[17].u.as_mut().unwrap().b1 += PERTURBATION;
    let record = read_solution(&out).unwrap();
    let mut rec = record.clone();
    rec.series[1] = rows;
    write_solution(&rec, &out).unwrap();
    let res = Command::new(bin).args(["check", out.to_str().unwrap(), "--quiet"]).output().unwrap();
    let stderr = String::from_utf8_lossy(&res.stderr);
    let cli_ok = res.status.code() == Some(3) && stderr.contains("step 17");
    pass &= cli_ok && detected == tampered;
    outcome(
        pass,
        format!(
            "{}; tampered values detected {detected}/{tampered}; CLI tamper exit {:?}, reported {}",
            notes.join(", "),
            res.status.code(),
            stderr.lines().next().unwrap_or("")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("algebra identities", algebra_identities),
        ("distance identity", distance_identity),
        ("retraction suite", retraction_suite),
        ("gradient suite", gradient_suite),
        ("continuous integrator", continuous_integrator),
        ("exact discrete solutions", discrete_exact),
        ("boundary value solver", bvp_solver),
        ("discrete vs continuous", discrete_vs_continuous),
        ("left-translation symmetry", symmetry),
        ("closed loop", closed_loop),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, n + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
