//! Command dispatch and report assembly.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pqlap_core::operator::{change_of_variable_study, operator_study, scaling_study, Manufactured};
use pqlap_core::radial::{
    blowup_side, default_window, gradient_vs_distance_from, residual_certificate, solve_radial_with, Side,
};
use pqlap_core::{
    bochner_check, classify_with, estimate_consistency, estimate_rate, fit_blowup_exponent, il_parameter_window,
    select_b_product, sum_selection, verify_negativity, ClassifyOptions, Decision, GradientScheme, Instance,
    NonlinearityKind, ProblemInstance, Radial, Selection, SolverOptions, Theorem, Window, DEFAULT_GRID_POINTS,
};

use crate::params::{ParamSet, Point, Value};
use crate::{is_numerical, CliError, Command, RunConfig, SCHEMA};

type IdentityReport = pqlap_core::Report;
type Fit = pqlap_core::Fit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub config_echo: RunConfig,
    pub results: Results,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<f64>>,
}

impl Report {
    /// 3 when any sweep item failed numerically, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.results.items.iter().any(|it| matches!(it, Item::Failed(_))) {
            3
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub command: Command,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Item {
    Classify(Box<Decision>),
    SearchB(Box<SearchItem>),
    IlWindow(WindowItem),
    Identity(IdentityReport),
    SolveRadial(Box<RadialItem>),
    Failed(FailedItem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchItem {
    pub instance: Instance,
    pub selection: Selection,
    pub oracle: Option<Oracle>,
}

/// Brute-force minimum of the trinomial on a uniform grid over `[0, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    pub t_max: f64,
    pub grid_points: usize,
    pub t_min: f64,
    pub value_min: f64,
    /// `value_min <= -κ/2`; absent for infeasible selections.
    pub confirmed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowItem {
    pub q: f64,
    pub m: f64,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialItem {
    pub instance: Instance,
    pub r0: f64,
    pub r1: f64,
    pub u0: f64,
    pub u1: f64,
    pub mesh: usize,
    pub reg_eps: f64,
    pub scheme: GradientScheme,
    pub converged: bool,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub continuation_steps: usize,
    pub data_fraction: f64,
    pub certificate: f64,
    pub theorem: Theorem,
    pub predicted_rate: Option<f64>,
    pub side: Side,
    pub fit: Option<Fit>,
    pub fit_note: Option<String>,
    pub estimate: Option<IdentityReport>,
    /// `(d, |u′|)` sorted by distance to the blow-up side.
    pub gradient_profile: Vec<(f64, f64)>,
    pub solution: Series,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub r_half: Vec<f64>,
    pub du: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedItem {
    pub index: usize,
    pub error: String,
}

/// What a sweep point runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Task {
    Classify,
    SearchB,
    IlWindow,
    SolveRadial,
}

impl Task {
    fn of(cmd: Command, params: &ParamSet) -> Result<Self, CliError> {
        let task = match cmd {
            Command::Classify => Task::Classify,
            Command::SearchB => Task::SearchB,
            Command::IlWindow => Task::IlWindow,
            Command::SolveRadial => Task::SolveRadial,
            Command::VerifyIdentities => unreachable!(),
            Command::Sweep => match params.get("task") {
                None => Task::Classify,
                Some(Value::Text(t)) => match Command::parse(t) {
                    Some(Command::Classify) => Task::Classify,
                    Some(Command::SearchB) => Task::SearchB,
                    Some(Command::IlWindow) => Task::IlWindow,
                    Some(Command::SolveRadial) => Task::SolveRadial,
                    _ => {
                        return Err(CliError::Usage(format!(
                            "field `task`: `{t}` is not one of classify, search-b, il-window, solve-radial"
                        )))
                    }
                },
                Some(v) => return Err(CliError::Usage(format!("field `task`: expected a word, got `{v}`"))),
            },
        };
        Ok(task)
    }
}

/// A validated unit of work.
enum Job {
    Classify(Instance),
    SearchB(Instance),
    IlWindow {
        q: f64,
        m: f64,
    },
    Radial(Box<Radial>),
    CoV {
        field: Manufactured,
        dim: usize,
        cells: usize,
        b: f64,
        p: f64,
        q: f64,
    },
    Bochner {
        field: Manufactured,
        dim: usize,
        cells: usize,
    },
    Scaling {
        field: Manufactured,
        dim: usize,
        cells: usize,
        k: f64,
        alpha: f64,
        p: f64,
    },
    Operator {
        field: Manufactured,
        dim: usize,
        cells: usize,
        p: f64,
        q: f64,
    },
}

pub fn instance_from(point: &Point) -> Result<Instance, CliError> {
    let kind = match point.text("kind") {
        None => NonlinearityKind::Product,
        Some(k) => k.parse().map_err(|_| {
            CliError::Usage(format!(
                "field `kind`: `{k}` is not one of product, sum, hamilton_jacobi"
            ))
        })?,
    };
    let n = point
        .integer("N")?
        .ok_or_else(|| CliError::Usage("missing field `N`".into()))?;
    let (p, q, m) = (point.require("p")?, point.require("q")?, point.require("m")?);
    let inst = match kind {
        NonlinearityKind::HamiltonJacobi => ProblemInstance::hamilton_jacobi(n, p, q, m),
        NonlinearityKind::Product => ProblemInstance::product(n, p, q, point.require("s")?, m),
        NonlinearityKind::Sum => ProblemInstance::sum(n, p, q, point.require("s")?, m, point.require("M")?),
    };
    inst.validated().map_err(|e| CliError::Usage(e.to_string()))
}

fn radial_from(point: &Point) -> Result<Radial, CliError> {
    let inst = instance_from(point)?;
    let get = |k: &str, d: f64| point.number(k).unwrap_or(d);
    let mesh = point.integer("mesh")?.unwrap_or(256);
    let mut prob = Radial::new(
        inst,
        get("r0", 1.0),
        get("r1", 2.0),
        get("u0", 0.0),
        get("u1", 1.0),
        mesh,
    );
    if let Some(eps) = point.number("reg_eps") {
        prob = prob.with_reg_eps(eps);
    }
    let scheme = match point.text("scheme") {
        None | Some("central") => GradientScheme::Central,
        Some("upwind") => GradientScheme::Upwind,
        Some(s) => {
            return Err(CliError::Usage(format!(
                "field `scheme`: `{s}` is not one of central, upwind"
            )))
        }
    };
    prob = prob.with_scheme(scheme);
    prob.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(prob)
}

fn field_of(point: &Point, default: Manufactured) -> Result<Manufactured, CliError> {
    match point.text("field") {
        None => Ok(default),
        Some(f) => f.parse().map_err(|_| {
            let names: Vec<_> = Manufactured::ALL.iter().map(|m| m.name()).collect();
            CliError::Usage(format!("field `field`: `{f}` is not one of {}", names.join(", ")))
        }),
    }
}

/// Default catalog: change of variable on the positive field over
/// b × p × q, Böchner on every catalog field, three scaling laws and the
/// differenced (p,q)-Laplacian against its exact value.
fn identity_jobs(params: &ParamSet, rng: &mut ChaCha8Rng) -> Result<Vec<Job>, CliError> {
    let mut params = params.clone();
    let defaults = [
        ("b", Value::List(vec![0.5, 1.0, 2.0, 5.0])),
        ("p", Value::List(vec![2.2, 3.0])),
        ("q", Value::List(vec![1.5, 2.0])),
        ("dim", Value::Number(2.0)),
        ("cells", Value::Number(64.0)),
    ];
    for (k, v) in defaults {
        if params.get(k).is_none() {
            params.insert(k, v);
        }
    }
    let points = params.expand(rng)?;
    let first = &points[0];
    let dim = first.integer("dim")?.unwrap_or(2);
    let cells = first.integer("cells")?.unwrap_or(64);
    if !(2..=3).contains(&dim) {
        return Err(CliError::Usage(format!("field `dim`: {dim} is not 2 or 3")));
    }
    if cells < 8 {
        return Err(CliError::Usage(format!("field `cells`: {cells} is below 8")));
    }
    let field = field_of(first, Manufactured::ShiftedSinCos)?;

    let mut jobs = Vec::new();
    let mut pq: Vec<(f64, f64)> = Vec::new();
    for pt in &points {
        let (b, p, q) = (pt.require("b")?, pt.require("p")?, pt.require("q")?);
        if b == 0.0 {
            return Err(CliError::Usage("field `b`: must be nonzero".into()));
        }
        if !(q > 1.0 && p >= q) {
            return Err(CliError::Usage(format!(
                "field `p`/`q`: need p >= q > 1, got p={p}, q={q}"
            )));
        }
        jobs.push(Job::CoV {
            field,
            dim,
            cells,
            b,
            p,
            q,
        });
        if !pq.contains(&(p, q)) {
            pq.push((p, q));
        }
    }
    for f in [
        Manufactured::Affine,
        Manufactured::Saddle,
        Manufactured::SquaredNorm,
        Manufactured::SinCos,
        field,
    ] {
        jobs.push(Job::Bochner { field: f, dim, cells });
    }
    let k = first.number("k");
    let alpha = first.number("alpha");
    // k keeps k·[0,1]^d clear of the critical points of each field
    let laws = [
        (Manufactured::SinX1, k.unwrap_or(0.5), alpha.unwrap_or(2.0), 3.0),
        (Manufactured::SinCos, k.unwrap_or(1.2), alpha.unwrap_or(0.7), 3.0),
        (Manufactured::SinX1, k.unwrap_or(0.8), alpha.unwrap_or(1.0), 2.2),
    ];
    for (f, k, alpha, p) in laws {
        jobs.push(Job::Scaling {
            field: f,
            dim,
            cells,
            k,
            alpha,
            p,
        });
    }
    for (p, q) in pq {
        jobs.push(Job::Operator {
            field,
            dim,
            cells,
            p,
            q,
        });
    }
    Ok(jobs)
}

fn build_jobs(config: &RunConfig) -> Result<Vec<Job>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    if config.command == Command::VerifyIdentities {
        return identity_jobs(&config.params, &mut rng);
    }
    let task = Task::of(config.command, &config.params)?;
    if config.params.is_empty() {
        return Err(CliError::Usage(
            "no parameters: pass --params FILE or --set key=value".into(),
        ));
    }
    let points = config.params.expand(&mut rng)?;
    if config.command != Command::Sweep && points.len() != 1 {
        return Err(CliError::Usage(format!(
            "{} takes one instance but the parameters expand to {}; use `sweep` with `task = {}`",
            config.command,
            points.len(),
            config.command
        )));
    }
    let many = points.len() > 1;
    points
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let job = match task {
                Task::Classify => instance_from(pt).map(Job::Classify),
                Task::SearchB => instance_from(pt).and_then(|inst| {
                    if inst.kind == NonlinearityKind::HamiltonJacobi {
                        Err(CliError::Usage("field `kind`: search-b needs product or sum".into()))
                    } else {
                        Ok(Job::SearchB(inst))
                    }
                }),
                Task::IlWindow => match (pt.require("q"), pt.require("m")) {
                    (Ok(q), Ok(m)) if q > 1.0 && m >= 0.0 => Ok(Job::IlWindow { q, m }),
                    (Ok(_), Ok(_)) => Err(CliError::Usage("field `q`/`m`: need q > 1 and m >= 0".into())),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                },
                Task::SolveRadial => radial_from(pt).map(|p| Job::Radial(Box::new(p))),
            };
            job.map_err(|e| match e {
                CliError::Usage(msg) if many => CliError::Usage(format!("point {i}: {msg}")),
                other => other,
            })
        })
        .collect()
}

fn search_b(inst: &Instance, grid_points: usize) -> Result<SearchItem, pqlap_core::Error> {
    let selection = match inst.kind {
        NonlinearityKind::Sum => sum_selection(inst)?,
        _ => select_b_product(inst)?,
    };
    let oracle = selection.coeffs.map(|c| {
        let t_max = match (selection.t_star, c.vertex()) {
            (Some(t), _) if t > 0.0 => 2.0 * t,
            (_, Some(v)) if v > 0.0 => 2.0 * v,
            _ => 1.0,
        };
        let (t_min, value_min) = verify_negativity(&c, t_max, grid_points);
        let confirmed = selection
            .kappa
            .filter(|_| selection.is_feasible())
            .map(|k| value_min <= -k / 2.0);
        Oracle {
            t_max,
            grid_points,
            t_min,
            value_min,
            confirmed,
        }
    });
    Ok(SearchItem {
        instance: *inst,
        selection,
        oracle,
    })
}

fn solve(
    prob: &Radial,
    opts: &SolverOptions<f64>,
    classify_opts: ClassifyOptions,
) -> Result<RadialItem, pqlap_core::Error> {
    let sol = solve_radial_with(prob, opts)?;
    let certificate = residual_certificate(prob, &sol);
    let decision = classify_with(&prob.inst, classify_opts)?;
    let predicted_rate = estimate_rate(&decision).ok().map(|(r, _)| r);
    let side = blowup_side(&sol);
    let profile = gradient_vs_distance_from(&sol, side);
    let (fit, fit_note) = match fit_blowup_exponent(&profile, default_window(&sol)) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let estimate = estimate_consistency(&sol, &decision).ok();
    Ok(RadialItem {
        instance: prob.inst,
        r0: prob.r0,
        r1: prob.r1,
        u0: prob.u_at_r0,
        u1: prob.u_at_r1,
        mesh: prob.mesh_n,
        reg_eps: prob.reg_eps,
        scheme: prob.scheme,
        converged: sol.converged,
        residual_norm: sol.residual_norm,
        newton_iters: sol.newton_iters,
        continuation_steps: sol.continuation_steps,
        data_fraction: sol.data_fraction,
        certificate,
        theorem: decision.theorem,
        predicted_rate,
        side,
        fit,
        fit_note,
        estimate,
        gradient_profile: profile,
        solution: Series {
            r: sol.r,
            u: sol.u,
            r_half: sol.r_half,
            du: sol.du,
        },
    })
}

struct Settings {
    classify: ClassifyOptions,
    solver: SolverOptions<f64>,
    grid_points: usize,
    tol_factor: Option<f64>,
}

fn execute(job: &Job, s: &Settings) -> Result<Item, pqlap_core::Error> {
    let tol = |r: IdentityReport| match s.tol_factor {
        Some(f) => r.with_tol_factor(f),
        None => r,
    };
    Ok(match job {
        Job::Classify(inst) => Item::Classify(Box::new(classify_with(inst, s.classify)?)),
        Job::SearchB(inst) => Item::SearchB(Box::new(search_b(inst, s.grid_points)?)),
        Job::IlWindow { q, m } => Item::IlWindow(WindowItem {
            q: *q,
            m: *m,
            window: il_parameter_window(*q, *m)?,
        }),
        Job::Radial(prob) => Item::SolveRadial(Box::new(solve(prob, &s.solver, s.classify)?)),
        Job::CoV {
            field,
            dim,
            cells,
            b,
            p,
            q,
        } => Item::Identity(tol(change_of_variable_study(*field, *dim, *cells, *b, *p, *q)?)),
        Job::Bochner { field, dim, cells } => {
            let mut r = tol(bochner_check(&field.sample_unit(*dim, *cells)?, *dim));
            r.name = format!("{} on {}", r.name, field.name());
            Item::Identity(r)
        }
        Job::Scaling {
            field,
            dim,
            cells,
            k,
            alpha,
            p,
        } => Item::Identity(tol(scaling_study(*field, *dim, *cells, *k, *alpha, *p)?)),
        Job::Operator {
            field,
            dim,
            cells,
            p,
            q,
        } => Item::Identity(tol(operator_study(*field, *dim, *cells, *p, *q)?)),
    })
}

/// Runs a configuration. Validation errors are returned before any work
/// starts. In a sweep, numerical failures become [`Item::Failed`] entries;
/// elsewhere they abort the run.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let jobs = build_jobs(config)?;
    let mut solver = SolverOptions::<f64>::default();
    if let Some(t) = config.tolerance("solver_tol") {
        solver.tol = t;
    }
    if let Some(n) = config.count_tolerance("max_newton")? {
        solver.max_newton = n;
    }
    if let Some(n) = config.count_tolerance("max_damps")? {
        solver.max_damps = n;
    }
    let settings = Settings {
        classify: ClassifyOptions {
            optimal_search: config.optimal_search,
        },
        solver,
        grid_points: config
            .count_tolerance("grid_points")?
            .unwrap_or(DEFAULT_GRID_POINTS)
            .max(2),
        tol_factor: config.tolerance("tol_factor"),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let outcomes: Vec<(Result<Item, pqlap_core::Error>, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let start = Instant::now();
                let out = execute(job, &settings);
                (out, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });

    let sweep = config.command == Command::Sweep;
    let many = jobs.len() > 1;
    let mut items = Vec::with_capacity(outcomes.len());
    let mut timing = Vec::with_capacity(outcomes.len());
    for (index, (out, ms)) in outcomes.into_iter().enumerate() {
        timing.push(ms);
        match out {
            Ok(item) => items.push(item),
            Err(e) if sweep && is_numerical(&e) => items.push(Item::Failed(FailedItem {
                index,
                error: e.to_string(),
            })),
            Err(e) => {
                let err = CliError::from(e);
                return Err(match err {
                    CliError::Usage(m) if many => CliError::Usage(format!("item {index}: {m}")),
                    other => other,
                });
            }
        }
    }
    Ok(Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_echo: config.clone(),
        results: Results {
            command: config.command,
            items,
        },
        timing: config.timing.then_some(timing),
    })
}
