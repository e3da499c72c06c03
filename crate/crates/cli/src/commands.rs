//! The six commands. Each returns a result section, extra files and a pass flag.

use clap::ValueEnum;
use ergolab::ergodic::{estimate_constant_dirichlet, estimate_constant_explosive, normalized_profile, ErgodicEstimate};
use ergolab::grid::{sample_forcing, Boundary, Discretization, Grid, GridField};
use ergolab::model::{boundary_constant, uniqueness_status, Exponents};
use ergolab::solve::{solve_dirichlet, solve_explosive, ExplosiveSolution, SolveReport};
use ergolab::verify::{
    check_comparison, check_gradient_bound, collar_family, domain_monotonicity, fit_boundary_rate, fit_boundary_rate_in,
    mu_star_upper_bound, ComparisonSide, RateFit,
};
use ergolab::Error as CoreError;

use crate::config::Resolved;
use crate::output::{profile_csv, table_csv};
use crate::report::{fmt_f64, Section};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Exponents,
    Solve,
    Explosive,
    Ergodic,
    Rate,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exponents => "exponents",
            Command::Solve => "solve",
            Command::Explosive => "explosive",
            Command::Ergodic => "ergodic",
            Command::Rate => "rate",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Section,
    /// `(file name, contents)` written next to the report.
    pub files: Vec<(String, String)>,
    /// Lines for standard output.
    pub summary: Vec<String>,
    pub log: Vec<String>,
    pub passed: bool,
}

/// A failed run still carries whatever was computed before the failure.
#[derive(Debug)]
pub struct Failure {
    pub error: CoreError,
    pub partial: Box<Outcome>,
}

type Run = Result<Outcome, Failure>;

fn fail(error: CoreError, partial: Outcome) -> Failure {
    Failure { error, partial: Box::new(partial) }
}

pub fn run(cmd: Command, r: &Resolved) -> Run {
    match cmd {
        Command::Exponents => Ok(exponents(r)),
        Command::Solve => solve(r),
        Command::Explosive => explosive(r),
        Command::Ergodic => ergodic(r),
        Command::Rate => rate(r),
        Command::Verify => Ok(verify(r)),
    }
}

pub fn exponents_line(r: &Resolved) -> String {
    let e = r.params.exponents();
    let c = boundary_constant(&r.params, &r.domain, &e);
    let u = uniqueness_status(&r.params, &r.forcing);
    format!("gamma={} tau={} grad_rate={} C={} uniqueness={}", e.gamma, e.tau, e.grad_rate, c, u.name())
}

fn exponents(r: &Resolved) -> Outcome {
    let e = r.params.exponents();
    let mut s = Section::new();
    s.num("gamma", e.gamma)
        .num("tau", e.tau)
        .num("grad_rate", e.grad_rate)
        .num("C", boundary_constant(&r.params, &r.domain, &e))
        .set("uniqueness", uniqueness_status(&r.params, &r.forcing).name());
    Outcome { result: s, summary: vec![exponents_line(r)], passed: true, ..Outcome::default() }
}

pub fn solve_section(rep: &SolveReport) -> Section {
    let mut s = Section::new();
    s.set("converged", rep.converged)
        .set("sweeps", rep.sweeps)
        .num("final_residual", rep.final_residual)
        .num("tolerance", rep.tolerance)
        .set("notes", &rep.wall_notes);
    s
}

fn field_summary(fld: &GridField<f64>) -> Section {
    let max = fld.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = Section::new();
    s.set("nodes", fld.grid.n).num("h", fld.grid.h).num("min_u", fld.min()).num("max_u", max);
    s
}

/// Partial outcome for a failed solve: the solver report when there is one.
fn solver_failure(e: CoreError, mut partial: Outcome) -> Failure {
    if let CoreError::NotConverged(rep) = &e {
        partial.result.child("solve", solve_section(rep));
    }
    fail(e, partial)
}

fn profile(r: &Resolved, fld: &GridField<f64>, partial: &mut Outcome) -> Result<(), CoreError> {
    partial.files.push(("profile.csv".into(), profile_csv(&r.params, fld, &r.forcing, r.solve.scheme)?));
    Ok(())
}

fn solve(r: &Resolved) -> Run {
    let mut out = Outcome::default();
    out.log.push(format!("solve: dirichlet, n={}", r.grid.n));
    let (fld, rep) =
        solve_dirichlet(&r.params, r.boundary, &r.forcing, &r.grid, None, &r.solve).map_err(|e| solver_failure(e, Outcome::default()))?;
    out.result.child("solve", solve_section(&rep)).child("field", field_summary(&fld));
    profile(r, &fld, &mut out).map_err(|e| fail(e, Outcome::default()))?;
    out.summary.push(format!("converged sweeps={} residual={}", rep.sweeps, fmt_f64(rep.final_residual)));
    out.passed = true;
    Ok(out)
}

fn run_explosive(r: &Resolved, grid: &Grid<f64>, log: &mut Vec<String>) -> Result<ExplosiveSolution<f64>, CoreError> {
    log.push(format!("explosive ladder, n={}", grid.n));
    let sol = solve_explosive(&r.params, &r.forcing, grid, &r.ladder, &r.solve)?;
    log.push(format!(
        "settled after {} rungs at R={}",
        sol.ladder.r_values.len(),
        fmt_f64(*sol.ladder.r_values.last().unwrap_or(&f64::NAN))
    ));
    Ok(sol)
}

fn ladder_section(sol: &ExplosiveSolution<f64>) -> Section {
    let mut s = Section::new();
    s.list("r_values", &sol.ladder.r_values)
        .list("interior_deltas", &sol.ladder.interior_deltas)
        .num("worst_increment", sol.ladder.worst_increment)
        .set("monotone_ok", sol.ladder.monotone_ok);
    s
}

fn explosive(r: &Resolved) -> Run {
    let mut out = Outcome::default();
    let sol = run_explosive(r, &r.grid, &mut out.log).map_err(|e| solver_failure(e, Outcome::default()))?;
    out.result.child("ladder", ladder_section(&sol)).child("solve", solve_section(&sol.report)).child("field", field_summary(&sol.field));
    profile(r, &sol.field, &mut out).map_err(|e| fail(e, Outcome::default()))?;
    let rows: Vec<(f64, f64)> = sol.ladder.r_values.iter().skip(1).copied().zip(sol.ladder.interior_deltas.iter().copied()).collect();
    out.files.push(("ladder.csv".into(), table_csv("r,interior_delta", &rows)));
    out.summary.push(format!("rungs={} monotone_ok={}", sol.ladder.r_values.len(), sol.ladder.monotone_ok));
    out.passed = sol.ladder.monotone_ok;
    Ok(out)
}

fn estimate(r: &Resolved) -> Result<ErgodicEstimate<f64>, CoreError> {
    if r.dirichlet_path {
        estimate_constant_dirichlet(&r.params, &r.forcing, &r.grid, &r.lambdas, &r.ergodic)
    } else {
        estimate_constant_explosive(&r.params, &r.forcing, &r.grid, &r.lambdas, &r.ergodic)
    }
}

fn estimate_section(est: &ErgodicEstimate<f64>) -> Section {
    let mut s = Section::new();
    s.set("case_tag", est.case_tag.name());
    if let Some(c) = est.best() {
        s.num("c", c);
    }
    if let Some(c) = est.c_extrapolated {
        s.num("c_extrapolated", c);
    }
    if let Some(t) = est.theta {
        s.num("theta", t);
    }
    let (ls, cs): (Vec<f64>, Vec<f64>) = est.ladder.iter().copied().unzip();
    s.num("spread", est.spread()).list("lambdas", &ls).list("c_k", &cs).set("probe_count", est.probe_points.len());
    if let (Some(&a), Some(&b)) = (est.probe_points.first(), est.probe_points.last()) {
        s.list("probe_range", &[a, b]);
    }
    if !est.minima.is_empty() {
        s.list("minima", &est.minima);
    }
    s
}

fn ergodic(r: &Resolved) -> Run {
    let mut out = Outcome::default();
    out.log.push(format!(
        "ergodic: {} path, {} discounts",
        if r.dirichlet_path { "dirichlet" } else { "explosive" },
        r.lambdas.values.len()
    ));
    let est = estimate(r).map_err(|e| solver_failure(e, Outcome::default()))?;
    out.result.child("estimate", estimate_section(&est));
    out.files.push(("ladder.csv".into(), table_csv("lambda,c", &est.ladder)));
    // The normalized profile solves the undiscounted equation with forcing f + c.
    let profile_params = r.params.with_lambda(0.0).map_err(|e| fail(e, Outcome::default()))?;
    let shifted = r.forcing.shifted(est.best().unwrap_or(0.0));
    let norm = normalized_profile(&est.profile);
    let csv = profile_csv(&profile_params, &norm, &shifted, r.solve.scheme).map_err(|e| fail(e, Outcome::default()))?;
    out.files.push(("profile.csv".into(), csv));
    out.summary.push(match est.best() {
        Some(c) => format!("c={} case_tag={}", fmt_f64(c), est.case_tag.name()),
        None => format!("c=none case_tag={}", est.case_tag.name()),
    });
    out.passed = true;
    Ok(out)
}

fn fit(r: &Resolved, sol: &ExplosiveSolution<f64>, e: &Exponents<f64>) -> Result<RateFit<f64>, CoreError> {
    let c = boundary_constant(&r.params, &r.domain, e);
    match r.window {
        Some(w) => fit_boundary_rate_in(&sol.field, e, c, w),
        None => fit_boundary_rate(&sol.field, e, c),
    }
}

/// Power law: exponent and prefactor; log law: prefactor only.
fn rate_ok(r: &Resolved, fit: &RateFit<f64>, e: &Exponents<f64>) -> bool {
    let (exp_tol, pre_tol) = r.rate_tols;
    let pre = (fit.prefactor_ratio - 1.0).abs() <= pre_tol;
    if e.gamma > 0.0 {
        (fit.fitted_exponent + e.gamma).abs() <= exp_tol && pre
    } else {
        pre
    }
}

fn rate_section(fit: &RateFit<f64>, e: &Exponents<f64>, passed: bool) -> Section {
    let mut s = Section::new();
    s.num("expected_exponent", -e.gamma)
        .list("window", &[fit.window.0, fit.window.1])
        .num("fitted_exponent", fit.fitted_exponent)
        .num("fitted_prefactor", fit.fitted_prefactor)
        .num("prefactor_ratio", fit.prefactor_ratio)
        .num("offset", fit.offset)
        .num("r_squared", fit.r_squared)
        .set("nodes_used", fit.nodes_used)
        .list("raw_loglog", &[fit.raw_loglog.0, fit.raw_loglog.1])
        .set("passed", passed);
    s
}

fn rate_precondition(r: &Resolved) -> Result<Exponents<f64>, CoreError> {
    let e = r.params.exponents();
    if e.gamma < 0.0 {
        return Err(CoreError::Precondition("rate fit needs gamma >= 0 (bounded boundary values otherwise)".into()));
    }
    Ok(e)
}

fn rate(r: &Resolved) -> Run {
    let mut out = Outcome::default();
    let e = rate_precondition(r).map_err(|e| fail(e, Outcome::default()))?;
    let sol = run_explosive(r, &r.grid, &mut out.log).map_err(|e| solver_failure(e, Outcome::default()))?;
    out.result.child("ladder", ladder_section(&sol));
    let rf = match fit(r, &sol, &e) {
        Ok(f) => f,
        Err(err) => return Err(fail(err, out)),
    };
    let ok = rate_ok(r, &rf, &e);
    out.result.child("fit", rate_section(&rf, &e, ok));
    profile(r, &sol.field, &mut out).map_err(|e| fail(e, Outcome::default()))?;
    out.summary.push(format!(
        "fitted_exponent={} fitted_prefactor={} prefactor_ratio={}",
        fmt_f64(rf.fitted_exponent),
        fmt_f64(rf.fitted_prefactor),
        fmt_f64(rf.prefactor_ratio)
    ));
    out.passed = ok;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

struct Check {
    status: Status,
    detail: Section,
}

impl Check {
    fn skipped(why: &str) -> Self {
        let mut detail = Section::new();
        detail.set("reason", why);
        Check { status: Status::Skipped, detail }
    }

    fn error(e: &CoreError) -> Self {
        let mut detail = Section::new();
        detail.set("error", e);
        Check { status: Status::Error, detail }
    }
}

/// Explosive solves at `n`, `2n - 1`, `4n - 3`, computed on first use.
struct Explosive<'a> {
    r: &'a Resolved,
    levels: Vec<Result<ExplosiveSolution<f64>, String>>,
}

impl<'a> Explosive<'a> {
    fn get(&mut self, level: usize, log: &mut Vec<String>) -> Result<&ExplosiveSolution<f64>, String> {
        while self.levels.len() <= level {
            let mut g = self.r.grid.clone();
            for _ in 0..self.levels.len() {
                g = g.refine();
            }
            self.levels.push(run_explosive(self.r, &g, log).map_err(|e| e.to_string()));
        }
        self.levels[level].as_ref().map_err(|e| e.clone())
    }
}

fn check_residual(r: &Resolved) -> Check {
    let (fld, rep) = match solve_dirichlet(&r.params, r.boundary, &r.forcing, &r.grid, None, &r.solve) {
        Ok(v) => v,
        Err(e) => return Check::error(&e),
    };
    let fv = match sample_forcing(&r.forcing, &r.grid) {
        Ok(v) => v,
        Err(e) => return Check::error(&e),
    };
    let recheck = Discretization::new(&r.params, &r.grid, fv, r.solve.scheme).scaled_residual_norm(&fld.values);
    let finite = fld.values.iter().all(|v| v.is_finite());
    let mut d = Section::new();
    d.num("solver_residual", rep.final_residual).num("recomputed_residual", recheck).num("tolerance", r.solve.tol);
    Check { status: Status::from_bool(finite && recheck <= r.solve.tol), detail: d }
}

fn check_ladder(ex: &mut Explosive, log: &mut Vec<String>) -> Check {
    match ex.get(0, log) {
        Ok(sol) => Check { status: Status::from_bool(sol.ladder.monotone_ok), detail: ladder_section(sol) },
        Err(e) => error_text(&e),
    }
}

fn error_text(e: &str) -> Check {
    let mut detail = Section::new();
    detail.set("error", e);
    Check { status: Status::Error, detail }
}

fn shifted_boundary(b: Boundary<f64>, s: f64) -> Boundary<f64> {
    match b {
        Boundary::Dirichlet { lo, hi } => Boundary::Dirichlet { lo: lo + s, hi: hi + s },
        Boundary::DirichletRadial { outer } => Boundary::DirichletRadial { outer: outer + s },
    }
}

fn check_comparison_pair(r: &Resolved, shift: f64) -> Check {
    let upper_f = r.forcing.shifted(shift);
    let upper_g = shifted_boundary(r.boundary, shift);
    let lo = solve_dirichlet(&r.params, r.boundary, &r.forcing, &r.grid, None, &r.solve);
    let hi = solve_dirichlet(&r.params, upper_g, &upper_f, &r.grid, None, &r.solve);
    let ((u1, r1), (u2, r2)) = match (lo, hi) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Check::error(&e),
    };
    let lower = ComparisonSide { field: &u1, forcing: &r.forcing, report: &r1 };
    let upper = ComparisonSide { field: &u2, forcing: &upper_f, report: &r2 };
    match check_comparison(&r.params, lower, upper) {
        Ok(rep) => {
            let mut d = Section::new();
            d.num("shift", shift).num("worst_violation", rep.worst_violation).num("worst_at", rep.worst_at).num("tolerance", rep.tolerance);
            Check { status: Status::from_bool(rep.passed), detail: d }
        }
        Err(CoreError::HypothesisUnmet(why)) => Check::skipped(&why),
        Err(e) => Check::error(&e),
    }
}

fn check_gradient(ex: &mut Explosive, r: &Resolved, log: &mut Vec<String>) -> Check {
    let mut fields = Vec::new();
    for level in 0..3 {
        match ex.get(level, log) {
            Ok(sol) => fields.push(sol.field.clone()),
            Err(e) => return error_text(&e),
        }
    }
    match check_gradient_bound(&fields, r.params.exponents().grad_rate) {
        Ok(rep) => {
            let mut d = Section::new();
            d.list("q", &rep.q).list("ratios", &rep.ratios);
            Check { status: Status::from_bool(rep.passed), detail: d }
        }
        Err(e) => Check::error(&e),
    }
}

fn check_rate(ex: &mut Explosive, r: &Resolved, log: &mut Vec<String>) -> Check {
    let e = match rate_precondition(r) {
        Ok(e) => e,
        Err(CoreError::Precondition(why)) => return Check::skipped(&why),
        Err(err) => return Check::error(&err),
    };
    let sol = match ex.get(2, log) {
        Ok(s) => s,
        Err(err) => return error_text(&err),
    };
    match fit(r, sol, &e) {
        Ok(f) => {
            let ok = rate_ok(r, &f, &e);
            Check { status: Status::from_bool(ok), detail: rate_section(&f, &e, ok) }
        }
        Err(err) => Check::error(&err),
    }
}

fn check_mu_star(r: &Resolved, log: &mut Vec<String>) -> Check {
    let bound = match mu_star_upper_bound(&r.params, &r.domain, &r.forcing) {
        Ok(b) => b,
        Err(e) => return Check::skipped(&e.to_string()),
    };
    log.push("mu_star: ergodic estimate".into());
    let est = match estimate_constant_explosive(&r.params, &r.forcing, &r.grid, &r.lambdas, &r.ergodic) {
        Ok(e) => e,
        Err(e) => return Check::error(&e),
    };
    let Some(c) = est.best() else {
        return Check::skipped("no ergodic constant on this configuration");
    };
    let tol = est.spread() + r.solve.tol.max(1e-6) * (1.0 + c.abs());
    let mut d = Section::new();
    d.num("c", c).num("mu_upper_bound", bound).num("tolerance", tol);
    Check { status: Status::from_bool(c <= bound + tol), detail: d }
}

fn check_domains(r: &Resolved, deltas: &[f64], log: &mut Vec<String>) -> Check {
    let mut domains = match collar_family(&r.domain, deltas) {
        Ok(d) => d,
        Err(e) => return Check::error(&e),
    };
    domains.push(r.domain);
    log.push(format!("domain_monotonicity: {} domains", domains.len()));
    match domain_monotonicity(&r.params, &r.forcing, &domains, r.grid.n, &r.lambdas, &r.ergodic) {
        Ok(rep) => {
            let mut d = Section::new();
            d.list("constants", &rep.constants).list("tolerances", &rep.tolerances).set("nondecreasing", rep.nondecreasing);
            if let Some(s) = rep.strict {
                d.set("strict", s);
            }
            Check { status: Status::from_bool(rep.nondecreasing && rep.strict != Some(false)), detail: d }
        }
        Err(e) => Check::error(&e),
    }
}

fn verify(r: &Resolved) -> Outcome {
    let mut out = Outcome::default();
    let mut ex = Explosive { r, levels: Vec::new() };
    let needs_lambda = |name: &str| matches!(name, "ladder" | "gradient" | "rate");
    let mut all_ok = true;
    for name in &r.checks {
        out.log.push(format!("check {name}"));
        let check = if needs_lambda(name) && !(r.params.lambda > 0.0) {
            Check::skipped("explosive solves need lambda > 0")
        } else {
            match name.as_str() {
                "residual" => check_residual(r),
                "ladder" => check_ladder(&mut ex, &mut out.log),
                "comparison" => check_comparison_pair(r, r.comparison_shift),
                "gradient" => check_gradient(&mut ex, r, &mut out.log),
                "rate" => check_rate(&mut ex, r, &mut out.log),
                "mu_star" => check_mu_star(r, &mut out.log),
                "domain_monotonicity" => check_domains(r, &r.collar_deltas, &mut out.log),
                _ => unreachable!("checks are validated with the config"),
            }
        };
        all_ok &= matches!(check.status, Status::Pass | Status::Skipped);
        out.summary.push(format!("check {name}: {}", check.status.name()));
        let mut s = Section::new();
        s.set("status", check.status.name()).extend(check.detail);
        out.result.child(name, s);
    }
    out.result.set("passed", all_ok);
    out.passed = all_ok;
    out
}
