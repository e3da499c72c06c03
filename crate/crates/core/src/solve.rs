//! Stationary solvers for the discounted Dirichlet problem and the explosive problem.

use crate::error::{Error, Result};
use crate::grid::{sample_forcing, Boundary, Discretization, Grid, GridField, Scheme};
use crate::model::{Forcing, OperatorKind, ValidatedParams};
use crate::num::Real;

/// Outcome of one stationary solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    /// Newton iterations plus fallback sweeps.
    pub sweeps: usize,
    /// Max over nodes of the residual beyond its rounding bound, scaled by `1 + Σ|terms|`.
    pub final_residual: f64,
    pub tolerance: f64,
    pub wall_notes: String,
}

impl std::fmt::Display for SolveReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "converged={} sweeps={} residual={:e} tol={:e} {}",
            self.converged, self.sweeps, self.final_residual, self.tolerance, self.wall_notes
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Budget of Newton iterations and fallback sweeps.
    pub max_sweeps: usize,
    pub scheme: Scheme,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_sweeps: 400, scheme: Scheme::default() }
    }
}

/// Solves `G(u) + λ|u|^α u = f` with constant Dirichlet data `g`.
pub fn solve_dirichlet<T: Real>(
    p: &ValidatedParams<T>,
    g: Boundary<T>,
    f: &Forcing<T>,
    grid: &Grid<T>,
    init: Option<&GridField<T>>,
    opts: &SolveOptions,
) -> Result<(GridField<T>, SolveReport)> {
    let fv = sample_forcing(f, grid)?;
    let start = match init {
        Some(fld) if fld.grid.n == grid.n => fld.values.clone(),
        _ => vec![g.min_value(); grid.n],
    };
    let disc = Discretization::new(p, grid, fv, opts.scheme);
    let (values, report) = solve_with(&disc, g, start, opts)?;
    let fld = GridField::new(grid.clone(), values, g)?;
    if report.converged {
        Ok((fld, report))
    } else {
        Err(Error::NotConverged(Box::new(report)))
    }
}

fn apply_boundary<T: Real>(grid: &Grid<T>, g: Boundary<T>, u: &mut [T]) {
    let n = grid.n;
    match g {
        Boundary::Dirichlet { lo, hi } => {
            u[0] = lo;
            u[n - 1] = hi;
        }
        Boundary::DirichletRadial { outer } => u[n - 1] = outer,
    }
}

/// Runs the solver from `start`; returns the iterate even when it fails to converge.
///
/// For `α ≠ 0` a stalled solve is retried by continuation in the gradient floor,
/// shrinking it from order one to the grid scale and then to the scheme's value.
pub(crate) fn solve_with<T: Real>(
    disc: &Discretization<'_, T>,
    g: Boundary<T>,
    start: Vec<T>,
    opts: &SolveOptions,
) -> Result<(Vec<T>, SolveReport)> {
    if disc.params.alpha == T::zero() {
        return iterate(disc, g, start, opts);
    }
    let quick = SolveOptions { max_sweeps: (opts.max_sweeps / 4).max(20), ..*opts };
    let (u, report) = iterate(disc, g, start.clone(), &quick)?;
    if report.converged {
        return Ok((u, report));
    }
    let target = disc.regularization();
    let floor = target.max(disc.grid.h);
    let mut spent = report.sweeps;
    let mut stages = 0usize;
    // Last converged stage, its floor, and the current reduction factor.
    let mut anchor: Option<(Vec<T>, T)> = None;
    let mut factor = T::lit(4.0);
    let mut eps = T::one().max(floor);
    let mut u = start;
    loop {
        let stage = disc.with_regularization(eps);
        let (next, rep) = iterate(&stage, g, u.clone(), opts)?;
        spent += rep.sweeps;
        stages += 1;
        if eps <= target && (rep.converged || factor < T::lit(1.1) || stages >= MAX_STAGES) {
            let notes = format!("{} continuation_stages={stages}", rep.wall_notes).trim().to_string();
            return Ok((next, SolveReport { sweeps: spent, wall_notes: notes, ..rep }));
        }
        if rep.converged || anchor.is_none() {
            if rep.converged {
                factor = (factor * factor).min(T::lit(4.0));
            }
            anchor = Some((next.clone(), eps));
            u = next;
        } else {
            factor = factor.sqrt();
            u = anchor.as_ref().map(|a| a.0.clone()).unwrap_or(u);
        }
        let base = anchor.as_ref().map_or(eps, |a| a.1);
        if factor < T::lit(1.1) || stages >= MAX_STAGES {
            eps = target;
            factor = T::zero();
        } else {
            eps = base / factor;
            if eps < floor {
                eps = if base > floor { floor } else { target };
            }
        }
    }
}

const MAX_STAGES: usize = 24;

fn iterate<T: Real>(disc: &Discretization<'_, T>, g: Boundary<T>, mut u: Vec<T>, opts: &SolveOptions) -> Result<(Vec<T>, SolveReport)> {
    apply_boundary(disc.grid, g, &mut u);
    let tol = T::lit(opts.tol);
    let mut sweeps = 0usize;
    let mut notes = Vec::new();
    let mut norm = disc.scaled_residual_norm(&u);
    let mut fallback_rounds = 0usize;
    let mut slow = 0usize;
    while sweeps < opts.max_sweeps {
        if !norm.is_finite() {
            return Err(Error::NaNDetected);
        }
        if norm <= tol {
            break;
        }
        sweeps += 1;
        let step = if slow >= 3 { None } else { newton_step(disc, &u) };
        match step {
            Some((next, next_norm)) => {
                slow = if next_norm > T::lit(0.9) * norm { slow + 1 } else { 0 };
                u = next;
                norm = next_norm;
            }
            None => {
                slow = 0;
                fallback_rounds += 1;
                let before = norm;
                let budget = (opts.max_sweeps - sweeps.min(opts.max_sweeps)).clamp(1, 100);
                sweeps += continuation(disc, &mut u, budget, tol);
                norm = disc.scaled_residual_norm(&u);
                if !(norm < before) {
                    sweeps += gauss_seidel(disc, &mut u, 20);
                    norm = disc.scaled_residual_norm(&u);
                }
            }
        }
    }
    if norm <= tol {
        // Quadratic convergence makes a few extra steps nearly free; they pull the
        // iterate down to roundoff so ladders built from solves stay monotone.
        for _ in 0..3 {
            match newton_step(disc, &u) {
                Some((next, next_norm)) if next_norm < norm => {
                    u = next;
                    norm = next_norm;
                }
                _ => break,
            }
        }
    }
    if fallback_rounds > 0 {
        notes.push(format!("fallback_rounds={fallback_rounds}"));
    }
    let report =
        SolveReport { converged: norm <= tol, sweeps, final_residual: norm.as_f64(), tolerance: opts.tol, wall_notes: notes.join(" ") };
    Ok((u, report))
}

/// Residual weights `1 / (1 + scale_i)` frozen at `u`.
fn weights<T: Real>(disc: &Discretization<'_, T>, u: &[T]) -> Vec<T> {
    let mut w = vec![T::zero(); disc.grid.n];
    for i in disc.grid.unknowns() {
        let (ul, ur) = disc.neighbours(u, i);
        w[i] = T::one() / (T::one() + disc.solver_terms(i, ul, u[i], ur).1);
    }
    w
}

fn solver_residual<T: Real>(disc: &Discretization<'_, T>, u: &[T]) -> Vec<T> {
    let mut r = vec![T::zero(); disc.grid.n];
    for i in disc.grid.unknowns() {
        let (ul, ur) = disc.neighbours(u, i);
        r[i] = disc.solver_terms(i, ul, u[i], ur).0;
    }
    r
}

fn merit<T: Real>(disc: &Discretization<'_, T>, u: &[T], w: &[T]) -> T {
    solver_residual(disc, u).iter().zip(w).fold(T::zero(), |s, (&r, &wi)| s + (r * wi) * (r * wi))
}

fn fd_step<T: Real>(v: T) -> T {
    T::lit(1e-6) * (T::one() + v.abs())
}

/// Tridiagonal Jacobian by finite differences of the local residual.
///
/// Central differences, except in rows where a perturbation could flip the sign
/// of the second difference: there the row is differenced one-sidedly in the
/// direction that keeps the sign, so a kinked operator contributes one branch.
fn jacobian<T: Real>(disc: &Discretization<'_, T>, u: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
    let n = disc.grid.n;
    let h = disc.grid.h;
    let (mut lower, mut diag, mut upper) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    let two = T::lit(2.0);
    let eps = disc.regularization();
    let kinked = disc.params.operator != OperatorKind::Trace && disc.params.a != disc.params.big_a;
    for i in disc.grid.unknowns() {
        let (ul, ur) = disc.neighbours(u, i);
        let uc = u[i];
        let r = |l: T, c: T, rr: T| disc.solver_terms(i, l, c, rr).0;
        let (sl, sr) = disc.slopes(i, ul, uc, ur);
        // With a gradient floor the residual varies on the slope scale `|s| + ε`,
        // which can be far finer than the magnitude of `u`.
        let fd_step = |v: T| {
            let e = fd_step(v);
            if eps > T::zero() {
                let local = T::lit(1e-5) * h * (sl.abs().max(sr.abs()) + eps) + T::lit(64.0) * T::epsilon() * (T::one() + v.abs());
                e.min(local)
            } else {
                e
            }
        };
        let reach = T::lit(2.5) * fd_step(ul).max(fd_step(uc)).max(fd_step(ur)) / h;
        let one_sided = kinked && (sr - sl).abs() <= reach;
        let s = if sr >= sl { T::one() } else { -T::one() };
        let r0 = if one_sided { r(ul, uc, ur) } else { T::zero() };
        // Derivative along the perturbation `(dl, dc, dr)·e`.
        let d = |dl: T, dc: T, dr: T, e: T| {
            if one_sided {
                let e = e * s;
                (r(ul + dl * e, uc + dc * e, ur + dr * e) - r0) / e
            } else {
                (r(ul + dl * e, uc + dc * e, ur + dr * e) - r(ul - dl * e, uc - dc * e, ur - dr * e)) / (two * e)
            }
        };
        let (z, o) = (T::zero(), T::one());
        diag[i] = -d(z, -o, z, fd_step(uc));
        if i == 0 {
            upper[i] = d(o, z, o, fd_step(ur));
            continue;
        }
        if !disc.grid.is_dirichlet(i - 1) {
            lower[i] = d(o, z, z, fd_step(ul));
        }
        if !disc.grid.is_dirichlet(i + 1) {
            upper[i] = d(z, z, o, fd_step(ur));
        }
    }
    (lower, diag, upper)
}

/// Thomas algorithm over the unknown range; `None` on a zero pivot.
fn thomas<T: Real>(range: std::ops::Range<usize>, lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Option<Vec<T>> {
    let n = rhs.len();
    let (s, e) = (range.start, range.end);
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    for i in s..e {
        let denom = if i == s { diag[i] } else { diag[i] - lower[i] * c[i - 1] };
        if denom == T::zero() || !denom.is_finite() {
            return None;
        }
        c[i] = upper[i] / denom;
        d[i] = if i == s { rhs[i] / denom } else { (rhs[i] - lower[i] * d[i - 1]) / denom };
    }
    let mut x = vec![T::zero(); n];
    for i in (s..e).rev() {
        x[i] = if i + 1 < e { d[i] - c[i] * x[i + 1] } else { d[i] };
    }
    Some(x)
}

fn newton_step<T: Real>(disc: &Discretization<'_, T>, u: &[T]) -> Option<(Vec<T>, T)> {
    let r = solver_residual(disc, u);
    let (lower, diag, upper) = jacobian(disc, u);
    let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
    let du = thomas(disc.grid.unknowns(), &lower, &diag, &upper, &rhs)?;
    if du.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let w = weights(disc, u);
    let m0 = merit(disc, u, &w);
    let mut t = T::one();
    let half = T::lit(0.5);
    for _ in 0..40 {
        let trial: Vec<T> = u.iter().zip(&du).map(|(&a, &b)| a + t * b).collect();
        let m1 = merit(disc, &trial, &w);
        if m1.is_finite() && m1 <= (T::one() - T::lit(1e-4) * t) * m0 {
            let nn = disc.scaled_residual_norm(&trial);
            return Some((trial, nn));
        }
        t = t * half;
    }
    None
}

/// Solves the scalar node equation with neighbours frozen.
fn scalar_solve<T: Real>(disc: &Discretization<'_, T>, i: usize, ul: T, u0: T, ur: T) -> T {
    let r = |x: T| disc.solver_terms(i, ul, x, ur).0;
    let r0 = r(u0);
    if r0 == T::zero() || !r0.is_finite() {
        return u0;
    }
    let dir = if r0 > T::zero() { -T::one() } else { T::one() };
    let mut step = T::one() + u0.abs() * T::lit(1e-3);
    let (mut a, mut ra) = (u0, r0);
    let mut b = u0;
    let mut rb = r0;
    let mut found = false;
    for _ in 0..200 {
        b = a + dir * step;
        rb = r(b);
        if !rb.is_finite() {
            return u0;
        }
        if rb.signum() != ra.signum() {
            found = true;
            break;
        }
        a = b;
        ra = rb;
        step = step * T::lit(2.0);
    }
    if !found {
        return u0;
    }
    // Illinois regula falsi on the bracket.
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * rb - b * ra) / (rb - ra);
        let rc = r(c);
        if rc == T::zero() || (b - a).abs() <= T::epsilon() * T::lit(4.0) * (T::one() + c.abs()) {
            return c;
        }
        if rc.signum() == rb.signum() {
            b = c;
            rb = rc;
            if side == -1 {
                ra = ra / T::lit(2.0);
            }
            side = -1;
        } else {
            a = c;
            ra = rc;
            if side == 1 {
                rb = rb / T::lit(2.0);
            }
            side = 1;
        }
    }
    (a + b) / T::lit(2.0)
}

/// Alternating nonlinear Gauss–Seidel sweeps; returns the sweep count.
fn gauss_seidel<T: Real>(disc: &Discretization<'_, T>, u: &mut [T], sweeps: usize) -> usize {
    let idx: Vec<usize> = disc.grid.unknowns().collect();
    for s in 0..sweeps {
        let order: Box<dyn Iterator<Item = &usize>> = if s % 2 == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &i in order {
            let (ul, ur) = disc.neighbours(u, i);
            u[i] = scalar_solve(disc, i, ul, u[i], ur);
        }
    }
    sweeps
}

/// Pseudo-transient continuation: Newton steps on `(u - u_old)/Δt + R(u) = 0`.
///
/// Steps are judged by the weighted merit frozen at the current iterate; `Δt`
/// follows the merit ratio and at least doubles after an accepted step.
/// Returns the steps taken.
fn continuation<T: Real>(disc: &Discretization<'_, T>, u: &mut Vec<T>, budget: usize, tol: T) -> usize {
    let range = disc.grid.unknowns();
    let (_, diag0, _) = jacobian(disc, u);
    let scale = range.clone().fold(T::zero(), |m, i| m.max(diag0[i].abs())).max(T::one());
    let mut inv_dt = scale;
    let mut steps = 0;
    while steps < budget {
        steps += 1;
        let r = solver_residual(disc, u);
        let w = weights(disc, u);
        let m0 = merit(disc, u, &w);
        let (lower, mut diag, upper) = jacobian(disc, u);
        for i in range.clone() {
            diag[i] = diag[i] + inv_dt;
        }
        let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        let Some(du) = thomas(range.clone(), &lower, &diag, &upper, &rhs) else {
            inv_dt = inv_dt * T::lit(4.0);
            continue;
        };
        let trial: Vec<T> = u.iter().zip(&du).map(|(&a, &b)| a + b).collect();
        let m1 = merit(disc, &trial, &w);
        if !m1.is_finite() || m1 > m0 {
            inv_dt = inv_dt * T::lit(4.0);
            if inv_dt > T::lit(1e30) * scale {
                break;
            }
            continue;
        }
        *u = trial;
        let ratio = if m0 > T::zero() { (m1 / m0).sqrt() } else { T::zero() };
        inv_dt = (inv_dt * ratio.min(T::lit(0.5))).max(T::lit(1e-12) * scale);
        if disc.scaled_residual_norm(u) <= tol || inv_dt <= T::lit(1e-8) * scale {
            break;
        }
    }
    steps
}

/// Boundary values of the explosive ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RSchedule<T> {
    /// First boundary value; `None` uses `max(1, |f|_∞^{1/(1+α)})`.
    pub r0: Option<T>,
    pub growth: T,
    pub max_rungs: usize,
    /// Settling uses nodes with `d ≥ d_cut_cells·h`.
    pub d_cut_cells: usize,
    pub tol_ladder: f64,
    pub tol_mono: f64,
}

impl<T: Real> Default for RSchedule<T> {
    fn default() -> Self {
        RSchedule { r0: None, growth: T::lit(2.0), max_rungs: 20, d_cut_cells: 10, tol_ladder: 1e-6, tol_mono: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RLadderReport<T> {
    pub r_values: Vec<T>,
    pub interior_deltas: Vec<T>,
    /// Smallest nodal increment `u_{R_{k+1}} - u_{R_k}` over all rung pairs.
    pub worst_increment: T,
    pub monotone_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplosiveSolution<T> {
    pub field: GridField<T>,
    pub ladder: RLadderReport<T>,
    pub report: SolveReport,
}

/// Minimal explosive solution as the limit of Dirichlet problems with data `R_k`.
pub fn solve_explosive<T: Real>(
    p: &ValidatedParams<T>,
    f: &Forcing<T>,
    grid: &Grid<T>,
    ladder: &RSchedule<T>,
    opts: &SolveOptions,
) -> Result<ExplosiveSolution<T>> {
    solve_explosive_from(p, f, grid, ladder, opts, None)
}

/// Bisections of the boundary step allowed when a rung fails from its predecessor.
const RUNG_SPLITS: usize = 6;

fn rung_disc<'a, T: Real>(p: &'a ValidatedParams<T>, grid: &'a Grid<T>, fv: &[T], r: T, opts: &SolveOptions) -> Discretization<'a, T> {
    let capped: Vec<T> = fv.iter().map(|&v| v.min(r)).collect();
    Discretization::new(p, grid, capped, opts.scheme)
}

/// Solves the rung with boundary value `r` from the converged rung at `r_old`,
/// halving the boundary step when the direct attempt fails.
#[allow(clippy::too_many_arguments)]
fn rung_from<T: Real>(
    p: &ValidatedParams<T>,
    grid: &Grid<T>,
    fv: &[T],
    r_old: T,
    r: T,
    start: Vec<T>,
    opts: &SolveOptions,
    splits: usize,
) -> Result<(Vec<T>, SolveReport)> {
    let disc = rung_disc(p, grid, fv, r, opts);
    let g = Boundary::uniform(&grid.dom, r);
    let first = if splits > 0 { SolveOptions { max_sweeps: (opts.max_sweeps / 4).max(20), ..*opts } } else { *opts };
    let (u, report) = solve_with(&disc, g, start.clone(), &first)?;
    if report.converged || splits == 0 {
        return Ok((u, report));
    }
    let mid = (r_old + r) / T::lit(2.0);
    let (um, rm) = rung_from(p, grid, fv, r_old, mid, start, opts, splits - 1)?;
    if !rm.converged {
        return Ok((um, rm));
    }
    let (u, report) = rung_from(p, grid, fv, mid, r, um, opts, splits - 1)?;
    let sweeps = report.sweeps + rm.sweeps;
    Ok((u, SolveReport { sweeps, ..report }))
}

/// As [`solve_explosive`], warm-started from `init` (whose boundary value becomes `R_0`).
pub fn solve_explosive_from<T: Real>(
    p: &ValidatedParams<T>,
    f: &Forcing<T>,
    grid: &Grid<T>,
    ladder: &RSchedule<T>,
    opts: &SolveOptions,
    init: Option<&GridField<T>>,
) -> Result<ExplosiveSolution<T>> {
    if !(p.lambda > T::zero()) {
        return Err(Error::Precondition("lambda > 0 for the explosive problem".into()));
    }
    let fv = sample_forcing(f, grid)?;
    let fmax = grid.unknowns().fold(T::zero(), |m, i| m.max(fv[i].abs()));
    let default_r0 = T::one().max(fmax.powf(T::one() / (T::one() + p.alpha)));
    let (mut r, mut prev) = match init {
        Some(fld) if fld.grid.n == grid.n => (fld.boundary.min_value().max(ladder.r0.unwrap_or(default_r0)), Some(fld.values.clone())),
        _ => (ladder.r0.unwrap_or(default_r0), None),
    };
    let d_cut = T::count(ladder.d_cut_cells) * grid.h;
    let mut rep = RLadderReport { r_values: Vec::new(), interior_deltas: Vec::new(), worst_increment: T::infinity(), monotone_ok: true };
    let mut last_rung: Option<Vec<T>> = None;
    for _ in 0..ladder.max_rungs {
        let g = Boundary::uniform(&grid.dom, r);
        let (u, report) = match (&prev, rep.r_values.last()) {
            (Some(start), Some(&r_old)) => rung_from(p, grid, &fv, r_old, r, start.clone(), opts, RUNG_SPLITS)?,
            (start, _) => {
                let start = start.clone().unwrap_or_else(|| vec![r; grid.n]);
                solve_with(&rung_disc(p, grid, &fv, r, opts), g, start, opts)?
            }
        };
        if !report.converged {
            return Err(Error::NotConverged(Box::new(report)));
        }
        rep.r_values.push(r);
        if let Some(old) = &last_rung {
            let mut delta = T::zero();
            for i in 0..grid.n {
                let inc = u[i] - old[i];
                rep.worst_increment = rep.worst_increment.min(inc);
                if grid.d_values[i] >= d_cut {
                    delta = delta.max(inc.abs());
                }
            }
            rep.interior_deltas.push(delta);
            if rep.worst_increment < -T::lit(ladder.tol_mono) {
                rep.monotone_ok = false;
            }
            if delta <= T::lit(ladder.tol_ladder) {
                let field = GridField::new(grid.clone(), u, g)?;
                return Ok(ExplosiveSolution { field, ladder: rep, report });
            }
        }
        last_rung = Some(u.clone());
        prev = Some(u);
        r = r * ladder.growth;
    }
    Err(Error::LadderNotSettled {
        rungs: rep.r_values.len(),
        last_delta: rep.interior_deltas.last().map(|v| v.as_f64()).unwrap_or(f64::INFINITY),
    })
}
