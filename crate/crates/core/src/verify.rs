//! Checks that turn solver output into pass/fail reports.

use crate::barriers::{check_inequality, BarrierSpec, Region, Side};
use crate::ergodic::{estimate_constant_explosive, ErgodicEstimate, ErgodicOptions, LambdaSchedule};
use crate::error::{Error, Result};
use crate::grid::{sample_forcing, Grid, GridField};
use crate::model::{Domain1D, Exponents, Forcing, ValidatedParams};
use crate::num::Real;
use crate::solve::SolveReport;

/// Fit window in cells (lower end) and as a fraction of the extent (upper end).
pub const WINDOW_CELLS: f64 = 5.0;
pub const WINDOW_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit<T> {
    pub window: (T, T),
    /// Slope of `log(u(d) - u(2d))` against `log d`; for `γ = 0` the slope of `u` against `|log d|`.
    pub fitted_exponent: T,
    /// `K` in `u ≈ K d^{-k} + B` (or `u ≈ K |log d| + B`).
    pub fitted_prefactor: T,
    /// Mean of `u - K d^{-k}` over the window (or the intercept for `γ = 0`).
    pub offset: T,
    pub r_squared: T,
    pub nodes_used: usize,
    /// `fitted_prefactor / C`.
    pub prefactor_ratio: T,
    /// Slope and prefactor of the raw regression of `log u` on `log d`.
    pub raw_loglog: (T, T),
}

fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = T::count(xs.len());
    let mx = xs.iter().fold(T::zero(), |s, &x| s + x) / n;
    let my = ys.iter().fold(T::zero(), |s, &y| s + y) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == T::zero() { T::one() } else { (sxy * sxy / (sxx * syy)).min(T::one()).max(T::zero()) };
    (slope, intercept, r2)
}

/// Node at twice the distance of node `i`, on the same side of the domain.
fn doubled<T: Real>(grid: &Grid<T>, i: usize) -> Option<usize> {
    let last = grid.n - 1;
    let j = match grid.dom {
        Domain1D::Interval { .. } if 2 * i <= last / 2 => 2 * i,
        _ => {
            let m = last - i;
            last.checked_sub(2 * m)?
        }
    };
    let target = grid.d_values[i] + grid.d_values[i];
    ((grid.d_values[j] - target).abs() <= T::lit(1e-9) * target).then_some(j)
}

/// Fits the boundary blow-up on nodes with `5h ≤ d ≤ 0.05·extent`.
///
/// For `γ > 0` the increment `u(d) - u(2d) = K(1 - 2^{-k}) d^{-k}` is regressed in
/// log-log form, which removes the additive constant carried by solutions of the
/// discounted problem.
pub fn fit_boundary_rate<T: Real>(fld: &GridField<T>, e: &Exponents<T>, c: T) -> Result<RateFit<T>> {
    let window = (T::lit(WINDOW_CELLS) * fld.grid.h, T::lit(WINDOW_FRACTION) * fld.grid.dom.extent());
    fit_boundary_rate_in(fld, e, c, window)
}

/// [`fit_boundary_rate`] over an explicit distance window `[d_lo, d_hi]`.
pub fn fit_boundary_rate_in<T: Real>(fld: &GridField<T>, e: &Exponents<T>, c: T, window: (T, T)) -> Result<RateFit<T>> {
    let grid = &fld.grid;
    if !(window.0 > T::zero() && window.1.is_finite()) {
        return Err(Error::Precondition("fit window needs 0 < d_lo and a finite d_hi".into()));
    }
    let nodes: Vec<usize> = grid.unknowns().filter(|&i| grid.d_values[i] >= window.0 && grid.d_values[i] <= window.1).collect();
    if nodes.len() < 4 {
        return Err(Error::WindowTooNarrow(nodes.len()));
    }
    let ds: Vec<T> = nodes.iter().map(|&i| grid.d_values[i]).collect();
    let us: Vec<T> = nodes.iter().map(|&i| fld.values[i]).collect();
    if e.gamma == T::zero() {
        let lx: Vec<T> = ds.iter().map(|d| d.ln().abs()).collect();
        let (slope, intercept, r2) = linear_fit(&lx, &us);
        return Ok(RateFit {
            window,
            fitted_exponent: slope,
            fitted_prefactor: slope,
            offset: intercept,
            r_squared: r2,
            nodes_used: nodes.len(),
            prefactor_ratio: slope / c,
            raw_loglog: (T::nan(), T::nan()),
        });
    }
    let raw_loglog = if us.iter().all(|&u| u > T::zero()) {
        let lx: Vec<T> = ds.iter().map(|d| d.ln()).collect();
        let ly: Vec<T> = us.iter().map(|u| u.ln()).collect();
        let (s, b, _) = linear_fit(&lx, &ly);
        (s, b.exp())
    } else {
        (T::nan(), T::nan())
    };
    let mut lx = Vec::with_capacity(nodes.len());
    let mut ly = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let inc = doubled(grid, i).map(|j| fld.values[i] - fld.values[j]);
        match inc {
            Some(v) if v > T::zero() => {
                lx.push(grid.d_values[i].ln());
                ly.push(v.ln());
            }
            Some(_) => return Err(Error::Precondition("values decreasing towards the boundary".into())),
            None => {}
        }
    }
    if lx.len() < 4 {
        return Err(Error::WindowTooNarrow(lx.len()));
    }
    let (slope, intercept, r2) = linear_fit(&lx, &ly);
    let k = -slope;
    let pre = intercept.exp() / (T::one() - T::lit(2.0).powf(-k));
    let offset = ds.iter().zip(&us).fold(T::zero(), |s, (&d, &u)| s + u - pre * d.powf(-k)) / T::count(ds.len());
    Ok(RateFit {
        window,
        fitted_exponent: slope,
        fitted_prefactor: pre,
        offset,
        r_squared: r2,
        nodes_used: lx.len(),
        prefactor_ratio: pre / c,
        raw_loglog,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport<T> {
    /// `Q(h)` per field, coarse to fine.
    pub q: Vec<T>,
    /// `Q(h/2)/Q(h)` per consecutive pair.
    pub ratios: Vec<T>,
    pub passed: bool,
}

pub const GRADIENT_RATIO_MAX: f64 = 1.2;

/// `Q(h) = max |central gradient|·d^{grad_rate}` over nodes whose stencil is interior.
pub fn gradient_weighted_max<T: Real>(fld: &GridField<T>, grad_rate: T) -> T {
    let g = &fld.grid;
    let u = &fld.values;
    let two_h = g.h + g.h;
    g.unknowns()
        .filter(|&i| i > 0 && i + 1 < g.n && !g.is_dirichlet(i - 1) && !g.is_dirichlet(i + 1))
        .fold(T::zero(), |q, i| q.max(((u[i + 1] - u[i - 1]) / two_h).abs() * g.d_values[i].powf(grad_rate)))
}

/// Compares `Q` across successive refinements.
pub fn check_gradient_bound<T: Real>(flds: &[GridField<T>], grad_rate: T) -> Result<GradientReport<T>> {
    if flds.len() < 2 {
        return Err(Error::Precondition("at least two refinements".into()));
    }
    if flds.windows(2).any(|w| w[0].grid.dom != w[1].grid.dom || !(w[1].grid.h < w[0].grid.h)) {
        return Err(Error::Precondition("fields on one domain, ordered coarse to fine".into()));
    }
    let q: Vec<T> = flds.iter().map(|f| gradient_weighted_max(f, grad_rate)).collect();
    let ratios: Vec<T> = q.windows(2).map(|w| if w[1] == T::zero() { T::zero() } else { w[1] / w[0] }).collect();
    let passed = q.iter().all(|v| v.is_finite()) && ratios.iter().all(|r| r.is_finite() && *r <= T::lit(GRADIENT_RATIO_MAX));
    Ok(GradientReport { q, ratios, passed })
}

/// A converged Dirichlet solve entering a comparison.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonSide<'a, T> {
    pub field: &'a GridField<T>,
    pub forcing: &'a Forcing<T>,
    pub report: &'a SolveReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    /// `max (u_lower - u_upper)` over all nodes.
    pub worst_violation: T,
    pub worst_at: T,
    pub tolerance: T,
    pub passed: bool,
}

pub const COMPARISON_SLACK: f64 = 1e-6;

/// Checks `u_lower ≤ u_upper` when the lower side has smaller boundary data and smaller forcing.
pub fn check_comparison<T: Real>(
    p: &ValidatedParams<T>,
    lower: ComparisonSide<'_, T>,
    upper: ComparisonSide<'_, T>,
) -> Result<ComparisonReport<T>> {
    let grid = &lower.field.grid;
    if grid.dom != upper.field.grid.dom || grid.n != upper.field.grid.n {
        return Err(Error::Precondition("comparison needs one grid".into()));
    }
    if !lower.report.converged || !upper.report.converged {
        return Err(Error::Precondition("both solves converged".into()));
    }
    if !lower.field.boundary.le(&upper.field.boundary) {
        return Err(Error::HypothesisUnmet("boundary data not ordered".into()));
    }
    let fl = sample_forcing(lower.forcing, grid)?;
    let fu = sample_forcing(upper.forcing, grid)?;
    let interior: Vec<usize> = grid.unknowns().collect();
    let gap = interior.iter().fold(T::infinity(), |m, &i| m.min(fu[i] - fl[i]));
    if gap < T::zero() {
        return Err(Error::HypothesisUnmet("forcing not ordered".into()));
    }
    if p.lambda == T::zero() && gap == T::zero() {
        let sup_f = interior.iter().fold(T::neg_infinity(), |m, &i| m.max(fl[i]).max(fu[i]));
        if p.alpha != T::zero() && !(sup_f < T::zero()) {
            return Err(Error::HypothesisUnmet("lambda = 0 with equal forcing and alpha != 0 needs f <= -m < 0".into()));
        }
    }
    let tolerance = T::lit(COMPARISON_SLACK + lower.report.final_residual + upper.report.final_residual);
    let (mut worst, mut at) = (T::neg_infinity(), grid.nodes[0]);
    for i in 0..grid.n {
        let v = lower.field.values[i] - upper.field.values[i];
        if v > worst {
            worst = v;
            at = grid.nodes[i];
        }
    }
    Ok(ComparisonReport { worst_violation: worst, worst_at: at, tolerance, passed: worst <= tolerance })
}

/// Sample count for [`mu_star_upper_bound`].
pub const MU_STAR_POINTS: usize = 20001;

/// `max (G(φ_test) - f)` over the interval with `λ = 0`, an upper bound for the ergodic constant.
pub fn mu_star_upper_bound<T: Real>(p: &ValidatedParams<T>, dom: &Domain1D<T>, f: &Forcing<T>) -> Result<T> {
    let Domain1D::Interval { lo, hi } = *dom else {
        return Err(Error::Precondition("interval domain".into()));
    };
    let p0 = p.with_lambda(T::zero())?;
    let spec = BarrierSpec::mu_star_test(&p0, hi - lo)?;
    let rep = check_inequality(&spec, &p0, dom, f, T::zero(), Side::Sub, &Region::Coordinates { lo, hi }, MU_STAR_POINTS)?;
    Ok(rep.worst_margin)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<T> {
    pub domains: Vec<Domain1D<T>>,
    pub estimates: Vec<ErgodicEstimate<T>>,
    pub constants: Vec<T>,
    /// Per-estimate tolerance: extrapolation spread plus solver slack.
    pub tolerances: Vec<T>,
    pub nondecreasing: bool,
    /// Strict increase beyond three combined tolerances, where the strict statement applies.
    pub strict: Option<bool>,
}

/// Inner approximations `{d > δ}` of `dom`, largest `δ` first.
pub fn collar_family<T: Real>(dom: &Domain1D<T>, deltas: &[T]) -> Result<Vec<Domain1D<T>>> {
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    ds.iter().map(|&d| dom.inner(d)).collect()
}

/// Ergodic constants on nested domains (smallest first), solved concurrently.
pub fn domain_monotonicity<T: Real>(
    p: &ValidatedParams<T>,
    f: &Forcing<T>,
    domains: &[Domain1D<T>],
    n: usize,
    sched: &LambdaSchedule<T>,
    opts: &ErgodicOptions<T>,
) -> Result<MonotonicityReport<T>> {
    if domains.len() < 2 {
        return Err(Error::Precondition("at least two domains".into()));
    }
    for w in domains.windows(2) {
        if !w[1].contains(&w[0]) {
            return Err(Error::Precondition("domains must be nested, smallest first".into()));
        }
    }
    let results: Vec<Result<ErgodicEstimate<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = domains
            .iter()
            .map(|dom| {
                s.spawn(move || {
                    let grid = Grid::new(*dom, n)?;
                    estimate_constant_explosive(p, f, &grid, sched, opts)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("estimator thread panicked")).collect()
    });
    let estimates = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut constants = Vec::with_capacity(estimates.len());
    let mut tolerances = Vec::with_capacity(estimates.len());
    for est in &estimates {
        let c = est.best().ok_or_else(|| Error::Precondition("estimate without a constant".into()))?;
        constants.push(c);
        tolerances.push(est.spread() + T::lit(opts.solve.tol.max(1e-6)) * (T::one() + c.abs()));
    }
    let pairs = || (0..constants.len() - 1).map(|i| (constants[i + 1] - constants[i], tolerances[i] + tolerances[i + 1]));
    let nondecreasing = pairs().all(|(diff, tol)| diff >= -tol);
    let sup_f = domains
        .iter()
        .map(|dom| Grid::new(*dom, n).and_then(|g| sample_forcing(f, &g)).map(|v| v.into_iter().fold(T::neg_infinity(), T::max)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(T::neg_infinity(), T::max);
    let strictly_nested = domains.windows(2).all(|w| w[0] != w[1]);
    let applies = strictly_nested && (p.alpha == T::zero() || constants.iter().all(|&c| sup_f + c < T::zero()));
    let strict = applies.then(|| pairs().all(|(diff, tol)| diff > T::lit(3.0) * tol));
    Ok(MonotonicityReport { domains: domains.to_vec(), estimates, constants, tolerances, nondecreasing, strict })
}
