//! Ergodic constant by vanishing discount, along the explosive and Dirichlet paths.

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridField};
use crate::model::{Forcing, ValidatedParams};
use crate::num::{odd_pow, Real};
use crate::solve::{solve_dirichlet, solve_explosive_from, RSchedule, SolveOptions};

/// Strictly decreasing positive discounts.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSchedule<T> {
    pub values: Vec<T>,
}

impl<T: Real> LambdaSchedule<T> {
    /// `2^{-k}` for `k = 0..=k_max`.
    pub fn geometric(k_max: u32) -> Self {
        LambdaSchedule { values: (0..=k_max).map(|k| T::lit(2.0).powi(-(k as i32))).collect() }
    }

    fn validate(&self) -> Result<()> {
        let ok = !self.values.is_empty()
            && self.values.iter().all(|&l| l > T::zero() && l.is_finite())
            && self.values.windows(2).all(|w| w[1] < w[0]);
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition("a strictly decreasing positive lambda schedule".into()))
        }
    }
}

impl<T: Real> Default for LambdaSchedule<T> {
    fn default() -> Self {
        LambdaSchedule::geometric(12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    ErgodicRegime,
    DirichletSolvable,
    Undetermined,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::ErgodicRegime => "ergodic_regime",
            CaseTag::DirichletSolvable => "dirichlet_solvable",
            CaseTag::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicEstimate<T> {
    /// `(λ_k, c_k)`; on the Dirichlet path `c_k = λ_k (-min u)^{1+α}`.
    pub ladder: Vec<(T, T)>,
    pub c_extrapolated: Option<T>,
    /// Fitted rate in `c_k = c + K λ_k^θ`.
    pub theta: Option<T>,
    pub case_tag: CaseTag,
    pub probe_points: Vec<T>,
    /// Last solution minus its minimum.
    pub profile: GridField<T>,
    /// `min u_{λ_k}` per rung (Dirichlet path only).
    pub minima: Vec<T>,
}

impl<T: Real> ErgodicEstimate<T> {
    /// Extrapolated value, or the last rung when the fit was rejected.
    pub fn best(&self) -> Option<T> {
        self.c_extrapolated.or_else(|| match self.case_tag {
            CaseTag::Undetermined | CaseTag::DirichletSolvable => None,
            CaseTag::ErgodicRegime => self.ladder.last().map(|l| l.1),
        })
    }

    /// Gap between the extrapolated value and the last rung, a proxy for the estimate's error.
    pub fn spread(&self) -> T {
        match (self.c_extrapolated, self.ladder.last()) {
            (Some(c), Some(&(_, last))) => (c - last).abs(),
            _ => T::zero(),
        }
    }
}

/// Where `c_k` is sampled.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ProbeSpec<T> {
    /// Nodes with `d ≥ extent / 4`.
    #[default]
    Interior,
    /// Nodes nearest to the given coordinates.
    Points(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicOptions<T> {
    pub solve: SolveOptions,
    pub ladder: RSchedule<T>,
    pub probes: ProbeSpec<T>,
}

impl<T: Real> Default for ErgodicOptions<T> {
    fn default() -> Self {
        ErgodicOptions { solve: SolveOptions::default(), ladder: RSchedule::default(), probes: ProbeSpec::Interior }
    }
}

fn probe_indices<T: Real>(grid: &Grid<T>, spec: &ProbeSpec<T>) -> Result<Vec<usize>> {
    let idx: Vec<usize> = match spec {
        ProbeSpec::Interior => {
            let cut = grid.dom.extent() / T::lit(4.0);
            (0..grid.n).filter(|&i| grid.d_values[i] >= cut).collect()
        }
        ProbeSpec::Points(xs) => {
            let mut v = Vec::new();
            for &x in xs {
                grid.dom.distance(x)?;
                let (lo, _) = grid.dom.span();
                let k = ((x - lo) / grid.h).round().to_usize().unwrap_or(0).min(grid.n - 1);
                if grid.is_dirichlet(k) {
                    return Err(Error::Precondition(format!("probe {x} away from the boundary")));
                }
                v.push(k);
            }
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    if idx.is_empty() {
        return Err(Error::Precondition("at least one probe node".into()));
    }
    Ok(idx)
}

/// Fits `c_k = c + K λ_k^θ` through the last three rungs.
pub fn extrapolate<T: Real>(ladder: &[(T, T)]) -> Option<(T, T)> {
    if ladder.len() < 3 {
        return None;
    }
    let k = ladder.len();
    let (l1, c1) = ladder[k - 3];
    let (l2, c2) = ladder[k - 2];
    let (l3, c3) = ladder[k - 1];
    let (d1, d2) = (c1 - c2, c2 - c3);
    if d2 == T::zero() {
        return Some((c3, T::infinity()));
    }
    let rho = d1 / d2;
    if !(rho > T::one()) || !rho.is_finite() {
        return None;
    }
    let g = |th: T| (l1.powf(th) - l2.powf(th)) / (l2.powf(th) - l3.powf(th)) - rho;
    let (mut lo, mut hi) = (T::lit(1e-3), T::lit(4.0));
    if g(lo) > T::zero() || g(hi) < T::zero() {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if g(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let th = (lo + hi) / T::lit(2.0);
    let amp = d2 / (l2.powf(th) - l3.powf(th));
    Some((c3 - amp * l3.powf(th), th))
}

fn check_cauchy<T: Real>(ladder: &[(T, T)], tol: f64) -> Result<()> {
    if let Some(bad) = ladder.iter().find(|(_, c)| !c.is_finite()) {
        return Err(Error::LadderUnstable(format!("non-finite c at lambda = {}", bad.0)));
    }
    if ladder.len() >= 3 {
        let k = ladder.len();
        let d_prev = (ladder[k - 2].1 - ladder[k - 3].1).abs();
        let d_last = (ladder[k - 1].1 - ladder[k - 2].1).abs();
        let floor = T::lit(10.0 * tol) * (T::one() + ladder[k - 1].1.abs());
        // Converging ladders shrink increments geometrically; a doubling is divergence, not noise.
        if d_last > T::lit(2.0) * d_prev + floor {
            return Err(Error::LadderUnstable(format!("increments grow: {:e} then {:e}", d_prev.as_f64(), d_last.as_f64())));
        }
    }
    Ok(())
}

/// `c` as the limit of `-λ odd_pow(U_λ)` at interior probes, `U_λ` the explosive solution.
pub fn estimate_constant_explosive<T: Real>(
    p: &ValidatedParams<T>,
    f: &Forcing<T>,
    grid: &Grid<T>,
    sched: &LambdaSchedule<T>,
    opts: &ErgodicOptions<T>,
) -> Result<ErgodicEstimate<T>> {
    sched.validate()?;
    f.validate(p)?;
    let probes = probe_indices(grid, &opts.probes)?;
    let mut ladder = Vec::with_capacity(sched.values.len());
    let mut prev: Option<GridField<T>> = None;
    for &lambda in &sched.values {
        let pl = p.with_lambda(lambda)?;
        let sol = solve_explosive_from(&pl, f, grid, &opts.ladder, &opts.solve, prev.as_ref())?;
        let mean = probes.iter().fold(T::zero(), |s, &i| s + odd_pow(sol.field.values[i], p.alpha)) / T::count(probes.len());
        ladder.push((lambda, -lambda * mean));
        prev = Some(sol.field);
    }
    check_cauchy(&ladder, opts.solve.tol)?;
    let fit = extrapolate(&ladder);
    let last = prev.expect("nonempty schedule");
    Ok(ErgodicEstimate {
        c_extrapolated: Some(fit.map(|f| f.0).unwrap_or(ladder[ladder.len() - 1].1)),
        theta: fit.map(|f| f.1),
        ladder,
        case_tag: CaseTag::ErgodicRegime,
        probe_points: probes.iter().map(|&i| grid.nodes[i]).collect(),
        profile: normalized_profile(&last),
        minima: Vec::new(),
    })
}

/// Vanishing discount on the homogeneous Dirichlet problem with case detection.
pub fn estimate_constant_dirichlet<T: Real>(
    p: &ValidatedParams<T>,
    f: &Forcing<T>,
    grid: &Grid<T>,
    sched: &LambdaSchedule<T>,
    opts: &ErgodicOptions<T>,
) -> Result<ErgodicEstimate<T>> {
    sched.validate()?;
    f.validate(p)?;
    if !f.is_bounded() {
        return Err(Error::Precondition("bounded forcing (singular_kappa = 0) on the Dirichlet path".into()));
    }
    let probes = probe_indices(grid, &opts.probes)?;
    let g = Boundary::uniform(&grid.dom, T::zero());
    let mut ladder = Vec::new();
    let mut minima = Vec::new();
    let mut prev: Option<GridField<T>> = None;
    for &lambda in &sched.values {
        let pl = p.with_lambda(lambda)?;
        let (u, _) = solve_dirichlet(&pl, g, f, grid, prev.as_ref(), &opts.solve)?;
        let m = u.min();
        minima.push(m);
        ladder.push((lambda, lambda * (-m).max(T::zero()).powf(p.alpha + T::one())));
        prev = Some(u);
    }
    let stable = |k: usize| {
        let (a, b) = (minima[k - 1], minima[k]);
        (b - a).abs() < T::lit(1e-4) * (T::one() + b.abs())
    };
    let k = minima.len();
    let settled = k >= 3 && stable(k - 1) && stable(k - 2);
    let last = prev.expect("nonempty schedule");
    let mut est = ErgodicEstimate {
        ladder,
        c_extrapolated: None,
        theta: None,
        case_tag: CaseTag::Undetermined,
        probe_points: probes.iter().map(|&i| grid.nodes[i]).collect(),
        profile: normalized_profile(&last),
        minima,
    };
    if settled {
        est.case_tag = CaseTag::DirichletSolvable;
        return Ok(est);
    }
    check_cauchy(&est.ladder, opts.solve.tol)?;
    let s_last = est.ladder[k - 1].1;
    let contracting = k >= 3 && {
        let d1 = (est.ladder[k - 2].1 - est.ladder[k - 3].1).abs();
        let d2 = (s_last - est.ladder[k - 2].1).abs();
        d2 < d1 && d2 < T::lit(0.1) * s_last.abs()
    };
    if s_last > T::zero() && contracting {
        let fit = extrapolate(&est.ladder);
        est.c_extrapolated = Some(fit.map(|f| f.0).unwrap_or(s_last));
        est.theta = fit.map(|f| f.1);
        est.case_tag = CaseTag::ErgodicRegime;
    }
    Ok(est)
}

/// Subtracts the minimum nodal value.
pub fn normalized_profile<T: Real>(fld: &GridField<T>) -> GridField<T> {
    let m = fld.min();
    let values = fld.values.iter().map(|&v| v - m).collect();
    let boundary = match fld.boundary {
        Boundary::Dirichlet { lo, hi } => Boundary::Dirichlet { lo: lo - m, hi: hi - m },
        Boundary::DirichletRadial { outer } => Boundary::DirichletRadial { outer: outer - m },
    };
    GridField { grid: fld.grid.clone(), values, boundary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain1D;

    #[test]
    fn extrapolation_recovers_power_law() {
        let ladder: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let l = 0.5f64.powi(k);
                (l, -3.0 + 2.0 * l.powf(0.7))
            })
            .collect();
        let (c, th) = extrapolate(&ladder).unwrap();
        assert!((c + 3.0).abs() < 1e-10 && (th - 0.7).abs() < 1e-8);
    }

    #[test]
    fn extrapolation_rejects_non_contracting() {
        let ladder = vec![(1.0, 1.0), (0.5, 2.0), (0.25, 4.0)];
        assert!(extrapolate(&ladder).is_none());
    }

    #[test]
    fn normalized_profile_examples() {
        let g = Grid::new(Domain1D::interval(0.0, 1.0).unwrap(), 17).unwrap();
        let z = normalized_profile(&GridField::constant(g.clone(), 3.5));
        assert!(z.values.iter().all(|&v| v == 0.0));
        let fld = GridField::from_fn(g, Boundary::Dirichlet { lo: 1.0, hi: 1.0 }, |x: f64| (x - 0.25).powi(2)).unwrap();
        let z = normalized_profile(&fld);
        let (k, _) = fld.values.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
        assert_eq!(z.values[k], 0.0);
        assert_eq!(z.min(), 0.0);
    }

    #[test]
    fn schedule_validation() {
        let bad = LambdaSchedule { values: vec![0.5, 1.0] };
        assert!(bad.validate().is_err());
        assert_eq!(LambdaSchedule::<f64>::default().values.len(), 13);
    }
}
