//! Experiment configuration: TOML sections resolved into validated core types.

use std::path::Path;

use ergolab::ergodic::{ErgodicOptions, LambdaSchedule, ProbeSpec};
use ergolab::grid::{Boundary, DiffusionForm, Grid, HamiltonianFlux, Scheme};
use ergolab::model::{validate_params, Domain1D, EquationParams, Forcing, OperatorKind, RegularForcing};
use ergolab::solve::{RSchedule, SolveOptions};
use ergolab::{Error as CoreError, Validated};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl ConfigError {
    fn field(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Field { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub equation: EquationSection,
    #[serde(default)]
    pub domain: DomainSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub boundary: BoundarySection,
    #[serde(default)]
    pub lambda_schedule: LambdaSection,
    #[serde(default)]
    pub r_schedule: RSection,
    #[serde(default)]
    pub ergodic: ErgodicSection,
    #[serde(default)]
    pub rate: RateSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSection {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub big_a: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "trace")]
    pub operator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    /// `interval` or `ball`.
    pub kind: String,
    pub lo: f64,
    pub hi: f64,
    pub radius: f64,
    pub dim: usize,
}

impl Default for DomainSection {
    fn default() -> Self {
        DomainSection { kind: "interval".into(), lo: 0.0, hi: 1.0, radius: 1.0, dim: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingSection {
    /// `constant`, `polynomial` or `cosine`.
    pub kind: String,
    pub value: f64,
    pub coefficients: Vec<f64>,
    pub offset: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub singular_kappa: f64,
    pub singular_q: f64,
    pub gamma0: f64,
}

impl Default for ForcingSection {
    fn default() -> Self {
        ForcingSection {
            kind: "constant".into(),
            value: 0.0,
            coefficients: Vec::new(),
            offset: 0.0,
            amplitude: 0.0,
            frequency: 1.0,
            singular_kappa: 0.0,
            singular_q: 0.0,
            gamma0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { n: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol: f64,
    pub max_sweeps: usize,
    /// `blended` or `godunov`.
    pub flux: String,
    /// `flux` or `central_weight`.
    pub diffusion: String,
    pub boundary_slope_limit: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolveOptions::default();
        SolverSection {
            tol: d.tol,
            max_sweeps: d.max_sweeps,
            flux: "blended".into(),
            diffusion: "flux".into(),
            boundary_slope_limit: d.scheme.boundary_slope_limit,
        }
    }
}

/// Dirichlet data for `solve`; `outer` is used on balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub lo: f64,
    pub hi: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaSection {
    /// `λ_k = 2^{-k}` for `k = 0..=k_max`, unless `values` is given.
    pub k_max: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Default for LambdaSection {
    fn default() -> Self {
        LambdaSection { k_max: 12, values: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    pub growth: f64,
    pub max_rungs: usize,
    pub d_cut_cells: usize,
    pub tol_ladder: f64,
    pub tol_mono: f64,
}

impl Default for RSection {
    fn default() -> Self {
        let d = RSchedule::<f64>::default();
        RSection {
            r0: d.r0,
            growth: d.growth,
            max_rungs: d.max_rungs,
            d_cut_cells: d.d_cut_cells,
            tol_ladder: d.tol_ladder,
            tol_mono: d.tol_mono,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErgodicSection {
    /// `explosive` or `dirichlet`.
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<f64>>,
}

impl Default for ErgodicSection {
    fn default() -> Self {
        ErgodicSection { path: "explosive".into(), probes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_hi: Option<f64>,
    pub exponent_tol: f64,
    pub prefactor_tol: f64,
}

impl Default for RateSection {
    fn default() -> Self {
        RateSection { window_lo: None, window_hi: None, exponent_tol: 0.05, prefactor_tol: 0.1 }
    }
}

pub const ALL_CHECKS: [&str; 7] = ["residual", "ladder", "comparison", "gradient", "rate", "mu_star", "domain_monotonicity"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub checks: Vec<String>,
    /// Shift added to the boundary data and forcing of the upper comparison solve.
    pub comparison_shift: f64,
    /// Collar widths for the domain-monotonicity check.
    pub collar_deltas: Vec<f64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            checks: ALL_CHECKS.iter().map(|s| s.to_string()).collect(),
            comparison_shift: 0.5,
            collar_deltas: vec![0.1, 0.05, 0.02],
        }
    }
}

fn one() -> f64 {
    1.0
}

fn trace() -> String {
    "trace".into()
}

/// Config parsed into core types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: Validated,
    pub domain: Domain1D<f64>,
    pub forcing: Forcing<f64>,
    pub grid: Grid<f64>,
    pub solve: SolveOptions,
    pub boundary: Boundary<f64>,
    pub lambdas: LambdaSchedule<f64>,
    pub ladder: RSchedule<f64>,
    pub ergodic: ErgodicOptions<f64>,
    pub dirichlet_path: bool,
    pub window: Option<(f64, f64)>,
    /// Allowed error in the fitted exponent and relative error in the prefactor.
    pub rate_tols: (f64, f64),
    pub checks: Vec<String>,
    pub comparison_shift: f64,
    pub collar_deltas: Vec<f64>,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
    parse(&text, &path.display().to_string())
}

pub fn parse(text: &str, origin: &str) -> Result<ExperimentConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        ConfigError::Parse { path: origin.into(), line, column, message: e.message().trim().to_string() }
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |k| before.len() - k - 1) + 1;
    (line, column)
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let params = self.params()?;
        let domain = self.domain()?;
        let forcing = self.forcing()?;
        forcing.validate(&params).map_err(|e| ConfigError::field("forcing", e.to_string()))?;
        let grid = Grid::new(domain, self.grid.n).map_err(|e| ConfigError::field("grid.n", e.to_string()))?;
        let solve = self.solve_options()?;
        let boundary = match domain {
            Domain1D::Interval { .. } => Boundary::Dirichlet { lo: self.boundary.lo, hi: self.boundary.hi },
            Domain1D::Ball { .. } => Boundary::DirichletRadial { outer: self.boundary.outer },
        };
        let lambdas = self.lambdas()?;
        let ladder = self.ladder()?;
        let probes = match &self.ergodic.probes {
            None => ProbeSpec::Interior,
            Some(xs) if xs.is_empty() => return Err(ConfigError::field("ergodic.probes", "needs at least one point")),
            Some(xs) => ProbeSpec::Points(xs.clone()),
        };
        let dirichlet_path = match self.ergodic.path.as_str() {
            "explosive" => false,
            "dirichlet" => true,
            other => return Err(ConfigError::field("ergodic.path", format!("expected explosive or dirichlet, got {other:?}"))),
        };
        let window = match (self.rate.window_lo, self.rate.window_hi) {
            (None, None) => None,
            (Some(lo), Some(hi)) if lo > 0.0 && hi > lo => Some((lo, hi)),
            (Some(_), Some(_)) => return Err(ConfigError::field("rate.window_lo", "needs 0 < window_lo < window_hi")),
            (None, Some(_)) => return Err(ConfigError::field("rate.window_lo", "missing while window_hi is set")),
            (Some(_), None) => return Err(ConfigError::field("rate.window_hi", "missing while window_lo is set")),
        };
        for (name, v) in [("rate.exponent_tol", self.rate.exponent_tol), ("rate.prefactor_tol", self.rate.prefactor_tol)] {
            if !(v > 0.0) {
                return Err(ConfigError::field(name, "must be positive"));
            }
        }
        for c in &self.verify.checks {
            if !ALL_CHECKS.contains(&c.as_str()) {
                return Err(ConfigError::field("verify.checks", format!("unknown check {c:?}; known: {}", ALL_CHECKS.join(", "))));
            }
        }
        if !(self.verify.comparison_shift > 0.0) {
            return Err(ConfigError::field("verify.comparison_shift", "must be positive"));
        }
        Ok(Resolved {
            params,
            domain,
            forcing,
            grid,
            solve,
            boundary,
            lambdas,
            ladder,
            ergodic: ErgodicOptions { solve, ladder, probes },
            dirichlet_path,
            window,
            rate_tols: (self.rate.exponent_tol, self.rate.prefactor_tol),
            checks: self.verify.checks.clone(),
            comparison_shift: self.verify.comparison_shift,
            collar_deltas: self.verify.collar_deltas.clone(),
        })
    }

    fn params(&self) -> Result<Validated, ConfigError> {
        let e = &self.equation;
        let operator: OperatorKind = e.operator.parse().map_err(|_| {
            ConfigError::field("equation.operator", format!("expected trace, pucci_plus or pucci_minus, got {:?}", e.operator))
        })?;
        let p = EquationParams { alpha: e.alpha, beta: e.beta, a: e.a, big_a: e.big_a, lambda: e.lambda, operator };
        validate_params(p).map_err(|err| {
            let field = match err {
                CoreError::AlphaOutOfRange(_) => "equation.alpha",
                CoreError::BetaOutOfRange { .. } => "equation.beta",
                CoreError::NegativeLambda(_) => "equation.lambda",
                CoreError::BadEllipticity { .. } if !(e.a > 0.0) => "equation.a",
                CoreError::BadEllipticity { .. } | CoreError::TraceNeedsEqualConstants { .. } => "equation.big_a",
                _ => "equation",
            };
            ConfigError::field(field, err.to_string())
        })
    }

    fn domain(&self) -> Result<Domain1D<f64>, ConfigError> {
        let d = &self.domain;
        match d.kind.as_str() {
            "interval" => Domain1D::interval(d.lo, d.hi).map_err(|e| ConfigError::field("domain.hi", e.to_string())),
            "ball" => Domain1D::ball(d.radius, d.dim).map_err(|e| ConfigError::field("domain.radius", e.to_string())),
            other => Err(ConfigError::field("domain.kind", format!("expected interval or ball, got {other:?}"))),
        }
    }

    fn forcing(&self) -> Result<Forcing<f64>, ConfigError> {
        let f = &self.forcing;
        let regular = match f.kind.as_str() {
            "constant" => RegularForcing::Constant(f.value),
            "polynomial" if f.coefficients.is_empty() => {
                return Err(ConfigError::field("forcing.coefficients", "polynomial forcing needs coefficients"))
            }
            "polynomial" => RegularForcing::Polynomial(f.coefficients.clone()),
            "cosine" => RegularForcing::Cosine { offset: f.offset, amplitude: f.amplitude, frequency: f.frequency },
            other => return Err(ConfigError::field("forcing.kind", format!("expected constant, polynomial or cosine, got {other:?}"))),
        };
        Ok(Forcing { regular, singular_kappa: f.singular_kappa, singular_q: f.singular_q, gamma0: f.gamma0 })
    }

    fn solve_options(&self) -> Result<SolveOptions, ConfigError> {
        let s = &self.solver;
        if !(s.tol > 0.0) {
            return Err(ConfigError::field("solver.tol", "must be positive"));
        }
        if s.max_sweeps == 0 {
            return Err(ConfigError::field("solver.max_sweeps", "must be at least 1"));
        }
        let flux = match s.flux.as_str() {
            "blended" => HamiltonianFlux::Blended,
            "godunov" => HamiltonianFlux::Godunov,
            other => return Err(ConfigError::field("solver.flux", format!("expected blended or godunov, got {other:?}"))),
        };
        let diffusion = match s.diffusion.as_str() {
            "flux" => DiffusionForm::Flux,
            "central_weight" => DiffusionForm::CentralWeight,
            other => return Err(ConfigError::field("solver.diffusion", format!("expected flux or central_weight, got {other:?}"))),
        };
        let scheme = Scheme { flux, diffusion, boundary_slope_limit: s.boundary_slope_limit };
        Ok(SolveOptions { tol: s.tol, max_sweeps: s.max_sweeps, scheme })
    }

    fn lambdas(&self) -> Result<LambdaSchedule<f64>, ConfigError> {
        let values = match &self.lambda_schedule.values {
            Some(v) => v.clone(),
            None => LambdaSchedule::<f64>::geometric(self.lambda_schedule.k_max).values,
        };
        let ok = !values.is_empty() && values.iter().all(|&l| l > 0.0 && l.is_finite()) && values.windows(2).all(|w| w[1] < w[0]);
        if !ok {
            return Err(ConfigError::field("lambda_schedule.values", "must be positive and strictly decreasing"));
        }
        Ok(LambdaSchedule { values })
    }

    fn ladder(&self) -> Result<RSchedule<f64>, ConfigError> {
        let r = &self.r_schedule;
        if !(r.growth > 1.0) {
            return Err(ConfigError::field("r_schedule.growth", "must exceed 1"));
        }
        if r.max_rungs < 2 {
            return Err(ConfigError::field("r_schedule.max_rungs", "must be at least 2"));
        }
        if let Some(r0) = r.r0 {
            if !(r0.is_finite()) {
                return Err(ConfigError::field("r_schedule.r0", "must be finite"));
            }
        }
        Ok(RSchedule {
            r0: r.r0,
            growth: r.growth,
            max_rungs: r.max_rungs,
            d_cut_cells: r.d_cut_cells,
            tol_ladder: r.tol_ladder,
            tol_mono: r.tol_mono,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[equation]\nalpha = 0.0\nbeta = 1.5\n";

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = parse(MINIMAL, "t").unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.grid.n, 401);
        assert_eq!(r.lambdas.values.len(), 13);
        assert!(!r.dirichlet_path);
    }

    #[test]
    fn beta_error_names_the_field() {
        let cfg = parse("[equation]\nalpha = 0.0\nbeta = 1.0\n", "t").unwrap();
        let err = cfg.resolve().unwrap_err().to_string();
        assert!(err.contains("equation.beta"), "{err}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse("[equation]\nalpha = 0.0\nbeta = 1.5\ngamma = 2\n", "cfg.toml").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn bad_operator_and_domain() {
        let cfg = parse("[equation]\nalpha = 0.0\nbeta = 1.5\noperator = \"laplace\"\n", "t").unwrap();
        assert!(cfg.resolve().unwrap_err().to_string().contains("equation.operator"));
        let cfg = parse(&format!("{MINIMAL}[domain]\nkind = \"square\"\n"), "t").unwrap();
        assert!(cfg.resolve().unwrap_err().to_string().contains("domain.kind"));
    }

    #[test]
    fn toml_round_trip_is_identity() {
        let text = format!("{MINIMAL}[forcing]\nkind = \"cosine\"\noffset = -1.0\namplitude = 0.5\nfrequency = 3.0\n[rate]\nwindow_lo = 0.01\nwindow_hi = 0.1\n");
        let cfg = parse(&text, "t").unwrap();
        let again = parse(&cfg.to_toml(), "t").unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn half_open_window_is_rejected() {
        let cfg = parse(&format!("{MINIMAL}[rate]\nwindow_hi = 0.1\n"), "t").unwrap();
        assert!(cfg.resolve().unwrap_err().to_string().contains("rate.window_lo"));
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
