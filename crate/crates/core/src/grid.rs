//! Uniform interval/radial grids and the discrete operator.

use crate::error::{Error, Result};
use crate::model::{Domain1D, Forcing, ValidatedParams};
use crate::num::{odd_pow, pos, Real};

/// Uniform grid over the coordinate span of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub dom: Domain1D<T>,
    pub n: usize,
    pub h: T,
    pub nodes: Vec<T>,
    pub d_values: Vec<T>,
}

impl<T: Real> Grid<T> {
    pub fn new(dom: Domain1D<T>, n: usize) -> Result<Self> {
        dom.validate()?;
        if n < 16 {
            return Err(Error::GridTooCoarse(n));
        }
        let (lo, hi) = dom.span();
        let h = (hi - lo) / T::count(n - 1);
        let nodes: Vec<T> = (0..n).map(|i| if i == n - 1 { hi } else { lo + T::count(i) * h }).collect();
        let d_values = nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| match dom {
                Domain1D::Interval { .. } if i == 0 || i == n - 1 => T::zero(),
                Domain1D::Interval { .. } => {
                    // Distances from index arithmetic keep mirrored nodes bit-symmetric.
                    let k = i.min(n - 1 - i);
                    T::count(k) * h
                }
                Domain1D::Ball { radius, .. } => {
                    if i == n - 1 {
                        T::zero()
                    } else {
                        let _ = x;
                        radius - T::count(i) * h
                    }
                }
            })
            .collect();
        Ok(Grid { dom, n, h, nodes, d_values })
    }

    /// Halves the spacing; every old node survives.
    pub fn refine(&self) -> Self {
        Grid::new(self.dom, 2 * self.n - 1).expect("refinement of a valid grid")
    }

    pub fn is_dirichlet(&self, i: usize) -> bool {
        match self.dom {
            Domain1D::Interval { .. } => i == 0 || i + 1 == self.n,
            Domain1D::Ball { .. } => i + 1 == self.n,
        }
    }

    /// Indices where the equation is assembled.
    pub fn unknowns(&self) -> std::ops::Range<usize> {
        match self.dom {
            Domain1D::Interval { .. } => 1..self.n - 1,
            Domain1D::Ball { .. } => 0..self.n - 1,
        }
    }
}

/// Constant Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary<T> {
    Dirichlet { lo: T, hi: T },
    DirichletRadial { outer: T },
}

impl<T: Real> Boundary<T> {
    /// The same constant on every boundary node of `dom`.
    pub fn uniform(dom: &Domain1D<T>, g: T) -> Self {
        match dom {
            Domain1D::Interval { .. } => Boundary::Dirichlet { lo: g, hi: g },
            Domain1D::Ball { .. } => Boundary::DirichletRadial { outer: g },
        }
    }

    fn fits(&self, dom: &Domain1D<T>) -> bool {
        matches!(
            (self, dom),
            (Boundary::Dirichlet { .. }, Domain1D::Interval { .. }) | (Boundary::DirichletRadial { .. }, Domain1D::Ball { .. })
        )
    }

    fn values(&self) -> (T, T) {
        match *self {
            Boundary::Dirichlet { lo, hi } => (lo, hi),
            Boundary::DirichletRadial { outer } => (outer, outer),
        }
    }

    /// Smallest boundary value.
    pub fn min_value(&self) -> T {
        let (a, b) = self.values();
        a.min(b)
    }

    /// Whether every boundary value of `self` is at most the matching one of `other`.
    pub fn le(&self, other: &Self) -> bool {
        let (a, b) = self.values();
        let (c, d) = other.values();
        a <= c && b <= d
    }
}

/// Nodal values together with the boundary record they honour.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub boundary: Boundary<T>,
}

impl<T: Real> GridField<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>, boundary: Boundary<T>) -> Result<Self> {
        if values.len() != grid.n || !boundary.fits(&grid.dom) {
            return Err(Error::BoundaryMismatch);
        }
        let fld = GridField { grid, values, boundary };
        let (lo, hi) = fld.boundary.values();
        let ok = match fld.grid.dom {
            Domain1D::Interval { .. } => fld.values[0] == lo && fld.values[fld.grid.n - 1] == hi,
            Domain1D::Ball { .. } => fld.values[fld.grid.n - 1] == hi,
        };
        if ok {
            Ok(fld)
        } else {
            Err(Error::BoundaryMismatch)
        }
    }

    /// Samples `u` at every node; boundary nodes take the boundary record.
    pub fn from_fn(grid: Grid<T>, boundary: Boundary<T>, u: impl Fn(T) -> T) -> Result<Self> {
        let mut values: Vec<T> = grid.nodes.iter().map(|&x| u(x)).collect();
        let (lo, hi) = boundary.values();
        if let Domain1D::Interval { .. } = grid.dom {
            values[0] = lo;
        }
        let last = grid.n - 1;
        values[last] = hi;
        GridField::new(grid, values, boundary)
    }

    pub fn constant(grid: Grid<T>, g: T) -> Self {
        let boundary = Boundary::uniform(&grid.dom, g);
        let values = vec![g; grid.n];
        GridField { grid, values, boundary }
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &v| m.min(v))
    }
}

/// Upwinding of `|u'|^β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianFlux {
    /// `max(max(Dᵇu, 0), max(-Dᶠu, 0))^β`.
    Godunov,
    /// Godunov on slopes shifted toward the centre by the local cell Péclet weight;
    /// central wherever diffusion resolves the cell.
    Blended,
}

/// Discretization of `|u'|^α F(u'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionForm {
    /// `max(|p̄|, ε)^α F(m)` with the central gradient `p̄`.
    CentralWeight,
    /// `F((φ(Dᶠu) - φ(Dᵇu)) / ((α+1)h))` with `φ(s) = (s² + ε²)^{α/2} s`, monotone for every `α > -1`.
    Flux,
}

/// Discretization options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scheme {
    pub flux: HamiltonianFlux,
    pub diffusion: DiffusionForm,
    /// Caps the slope into a Dirichlet node lying above the interior at the
    /// boundary-layer slope at half a cell.
    pub boundary_slope_limit: bool,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme { flux: HamiltonianFlux::Blended, diffusion: DiffusionForm::Flux, boundary_slope_limit: true }
    }
}

impl Scheme {
    pub fn godunov() -> Self {
        Scheme { flux: HamiltonianFlux::Godunov, ..Scheme::default() }
    }
}

/// Forcing sampled at the assembled nodes; boundary entries are zero and never read.
pub fn sample_forcing<T: Real>(f: &Forcing<T>, grid: &Grid<T>) -> Result<Vec<T>> {
    (0..grid.n).map(|i| if grid.is_dirichlet(i) { Ok(T::zero()) } else { f.eval_with_distance(grid.nodes[i], grid.d_values[i]) }).collect()
}

/// Pieces of the residual at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTerms<T> {
    /// Regularized gradient weight `|p̄|^α` multiplying `F`.
    pub weight: T,
    pub diffusion: T,
    pub hamiltonian: T,
    pub zero_order: T,
    pub forcing: T,
    /// Bound on the rounding error committed while assembling the residual.
    pub rounding: T,
}

impl<T: Real> NodeTerms<T> {
    pub fn residual(&self) -> T {
        -self.diffusion + self.hamiltonian + self.zero_order - self.forcing
    }

    /// Magnitude used to scale the residual.
    pub fn scale(&self) -> T {
        self.diffusion.abs() + self.hamiltonian + self.zero_order.abs() + self.forcing.abs()
    }

    /// `max(|r| - rounding, 0) / (1 + scale)`.
    pub fn scaled(&self) -> T {
        pos(self.residual().abs() - self.rounding) / (T::one() + self.scale())
    }
}

/// A discrete operator bound to parameters, grid, forcing and scheme.
#[derive(Debug, Clone)]
pub struct Discretization<'a, T> {
    pub params: &'a ValidatedParams<T>,
    pub grid: &'a Grid<T>,
    pub forcing: Vec<T>,
    pub scheme: Scheme,
    eps: T,
    slope_cap: T,
    c_f: T,
}

impl<'a, T: Real> Discretization<'a, T> {
    pub fn new(params: &'a ValidatedParams<T>, grid: &'a Grid<T>, forcing: Vec<T>, scheme: Scheme) -> Self {
        let gap = params.beta - params.alpha - T::one();
        let c_f = params.rank_one_value();
        let half = grid.h / T::lit(2.0);
        let slope_cap = if scheme.boundary_slope_limit { (gap * half / c_f).powf(-T::one() / gap) } else { T::infinity() };
        let eps = if params.alpha < T::zero() { grid.h } else { T::zero() };
        Discretization { params, grid, forcing, scheme, eps, slope_cap, c_f }
    }

    pub fn slope_cap(&self) -> T {
        self.slope_cap
    }

    /// Gradient floor `ε` in the weight `max(|p̄|, ε)^α`, or in `φ` for the flux form.
    pub fn regularization(&self) -> T {
        self.eps
    }

    /// Same operator with another gradient floor (used for continuation).
    pub fn with_regularization(&self, eps: T) -> Self {
        Discretization { eps, ..self.clone() }
    }

    /// Backward and forward slopes at node `i`, limited next to Dirichlet nodes.
    pub fn slopes(&self, i: usize, ul: T, uc: T, ur: T) -> (T, T) {
        let h = self.grid.h;
        let mut sl = (uc - ul) / h;
        let mut sr = (ur - uc) / h;
        if i >= 1 && self.grid.is_dirichlet(i - 1) {
            sl = sl.max(-self.slope_cap);
        }
        if self.grid.is_dirichlet(i + 1) {
            sr = sr.min(self.slope_cap);
        }
        (sl, sr)
    }

    /// Neighbour values of node `i`, reflecting through the ball centre.
    pub fn neighbours(&self, u: &[T], i: usize) -> (T, T) {
        if i == 0 {
            (u[1], u[1])
        } else {
            (u[i - 1], u[i + 1])
        }
    }

    pub fn terms(&self, i: usize, ul: T, uc: T, ur: T) -> NodeTerms<T> {
        let p = self.params;
        let h = self.grid.h;
        let (sl, sr) = self.slopes(i, ul, uc, ur);
        let pc = (sl + sr) / T::lit(2.0);
        let m = (sr - sl) / h;
        let mult = self.grid.dom.tangential_mult();
        let t = match self.grid.dom {
            Domain1D::Ball { .. } if i == 0 => m,
            Domain1D::Ball { .. } => pc / self.grid.nodes[i],
            Domain1D::Interval { .. } => T::zero(),
        };
        let one = T::one();
        let (coef, diffusion, diff_round) = match self.scheme.diffusion {
            DiffusionForm::CentralWeight => {
                let coef = if p.alpha == T::zero() { one } else { pc.abs().max(self.eps).powf(p.alpha) };
                let fv = p.f_op(m, t, mult);
                let diffusion = if fv == T::zero() { T::zero() } else { coef * fv };
                let mag = ul.abs() + uc.abs() + uc.abs() + ur.abs();
                (coef, diffusion, coef * p.big_a * T::count(1 + mult) * mag / (h * h))
            }
            DiffusionForm::Flux => {
                let ap1 = p.alpha + one;
                let phi = |v: T| {
                    if self.eps > T::zero() {
                        (v * v + self.eps * self.eps).powf(p.alpha / T::lit(2.0)) * v
                    } else {
                        odd_pow(v, p.alpha)
                    }
                };
                let (pl, pr) = (phi(sl), phi(sr));
                let mw = (pr - pl) / (ap1 * h);
                let tw = match self.grid.dom {
                    Domain1D::Ball { .. } if i == 0 => mw,
                    Domain1D::Ball { .. } => phi(pc) / self.grid.nodes[i],
                    Domain1D::Interval { .. } => T::zero(),
                };
                // Secant slope of φ/(α+1): the effective diffusivity of this stencil.
                let dphi = |v: T| {
                    if self.eps > T::zero() {
                        let q = v * v + self.eps * self.eps;
                        q.powf(p.alpha / T::lit(2.0) - one) * (ap1 * v * v + self.eps * self.eps) / ap1
                    } else {
                        v.abs().powf(p.alpha)
                    }
                };
                let coef = if sr != sl { mw / m } else { dphi(sl) };
                let coef = if coef.is_finite() { coef } else { T::max_value() };
                let fv = p.f_op(mw, tw, mult);
                let ds = T::epsilon() * (ul.abs() + uc.abs() + uc.abs() + ur.abs()) / h;
                let slope_err = if p.alpha >= T::zero() { ap1 * sl.abs().max(sr.abs()).powf(p.alpha) * ds } else { ds.powf(ap1) };
                let round = p.big_a * T::count(1 + mult) * (T::epsilon() * (pl.abs() + pr.abs()) + slope_err + slope_err) / (ap1 * h);
                (coef, fv, round)
            }
        };
        let (qm, qp) = match self.scheme.flux {
            HamiltonianFlux::Godunov => (sl, sr),
            HamiltonianFlux::Blended => {
                let big_m = p.beta * sl.abs().max(sr.abs()).powf(p.beta - T::one());
                let cdiff = coef * p.a;
                let half = T::lit(0.5);
                let w = if big_m * h <= cdiff / half { half } else { cdiff / (h * big_m) };
                ((T::one() - w) * sl + w * sr, w * sl + (T::one() - w) * sr)
            }
        };
        let hamiltonian = pos(qm).max(pos(-qp)).powf(p.beta);
        let zero_order = p.lambda * odd_pow(uc, p.alpha);
        let forcing = self.forcing[i];
        let mag = ul.abs() + uc.abs() + uc.abs() + ur.abs();
        let rounding = T::lit(16.0) * diff_round
            + T::lit(16.0)
                * T::epsilon()
                * (p.beta * sl.abs().max(sr.abs()).powf(p.beta - T::one()) * mag / h
                    + hamiltonian
                    + (p.alpha + T::one()) * zero_order.abs()
                    + forcing.abs());
        NodeTerms { weight: coef, diffusion, hamiltonian, zero_order, forcing, rounding }
    }

    pub fn node_residual(&self, i: usize, ul: T, uc: T, ur: T) -> T {
        self.terms(i, ul, uc, ur).residual()
    }

    /// Residual and scale divided by the gradient weight when `α < 0`.
    ///
    /// Same zeros as [`Self::node_residual`]; the singular weight then no longer
    /// multiplies the second difference, which keeps Newton's quadratic region wide.
    pub fn solver_terms(&self, i: usize, ul: T, uc: T, ur: T) -> (T, T) {
        let t = self.terms(i, ul, uc, ur);
        if self.params.alpha < T::zero() {
            (t.residual() / t.weight, t.scale() / t.weight)
        } else {
            (t.residual(), t.scale())
        }
    }

    /// Residual at every node (zero at Dirichlet nodes).
    pub fn residual(&self, u: &[T]) -> Vec<T> {
        let mut r = vec![T::zero(); self.grid.n];
        for i in self.grid.unknowns() {
            let (ul, ur) = self.neighbours(u, i);
            r[i] = self.node_residual(i, ul, u[i], ur);
        }
        r
    }

    /// `max_i max(|r_i| - rounding_i, 0) / (1 + scale_i)`.
    pub fn scaled_residual_norm(&self, u: &[T]) -> T {
        let mut worst = T::zero();
        for i in self.grid.unknowns() {
            let (ul, ur) = self.neighbours(u, i);
            let t = self.terms(i, ul, u[i], ur);
            let v = t.scaled();
            if v.is_nan() {
                return T::nan();
            }
            worst = worst.max(v);
        }
        worst
    }

    /// Central gradient from the limited slopes; boundary nodes take their adjacent slope.
    pub fn gradient(&self, u: &[T]) -> Vec<T> {
        let n = self.grid.n;
        (0..n)
            .map(|i| {
                if self.grid.is_dirichlet(i) {
                    if i == 0 {
                        self.slopes(1, u[0], u[1], u[2]).0
                    } else {
                        self.slopes(i - 1, u[i - 2], u[i - 1], u[i]).1
                    }
                } else if i == 0 {
                    T::zero()
                } else {
                    let (sl, sr) = self.slopes(i, u[i - 1], u[i], u[i + 1]);
                    (sl + sr) / T::lit(2.0)
                }
            })
            .collect()
    }

    /// `F(e⊗e)` of the bound problem.
    pub fn rank_one_value(&self) -> T {
        self.c_f
    }
}

/// Residual of the default scheme at every node.
#[allow(non_snake_case)]
pub fn discrete_G<T: Real>(p: &ValidatedParams<T>, fld: &GridField<T>, f: &Forcing<T>) -> Result<Vec<T>> {
    discrete_G_with(p, fld, f, Scheme::default())
}

#[allow(non_snake_case)]
pub fn discrete_G_with<T: Real>(p: &ValidatedParams<T>, fld: &GridField<T>, f: &Forcing<T>, scheme: Scheme) -> Result<Vec<T>> {
    let fv = sample_forcing(f, &fld.grid)?;
    Ok(Discretization::new(p, &fld.grid, fv, scheme).residual(&fld.values))
}

pub fn refine<T: Real>(grid: &Grid<T>) -> Grid<T> {
    grid.refine()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, EquationParams, OperatorKind};
    use proptest::prelude::*;

    fn trace(alpha: f64, beta: f64, lambda: f64) -> ValidatedParams<f64> {
        validate_params(EquationParams { alpha, beta, a: 1.0, big_a: 1.0, lambda, operator: OperatorKind::Trace }).unwrap()
    }

    fn unit() -> Domain1D<f64> {
        Domain1D::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn grid_shapes() {
        assert!(matches!(Grid::new(unit(), 15), Err(Error::GridTooCoarse(15))));
        let g = Grid::new(unit(), 17).unwrap();
        assert_eq!(g.refine().n, 33);
        let g = Grid::new(unit(), 101).unwrap();
        assert!((g.h - 0.01).abs() < 1e-15);
        assert!((g.refine().h - 0.005).abs() < 1e-15);
        let fine = g.refine();
        for (i, x) in g.nodes.iter().enumerate() {
            assert!((fine.nodes[2 * i] - x).abs() < 1e-14);
        }
        let b = Grid::new(Domain1D::ball(1.0, 3).unwrap(), 51).unwrap();
        let r = b.refine();
        assert_eq!(r.nodes[0], 0.0);
        assert_eq!(r.d_values[r.n - 1], 0.0);
        assert_eq!(g.d_values[0], 0.0);
        assert_eq!(g.d_values[100], 0.0);
    }

    #[test]
    fn boundary_record_must_agree() {
        let g = Grid::new(unit(), 17).unwrap();
        let mut v = vec![0.0; 17];
        v[0] = 1.0;
        assert_eq!(GridField::new(g.clone(), v, Boundary::Dirichlet { lo: 0.0, hi: 0.0 }), Err(Error::BoundaryMismatch));
        assert!(GridField::new(g, vec![0.0; 17], Boundary::DirichletRadial { outer: 0.0 }).is_err());
    }

    #[test]
    fn zero_and_constant_fields_have_zero_residual() {
        let p = trace(0.0, 2.0, 1.0);
        let g = Grid::new(unit(), 33).unwrap();
        let r = discrete_G(&p, &GridField::constant(g.clone(), 0.0), &Forcing::constant(0.0)).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
        let p = trace(0.5, 2.0, 0.7);
        let g0 = 3.0_f64;
        let f = Forcing::constant(0.7 * g0.powf(1.5));
        for scheme in [Scheme::default(), Scheme::godunov()] {
            let r = discrete_G_with(&p, &GridField::constant(g.clone(), g0), &f, scheme).unwrap();
            assert!(r.iter().all(|&v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn linear_field_hand_assembly() {
        let p = trace(0.0, 2.0, 0.0);
        let g = Grid::new(unit(), 41).unwrap();
        let fld = GridField::from_fn(g, Boundary::Dirichlet { lo: 0.0, hi: 1.0 }, |x| x).unwrap();
        let scheme = Scheme { flux: HamiltonianFlux::Godunov, boundary_slope_limit: false, ..Scheme::default() };
        let r = discrete_G_with(&p, &fld, &Forcing::constant(1.0), scheme).unwrap();
        assert!(r.iter().all(|&v| v.abs() < 1e-12), "{r:?}");
        let r = discrete_G(&p, &fld, &Forcing::constant(1.0)).unwrap();
        assert!(r.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn singular_forcing_never_sampled_on_boundary() {
        let p = trace(0.0, 1.5, 1.0);
        let g = Grid::new(unit(), 33).unwrap();
        let mut f = Forcing::constant(0.0);
        f.singular_kappa = 1.0;
        f.singular_q = 1.0;
        let r = discrete_G(&p, &GridField::constant(g.clone(), 1.0), &f).unwrap();
        assert!(r.iter().all(|v| v.is_finite()));
        assert!(matches!(f.eval(&g.dom, 0.0), Err(Error::SingularForcingAtNode(_))));
    }

    #[test]
    fn ball_centre_uses_reflection() {
        let p = trace(0.0, 2.0, 0.0);
        let dom = Domain1D::ball(1.0, 3).unwrap();
        let g = Grid::new(dom, 65).unwrap();
        // u = r², Δu = 2N = 6, |u'|² = 4r²
        let fld = GridField::from_fn(g.clone(), Boundary::DirichletRadial { outer: 1.0 }, |r| r * r).unwrap();
        let scheme = Scheme { flux: HamiltonianFlux::Godunov, boundary_slope_limit: false, ..Scheme::default() };
        let f = Forcing { regular: crate::model::RegularForcing::Polynomial(vec![-6.0, 0.0, 4.0]), ..Forcing::constant(0.0) };
        let r = discrete_G_with(&p, &fld, &f, scheme).unwrap();
        assert!(r[0].abs() < 1e-9);
        let worst = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(worst < 10.0 * g.h, "{worst}");
    }

    #[test]
    fn slope_cap_only_limits_upward_boundary() {
        let p = trace(0.0, 1.5, 1.0);
        let g = Grid::new(unit(), 33).unwrap();
        let d = Discretization::new(&p, &g, vec![0.0; 33], Scheme::default());
        let cap = d.slope_cap();
        let (sl, _) = d.slopes(1, 1e9, 0.0, 0.0);
        assert_eq!(sl, -cap);
        let (sl, _) = d.slopes(1, -1e9, 0.0, 0.0);
        assert_eq!(sl, 1e9 / g.h);
        let (_, sr) = d.slopes(31, 0.0, 0.0, 1e9);
        assert_eq!(sr, cap);
        // exact layer slope at half a cell: ((β-α-1) h/2 / c_F)^{-1/(β-α-1)}
        assert!((cap - (0.5 * g.h / 2.0).powf(-2.0)).abs() < 1e-9 * cap);
    }

    #[test]
    fn symmetric_field_symmetric_residual() {
        let g = Grid::new(unit(), 101).unwrap();
        for (alpha, beta) in [(0.0, 1.5), (0.0, 2.0), (1.0, 2.5), (-0.5, 1.25)] {
            let p = trace(alpha, beta, 1.0);
            let values: Vec<f64> = g.d_values.iter().map(|&d| if d == 0.0 { 5.0 } else { 1.0 / (d + 0.2) }).collect();
            let fld = GridField::new(g.clone(), values, Boundary::Dirichlet { lo: 5.0, hi: 5.0 }).unwrap();
            let r = discrete_G(&p, &fld, &Forcing::constant(-2.0)).unwrap();
            for i in 0..g.n {
                assert_eq!(r[i], r[g.n - 1 - i], "alpha={alpha} i={i}");
            }
        }
    }

    fn sin_operator_error(n: usize, alpha: f64, beta: f64) -> f64 {
        let p = trace(alpha, beta, 1.0);
        let g = Grid::new(unit(), n).unwrap();
        let pi = std::f64::consts::PI;
        let fld = GridField::from_fn(g.clone(), Boundary::Dirichlet { lo: 0.0, hi: 0.0 }, |x| (pi * x).sin()).unwrap();
        let r = discrete_G(&p, &fld, &Forcing::constant(0.0)).unwrap();
        g.unknowns()
            .map(|i| {
                let x = g.nodes[i];
                let (u, du, d2u) = ((pi * x).sin(), pi * (pi * x).cos(), -pi * pi * (pi * x).sin());
                let exact = if du == 0.0 && alpha != 0.0 {
                    u.powf(alpha + 1.0)
                } else {
                    -du.abs().powf(alpha) * d2u + du.abs().powf(beta) + crate::num::odd_pow(u, alpha)
                };
                (r[i] - exact).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn consistency_on_sine_quadratic_hamiltonian() {
        let e: Vec<f64> = [41, 81, 161].iter().map(|&n| sin_operator_error(n, 0.0, 2.0)).collect();
        assert!(e[0] / e[1] >= 1.8 && e[1] / e[2] >= 1.8, "{e:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn godunov_hamiltonian_monotone(ul in -5.0f64..5.0, uc in -5.0f64..5.0, ur in -5.0f64..5.0,
                                        du in 1e-6f64..0.5, beta in 1.01f64..3.0) {
            let p = trace(1.0, beta.clamp(2.01, 3.0), 0.0);
            let g = Grid::new(unit(), 33).unwrap();
            let d = Discretization::new(&p, &g, vec![0.0; 33], Scheme::godunov());
            let h = |l, c, r| d.terms(5, l, c, r).hamiltonian;
            let base = h(ul, uc, ur);
            prop_assert!(h(ul, uc + du, ur) >= base);
            prop_assert!(h(ul + du, uc, ur) <= base);
            prop_assert!(h(ul, uc, ur + du) <= base);
        }

        #[test]
        fn blended_residual_monotone_alpha_zero(ul in -5.0f64..5.0, uc in -5.0f64..5.0, ur in -5.0f64..5.0,
                                                du in 1e-6f64..0.5, beta in 1.01f64..2.0, lam in 0.0f64..2.0) {
            let p = trace(0.0, beta, lam);
            let g = Grid::new(unit(), 33).unwrap();
            let d = Discretization::new(&p, &g, vec![0.0; 33], Scheme::default());
            let r = |l, c, rr| d.node_residual(5, l, c, rr);
            let base = r(ul, uc, ur);
            let tol = 1e-9 * (1.0 + base.abs());
            prop_assert!(r(ul, uc + du, ur) >= base - tol);
            prop_assert!(r(ul + du, uc, ur) <= base + tol);
            prop_assert!(r(ul, uc, ur + du) <= base + tol);
        }
    }
}
