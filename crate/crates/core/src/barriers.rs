//! Closed-form sub/super-solutions and a pointwise certificate of their inequalities.

use crate::error::{Error, Result};
use crate::model::{boundary_constant, eval_G, Domain1D, Forcing, ValidatedParams};
use crate::num::{odd_pow, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarrierKind<T> {
    /// `σΦ(d+s) - σΦ(δ₀+s)`.
    InteriorLower { s: T, delta0: T },
    /// Three-zone super-solution with collar `δ`.
    ExplosiveSuper { delta: T, nu: T, gamma1: T, d_const: T },
    /// `max(CΦ(d+s) - νΨ(d+s) - D, K_δ)` near the boundary, `K_δ` inside `Ω_δ`.
    ExplosiveSub { s: T, delta: T, nu: T, gamma1: T, d_const: T },
    /// `C_test x₁^{(α+2)/(α+1)}` on an interval of the given width.
    MuStarTest { width: T },
}

/// A barrier together with its prefactor (`σ`, `C` or `C_test`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec<T> {
    pub kind: BarrierKind<T>,
    pub prefactor: Option<T>,
}

/// Value and first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet<T> {
    fn constant(v: T) -> Self {
        Jet { v, d1: T::zero(), d2: T::zero() }
    }

    fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// `Φ(d) = d^{-γ}` (γ > 0) or `-ln d` (γ = 0).
fn phi<T: Real>(gamma: T, d: T) -> Jet<T> {
    if gamma > T::zero() {
        Jet { v: d.powf(-gamma), d1: -gamma * d.powf(-gamma - T::one()), d2: gamma * (gamma + T::one()) * d.powf(-gamma - T::lit(2.0)) }
    } else {
        Jet { v: -d.ln(), d1: -d.recip(), d2: (d * d).recip() }
    }
}

/// `Ψ(d) = d^{γ₁} Φ(d)`, the correction profile.
fn psi<T: Real>(gamma: T, gamma1: T, d: T) -> Jet<T> {
    let f = phi(gamma, d);
    if gamma1 == T::zero() {
        return f;
    }
    let g =
        Jet { v: d.powf(gamma1), d1: gamma1 * d.powf(gamma1 - T::one()), d2: gamma1 * (gamma1 - T::one()) * d.powf(gamma1 - T::lit(2.0)) };
    Jet { v: f.v * g.v, d1: f.d1 * g.v + f.v * g.d1, d2: f.d2 * g.v + T::lit(2.0) * f.d1 * g.d1 + f.v * g.d2 }
}

fn lin<T: Real>(a: T, x: Jet<T>, b: T, y: Jet<T>, c: T) -> Jet<T> {
    Jet { v: a * x.v + b * y.v + c, d1: a * x.d1 + b * y.d1, d2: a * x.d2 + b * y.d2 }
}

/// Zone of the three-zone super-solution, or branch of the sub-solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Near,
    Middle,
    Far,
}

impl<T: Real> BarrierSpec<T> {
    /// Interior barrier with `σ = ((γ+1)a/2)^{1/(β-α-1)}/γ`, or `a/2` when `γ = 0`.
    pub fn interior_lower(p: &ValidatedParams<T>, s: T, delta0: T) -> Result<Self> {
        let e = p.exponents();
        let sigma =
            if e.gamma > T::zero() { ((e.gamma + T::one()) * p.a / T::lit(2.0)).powf(e.grad_rate) / e.gamma } else { p.a / T::lit(2.0) };
        let spec = BarrierSpec { kind: BarrierKind::InteriorLower { s, delta0 }, prefactor: Some(sigma) };
        spec.validate(p)?;
        Ok(spec)
    }

    pub fn explosive_super(p: &ValidatedParams<T>, dom: &Domain1D<T>, delta: T, nu: T, gamma1: T, d_const: T) -> Result<Self> {
        let c = boundary_constant(p, dom, &p.exponents());
        let spec = BarrierSpec { kind: BarrierKind::ExplosiveSuper { delta, nu, gamma1, d_const }, prefactor: Some(c) };
        spec.validate(p)?;
        Ok(spec)
    }

    pub fn explosive_sub(p: &ValidatedParams<T>, dom: &Domain1D<T>, s: T, delta: T, nu: T, gamma1: T, d_const: T) -> Result<Self> {
        let c = boundary_constant(p, dom, &p.exponents());
        let spec = BarrierSpec { kind: BarrierKind::ExplosiveSub { s, delta, nu, gamma1, d_const }, prefactor: Some(c) };
        spec.validate(p)?;
        Ok(spec)
    }

    /// `C_test = [a/(2(α+1))]^{1/(β-α-1)} (α+1)/(α+2) R^{-β/((α+1)(β-α-1))}`.
    pub fn mu_star_test(p: &ValidatedParams<T>, width: T) -> Result<Self> {
        let one = T::one();
        let gr = p.exponents().grad_rate;
        let c = (p.a / (T::lit(2.0) * (p.alpha + one))).powf(gr) * (p.alpha + one) / (p.alpha + T::lit(2.0))
            * width.powf(-p.beta * gr / (p.alpha + one));
        let spec = BarrierSpec { kind: BarrierKind::MuStarTest { width }, prefactor: Some(c) };
        spec.validate(p)?;
        Ok(spec)
    }

    pub fn validate(&self, p: &ValidatedParams<T>) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidBarrier(m.into()));
        let gamma = p.exponents().gamma;
        let check_corr = |nu: T, gamma1: T| -> Result<()> {
            if !(nu >= T::zero()) {
                return bad("nu must be >= 0");
            }
            let upper = if gamma > T::zero() { T::one().min(gamma) } else { T::one() };
            if !(gamma1 >= T::zero() && gamma1 < upper) {
                return bad("gamma1 must lie in [0, min(1, gamma))");
            }
            Ok(())
        };
        match self.kind {
            BarrierKind::InteriorLower { s, delta0 } => {
                if !(s >= T::zero() && delta0 > T::zero()) {
                    return bad("interior barrier needs s >= 0 and delta0 > 0");
                }
                if gamma == T::zero() && delta0 + s >= T::one() {
                    return bad("log barrier needs delta0 + s < 1");
                }
            }
            BarrierKind::ExplosiveSuper { delta, nu, gamma1, d_const } => {
                check_corr(nu, gamma1)?;
                if !(delta > T::zero() && delta < T::lit(0.5) && d_const >= T::zero()) {
                    return bad("explosive super-solution needs 0 < delta < 1/2 and D >= 0");
                }
            }
            BarrierKind::ExplosiveSub { s, delta, nu, gamma1, d_const } => {
                check_corr(nu, gamma1)?;
                if !(s >= T::zero() && delta > T::zero() && delta + s < T::one() && d_const >= T::zero()) {
                    return bad("explosive sub-solution needs s >= 0, delta > 0, delta + s < 1 and D >= 0");
                }
            }
            BarrierKind::MuStarTest { width } => {
                if !(width > T::zero()) {
                    return bad("test function needs a positive width");
                }
            }
        }
        Ok(())
    }

    /// `E = νΨ(δ) + D`, the far-zone constant of the super-solution.
    pub fn far_constant(&self, p: &ValidatedParams<T>) -> Option<T> {
        match self.kind {
            BarrierKind::ExplosiveSuper { delta, nu, gamma1, d_const } => Some(nu * psi(p.exponents().gamma, gamma1, delta).v + d_const),
            _ => None,
        }
    }

    /// Jet in the distance variable (or in `x₁` for the test function), per piece.
    fn profile(&self, p: &ValidatedParams<T>, d: T, piece: Option<Piece>) -> Result<Jet<T>> {
        let pre = self.prefactor.ok_or(Error::UnsetPrefactor)?;
        let gamma = p.exponents().gamma;
        Ok(match self.kind {
            BarrierKind::InteriorLower { s, delta0 } => {
                lin(pre, phi(gamma, d + s), T::zero(), Jet::constant(T::zero()), -pre * phi(gamma, delta0 + s).v)
            }
            BarrierKind::ExplosiveSuper { delta, nu, gamma1, d_const } => {
                let e_const = nu * psi(gamma, gamma1, delta).v + d_const;
                let two_delta = delta + delta;
                let piece = piece.unwrap_or(if d < delta {
                    Piece::Near
                } else if d < two_delta {
                    Piece::Middle
                } else {
                    Piece::Far
                });
                match piece {
                    Piece::Near => lin(pre, phi(gamma, d), nu, psi(gamma, gamma1, d), d_const),
                    Piece::Middle => {
                        let gap = d - two_delta;
                        if gap >= T::zero() {
                            return Ok(Jet::constant(e_const));
                        }
                        let g = gap.recip() + delta.recip();
                        let ex = g.exp();
                        if ex == T::zero() {
                            return Ok(Jet::constant(e_const));
                        }
                        let amp = pre * phi(gamma, delta).v;
                        let g1 = -(gap * gap).recip();
                        let g2 = T::lit(2.0) / (gap * gap * gap);
                        Jet { v: amp * ex + e_const, d1: amp * ex * g1, d2: amp * ex * (g1 * g1 + g2) }
                    }
                    Piece::Far => Jet::constant(e_const),
                }
            }
            BarrierKind::ExplosiveSub { s, delta, nu, gamma1, d_const } => {
                let k = pre * phi(gamma, delta + s).v - nu * psi(gamma, gamma1, delta + s).v - d_const;
                let near = lin(pre, phi(gamma, d + s), -nu, psi(gamma, gamma1, d + s), -d_const);
                match piece {
                    Some(Piece::Near) => near,
                    Some(_) => Jet::constant(k),
                    None if d <= delta && near.v >= k => near,
                    None => Jet::constant(k),
                }
            }
            BarrierKind::MuStarTest { .. } => {
                let kexp = (p.alpha + T::lit(2.0)) / (p.alpha + T::one());
                Jet {
                    v: pre * d.powf(kexp),
                    d1: pre * kexp * d.powf(kexp - T::one()),
                    d2: pre * kexp * (kexp - T::one()) * d.powf(kexp - T::lit(2.0)),
                }
            }
        })
    }

    /// Profile variable at `x`: the distance, or `x₁ = x - lo` for the test function.
    fn variable(&self, dom: &Domain1D<T>, x: T) -> Result<T> {
        let d = dom.distance(x)?;
        match (self.kind, dom) {
            (BarrierKind::MuStarTest { width }, Domain1D::Interval { lo, .. }) => {
                let x1 = x - *lo;
                if x1 > width {
                    return Err(Error::OutsideDomain(x.as_f64()));
                }
                Ok(x1)
            }
            (BarrierKind::MuStarTest { .. }, Domain1D::Ball { .. }) => {
                Err(Error::InvalidBarrier("test function needs an interval domain".into()))
            }
            _ => Ok(d),
        }
    }

    /// Spatial jet `(u, u', u'')` in the grid coordinate, plus the tangential value `t`.
    fn spatial(&self, p: &ValidatedParams<T>, dom: &Domain1D<T>, x: T, piece: Option<Piece>) -> Result<(Jet<T>, T)> {
        let var = self.variable(dom, x)?;
        let j = self.profile(p, var, piece)?;
        Ok(match (self.kind, dom) {
            (BarrierKind::MuStarTest { .. }, _) => (j, T::zero()),
            (_, Domain1D::Interval { lo, hi }) => {
                let sign = if x - *lo <= *hi - x { T::one() } else { -T::one() };
                (Jet { v: j.v, d1: sign * j.d1, d2: j.d2 }, T::zero())
            }
            (_, Domain1D::Ball { .. }) => {
                let ur = -j.d1;
                let t = if x > T::zero() { ur / x } else { j.d2 };
                (Jet { v: j.v, d1: ur, d2: j.d2 }, t)
            }
        })
    }

    /// Switch points (in the profile variable) where one-sided jets differ.
    fn switches(&self) -> Vec<(T, [Piece; 2])> {
        match self.kind {
            BarrierKind::ExplosiveSuper { delta, .. } => {
                vec![(delta, [Piece::Near, Piece::Middle]), (delta + delta, [Piece::Middle, Piece::Far])]
            }
            BarrierKind::ExplosiveSub { delta, .. } => vec![(delta, [Piece::Near, Piece::Far])],
            _ => Vec::new(),
        }
    }
}

impl<T: Real> BarrierSpec<T> {
    /// Relative value gaps `(switch, |left - right| / max(|left|, 1))` at each branch switch.
    pub fn switch_jumps(&self, p: &ValidatedParams<T>) -> Result<Vec<(T, T)>> {
        self.validate(p)?;
        self.switches()
            .into_iter()
            .map(|(dv, [l, r])| {
                let (a, b) = (self.profile(p, dv, Some(l))?.v, self.profile(p, dv, Some(r))?.v);
                Ok((dv, (a - b).abs() / a.abs().max(T::one())))
            })
            .collect()
    }
}

pub fn eval_barrier<T: Real>(spec: &BarrierSpec<T>, p: &ValidatedParams<T>, dom: &Domain1D<T>, x: T) -> Result<T> {
    spec.validate(p)?;
    let var = spec.variable(dom, x)?;
    Ok(spec.profile(p, var, None)?.v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Sub,
    Super,
}

/// Where an inequality is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region<T> {
    /// Points with `d_min ≤ d ≤ d_max` (both pieces of an interval).
    DistanceBand { d_min: T, d_max: T },
    /// Coordinates in `[lo, hi]`.
    Coordinates { lo: T, hi: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport<T> {
    pub side: Side,
    /// Max (sub) or min (super) of `G(φ) - (f + μ)` over the checked points.
    pub worst_margin: T,
    pub worst_at: T,
    pub passed: bool,
    pub points_checked: usize,
    /// Points where the barrier or forcing is not finite (e.g. on the boundary).
    pub points_skipped: usize,
    /// Branch switches where both one-sided jets were tested.
    pub non_smooth_points: Vec<T>,
}

fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n <= 1 || a == b {
        return vec![a];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * T::count(i) / T::count(n - 1) }).collect()
}

fn region_points<T: Real>(dom: &Domain1D<T>, region: &Region<T>, n: usize) -> Vec<T> {
    let (lo, hi) = dom.span();
    let mut xs = match *region {
        Region::Coordinates { lo: a, hi: b } => linspace(a.max(lo), b.min(hi), n),
        Region::DistanceBand { d_min, d_max } => {
            let d_max = d_max.min(dom.inradius());
            if d_min > d_max {
                return Vec::new();
            }
            match dom {
                Domain1D::Interval { .. } => {
                    let mut v = linspace(lo + d_min, lo + d_max, n);
                    v.extend(linspace(hi - d_max, hi - d_min, n));
                    v
                }
                Domain1D::Ball { radius, .. } => linspace(*radius - d_max, *radius - d_min, n),
            }
        }
    };
    xs.retain(|&x| x >= lo && x <= hi && x.is_finite());
    xs
}

fn in_region<T: Real>(dom: &Domain1D<T>, region: &Region<T>, x: T) -> bool {
    match *region {
        Region::Coordinates { lo, hi } => x >= lo && x <= hi,
        Region::DistanceBand { d_min, d_max } => dom.distance(x).map(|d| d >= d_min && d <= d_max).unwrap_or(false),
    }
}

/// Pointwise margins of `G(φ) + λ|φ|^α φ - (f + μ)` from closed-form derivatives.
#[allow(clippy::too_many_arguments)]
pub fn check_inequality<T: Real>(
    spec: &BarrierSpec<T>,
    p: &ValidatedParams<T>,
    dom: &Domain1D<T>,
    f: &Forcing<T>,
    mu: T,
    side: Side,
    region: &Region<T>,
    n: usize,
) -> Result<InequalityReport<T>> {
    spec.validate(p)?;
    let mut points: Vec<(T, Option<Piece>)> = region_points(dom, region, n).into_iter().map(|x| (x, None)).collect();
    let mut non_smooth = Vec::new();
    for (dv, pieces) in spec.switches() {
        let xs: Vec<T> = match dom {
            Domain1D::Interval { lo, hi } => vec![*lo + dv, *hi - dv],
            Domain1D::Ball { radius, .. } => vec![*radius - dv],
        };
        for x in xs {
            if dom.contains_closed(x) && in_region(dom, region, x) {
                non_smooth.push(x);
                points.extend(pieces.iter().map(|&pc| (x, Some(pc))));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::RegionEmpty);
    }
    let mult = dom.tangential_mult();
    let sixty_four_eps = T::lit(64.0) * T::epsilon();
    let mut worst: Option<(T, T)> = None;
    let (mut checked, mut skipped, mut passed) = (0usize, 0usize, true);
    for (x, piece) in points {
        let (jet, t) = match spec.spatial(p, dom, x, piece) {
            Ok(v) => v,
            Err(Error::OutsideDomain(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let fx = match f.eval(dom, x) {
            Ok(v) => v,
            Err(Error::SingularForcingAtNode(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !jet.is_finite() || (p.alpha < T::zero() && jet.d1 == T::zero()) {
            skipped += 1;
            continue;
        }
        let fval = p.f_op(jet.d2, t, mult);
        let margin = eval_G(p, jet.v, jet.d1, fval, fx)? - mu;
        if !margin.is_finite() {
            skipped += 1;
            continue;
        }
        let g = jet.d1.abs();
        let diffusion = if fval == T::zero() { T::zero() } else { g.powf(p.alpha) * fval.abs() };
        let tol =
            T::lit(1e-8) + sixty_four_eps * (diffusion + g.powf(p.beta) + p.lambda * odd_pow(jet.v, p.alpha).abs() + fx.abs() + mu.abs());
        checked += 1;
        let ok = match side {
            Side::Sub => margin <= tol,
            Side::Super => margin >= -tol,
        };
        passed &= ok;
        let better = |m: T, w: T| match side {
            Side::Sub => m > w,
            Side::Super => m < w,
        };
        if worst.map(|(w, _)| better(margin, w)).unwrap_or(true) {
            worst = Some((margin, x));
        }
    }
    let (worst_margin, worst_at) = worst.ok_or(Error::RegionEmpty)?;
    Ok(InequalityReport {
        side,
        worst_margin,
        worst_at,
        passed,
        points_checked: checked,
        points_skipped: skipped,
        non_smooth_points: non_smooth,
    })
}

/// Super-solution constants chosen as in the construction: collar `δ` by bisection
/// on the smallness conditions, `K₄` measured on the exponential zone, and
/// `D = ((|f|_{L∞(Ω_δ)} + K₄)/λ)^{1/(α+1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperDefaults<T> {
    pub spec: BarrierSpec<T>,
    pub delta: T,
    pub k4: T,
    pub f_sup: T,
    pub d_const: T,
}

fn near_zone_ok<T: Real>(p: &ValidatedParams<T>, dom: &Domain1D<T>, f: &Forcing<T>, nu: T, gamma1: T, delta: T) -> bool {
    let e = p.exponents();
    if e.gamma > T::zero() {
        let lhs = p.big_a * e.gamma * delta + (e.gamma - gamma1) * delta.powf(T::one() + gamma1);
        if !(lhs < p.a) {
            return false;
        }
    }
    let Ok(spec) = BarrierSpec::explosive_super(p, dom, delta, nu, gamma1, T::zero()) else {
        return false;
    };
    // Without the discount (D = 0 and λ = 0) the near zone must already dominate f.
    let Ok(p0) = p.with_lambda(T::zero()) else {
        return false;
    };
    let mult = dom.tangential_mult();
    let (lo, _) = dom.span();
    (0..=200).all(|k| {
        let dv = delta * T::lit(1e-6).powf(T::count(k) / T::lit(200.0));
        let x = match dom {
            Domain1D::Interval { .. } => lo + dv,
            Domain1D::Ball { radius, .. } => *radius - dv,
        };
        let Ok((jet, t)) = spec.spatial(&p0, dom, x, Some(Piece::Near)) else { return false };
        let Ok(fx) = f.eval(dom, x) else { return false };
        match eval_G(&p0, jet.v, jet.d1, p0.f_op(jet.d2, t, mult), fx) {
            Ok(m) => m >= T::zero(),
            Err(_) => false,
        }
    })
}

pub fn explosive_super_default<T: Real>(
    p: &ValidatedParams<T>,
    dom: &Domain1D<T>,
    f: &Forcing<T>,
    nu: T,
    gamma1: T,
) -> Result<SuperDefaults<T>> {
    f.validate(p)?;
    if !(p.lambda > T::zero()) {
        return Err(Error::Precondition("lambda > 0 for the explosive super-solution".into()));
    }
    if f.singular_kappa > T::zero() && gamma1 > f.gamma0 {
        return Err(Error::InvalidBarrier("gamma1 must not exceed the forcing's gamma0".into()));
    }
    let top = (dom.inradius() / T::lit(2.0)).min(T::lit(0.5)) * T::lit(0.999);
    let mut lo = top * T::lit(1e-4);
    if !near_zone_ok(p, dom, f, nu, gamma1, lo) {
        return Err(Error::InvalidBarrier("no admissible collar width".into()));
    }
    let delta = if near_zone_ok(p, dom, f, nu, gamma1, top) {
        top
    } else {
        let mut hi = top;
        for _ in 0..60 {
            let mid = (lo + hi) / T::lit(2.0);
            if near_zone_ok(p, dom, f, nu, gamma1, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let probe = BarrierSpec::explosive_super(p, dom, delta, nu, gamma1, T::zero())?;
    let mult = dom.tangential_mult();
    let (lo_x, _) = dom.span();
    let at = |dv: T| match dom {
        Domain1D::Interval { .. } => lo_x + dv,
        Domain1D::Ball { radius, .. } => *radius - dv,
    };
    let n = 4000;
    let mut k4 = T::zero();
    for k in 0..n {
        let dv = delta + delta * T::count(k) / T::count(n);
        let (jet, t) = probe.spatial(p, dom, at(dv), Some(Piece::Middle))?;
        let g = jet.d1.abs();
        let fv = p.f_op(jet.d2, t, mult);
        let diffusion = if fv == T::zero() { T::zero() } else { g.powf(p.alpha) * fv.abs() };
        k4 = k4.max(diffusion + g.powf(p.beta));
    }
    let mut f_sup = T::zero();
    for k in 0..=n {
        let dv = delta + (dom.inradius() - delta) * T::count(k) / T::count(n);
        f_sup = f_sup.max(f.eval(dom, at(dv))?.abs());
    }
    let d_const = ((f_sup + k4) / p.lambda).powf(T::one() / (p.alpha + T::one()));
    let spec = BarrierSpec::explosive_super(p, dom, delta, nu, gamma1, d_const)?;
    Ok(SuperDefaults { spec, delta, k4, f_sup, d_const })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, EquationParams, OperatorKind};
    use proptest::prelude::*;

    fn params(alpha: f64, beta: f64, a: f64, big_a: f64, lambda: f64, op: OperatorKind) -> ValidatedParams<f64> {
        validate_params(EquationParams { alpha, beta, a, big_a, lambda, operator: op }).unwrap()
    }

    fn unit() -> Domain1D<f64> {
        Domain1D::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn interior_lower_value() {
        let p = params(0.0, 1.5, 1.0, 1.0, 1.0, OperatorKind::Trace);
        let b = BarrierSpec::interior_lower(&p, 0.01, 0.1).unwrap();
        assert_eq!(b.prefactor, Some(1.0));
        let v = eval_barrier(&b, &p, &unit(), 0.02).unwrap();
        assert!((v - (1.0 / 0.03 - 1.0 / 0.11)).abs() < 1e-12);
        assert!(matches!(eval_barrier(&b, &p, &unit(), 1.5), Err(Error::OutsideDomain(_))));
        let unset = BarrierSpec { prefactor: None, ..b };
        assert_eq!(eval_barrier(&unset, &p, &unit(), 0.5), Err(Error::UnsetPrefactor));
    }

    #[test]
    fn super_equals_far_constant_at_two_delta() {
        let p = params(0.0, 1.5, 1.0, 1.0, 1.0, OperatorKind::Trace);
        let b = BarrierSpec::explosive_super(&p, &unit(), 0.05, 0.5, 0.0, 3.0).unwrap();
        assert_eq!(eval_barrier(&b, &p, &unit(), 0.1).unwrap(), b.far_constant(&p).unwrap());
        assert_eq!(eval_barrier(&b, &p, &unit(), 0.1 - 1e-12).unwrap(), b.far_constant(&p).unwrap());
    }

    #[test]
    fn mu_star_test_closed_form() {
        let p = params(0.0, 2.0, 1.0, 1.0, 0.0, OperatorKind::Trace);
        let b = BarrierSpec::mu_star_test(&p, 1.0).unwrap();
        assert!((b.prefactor.unwrap() - 0.25).abs() < 1e-15);
        assert!((eval_barrier(&b, &p, &unit(), 1.0).unwrap() - 0.25).abs() < 1e-15);
        // G(φ) = -1/2 + x²/4 ≤ -1/4, equality at x₁ = 1
        let r =
            check_inequality(&b, &p, &unit(), &Forcing::constant(0.0), -0.25, Side::Sub, &Region::Coordinates { lo: 0.0, hi: 1.0 }, 1001)
                .unwrap();
        assert!(r.passed);
        assert!(r.worst_margin.abs() < 1e-12 && (r.worst_at - 1.0).abs() < 1e-12);
        assert!(
            !check_inequality(&b, &p, &unit(), &Forcing::constant(0.0), -0.3, Side::Sub, &Region::Coordinates { lo: 0.0, hi: 1.0 }, 1001)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn interior_lower_certificate() {
        let p = params(0.0, 1.5, 1.0, 1.0, 1.0, OperatorKind::Trace);
        let b = BarrierSpec::interior_lower(&p, 0.01, 0.1).unwrap();
        let band = Region::DistanceBand { d_min: 0.0, d_max: 0.1 };
        let r = check_inequality(&b, &p, &unit(), &Forcing::constant(-20.0), 0.0, Side::Sub, &band, 2001).unwrap();
        assert!(r.passed, "{r:?}");
        // G(φ) = -(d+s)^{-3} + λφ peaks at about -751 on the band
        let r = check_inequality(&b, &p, &unit(), &Forcing::constant(-700.0), 0.0, Side::Sub, &band, 2001).unwrap();
        assert!(r.passed);
        let r = check_inequality(&b, &p, &unit(), &Forcing::constant(-800.0), 0.0, Side::Sub, &band, 2001).unwrap();
        assert!(!r.passed);
        assert!((r.worst_at - 0.1).abs() < 1e-12 || (r.worst_at - 0.9).abs() < 1e-12);
    }

    #[test]
    fn super_default_certificate_and_finer_oracle() {
        let p = params(0.0, 1.5, 1.0, 1.0, 1.0, OperatorKind::Trace);
        let dflt = explosive_super_default(&p, &unit(), &Forcing::constant(0.0), 0.5, 0.0).unwrap();
        let whole = Region::DistanceBand { d_min: 0.0, d_max: 0.5 };
        for n in [1001, 10001] {
            let r = check_inequality(&dflt.spec, &p, &unit(), &Forcing::constant(0.0), 0.0, Side::Super, &whole, n).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.non_smooth_points.len(), 4);
        }
    }

    #[test]
    fn ball_super_certificate() {
        let p = params(0.0, 1.5, 1.0, 2.0, 1.0, OperatorKind::PucciPlus);
        let dom = Domain1D::ball(1.0, 3).unwrap();
        let dflt = explosive_super_default(&p, &dom, &Forcing::constant(1.0), 0.5, 0.0).unwrap();
        let r = check_inequality(
            &dflt.spec,
            &p,
            &dom,
            &Forcing::constant(1.0),
            0.0,
            Side::Super,
            &Region::Coordinates { lo: 0.0, hi: 1.0 },
            2001,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn empty_region() {
        let p = params(0.0, 2.0, 1.0, 1.0, 0.0, OperatorKind::Trace);
        let b = BarrierSpec::mu_star_test(&p, 1.0).unwrap();
        let r = check_inequality(
            &b,
            &p,
            &unit(),
            &Forcing::constant(0.0),
            0.0,
            Side::Sub,
            &Region::DistanceBand { d_min: 0.4, d_max: 0.3 },
            10,
        );
        assert_eq!(r, Err(Error::RegionEmpty));
    }

    fn draw() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64)> {
        (-0.9f64..2.0, 0.05f64..=1.0, 0.0f64..2.0, 0.0f64..1.0, 0.01f64..0.2, 0.0f64..10.0)
            .prop_map(|(alpha, frac, nu, g1frac, delta, d)| (alpha, alpha + 1.0 + frac, nu, g1frac, delta, d))
    }

    fn gamma1_for(p: &ValidatedParams<f64>, frac: f64) -> f64 {
        let g = p.exponents().gamma;
        let upper = if g > 0.0 { g.min(1.0) } else { 1.0 };
        frac * upper * 0.999
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn super_zone_continuity((alpha, beta, nu, g1f, delta, d) in draw()) {
            let p = params(alpha, beta, 1.0, 1.0, 1.0, OperatorKind::Trace);
            let g1 = gamma1_for(&p, g1f);
            let b = BarrierSpec::explosive_super(&p, &unit(), delta, nu, g1, d).unwrap();
            let near = b.profile(&p, delta, Some(Piece::Near)).unwrap().v;
            let mid = b.profile(&p, delta, Some(Piece::Middle)).unwrap().v;
            prop_assert!((near - mid).abs() <= 1e-12 * near.abs().max(1.0));
            let e = b.far_constant(&p).unwrap();
            let mid2 = b.profile(&p, 2.0 * delta * (1.0 - 1e-9), Some(Piece::Middle)).unwrap().v;
            prop_assert!((mid2 - e).abs() <= 1e-12 * e.abs().max(1.0));
        }

        #[test]
        fn monotone_blow_up((alpha, beta, nu, g1f, delta, d) in draw(), s in 0.001f64..0.05) {
            let p = params(alpha, beta, 1.0, 1.0, 1.0, OperatorKind::Trace);
            let g1 = gamma1_for(&p, g1f);
            let dom = unit();
            let c = boundary_constant(&p, &dom, &p.exponents());
            // keep the correction small against the leading term so the sub envelope decreases
            let nu_sub = nu.min(0.5 * c);
            let sup = BarrierSpec::explosive_super(&p, &dom, delta, nu, g1, d).unwrap();
            let sub = BarrierSpec::explosive_sub(&p, &dom, s, delta, nu_sub, g1, d).unwrap();
            let int = BarrierSpec::interior_lower(&p, s, 0.1).unwrap();
            let xs: Vec<f64> = (1..=400).map(|k| k as f64 / 800.0).collect();
            for w in xs.windows(2) {
                let (x0, x1) = (w[0], w[1]);
                let tol = |v: f64| 1e-12 * v.abs().max(1.0);
                let a = eval_barrier(&sup, &p, &dom, x0).unwrap();
                prop_assert!(eval_barrier(&sup, &p, &dom, x1).unwrap() <= a + tol(a));
                let a = eval_barrier(&int, &p, &dom, x0).unwrap();
                prop_assert!(eval_barrier(&int, &p, &dom, x1).unwrap() <= a + tol(a));
                if x1 <= delta {
                    let a = eval_barrier(&sub, &p, &dom, x0).unwrap();
                    prop_assert!(eval_barrier(&sub, &p, &dom, x1).unwrap() <= a + tol(a));
                }
            }
        }

        #[test]
        fn sub_below_super_and_shift_monotone((alpha, beta, nu, g1f, delta, _d) in draw(), s in 0.001f64..0.05) {
            let p = params(alpha, beta, 1.0, 1.0, 1.0, OperatorKind::Trace);
            let g1 = gamma1_for(&p, g1f);
            let dom = unit();
            let c = boundary_constant(&p, &dom, &p.exponents());
            let nu = nu.min(0.5 * c);
            let big_d = c * phi(p.exponents().gamma, delta).v.abs();
            let sup = BarrierSpec::explosive_super(&p, &dom, delta, nu, g1, big_d).unwrap();
            let sub = BarrierSpec::explosive_sub(&p, &dom, s, delta, nu, g1, big_d).unwrap();
            let sub_half = BarrierSpec::explosive_sub(&p, &dom, s / 2.0, delta, nu, g1, big_d).unwrap();
            for k in 1..=500 {
                let x = k as f64 / 1000.0;
                let lo = eval_barrier(&sub, &p, &dom, x).unwrap();
                let hi = eval_barrier(&sup, &p, &dom, x).unwrap();
                prop_assert!(lo <= hi + 1e-12 * hi.abs().max(1.0));
                let lo2 = eval_barrier(&sub_half, &p, &dom, x).unwrap();
                prop_assert!(lo2 >= lo - 1e-12 * lo.abs().max(1.0));
            }
        }
    }
}
