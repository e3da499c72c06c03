//! Problem definition: parameters, exponents, domains, forcing and the pointwise operator.

use crate::error::{Error, Result};
use crate::num::{neg, odd_pow, pos, Real};

/// Uniformly elliptic operator acting on radial/1-D Hessians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Trace,
    PucciPlus,
    PucciMinus,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Trace => "trace",
            OperatorKind::PucciPlus => "pucci_plus",
            OperatorKind::PucciMinus => "pucci_minus",
        }
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "trace" => Ok(OperatorKind::Trace),
            "pucci_plus" => Ok(OperatorKind::PucciPlus),
            "pucci_minus" => Ok(OperatorKind::PucciMinus),
            other => Err(format!("unknown operator `{other}`")),
        }
    }
}

/// Exponents, ellipticity and discount of `-|u'|^α F(D²u) + |u'|^β + λ|u|^α u = f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationParams<T> {
    pub alpha: T,
    pub beta: T,
    pub a: T,
    pub big_a: T,
    pub lambda: T,
    pub operator: OperatorKind,
}

/// Parameters that passed [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams<T>(EquationParams<T>);

impl<T: Real> ValidatedParams<T> {
    pub fn get(&self) -> &EquationParams<T> {
        &self.0
    }

    /// Same problem with another discount; `lambda` must be nonnegative.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        validate_params(EquationParams { lambda, ..self.0 })
    }

    pub fn exponents(&self) -> Exponents<T> {
        exponents_unchecked(self.0.alpha, self.0.beta)
    }

    /// `F(e ⊗ e)` for a unit vector `e`.
    pub fn rank_one_value(&self) -> T {
        match self.0.operator {
            OperatorKind::Trace | OperatorKind::PucciMinus => self.0.a,
            OperatorKind::PucciPlus => self.0.big_a,
        }
    }

    /// `F` evaluated with this problem's operator and constants.
    pub fn f_op(&self, m: T, t: T, mult: usize) -> T {
        apply_operator(self.0.operator, self.0.a, self.0.big_a, m, t, mult)
    }
}

impl<T> std::ops::Deref for ValidatedParams<T> {
    type Target = EquationParams<T>;
    fn deref(&self) -> &EquationParams<T> {
        &self.0
    }
}

pub fn validate_params<T: Real>(p: EquationParams<T>) -> Result<ValidatedParams<T>> {
    let finite = [p.alpha, p.beta, p.a, p.big_a, p.lambda].iter().all(|v| v.is_finite());
    if !(p.alpha > -T::one()) || !p.alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(p.alpha.as_f64()));
    }
    let lo = p.alpha + T::one();
    let hi = p.alpha + T::lit(2.0);
    if !(p.beta > lo && p.beta <= hi) {
        return Err(Error::BetaOutOfRange { beta: p.beta.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
    }
    if !finite || !(p.a > T::zero()) || p.big_a < p.a {
        return Err(Error::BadEllipticity { a: p.a.as_f64(), big_a: p.big_a.as_f64() });
    }
    if !(p.lambda >= T::zero()) {
        return Err(Error::NegativeLambda(p.lambda.as_f64()));
    }
    if p.operator == OperatorKind::Trace && p.a != p.big_a {
        return Err(Error::TraceNeedsEqualConstants { a: p.a.as_f64(), big_a: p.big_a.as_f64() });
    }
    Ok(ValidatedParams(p))
}

/// Blow-up, Lipschitz and interior-gradient rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents<T> {
    pub gamma: T,
    pub tau: T,
    pub grad_rate: T,
}

pub fn compute_exponents<T: Real>(alpha: T, beta: T) -> Result<Exponents<T>> {
    let probe = EquationParams { alpha, beta, a: T::one(), big_a: T::one(), lambda: T::zero(), operator: OperatorKind::Trace };
    validate_params(probe)?;
    Ok(exponents_unchecked(alpha, beta))
}

fn exponents_unchecked<T: Real>(alpha: T, beta: T) -> Exponents<T> {
    let gap = beta - alpha - T::one();
    let two = T::lit(2.0);
    // β = α+2 must give γ = 0 exactly.
    let gamma = if beta == alpha + two { T::zero() } else { pos((two + alpha - beta) / gap) };
    Exponents { gamma, tau: (beta + neg(alpha)) / gap, grad_rate: T::one() / gap }
}

/// Radial operator value with `mult` tangential eigenvalues equal to `t`.
#[allow(non_snake_case)]
pub fn eval_F<T: Real>(op: OperatorKind, a: T, big_a: T, m: T, t: T, mult: usize) -> Result<T> {
    if op == OperatorKind::Trace && a != big_a {
        return Err(Error::TraceNeedsEqualConstants { a: a.as_f64(), big_a: big_a.as_f64() });
    }
    Ok(apply_operator(op, a, big_a, m, t, mult))
}

fn apply_operator<T: Real>(op: OperatorKind, a: T, big_a: T, m: T, t: T, mult: usize) -> T {
    let k = T::count(mult);
    match op {
        OperatorKind::Trace => a * (m + k * t),
        OperatorKind::PucciPlus => big_a * pos(m) - a * neg(m) + k * (big_a * pos(t) - a * neg(t)),
        OperatorKind::PucciMinus => a * pos(m) - big_a * neg(m) + k * (a * pos(t) - big_a * neg(t)),
    }
}

/// Interval `(lo, hi)` or ball of radius `radius` in dimension `dim` (radial coordinate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain1D<T> {
    Interval { lo: T, hi: T },
    Ball { radius: T, dim: usize },
}

impl<T: Real> Domain1D<T> {
    pub fn interval(lo: T, hi: T) -> Result<Self> {
        let d = Domain1D::Interval { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(radius: T, dim: usize) -> Result<Self> {
        let d = Domain1D::Ball { radius, dim };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain1D::Interval { lo, hi } if lo.is_finite() && hi.is_finite() && lo < hi => Ok(()),
            Domain1D::Interval { .. } => Err(Error::InvalidDomain("interval needs lo < hi".into())),
            Domain1D::Ball { radius, dim } if radius > T::zero() && radius.is_finite() && dim >= 1 => Ok(()),
            Domain1D::Ball { .. } => Err(Error::InvalidDomain("ball needs radius > 0 and dim >= 1".into())),
        }
    }

    /// Coordinate span covered by a grid: `[lo, hi]` or `[0, radius]`.
    pub fn span(&self) -> (T, T) {
        match *self {
            Domain1D::Interval { lo, hi } => (lo, hi),
            Domain1D::Ball { radius, .. } => (T::zero(), radius),
        }
    }

    /// Interval width or ball radius.
    pub fn extent(&self) -> T {
        let (lo, hi) = self.span();
        hi - lo
    }

    /// Largest distance to the boundary.
    pub fn inradius(&self) -> T {
        match *self {
            Domain1D::Interval { lo, hi } => (hi - lo) / T::lit(2.0),
            Domain1D::Ball { radius, .. } => radius,
        }
    }

    pub fn contains_closed(&self, x: T) -> bool {
        let (lo, hi) = self.span();
        x >= lo && x <= hi
    }

    /// Distance to the boundary of a point of the closed coordinate span.
    pub fn distance(&self, x: T) -> Result<T> {
        if !self.contains_closed(x) {
            return Err(Error::OutsideDomain(x.as_f64()));
        }
        Ok(match *self {
            Domain1D::Interval { lo, hi } => (x - lo).min(hi - x),
            Domain1D::Ball { radius, .. } => radius - x,
        })
    }

    /// Number of tangential directions in the radial Hessian.
    pub fn tangential_mult(&self) -> usize {
        match *self {
            Domain1D::Interval { .. } => 0,
            Domain1D::Ball { dim, .. } => dim - 1,
        }
    }

    /// `Ω_δ = {d > δ}`.
    pub fn inner(&self, delta: T) -> Result<Self> {
        if !(delta >= T::zero() && delta < self.inradius()) {
            return Err(Error::InvalidDomain(format!("collar width {delta} too large")));
        }
        Ok(match *self {
            Domain1D::Interval { lo, hi } => Domain1D::Interval { lo: lo + delta, hi: hi - delta },
            Domain1D::Ball { radius, dim } => Domain1D::Ball { radius: radius - delta, dim },
        })
    }

    /// Whether `other ⊆ self` (same kind).
    pub fn contains(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Domain1D::Interval { lo, hi }, Domain1D::Interval { lo: l2, hi: h2 }) => lo <= l2 && h2 <= hi,
            (Domain1D::Ball { radius, dim }, Domain1D::Ball { radius: r2, dim: d2 }) => dim == d2 && r2 <= radius,
            _ => false,
        }
    }

    /// Whether `other`'s closure lies inside `self` (same kind).
    pub fn compactly_contains(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Domain1D::Interval { lo, hi }, Domain1D::Interval { lo: l2, hi: h2 }) => lo < l2 && h2 < hi,
            (Domain1D::Ball { radius, dim }, Domain1D::Ball { radius: r2, dim: d2 }) => dim == d2 && r2 < radius,
            _ => false,
        }
    }
}

/// Smooth part of the forcing, in the grid coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum RegularForcing<T> {
    Constant(T),
    /// `c[0] + c[1] x + c[2] x² + ...`
    Polynomial(Vec<T>),
    /// `offset + amplitude·cos(frequency·x)`
    Cosine {
        offset: T,
        amplitude: T,
        frequency: T,
    },
}

/// `f(x) = regular(x) + κ d(x)^{-q}` with declared growth margin `γ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing<T> {
    pub regular: RegularForcing<T>,
    pub singular_kappa: T,
    pub singular_q: T,
    pub gamma0: T,
}

impl<T: Real> Forcing<T> {
    pub fn constant(c: T) -> Self {
        Forcing { regular: RegularForcing::Constant(c), singular_kappa: T::zero(), singular_q: T::zero(), gamma0: T::zero() }
    }

    pub fn is_bounded(&self) -> bool {
        self.singular_kappa == T::zero()
    }

    /// Checks coefficient signs and the growth condition for the given exponents.
    pub fn validate(&self, p: &ValidatedParams<T>) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidForcing(m.into()));
        if !(self.singular_kappa >= T::zero()) {
            return bad("singular_kappa must be >= 0");
        }
        if !(self.singular_q >= T::zero()) {
            return bad("singular_q must be >= 0");
        }
        if !(self.gamma0 >= T::zero()) {
            return bad("gamma0 must be >= 0");
        }
        let finite = match &self.regular {
            RegularForcing::Constant(c) => c.is_finite(),
            RegularForcing::Polynomial(c) => c.iter().all(|v| v.is_finite()),
            RegularForcing::Cosine { offset, amplitude, frequency } => offset.is_finite() && amplitude.is_finite() && frequency.is_finite(),
        };
        if !finite {
            return bad("regular part has non-finite coefficients");
        }
        if self.singular_kappa > T::zero() {
            let limit = p.beta / (p.beta - p.alpha - T::one());
            if !(self.singular_q + self.gamma0 < limit) {
                return Err(Error::InvalidForcing(format!(
                    "growth condition needs q + gamma0 < {limit}, got {}",
                    self.singular_q + self.gamma0
                )));
            }
        }
        Ok(())
    }

    pub fn regular_at(&self, x: T) -> T {
        match &self.regular {
            RegularForcing::Constant(c) => *c,
            RegularForcing::Polynomial(c) => c.iter().rev().fold(T::zero(), |acc, &ci| acc * x + ci),
            RegularForcing::Cosine { offset, amplitude, frequency } => *offset + *amplitude * (*frequency * x).cos(),
        }
    }

    /// Value at `x`; the singular part is undefined on the boundary.
    pub fn eval(&self, dom: &Domain1D<T>, x: T) -> Result<T> {
        let d = dom.distance(x)?;
        self.eval_with_distance(x, d)
    }

    pub(crate) fn eval_with_distance(&self, x: T, d: T) -> Result<T> {
        let mut v = self.regular_at(x);
        if self.singular_kappa > T::zero() {
            if d <= T::zero() {
                return Err(Error::SingularForcingAtNode(x.as_f64()));
            }
            v = v + self.singular_kappa * d.powf(-self.singular_q);
        }
        Ok(v)
    }

    /// `f + μ`.
    pub fn shifted(&self, mu: T) -> Self {
        let regular = match &self.regular {
            RegularForcing::Constant(c) => RegularForcing::Constant(*c + mu),
            RegularForcing::Polynomial(c) => {
                let mut c = c.clone();
                if c.is_empty() {
                    c.push(T::zero());
                }
                c[0] = c[0] + mu;
                RegularForcing::Polynomial(c)
            }
            RegularForcing::Cosine { offset, amplitude, frequency } => {
                RegularForcing::Cosine { offset: *offset + mu, amplitude: *amplitude, frequency: *frequency }
            }
        };
        Forcing { regular, ..self.clone() }
    }
}

/// Boundary prefactor `C` (constant on intervals and balls).
pub fn boundary_constant<T: Real>(p: &ValidatedParams<T>, dom: &Domain1D<T>, e: &Exponents<T>) -> T {
    let _ = dom;
    let cf = p.rank_one_value();
    if e.gamma > T::zero() {
        ((e.gamma + T::one()) * cf).powf(e.grad_rate) / e.gamma
    } else {
        cf
    }
}

/// `-|grad|^α F + |grad|^β + λ odd_pow(u) - f`.
#[allow(non_snake_case)]
pub fn eval_G<T: Real>(p: &ValidatedParams<T>, u: T, grad: T, F_val: T, f_val: T) -> Result<T> {
    if p.alpha < T::zero() && grad == T::zero() && F_val != T::zero() {
        return Err(Error::SingularGradient);
    }
    let g = grad.abs();
    let diffusion = if F_val == T::zero() { T::zero() } else { g.powf(p.alpha) * F_val };
    Ok(-diffusion + g.powf(p.beta) + p.lambda * odd_pow(u, p.alpha) - f_val)
}

/// Uniqueness regime of the explosive problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    Unknown,
}

impl Uniqueness {
    pub fn name(self) -> &'static str {
        match self {
            Uniqueness::Unique => "unique",
            Uniqueness::Unknown => "unknown",
        }
    }
}

pub fn uniqueness_status<T: Real>(p: &ValidatedParams<T>, f: &Forcing<T>) -> Uniqueness {
    if p.alpha >= T::zero() {
        return Uniqueness::Unique;
    }
    let threshold = (T::one() - p.alpha - p.alpha * p.alpha) / (T::one() - p.alpha);
    let gamma = p.exponents().gamma;
    if p.beta > threshold && f.gamma0 > -p.alpha * gamma {
        Uniqueness::Unique
    } else {
        Uniqueness::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(alpha: f64, beta: f64, a: f64, big_a: f64, lambda: f64, operator: OperatorKind) -> EquationParams<f64> {
        EquationParams { alpha, beta, a, big_a, lambda, operator }
    }

    fn trace(alpha: f64, beta: f64, lambda: f64) -> ValidatedParams<f64> {
        validate_params(params(alpha, beta, 1.0, 1.0, lambda, OperatorKind::Trace)).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_params(params(0.0, 2.0, 1.0, 1.0, 0.0, OperatorKind::Trace)).is_ok());
        assert!(matches!(validate_params(params(0.0, 1.0, 1.0, 1.0, 0.0, OperatorKind::Trace)), Err(Error::BetaOutOfRange { .. })));
        assert!(matches!(validate_params(params(-0.5, 1.75, 1.0, 1.0, 0.0, OperatorKind::Trace)), Err(Error::BetaOutOfRange { .. })));
        assert!(matches!(validate_params(params(-1.0, 0.5, 1.0, 1.0, 0.0, OperatorKind::Trace)), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(validate_params(params(0.0, 2.0, 2.0, 1.0, 0.0, OperatorKind::PucciPlus)), Err(Error::BadEllipticity { .. })));
        assert!(matches!(validate_params(params(0.0, 2.0, 1.0, 1.0, -1.0, OperatorKind::Trace)), Err(Error::NegativeLambda(_))));
        assert!(matches!(
            validate_params(params(0.0, 2.0, 1.0, 2.0, 0.0, OperatorKind::Trace)),
            Err(Error::TraceNeedsEqualConstants { .. })
        ));
    }

    #[test]
    fn exponent_examples() {
        let e = compute_exponents(0.0_f64, 2.0).unwrap();
        assert_eq!((e.gamma, e.tau, e.grad_rate), (0.0, 2.0, 1.0));
        let e = compute_exponents(0.0, 1.5).unwrap();
        assert_eq!((e.gamma, e.tau, e.grad_rate), (1.0, 3.0, 2.0));
        let e = compute_exponents(-0.5_f64, 1.25).unwrap();
        assert!((e.gamma - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.tau - 7.0 / 3.0).abs() < 1e-15);
        assert!((e.grad_rate - 4.0 / 3.0).abs() < 1e-15);
        assert!(compute_exponents(0.0, 3.0).is_err());
    }

    #[test]
    fn operator_examples() {
        assert_eq!(eval_F(OperatorKind::PucciPlus, 1.0, 2.0, 1.0, 0.0, 0).unwrap(), 2.0);
        assert_eq!(eval_F(OperatorKind::PucciPlus, 1.0, 2.0, -1.0, 0.5, 2).unwrap(), 1.0);
        assert_eq!(eval_F(OperatorKind::Trace, 1.0, 1.0, 3.0, -1.0, 2).unwrap(), 1.0);
        assert!(eval_F(OperatorKind::Trace, 1.0, 2.0, 3.0, -1.0, 2).is_err());
    }

    #[test]
    fn boundary_constant_examples() {
        let iv = Domain1D::interval(0.0, 1.0).unwrap();
        let p = trace(0.0, 1.5, 1.0);
        assert_eq!(boundary_constant(&p, &iv, &p.exponents()), 4.0);
        let p = trace(0.0, 2.0, 1.0);
        assert_eq!(boundary_constant(&p, &iv, &p.exponents()), 1.0);
        let ball = Domain1D::ball(1.0, 3).unwrap();
        let p = validate_params(params(0.0, 2.0, 1.0, 3.0, 1.0, OperatorKind::PucciPlus)).unwrap();
        assert_eq!(boundary_constant(&p, &ball, &p.exponents()), 3.0);
    }

    #[test]
    fn g_examples() {
        let p = trace(0.0, 2.0, 1.0);
        assert_eq!(eval_G(&p, 0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(eval_G(&p, 2.0, 1.0, 3.0, 0.0).unwrap(), 0.0);
        let p = trace(1.0, 2.5, 0.0);
        assert!((eval_G(&p, 5.0, 2.0, 1.0, -1.0).unwrap() - 4.656854249492381).abs() < 1e-12);
        let p = trace(-0.5, 1.25, 1.0);
        assert_eq!(eval_G(&p, 0.0, 0.0, 1.0, 0.0), Err(Error::SingularGradient));
        assert_eq!(eval_G(&p, 0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn uniqueness_examples() {
        let mut f = Forcing::constant(0.0);
        assert_eq!(uniqueness_status(&trace(0.0, 2.0, 1.0), &f), Uniqueness::Unique);
        f.gamma0 = 0.2;
        assert_eq!(uniqueness_status(&trace(-0.5, 1.25, 1.0), &f), Uniqueness::Unique);
        f.gamma0 = 0.0;
        assert_eq!(uniqueness_status(&trace(-0.5, 1.25, 1.0), &f), Uniqueness::Unknown);
    }

    #[test]
    fn forcing_growth_and_boundary() {
        let p = trace(0.0, 1.5, 1.0);
        let dom = Domain1D::interval(0.0, 1.0).unwrap();
        let mut f = Forcing::constant(1.0);
        f.singular_kappa = 1.0;
        f.singular_q = 2.5;
        assert!(f.validate(&p).is_ok());
        f.gamma0 = 0.5;
        assert!(f.validate(&p).is_err());
        assert!(matches!(f.eval(&dom, 0.0), Err(Error::SingularForcingAtNode(_))));
        assert!(matches!(f.eval(&dom, 2.0), Err(Error::OutsideDomain(_))));
        let g = Forcing { regular: RegularForcing::Polynomial(vec![1.0, 2.0, 3.0]), ..Forcing::constant(0.0) };
        assert_eq!(g.eval(&dom, 0.5).unwrap(), 1.0 + 1.0 + 0.75);
        assert_eq!(g.shifted(2.0).eval(&dom, 0.5).unwrap(), 4.75);
    }

    fn admissible() -> impl Strategy<Value = (f64, f64)> {
        (-0.95f64..3.0, 0.001f64..=1.0).prop_map(|(alpha, frac)| (alpha, alpha + 1.0 + frac))
    }

    fn op_kind() -> impl Strategy<Value = OperatorKind> {
        prop_oneof![Just(OperatorKind::Trace), Just(OperatorKind::PucciPlus), Just(OperatorKind::PucciMinus)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn exponent_identities((alpha, beta) in admissible()) {
            let e = compute_exponents(alpha, beta).unwrap();
            prop_assert!(e.gamma >= 0.0);
            prop_assert!((e.gamma - e.grad_rate * (2.0 + alpha - beta)).abs() <= 1e-9 * (1.0 + e.gamma));
            prop_assert!((e.tau * (beta - alpha - 1.0) - (beta + (-alpha).max(0.0))).abs() <= 1e-9 * (1.0 + e.tau));
        }

        #[test]
        fn operator_homogeneity(op in op_kind(), a in 0.1f64..3.0, k in 1.0f64..3.0, m in -10.0f64..10.0,
                                t in -10.0f64..10.0, mult in 0usize..4, s in 0.01f64..100.0) {
            let big_a = if op == OperatorKind::Trace { a } else { a * k };
            let lhs = eval_F(op, a, big_a, s * m, s * t, mult).unwrap();
            let rhs = s * eval_F(op, a, big_a, m, t, mult).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }

        #[test]
        fn ellipticity_sandwich(op in op_kind(), a in 0.1f64..3.0, k in 1.0f64..3.0, m2 in -10.0f64..10.0,
                                t2 in -10.0f64..10.0, dm in 0.0f64..5.0, dt in 0.0f64..5.0, mult in 0usize..4) {
            let big_a = if op == OperatorKind::Trace { a } else { a * k };
            let (m1, t1) = (m2 + dm, t2 + dt);
            let diff = eval_F(op, a, big_a, m1, t1, mult).unwrap() - eval_F(op, a, big_a, m2, t2, mult).unwrap();
            let lo = eval_F(OperatorKind::PucciMinus, a, big_a, dm, dt, mult).unwrap();
            let hi = eval_F(OperatorKind::PucciPlus, a, big_a, dm, dt, mult).unwrap();
            prop_assert!(lo <= diff + 1e-9 && diff <= hi + 1e-9);
        }

        #[test]
        fn boundary_constant_monotone((alpha, beta) in admissible(), a in 0.1f64..2.0, k1 in 1.0f64..3.0, k2 in 1.0f64..3.0) {
            let dom = Domain1D::interval(0.0, 1.0).unwrap();
            let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
            let c = |op, a, big_a| {
                let p = validate_params(params(alpha, beta, a, big_a, 1.0, op)).unwrap();
                boundary_constant(&p, &dom, &p.exponents())
            };
            prop_assert!(c(OperatorKind::PucciPlus, a, a * lo) <= c(OperatorKind::PucciPlus, a, a * hi) * (1.0 + 1e-12));
            let big_a = 3.0 * a;
            prop_assert!(c(OperatorKind::PucciMinus, a * lo / 3.0, big_a) <= c(OperatorKind::PucciMinus, a * hi / 3.0, big_a) * (1.0 + 1e-12));
        }
    }
}
