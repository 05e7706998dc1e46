//! Reflection factor of a half space filled with the confined scalar field.
//!
//! The factor splits into a boundary-induced part `n_nt = n_mm + 2 n_mp` and a
//! translation-invariant part `n_t = 2 (N1 + N2 + N3)` assembled from three ordered
//! sectors of the Feynman-parameter integral. The logarithmic UV divergence of the
//! first sector is removed by subtracting the `delta = 0` integrand point by point,
//! which enforces a vanishing renormalised polarisation at zero momentum.
//!
//! All quantities are evaluated at Euclidean momentum `gamma > 0` and carry the
//! coupling as an overall factor: `lambda^2` in constant mode, `lambda0^2 * gamma`
//! when the coupling grows like the square root of the momentum.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    adaptive_transformed, integrate_2d_nested, EndpointTransform, Nesting, QuadratureSpec, Rect,
};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    /// `lambda` is a fixed coupling with dimension of inverse length.
    #[default]
    Constant,
    /// `lambda(gamma) = lambda0 * sqrt(gamma)`.
    SqrtMomentum,
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingMode::Constant => f.write_str("constant"),
            CouplingMode::SqrtMomentum => f.write_str("sqrt"),
        }
    }
}

/// Physical inputs: coupling amplitude, mass of the confined field, coupling mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    lambda: T,
    mass: T,
    coupling_mode: CouplingMode,
}

impl<T: Real> ModelParams<T> {
    /// The massless limit is singular and rejected.
    pub fn new(lambda: T, mass: T, coupling_mode: CouplingMode) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be finite, got {lambda}")));
        }
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Self {
            lambda,
            mass,
            coupling_mode,
        })
    }

    pub fn constant(lambda: T, mass: T) -> Result<Self> {
        Self::new(lambda, mass, CouplingMode::Constant)
    }

    pub fn sqrt_momentum(lambda0: T, mass: T) -> Result<Self> {
        Self::new(lambda0, mass, CouplingMode::SqrtMomentum)
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn coupling_mode(&self) -> CouplingMode {
        self.coupling_mode
    }

    /// Squared coupling multiplying every component at momentum `gamma`.
    pub fn coupling_sq(&self, gamma: T) -> T {
        match self.coupling_mode {
            CouplingMode::Constant => self.lambda * self.lambda,
            CouplingMode::SqrtMomentum => self.lambda * self.lambda * gamma,
        }
    }

    /// Same mass, unit constant coupling.
    pub fn unit_coupling(&self) -> Self {
        Self {
            lambda: T::one(),
            mass: self.mass,
            coupling_mode: CouplingMode::Constant,
        }
    }
}

/// Euclidean transverse momentum, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EuclideanMomentum<T>(T);

impl<T: Real> EuclideanMomentum<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma > T::zero() && gamma.is_finite() {
            Ok(Self(gamma))
        } else {
            Err(Error::Domain(format!("gamma must be positive and finite, got {gamma}")))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// A value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

impl<T: Real> Estimate<T> {
    fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }
}

/// Per-component reflection factor at one momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionBreakdown<T> {
    pub gamma: T,
    pub n_mm: T,
    pub n_mp: T,
    /// `n_mm + 2 n_mp`
    pub n_nt: T,
    pub n_t_sectors: [T; 3],
    /// `2 (N1 + N2 + N3)`
    pub n_t: T,
    /// `n_nt + n_t`
    pub total: T,
    pub error_estimate: T,
}

fn pi_sq<T: Real>() -> T {
    T::PI() * T::PI()
}

fn with_sqrt_ends<T: Real>(spec: &QuadratureSpec<T>) -> QuadratureSpec<T> {
    spec.with_transform(EndpointTransform::SqrtBothEnds)
}

/// Integrand of `n_mm` over the Feynman parameter `x`, in a cancellation-free form.
///
/// `gamma/6 - int sqrt(w) sqrt(w gamma^2 + m^2)` with `w = x(1-x)` equals
/// `-m^2 int sqrt(w) / (gamma sqrt(w) + sqrt(w gamma^2 + m^2))`, which keeps full
/// relative precision when `gamma >> m`.
fn mm_integrand<T: Real>(x: T, gamma: T, mass: T) -> T {
    let s = (x * (T::one() - x)).max(T::zero()).sqrt();
    s / (gamma * s + (s * s * gamma * gamma + mass * mass).sqrt())
}

/// `N_{--}` for the coupling taken at face value (`lambda^2`, whatever the mode).
pub fn n_minus_minus<T: Real>(
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    let unit = unit_n_minus_minus(gamma.get(), p.mass(), spec)?;
    Ok(unit.scaled(p.lambda() * p.lambda()))
}

fn unit_n_minus_minus<T: Real>(gamma: T, mass: T, spec: &QuadratureSpec<T>) -> Result<Estimate<T>> {
    spec.validate()?;
    let r = adaptive_transformed(
        |x| Ok(mm_integrand(x, gamma, mass)),
        T::zero(),
        T::one(),
        &with_sqrt_ends(spec),
    )?
    .into_converged()?;
    let pref = T::one() / (T::lit(32.0) * pi_sq::<T>() * gamma);
    Ok(Estimate {
        value: r.value * pref,
        error: r.error_estimate * pref,
    })
}

/// Integrand of `N_{-+}` at Feynman parameter `x` and angle variable `mu`.
///
/// Written with `sqrt(x(1-x))` pulled through so the `m^2 / (x(1-x))` blow-up at the
/// endpoints becomes an explicit zero.
pub fn mp_integrand<T: Real>(x: T, mu: T, gamma: T, mass: T) -> T {
    let w = x * (T::one() - x);
    if w <= T::zero() {
        return T::zero();
    }
    let b = mu * mu * x + (T::one() - x);
    let sw = w.sqrt();
    let sb = b.sqrt();
    sw / (sb * (gamma * sw + ((gamma * gamma * w + mass * mass) * b).sqrt()))
}

/// `N_{-+}`: the double integral over `mu in [-1, 1]` and `x in [0, 1]`.
pub fn n_minus_plus<T: Real>(
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    let unit = unit_n_minus_plus(gamma.get(), p.mass(), spec)?;
    Ok(unit.scaled(p.lambda() * p.lambda()))
}

fn unit_n_minus_plus<T: Real>(gamma: T, mass: T, spec: &QuadratureSpec<T>) -> Result<Estimate<T>> {
    // Even in mu: integrate over [0, 1] and double.
    let r = integrate_2d_nested(
        |x, mu| Ok(mp_integrand(x, mu, gamma, mass)),
        Rect::unit_square(),
        &with_sqrt_ends(spec),
        Nesting::OuterX,
    )?;
    let pref = -T::lit(2.0) / (T::lit(64.0) * pi_sq::<T>() * gamma);
    Ok(Estimate {
        value: r.value * pref,
        error: r.error_estimate * pref.abs(),
    })
}

/// Boundary-induced part `n_mm + 2 n_mp`.
pub fn n_nt<T: Real>(
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    let mm = n_minus_minus(gamma, p, spec)?;
    let mp = n_minus_plus(gamma, p, spec)?;
    let two = T::lit(2.0);
    Ok(Estimate {
        value: mm.value + two * mp.value,
        error: mm.error + two * mp.error,
    })
}

/// Ordered Feynman-parameter sector of the translation-invariant part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// `a1 < a2 < a3`, carries the UV divergence at `t2 = 0`.
    One,
    /// `a1 < a3 < a2`
    Two,
    /// `a3 < a1 < a2`
    Three,
}

impl Sector {
    pub const ALL: [Sector; 3] = [Sector::One, Sector::Two, Sector::Three];

    pub fn index(self) -> usize {
        match self {
            Sector::One => 1,
            Sector::Two => 2,
            Sector::Three => 3,
        }
    }
}

impl TryFrom<usize> for Sector {
    type Error = Error;

    fn try_from(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Sector::One),
            2 => Ok(Sector::Two),
            3 => Ok(Sector::Three),
            _ => Err(Error::Domain(format!("sector index must be 1, 2 or 3, got {i}"))),
        }
    }
}

/// Every sector integrand has the shape `pref / sqrt(d (alpha d + k))` with `d` the
/// only place `delta` enters, linearly: `d = d0 + slope * delta`.
struct SectorShape<T> {
    pref: T,
    d0: T,
    slope: T,
    alpha: T,
    k: T,
}

fn sector_shape<T: Real>(sector: Sector, t1: T, t2: T, gamma: T, mass: T) -> SectorShape<T> {
    let one = T::one();
    let g2 = gamma * gamma;
    let m2 = mass * mass;
    match sector {
        Sector::One => {
            let s = one + t1;
            SectorShape {
                pref: one / (s * t2),
                d0: s,
                slope: t1 * t2,
                alpha: g2,
                k: t2 * s * s * m2,
            }
        }
        Sector::Two => {
            let s = one + t1 * t2;
            SectorShape {
                pref: t2.sqrt() / s,
                d0: s,
                slope: t1,
                alpha: t2 * g2,
                k: s * s * m2,
            }
        }
        Sector::Three => {
            let s = one + t2;
            SectorShape {
                pref: t2.sqrt() / s,
                d0: t1 * s,
                slope: one,
                alpha: t2 * g2,
                k: s * s * m2,
            }
        }
    }
}

fn check_open_square<T: Real>(t1: T, t2: T) -> Result<()> {
    let inside = |t: T| t > T::zero() && t < T::one();
    if inside(t1) && inside(t2) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "sector variables must lie in the open unit square, got ({t1}, {t2})"
        )))
    }
}

/// Sector integrand without the `lambda^2 / (64 pi^2 gamma)` prefactor.
///
/// `delta = 1` is the bare integrand, `delta = 0` the zero-momentum subtraction.
pub fn sector_integrand<T: Real>(
    sector: Sector,
    t1: T,
    t2: T,
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    delta: T,
) -> Result<T> {
    check_open_square(t1, t2)?;
    let sh = sector_shape(sector, t1, t2, gamma.get(), p.mass());
    let d = sh.d0 + sh.slope * delta;
    Ok(sh.pref / (d * (sh.alpha * d + sh.k)).sqrt())
}

/// `sector_integrand(delta = 1) - sector_integrand(delta = 0)`, formed without
/// cancellation: `1/sqrt(u) - 1/sqrt(v) = (v - u) / (sqrt(u) sqrt(v) (sqrt(u) + sqrt(v)))`
/// with `v - u` expanded analytically. For sector one the factor `t2` in `v - u`
/// cancels the `1/t2` of the prefactor, leaving a finite limit at `t2 -> 0`.
pub fn subtracted_sector_integrand<T: Real>(sector: Sector, t1: T, t2: T, gamma: T, mass: T) -> T {
    let sh = sector_shape(sector, t1, t2, gamma, mass);
    let d1 = sh.d0 + sh.slope;
    let d0 = sh.d0;
    let u = d1 * (sh.alpha * d1 + sh.k);
    let v = d0 * (sh.alpha * d0 + sh.k);
    let (su, sv) = (u.sqrt(), v.sqrt());
    // v - u = -(d1 - d0) (alpha (d1 + d0) + k), and d1 - d0 = slope
    let numer = sh.alpha * (d1 + d0) + sh.k;
    let scaled_pref = match sector {
        Sector::One => t1 / (T::one() + t1),
        Sector::Two | Sector::Three => sh.pref * sh.slope,
    };
    -scaled_pref * numer / (su * sv * (su + sv))
}

/// Which sector integrand to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorIntegrand<T> {
    /// Renormalised: `delta = 1` minus `delta = 0`.
    Subtracted,
    /// Unsubtracted integrand at fixed `delta`.
    Bare { delta: T },
}

/// Sector integral over `t1 in (0, 1)`, `t2 in (t2_cutoff, 1)`, without prefactor.
///
/// A positive cutoff switches the `t2` integration to the variable `ln t2`, which
/// resolves the `1/t2` growth of the bare first sector.
pub fn sector_integral<T: Real>(
    sector: Sector,
    kind: SectorIntegrand<T>,
    t2_cutoff: T,
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    if !(t2_cutoff >= T::zero() && t2_cutoff < T::one()) {
        return Err(Error::Domain(format!("t2 cutoff must lie in [0, 1), got {t2_cutoff}")));
    }
    let (g, m) = (gamma.get(), p.mass());
    let f = move |t1: T, t2: T| -> T {
        match kind {
            SectorIntegrand::Subtracted => subtracted_sector_integrand(sector, t1, t2, g, m),
            SectorIntegrand::Bare { delta } => {
                let sh = sector_shape(sector, t1, t2, g, m);
                let d = sh.d0 + sh.slope * delta;
                sh.pref / (d * (sh.alpha * d + sh.k)).sqrt()
            }
        }
    };
    let spec = with_sqrt_ends(spec);
    let r = if t2_cutoff > T::zero() {
        let lo = t2_cutoff.ln();
        integrate_2d_nested(
            |t1, s: T| {
                let t2 = s.exp();
                Ok(f(t1, t2) * t2)
            },
            Rect::new((T::zero(), T::one()), (lo, T::zero())),
            &spec,
            Nesting::OuterX,
        )?
    } else {
        integrate_2d_nested(|t1, t2| Ok(f(t1, t2)), Rect::unit_square(), &spec, Nesting::OuterX)?
    };
    Ok(Estimate {
        value: r.value,
        error: r.error_estimate,
    })
}

/// Renormalised translation-invariant part together with its three sector
/// contributions `N1, N2, N3` (each already multiplied by its prefactor).
pub fn n_t_sectors<T: Real>(
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<([T; 3], T)> {
    let lam2 = p.lambda() * p.lambda();
    let (values, error) = unit_n_t_sectors(gamma, p.mass(), spec)?;
    Ok((values.map(|v| v * lam2), error * lam2.abs()))
}

fn unit_n_t_sectors<T: Real>(
    gamma: EuclideanMomentum<T>,
    mass: T,
    spec: &QuadratureSpec<T>,
) -> Result<([T; 3], T)> {
    let unit = ModelParams::constant(T::one(), mass)?;
    let pref = T::one() / (T::lit(64.0) * pi_sq::<T>() * gamma.get());
    let mut values = [T::zero(); 3];
    let mut error = T::zero();
    for (slot, sector) in values.iter_mut().zip(Sector::ALL) {
        let r = sector_integral(sector, SectorIntegrand::Subtracted, T::zero(), gamma, &unit, spec)?;
        *slot = r.value * pref;
        error = error + r.error * pref;
    }
    Ok((values, T::lit(2.0) * error))
}

/// `n_t = 2 (N1 + N2 + N3)` with the zero-momentum subtraction applied under the integral.
pub fn n_t_renormalized<T: Real>(
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    let (sectors, error) = n_t_sectors(gamma, p, spec)?;
    Ok(Estimate {
        value: T::lit(2.0) * (sectors[0] + sectors[1] + sectors[2]),
        error,
    })
}

/// Full breakdown at one momentum, with the coupling mode applied.
pub fn n_total<T: Real>(
    gamma: EuclideanMomentum<T>,
    p: &ModelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<ReflectionBreakdown<T>> {
    spec.validate()?;
    let g = gamma.get();
    let m = p.mass();
    let c = p.coupling_sq(g);

    let mm = unit_n_minus_minus(g, m, spec)?;
    let mp = unit_n_minus_plus(g, m, spec)?;
    let (sectors, t_err) = unit_n_t_sectors(gamma, m, spec)?;

    let two = T::lit(2.0);
    let n_mm = c * mm.value;
    let n_mp = c * mp.value;
    let n_nt = n_mm + two * n_mp;
    let n_t_sectors = sectors.map(|s| c * s);
    let n_t = two * (n_t_sectors[0] + n_t_sectors[1] + n_t_sectors[2]);
    Ok(ReflectionBreakdown {
        gamma: g,
        n_mm,
        n_mp,
        n_nt,
        n_t_sectors,
        n_t,
        total: n_nt + n_t,
        error_estimate: c.abs() * (mm.error + two * mp.error + t_err),
    })
}

/// Limit of the reflection factor at vanishing momentum for the square-root coupling.
///
/// Polynomial (Richardson) extrapolation through `gamma / m = 1e-2, 1e-3, 1e-4`; the
/// linear estimate from the two smallest momenta must agree with the quadratic one.
pub fn n_zero_limit<T: Real>(p: &ModelParams<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    if p.coupling_mode() != CouplingMode::SqrtMomentum {
        return Err(Error::InvalidParameter(
            "the zero-momentum limit is finite only for the square-root coupling".into(),
        ));
    }
    if p.lambda() == T::zero() {
        return Ok(T::zero());
    }
    let hs = [T::lit(1e-2), T::lit(1e-3), T::lit(1e-4)].map(|r| r * p.mass());
    let mut ys = [T::zero(); 3];
    let mut err = T::zero();
    for (y, h) in ys.iter_mut().zip(hs) {
        let b = n_total(EuclideanMomentum::new(h)?, p, spec)?;
        *y = b.total;
        err = err.max(b.error_estimate);
    }
    let linear = (hs[1] * ys[2] - hs[2] * ys[1]) / (hs[1] - hs[2]);
    let quadratic = neville_at_zero(&hs, &ys);
    let tol = T::lit(1e-5) * quadratic.abs() + T::lit(10.0) * err;
    if (linear - quadratic).abs() > tol {
        return Err(Error::ExtrapolationUnstable {
            estimates: vec![linear.to_f64_lossy(), quadratic.to_f64_lossy()],
        });
    }
    Ok(quadratic)
}

/// Value at zero of the interpolating polynomial through `(xs, ys)`.
pub(crate) fn neville_at_zero<T: Real>(xs: &[T], ys: &[T]) -> T {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    fn unit() -> ModelParams<f64> {
        ModelParams::constant(1.0, 1.0).unwrap()
    }

    fn g(x: f64) -> EuclideanMomentum<f64> {
        EuclideanMomentum::new(x).unwrap()
    }

    #[test]
    fn rejects_massless_and_nonpositive_momentum() {
        assert!(ModelParams::constant(1.0, 0.0).is_err());
        assert!(ModelParams::constant(1.0, -1.0).is_err());
        assert!(ModelParams::constant(f64::NAN, 1.0).is_err());
        assert!(EuclideanMomentum::new(0.0).is_err());
        assert!(EuclideanMomentum::new(-1.0).is_err());
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let p = ModelParams::constant(0.0, 1.0).unwrap();
        let b = n_total(g(1.0), &p, &spec()).unwrap();
        assert_eq!(b.total, 0.0);
        assert_eq!(b.n_mm, 0.0);
        assert_eq!(b.n_mp, 0.0);
        assert_eq!(b.n_t, 0.0);
        assert_eq!(n_minus_minus(g(1.0), &p, &spec()).unwrap().value, 0.0);
        assert_eq!(n_minus_plus(g(1.0), &p, &spec()).unwrap().value, 0.0);
        let s = ModelParams::sqrt_momentum(0.0, 1.0).unwrap();
        assert_eq!(n_zero_limit(&s, &spec()).unwrap(), 0.0);
    }

    #[test]
    fn mm_small_momentum_expansion() {
        // 32 pi^2 gamma n_mm -> pi/8 - gamma/6 for m = 1
        let gamma = 1e-4;
        let v = n_minus_minus(g(gamma), &unit(), &spec()).unwrap().value;
        let scaled = 32.0 * PI * PI * gamma * v;
        assert_relative_eq!(scaled, PI / 8.0 - gamma / 6.0, max_relative = 1e-7);
    }

    #[test]
    fn mm_matches_textbook_form() {
        // -(1/(32 pi^2 gamma m^2)) [gamma/6 - int sqrt(w) sqrt(w gamma^2 + m^2)]
        let (gamma, m) = (1.7, 0.6);
        let p = ModelParams::constant(1.0, m).unwrap();
        let s = spec().with_transform(EndpointTransform::SqrtBothEnds);
        let inner = crate::quadrature::integrate_1d(
            |x: f64| {
                let w = x * (1.0 - x);
                w.sqrt() * (w * gamma * gamma + m * m).sqrt()
            },
            0.0,
            1.0,
            &s,
        )
        .unwrap()
        .value;
        let textbook = -(gamma / 6.0 - inner) / (32.0 * PI * PI * gamma * m * m);
        let v = n_minus_minus(g(gamma), &p, &spec()).unwrap().value;
        assert_relative_eq!(v, textbook, max_relative = 1e-10);
    }

    #[test]
    fn mp_integrand_even_in_mu_and_vanishing_at_ends() {
        for &(x, mu, gamma, m) in &[(0.3, 0.7, 1.0, 1.0), (0.9, 0.1, 5.0, 0.2), (0.01, 0.99, 0.1, 3.0)] {
            assert_eq!(mp_integrand(x, mu, gamma, m), mp_integrand(x, -mu, gamma, m));
        }
        assert_eq!(mp_integrand(0.0, 0.5, 1.0, 1.0), 0.0);
        assert_eq!(mp_integrand(1.0, 0.5, 1.0, 1.0), 0.0);
        assert!(mp_integrand(1e-300f64, 0.5, 1.0, 1.0).is_finite());
    }

    #[test]
    fn sector_integrand_substitutions() {
        // sector 3 at t1 = t2 = 1/2, delta = 1: d3 = 1/4 + 1/2 + 1 = 7/4
        let sh = sector_shape(Sector::Three, 0.5, 0.5, 1.0, 1.0);
        assert_relative_eq!(sh.d0 + sh.slope, 1.75, epsilon = 1e-15);
        // sector 2, delta = 0, t1 = t2 = 1: (t1 t2 + 1)^2 m^2 = 4 m^2
        let sh = sector_shape(Sector::Two, 1.0, 1.0, 0.0, 1.0);
        assert_relative_eq!(sh.k, 4.0, epsilon = 1e-15);
        assert_relative_eq!(sh.d0, 2.0, epsilon = 1e-15);
        // full integrand of sector 3 from its printed form with the (1 + t2) factor
        let (t1, t2, gam, m): (f64, f64, f64, f64) = (0.3, 0.6, 1.3, 0.8);
        let d3 = t1 * t2 + t1 + 1.0;
        let direct = t2.sqrt() / ((1.0 + t2) * d3.sqrt()) / (t2 * d3 * gam * gam + (t2 + 1.0).powi(2) * m * m).sqrt();
        let p = ModelParams::constant(1.0, m).unwrap();
        let v = sector_integrand(Sector::Three, t1, t2, g(gam), &p, 1.0).unwrap();
        assert_relative_eq!(v, direct, max_relative = 1e-14);
    }

    #[test]
    fn sector_integrand_rejects_closed_square() {
        for (t1, t2) in [(0.0, 0.5), (0.5, 1.0), (1.2, 0.3), (0.4, -0.1)] {
            assert!(sector_integrand(Sector::One, t1, t2, g(1.0), &unit(), 1.0).is_err());
        }
        assert!(Sector::try_from(4).is_err());
        assert_eq!(Sector::try_from(2).unwrap(), Sector::Two);
    }

    #[test]
    fn subtraction_matches_naive_difference_away_from_cancellation() {
        for sector in Sector::ALL {
            for &(t1, t2) in &[(0.2, 0.7), (0.9, 0.4), (0.5, 0.05)] {
                let a = sector_integrand(sector, t1, t2, g(2.0), &unit(), 1.0).unwrap();
                let b = sector_integrand(sector, t1, t2, g(2.0), &unit(), 0.0).unwrap();
                let s = subtracted_sector_integrand(sector, t1, t2, 2.0, 1.0);
                assert_relative_eq!(s, a - b, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn subtracted_first_sector_has_finite_t2_limit() {
        let t1 = 0.4;
        let a = subtracted_sector_integrand(Sector::One, t1, 1e-8, 1.0, 1.0);
        let b = subtracted_sector_integrand(Sector::One, t1, 1e-9, 1.0, 1.0);
        // t2 -> 0 limit: -t1 / ((1 + t1)^3 gamma)
        let limit = -t1 / (1.0f64 + t1).powi(3);
        assert_relative_eq!(a, limit, max_relative = 1e-6);
        assert_relative_eq!(b, limit, max_relative = 1e-7);
        // while each bare term diverges like 1/t2
        let bare = sector_integrand(Sector::One, t1, 1e-9, g(1.0), &unit(), 1.0).unwrap();
        assert!(bare > 1e8);
    }

    #[test]
    fn breakdown_identities_hold_exactly() {
        let p = ModelParams::constant(0.7, 1.3).unwrap();
        let b = n_total(g(2.5), &p, &spec()).unwrap();
        assert_eq!(b.n_nt, b.n_mm + 2.0 * b.n_mp);
        assert_eq!(b.n_t, 2.0 * (b.n_t_sectors[0] + b.n_t_sectors[1] + b.n_t_sectors[2]));
        assert_eq!(b.total, b.n_nt + b.n_t);
        assert!(b.error_estimate >= 0.0);
    }

    #[test]
    fn component_functions_agree_with_breakdown() {
        let p = ModelParams::constant(1.0, 1.0).unwrap();
        let b = n_total(g(0.8), &p, &spec()).unwrap();
        let nt = n_nt(g(0.8), &p, &spec()).unwrap();
        let t = n_t_renormalized(g(0.8), &p, &spec()).unwrap();
        assert_relative_eq!(nt.value, b.n_nt, max_relative = 1e-14);
        assert_relative_eq!(t.value, b.n_t, max_relative = 1e-14);
    }

    #[test]
    fn sqrt_mode_multiplies_by_gamma() {
        let c = ModelParams::constant(1.3, 1.0).unwrap();
        let s = ModelParams::sqrt_momentum(1.3, 1.0).unwrap();
        let gamma = 3.0;
        let bc = n_total(g(gamma), &c, &spec()).unwrap();
        let bs = n_total(g(gamma), &s, &spec()).unwrap();
        assert_relative_eq!(bs.total, gamma * bc.total, max_relative = 1e-14);
    }

    #[test]
    fn zero_limit_requires_sqrt_mode() {
        assert!(matches!(n_zero_limit(&unit(), &spec()), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn neville_reproduces_quadratics() {
        let xs = [0.3, 0.2, 0.05];
        let ys = xs.map(|x: f64| 1.5 - 2.0 * x + 7.0 * x * x);
        assert_relative_eq!(neville_at_zero(&xs, &ys), 1.5, epsilon = 1e-13);
    }
}
