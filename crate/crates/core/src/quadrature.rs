//! Adaptive Gauss–Kronrod integration in one and two dimensions.
//!
//! Every integral in the engine goes through [`integrate_1d`], [`integrate_2d`] or
//! [`integrate_semi_infinite`]. Panels are 21-point Kronrod rules with an embedded
//! 10-point Gauss rule; the panel with the largest error estimate is bisected until
//! the summed estimate drops below `max(abs_tol, rel_tol * |value|)` or the
//! subdivision budget runs out.
//!
//! Integrable endpoint singularities of the type `1/sqrt((x - a)(b - x))` are removed
//! with the substitution `x = a + (b - a) sin^2(theta)`, selected through
//! [`EndpointTransform::SqrtBothEnds`].

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};
use crate::scalar::Real;

/// Kronrod abscissae on [-1, 1], positive half, centre last.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights, matching the odd entries of `XGK`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Change of variables applied before the adaptive rule sees the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointTransform {
    #[default]
    None,
    /// `x = a + (b - a) sin^2(theta)`: regularises inverse square-root behaviour at both ends.
    SqrtBothEnds,
    /// Exponential map of a half line onto (0, 1]. Only meaningful for
    /// [`integrate_semi_infinite`], which applies it unconditionally; on a finite
    /// interval it is the identity.
    ExpDecayTail,
}

/// Tolerances and budget for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    pub endpoint_transform: EndpointTransform,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-9),
            abs_tol: T::lit(1e-12),
            max_subdivisions: 2000,
            endpoint_transform: EndpointTransform::None,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            endpoint_transform: EndpointTransform::None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > T::zero() && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_transform(mut self, transform: EndpointTransform) -> Self {
        self.endpoint_transform = transform;
        self
    }

    /// Same spec with both tolerances divided by `factor`.
    pub fn tightened(mut self, factor: T) -> Self {
        self.rel_tol = self.rel_tol / factor;
        self.abs_tol = self.abs_tol / factor;
        self
    }

    /// Error budget for an integral of size `value`.
    #[inline]
    pub fn tolerance(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Real> IntegralResult<T> {
    /// Turns a result that missed its tolerance into [`Error::NonConverged`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConverged {
                axis: None,
                value: self.value.to_f64_lossy(),
                error_estimate: self.error_estimate.to_f64_lossy(),
                evaluations: self.evaluations,
            })
        }
    }

    /// Multiplies value and error by a constant factor.
    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn checked<T: Real>(y: T, x: T) -> Result<T> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteEvaluation {
            axis: None,
            at: x.to_f64_lossy(),
        })
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn gk21<T, F>(f: &mut F, a: T, b: T) -> Result<Panel<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let f_center = checked(f(center)?, center)?;
    let mut res_g = T::zero();
    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let (x1, x2) = (center - dx, center + dx);
        let y1 = checked(f(x1)?, x1)?;
        let y2 = checked(f(x2)?, x2)?;
        fv1[j] = y1;
        fv2[j] = y2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (y1 + y2);
        res_abs = res_abs + w * (y1.abs() + y2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (y1 + y2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();

    if res_asc != T::zero() && err != T::zero() {
        let ratio = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * ratio.min(T::one());
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        err = err.max(fifty_eps * res_abs);
    }

    Ok(Panel {
        a,
        b,
        value,
        error: err,
    })
}

/// Globally adaptive bisection on `[a, b]` without any change of variables.
///
/// Never fails on a missed tolerance; the result carries `converged = false` instead.
pub(crate) fn adaptive<T, F>(mut f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut panels = vec![gk21(&mut f, a, b)?];
    let mut evaluations = 21;
    let min_width = T::lit(64.0) * T::epsilon() * a.abs().max(b.abs()).max(T::min_positive_value());

    loop {
        let (value, error) = panels
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.error));
        if error <= spec.tolerance(value) {
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                evaluations,
                converged: true,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| (p.b - p.a).abs() > min_width)
            .max_by(|(_, p), (_, q)| p.error.partial_cmp(&q.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);

        let Some(idx) = worst.filter(|_| panels.len() < spec.max_subdivisions) else {
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                evaluations,
                converged: false,
            });
        };

        let p = panels.swap_remove(idx);
        let mid = T::lit(0.5) * (p.a + p.b);
        panels.push(gk21(&mut f, p.a, mid)?);
        panels.push(gk21(&mut f, mid, p.b)?);
        evaluations += 42;
    }
}

/// Applies the spec's endpoint transform, then integrates adaptively.
pub(crate) fn adaptive_transformed<T, F>(
    mut f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "integration interval [{a}, {b}] must be finite with a < b"
        )));
    }
    match spec.endpoint_transform {
        EndpointTransform::SqrtBothEnds => {
            let width = b - a;
            let quarter = T::FRAC_PI_4();
            let mapped = move |theta: T| -> Result<T> {
                let (s, c) = theta.sin_cos();
                let jac = width * T::lit(2.0) * s * c;
                if jac == T::zero() {
                    return Ok(T::zero());
                }
                // Anchor on the nearer endpoint so 1 - x keeps its digits.
                let x = if theta <= quarter {
                    a + width * s * s
                } else {
                    b - width * c * c
                };
                Ok(f(x)? * jac)
            };
            adaptive(mapped, T::zero(), T::FRAC_PI_2(), spec)
        }
        EndpointTransform::None | EndpointTransform::ExpDecayTail => adaptive(f, a, b, spec),
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::NonConverged`] when the subdivision budget runs out and with
/// [`Error::NonFiniteEvaluation`] when `f` produces NaN or an infinity at a node.
pub fn integrate_1d<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    spec.validate()?;
    adaptive_transformed(|x| Ok(f(x)), a, b, spec)?.into_converged()
}

/// Fallible-integrand variant of [`integrate_1d`]; errors raised by `f` are passed through.
pub fn try_integrate_1d<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    spec.validate()?;
    adaptive_transformed(f, a, b, spec)?.into_converged()
}

/// Axis-aligned integration rectangle `x.0..x.1` by `y.0..y.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub x: (T, T),
    pub y: (T, T),
}

impl<T: Real> Rect<T> {
    pub fn new(x: (T, T), y: (T, T)) -> Self {
        Self { x, y }
    }

    pub fn unit_square() -> Self {
        Self::new((T::zero(), T::one()), (T::zero(), T::one()))
    }
}

/// Which variable the outer integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nesting {
    #[default]
    OuterX,
    OuterY,
}

/// Nested integration of `f(x, y)` over `domain` with the outer integral over `x`.
pub fn integrate_2d<T, F>(f: F, domain: Rect<T>, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    integrate_2d_nested(|x, y| Ok(f(x, y)), domain, spec, Nesting::OuterX)
}

/// General form of [`integrate_2d`]: fallible integrand and selectable nesting order.
///
/// Inner integrals run at a tolerance ten times tighter than the outer one and the
/// outer integral at four fifths of its budget. The inner contribution to the error,
/// bounded by the inner tolerances integrated over the outer axis, is added to the
/// outer estimate. That bound assumes the inner integrals do not change sign.
pub fn integrate_2d_nested<T, F>(
    f: F,
    domain: Rect<T>,
    spec: &QuadratureSpec<T>,
    nesting: Nesting,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(T, T) -> Result<T>,
{
    spec.validate()?;
    let (outer, inner) = match nesting {
        Nesting::OuterX => (domain.x, domain.y),
        Nesting::OuterY => (domain.y, domain.x),
    };
    let outer_width = outer.1 - outer.0;
    let mut inner_spec = spec.tightened(T::lit(10.0));
    inner_spec.abs_tol = inner_spec.abs_tol / outer_width.max(T::one());
    let outer_spec = spec.tightened(T::lit(1.25));

    let inner_evals = Cell::new(0usize);
    let outer_fn = |u: T| -> Result<T> {
        let r = adaptive_transformed(
            |v: T| match nesting {
                Nesting::OuterX => f(u, v),
                Nesting::OuterY => f(v, u),
            },
            inner.0,
            inner.1,
            &inner_spec,
        )
        .and_then(IntegralResult::into_converged)
        .map_err(|e| e.on_axis(Axis::Inner))?;
        inner_evals.set(inner_evals.get() + r.evaluations);
        Ok(r.value)
    };

    let outer_result =
        adaptive_transformed(outer_fn, outer.0, outer.1, &outer_spec).map_err(|e| e.on_axis(Axis::Outer))?;
    let inner_contribution =
        inner_spec.abs_tol * outer_width + inner_spec.rel_tol * outer_result.value.abs();
    let error_estimate = outer_result.error_estimate + inner_contribution;
    let result = IntegralResult {
        value: outer_result.value,
        error_estimate,
        evaluations: inner_evals.get(),
        converged: outer_result.converged && error_estimate <= spec.tolerance(outer_result.value),
    };
    result.into_converged().map_err(|e| e.on_axis(Axis::Outer))
}

/// Integrates `f` over `[a, inf)` for integrands decaying like `exp(-decay_scale * x)`.
///
/// The half line is mapped onto `(0, 1]` by `x = a - 2 ln(u) / decay_scale`; the factor
/// two makes the mapped integrand vanish at `u = 0` instead of approaching a constant.
/// The spec's endpoint transform then acts on the mapped unit interval.
pub fn integrate_semi_infinite<T, F>(
    f: F,
    a: T,
    decay_scale: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    try_integrate_semi_infinite(|x| Ok(f(x)), a, decay_scale, spec)
}

pub fn try_integrate_semi_infinite<T, F>(
    mut f: F,
    a: T,
    decay_scale: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    spec.validate()?;
    if !(decay_scale > T::zero() && decay_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "decay scale must be positive, got {decay_scale}"
        )));
    }
    let rate = decay_scale * T::lit(0.5);
    let mapped = move |u: T| -> Result<T> {
        if u <= T::zero() {
            return Ok(T::zero());
        }
        let x = a - u.ln() / rate;
        let y = f(x)?;
        // exp(-decay_scale x) beats 1/u; a zero from underflow is the exact limit.
        if y == T::zero() {
            return Ok(T::zero());
        }
        Ok(y / (rate * u))
    };
    let unit_spec = match spec.endpoint_transform {
        EndpointTransform::ExpDecayTail => spec.with_transform(EndpointTransform::None),
        _ => *spec,
    };
    adaptive_transformed(mapped, T::zero(), T::one(), &unit_spec)?.into_converged()
}
