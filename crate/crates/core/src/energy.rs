//! Vacuum energy per unit area between two half spaces.
//!
//! All integrals run over the scaled momentum `y = gamma L`, so that
//! `E L^3 = (1/4pi) int_0^inf y^2 ln(1 - N(y/L)^2 e^{-2y}) dy` and tolerances are
//! independent of the separation.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cache::ReflectionTable;
use crate::error::{Error, Result};
use crate::polylog::li4;
use crate::quadrature::{try_integrate_1d, try_integrate_semi_infinite, EndpointTransform, QuadratureSpec};
use crate::reflection::{n_total, n_zero_limit, EuclideanMomentum, ModelParams};
use crate::scalar::Real;

/// Gap width `L > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Separation<T>(T);

impl<T: Real> Separation<T> {
    pub fn new(l: T) -> Result<Self> {
        if l > T::zero() && l.is_finite() {
            Ok(Self(l))
        } else {
            Err(Error::Domain(format!("separation must be positive and finite, got {l}")))
        }
    }

    pub fn get(self) -> T {
        self.0
    }
}

/// Source of reflection-factor values `N(gamma)`.
pub trait ReflectionProvider<T: Real>: Sync {
    fn reflection(&self, gamma: T) -> Result<T>;

    /// Relative error of the returned values on top of the quadrature tolerance.
    fn relative_error(&self) -> T {
        T::zero()
    }
}

/// `N` frozen to a constant, for kernel tests.
#[derive(Debug, Clone, Copy)]
pub struct FrozenReflection<T>(pub T);

impl<T: Real> ReflectionProvider<T> for FrozenReflection<T> {
    fn reflection(&self, _gamma: T) -> Result<T> {
        Ok(self.0)
    }
}

/// Every value computed from scratch.
#[derive(Debug, Clone, Copy)]
pub struct DirectReflection<T> {
    pub params: ModelParams<T>,
    pub spec: QuadratureSpec<T>,
}

impl<T: Real> ReflectionProvider<T> for DirectReflection<T> {
    fn reflection(&self, gamma: T) -> Result<T> {
        Ok(n_total(EuclideanMomentum::new(gamma)?, &self.params, &self.spec)?.total)
    }
}

/// Values interpolated from a shared unit-parameter table.
#[derive(Debug, Clone)]
pub struct CachedReflection<T> {
    table: Arc<ReflectionTable<T>>,
    params: ModelParams<T>,
}

/// Scaled momenta outside `[Y_LOW, Y_HIGH]` fall back to direct evaluation.
const Y_LOW: f64 = 1e-6;
const Y_HIGH: f64 = 60.0;

impl<T: Real> CachedReflection<T> {
    pub fn new(table: Arc<ReflectionTable<T>>, params: ModelParams<T>) -> Self {
        Self { table, params }
    }

    /// Table covering every momentum an energy integral needs for separations in
    /// `[l_min, l_max]` at mass `mass`.
    pub fn table_for(mass: T, l_min: T, l_max: T, spec: &QuadratureSpec<T>) -> Result<Arc<ReflectionTable<T>>> {
        Self::table_for_masses(mass, mass, l_min, l_max, spec)
    }

    /// One table serving every mass in `[m_min, m_max]`.
    pub fn table_for_masses(
        m_min: T,
        m_max: T,
        l_min: T,
        l_max: T,
        spec: &QuadratureSpec<T>,
    ) -> Result<Arc<ReflectionTable<T>>> {
        let u_min = T::lit(Y_LOW) / (l_max * m_max);
        let u_max = T::lit(Y_HIGH) / (l_min * m_min);
        let target = (T::lit(100.0) * spec.rel_tol).max(T::lit(1e-7));
        Ok(Arc::new(ReflectionTable::build(u_min, u_max, spec, target)?))
    }

    pub fn table(&self) -> &ReflectionTable<T> {
        &self.table
    }
}

impl<T: Real> ReflectionProvider<T> for CachedReflection<T> {
    fn reflection(&self, gamma: T) -> Result<T> {
        self.table.value(gamma, &self.params)
    }

    fn relative_error(&self) -> T {
        self.table.max_relative_error()
    }
}

/// `gamma^2 ln(1 - N^2 e^{-2 gamma L})` on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandValue<T> {
    pub real: T,
    pub imag: T,
    pub unstable: bool,
}

pub fn energy_integrand<T: Real, P: ReflectionProvider<T> + ?Sized>(
    gamma: T,
    l: Separation<T>,
    provider: &P,
) -> Result<IntegrandValue<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("momentum must be positive, got {gamma}")));
    }
    let n = provider.reflection(gamma)?;
    let arg = T::one() - n * n * (-T::lit(2.0) * gamma * l.get()).exp();
    let g2 = gamma * gamma;
    let unstable = arg <= T::zero();
    Ok(IntegrandValue {
        real: g2 * arg.abs().ln(),
        imag: if unstable { g2 * T::PI() } else { T::zero() },
        unstable,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyResult<T> {
    pub real_part: T,
    /// `>= 0`
    pub imag_part: T,
    pub stable: bool,
    pub gamma_max_used: T,
    pub error_estimate: T,
    /// Momentum intervals where the logarithm's argument is negative.
    pub unstable_intervals: Vec<(T, T)>,
}

/// Points per decade of the sign scan of `1 - N^2 e^{-2y}`.
const SCAN_DENSITY: usize = 16;
const SCAN_TOP: f64 = 50.0;

/// Sign changes of `1 - N(y/L)^2 e^{-2y}` on `[Y_LOW, SCAN_TOP]`, refined by bisection in `ln y`.
fn sign_changes<T, F>(arg: &F) -> Result<(bool, Vec<T>)>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let lo = T::lit(Y_LOW).ln();
    let hi = T::lit(SCAN_TOP).ln();
    let steps = ((hi - lo) / T::LN_10() * T::from_usize_lossy(SCAN_DENSITY))
        .ceil()
        .to_f64_lossy() as usize;
    let h = (hi - lo) / T::from_usize_lossy(steps);
    let mut roots = Vec::new();
    let mut prev_s = lo;
    let mut prev = arg(lo.exp())?;
    let starts_negative = prev <= T::zero();
    for i in 1..=steps {
        let s = lo + h * T::from_usize_lossy(i);
        let v = arg(s.exp())?;
        if (v <= T::zero()) != (prev <= T::zero()) {
            let (mut a, mut b) = (prev_s, s);
            let neg_at_a = prev <= T::zero();
            for _ in 0..200 {
                let mid = (a + b) * T::lit(0.5);
                if mid <= a || mid >= b {
                    break;
                }
                if (arg(mid.exp())? <= T::zero()) == neg_at_a {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(((a + b) * T::lit(0.5)).exp());
        }
        prev_s = s;
        prev = v;
    }
    Ok((starts_negative, roots))
}

/// Energy per unit area for any reflection-factor source.
pub fn casimir_energy_with<T, P>(l: Separation<T>, provider: &P, spec: &QuadratureSpec<T>) -> Result<EnergyResult<T>>
where
    T: Real,
    P: ReflectionProvider<T> + ?Sized,
{
    spec.validate()?;
    let len = l.get();
    let two = T::lit(2.0);
    let arg = |y: T| -> Result<T> {
        let decay = (-two * y).exp();
        if decay == T::zero() {
            return Ok(T::one());
        }
        let n = provider.reflection(y / len)?;
        Ok(T::one() - n * n * decay)
    };
    let top = std::cell::Cell::new(T::zero());
    let integrand = |y: T| -> Result<T> {
        if y <= T::zero() {
            return Ok(T::zero());
        }
        let a = arg(y)?;
        if a != T::one() {
            top.set(top.get().max(y));
        }
        Ok(y * y * a.abs().ln())
    };

    let (starts_negative, roots) = sign_changes(&arg)?;
    let mut breaks = vec![T::zero()];
    breaks.extend(roots.iter().copied());
    let pieces = breaks.len();
    let piece_spec = {
        let mut s = spec.with_transform(EndpointTransform::SqrtBothEnds);
        s.abs_tol = s.abs_tol / T::from_usize_lossy(pieces);
        s
    };

    let mut total = T::zero();
    let mut error = T::zero();
    let mut magnitude = T::zero();
    for w in breaks.windows(2) {
        let r = try_integrate_1d(integrand, w[0], w[1], &piece_spec)?;
        total = total + r.value;
        error = error + r.error_estimate;
        magnitude = magnitude + r.value.abs();
    }
    let last = *breaks.last().expect("breaks start with zero");
    let tail = try_integrate_semi_infinite(integrand, last, two, &piece_spec)?;
    total = total + tail.value;
    error = error + tail.error_estimate;
    magnitude = magnitude + tail.value.abs();
    // d ln(1 - x) = -x/(1 - x) * 2 dN/N; bounded by twice the relative error of N on stable stretches.
    error = error + two * provider.relative_error() * magnitude;

    let mut unstable_y = Vec::new();
    let mut negative = starts_negative;
    for w in breaks.windows(2) {
        if negative {
            unstable_y.push((w[0], w[1]));
        }
        negative = !negative;
    }
    // A trailing negative stretch would need N to grow like e^y; the scan would have caught its end.
    let imag_scaled = unstable_y
        .iter()
        .fold(T::zero(), |acc, &(a, b)| acc + (b * b * b - a * a * a) / T::lit(12.0));

    let four_pi = T::lit(4.0) * T::PI();
    let l3 = len * len * len;
    Ok(EnergyResult {
        real_part: total / (four_pi * l3),
        imag_part: imag_scaled / l3,
        stable: !(imag_scaled >= spec.abs_tol),
        gamma_max_used: top.get() / len,
        error_estimate: error / (four_pi * l3),
        unstable_intervals: unstable_y.into_iter().map(|(a, b)| (a / len, b / len)).collect(),
    })
}

/// Energy per unit area with the reflection factor tabulated for this separation.
pub fn casimir_energy<T: Real>(l: Separation<T>, p: &ModelParams<T>, spec: &QuadratureSpec<T>) -> Result<EnergyResult<T>> {
    let table = CachedReflection::table_for(p.mass(), l.get(), l.get(), spec)?;
    casimir_energy_with(l, &CachedReflection::new(table, *p), spec)
}

/// Coefficient of `1/L^3` at large separation in the square-root coupling,
/// `-Li4(C^2) / (16 pi)` with `C` the zero-momentum reflection factor.
pub fn large_separation_limit<T: Real>(p: &ModelParams<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    let c = n_zero_limit(p, spec)?;
    let tol = T::epsilon() * T::lit(1e-2);
    Ok(-li4(c * c, tol)? / (T::lit(16.0) * T::PI()))
}

/// `-pi^2 / (1440 L^3)`.
pub fn dirichlet_reference<T: Real>(l: Separation<T>) -> T {
    let len = l.get();
    -T::PI() * T::PI() / (T::lit(1440.0) * len * len * len)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow<T> {
    pub lambda_l: T,
    pub eta: T,
    pub energy: EnergyResult<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCurve<T> {
    pub mu: T,
    pub rows: Vec<EnergyRow<T>>,
}

fn check_abscissae<T: Real>(abscissae: &[T]) -> Result<()> {
    if abscissae.is_empty() {
        return Err(Error::InvalidParameter("no separations requested".into()));
    }
    if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("separations must be strictly increasing".into()));
    }
    Separation::new(abscissae[0])?;
    Ok(())
}

/// Ratio to the Dirichlet energy for square-root coupling with `lambda0 = 1`, `m = mu`.
pub fn eta_curve<T: Real>(mu: T, abscissae: &[T], spec: &QuadratureSpec<T>) -> Result<EnergyCurve<T>> {
    let p = ModelParams::sqrt_momentum(T::one(), mu)?;
    check_abscissae(abscissae)?;
    let table = CachedReflection::table_for(mu, abscissae[0], abscissae[abscissae.len() - 1], spec)?;
    energy_curve_with_table(&p, abscissae, &table, spec)
}

/// Energies at every separation from one shared unit-parameter table, in parallel.
pub fn energy_curve_with_table<T: Real>(
    p: &ModelParams<T>,
    abscissae: &[T],
    table: &Arc<ReflectionTable<T>>,
    spec: &QuadratureSpec<T>,
) -> Result<EnergyCurve<T>> {
    check_abscissae(abscissae)?;
    let provider = CachedReflection::new(Arc::clone(table), *p);
    let rows = abscissae
        .par_iter()
        .map(|&x| {
            let l = Separation::new(x)?;
            let energy = casimir_energy_with(l, &provider, spec)?;
            Ok(EnergyRow {
                lambda_l: x,
                eta: energy.real_part / dirichlet_reference(l),
                energy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyCurve { mu: p.mass(), rows })
}
