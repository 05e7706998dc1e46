//! Small- and large-momentum expansions of the reflection factor, constant coupling.
//!
//! Brackets are normalised as `128 pi^2 gamma N / lambda^2` for the non-translational
//! part and the total, and `64 pi^2 gamma N / lambda^2` for the translational part.
//! The total is always assembled as `nt + t`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reflection::{CouplingMode, ModelParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallGamma,
    LargeGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Nt,
    T,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AsymptoticRegime {
    pub regime: Regime,
    pub component: Component,
}

impl AsymptoticRegime {
    pub const ALL: [AsymptoticRegime; 6] = [
        AsymptoticRegime::new(Regime::SmallGamma, Component::Nt),
        AsymptoticRegime::new(Regime::SmallGamma, Component::T),
        AsymptoticRegime::new(Regime::SmallGamma, Component::Total),
        AsymptoticRegime::new(Regime::LargeGamma, Component::Nt),
        AsymptoticRegime::new(Regime::LargeGamma, Component::T),
        AsymptoticRegime::new(Regime::LargeGamma, Component::Total),
    ];

    pub const fn new(regime: Regime, component: Component) -> Self {
        Self { regime, component }
    }
}

/// Power of the mass under the subleading small-momentum term `c gamma / m^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubleadingMassPower {
    /// `gamma / m^2`, the dimensionally consistent choice.
    #[default]
    Squared,
    Linear,
}

/// Expansion coefficients, each multiplying the term named in its field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticConstants<T> {
    /// `c / m` in the `nt` bracket at small momentum.
    pub nt_small: T,
    /// `c gamma / m^k` in the `nt` bracket at small momentum.
    pub nt_small_subleading: T,
    /// `c / gamma` in the `nt` bracket at large momentum.
    pub nt_large: T,
    /// `c / m` in the `t` bracket at small momentum.
    pub t_small: T,
    /// `c ln(gamma / m) / gamma` in the `t` bracket at large momentum.
    pub t_large_log: T,
    /// `c / gamma` in the `t` bracket at large momentum.
    pub t_large: T,
    pub mass_power: SubleadingMassPower,
}

impl<T: Real> AsymptoticConstants<T> {
    /// Published four- to six-digit values.
    pub fn printed() -> Self {
        Self {
            nt_small: -T::FRAC_PI_2(),
            nt_small_subleading: T::lit(4.0 / 3.0),
            nt_large: T::lit(-1.28987),
            #[allow(clippy::approx_constant)]
            t_small: T::lit(-0.7853),
            t_large_log: T::lit(-2.0),
            t_large: T::lit(0.6137),
            mass_power: SubleadingMassPower::Squared,
        }
    }

    /// Exact coefficients of `n_nt = n_mm + 2 n_mp` and of the renormalised `n_t`.
    ///
    /// `n_t` has the closed form `-lambda^2/(32 pi^2 gamma^2) int_0^1 asinh(gamma sqrt(x(1-x))/m) dx`,
    /// which gives `-pi/4` and `2 (1 - ln 2)`; the `nt` values follow from expanding
    /// the Feynman-parameter integrals.
    pub fn closed_form() -> Self {
        let pi = T::PI();
        let two = T::lit(2.0);
        Self {
            nt_small: -T::lit(1.5) * pi,
            nt_small_subleading: T::lit(10.0 / 3.0),
            nt_large: two - two * pi * pi / T::lit(3.0),
            t_small: -T::FRAC_PI_4(),
            t_large_log: -two,
            t_large: two * (T::one() - T::LN_2()),
            mass_power: SubleadingMassPower::Squared,
        }
    }

    pub fn with_mass_power(mut self, power: SubleadingMassPower) -> Self {
        self.mass_power = power;
        self
    }

    /// Large-momentum `1/gamma` coefficient of the total in the `128 pi^2` bracket.
    pub fn total_large(&self) -> T {
        T::lit(2.0) * self.t_large + self.nt_large
    }

    /// Small-momentum `1/m` coefficient of the total in the `128 pi^2` bracket.
    pub fn total_small(&self) -> T {
        T::lit(2.0) * self.t_small + self.nt_small
    }
}

/// Published combined constants, kept apart from the compositional total for cross-checks.
pub const PRINTED_TOTAL_SMALL_OVER_PI: f64 = -1.0;
pub const PRINTED_TOTAL_LARGE: f64 = -0.0624567;

/// Momenta counted as asymptotic: `gamma / m` below `SMALL_LIMIT` or above `LARGE_LIMIT`.
pub const SMALL_LIMIT: f64 = 1e-2;
pub const LARGE_LIMIT: f64 = 1e2;

/// Evaluates one expansion at `gamma` for constant coupling.
pub fn asymptotic_value<T: Real>(
    r: AsymptoticRegime,
    gamma: T,
    p: &ModelParams<T>,
    c: &AsymptoticConstants<T>,
) -> Result<T> {
    if p.coupling_mode() != CouplingMode::Constant {
        return Err(Error::InvalidParameter(
            "asymptotic expansions are stated for constant coupling".into(),
        ));
    }
    let m = p.mass();
    let ratio = gamma / m;
    let inside = match r.regime {
        Regime::SmallGamma => ratio > T::zero() && ratio < T::lit(SMALL_LIMIT),
        Regime::LargeGamma => ratio > T::lit(LARGE_LIMIT) && ratio.is_finite(),
    };
    if !inside {
        return Err(Error::Domain(format!(
            "gamma/m = {ratio} outside the {:?} validity range",
            r.regime
        )));
    }
    let l2 = p.lambda() * p.lambda();
    let pi2 = T::PI() * T::PI();
    let nt_pref = l2 / (T::lit(128.0) * pi2 * gamma);
    let t_pref = l2 / (T::lit(64.0) * pi2 * gamma);
    let nt = || match r.regime {
        Regime::SmallGamma => {
            let sub_mass = match c.mass_power {
                SubleadingMassPower::Squared => m * m,
                SubleadingMassPower::Linear => m,
            };
            nt_pref * (c.nt_small / m + c.nt_small_subleading * gamma / sub_mass)
        }
        Regime::LargeGamma => nt_pref * c.nt_large / gamma,
    };
    let t = || match r.regime {
        Regime::SmallGamma => t_pref * c.t_small / m,
        Regime::LargeGamma => t_pref * (c.t_large_log * ratio.ln() + c.t_large) / gamma,
    };
    Ok(match r.component {
        Component::Nt => nt(),
        Component::T => t(),
        Component::Total => nt() + t(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `v = a + b / gamma`, constant `a`.
    ConstOverGamma,
    /// `v = a ln(gamma) + b`, constant `b`.
    LogPlusConst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticFit<T> {
    pub constant: T,
    /// `b` for [`FitModel::ConstOverGamma`], `a` for [`FitModel::LogPlusConst`].
    pub slope: T,
    pub rms_residual: T,
    pub r_squared: T,
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub rms_residual: T,
    pub r_squared: T,
}

pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter("a line fit needs two or more paired samples".into()));
    }
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if !(sxx > T::zero()) {
        return Err(Error::InvalidParameter("abscissae of a line fit must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = xs
        .iter()
        .zip(ys)
        .fold(T::zero(), |a, (&x, &y)| {
            let r = y - (slope * x + intercept);
            a + r * r
        });
    let r_squared = if syy > T::zero() { T::one() - ss_res / syy } else { T::one() };
    Ok(LinearFit {
        slope,
        intercept,
        rms_residual: (ss_res / n).sqrt(),
        r_squared,
    })
}

/// Relative residual above which a fit is rejected by [`fit_asymptotic_constant`].
pub const DEFAULT_FIT_TOLERANCE: f64 = 1e-2;

/// Extracts the constant term from `(gamma / m, bracket value)` samples.
pub fn fit_asymptotic_constant<T: Real>(samples: &[(T, T)], model: FitModel) -> Result<AsymptoticFit<T>> {
    fit_asymptotic_constant_with_tolerance(samples, model, T::lit(DEFAULT_FIT_TOLERANCE))
}

/// As [`fit_asymptotic_constant`], rejecting fits whose rms residual exceeds
/// `tolerance * max |value|`.
pub fn fit_asymptotic_constant_with_tolerance<T: Real>(
    samples: &[(T, T)],
    model: FitModel,
    tolerance: T,
) -> Result<AsymptoticFit<T>> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "an asymptotic fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(g, v)| !(g > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidParameter("fit samples need positive momenta and finite values".into()));
    }
    let xs: Vec<T> = samples
        .iter()
        .map(|&(g, _)| match model {
            FitModel::ConstOverGamma => g.recip(),
            FitModel::LogPlusConst => g.ln(),
        })
        .collect();
    let ys: Vec<T> = samples.iter().map(|&(_, v)| v).collect();
    let line = linear_fit(&xs, &ys)?;
    let scale = ys.iter().fold(T::zero(), |a, &y| a.max(y.abs()));
    let limit = tolerance * scale;
    if line.rms_residual > limit {
        return Err(Error::FitUnstable {
            rms_residual: line.rms_residual.to_f64_lossy(),
            tolerance: limit.to_f64_lossy(),
        });
    }
    Ok(AsymptoticFit {
        constant: line.intercept,
        slope: line.slope,
        rms_residual: line.rms_residual,
        r_squared: line.r_squared,
    })
}
