//! Numerical acceptance checks, shared by the `verify` command and the acceptance tests.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::asymptotics::{
    fit_asymptotic_constant, linear_fit, AsymptoticConstants, FitModel, PRINTED_TOTAL_LARGE,
};
use crate::energy::{
    casimir_energy_with, energy_curve_with_table, large_separation_limit, CachedReflection, FrozenReflection,
    Separation,
};
use crate::error::Result;
use crate::oracle::monte_carlo_n_minus_plus;
use crate::polylog::li4;
use crate::quadrature::QuadratureSpec;
use crate::reflection::{
    n_minus_minus, n_minus_plus, n_total, sector_integral, EuclideanMomentum, ModelParams, Sector,
    SectorIntegrand,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: &str, description: &str, measured: f64, target: f64, tolerance: f64, passed: bool) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            measured,
            target,
            tolerance,
            passed,
            detail: String::new(),
        }
    }

    /// `|measured - target| <= tolerance * |target|`.
    fn relative(id: &str, description: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        let passed = (measured - target).abs() <= tolerance * target.abs();
        Self::new(id, description, measured, target, tolerance, passed)
    }

    /// `|measured - target| <= tolerance`.
    fn absolute(id: &str, description: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Self::new(id, description, measured, target, tolerance, passed)
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<4} {}: measured {:.7e}, target {:.7e}, tol {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            self.measured,
            self.target,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub spec: QuadratureSpec<f64>,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            spec: QuadratureSpec::default(),
            mc_samples: 10_000_000,
            seed: 20_240_917,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

pub const CRITERIA: std::ops::RangeInclusive<u32> = 1..=12;

const PI2: f64 = PI * PI;

fn unit() -> ModelParams<f64> {
    ModelParams::constant(1.0, 1.0).expect("unit parameters are valid")
}

fn momentum(g: f64) -> Result<EuclideanMomentum<f64>> {
    EuclideanMomentum::new(g)
}

/// `norm pi^2 gamma^k N`, with `k = 1` at small momentum and `k = 2` at large momentum.
fn bracket(g: f64, value: f64, per_gamma: i32, norm: f64) -> f64 {
    norm * PI2 * g.powi(per_gamma) * value
}

const LARGE: [f64; 3] = [1e2, 1e3, 1e4];
/// Log fits sit a decade deeper: the `ln(gamma)/gamma^2` correction at `1e2` tilts a
/// three-point line by a few parts in a thousand.
const LOG_FIT: [f64; 3] = [1e3, 1e4, 1e5];

/// Runs one numbered criterion; some produce several outcomes.
pub fn criterion(n: u32, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let spec = &cfg.spec;
    let p = unit();
    match n {
        1 => {
            let samples = LARGE
                .iter()
                .map(|&g| Ok((g, bracket(g, n_total(momentum(g)?, &p, spec)?.n_nt, 2, 128.0))))
                .collect::<Result<Vec<_>>>()?;
            let fit = fit_asymptotic_constant(&samples, FitModel::ConstOverGamma)?;
            let exact = AsymptoticConstants::<f64>::closed_form().nt_large;
            Ok(vec![CheckOutcome::relative(
                "1",
                "n_nt large-gamma constant",
                fit.constant,
                -1.28987,
                5e-3,
            )
            .with_detail(format!("closed form of n_mm + 2 n_mp is 2 - 2 pi^2/3 = {exact:.6}"))])
        }
        2 => {
            let g = 1e-3;
            let v = bracket(g, n_total(momentum(g)?, &p, spec)?.n_nt, 1, 128.0);
            Ok(vec![CheckOutcome::relative("2", "n_nt small-gamma bracket", v, -PI / 2.0, 5e-3)
                .with_detail("closed form of n_mm + 2 n_mp is -3 pi/2")])
        }
        3 => {
            let g = 1e-3;
            let v = bracket(g, n_total(momentum(g)?, &p, spec)?.n_t, 1, 64.0);
            let dev = (v + PI / 4.0) / (PI / 4.0);
            #[allow(clippy::approx_constant)]
            Ok(vec![CheckOutcome::relative("3", "n_t small-gamma bracket", v, -0.7853, 1e-2)
                .with_detail(format!("relative deviation from -pi/4: {dev:.2e}"))])
        }
        4 => {
            let samples = LOG_FIT
                .iter()
                .map(|&g| Ok((g, bracket(g, n_total(momentum(g)?, &p, spec)?.n_t, 2, 64.0))))
                .collect::<Result<Vec<_>>>()?;
            let fit = fit_asymptotic_constant(&samples, FitModel::LogPlusConst)?;
            Ok(vec![
                CheckOutcome::absolute("4a", "n_t large-gamma log slope", fit.slope, -2.0, 0.02),
                CheckOutcome::relative("4b", "n_t large-gamma intercept", fit.constant, 0.6137, 2e-2),
            ])
        }
        5 => {
            let mut nt = Vec::new();
            let mut t = Vec::new();
            let mut total = Vec::new();
            for &g in &LOG_FIT {
                let b = n_total(momentum(g)?, &p, spec)?;
                nt.push((g, bracket(g, b.n_nt, 2, 128.0)));
                t.push((g, bracket(g, b.n_t, 2, 64.0)));
                total.push((g, bracket(g, b.total, 2, 128.0)));
            }
            let nt_fit = fit_asymptotic_constant(&nt, FitModel::ConstOverGamma)?;
            let t_fit = fit_asymptotic_constant(&t, FitModel::LogPlusConst)?;
            let total_fit = fit_asymptotic_constant(&total, FitModel::LogPlusConst)?;
            let composed = 2.0 * t_fit.constant + nt_fit.constant;
            let printed = AsymptoticConstants::<f64>::printed().total_large();
            Ok(vec![
                CheckOutcome::absolute("5a", "total large-gamma log slope", total_fit.slope, -4.0, 0.04),
                CheckOutcome::relative(
                    "5b",
                    "total large-gamma intercept",
                    total_fit.constant,
                    PRINTED_TOTAL_LARGE,
                    2e-2,
                ),
                CheckOutcome::absolute(
                    "5c",
                    "2 t-intercept + nt-constant vs total intercept",
                    composed,
                    total_fit.constant,
                    2e-3,
                )
                .with_detail(format!("printed parts give {printed:.6} against {PRINTED_TOTAL_LARGE}")),
            ])
        }
        6 => {
            let g = 1e-3;
            let v = bracket(g, n_total(momentum(g)?, &p, spec)?.total, 1, 128.0);
            let k = subleading_mass_power(spec)?;
            Ok(vec![
                CheckOutcome::relative("6a", "total small-gamma bracket", v, -PI, 1e-2)
                    .with_detail("closed form with n_nt = n_mm + 2 n_mp is -2 pi"),
                CheckOutcome::absolute("6b", "subleading mass power", k, 2.0, 0.05)
                    .with_detail("gamma/m^k term of the small-gamma bracket"),
            ])
        }
        7 => {
            let g = momentum(1.0)?;
            let cuts = [1e-3, 1e-4, 1e-5, 1e-6];
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &eps in &cuts {
                let r = sector_integral(Sector::One, SectorIntegrand::Bare { delta: 1.0 }, eps, g, &p, spec)?;
                xs.push((1.0 / eps).ln());
                ys.push(r.value);
            }
            let line = linear_fit(&xs, &ys)?;
            let sub = |eps: f64| sector_integral(Sector::One, SectorIntegrand::Subtracted, eps, g, &p, spec);
            let a = sub(1e-6)?;
            let b = sub(1e-8)?;
            let change = ((a.value - b.value) / b.value).abs();
            Ok(vec![
                CheckOutcome::new(
                    "7a",
                    "bare sector-1 log growth, R^2",
                    line.r_squared,
                    0.999,
                    0.0,
                    line.r_squared > 0.999 && line.slope > 0.0,
                )
                .with_detail(format!("slope {:.6}", line.slope)),
                CheckOutcome::new(
                    "7b",
                    "subtracted sector-1 relative change, cutoff 1e-6 to 1e-8",
                    change,
                    0.0,
                    1e-8,
                    change < 1e-8,
                )
                .with_detail("the subtracted integrand is finite at t2 = 0, so the dropped strip is O(cutoff)"),
            ])
        }
        8 => {
            let mut out = Vec::new();
            let table = CachedReflection::table_for(1.0, 0.5, 5.0, spec)?;
            let provider = CachedReflection::new(table, p);
            for l in [0.5, 1.0, 5.0] {
                let e = casimir_energy_with(Separation::new(l)?, &provider, spec)?;
                out.push(
                    CheckOutcome::new(
                        &format!("8.{}", out.len() + 1),
                        &format!("constant coupling unstable at L = {l}"),
                        e.imag_part,
                        0.0,
                        0.0,
                        !e.stable && e.imag_part > 0.0,
                    )
                    .with_detail(format!("stable = {}", e.stable)),
                );
            }
            Ok(out)
        }
        9 => {
            let e = casimir_energy_with(Separation::new(1.0)?, &FrozenReflection(0.5), spec)?;
            let target = -li4(0.25, 1e-20)? / (16.0 * PI);
            Ok(vec![CheckOutcome::relative("9", "frozen-kernel energy", e.real_part, target, 1e-9)])
        }
        10 => {
            let mu = 0.01;
            let sqrt = ModelParams::sqrt_momentum(1.0, mu)?;
            let limit = large_separation_limit(&sqrt, spec)?;
            let ls = [1e2, 1e3, 1e4, 1e5];
            let table = CachedReflection::table_for(mu, ls[0], ls[3], spec)?;
            let provider = CachedReflection::new(table, sqrt);
            let mut gaps = Vec::new();
            for &l in &ls {
                let e = casimir_energy_with(Separation::new(l)?, &provider, spec)?;
                gaps.push(((e.real_part * l * l * l - limit) / limit).abs());
            }
            let monotone = gaps[1] > gaps[2] && gaps[2] > gaps[3];
            let last = gaps[3];
            Ok(vec![
                CheckOutcome::new("10a", "E L^3 vs large-separation limit at L = 1e5", last, 0.0, 2e-2, last <= 2e-2)
                    .with_detail(format!("limit {limit:.6e}")),
                CheckOutcome::new("10b", "plateau gap decreasing over last three L", gaps[1], 0.0, 0.0, monotone)
                    .with_detail(format!("gaps {:.3e}, {:.3e}, {:.3e}", gaps[1], gaps[2], gaps[3])),
            ])
        }
        11 => {
            let mus = [0.001, 0.01, 0.5, 1.0];
            let grid: Vec<f64> = (0..=12).map(|i| 10f64.powf(-1.0 + 0.25 * i as f64)).collect();
            let table = CachedReflection::table_for_masses(mus[0], mus[3], grid[0], grid[12], spec)?;
            let mut curves = Vec::new();
            for &mu in &mus {
                let sqrt = ModelParams::sqrt_momentum(1.0, mu)?;
                curves.push(energy_curve_with_table(&sqrt, &grid, &table, spec)?);
            }
            let mut violations = 0usize;
            for i in 0..grid.len() {
                for w in curves.windows(2) {
                    if !(w[0].rows[i].eta > w[1].rows[i].eta) {
                        violations += 1;
                    }
                }
            }
            let negatives = curves.iter().flat_map(|c| &c.rows).filter(|r| !(r.eta > 0.0)).count();
            Ok(vec![
                CheckOutcome::new("11a", "eta ordered by increasing mu", violations as f64, 0.0, 0.0, violations == 0),
                CheckOutcome::new("11b", "eta positive on the grid", negatives as f64, 0.0, 0.0, negatives == 0),
            ])
        }
        12 => {
            let g = momentum(0.7)?;
            let base = n_total(g, &p, spec)?.total;
            let lam = 3.7;
            let scaled = n_total(g, &ModelParams::constant(lam, 1.0)?, spec)?.total / (lam * lam);
            let lin = ((scaled - base) / base).abs();
            let mut out = vec![CheckOutcome::new(
                "12a",
                "lambda^2 linearity",
                lin,
                0.0,
                4.0 * f64::EPSILON,
                lin <= 4.0 * f64::EPSILON,
            )];
            let (g0, m0, l0) = (0.7, 1.3, 0.9);
            let b0 = n_total(momentum(g0)?, &ModelParams::constant(l0, m0)?, spec)?;
            for s in [0.5, 2.0, 10.0] {
                let bs = n_total(momentum(s * g0)?, &ModelParams::constant(s * l0, s * m0)?, spec)?;
                let diff = (bs.total - b0.total).abs();
                let tol = bs.error_estimate + b0.error_estimate;
                out.push(CheckOutcome::new(
                    &format!("12b.{s}"),
                    &format!("scale invariance, s = {s}"),
                    diff,
                    0.0,
                    tol,
                    diff <= tol,
                ));
            }
            let z = li4(1.0, 1e-16)?;
            out.push(CheckOutcome::absolute("12c", "Li4(1)", z, PI2 * PI2 / 90.0, 1e-12));
            for ratio in [0.1, 1.0, 10.0] {
                let mc = monte_carlo_n_minus_plus(ratio, 1.0, 1.0, cfg.mc_samples, cfg.seed);
                let q = n_minus_plus(momentum(ratio)?, &p, spec)?.value;
                let sigma = (q - mc.mean).abs() / mc.std_error;
                out.push(
                    CheckOutcome::new(
                        &format!("12d.{ratio}"),
                        &format!("n_mp against Monte Carlo at gamma/m = {ratio}, sigmas"),
                        sigma,
                        0.0,
                        3.0,
                        sigma <= 3.0,
                    )
                    .with_detail(format!("quadrature {q:.9e}, sampled {:.9e} +- {:.1e}", mc.mean, mc.std_error)),
                );
            }
            Ok(out)
        }
        _ => Err(crate::error::Error::InvalidParameter(format!("no criterion numbered {n}"))),
    }
}

/// Exponent `k` of the `gamma / m^k` term in the small-momentum total bracket, from
/// finite differences at `gamma/m = 1e-3, 2e-3` for `m = 1` and `m = 2`.
pub fn subleading_mass_power(spec: &QuadratureSpec<f64>) -> Result<f64> {
    let slope = |m: f64| -> Result<f64> {
        let p = ModelParams::constant(1.0, m)?;
        let at = |g: f64| -> Result<f64> { Ok(bracket(g, n_total(momentum(g)?, &p, spec)?.total, 1, 128.0)) };
        let (g1, g2) = (1e-3 * m, 2e-3 * m);
        Ok((at(g2)? - at(g1)?) / (g2 - g1))
    };
    Ok((slope(1.0)? / slope(2.0)?).log2())
}

/// Informational lines: the constants produced by a single mixed term, `N_mm + N_mp`.
pub fn diagnostics(cfg: &VerifyConfig) -> Result<Vec<String>> {
    let spec = &cfg.spec;
    let p = unit();
    let single = |g: f64| -> Result<f64> {
        let gm = momentum(g)?;
        Ok(n_minus_minus(gm, &p, spec)?.value + n_minus_plus(gm, &p, spec)?.value)
    };
    let samples = LARGE
        .iter()
        .map(|&g| Ok((g, bracket(g, single(g)?, 2, 128.0))))
        .collect::<Result<Vec<_>>>()?;
    let large = fit_asymptotic_constant(&samples, FitModel::ConstOverGamma)?;
    let small = bracket(1e-3, single(1e-3)?, 1, 128.0);
    let t_small = bracket(1e-3, n_total(momentum(1e-3)?, &p, spec)?.n_t, 1, 64.0);
    Ok(vec![
        format!(
            "n_mm + n_mp (one mixed term): large-gamma constant {:.6}, small-gamma bracket at 1e-3 {:.6} (-pi/2 = {:.6})",
            large.constant,
            small,
            -PI / 2.0
        ),
        format!(
            "n_mm + n_mp gives a total large-gamma intercept {:.6}",
            large.constant + 2.0 * AsymptoticConstants::<f64>::closed_form().t_large
        ),
        format!("n_t small-gamma bracket {t_small:.8} against -pi/4 = {:.8}", -PI / 4.0),
        format!("subleading small-gamma term scales as gamma/m^{:.3}", subleading_mass_power(spec)?),
    ])
}

pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut outcomes = Vec::new();
    for n in CRITERIA {
        outcomes.extend(criterion(n, cfg)?);
    }
    Ok(VerifyReport {
        outcomes,
        notes: diagnostics(cfg)?,
    })
}
