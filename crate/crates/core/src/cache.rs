//! Tabulated reflection factor for repeated evaluation inside energy integrals.
//!
//! The table stores `phi(u) = u N(u)` for unit coupling and unit mass on a grid
//! uniform in `ln u`, interpolated by a natural cubic spline. Any mass and coupling
//! follow from `N(gamma; m, lambda) = coupling^2 / m^2 * N_unit(gamma / m)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::reflection::{n_total, EuclideanMomentum, ModelParams};
use crate::scalar::Real;

/// Reflection factor at `u = gamma / m` for `lambda = m = 1`, constant coupling.
pub fn unit_reflection<T: Real>(u: T, spec: &QuadratureSpec<T>) -> Result<T> {
    let p = ModelParams::constant(T::one(), T::one())?;
    Ok(n_total(EuclideanMomentum::new(u)?, &p, spec)?.total)
}

#[derive(Debug, Clone)]
pub struct ReflectionTable<T> {
    s0: T,
    h: T,
    phi: Vec<T>,
    curvature: Vec<T>,
    spec: QuadratureSpec<T>,
    max_relative_error: T,
    points_per_decade: usize,
}

const MAX_REFINEMENTS: usize = 3;

impl<T: Real> ReflectionTable<T> {
    pub const DEFAULT_POINTS_PER_DECADE: usize = 16;

    /// Tabulate over `[u_min, u_max]`, doubling the density until every monitored
    /// midpoint agrees with direct evaluation to `target_rel`.
    pub fn build(u_min: T, u_max: T, spec: &QuadratureSpec<T>, target_rel: T) -> Result<Self> {
        Self::build_with_density(u_min, u_max, spec, target_rel, Self::DEFAULT_POINTS_PER_DECADE)
    }

    pub fn build_with_density(
        u_min: T,
        u_max: T,
        spec: &QuadratureSpec<T>,
        target_rel: T,
        points_per_decade: usize,
    ) -> Result<Self> {
        spec.validate()?;
        if !(u_min > T::zero() && u_max > u_min && u_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "table range must satisfy 0 < u_min < u_max, got [{u_min}, {u_max}]"
            )));
        }
        if points_per_decade == 0 || !(target_rel > T::zero()) {
            return Err(Error::InvalidParameter("table density and target must be positive".into()));
        }
        let mut density = points_per_decade;
        let mut last = None;
        for _ in 0..=MAX_REFINEMENTS {
            let table = Self::tabulate(u_min, u_max, spec, density)?;
            let table = table.monitor()?;
            if table.max_relative_error <= target_rel {
                return Ok(table);
            }
            last = Some(table);
            density *= 2;
        }
        // Refinement budget spent; keep the densest table with its measured error.
        Ok(last.expect("at least one tabulation ran"))
    }

    fn tabulate(u_min: T, u_max: T, spec: &QuadratureSpec<T>, points_per_decade: usize) -> Result<Self> {
        let s0 = u_min.ln();
        let s1 = u_max.ln();
        let decades = (s1 - s0) / T::LN_10();
        let intervals = (decades * T::from_usize_lossy(points_per_decade))
            .ceil()
            .to_f64_lossy()
            .max(3.0) as usize;
        let h = (s1 - s0) / T::from_usize_lossy(intervals);
        let phi = (0..=intervals)
            .into_par_iter()
            .map(|i| {
                let u = (s0 + h * T::from_usize_lossy(i)).exp();
                unit_reflection(u, spec).map(|n| u * n)
            })
            .collect::<Result<Vec<T>>>()?;
        let curvature = natural_spline_curvature(&phi, h);
        Ok(Self {
            s0,
            h,
            phi,
            curvature,
            spec: *spec,
            max_relative_error: T::zero(),
            points_per_decade,
        })
    }

    /// Compare against direct evaluation at the midpoints of 5% of the intervals.
    fn monitor(mut self) -> Result<Self> {
        let intervals = self.phi.len() - 1;
        let probes: Vec<usize> = (0..intervals).skip(intervals.min(10) / 2).step_by(20).collect();
        let probes = if probes.is_empty() { vec![intervals / 2] } else { probes };
        let errors = probes
            .into_par_iter()
            .map(|i| {
                let s = self.s0 + self.h * (T::from_usize_lossy(i) + T::lit(0.5));
                let u = s.exp();
                let direct = unit_reflection(u, &self.spec)?;
                let interp = self.spline(s) / u;
                Ok(((interp - direct) / direct).abs())
            })
            .collect::<Result<Vec<T>>>()?;
        self.max_relative_error = errors.into_iter().fold(T::zero(), T::max);
        Ok(self)
    }

    pub fn u_range(&self) -> (T, T) {
        let n = self.phi.len() - 1;
        (self.s0.exp(), (self.s0 + self.h * T::from_usize_lossy(n)).exp())
    }

    /// Largest relative interpolation error seen at the monitored midpoints.
    pub fn max_relative_error(&self) -> T {
        self.max_relative_error
    }

    pub fn points_per_decade(&self) -> usize {
        self.points_per_decade
    }

    pub fn nodes(&self) -> usize {
        self.phi.len()
    }

    pub fn spec(&self) -> &QuadratureSpec<T> {
        &self.spec
    }

    fn spline(&self, s: T) -> T {
        let n = self.phi.len() - 1;
        let pos = ((s - self.s0) / self.h).max(T::zero());
        let i = (pos.floor().to_f64_lossy() as usize).min(n - 1);
        let t = pos - T::from_usize_lossy(i);
        let a = T::one() - t;
        let h2 = self.h * self.h / T::lit(6.0);
        a * self.phi[i]
            + t * self.phi[i + 1]
            + h2 * ((a * a * a - a) * self.curvature[i] + (t * t * t - t) * self.curvature[i + 1])
    }

    /// `N_unit(u)`: interpolated inside the table, evaluated directly outside it.
    pub fn unit_value(&self, u: T) -> Result<T> {
        let (lo, hi) = self.u_range();
        if u >= lo && u <= hi {
            Ok(self.spline(u.ln()) / u)
        } else {
            unit_reflection(u, &self.spec)
        }
    }

    /// Reflection factor for arbitrary parameters through the exact mass and coupling scaling.
    pub fn value(&self, gamma: T, p: &ModelParams<T>) -> Result<T> {
        let m = p.mass();
        let g = EuclideanMomentum::new(gamma)?.get();
        Ok(p.coupling_sq(g) / (m * m) * self.unit_value(g / m)?)
    }
}

/// Second derivatives of the natural cubic spline through equally spaced `y`.
fn natural_spline_curvature<T: Real>(y: &[T], h: T) -> Vec<T> {
    let n = y.len();
    let mut m = vec![T::zero(); n];
    if n < 3 {
        return m;
    }
    // Tridiagonal system (1, 4, 1) m = 6 / h^2 * second differences, Thomas algorithm.
    let k = n - 2;
    let scale = T::lit(6.0) / (h * h);
    let mut diag = vec![T::zero(); k];
    let mut rhs = vec![T::zero(); k];
    for j in 0..k {
        let r = scale * (y[j] - T::lit(2.0) * y[j + 1] + y[j + 2]);
        if j == 0 {
            diag[j] = T::lit(4.0);
            rhs[j] = r;
        } else {
            let w = T::one() / diag[j - 1];
            diag[j] = T::lit(4.0) - w;
            rhs[j] = r - w * rhs[j - 1];
        }
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = (rhs[j] - m[j + 2]) / diag[j];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_curvature_interior() {
        // Curvature error is O(h^2) away from the ends.
        let h = 0.05;
        let y: Vec<f64> = (0..=60).map(|i| (i as f64 * h).sin()).collect();
        let m = natural_spline_curvature(&y, h);
        for (i, mi) in m.iter().enumerate().take(50).skip(10) {
            assert!((mi + (i as f64 * h).sin()).abs() < 3e-4, "{i}: {mi}");
        }
        assert_eq!(m[0], 0.0);
        assert_eq!(m[60], 0.0);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let spec = QuadratureSpec::<f64>::default();
        let table = ReflectionTable::build(1e-2, 1e2, &spec, 1e-7).unwrap();
        assert!(table.max_relative_error() <= 1e-7, "{}", table.max_relative_error());
        for &u in &[0.013, 0.31, 2.7, 55.0] {
            let direct = unit_reflection(u, &spec).unwrap();
            let cached = table.unit_value(u).unwrap();
            assert!(((cached - direct) / direct).abs() < 1e-6, "u={u}");
        }
        // Outside the table the direct route is used.
        let far = table.unit_value(1e3).unwrap();
        assert_eq!(far, unit_reflection(1e3, &spec).unwrap());
    }

    #[test]
    fn scaling_to_other_parameters() {
        let spec = QuadratureSpec::<f64>::default();
        let table = ReflectionTable::build(1e-2, 1e2, &spec, 1e-7).unwrap();
        let p = ModelParams::sqrt_momentum(0.7, 0.5).unwrap();
        let g = 0.8;
        let direct = n_total(EuclideanMomentum::new(g).unwrap(), &p, &spec).unwrap().total;
        let cached = table.value(g, &p).unwrap();
        assert!(((cached - direct) / direct).abs() < 1e-6);
    }

    #[test]
    fn invalid_range() {
        let spec = QuadratureSpec::<f64>::default();
        assert!(ReflectionTable::build(0.0, 1.0, &spec, 1e-7).is_err());
        assert!(ReflectionTable::build(2.0, 1.0, &spec, 1e-7).is_err());
    }
}
