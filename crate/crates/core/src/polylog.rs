//! Order-four polylogarithm on the closed unit disc of the real line.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `Li4(z) = sum_{n>=1} z^n / n^4` for `|z| <= 1`.
///
/// The sum stops once the next term drops below `tol` in magnitude. `Li4(1)` is
/// returned in closed form as `pi^4 / 90`.
pub fn li4<T: Real>(z: T, tol: T) -> Result<T> {
    if !(z.abs() <= T::one()) {
        return Err(Error::Domain(format!("Li4 series needs |z| <= 1, got {z}")));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if z == T::one() {
        let pi2 = T::PI() * T::PI();
        return Ok(pi2 * pi2 / T::lit(90.0));
    }
    Ok(li4_partial_sums(z).take_while_term(tol))
}

/// Running partial sums of the `Li4` series.
pub fn li4_partial_sums<T: Real>(z: T) -> Li4PartialSums<T> {
    Li4PartialSums {
        z,
        power: T::one(),
        n: 0,
        sum: T::zero(),
    }
}

#[derive(Debug, Clone)]
pub struct Li4PartialSums<T> {
    z: T,
    power: T,
    n: usize,
    sum: T,
}

impl<T: Real> Li4PartialSums<T> {
    fn next_term(&self) -> T {
        let n = T::from_usize_lossy(self.n + 1);
        let n2 = n * n;
        self.power * self.z / (n2 * n2)
    }

    fn take_while_term(mut self, tol: T) -> T {
        loop {
            let term = self.next_term();
            if term.abs() < tol || term == T::zero() {
                return self.sum;
            }
            self.next();
        }
    }
}

impl<T: Real> Iterator for Li4PartialSums<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let term = self.next_term();
        self.n += 1;
        self.power = self.power * self.z;
        self.sum = self.sum + term;
        Some(self.sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn special_values() {
        assert_eq!(li4(0.0, 1e-16).unwrap(), 0.0);
        let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
        assert_relative_eq!(li4(1.0, 1e-16).unwrap(), zeta4, max_relative = 1e-15);
        assert_relative_eq!(zeta4, 1.082_323_233_711_138_2, max_relative = 1e-15);
        // Li4(-1) = -7/8 zeta(4)
        assert_relative_eq!(li4(-1.0, 1e-15).unwrap(), -7.0 / 8.0 * zeta4, max_relative = 1e-10);
    }

    #[test]
    fn half_argument() {
        // Li4(1/2) = 0.5174790616738993863...
        assert_relative_eq!(li4(0.5, 1e-17).unwrap(), 0.517_479_061_673_899_4, max_relative = 1e-15);
    }

    #[test]
    fn outside_unit_disc_is_rejected() {
        assert!(matches!(li4(1.0001, 1e-12), Err(Error::Domain(_))));
        assert!(li4(-2.0, 1e-12).is_err());
        assert!(li4(f64::NAN, 1e-12).is_err());
    }

    #[test]
    fn single_precision() {
        let v = li4(0.25f32, 1e-9).unwrap();
        assert!((v - 0.254_116_2).abs() < 1e-6);
    }
}
