//! Hilbert-series check for the Verlinde polynomial: the graded ring with
//! nine degree-1 generators, one degree-3 generator, and a single degree-6
//! relation has the Hilbert function
//! `chi(d) = 2/8! (d+1)(d+2)(d+3)^2(d+4)(d+5)(d^2+6d+56)`.
//! Both sides are computed exactly (integer power series vs. closed form).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Generator weights and relation degree of a graded hypersurface ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRingSpec {
    weights: Vec<u32>,
    relation_degree: u32,
}

impl GradedRingSpec {
    pub fn new(weights: Vec<u32>, relation_degree: u32) -> Result<GradedRingSpec> {
        if weights.is_empty() || weights.iter().any(|&w| w == 0) {
            return Err(Error::shape("weights must be nonempty and positive"));
        }
        if relation_degree == 0 {
            return Err(Error::shape("relation degree must be >= 1"));
        }
        Ok(GradedRingSpec { weights, relation_degree })
    }

    /// Nine variables of degree 1, one of degree 3, one relation of degree 6.
    pub fn verlinde() -> GradedRingSpec {
        let mut weights = vec![1u32; 9];
        weights.push(3);
        GradedRingSpec { weights, relation_degree: 6 }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn relation_degree(&self) -> u32 {
        self.relation_degree
    }
}

/// Coefficient of `t^d` in `(1 - t^r) / prod_w (1 - t^w)`, by integer power
/// series expansion. Negative `d` gives 0 by the series convention.
pub fn hilbert_coefficient(spec: &GradedRingSpec, d: i64) -> BigInt {
    if d < 0 {
        return BigInt::zero();
    }
    let n = d as usize;
    // expand 1 / prod (1 - t^w) up to degree n
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[0] = BigInt::one();
    for &w in &spec.weights {
        let w = w as usize;
        for i in w..=n {
            let add = coeffs[i - w].clone();
            coeffs[i] += add;
        }
    }
    let r = spec.relation_degree as usize;
    if n >= r {
        coeffs[n].clone() - coeffs[n - r].clone()
    } else {
        coeffs[n].clone()
    }
}

/// The closed form `2/8! (d+1)(d+2)(d+3)^2(d+4)(d+5)(d^2+6d+56)`, evaluated
/// exactly. The value is an integer for every integer d.
pub fn verlinde_value(d: i64) -> BigRational {
    let d = BigInt::from(d);
    let lin = |k: i64| BigRational::from(&d + BigInt::from(k));
    let quad = BigRational::from(&d * &d + BigInt::from(6) * &d + BigInt::from(56));
    let num = lin(1) * lin(2) * lin(3).pow(2) * lin(4) * lin(5) * quad * BigRational::from(BigInt::from(2));
    let factorial_8 = BigRational::from(BigInt::from(40320));
    num / factorial_8
}

/// `verlinde_value` as an integer; errors if the closed form failed to be
/// integral (which would indicate a broken formula).
pub fn verlinde_integer(d: i64) -> Result<BigInt> {
    let v = verlinde_value(d);
    if v.denom().is_one() {
        Ok(v.numer().clone())
    } else {
        Err(Error::Invariant(format!("verlinde_value({d}) = {v} is not integral")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let spec = GradedRingSpec::verlinde();
        assert_eq!(hilbert_coefficient(&spec, 0), BigInt::from(1));
        assert_eq!(hilbert_coefficient(&spec, 1), BigInt::from(9));
        assert_eq!(hilbert_coefficient(&spec, 2), BigInt::from(45));
        assert_eq!(verlinde_integer(0).unwrap(), BigInt::from(1));
        assert_eq!(verlinde_integer(1).unwrap(), BigInt::from(9));
        assert_eq!(verlinde_integer(2).unwrap(), BigInt::from(45));
        assert_eq!(verlinde_integer(-1).unwrap(), BigInt::zero());
    }

    #[test]
    fn closed_form_matches_series() {
        let spec = GradedRingSpec::verlinde();
        for d in 0..=60 {
            assert_eq!(
                hilbert_coefficient(&spec, d),
                verlinde_integer(d).unwrap(),
                "disagreement at d={d}"
            );
        }
    }

    #[test]
    fn roots_and_symmetry() {
        for d in -5..=-1 {
            assert_eq!(verlinde_integer(d).unwrap(), BigInt::zero());
        }
        // even symmetry about d = -3
        for d in -20..=20 {
            assert_eq!(verlinde_value(d), verlinde_value(-6 - d));
        }
    }

    #[test]
    fn always_integral() {
        for d in -40..=40 {
            assert!(verlinde_integer(d).is_ok());
        }
    }

    #[test]
    fn spec_validation() {
        assert!(GradedRingSpec::new(vec![], 6).is_err());
        assert!(GradedRingSpec::new(vec![1, 0], 6).is_err());
        assert!(GradedRingSpec::new(vec![1], 0).is_err());
    }
}
