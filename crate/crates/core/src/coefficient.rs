//! Pointwise coefficient functions of an operator.

use alloc::boxed::Box;
use alloc::vec::Vec;

/// A real function of the reduced coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// `coef * x^exponent`.
    Power {
        coef: f64,
        exponent: f64,
    },
    /// Smooth bump of peak `height` supported on `(lo, hi)`.
    Bump {
        height: f64,
        lo: f64,
        hi: f64,
    },
    /// On `[breaks[k], breaks[k+1])` the value is
    /// `Σ_m coeffs[k][m] (x - breaks[k])^m`. Left of `breaks[0]` the value is
    /// `coeffs[0][0]`; the last polynomial extends to the right.
    Piecewise {
        breaks: Vec<f64>,
        coeffs: Vec<Vec<f64>>,
    },
    Sum(Vec<Coefficient>),
    Scaled(f64, Box<Coefficient>),
}

impl Coefficient {
    pub const ZERO: Coefficient = Coefficient::Constant(0.0);
    pub const ONE: Coefficient = Coefficient::Constant(1.0);

    pub fn inverse_square(coef: f64) -> Self {
        Coefficient::Power { coef, exponent: -2.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Power { coef, exponent } => coef * libm::pow(x, *exponent),
            Coefficient::Bump { height, lo, hi } => {
                if x <= *lo || x >= *hi {
                    return 0.0;
                }
                let s = (2.0 * x - lo - hi) / (hi - lo);
                height * libm::exp(1.0 - 1.0 / (1.0 - s * s))
            }
            Coefficient::Piecewise { breaks, coeffs } => {
                if breaks.is_empty() || coeffs.is_empty() {
                    return 0.0;
                }
                let k = breaks.partition_point(|&b| b <= x).saturating_sub(1).min(coeffs.len() - 1);
                let dx = (x - breaks[k]).max(0.0);
                coeffs[k].iter().rev().fold(0.0, |acc, &c| acc * dx + c)
            }
            Coefficient::Sum(parts) => parts.iter().map(|p| p.eval(x)).sum(),
            Coefficient::Scaled(s, inner) => s * inner.eval(x),
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        Coefficient::Scaled(s, Box::new(self))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Constant(c) => *c == 0.0,
            Coefficient::Power { coef, .. } => *coef == 0.0,
            Coefficient::Bump { height, .. } => *height == 0.0,
            Coefficient::Piecewise { coeffs, .. } => coeffs.iter().flatten().all(|&c| c == 0.0),
            Coefficient::Sum(parts) => parts.iter().all(Coefficient::is_zero),
            Coefficient::Scaled(s, inner) => *s == 0.0 || inner.is_zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn bump_peaks_at_center() {
        let b = Coefficient::Bump { height: 1.0, lo: 0.5, hi: 2.0 };
        assert!((b.eval(1.25) - 1.0).abs() < 1e-15);
        assert_eq!(b.eval(0.5), 0.0);
        assert_eq!(b.eval(3.0), 0.0);
        assert!(b.eval(0.6) > 0.0);
    }

    #[test]
    fn piecewise_evaluates_local_polynomials() {
        let p = Coefficient::Piecewise { breaks: vec![0.0, 1.0], coeffs: vec![vec![1.0, 2.0], vec![3.0, 0.0, 1.0]] };
        assert_eq!(p.eval(0.5), 2.0);
        assert_eq!(p.eval(2.0), 4.0);
        assert_eq!(p.eval(-1.0), 1.0);
    }

    #[test]
    fn hardy_potential() {
        let c = Coefficient::inverse_square(-0.25);
        assert!((c.eval(2.0) + 1.0 / 16.0).abs() < 1e-16);
    }
}
