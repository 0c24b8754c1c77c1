//! Polynomials of degree at most four, piecewise functions built from them,
//! real roots up to cubics, and optimum envelopes of action qualities.
//!
//! Inside one interval `[t - ε, t]` every polynomial is written in the
//! backwards variable `τ = t - time`, so `τ = 0` is the later endpoint.

mod envelope;
mod piecewise;
mod roots;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub use envelope::{envelope_linear, envelope_on, envelope_poly, ActionQuality, Envelope, Sense};
pub use piecewise::{LocalPiecewise, Piece, PiecewiseFunction};
pub(crate) use piecewise::merge_breaks;
pub use roots::roots_in_interval;

/// Maximum supported degree.
pub const MAX_DEGREE: usize = 4;

/// Pieces shorter than this are merged into a neighbour.
pub const MIN_PIECE: f64 = 1e-12;

/// Quality differences below this count as ties.
pub const TIE_TOLERANCE: f64 = 1e-14;

/// `c[0] + c[1] τ + ... + c[4] τ⁴`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Polynomial {
    coeffs: [f64; MAX_DEGREE + 1],
}

impl Polynomial {
    pub const ZERO: Polynomial = Polynomial { coeffs: [0.0; MAX_DEGREE + 1] };

    /// Panics if more than `MAX_DEGREE + 1` coefficients are given.
    pub fn new(coeffs: &[f64]) -> Polynomial {
        assert!(coeffs.len() <= MAX_DEGREE + 1, "degree above {MAX_DEGREE}");
        let mut out = [0.0; MAX_DEGREE + 1];
        out[..coeffs.len()].copy_from_slice(coeffs);
        Polynomial { coeffs: out }
    }

    pub fn constant(value: f64) -> Polynomial {
        Polynomial::new(&[value])
    }

    pub fn linear(intercept: f64, slope: f64) -> Polynomial {
        Polynomial::new(&[intercept, slope])
    }

    pub fn coeffs(&self) -> &[f64; MAX_DEGREE + 1] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> f64 {
        self.coeffs[power]
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Degree after dropping leading coefficients that are negligible
    /// relative to the largest one.
    pub fn effective_degree(&self) -> usize {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0;
        }
        self.coeffs
            .iter()
            .rposition(|&c| c.abs() > 1e-14 * scale)
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let mut out = [0.0; MAX_DEGREE + 1];
        for power in 1..=MAX_DEGREE {
            out[power - 1] = self.coeffs[power] * power as f64;
        }
        Polynomial { coeffs: out }
    }

    /// `F(τ) = anchor + ∫₀^τ p`. Since `p` is the quality `-ṗ` measured in the
    /// backwards variable, `F` grows into the past wherever `p > 0`.
    pub fn antiderivative(&self, anchor: f64) -> Polynomial {
        assert!(
            self.degree() < MAX_DEGREE,
            "antiderivative would exceed degree {MAX_DEGREE}"
        );
        let mut out = [0.0; MAX_DEGREE + 1];
        out[0] = anchor;
        for power in 0..MAX_DEGREE {
            out[power + 1] = self.coeffs[power] / (power + 1) as f64;
        }
        Polynomial { coeffs: out }
    }

    /// Antiderivative passing through `value` at `τ = from`.
    pub fn antiderivative_through(&self, from: f64, value: f64) -> Polynomial {
        let base = self.antiderivative(0.0);
        base + Polynomial::constant(value - base.eval(from))
    }

    /// `p(τ + shift)` expanded in `τ`.
    pub fn shifted(&self, shift: f64) -> Polynomial {
        // Horner-style Taylor shift.
        let mut c = self.coeffs;
        for i in 0..MAX_DEGREE {
            for j in (i..MAX_DEGREE).rev() {
                c[j] += shift * c[j + 1];
            }
        }
        Polynomial { coeffs: c }
    }

    /// `p(-τ)`.
    pub fn reflected(&self) -> Polynomial {
        let mut c = self.coeffs;
        for (power, coeff) in c.iter_mut().enumerate() {
            if power % 2 == 1 {
                *coeff = -*coeff;
            }
        }
        Polynomial { coeffs: c }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", &self.coeffs[..=self.degree()])
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for power in (0..=self.degree()).rev() {
            let c = self.coeffs[power];
            if c == 0.0 && !(power == 0 && first) {
                continue;
            }
            if !first {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            first = false;
            match power {
                0 => write!(f, "{}", c.abs())?,
                1 => write!(f, "{}τ", c.abs())?,
                _ => write!(f, "{}τ^{power}", c.abs())?,
            }
        }
        Ok(())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += rhs;
        self
    }
}

impl AddAssign for Polynomial {
    fn add_assign(&mut self, rhs: Polynomial) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= rhs;
        self
    }
}

impl SubAssign for Polynomial {
    fn sub_assign(&mut self, rhs: Polynomial) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<Polynomial> for f64 {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        let mut out = rhs;
        for c in out.coeffs.iter_mut() {
            *c *= self;
        }
        out
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -1.0 * self
    }
}
