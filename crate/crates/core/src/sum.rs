use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;
use serde::Serialize;

/// A complex character-sum value together with the number of unit-bounded
/// summands that went into it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SumValue {
    pub re: f64,
    pub im: f64,
    pub terms: u64,
}

impl SumValue {
    pub fn new(z: Complex64, terms: u64) -> Self {
        SumValue { re: z.re, im: z.im, terms }
    }

    pub fn real(x: f64, terms: u64) -> Self {
        SumValue { re: x, im: 0.0, terms }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Absolute tolerance for identity checks on a sum of this many terms.
    pub fn tolerance(&self) -> f64 {
        tolerance(self.terms)
    }

    /// True when `|self − other|` is within the combined identity tolerance.
    pub fn close_to(&self, other: &SumValue) -> bool {
        (self.value() - other.value()).norm() <= tolerance(self.terms.max(other.terms))
    }

    pub fn conj(&self) -> Self {
        SumValue { re: self.re, im: -self.im, terms: self.terms }
    }

    pub fn scale(&self, k: f64) -> Self {
        SumValue { re: self.re * k, im: self.im * k, terms: self.terms }
    }
}

/// `10⁻⁶ + 10⁻¹²·terms`.
pub fn tolerance(terms: u64) -> f64 {
    1e-6 + 1e-12 * terms as f64
}

impl Add for SumValue {
    type Output = SumValue;
    fn add(self, rhs: SumValue) -> SumValue {
        SumValue { re: self.re + rhs.re, im: self.im + rhs.im, terms: self.terms + rhs.terms }
    }
}

impl AddAssign for SumValue {
    fn add_assign(&mut self, rhs: SumValue) {
        *self = *self + rhs;
    }
}

/// Products multiply the term counts, matching a product of two sums.
impl Mul for SumValue {
    type Output = SumValue;
    fn mul(self, rhs: SumValue) -> SumValue {
        SumValue::new(self.value() * rhs.value(), self.terms.saturating_mul(rhs.terms))
    }
}

impl Sum for SumValue {
    fn sum<I: Iterator<Item = SumValue>>(iter: I) -> SumValue {
        iter.fold(SumValue::default(), |a, b| a + b)
    }
}
