//! Half-integer spin labels.

use std::fmt;

/// Largest spin accepted by band-limited pipelines, stored doubled.
pub const MAX_TWICE_SPIN: u32 = 24;

/// A spin `j ∈ {0, 1/2, 1, ...}` stored as the integer `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    /// Parses a real spin value; `None` unless `2j` is a non-negative integer.
    pub fn from_f64(j: f64) -> Option<Self> {
        let twice = 2.0 * j;
        if j < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return None;
        }
        Some(Spin(twice.round() as u32))
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Dimension `2j + 1` of the irreducible representation.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// `j(j+1)`, the eigenvalue of `-Δ_K` on spin-`j` matrix entries.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
