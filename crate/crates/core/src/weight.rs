use std::fmt;
use std::ops::{Add, AddAssign};

use serde::Serialize;

/// Tree and link weight in exact tenths, so that ordering and the pruning
/// threshold never suffer from float rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "f64")]
pub struct Weight(u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    pub const ONE: Weight = Weight(10);

    pub const fn from_tenths(t: u64) -> Self {
        Weight(t)
    }

    pub const fn tenths(self) -> u64 {
        self.0
    }

    /// Parses a non-negative decimal with at most one fractional digit.
    pub fn parse(s: &str) -> Option<Self> {
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 1 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let whole: u64 = int.parse().ok()?;
        let tenth: u64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        whole.checked_mul(10)?.checked_add(tenth).map(Weight)
    }

    pub fn times(self, k: u64) -> Self {
        Weight(self.0 * k)
    }

    pub fn half(self) -> Self {
        Weight(self.0 / 2)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl From<Weight> for f64 {
    fn from(w: Weight) -> f64 {
        w.as_f64()
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(10) {
            write!(f, "{}", self.0 / 10)
        } else {
            write!(f, "{}.{}", self.0 / 10, self.0 % 10)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_weights() {
        assert_eq!(Weight::parse("20"), Some(Weight::from_tenths(200)));
        assert_eq!(Weight::parse("1.0"), Some(Weight::ONE));
        assert_eq!(Weight::parse("2.5"), Some(Weight::from_tenths(25)));
        assert_eq!(Weight::parse("2.55"), None);
        assert_eq!(Weight::parse("-1"), None);
        assert_eq!(Weight::from_tenths(25).to_string(), "2.5");
        assert_eq!(Weight::from_tenths(200).half().to_string(), "10");
    }
}
