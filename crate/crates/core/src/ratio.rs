//! Exact count ratios with fixed two-decimal rendering.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `num / den` kept as integers so reported figures round exactly.
/// A zero denominator reads as zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    pub fn percent(self) -> f64 {
        self.value() * 100.0
    }

    /// Equality of the represented fractions, not of the stored pairs.
    pub fn same_value(self, other: Ratio) -> bool {
        if self.den == 0 || other.den == 0 {
            return self.value() == other.value();
        }
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }

    /// Percentage with two decimals, rounded half to even.
    pub fn percent_2dp(self) -> String {
        format_hundredths(round_half_even(self.num as u128 * 10_000, self.den as u128))
    }

    /// Plain value with two decimals, rounded half to even.
    pub fn value_2dp(self) -> String {
        format_hundredths(round_half_even(self.num as u128 * 100, self.den as u128))
    }
}

fn round_half_even(num: u128, den: u128) -> u128 {
    if den == 0 {
        return 0;
    }
    let (q, r) = (num / den, num % den);
    match (2 * r).cmp(&den) {
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q & 1),
        std::cmp::Ordering::Less => q,
    }
}

fn format_hundredths(h: u128) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

fn raw_number<S: Serializer>(text: String, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(text)
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

/// Serializes as a JSON number holding the percentage, e.g. `65.92`.
pub fn as_percent<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    raw_number(r.percent_2dp(), s)
}

/// Serializes as a JSON number holding the plain value, e.g. `6.13`.
pub fn as_value<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    raw_number(r.value_2dp(), s)
}
