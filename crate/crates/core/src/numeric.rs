//! Tolerant rounding and exact scaling of rational inputs to integers.

use crate::error::{input, too_large, Result};

/// Relative slack used when rounding products such as `c * OPT`.
pub const TOL: f64 = 1e-9;

/// Ceiling that ignores floating noise just above an integer.
pub fn ceil_tol(x: f64) -> i64 {
    (x - TOL * x.abs().max(1.0)).ceil() as i64
}

/// Floor that ignores floating noise just below an integer.
pub fn floor_tol(x: f64) -> i64 {
    (x + TOL * x.abs().max(1.0)).floor() as i64
}

/// `a >= b` up to the rounding slack.
pub fn ge_tol(a: f64, b: f64) -> bool {
    a >= b - TOL * b.abs().max(1.0)
}

/// `a <= b` up to the rounding slack.
pub fn le_tol(a: f64, b: f64) -> bool {
    a <= b + TOL * b.abs().max(1.0)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A nonnegative rational `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Ratio> {
        if den == 0 {
            return input("zero denominator");
        }
        let g = gcd(num, den).max(1);
        Ok(Ratio { num: num / g, den: den / g })
    }

    /// Recover a short decimal such as `0.25` exactly (up to 9 places).
    pub fn from_decimal(x: f64) -> Result<Ratio> {
        if !x.is_finite() || x < 0.0 {
            return input(format!("expected a finite nonnegative number, got {x}"));
        }
        let mut den = 1u64;
        for _ in 0..=9 {
            let scaled = x * den as f64;
            let r = scaled.round();
            if (scaled - r).abs() <= 1e-9 * scaled.abs().max(1.0) {
                if r > u64::MAX as f64 / 2.0 {
                    return too_large(format!("{x} does not fit the integer range"));
                }
                return Ratio::new(r as u64, den);
            }
            den *= 10;
        }
        input(format!("{x} has more than 9 decimal places"))
    }

    pub fn one() -> Ratio {
        Ratio { num: 1, den: 1 }
    }

    fn reduce128(num: u128, den: u128) -> Result<Ratio> {
        let g = gcd128(num, den).max(1);
        let (n, d) = (num / g, den / g);
        match (u64::try_from(n), u64::try_from(d)) {
            (Ok(n), Ok(d)) => Ratio::new(n, d),
            _ => too_large("rational parameter overflows"),
        }
    }

    // Fallible, so not the std operator traits.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Ratio) -> Result<Ratio> {
        Ratio::reduce128(self.num as u128 * o.num as u128, self.den as u128 * o.den as u128)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Ratio) -> Result<Ratio> {
        if o.num == 0 {
            return input("division by zero");
        }
        Ratio::reduce128(self.num as u128 * o.den as u128, self.den as u128 * o.num as u128)
    }

    /// `1 - self`, for `self <= 1`.
    pub fn complement(self) -> Result<Ratio> {
        if self.num > self.den {
            return input("complement of a ratio above one");
        }
        Ratio::new(self.den - self.num, self.den)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌈x·self⌉` for an integer `x`.
    pub fn ceil_mul(self, x: u64) -> u128 {
        let p = x as u128 * self.num as u128;
        p.div_ceil(self.den as u128)
    }

    /// `⌊x·self⌋` for an integer `x`.
    pub fn floor_mul(self, x: u64) -> u128 {
        x as u128 * self.num as u128 / self.den as u128
    }
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Multiply every ratio by the LCM of the denominators.
///
/// Returns the integers and the common multiplier; rejects when the LCM or
/// any scaled value exceeds `cap`.
pub fn integerize(values: &[Ratio], cap: u64) -> Result<(Vec<u64>, u64)> {
    let mut lcm = 1u64;
    for r in values {
        let g = gcd(lcm, r.den);
        lcm = match (lcm / g).checked_mul(r.den) {
            Some(l) if l <= cap => l,
            _ => return too_large(format!("common denominator exceeds {cap}")),
        };
    }
    let mut out = Vec::with_capacity(values.len());
    for r in values {
        match r.num.checked_mul(lcm / r.den) {
            Some(v) if v <= cap => out.push(v),
            _ => return too_large(format!("scaled value exceeds {cap}")),
        }
    }
    Ok((out, lcm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerant_rounding() {
        assert_eq!(ceil_tol(0.9 * 10.0), 9);
        assert_eq!(ceil_tol(2.0000001), 3);
        assert_eq!(floor_tol(2.9999999999999), 3);
        assert_eq!(ceil_tol(-0.5), 0);
    }

    #[test]
    fn decimals_become_exact_ratios() {
        assert_eq!(Ratio::from_decimal(0.25).unwrap(), Ratio { num: 1, den: 4 });
        assert_eq!(Ratio::from_decimal(3.0).unwrap(), Ratio { num: 3, den: 1 });
        assert!(Ratio::from_decimal(-1.0).is_err());
    }

    #[test]
    fn integerize_uses_common_denominator() {
        let vals = [Ratio::new(1, 2).unwrap(), Ratio::new(1, 3).unwrap(), Ratio::new(2, 1).unwrap()];
        let (ints, scale) = integerize(&vals, 1_000).unwrap();
        assert_eq!(scale, 6);
        assert_eq!(ints, vec![3, 2, 12]);
        assert!(integerize(&vals, 5).is_err());
    }
}
