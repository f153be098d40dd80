use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact non-negative rational. A zero denominator collapses to 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction(Ratio<u64>);

impl Fraction {
    pub const ZERO: Fraction = Fraction(Ratio::new_raw(0, 1));

    pub fn new(num: u64, den: u64) -> Self {
        if den == 0 {
            Fraction::ZERO
        } else {
            Fraction(Ratio::new(num, den))
        }
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Decimal rendering rounded half-up to `decimals` places, e.g. 8500/317 → "26.81".
    pub fn round_half_up(&self, decimals: u32) -> String {
        let scale = 10u128.pow(decimals);
        let num = self.numer() as u128 * scale;
        let den = self.denom() as u128;
        let scaled = (2 * num + den) / (2 * den);
        if decimals == 0 {
            return scaled.to_string();
        }
        let int = scaled / scale;
        let frac = scaled % scale;
        format!("{int}.{frac:0width$}", width = decimals as usize)
    }
}

impl Default for Fraction {
    fn default() -> Self {
        Fraction::ZERO
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').ok_or_else(|| format!("{s:?} is not num/den"))?;
        let n = n.trim().parse::<u64>().map_err(|e| e.to_string())?;
        let d = d.trim().parse::<u64>().map_err(|e| e.to_string())?;
        if d == 0 && n != 0 {
            return Err(format!("{s:?} has a zero denominator"));
        }
        Ok(Fraction::new(n, d))
    }
}

#[derive(Serialize, Deserialize)]
struct NumDen {
    num: u64,
    den: u64,
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NumDen { num: self.numer(), den: self.denom() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let NumDen { num, den } = NumDen::deserialize(d)?;
        if den == 0 && num != 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Fraction::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(Fraction::new(8500, 317).round_half_up(2), "26.81");
        assert_eq!(Fraction::new(7900, 622).round_half_up(2), "12.70");
        assert_eq!(Fraction::new(900, 182).round_half_up(2), "4.95");
        assert_eq!(Fraction::new(1, 8).round_half_up(2), "0.13");
        assert_eq!(Fraction::new(0, 0).round_half_up(2), "0.00");
        assert_eq!(Fraction::new(5, 2).round_half_up(0), "3");
        assert_eq!(Fraction::new(1, 3).round_half_up(6), "0.333333");
    }

    #[test]
    fn zero_denominator_is_zero() {
        assert_eq!(Fraction::new(0, 0), Fraction::ZERO);
        assert_eq!(Fraction::new(3, 0).to_f64(), 0.0);
    }

    #[test]
    fn text_and_json_forms() {
        let f = Fraction::new(6, 4);
        assert_eq!(f.to_string(), "3/2");
        assert_eq!("3/2".parse::<Fraction>().unwrap(), f);
        assert!("3/0".parse::<Fraction>().is_err());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"num":3,"den":2}"#);
        assert_eq!(serde_json::from_str::<Fraction>(&json).unwrap(), f);
    }

    #[test]
    fn ordering_is_exact() {
        assert!(Fraction::new(1, 3) < Fraction::new(334, 1000));
        assert!(Fraction::new(2, 4) == Fraction::new(1, 2));
    }
}
