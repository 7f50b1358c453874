//! Extended real arithmetic with the two conventions used throughout the
//! crate: `inf - inf` evaluates to `-inf`, and `inf * 0` evaluates to `0`.
//!
//! Values are a tagged scalar rather than IEEE infinities so that the first
//! convention is enforced explicitly instead of producing NaN.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Extended real number: `-inf`, a finite (non-NaN) value, or `+inf`.
#[derive(Debug, Clone, Copy)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wraps a finite value.
    ///
    /// Panics on NaN; IEEE infinities map onto the corresponding variant.
    pub fn finite(x: f64) -> Self {
        assert!(!x.is_nan(), "ExtReal::finite called with NaN");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite payload, if any.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Collapses to an IEEE float (`±inf` for the infinite variants).
    pub fn to_ieee(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Extended subtraction `a - b`.
    ///
    /// `(+inf) - (+inf)` is set to `-inf`, and consequently `a - (+inf)` is
    /// `-inf` for every `a`. `(-inf) - (-inf)` is unreachable for the inputs
    /// this crate produces (profiles never take the value `-inf`) and is
    /// treated as a hard error.
    pub fn sub(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (_, ExtReal::PosInf) => ExtReal::NegInf,
            (ExtReal::NegInf, ExtReal::NegInf) => {
                panic!("ExtReal: (-inf) - (-inf) is undefined")
            }
            (ExtReal::NegInf, _) => ExtReal::NegInf,
            (ExtReal::PosInf, _) => ExtReal::PosInf,
            (ExtReal::Finite(_), ExtReal::NegInf) => ExtReal::PosInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::finite(a - b),
        }
    }

    /// Multiplication by a 0/1 indicator, with `inf * 0` set to `0`.
    pub fn mul_indicator(self, indicator: bool) -> ExtReal {
        if indicator {
            self
        } else {
            ExtReal::Finite(0.0)
        }
    }

    /// Adds a finite shift, preserving infinite variants.
    pub fn add_finite(self, m: f64) -> ExtReal {
        match self {
            ExtReal::Finite(x) => ExtReal::finite(x + m),
            inf => inf,
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.cmp(other), Ordering::Equal)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            // Finite payloads are never NaN, so the comparison is total.
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("NaN in ExtReal"),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::finite(x)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            t => {
                let x: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("not an extended real: {s:?}")))?;
                if x.is_nan() {
                    return Err(Error::InvalidArgument("NaN is not an extended real".into()));
                }
                Ok(ExtReal::finite(x))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_conventions() {
        assert_eq!(ExtReal::PosInf.sub(ExtReal::PosInf), ExtReal::NegInf);
        assert_eq!(ExtReal::Finite(3.0).sub(ExtReal::Finite(1.0)), ExtReal::Finite(2.0));
        assert_eq!(ExtReal::Finite(5.0).sub(ExtReal::PosInf), ExtReal::NegInf);
        assert_eq!(ExtReal::PosInf.sub(ExtReal::Finite(7.0)), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.sub(ExtReal::NegInf), ExtReal::PosInf);
        assert_eq!(ExtReal::NegInf.sub(ExtReal::Finite(0.0)), ExtReal::NegInf);
        assert_eq!(ExtReal::NegInf.sub(ExtReal::PosInf), ExtReal::NegInf);
        assert_eq!(ExtReal::Finite(1.0).sub(ExtReal::NegInf), ExtReal::PosInf);
    }

    #[test]
    #[should_panic(expected = "undefined")]
    fn sub_neg_inf_minus_neg_inf_is_hard_error() {
        let _ = ExtReal::NegInf.sub(ExtReal::NegInf);
    }

    #[test]
    fn mul_indicator_conventions() {
        assert_eq!(ExtReal::PosInf.mul_indicator(false), ExtReal::Finite(0.0));
        assert_eq!(ExtReal::PosInf.mul_indicator(true), ExtReal::PosInf);
        assert_eq!(ExtReal::Finite(-2.0).mul_indicator(true), ExtReal::Finite(-2.0));
    }

    #[test]
    fn sub_zero_is_identity() {
        for a in [ExtReal::NegInf, ExtReal::Finite(-1.5), ExtReal::Finite(0.0), ExtReal::PosInf] {
            assert_eq!(a.sub(ExtReal::Finite(0.0)), a);
        }
    }

    #[test]
    fn total_order() {
        let mut xs = vec![
            ExtReal::PosInf,
            ExtReal::Finite(1.0),
            ExtReal::NegInf,
            ExtReal::Finite(-3.0),
        ];
        xs.sort();
        assert_eq!(
            xs,
            vec![
                ExtReal::NegInf,
                ExtReal::Finite(-3.0),
                ExtReal::Finite(1.0),
                ExtReal::PosInf
            ]
        );
        // sup of a nonempty finite set is the Ord max
        assert_eq!(xs.iter().copied().max(), Some(ExtReal::PosInf));
    }

    #[test]
    fn display_parse_roundtrip() {
        for s in ["inf", "-inf", "0.25", "-3", "1e-9"] {
            let v: ExtReal = s.parse().unwrap();
            let w: ExtReal = v.to_string().parse().unwrap();
            assert_eq!(v, w);
        }
        assert!("nan".parse::<ExtReal>().is_err());
        assert!("abc".parse::<ExtReal>().is_err());
    }
}
