//! Extended reals for convex function values.

use std::cmp::Ordering;
use std::fmt;

/// Value of a convex function `R^n -> R ∪ {+inf}`.
///
/// There is deliberately no `-inf` variant: a representation that evaluates
/// to minus infinity is malformed and reported as an error instead of a
/// value. No sentinel floats are used anywhere; domain membership is decided
/// by matching on this enum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Finite value, or `None` for `+inf`.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Finite value, panicking on `+inf`. For contexts where finiteness was
    /// already established.
    pub fn expect_finite(self, what: &str) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => panic!("expected finite value: {what}"),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_infinity_last() {
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert!(ExtReal::PosInf <= ExtReal::PosInf);
        assert!(ExtReal::Finite(-1.0) < ExtReal::Finite(0.0));
    }
}
