//! Exact rational gradings.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error("malformed grading '{0}', expected 'n/d' or 'n'")]
    Malformed(String),
    #[error("zero denominator in '{0}'")]
    ZeroDenominator(String),
    #[error("grading {value} does not lie on the 1/{denominator} lattice")]
    OffLattice { value: Grading, denominator: i64 },
}

/// An exact rational degree. Integer shifts act by ordinary addition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Grading(Rational64);

impl Grading {
    pub const ZERO: Grading = Grading(Rational64::new_raw(0, 1));

    pub fn int(n: i64) -> Self {
        Grading(Rational64::from_integer(n))
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Grading(Rational64::new(num, den))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, if this grading is integral.
    pub fn as_integer(&self) -> Option<i64> {
        self.is_integer().then(|| self.numer())
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Grading {
        Grading(self.0 - self.0.floor())
    }

    pub fn half(&self) -> Grading {
        Grading(self.0 / 2)
    }

    pub fn quarter(&self) -> Grading {
        Grading(self.0 / 4)
    }

    pub fn times(&self, k: i64) -> Grading {
        Grading(self.0 * k)
    }

    /// Whether the value is an integer multiple of `1/denominator`.
    pub fn on_lattice(&self, denominator: i64) -> bool {
        denominator > 0 && denominator % self.denom() == 0
    }

    pub fn check_lattice(&self, denominator: i64) -> Result<(), GradingError> {
        if self.on_lattice(denominator) {
            Ok(())
        } else {
            Err(GradingError::OffLattice {
                value: *self,
                denominator,
            })
        }
    }

    /// Residue of an integral grading modulo `m`, in `0..m`.
    pub fn rem_euclid(&self, m: i64) -> Option<i64> {
        self.as_integer().map(|n| n.rem_euclid(m))
    }

    /// Canonical serialized form `numerator/denominator`.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl From<i64> for Grading {
    fn from(n: i64) -> Self {
        Grading::int(n)
    }
}

impl Add for Grading {
    type Output = Grading;
    fn add(self, rhs: Grading) -> Grading {
        Grading(self.0 + rhs.0)
    }
}

impl Add<i64> for Grading {
    type Output = Grading;
    fn add(self, rhs: i64) -> Grading {
        Grading(self.0 + rhs)
    }
}

impl AddAssign for Grading {
    fn add_assign(&mut self, rhs: Grading) {
        self.0 += rhs.0;
    }
}

impl Sub for Grading {
    type Output = Grading;
    fn sub(self, rhs: Grading) -> Grading {
        Grading(self.0 - rhs.0)
    }
}

impl Sub<i64> for Grading {
    type Output = Grading;
    fn sub(self, rhs: i64) -> Grading {
        Grading(self.0 - rhs)
    }
}

impl Neg for Grading {
    type Output = Grading;
    fn neg(self) -> Grading {
        Grading(-self.0)
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Grading {
    type Err = GradingError;

    /// Accepts `n/d` or a bare integer `n`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let malformed = || GradingError::Malformed(s.to_string());
        match t.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| malformed())?;
                let d: i64 = d.trim().parse().map_err(|_| malformed())?;
                if d == 0 {
                    return Err(GradingError::ZeroDenominator(s.to_string()));
                }
                Ok(Grading::new(n, d))
            }
            None => t.parse::<i64>().map(Grading::int).map_err(|_| malformed()),
        }
    }
}
