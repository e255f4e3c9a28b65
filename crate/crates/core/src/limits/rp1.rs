use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `[u : v]` of the projective line, kept in a canonical form so
/// that equality can be tested exactly: the coordinates are divided by the
/// one of largest magnitude, and then the first nonzero coordinate is made
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Rp1Point {
    u: f64,
    v: f64,
}

impl Rp1Point {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) || (u == 0.0 && v == 0.0) {
            return Err(Error::Parse(format!("[{u}:{v}] is not a projective point")));
        }
        let m = if u.abs() >= v.abs() { u } else { v };
        let (mut u, mut v) = (u / m, v / m);
        if u < 0.0 || (u == 0.0 && v < 0.0) {
            u = -u;
            v = -v;
        }
        Ok(Self { u: u + 0.0, v: v + 0.0 })
    }

    /// `[1 : 0]`: the first coordinate dominates.
    pub fn first() -> Self {
        Self { u: 1.0, v: 0.0 }
    }

    /// `[0 : 1]`: the second coordinate dominates.
    pub fn second() -> Self {
        Self { u: 0.0, v: 1.0 }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Both coordinates nonzero.
    pub fn is_finite_nonzero(&self) -> bool {
        self.u != 0.0 && self.v != 0.0
    }

    /// `v/u` when both coordinates are nonzero.
    pub fn ratio(&self) -> Option<f64> {
        self.is_finite_nonzero().then(|| self.v / self.u)
    }
}

impl TryFrom<[f64; 2]> for Rp1Point {
    type Error = Error;

    fn try_from([u, v]: [f64; 2]) -> Result<Self> {
        Self::new(u, v)
    }
}

impl From<Rp1Point> for [f64; 2] {
    fn from(p: Rp1Point) -> Self {
        [p.u, p.v]
    }
}

impl fmt::Display for Rp1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.u, self.v)
    }
}
