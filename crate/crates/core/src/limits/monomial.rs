use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One diagonal entry `c·t^e` of a monomial path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    #[serde(with = "ratio_string")]
    pub exponent: Rational64,
}

impl Monomial {
    pub fn new(coeff: f64, exponent: Rational64) -> Self {
        Self { coeff, exponent }
    }

    pub fn constant(coeff: f64) -> Self {
        Self::new(coeff, Rational64::zero())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeff * t.powf(ratio_to_f64(self.exponent))
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent.is_zero() {
            return write!(f, "{}", self.coeff);
        }
        if self.coeff != 1.0 {
            write!(f, "{}*", self.coeff)?;
        }
        if self.exponent == Rational64::from_integer(1) {
            write!(f, "t")
        } else {
            write!(f, "t^{}", self.exponent)
        }
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Accepts `c`, `t`, `t^e`, `c*t`, `c*t^e` and `-t^e`; exponents are
    /// rationals `p/q`, optionally wrapped in `()` or `{}`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("invalid monomial '{s}'"));
        let Some(tpos) = s.find('t') else {
            let c: f64 = s.parse().map_err(|_| bad())?;
            return Ok(Monomial::constant(c));
        };
        let (head, tail) = s.split_at(tpos);
        let head = head.strip_suffix('*').unwrap_or(head);
        let coeff = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse().map_err(|_| bad())?,
        };
        let tail = &tail[1..];
        let exponent = if tail.is_empty() {
            Rational64::from_integer(1)
        } else {
            let e = tail.strip_prefix('^').ok_or_else(bad)?;
            let e = e
                .strip_prefix('(')
                .and_then(|e| e.strip_suffix(')'))
                .or_else(|| e.strip_prefix('{').and_then(|e| e.strip_suffix('}')))
                .unwrap_or(e);
            parse_ratio(e).ok_or_else(bad)?
        };
        Ok(Monomial::new(coeff, exponent))
    }
}

fn parse_ratio(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (i64, i64) = (p.parse().ok()?, q.parse().ok()?);
            (q != 0).then(|| Rational64::new(p, q))
        }
        None => Some(Rational64::from_integer(s.parse().ok()?)),
    }
}

mod ratio_string {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_ratio(s.trim()).ok_or_else(|| serde::de::Error::custom(format!("bad exponent '{s}'")))
    }
}

/// A diagonal path `t ↦ diag(cᵢ t^{eᵢ})`, with limits taken as `t → +∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Monomial>", into = "Vec<Monomial>")]
pub struct MonomialDiagonal {
    entries: Vec<Monomial>,
}

impl TryFrom<Vec<Monomial>> for MonomialDiagonal {
    type Error = Error;

    fn try_from(entries: Vec<Monomial>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<MonomialDiagonal> for Vec<Monomial> {
    fn from(p: MonomialDiagonal) -> Self {
        p.entries
    }
}

impl MonomialDiagonal {
    pub fn new(entries: Vec<Monomial>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "monomial paths need at least 2 entries, got {}",
                entries.len()
            )));
        }
        if let Some(index) = entries.iter().position(|m| m.coeff == 0.0 || !m.coeff.is_finite()) {
            return Err(Error::ZeroEigenvalue { index });
        }
        Ok(Self { entries })
    }

    /// A constant path.
    pub fn constant(diag: &[f64]) -> Result<Self> {
        Self::new(diag.iter().map(|&c| Monomial::constant(c)).collect())
    }

    pub fn entries(&self) -> &[Monomial] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.entries.iter().map(|m| m.eval(t)).collect()
    }

    /// Converts a path parametrised with `t → 0⁺` to the `t → +∞` convention.
    pub fn reversed(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|m| Monomial::new(m.coeff, -m.exponent))
                .collect(),
        }
    }

    /// Entrywise product with a common monomial `c·t^e`.
    pub fn scaled(&self, common: Monomial) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|m| Monomial::new(m.coeff * common.coeff, m.exponent + common.exponent))
                .collect(),
        )
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|m| m.exponent.is_zero())
    }

    pub fn max_abs_exponent(&self) -> Rational64 {
        self.entries
            .iter()
            .map(|m| m.exponent.abs())
            .max()
            .unwrap_or_else(Rational64::zero)
    }
}

impl fmt::Display for MonomialDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MonomialDiagonal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Monomial>>>()?;
        Self::new(entries)
    }
}

/// Path of forms whose orthogonal group is `C_t O(J) C_t⁻¹` for a diagonal
/// conjugator `C_t`: entries `Jᵢ cᵢ⁻² t^{−2eᵢ}`.
pub fn conjugacy_to_form_path(conj: &MonomialDiagonal, form: &[f64]) -> Result<MonomialDiagonal> {
    if conj.len() != form.len() {
        return Err(Error::DimensionMismatch(format!(
            "conjugator has {} entries, form has {}",
            conj.len(),
            form.len()
        )));
    }
    if let Some(index) = form.iter().position(|&j| j == 0.0) {
        return Err(Error::ZeroEigenvalue { index });
    }
    MonomialDiagonal::new(
        conj.entries
            .iter()
            .zip(form)
            .map(|(c, &j)| {
                Monomial::new(j / (c.coeff * c.coeff), c.exponent * Rational64::from_integer(-2))
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn parses_monomials() {
        let m: Monomial = "2*t^3/2".parse().unwrap();
        assert_eq!(m, Monomial::new(2.0, r(3, 2)));
        assert_eq!("t".parse::<Monomial>().unwrap(), Monomial::new(1.0, r(1, 1)));
        assert_eq!("-t^{1/2}".parse::<Monomial>().unwrap(), Monomial::new(-1.0, r(1, 2)));
        assert_eq!("0.5 * t^(-2)".parse::<Monomial>().unwrap(), Monomial::new(0.5, r(-2, 1)));
        assert_eq!("-1".parse::<Monomial>().unwrap(), Monomial::constant(-1.0));
        assert!("t^x".parse::<Monomial>().is_err());
        assert!("t^1/0".parse::<Monomial>().is_err());
        assert!("2*s".parse::<Monomial>().is_err());
    }

    #[test]
    fn parses_paths() {
        let p: MonomialDiagonal = "t^2,t,1".parse().unwrap();
        assert_eq!(p.entries()[0].exponent, r(2, 1));
        assert_eq!(p.entries()[2], Monomial::constant(1.0));
        assert_eq!(p.to_string(), "t^2,t,1");
        assert!("t,0".parse::<MonomialDiagonal>().is_err());
        assert!("t".parse::<MonomialDiagonal>().is_err());
        let back: MonomialDiagonal = p.to_string().parse().unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn conjugation_to_forms() {
        let c: MonomialDiagonal = "1,1,t^1/2".parse().unwrap();
        let f = conjugacy_to_form_path(&c, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(f, "1,1,t^-1".parse().unwrap());

        let id = MonomialDiagonal::constant(&[1.0, 1.0, 1.0]).unwrap();
        let f = conjugacy_to_form_path(&id, &[2.0, -1.0, 3.0]).unwrap();
        assert_eq!(f, MonomialDiagonal::constant(&[2.0, -1.0, 3.0]).unwrap());

        let c: MonomialDiagonal = "t^2,t,1".parse().unwrap();
        let f = conjugacy_to_form_path(&c, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(f, "t^-4,t^-2,1".parse().unwrap());

        assert!(matches!(
            conjugacy_to_form_path(&c, &[1.0, 0.0, 1.0]),
            Err(Error::ZeroEigenvalue { index: 1 })
        ));
    }

    #[test]
    fn serde_uses_rational_strings() {
        let p: MonomialDiagonal = "3*t^-1/2,1".parse().unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"coeff":3.0,"exponent":"-1/2"},{"coeff":1.0,"exponent":"0"}]"#);
        assert_eq!(serde_json::from_str::<MonomialDiagonal>(&s).unwrap(), p);
    }
}
