use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
            Format::Svg => "svg",
        })
    }
}

/// A sweep `a:b:n` of `n` points from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("grid '{s}' is not of the form a:b:n"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        let grid = Grid {
            start: num(a)?,
            end: num(b)?,
            count: n.parse().map_err(|_| format!("'{n}' is not a point count"))?,
        };
        if grid.count == 0 {
            return Err("grids need at least one point".into());
        }
        if !(grid.start.is_finite() && grid.end.is_finite()) {
            return Err("grid ends must be finite".into());
        }
        Ok(grid)
    }
}

impl Grid {
    pub fn linear(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + step * k as f64).collect()
    }

    /// Geometric spacing, for sweeps in `t`.
    pub fn log(&self) -> Result<Vec<f64>, String> {
        if self.start <= 0.0 || self.end <= 0.0 {
            return Err("log-spaced grids need positive ends".into());
        }
        let g = Grid {
            start: self.start.ln(),
            end: self.end.ln(),
            count: self.count,
        };
        Ok(g.linear().into_iter().map(f64::exp).collect())
    }
}

pub fn positive_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance '{s}' must be a positive number")),
    }
}
