use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cubicflow::algebra::C64;
use cubicflow::model::{Coeff, CoefficientSet, ParameterSet};
use cubicflow::reduced::{GIndex, ReducedCoefficients};
use cubicflow::solver::real_grid;
use cubicflow::{Error, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Coefficients with some entries possibly absent (treated as unknowns).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialCoefficients {
    c11: Option<C64>,
    c12: Option<C64>,
    c13: Option<C64>,
    c14: Option<C64>,
    c21: Option<C64>,
    c22: Option<C64>,
    c23: Option<C64>,
    c24: Option<C64>,
}

impl PartialCoefficients {
    fn entries(&self) -> [Option<C64>; 8] {
        [self.c11, self.c12, self.c13, self.c14, self.c21, self.c22, self.c23, self.c24]
    }

    pub fn missing(&self) -> Vec<Coeff> {
        Coeff::ALL.iter().zip(self.entries()).filter(|(_, v)| v.is_none()).map(|(&k, _)| k).collect()
    }

    /// Absent entries become zero.
    pub fn filled(&self) -> CoefficientSet {
        CoefficientSet::from_array(self.entries().map(|v| v.unwrap_or_default()))
    }

    pub fn complete(&self) -> Result<CoefficientSet> {
        match self.missing().as_slice() {
            [] => Ok(self.filled()),
            m => Err(Error::Validation(format!("missing coefficients: {}", names(m)))),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialReduced {
    g11: Option<C64>,
    g12: Option<C64>,
    g13: Option<C64>,
    g21: Option<C64>,
    g22: Option<C64>,
    g23: Option<C64>,
}

impl PartialReduced {
    fn entries(&self) -> [Option<C64>; 6] {
        [self.g11, self.g12, self.g13, self.g21, self.g22, self.g23]
    }

    pub fn missing(&self) -> Vec<GIndex> {
        GIndex::ALL.iter().zip(self.entries()).filter(|(_, v)| v.is_none()).map(|(&k, _)| k).collect()
    }

    pub fn filled(&self) -> ReducedCoefficients {
        ReducedCoefficients::from_array(self.entries().map(|v| v.unwrap_or_default()))
    }
}

fn names<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}

/// Contents of `--input`. Every field is optional; each command reads the
/// ones it needs and command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    pub parameters: Option<ParameterSet>,
    pub coefficients: Option<PartialCoefficients>,
    pub reduced: Option<PartialReduced>,
    pub x0: Option<[C64; 2]>,
    /// Explicit, possibly complex, time grid.
    pub times: Option<Vec<C64>>,
    /// `t0:t1:n`
    pub grid: Option<String>,
    pub omega: Option<f64>,
}

impl Input {
    /// Read from a file path, or parse the argument itself when it starts
    /// with `{`. No argument means an empty input.
    pub fn load(arg: Option<&str>) -> Result<Input> {
        let Some(arg) = arg else { return Ok(Input::default()) };
        let text = if arg.trim_start().starts_with('{') {
            arg.to_string()
        } else {
            fs::read_to_string(arg).map_err(|e| Error::Validation(format!("cannot read {arg}: {e}")))?
        };
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("bad input JSON: {e}")))
    }

    pub fn x0(&self) -> Result<[C64; 2]> {
        self.x0.ok_or_else(|| Error::Validation("initial data x0 required".into()))
    }

    pub fn omega(&self, flag: Option<f64>) -> Result<f64> {
        flag.or(self.omega).ok_or_else(|| Error::Validation("omega required".into()))
    }

    /// The grid flag wins over the input; an explicit time list is used
    /// when neither gives a `t0:t1:n` spec.
    pub fn times(&self, flag: Option<&str>) -> Result<Vec<C64>> {
        if let Some(g) = flag.or(self.grid.as_deref()) {
            return parse_grid(g);
        }
        match &self.times {
            Some(t) if !t.is_empty() => Ok(t.clone()),
            _ => Err(Error::Validation("time grid required (--grid t0:t1:n or \"times\")".into())),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<C64>> {
    let bad = || Error::Validation(format!("grid must be t0:t1:n, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [t0, t1, n] = parts.as_slice() else { return Err(bad()) };
    let t0: f64 = t0.trim().parse().map_err(|_| bad())?;
    let t1: f64 = t1.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !t0.is_finite() || !t1.is_finite() {
        return Err(bad());
    }
    Ok(real_grid(t0, t1, n))
}

pub fn parse_coeff_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|k| k.trim().parse::<T>().map_err(|_| Error::Validation(format!("unknown coefficient {k:?}"))))
        .collect()
}

/// Destination of the command output: a file or stdout.
pub struct Sink(Option<PathBuf>);

impl Sink {
    pub fn new(path: Option<&Path>) -> Self {
        Sink(path.map(Path::to_path_buf))
    }

    fn write_bytes(&self, bytes: &[u8]) -> Result<()> {
        let io_err = |e: std::io::Error| Error::Validation(format!("cannot write output: {e}"));
        match &self.0 {
            Some(p) => fs::write(p, bytes).map_err(io_err),
            None => std::io::stdout().lock().write_all(bytes).map_err(io_err),
        }
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Validation(e.to_string()))?;
        s.push('\n');
        self.write_bytes(s.as_bytes())
    }

    pub fn csv(&self, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Validation(e.to_string());
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Validation(e.to_string()))?;
        self.write_bytes(&bytes)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    #[serde(flatten)]
    pub body: T,
}
