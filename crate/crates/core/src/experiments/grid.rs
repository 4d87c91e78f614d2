//! Grid cells, their stable names, the reference grids, and the grid file
//! parser.
//!
//! A grid file holds one cell per line as whitespace- or comma-separated
//! `key=value` pairs. Blank lines and text after `#` are ignored.
//!
//! | experiment | keys |
//! |---|---|
//! | `table1`, `table2` | `p` (`50` or `20x30x50`), `r` (`5` or `5x5x5`, default 5), `lambda` |
//! | `phase` | `p`, `alpha`, `r` (default 5), `noise` (`gaussian`/`uniform`), `start` (`spectral`/`warm`) |
//! | `clique` | `n`, `kappa` |

use std::collections::BTreeMap;
use std::fmt;

use crate::ensembles::NoiseKind;
use crate::error::{Error, Result};
use crate::rng::fnv1a;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Table1,
    Table2,
    Phase,
    CliqueCurve,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::Table2 => "table2",
            Experiment::Phase => "phase",
            Experiment::CliqueCurve => "clique",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        [Experiment::Table1, Experiment::Table2, Experiment::Phase, Experiment::CliqueCurve]
            .into_iter()
            .find(|e| e.id() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StartKind {
    Spectral,
    Warm,
}

impl StartKind {
    pub fn label(self) -> &'static str {
        match self {
            StartKind::Spectral => "spectral",
            StartKind::Warm => "warm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridCell {
    /// Rescaled Gaussian core with Haar factors and standard Gaussian noise.
    Tucker { dims: [usize; 3], ranks: [usize; 3], lambda: f64 },
    /// Diagonal core `p^α` on the superdiagonal.
    Phase { p: usize, r: usize, alpha: f64, noise: NoiseKind, start: StartKind },
    Clique { n: usize, kappa: usize },
}

impl GridCell {
    pub fn name(&self) -> String {
        match self {
            GridCell::Tucker { dims: [p1, p2, p3], ranks: [r1, r2, r3], lambda } => {
                format!("{p1}x{p2}x{p3}_{r1}x{r2}x{r3}_lam{lambda}")
            }
            GridCell::Phase { p, r, alpha, noise, start } => {
                let r = if *r == 5 { String::new() } else { format!("_r{r}") };
                format!("p{p}_a{alpha}{r}_{noise}_{}", start.label())
            }
            GridCell::Clique { n, kappa } => format!("n{n}_k{kappa}"),
        }
    }

    /// Key for the random streams of this cell. Phase cells that differ only
    /// in noise law or start share a key, so those comparisons are paired.
    pub fn stream_key(&self) -> u64 {
        match self {
            GridCell::Phase { p, r, alpha, .. } => fnv1a(&format!("phase_p{p}_r{r}_a{alpha}")),
            other => fnv1a(&other.name()),
        }
    }

    pub fn experiment_matches(&self, e: Experiment) -> bool {
        matches!(
            (self, e),
            (GridCell::Tucker { .. }, Experiment::Table1 | Experiment::Table2)
                | (GridCell::Phase { .. }, Experiment::Phase)
                | (GridCell::Clique { .. }, Experiment::CliqueCurve)
        )
    }
}

fn tucker(p: [usize; 3], r: usize, lambda: f64) -> GridCell {
    GridCell::Tucker { dims: p, ranks: [r; 3], lambda }
}

/// The eight cubic `(p, r, λ)` cells.
pub fn table1_grid() -> Vec<GridCell> {
    [(50, 5, 20.0), (50, 5, 50.0), (50, 10, 20.0), (50, 10, 50.0), (100, 5, 40.0), (100, 5, 60.0), (100, 10, 40.0), (100, 10, 60.0)]
        .into_iter()
        .map(|(p, r, l)| tucker([p; 3], r, l))
        .collect()
}

/// The eight rectangular `(p1, p2, p3, λ)` cells, ranks 5.
pub fn table2_grid() -> Vec<GridCell> {
    [
        ([20, 30, 50], 20.0),
        ([20, 30, 50], 100.0),
        ([30, 50, 100], 20.0),
        ([30, 50, 100], 100.0),
        ([100, 200, 300], 50.0),
        ([100, 200, 300], 100.0),
        ([200, 300, 400], 50.0),
        ([200, 300, 400], 150.0),
    ]
    .into_iter()
    .map(|(p, l)| tucker(p, 5, l))
    .collect()
}

/// `α = 0.40, 0.45, ..., 0.90`.
pub fn phase_alphas() -> Vec<f64> {
    (0..=10).map(|i| (40 + 5 * i) as f64 / 100.0).collect()
}

/// `p ∈ {50, 100}`, `r = 5`, the full α sweep, both noise laws and starts.
pub fn phase_grid() -> Vec<GridCell> {
    let mut cells = Vec::new();
    for p in [50, 100] {
        for noise in [NoiseKind::standard_gaussian(), NoiseKind::Uniform] {
            for start in [StartKind::Spectral, StartKind::Warm] {
                for alpha in phase_alphas() {
                    cells.push(GridCell::Phase { p, r: 5, alpha, noise, start });
                }
            }
        }
    }
    cells
}

pub fn clique_grid() -> Vec<GridCell> {
    [4, 10, 20, 40, 60, 80, 120, 300].into_iter().map(|kappa| GridCell::Clique { n: 600, kappa }).collect()
}

pub fn default_grid(e: Experiment) -> Vec<GridCell> {
    match e {
        Experiment::Table1 => table1_grid(),
        Experiment::Table2 => table2_grid(),
        Experiment::Phase => phase_grid(),
        Experiment::CliqueCurve => clique_grid(),
    }
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_triple(line: usize, key: &str, v: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = v.split('x').collect();
    let nums: Vec<usize> = match parts.iter().map(|s| s.parse::<usize>()).collect() {
        Ok(n) => n,
        Err(_) => return parse_err(line, format!("bad value `{v}` for `{key}`")),
    };
    match nums[..] {
        [a] => Ok([a; 3]),
        [a, b, c] => Ok([a, b, c]),
        _ => parse_err(line, format!("`{key}` takes one value or three joined by `x`")),
    }
}

struct Fields<'a> {
    line: usize,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn take(&mut self, key: &str) -> Result<&'a str> {
        match self.map.remove(key) {
            Some(v) => Ok(v),
            None => parse_err(self.line, format!("missing key `{key}`")),
        }
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.take(key)?;
        v.parse().or_else(|_| parse_err(self.line, format!("bad value `{v}` for `{key}`")))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => parse_err(self.line, format!("unknown key `{k}`")),
            None => Ok(()),
        }
    }
}

fn parse_cell(e: Experiment, line: usize, text: &str) -> Result<GridCell> {
    let mut map = BTreeMap::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let Some((k, v)) = tok.split_once('=') else {
            return parse_err(line, format!("expected key=value, found `{tok}`"));
        };
        if map.insert(k.trim(), v.trim()).is_some() {
            return parse_err(line, format!("duplicate key `{k}`"));
        }
    }
    let mut f = Fields { line, map };
    let cell = match e {
        Experiment::Table1 | Experiment::Table2 => {
            let dims = parse_triple(line, "p", f.take("p")?)?;
            let ranks = match f.map.remove("r") {
                Some(v) => parse_triple(line, "r", v)?,
                None => [5; 3],
            };
            let lambda: f64 = f.num("lambda")?;
            if !(lambda > 0.0 && lambda.is_finite()) {
                return parse_err(line, "lambda must be positive");
            }
            GridCell::Tucker { dims, ranks, lambda }
        }
        Experiment::Phase => {
            let p = f.num("p")?;
            let alpha: f64 = f.num("alpha")?;
            let r = if f.map.contains_key("r") { f.num("r")? } else { 5 };
            let noise = match f.take("noise")? {
                "gaussian" => NoiseKind::standard_gaussian(),
                "uniform" => NoiseKind::Uniform,
                other => return parse_err(line, format!("unknown noise `{other}`")),
            };
            let start = match f.take("start")? {
                "spectral" => StartKind::Spectral,
                "warm" => StartKind::Warm,
                other => return parse_err(line, format!("unknown start `{other}`")),
            };
            GridCell::Phase { p, r, alpha, noise, start }
        }
        Experiment::CliqueCurve => GridCell::Clique { n: f.num("n")?, kappa: f.num("kappa")? },
    };
    f.finish()?;
    Ok(cell)
}

/// Parses a grid file for experiment `e`.
pub fn parse_grid(e: Experiment, text: &str) -> Result<Vec<GridCell>> {
    let mut cells = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            cells.push(parse_cell(e, idx + 1, body)?);
        }
    }
    if cells.is_empty() {
        return parse_err(1, "grid file has no cells");
    }
    Ok(cells)
}
