//! Conductance-update lookup tables.
//!
//! A table maps `(normalized conductance, quantile)` to the conductance
//! increment produced by one write pulse. Each row is the inverse CDF of the
//! per-pulse increment at one conductance level, so drawing `u ~ U(0,1)` and
//! reading the row at `u` samples the device.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "increasing" => Ok(Direction::Increasing),
            "decreasing" => Ok(Direction::Decreasing),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    g_grid: Vec<f64>,
    q_grid: Vec<f64>,
    /// Row-major `[g_grid.len() × q_grid.len()]`.
    delta_g: Vec<f64>,
    direction: Direction,
}

/// Relative slack on the row-mean sign check, for rows whose mean is zero
/// up to rounding (e.g. a symmetric spread around a vanishing mean).
const MEAN_SIGN_SLACK: f64 = 1e-12;

impl LookupTable {
    /// Builds and validates a table. `delta_g` is row-major, one row per
    /// conductance level.
    pub fn new(
        g_grid: Vec<f64>,
        q_grid: Vec<f64>,
        delta_g: Vec<f64>,
        direction: Direction,
    ) -> Result<Self> {
        let table = LookupTable {
            g_grid,
            q_grid,
            delta_g,
            direction,
        };
        table
            .check()
            .map_err(|message| Error::Table { table: 0, message })?;
        Ok(table)
    }

    pub fn from_rows(
        g_grid: Vec<f64>,
        q_grid: Vec<f64>,
        rows: &[Vec<f64>],
        direction: Direction,
    ) -> Result<Self> {
        Self::new(g_grid, q_grid, rows.concat(), direction)
    }

    /// Invariant check. Messages carry row/column coordinates.
    pub(crate) fn check(&self) -> std::result::Result<(), String> {
        let (ng, nq) = (self.g_grid.len(), self.q_grid.len());
        if ng < 2 {
            return Err(format!("conductance grid needs at least 2 points, got {ng}"));
        }
        if nq < 2 {
            return Err(format!("quantile grid needs at least 2 points, got {nq}"));
        }
        if self.delta_g.len() != ng * nq {
            return Err(format!(
                "expected {} increments ({ng}x{nq}), got {}",
                ng * nq,
                self.delta_g.len()
            ));
        }
        if let Some(k) = self.g_grid.iter().position(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(format!("conductance grid value at column {k} outside [0,1]"));
        }
        if let Some(k) = self.g_grid.windows(2).position(|w| w[0] >= w[1]) {
            return Err(format!("unsorted conductance grid at column {}", k + 1));
        }
        if let Some(k) = self.q_grid.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(format!("unsorted quantile grid at column {}", k + 1));
        }
        if self.q_grid[0] != 0.0 || self.q_grid[nq - 1] != 1.0 {
            return Err("quantile grid must start at 0 and end at 1".into());
        }
        for i in 0..ng {
            let row = self.row(i);
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(format!("non-finite increment at row {i}, column {j}"));
            }
            if let Some(j) = row.windows(2).position(|w| w[0] > w[1]) {
                return Err(format!("non-monotone CDF row {i} at column {}", j + 1));
            }
            let mean = self.row_mean(i);
            let slack = MEAN_SIGN_SLACK * row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let bad = match self.direction {
                Direction::Increasing => mean < -slack,
                Direction::Decreasing => mean > slack,
            };
            if bad {
                return Err(format!(
                    "row {i} mean {mean:e} has the wrong sign for a {} table",
                    self.direction
                ));
            }
        }
        Ok(())
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn g_grid(&self) -> &[f64] {
        &self.g_grid
    }

    pub fn q_grid(&self) -> &[f64] {
        &self.q_grid
    }

    pub fn delta_g(&self) -> &[f64] {
        &self.delta_g
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nq = self.q_grid.len();
        &self.delta_g[i * nq..(i + 1) * nq]
    }

    /// Expected increment of row `i`: the integral of its piecewise-linear
    /// inverse CDF over `[0,1]`.
    pub fn row_mean(&self, i: usize) -> f64 {
        trapezoid(&self.q_grid, self.row(i))
    }

    /// Inverse-CDF row interpolated linearly in conductance, sampled at the
    /// quantile grid.
    pub fn row_at(&self, g: f64) -> Vec<f64> {
        let (i, t) = locate(&self.g_grid, g);
        let (lo, hi) = (self.row(i), self.row(i + 1));
        lo.iter().zip(hi).map(|(a, b)| a + t * (b - a)).collect()
    }

    /// Expected per-pulse increment at conductance `g`.
    pub fn expected_increment(&self, g: f64) -> f64 {
        trapezoid(&self.q_grid, &self.row_at(g))
    }

    /// Bilinear read at conductance `g` and quantile `u`.
    #[inline]
    pub fn sample(&self, g: f64, u: f64) -> f64 {
        let (i, tg) = locate(&self.g_grid, g);
        let (j, tq) = locate(&self.q_grid, u);
        let nq = self.q_grid.len();
        let r0 = &self.delta_g[i * nq..];
        let r1 = &self.delta_g[(i + 1) * nq..];
        let a = r0[j] + tq * (r0[j + 1] - r0[j]);
        let b = r1[j] + tq * (r1[j + 1] - r1[j]);
        a + tg * (b - a)
    }
}

/// Cell index `i` and fraction `t` such that `x ≈ grid[i] + t·(grid[i+1] − grid[i])`,
/// clamped to the grid's ends.
#[inline]
fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    let i = grid.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    let t = ((x - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
    (i, t)
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn write_values(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{v:.16e}").unwrap();
    }
    out.push('\n');
}

/// Serializes tables in the `LUT v1` text format.
pub fn format_tables(tables: &[LookupTable]) -> String {
    let mut out = String::new();
    for t in tables {
        let (ng, nq) = (t.g_grid.len(), t.q_grid.len());
        writeln!(out, "LUT v1 {} {ng} {nq}", t.direction).unwrap();
        write_values(&mut out, &t.g_grid);
        write_values(&mut out, &t.q_grid);
        for i in 0..ng {
            write_values(&mut out, t.row(i));
        }
    }
    out
}

pub fn save_tables(tables: &[LookupTable], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_tables(tables)).map_err(|e| Error::io(path, e))
}

pub fn load_tables(path: impl AsRef<Path>) -> Result<Vec<LookupTable>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tables(&text, path)
}

/// Parses `LUT v1` text. `origin` is only used in error messages. Blank lines
/// and lines starting with `#` are ignored.
pub fn parse_tables(text: &str, origin: &Path) -> Result<Vec<LookupTable>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let numbers = |lineno: usize, line: &str, expect: usize| -> Result<Vec<f64>> {
        let values = line
            .split_whitespace()
            .enumerate()
            .map(|(col, tok)| {
                tok.parse::<f64>().map_err(|_| {
                    Error::parse(origin, lineno, format!("column {col}: not a number: '{tok}'"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != expect {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected {expect} values, got {}", values.len()),
            ));
        }
        Ok(values)
    };

    let mut tables = Vec::new();
    while let Some((lineno, header)) = lines.next() {
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [tag, version, dir, ng, nq] = fields[..] else {
            return Err(Error::parse(origin, lineno, "malformed table header"));
        };
        if tag != "LUT" || version != "v1" {
            return Err(Error::parse(origin, lineno, "expected 'LUT v1' header"));
        }
        let direction: Direction = dir.parse().map_err(|m| Error::parse(origin, lineno, m))?;
        let dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(origin, lineno, format!("bad dimension '{s}'")))
        };
        let (ng, nq) = (dim(ng)?, dim(nq)?);

        let mut next = |what: &str| {
            lines.next().ok_or_else(|| {
                Error::parse(origin, lineno, format!("table truncated before {what}"))
            })
        };
        let (l, g_line) = next("conductance grid")?;
        let g_grid = numbers(l, g_line, ng)?;
        let (l, q_line) = next("quantile grid")?;
        let q_grid = numbers(l, q_line, nq)?;
        let mut delta_g = Vec::with_capacity(ng * nq);
        for _ in 0..ng {
            let (l, row) = next("increment rows")?;
            delta_g.extend(numbers(l, row, nq)?);
        }

        let table = LookupTable {
            g_grid,
            q_grid,
            delta_g,
            direction,
        };
        table.check().map_err(|message| Error::Table {
            table: tables.len(),
            message,
        })?;
        tables.push(table);
    }
    Ok(tables)
}
