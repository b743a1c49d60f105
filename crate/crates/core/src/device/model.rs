use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::lut::{Direction, LookupTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateMode {
    /// Exact arithmetic, no device behavior.
    Numeric,
    /// One table pair shared by every cell.
    Standard,
    /// Per-cell table pairs drawn from a device set.
    Multi,
}

impl UpdateMode {
    pub const ALL: [UpdateMode; 3] = [UpdateMode::Numeric, UpdateMode::Standard, UpdateMode::Multi];

    pub fn as_str(self) -> &'static str {
        match self {
            UpdateMode::Numeric => "numeric",
            UpdateMode::Standard => "standard",
            UpdateMode::Multi => "multi",
        }
    }
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "numeric" => Ok(UpdateMode::Numeric),
            "standard" => Ok(UpdateMode::Standard),
            "multi" => Ok(UpdateMode::Multi),
            other => Err(Error::Config(format!("unknown update mode '{other}'"))),
        }
    }
}

/// How a target of `r` unit steps becomes a whole number of pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PulseRounding {
    /// `⌊r⌋` pulses plus one more with probability `r − ⌊r⌋`; the expected
    /// count is exactly `r`.
    #[default]
    Stochastic,
    /// `round(r)` pulses, at least one.
    Nearest,
}

impl PulseRounding {
    pub fn as_str(self) -> &'static str {
        match self {
            PulseRounding::Stochastic => "stochastic",
            PulseRounding::Nearest => "nearest",
        }
    }
}

impl fmt::Display for PulseRounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PulseRounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stochastic" => Ok(PulseRounding::Stochastic),
            "nearest" => Ok(PulseRounding::Nearest),
            other => Err(Error::Config(format!("unknown pulse rounding '{other}'"))),
        }
    }
}

/// How a requested conductance change turns into a realized one.
///
/// Tables are shared behind `Arc`, so cloning a model for each core is cheap.
#[derive(Debug, Clone)]
pub struct DeviceModel {
    mode: UpdateMode,
    tables_inc: Arc<[LookupTable]>,
    tables_dec: Arc<[LookupTable]>,
    unit_step: f64,
    rounding: PulseRounding,
}

impl DeviceModel {
    pub fn numeric() -> Self {
        DeviceModel {
            mode: UpdateMode::Numeric,
            tables_inc: Arc::from(Vec::new()),
            tables_dec: Arc::from(Vec::new()),
            unit_step: 1.0,
            rounding: PulseRounding::default(),
        }
    }

    pub fn standard(inc: LookupTable, dec: LookupTable, unit_step: f64) -> Result<Self> {
        Self::with_tables(UpdateMode::Standard, vec![inc], vec![dec], unit_step)
    }

    /// Multi-device model; `inc[k]` and `dec[k]` describe device `k`.
    pub fn multi(inc: Vec<LookupTable>, dec: Vec<LookupTable>, unit_step: f64) -> Result<Self> {
        if inc.len() < 2 {
            return Err(Error::Config(format!(
                "multi mode needs at least 2 devices, got {}",
                inc.len()
            )));
        }
        Self::with_tables(UpdateMode::Multi, inc, dec, unit_step)
    }

    /// Splits a mixed table list by direction, keeping file order within each
    /// direction for index pairing.
    pub fn from_tables(mode: UpdateMode, tables: Vec<LookupTable>, unit_step: f64) -> Result<Self> {
        if mode == UpdateMode::Numeric {
            return Ok(Self::numeric());
        }
        let (inc, dec): (Vec<_>, Vec<_>) = tables
            .into_iter()
            .partition(|t| t.direction() == Direction::Increasing);
        match mode {
            UpdateMode::Standard => {
                let (Some(i), Some(d)) = (inc.into_iter().next(), dec.into_iter().next()) else {
                    return Err(Error::Config(
                        "standard mode needs one increasing and one decreasing table".into(),
                    ));
                };
                Self::standard(i, d, unit_step)
            }
            _ => Self::multi(inc, dec, unit_step),
        }
    }

    fn with_tables(
        mode: UpdateMode,
        inc: Vec<LookupTable>,
        dec: Vec<LookupTable>,
        unit_step: f64,
    ) -> Result<Self> {
        if !(unit_step.is_finite() && unit_step > 0.0) {
            return Err(Error::Config(format!("unit step must be positive, got {unit_step}")));
        }
        if inc.len() != dec.len() {
            return Err(Error::Config(format!(
                "{} increasing vs {} decreasing tables",
                inc.len(),
                dec.len()
            )));
        }
        if mode == UpdateMode::Standard && inc.len() != 1 {
            return Err(Error::Config("standard mode takes exactly one table pair".into()));
        }
        let wrong = |ts: &[LookupTable], want: Direction| ts.iter().any(|t| t.direction() != want);
        if wrong(&inc, Direction::Increasing) || wrong(&dec, Direction::Decreasing) {
            return Err(Error::Config("table direction does not match its slot".into()));
        }
        Ok(DeviceModel {
            mode,
            tables_inc: Arc::from(inc),
            tables_dec: Arc::from(dec),
            unit_step,
            rounding: PulseRounding::default(),
        })
    }

    pub fn with_rounding(mut self, rounding: PulseRounding) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn rounding(&self) -> PulseRounding {
        self.rounding
    }

    pub fn mode(&self) -> UpdateMode {
        self.mode
    }

    pub fn unit_step(&self) -> f64 {
        self.unit_step
    }

    pub fn device_count(&self) -> usize {
        self.tables_inc.len()
    }

    pub fn tables(&self, direction: Direction) -> &[LookupTable] {
        match direction {
            Direction::Increasing => &self.tables_inc,
            Direction::Decreasing => &self.tables_dec,
        }
    }

    /// Table driving `cell_id` in `direction`. Multi mode assigns `cell_id mod D`.
    pub fn table_for(&self, cell_id: usize, direction: Direction) -> Result<&LookupTable> {
        let tables = self.tables(direction);
        let picked = match self.mode {
            UpdateMode::Numeric => None,
            UpdateMode::Standard => tables.first(),
            UpdateMode::Multi => tables.get(cell_id % tables.len().max(1)),
        };
        picked.ok_or_else(|| {
            Error::Config(format!("no {direction} table for {} mode", self.mode))
        })
    }

    /// Number of pulses used to realize a conductance change of `target`.
    /// Stochastic rounding draws from `rng` unless the target is a whole
    /// number of steps.
    pub fn pulse_count<R: Rng + ?Sized>(&self, target: f64, rng: &mut R) -> usize {
        if target == 0.0 {
            return 0;
        }
        let r = target.abs() / self.unit_step;
        let nearest = r.round();
        match self.rounding {
            PulseRounding::Nearest => (nearest as usize).max(1),
            PulseRounding::Stochastic => {
                if (r - nearest).abs() <= 1e-9 * r.max(1.0) {
                    return nearest as usize;
                }
                let whole = r.floor();
                whole as usize + usize::from(rng.random::<f64>() < r - whole)
            }
        }
    }

    /// Realized conductance change for a requested change `target` on a cell
    /// currently at normalized conductance `g`.
    ///
    /// Numeric mode returns `target` unchanged. Otherwise the target is
    /// quantized into pulses; each pulse draws a fresh quantile, reads the
    /// table at the current conductance, and moves (clamped) conductance before
    /// the next pulse.
    pub fn sample_update<R: Rng + ?Sized>(
        &self,
        cell_id: usize,
        g: f64,
        target: f64,
        rng: &mut R,
    ) -> Result<f64> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::Domain(format!("conductance {g} outside [0,1]")));
        }
        if !target.is_finite() {
            return Err(Error::Domain(format!("non-finite update target {target}")));
        }
        if target == 0.0 {
            return Ok(0.0);
        }
        if self.mode == UpdateMode::Numeric {
            return Ok(target);
        }
        let direction = if target > 0.0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        };
        let table = self.table_for(cell_id, direction)?;
        let mut g = g;
        let mut realized = 0.0;
        for _ in 0..self.pulse_count(target, rng) {
            realized += apply_pulse(table, &mut g, rng);
        }
        Ok(realized)
    }

    /// One pulse on a cell at `g`; returns the (clamped) change.
    pub fn pulse<R: Rng + ?Sized>(
        &self,
        cell_id: usize,
        g: f64,
        direction: Direction,
        rng: &mut R,
    ) -> Result<f64> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::Domain(format!("conductance {g} outside [0,1]")));
        }
        let table = self.table_for(cell_id, direction)?;
        let mut g = g;
        Ok(apply_pulse(table, &mut g, rng))
    }
}

#[inline]
fn apply_pulse<R: Rng + ?Sized>(table: &LookupTable, g: &mut f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let delta = table.sample(*g, u);
    let next = *g + delta;
    if (0.0..=1.0).contains(&next) {
        *g = next;
        delta
    } else {
        let clamped = next.clamp(0.0, 1.0);
        let applied = clamped - *g;
        *g = clamped;
        applied
    }
}
