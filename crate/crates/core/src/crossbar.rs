//! Balanced crossbar core: one weight matrix stored as the difference of two
//! conductance arrays.
//!
//! Conductances are kept as offsets from the midpoint 0.5, so a zero weight
//! sits at the center of both arrays and the decoded weight is
//! `w_max · (g⁺ − g⁻)`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::device::{DeviceModel, Direction, UpdateMode};
use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;

/// Cells beyond this offset from the midpoint (g outside [0.05, 0.95])
/// trigger an automatic recenter.
pub const DEFAULT_RECENTER_BAND: f64 = 0.45;

/// Pulse budget per device per recenter, on top of the nominal count.
const VERIFY_PULSE_SLACK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRecord {
    pub epoch: usize,
    /// Requested weight change.
    pub target: f64,
    /// Weight change actually applied.
    pub realized: f64,
}

impl UpdateRecord {
    pub fn error(&self) -> f64 {
        self.realized - self.target
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateErrorLog {
    records: Vec<UpdateRecord>,
}

impl UpdateErrorLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: UpdateRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[UpdateRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: UpdateErrorLog) {
        self.records.extend(other.records);
    }

    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(UpdateRecord::error).collect()
    }

    /// One `epoch target realized` line per record.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.records.len() * 52);
        for r in &self.records {
            writeln!(out, "{} {:.16e} {:.16e}", r.epoch, r.target, r.realized).unwrap();
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct BalancedCore {
    rows: usize,
    cols: usize,
    /// g⁺ − 0.5, in [−0.5, 0.5].
    pos: Vec<f64>,
    /// g⁻ − 0.5, in [−0.5, 0.5].
    neg: Vec<f64>,
    w_max: f64,
    device: DeviceModel,
    recenter_band: Option<f64>,
    log: Option<UpdateErrorLog>,
    recording: bool,
}

impl BalancedCore {
    /// Encodes `weights` symmetrically around the conductance midpoint.
    pub fn from_weights(weights: &Matrix, w_max: f64, device: DeviceModel) -> Result<Self> {
        if !(w_max.is_finite() && w_max > 0.0) {
            return Err(Error::Domain(format!("w_max must be positive, got {w_max}")));
        }
        if let Some(w) = weights.as_slice().iter().find(|w| !(w.abs() <= w_max)) {
            return Err(Error::Domain(format!("weight {w} exceeds w_max {w_max}")));
        }
        let pos: Vec<f64> = weights.as_slice().iter().map(|w| w / (2.0 * w_max)).collect();
        let neg = pos.iter().map(|p| -p).collect();
        Ok(BalancedCore {
            rows: weights.rows(),
            cols: weights.cols(),
            pos,
            neg,
            w_max,
            device,
            recenter_band: Some(DEFAULT_RECENTER_BAND),
            log: None,
            recording: false,
        })
    }

    pub fn zeros(rows: usize, cols: usize, w_max: f64, device: DeviceModel) -> Result<Self> {
        Self::from_weights(&Matrix::zeros(rows, cols), w_max, device)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn device(&self) -> &DeviceModel {
        &self.device
    }

    /// Offset band beyond which updates trigger a recenter; `None` disables it.
    pub fn set_recenter_band(&mut self, band: Option<f64>) {
        self.recenter_band = band;
    }

    pub fn g_pos(&self, i: usize, j: usize) -> f64 {
        0.5 + self.pos[i * self.cols + j]
    }

    pub fn g_neg(&self, i: usize, j: usize) -> f64 {
        0.5 + self.neg[i * self.cols + j]
    }

    /// Sets both conductances of a cell directly (normalized units).
    pub fn set_conductances(&mut self, i: usize, j: usize, g_pos: f64, g_neg: f64) -> Result<()> {
        for g in [g_pos, g_neg] {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::Domain(format!("conductance {g} outside [0,1]")));
            }
        }
        let c = i * self.cols + j;
        self.pos[c] = g_pos - 0.5;
        self.neg[c] = g_neg - 0.5;
        Ok(())
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let c = i * self.cols + j;
        self.w_max * (self.pos[c] - self.neg[c])
    }

    /// Re-encodes a single cell at the midpoint-symmetric position.
    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if !(w.abs() <= self.w_max) {
            return Err(Error::Domain(format!("weight {w} exceeds w_max {}", self.w_max)));
        }
        let c = i * self.cols + j;
        self.pos[c] = w / (2.0 * self.w_max);
        self.neg[c] = -self.pos[c];
        Ok(())
    }

    /// Decoded weight matrix.
    pub fn weights(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.weight(i, j))
    }

    /// Parallel read: `W·x`.
    pub fn vmm(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = 0.0;
                for (j, xj) in x.iter().enumerate() {
                    acc += self.weight(i, j) * xj;
                }
                acc
            })
            .collect())
    }

    /// Transpose read: `Wᵀ·d`.
    pub fn vmm_transpose(&self, d: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.rows, d.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, di) in d.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.weight(i, j) * di;
            }
        }
        Ok(out)
    }

    /// Starts recording target/realized pairs. Recording stays on until
    /// [`set_recording`](Self::set_recording) turns it off.
    pub fn enable_recording(&mut self) {
        self.log.get_or_insert_with(UpdateErrorLog::new);
        self.recording = true;
    }

    /// Pauses or resumes recording; only has an effect once enabled.
    pub fn set_recording(&mut self, on: bool) {
        self.recording = on && self.log.is_some();
    }

    pub fn log(&self) -> Option<&UpdateErrorLog> {
        self.log.as_ref()
    }

    pub fn take_log(&mut self) -> Option<UpdateErrorLog> {
        self.recording = false;
        self.log.take()
    }

    /// Parallel write of the rank-one update `ΔW = −eta·d·xᵀ`.
    pub fn outer_update<R: Rng + ?Sized>(
        &mut self,
        eta: f64,
        d: &[f64],
        x: &[f64],
        epoch: usize,
        rng: &mut R,
    ) -> Result<()> {
        check_dim(self.rows, d.len())?;
        check_dim(self.cols, x.len())?;
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Domain(format!("learning rate must be >= 0, got {eta}")));
        }
        for (i, di) in d.iter().enumerate() {
            if *di == 0.0 {
                continue;
            }
            for (j, xj) in x.iter().enumerate() {
                self.write_cell(i, j, -eta * di * xj, epoch, rng)?;
            }
        }
        self.auto_recenter(rng)
    }

    /// Element-wise write of an arbitrary weight change, for updates that are
    /// not rank one.
    pub fn apply_update<R: Rng + ?Sized>(
        &mut self,
        delta: &Matrix,
        epoch: usize,
        rng: &mut R,
    ) -> Result<()> {
        check_dim(self.rows, delta.rows())?;
        check_dim(self.cols, delta.cols())?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                self.write_cell(i, j, delta.get(i, j), epoch, rng)?;
            }
        }
        self.auto_recenter(rng)
    }

    /// Routes a weight change to the positive array when it raises the weight
    /// and to the negative array otherwise; both are only ever increased here.
    fn write_cell<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        j: usize,
        target_w: f64,
        epoch: usize,
        rng: &mut R,
    ) -> Result<()> {
        if !target_w.is_finite() {
            return Err(Error::Domain(format!("non-finite weight update {target_w}")));
        }
        if target_w == 0.0 {
            return Ok(());
        }
        let c = i * self.cols + j;
        let target_g = target_w / self.w_max;
        let (slot, cell_id, sign) = if target_g > 0.0 {
            (&mut self.pos[c], 2 * c, 1.0)
        } else {
            (&mut self.neg[c], 2 * c + 1, -1.0)
        };
        let dg = self
            .device
            .sample_update(cell_id, 0.5 + *slot, target_g.abs(), rng)?;
        let moved = *slot + dg;
        let applied = if (-0.5..=0.5).contains(&moved) {
            *slot = moved;
            dg
        } else {
            let clamped = moved.clamp(-0.5, 0.5);
            let applied = clamped - *slot;
            *slot = clamped;
            applied
        };
        if self.recording {
            if let Some(log) = self.log.as_mut() {
                log.push(UpdateRecord {
                    epoch,
                    target: self.w_max * target_g,
                    realized: sign * self.w_max * applied,
                });
            }
        }
        Ok(())
    }

    /// True when some cell sits outside the recenter band and shifting its
    /// pair would actually move it.
    pub fn needs_recenter(&self) -> bool {
        let Some(band) = self.recenter_band else {
            return false;
        };
        let min_shift = match self.device.mode() {
            UpdateMode::Numeric => 0.0,
            _ => self.device.unit_step(),
        };
        self.pos.iter().zip(&self.neg).any(|(p, n)| {
            (p.abs() > band || n.abs() > band) && (0.5 * (p + n)).abs() > min_shift
        })
    }

    fn auto_recenter<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        if self.needs_recenter() {
            self.recenter(rng)?;
        }
        Ok(())
    }

    /// Shifts each cell's pair by a common amount so it straddles the
    /// midpoint, keeping `g⁺ − g⁻`.
    ///
    /// Numeric cores shift exactly. Device-backed cores drive each conductance
    /// with verified single pulses (decreasing pulses when above the goal,
    /// increasing when below) until the pair difference is within half a unit
    /// step of the original, or the pulse budget runs out.
    pub fn recenter<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        if self.device.mode() == UpdateMode::Numeric {
            for (p, n) in self.pos.iter_mut().zip(self.neg.iter_mut()) {
                let shift = 0.5 * (*p + *n);
                *p -= shift;
                *n -= shift;
            }
            return Ok(());
        }
        let step = self.device.unit_step();
        let tol = 0.5 * step;
        for c in 0..self.pos.len() {
            let (p, n) = (self.pos[c], self.neg[c]);
            let shift = 0.5 * (p + n);
            if shift.abs() <= tol {
                continue;
            }
            let diff = p - n;
            let budget = (shift.abs() / step).ceil() as usize * 4 + VERIFY_PULSE_SLACK;
            self.drive(c, true, p - shift, tol, budget, rng)?;
            let goal_neg = (self.pos[c] - diff).clamp(-0.5, 0.5);
            self.drive(c, false, goal_neg, tol, budget, rng)?;
            if ((self.pos[c] - self.neg[c]) - diff).abs() > tol {
                let goal_pos = (self.neg[c] + diff).clamp(-0.5, 0.5);
                self.drive(c, true, goal_pos, tol, budget, rng)?;
            }
        }
        Ok(())
    }

    /// Closed-loop write of one device toward `goal` (offset units).
    fn drive<R: Rng + ?Sized>(
        &mut self,
        c: usize,
        positive: bool,
        goal: f64,
        tol: f64,
        budget: usize,
        rng: &mut R,
    ) -> Result<()> {
        let (slot, cell_id) = if positive {
            (&mut self.pos[c], 2 * c)
        } else {
            (&mut self.neg[c], 2 * c + 1)
        };
        for _ in 0..budget {
            let err = *slot - goal;
            if err.abs() <= tol {
                break;
            }
            let direction = if err > 0.0 {
                Direction::Decreasing
            } else {
                Direction::Increasing
            };
            let dg = self.device.pulse(cell_id, 0.5 + *slot, direction, rng)?;
            *slot = (*slot + dg).clamp(-0.5, 0.5);
        }
        Ok(())
    }
}
