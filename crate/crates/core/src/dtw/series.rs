use serde::Serialize;

use crate::error::{Error, Result};
use crate::timeline::TimelineMatrix;

/// A multichannel time series stored row-major (time × channel).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSeries {
    unit_id: String,
    channels: Vec<String>,
    len: usize,
    data: Vec<f64>,
    scaled: bool,
}

impl ChannelSeries {
    pub fn new(unit_id: impl Into<String>, channels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let unit_id = unit_id.into();
        let d = channels.len();
        if d == 0 {
            return Err(Error::invalid(format!("series '{unit_id}' has no channels")));
        }
        if rows.len() < 2 {
            return Err(Error::invalid(format!("series '{unit_id}' needs at least two time steps")));
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Shape(format!("series '{unit_id}' row {t} has {} values, expected {d}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("series '{unit_id}' row {t} is not finite")));
            }
            data.extend_from_slice(row);
        }
        Ok(ChannelSeries {
            unit_id,
            channels,
            len: rows.len(),
            data,
            scaled: false,
        })
    }

    /// One channel per timeline code, values 0/1.
    pub fn from_timeline(timeline: &TimelineMatrix) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..timeline.rows())
            .map(|r| timeline.row(r).iter().map(|&v| f64::from(v)).collect())
            .collect();
        ChannelSeries::new(timeline.unit_id(), timeline.codes().to_vec(), &rows)
    }

    pub(crate) fn from_parts(unit_id: String, channels: Vec<String>, len: usize, data: Vec<f64>, scaled: bool) -> Self {
        debug_assert_eq!(data.len(), len * channels.len());
        ChannelSeries {
            unit_id,
            channels,
            len,
            data,
            scaled,
        }
    }

    pub fn unit_id(&self) -> &str {
        &self.unit_id
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> usize {
        self.channels.len()
    }

    pub fn scaled(&self) -> bool {
        self.scaled
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let d = self.dims();
        &self.data[t * d..(t + 1) * d]
    }

    pub fn get(&self, t: usize, c: usize) -> f64 {
        self.data[t * self.dims() + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len).map(|t| self.row(t).to_vec()).collect()
    }
}

/// Channel-wise linear interpolation at `length` evenly spaced positions over
/// `[0, T-1]`. Both endpoints are reproduced exactly.
pub fn resample(series: &ChannelSeries, length: usize) -> Result<ChannelSeries> {
    if length < 2 {
        return Err(Error::invalid("target length must be at least 2"));
    }
    let t = series.len();
    let d = series.dims();
    if length == t {
        return Ok(series.clone());
    }
    let mut data = Vec::with_capacity(length * d);
    let step = (t - 1) as f64 / (length - 1) as f64;
    for k in 0..length {
        let pos = if k == length - 1 { (t - 1) as f64 } else { k as f64 * step };
        let lo = (pos.floor() as usize).min(t - 1);
        let frac = pos - lo as f64;
        if frac == 0.0 || lo == t - 1 {
            data.extend_from_slice(series.row(lo));
        } else {
            let (a, b) = (series.row(lo), series.row(lo + 1));
            data.extend(a.iter().zip(b).map(|(x, y)| x + frac * (y - x)));
        }
    }
    Ok(ChannelSeries::from_parts(
        series.unit_id.clone(),
        series.channels.clone(),
        length,
        data,
        series.scaled,
    ))
}

/// Per-channel mean and population SD pooled over every row of every series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalScaler {
    pub channels: Vec<String>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub zero_sd: Vec<bool>,
}

impl GlobalScaler {
    pub fn fit(series: &[ChannelSeries]) -> Result<Self> {
        let first = series.first().ok_or_else(|| Error::invalid("scaler needs at least one series"))?;
        let channels = first.channels.clone();
        if let Some(s) = series.iter().find(|s| s.channels != channels) {
            return Err(Error::Shape(format!("series '{}' has a different channel set", s.unit_id)));
        }
        let d = channels.len();
        let n: usize = series.iter().map(|s| s.len).sum();
        let mut mean = vec![0.0; d];
        for s in series {
            for t in 0..s.len {
                for (m, v) in mean.iter_mut().zip(s.row(t)) {
                    *m += v;
                }
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; d];
        for s in series {
            for t in 0..s.len {
                for ((acc, v), m) in var.iter_mut().zip(s.row(t)).zip(&mean) {
                    *acc += (v - m).powi(2);
                }
            }
        }
        let sd: Vec<f64> = var.iter().map(|v| (v / n as f64).sqrt()).collect();
        let zero_sd = sd.iter().map(|s| *s == 0.0).collect();
        Ok(GlobalScaler {
            channels,
            mean,
            sd,
            zero_sd,
        })
    }

    /// Names of channels whose pooled SD is zero; they are centred but not scaled.
    pub fn flagged_channels(&self) -> Vec<&str> {
        self.channels
            .iter()
            .zip(&self.zero_sd)
            .filter(|(_, z)| **z)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    fn check(&self, series: &ChannelSeries) -> Result<()> {
        if series.channels != self.channels {
            return Err(Error::Shape(format!("series '{}' does not match the scaler's channels", series.unit_id)));
        }
        Ok(())
    }

    pub fn apply(&self, series: &ChannelSeries) -> Result<ChannelSeries> {
        self.check(series)?;
        let d = self.channels.len();
        let data = series
            .data
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let c = i % d;
                let centred = v - self.mean[c];
                if self.zero_sd[c] {
                    centred
                } else {
                    centred / self.sd[c]
                }
            })
            .collect();
        Ok(ChannelSeries::from_parts(series.unit_id.clone(), self.channels.clone(), series.len, data, true))
    }

    pub fn invert(&self, series: &ChannelSeries) -> Result<ChannelSeries> {
        self.check(series)?;
        let d = self.channels.len();
        let data = series
            .data
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let c = i % d;
                let s = if self.zero_sd[c] { 1.0 } else { self.sd[c] };
                v * s + self.mean[c]
            })
            .collect();
        Ok(ChannelSeries::from_parts(series.unit_id.clone(), self.channels.clone(), series.len, data, false))
    }
}
