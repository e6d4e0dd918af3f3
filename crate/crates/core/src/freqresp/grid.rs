use crate::error::{MorError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    Hertz,
    RadPerSec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
    Explicit,
}

/// Strictly increasing positive frequencies, at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    unit: FrequencyUnit,
    spacing: Spacing,
}

pub const DEFAULT_START_HZ: f64 = 1e6;
pub const DEFAULT_STOP_HZ: f64 = 1e11;
pub const DEFAULT_POINTS: usize = 201;

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::log(DEFAULT_START_HZ, DEFAULT_STOP_HZ, DEFAULT_POINTS, FrequencyUnit::Hertz).expect("valid default")
    }
}

impl FrequencyGrid {
    pub fn log(start: f64, stop: f64, count: usize, unit: FrequencyUnit) -> Result<Self> {
        Self::check_range(start, stop, count)?;
        let (a, b) = (start.log10(), stop.log10());
        let points = (0..count)
            .map(|k| {
                if k == count - 1 {
                    stop
                } else {
                    10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)
                }
            })
            .collect();
        Self::new(points, unit, Spacing::Log)
    }

    pub fn linear(start: f64, stop: f64, count: usize, unit: FrequencyUnit) -> Result<Self> {
        Self::check_range(start, stop, count)?;
        let points = (0..count)
            .map(|k| {
                if k == count - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect();
        Self::new(points, unit, Spacing::Linear)
    }

    pub fn from_points(points: Vec<f64>, unit: FrequencyUnit) -> Result<Self> {
        Self::new(points, unit, Spacing::Explicit)
    }

    /// Parses `start:stop:count:log|lin` in hertz.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || MorError::InvalidArgument(format!("grid '{spec}' is not start:stop:count:log|lin"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let start = crate::model::parse_value(parts[0]).ok_or_else(bad)?;
        let stop = crate::model::parse_value(parts[1]).ok_or_else(bad)?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        match parts[3].to_ascii_lowercase().as_str() {
            "log" => Self::log(start, stop, count, FrequencyUnit::Hertz),
            "lin" | "linear" => Self::linear(start, stop, count, FrequencyUnit::Hertz),
            _ => Err(bad()),
        }
    }

    fn check_range(start: f64, stop: f64, count: usize) -> Result<()> {
        if count < 2 || !(start > 0.0) || !(stop > start) || !stop.is_finite() {
            return Err(MorError::InvalidArgument(format!(
                "grid needs 0 < start < stop and count >= 2 (got {start}, {stop}, {count})"
            )));
        }
        Ok(())
    }

    fn new(points: Vec<f64>, unit: FrequencyUnit, spacing: Spacing) -> Result<Self> {
        if points.len() < 2 {
            return Err(MorError::InvalidArgument("grid needs at least two points".into()));
        }
        if !(points[0] > 0.0) || !points.iter().all(|p| p.is_finite()) {
            return Err(MorError::InvalidArgument("grid points must be positive and finite".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(MorError::InvalidArgument("grid points must be strictly increasing".into()));
        }
        Ok(FrequencyGrid { points, unit, spacing })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn unit(&self) -> FrequencyUnit {
        self.unit
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Angular frequencies in rad/s.
    pub fn omegas(&self) -> Vec<f64> {
        match self.unit {
            FrequencyUnit::RadPerSec => self.points.clone(),
            FrequencyUnit::Hertz => self.points.iter().map(|f| 2.0 * std::f64::consts::PI * f).collect(),
        }
    }

    pub fn hertz(&self) -> Vec<f64> {
        match self.unit {
            FrequencyUnit::Hertz => self.points.clone(),
            FrequencyUnit::RadPerSec => self.points.iter().map(|w| w / (2.0 * std::f64::consts::PI)).collect(),
        }
    }
}
