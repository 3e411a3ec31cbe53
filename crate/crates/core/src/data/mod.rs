//! Panel data model: calendars, universes, dates × assets matrices and the
//! market data bundle every alpha is evaluated against.

mod csv_loader;
mod derive;
mod synthetic;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use thiserror::Error;

use crate::ops::GroupVector;

pub use csv_loader::{load_market_csv, IngestOptions};
pub use derive::{derive_adv, derive_returns};
pub use synthetic::generate_synthetic;

/// Errors raised while building or ingesting market data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("calendar must contain at least one date")]
    EmptyCalendar,
    #[error("calendar dates must be strictly increasing ({prev} followed by {next})")]
    UnsortedCalendar { prev: NaiveDate, next: NaiveDate },
    #[error("universe must contain at least one asset")]
    EmptyUniverse,
    #[error("duplicate asset identifier `{0}` in universe")]
    DuplicateAsset(String),
    #[error("panel shape mismatch: expected {expected_rows}x{expected_cols} values ({expected} total), got {actual}")]
    Shape {
        expected_rows: usize,
        expected_cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("panel `{0}` does not share the market calendar and universe")]
    MisalignedPanel(&'static str),
    #[error("industry level {level} has {actual} entries for a universe of {expected} assets")]
    IndustryCoverage {
        level: IndustryLevel,
        expected: usize,
        actual: usize,
    },
    #[error("market invariant violated: {field} at ({date}, {asset}): {reason}")]
    Invariant {
        field: &'static str,
        date: NaiveDate,
        asset: String,
        reason: &'static str,
    },
    #[error("line {line}: column `{column}`: {reason}")]
    Ingest {
        line: u64,
        column: String,
        reason: String,
    },
    #[error("line {line}: duplicate row for ({date}, {ticker})")]
    DuplicateRow {
        line: u64,
        date: NaiveDate,
        ticker: String,
    },
    #[error("input file contains no data rows")]
    EmptyFile,
    #[error("missing required column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("invalid synthetic-market parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Strictly increasing sequence of trading days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    dates: Vec<NaiveDate>,
}

impl TradingCalendar {
    pub fn new(dates: Vec<NaiveDate>) -> Result<Self, DataError> {
        if dates.is_empty() {
            return Err(DataError::EmptyCalendar);
        }
        for pair in dates.windows(2) {
            if pair[1] <= pair[0] {
                return Err(DataError::UnsortedCalendar {
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        Ok(Self { dates })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    fn head(&self, days: usize) -> Self {
        Self {
            dates: self.dates[..days].to_vec(),
        }
    }
}

/// Ordered set of asset identifiers; the order is the column order of every panel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    assets: Vec<String>,
}

impl Universe {
    pub fn new(assets: Vec<String>) -> Result<Self, DataError> {
        if assets.is_empty() {
            return Err(DataError::EmptyUniverse);
        }
        let mut seen = HashSet::with_capacity(assets.len());
        for asset in &assets {
            if !seen.insert(asset.as_str()) {
                return Err(DataError::DuplicateAsset(asset.clone()));
            }
        }
        Ok(Self { assets })
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }
}

/// A dates × assets matrix of `f64` with NaN as the missing-value marker.
///
/// Values are stored row-major (one row per date). Infinite values are never
/// stored: every constructor maps `±∞` to NaN.
#[derive(Debug, Clone)]
pub struct Panel {
    calendar: Arc<TradingCalendar>,
    universe: Arc<Universe>,
    values: Vec<f64>,
}

impl Panel {
    pub fn new(
        calendar: Arc<TradingCalendar>,
        universe: Arc<Universe>,
        mut values: Vec<f64>,
    ) -> Result<Self, DataError> {
        let expected = calendar.len() * universe.len();
        if values.len() != expected {
            return Err(DataError::Shape {
                expected_rows: calendar.len(),
                expected_cols: universe.len(),
                expected,
                actual: values.len(),
            });
        }
        sanitize(&mut values);
        Ok(Self {
            calendar,
            universe,
            values,
        })
    }

    /// Panel on placeholder axes: consecutive days from 2000-01-01 and
    /// assets named `A0..A{cols-1}`.
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, DataError> {
        let (calendar, universe) = placeholder_axes(rows, cols)?;
        Self::new(calendar, universe, values)
    }

    /// Panel with every cell set to `value`.
    pub fn filled(calendar: Arc<TradingCalendar>, universe: Arc<Universe>, value: f64) -> Self {
        let value = if value.is_finite() { value } else { f64::NAN };
        let len = calendar.len() * universe.len();
        Self {
            calendar,
            universe,
            values: vec![value; len],
        }
    }

    /// New panel on the same axes. Infinite values become NaN.
    pub fn with_values(&self, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len(), "panel shape mismatch");
        sanitize(&mut values);
        Self {
            calendar: Arc::clone(&self.calendar),
            universe: Arc::clone(&self.universe),
            values,
        }
    }

    /// Build a panel on the same axes by evaluating `f(t, i)` for every cell.
    pub fn map_indexed(&self, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let cols = self.cols();
        let values = (0..self.values.len())
            .map(|k| f(k / cols, k % cols))
            .collect();
        self.with_values(values)
    }

    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        &self.calendar
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn rows(&self) -> usize {
        self.calendar.len()
    }

    pub fn cols(&self) -> usize {
        self.universe.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, t: usize, i: usize) -> f64 {
        self.values[t * self.cols() + i]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let cols = self.cols();
        &self.values[t * cols..(t + 1) * cols]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values.iter().skip(i).step_by(self.cols()).copied().collect()
    }

    /// True when both panels share the same calendar and universe.
    pub fn same_axes(&self, other: &Panel) -> bool {
        (Arc::ptr_eq(&self.calendar, &other.calendar) || self.calendar == other.calendar)
            && (Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe)
    }

    /// Bit-for-bit equality of values (NaN payloads included) and axes.
    pub fn bitwise_eq(&self, other: &Panel) -> bool {
        self.same_axes(other)
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// First `days` rows of the panel.
    pub fn head(&self, days: usize) -> Self {
        let days = days.min(self.rows());
        Self {
            calendar: Arc::new(self.calendar.head(days)),
            universe: Arc::clone(&self.universe),
            values: self.values[..days * self.cols()].to_vec(),
        }
    }

    fn head_on(&self, calendar: &Arc<TradingCalendar>) -> Self {
        Self {
            calendar: Arc::clone(calendar),
            universe: Arc::clone(&self.universe),
            values: self.values[..calendar.len() * self.cols()].to_vec(),
        }
    }

    pub fn nan_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }
}

pub(crate) fn placeholder_axes(
    rows: usize,
    cols: usize,
) -> Result<(Arc<TradingCalendar>, Arc<Universe>), DataError> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    let dates = (0..rows)
        .map(|d| start + chrono::Duration::days(d as i64))
        .collect();
    let assets = (0..cols).map(|i| format!("A{i}")).collect();
    Ok((
        Arc::new(TradingCalendar::new(dates)?),
        Arc::new(Universe::new(assets)?),
    ))
}

fn sanitize(values: &mut [f64]) {
    for v in values.iter_mut() {
        if v.is_infinite() {
            *v = f64::NAN;
        }
    }
}

/// Industry classification level usable as `IndClass.<level>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndustryLevel {
    Sector,
    Industry,
    Subindustry,
}

impl IndustryLevel {
    pub const ALL: [IndustryLevel; 3] = [Self::Sector, Self::Industry, Self::Subindustry];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sector => "sector",
            Self::Industry => "industry",
            Self::Subindustry => "subindustry",
        }
    }
}

impl fmt::Display for IndustryLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndustryLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sector" => Ok(Self::Sector),
            "industry" => Ok(Self::Industry),
            "subindustry" => Ok(Self::Subindustry),
            other => Err(format!("unknown industry level `{other}`")),
        }
    }
}

/// Asset → group assignments for each provided classification level.
///
/// Levels are independent; nothing requires subindustries to nest inside
/// industries or sectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndustryMap {
    levels: BTreeMap<IndustryLevel, Vec<String>>,
}

impl IndustryMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a level; `groups[i]` is the group of universe asset `i`.
    pub fn with_level(mut self, level: IndustryLevel, groups: Vec<String>) -> Self {
        self.levels.insert(level, groups);
        self
    }

    pub fn has_level(&self, level: IndustryLevel) -> bool {
        self.levels.contains_key(&level)
    }

    pub fn levels(&self) -> impl Iterator<Item = IndustryLevel> + '_ {
        self.levels.keys().copied()
    }

    pub fn groups(&self, level: IndustryLevel) -> Option<&[String]> {
        self.levels.get(&level).map(Vec::as_slice)
    }

    /// Dense group indices for a level, in universe column order.
    pub fn group_vector(&self, level: IndustryLevel) -> Option<GroupVector> {
        self.levels
            .get(&level)
            .map(|groups| GroupVector::from_labels(groups))
    }

    fn check_coverage(&self, universe: &Universe) -> Result<(), DataError> {
        for (&level, groups) in &self.levels {
            if groups.len() != universe.len() {
                return Err(DataError::IndustryCoverage {
                    level,
                    expected: universe.len(),
                    actual: groups.len(),
                });
            }
        }
        Ok(())
    }
}

/// Daily OHLCV bars plus derived series for a fixed calendar and universe.
#[derive(Debug, Clone)]
pub struct MarketData {
    open: Panel,
    high: Panel,
    low: Panel,
    close: Panel,
    volume: Panel,
    vwap: Panel,
    cap: Option<Panel>,
    returns: Panel,
    industry: IndustryMap,
}

/// Raw panels used to assemble a [`MarketData`].
#[derive(Debug, Clone)]
pub struct MarketPanels {
    pub open: Panel,
    pub high: Panel,
    pub low: Panel,
    pub close: Panel,
    pub volume: Panel,
    pub vwap: Panel,
    pub cap: Option<Panel>,
    /// Derived from `close` when `None`.
    pub returns: Option<Panel>,
}

impl MarketData {
    /// Assemble market data, checking alignment and the bar invariants
    /// (`low ≤ open, close, vwap ≤ high`, `volume ≥ 0`, `cap > 0`) wherever
    /// the cells involved are present.
    pub fn new(panels: MarketPanels, industry: IndustryMap) -> Result<Self, DataError> {
        let MarketPanels {
            open,
            high,
            low,
            close,
            volume,
            vwap,
            cap,
            returns,
        } = panels;
        let named: [(&'static str, &Panel); 5] = [
            ("high", &high),
            ("low", &low),
            ("close", &close),
            ("volume", &volume),
            ("vwap", &vwap),
        ];
        for (name, panel) in named {
            if !panel.same_axes(&open) {
                return Err(DataError::MisalignedPanel(name));
            }
        }
        if let Some(cap) = &cap {
            if !cap.same_axes(&open) {
                return Err(DataError::MisalignedPanel("cap"));
            }
        }
        let returns = match returns {
            Some(r) if !r.same_axes(&open) => return Err(DataError::MisalignedPanel("returns")),
            Some(r) => r,
            None => derive_returns(&close),
        };
        industry.check_coverage(open.universe())?;
        let market = Self {
            open,
            high,
            low,
            close,
            volume,
            vwap,
            cap,
            returns,
            industry,
        };
        market.check_invariants()?;
        Ok(market)
    }

    fn check_invariants(&self) -> Result<(), DataError> {
        let cols = self.open.cols();
        let fail = |k: usize, field: &'static str, reason: &'static str| DataError::Invariant {
            field,
            date: self.calendar().dates()[k / cols],
            asset: self.universe().assets()[k % cols].clone(),
            reason,
        };
        let (o, h, l, c) = (
            self.open.values(),
            self.high.values(),
            self.low.values(),
            self.close.values(),
        );
        for k in 0..o.len() {
            let (hi, lo) = (h[k], l[k]);
            if hi < lo {
                return Err(fail(k, "high", "high below low"));
            }
            for (field, v) in [("open", o[k]), ("close", c[k]), ("vwap", self.vwap.values()[k])] {
                if v < lo || v > hi {
                    return Err(fail(k, field, "outside [low, high]"));
                }
            }
            if self.volume.values()[k] < 0.0 {
                return Err(fail(k, "volume", "negative volume"));
            }
            if let Some(cap) = &self.cap {
                if cap.values()[k] <= 0.0 {
                    return Err(fail(k, "cap", "non-positive market cap"));
                }
            }
        }
        Ok(())
    }

    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        self.open.calendar()
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.open.universe()
    }

    pub fn days(&self) -> usize {
        self.open.rows()
    }

    pub fn open(&self) -> &Panel {
        &self.open
    }

    pub fn high(&self) -> &Panel {
        &self.high
    }

    pub fn low(&self) -> &Panel {
        &self.low
    }

    pub fn close(&self) -> &Panel {
        &self.close
    }

    pub fn volume(&self) -> &Panel {
        &self.volume
    }

    pub fn vwap(&self) -> &Panel {
        &self.vwap
    }

    pub fn cap(&self) -> Option<&Panel> {
        self.cap.as_ref()
    }

    pub fn returns(&self) -> &Panel {
        &self.returns
    }

    pub fn industry(&self) -> &IndustryMap {
        &self.industry
    }

    /// Copy without market cap.
    pub fn without_cap(&self) -> Self {
        Self {
            cap: None,
            ..self.clone()
        }
    }

    /// Copy without industry classification.
    pub fn without_industry(&self) -> Self {
        Self {
            industry: IndustryMap::new(),
            ..self.clone()
        }
    }

    /// The first `days` trading days. Derived series are sliced, not
    /// recomputed, so the result matches what a feed ending that day holds.
    pub fn truncate(&self, days: usize) -> Self {
        let days = days.clamp(1, self.days());
        let calendar = Arc::new(self.calendar().head(days));
        Self {
            open: self.open.head_on(&calendar),
            high: self.high.head_on(&calendar),
            low: self.low.head_on(&calendar),
            close: self.close.head_on(&calendar),
            volume: self.volume.head_on(&calendar),
            vwap: self.vwap.head_on(&calendar),
            cap: self.cap.as_ref().map(|p| p.head_on(&calendar)),
            returns: self.returns.head_on(&calendar),
            industry: self.industry.clone(),
        }
    }
}
