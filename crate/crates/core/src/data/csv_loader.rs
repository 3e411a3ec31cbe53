use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use chrono::NaiveDate;

use super::{
    DataError, IndustryLevel, IndustryMap, MarketData, MarketPanels, Panel, TradingCalendar,
    Universe,
};

/// Options for [`load_market_csv`].
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// When the `vwap` column is absent, substitute `(open+high+low+close)/4`
    /// instead of failing.
    pub vwap_fallback: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            vwap_fallback: true,
        }
    }
}

const REQUIRED: [&str; 7] = ["date", "ticker", "open", "high", "low", "close", "volume"];
const NUMERIC: [&str; 8] = [
    "open", "high", "low", "close", "volume", "vwap", "cap", "returns",
];

#[derive(Clone, Copy)]
enum Field {
    Open,
    High,
    Low,
    Close,
    Volume,
    Vwap,
    Cap,
    Returns,
}

const FIELDS: [Field; 8] = [
    Field::Open,
    Field::High,
    Field::Low,
    Field::Close,
    Field::Volume,
    Field::Vwap,
    Field::Cap,
    Field::Returns,
];

struct Row {
    line: u64,
    values: [f64; 8],
}

/// Load daily bars from a CSV file with header
/// `date,ticker,open,high,low,close,volume[,vwap][,cap][,returns][,sector][,industry][,subindustry]`.
///
/// Prices are assumed split- and dividend-adjusted. Empty fields are missing
/// values. The resulting calendar is the sorted union of dates, the universe
/// the sorted union of tickers; absent (date, ticker) pairs are NaN.
pub fn load_market_csv(path: impl AsRef<Path>, options: &IngestOptions) -> Result<MarketData, DataError> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let position = |name: &str| headers.iter().position(|h| h == name);
    for name in REQUIRED {
        if position(name).is_none() {
            return Err(DataError::MissingColumn(name));
        }
    }
    let date_col = position("date").unwrap();
    let ticker_col = position("ticker").unwrap();
    let numeric_cols: Vec<Option<usize>> = NUMERIC.iter().map(|n| position(n)).collect();
    let level_cols: Vec<(IndustryLevel, usize)> = IndustryLevel::ALL
        .iter()
        .filter_map(|&level| position(level.as_str()).map(|c| (level, c)))
        .collect();

    let mut rows: HashMap<(NaiveDate, String), Row> = HashMap::new();
    let mut dates = BTreeSet::new();
    let mut tickers = BTreeSet::new();
    let mut groups: BTreeMap<IndustryLevel, HashMap<String, String>> = BTreeMap::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: usize| record.get(c).unwrap_or("");
        let date = NaiveDate::parse_from_str(field(date_col), "%Y-%m-%d").map_err(|e| {
            DataError::Ingest {
                line,
                column: "date".into(),
                reason: format!("invalid date `{}`: {e}", field(date_col)),
            }
        })?;
        let ticker = field(ticker_col).to_string();
        if ticker.is_empty() {
            return Err(DataError::Ingest {
                line,
                column: "ticker".into(),
                reason: "empty ticker".into(),
            });
        }
        let mut values = [f64::NAN; 8];
        for (slot, (name, col)) in NUMERIC.iter().zip(&numeric_cols).enumerate() {
            let Some(col) = *col else { continue };
            let text = field(col);
            if text.is_empty() {
                continue;
            }
            let v: f64 = text.parse().map_err(|_| DataError::Ingest {
                line,
                column: (*name).into(),
                reason: format!("invalid number `{text}`"),
            })?;
            if !v.is_finite() {
                return Err(DataError::Ingest {
                    line,
                    column: (*name).into(),
                    reason: format!("non-finite value `{text}`"),
                });
            }
            values[slot] = v;
        }
        check_row(line, &values)?;
        for &(level, col) in &level_cols {
            let group = field(col);
            if group.is_empty() {
                continue;
            }
            let entry = groups.entry(level).or_default();
            match entry.get(&ticker) {
                Some(existing) if existing != group => {
                    return Err(DataError::Ingest {
                        line,
                        column: level.as_str().into(),
                        reason: format!(
                            "ticker {ticker} reassigned from `{existing}` to `{group}`"
                        ),
                    })
                }
                Some(_) => {}
                None => {
                    entry.insert(ticker.clone(), group.to_string());
                }
            }
        }
        dates.insert(date);
        tickers.insert(ticker.clone());
        if rows.contains_key(&(date, ticker.clone())) {
            return Err(DataError::DuplicateRow { line, date, ticker });
        }
        rows.insert((date, ticker), Row { line, values });
    }
    if rows.is_empty() {
        return Err(DataError::EmptyFile);
    }

    let calendar = Arc::new(TradingCalendar::new(dates.into_iter().collect())?);
    let universe = Arc::new(Universe::new(tickers.into_iter().collect())?);
    let (t_len, n_len) = (calendar.len(), universe.len());
    let mut columns = vec![vec![f64::NAN; t_len * n_len]; FIELDS.len()];
    for (t, date) in calendar.dates().iter().enumerate() {
        for (i, ticker) in universe.assets().iter().enumerate() {
            if let Some(row) = rows.get(&(*date, ticker.clone())) {
                for (slot, column) in columns.iter_mut().enumerate() {
                    column[t * n_len + i] = row.values[slot];
                }
            }
        }
    }
    let panel = |slot: Field| -> Result<Panel, DataError> {
        Panel::new(
            Arc::clone(&calendar),
            Arc::clone(&universe),
            columns[slot as usize].clone(),
        )
    };
    let has = |f: Field| numeric_cols[f as usize].is_some();

    let open = panel(Field::Open)?;
    let high = panel(Field::High)?;
    let low = panel(Field::Low)?;
    let close = panel(Field::Close)?;
    let vwap = if has(Field::Vwap) {
        panel(Field::Vwap)?
    } else if options.vwap_fallback {
        log::warn!("vwap column absent; using (open+high+low+close)/4");
        let values = (0..t_len * n_len)
            .map(|k| (open.values()[k] + high.values()[k] + low.values()[k] + close.values()[k]) / 4.0)
            .collect();
        open.with_values(values)
    } else {
        return Err(DataError::MissingColumn("vwap"));
    };

    let mut industry = IndustryMap::new();
    for (level, assigned) in groups {
        let mut labels = Vec::with_capacity(n_len);
        for ticker in universe.assets() {
            match assigned.get(ticker) {
                Some(g) => labels.push(g.clone()),
                None => {
                    let line = rows
                        .iter()
                        .filter(|((_, t), _)| t == ticker)
                        .map(|(_, r)| r.line)
                        .min()
                        .unwrap_or(0);
                    return Err(DataError::Ingest {
                        line,
                        column: level.as_str().into(),
                        reason: format!("ticker {ticker} has no {level} assignment"),
                    });
                }
            }
        }
        industry = industry.with_level(level, labels);
    }

    MarketData::new(
        MarketPanels {
            open,
            high,
            low,
            close,
            volume: panel(Field::Volume)?,
            vwap,
            cap: if has(Field::Cap) { Some(panel(Field::Cap)?) } else { None },
            returns: if has(Field::Returns) { Some(panel(Field::Returns)?) } else { None },
        },
        industry,
    )
}

fn check_row(line: u64, v: &[f64; 8]) -> Result<(), DataError> {
    let err = |column: &str, reason: &str| DataError::Ingest {
        line,
        column: column.into(),
        reason: reason.into(),
    };
    let (open, high, low, close, volume, vwap, cap) = (
        v[Field::Open as usize],
        v[Field::High as usize],
        v[Field::Low as usize],
        v[Field::Close as usize],
        v[Field::Volume as usize],
        v[Field::Vwap as usize],
        v[Field::Cap as usize],
    );
    if volume < 0.0 {
        return Err(err("volume", "volume must be non-negative"));
    }
    if cap <= 0.0 {
        return Err(err("cap", "market cap must be positive"));
    }
    if high < low {
        return Err(err("high", "high is below low"));
    }
    for (name, value) in [("open", open), ("close", close), ("vwap", vwap)] {
        if value < low || value > high {
            return Err(err(name, "price outside the [low, high] range"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    const FULL: &str = "date,ticker,open,high,low,close,volume,vwap,cap,sector\n\
        2020-01-02,A,10,11,9,10.5,1000,10.2,1e6,tech\n\
        2020-01-02,B,20,21,19,20.5,2000,20.1,2e6,energy\n\
        2020-01-03,A,10.5,12,10,11,1100,11.1,1.1e6,tech\n\
        2020-01-03,B,20.5,21,20,20.8,2100,20.6,2.1e6,energy\n";

    #[test]
    fn complete_file_has_no_missing_values() {
        let f = write_csv(FULL);
        let m = load_market_csv(f.path(), &IngestOptions::default()).unwrap();
        assert_eq!(m.days(), 2);
        assert_eq!(m.universe().len(), 2);
        for p in [m.open(), m.high(), m.low(), m.close(), m.volume(), m.vwap()] {
            assert_eq!(p.nan_count(), 0);
        }
        assert_eq!(m.cap().unwrap().nan_count(), 0);
        assert!((m.returns().get(1, 0) - (11.0 / 10.5 - 1.0)).abs() < 1e-15);
        assert_eq!(
            m.industry().groups(IndustryLevel::Sector).unwrap(),
            &["tech".to_string(), "energy".to_string()]
        );
    }

    #[test]
    fn missing_ticker_day_is_nan() {
        let body: String = FULL.lines().take(4).map(|l| format!("{l}\n")).collect();
        let f = write_csv(&body);
        let m = load_market_csv(f.path(), &IngestOptions::default()).unwrap();
        for p in [m.open(), m.high(), m.low(), m.close(), m.volume(), m.vwap()] {
            assert!(p.get(1, 1).is_nan());
        }
    }

    #[test]
    fn negative_volume_names_line_and_column() {
        let f = write_csv(
            "date,ticker,open,high,low,close,volume\n\
             2020-01-02,A,10,11,9,10,100\n\
             2020-01-03,A,10,11,9,10,-5\n",
        );
        let err = load_market_csv(f.path(), &IngestOptions::default()).unwrap_err();
        match err {
            DataError::Ingest { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "volume");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn bad_date_is_reported() {
        let f = write_csv("date,ticker,open,high,low,close,volume\n2020-13-02,A,1,1,1,1,1\n");
        let err = load_market_csv(f.path(), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, DataError::Ingest { line: 2, ref column, .. } if column == "date"));
    }

    #[test]
    fn duplicate_rows_rejected() {
        let f = write_csv(
            "date,ticker,open,high,low,close,volume\n\
             2020-01-02,A,1,1,1,1,1\n\
             2020-01-02,A,1,1,1,1,1\n",
        );
        assert!(matches!(
            load_market_csv(f.path(), &IngestOptions::default()),
            Err(DataError::DuplicateRow { line: 3, .. })
        ));
    }

    #[test]
    fn empty_file_rejected() {
        let f = write_csv("date,ticker,open,high,low,close,volume\n");
        assert!(matches!(
            load_market_csv(f.path(), &IngestOptions::default()),
            Err(DataError::EmptyFile)
        ));
    }

    #[test]
    fn vwap_fallback_is_typical_price() {
        let f = write_csv("date,ticker,open,high,low,close,volume\n2020-01-02,A,10,12,8,11,5\n");
        let m = load_market_csv(f.path(), &IngestOptions::default()).unwrap();
        assert_eq!(m.vwap().get(0, 0), 10.25);
        let strict = IngestOptions {
            vwap_fallback: false,
        };
        assert!(matches!(
            load_market_csv(f.path(), &strict),
            Err(DataError::MissingColumn("vwap"))
        ));
    }
}
