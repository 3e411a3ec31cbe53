use std::sync::Arc;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{
    DataError, IndustryLevel, IndustryMap, MarketData, MarketPanels, Panel, TradingCalendar,
    Universe,
};

/// Seeded synthetic market: per-asset geometric random walks with a common
/// market factor, bracketing highs/lows, log-normal volume and market cap.
///
/// Output is a pure function of the arguments. Industry levels are assigned
/// round-robin (`asset i → group i mod groups_per_level`) at every level.
pub fn generate_synthetic(
    seed: u64,
    days: usize,
    assets: usize,
    groups_per_level: usize,
) -> Result<MarketData, DataError> {
    if days < 1 || assets < 2 || groups_per_level < 1 {
        return Err(DataError::InvalidParameters(format!(
            "need days >= 1, assets >= 2, groups >= 1 (got {days}, {assets}, {groups_per_level})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

    let calendar = Arc::new(TradingCalendar::new(business_days(days))?);
    let universe = Arc::new(Universe::new(
        (0..assets).map(|i| format!("S{i:04}")).collect(),
    )?);

    struct AssetParams {
        vol: f64,
        beta: f64,
        drift: f64,
        log_mean_volume: f64,
        shares_outstanding: f64,
    }
    let params: Vec<AssetParams> = (0..assets)
        .map(|_| AssetParams {
            vol: rng.gen_range(0.01..0.03),
            beta: rng.gen_range(0.5..1.5),
            drift: rng.gen_range(-2e-4..4e-4),
            log_mean_volume: rng.gen_range(11.0..15.0),
            shares_outstanding: 10f64.powf(rng.gen_range(7.0..9.5)),
        })
        .collect();
    let mut prev_close: Vec<f64> = (0..assets).map(|_| rng.gen_range(10.0..200.0)).collect();

    let cells = days * assets;
    let mut open = Vec::with_capacity(cells);
    let mut high = Vec::with_capacity(cells);
    let mut low = Vec::with_capacity(cells);
    let mut close = Vec::with_capacity(cells);
    let mut volume = Vec::with_capacity(cells);
    let mut vwap = Vec::with_capacity(cells);
    let mut cap = Vec::with_capacity(cells);

    for _ in 0..days {
        let market_move = 0.01 * std_normal.sample(&mut rng);
        for (i, p) in params.iter().enumerate() {
            let gap = 0.3 * p.vol * std_normal.sample(&mut rng);
            let intraday = p.drift + p.beta * market_move + p.vol * std_normal.sample(&mut rng);
            let o = prev_close[i] * gap.exp();
            let c = o * intraday.exp();
            let h = o.max(c) * (0.5 * p.vol * std_normal.sample(&mut rng)).abs().exp();
            let l = o.min(c) * (-(0.5 * p.vol * std_normal.sample(&mut rng)).abs()).exp();
            let w = (l + rng.gen_range(0.25..0.75) * (h - l)).clamp(l, h);
            let shock = (intraday - p.drift).abs() / p.vol;
            let log_vol = p.log_mean_volume + 0.15 * shock + 0.4 * std_normal.sample(&mut rng);
            open.push(o);
            high.push(h);
            low.push(l);
            close.push(c);
            vwap.push(w);
            volume.push(log_vol.exp().round().max(1.0));
            cap.push(c * p.shares_outstanding);
            prev_close[i] = c;
        }
    }

    let panel = |values: Vec<f64>| Panel::new(Arc::clone(&calendar), Arc::clone(&universe), values);
    let mut industry = IndustryMap::new();
    for level in IndustryLevel::ALL {
        let prefix = match level {
            IndustryLevel::Sector => "SEC",
            IndustryLevel::Industry => "IND",
            IndustryLevel::Subindustry => "SUB",
        };
        let labels = (0..assets)
            .map(|i| format!("{prefix}{:02}", i % groups_per_level))
            .collect();
        industry = industry.with_level(level, labels);
    }
    MarketData::new(
        MarketPanels {
            open: panel(open)?,
            high: panel(high)?,
            low: panel(low)?,
            close: panel(close)?,
            volume: panel(volume)?,
            vwap: panel(vwap)?,
            cap: Some(panel(cap)?),
            returns: None,
        },
        industry,
    )
}

/// Weekdays starting 2010-01-04.
fn business_days(count: usize) -> Vec<NaiveDate> {
    let mut day = NaiveDate::from_ymd_opt(2010, 1, 4).expect("valid start date");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day);
        }
        day = day.succ_opt().expect("date in range");
    }
    out
}
