//! Small hand-built portfolios with statistics worked out by hand (exact
//! fractions, rounded once at the end).

use alphaforge_core::backtest::WeightMatrix;
use alphaforge_core::{MarketData, Panel};

use super::market_from_close;

pub const BOOK: f64 = 1e6;

pub struct HandStats {
    pub pnl: [f64; 4],
    pub sharpe: f64,
    pub turnover: f64,
    pub cents_per_share: f64,
    pub daily_vol: f64,
    pub ann_return: f64,
}

/// Five days, three assets, weights set by hand on every day.
pub fn five_day_three_asset() -> (MarketData, WeightMatrix, HandStats) {
    #[rustfmt::skip]
    let close = vec![
        100.0, 50.0, 20.0,
        101.0, 49.0, 20.5,
         99.0, 50.0, 20.0,
        102.0, 51.0, 19.5,
        103.0, 50.0, 20.0,
    ];
    #[rustfmt::skip]
    let weights = vec![
         0.5,  -0.5,   0.0,
         0.5,  -0.25, -0.25,
        -0.5,   0.25,  0.25,
         0.25,  0.25, -0.5,
         0.25,  0.25, -0.5,
    ];
    let market = market_from_close(5, 3, close);
    let w = market.close().with_values(weights);
    let hand = HandStats {
        pnl: [
            15000.0,
            -8905.469939726676,
            -16401.515151515152,
            -15271.493212669684,
        ],
        sharpe: -6.933937633417693,
        turnover: 1.0,
        cents_per_share: -23.637234381958876,
        daily_vol: 0.014639796913111588,
        ann_return: -1.611444133146425,
    };
    (market, WeightMatrix::new(w).unwrap(), hand)
}

/// Three days alternating between two fixed portfolios, starting from flat.
/// Returns the market, weights and the hand-summed `Σ|Δw|` per day.
pub fn alternating_three_day() -> (MarketData, WeightMatrix, [f64; 3]) {
    let market = market_from_close(3, 3, vec![10.0, 20.0, 40.0, 11.0, 19.0, 40.0, 12.0, 20.0, 38.0]);
    #[rustfmt::skip]
    let w = vec![
         0.5,  -0.5,  0.0,
        -0.25, -0.25, 0.5,
         0.5,  -0.5,  0.0,
    ];
    // day 0 from flat: .5+.5+0; days 1, 2: .75+.25+.5
    let hand = [1.0, 1.5, 1.5];
    let weights = WeightMatrix::new(market.close().with_values(w)).unwrap();
    (market, weights, hand)
}

pub fn panel_like(template: &Panel, values: Vec<f64>) -> Panel {
    template.with_values(values)
}
