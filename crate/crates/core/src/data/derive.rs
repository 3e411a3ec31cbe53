use super::{MarketData, Panel};
use crate::ops;

/// Close-to-close daily returns. Row 0 is NaN; a zero or missing prior close
/// yields NaN.
pub fn derive_returns(close: &Panel) -> Panel {
    let cols = close.cols();
    let v = close.values();
    let out = (0..v.len())
        .map(|k| {
            if k < cols {
                f64::NAN
            } else {
                v[k] / v[k - cols] - 1.0
            }
        })
        .collect();
    close.with_values(out)
}

/// `adv{d}`: trailing `d`-day mean of dollar volume (`volume × vwap`),
/// inclusive of today. Any missing day inside the window yields NaN.
///
/// # Panics
/// If `d == 0`.
pub fn derive_adv(market: &MarketData, d: usize) -> Panel {
    assert!(d >= 1, "adv window must be at least one day");
    let dollar_volume = market.volume().with_values(
        market
            .volume()
            .values()
            .iter()
            .zip(market.vwap().values())
            .map(|(v, p)| v * p)
            .collect(),
    );
    ops::ts_mean(&dollar_volume, d)
}
