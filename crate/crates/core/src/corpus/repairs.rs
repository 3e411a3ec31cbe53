use super::Repair;

pub(super) const REPAIRS: &[Repair] = &[
    Repair {
        id: 5,
        note: "removed one surplus closing parenthesis at the end",
        original: r#"(rank((open - (sum(vwap, 10) / 10))) * (-1 * abs(rank((close - vwap))))))"#,
    },
    Repair {
        id: 21,
        note: "added a missing closing parenthesis at the end",
        original: r#"(((((sum(close, 8) / 8) + stddev(close, 8)) < (sum(close, 2) / 2)) ? (-1 * 1) : (((sum(close, 2) / 2) < ((sum(close, 8) / 8) - stddev(close, 8))) ? 1 : (((1 < (volume / adv20)) || ((volume / adv20) == 1)) ? 1 : (-1 * 1))))"#,
    },
    Repair {
        id: 24,
        note: "added a missing opening parenthesis at the start",
        original: r#"(((delta((sum(close, 100) / 100), 100) / delay(close, 100)) < 0.05) || ((delta((sum(close, 100) / 100), 100) / delay(close, 100)) == 0.05)) ? (-1 * (close - ts_min(close, 100))) : (-1 * delta(close, 3)))"#,
    },
    Repair {
        id: 31,
        note: "moved a closing parenthesis so the 10-day window belongs to decay_linear",
        original: r#"((rank(rank(rank(decay_linear((-1 * rank(rank(delta(close, 10))))), 10)))) + rank((-1 * delta(close, 3))) + sign(scale(correlation(adv20, low, 12))))"#,
    },
    Repair {
        id: 34,
        note: "added a missing closing parenthesis at the end",
        original: r#"rank(((1 - rank((stddev(returns, 2) / stddev(returns, 5)))) + (1 - rank(delta(close, 1))))"#,
    },
    Repair {
        id: 46,
        note: "added a missing closing parenthesis at the end",
        original: r#"((0.25 < (((delay(close, 20) - delay(close, 10)) / 10) - ((delay(close, 10) - close) / 10))) ? (-1 * 1) : (((((delay(close, 20) - delay(close, 10)) / 10) - ((delay(close, 10) - close) / 10)) < 0) ? 1 : ((-1 * 1) * (close - delay(close, 1))))"#,
    },
    Repair {
        id: 48,
        note: "closed the squared ratio before the 250-day window",
        original: r#"(indneutralize(((correlation(delta(close, 1), delta(delay(close, 1), 1), 250) * delta(close, 1)) / close), IndClass.subindustry) / sum(((delta(close, 1) / delay(close, 1))^2, 250))"#,
    },
    Repair {
        id: 56,
        note: "removed one surplus closing parenthesis at the end",
        original: r#"(0 - (1 * (rank((sum(returns, 10) / sum(sum(returns, 2), 3))) * rank((returns * cap))))))"#,
    },
    Repair {
        id: 60,
        note: "removed a surplus closing parenthesis before the scale term",
        original: r#"(0 - (1 * ((2 * scale(rank((((close - low) - (high - close)) / (high - low)) * volume)))) - scale(rank(ts_argmax(close, 10))))))"#,
    },
    Repair {
        id: 62,
        note: "removed a surplus closing parenthesis before the `* -1` factor",
        original: r#"((rank(correlation(vwap, sum(adv20, 22.4101), 9.91009)) < rank(((rank(open) + rank(open)) < (rank(((high + low) / 2)) + rank(high)))))) * -1)"#,
    },
    Repair {
        id: 64,
        note: "added an opening parenthesis so the weighted price sum is grouped inside delta",
        original: r#"((rank(correlation(sum(((open * 0.178404) + (low * (1 - 0.178404))), 12.7054), sum(adv120, 12.7054), 16.6208)) < rank(delta((((high + low) / 2) * 0.178404) + (vwap * (1 - 0.178404))), 3.69741))) * -1)"#,
    },
    Repair {
        id: 66,
        note: "added an opening parenthesis inside the first decay_linear",
        original: r#"((rank(decay_linear(delta(vwap, 3.51013), 7.23052)) + Ts_Rank(decay_linear((((low * 0.96633) + (low * (1 - 0.96633))) - vwap) / (open - ((high + low) / 2))), 11.4157), 6.72611)) * -1)"#,
    },
    Repair {
        id: 74,
        note: "removed a surplus closing parenthesis before rank(volume)",
        original: r#"((rank(correlation(close, sum(adv30, 37.4843), 15.1365)) < rank(correlation(rank(((high * 0.0261661) + (vwap * (1 - 0.0261661))))), rank(volume), 11.4791))) * -1)"#,
    },
    Repair {
        id: 77,
        note: "grouped the price difference inside the first decay_linear and closed its rank",
        original: r#"min(rank(decay_linear((((high + low) / 2) + high) - (vwap + high)), 20.0451), rank(decay_linear(correlation(((high + low) / 2), adv40, 3.1614), 5.64125)))"#,
    },
    Repair {
        id: 92,
        note: "added an opening parenthesis inside the first decay_linear",
        original: r#"min(Ts_Rank(decay_linear((((high + low) / 2) + close) < (low + open)), 14.7221), 18.8683), Ts_Rank(decay_linear(correlation(rank(low), rank(adv30), 7.58555), 6.94024), 6.80584))"#,
    },
    Repair {
        id: 100,
        note: "removed a surplus closing parenthesis inside the first indneutralize",
        original: r#"(0 - (1 * (((1.5 * scale(indneutralize(indneutralize(rank((((close - low) - (high - close)) / (high - low)) * volume)), IndClass.subindustry), IndClass.subindustry))) - scale(indneutralize((correlation(close, rank(adv20), 5) - rank(ts_argmin(close, 30))), IndClass.subindustry))) * (volume / adv20))))"#,
    },
];
