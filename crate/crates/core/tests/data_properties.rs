use alphaforge_core::data::{derive_adv, derive_returns, generate_synthetic, IndustryLevel};

#[test]
fn synthetic_markets_hold_bar_invariants_for_many_seeds() {
    for seed in 0..100u64 {
        let m = generate_synthetic(seed, 60, 15, 4).unwrap();
        let cap = m.cap().expect("synthetic data carries cap");
        for k in 0..m.close().values().len() {
            let (o, h, l, c) = (
                m.open().values()[k],
                m.high().values()[k],
                m.low().values()[k],
                m.close().values()[k],
            );
            let (vw, vol) = (m.vwap().values()[k], m.volume().values()[k]);
            assert!(l > 0.0, "seed {seed}: non-positive low");
            assert!(h >= o.max(c) && l <= o.min(c), "seed {seed}: bar not bracketed");
            assert!(l <= vw && vw <= h, "seed {seed}: vwap outside bar");
            assert!(vol > 0.0 && vol.is_finite(), "seed {seed}: bad volume");
            assert!(cap.values()[k] > 0.0, "seed {seed}: bad cap");
        }
        for level in [
            IndustryLevel::Sector,
            IndustryLevel::Industry,
            IndustryLevel::Subindustry,
        ] {
            assert_eq!(m.industry().groups(level).unwrap().len(), 15);
        }
    }
}

#[test]
fn synthetic_generation_is_deterministic() {
    let a = generate_synthetic(42, 50, 8, 3).unwrap();
    let b = generate_synthetic(42, 50, 8, 3).unwrap();
    let c = generate_synthetic(43, 50, 8, 3).unwrap();
    assert!(a.close().bitwise_eq(b.close()));
    assert!(a.volume().bitwise_eq(b.volume()));
    assert!(!a.close().bitwise_eq(c.close()));
}

#[test]
fn compounding_returns_rebuilds_close() {
    let m = generate_synthetic(8, 250, 10, 2).unwrap();
    let r = derive_returns(m.close());
    for i in 0..10 {
        let close = m.close().column(i);
        let mut level = close[0];
        for t in 1..close.len() {
            level *= 1.0 + r.get(t, i);
            assert!(((level - close[t]) / close[t]).abs() < 1e-12);
        }
    }
}

#[test]
fn one_day_adv_is_dollar_volume() {
    let m = generate_synthetic(8, 30, 6, 2).unwrap();
    let adv = derive_adv(&m, 1);
    for k in 0..adv.values().len() {
        let expected = m.volume().values()[k] * m.vwap().values()[k];
        assert_eq!(adv.values()[k], expected);
    }
}

#[test]
fn derived_panels_hold_no_infinities() {
    let m = generate_synthetic(8, 100, 12, 2).unwrap();
    for p in [derive_returns(m.close()), derive_adv(&m, 20), m.returns().clone()] {
        assert!(p.values().iter().all(|v| !v.is_infinite()));
    }
}
