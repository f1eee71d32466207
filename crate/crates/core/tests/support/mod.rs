//! Generators and property bodies shared by the property suite and the
//! acceptance run.

use iot_select::decision::{ActionSpace, OptionEvaluation};
use iot_select::evaluation::{loss_gain, min_max_normalize};
use iot_select::qlearning::{penalty, penalty_terms, PenaltyConfig};
use iot_select::scenario::{DeviceProfile, Weights};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = std::result::Result<(), TestCaseError>;

pub fn arb_eval() -> impl Strategy<Value = OptionEvaluation> {
    (0.0..2.0f64, any::<bool>(), any::<bool>(), 0.0..5.0f64, 0.0..1e5f64, 0.0..1e5f64).prop_map(
        |(resp, secure, capacity_ok, energy, cost, offload)| OptionEvaluation {
            resp,
            secure,
            capacity_ok,
            offered_capacity: 30e3,
            energy,
            cost,
            offload_cost: offload.min(cost),
        },
    )
}

pub fn arb_device() -> impl Strategy<Value = DeviceProfile> {
    (0.01..2.0f64, any::<bool>(), 1e3..6e4f64, 0.0..=100.0f64, 0u32..5, 0u32..5).prop_map(
        |(resp_req, sec_req, rate_req, battery, wr, ws)| DeviceProfile {
            id: 0,
            position: (0.0, 0.0),
            resp_req,
            sec_req,
            rate_req,
            battery,
            weights: Weights { resp: wr, sec: ws },
            group: None,
        },
    )
}

pub fn arb_battery_pair() -> impl Strategy<Value = (OptionEvaluation, DeviceProfile, f64, f64)> {
    (arb_eval(), arb_device(), 0.0..30.0f64, 30.0..=100.0f64)
}

pub fn arb_loss_inputs() -> impl Strategy<Value = (f64, f64, Vec<f64>)> {
    (-100.0..100.0f64, -100.0..100.0f64, prop::collection::vec(-100.0..100.0f64, 1..7))
}

pub fn penalty_recomposes((e, d): (OptionEvaluation, DeviceProfile)) -> Check {
    let cfg = PenaltyConfig::default();
    let t = penalty_terms(&e, &d, &cfg);
    let space = ActionSpace::new(5).unwrap();
    let total = penalty(&e, &d, &space.as_slice()[0], &cfg);
    prop_assert_eq!(total, t.resp + t.sec + t.capacity + t.monetary + t.energy);
    for term in [t.resp, t.sec, t.capacity, t.monetary, t.energy] {
        prop_assert!(term >= 0.0);
    }
    Ok(())
}

pub fn indicator_terms_match_conditions((e, d): (OptionEvaluation, DeviceProfile)) -> Check {
    let cfg = PenaltyConfig::default();
    let t = penalty_terms(&e, &d, &cfg);
    prop_assert_eq!(t.resp == 0.0, e.resp <= d.resp_req);
    if e.resp > d.resp_req {
        prop_assert_eq!(t.resp, cfg.omega.powi(d.weights.resp as i32) + e.resp);
    }
    prop_assert_eq!(t.sec == 0.0, !(d.sec_req && !e.secure));
    if d.sec_req && !e.secure {
        prop_assert_eq!(t.sec, cfg.omega.powi(d.weights.sec as i32));
    }
    prop_assert_eq!(t.capacity == 0.0, e.capacity_ok);
    if !e.capacity_ok {
        prop_assert_eq!(t.capacity, 1e5);
    }
    Ok(())
}

pub fn battery_threshold_only_moves_weighted_terms(
    (e, d, low, high): (OptionEvaluation, DeviceProfile, f64, f64),
) -> Check {
    let cfg = PenaltyConfig::default();
    let a = penalty_terms(&e, &DeviceProfile { battery: low, ..d.clone() }, &cfg);
    let b = penalty_terms(&e, &DeviceProfile { battery: high, ..d }, &cfg);
    prop_assert_eq!(a.resp.to_bits(), b.resp.to_bits());
    prop_assert_eq!(a.sec.to_bits(), b.sec.to_bits());
    prop_assert_eq!(a.capacity.to_bits(), b.capacity.to_bits());
    prop_assert_eq!(a.energy, cfg.w_e_high * e.energy);
    prop_assert_eq!(b.energy, cfg.w_e_low * e.energy);
    prop_assert_eq!(a.monetary, cfg.w_m_low * e.offload_cost);
    prop_assert_eq!(b.monetary, cfg.w_m_high * e.offload_cost);
    Ok(())
}

pub fn normalization_stays_in_unit_interval(v: Vec<f64>) -> Check {
    let n = min_max_normalize(&v);
    prop_assert_eq!(n.len(), v.len());
    for x in &n {
        prop_assert!((0.0..=1.0).contains(x));
    }
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for (x, y) in v.iter().zip(&n) {
        if hi > lo {
            if *x == lo {
                prop_assert_eq!(*y, 0.0);
            }
            if *x == hi {
                prop_assert_eq!(*y, 1.0);
            }
        } else {
            prop_assert_eq!(*y, 0.0);
        }
    }
    Ok(())
}

pub fn degenerate_range_normalizes_to_zero((c, len): (f64, usize)) -> Check {
    prop_assert!(min_max_normalize(&vec![c; len]).iter().all(|&x| x == 0.0));
    Ok(())
}

pub fn loss_sign_follows_which_run_is_worse((first, second, bench): (f64, f64, Vec<f64>)) -> Check {
    let best = bench.iter().cloned().fold(f64::INFINITY, f64::min);
    match loss_gain(first, second, &bench) {
        Ok(l) => {
            prop_assert!(second != best);
            if second > first {
                prop_assert!(l > 0.0);
            }
            if second < first {
                prop_assert!(l < 0.0);
            }
            if second == first {
                prop_assert_eq!(l, 0.0);
            }
        }
        Err(_) => prop_assert_eq!(second - best, 0.0),
    }
    Ok(())
}
