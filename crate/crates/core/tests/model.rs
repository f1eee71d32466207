use iot_select::decision::{evaluate_action, ActionSpace, OptionId};
use iot_select::energy::{hop_energy, route_energy, Unit};
use iot_select::evaluation::{benchmark_action, BenchmarkScenario};
use iot_select::params::ModelParams;
use iot_select::propagation::Link;
use iot_select::scenario::{generate_topology, DeviceProfile, ScenarioParams, Topology};
use iot_select::timing::response_time;

fn topologies(seeds: std::ops::Range<u64>) -> Vec<Topology> {
    let model = ModelParams::default();
    let sp = ScenarioParams::default();
    seeds.map(|s| generate_topology(s, &sp, &model).unwrap()).collect()
}

fn served(t: &Topology) -> impl Iterator<Item = &DeviceProfile> {
    t.devices.iter().filter(|d| t.serving_gateway(d.id).is_some())
}

#[test]
fn energy_is_the_sum_of_its_parts() {
    let model = ModelParams::default();
    let space = ActionSpace::new(5).unwrap();
    for t in topologies(0..10) {
        for d in served(&t) {
            for a in space.iter() {
                let b = route_energy(d, a, &t, &model).unwrap();
                let parts = b.transmission() + b.processing.iter().map(|p| p.1).sum::<f64>();
                assert!((b.total - parts).abs() <= 1e-12 * b.total.max(1.0));
                assert_eq!(b.tx_per_hop.len(), a.option.hops());
                assert_eq!(evaluate_action(d, a, &t, &model).unwrap().energy, b.total);
            }
        }
    }
}

#[test]
fn energy_grows_with_the_data_rate() {
    let model = ModelParams::default();
    let space = ActionSpace::new(25).unwrap();
    for t in topologies(0..5) {
        for d in served(&t) {
            for a in space.iter() {
                let mut last = 0.0;
                for rate in [5e3, 10e3, 20e3, 30e3, 50e3] {
                    let dev = DeviceProfile { rate_req: rate, ..d.clone() };
                    let e = route_energy(&dev, a, &t, &model).unwrap().total;
                    assert!(e >= last, "{a} at {rate}: {e} < {last}");
                    last = e;
                }
            }
        }
    }
}

#[test]
fn zero_offload_matches_device_processing() {
    let model = ModelParams::default();
    let space = ActionSpace::new(5).unwrap();
    for t in topologies(0..10) {
        for d in served(&t) {
            let eval = |o, psi| evaluate_action(d, space.find(o, psi).unwrap(), &t, &model).unwrap();
            let a = eval(OptionId::A, 0.0);
            for o in [OptionId::B, OptionId::C] {
                let z = eval(o, 0.0);
                assert!((z.energy - a.energy).abs() <= 1e-15 * a.energy);
                assert!((z.resp - a.resp).abs() <= 1e-15 * a.resp);
                assert_eq!(z.cost, a.cost);
                assert_eq!(z.offload_cost, 0.0);
            }
            let dd = eval(OptionId::D, 0.0);
            let e = eval(OptionId::E, 0.0);
            assert!((e.energy - dd.energy).abs() <= 1e-15 * dd.energy);
            assert!((e.resp - dd.resp).abs() <= 1e-15 * dd.resp);
        }
    }
}

#[test]
fn cost_rises_and_security_holds_along_psi() {
    let model = ModelParams::default();
    let space = ActionSpace::new(5).unwrap();
    for t in topologies(0..5) {
        for d in served(&t) {
            for o in [OptionId::B, OptionId::C, OptionId::E] {
                let evals: Vec<_> = space
                    .iter()
                    .filter(|a| a.option == o)
                    .map(|a| evaluate_action(d, a, &t, &model).unwrap())
                    .collect();
                assert_eq!(evals.len(), 21);
                assert!(evals.windows(2).all(|w| w[1].cost > w[0].cost));
                assert!(evals.iter().all(|e| e.secure == o.secure()));
            }
        }
    }
}

#[test]
fn response_time_is_processing_plus_hops() {
    let model = ModelParams::default();
    let space = ActionSpace::new(5).unwrap();
    let t = &topologies(3..4)[0];
    for d in served(t) {
        let raw = d.raw_bits(model.period);
        for a in space.iter() {
            let r = response_time(d, a, t, &model).unwrap();
            let psi = a.offload_fraction();
            let mut expected = (1.0 - psi) * raw / model.units.device.capacity;
            if a.option.offloads() {
                expected += psi * raw / model.units.get(a.option.target_unit()).capacity;
            } else {
                expected = raw / model.units.device.capacity;
            }
            let processed: f64 = r.processing.iter().map(|p| p.1).sum();
            assert!((processed - expected).abs() <= 1e-15 * expected.max(1.0));
            for (link, delay) in &r.transmission {
                assert!(*delay > 0.0);
                if *link == Link::WiFi {
                    assert_eq!(r.transmission[0].0, Link::WiFi);
                }
            }
            assert!((r.total() - processed - r.transmission.iter().map(|h| h.1).sum::<f64>()).abs() < 1e-15);
        }
    }
}

#[test]
fn benchmarks_share_security_outcomes() {
    let space = ActionSpace::new(5).unwrap();
    for t in topologies(0..10) {
        let mut per_scenario = BenchmarkScenario::ALL.iter().map(|&sc| {
            t.devices
                .iter()
                .filter(|d| {
                    let a = benchmark_action(sc, d, &space).unwrap();
                    d.sec_req && !a.option.secure()
                })
                .count()
        });
        let first = per_scenario.next().unwrap();
        assert!(per_scenario.all(|n| n == first));
    }
}

#[test]
fn remote_processing_only_counts_when_enabled() {
    let mut model = ModelParams::default();
    let space = ActionSpace::new(5).unwrap();
    let t = &topologies(0..1)[0];
    let d = served(t).next().unwrap();
    let a = space.find(OptionId::C, 1.0).unwrap();
    model.include_remote_processing = true;
    let with = route_energy(d, a, t, &model).unwrap();
    assert!(with.processing.iter().any(|p| p.0 == Unit::Cloud));
    model.include_remote_processing = false;
    let without = route_energy(d, a, t, &model).unwrap();
    assert!(without.processing.iter().all(|p| p.0 == Unit::Device));
    assert!(with.total > without.total);
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn nbiot_is_usually_the_cheaper_uplink() {
    let model = ModelParams::default();
    let ts = topologies(100..130);
    let wins = ts
        .iter()
        .filter(|t| {
            let per_device = |links: &[Link]| {
                mean(served(t).map(|d| {
                    let bits = d.raw_bits(model.period);
                    links.iter().map(|&l| hop_energy(l, bits, d, t, &model).unwrap()).sum::<f64>()
                }))
            };
            per_device(&[Link::NbIot]) < per_device(&[Link::WiFi, Link::Lte])
        })
        .count();
    assert!(wins * 2 > ts.len(), "NB-IoT cheaper in {wins} of {} repeats", ts.len());
}

#[test]
fn processing_site_ordering_depends_on_the_uplink() {
    let model = ModelParams::default();
    let space = ActionSpace::new(5).unwrap();
    let ts = topologies(200..230);
    let (mut wifi_wins, mut nb_wins) = (0, 0);
    for t in &ts {
        let e = |o| mean(served(t).map(|d| evaluate_action(d, space.find(o, 1.0).unwrap(), t, &model).unwrap().energy));
        let (dev_w, fog, cloud_w, dev_nb, cloud_nb) = (e(OptionId::A), e(OptionId::B), e(OptionId::C), e(OptionId::D), e(OptionId::E));
        wifi_wins += usize::from(dev_w < fog && fog < cloud_w);
        nb_wins += usize::from(cloud_nb < dev_nb);
    }
    assert!(wifi_wins * 2 > ts.len(), "Wi-Fi ordering held in {wifi_wins} of {}", ts.len());
    assert!(nb_wins * 2 > ts.len(), "NB-IoT ordering held in {nb_wins} of {}", ts.len());
}
