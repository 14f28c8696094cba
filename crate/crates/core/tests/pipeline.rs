use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vismimo::channel::{sample_rayleigh, ChannelRealization};
use vismimo::link::LinkConfig;
use vismimo::math::db_to_linear;
use vismimo::policy::{
    build_interleaver, classify_packets, evaluate_mapping_wt, select_mode, PlanConfig, PlanRecord, PrecoderSource,
};
use vismimo::rng::{stream_rng, Purpose};
use vismimo::visibility::{mean_packet_size, read_trace, write_trace, GopSource, Kernel, VisibilityWindow};

fn session_inputs() -> (Vec<vismimo::visibility::PacketRecord>, VisibilityWindow) {
    let trace = GopSource::default().generate(800, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let mut window = VisibilityWindow::new(500).unwrap();
    for p in &trace[..500] {
        window.push(p.visibility, p.size_symbols);
    }
    (trace, window)
}

#[test]
fn trace_to_schedule() {
    let (trace, window) = session_inputs();
    let dist = window.distribution(0.05, Kernel::Gaussian).unwrap();
    let cfg = PlanConfig {
        link: LinkConfig::default(),
        es_over_n0: db_to_linear(12.0),
        source_rate: 0.0,
        mean_b: window.mean_size().unwrap(),
    };
    let h = sample_rayleigh(4, 4, &mut stream_rng(3, Purpose::Channel, 0));
    let decision = select_mode(&h, &dist, &cfg, &PrecoderSource::Svd).unwrap();
    let plan = &decision.plan;
    assert!(decision.rate_met);
    assert_eq!(plan.links.len(), plan.mode);
    assert!(plan.links.windows(2).all(|w| w[0].p_success <= w[1].p_success));

    let block = &trace[500..];
    let classes = classify_packets(&plan.thresholds, block);
    assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), block.len());
    for (k, class) in classes.iter().enumerate() {
        for &i in class {
            assert_eq!(plan.thresholds.class_of(block[i].visibility), k);
        }
    }
    assert!(evaluate_mapping_wt(&classes, &plan.links, block).unwrap() > 0.0);

    let sizes: Vec<Vec<u32>> = classes.iter().map(|c| c.iter().map(|&i| block[i].size_symbols).collect()).collect();
    let map = build_interleaver(&sizes, plan.mode).unwrap();
    let scheduled: usize = map.schedule().iter().map(|a| a.iter().flatten().count()).sum();
    assert_eq!(scheduled, block.iter().map(|p| p.size_symbols as usize).sum::<usize>());

    let rec = PlanRecord::from_decision(&decision, 0.0);
    let json = serde_json::to_string(&rec).unwrap();
    let back: PlanRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn trace_csv_round_trip_preserves_sizes() {
    let (trace, _) = session_inputs();
    let mut buf = Vec::new();
    write_trace(&trace, &mut buf).unwrap();
    let back = read_trace(buf.as_slice()).unwrap();
    assert_eq!(back.len(), trace.len());
    assert_eq!(mean_packet_size(&back, None).unwrap(), mean_packet_size(&trace, None).unwrap());
}

#[test]
fn dead_stream_takes_the_least_visible_class() {
    let (_, window) = session_inputs();
    let dist = window.distribution(0.05, Kernel::Gaussian).unwrap();
    let cfg =
        PlanConfig { link: LinkConfig::default(), es_over_n0: db_to_linear(10.0), source_rate: 0.0, mean_b: 250.0 };
    // The second singular value is far too weak to deliver anything.
    let h = ChannelRealization::diagonal(&[3.0, 1e-4]).unwrap();
    let decision = select_mode(&h, &dist, &cfg, &PrecoderSource::Svd).unwrap();
    assert_eq!(decision.candidates.len(), 2);
    let plan = &decision.plan;
    assert_eq!(plan.mode, 2);
    assert_eq!(plan.stream_order, vec![1, 0]);
    assert!(plan.links[0].p_success < 1e-6);
    // Shedding the bottom of the distribution raises delivered visibility per second.
    assert!(decision.candidates[1].wt > decision.candidates[0].wt);
}
