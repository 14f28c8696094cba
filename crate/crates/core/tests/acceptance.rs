//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. The process exits non-zero on a FAIL
//! only when `VISMIMO_ACCEPTANCE_STRICT=1`, so known red criteria are
//! reported without breaking `cargo test`.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vismimo::channel::{
    generate_codebook, sample_rayleigh, select_codebook_precoder, svd_decompose, svd_post_snr, unitary_precoder,
    zf_post_snr,
};
use vismimo::experiments::{
    coherence_sweep, limited_feedback_gains, monte_carlo_gains, snr_sweep, GainConfig, ModePolicy, SessionConfig,
};
use vismimo::link::{baseline_per, CodeRate, LinkConfig, Modulation, StreamLink};
use vismimo::math::db_to_linear;
use vismimo::policy::{
    apply_order, bottleneck, build_interleaver, evaluate_mapping_wt, optimal_thresholds, order_streams,
    transmission_times, weighted_throughput_baseline, weighted_throughput_prioritized, PrecoderSource, ThresholdPolicy,
};
use vismimo::rng::{stream_rng, Purpose};
use vismimo::visibility::{
    sample_iid_trace, update_distribution, GopSource, KdeParams, Kernel, PacketRecord, VisibilityDistribution,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

const CODE: f64 = 0.5;
const RATE_ORDERS: [u32; 4] = [2, 4, 16, 64];

fn code() -> CodeRate {
    CodeRate::new(1, 2, 0.0).unwrap()
}

fn link(alpha: f64, order: u32, retx_limit: u32) -> StreamLink {
    StreamLink::from_alpha(1.0, Modulation::new(order).unwrap(), code(), alpha, retx_limit, 1.0)
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> VisibilityDistribution {
    let skew = rng.gen_range(0.5..3.0);
    let samples: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powf(skew)).collect();
    let h = rng.gen_range(0.02..0.12);
    let kernel = if rng.gen_bool(0.5) { Kernel::Gaussian } else { Kernel::Epanechnikov };
    update_distribution(&samples, h, kernel).unwrap()
}

fn random_links(rng: &mut ChaCha8Rng, s: usize, retx_limit: u32, max_alpha: f64) -> Vec<StreamLink> {
    (0..s)
        .map(|_| {
            let order = RATE_ORDERS[rng.gen_range(0..RATE_ORDERS.len())];
            link(rng.gen_range(1e-3..max_alpha), order, retx_limit)
        })
        .collect()
}

fn gop_distribution() -> VisibilityDistribution {
    let trace = GopSource::default().generate(500, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let v: Vec<f64> = trace.iter().map(|p| p.visibility).collect();
    update_distribution(&v, 0.05, Kernel::Gaussian).unwrap()
}

fn gain_config(n: usize, s: usize, db: f64) -> GainConfig {
    GainConfig {
        nt: n,
        nr: n,
        streams: s,
        es_over_n0: db_to_linear(db),
        link: LinkConfig::default(),
        visibility: gop_distribution(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------
// 1 and 2: threshold optimality and load balance

struct ThresholdInstance {
    dist: VisibilityDistribution,
    ordered: Vec<StreamLink>,
}

fn threshold_instances() -> Vec<ThresholdInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    (0..200)
        .map(|k| {
            let s = 2 + k % 3;
            let retx = [0, 2, 4][rng.gen_range(0..3)];
            let links = random_links(&mut rng, s, retx, 0.9);
            let ordered = apply_order(&links, &order_streams(&links));
            ThresholdInstance { dist: random_dist(&mut rng, 50), ordered }
        })
        .collect()
}

/// Best objective over every monotone threshold vector on a uniform grid,
/// evaluated as delivered visibility over the slowest stream's time.
fn grid_optimum(inst: &ThresholdInstance, cells: usize) -> f64 {
    let s = inst.ordered.len();
    let grid: Vec<f64> = (0..=cells).map(|k| k as f64 / cells as f64).collect();
    let cdf: Vec<f64> = grid.iter().map(|&x| inst.dist.cdf(x)).collect();
    let mom: Vec<f64> = grid.iter().map(|&x| inst.dist.partial_moment(0.0, x).unwrap()).collect();
    let p: Vec<f64> = inst.ordered.iter().map(|l| l.p_success).collect();
    let speed: Vec<f64> = inst.ordered.iter().map(|l| CODE * l.rate / l.r).collect();
    let eval = |edges: &[usize]| {
        let mut value = 0.0;
        let mut t_max = 0.0f64;
        for i in 0..s {
            let (a, b) = (edges[i], edges[i + 1]);
            value += p[i] * (mom[b] - mom[a]);
            t_max = t_max.max((cdf[b] - cdf[a]) / speed[i]);
        }
        value / t_max
    };
    let mut best = 0.0f64;
    let mut edges = vec![0; s + 1];
    edges[s] = cells;
    fn recurse(level: usize, lo: usize, edges: &mut Vec<usize>, best: &mut f64, eval: &dyn Fn(&[usize]) -> f64) {
        let s = edges.len() - 1;
        if level == s {
            *best = best.max(eval(edges));
            return;
        }
        let cells = edges[s];
        for k in lo..=cells {
            edges[level] = k;
            recurse(level + 1, k, edges, best, eval);
        }
    }
    recurse(1, 0, &mut edges, &mut best, &eval);
    best
}

fn criterion_1() -> Outcome {
    let insts = threshold_instances();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for inst in &insts {
        let cells = if inst.ordered.len() == 2 { 1000 } else { 200 };
        let th = optimal_thresholds(&inst.dist, &inst.ordered).map_err(|e| e.to_string())?;
        let closed = weighted_throughput_prioritized(&th, &inst.ordered, &inst.dist, 1.0).map_err(|e| e.to_string())?;
        let ratio = closed / grid_optimum(inst, cells);
        worst = worst.min(ratio);
        if ratio < 1.0 - 1e-6 {
            failures += 1;
        }
    }
    let detail = format!("{} instances, worst closed-form/grid ratio {worst:.9}", insts.len());
    if failures == 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}, {failures} below 1 - 1e-6"))
    }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for inst in threshold_instances() {
        let th = optimal_thresholds(&inst.dist, &inst.ordered).map_err(|e| e.to_string())?;
        let t = transmission_times(&th, &inst.ordered, &inst.dist, 1.0).map_err(|e| e.to_string())?;
        let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = t.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(rel(max, min));
    }
    let detail = format!("max relative spread of per-stream times {worst:.3e}");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 3: swapping an adjacent out-of-order packet pair never helps

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut swaps = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let s = rng.gen_range(2..=4);
        let n = rng.gen_range(s..=40);
        let size = rng.gen_range(50..400);
        let mut packets: Vec<PacketRecord> =
            (0..n).map(|i| PacketRecord::new(i as u64, rng.gen(), size).unwrap()).collect();
        packets.sort_by(|a, b| a.visibility.total_cmp(&b.visibility));
        let retx = rng.gen_range(0..5);
        let links = random_links(&mut rng, s, retx, 0.9);
        let ordered = apply_order(&links, &order_streams(&links));
        // Ordered mapping: contiguous rank blocks, lowest visibilities on the least reliable stream.
        let mut cuts: Vec<usize> = (0..s - 1).map(|_| rng.gen_range(1..n)).collect();
        cuts.sort_unstable();
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(n);
        let mapping: Vec<Vec<usize>> = (0..s).map(|i| (bounds[i]..bounds[i + 1]).collect()).collect();
        let base = evaluate_mapping_wt(&mapping, &ordered, &packets).map_err(|e| e.to_string())?;
        for i in 0..s - 1 {
            if mapping[i].is_empty() || mapping[i + 1].is_empty() {
                continue;
            }
            let (lo, hi) = (*mapping[i].last().unwrap(), mapping[i + 1][0]);
            let mut swapped = mapping.clone();
            *swapped[i].last_mut().unwrap() = hi;
            swapped[i + 1][0] = lo;
            let wt = evaluate_mapping_wt(&swapped, &ordered, &packets).map_err(|e| e.to_string())?;
            worst = worst.max(wt - base);
            swaps += 1;
        }
    }
    let detail = format!("{swaps} swaps, largest increase {worst:.3e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 4: gradient sign pattern at non-optimal thresholds

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut tested, mut attempts) = (0, 0);
    let mut bad = Vec::new();
    let step = 1e-6;
    while tested < 50 && attempts < 10_000 {
        attempts += 1;
        let s = rng.gen_range(2..=4);
        let dist = random_dist(&mut rng, 50);
        let retx = rng.gen_range(0..5);
        let links = random_links(&mut rng, s, retx, 0.9);
        let ordered = apply_order(&links, &order_streams(&links));
        let mut inner: Vec<f64> = (0..s - 1).map(|_| rng.gen_range(0.02..0.98)).collect();
        inner.sort_by(f64::total_cmp);
        let Ok(th) = ThresholdPolicy::from_inner(&inner) else { continue };
        if th.class_masses(&dist).iter().any(|&m| m < 1e-3) {
            continue;
        }
        let t = transmission_times(&th, &ordered, &dist, 1.0).unwrap();
        let k = bottleneck(&t);
        let runner_up = t.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).fold(0.0, f64::max);
        if runner_up > t[k] * (1.0 - 1e-3) {
            continue;
        }
        let wt = |v: &[f64]| {
            let p = ThresholdPolicy::from_inner(v).unwrap();
            weighted_throughput_prioritized(&p, &ordered, &dist, 1.0).unwrap()
        };
        for j in 0..inner.len() {
            let (mut up, mut down) = (inner.clone(), inner.clone());
            up[j] += step;
            down[j] -= step;
            let grad = (wt(&up) - wt(&down)) / (2.0 * step);
            // inner[j] is the lower edge of class j + 1.
            let ok = if j + 1 == k { grad >= -1e-6 } else { grad <= 1e-6 };
            if !ok {
                bad.push(format!("grad {grad:.3e} at edge {} (bottleneck class {k})", j + 1));
            }
        }
        tested += 1;
    }
    if tested < 50 {
        return Err(format!("only {tested} usable threshold vectors generated"));
    }
    if bad.is_empty() {
        Ok(format!("{tested} threshold vectors, all gradient signs as expected"))
    } else {
        Err(format!("{} sign violations, first: {}", bad.len(), bad[0]))
    }
}

// ---------------------------------------------------------------------------
// 5: with many retransmissions the objective is the post-retransmission sum rate

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let s = rng.gen_range(1..=4);
        let dist = random_dist(&mut rng, 50);
        let links = random_links(&mut rng, s, 200, 0.9);
        let ordered = apply_order(&links, &order_streams(&links));
        let th = optimal_thresholds(&dist, &ordered).map_err(|e| e.to_string())?;
        let wt = weighted_throughput_prioritized(&th, &ordered, &dist, 1.0).map_err(|e| e.to_string())?;
        let sum_rate: f64 = ordered.iter().map(|l| (1.0 - l.alpha) * l.rate).sum();
        worst = worst.max(rel(wt, CODE * sum_rate * dist.mean()));
    }
    let detail = format!("200 instances at L=200, max relative gap {worst:.3e}");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 6: zero-forcing SNR through the SVD precoder equals the singular-value form

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for t in 0..1000u64 {
        let nt = rng.gen_range(2..=4);
        let nr = rng.gen_range(2..=4);
        let s = rng.gen_range(1..=nt.min(nr));
        let es = db_to_linear(rng.gen_range(-5.0..20.0));
        let h = sample_rayleigh(nr, nt, &mut stream_rng(6, Purpose::Channel, t));
        let f = unitary_precoder(&h, s).map_err(|e| e.to_string())?;
        let zf = zf_post_snr(&h, &f, es).map_err(|e| e.to_string())?;
        let sv = svd_post_snr(&svd_decompose(&h).sigma, s, es).map_err(|e| e.to_string())?;
        for (a, b) in zf.as_slice().iter().zip(sv.as_slice()) {
            worst = worst.max(rel(*a, *b));
        }
    }
    let detail = format!("1000 channels, max relative SNR difference {worst:.3e}");
    if worst < 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 7: spread-packet error rate against symbol-level composition

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let (mut cases, mut saturated) = (0, 0);
    for &ser in &[1e-7, 1e-5, 1e-3, 1e-2, 0.05, 0.2, 0.5] {
        for &b in &[1u32, 8, 100, 1000, 4000] {
            for s in 1..=4usize {
                // Stream i sees SER scaled by (i + 1) / s, capped below one.
                let sers: Vec<f64> = (0..s).map(|i| (ser * (i + 1) as f64 / s as f64).min(0.9)).collect();
                // Both sides in log1p/expm1 form so the oracle adds no cancellation error.
                let alphas: Vec<f64> = sers.iter().map(|&e| -(b as f64 * (-e).ln_1p()).exp_m1()).collect();
                let log_keep: f64 = sers.iter().map(|&e| (-e).ln_1p()).sum();
                let composed = -(b as f64 / s as f64 * log_keep).exp_m1();
                // A per-stream rate that rounds to exactly 1 no longer carries the
                // survival probability the composition still sees.
                if alphas.contains(&1.0) {
                    saturated += 1;
                    continue;
                }
                worst = worst.max((baseline_per(&alphas) - composed).abs());
                cases += 1;
            }
        }
    }
    let detail =
        format!("{cases} (SER, b, S) cases, max abs difference {worst:.3e}; {saturated} with a per-stream rate of exactly 1 skipped");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 8: single stream equivalence and retransmission-limit invariance

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut mismatches = 0;
    let mut worst_l = 0.0f64;
    for _ in 0..500 {
        let dist = random_dist(&mut rng, 50);
        let order = RATE_ORDERS[rng.gen_range(0..4)];
        let alpha = rng.gen_range(0.0..0.95);
        let one = vec![link(alpha, order, rng.gen_range(0..9))];
        let mean_b = rng.gen_range(50.0..400.0);
        let th = optimal_thresholds(&dist, &one).map_err(|e| e.to_string())?;
        let p = weighted_throughput_prioritized(&th, &one, &dist, mean_b).map_err(|e| e.to_string())?;
        let b = weighted_throughput_baseline(&one, &dist, mean_b).map_err(|e| e.to_string())?;
        if p != b {
            mismatches += 1;
        }
        let s = rng.gen_range(1..=4);
        let alphas: Vec<f64> = (0..s).map(|_| rng.gen_range(0.0..0.9)).collect();
        let at = |l: u32| -> Vec<StreamLink> { alphas.iter().map(|&a| link(a, order, l)).collect() };
        let w0 = weighted_throughput_baseline(&at(0), &dist, mean_b).map_err(|e| e.to_string())?;
        let w8 = weighted_throughput_baseline(&at(8), &dist, mean_b).map_err(|e| e.to_string())?;
        worst_l = worst_l.max(rel(w0, w8));
    }
    let detail = format!("500 cases: {mismatches} S=1 mismatches, max L=0 vs L=8 baseline difference {worst_l:.3e}");
    if mismatches == 0 && worst_l < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 9: gain signs

fn criterion_9() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut below = 0;
    let mut total = 0;
    let mut min_pp = f64::INFINITY;
    for (n, db) in [(2, -1.0), (2, 8.0), (4, 4.0), (4, 15.0)] {
        let rep = monte_carlo_gains(&gain_config(n, 2, db), 10_000, 9).map_err(|e| e.to_string())?;
        below += rep.realizations_pp_below_one;
        total += rep.trials;
        min_pp = min_pp.min(rep.min_realization_pp);
        if rep.g_um < 0.99 {
            ok = false;
        }
        lines.push(format!("{n}x{n}@{db}dB G_UM={:.4}", rep.g_um));
    }
    let per_realization = below == 0;
    let mut cfg = gain_config(4, 2, 8.0);
    cfg.link.retx_limit = 200;
    let rep = monte_carlo_gains(&cfg, 10_000, 9).map_err(|e| e.to_string())?;
    let limit_ok = (rep.g_pp - 1.0).abs() <= 2.0 * rep.stderr_pp + 1e-12;
    let detail = format!(
        "{}; per-realization G_PP<1 in {below}/{total} draws (min {min_pp:.6}); L=200 G_PP={:.9} stderr {:.2e}",
        lines.join(", "),
        rep.g_pp,
        rep.stderr_pp
    );
    if ok && per_realization && limit_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 10: SNR trends of the unequal-modulation gain

const TREND_GRID: [f64; 7] = [-1.0, 1.0, 4.0, 6.0, 8.0, 12.0, 15.0];

fn criterion_10() -> Outcome {
    let sweep = |n: usize| -> Result<Vec<f64>, String> {
        let sw = snr_sweep(&gain_config(n, 2, 0.0), &TREND_GRID, 10_000, 10, &PrecoderSource::Svd)
            .map_err(|e| e.to_string())?;
        Ok(sw.points.iter().map(|r| r.g_um).collect())
    };
    let four = sweep(4)?;
    let two = sweep(2)?;
    let at = |db: f64| TREND_GRID.iter().position(|&x| x == db).unwrap();
    let dip = four[at(4.0)] < 1.05 && four[at(4.0)] < four[at(-1.0)];
    let losing: Vec<String> = TREND_GRID
        .iter()
        .zip(two.iter().zip(&four))
        .filter(|(_, (a, b))| a <= b)
        .map(|(db, (a, b))| format!("{db}dB ({a:.3} vs {b:.3})"))
        .collect();
    let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>().join("/");
    let mut detail = format!("G_UM 4x4 {} | 2x2 {} over {:?} dB", fmt(&four), fmt(&two), TREND_GRID);
    if !dip {
        detail.push_str("; 4x4 dip at 4 dB missing");
    }
    if !losing.is_empty() {
        detail.push_str(&format!("; 2x2 not above 4x4 at {}", losing.join(", ")));
    }
    if dip && losing.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 11: limited feedback

/// Smallest singular value via the eigenvalues of `(HF)^H HF`.
fn min_sv_oracle(hf: &DMatrix<Complex64>) -> f64 {
    let gram = hf.adjoint() * hf;
    let n = gram.nrows();
    // Embed the Hermitian Gram matrix as a real symmetric 2n x 2n matrix.
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = gram[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    real.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min).max(0.0).sqrt()
}

fn criterion_11() -> Outcome {
    let cfg = gain_config(4, 2, 8.0);
    let trials = 4000;
    let seed = 11;
    let mut reports = Vec::new();
    let mut mismatches = 0;
    for bits in [3u32, 4] {
        let cb = generate_codebook(4, 2, bits, 300, &mut stream_rng(seed, Purpose::Codebook, bits as u64))
            .map_err(|e| e.to_string())?;
        let rep = limited_feedback_gains(&cfg, &cb, trials, seed).map_err(|e| e.to_string())?;
        for (t, &chosen) in rep.codewords.iter().enumerate() {
            let h = sample_rayleigh(4, 4, &mut stream_rng(seed, Purpose::Channel, t as u64));
            let scores: Vec<f64> = cb.precoders().iter().map(|f| min_sv_oracle(&(h.entries() * f.entries()))).collect();
            let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // Accept any codeword within rounding of the best score.
            if scores[chosen] < best * (1.0 - 1e-9) {
                mismatches += 1;
            }
            let (idx, _) = select_codebook_precoder(&h, &cb).map_err(|e| e.to_string())?;
            if idx != chosen {
                mismatches += 1;
            }
        }
        reports.push(rep);
    }
    let (three, four) = (&reports[0], &reports[1]);
    let full = four.full_csi.g_um;
    let ordered = full >= four.limited.g_um && four.limited.g_um >= three.limited.g_um - 2.0 * three.limited.stderr_um;
    let detail = format!(
        "G_UM full {full:.4}, 4-bit {:.4}, 3-bit {:.4} (stderr {:.4}); {mismatches} codeword mismatches over {} draws",
        four.limited.g_um,
        three.limited.g_um,
        three.limited.stderr_um,
        2 * trials
    );
    if ordered && mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 12: distribution machinery

/// Composite Gauss-Legendre (5 points) on `n` equal panels.
fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    const X: [f64; 5] =
        [0.0, -0.538_469_310_105_683, 0.538_469_310_105_683, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
        0.236_926_885_056_189,
    ];
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            X.iter().zip(&W).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let (mut mass_err, mut trip_err, mut part_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..40 {
        let n = rng.gen_range(5..200);
        let dist = random_dist(&mut rng, n);
        // Panels much narrower than the bandwidth so kernel kinks are resolved.
        let panels = (40.0 / dist.bandwidth()).ceil() as usize * 10;
        mass_err = mass_err.max((gauss_legendre(|x| dist.pdf(x), 0.0, 1.0, panels) - 1.0).abs());
        for k in 1..200 {
            let q = k as f64 / 200.0;
            trip_err = trip_err.max((dist.cdf(dist.quantile(q)) - q).abs());
        }
        let mut edges: Vec<f64> = (0..rng.gen_range(1..6)).map(|_| rng.gen::<f64>()).collect();
        edges.extend([0.0, 1.0]);
        edges.sort_by(f64::total_cmp);
        let pieces: f64 = edges.windows(2).map(|w| dist.partial_moment(w[0], w[1]).unwrap()).sum();
        let quad = gauss_legendre(|x| x * dist.pdf(x), 0.0, 1.0, panels);
        part_err = part_err.max((pieces - dist.mean()).abs()).max((pieces - quad).abs());
    }
    let detail =
        format!("mass error {mass_err:.2e}, quantile round trip {trip_err:.2e}, partition error {part_err:.2e}");
    if mass_err <= 1e-6 && trip_err <= 1e-8 && part_err <= 1e-7 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 13: interleaver conservation

fn criterion_13() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1313);
    let mut problems = Vec::new();
    for case in 0..300 {
        let rows = rng.gen_range(1..=4);
        let classes: Vec<Vec<u32>> = (0..rng.gen_range(1..=rows))
            .map(|_| (0..rng.gen_range(0..5)).map(|_| rng.gen_range(1..=if case < 100 { 4 } else { 60 })).collect())
            .collect();
        let map = build_interleaver(&classes, rows).map_err(|e| e.to_string())?;
        let total = map.total_symbols();
        let mut count = vec![0usize; total + 1];
        let schedule = map.schedule();
        for (use_idx, a) in schedule.iter().enumerate() {
            if a.len() != rows {
                problems.push(format!("case {case}: assignment width {}", a.len()));
            }
            if case < 100 && *a != map.assignment(use_idx + 1) {
                problems.push(format!("case {case}: slide differs from direct construction at use {}", use_idx + 1));
            }
            for (m, sym) in a.iter().enumerate() {
                if let Some(n) = *sym {
                    if !map.row_range(m).contains(&n) {
                        problems.push(format!("case {case}: symbol {n} on row {m}"));
                    }
                    if n == 0 || n > total {
                        problems.push(format!("case {case}: symbol {n} out of range"));
                    } else {
                        count[n] += 1;
                    }
                }
            }
        }
        // Column-by-column check against the direct formula on small cases:
        // row m at use i carries 1 + (symbols of classes before m) + (i - 1).
        if case < 100 {
            let sizes: Vec<usize> = classes.iter().map(|c| c.iter().map(|&b| b as usize).sum()).collect();
            for (i, a) in schedule.iter().enumerate() {
                for (m, got) in a.iter().enumerate().take(rows) {
                    let size = sizes.get(m).copied().unwrap_or(0);
                    let base: usize = 1 + sizes.iter().take(m).sum::<usize>();
                    let expect = (i < size).then_some(base + i);
                    if *got != expect {
                        problems.push(format!("case {case}: use {} row {m} got {got:?} want {expect:?}", i + 1));
                    }
                }
            }
        }
        if let Some(n) = (1..=total).find(|&n| count[n] != 1) {
            problems.push(format!("case {case}: symbol {n} scheduled {} times", count[n]));
        }
    }
    if problems.is_empty() {
        Ok("300 random configurations, each symbol once on its own row; slide matches direct construction".into())
    } else {
        Err(format!("{} problems, first: {}", problems.len(), problems[0]))
    }
}

// ---------------------------------------------------------------------------
// 14: coherence sweep

fn criterion_14() -> Outcome {
    let planning = gop_distribution();
    let config = SessionConfig {
        nt: 2,
        nr: 2,
        mode: ModePolicy::Fixed(2),
        es_over_n0: db_to_linear(10.0),
        link: LinkConfig::default(),
        kde: KdeParams::default(),
        coherence: 1,
        source_rate: 0.0,
    };
    let lengths = [10, 100, 1000];
    let blocks = 40;
    let mut rng = stream_rng(14, Purpose::Trace, 0);
    let warmup = sample_iid_trace(&planning, config.kde.window, 250, &mut rng).map_err(|e| e.to_string())?;
    let iid = sample_iid_trace(&planning, blocks * 1000, 250, &mut rng).map_err(|e| e.to_string())?;
    let iid_sweep = coherence_sweep(&iid, Some(&warmup), &lengths, &config, 14).map_err(|e| e.to_string())?;
    let largest = iid_sweep.points.last().unwrap();
    let iid_gap = rel(largest.realized_gain, largest.planned_gain);

    let bursty_source = GopSource { scene_packets: 400, scene_shift: 0.3, ..GopSource::default() };
    let bursty = bursty_source.generate(config.kde.window + blocks * 1000, &mut rng).map_err(|e| e.to_string())?;
    let bursty_sweep = coherence_sweep(&bursty, None, &lengths, &config, 14).map_err(|e| e.to_string())?;
    let b_largest = bursty_sweep.points.last().unwrap();
    let efficiency = |r: &vismimo::experiments::SessionResult| r.realized_gain / r.planned_gain;
    let detail = format!(
        "i.i.d.: realized {:.4} vs planned {:.4} (gap {:.2}%); bursty: realized {:.4} vs planned {:.4}",
        largest.realized_gain,
        largest.planned_gain,
        100.0 * iid_gap,
        b_largest.realized_gain,
        b_largest.planned_gain
    );
    if iid_gap <= 0.05
        && efficiency(b_largest) < efficiency(largest)
        && b_largest.realized_gain < b_largest.planned_gain
    {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "threshold optimality", budget: Some(Duration::from_secs(120)), run: criterion_1 },
        Criterion { id: 2, name: "load balance", budget: None, run: criterion_2 },
        Criterion { id: 3, name: "swap monotonicity", budget: None, run: criterion_3 },
        Criterion { id: 4, name: "gradient signs", budget: None, run: criterion_4 },
        Criterion { id: 5, name: "full-retransmission limit", budget: None, run: criterion_5 },
        Criterion { id: 6, name: "ZF and SVD SNR agree", budget: None, run: criterion_6 },
        Criterion { id: 7, name: "spread-packet error rate", budget: None, run: criterion_7 },
        Criterion { id: 8, name: "single stream equivalence", budget: None, run: criterion_8 },
        Criterion { id: 9, name: "gain signs", budget: Some(Duration::from_secs(120)), run: criterion_9 },
        Criterion { id: 10, name: "SNR trends", budget: Some(Duration::from_secs(300)), run: criterion_10 },
        Criterion { id: 11, name: "limited feedback", budget: None, run: criterion_11 },
        Criterion { id: 12, name: "distribution machinery", budget: None, run: criterion_12 },
        Criterion { id: 13, name: "interleaver conservation", budget: None, run: criterion_13 },
        Criterion { id: 14, name: "coherence sweep", budget: None, run: criterion_14 },
    ];
    let only: Option<Vec<u32>> = std::env::args().nth(1).and_then(|a| a.split(',').map(|x| x.parse().ok()).collect());
    let mut failed = 0;
    for c in &criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&c.id)) {
            continue;
        }
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Some(budget), Ok(detail)) = (c.budget, &outcome) {
            if elapsed > budget {
                outcome = Err(format!("{detail}; took {elapsed:.1?}, budget {budget:.0?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {}: {detail} [{elapsed:.1?}]", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {}: {detail} [{elapsed:.1?}]", c.id, c.name);
            }
        }
    }
    println!("acceptance: {failed} failing");
    if failed > 0 && std::env::var("VISMIMO_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
