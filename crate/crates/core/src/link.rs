//! Modulation and coding error models and retransmission statistics.
//!
//! Coded packet error rate is approximated by shifting the uncoded QAM
//! symbol error rate by a per-code coding gain, then composing `b` symbols
//! into a packet: `α = 1 − (1 − SER(M, γ·g(C)))^b`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::math::{db_to_linear, golden_section_min, q_function};
use crate::{Error, Result};

/// Upper clamp applied to `α` before computing retransmission statistics.
pub const ALPHA_CLAMP: f64 = 1.0 - 1e-15;

/// QAM constellation of size `M` (a power of two, `M >= 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulation(u32);

impl Modulation {
    pub const BPSK: Modulation = Modulation(2);
    pub const QAM4: Modulation = Modulation(4);
    pub const QAM16: Modulation = Modulation(16);
    pub const QAM64: Modulation = Modulation(64);

    pub fn new(order: u32) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::invalid(format!("constellation size {order} is not a power of two >= 2")));
        }
        Ok(Self(order))
    }

    pub fn order(self) -> u32 {
        self.0
    }

    pub fn bits_per_symbol(self) -> u32 {
        self.0.trailing_zeros()
    }

    /// Data rate `B·log2(M)` in bits/s.
    pub fn rate(self, bandwidth_hz: f64) -> f64 {
        bandwidth_hz * self.bits_per_symbol() as f64
    }
}

impl TryFrom<u32> for Modulation {
    type Error = Error;
    fn try_from(value: u32) -> Result<Self> {
        Modulation::new(value)
    }
}

impl From<Modulation> for u32 {
    fn from(m: Modulation) -> u32 {
        m.0
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            2 => write!(f, "BPSK"),
            m => write!(f, "{m}-QAM"),
        }
    }
}

pub fn default_modulations() -> Vec<Modulation> {
    vec![Modulation::BPSK, Modulation::QAM4, Modulation::QAM16, Modulation::QAM64]
}

/// Channel code rate `num/den` together with its coding gain in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeRate {
    num: u32,
    den: u32,
    gain_db: f64,
}

impl CodeRate {
    pub fn new(num: u32, den: u32, gain_db: f64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::invalid(format!("code rate {num}/{den} must lie in (0, 1]")));
        }
        if !(gain_db >= 0.0) || !gain_db.is_finite() {
            return Err(Error::invalid(format!("coding gain {gain_db} dB must be finite and >= 0")));
        }
        Ok(Self { num, den, gain_db })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn gain_db(&self) -> f64 {
        self.gain_db
    }

    pub fn with_gain(self, gain_db: f64) -> Result<Self> {
        CodeRate::new(self.num, self.den, gain_db)
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.num, self.den)
    }

    /// Parses `"num/den"` (gain 0 dB).
    pub fn parse_fraction(s: &str) -> Result<Self> {
        let (n, d) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::invalid(format!("code rate '{s}' is not of the form num/den")))?;
        let num = u32::from_str(n.trim()).map_err(|_| Error::invalid(format!("bad numerator in '{s}'")))?;
        let den = u32::from_str(d.trim()).map_err(|_| Error::invalid(format!("bad denominator in '{s}'")))?;
        CodeRate::new(num, den, 0.0)
    }
}

/// Placeholder coding gains standing in for simulated code curves.
///
/// These numbers are not derived from any particular code; override them
/// with [`fit_coding_gain`] results or a coding-gain table.
pub fn default_code_rates() -> Vec<CodeRate> {
    vec![
        CodeRate { num: 1, den: 2, gain_db: 5.0 },
        CodeRate { num: 2, den: 3, gain_db: 4.0 },
        CodeRate { num: 3, den: 4, gain_db: 3.5 },
        CodeRate { num: 5, den: 6, gain_db: 3.0 },
    ]
}

/// Coding-gain table as JSON: `{"1/2": 5.0, "2/3": 4.0, ...}`.
pub fn code_rates_from_json(text: &str) -> Result<Vec<CodeRate>> {
    let table: BTreeMap<String, f64> = serde_json::from_str(text)?;
    let mut rates =
        table.iter().map(|(k, g)| CodeRate::parse_fraction(k)?.with_gain(*g)).collect::<Result<Vec<_>>>()?;
    rates.sort_by(|a, b| a.value().total_cmp(&b.value()));
    Ok(rates)
}

pub fn code_rates_to_json(rates: &[CodeRate]) -> Result<String> {
    let table: BTreeMap<String, f64> = rates.iter().map(|c| (c.label(), c.gain_db)).collect();
    Ok(serde_json::to_string_pretty(&table)?)
}

/// Uncoded symbol error rate of `M`-QAM at linear SNR `gamma`.
///
/// Uses the exact rectangular-QAM expression: an `I × J` grid with
/// `I = 2^⌈k/2⌉`, `J = 2^⌊k/2⌋` has per-axis error
/// `P_I = 2(1 − 1/I)·Q(√(6γ/(I² + J² − 2)))` and
/// `SER = 1 − (1 − P_I)(1 − P_J)`. This reduces to `Q(√(2γ))` for BPSK and
/// to `1 − (1 − 2(1 − 1/√M)Q(√(3γ/(M − 1))))²` for square constellations.
pub fn qam_ser(modulation: Modulation, gamma: f64) -> f64 {
    let k = modulation.bits_per_symbol();
    let i = (1u64 << k.div_ceil(2)) as f64;
    let j = (1u64 << (k / 2)) as f64;
    let denom = i * i + j * j - 2.0;
    let arg = (6.0 * gamma.max(0.0) / denom).sqrt();
    let q = q_function(arg);
    let p_i = 2.0 * (1.0 - 1.0 / i) * q;
    let p_j = 2.0 * (1.0 - 1.0 / j) * q;
    // 1 − (1 − p_i)(1 − p_j) without cancellation.
    (p_i + p_j - p_i * p_j).clamp(0.0, 1.0)
}

/// `α = 1 − (1 − SER(M, γ·10^{g(C)/10}))^b`.
pub fn packet_error_rate(modulation: Modulation, code: &CodeRate, gamma: f64, packet_symbols: u32) -> f64 {
    packet_error_rate_shifted(modulation, gamma * db_to_linear(code.gain_db), packet_symbols)
}

fn packet_error_rate_shifted(modulation: Modulation, gamma: f64, packet_symbols: u32) -> f64 {
    let ser = qam_ser(modulation, gamma);
    if ser >= 1.0 {
        return 1.0;
    }
    (-(packet_symbols as f64 * (-ser).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

/// Measured PER waterfall: `(gamma_db, per)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PerCurve {
    points: Vec<(f64, f64)>,
}

impl PerCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|&(g, p)| !g.is_finite() || !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid("PER curve values must be finite with PER in [0, 1]"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("PER curve SNRs must be strictly increasing"));
        }
        if points.windows(2).any(|w| w[1].1 > w[0].1) {
            return Err(Error::invalid("PER curve must be non-increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// CSV with header `gamma_db,per`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "gamma_db" || &headers[1] != "per" {
            return Err(Error::Parse { line: 1, message: "expected header 'gamma_db,per'".into() });
        }
        let mut points = Vec::new();
        for (idx, rec) in rdr.records().enumerate() {
            let line = idx + 2;
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse { line, message: format!("column {} is not a number", k + 1) })
            };
            points.push((parse(0)?, parse(1)?));
        }
        Self::new(points)
    }
}

/// Fits the coding gain `g` (dB) minimizing the squared log-PER distance
/// between the curve and the uncoded expression shifted by `g`, via golden
/// section on `[0, 15]` dB.
pub fn fit_coding_gain(curve: &PerCurve, modulation: Modulation, packet_symbols: u32) -> Result<f64> {
    let usable: Vec<(f64, f64)> = curve.points.iter().copied().filter(|&(_, p)| p > 0.0 && p < 1.0).collect();
    if usable.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points with 0 < PER < 1, got {}", usable.len())));
    }
    let hi = curve.points.iter().map(|p| p.1).fold(0.0, f64::max);
    let lo = curve.points.iter().map(|p| p.1).fold(1.0, f64::min);
    if hi < 0.9 || lo > 1e-3 {
        return Err(Error::Fit(format!("curve spans PER {lo:e}..{hi}; need 0.9 down to 1e-3")));
    }
    let loss = |g_db: f64| -> f64 {
        usable
            .iter()
            .map(|&(gamma_db, per)| {
                let model =
                    packet_error_rate_shifted(modulation, db_to_linear(gamma_db + g_db), packet_symbols).max(1e-300);
                (per.ln() - model.ln()).powi(2)
            })
            .sum()
    };
    Ok(golden_section_min(loss, 0.0, 15.0, 1e-7))
}

/// Mean number of transmissions `r = (1 − α^{L+1})/(1 − α)`, with the
/// degenerate flag set when `α >= 1` (returns the limit `L + 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmissions {
    pub mean: f64,
    pub degenerate: bool,
}

pub fn mean_retransmissions(alpha: f64, retx_limit: u32) -> Transmissions {
    if alpha >= 1.0 {
        return Transmissions { mean: retx_limit as f64 + 1.0, degenerate: true };
    }
    let a = alpha.clamp(0.0, ALPHA_CLAMP);
    let mean = (success_probability(a, retx_limit) / (1.0 - a)).clamp(1.0, retx_limit as f64 + 1.0);
    Transmissions { mean, degenerate: false }
}

/// Post-retransmission delivery probability `1 − α^{L+1}`.
pub fn success_probability(alpha: f64, retx_limit: u32) -> f64 {
    let a = alpha.clamp(0.0, 1.0);
    if a == 0.0 {
        return 1.0;
    }
    -((retx_limit as f64 + 1.0) * a.ln()).exp_m1()
}

/// PER of a packet multiplexed over all streams: `1 − Π(1 − α_i)^{1/S}`.
pub fn baseline_per(alphas: &[f64]) -> f64 {
    let Some(&first) = alphas.first() else {
        return 0.0;
    };
    if alphas.iter().all(|&a| a == first) {
        return first;
    }
    if alphas.iter().any(|&a| a >= 1.0) {
        return 1.0;
    }
    let s = alphas.len() as f64;
    let log_success: f64 = alphas.iter().map(|&a| (-a).ln_1p()).sum();
    (-(log_success / s).exp_m1()).clamp(0.0, 1.0)
}

/// Link parameters shared by every stream in a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub modulations: Vec<Modulation>,
    pub code_rates: Vec<CodeRate>,
    pub retx_limit: u32,
    /// Symbols per packet used in the PER model.
    pub packet_symbols: u32,
    pub bandwidth_hz: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            modulations: default_modulations(),
            code_rates: default_code_rates(),
            retx_limit: 4,
            packet_symbols: 100,
            bandwidth_hz: 1e6,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modulations.is_empty() || self.code_rates.is_empty() {
            return Err(Error::invalid("modulation and code-rate sets must be non-empty"));
        }
        if self.packet_symbols == 0 {
            return Err(Error::invalid("packet_symbols must be >= 1"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        Ok(())
    }

    /// Sorted copy so that ascending iteration implements lowest-wins ties.
    pub fn normalized(&self) -> LinkConfig {
        let mut out = self.clone();
        out.modulations.sort();
        out.modulations.dedup();
        out.code_rates.sort_by(|a, b| a.value().total_cmp(&b.value()));
        out
    }

    pub fn link(&self, gamma: f64, modulation: Modulation, code: CodeRate) -> StreamLink {
        StreamLink::new(gamma, modulation, code, self.packet_symbols, self.retx_limit, self.bandwidth_hz)
    }
}

/// State of one spatial stream under a chosen MCS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamLink {
    /// Post-processing SNR, linear.
    pub gamma: f64,
    pub modulation: Modulation,
    pub code: CodeRate,
    /// Packet error rate per transmission attempt.
    pub alpha: f64,
    pub retx_limit: u32,
    /// Mean transmissions per packet.
    pub r: f64,
    pub p_success: f64,
    /// `B·log2(M)`, bits/s.
    pub rate: f64,
}

impl StreamLink {
    pub fn new(
        gamma: f64,
        modulation: Modulation,
        code: CodeRate,
        packet_symbols: u32,
        retx_limit: u32,
        bandwidth_hz: f64,
    ) -> Self {
        let alpha = packet_error_rate(modulation, &code, gamma, packet_symbols);
        Self::from_alpha(gamma, modulation, code, alpha, retx_limit, bandwidth_hz)
    }

    pub fn from_alpha(
        gamma: f64,
        modulation: Modulation,
        code: CodeRate,
        alpha: f64,
        retx_limit: u32,
        bandwidth_hz: f64,
    ) -> Self {
        let alpha = alpha.clamp(0.0, ALPHA_CLAMP);
        Self {
            gamma,
            modulation,
            code,
            alpha,
            retx_limit,
            r: mean_retransmissions(alpha, retx_limit).mean,
            p_success: success_probability(alpha, retx_limit),
            rate: modulation.rate(bandwidth_hz),
        }
    }

    /// Post-retransmission rate `R/r` (before the code-rate factor).
    pub fn goodput(&self) -> f64 {
        self.rate / self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rate(g: f64) -> CodeRate {
        CodeRate::new(1, 2, g).unwrap()
    }

    #[test]
    fn modulation_validation() {
        assert!(Modulation::new(3).is_err());
        assert!(Modulation::new(1).is_err());
        assert_eq!(Modulation::new(64).unwrap().bits_per_symbol(), 6);
        assert_eq!(Modulation::QAM16.rate(1e6), 4e6);
    }

    #[test]
    fn bpsk_at_zero_db() {
        // Q(√2) by numerical integration of the Gaussian tail.
        let tail = crate::math::adaptive_simpson(&crate::math::normal_pdf, 2f64.sqrt(), 40.0, 1e-14);
        assert!((tail - 0.078_649_603_525_142_7).abs() < 1e-12);
        assert!((qam_ser(Modulation::BPSK, 1.0) - tail).abs() < 1e-12);
    }

    #[test]
    fn ser_vanishes_at_high_snr() {
        for m in default_modulations() {
            assert!(qam_ser(m, 1e6) < 1e-300 || qam_ser(m, 1e6) == 0.0);
            assert_eq!(qam_ser(m, f64::INFINITY), 0.0);
        }
    }

    #[test]
    fn ser_monotone_in_snr_and_order() {
        let orders: Vec<Modulation> = [2, 4, 8, 16, 32, 64, 256].iter().map(|&m| Modulation::new(m).unwrap()).collect();
        for db in (-10..=30).map(|d| d as f64) {
            let g = db_to_linear(db);
            let sers: Vec<f64> = orders.iter().map(|&m| qam_ser(m, g)).collect();
            assert!(sers.windows(2).all(|w| w[1] > w[0] || w[1] == 0.0), "{db} dB: {sers:?}");
            for &m in &orders {
                let ser = qam_ser(m, g);
                assert!(qam_ser(m, g * 1.01) < ser || ser == 0.0);
                assert!((0.0..=1.0).contains(&qam_ser(m, g)));
            }
        }
    }

    #[test]
    fn qpsk_matches_symbol_monte_carlo() {
        use rand_distr::{Distribution, StandardNormal};
        let gamma = 10.0;
        let ser = qam_ser(Modulation::QAM4, gamma);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000;
        // Unit-energy QPSK: each axis at ±1/√2, noise variance 1/(2γ) per axis.
        let sigma = (1.0 / (2.0 * gamma)).sqrt();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let mut errors = 0u64;
        for _ in 0..n {
            let ni: f64 = StandardNormal.sample(&mut rng);
            let nq: f64 = StandardNormal.sample(&mut rng);
            if a + sigma * ni < 0.0 || a + sigma * nq < 0.0 {
                errors += 1;
            }
        }
        let est = errors as f64 / n as f64;
        let se = (ser * (1.0 - ser) / n as f64).sqrt();
        assert!((est - ser).abs() < 3.0 * se, "mc {est} vs {ser} (se {se})");
    }

    #[test]
    fn per_edge_cases() {
        assert_eq!(packet_error_rate(Modulation::QAM4, &rate(0.0), f64::INFINITY, 100), 0.0);
        let g = 2.0;
        let single = packet_error_rate(Modulation::QAM16, &rate(3.0), g, 1);
        assert!((single - qam_ser(Modulation::QAM16, g * db_to_linear(3.0))).abs() < 1e-15);
    }

    #[test]
    fn per_composition_of_100_symbols() {
        let alpha = -(100.0 * (-0.01f64).ln_1p()).exp_m1();
        assert!((alpha - (1.0 - 0.99f64.powi(100))).abs() < 1e-14);
        assert!((alpha - 0.633_967_658_726_77).abs() < 1e-12);
    }

    #[test]
    fn per_monotone_in_snr_and_size() {
        let code = rate(2.0);
        for m in default_modulations() {
            let mut prev = 1.0;
            for k in 0..400 {
                let g = db_to_linear(-5.0 + 0.1 * k as f64);
                let a = packet_error_rate(m, &code, g, 50);
                assert!(a <= prev + 1e-15);
                assert!(packet_error_rate(m, &code, g, 51) >= a);
                prev = a;
            }
        }
    }

    fn shifted_curve(m: Modulation, b: u32, shift_db: f64, offset_db: f64) -> PerCurve {
        let mut pts = Vec::new();
        for k in 0..240 {
            let gdb = offset_db - 15.0 + 0.25 * k as f64;
            let per = packet_error_rate_shifted(m, db_to_linear(gdb + shift_db), b);
            if per < 1e-6 {
                break;
            }
            pts.push((gdb, per));
        }
        PerCurve::new(pts).unwrap()
    }

    #[test]
    fn fit_recovers_exact_shift() {
        let curve = shifted_curve(Modulation::QAM4, 100, 3.0, 0.0);
        let g = fit_coding_gain(&curve, Modulation::QAM4, 100).unwrap();
        assert!((g - 3.0).abs() < 0.01, "{g}");
    }

    #[test]
    fn fit_is_grid_offset_invariant() {
        let a = fit_coding_gain(&shifted_curve(Modulation::QAM16, 80, 4.5, 0.0), Modulation::QAM16, 80).unwrap();
        let b = fit_coding_gain(&shifted_curve(Modulation::QAM16, 80, 4.5, 0.1), Modulation::QAM16, 80).unwrap();
        assert!((a - b).abs() < 0.01);
    }

    #[test]
    fn fit_tolerates_multiplicative_noise() {
        let clean = shifted_curve(Modulation::QAM4, 100, 6.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut noisy: Vec<(f64, f64)> =
            clean.points().iter().map(|&(g, p)| (g, (p * (1.0 + rng.gen_range(-0.05..0.05))).min(1.0))).collect();
        // Restore monotonicity after noise.
        for i in 1..noisy.len() {
            noisy[i].1 = noisy[i].1.min(noisy[i - 1].1);
        }
        let g = fit_coding_gain(&PerCurve::new(noisy).unwrap(), Modulation::QAM4, 100).unwrap();
        assert!((g - 6.0).abs() < 0.2, "{g}");
    }

    #[test]
    fn fit_rejects_degenerate_curve() {
        let curve = PerCurve::new(vec![(0.0, 0.5), (1.0, 0.4)]).unwrap();
        assert!(matches!(fit_coding_gain(&curve, Modulation::BPSK, 10), Err(Error::Fit(_))));
    }

    #[test]
    fn per_curve_validation_and_csv() {
        assert!(PerCurve::new(vec![(1.0, 0.5), (0.0, 0.4)]).is_err());
        assert!(PerCurve::new(vec![(0.0, 0.4), (1.0, 0.5)]).is_err());
        let csv = "gamma_db,per\n0,0.9\n1,0.5\n2,0.01\n";
        assert_eq!(PerCurve::from_csv(csv.as_bytes()).unwrap().points().len(), 3);
        let bad = "gamma_db,per\n0,0.9\n1,x\n";
        match PerCurve::from_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn retransmission_reference_values() {
        assert_eq!(mean_retransmissions(0.0, 4).mean, 1.0);
        assert!((mean_retransmissions(0.5, 4).mean - 1.9375).abs() < 1e-15);
        assert_eq!(mean_retransmissions(0.9, 0).mean, 1.0);
        let deg = mean_retransmissions(1.0, 4);
        assert!(deg.degenerate && deg.mean == 5.0);
    }

    #[test]
    fn retransmissions_match_direct_sum() {
        for ai in 0..100 {
            let alpha = ai as f64 / 100.0;
            for l in 0..12u32 {
                let direct: f64 = (1..=l + 1).map(|k| k as f64 * (1.0 - alpha) * alpha.powi(k as i32 - 1)).sum::<f64>()
                    + (l as f64 + 1.0) * alpha.powi(l as i32 + 1);
                let r = mean_retransmissions(alpha, l).mean;
                assert!((r - direct).abs() < 1e-12, "alpha {alpha} L {l}");
                assert!((1.0..=l as f64 + 1.0).contains(&r));
                let p = success_probability(alpha, l);
                assert!(((1.0 - alpha) * r - p).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn success_probability_reference_values() {
        assert_eq!(success_probability(0.0, 3), 1.0);
        assert!((success_probability(0.5, 4) - 0.96875).abs() < 1e-15);
        assert_eq!(success_probability(1.0, 4), 0.0);
    }

    #[test]
    fn success_probability_matches_bernoulli_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 200_000;
        let delivered = (0..n).filter(|_| (0..5).any(|_| rng.gen::<f64>() >= 0.5)).count();
        let est = delivered as f64 / n as f64;
        let se = (0.96875f64 * 0.03125 / n as f64).sqrt();
        assert!((est - 0.96875).abs() < 4.0 * se);
    }

    #[test]
    fn baseline_per_reference_values() {
        assert_eq!(baseline_per(&[0.3, 0.3, 0.3]), 0.3);
        assert!((baseline_per(&[0.2, 0.4]) - (1.0 - (0.8f64 * 0.6).sqrt())).abs() < 1e-15);
        assert!((baseline_per(&[0.2, 0.4]) - 0.307_179_676_972_449).abs() < 1e-12);
        assert_eq!(baseline_per(&[0.2, 1.0]), 1.0);
    }

    #[test]
    fn code_rate_table_round_trip() {
        let json = code_rates_to_json(&default_code_rates()).unwrap();
        let back = code_rates_from_json(&json).unwrap();
        assert_eq!(back, default_code_rates());
        assert!(CodeRate::parse_fraction("3/2").is_err());
    }
}
