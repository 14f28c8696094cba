//! Logistic loss-visibility model over per-slice feature vectors.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(v: f64) -> f64 {
    (v / (1.0 - v)).ln()
}

/// `logit(v) = β0 + Σ βᵢ xᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmModel {
    intercept: f64,
    names: Vec<String>,
    coefficients: Vec<f64>,
}

impl GlmModel {
    pub fn new(intercept: f64, names: Vec<String>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("a visibility model needs at least one feature"));
        }
        if names.len() != coefficients.len() {
            return Err(Error::Dimension(format!(
                "{} feature names for {} coefficients",
                names.len(),
                coefficients.len()
            )));
        }
        if !intercept.is_finite() || coefficients.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("model coefficients must be finite"));
        }
        Ok(Self { intercept, names, coefficients })
    }

    /// Illustrative model for demos and synthetic traces.
    ///
    /// The coefficients are made up to give a plausible spread of scores;
    /// they are not fitted to any viewer study.
    pub fn synthetic_default() -> Self {
        let names = ["motion", "residual_energy", "multi_frame", "initial_ssim", "max_imse", "scene_cut"];
        Self {
            intercept: -1.5,
            names: names.iter().map(|s| s.to_string()).collect(),
            coefficients: vec![0.8, 0.5, 1.4, -1.2, 0.6, 1.0],
        }
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn num_features(&self) -> usize {
        self.coefficients.len()
    }

    pub fn linear_predictor(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.coefficients.len() {
            return Err(Error::Dimension(format!(
                "expected {} features, got {}",
                self.coefficients.len(),
                features.len()
            )));
        }
        Ok(self.intercept + self.coefficients.iter().zip(features).map(|(b, x)| b * x).sum::<f64>())
    }

    /// `{"intercept": β0, "coefficients": {"name": βᵢ, ...}}`, order preserved.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let intercept = value
            .get("intercept")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::invalid("model JSON lacks a numeric 'intercept'"))?;
        let coeffs = value
            .get("coefficients")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::invalid("model JSON lacks a 'coefficients' object"))?;
        let mut names = Vec::with_capacity(coeffs.len());
        let mut betas = Vec::with_capacity(coeffs.len());
        for (name, beta) in coeffs {
            names.push(name.clone());
            betas.push(beta.as_f64().ok_or_else(|| Error::invalid(format!("coefficient '{name}' is not a number")))?);
        }
        Self::new(intercept, names, betas)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut coeffs = Map::new();
        for (name, beta) in self.names.iter().zip(&self.coefficients) {
            coeffs.insert(name.clone(), Value::from(*beta));
        }
        let mut root = Map::new();
        root.insert("intercept".into(), Value::from(self.intercept));
        root.insert("coefficients".into(), Value::Object(coeffs));
        Ok(serde_json::to_string_pretty(&Value::Object(root))?)
    }
}

impl Serialize for GlmModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let value: Value = serde_json::from_str(&self.to_json().map_err(serde::ser::Error::custom)?)
            .map_err(serde::ser::Error::custom)?;
        value.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GlmModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        GlmModel::from_json(&value.to_string()).map_err(serde::de::Error::custom)
    }
}

/// Visibility of a single slice.
pub fn estimate_visibility(features: &[f64], model: &GlmModel) -> Result<f64> {
    Ok(logistic(model.linear_predictor(features)?))
}

/// A packet carrying several slices scores the mean of its slice values.
pub fn packet_visibility(slices: &[Vec<f64>], model: &GlmModel) -> Result<f64> {
    if slices.is_empty() {
        return Err(Error::invalid("a packet needs at least one slice"));
    }
    let total: f64 = slices.iter().map(|x| estimate_visibility(x, model)).sum::<Result<f64>>()?;
    Ok(total / slices.len() as f64)
}

/// Uniform `bits`-bit code for a visibility in `[0, 1]`.
pub fn quantize(v: f64, bits: u32) -> u32 {
    let levels = (1u64 << bits) - 1;
    (v.clamp(0.0, 1.0) * levels as f64).round() as u32
}

pub fn dequantize(code: u32, bits: u32) -> f64 {
    let levels = (1u64 << bits) - 1;
    (code as f64 / levels as f64).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_model(intercept: f64, f: usize) -> GlmModel {
        GlmModel::new(intercept, (0..f).map(|i| format!("x{i}")).collect(), vec![0.7; f]).unwrap()
    }

    #[test]
    fn logit_zero_is_half() {
        assert_eq!(estimate_visibility(&[0.0, 0.0], &zero_model(0.0, 2)).unwrap(), 0.5);
    }

    #[test]
    fn intercept_ln3_gives_three_quarters() {
        let v = estimate_visibility(&[0.0], &zero_model(3f64.ln(), 1)).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn logit_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let f = rng.gen_range(1..6);
            let betas: Vec<f64> = (0..f).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let x: Vec<f64> = (0..f).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let model =
                GlmModel::new(rng.gen_range(-1.0..1.0), (0..f).map(|i| i.to_string()).collect(), betas).unwrap();
            let eta = model.linear_predictor(&x).unwrap();
            let v = estimate_visibility(&x, &model).unwrap();
            assert!((logit(v) - eta).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_in_positive_coefficient() {
        let model = GlmModel::synthetic_default();
        let base = vec![0.1; model.num_features()];
        let v0 = estimate_visibility(&base, &model).unwrap();
        let mut up = base.clone();
        up[0] += 0.5;
        assert!(estimate_visibility(&up, &model).unwrap() > v0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(matches!(estimate_visibility(&[1.0], &zero_model(0.0, 2)), Err(Error::Dimension(_))));
    }

    #[test]
    fn slices_average() {
        let model = zero_model(0.0, 1);
        let a = estimate_visibility(&[1.0], &model).unwrap();
        let b = estimate_visibility(&[-2.0], &model).unwrap();
        let v = packet_visibility(&[vec![1.0], vec![-2.0]], &model).unwrap();
        assert!((v - 0.5 * (a + b)).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_preserves_order() {
        let model = GlmModel::synthetic_default();
        let back = GlmModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
        let m = GlmModel::from_json(r#"{"intercept": 0.5, "coefficients": {"z": 1.0, "a": -1.0}}"#).unwrap();
        assert_eq!(m.feature_names(), ["z", "a"]);
    }

    #[test]
    fn quantizer_bounds() {
        assert_eq!(quantize(0.0, 4), 0);
        assert_eq!(quantize(1.0, 4), 15);
        for k in 0..=100 {
            let v = k as f64 / 100.0;
            assert!((dequantize(quantize(v, 4), 4) - v).abs() <= 0.5 / 15.0 + 1e-15);
        }
    }
}
