//! Sweep specifications: a slope, an energy and a set of `h` values.

use std::collections::BTreeSet;

use kronecker_core::Slope;
use serde::{Deserialize, Deserializer};

use crate::CliError;

/// A column a sweep can compute. Unrequested columns are left empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Output {
    ExactCount,
    Weyl,
    AsymClosedForm,
    Residual,
}

impl Output {
    pub const ALL: [Output; 4] = [Output::ExactCount, Output::Weyl, Output::AsymClosedForm, Output::Residual];
}

fn all_outputs() -> BTreeSet<Output> {
    Output::ALL.into_iter().collect()
}

/// Explicit `h` values or a geometric grid from `h_start` down to `h_end`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum HValues {
    Explicit(Vec<f64>),
    Geometric { h_start: f64, h_end: f64, points: usize },
}

impl HValues {
    /// The `h` values, validated to lie in `(0, 1]`.
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let values = match *self {
            HValues::Explicit(ref hs) => hs.clone(),
            HValues::Geometric { h_start, h_end, points } => geometric_grid(h_start, h_end, points)?,
        };
        if values.is_empty() {
            return Err(CliError::usage("the h grid is empty"));
        }
        if let Some(bad) = values.iter().find(|&&h| !(h > 0.0 && h <= 1.0)) {
            return Err(CliError::usage(format!("h = {bad} is outside (0, 1]")));
        }
        Ok(values)
    }
}

/// `points` values from `start` to `end` with a constant ratio. The grid is
/// strictly decreasing, so `start > end` unless `points == 1`.
pub fn geometric_grid(start: f64, end: f64, points: usize) -> Result<Vec<f64>, CliError> {
    match points {
        0 => Ok(Vec::new()),
        1 => Ok(vec![start]),
        _ => {
            if !(start > end && end > 0.0) {
                return Err(CliError::usage(format!(
                    "a geometric grid needs h_start > h_end > 0, got {start} and {end}"
                )));
            }
            let ratio = (end / start).ln() / (points - 1) as f64;
            let mut grid: Vec<f64> = (0..points).map(|i| start * (ratio * i as f64).exp()).collect();
            grid[points - 1] = end;
            Ok(grid)
        }
    }
}

/// Everything a sweep needs. Deserializes from the JSON accepted by
/// `sweep --config`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(deserialize_with = "slope_from_text_or_object")]
    pub slope: Slope,
    pub lambda: f64,
    pub h_values: HValues,
    #[serde(default)]
    pub tie_tolerance: f64,
    #[serde(default = "all_outputs")]
    pub outputs: BTreeSet<Output>,
}

/// Accepts `"1/2"`, `"golden"` or the library's object form.
fn slope_from_text_or_object<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Slope, D::Error> {
    use serde::de::Error as _;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Text(String),
        Object(serde_json::Value),
    }

    match Either::deserialize(deserializer)? {
        Either::Text(text) => text.parse().map_err(D::Error::custom),
        Either::Object(value) => Slope::deserialize(value).map_err(D::Error::custom),
    }
}
