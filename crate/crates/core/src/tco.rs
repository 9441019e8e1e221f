//! Total cost of ownership: purchase net of incentives, plus discounted
//! annual running costs, minus the discounted resale value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Powertrain {
    #[serde(rename = "EV")]
    Ev,
    #[serde(rename = "ICEV")]
    Icev,
    #[serde(rename = "HEV")]
    Hev,
}

impl std::fmt::Display for Powertrain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Powertrain::Ev => "EV",
            Powertrain::Icev => "ICEV",
            Powertrain::Hev => "HEV",
        })
    }
}

impl std::str::FromStr for Powertrain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "EV" => Ok(Powertrain::Ev),
            "ICEV" => Ok(Powertrain::Icev),
            "HEV" => Ok(Powertrain::Hev),
            other => Err(format!("unknown powertrain `{other}`")),
        }
    }
}

/// One vehicle model. Monetary fields share one currency unit; energy is
/// kWh for EVs and litres otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSpec {
    pub label: String,
    pub segment: String,
    pub powertrain: Powertrain,
    pub purchase_price: f64,
    #[serde(default)]
    pub incentives: f64,
    /// km per year
    pub annual_distance: f64,
    /// energy units per km
    pub energy_consumption: f64,
    /// currency per energy unit
    pub energy_price: f64,
    pub annual_maintenance: f64,
    pub annual_insurance_and_taxes: f64,
    /// years
    pub holding_period: u32,
    pub discount_rate: f64,
    pub resale_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TcoError {
    #[error("vehicle `{label}`: {reason}")]
    InvalidSpec { label: String, reason: String },
    #[error("no vehicles in segment `{segment}` with powertrain {powertrain}")]
    NoMatchingVehicles {
        segment: String,
        powertrain: Powertrain,
    },
}

impl VehicleSpec {
    pub fn validate(&self) -> Result<(), TcoError> {
        let invalid = |reason: String| TcoError::InvalidSpec {
            label: self.label.clone(),
            reason,
        };
        let non_negative = [
            ("purchase_price", self.purchase_price),
            ("incentives", self.incentives),
            ("annual_distance", self.annual_distance),
            ("energy_consumption", self.energy_consumption),
            ("energy_price", self.energy_price),
            ("annual_maintenance", self.annual_maintenance),
            (
                "annual_insurance_and_taxes",
                self.annual_insurance_and_taxes,
            ),
        ];
        for (field, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(invalid(format!(
                    "{field} must be finite and non-negative, got {value}"
                )));
            }
        }
        if self.holding_period < 1 {
            return Err(invalid("holding_period must be at least one year".into()));
        }
        if !(0.0..=1.0).contains(&self.resale_fraction) {
            return Err(invalid(format!(
                "resale_fraction must lie in [0, 1], got {}",
                self.resale_fraction
            )));
        }
        if !(0.0..1.0).contains(&self.discount_rate) {
            return Err(invalid(format!(
                "discount_rate must lie in [0, 1), got {}",
                self.discount_rate
            )));
        }
        Ok(())
    }

    /// Energy, maintenance, insurance and taxes for one year.
    pub fn annual_operating_cost(&self) -> f64 {
        self.annual_distance * self.energy_consumption * self.energy_price
            + self.annual_maintenance
            + self.annual_insurance_and_taxes
    }
}

pub fn tco(spec: &VehicleSpec) -> Result<f64, TcoError> {
    spec.validate()?;
    let growth = 1.0 + spec.discount_rate;
    let annual = spec.annual_operating_cost();
    let running: f64 = (1..=spec.holding_period)
        .map(|t| annual / growth.powi(t as i32))
        .sum();
    let resale =
        spec.resale_fraction * spec.purchase_price / growth.powi(spec.holding_period as i32);
    Ok(spec.purchase_price - spec.incentives + running - resale)
}

pub fn segment_average_tco(
    specs: &[VehicleSpec],
    segment: &str,
    powertrain: Powertrain,
) -> Result<f64, TcoError> {
    let costs = specs
        .iter()
        .filter(|s| s.segment == segment && s.powertrain == powertrain)
        .map(tco)
        .collect::<Result<Vec<_>, _>>()?;
    if costs.is_empty() {
        return Err(TcoError::NoMatchingVehicles {
            segment: segment.to_string(),
            powertrain,
        });
    }
    Ok(costs.iter().sum::<f64>() / costs.len() as f64)
}

/// Average TCO for one segment and powertrain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTco {
    pub segment: String,
    pub powertrain: Powertrain,
    pub vehicles: usize,
    pub average_tco: f64,
}

/// Averages for every (segment, powertrain) pair present in the fleet, in
/// order of first appearance.
pub fn segment_averages(specs: &[VehicleSpec]) -> Result<Vec<SegmentTco>, TcoError> {
    let mut keys: Vec<(String, Powertrain)> = Vec::new();
    for s in specs {
        let key = (s.segment.clone(), s.powertrain);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(segment, powertrain)| {
            let average_tco = segment_average_tco(specs, &segment, powertrain)?;
            let vehicles = specs
                .iter()
                .filter(|s| s.segment == segment && s.powertrain == powertrain)
                .count();
            Ok(SegmentTco {
                segment,
                powertrain,
                vehicles,
                average_tco,
            })
        })
        .collect()
}
