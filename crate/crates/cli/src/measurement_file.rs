//! Versioned TOML representation of a rank-one POVM.
//!
//! ```toml
//! version = 1
//!
//! [[elements]]
//! weight = 1.0
//! amplitudes = [re00, im00, re01, im01, re10, im10, re11, im11]
//!
//! [[elements]]
//! weight = 1.0
//! first = { theta = 1.5707963267948966, phi = 0.0 }
//! second = { theta = 0.0, phi = 0.0 }
//! ```
//!
//! Amplitudes are listed in the basis order `|zz>, |z-z>, |-zz>, |-z-z>`,
//! real part first. Angles are radians.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use spinpair::num_complex::Complex;
use spinpair::{Povm, PovmElement, PovmF64, ProductElement, SphericalDirection, TwoQubitState};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;
/// Norm errors up to this are accepted untouched.
pub const NORM_SILENT_TOL: f64 = 1e-9;
/// Norm errors up to this are renormalized with a warning; beyond it the record is rejected.
pub const NORM_REJECT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub version: u32,
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRecord {
    Amplitudes(AmplitudeRecord),
    Product(ProductRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeRecord {
    pub weight: f64,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductRecord {
    pub weight: f64,
    pub first: Angles,
    pub second: Angles,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

/// A POVM read from disk plus any non-fatal notes produced while loading.
#[derive(Debug, Clone)]
pub struct LoadedMeasurement {
    pub povm: PovmF64,
    pub warnings: Vec<String>,
}

impl MeasurementFile {
    /// Amplitude records for every element, preserving each value exactly.
    pub fn from_povm(povm: &PovmF64) -> Self {
        let elements = povm
            .elements()
            .iter()
            .map(|e| {
                let amplitudes = e.state().amplitudes().iter().flat_map(|z| [z.re, z.im]).collect();
                ElementRecord::Amplitudes(AmplitudeRecord {
                    weight: e.weight(),
                    amplitudes,
                })
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            elements,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("measurement file serializes")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Invalid(format!("cannot parse measurement file: {e}")))
    }

    /// Validates every record and builds the POVM. Completeness is not checked here.
    pub fn into_povm(self) -> Result<LoadedMeasurement, CliError> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported measurement file version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        let mut warnings = Vec::new();
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, rec) in self.elements.into_iter().enumerate() {
            elements.push(element_from_record(i, rec, &mut warnings)?);
        }
        let povm = Povm::new(elements).map_err(CliError::invalid)?;
        Ok(LoadedMeasurement { povm, warnings })
    }
}

fn check_weight(i: usize, w: f64) -> Result<(), CliError> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!(
            "element {i}: weight must be positive and finite, got {w}"
        )))
    }
}

fn element_from_record(i: usize, rec: ElementRecord, warnings: &mut Vec<String>) -> Result<PovmElement<f64>, CliError> {
    match rec {
        ElementRecord::Amplitudes(r) => {
            check_weight(i, r.weight)?;
            if r.amplitudes.len() != 8 {
                return Err(CliError::Invalid(format!(
                    "element {i}: expected 8 amplitude reals, got {}",
                    r.amplitudes.len()
                )));
            }
            if r.amplitudes.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Invalid(format!("element {i}: amplitudes must be finite")));
            }
            let amps: [Complex<f64>; 4] =
                std::array::from_fn(|k| Complex::new(r.amplitudes[2 * k], r.amplitudes[2 * k + 1]));
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let err = (norm - 1.0).abs();
            let state = if err <= NORM_SILENT_TOL {
                TwoQubitState::from_normalized(amps, NORM_SILENT_TOL)
            } else if err <= NORM_REJECT_TOL {
                warnings.push(format!("element {i}: norm {norm} renormalized"));
                TwoQubitState::new(amps)
            } else {
                return Err(CliError::Invalid(format!(
                    "element {i}: amplitude norm {norm} deviates from 1 by more than {NORM_REJECT_TOL}"
                )));
            }
            .map_err(|e| CliError::Invalid(format!("element {i}: {e}")))?;
            PovmElement::new(r.weight, state).map_err(|e| CliError::Invalid(format!("element {i}: {e}")))
        }
        ElementRecord::Product(r) => {
            check_weight(i, r.weight)?;
            let dir = |a: Angles| {
                SphericalDirection::new(a.theta, a.phi).map_err(|e| CliError::Invalid(format!("element {i}: {e}")))
            };
            let p = ProductElement::new(r.weight, dir(r.first)?, dir(r.second)?)
                .map_err(|e| CliError::Invalid(format!("element {i}: {e}")))?;
            Ok(p.to_povm_element())
        }
    }
}

pub fn load(path: &Path) -> Result<LoadedMeasurement, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    MeasurementFile::parse(&text)?.into_povm()
}

pub fn save(povm: &PovmF64, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, MeasurementFile::from_povm(povm).to_toml()).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}
