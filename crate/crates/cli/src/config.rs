//! Run configuration: the JSON config file schema and the inline argument
//! parsers shared by the subcommands.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use qkd_rotsym::{ChannelSpec, LambdaMode, ProtocolParams, SiftingMode};

/// Angle in radians, or one of the landmark tokens pi/2, pi/4, pi/8, pi/3.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    use std::f64::consts::PI;
    match text.trim() {
        "pi/2" => Ok(PI / 2.0),
        "pi/4" => Ok(PI / 4.0),
        "pi/8" => Ok(PI / 8.0),
        "pi/3" => Ok(PI / 3.0),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("'{other}' is neither a number nor one of pi/2, pi/4, pi/8, pi/3")),
    }
}

/// Theta as stored in config files: a number (radians) or a pi-token.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaField(pub f64);

impl Serialize for ThetaField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for ThetaField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Radians(f64),
            Token(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Radians(v) => Ok(ThetaField(v)),
            Raw::Token(t) => parse_angle(&t).map(ThetaField).map_err(D::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSection {
    #[serde(rename = "M")]
    pub basis_pairs: u32,
    pub theta: ThetaField,
    #[serde(default)]
    pub sifting_mode: SiftingMode,
}

impl ProtocolSection {
    pub fn build(&self) -> Result<ProtocolParams, String> {
        ProtocolParams::new(self.basis_pairs, self.theta.0, self.sifting_mode)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSection {
    pub n: u64,
    pub seed: u64,
    #[serde(default)]
    pub test_fraction: f64,
}

/// The config file: protocol point, channel, optional simulation block and
/// the lambda accounting mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfigFile {
    pub protocol: ProtocolSection,
    pub channel: ChannelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub lambda_mode: LambdaMode,
}

impl RunConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

/// Inline channel syntax: `identity`, `depolarizing:0.1`,
/// `pauli:0.9,0.05,0.03,0.02`, `unitary_rotation:pi/8`,
/// `amplitude_damping:0.2`.
pub fn parse_channel(text: &str) -> Result<ChannelSpec, String> {
    let (family, param) = match text.split_once(':') {
        Some((f, p)) => (f.trim(), Some(p.trim())),
        None => (text.trim(), None),
    };
    let need = |what: &str| format!("channel '{family}' needs a parameter: {family}:{what}");
    match family {
        "identity" => Ok(ChannelSpec::Identity),
        "depolarizing" => {
            let p = param.ok_or_else(|| need("p"))?;
            Ok(ChannelSpec::Depolarizing {
                p: p.parse().map_err(|_| format!("bad probability '{p}'"))?,
            })
        }
        "pauli" => {
            let list = param.ok_or_else(|| need("p_i,p_x,p_y,p_z"))?;
            let parts: Vec<f64> = list
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad weight '{s}'")))
                .collect::<Result<_, _>>()?;
            if parts.len() != 4 {
                return Err(format!("pauli needs 4 weights, got {}", parts.len()));
            }
            Ok(ChannelSpec::Pauli {
                p_i: parts[0],
                p_x: parts[1],
                p_y: parts[2],
                p_z: parts[3],
            })
        }
        "unitary_rotation" => {
            let beta = param.ok_or_else(|| need("beta"))?;
            Ok(ChannelSpec::UnitaryRotation {
                beta: parse_angle(beta)?,
            })
        }
        "amplitude_damping" => {
            let gamma = param.ok_or_else(|| need("gamma"))?;
            Ok(ChannelSpec::AmplitudeDamping {
                gamma: gamma.parse().map_err(|_| format!("bad probability '{gamma}'"))?,
            })
        }
        other => Err(format!(
            "unknown channel '{other}' (expected identity, depolarizing, pauli, \
             unitary_rotation or amplitude_damping; custom Kraus sets go in a config file)"
        )),
    }
}

/// Grid syntax: a single value, or `lo:hi:step` (inclusive upper bound).
/// `lo` and `hi` accept pi-tokens when `angles` is set.
pub fn parse_grid(text: &str, angles: bool) -> Result<Vec<f64>, String> {
    let number = |s: &str| -> Result<f64, String> {
        if angles {
            parse_angle(s)
        } else {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number '{s}'"))
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![number(single)?]),
        [lo, hi, step] => {
            let lo = number(lo)?;
            let hi = number(hi)?;
            let step = step
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("bad step '{step}'"))?;
            if step <= 0.0 {
                return Err(format!("grid step must be positive, got {step}"));
            }
            let mut values = Vec::new();
            let mut i = 0u64;
            loop {
                let v = lo + i as f64 * step;
                if v > hi + step * 1e-9 {
                    break;
                }
                values.push(v);
                i += 1;
            }
            if values.is_empty() {
                return Err(format!("grid '{text}' is empty"));
            }
            Ok(values)
        }
        _ => Err(format!("grid '{text}' is neither a value nor lo:hi:step")),
    }
}
