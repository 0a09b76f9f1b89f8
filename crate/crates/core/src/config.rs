//! Key validation for unit-suffixed JSON objects.
//!
//! Keys carry their unit as a suffix (`ell_A_m`, `OmegaA_rad_s`). A key whose
//! stem matches a known key but whose suffix differs (`ell_A_nm`) is reported
//! as a unit mismatch rather than as an unknown key.

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// A recognised key: its stem and the unit suffix it must carry (empty for unitless keys).
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub stem: &'static str,
    pub unit: &'static str,
}

impl KeySpec {
    pub const fn new(stem: &'static str, unit: &'static str) -> Self {
        Self { stem, unit }
    }

    pub fn key(&self) -> String {
        if self.unit.is_empty() {
            self.stem.to_string()
        } else {
            format!("{}_{}", self.stem, self.unit)
        }
    }
}

/// Reject keys not in `known`, distinguishing unit-suffix mismatches.
pub fn check_keys(obj: &Map<String, Value>, known: &[KeySpec], context: &str) -> Result<()> {
    for key in obj.keys() {
        if known.iter().any(|k| k.key() == *key) {
            continue;
        }
        let stem_match = known
            .iter()
            .filter(|k| !k.unit.is_empty())
            .find(|k| key.starts_with(&format!("{}_", k.stem)));
        return Err(match stem_match {
            Some(k) => Error::InvalidParameter {
                name: "unit",
                reason: format!(
                    "{context}: key `{key}` has unit suffix `{}`, expected `{}`",
                    &key[k.stem.len() + 1..],
                    k.key()
                ),
            },
            None => Error::InvalidParameter {
                name: "key",
                reason: format!("{context}: unknown key `{key}`"),
            },
        });
    }
    Ok(())
}

pub fn get_f64(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n
            .as_f64()
            .map(Some)
            .ok_or_else(|| type_error(key, "a number")),
        Some(_) => Err(type_error(key, "a number")),
    }
}

pub fn get_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(type_error(key, "a string")),
    }
}

pub fn as_object<'a>(value: &'a Value, context: &str) -> Result<&'a Map<String, Value>> {
    value.as_object().ok_or_else(|| Error::InvalidParameter {
        name: "config",
        reason: format!("{context}: expected a JSON object"),
    })
}

fn type_error(key: &str, want: &str) -> Error {
    Error::InvalidParameter {
        name: "type",
        reason: format!("key `{key}` must be {want}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    const KEYS: [KeySpec; 2] = [KeySpec::new("ell_A", "m"), KeySpec::new("kind", "")];

    #[test]
    fn accepts_known_and_rejects_unknown() {
        let ok = json!({"ell_A_m": 1.0, "kind": "fig1"});
        check_keys(ok.as_object().unwrap(), &KEYS, "model").unwrap();

        let typo = json!({"ell_a_m": 1.0});
        let msg = check_keys(typo.as_object().unwrap(), &KEYS, "model").unwrap_err().to_string();
        assert!(msg.contains("unknown key `ell_a_m`"), "{msg}");
    }

    #[test]
    fn unit_mismatch_is_named() {
        let bad = json!({"ell_A_nm": 45.0});
        let msg = check_keys(bad.as_object().unwrap(), &KEYS, "model").unwrap_err().to_string();
        assert!(msg.contains("unit suffix `nm`"), "{msg}");
        assert!(msg.contains("ell_A_m"), "{msg}");
    }
}
