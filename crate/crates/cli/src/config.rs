//! JSON run configuration: {"type", "level", "boundary", "preset", "window"}.
//! `type` is a finite type like "B2" or a twisted one like "A3~2"; `window`
//! is either "lo:hi" or [lo, hi] in grid units.

use serde_json::Value;
use tsys_core::dynkin::{FiniteType, TwistedType};
use tsys_core::tsys::{Preset, SystemKind, SystemSpec, Time};
use tsys_core::twisted::TwistedSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not a JSON object")]
    NotAnObject,
    #[error("missing field {0:?}")]
    Missing(&'static str),
    #[error("bad field {field:?}: {reason}")]
    Bad { field: &'static str, reason: String },
}

#[derive(Debug, Clone)]
pub enum RunSpec {
    Untwisted { spec: SystemSpec, preset: Preset },
    Twisted(TwistedSpec),
}

fn field<'v>(v: &'v Value, name: &'static str) -> Result<&'v Value, ConfigError> {
    v.get(name).ok_or(ConfigError::Missing(name))
}

fn parse_window(v: &Value) -> Result<(Time, Time), ConfigError> {
    let bad = |reason: &str| ConfigError::Bad {
        field: "window",
        reason: reason.to_owned(),
    };
    match v {
        Value::String(s) => {
            let (lo, hi) = s.split_once(':').ok_or_else(|| bad("expected \"lo:hi\""))?;
            Ok((
                lo.trim().parse().map_err(|_| bad("lower bound not an integer"))?,
                hi.trim().parse().map_err(|_| bad("upper bound not an integer"))?,
            ))
        }
        Value::Array(a) if a.len() == 2 => {
            let get = |i: usize| a[i].as_i64().ok_or_else(|| bad("bounds must be integers"));
            Ok((get(0)?, get(1)?))
        }
        _ => Err(bad("expected \"lo:hi\" or [lo, hi]")),
    }
}

pub fn parse_config(v: &Value) -> Result<RunSpec, ConfigError> {
    if !v.is_object() {
        return Err(ConfigError::NotAnObject);
    }
    let ty_str = field(v, "type")?
        .as_str()
        .ok_or(ConfigError::Bad {
            field: "type",
            reason: "expected a string".into(),
        })?;
    let level = field(v, "level")?.as_i64().ok_or(ConfigError::Bad {
        field: "level",
        reason: "expected an integer".into(),
    })?;
    if level < 1 {
        return Err(ConfigError::Bad {
            field: "level",
            reason: "level must be positive".into(),
        });
    }
    let window = parse_window(field(v, "window")?)?;

    if ty_str.contains('~') {
        let tw = TwistedType::parse(ty_str).map_err(|e| ConfigError::Bad {
            field: "type",
            reason: e.to_string(),
        })?;
        return Ok(RunSpec::Twisted(TwistedSpec::new(tw, level, window)));
    }

    let ty = FiniteType::parse(ty_str).map_err(|e| ConfigError::Bad {
        field: "type",
        reason: e.to_string(),
    })?;
    let boundary = v
        .get("boundary")
        .and_then(Value::as_str)
        .unwrap_or("restricted");
    let kind = match boundary {
        "restricted" => SystemKind::Restricted { ty, level },
        "spiral" | "spiral-fresh" => SystemKind::SpiralA {
            r: ty.rank,
            level,
            fresh_boundary: boundary == "spiral-fresh",
        },
        "quasi-unit" => SystemKind::QuasiUnitC { r: ty.rank, level },
        "quasi-symmetric" => SystemKind::QuasiSymmetricS { r: ty.rank, level },
        "primed-step" => SystemKind::PrimedStepA { r: ty.rank, level },
        other => {
            return Err(ConfigError::Bad {
                field: "boundary",
                reason: format!("unknown boundary {other:?}"),
            })
        }
    };
    let preset = match v.get("preset").and_then(Value::as_str).unwrap_or("default") {
        "default" => Preset::Default,
        "explicit2" => Preset::Explicit2,
        other => {
            return Err(ConfigError::Bad {
                field: "preset",
                reason: format!("unknown preset {other:?}"),
            })
        }
    };
    Ok(RunSpec::Untwisted {
        spec: SystemSpec::new(kind, window),
        preset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_untwisted_and_twisted() {
        let v = json!({"type": "B2", "level": 2, "window": "0:12"});
        assert!(matches!(parse_config(&v), Ok(RunSpec::Untwisted { .. })));
        let v = json!({"type": "A3~2", "level": 2, "window": [0, 14]});
        assert!(matches!(parse_config(&v), Ok(RunSpec::Twisted(_))));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_config(&json!([1, 2])).is_err());
        assert!(parse_config(&json!({"type": "B2", "level": 2})).is_err());
        assert!(parse_config(&json!({"type": "H4", "level": 2, "window": "0:4"})).is_err());
        assert!(
            parse_config(&json!({"type": "A2", "level": 0, "window": "0:4"})).is_err()
        );
    }
}
