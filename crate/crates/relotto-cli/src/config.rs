use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Overlays the flags given on the command line onto the config file, if
/// any, and parses the result back into the subcommand's flag set.
///
/// Returns the effective flags and the merged key/value map that is echoed
/// into every manifest.
pub fn resolve<T>(flags: &T, path: Option<&Path>) -> Result<(T, Map<String, Value>), CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = match path {
        Some(p) => load(p)?,
        None => Map::new(),
    };
    match serde_json::to_value(flags) {
        Ok(Value::Object(given)) => merged.extend(given),
        _ => unreachable!("flag sets serialize to objects"),
    }
    let effective = serde_json::from_value(Value::Object(merged.clone()))
        .map_err(|e| CliError::Input(format!("--config: {e}")))?;
    Ok((effective, merged))
}

/// Reads a flat config object. A manifest written by an earlier run is
/// recognised by its `config` member, which is used instead.
pub fn load(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("--config: {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("--config: {}: {e}", path.display())))?;
    let object = match value {
        Value::Object(mut m) => match m.remove("config") {
            Some(Value::Object(inner)) => inner,
            Some(_) => {
                return Err(CliError::Input(
                    "--config: `config` member must be an object".into(),
                ))
            }
            None => m,
        },
        _ => return Err(CliError::Input("--config: expected a JSON object".into())),
    };
    Ok(object
        .into_iter()
        .map(|(k, v)| (k.trim_start_matches('-').replace('_', "-"), v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::BoundsArgs;

    fn write(name: &str, body: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("otto-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn flags_override_file() {
        let p = write("flat.json", r#"{"tau": 0.25, "v": 0.5}"#);
        let flags = BoundsArgs {
            v: Some(0.9),
            ..Default::default()
        };
        let (eff, merged) = resolve(&flags, Some(&p)).unwrap();
        assert_eq!(eff.tau, Some(0.25));
        assert_eq!(eff.v, Some(0.9));
        assert_eq!(merged["v"], 0.9);
    }

    #[test]
    fn manifest_and_underscore_keys() {
        let p = write(
            "manifest.json",
            r#"{"bound": 1, "config": {"tau": 0.5, "v": 0.85}}"#,
        );
        let (eff, _) = resolve(&BoundsArgs::default(), Some(&p)).unwrap();
        assert_eq!((eff.tau, eff.v), (Some(0.5), Some(0.85)));
        let p = write("snake.json", r#"{"omega_c": 1}"#);
        let m = load(&p).unwrap();
        assert!(m.contains_key("omega-c"));
    }

    #[test]
    fn unknown_key_rejected() {
        let p = write("bad.json", r#"{"tau": 0.5, "velocity": 0.85}"#);
        let err = resolve(&BoundsArgs::default(), Some(&p)).unwrap_err();
        assert!(err.to_string().contains("velocity"));
    }
}
