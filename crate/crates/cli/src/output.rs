//! Output plumbing: every document embeds the toolkit version and the fully
//! resolved configuration it was produced under. JSON documents carry them as
//! fields; CSV files carry a single `#` comment line above the header.
//!
//! Worker count is deliberately absent from the echoed configuration: results
//! are defined to be independent of it, and embedding it would break the
//! byte-reproducibility contract across `--workers` settings.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Context;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One resolved configuration as ordered key-value pairs.
pub struct ResolvedConfig {
    pairs: Vec<(&'static str, Value)>,
}

impl ResolvedConfig {
    pub fn new() -> Self {
        ResolvedConfig { pairs: Vec::new() }
    }

    pub fn push(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.pairs.push((key, value.into()));
        self
    }

    fn as_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.pairs {
            map.insert((*k).to_string(), v.clone());
        }
        Value::Object(map)
    }

    /// `# belltouchard v0.1.0 | <command> | k=v k=v ...` for CSV outputs.
    fn comment_line(&self, command: &str) -> String {
        let pairs: Vec<String> = self
            .pairs
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect();
        format!("# belltouchard v{VERSION} | {command} | {}", pairs.join(" "))
    }
}

/// A complete JSON document: version, command, config, then the payload
/// fields in the given order.
pub fn json_document(
    command: &str,
    config: &ResolvedConfig,
    payload: Vec<(&'static str, Value)>,
) -> String {
    let mut map = Map::new();
    map.insert("version".into(), json!(VERSION));
    map.insert("command".into(), json!(command));
    map.insert("config".into(), config.as_json());
    for (k, v) in payload {
        map.insert(k.to_string(), v);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("valid JSON tree");
    text.push('\n');
    text
}

/// A complete CSV document: provenance comment, then the body (header plus
/// rows) produced by `body`.
pub fn csv_document<F>(command: &str, config: &ResolvedConfig, body: F) -> Result<String, CliError>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    writeln!(&mut buf, "{}", config.comment_line(command))?;
    body(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Failure(format!("non-UTF8 output: {e}")))
}

/// Write to --output when given, standard output otherwise.
pub fn emit(ctx: &Context, text: &str) -> Result<(), CliError> {
    match &ctx.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Failure(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_embed_version_and_config() {
        let cfg = ResolvedConfig::new()
            .push("alpha", 1.0)
            .push("seed", 42u64)
            .push("preset", "dataset1");
        let doc = json_document("pmf", &cfg, vec![("rows", json!([1, 2]))]);
        let parsed: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(parsed["version"], json!(VERSION));
        assert_eq!(parsed["command"], json!("pmf"));
        assert_eq!(parsed["config"]["alpha"], json!(1.0));
        assert_eq!(parsed["config"]["seed"], json!(42));
        assert!(doc.ends_with('\n'));

        let csv = csv_document("simulate", &cfg, |buf| writeln!(buf, "a,b")).unwrap();
        let mut lines = csv.lines();
        let comment = lines.next().unwrap();
        assert!(comment.starts_with("# belltouchard v"));
        assert!(comment.contains("| simulate |"));
        assert!(comment.contains("alpha=1.0"));
        assert!(comment.contains("preset=dataset1"));
        assert_eq!(lines.next().unwrap(), "a,b");
    }
}
