//! Machine-readable run reports: deterministic, key-sorted JSON.

use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Wrap a command payload with the common report envelope and render it as
/// pretty JSON with sorted keys (serde_json's map is ordered, so identical
/// runs produce identical bytes).
pub fn render(command: &str, payload: impl Serialize) -> anyhow::Result<String> {
    let mut root = serde_json::Map::new();
    root.insert("schema_version".into(), SCHEMA_VERSION.into());
    root.insert("tool_version".into(), env!("CARGO_PKG_VERSION").into());
    root.insert("command".into(), command.into());
    let payload = serde_json::to_value(payload).context("serializing report payload")?;
    if let Value::Object(map) = payload {
        for (k, v) in map {
            root.insert(k, v);
        }
    } else {
        root.insert("result".into(), payload);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(root))?;
    text.push('\n');
    Ok(text)
}

/// Print the report and optionally persist it.
pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
