//! Reports: a command name, a subject and an ordered key-value body,
//! rendered either as aligned text or as JSON. Key order is insertion
//! order, so output is byte-stable for identical inputs.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub body: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, subject: &str) -> Self {
        Report {
            command: command.to_string(),
            subject: subject.to_string(),
            body: Map::new(),
        }
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.body.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert("subject".into(), Value::String(self.subject.clone()));
        root.insert("body".into(), Value::Object(self.body.clone()));
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("plain JSON values serialize");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.command, self.subject);
        render_map(&self.body, 1, &mut out);
        out
    }
}

fn render_map(map: &Map<String, Value>, depth: usize, out: &mut String) {
    let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    let indent = "  ".repeat(depth);
    for (key, value) in map {
        match value {
            Value::Object(inner) => {
                out.push_str(&format!("{indent}{key}\n"));
                render_map(inner, depth + 1, out);
            }
            Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
                out.push_str(&format!("{indent}{key}\n"));
                for (k, item) in items.iter().enumerate() {
                    let mut wrapper = Map::new();
                    wrapper.insert(format!("[{k}]"), item.clone());
                    render_map(&wrapper, depth + 1, out);
                }
            }
            scalar => {
                out.push_str(&format!("{indent}{key:<width$}  {}\n", scalar_text(scalar)));
            }
        }
    }
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}
