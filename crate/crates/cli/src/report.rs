//! Command reports and their text and JSON renderings.

use std::fmt::Write as _;
use std::io::IsTerminal;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub label: String,
    pub value: String,
    /// Rendered as `label = value` rather than `label: value`.
    #[serde(skip)]
    pub numeric: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub results: Vec<Item>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl Report {
    pub fn new(command: &str, input: &[u8]) -> Self {
        Report {
            command: command.into(),
            input_digest: digest(input),
            results: Vec::new(),
            warnings: Vec::new(),
            generated_at: None,
        }
    }

    pub fn value(&mut self, label: impl Into<String>, value: impl ToString) {
        self.results.push(Item {
            label: label.into(),
            value: value.to_string(),
            numeric: true,
        });
    }

    pub fn fact(&mut self, label: impl Into<String>, value: impl ToString) {
        self.results.push(Item {
            label: label.into(),
            value: value.to_string(),
            numeric: false,
        });
    }

    pub fn warn(&mut self, w: impl ToString) {
        self.warnings.push(w.to_string());
    }

    pub fn render_text(&self, style: Style) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "input: {}", self.input_digest);
        if let Some(t) = self.generated_at {
            let _ = writeln!(out, "generated_at: {t}");
        }
        for item in &self.results {
            let value = style.verdict(&item.value);
            if item.numeric {
                let _ = writeln!(out, "{} = {value}", item.label);
            } else {
                let _ = writeln!(out, "{}: {value}", item.label);
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "{}: {w}", style.paint("warning", "33"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// ANSI styling, off unless stdout is a terminal and `SPIRALITY_NO_COLOR`
/// is unset.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn detect() -> Self {
        Style {
            color: std::env::var_os("SPIRALITY_NO_COLOR").is_none()
                && std::io::stdout().is_terminal(),
        }
    }

    pub fn paint(&self, text: &str, code: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn verdict(&self, value: &str) -> String {
        match value.split_whitespace().next() {
            Some("yes" | "yes," | "ok") => self.paint(value, "32"),
            Some("no" | "no," | "MISMATCH") => self.paint(value, "31"),
            _ => value.to_string(),
        }
    }
}
