use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run identity embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub version: &'static str,
    pub seed: u64,
    pub config_sha256: String,
}

impl Header {
    /// Hashes the canonical JSON of the resolved configuration.
    pub fn new(command: &str, seed: u64, resolved: &impl Serialize) -> Self {
        let canonical = serde_json::to_string(&json!({ "command": command, "seed": seed, "config": resolved }))
            .expect("resolved configuration serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let config_sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Header { version: VERSION, seed, config_sha256 }
    }

    pub fn comment_line(&self) -> String {
        format!("# qlab {} seed={} config_sha256={}\n", self.version, self.seed, self.config_sha256)
    }

    pub fn json(&self) -> Value {
        serde_json::to_value(self).expect("header serializes")
    }
}

/// 17 significant digits; parses back to the identical `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &Header, columns: &[&str]) -> Self {
        let mut text = header.comment_line();
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn json_document(header: &Header, body: Value) -> String {
    let mut doc = json!({ "meta": header.json() });
    if let (Value::Object(dst), Value::Object(src)) = (&mut doc, body) {
        dst.extend(src);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn emit(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-7, 0.780_546_5, -2.5e300, 5e-324] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn header_hash_depends_on_config() {
        let a = Header::new("zeno", 1, &json!({ "n": 1 }));
        let b = Header::new("zeno", 1, &json!({ "n": 2 }));
        let c = Header::new("zeno", 2, &json!({ "n": 1 }));
        assert_eq!(a.config_sha256.len(), 64);
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_ne!(a.config_sha256, c.config_sha256);
        assert_eq!(a.config_sha256, Header::new("zeno", 1, &json!({ "n": 1 })).config_sha256);
    }
}
