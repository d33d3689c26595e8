//! Output plumbing: every file a command writes starts with a header
//! carrying the fully resolved configuration and a SHA-256 of the body,
//! so a result can be traced to the exact run that produced it and
//! reruns can be compared byte for byte.

use crate::config::RunConfig;
use sha2::{Digest, Sha256};
use std::io::Write;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// `#`-comment header followed by the body: the shape of the encoder
/// dump and of CSV tables.
pub fn commented_document(command: &str, config: &RunConfig, body: &str) -> String {
    let mut out = format!("# defermion {command}\n");
    for line in config.canonical().lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("# content_sha256 = ");
    out.push_str(&sha256_hex(body.as_bytes()));
    out.push('\n');
    out.push_str(body);
    out
}

/// One JSON header object on the first line, then the body's records:
/// the JSON-lines shape.
pub fn jsonl_document(command: &str, config: &RunConfig, body: &str) -> String {
    let mut header = String::from("{\"run\":");
    push_json_string(&mut header, command);
    header.push_str(",\"config\":{");
    let mut first = true;
    for line in config.canonical().lines() {
        let (key, value) = line.split_once(" = ").expect("canonical lines are key = value");
        if !first {
            header.push(',');
        }
        first = false;
        push_json_string(&mut header, key);
        header.push(':');
        push_json_string(&mut header, value);
    }
    header.push_str("},\"content_sha256\":");
    push_json_string(&mut header, &sha256_hex(body.as_bytes()));
    header.push_str("}\n");
    header.push_str(body);
    header
}

pub fn push_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// JSON number; protocol observables are finite, so anything else marks
/// a bug loudly rather than producing parseable nonsense.
pub fn push_json_number(out: &mut String, v: f64) {
    assert!(v.is_finite(), "non-finite value in output: {v}");
    out.push_str(&v.to_string());
}

/// Writes to the path from the config, `-` meaning standard output.
pub fn write_document(target: &str, text: &str) -> std::io::Result<()> {
    if target == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        std::fs::write(target, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_hash_matches_body() {
        let config = RunConfig::default();
        let doc = commented_document("encode", &config, "line\n");
        let hash_line =
            doc.lines().find(|l| l.starts_with("# content_sha256")).unwrap().to_string();
        let body = &doc[doc.find("line\n").unwrap()..];
        assert!(hash_line.ends_with(&sha256_hex(body.as_bytes())));
    }

    #[test]
    fn jsonl_header_is_one_line_and_escaped() {
        let mut config = RunConfig::default();
        config.set("output", "we\"ird.jsonl").unwrap();
        let doc = jsonl_document("evolve", &config, "{\"tau\":0}\n");
        let header = doc.lines().next().unwrap();
        assert!(header.starts_with("{\"run\":\"evolve\""));
        assert!(header.contains("we\\\"ird.jsonl"));
        assert!(header.contains("\"content_sha256\":"));
    }
}
