//! Check and report containers plus deterministic serialization.
//!
//! Reports are rendered with a fixed field order and a fixed float
//! format so that byte equality between two reports means the numbers
//! agree to the printed precision. Serialization is hand-rolled: the
//! output shape is small, stable, and must never depend on hash-map
//! iteration order or on serializer defaults.

use sha2::{Digest, Sha256};

/// One named residual statistic. `pass` is always `max <= tol`; a
/// vacuous check (nothing to measure) passes with a note saying why.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub max: f64,
    pub rms: f64,
    pub nodes: usize,
    pub tol: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn from_stats(name: &str, max: f64, rms: f64, nodes: usize, tol: f64) -> Check {
        Check {
            name: name.to_string(),
            max,
            rms,
            nodes,
            tol,
            pass: max <= tol,
            note: None,
        }
    }

    pub fn vacuous(name: &str, note: &str) -> Check {
        Check {
            name: name.to_string(),
            max: 0.0,
            rms: 0.0,
            nodes: 0,
            tol: 0.0,
            pass: true,
            note: Some(note.to_string()),
        }
    }

    pub fn with_note(mut self, note: &str) -> Check {
        self.note = Some(note.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, checks: Vec<Check>) -> SuiteReport {
        SuiteReport { suite: suite.to_string(), checks }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Full run report: provenance, suites in a fixed order, optional
/// classifier verdict, free-form notes.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub surface: String,
    pub grid: String,
    pub config_hash: String,
    pub suites: Vec<SuiteReport>,
    pub verdict: Option<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass())
    }

    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(4096);
        out.push_str("{\"surface\":");
        push_json_str(&mut out, &self.surface);
        out.push_str(",\"grid\":");
        push_json_str(&mut out, &self.grid);
        out.push_str(",\"config\":");
        push_json_str(&mut out, &self.config_hash);
        out.push_str(",\"verdict\":");
        match &self.verdict {
            Some(v) => push_json_str(&mut out, v),
            None => out.push_str("null"),
        }
        out.push_str(",\"pass\":");
        out.push_str(if self.pass() { "true" } else { "false" });
        out.push_str(",\"notes\":[");
        for (i, n) in self.notes.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_json_str(&mut out, n);
        }
        out.push_str("],\"suites\":[");
        for (i, s) in self.suites.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("{\"suite\":");
            push_json_str(&mut out, &s.suite);
            out.push_str(",\"pass\":");
            out.push_str(if s.pass() { "true" } else { "false" });
            out.push_str(",\"checks\":[");
            for (j, c) in s.checks.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str("{\"name\":");
                push_json_str(&mut out, &c.name);
                out.push_str(",\"max\":");
                out.push_str(&fmt_float(c.max));
                out.push_str(",\"rms\":");
                out.push_str(&fmt_float(c.rms));
                out.push_str(",\"nodes\":");
                out.push_str(&c.nodes.to_string());
                out.push_str(",\"tol\":");
                out.push_str(&fmt_float(c.tol));
                out.push_str(",\"pass\":");
                out.push_str(if c.pass { "true" } else { "false" });
                out.push_str(",\"note\":");
                match &c.note {
                    Some(n) => push_json_str(&mut out, n),
                    None => out.push_str("null"),
                }
                out.push('}');
            }
            out.push_str("]}");
        }
        out.push_str("]}");
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("surface {}  [{}]\n", self.surface, self.grid));
        out.push_str(&format!("config  {}\n", self.config_hash));
        for s in &self.suites {
            out.push_str(&format!(
                "suite {:<14} {}\n",
                s.suite,
                if s.pass() { "PASS" } else { "FAIL" }
            ));
            for c in &s.checks {
                out.push_str(&format!(
                    "  {:<22} max {}  rms {}  tol {}  nodes {:>6}  {}\n",
                    c.name,
                    fmt_float(c.max),
                    fmt_float(c.rms),
                    fmt_float(c.tol),
                    c.nodes,
                    if c.pass { "pass" } else { "FAIL" }
                ));
                if let Some(n) = &c.note {
                    out.push_str(&format!("    note: {n}\n"));
                }
            }
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!("verdict {v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Fixed 12-significant-digit scientific format; negative zero is
/// printed as positive zero so equal values always print equal.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "null".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "1e400".to_string() } else { "-1e400".to_string() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn push_json_str(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// First 12 hex digits of the SHA-256 of the canonical run
/// configuration text.
pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_means_max_at_most_tol() {
        assert!(Check::from_stats("a", 1e-7, 1e-8, 10, 1e-6).pass);
        assert!(!Check::from_stats("a", 2e-6, 1e-8, 10, 1e-6).pass);
        assert!(Check::from_stats("a", 1e-6, 1e-6, 10, 1e-6).pass);
    }

    #[test]
    fn json_is_deterministic_and_balanced() {
        let rep = Report {
            surface: "x".into(),
            grid: "g".into(),
            config_hash: config_hash("cfg"),
            suites: vec![SuiteReport::new(
                "s",
                vec![
                    Check::from_stats("a", 1.5e-9, 0.5e-9, 100, 1e-6),
                    Check::vacuous("b", "nothing to measure"),
                ],
            )],
            verdict: Some("V".into()),
            notes: vec!["hello \"quoted\"".into()],
        };
        let a = rep.to_json();
        let b = rep.to_json();
        assert_eq!(a, b);
        assert_eq!(a.matches('{').count(), a.matches('}').count());
        assert_eq!(a.matches('[').count(), a.matches(']').count());
        assert!(a.contains("\\\"quoted\\\""));
    }

    #[test]
    fn negative_zero_prints_like_zero() {
        assert_eq!(fmt_float(-0.0), fmt_float(0.0));
    }

    #[test]
    fn hash_is_stable_and_short() {
        let h = config_hash("same text");
        assert_eq!(h, config_hash("same text"));
        assert_eq!(h.len(), 12);
        assert_ne!(h, config_hash("other text"));
    }
}
