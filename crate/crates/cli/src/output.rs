//! Deterministic JSON and CSV emission.
//!
//! Every document renders byte-identically for a fixed configuration:
//! object keys keep insertion order, floats print with 17 significant
//! digits (`{:.16e}`), and arbitrary-precision degeneracies are carried as
//! decimal strings so no consumer has to trust its own integer width.
//! Non-finite floats render as `null` to keep documents parseable.

use fichain::rational_to_string;
use fichain::{BigUint, Rational};

/// JSON value with insertion-ordered objects.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn rational(value: &Rational) -> Json {
        Json::Str(rational_to_string(value))
    }

    pub fn big(value: &BigUint) -> Json {
        Json::Str(value.to_string())
    }

    pub fn size(value: usize) -> Json {
        Json::Int(value as i64)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out.push('\n');
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(v) => out.push_str(if *v { "true" } else { "false" }),
            Json::Int(v) => out.push_str(&v.to_string()),
            Json::Float(v) => out.push_str(&float_repr(*v)),
            Json::Str(s) => escape_into(s, out),
            Json::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    newline_indent(out, indent + 1);
                    item.render_into(out, indent + 1);
                }
                newline_indent(out, indent);
                out.push(']');
            }
            Json::Object(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (name, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    newline_indent(out, indent + 1);
                    escape_into(name, out);
                    out.push_str(": ");
                    value.render_into(out, indent + 1);
                }
                newline_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn newline_indent(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Fixed 17-significant-digit float form; non-finite values become `null`.
pub fn float_repr(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn escape_into(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// One named verification outcome attached to a document.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, passed: bool, detail: String) -> Check {
        Check { name, passed, detail }
    }
}

/// Full document: `{"config": ..., "result": ..., "checks": [...]}`.
pub fn document(config: Json, result: Json, checks: &[Check]) -> String {
    let checks_json = Json::Array(
        checks
            .iter()
            .map(|c| {
                Json::Object(vec![
                    ("name", Json::Str(c.name.to_string())),
                    ("passed", Json::Bool(c.passed)),
                    ("detail", Json::Str(c.detail.clone())),
                ])
            })
            .collect(),
    );
    Json::Object(vec![
        ("config", config),
        ("result", result),
        ("checks", checks_json),
    ])
    .render()
}

/// CSV with a header row.  Fields are emitted verbatim; all producers in
/// this binary write numeric or bit-string cells, so no quoting is needed.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_deterministic_json() {
        let doc = Json::Object(vec![
            ("x", Json::Float(24.0)),
            ("s", Json::Str("a\"b".to_string())),
            ("v", Json::Array(vec![Json::Int(1), Json::Bool(false), Json::Null])),
            ("empty", Json::Array(Vec::new())),
        ]);
        let text = doc.render();
        assert!(text.contains("2.4000000000000000e1"));
        assert!(text.contains("\"a\\\"b\""));
        assert!(text.contains("\"empty\": []"));
        assert_eq!(text, doc.render());
    }

    #[test]
    fn non_finite_floats_render_null() {
        assert_eq!(float_repr(f64::NAN), "null");
        assert_eq!(float_repr(f64::INFINITY), "null");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = csv_table(
            &["a", "b"],
            &[vec!["1".into(), "2".into()], vec!["3".into(), "4".into()]],
        );
        assert_eq!(text, "a,b\n1,2\n3,4\n");
    }
}
