//! Key-value report tree rendered as indented text under a `schema=1` header.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Value(String),
    Section(Vec<(String, Node)>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section(Vec<(String, Node)>);

impl Section {
    pub fn new() -> Self {
        Section(Vec::new())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), Node::Value(value.to_string())));
        self
    }

    /// Floats use the shortest representation that parses back to the same bits.
    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.set(key, fmt_f64(v))
    }

    pub fn list(&mut self, key: &str, vs: &[f64]) -> &mut Self {
        let items: Vec<String> = vs.iter().map(|&v| fmt_f64(v)).collect();
        self.set(key, format!("[{}]", items.join(", ")))
    }

    pub fn child(&mut self, key: &str, section: Section) -> &mut Self {
        self.0.push((key.into(), Node::Section(section.0)));
        self
    }

    pub fn extend(&mut self, other: Section) -> &mut Self {
        self.0.extend(other.0);
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::from("schema=1\n");
        write_entries(&mut out, &self.0, 0);
        out
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn write_entries(out: &mut String, entries: &[(String, Node)], depth: usize) {
    for (k, node) in entries {
        let pad = "  ".repeat(depth);
        match node {
            Node::Value(v) => {
                let _ = writeln!(out, "{pad}{k}={v}");
            }
            Node::Section(children) => {
                let _ = writeln!(out, "{pad}{k}");
                write_entries(out, children, depth + 1);
            }
        }
    }
}

/// Converts a TOML table into a report section, keeping key order.
pub fn from_toml(table: &toml::Table) -> Section {
    let mut s = Section::new();
    for (k, v) in table {
        match v {
            toml::Value::Table(t) => {
                s.child(k, from_toml(t));
            }
            toml::Value::Float(f) => {
                s.num(k, *f);
            }
            toml::Value::String(text) => {
                s.set(k, text);
            }
            other => {
                s.set(k, other);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_nested_sections_with_header() {
        let mut inner = Section::new();
        inner.num("c", -9.5).set("tag", "ergodic_regime");
        let mut root = Section::new();
        root.set("command", "ergodic").child("result", inner);
        assert_eq!(root.render(), "schema=1\ncommand=ergodic\nresult\n  c=-9.5\n  tag=ergodic_regime\n");
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -9.869604401089358, 1e-300, 4.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn toml_tables_become_sections() {
        let t: toml::Table = toml::from_str("[equation]\nalpha = 0.5\noperator = \"trace\"\n").unwrap();
        let s = from_toml(&t);
        assert_eq!(s.render(), "schema=1\nequation\n  alpha=0.5\n  operator=trace\n");
    }
}
