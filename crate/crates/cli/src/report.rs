//! Deterministic reports rendered as text or JSON.

use gptk::rational::{fmt_vector, Rational, Vector};
use gptk::Outcome;
use serde_json::{json, Value};

/// Pair outcomes refer to effects through a per-report table, in order of
/// first appearance.
#[derive(Debug, Default)]
pub struct EffectTable {
    effects: Vec<Vector>,
}

impl EffectTable {
    fn index(&mut self, a: &Vector) -> usize {
        match self.effects.iter().position(|b| b == a) {
            Some(i) => i,
            None => {
                self.effects.push(a.clone());
                self.effects.len() - 1
            }
        }
    }

    /// Atoms are strings, graph outcomes `[index, effect]`, bare effects an
    /// effect number, pairs `[a, b]`, events the list of their members.
    pub fn token(&mut self, o: &Outcome) -> Value {
        match o {
            Outcome::Atom(s) => json!(s),
            Outcome::Labeled(i, a) => {
                let i = self.token(i);
                json!([i, self.index(a)])
            }
            Outcome::Effect(a) => json!(self.index(a)),
            Outcome::Pair(a, b) => {
                let a = self.token(a);
                json!([a, self.token(b)])
            }
            Outcome::Event(ms) => Value::Array(ms.iter().map(|m| self.token(m)).collect()),
        }
    }
}

pub fn rational_json(r: &Rational) -> Value {
    json!(r.to_string())
}

pub fn vector_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn matrix_json(m: &[Vector]) -> Value {
    Value::Array(m.iter().map(|r| vector_json(r)).collect())
}

pub fn fmt_matrix(m: &[Vector]) -> String {
    let rows: Vec<String> = m.iter().map(|r| fmt_vector(r)).collect();
    format!("[{}]", rows.join(", "))
}

#[derive(Debug)]
struct Entry {
    key: String,
    text: String,
    value: Value,
}

#[derive(Debug)]
struct Section {
    title: String,
    entries: Vec<Entry>,
}

#[derive(Debug)]
pub struct Report {
    command: String,
    sections: Vec<Section>,
    checks: Vec<(String, bool)>,
    pub effects: EffectTable,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            sections: Vec::new(),
            checks: Vec::new(),
            effects: EffectTable::default(),
        }
    }

    pub fn section(&mut self, title: impl Into<String>) {
        self.sections.push(Section {
            title: title.into(),
            entries: Vec::new(),
        });
    }

    /// Adds `key: text` to the current section, with `value` as its JSON form.
    pub fn put(&mut self, key: impl Into<String>, text: impl Into<String>, value: Value) {
        if self.sections.is_empty() {
            self.section("summary");
        }
        let s = self.sections.last_mut().expect("a section exists");
        s.entries.push(Entry {
            key: key.into(),
            text: text.into(),
            value,
        });
    }

    pub fn text(&mut self, key: impl Into<String>, text: impl ToString) {
        let t = text.to_string();
        self.put(key, t.clone(), json!(t));
    }

    pub fn count(&mut self, key: impl Into<String>, n: usize) {
        self.put(key, n.to_string(), json!(n));
    }

    pub fn flag(&mut self, key: impl Into<String>, b: bool) {
        self.put(key, if b { "yes" } else { "no" }, json!(b));
    }

    pub fn rational(&mut self, key: impl Into<String>, r: &Rational) {
        self.put(key, r.to_string(), rational_json(r));
    }

    pub fn vector(&mut self, key: impl Into<String>, v: &[Rational]) {
        self.put(key, fmt_vector(v), vector_json(v));
    }

    pub fn matrix(&mut self, key: impl Into<String>, m: &[Vector]) {
        self.put(key, fmt_matrix(m), matrix_json(m));
    }

    pub fn outcomes(&mut self, key: impl Into<String>, os: &[&Outcome]) {
        let text: Vec<String> = os.iter().map(|o| o.to_string()).collect();
        let value = Value::Array(os.iter().map(|o| self.effects.token(o)).collect());
        self.put(key, format!("{{{}}}", text.join(", ")), value);
    }

    /// A check that decides the exit status.
    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push((name.into(), pass));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, p)| *p)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("== {}\n", self.command);
        for s in &self.sections {
            out.push_str(&format!("\n[{}]\n", s.title));
            for e in &s.entries {
                out.push_str(&format!("  {}: {}\n", e.key, e.text));
            }
        }
        if !self.checks.is_empty() {
            out.push_str("\nchecks:\n");
            for (name, pass) in &self.checks {
                out.push_str(&format!("  [{}] {name}\n", if *pass { "pass" } else { "FAIL" }));
            }
        }
        out.push_str(&format!("\nstatus: {}\n", if self.passed() { "pass" } else { "fail" }));
        out
    }

    pub fn render_json(&self) -> String {
        let sections: Vec<Value> = self
            .sections
            .iter()
            .map(|s| {
                let entries: Vec<Value> = s.entries.iter().map(|e| json!({"key": e.key, "value": e.value})).collect();
                json!({"title": s.title, "entries": entries})
            })
            .collect();
        let checks: Vec<Value> = self.checks.iter().map(|(n, p)| json!({"name": n, "pass": p})).collect();
        let doc = json!({
            "command": self.command,
            "sections": sections,
            "effects": matrix_json(&self.effects.effects),
            "checks": checks,
            "status": if self.passed() { "pass" } else { "fail" },
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}
