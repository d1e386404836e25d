use num_bigint::BigInt;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::homology::FGAbGroup;

/// Outcome of one command: echo, input digest, results, an optional refusal
/// with its witness, and every approximation made.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub results: Value,
    pub refusal: Option<Value>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.refusal.is_some())
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "input_digest": self.input_digest,
            "results": self.results,
            "refusal": self.refusal,
            "warnings": self.warnings,
        })
    }

    /// Pretty JSON; keys sorted lexicographically.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\ninput_digest: {}\n", self.command, self.input_digest);
        out.push_str("results:\n");
        render(&self.results, 1, &mut out);
        if let Some(r) = &self.refusal {
            out.push_str("refusal:\n");
            render(r, 1, &mut out);
        }
        if !self.warnings.is_empty() {
            out.push_str("warnings:\n");
            for w in &self.warnings {
                out.push_str(&format!("  - {w}\n"));
            }
        }
        out
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(o) => format!(
            "{{{}}}",
            o.iter()
                .map(|(k, v)| format!("{k}: {}", inline(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, v) in o {
                let flat = match v {
                    Value::Array(a) => a.iter().all(is_scalar),
                    other => is_scalar(other),
                };
                if flat {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(v)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(v, depth + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for item in a {
                out.push_str(&format!("{pad}- {}\n", inline(item)));
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other))),
    }
}

/// `sha256:` hex digest over the canonical inputs, each length-prefixed.
pub fn digest(inputs: &[String]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update((i.len() as u64).to_le_bytes());
        h.update(i.as_bytes());
    }
    let bytes = h.finalize();
    let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Integer as a JSON number when it fits in `i64`, else as a decimal string.
pub fn int_value(n: &BigInt) -> Value {
    i64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

pub fn group_value(g: &FGAbGroup) -> Value {
    json!({
        "free_rank": g.free_rank,
        "torsion": g.torsion.iter().map(int_value).collect::<Vec<_>>(),
        "group": g.to_string(),
    })
}

/// Homology table: one entry per degree.
pub fn homology_value(groups: &[FGAbGroup]) -> Value {
    Value::Array(
        groups
            .iter()
            .enumerate()
            .map(|(d, g)| {
                let mut v = group_value(g);
                v["degree"] = Value::from(d);
                v
            })
            .collect(),
    )
}

pub fn betti_value(groups: &[FGAbGroup]) -> Value {
    Value::from(groups.iter().map(|g| g.free_rank).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_exit_follows_refusal() {
        let r = Report {
            command: "x".into(),
            input_digest: digest(&["a".into()]),
            results: json!({"zeta": 1, "alpha": [1, 2], "mid": {"b": 1, "a": [{"q": 1}]}}),
            refusal: None,
            warnings: vec!["w".into()],
        };
        let j = r.to_json();
        assert!(j.find("\"alpha\"").unwrap() < j.find("\"zeta\"").unwrap());
        assert!(j.find("\"command\"").unwrap() < j.find("\"warnings\"").unwrap());
        assert_eq!(r.exit_code(), 0);
        let t = r.to_text();
        assert!(t.contains("  alpha: [1, 2]\n"));
        assert!(t.contains("    a:\n      - {q: 1}\n"));
        let refused = Report {
            refusal: Some(json!({"reason": "no"})),
            ..r
        };
        assert_eq!(refused.exit_code(), 1);
    }

    #[test]
    fn digest_separates_inputs() {
        assert_ne!(digest(&["ab".into(), "c".into()]), digest(&["a".into(), "bc".into()]));
        assert!(digest(&[]).starts_with("sha256:"));
    }

    #[test]
    fn homology_table_shape() {
        let g = FGAbGroup {
            free_rank: 1,
            torsion: vec![BigInt::from(2)],
        };
        let v = homology_value(&[FGAbGroup::free(1), g]);
        assert_eq!(v[1]["group"], "Z + Z/2");
        assert_eq!(v[1]["torsion"], json!([2]));
        assert_eq!(v[0]["degree"], 0);
    }
}
