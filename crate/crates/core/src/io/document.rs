use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::space::{parse_rational, BornCoarseSpace, BuiltinKind, Rational, SpaceError};

/// A malformed document, located by line and field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, field `{field}`: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// The three document kinds, each mapping to one space constructor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceDocument {
    Explicit {
        points: Vec<String>,
        entourages: Vec<Vec<(String, String)>>,
        bornology: Vec<Vec<String>>,
    },
    Metric {
        points: Vec<String>,
        /// Full symmetric matrix; emitted lower-triangular with the diagonal.
        distances: Vec<Vec<Rational>>,
        scales: Vec<Rational>,
    },
    Builtin { kind: BuiltinKind, radius: u32 },
}

struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    /// Line of the first occurrence of the quoted field name, or 1.
    fn line_of(&self, field: &str) -> usize {
        let needle = format!("\"{field}\"");
        self.text
            .find(&needle)
            .map_or(1, |at| self.text[..at].matches('\n').count() + 1)
    }

    fn err(&self, field: &str, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line_of(field),
            field: field.to_string(),
            message: message.into(),
        }
    }
}

const EXPLICIT_FIELDS: &[&str] = &["kind", "points", "entourages", "bornology"];
const METRIC_FIELDS: &[&str] = &["kind", "points", "distances", "scales"];
const BUILTIN_FIELDS: &[&str] = &["kind", "name", "radius"];

impl SpaceDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let loc = Locator { text };
        let value: Value = serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line().max(1),
            field: "<document>".into(),
            message: e.to_string(),
        })?;
        let obj = value
            .as_object()
            .ok_or_else(|| loc.err("<document>", "expected a JSON object"))?;
        let kind = obj
            .get("kind")
            .ok_or_else(|| loc.err("kind", "missing"))?
            .as_str()
            .ok_or_else(|| loc.err("kind", "expected a string"))?;
        let allowed = match kind {
            "explicit" => EXPLICIT_FIELDS,
            "metric" => METRIC_FIELDS,
            "builtin" => BUILTIN_FIELDS,
            other => return Err(loc.err("kind", format!("unknown kind `{other}`"))),
        };
        if let Some(extra) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(loc.err(extra, format!("not a field of kind `{kind}`")));
        }
        let field = |name: &str| obj.get(name).ok_or_else(|| loc.err(name, "missing"));
        match kind {
            "explicit" => {
                let points = strings(&loc, "points", field("points")?)?;
                let entourages = field("entourages")?
                    .as_array()
                    .ok_or_else(|| loc.err("entourages", "expected a list of pair lists"))?
                    .iter()
                    .map(|g| {
                        g.as_array()
                            .ok_or_else(|| loc.err("entourages", "expected a list of pairs"))?
                            .iter()
                            .map(|p| pair(&loc, p))
                            .collect()
                    })
                    .collect::<Result<_, _>>()?;
                let bornology = field("bornology")?
                    .as_array()
                    .ok_or_else(|| loc.err("bornology", "expected a list of subsets"))?
                    .iter()
                    .map(|b| strings(&loc, "bornology", b))
                    .collect::<Result<_, _>>()?;
                Ok(SpaceDocument::Explicit {
                    points,
                    entourages,
                    bornology,
                })
            }
            "metric" => {
                let points = strings(&loc, "points", field("points")?)?;
                let rows = field("distances")?
                    .as_array()
                    .ok_or_else(|| loc.err("distances", "expected a list of rows"))?
                    .iter()
                    .map(|r| {
                        r.as_array()
                            .ok_or_else(|| loc.err("distances", "expected a row list"))?
                            .iter()
                            .map(|v| rational(&loc, "distances", v))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let distances = symmetric_from_rows(&loc, rows, points.len())?;
                let scales = field("scales")?
                    .as_array()
                    .ok_or_else(|| loc.err("scales", "expected a list of rationals"))?
                    .iter()
                    .map(|v| rational(&loc, "scales", v))
                    .collect::<Result<_, _>>()?;
                Ok(SpaceDocument::Metric {
                    points,
                    distances,
                    scales,
                })
            }
            _ => {
                let name = field("name")?
                    .as_str()
                    .ok_or_else(|| loc.err("name", "expected a string"))?;
                let kind = BuiltinKind::from_name(name)
                    .ok_or_else(|| loc.err("name", format!("unknown builtin `{name}`")))?;
                let radius = field("radius")?
                    .as_u64()
                    .and_then(|r| u32::try_from(r).ok())
                    .ok_or_else(|| loc.err("radius", "expected a non-negative integer"))?;
                Ok(SpaceDocument::Builtin { kind, radius })
            }
        }
    }

    pub fn build(&self) -> Result<BornCoarseSpace, SpaceError> {
        match self {
            SpaceDocument::Explicit {
                points,
                entourages,
                bornology,
            } => BornCoarseSpace::explicit(points, entourages, bornology),
            SpaceDocument::Metric {
                points,
                distances,
                scales,
            } => BornCoarseSpace::from_metric(points, distances.clone(), scales.clone()),
            SpaceDocument::Builtin { kind, radius } => BornCoarseSpace::windowed_builtin(*kind, *radius),
        }
    }

    /// The document that rebuilds `space`: builtin for an untouched window,
    /// metric when the metric scales regenerate the structure, explicit otherwise.
    pub fn from_space(space: &BornCoarseSpace) -> Self {
        if let Some(w) = space.window() {
            if BornCoarseSpace::windowed_builtin(w.kind, w.radius).is_ok_and(|b| b == *space) {
                return SpaceDocument::Builtin {
                    kind: w.kind,
                    radius: w.radius,
                };
            }
        }
        let points: Vec<String> = space.ground().ids().to_vec();
        if let Some(m) = space.metric() {
            let doc = SpaceDocument::Metric {
                points: points.clone(),
                distances: m.matrix().to_vec(),
                scales: m.scales().to_vec(),
            };
            if doc.build().is_ok_and(|b| b == *space) {
                return doc;
            }
        }
        let id = |i: usize| space.ground().id(i).to_string();
        SpaceDocument::Explicit {
            entourages: space
                .generators()
                .iter()
                .map(|g| g.pairs().map(|(a, b)| (id(a), id(b))).collect())
                .collect(),
            bornology: space
                .bornology()
                .generators()
                .iter()
                .map(|b| b.ones().map(id).collect())
                .collect(),
            points,
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            SpaceDocument::Explicit {
                points,
                entourages,
                bornology,
            } => json!({
                "kind": "explicit",
                "points": points,
                "entourages": entourages
                    .iter()
                    .map(|g| g.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "bornology": bornology,
            }),
            SpaceDocument::Metric {
                points,
                distances,
                scales,
            } => json!({
                "kind": "metric",
                "points": points,
                "distances": distances
                    .iter()
                    .enumerate()
                    .map(|(i, row)| row[..=i].iter().map(|d| d.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "scales": scales.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            }),
            SpaceDocument::Builtin { kind, radius } => json!({
                "kind": "builtin",
                "name": kind.name(),
                "radius": radius,
            }),
        }
    }

    /// Canonical text: pretty JSON with sorted keys and a trailing newline.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("values serialize");
        s.push('\n');
        s
    }
}

fn strings(loc: &Locator, field: &str, v: &Value) -> Result<Vec<String>, ParseError> {
    v.as_array()
        .ok_or_else(|| loc.err(field, "expected a list of strings"))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| loc.err(field, format!("expected a string, found {s}")))
        })
        .collect()
}

fn pair(loc: &Locator, v: &Value) -> Result<(String, String), ParseError> {
    match v.as_array().map(Vec::as_slice) {
        Some([Value::String(a), Value::String(b)]) => Ok((a.clone(), b.clone())),
        _ => Err(loc.err("entourages", format!("expected a pair of point names, found {v}"))),
    }
}

fn rational(loc: &Locator, field: &str, v: &Value) -> Result<Rational, ParseError> {
    let parsed = match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n.as_i64().map(Rational::from_integer),
        _ => None,
    };
    parsed.ok_or_else(|| loc.err(field, format!("expected a rational \"p/q\", found {v}")))
}

/// Accepts strictly lower, lower-with-diagonal, or full square rows.
fn symmetric_from_rows(
    loc: &Locator,
    rows: Vec<Vec<Rational>>,
    n: usize,
) -> Result<Vec<Vec<Rational>>, ParseError> {
    if rows.len() != n {
        return Err(loc.err("distances", format!("{} rows for {n} points", rows.len())));
    }
    if n > 0 && rows.iter().all(|r| r.len() == n) {
        return Ok(rows);
    }
    let strict = rows.first().is_some_and(Vec::is_empty);
    let zero = Rational::from_integer(0);
    let mut full = vec![vec![zero; n]; n];
    for (i, row) in rows.iter().enumerate() {
        let expected = if strict { i } else { i + 1 };
        if row.len() != expected {
            return Err(loc.err(
                "distances",
                format!("row {i} has {} entries, expected {expected}", row.len()),
            ));
        }
        for (j, d) in row.iter().enumerate() {
            full[i][j] = *d;
            full[j][i] = *d;
        }
    }
    Ok(full)
}

pub fn parse_space(text: &str) -> Result<BornCoarseSpace, DocumentError> {
    Ok(SpaceDocument::parse(text)?.build()?)
}

pub fn emit_space(space: &BornCoarseSpace) -> String {
    SpaceDocument::from_space(space).emit()
}

/// Object with keys in lexicographic order.
pub(crate) fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
