use std::sync::Arc;

use super::document::ParseError;
use crate::morphisms::{MorphismError, SpaceMap};
use crate::space::{BornCoarseSpace, PointSet, SpaceError};

/// A parsed map file: two space references, then one assignment per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFile {
    pub source: String,
    pub target: String,
    /// `(source id, target id, line)`.
    pub pairs: Vec<(String, String, usize)>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl MapFile {
    /// Assignments use `->` or `→`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(text);
        let mut reference = |field: &str| {
            lines
                .next()
                .map(|(_, l)| l.to_string())
                .ok_or_else(|| ParseError {
                    line: text.lines().count().max(1),
                    field: field.into(),
                    message: "missing space reference".into(),
                })
        };
        let source = reference("source")?;
        let target = reference("target")?;
        let pairs = lines
            .map(|(n, l)| {
                let (a, b) = l
                    .split_once("->")
                    .or_else(|| l.split_once('→'))
                    .ok_or_else(|| ParseError {
                        line: n,
                        field: "assignment".into(),
                        message: format!("expected `a -> b`, found `{l}`"),
                    })?;
                Ok((a.trim().to_string(), b.trim().to_string(), n))
            })
            .collect::<Result<_, ParseError>>()?;
        Ok(MapFile {
            source,
            target,
            pairs,
        })
    }

    pub fn build(
        &self,
        source: Arc<BornCoarseSpace>,
        target: Arc<BornCoarseSpace>,
    ) -> Result<SpaceMap, MorphismError> {
        let pairs: Vec<(&str, &str)> = self.pairs.iter().map(|(a, b, _)| (a.as_str(), b.as_str())).collect();
        SpaceMap::from_pairs(source, target, &pairs)
    }

    pub fn emit(f: &SpaceMap, source: &str, target: &str) -> String {
        let mut s = format!("{source}\n{target}\n");
        for (a, b) in f.pairs() {
            s.push_str(&format!("{a} -> {b}\n"));
        }
        s
    }
}

/// Named self-maps of a given space: `identity`, `shift` (translate by 1),
/// `translate:a[,b]` (window-clamped), and `const:ID`.
pub fn named_map(space: &Arc<BornCoarseSpace>, name: &str) -> Option<Result<SpaceMap, MorphismError>> {
    let (head, arg) = name.split_once(':').unwrap_or((name, ""));
    match head {
        "identity" if arg.is_empty() => Some(Ok(SpaceMap::identity(space.clone()))),
        "shift" if arg.is_empty() => {
            let dims = space.window().map_or(1, |w| w.coords.first().map_or(1, Vec::len));
            let mut offset = vec![0; dims];
            offset[0] = 1;
            Some(SpaceMap::translate(space.clone(), &offset))
        }
        "translate" => {
            let offset: Option<Vec<i64>> = arg.split(',').map(|t| t.trim().parse().ok()).collect();
            offset.map(|o| SpaceMap::translate(space.clone(), &o))
        }
        "const" if !arg.is_empty() => Some(
            space
                .ground()
                .position(arg)
                .map_err(MorphismError::from)
                .and_then(|y| SpaceMap::new(space.clone(), space.clone(), vec![y; space.len()])),
        ),
        _ => None,
    }
}

/// Splits on commas and whitespace outside parentheses.
fn tokens(spec: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in spec.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' | ' ' | '\t' | '\n' if depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// A subset given as point ids separated by commas or spaces; `m..n` expands
/// to the integer ids `m, …, n`, and `*` selects every point.
pub fn parse_subset(space: &BornCoarseSpace, spec: &str) -> Result<PointSet, SpaceError> {
    let mut set = PointSet::with_capacity(space.len());
    for t in tokens(spec) {
        if t == "*" {
            set.insert_range(..);
            continue;
        }
        let range = t
            .split_once("..")
            .and_then(|(a, b)| Some((a.parse::<i64>().ok()?, b.parse::<i64>().ok()?)));
        match range {
            Some((a, b)) => {
                for i in a..=b {
                    set.insert(space.ground().position(&i.to_string())?);
                }
            }
            None => set.insert(space.ground().position(&t)?),
        }
    }
    Ok(set)
}

/// Nested members separated by `|`.
pub fn parse_family(space: &BornCoarseSpace, spec: &str) -> Result<Vec<PointSet>, SpaceError> {
    spec.split('|').map(|m| parse_subset(space, m)).collect()
}
