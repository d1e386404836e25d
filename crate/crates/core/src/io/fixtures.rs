use crate::space::{BuiltinKind, Rational};

use super::document::SpaceDocument;

/// Names accepted wherever a space file is expected.
pub const FIXTURE_NAMES: &[&str] = &[
    "point",
    "hexagon",
    "cycle:N",
    "half_line:N",
    "int_window:N",
    "grid2_window:N",
];

/// `N` points on a cycle with the path metric and scale `3/2`, so that
/// `closure_at(1)` relates exactly the neighbours.
pub fn cycle_document(n: usize) -> SpaceDocument {
    let n_i = n as i64;
    SpaceDocument::Metric {
        points: (0..n).map(|i| i.to_string()).collect(),
        distances: (0..n_i)
            .map(|a| {
                (0..n_i)
                    .map(|b| {
                        let d = (a - b).rem_euclid(n_i);
                        Rational::from_integer(d.min(n_i - d))
                    })
                    .collect()
            })
            .collect(),
        scales: vec![Rational::new(3, 2)],
    }
}

/// Resolves `point`, `hexagon`, `cycle:N` and `<builtin>:N` (also `<builtin>(N)`).
pub fn fixture(name: &str) -> Option<SpaceDocument> {
    match name {
        "point" => {
            return Some(SpaceDocument::Explicit {
                points: vec!["*".into()],
                entourages: Vec::new(),
                bornology: vec![vec!["*".into()]],
            })
        }
        "hexagon" => return Some(cycle_document(6)),
        _ => {}
    }
    let (head, arg) = match name.split_once(':') {
        Some(p) => p,
        None => {
            let inner = name.strip_suffix(')')?;
            inner.split_once('(')?
        }
    };
    let n: u32 = arg.trim().parse().ok()?;
    if head == "cycle" {
        return (n >= 3).then(|| cycle_document(n as usize));
    }
    Some(SpaceDocument::Builtin {
        kind: BuiltinKind::from_name(head)?,
        radius: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{homology_at_scale, EngineConfig};

    #[test]
    fn names_resolve() {
        assert!(fixture("point").is_some());
        assert!(fixture("half_line:10").is_some());
        assert_eq!(fixture("int_window(3)"), fixture("int_window:3"));
        assert!(fixture("cycle:2").is_none());
        assert!(fixture("nope").is_none());
        assert!(fixture("half_line:x").is_none());
    }

    #[test]
    fn hexagon_is_a_circle_at_scale_one() {
        let x = fixture("hexagon").unwrap().build().unwrap();
        assert_eq!(x.closure_at(1).len(), 6 + 12);
        let h = homology_at_scale(&x, 1, 1, &EngineConfig::default()).unwrap();
        assert_eq!((h[0].free_rank, h[1].free_rank), (1, 1));
    }
}
