//! Truncated Eilenberg swindle on chains supported in a bounded set.
//!
//! With `S_J = Σ_{j=0..J} C(f^j)` one has `C(f)∘S_J = S_J − id + C(f^(J+1))`
//! exactly. When `f^(J+1)(X)` misses `B`, the last term vanishes after
//! projecting onto tuples meeting `B`, so the checked identity is
//! `π_B(C(f)∘S_J(σ)) = π_B(S_J(σ) − σ)` for every basis tuple `σ` supported in `B`.

use std::collections::BTreeMap;

use super::chains::{enumerate, is_degenerate, TupleFilter};
use super::{EngineConfig, HomologyError};
use crate::morphisms::{same_space, SpaceMap};
use crate::space::PointSet;

type Chain = BTreeMap<Vec<u32>, i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwindleReport {
    pub degree: usize,
    pub scale: usize,
    pub depth: usize,
    /// Number of basis tuples supported in the bounded set.
    pub checked: usize,
    /// First tuple where the projected identity fails.
    pub failure: Option<Vec<usize>>,
}

impl SwindleReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

fn push(chain: &mut Chain, t: Vec<u32>, c: i64) {
    if is_degenerate(&t) {
        return;
    }
    let e = chain.entry(t).or_insert(0);
    *e += c;
}

fn apply(chain: &Chain, table: &[usize]) -> Chain {
    let mut out = Chain::new();
    for (t, &c) in chain {
        push(&mut out, t.iter().map(|&v| table[v as usize] as u32).collect(), c);
    }
    out
}

fn project(chain: Chain, b: &PointSet) -> Chain {
    chain
        .into_iter()
        .filter(|(t, c)| *c != 0 && t.iter().any(|&v| b.contains(v as usize)))
        .collect()
}

pub fn swindle_identity_check(
    f: &SpaceMap,
    bounded: &PointSet,
    k: usize,
    n: usize,
    depth: usize,
    config: &EngineConfig,
) -> Result<SwindleReport, HomologyError> {
    if !same_space(f.source(), f.target()) {
        return Err(HomologyError::SourceTargetMismatch);
    }
    let space = f.source();
    let escape = f.power(depth + 1).map_err(|_| HomologyError::SourceTargetMismatch)?;
    if escape.table().iter().any(|&y| bounded.contains(y)) {
        return Err(HomologyError::WindowTooSmall { depth });
    }
    let powers: Vec<Vec<usize>> = (0..=depth)
        .map(|j| f.power(j).map(|p| p.table().to_vec()))
        .collect::<Result<_, _>>()
        .map_err(|_| HomologyError::SourceTargetMismatch)?;
    let basis = enumerate(
        &space.closure_at(k),
        n,
        TupleFilter {
            support: Some(bounded),
            quotient: None,
        },
        config.basis_cap,
    )?;
    let mut failure = None;
    for t in basis.iter() {
        let sigma: Chain = [(t.to_vec(), 1)].into_iter().collect();
        let mut s = Chain::new();
        for p in &powers {
            for (u, c) in apply(&sigma, p) {
                push(&mut s, u, c);
            }
        }
        let lhs = project(apply(&s, f.table()), bounded);
        let mut rhs = s;
        push(&mut rhs, t.to_vec(), -1);
        let rhs = project(rhs, bounded);
        if lhs != rhs {
            failure = Some(t.iter().map(|&v| v as usize).collect());
            break;
        }
    }
    Ok(SwindleReport {
        degree: n,
        scale: k,
        depth,
        checked: basis.len(),
        failure,
    })
}
